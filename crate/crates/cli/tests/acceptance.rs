// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Set `FULL=1` to extend criterion 1 to six vertices. The process exits
//! non-zero when any criterion departs from its pinned outcome.

#![allow(clippy::absurd_extreme_comparisons)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use twoblock::generators::{random_oriented_graph, regular_tournament};
use twoblock::harness::{enumerate_oriented_graphs, CampaignReport};
use twoblock::io::parse_edge_list;
use twoblock::rng::SplitMix64;
use twoblock::search::{check_embedding, find_oriented_path, Sign, SignPattern};
use twoblock::{Campaign, Flavor, OrientedGraph, ProofEngine, SearchBudget};

const MAX_VIOLATIONS: usize = 0;
const MAX_FALLBACK_USES: u64 = 0;
const MAIN_N_MAX: usize = 5;
const MAIN_N_MAX_FULL: usize = 6;
const MAIN_KS: [usize; 5] = [1, 2, 3, 4, 5];
const SHARPNESS_KS: [&str; 3] = ["5", "7", "9"];
const KPRIMES: [usize; 2] = [1, 2];
const DEGREE_N_MAX: usize = 6;
const DEGREE_SAMPLES: u64 = 10_000;
const GRUNBAUM_N_MAX: usize = 7;
const GRUNBAUM_FAILURES: [(usize, u64); 3] = [(3, 2), (5, 24), (7, 240)];
const REDEI_N_MAX: usize = 6;
const REDEI_SAMPLES: u64 = 1_000;
const ORACLE_N_MAX: usize = 5;
const ORACLE_PATTERN_MAX: usize = 4;
const ROUND_TRIPS: usize = 1_000;
/// Labelled four-vertex graphs with minimum semi-degree one and no
/// Hamiltonian cycle.
const JACKSON_K1_COUNTEREXAMPLES: usize = 12;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    /// A failure whose exact extent is pinned; anything else is a regression.
    expected_fail: bool,
    detail: String,
}

fn line(o: &Outcome, secs: f64) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    let note = if o.expected_fail { " [pinned]" } else { "" };
    println!("{verdict} {:>2} {}: {} ({secs:.1}s){note}", o.id, o.title, o.detail);
}

fn clean(r: &CampaignReport) -> bool {
    r.violations.len() <= MAX_VIOLATIONS && r.fallback_uses <= MAX_FALLBACK_USES
}

fn counts(r: &CampaignReport) -> String {
    format!("{} instances, {} violations, {} fallback", r.instances_checked, r.violations.len(), r.fallback_uses)
}

fn campaign() -> Campaign {
    Campaign::default()
}

fn main_theorem() -> Outcome {
    let n_max = if std::env::var("FULL").is_ok_and(|v| v == "1") { MAIN_N_MAX_FULL } else { MAIN_N_MAX };
    let r = campaign().verify_theorem_main(n_max, &MAIN_KS).expect("campaign runs");
    Outcome {
        id: "1",
        title: "two-block paths, all oriented graphs",
        pass: clean(&r),
        expected_fail: false,
        detail: format!("n <= {n_max}, k 1..5: {}", counts(&r)),
    }
}

/// The exhaustive range never reaches the rotation cascade; exercise it on
/// denser random graphs and regular tournaments.
fn cascade_stress() -> Outcome {
    let engine = ProofEngine::default();
    let mut graphs = Vec::new();
    for n in 11..=16 {
        for d in 3..=(n - 1) / 2 {
            for seed in 0..3 {
                graphs.push(random_oriented_graph(n, d, seed).unwrap());
            }
        }
    }
    for n in [11, 13, 15, 17] {
        graphs.push(regular_tournament(n).unwrap());
    }
    let (mut calls, mut bad, mut fallback) = (0u64, 0u64, 0u64);
    let mut rules = BTreeMap::new();
    for g in &graphs {
        let d = g.min_semi_degree();
        for k in (5..2 * d).rev().take(2) {
            for s in 0..=k {
                for flavor in [Flavor::P, Flavor::Q] {
                    calls += 1;
                    match engine.find_two_block(g, s, k - s, flavor) {
                        Ok(Some(w)) if check_embedding(g, &w.embedding) && w.hypothesis_met => {
                            fallback += u64::from(w.used_fallback);
                            for r in w.trace {
                                *rules.entry(r.name()).or_insert(0u64) += 1;
                            }
                        }
                        _ => bad += 1,
                    }
                }
            }
        }
    }
    Outcome {
        id: "1b",
        title: "proof engine on k >= 5",
        pass: bad == 0 && fallback <= MAX_FALLBACK_USES,
        expected_fail: false,
        detail: format!(
            "{} graphs, {calls} calls, {bad} invalid, {fallback} fallback; rules {}",
            graphs.len(),
            rules.iter().map(|(r, c)| format!("{r}={c}")).collect::<Vec<_>>().join(" ")
        ),
    }
}

fn sharpness(dir: &Path) -> Outcome {
    let report = dir.join("sharpness.json");
    let mut args = vec!["verify", "--suite", "sharpness", "--k"];
    args.extend(SHARPNESS_KS);
    args.extend(["--report", report.to_str().unwrap()]);
    let status = Command::new(env!("CARGO_BIN_EXE_twoblock")).args(&args).output().unwrap().status;
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let v = r["violations"].as_array().map_or(usize::MAX, Vec::len);
    Outcome {
        id: "2",
        title: "sharpness of RT_k + RT_k",
        pass: status.code() == Some(0) && v <= MAX_VIOLATIONS,
        expected_fail: false,
        detail: format!("k 5,7,9: {} instances, {v} violations", r["instancesChecked"]),
    }
}

fn has_cycle_through_all(g: &OrientedGraph) -> bool {
    let n = g.n();
    let mut perm: Vec<usize> = (1..n).collect();
    fn rec(g: &OrientedGraph, path: &mut Vec<usize>, rest: &mut Vec<usize>) -> bool {
        if rest.is_empty() {
            return g.has_arc(*path.last().unwrap(), path[0]);
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            if g.has_arc(*path.last().unwrap(), v) {
                path.push(v);
                if rec(g, path, rest) {
                    return true;
                }
                path.pop();
            }
            rest.insert(i, v);
        }
        false
    }
    n > 0 && rec(g, &mut vec![0], &mut perm)
}

fn min_semi_naive(g: &OrientedGraph) -> usize {
    (0..g.n())
        .map(|v| {
            let out = (0..g.n()).filter(|&w| g.has_arc(v, w)).count();
            let inn = (0..g.n()).filter(|&w| g.has_arc(w, v)).count();
            out.min(inn)
        })
        .min()
        .unwrap_or(0)
}

fn jackson() -> Outcome {
    let c = campaign();
    let reports: Vec<CampaignReport> = KPRIMES
        .iter()
        .map(|&kp| c.verify_jackson(kp, DEGREE_N_MAX, DEGREE_SAMPLES, 0).expect("campaign runs"))
        .collect();
    // Independent listing of the small Hamiltonicity failures at k' = 1.
    let mut expected = BTreeSet::new();
    for n in 1..=4 {
        for g in enumerate_oriented_graphs(n).unwrap() {
            if min_semi_naive(&g) >= 1 && !has_cycle_through_all(&g) {
                expected.insert(g.arcs().collect::<Vec<_>>());
            }
        }
    }
    let found: BTreeSet<Vec<(usize, usize)>> = reports[0]
        .violations
        .iter()
        .map(|v| parse_edge_list(&v.edge_list).unwrap().arcs().collect())
        .collect();
    let pinned = expected.len() == JACKSON_K1_COUNTEREXAMPLES
        && found == expected
        && reports[0].violations.len() == JACKSON_K1_COUNTEREXAMPLES
        && clean(&reports[1]);
    let all_clean = reports.iter().all(clean);
    Outcome {
        id: "3",
        title: "directed path / Hamiltonicity at k' = 1, 2",
        pass: all_clean,
        expected_fail: !all_clean && pinned,
        detail: format!(
            "k'=1: {}; k'=2: {}; k'=1 violations are the {} four-vertex graphs a -> {{b, c}} -> d -> a \
             with b, c non-adjacent (min semi-degree 1, n = 2k'+2, no Hamiltonian cycle)",
            counts(&reports[0]),
            counts(&reports[1]),
            expected.len()
        ),
    }
}

fn zhang() -> Outcome {
    let c = campaign();
    let reports: Vec<CampaignReport> = KPRIMES
        .iter()
        .map(|&kp| c.verify_zhang(kp, DEGREE_N_MAX, DEGREE_SAMPLES, 0).expect("campaign runs"))
        .collect();
    Outcome {
        id: "4",
        title: "long path or long cycle at k' = 1, 2",
        pass: reports.iter().all(clean),
        expected_fail: false,
        detail: format!("k'=1: {}; k'=2: {}", counts(&reports[0]), counts(&reports[1])),
    }
}

fn grunbaum() -> Outcome {
    let r = campaign().verify_grunbaum(GRUNBAUM_N_MAX).expect("campaign runs");
    let mut tallies_ok = r.tallies.len() == GRUNBAUM_FAILURES.len();
    let mut shown = Vec::new();
    for (n, want) in GRUNBAUM_FAILURES {
        let got = r.tallies.get(&format!("failures_n{n}")).copied().unwrap_or(0);
        tallies_ok &= got == want;
        shown.push(format!("n{n}={got}"));
    }
    Outcome {
        id: "5",
        title: "antidirected Hamiltonian path exceptions",
        pass: clean(&r) && tallies_ok,
        expected_fail: false,
        detail: format!("n 3..7: {}; failures {}", counts(&r), shown.join(" ")),
    }
}

fn redei() -> Outcome {
    let r = campaign().verify_redei_parity(REDEI_N_MAX, REDEI_SAMPLES, 0).expect("campaign runs");
    Outcome {
        id: "6",
        title: "odd Hamiltonian path counts",
        pass: clean(&r),
        expected_fail: false,
        detail: format!("n <= 6 exhaustive + 10^3 per n in 7..10: {}", counts(&r)),
    }
}

fn naive_embeds(g: &OrientedGraph, signs: &[Sign]) -> bool {
    fn rec(g: &OrientedGraph, signs: &[Sign], seq: &mut Vec<usize>) -> bool {
        let i = seq.len() - 1;
        if i == signs.len() {
            return true;
        }
        for v in 0..g.n() {
            if seq.contains(&v) {
                continue;
            }
            let u = seq[i];
            let ok = match signs[i] {
                Sign::Forward => g.has_arc(u, v),
                Sign::Backward => g.has_arc(v, u),
            };
            if ok {
                seq.push(v);
                if rec(g, signs, seq) {
                    return true;
                }
                seq.pop();
            }
        }
        false
    }
    (0..g.n()).any(|s| rec(g, signs, &mut vec![s]))
}

fn oracle() -> Outcome {
    let mut patterns = vec![Vec::new()];
    for len in 1..=ORACLE_PATTERN_MAX {
        for bits in 0..1u32 << len {
            patterns.push((0..len).map(|i| if bits >> i & 1 == 0 { Sign::Forward } else { Sign::Backward }).collect());
        }
    }
    let (mut checked, mut disagree) = (0u64, 0u64);
    for n in 1..=ORACLE_N_MAX {
        for g in enumerate_oriented_graphs(n).unwrap() {
            for p in &patterns {
                checked += 1;
                let fast = find_oriented_path(&g, &SignPattern::new(p.clone()), SearchBudget::default())
                    .unwrap()
                    .is_some_and(|e| check_embedding(&g, &e));
                if fast != naive_embeds(&g, p) {
                    disagree += 1;
                }
            }
        }
    }
    Outcome {
        id: "7",
        title: "backtracking vs permutation oracle",
        pass: disagree == 0,
        expected_fail: false,
        detail: format!("n <= 5, {} patterns of length <= 4: {checked} pairs, {disagree} disagreements", patterns.len()),
    }
}

fn cli(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_twoblock"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap_or(-1)
}

struct Case {
    n: usize,
    d: usize,
    seed: u64,
    specs: Vec<(usize, usize, &'static str)>,
}

fn round_trip_cases() -> Vec<Case> {
    let mut rng = SplitMix64::new(2024);
    let mut cases = Vec::new();
    let mut total = 0;
    while total < ROUND_TRIPS {
        let n = 4 + rng.below(11) as usize;
        let d = 1 + rng.below(((n - 1) / 2) as u64) as usize;
        let specs: Vec<_> = (0..4)
            .map(|_| {
                let k = 1 + rng.below((2 * d - 1) as u64) as usize;
                let s = rng.below(k as u64 + 1) as usize;
                (s, k - s, if rng.coin() { "p" } else { "q" })
            })
            .collect();
        total += specs.len();
        cases.push(Case { n, d, seed: rng.next_u64() >> 1, specs });
    }
    cases
}

/// Generates, proves and checks every case under `dir`; returns the number
/// of cycles that failed.
fn round_trips(dir: &Path, cases: &[Case], check: bool) -> usize {
    let mut failed = 0;
    for (i, c) in cases.iter().enumerate() {
        let graph = format!("g{i}.el");
        let (n, d, seed) = (c.n.to_string(), c.d.to_string(), c.seed.to_string());
        let gen = ["gen", "--family", "random-og", "--n", &n, "--delta", &d, "--seed", &seed, "-o", &graph];
        if cli(dir, &gen) != 0 {
            failed += c.specs.len();
            continue;
        }
        for (j, &(s, t, flavor)) in c.specs.iter().enumerate() {
            let w = format!("w{i}_{j}.json");
            let (s, t) = (s.to_string(), t.to_string());
            let ok = cli(dir, &["prove", "-i", &graph, "--s", &s, "--t", &t, "--flavor", flavor, "--witness", &w]) == 0
                && (!check || cli(dir, &["check", "-i", &graph, "--witness", &w]) == 0);
            failed += usize::from(!ok);
        }
    }
    for (tag, args) in [
        ("main.json", ["verify", "--suite", "main", "--n-max", "4", "--report", "main.json"].as_slice()),
        ("scan.json", ["scan", "--n", "8", "--k", "5", "--samples", "200", "--seed", "3", "--report", "scan.json"].as_slice()),
        ("redei.json", ["verify", "--suite", "redei", "--n-max", "5", "--samples", "50", "--report", "redei.json"].as_slice()),
    ] {
        failed += usize::from(cli(dir, args) != 0 || !dir.join(tag).exists());
    }
    failed
}

fn differing_files(a: &Path, b: &Path) -> usize {
    let mut names: Vec<_> = std::fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut differ = 0;
    for name in &names {
        if std::fs::read(a.join(name)).ok() != std::fs::read(b.join(name)).ok() {
            differ += 1;
        }
    }
    differ + std::fs::read_dir(b).unwrap().count().abs_diff(names.len())
}

fn round_trip() -> Outcome {
    let cases = round_trip_cases();
    let cycles: usize = cases.iter().map(|c| c.specs.len()).sum();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let failed_a = round_trips(a.path(), &cases, true);
    let failed_b = round_trips(b.path(), &cases, false);
    let files = std::fs::read_dir(a.path()).unwrap().count();
    let differ = differing_files(a.path(), b.path());
    Outcome {
        id: "8",
        title: "prove -> check round trips, byte stability",
        pass: failed_a == 0 && failed_b == 0 && differ == 0,
        expected_fail: false,
        detail: format!("{cycles} cycles over {} graphs, {failed_a} failed; {files} files, {differ} differ between runs", cases.len()),
    }
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<Box<dyn Fn() -> Outcome>> = vec![
        Box::new(main_theorem),
        Box::new(cascade_stress),
        Box::new(|| sharpness(dir.path())),
        Box::new(jackson),
        Box::new(zhang),
        Box::new(grunbaum),
        Box::new(redei),
        Box::new(oracle),
        Box::new(round_trip),
    ];
    let mut regressions = 0;
    for criterion in &criteria {
        let started = Instant::now();
        let o = criterion();
        line(&o, started.elapsed().as_secs_f64());
        regressions += usize::from(!o.pass && !o.expected_fail);
    }
    if regressions > 0 {
        println!("{regressions} criteria departed from their pinned outcome");
        std::process::exit(1);
    }
}
