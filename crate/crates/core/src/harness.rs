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

//! Verification campaigns over exhaustive and sampled corpora.
//!
//! Labelled graphs are addressed by an index: for oriented graphs each pair
//! `i < j` (lexicographic) is a base-3 digit, least significant first, with
//! 0 = no arc, 1 = `i -> j`, 2 = `j -> i`; tournaments use one bit per pair,
//! 0 = `i -> j`. Index ranges are split into fixed-size chunks that run in
//! parallel; chunk results merge in index order, so reports do not depend on
//! the number of worker threads.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::ProofEngine;
use crate::generators::{
    paley_tournament, random_oriented_graph, random_tournament, regular_tournament, GenError,
};
use crate::graph::OrientedGraph;
use crate::io::write_edge_list;
use crate::rng::{derive_seed, SplitMix64};
use crate::search::{
    check_embedding, count_hamiltonian_directed_paths, find_oriented_path,
    has_hamiltonian_antidirected_path, is_hamiltonian, is_isomorphic, longest_directed_cycle,
    longest_directed_path, pattern_two_block, Flavor, SearchBudget, SearchError,
};

/// Largest order enumerated exhaustively for oriented graphs.
pub const MAX_ORIENTED_ENUM: usize = 6;
/// Largest order enumerated exhaustively for tournaments.
pub const MAX_TOURNAMENT_ENUM: usize = 7;

const CHUNK: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("{what} enumeration at n = {n} exceeds the limit n <= {max}")]
    TooLarge { what: &'static str, n: usize, max: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// A failing instance, self-contained enough to reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub n: usize,
    pub index: u64,
    pub edge_list: String,
    pub detail: String,
}

/// One row of a threshold scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    pub min_semi: usize,
    pub samples: u64,
    pub containing: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignReport {
    pub suite: String,
    pub params: Value,
    pub instances_checked: u64,
    pub violations: Vec<Violation>,
    pub fallback_uses: u64,
    pub wall_time_sec: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<ScanRow>>,
    /// Named counters for tests; not serialised.
    #[serde(skip)]
    pub tallies: BTreeMap<String, u64>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }

    /// Concatenates reports of one suite run under several parameter sets.
    pub fn combine(suite: &str, params: Value, parts: Vec<CampaignReport>) -> CampaignReport {
        let mut out = CampaignReport {
            suite: suite.to_owned(),
            params,
            instances_checked: 0,
            violations: Vec::new(),
            fallback_uses: 0,
            wall_time_sec: 0.0,
            table: None,
            tallies: BTreeMap::new(),
        };
        for p in parts {
            out.instances_checked += p.instances_checked;
            out.violations.extend(p.violations);
            out.fallback_uses += p.fallback_uses;
            out.wall_time_sec += p.wall_time_sec;
            for (k, v) in p.tallies {
                *out.tallies.entry(k).or_default() += v;
            }
        }
        out
    }
}

#[derive(Debug, Default)]
struct Partial {
    checked: u64,
    fallback: u64,
    violations: Vec<Violation>,
    tallies: BTreeMap<String, u64>,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        self.checked += other.checked;
        self.fallback += other.fallback;
        self.violations.extend(other.violations);
        for (k, v) in other.tallies {
            *self.tallies.entry(k).or_default() += v;
        }
    }

    fn tally(&mut self, key: impl Into<String>) {
        *self.tallies.entry(key.into()).or_default() += 1;
    }

    fn violate(&mut self, g: &OrientedGraph, index: u64, detail: String) {
        self.violations.push(Violation { n: g.n(), index, edge_list: write_edge_list(g), detail });
    }
}

fn pair_count(n: usize) -> u32 {
    (n * n.saturating_sub(1) / 2) as u32
}

/// `3^C(n,2)`.
pub fn oriented_graph_count(n: usize) -> Result<u64, HarnessError> {
    if n > MAX_ORIENTED_ENUM {
        return Err(HarnessError::TooLarge { what: "oriented graph", n, max: MAX_ORIENTED_ENUM });
    }
    Ok(3u64.pow(pair_count(n)))
}

/// `2^C(n,2)`.
pub fn tournament_count(n: usize) -> Result<u64, HarnessError> {
    if n > MAX_TOURNAMENT_ENUM {
        return Err(HarnessError::TooLarge { what: "tournament", n, max: MAX_TOURNAMENT_ENUM });
    }
    Ok(1u64 << pair_count(n))
}

/// The oriented graph with the given enumeration index.
pub fn oriented_graph_at(n: usize, mut index: u64) -> OrientedGraph {
    let mut out = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            match index % 3 {
                1 => out[i] |= 1 << j,
                2 => out[j] |= 1 << i,
                _ => {}
            }
            index /= 3;
        }
    }
    OrientedGraph::from_out_rows_unchecked(n, out)
}

/// The tournament with the given enumeration index.
pub fn tournament_at(n: usize, index: u64) -> OrientedGraph {
    let mut out = vec![0u64; n];
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if index >> bit & 1 == 0 {
                out[i] |= 1 << j;
            } else {
                out[j] |= 1 << i;
            }
            bit += 1;
        }
    }
    OrientedGraph::from_out_rows_unchecked(n, out)
}

pub fn enumerate_oriented_graphs(
    n: usize,
) -> Result<impl Iterator<Item = OrientedGraph>, HarnessError> {
    let total = oriented_graph_count(n)?;
    Ok((0..total).map(move |i| oriented_graph_at(n, i)))
}

pub fn enumerate_tournaments(n: usize) -> Result<impl Iterator<Item = OrientedGraph>, HarnessError> {
    let total = tournament_count(n)?;
    Ok((0..total).map(move |i| tournament_at(n, i)))
}

/// Seed of the `j`-th sample at order `n` under a campaign master seed.
pub fn sample_seed(master: u64, n: usize, j: u64) -> u64 {
    derive_seed(master, (n as u64) << 32 | j)
}

/// Shared campaign settings.
#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct Campaign {
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    /// Record wall time; off by default so reports are byte-stable.
    pub timing: bool,
    pub budget: SearchBudget,
    pub engine: ProofEngine,
}


impl Campaign {
    fn pool(&self) -> Result<rayon::ThreadPool, HarnessError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            b = b.num_threads(j.max(1));
        }
        b.build().map_err(|e| HarnessError::Pool(e.to_string()))
    }

    fn sharded<F>(&self, pool: &rayon::ThreadPool, total: u64, f: F) -> Result<Partial, HarnessError>
    where
        F: Fn(u64, &mut Partial) -> Result<(), HarnessError> + Sync,
    {
        let chunks = total.div_ceil(CHUNK);
        let parts: Vec<Partial> = pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = Partial::default();
                    for i in c * CHUNK..total.min((c + 1) * CHUNK) {
                        f(i, &mut acc)?;
                    }
                    Ok(acc)
                })
                .collect::<Result<_, HarnessError>>()
        })?;
        let mut all = Partial::default();
        for p in parts {
            all.merge(p);
        }
        Ok(all)
    }

    fn report(&self, suite: &str, params: Value, p: Partial, started: Instant) -> CampaignReport {
        CampaignReport {
            suite: suite.to_owned(),
            params,
            instances_checked: p.checked,
            violations: p.violations,
            fallback_uses: p.fallback,
            wall_time_sec: if self.timing { started.elapsed().as_secs_f64() } else { 0.0 },
            table: None,
            tallies: p.tallies,
        }
    }

    /// Checks one graph for every `k` in `ks`, every split and both flavors.
    /// Returns the number of `(k, s, flavor)` instances checked.
    fn check_main_instance(
        &self,
        g: &OrientedGraph,
        index: u64,
        ks: &[usize],
        acc: &mut Partial,
    ) -> Result<(), HarnessError> {
        let d = g.min_semi_degree();
        for &k in ks {
            if 2 * d <= k {
                continue;
            }
            for s in 0..=k {
                let t = k - s;
                for flavor in [Flavor::P, Flavor::Q] {
                    acc.checked += 1;
                    if let Some(problem) = main_instance_problem(&self.engine, g, s, t, flavor, acc)? {
                        acc.violate(g, index, format!("s={s} t={t} flavor={flavor}: {problem}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every labelled oriented graph on `1..=n_max` vertices, every `k` in `ks`.
    pub fn verify_theorem_main(&self, n_max: usize, ks: &[usize]) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        if ks.contains(&0) {
            return Err(HarnessError::Param("k must be positive".into()));
        }
        let pool = self.pool()?;
        let mut all = Partial::default();
        for n in 1..=n_max {
            let total = oriented_graph_count(n)?;
            all.merge(self.sharded(&pool, total, |i, acc| {
                let g = oriented_graph_at(n, i);
                self.check_main_instance(&g, i, ks, acc)
            })?);
        }
        let params = json!({ "nMax": n_max, "kSet": ks });
        Ok(self.report("main", params, all, started))
    }

    /// Directed path of length `2k'` when `n > 2k' + 2`, Hamiltonian cycle otherwise.
    pub fn verify_jackson(
        &self,
        k_prime: usize,
        n_max: usize,
        samples: u64,
        seed: u64,
    ) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        let check = |g: &OrientedGraph, i: u64, acc: &mut Partial| -> Result<(), HarnessError> {
            if g.n() == 0 || g.min_semi_degree() < k_prime {
                return Ok(());
            }
            acc.checked += 1;
            let n = g.n();
            if n > 2 * k_prime + 2 {
                let arcs = longest_directed_path(g, self.budget)?.len();
                if arcs < 2 * k_prime {
                    acc.violate(g, i, format!("longest directed path has {arcs} arcs < {}", 2 * k_prime));
                }
            } else if !is_hamiltonian(g, self.budget)? {
                acc.violate(g, i, "not Hamiltonian".into());
            }
            Ok(())
        };
        let all = self.exhaustive_plus_samples(k_prime, n_max, samples, seed, check)?;
        let params = json!({ "kPrime": k_prime, "nMax": n_max, "samples": samples, "seed": seed });
        Ok(self.report("jackson", params, all, started))
    }

    /// Directed path of length `2k' + 2` or directed cycle of length `2k' + 1`.
    pub fn verify_zhang(
        &self,
        k_prime: usize,
        n_max: usize,
        samples: u64,
        seed: u64,
    ) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        let check = |g: &OrientedGraph, i: u64, acc: &mut Partial| -> Result<(), HarnessError> {
            if g.n() == 0 || g.min_semi_degree() < k_prime {
                return Ok(());
            }
            acc.checked += 1;
            let path = longest_directed_path(g, self.budget)?.len();
            if path >= 2 * k_prime + 2 {
                return Ok(());
            }
            let cycle = longest_directed_cycle(g, self.budget)?.map_or(0, |c| c.len());
            if cycle < 2 * k_prime + 1 {
                acc.violate(g, i, format!("longest path {path} arcs, longest cycle {cycle}"));
            }
            Ok(())
        };
        let all = self.exhaustive_plus_samples(k_prime, n_max, samples, seed, check)?;
        let params = json!({ "kPrime": k_prime, "nMax": n_max, "samples": samples, "seed": seed });
        Ok(self.report("zhang", params, all, started))
    }

    /// Exhaustive `n <= n_max`, then `samples` random graphs with
    /// `min_semi >= k'` at each `n` in `{7, 8}`.
    fn exhaustive_plus_samples<F>(
        &self,
        k_prime: usize,
        n_max: usize,
        samples: u64,
        seed: u64,
        check: F,
    ) -> Result<Partial, HarnessError>
    where
        F: Fn(&OrientedGraph, u64, &mut Partial) -> Result<(), HarnessError> + Sync,
    {
        let pool = self.pool()?;
        let mut all = Partial::default();
        for n in 1..=n_max {
            all.merge(self.sharded(&pool, oriented_graph_count(n)?, |i, acc| {
                check(&oriented_graph_at(n, i), i, acc)
            })?);
        }
        for n in [7, 8] {
            all.merge(self.sharded(&pool, samples, |j, acc| {
                let g = random_oriented_graph(n, k_prime, sample_seed(seed, n, j))?;
                check(&g, j, acc)
            })?);
        }
        Ok(all)
    }

    /// `RT_k + RT_k` has semi-degree `(k-1)/2` and no oriented path of length `k`
    /// with two blocks (or one).
    pub fn verify_sharpness(&self, ks: &[usize]) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        let mut all = Partial::default();
        for (i, &k) in ks.iter().enumerate() {
            let rt = regular_tournament(k)?;
            let g = rt.disjoint_union(&rt).map_err(GenError::from)?;
            let d = g.min_semi_degree();
            if d != (k - 1) / 2 {
                all.violate(&g, i as u64, format!("min semi-degree {d}, expected {}", (k - 1) / 2));
            }
            for s in 0..=k {
                for flavor in [Flavor::P, Flavor::Q] {
                    all.checked += 1;
                    if let Some(e) = find_oriented_path(&g, &pattern_two_block(s, k - s, flavor), self.budget)? {
                        all.violate(&g, i as u64, format!("found {} at {:?}", e.pattern, e.vertices));
                    }
                }
            }
        }
        Ok(self.report("sharpness", json!({ "k": ks }), all, started))
    }

    /// Exceptions lack antidirected Hamiltonian paths; every other labelled
    /// tournament on `3..=n_max` vertices has one.
    pub fn verify_grunbaum(&self, n_max: usize) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        let pool = self.pool()?;
        let exceptions: BTreeMap<usize, OrientedGraph> = [
            (3, paley_tournament(3)?),
            (5, regular_tournament(5)?),
            (7, paley_tournament(7)?),
        ]
        .into_iter()
        .collect();
        let mut all = Partial::default();
        for (i, g) in exceptions.values().enumerate() {
            all.checked += 1;
            if has_hamiltonian_antidirected_path(g, self.budget)? {
                all.violate(g, i as u64, "exception has an antidirected Hamiltonian path".into());
            }
        }
        for n in 3..=n_max {
            let total = tournament_count(n)?;
            let exception = exceptions.get(&n);
            all.merge(self.sharded(&pool, total, |i, acc| {
                let g = tournament_at(n, i);
                acc.checked += 1;
                let has = has_hamiltonian_antidirected_path(&g, self.budget)?;
                let excluded = exception.is_some_and(|x| is_isomorphic(&g, x));
                if !has {
                    acc.tally(format!("failures_n{n}"));
                }
                if has == excluded {
                    let what = if has { "exception copy has" } else { "non-exception lacks" };
                    acc.violate(&g, i, format!("{what} an antidirected Hamiltonian path"));
                }
                Ok(())
            })?);
        }
        Ok(self.report("grunbaum", json!({ "nMax": n_max }), all, started))
    }

    /// Odd number of Hamiltonian directed paths: exhaustive for `n <= n_max`,
    /// `samples` random tournaments at each `n` in `7..=10`.
    pub fn verify_redei_parity(
        &self,
        n_max: usize,
        samples: u64,
        seed: u64,
    ) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        let pool = self.pool()?;
        let check = |g: &OrientedGraph, i: u64, acc: &mut Partial| -> Result<(), HarnessError> {
            acc.checked += 1;
            let c = count_hamiltonian_directed_paths(g, self.budget)?;
            if c % 2 == 0 {
                acc.violate(g, i, format!("{c} Hamiltonian directed paths"));
            }
            Ok(())
        };
        let mut all = Partial::default();
        for n in 1..=n_max {
            all.merge(self.sharded(&pool, tournament_count(n)?, |i, acc| {
                check(&tournament_at(n, i), i, acc)
            })?);
        }
        for n in 7..=10 {
            all.merge(self.sharded(&pool, samples, |j, acc| {
                check(&random_tournament(n, sample_seed(seed, n, j))?, j, acc)
            })?);
        }
        let params = json!({ "nMax": n_max, "samples": samples, "seed": seed });
        Ok(self.report("redei", params, all, started))
    }

    /// Containment fraction of all `P(s, k-s)` per exact minimum semi-degree.
    ///
    /// Rows with `2 d > k` and a fraction below 1 are violations.
    pub fn scan_threshold(
        &self,
        n: usize,
        k: usize,
        samples: u64,
        seed: u64,
    ) -> Result<CampaignReport, HarnessError> {
        let started = Instant::now();
        if n == 0 {
            return Err(HarnessError::Param("n must be positive".into()));
        }
        let pool = self.pool()?;
        let mut rows = Vec::new();
        let mut all = Partial::default();
        for d in 0..=(n - 1) / 2 {
            let p = self.sharded(&pool, samples, |j, acc| {
                let g = graph_with_exact_semi_degree(n, d, sample_seed(seed, d, j))?;
                acc.checked += 1;
                let mut contains = true;
                for s in 0..=k {
                    if find_oriented_path(&g, &pattern_two_block(s, k - s, Flavor::P), self.budget)?.is_none() {
                        contains = false;
                        break;
                    }
                }
                if contains {
                    acc.tally("containing");
                } else if 2 * d > k {
                    acc.violate(&g, j, format!("min semi-degree {d} but some P(s,{k}-s) is absent"));
                }
                Ok(())
            })?;
            let containing = p.tallies.get("containing").copied().unwrap_or(0);
            rows.push(ScanRow {
                min_semi: d,
                samples,
                containing,
                fraction: if samples == 0 { 0.0 } else { containing as f64 / samples as f64 },
            });
            all.merge(p);
        }
        all.tallies.clear();
        let params = json!({ "n": n, "k": k, "samples": samples, "seed": seed });
        let mut report = self.report("scan", params, all, started);
        report.table = Some(rows);
        Ok(report)
    }
}

/// Outcome of a single main-theorem instance: `None` when everything agrees.
fn main_instance_problem(
    engine: &ProofEngine,
    g: &OrientedGraph,
    s: usize,
    t: usize,
    flavor: Flavor,
    acc: &mut Partial,
) -> Result<Option<String>, HarnessError> {
    let r = match engine.find_two_block(g, s, t, flavor) {
        Ok(Some(r)) => r,
        Ok(None) => return Ok(Some("engine found no witness".into())),
        Err(e) => return Ok(Some(format!("engine error: {e}"))),
    };
    if r.used_fallback {
        acc.fallback += 1;
        return Ok(Some("engine used the brute-force fallback".into()));
    }
    if !check_embedding(g, &r.embedding) {
        return Ok(Some(format!("invalid witness {:?}", r.embedding.vertices)));
    }
    if r.embedding.pattern != pattern_two_block(s, t, flavor) {
        return Ok(Some(format!("witness pattern {} is not the requested one", r.embedding.pattern)));
    }
    match find_oriented_path(g, &pattern_two_block(s, t, flavor), engine.budget) {
        Ok(Some(_)) => {}
        Ok(None) => return Ok(Some("brute force disagrees".into())),
        Err(e) => return Ok(Some(format!("brute force: {e}"))),
    }
    Ok(None)
}

/// Re-runs the main-theorem check on one graph; the list of failure details
/// is empty when the graph passes.
pub fn recheck_main(engine: &ProofEngine, g: &OrientedGraph, ks: &[usize]) -> Result<Vec<String>, HarnessError> {
    let c = Campaign { jobs: Some(1), engine: *engine, ..Campaign::default() };
    let mut acc = Partial::default();
    c.check_main_instance(g, 0, ks, &mut acc)?;
    Ok(acc.violations.into_iter().map(|v| v.detail).collect())
}

/// A random oriented graph whose minimum semi-degree is exactly `d`.
///
/// Starts from [`random_oriented_graph`] and, while the minimum is above `d`,
/// deletes one arc on the minimal side of the lowest-index minimising vertex;
/// each deletion lowers the minimum by exactly one.
pub fn graph_with_exact_semi_degree(n: usize, d: usize, seed: u64) -> Result<OrientedGraph, GenError> {
    let g = random_oriented_graph(n, d, seed)?;
    let mut rng = SplitMix64::new(seed ^ 0x5DEE_CE66_D1CE_5EED);
    let mut out = g.out_rows().to_vec();
    let arcs_of = |out: &Vec<u64>| OrientedGraph::from_out_rows_unchecked(n, out.clone());
    let mut cur = g;
    while cur.min_semi_degree() > d {
        let m = cur.min_semi_degree();
        let v = (0..n)
            .find(|&v| cur.out_degree(v) == m || cur.in_degree(v) == m)
            .expect("a minimiser exists");
        if cur.out_degree(v) == m {
            let w = rng.pick_bit(cur.out_row(v));
            out[v] &= !(1 << w);
        } else {
            let u = rng.pick_bit(cur.in_row(v));
            out[u] &= !(1 << v);
        }
        cur = arcs_of(&out);
    }
    Ok(cur)
}
