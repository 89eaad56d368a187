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

//! `twoblock` command-line tool.
//!
//! Exit codes: 0 success, 1 not found / invalid witness / suite violations,
//! 2 input or flag error, 3 internal contradiction (diagnostic written).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use twoblock::engine::{EngineError, ProofEngine};
use twoblock::generators::{Family, GenSpec};
use twoblock::harness::{Campaign, CampaignReport};
use twoblock::io::{
    parse_check_input, parse_edge_list, to_json_line, write_dot, write_dot_highlighting,
    write_edge_list, ProveFile, WitnessJson,
};
use twoblock::search::{
    embedding_defect, find_oriented_path, longest_directed_path, pattern_two_block, Flavor,
    SearchBudget, SignPattern,
};
use twoblock::OrientedGraph;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CONTRADICTION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "twoblock", version, about = "Two-block oriented paths in oriented graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Search for an oriented path by exhaustive backtracking.
    Find(FindArgs),
    /// Print a longest directed path.
    Longest {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
    },
    /// Extract a two-block path with the proof engine.
    Prove(ProveArgs),
    /// Validate a witness against a graph.
    Check {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Run a verification campaign.
    Verify(VerifyArgs),
    /// Containment fraction per minimum semi-degree.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Rt,
    Paley,
    Tt,
    RandomOg,
    RandomT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    #[value(alias = "P")]
    P,
    #[value(alias = "Q")]
    Q,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::P => Flavor::P,
            FlavorArg::Q => Flavor::Q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Main,
    Jackson,
    Zhang,
    Sharpness,
    Grunbaum,
    Redei,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Minimum semi-degree target (random-og only).
    #[arg(long)]
    delta: Option<usize>,
    /// Seed for the random families; defaults to 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FindArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Sign pattern over {F, B}.
    #[arg(long, conflicts_with = "two_block")]
    pattern: Option<String>,
    /// Block lengths S T.
    #[arg(long, num_args = 2, value_names = ["S", "T"])]
    two_block: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    flavor: Option<FlavorArg>,
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProveArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
    #[arg(long, value_enum)]
    flavor: FlavorArg,
    #[arg(long)]
    witness: PathBuf,
    /// Print the rule trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, num_args = 1..)]
    k: Vec<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    /// Include n = 6 in the main suite.
    #[arg(long)]
    full: bool,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    timing: bool,
}

/// A failure that maps to an exit code and a message.
#[derive(Debug)]
struct Fail {
    code: u8,
    msg: String,
}

fn input_err(msg: impl Into<String>) -> Fail {
    Fail { code: EXIT_INPUT, msg: msg.into() }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<OrientedGraph, Fail> {
    parse_edge_list(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> Result<u8, Fail> {
    let random = matches!(a.family, FamilyArg::RandomOg | FamilyArg::RandomT);
    if a.delta.is_some() && a.family != FamilyArg::RandomOg {
        return Err(input_err("--delta applies to --family random-og only"));
    }
    if a.seed.is_some() && !random {
        return Err(input_err("--seed applies to the random families only"));
    }
    let family = match a.family {
        FamilyArg::Rt => Family::RegularTournament,
        FamilyArg::Paley => Family::Paley,
        FamilyArg::Tt => Family::Transitive,
        FamilyArg::RandomOg => Family::RandomOriented,
        FamilyArg::RandomT => Family::RandomTournament,
    };
    let spec = GenSpec { family, n: a.n, min_semi: a.delta.unwrap_or(0), seed: a.seed.unwrap_or(0) };
    let g = spec.generate().map_err(|e| input_err(e.to_string()))?;
    write(&a.output, &write_edge_list(&g))?;
    if let Some(dot) = &a.dot {
        write(dot, &write_dot(&g))?;
    }
    Ok(EXIT_OK)
}

fn find(a: FindArgs) -> Result<u8, Fail> {
    let pattern: SignPattern = match (&a.pattern, &a.two_block) {
        (Some(p), None) => {
            if a.flavor.is_some() {
                return Err(input_err("--flavor applies to --two-block only"));
            }
            p.parse().map_err(input_err)?
        }
        (None, Some(st)) => {
            let flavor = a.flavor.ok_or_else(|| input_err("--two-block needs --flavor"))?;
            pattern_two_block(st[0], st[1], flavor.into())
        }
        _ => return Err(input_err("exactly one of --pattern and --two-block is required")),
    };
    let g = load_graph(&a.input)?;
    let found = find_oriented_path(&g, &pattern, SearchBudget::default())
        .map_err(|e| input_err(e.to_string()))?;
    if let Some(dot) = &a.dot {
        write(dot, &write_dot_highlighting(&g, found.as_ref()))?;
    }
    match found {
        Some(e) => {
            let text = to_json_line(&WitnessJson::of(g.n(), &e));
            print!("{text}");
            if let Some(w) = &a.witness {
                write(w, &text)?;
            }
            Ok(EXIT_OK)
        }
        None => {
            println!("no embedding of {pattern}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn longest(input: &Path) -> Result<u8, Fail> {
    let g = load_graph(input)?;
    if g.n() == 0 {
        return Err(input_err("graph has no vertices"));
    }
    let p = longest_directed_path(&g, SearchBudget::default()).map_err(|e| input_err(e.to_string()))?;
    let seq: Vec<String> = p.vertices.iter().map(ToString::to_string).collect();
    println!("length {}", p.len());
    println!("{}", seq.join(" -> "));
    Ok(EXIT_OK)
}

fn prove(a: ProveArgs) -> Result<u8, Fail> {
    let g = load_graph(&a.input)?;
    let flavor: Flavor = a.flavor.into();
    match ProofEngine::default().find_two_block(&g, a.s, a.t, flavor) {
        Ok(Some(r)) => {
            write(&a.witness, &to_json_line(&ProveFile::new(&g, a.s, a.t, flavor, &r)))?;
            if a.trace {
                let names: Vec<&str> = r.trace.iter().map(|x| x.name()).collect();
                println!("trace: {}", names.join(" > "));
            }
            if !r.hypothesis_met {
                eprintln!("note: minimum semi-degree is not above k/2; witness found by exhaustive search");
            }
            Ok(EXIT_OK)
        }
        Ok(None) => {
            println!("no embedding of {}", pattern_two_block(a.s, a.t, flavor));
            Ok(EXIT_NEGATIVE)
        }
        Err(EngineError::ContradictionReached(d)) => {
            let mut path = a.witness.clone().into_os_string();
            path.push(".diag.json");
            write(Path::new(&path), &d.to_json())?;
            Err(Fail {
                code: EXIT_CONTRADICTION,
                msg: format!("contradiction at {}: {} (diagnostic in {})", d.stage, d.message, Path::new(&path).display()),
            })
        }
        Err(e) => Err(input_err(e.to_string())),
    }
}

fn check(input: &Path, witness: &Path) -> Result<u8, Fail> {
    let g = load_graph(input)?;
    let c = parse_check_input(&read(witness)?).map_err(|e| input_err(format!("{}: {e}", witness.display())))?;
    let invalid = |msg: String| {
        println!("invalid: {msg}");
        Ok(EXIT_NEGATIVE)
    };
    if let Some(echo) = &c.graph {
        match echo.to_graph() {
            Ok(h) if h == g => {}
            Ok(_) => return invalid("witness file was produced for a different graph".into()),
            Err(e) => return invalid(format!("graph echo: {e}")),
        }
    }
    if c.witness.n != g.n() {
        return invalid(format!("witness is for n = {}, graph has n = {}", c.witness.n, g.n()));
    }
    let e = match c.witness.to_embedding() {
        Ok(e) => e,
        Err(err) => return invalid(err.to_string()),
    };
    if let Ok(p) = serde_json::from_str::<ProveFile>(&read(witness)?) {
        let flavor: Flavor = p.flavor.parse().map_err(input_err)?;
        let want = pattern_two_block(p.s, p.t, flavor);
        if e.pattern != want {
            return invalid(format!("pattern {} does not match {flavor}({},{})", e.pattern, p.s, p.t));
        }
    }
    match embedding_defect(&g, &e) {
        Some(defect) => invalid(defect.to_string()),
        None => {
            println!("valid {} embedding", e.pattern);
            Ok(EXIT_OK)
        }
    }
}

fn campaign(jobs: Option<usize>, timing: bool) -> Result<Campaign, Fail> {
    if jobs == Some(0) {
        return Err(input_err("--jobs must be positive"));
    }
    Ok(Campaign { jobs, timing, ..Campaign::default() })
}

fn finish(report: &CampaignReport, path: &Path) -> Result<u8, Fail> {
    write(path, &report.to_json())?;
    println!(
        "{}: {} instances, {} violations, {} fallback uses",
        report.suite,
        report.instances_checked,
        report.violations.len(),
        report.fallback_uses
    );
    Ok(if report.passed() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn verify(a: VerifyArgs) -> Result<u8, Fail> {
    let used = |name: &str, present: bool, allowed: &[Suite]| {
        if present && !allowed.contains(&a.suite) {
            Err(input_err(format!("--{name} does not apply to this suite")))
        } else {
            Ok(())
        }
    };
    use Suite::*;
    used("n-max", a.n_max.is_some(), &[Main, Jackson, Zhang, Grunbaum, Redei])?;
    used("k", !a.k.is_empty(), &[Main, Jackson, Zhang, Sharpness])?;
    used("samples", a.samples.is_some(), &[Jackson, Zhang, Redei])?;
    used("seed", a.seed.is_some(), &[Jackson, Zhang, Redei])?;
    used("full", a.full, &[Main])?;
    if a.full && a.n_max.is_some() {
        return Err(input_err("--full and --n-max are mutually exclusive"));
    }
    let c = campaign(a.jobs, a.timing)?;
    let err = |e: twoblock::HarnessError| input_err(e.to_string());
    let seed = a.seed.unwrap_or(0);
    let report = match a.suite {
        Main => {
            let n_max = a.n_max.unwrap_or(if a.full { 6 } else { 5 });
            let ks = if a.k.is_empty() { vec![1, 2, 3, 4, 5] } else { a.k.clone() };
            c.verify_theorem_main(n_max, &ks).map_err(err)?
        }
        Jackson | Zhang => {
            let kps = if a.k.is_empty() { vec![1, 2] } else { a.k.clone() };
            let n_max = a.n_max.unwrap_or(6);
            let samples = a.samples.unwrap_or(10_000);
            let mut parts = Vec::new();
            for &kp in &kps {
                parts.push(if a.suite == Jackson {
                    c.verify_jackson(kp, n_max, samples, seed).map_err(err)?
                } else {
                    c.verify_zhang(kp, n_max, samples, seed).map_err(err)?
                });
            }
            let suite = if a.suite == Jackson { "jackson" } else { "zhang" };
            let params = json!({ "kPrime": kps, "nMax": n_max, "samples": samples, "seed": seed });
            CampaignReport::combine(suite, params, parts)
        }
        Sharpness => {
            let ks = if a.k.is_empty() { vec![5, 7, 9] } else { a.k.clone() };
            if let Some(k) = ks.iter().find(|&&k| k < 3 || k % 2 == 0) {
                return Err(input_err(format!("sharpness needs odd k >= 3, got {k}")));
            }
            c.verify_sharpness(&ks).map_err(err)?
        }
        Grunbaum => c.verify_grunbaum(a.n_max.unwrap_or(7)).map_err(err)?,
        Redei => c
            .verify_redei_parity(a.n_max.unwrap_or(6), a.samples.unwrap_or(1000), seed)
            .map_err(err)?,
    };
    finish(&report, &a.report)
}

fn scan(a: ScanArgs) -> Result<u8, Fail> {
    let c = campaign(a.jobs, a.timing)?;
    let report = c.scan_threshold(a.n, a.k, a.samples, a.seed).map_err(|e| input_err(e.to_string()))?;
    for row in report.table.iter().flatten() {
        println!("minSemi {}: {}/{} = {:.4}", row.min_semi, row.containing, row.samples, row.fraction);
    }
    finish(&report, &a.report)
}

fn run(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Find(a) => find(a),
        Cmd::Longest { input } => longest(&input),
        Cmd::Prove(a) => prove(a),
        Cmd::Check { input, witness } => check(&input, &witness),
        Cmd::Verify(a) => verify(a),
        Cmd::Scan(a) => scan(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}
