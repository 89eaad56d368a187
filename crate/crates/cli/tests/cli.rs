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

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use twoblock::io::parse_edge_list;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn twoblock(dir: &Path, args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_twoblock"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn pt7(dir: &Path) -> PathBuf {
    assert_eq!(twoblock(dir, &["gen", "--family", "paley", "--n", "7", "-o", "pt7.el"]).code, 0);
    dir.join("pt7.el")
}

#[test]
fn paley_find_two_block() {
    let d = tempfile::tempdir().unwrap();
    pt7(d.path());
    let r = twoblock(d.path(), &["find", "-i", "pt7.el", "--two-block", "3", "2", "--flavor", "p", "--witness", "w.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let w: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(w["pattern"], "FFFBB");
    assert_eq!(w["n"], 7);
    assert_eq!(read(d.path(), "w.json"), r.stdout);
    assert_eq!(twoblock(d.path(), &["check", "-i", "pt7.el", "--witness", "w.json"]).code, 0);
}

#[test]
fn find_reports_absence() {
    let d = tempfile::tempdir().unwrap();
    twoblock(d.path(), &["gen", "--family", "tt", "--n", "4", "-o", "tt4.el"]);
    let r = twoblock(d.path(), &["find", "-i", "tt4.el", "--pattern", "FBFB"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("no embedding"));
}

#[test]
fn tampered_witness_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let g = parse_edge_list(&std::fs::read_to_string(pt7(d.path())).unwrap()).unwrap();
    let r = twoblock(d.path(), &["prove", "-i", "pt7.el", "--s", "3", "--t", "2", "--flavor", "p", "--witness", "w.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(twoblock(d.path(), &["check", "-i", "pt7.el", "--witness", "w.json"]).code, 0);

    let mut doc: Value = serde_json::from_str(&read(d.path(), "w.json")).unwrap();
    let vs: Vec<usize> = serde_json::from_value(doc["witness"]["vertices"].clone()).unwrap();
    // Replace the second vertex by an unused one that breaks the first arc.
    let spare = (0..7).find(|&w| !vs.contains(&w) && !g.has_arc(vs[0], w)).unwrap();
    doc["witness"]["vertices"][1] = spare.into();
    std::fs::write(d.path().join("bad.json"), doc.to_string()).unwrap();
    let r = twoblock(d.path(), &["check", "-i", "pt7.el", "--witness", "bad.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains(&format!("{} -> {spare}", vs[0])), "{}", r.stdout);
}

#[test]
fn check_rejects_mismatched_pattern_and_graph() {
    let d = tempfile::tempdir().unwrap();
    pt7(d.path());
    twoblock(d.path(), &["prove", "-i", "pt7.el", "--s", "2", "--t", "1", "--flavor", "q", "--witness", "w.json"]);
    let mut doc: Value = serde_json::from_str(&read(d.path(), "w.json")).unwrap();
    doc["s"] = 1.into();
    doc["t"] = 2.into();
    std::fs::write(d.path().join("bad.json"), doc.to_string()).unwrap();
    let r = twoblock(d.path(), &["check", "-i", "pt7.el", "--witness", "bad.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("does not match"));

    twoblock(d.path(), &["gen", "--family", "rt", "--n", "7", "-o", "rt7.el"]);
    let r = twoblock(d.path(), &["check", "-i", "rt7.el", "--witness", "w.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("different graph"));
}

#[test]
fn sharpness_suite_passes() {
    let d = tempfile::tempdir().unwrap();
    let r = twoblock(d.path(), &["verify", "--suite", "sharpness", "--k", "5", "--report", "r.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep: Value = serde_json::from_str(&read(d.path(), "r.json")).unwrap();
    assert_eq!(rep["violations"], Value::Array(vec![]));
    assert_eq!(rep["instancesChecked"], 12);
}

#[test]
fn report_fields() {
    let d = tempfile::tempdir().unwrap();
    let r = twoblock(d.path(), &["verify", "--suite", "main", "--n-max", "4", "--k", "1", "2", "3", "--report", "r.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep: Value = serde_json::from_str(&read(d.path(), "r.json")).unwrap();
    for key in ["suite", "params", "instancesChecked", "violations", "fallbackUses", "wallTimeSec"] {
        assert!(rep.get(key).is_some(), "{key}");
    }
    assert_eq!(rep["fallbackUses"], 0);
    assert_eq!(rep["wallTimeSec"], 0.0);
    let r = twoblock(d.path(), &["verify", "--suite", "redei", "--n-max", "4", "--samples", "3", "--timing", "--report", "t.json"]);
    assert_eq!(r.code, 0);
    let rep: Value = serde_json::from_str(&read(d.path(), "t.json")).unwrap();
    assert!(rep["wallTimeSec"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    pt7(d.path());
    let cases: &[&[&str]] = &[
        &[],
        &["gen", "--family", "rt", "--n", "4", "-o", "x.el"],
        &["gen", "--family", "paley", "--n", "5", "-o", "x.el"],
        &["gen", "--family", "tt", "--n", "4", "--seed", "1", "-o", "x.el"],
        &["gen", "--family", "random-og", "--n", "4", "--delta", "2", "-o", "x.el"],
        &["find", "-i", "pt7.el", "--pattern", "FXB"],
        &["find", "-i", "pt7.el", "--two-block", "1", "1"],
        &["find", "-i", "pt7.el", "--pattern", "FB", "--flavor", "p"],
        &["find", "-i", "missing.el", "--pattern", "FB"],
        &["longest"],
        &["check", "-i", "pt7.el", "--witness", "missing.json"],
        &["verify", "--suite", "main", "--samples", "3", "--report", "r.json"],
        &["verify", "--suite", "redei", "--jobs", "0", "--report", "r.json"],
        &["verify", "--suite", "sharpness", "--k", "6", "--report", "r.json"],
        &["scan", "--n", "0", "--k", "3", "--samples", "2", "--report", "r.json"],
    ];
    for args in cases {
        let r = twoblock(d.path(), args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty(), "{args:?}");
    }
    assert!(!d.path().join("x.el").exists());
    assert!(!d.path().join("r.json").exists());

    std::fs::write(d.path().join("crlf.el"), "3 1\r\n0 1\r\n").unwrap();
    assert_eq!(twoblock(d.path(), &["longest", "-i", "crlf.el"]).code, 2);
}

#[test]
fn longest_prints_path() {
    let d = tempfile::tempdir().unwrap();
    twoblock(d.path(), &["gen", "--family", "tt", "--n", "5", "-o", "tt5.el"]);
    let r = twoblock(d.path(), &["longest", "-i", "tt5.el"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "length 4\n0 -> 1 -> 2 -> 3 -> 4\n");
}

#[test]
fn prove_trace_and_small_degree() {
    let d = tempfile::tempdir().unwrap();
    twoblock(d.path(), &["gen", "--family", "rt", "--n", "11", "-o", "rt11.el"]);
    let r = twoblock(d.path(), &["prove", "-i", "rt11.el", "--s", "5", "--t", "4", "--flavor", "q", "--witness", "w.json", "--trace"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("trace: "));
    let doc: Value = serde_json::from_str(&read(d.path(), "w.json")).unwrap();
    assert_eq!(doc["witness"]["pattern"], "BBBBBFFFF");
    assert_eq!(doc["usedFallback"], false);

    twoblock(d.path(), &["gen", "--family", "tt", "--n", "4", "-o", "tt4.el"]);
    let r = twoblock(d.path(), &["prove", "-i", "tt4.el", "--s", "2", "--t", "2", "--flavor", "p", "--witness", "v.json", "--trace"]);
    assert_eq!(r.code, 1);
    assert!(!d.path().join("v.json").exists());
}

#[test]
fn dot_output() {
    let d = tempfile::tempdir().unwrap();
    twoblock(d.path(), &["gen", "--family", "rt", "--n", "5", "-o", "g.el", "--dot", "g.dot"]);
    assert_eq!(read(d.path(), "g.dot").matches("->").count(), 10);
    let r = twoblock(d.path(), &["find", "-i", "g.el", "--pattern", "FFB", "--dot", "h.dot"]);
    assert_eq!(r.code, 0);
    assert_eq!(read(d.path(), "h.dot").matches("color=red").count(), 3);
}

#[test]
fn outputs_are_byte_stable() {
    let d = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &["gen", "--family", "random-og", "--n", "11", "--delta", "4", "-o", "OUT"],
        &["gen", "--family", "random-t", "--n", "9", "-o", "OUT"],
        &["scan", "--n", "7", "--k", "3", "--samples", "20", "--seed", "5", "--report", "OUT"],
        &["verify", "--suite", "redei", "--n-max", "5", "--samples", "10", "--seed", "9", "--report", "OUT"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let outs: Vec<String> = ["a", "b"]
            .iter()
            .map(|tag| {
                let name = format!("{i}{tag}");
                let argv: Vec<&str> = args.iter().map(|&a| if a == "OUT" { name.as_str() } else { a }).collect();
                assert_eq!(twoblock(d.path(), &argv).code, 0, "{argv:?}");
                read(d.path(), &name)
            })
            .collect();
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
    // Missing --seed means seed 0.
    twoblock(d.path(), &["gen", "--family", "random-t", "--n", "6", "-o", "s.el"]);
    twoblock(d.path(), &["gen", "--family", "random-t", "--n", "6", "--seed", "0", "-o", "z.el"]);
    assert_eq!(read(d.path(), "s.el"), read(d.path(), "z.el"));
}
