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

//! Text formats.
//!
//! Edge list: first line `n m`, then `m` lines `u v` (0-based decimal,
//! single space), LF endings, nothing else. The final LF may be omitted.
//!
//! Witness: `{"n":..,"pattern":"FFB..","vertices":[..]}`.
//!
//! Prove file: `{"graph":{"n","m","arcs"},"s","t","flavor","witness","trace","usedFallback","rotations"}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::WitnessResult;
use crate::graph::{GraphError, OrientedGraph};
use crate::search::{Flavor, PathEmbedding, Sign, SignPattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Content(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

fn parse_pair(line: &str, no: usize) -> Result<(usize, usize), FormatError> {
    let mut it = line.split(' ');
    let mut field = || -> Result<usize, FormatError> {
        let tok = it.next().ok_or_else(|| syntax(no, "expected two fields"))?;
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax(no, format!("{tok:?} is not a decimal integer")));
        }
        tok.parse().map_err(|_| syntax(no, format!("{tok:?} is out of range")))
    };
    let a = field()?;
    let b = field()?;
    if it.next().is_some() {
        return Err(syntax(no, "expected exactly two fields"));
    }
    Ok((a, b))
}

pub fn parse_edge_list(text: &str) -> Result<OrientedGraph, FormatError> {
    if text.contains('\r') {
        return Err(syntax(1, "carriage return found; LF line endings only"));
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    let header = lines.next().filter(|l| !l.is_empty()).ok_or_else(|| syntax(1, "missing header"))?;
    let (n, m) = parse_pair(header, 1)?;
    let mut arcs = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        arcs.push(parse_pair(line, i + 2)?);
    }
    if arcs.len() != m {
        return Err(syntax(1, format!("header announces {m} arcs, found {}", arcs.len())));
    }
    Ok(OrientedGraph::new(n, &arcs)?)
}

pub fn write_edge_list(g: &OrientedGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.arc_count());
    for (u, v) in g.arcs() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn write_dot(g: &OrientedGraph) -> String {
    write_dot_highlighting(g, None)
}

/// DOT text in which the arcs used by `e` are drawn bold red.
pub fn write_dot_highlighting(g: &OrientedGraph, e: Option<&PathEmbedding>) -> String {
    let used: Vec<(usize, usize)> = e.map_or_else(Vec::new, |e| {
        e.vertices
            .windows(2)
            .zip(e.pattern.signs())
            .map(|(w, s)| match s {
                Sign::Forward => (w[0], w[1]),
                Sign::Backward => (w[1], w[0]),
            })
            .collect()
    });
    let mut out = String::from("digraph G {\n");
    for v in 0..g.n() {
        out.push_str(&format!("  {v};\n"));
    }
    for (u, v) in g.arcs() {
        let style = if used.contains(&(u, v)) { " [color=red, penwidth=2]" } else { "" };
        out.push_str(&format!("  {u} -> {v}{style};\n"));
    }
    out.push_str("}\n");
    out
}

/// The graph as embedded in JSON documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEcho {
    pub n: usize,
    pub m: usize,
    pub arcs: Vec<[usize; 2]>,
}

impl GraphEcho {
    pub fn of(g: &OrientedGraph) -> Self {
        Self { n: g.n(), m: g.arc_count(), arcs: g.arcs().map(|(u, v)| [u, v]).collect() }
    }

    pub fn to_graph(&self) -> Result<OrientedGraph, FormatError> {
        if self.arcs.len() != self.m {
            return Err(FormatError::Content(format!(
                "graph echo announces {} arcs, lists {}",
                self.m,
                self.arcs.len()
            )));
        }
        let arcs: Vec<_> = self.arcs.iter().map(|a| (a[0], a[1])).collect();
        Ok(OrientedGraph::new(self.n, &arcs)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub n: usize,
    pub pattern: String,
    pub vertices: Vec<usize>,
}

impl WitnessJson {
    pub fn of(n: usize, e: &PathEmbedding) -> Self {
        Self { n, pattern: e.pattern.to_string(), vertices: e.vertices.clone() }
    }

    pub fn to_embedding(&self) -> Result<PathEmbedding, FormatError> {
        let pattern: SignPattern = self.pattern.parse().map_err(FormatError::Content)?;
        Ok(PathEmbedding::new(self.vertices.clone(), pattern))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProveFile {
    pub graph: GraphEcho,
    pub s: usize,
    pub t: usize,
    pub flavor: String,
    pub witness: WitnessJson,
    pub trace: Vec<String>,
    pub used_fallback: bool,
    pub rotations: usize,
}

impl ProveFile {
    pub fn new(g: &OrientedGraph, s: usize, t: usize, flavor: Flavor, r: &WitnessResult) -> Self {
        Self {
            graph: GraphEcho::of(g),
            s,
            t,
            flavor: flavor.to_string(),
            witness: WitnessJson::of(g.n(), &r.embedding),
            trace: r.trace.iter().map(|x| x.name().to_owned()).collect(),
            used_fallback: r.used_fallback,
            rotations: r.rotations,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serialises");
    s.push('\n');
    s
}

/// Single-line JSON with a trailing newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serialises");
    s.push('\n');
    s
}

/// What `check` reads: either a full prove file or a bare witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckInput {
    pub graph: Option<GraphEcho>,
    pub witness: WitnessJson,
}

pub fn parse_check_input(text: &str) -> Result<CheckInput, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    let json_err = |e: serde_json::Error| FormatError::Json(e.to_string());
    if value.get("witness").is_some() {
        let p: ProveFile = serde_json::from_value(value).map_err(json_err)?;
        Ok(CheckInput { graph: Some(p.graph), witness: p.witness })
    } else {
        let witness: WitnessJson = serde_json::from_value(value).map_err(json_err)?;
        Ok(CheckInput { graph: None, witness })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::regular_tournament;

    #[test]
    fn edge_list_round_trip() {
        let g = regular_tournament(5).unwrap();
        let text = write_edge_list(&g);
        assert!(text.starts_with("5 10\n0 1\n0 2\n1 2\n"));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        assert_eq!(parse_edge_list(text.trim_end()).unwrap(), g);
    }

    #[test]
    fn edge_list_rejections() {
        let bad = [
            ("3 1\r\n0 1\r\n", "carriage"),
            ("3 2\n0 1\n", "announces"),
            ("3 1\n0  1\n", "decimal"),
            ("3 1\n0 1\n\n", "decimal"),
            ("3 1\n0 1 2\n", "exactly"),
            ("3 1\n+0 1\n", "decimal"),
            ("", "header"),
        ];
        for (text, needle) in bad {
            let e = parse_edge_list(text).unwrap_err().to_string();
            assert!(e.contains(needle), "{text:?}: {e}");
        }
        assert_eq!(
            parse_edge_list("3 2\n0 1\n1 0\n"),
            Err(FormatError::Graph(GraphError::TwoCycle(0, 1)))
        );
        assert_eq!(parse_edge_list("2 1\n1 1\n"), Err(FormatError::Graph(GraphError::LoopArc(1))));
        assert!(matches!(
            parse_edge_list("2 1\n0 5\n"),
            Err(FormatError::Graph(GraphError::VertexOutOfRange { vertex: 5, n: 2 }))
        ));
    }

    #[test]
    fn empty_graph_formats() {
        let g = OrientedGraph::empty(0).unwrap();
        assert_eq!(write_edge_list(&g), "0 0\n");
        assert_eq!(parse_edge_list("0 0\n").unwrap(), g);
        assert_eq!(write_dot(&g), "digraph G {\n}\n");
    }

    #[test]
    fn dot_lists_each_arc() {
        let g = regular_tournament(3).unwrap();
        let dot = write_dot(&g);
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.contains("  2 -> 0;\n"));
        let e = PathEmbedding::new(vec![0, 1, 2], "FF".parse().unwrap());
        let dot = write_dot_highlighting(&g, Some(&e));
        assert_eq!(dot.matches("color=red").count(), 2);
        assert!(dot.contains("  2 -> 0;\n"));
    }

    #[test]
    fn witness_field_names() {
        let e = PathEmbedding::new(vec![0, 1, 2], "FF".parse().unwrap());
        let w = WitnessJson::of(3, &e);
        let compact = serde_json::to_string(&w).unwrap();
        assert_eq!(compact, r#"{"n":3,"pattern":"FF","vertices":[0,1,2]}"#);
        assert_eq!(w.to_embedding().unwrap(), e);
    }

    #[test]
    fn check_input_accepts_both_shapes() {
        let bare = r#"{"n":3,"pattern":"FB","vertices":[0,1,2]}"#;
        let c = parse_check_input(bare).unwrap();
        assert!(c.graph.is_none());
        let g = regular_tournament(3).unwrap();
        let full = ProveFile {
            graph: GraphEcho::of(&g),
            s: 1,
            t: 1,
            flavor: "P".into(),
            witness: c.witness.clone(),
            trace: vec![],
            used_fallback: false,
            rotations: 0,
        };
        let text = to_json_line(&full);
        assert!(text.contains("\"usedFallback\":false"));
        assert_eq!(text.lines().count(), 1);
        let c2 = parse_check_input(&text).unwrap();
        assert_eq!(c2.graph.unwrap().to_graph().unwrap(), g);
        assert!(parse_check_input("{").is_err());
    }
}
