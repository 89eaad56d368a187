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

//! Witness extraction for two-block paths from a longest directed path.
//!
//! Given an oriented graph `D` with minimum semi-degree above `k/2` and a
//! split `s + t = k`, the engine fixes a longest directed path
//! `v_1 -> ... -> v_alpha` and runs a fixed cascade of rules. Each rule looks
//! for one specific adjacency between the path ends and an interior segment
//! and, if present, reads a copy of `P(s,t)` straight off the path. A rule
//! that finds nothing certifies a structural fact that later rules rely on.
//! When every direct rule is silent, the endpoints' neighbourhoods are forced
//! to interleave in a way that yields a second longest path on the same
//! vertex set (a rotation); re-running the first rule along the rotated path
//! then always succeeds by a degree count.
//!
//! All region bookkeeping is done on 1-based path positions. Only
//! [`LongestPathContext::vertices_at`] turns positions into vertex ids.

use std::borrow::Cow;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::OrientedGraph;
use crate::search::{
    check_embedding, find_oriented_path, longest_directed_cycle, longest_directed_path,
    pattern_two_block, Flavor, PathEmbedding, SearchBudget, SearchError,
};

/// Rule identifiers recorded in a [`WitnessResult`] trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// Interior vertex `v_i` dominates `v_alpha`.
    #[serde(rename = "RuleR_out")]
    ROut,
    /// `v_alpha` dominates interior vertex `v_i`.
    #[serde(rename = "RuleR_in")]
    RIn,
    /// `v_alpha -> v_{alpha-t}`.
    #[serde(rename = "RuleVa_t")]
    VaT,
    /// `v_alpha -> v_{alpha-s}`.
    #[serde(rename = "RuleVa_s")]
    VaS,
    /// Back-arc into `v_1` from the `R` side.
    #[serde(rename = "RuleRv")]
    Rv,
    /// Back-arc into `v_1` from the `B` side.
    #[serde(rename = "RuleBv")]
    Bv,
    #[serde(rename = "RuleRotA1")]
    RotA1,
    #[serde(rename = "RuleRotA2_F")]
    RotA2F,
    #[serde(rename = "RuleRotB_X")]
    RotBX,
    #[serde(rename = "RuleRotB2")]
    RotB2,
    #[serde(rename = "RuleRotationExtract")]
    RotationExtract,
    /// Cascade gave up within its rotation budget; brute force supplied the witness.
    #[serde(rename = "FallbackBrute")]
    FallbackBrute,
    /// `t = 0`: prefix of a longest directed path.
    #[serde(rename = "RuleDirectedPrefix")]
    DirectedPrefix,
    /// `k` below the cascade threshold: exact search by design.
    #[serde(rename = "RuleSmallK")]
    SmallK,
    /// Longest path replaced by a Hamiltonian path of a longest cycle.
    #[serde(rename = "RuleRerootCycle")]
    RerootCycle,
    /// Degree hypothesis unmet: exact search only, no engine.
    #[serde(rename = "HypothesisUnmet")]
    HypothesisUnmet,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ROut => "RuleR_out",
            Rule::RIn => "RuleR_in",
            Rule::VaT => "RuleVa_t",
            Rule::VaS => "RuleVa_s",
            Rule::Rv => "RuleRv",
            Rule::Bv => "RuleBv",
            Rule::RotA1 => "RuleRotA1",
            Rule::RotA2F => "RuleRotA2_F",
            Rule::RotBX => "RuleRotB_X",
            Rule::RotB2 => "RuleRotB2",
            Rule::RotationExtract => "RuleRotationExtract",
            Rule::FallbackBrute => "FallbackBrute",
            Rule::DirectedPrefix => "RuleDirectedPrefix",
            Rule::SmallK => "RuleSmallK",
            Rule::RerootCycle => "RuleRerootCycle",
            Rule::HypothesisUnmet => "HypothesisUnmet",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ALL_RULES.iter().copied().find(|r| r.name() == name)
    }
}

const ALL_RULES: [Rule; 16] = [
    Rule::ROut,
    Rule::RIn,
    Rule::VaT,
    Rule::VaS,
    Rule::Rv,
    Rule::Bv,
    Rule::RotA1,
    Rule::RotA2F,
    Rule::RotBX,
    Rule::RotB2,
    Rule::RotationExtract,
    Rule::FallbackBrute,
    Rule::DirectedPrefix,
    Rule::SmallK,
    Rule::RerootCycle,
    Rule::HypothesisUnmet,
];

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Snapshot of an engine state the theory says cannot occur.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
    pub stage: String,
    pub message: String,
    pub path: Vec<usize>,
    pub alpha: usize,
    pub gamma: Option<usize>,
    pub xi: Option<usize>,
    pub case: Option<CaseKind>,
    pub trace: Vec<Rule>,
}

impl Diagnostic {
    fn new(g: &OrientedGraph, spec: TwoBlockSpec, stage: &str, message: String) -> Self {
        Self {
            n: g.n(),
            arcs: g.arcs().collect(),
            s: spec.s,
            t: spec.t,
            stage: stage.to_owned(),
            message,
            path: Vec::new(),
            alpha: 0,
            gamma: None,
            xi: None,
            case: None,
            trace: Vec::new(),
        }
    }

    fn with_context(mut self, ctx: &LongestPathContext) -> Self {
        self.path = ctx.path.clone();
        self.alpha = ctx.alpha;
        self.gamma = ctx.gamma;
        self.xi = ctx.xi;
        self.case = Some(ctx.case);
        self
    }

    fn with_trace(mut self, trace: &[Rule]) -> Self {
        self.trace = trace.to_vec();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnostic serialises")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("minimum semi-degree {min_semi} is not above k/2 for k = {k}")]
    PreconditionDegree { min_semi: usize, k: usize },
    #[error("a two-block path needs at least one arc")]
    EmptyPath,
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("contradiction reached at {}: {}", .0.stage, .0.message)]
    ContradictionReached(Box<Diagnostic>),
}

fn contradiction(d: Diagnostic) -> EngineError {
    EngineError::ContradictionReached(Box::new(d))
}

/// Split `s + t = k`, normalised so that `s >= t`.
///
/// `P(s,t)` and `P(t,s)` are the same path read from opposite ends;
/// `swapped` records whether the caller asked for the shorter run first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TwoBlockSpec {
    pub s: usize,
    pub t: usize,
    pub swapped: bool,
}

impl TwoBlockSpec {
    pub fn new(s: usize, t: usize) -> Result<Self, EngineError> {
        if s + t == 0 {
            return Err(EngineError::EmptyPath);
        }
        Ok(if s >= t {
            Self { s, t, swapped: false }
        } else {
            Self { s: t, t: s, swapped: true }
        })
    }

    pub fn k(&self) -> usize {
        self.s + self.t
    }

    /// The `(s, t)` the caller asked for.
    pub fn requested(&self) -> (usize, usize) {
        if self.swapped {
            (self.t, self.s)
        } else {
            (self.s, self.t)
        }
    }
}

/// Closed interval of path positions; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 1, hi: 0 };

    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn contains(&self, p: usize) -> bool {
        let p = p as i64;
        self.lo <= p && p <= self.hi
    }

    /// Positions in increasing order (positions below 1 are never produced).
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        (self.lo.max(1)..=self.hi).map(|p| p as usize)
    }

    fn meet(self, other: Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// Which branch of the case analysis a context falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseKind {
    /// `2 <= gamma <= t` and `F` empty (`alpha > 2s`).
    A1,
    /// `2 <= gamma <= t` and `F` nonempty.
    A2,
    /// `gamma > t` and `xi <= s`.
    B1,
    /// `gamma > t` and `xi > s`.
    B2,
    /// `gamma` or `xi` missing, or `gamma = 1`.
    Undetermined,
}

/// Named position sets over the path. Regions that do not belong to the
/// context's case are [`Interval::EMPTY`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Regions {
    pub r: Interval,
    pub b: Interval,
    pub u: Interval,
    pub w: Interval,
    pub x1: Interval,
    pub y1: Interval,
    pub f: Interval,
    pub x: Interval,
    pub y: Interval,
    pub x2: Interval,
    pub y2: Interval,
}

/// A directed path with `alpha >= k + 2` vertices and the index data the
/// cascade works with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongestPathContext {
    path: Vec<usize>,
    pub alpha: usize,
    /// Smallest position `i` with `v_alpha -> v_i`.
    pub gamma: Option<usize>,
    /// Largest position `i` with `v_i -> v_1`.
    pub xi: Option<usize>,
    pub case: CaseKind,
    pub regions: Regions,
}

impl LongestPathContext {
    /// Context over an arbitrary directed path of `g`.
    ///
    /// The path must be all-forward in `g` and carry at least `k + 2`
    /// vertices; it is the caller's business whether it is a longest one.
    pub fn from_path(
        g: &OrientedGraph,
        path: Vec<usize>,
        spec: TwoBlockSpec,
    ) -> Result<Self, EngineError> {
        let alpha = path.len();
        let (s, t, k) = (spec.s, spec.t, spec.k());
        if alpha < k + 2 {
            return Err(contradiction(Diagnostic::new(
                g,
                spec,
                "build_context",
                format!("directed path has {alpha} vertices, need at least k + 2 = {}", k + 2),
            )));
        }
        if !check_embedding(g, &PathEmbedding::directed(path.clone())) {
            return Err(contradiction(Diagnostic::new(
                g,
                spec,
                "build_context",
                format!("{path:?} is not a directed path"),
            )));
        }
        let last = path[alpha - 1];
        let first = path[0];
        let gamma = (1..=alpha).find(|&i| g.has_arc(last, path[i - 1]));
        let xi = (1..=alpha).rev().find(|&i| g.has_arc(path[i - 1], first));

        let (a, s_, t_) = (alpha as i64, s as i64, t as i64);
        let mut regions = Regions {
            r: Interval::new(s_ + 1, a - t_ - 1),
            b: Interval::new(t_ + 1, a - s_ - 1),
            u: Interval::EMPTY,
            w: Interval::EMPTY,
            x1: Interval::EMPTY,
            y1: Interval::EMPTY,
            f: Interval::EMPTY,
            x: Interval::EMPTY,
            y: Interval::EMPTY,
            x2: Interval::EMPTY,
            y2: Interval::EMPTY,
        };
        let case = match (gamma, xi) {
            (Some(gm), Some(x)) if gm >= 2 => {
                let (gm_, x_) = (gm as i64, x as i64);
                regions.u = Interval::new(1, gm_);
                regions.w = Interval::new(x_, a);
                if gm <= t {
                    regions.x1 = Interval::new(gm_ + 1, t_);
                    regions.y1 = Interval::new(a - t_, x_ - 1);
                    regions.f = Interval::new(a - s_, s_);
                    if regions.f.is_empty() {
                        CaseKind::A1
                    } else {
                        CaseKind::A2
                    }
                } else if x <= s {
                    regions.x = Interval::new(gm_ + 1, x_ - 1);
                    regions.y = Interval::new(a - t_, a);
                    CaseKind::B1
                } else {
                    regions.x2 = Interval::new(gm_ + 1, s_);
                    regions.y2 = Interval::new(a - t_, x_ - 1);
                    CaseKind::B2
                }
            }
            _ => CaseKind::Undetermined,
        };
        Ok(Self { path, alpha, gamma, xi, case, regions })
    }

    /// The path as vertex ids, position 1 first.
    pub fn path(&self) -> &[usize] {
        &self.path
    }

    /// Vertex at 1-based position `p`.
    #[inline]
    pub fn v(&self, p: usize) -> usize {
        self.path[p - 1]
    }

    pub fn vertices_at(&self, positions: &[usize]) -> Vec<usize> {
        positions.iter().map(|&p| self.v(p)).collect()
    }

    #[inline]
    fn arc(&self, g: &OrientedGraph, i: usize, j: usize) -> bool {
        g.has_arc(self.v(i), self.v(j))
    }
}

/// Exact longest path plus its context, after checking the degree hypothesis.
pub fn build_context(
    g: &OrientedGraph,
    spec: TwoBlockSpec,
    budget: SearchBudget,
) -> Result<LongestPathContext, EngineError> {
    let min_semi = g.min_semi_degree();
    if 2 * min_semi <= spec.k() {
        return Err(EngineError::PreconditionDegree { min_semi, k: spec.k() });
    }
    let path = longest_directed_path(g, budget)?.vertices;
    LongestPathContext::from_path(g, path, spec)
}

/// A rule's output: 1-based path positions spelling `P(s,t)` in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionWitness {
    pub positions: Vec<usize>,
    pub rule: Rule,
}

fn run(lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    lo..=hi
}

fn down(hi: usize, lo: usize) -> impl Iterator<Item = usize> {
    (lo..=hi).rev()
}

/// Adjacency between `v_alpha` and the middle segments `R` and `B`.
pub fn rule_middle_adjacency(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Option<PositionWitness> {
    let (s, t, a) = (spec.s, spec.t, ctx.alpha);
    for i in ctx.regions.r.iter() {
        if ctx.arc(g, i, a) {
            let positions = run(i + 1 - s, i).chain(down(a, a - t)).collect();
            return Some(PositionWitness { positions, rule: Rule::ROut });
        }
        if ctx.arc(g, a, i) {
            let positions = run(i - s, i).chain(down(a, a + 1 - t)).collect();
            return Some(PositionWitness { positions, rule: Rule::RIn });
        }
    }
    // On B the roles of s and t swap; the sequence is then read backwards.
    for i in ctx.regions.b.iter() {
        let (mut positions, rule): (Vec<usize>, _) = if ctx.arc(g, i, a) {
            (run(i + 1 - t, i).chain(down(a, a - s)).collect(), Rule::ROut)
        } else if ctx.arc(g, a, i) {
            (run(i - t, i).chain(down(a, a + 1 - s)).collect(), Rule::RIn)
        } else {
            continue;
        };
        positions.reverse();
        return Some(PositionWitness { positions, rule });
    }
    None
}

/// Arcs from `v_alpha` back to `v_{alpha-t}` or `v_{alpha-s}`.
pub fn rule_block_boundary(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Option<PositionWitness> {
    let (s, t, k, a) = (spec.s, spec.t, spec.k(), ctx.alpha);
    if ctx.arc(g, a, a - t) {
        let positions = run(a - k, a - t).chain(down(a, a + 1 - t)).collect();
        return Some(PositionWitness { positions, rule: Rule::VaT });
    }
    if ctx.arc(g, a, a - s) {
        let positions = run(a + 1 - s, a).chain(down(a - s, a - k)).collect();
        return Some(PositionWitness { positions, rule: Rule::VaS });
    }
    None
}

/// Back-arc `v_i -> v_1` with `i` in `R` or at `alpha - t`.
pub fn rule_back_arc_r(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Option<PositionWitness> {
    let (s, t, a) = (spec.s, spec.t, ctx.alpha);
    let gamma = ctx.gamma?;
    if gamma > s {
        return None;
    }
    let i = run(s + 1, a - t).find(|&i| ctx.arc(g, i, 1))?;
    let positions = run(i + gamma - s, i)
        .chain(run(1, gamma))
        .chain(down(a, a + 1 - t))
        .collect();
    Some(PositionWitness { positions, rule: Rule::Rv })
}

/// Back-arc `v_i -> v_1` with `i` in `B` or at `alpha - s`; needs `2 <= gamma <= t`.
pub fn rule_back_arc_b(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Option<PositionWitness> {
    let (s, t, a) = (spec.s, spec.t, ctx.alpha);
    let gamma = ctx.gamma.filter(|&gm| (2..=t).contains(&gm))?;
    let i = run(t + 1, a - s).find(|&i| ctx.arc(g, i, 1))?;
    let positions = run(a + 1 - s, a)
        .chain(down(gamma, 1))
        .chain(down(i, i + gamma - t))
        .collect();
    Some(PositionWitness { positions, rule: Rule::Bv })
}

/// [`rule_back_arc_r`], then [`rule_back_arc_b`].
pub fn rule_back_arcs(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Option<PositionWitness> {
    rule_back_arc_r(g, ctx, spec).or_else(|| rule_back_arc_b(g, ctx, spec))
}

/// The three direct rules in cascade order.
pub fn direct_rules(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Option<PositionWitness> {
    rule_middle_adjacency(g, ctx, spec)
        .or_else(|| rule_block_boundary(g, ctx, spec))
        .or_else(|| rule_back_arcs(g, ctx, spec))
}

/// Two longest paths on the same vertex set, one starting and one ending at `pivot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationPair {
    pub pivot: usize,
    /// Position `l` on the original path; the pivot sits at `l - 1`.
    pub ell: usize,
    /// Starts at the pivot.
    pub initial: Vec<usize>,
    /// Ends at the pivot.
    pub terminal: Vec<usize>,
    pub rule: Rule,
}

/// Outcome of the rotation scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RotationStep {
    Pair(RotationPair),
    /// The only configuration without a pair: `alpha = k + 2`, `k` odd, case
    /// `A2`. A longest cycle then has `alpha` vertices and the path must be
    /// re-rooted on it.
    NeedsReroot,
}

/// Position ranges to scan for `l`, in the order the case analysis lists them.
fn rotation_ranges(ctx: &LongestPathContext, spec: TwoBlockSpec) -> Vec<Interval> {
    let (Some(gamma), Some(xi)) = (ctx.gamma, ctx.xi) else {
        return Vec::new();
    };
    let (g_, x_) = (gamma as i64, xi as i64);
    let (s, t, a) = (spec.s as i64, spec.t as i64, ctx.alpha as i64);
    // A pair (l, l-2) inside a region [lo, hi] means l in [lo+2, hi]; for the
    // X-type regions l-2 may also be gamma itself, i.e. l from gamma+2.
    let below_xi = Interval::new(1, x_);
    match ctx.case {
        CaseKind::A1 => vec![Interval::new(g_ + 2, t), Interval::new(a - t + 2, x_ - 1)],
        CaseKind::A2 => vec![
            Interval::new(g_ + 2, t),
            Interval::new(a - s + 2, s).meet(below_xi),
            Interval::new(a - t + 2, x_ - 1),
        ],
        CaseKind::B1 => vec![Interval::new(g_ + 2, x_ - 1)],
        CaseKind::B2 => vec![
            Interval::new(g_ + 2, s),
            Interval::new(a - t + 2, x_ - 1),
            Interval::new(x_, x_),
        ],
        CaseKind::Undetermined => Vec::new(),
    }
}

fn rotation_rule(case: CaseKind) -> Rule {
    match case {
        CaseKind::A1 => Rule::RotA1,
        CaseKind::A2 => Rule::RotA2F,
        CaseKind::B1 => Rule::RotBX,
        _ => Rule::RotB2,
    }
}

/// Builds the rotated pair for a given `l`, or `None` if its arcs are missing.
pub fn rotation_at(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    ell: usize,
    rule: Rule,
) -> Option<RotationPair> {
    let a = ctx.alpha;
    let (gamma, xi) = (ctx.gamma?, ctx.xi?);
    if !(gamma >= 2 && ell >= gamma + 2 && ell <= xi && xi < a) {
        return None;
    }
    if !(ctx.arc(g, a, ell) && ctx.arc(g, ell - 2, 1)) {
        return None;
    }
    let initial: Vec<usize> = run(ell - 1, a)
        .chain(run(gamma, ell - 2))
        .chain(run(1, gamma - 1))
        .collect();
    let terminal: Vec<usize> = run(xi + 1, a)
        .chain(run(ell, xi))
        .chain(run(1, ell - 1))
        .collect();
    Some(RotationPair {
        pivot: ctx.v(ell - 1),
        ell,
        initial: ctx.vertices_at(&initial),
        terminal: ctx.vertices_at(&terminal),
        rule,
    })
}

/// Scans the case-specific regions for an index `l` with `v_alpha -> v_l` and
/// `v_{l-2} -> v_1`, which yields a rotation pair pivoting at `v_{l-1}`.
///
/// Intended to run only after [`direct_rules`] found nothing on `ctx`.
pub fn rule_rotation_pair(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Result<RotationStep, EngineError> {
    let rule = rotation_rule(ctx.case);
    for range in rotation_ranges(ctx, spec) {
        for ell in range.iter() {
            if let Some(pair) = rotation_at(g, ctx, ell, rule) {
                return Ok(RotationStep::Pair(pair));
            }
        }
    }
    let k = spec.k();
    if ctx.case == CaseKind::A2 && ctx.alpha == k + 2 && k % 2 == 1 {
        return Ok(RotationStep::NeedsReroot);
    }
    Err(contradiction(
        Diagnostic::new(
            g,
            spec,
            "rule_rotation_pair",
            "no rotation index in the case regions".to_owned(),
        )
        .with_context(ctx),
    ))
}

fn is_directed_path_on(g: &OrientedGraph, path: &[usize], vertex_set: u64) -> bool {
    let set = path.iter().fold(0u64, |m, &v| m | 1 << v);
    set == vertex_set
        && set.count_ones() as usize == path.len()
        && path.windows(2).all(|w| g.has_arc(w[0], w[1]))
}

/// Reads a witness off the rotated paths.
///
/// The pivot ends `pair.terminal` and starts `pair.initial`, so when both are
/// longest paths all its neighbours lie on them, and the middle-adjacency rule
/// along `pair.terminal` must fire.
pub fn extract_from_rotation(
    g: &OrientedGraph,
    pair: &RotationPair,
    spec: TwoBlockSpec,
) -> Result<(PathEmbedding, Rule), EngineError> {
    let vertex_set = pair.terminal.iter().fold(0u64, |m, &v| m | 1 << v);
    let well_formed = pair.terminal.last() == Some(&pair.pivot)
        && pair.initial.first() == Some(&pair.pivot)
        && pair.initial.len() == pair.terminal.len()
        && is_directed_path_on(g, &pair.terminal, vertex_set)
        && is_directed_path_on(g, &pair.initial, vertex_set);
    if !well_formed {
        return Err(contradiction(Diagnostic::new(
            g,
            spec,
            "extract_from_rotation",
            format!("malformed rotation pair {pair:?}"),
        )));
    }
    for path in [&pair.terminal, &pair.initial] {
        let ctx = LongestPathContext::from_path(g, path.clone(), spec)?;
        if let Some(w) = direct_rules(g, &ctx, spec) {
            let e = PathEmbedding::new(
                ctx.vertices_at(&w.positions),
                pattern_two_block(spec.s, spec.t, Flavor::P),
            );
            return Ok((e, w.rule));
        }
    }
    Err(contradiction(Diagnostic::new(
        g,
        spec,
        "extract_from_rotation",
        format!("pivot {} has no usable adjacency on either rotated path", pair.pivot),
    )))
}

/// A certified two-block embedding and how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessResult {
    pub embedding: PathEmbedding,
    pub trace: Vec<Rule>,
    pub used_fallback: bool,
    pub rotations: usize,
    pub hypothesis_met: bool,
}

/// Engine configuration. One instance may serve many calls.
#[derive(Debug, Clone, Copy)]
pub struct ProofEngine {
    pub budget: SearchBudget,
    /// Re-rooting cap; `None` means `alpha^2`.
    pub rotation_cap: Option<usize>,
    /// Splits with `k` below this use exact search instead of the cascade.
    pub cascade_min_k: usize,
    /// When false, the degree hypothesis is not checked (fault injection only).
    pub check_hypothesis: bool,
}

impl Default for ProofEngine {
    fn default() -> Self {
        Self {
            budget: SearchBudget::default(),
            rotation_cap: None,
            cascade_min_k: 5,
            check_hypothesis: true,
        }
    }
}

struct Normalized {
    embedding: PathEmbedding,
    trace: Vec<Rule>,
    used_fallback: bool,
    rotations: usize,
}

/// Outcome of one pass of the cascade over a fixed path.
enum Pass {
    Found(PathEmbedding),
    Reroot(Vec<usize>),
}

impl ProofEngine {
    /// Finds `P(s,t)` (flavor P) or `Q(s,t)` (flavor Q) in `g`.
    ///
    /// Returns `Ok(None)` only when the degree hypothesis fails and exact
    /// search finds no copy.
    pub fn find_two_block(
        &self,
        g: &OrientedGraph,
        s: usize,
        t: usize,
        flavor: Flavor,
    ) -> Result<Option<WitnessResult>, EngineError> {
        let spec = TwoBlockSpec::new(s, t)?;
        let pattern = pattern_two_block(s, t, flavor);
        let k = spec.k();
        if self.check_hypothesis && 2 * g.min_semi_degree() <= k {
            return Ok(find_oriented_path(g, &pattern, self.budget)?.map(|embedding| {
                WitnessResult {
                    embedding,
                    trace: vec![Rule::HypothesisUnmet],
                    used_fallback: false,
                    rotations: 0,
                    hypothesis_met: false,
                }
            }));
        }
        // Q(s,t) in g is P(s,t) in the reverse graph, on the same vertex sequence.
        let work: Cow<'_, OrientedGraph> = match flavor {
            Flavor::P => Cow::Borrowed(g),
            Flavor::Q => Cow::Owned(g.reverse()),
        };
        let found = self.prove_normalized(&work, spec)?;
        let mut vertices = found.embedding.vertices;
        if spec.swapped {
            vertices.reverse();
        }
        let embedding = PathEmbedding::new(vertices, pattern);
        if !check_embedding(g, &embedding) {
            return Err(contradiction(
                Diagnostic::new(
                    g,
                    spec,
                    "find_two_block",
                    format!("engine produced an invalid embedding {:?}", embedding.vertices),
                )
                .with_trace(&found.trace),
            ));
        }
        Ok(Some(WitnessResult {
            embedding,
            trace: found.trace,
            used_fallback: found.used_fallback,
            rotations: found.rotations,
            hypothesis_met: true,
        }))
    }

    /// Works on `P(spec.s, spec.t)` with `s >= t` in `g`.
    fn prove_normalized(
        &self,
        g: &OrientedGraph,
        spec: TwoBlockSpec,
    ) -> Result<Normalized, EngineError> {
        let k = spec.k();
        let pattern = pattern_two_block(spec.s, spec.t, Flavor::P);
        let done = |embedding, trace| Normalized { embedding, trace, used_fallback: false, rotations: 0 };

        if spec.t == 0 {
            let mut path = longest_directed_path(g, self.budget)?.vertices;
            if path.len() < k + 1 {
                return Err(contradiction(Diagnostic::new(
                    g,
                    spec,
                    "directed_prefix",
                    format!("longest directed path has only {} vertices", path.len()),
                )));
            }
            path.truncate(k + 1);
            return Ok(done(PathEmbedding::new(path, pattern), vec![Rule::DirectedPrefix]));
        }
        if k < self.cascade_min_k {
            return match find_oriented_path(g, &pattern, self.budget)? {
                Some(e) => Ok(done(e, vec![Rule::SmallK])),
                None => Err(contradiction(Diagnostic::new(
                    g,
                    spec,
                    "small_k",
                    "exact search found no copy".to_owned(),
                ))),
            };
        }

        let mut path = longest_directed_path(g, self.budget)?.vertices;
        let cap = self.rotation_cap.unwrap_or(path.len() * path.len());
        let mut trace = Vec::new();
        let mut rotations = 0;
        loop {
            match self.cascade_pass(g, path, spec, &mut trace)? {
                Pass::Found(embedding) => {
                    return Ok(Normalized { embedding, trace, used_fallback: false, rotations });
                }
                Pass::Reroot(next) => {
                    rotations += 1;
                    trace.push(Rule::RerootCycle);
                    if rotations > cap {
                        break;
                    }
                    path = next;
                }
            }
        }
        match find_oriented_path(g, &pattern, self.budget)? {
            Some(embedding) => {
                trace.push(Rule::FallbackBrute);
                Ok(Normalized { embedding, trace, used_fallback: true, rotations })
            }
            None => Err(contradiction(
                Diagnostic::new(g, spec, "fallback", "exact search found no copy".to_owned())
                    .with_trace(&trace),
            )),
        }
    }

    fn cascade_pass(
        &self,
        g: &OrientedGraph,
        path: Vec<usize>,
        spec: TwoBlockSpec,
        trace: &mut Vec<Rule>,
    ) -> Result<Pass, EngineError> {
        let ctx = LongestPathContext::from_path(g, path, spec)?;
        let pattern = pattern_two_block(spec.s, spec.t, Flavor::P);
        if let Some(w) = direct_rules(g, &ctx, spec) {
            trace.push(w.rule);
            return Ok(Pass::Found(PathEmbedding::new(ctx.vertices_at(&w.positions), pattern)));
        }
        check_established_claims(g, &ctx, spec).map_err(|e| with_trace(e, trace))?;
        match rule_rotation_pair(g, &ctx, spec).map_err(|e| with_trace(e, trace))? {
            RotationStep::Pair(pair) => {
                trace.push(pair.rule);
                let (e, rule) =
                    extract_from_rotation(g, &pair, spec).map_err(|e| with_trace(e, trace))?;
                trace.push(Rule::RotationExtract);
                trace.push(rule);
                Ok(Pass::Found(e))
            }
            RotationStep::NeedsReroot => {
                let cycle = longest_directed_cycle(g, self.budget)?;
                match cycle {
                    Some(c) if c.len() == ctx.alpha => Ok(Pass::Reroot(c.vertices)),
                    other => Err(with_trace(
                        contradiction(
                            Diagnostic::new(
                                g,
                                spec,
                                "reroot",
                                format!(
                                    "longest cycle has {} vertices, expected {}",
                                    other.map_or(0, |c| c.len()),
                                    ctx.alpha
                                ),
                            )
                            .with_context(&ctx),
                        ),
                        trace,
                    )),
                }
            }
        }
    }
}

fn with_trace(e: EngineError, trace: &[Rule]) -> EngineError {
    match e {
        EngineError::ContradictionReached(d) if d.trace.is_empty() => {
            contradiction(d.with_trace(trace))
        }
        other => other,
    }
}

/// Facts that must hold once every direct rule came back empty on a longest path.
pub fn check_established_claims(
    g: &OrientedGraph,
    ctx: &LongestPathContext,
    spec: TwoBlockSpec,
) -> Result<(), EngineError> {
    let (s, t, a) = (spec.s, spec.t, ctx.alpha);
    let fail = |msg: String| {
        Err(contradiction(
            Diagnostic::new(g, spec, "claims", msg).with_context(ctx),
        ))
    };
    let (Some(gamma), Some(xi)) = (ctx.gamma, ctx.xi) else {
        return fail("an endpoint has no neighbour on the path".to_owned());
    };
    if gamma < 2 || xi + 1 > a {
        return fail(format!("gamma = {gamma}, xi = {xi}: path closes into a cycle"));
    }
    if gamma > s {
        return fail(format!("gamma = {gamma} exceeds s = {s}"));
    }
    let in_tail = xi > a - t && xi < a;
    match ctx.case {
        CaseKind::A1 | CaseKind::A2 => {
            let in_f = xi > a - s && xi <= s;
            if xi < t + 3 || !(in_f || in_tail) {
                return fail(format!("case A with xi = {xi} outside its allowed ranges"));
            }
        }
        CaseKind::B1 | CaseKind::B2 => {
            if xi < gamma + 4 || !(xi <= s || in_tail) {
                return fail(format!("case B with xi = {xi} outside its allowed ranges"));
            }
        }
        CaseKind::Undetermined => return fail("case undetermined".to_owned()),
    }
    Ok(())
}
