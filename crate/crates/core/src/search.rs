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

//! Exact search: oriented path embedding, longest directed paths and cycles,
//! Hamiltonian path counting.
//!
//! Every routine here is exhaustive. Work is metered by a [`SearchBudget`];
//! running out is reported as [`SearchError::BudgetExceeded`] rather than as a
//! wrong answer.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{full_mask, Bits, OrientedGraph};

/// Graphs up to this order use subset dynamic programming for longest
/// paths and cycles; larger ones use branch and bound.
pub const DP_THRESHOLD: usize = 20;

/// Hamiltonian path counting switches from DP to enumeration above this order.
pub const COUNT_DP_THRESHOLD: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search budget of {0} node expansions exceeded")]
    BudgetExceeded(u64),
    #[error("graph has no vertices")]
    EmptyGraph,
}

/// Cap on node expansions for one search call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_expansions: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_expansions: 100_000_000 }
    }
}

impl SearchBudget {
    pub fn new(max_expansions: u64) -> Self {
        Self { max_expansions }
    }

    fn meter(self) -> Meter {
        Meter { used: 0, cap: self.max_expansions }
    }
}

struct Meter {
    used: u64,
    cap: u64,
}

impl Meter {
    #[inline]
    fn tick(&mut self) -> Result<(), SearchError> {
        self.used += 1;
        if self.used > self.cap {
            Err(SearchError::BudgetExceeded(self.cap))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Forward,
    Backward,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Forward => Sign::Backward,
            Sign::Backward => Sign::Forward,
        }
    }

    fn char(self) -> char {
        match self {
            Sign::Forward => 'F',
            Sign::Backward => 'B',
        }
    }
}

/// Which two-block family a pattern belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `s` forward arcs, then `t` backward arcs.
    P,
    /// `s` backward arcs, then `t` forward arcs.
    Q,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::P => "P",
            Flavor::Q => "Q",
        })
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "P" | "p" => Ok(Flavor::P),
            "Q" | "q" => Ok(Flavor::Q),
            other => Err(format!("unknown flavor {other:?} (expected P or Q)")),
        }
    }
}

/// The arc directions along an oriented path, one sign per arc.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignPattern(Vec<Sign>);

impl SignPattern {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn forward(k: usize) -> Self {
        Self(vec![Sign::Forward; k])
    }

    pub fn alternating(k: usize, first: Sign) -> Self {
        Self((0..k).map(|i| if i % 2 == 0 { first } else { first.flip() }).collect())
    }

    /// Maximal runs of equal signs, as `(sign, run length)`.
    pub fn blocks(&self) -> Vec<(Sign, usize)> {
        let mut out: Vec<(Sign, usize)> = Vec::new();
        for &s in &self.0 {
            match out.last_mut() {
                Some((last, len)) if *last == s => *len += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// The pattern read from the other end: order reversed and every sign flipped.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().map(|s| s.flip()).collect())
    }

    /// The pattern seen in the reverse graph: every sign flipped.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| s.flip()).collect())
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.char()))
    }
}

impl FromStr for SignPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.chars()
            .map(|c| match c {
                'F' => Ok(Sign::Forward),
                'B' => Ok(Sign::Backward),
                other => Err(format!("invalid pattern character {other:?} (expected F or B)")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SignPattern)
    }
}

/// `P(s,t)` = forward^s backward^t, `Q(s,t)` = backward^s forward^t.
pub fn pattern_two_block(s: usize, t: usize, flavor: Flavor) -> SignPattern {
    let (a, b) = match flavor {
        Flavor::P => (Sign::Forward, Sign::Backward),
        Flavor::Q => (Sign::Backward, Sign::Forward),
    };
    let mut signs = vec![a; s];
    signs.extend(std::iter::repeat_n(b, t));
    SignPattern(signs)
}

/// A vertex sequence claimed to realise a sign pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathEmbedding {
    pub vertices: Vec<usize>,
    pub pattern: SignPattern,
}

impl PathEmbedding {
    pub fn new(vertices: Vec<usize>, pattern: SignPattern) -> Self {
        Self { vertices, pattern }
    }

    /// An all-forward embedding along `vertices`.
    pub fn directed(vertices: Vec<usize>) -> Self {
        let k = vertices.len().saturating_sub(1);
        Self { vertices, pattern: SignPattern::forward(k) }
    }

    /// Same path read from the other end.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices, pattern: self.pattern.reversed() }
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }
}

/// First reason a claimed embedding is not a valid one.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingDefect {
    #[error("{vertices} vertices cannot carry a pattern of {arcs} arcs")]
    LengthMismatch { vertices: usize, arcs: usize },
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("vertex {0} appears more than once")]
    Repeated(usize),
    #[error("arc {index} requires {tail} -> {head}, which is absent")]
    MissingArc { index: usize, tail: usize, head: usize },
}

/// Locates the first defect of `e` as an embedding into `g`, if any.
pub fn embedding_defect(g: &OrientedGraph, e: &PathEmbedding) -> Option<EmbeddingDefect> {
    if e.vertices.len() != e.pattern.len() + 1 {
        return Some(EmbeddingDefect::LengthMismatch {
            vertices: e.vertices.len(),
            arcs: e.pattern.len(),
        });
    }
    let mut seen = 0u64;
    for &v in &e.vertices {
        if v >= g.n() {
            return Some(EmbeddingDefect::OutOfRange(v));
        }
        if seen >> v & 1 == 1 {
            return Some(EmbeddingDefect::Repeated(v));
        }
        seen |= 1 << v;
    }
    for (index, (pair, sign)) in e.vertices.windows(2).zip(e.pattern.signs()).enumerate() {
        let (tail, head) = match sign {
            Sign::Forward => (pair[0], pair[1]),
            Sign::Backward => (pair[1], pair[0]),
        };
        if !g.has_arc(tail, head) {
            return Some(EmbeddingDefect::MissingArc { index, tail, head });
        }
    }
    None
}

pub fn check_embedding(g: &OrientedGraph, e: &PathEmbedding) -> bool {
    embedding_defect(g, e).is_none()
}

#[inline]
fn row(g: &OrientedGraph, v: usize, sign: Sign) -> u64 {
    match sign {
        Sign::Forward => g.out_row(v),
        Sign::Backward => g.in_row(v),
    }
}

/// Exhaustive backtracking search for an embedding of `pattern` in `g`.
///
/// Start vertices are tried in increasing order and candidates at every step
/// in increasing order, so the result is the lexicographically least
/// embedding. Candidates whose next demanded neighbourhood is already
/// exhausted are pruned, as are start vertices whose weak component is too
/// small to hold the path.
pub fn find_oriented_path(
    g: &OrientedGraph,
    pattern: &SignPattern,
    budget: SearchBudget,
) -> Result<Option<PathEmbedding>, SearchError> {
    let k = pattern.len();
    let n = g.n();
    if k + 1 > n {
        return Ok(None);
    }
    let signs = pattern.signs();
    let mut meter = budget.meter();
    let mut seq = Vec::with_capacity(k + 1);
    let mut done = 0u64;
    let mut component = 0u64;
    for start in 0..n {
        if done >> start & 1 == 0 {
            component = g.weak_component(start);
            done |= component;
        } else if component >> start & 1 == 0 {
            component = g.weak_component(start);
        }
        if (component.count_ones() as usize) < k + 1 {
            continue;
        }
        if k > 0 && row(g, start, signs[0]) == 0 {
            continue;
        }
        seq.clear();
        seq.push(start);
        if extend_pattern(g, signs, &mut seq, 1 << start, &mut meter)? {
            return Ok(Some(PathEmbedding::new(seq, pattern.clone())));
        }
    }
    Ok(None)
}

fn extend_pattern(
    g: &OrientedGraph,
    signs: &[Sign],
    seq: &mut Vec<usize>,
    visited: u64,
    meter: &mut Meter,
) -> Result<bool, SearchError> {
    let depth = seq.len() - 1;
    if depth == signs.len() {
        return Ok(true);
    }
    meter.tick()?;
    let v = seq[depth];
    let cands = row(g, v, signs[depth]) & !visited;
    for w in Bits(cands) {
        let visited = visited | 1 << w;
        if depth + 1 < signs.len() && row(g, w, signs[depth + 1]) & !visited == 0 {
            continue;
        }
        seq.push(w);
        if extend_pattern(g, signs, seq, visited, meter)? {
            return Ok(true);
        }
        seq.pop();
    }
    Ok(false)
}

/// A longest directed path, as an all-forward embedding.
///
/// Uses subset DP up to [`DP_THRESHOLD`] vertices and branch and bound above.
/// Only the length and validity of the returned path are meaningful; which
/// maximum path is returned is deterministic but unspecified.
pub fn longest_directed_path(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<PathEmbedding, SearchError> {
    if g.n() == 0 {
        return Err(SearchError::EmptyGraph);
    }
    let seq = if g.n() <= DP_THRESHOLD {
        longest_path_dp(g, budget)?
    } else {
        longest_path_bnb(g, budget)?
    };
    Ok(PathEmbedding::directed(seq))
}

fn longest_path_dp(g: &OrientedGraph, budget: SearchBudget) -> Result<Vec<usize>, SearchError> {
    let n = g.n();
    let mut meter = budget.meter();
    // ends[mask]: vertices at which some directed path covering exactly `mask` ends.
    let mut ends = vec![0u32; 1 << n];
    for v in 0..n {
        ends[1 << v] = 1 << v;
    }
    let mut best = 1usize;
    for mask in 1..ends.len() {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        meter.tick()?;
        if mask.count_ones() > best.count_ones() {
            best = mask;
            if best.count_ones() as usize == n {
                break;
            }
        }
        for v in Bits(u64::from(e)) {
            for w in Bits(g.out_row(v) & !(mask as u64)) {
                ends[mask | 1 << w] |= 1 << w;
            }
        }
    }
    let mut end = ends[best].trailing_zeros() as usize;
    let mut mask = best;
    let mut seq = vec![end];
    while mask.count_ones() > 1 {
        mask ^= 1 << end;
        let prev = u64::from(ends[mask]) & g.in_row(end);
        end = prev.trailing_zeros() as usize;
        seq.push(end);
    }
    seq.reverse();
    Ok(seq)
}

/// Vertices reachable from `v` by directed paths inside `allowed` (excluding `v`).
fn reach_within(g: &OrientedGraph, v: usize, allowed: u64) -> u64 {
    let mut seen = 0u64;
    let mut frontier = g.out_row(v) & allowed;
    while frontier != 0 {
        seen |= frontier;
        let mut next = 0;
        for u in Bits(frontier) {
            next |= g.out_row(u);
        }
        frontier = next & allowed & !seen;
    }
    seen
}

fn longest_path_bnb(g: &OrientedGraph, budget: SearchBudget) -> Result<Vec<usize>, SearchError> {
    let n = g.n();
    let mut meter = budget.meter();
    let mut best = vec![0];
    let mut seq = Vec::with_capacity(n);
    for start in 0..n {
        if best.len() == n {
            break;
        }
        seq.clear();
        seq.push(start);
        path_dfs(g, &mut seq, 1 << start, &mut best, &mut meter)?;
    }
    Ok(best)
}

fn path_dfs(
    g: &OrientedGraph,
    seq: &mut Vec<usize>,
    visited: u64,
    best: &mut Vec<usize>,
    meter: &mut Meter,
) -> Result<(), SearchError> {
    meter.tick()?;
    if seq.len() > best.len() {
        best.clone_from(seq);
    }
    let n = g.n();
    if best.len() == n {
        return Ok(());
    }
    let v = *seq.last().expect("nonempty");
    let free = full_mask(n) & !visited;
    let bound = seq.len() + reach_within(g, v, free).count_ones() as usize;
    if bound <= best.len() {
        return Ok(());
    }
    for w in Bits(g.out_row(v) & free) {
        seq.push(w);
        path_dfs(g, seq, visited | 1 << w, best, meter)?;
        seq.pop();
        if best.len() == n {
            break;
        }
    }
    Ok(())
}

/// A directed cycle, listed from its smallest vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedCycle {
    pub vertices: Vec<usize>,
}

impl DirectedCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when every consecutive pair, including last to first, is an arc of `g`
    /// and the vertices are distinct.
    pub fn is_valid_in(&self, g: &OrientedGraph) -> bool {
        let m = self.vertices.len();
        if m < 3 {
            return false;
        }
        let mut seen = 0u64;
        for &v in &self.vertices {
            if v >= g.n() || seen >> v & 1 == 1 {
                return false;
            }
            seen |= 1 << v;
        }
        (0..m).all(|i| g.has_arc(self.vertices[i], self.vertices[(i + 1) % m]))
    }
}

/// A maximum-length directed cycle, or `None` for an acyclic graph.
pub fn longest_directed_cycle(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<Option<DirectedCycle>, SearchError> {
    if g.n() <= DP_THRESHOLD {
        longest_cycle_dp(g, budget)
    } else {
        longest_cycle_bnb(g, budget)
    }
}

fn longest_cycle_dp(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<Option<DirectedCycle>, SearchError> {
    let n = g.n();
    if n < 3 {
        return Ok(None);
    }
    let mut meter = budget.meter();
    // ends[mask]: end vertices of paths covering `mask` that start at its lowest vertex.
    let mut ends = vec![0u32; 1 << n];
    for v in 0..n {
        ends[1 << v] = 1 << v;
    }
    let mut best: Option<(usize, usize)> = None;
    for mask in 1..ends.len() {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        meter.tick()?;
        let low = mask.trailing_zeros() as usize;
        let closing = u64::from(e) & g.in_row(low);
        if closing != 0 && best.is_none_or(|(m, _)| mask.count_ones() > m.count_ones()) {
            best = Some((mask, closing.trailing_zeros() as usize));
        }
        let above = !full_mask(low + 1);
        for v in Bits(u64::from(e)) {
            for w in Bits(g.out_row(v) & !(mask as u64) & above) {
                ends[mask | 1 << w] |= 1 << w;
            }
        }
    }
    Ok(best.map(|(mut mask, mut end)| {
        let mut seq = vec![end];
        while mask.count_ones() > 1 {
            mask ^= 1 << end;
            let prev = u64::from(ends[mask]) & g.in_row(end);
            end = prev.trailing_zeros() as usize;
            seq.push(end);
        }
        seq.reverse();
        DirectedCycle { vertices: seq }
    }))
}

fn longest_cycle_bnb(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<Option<DirectedCycle>, SearchError> {
    let n = g.n();
    let mut meter = budget.meter();
    let mut best: Vec<usize> = Vec::new();
    let mut seq = Vec::with_capacity(n);
    for start in 0..n {
        // Cycles through `start` use only larger vertices besides it.
        let allowed = !full_mask(start + 1) & full_mask(n);
        if (allowed.count_ones() as usize) < best.len() {
            break;
        }
        seq.clear();
        seq.push(start);
        cycle_dfs(g, start, allowed, &mut seq, &mut best, &mut meter)?;
    }
    Ok((!best.is_empty()).then_some(DirectedCycle { vertices: best }))
}

fn cycle_dfs(
    g: &OrientedGraph,
    start: usize,
    free: u64,
    seq: &mut Vec<usize>,
    best: &mut Vec<usize>,
    meter: &mut Meter,
) -> Result<(), SearchError> {
    meter.tick()?;
    let v = *seq.last().expect("nonempty");
    if seq.len() >= 3 && g.has_arc(v, start) && seq.len() > best.len() {
        best.clone_from(seq);
    }
    // Only vertices that can still return to `start` are useful.
    let reach = reach_within(g, v, free);
    let back = reach & g.in_row(start);
    if back == 0 && !(seq.len() >= 3 && g.has_arc(v, start)) {
        return Ok(());
    }
    if seq.len() + reach.count_ones() as usize <= best.len() {
        return Ok(());
    }
    for w in Bits(g.out_row(v) & free) {
        seq.push(w);
        cycle_dfs(g, start, free & !(1 << w), seq, best, meter)?;
        seq.pop();
    }
    Ok(())
}

/// True iff `g` has a directed cycle through every vertex.
pub fn is_hamiltonian(g: &OrientedGraph, budget: SearchBudget) -> Result<bool, SearchError> {
    if g.n() < 3 {
        return Ok(false);
    }
    Ok(longest_directed_cycle(g, budget)?.is_some_and(|c| c.len() == g.n()))
}

/// Number of vertex sequences that are directed Hamiltonian paths.
///
/// The graph with one vertex has one such path; the empty graph has none.
pub fn count_hamiltonian_directed_paths(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<u64, SearchError> {
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    let mut meter = budget.meter();
    if n <= COUNT_DP_THRESHOLD {
        let size = 1usize << n;
        let mut count = vec![0u64; size * n];
        for v in 0..n {
            count[(1 << v) * n + v] = 1;
        }
        for mask in 1..size {
            meter.tick()?;
            for v in Bits(mask as u64) {
                let c = count[mask * n + v];
                if c == 0 {
                    continue;
                }
                for w in Bits(g.out_row(v) & !(mask as u64)) {
                    count[(mask | 1 << w) * n + w] += c;
                }
            }
        }
        let full = size - 1;
        return Ok(count[full * n..].iter().sum());
    }
    let mut total = 0u64;
    for start in 0..n {
        count_dfs(g, start, 1 << start, 1, &mut total, &mut meter)?;
    }
    Ok(total)
}

fn count_dfs(
    g: &OrientedGraph,
    v: usize,
    visited: u64,
    depth: usize,
    total: &mut u64,
    meter: &mut Meter,
) -> Result<(), SearchError> {
    meter.tick()?;
    if depth == g.n() {
        *total += 1;
        return Ok(());
    }
    for w in Bits(g.out_row(v) & !visited) {
        count_dfs(g, w, visited | 1 << w, depth + 1, total, meter)?;
    }
    Ok(())
}

/// A spanning path whose arcs alternate in direction, if one exists.
pub fn find_hamiltonian_antidirected_path(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<Option<PathEmbedding>, SearchError> {
    let n = g.n();
    if n == 0 {
        return Ok(None);
    }
    for first in [Sign::Forward, Sign::Backward] {
        let pattern = SignPattern::alternating(n - 1, first);
        if let Some(e) = find_oriented_path(g, &pattern, budget)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

pub fn has_hamiltonian_antidirected_path(
    g: &OrientedGraph,
    budget: SearchBudget,
) -> Result<bool, SearchError> {
    Ok(find_hamiltonian_antidirected_path(g, budget)?.is_some())
}

/// Backtracking isomorphism test, matching vertices by (out, in) degree.
pub fn is_isomorphic(g: &OrientedGraph, h: &OrientedGraph) -> bool {
    let n = g.n();
    if n != h.n() || g.arc_count() != h.arc_count() {
        return false;
    }
    let deg = |x: &OrientedGraph, v| (x.out_degree(v), x.in_degree(v));
    let mut dg: Vec<_> = (0..n).map(|v| deg(g, v)).collect();
    let mut dh: Vec<_> = (0..n).map(|v| deg(h, v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return false;
    }
    let mut map = Vec::with_capacity(n);
    iso_extend(g, h, &mut map, 0)
}

fn iso_extend(g: &OrientedGraph, h: &OrientedGraph, map: &mut Vec<usize>, used: u64) -> bool {
    let v = map.len();
    if v == g.n() {
        return true;
    }
    for w in Bits(full_mask(h.n()) & !used) {
        if g.out_degree(v) != h.out_degree(w) || g.in_degree(v) != h.in_degree(w) {
            continue;
        }
        let consistent = map.iter().enumerate().all(|(u, &x)| {
            g.has_arc(u, v) == h.has_arc(x, w) && g.has_arc(v, u) == h.has_arc(w, x)
        });
        if consistent {
            map.push(w);
            if iso_extend(g, h, map, used | 1 << w) {
                return true;
            }
            map.pop();
        }
    }
    false
}
