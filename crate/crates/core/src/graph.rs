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

//! Oriented graphs stored as bit-matrix adjacency.
//!
//! Vertices are dense ids `0..n`. Every vertex owns one out-row and one
//! in-row, each a single `u64`, so `n` is capped at [`MAX_VERTICES`].

use std::fmt;

use thiserror::Error;

/// Largest supported vertex count (one machine word per adjacency row).
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop arc ({0},{0})")]
    LoopArc(usize),
    #[error("arcs ({0},{1}) and ({1},{0}) form a 2-cycle")]
    TwoCycle(usize, usize),
    #[error("arc ({0},{1}) listed more than once")]
    DuplicateArc(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("{0} vertices exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
}

/// Iterator over the set bits of a word, lowest first.
#[derive(Debug, Clone, Copy)]
pub struct Bits(pub u64);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Bits {}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Minimum out-degree, minimum in-degree and minimum semi-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DegreeSummary {
    pub min_out: usize,
    pub min_in: usize,
    pub min_semi: usize,
}

/// A loopless digraph with at most one arc between any two vertices.
///
/// Values are immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrientedGraph {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
    arcs: usize,
}

impl OrientedGraph {
    /// Builds a graph from an arc list, validating every invariant.
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut out = vec![0u64; n];
        for &(u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::LoopArc(u));
            }
            if out[u] >> v & 1 == 1 {
                return Err(GraphError::DuplicateArc(u, v));
            }
            if out[v] >> u & 1 == 1 {
                return Err(GraphError::TwoCycle(v, u));
            }
            out[u] |= 1 << v;
        }
        Ok(Self::from_out_rows_unchecked(n, out))
    }

    /// The graph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, &[])
    }

    /// Builds a graph from out-rows without validation.
    ///
    /// Callers must guarantee `n <= MAX_VERTICES`, `out.len() == n`, no bit
    /// at or above `n`, no loops and no 2-cycles. Used by enumeration loops
    /// whose output is correct by construction.
    pub fn from_out_rows_unchecked(n: usize, out: Vec<u64>) -> Self {
        debug_assert!(n <= MAX_VERTICES && out.len() == n);
        let mut inn = vec![0u64; n];
        let mut arcs = 0;
        for (u, &row) in out.iter().enumerate() {
            debug_assert_eq!(row >> u & 1, 0, "loop at {u}");
            debug_assert_eq!(row & !full_mask(n), 0);
            arcs += row.count_ones() as usize;
            for v in Bits(row) {
                inn[v] |= 1 << u;
            }
        }
        debug_assert!((0..n).all(|u| out[u] & inn[u] == 0), "2-cycle present");
        Self { n, out, inn, arcs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.out[u] >> v & 1 == 1
    }

    /// True when `u` and `v` are joined by an arc in either direction.
    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    /// Out-neighbourhood of `v` as a bit row.
    #[inline]
    pub fn out_row(&self, v: usize) -> u64 {
        self.out[v]
    }

    /// In-neighbourhood of `v` as a bit row.
    #[inline]
    pub fn in_row(&self, v: usize) -> u64 {
        self.inn[v]
    }

    pub fn out_rows(&self) -> &[u64] {
        &self.out
    }

    pub fn out_neighbors(&self, v: usize) -> Bits {
        Bits(self.out[v])
    }

    pub fn in_neighbors(&self, v: usize) -> Bits {
        Bits(self.inn[v])
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].count_ones() as usize
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].count_ones() as usize
    }

    /// All arcs in lexicographic `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, &row)| Bits(row).map(move |v| (u, v)))
    }

    pub fn semi_degrees(&self) -> DegreeSummary {
        if self.n == 0 {
            return DegreeSummary::default();
        }
        let min_out = (0..self.n).map(|v| self.out_degree(v)).min().unwrap_or(0);
        let min_in = (0..self.n).map(|v| self.in_degree(v)).min().unwrap_or(0);
        DegreeSummary {
            min_out,
            min_in,
            min_semi: min_out.min(min_in),
        }
    }

    /// Minimum semi-degree alone; cheaper than [`Self::semi_degrees`] in hot loops.
    #[inline]
    pub fn min_semi_degree(&self) -> usize {
        let mut m = usize::MAX;
        for v in 0..self.n {
            m = m
                .min(self.out[v].count_ones() as usize)
                .min(self.inn[v].count_ones() as usize);
        }
        if self.n == 0 {
            0
        } else {
            m
        }
    }

    /// The graph with every arc reversed.
    pub fn reverse(&self) -> Self {
        Self {
            n: self.n,
            out: self.inn.clone(),
            inn: self.out.clone(),
            arcs: self.arcs,
        }
    }

    /// Places `other` after `self`, shifting its ids by `self.n()`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, GraphError> {
        let n = self.n + other.n;
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let shift = self.n;
        let mut out = self.out.clone();
        out.extend(other.out.iter().map(|&row| row << shift));
        Ok(Self::from_out_rows_unchecked(n, out))
    }

    /// The subgraph induced on the vertices of `mask`, relabelled in increasing order.
    pub fn induced(&self, mask: u64) -> Self {
        let keep: Vec<usize> = Bits(mask & full_mask(self.n)).collect();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let out = keep
            .iter()
            .map(|&v| {
                Bits(self.out[v] & mask).fold(0u64, |row, w| row | 1 << pos[w])
            })
            .collect();
        Self::from_out_rows_unchecked(keep.len(), out)
    }

    /// Weakly connected component containing `v`, as a bit row.
    pub fn weak_component(&self, v: usize) -> u64 {
        let mut seen = 1u64 << v;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for u in Bits(frontier) {
                next |= self.out[u] | self.inn[u];
            }
            frontier = next & !seen;
            seen |= frontier;
        }
        seen
    }
}

impl fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrientedGraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .finish()
    }
}
