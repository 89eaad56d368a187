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

//! Naive reference implementations. They share no code with the library
//! beyond reading arcs through `has_arc`.

#![allow(dead_code)]

use twoblock::search::Sign;
use twoblock::OrientedGraph;

/// Visits every injective vertex sequence of length `len`.
pub fn for_each_sequence(n: usize, len: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(n: usize, len: usize, seq: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if seq.len() == len {
            return f(seq);
        }
        for v in 0..n {
            if !seq.contains(&v) {
                seq.push(v);
                if rec(n, len, seq, f) {
                    return true;
                }
                seq.pop();
            }
        }
        false
    }
    rec(n, len, &mut Vec::new(), f)
}

pub fn realises(g: &OrientedGraph, seq: &[usize], signs: &[Sign]) -> bool {
    seq.windows(2).zip(signs).all(|(w, s)| match s {
        Sign::Forward => g.has_arc(w[0], w[1]),
        Sign::Backward => g.has_arc(w[1], w[0]),
    })
}

/// Existence of an embedding by scanning every vertex sequence.
pub fn naive_embeds(g: &OrientedGraph, signs: &[Sign]) -> bool {
    if signs.len() + 1 > g.n() {
        return false;
    }
    for_each_sequence(g.n(), signs.len() + 1, &mut |seq| realises(g, seq, signs))
}

/// Number of arcs in a longest directed path.
pub fn naive_longest_path(g: &OrientedGraph) -> usize {
    let fwd = vec![Sign::Forward; g.n()];
    (1..g.n()).rev().find(|&l| naive_embeds(g, &fwd[..l])).unwrap_or(0)
}

/// Length of a longest directed cycle, 0 if acyclic.
pub fn naive_longest_cycle(g: &OrientedGraph) -> usize {
    let mut best = 0;
    for len in 3..=g.n() {
        let found = for_each_sequence(g.n(), len, &mut |seq| {
            seq.windows(2).all(|w| g.has_arc(w[0], w[1])) && g.has_arc(seq[len - 1], seq[0])
        });
        if found {
            best = len;
        }
    }
    best
}

pub fn naive_hamiltonian_path_count(g: &OrientedGraph) -> u64 {
    let mut count = 0;
    if g.n() == 0 {
        return 0;
    }
    for_each_sequence(g.n(), g.n(), &mut |seq| {
        if seq.windows(2).all(|w| g.has_arc(w[0], w[1])) {
            count += 1;
        }
        false
    });
    count
}

/// Every pattern over {F, B} with exactly `len` arcs.
pub fn all_patterns(len: usize) -> Vec<Vec<Sign>> {
    (0..1u32 << len)
        .map(|bits| {
            (0..len)
                .map(|i| if bits >> i & 1 == 0 { Sign::Forward } else { Sign::Backward })
                .collect()
        })
        .collect()
}

/// Graph from an arc list, permuted by `perm` (vertex v becomes perm[v]).
pub fn relabel(g: &OrientedGraph, perm: &[usize]) -> OrientedGraph {
    let arcs: Vec<_> = g.arcs().map(|(u, v)| (perm[u], perm[v])).collect();
    OrientedGraph::new(g.n(), &arcs).unwrap()
}

/// Number of distinct labelled copies of `g`.
pub fn labelled_copies(g: &OrientedGraph) -> usize {
    let mut seen = std::collections::HashSet::new();
    for_each_sequence(g.n(), g.n(), &mut |perm| {
        let mut arcs: Vec<_> = g.arcs().map(|(u, v)| (perm[u], perm[v])).collect();
        arcs.sort_unstable();
        seen.insert(arcs);
        false
    });
    seen.len()
}
