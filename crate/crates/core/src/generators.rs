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

//! Named graph families and seeded random inputs.

use thiserror::Error;

use crate::graph::{full_mask, GraphError, OrientedGraph, MAX_VERTICES};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("regular tournaments require odd order, got {0}")]
    EvenOrder(usize),
    #[error("order {0} is too small (need at least 3)")]
    OrderTooSmall(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 3 mod 4, so -1 is a quadratic residue")]
    BadResidueClass(u64),
    #[error("no oriented graph on {n} vertices has minimum semi-degree {min_semi}")]
    Infeasible { n: usize, min_semi: usize },
    #[error("degree repair gave up after {attempts} attempts (n = {n}, target {min_semi})")]
    RepairFailed { n: usize, min_semi: usize, attempts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RegularTournament,
    Paley,
    Transitive,
    RandomOriented,
    RandomTournament,
}

/// Parameters for one generator call. `min_semi` is read only by
/// [`Family::RandomOriented`], `seed` only by the random families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub min_semi: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<OrientedGraph, GenError> {
        match self.family {
            Family::RegularTournament => regular_tournament(self.n),
            Family::Paley => paley_tournament(self.n as u64),
            Family::Transitive => transitive_tournament(self.n),
            Family::RandomOriented => random_oriented_graph(self.n, self.min_semi, self.seed),
            Family::RandomTournament => random_tournament(self.n, self.seed),
        }
    }
}

fn check_order(n: usize) -> Result<(), GenError> {
    if n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices(n).into());
    }
    Ok(())
}

/// Circulant tournament on Z_k with arcs `i -> i + j` for `j` in `1..=(k-1)/2`.
pub fn regular_tournament(k: usize) -> Result<OrientedGraph, GenError> {
    if k < 3 {
        return Err(GenError::OrderTooSmall(k));
    }
    if k.is_multiple_of(2) {
        return Err(GenError::EvenOrder(k));
    }
    check_order(k)?;
    let offsets: Vec<usize> = (1..=(k - 1) / 2).collect();
    Ok(circulant(k, &offsets))
}

/// Paley tournament on Z_q: `i -> j` iff `j - i` is a nonzero square mod `q`.
pub fn paley_tournament(q: u64) -> Result<OrientedGraph, GenError> {
    if !is_prime(q) {
        return Err(GenError::NotPrime(q));
    }
    if q % 4 != 3 {
        return Err(GenError::BadResidueClass(q));
    }
    check_order(q as usize)?;
    let mut residues: Vec<usize> = (1..q).map(|x| (x * x % q) as usize).collect();
    residues.sort_unstable();
    residues.dedup();
    Ok(circulant(q as usize, &residues))
}

fn circulant(n: usize, offsets: &[usize]) -> OrientedGraph {
    let out = (0..n)
        .map(|i| offsets.iter().fold(0u64, |row, &j| row | 1 << ((i + j) % n)))
        .collect();
    OrientedGraph::from_out_rows_unchecked(n, out)
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arc `i -> j` iff `i < j`.
pub fn transitive_tournament(n: usize) -> Result<OrientedGraph, GenError> {
    check_order(n)?;
    let out = (0..n).map(|i| full_mask(n) & !full_mask(i + 1)).collect();
    Ok(OrientedGraph::from_out_rows_unchecked(n, out))
}

/// Every pair `i < j` oriented by one coin flip, pairs taken in lexicographic order.
pub fn random_tournament(n: usize, seed: u64) -> Result<OrientedGraph, GenError> {
    check_order(n)?;
    let mut rng = SplitMix64::new(seed);
    let mut out = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.coin() {
                out[i] |= 1 << j;
            } else {
                out[j] |= 1 << i;
            }
        }
    }
    Ok(OrientedGraph::from_out_rows_unchecked(n, out))
}

/// Seeded oriented graph with minimum semi-degree at least `min_semi`.
///
/// Each pair `i < j` is kept with probability 1/2 and oriented by a second
/// coin. A repair loop then fixes deficient vertices in index order: an
/// out-deficient `v` gains an arc `v -> w` to a uniformly chosen
/// non-neighbour `w` whose in-degree leaves room for `w` to reach the target
/// out-degree. When no such `w` exists a directed path `u -> ... -> v` from a
/// vertex with spare out-degree, or else with a free non-neighbour, is
/// reversed instead. In-deficient vertices are handled
/// symmetrically. The loop is capped at `100 n^2` steps.
pub fn random_oriented_graph(
    n: usize,
    min_semi: usize,
    seed: u64,
) -> Result<OrientedGraph, GenError> {
    check_order(n)?;
    if n == 0 || min_semi > (n - 1) / 2 {
        if min_semi == 0 && n == 0 {
            return Ok(OrientedGraph::from_out_rows_unchecked(0, Vec::new()));
        }
        return Err(GenError::Infeasible { n, min_semi });
    }
    let mut rng = SplitMix64::new(seed);
    let mut b = Builder::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.coin() {
                if rng.coin() {
                    b.add(i, j);
                } else {
                    b.add(j, i);
                }
            }
        }
    }
    let attempts = 100 * n * n;
    if !b.repair(min_semi, attempts, &mut rng) {
        return Err(GenError::RepairFailed { n, min_semi, attempts });
    }
    let g = OrientedGraph::from_out_rows_unchecked(n, b.out);
    if g.semi_degrees().min_semi < min_semi {
        return Err(GenError::RepairFailed { n, min_semi, attempts });
    }
    Ok(g)
}

struct Builder {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self { n, out: vec![0; n], inn: vec![0; n] }
    }

    fn add(&mut self, u: usize, v: usize) {
        self.out[u] |= 1 << v;
        self.inn[v] |= 1 << u;
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.out[u] &= !(1 << v);
        self.inn[v] &= !(1 << u);
    }

    fn outdeg(&self, v: usize) -> usize {
        self.out[v].count_ones() as usize
    }

    fn indeg(&self, v: usize) -> usize {
        self.inn[v].count_ones() as usize
    }

    fn non_neighbors(&self, v: usize) -> u64 {
        full_mask(self.n) & !(self.out[v] | self.inn[v] | 1 << v)
    }

    fn repair(&mut self, d: usize, attempts: usize, rng: &mut SplitMix64) -> bool {
        let n = self.n;
        for _ in 0..attempts {
            let Some(v) = (0..n).find(|&v| self.outdeg(v) < d || self.indeg(v) < d) else {
                return true;
            };
            if self.outdeg(v) < d {
                self.raise(v, d, rng, false);
            } else {
                self.raise(v, d, rng, true);
            }
        }
        (0..n).all(|v| self.outdeg(v) >= d && self.indeg(v) >= d)
    }

    /// One repair step at `v`. With `incoming == false` raises the out-degree,
    /// otherwise the in-degree (by working on the mirrored rows).
    fn raise(&mut self, v: usize, d: usize, rng: &mut SplitMix64, incoming: bool) {
        let n = self.n;
        // In the mirrored view "out" means "in".
        let deg_toward = |b: &Self, x: usize| if incoming { b.outdeg(x) } else { b.indeg(x) };
        let deg_away = |b: &Self, x: usize| if incoming { b.indeg(x) } else { b.outdeg(x) };
        let add = |b: &mut Self, x: usize, y: usize| if incoming { b.add(y, x) } else { b.add(x, y) };

        let free = self.non_neighbors(v);
        let roomy = crate::graph::Bits(free)
            .filter(|&w| deg_toward(self, w) + 2 + d <= n)
            .fold(0u64, |m, w| m | 1 << w);
        if roomy != 0 {
            let w = rng.pick_bit(roomy);
            add(self, v, w);
            return;
        }
        // Reverse a directed path x -> ... -> v (mirrored: v -> ... -> x) whose
        // start has spare degree; only the two ends change their degrees.
        if deg_toward(self, v) > d {
            let back = |b: &Self, y: usize| if incoming { b.out[y] } else { b.inn[y] };
            let mut parent = vec![usize::MAX; n];
            let mut seen = 1u64 << v;
            let mut queue = std::collections::VecDeque::from([v]);
            let (mut spare, mut movable) = (0u64, 0u64);
            while let Some(y) = queue.pop_front() {
                for u in crate::graph::Bits(back(self, y) & !seen) {
                    seen |= 1 << u;
                    parent[u] = y;
                    if deg_away(self, u) > d {
                        spare |= 1 << u;
                    } else if self.non_neighbors(u) != 0 {
                        movable |= 1 << u;
                    }
                    queue.push_back(u);
                }
            }
            // Failing a surplus, hand the deficit to a vertex that can still
            // gain an arc.
            if spare == 0 {
                spare = movable;
            }
            if spare != 0 {
                let mut u = rng.pick_bit(spare);
                while u != v {
                    let p = parent[u];
                    if incoming {
                        self.remove(p, u);
                        self.add(u, p);
                    } else {
                        self.remove(u, p);
                        self.add(p, u);
                    }
                    u = p;
                }
                return;
            }
        }
        if free != 0 {
            let w = rng.pick_bit(free);
            add(self, v, w);
        }
    }
}
