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

//! Two-block oriented paths in oriented graphs of large minimum semi-degree.
//!
//! * [`graph`]: bitset oriented graphs.
//! * [`generators`]: seeded families of test graphs.
//! * [`search`]: exact embedding, longest path and cycle, Hamiltonicity.
//! * [`engine`]: constructive witness extraction from a longest path.
//! * [`harness`]: exhaustive and randomized verification campaigns.
//! * [`io`]: edge lists, witness and report JSON, DOT.

pub mod engine;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod io;
pub mod rng;
pub mod search;

pub use engine::{EngineError, ProofEngine, Rule, TwoBlockSpec, WitnessResult};
pub use generators::{Family, GenError, GenSpec};
pub use harness::{Campaign, CampaignReport, HarnessError};
pub use graph::{GraphError, OrientedGraph, MAX_VERTICES};
pub use search::{Flavor, PathEmbedding, SearchBudget, SearchError, Sign, SignPattern};
