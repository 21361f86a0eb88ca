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

//! Placement delivery arrays (PDAs) for coded caching, built from strong
//! edge colorings of bipartite subset graphs.
//!
//! * [`combinatorics`]: binomials, subset ranking and enumeration.
//! * [`pda`]: the array type, its checker and text format.
//! * [`bigraph`]: colored bipartite graphs and the array/graph conversions.
//! * [`constructions`]: subset-graph PDAs and the Maddah-Ali–Niesen scheme.
//! * [`caching`]: placement, XOR delivery and decoding on real bytes.
//! * [`comparison`]: exact rate/subpacketization comparisons across a family.

pub mod bigraph;
pub mod caching;
pub mod combinatorics;
pub mod comparison;
pub mod constructions;
pub mod pda;

pub use bigraph::{
    brute_force_sq, graph_to_pda, parse_graph, pda_to_graph, serialize_graph, theorem2_agrees,
    theorem2_agrees_graph, verify_strong_coloring, BipartiteGraph, ColoredBipartiteGraph,
    ColoredEdge, ColoringReport, ColoringViolation, Edge, GraphError,
};
pub use caching::{
    decode, deliver, place, simulate, CachingError, DeliveryReport, DemandVector, Library, Signal,
    SimulationConfig, Term, UserCache,
};
pub use combinatorics::{binomial, enumerate_subsets, rank_subset, unrank_subset, Count, Subset};
pub use constructions::{
    color_s1, color_s2, maddah_niesen_pda, subset_graph, theorem3_params, theorem3_pda,
    ConstructionError, Strategy, SubsetGraphParams, Theorem3Params,
};
pub use num_rational::Ratio;
pub use pda::{
    parse_pda, scheme_params, serialize_pda, verify_pda, Cell, Pda, PdaError, PdaReport,
    SchemeParams,
};
