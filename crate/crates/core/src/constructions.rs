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

//! PDAs from the subset graph `S_m(a, b, lambda)`.
//!
//! Users are the `a`-subsets of `{1..m}`, packets the `b`-subsets, and a
//! user is joined to a packet when their intersection has exactly `lambda`
//! elements. Two strong edge colorings of that graph are available:
//!
//! * `S1` colors edge `(X, Y)` by the pair (symmetric difference, intersection),
//! * `S2` colors it by the pair `(X \ Y, Y \ X)`.
//!
//! Whichever uses fewer colors gives the PDA with the lower rate. Colors are
//! numbered by enumerating the keys lexicographically, so labels follow from
//! subset arithmetic alone.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::bigraph::{
    graph_to_pda, BipartiteGraph, ColoredBipartiteGraph, ColoredEdge, Edge, GraphError,
};
use crate::combinatorics::{
    binomial, enumerate_subsets, rank_subset, CombinatoricsError, Count, Subset, MAX_GROUND,
};
use crate::pda::{Cell, Pda, SchemeParams};

/// Arrays with more cells than this are never materialized.
pub const MAX_CELLS: u128 = 1 << 27;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("array would have {cells} cells, above the materialization limit of {MAX_CELLS}; use the analytic parameters instead")]
    TooLarge { cells: Count },
    #[error("color {0} of the canonical enumeration colors no edge")]
    UnusedColor(u32),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn invalid(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::InvalidParams(msg.into())
}

/// Parameters `(m, a, b, lambda)` of the subset graph `S_m(a, b, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetGraphParams {
    pub m: u32,
    pub a: u32,
    pub b: u32,
    pub lambda: u32,
}

impl SubsetGraphParams {
    pub fn new(m: u32, a: u32, b: u32, lambda: u32) -> Result<Self, ConstructionError> {
        if a == 0 || a >= m {
            return Err(invalid(format!("need 0 < a < m (a = {a}, m = {m})")));
        }
        if b == 0 || b >= m {
            return Err(invalid(format!("need 0 < b < m (b = {b}, m = {m})")));
        }
        if lambda > a.min(b) {
            return Err(invalid(format!(
                "need lambda <= min(a, b) (lambda = {lambda})"
            )));
        }
        if a + b - lambda > m {
            return Err(invalid(format!(
                "need a + b - lambda <= m (a + b - lambda = {}, m = {m}); otherwise the graph has no edges",
                a + b - lambda
            )));
        }
        Ok(SubsetGraphParams { m, a, b, lambda })
    }

    /// Every valid parameter tuple with `m <= max_m`.
    pub fn all_up_to(max_m: u32) -> Vec<SubsetGraphParams> {
        let mut out = Vec::new();
        for m in 2..=max_m.min(MAX_GROUND) {
            for a in 1..m {
                for b in 1..m {
                    for lambda in 0..=a.min(b) {
                        if let Ok(p) = SubsetGraphParams::new(m, a, b, lambda) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// `|X △ Y|` for every edge, `a + b - 2 lambda`.
    pub fn sym_diff_size(&self) -> u32 {
        self.a + self.b - 2 * self.lambda
    }

    fn c(n: u32, k: u32) -> Count {
        binomial(n as u64, k as u64)
    }

    /// Common degree of every user vertex, `C(a, lambda) C(m - a, b - lambda)`.
    pub fn left_degree(&self) -> Count {
        Self::c(self.a, self.lambda) * Self::c(self.m - self.a, self.b - self.lambda)
    }

    /// Number of S1 colors, `C(m, d) C(m - d, lambda)` with `d = a + b - 2 lambda`.
    pub fn s1_colors(&self) -> Count {
        let d = self.sym_diff_size();
        Self::c(self.m, d) * Self::c(self.m - d, self.lambda)
    }

    /// Number of S2 colors, `C(m, d) C(d, a - lambda)`.
    pub fn s2_colors(&self) -> Count {
        let d = self.sym_diff_size();
        Self::c(self.m, d) * Self::c(d, self.a - self.lambda)
    }

    /// Edges per S1 color class.
    pub fn s1_class_size(&self) -> Count {
        Self::c(self.sym_diff_size(), self.a - self.lambda)
    }

    /// Edges per S2 color class.
    pub fn s2_class_size(&self) -> Count {
        Self::c(self.m - self.sym_diff_size(), self.lambda)
    }
}

impl fmt::Display for SubsetGraphParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(m={}, a={}, b={}, lambda={})",
            self.m, self.a, self.b, self.lambda
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    S1,
    S2,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::S1 => "S1",
            Strategy::S2 => "S2",
        })
    }
}

/// The pair of sets shared by all edges of one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorKey {
    /// Symmetric difference `d` and intersection `i`.
    S1 { d: Subset, i: Subset },
    /// `u = X \ Y` and `v = Y \ X`.
    S2 { u: Subset, v: Subset },
}

impl ColorKey {
    pub fn of_edge(strategy: Strategy, x: &Subset, y: &Subset) -> ColorKey {
        match strategy {
            Strategy::S1 => ColorKey::S1 {
                d: x.symmetric_difference(y),
                i: x.intersection(y),
            },
            Strategy::S2 => ColorKey::S2 {
                u: x.difference(y),
                v: y.difference(x),
            },
        }
    }

    /// 1-based label under the canonical key order: by rank of the first
    /// set, then by rank of the second among sets disjoint from the first.
    pub fn color_id(&self) -> u64 {
        let (first, second) = match self {
            ColorKey::S1 { d, i } => (d, i),
            ColorKey::S2 { u, v } => (u, v),
        };
        let free = first.complement();
        let per_first = crate::combinatorics::small_binomial(free.len(), second.len());
        (rank_subset(first) - 1) * per_first + rank_subset(&second.relabel_within(&free))
    }
}

/// `S_m(a, b, lambda)` with its vertex labels in lexicographic order.
#[derive(Debug, Clone)]
pub struct SubsetGraph {
    pub params: SubsetGraphParams,
    /// `a`-subsets; index `i` is user `i + 1`.
    pub left: Vec<Subset>,
    /// `b`-subsets; index `j` is packet `j + 1`.
    pub right: Vec<Subset>,
    pub graph: BipartiteGraph,
}

fn cells_of(params: &SubsetGraphParams) -> Count {
    binomial(params.m as u64, params.a as u64) * binomial(params.m as u64, params.b as u64)
}

fn check_materializable(params: &SubsetGraphParams) -> Result<(), ConstructionError> {
    let cells = cells_of(params);
    match cells.value() {
        Some(v) if v <= MAX_CELLS => Ok(()),
        _ => Err(ConstructionError::TooLarge { cells }),
    }
}

pub fn subset_graph(params: SubsetGraphParams) -> Result<SubsetGraph, ConstructionError> {
    let params = SubsetGraphParams::new(params.m, params.a, params.b, params.lambda)?;
    if params.m > MAX_GROUND {
        return Err(invalid(format!(
            "m = {} exceeds {MAX_GROUND} for a materialized graph",
            params.m
        )));
    }
    check_materializable(&params)?;
    let left: Vec<Subset> = enumerate_subsets(params.m, params.a)?.collect();
    let right: Vec<Subset> = enumerate_subsets(params.m, params.b)?.collect();
    let mut edges = Vec::new();
    for (xi, x) in left.iter().enumerate() {
        for (yi, y) in right.iter().enumerate() {
            if x.intersection(y).len() == params.lambda {
                edges.push(Edge::new(xi, yi));
            }
        }
    }
    let graph = BipartiteGraph::new(left.len(), right.len(), edges)?;
    Ok(SubsetGraph {
        params,
        left,
        right,
        graph,
    })
}

pub fn color_with(sg: &SubsetGraph, strategy: Strategy) -> ColoredBipartiteGraph {
    let num_colors = match strategy {
        Strategy::S1 => sg.params.s1_colors(),
        Strategy::S2 => sg.params.s2_colors(),
    };
    let num_colors = num_colors
        .value()
        .and_then(|v| u32::try_from(v).ok())
        .expect("materialized graphs have few colors");
    let edges = sg
        .graph
        .edges()
        .iter()
        .map(|&edge| {
            let key = ColorKey::of_edge(strategy, &sg.left[edge.left], &sg.right[edge.right]);
            ColoredEdge {
                edge,
                color: key.color_id() as u32,
            }
        })
        .collect();
    ColoredBipartiteGraph::new(
        sg.graph.left_count(),
        sg.graph.right_count(),
        num_colors,
        edges,
    )
    .expect("key arithmetic stays within the color range")
}

pub fn color_s1(sg: &SubsetGraph) -> ColoredBipartiteGraph {
    color_with(sg, Strategy::S1)
}

pub fn color_s2(sg: &SubsetGraph) -> ColoredBipartiteGraph {
    color_with(sg, Strategy::S2)
}

/// `(K, F, Z, S)` and coding gain `g` as exact counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyticParams {
    pub k: Count,
    pub f: Count,
    pub z: Count,
    pub s: Count,
    pub g: Option<Count>,
}

fn ratio(num: Count, den: Count) -> Option<Ratio<u128>> {
    match (num.value(), den.value()) {
        (Some(n), Some(d)) if d > 0 => Some(Ratio::new(n, d)),
        _ => None,
    }
}

impl AnalyticParams {
    /// `Z/F`, absent if either count overflowed.
    pub fn memory_ratio(&self) -> Option<Ratio<u128>> {
        ratio(self.z, self.f)
    }

    /// `S/F`, absent if either count overflowed.
    pub fn rate(&self) -> Option<Ratio<u128>> {
        ratio(self.s, self.f)
    }

    /// Exact parameters in the form produced by [`crate::pda::scheme_params`].
    pub fn scheme_params(&self) -> Option<SchemeParams> {
        let g = match self.g {
            Some(g) => Some(g.value()?),
            None => None,
        };
        Some(SchemeParams {
            k: self.k.value()?,
            f: self.f.value()?,
            z: self.z.value()?,
            s: self.s.value()?,
            g,
            memory_ratio: self.memory_ratio()?,
            rate: self.rate()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theorem3Params {
    pub params: SubsetGraphParams,
    pub scheme: AnalyticParams,
    pub left_degree: Count,
    pub s_s1: Count,
    pub s_s2: Count,
    pub chosen: Strategy,
}

/// Scheme parameters of the subset-graph PDA, from binomials alone.
///
/// `S` is the smaller of the two color counts (ties go to S1) and `g` the
/// larger of the two class sizes.
pub fn theorem3_params(params: SubsetGraphParams) -> Result<Theorem3Params, ConstructionError> {
    let p = SubsetGraphParams::new(params.m, params.a, params.b, params.lambda)?;
    let k = binomial(p.m as u64, p.a as u64);
    let f = binomial(p.m as u64, p.b as u64);
    let left_degree = p.left_degree();
    let z = f.checked_sub(left_degree).expect("degree never exceeds F");
    let (s_s1, s_s2) = (p.s1_colors(), p.s2_colors());
    let chosen = match s_s1.partial_cmp(&s_s2) {
        Some(std::cmp::Ordering::Greater) => Strategy::S2,
        _ => Strategy::S1,
    };
    Ok(Theorem3Params {
        params: p,
        scheme: AnalyticParams {
            k,
            f,
            z,
            s: s_s1.min(s_s2),
            g: Some(p.s1_class_size().max(p.s2_class_size())),
        },
        left_degree,
        s_s1,
        s_s2,
        chosen,
    })
}

/// Builds the subset graph, colors it with the cheaper strategy, and reads
/// off the array.
pub fn theorem3_pda(params: SubsetGraphParams) -> Result<Pda, ConstructionError> {
    let analytic = theorem3_params(params)?;
    let sg = subset_graph(params)?;
    let colored = color_with(&sg, analytic.chosen);
    graph_to_pda(&colored).map_err(|e| match e {
        GraphError::GappedColors { missing, .. } => ConstructionError::UnusedColor(missing),
        other => other.into(),
    })
}

/// Parameters of the Maddah-Ali–Niesen scheme for `K` users caching a
/// `t/K` fraction: `(t+1)-(K, C(K,t), C(K-1,t-1), C(K,t+1))`.
pub fn maddah_niesen_params(k: u64, t: u64) -> Result<AnalyticParams, ConstructionError> {
    if k == 0 || t > k {
        return Err(invalid(format!(
            "need K >= 1 and 0 <= t <= K (K = {k}, t = {t})"
        )));
    }
    let s = binomial(k, t + 1);
    Ok(AnalyticParams {
        k: Count::from(k),
        f: binomial(k, t),
        z: if t == 0 {
            Count::ZERO
        } else {
            binomial(k - 1, t - 1)
        },
        s,
        g: (t < k).then(|| Count::from(t + 1)),
    })
}

/// The Maddah-Ali–Niesen PDA: rows are the `t`-subsets of the users, and
/// user `k` caches row `T` exactly when `k` is in `T`.
pub fn maddah_niesen_pda(k: u32, t: u32) -> Result<Pda, ConstructionError> {
    maddah_niesen_params(k as u64, t as u64)?;
    if t == k {
        return Ok(Pda::all_star(1, k as usize).expect("K >= 1"));
    }
    if t == 0 {
        let cells = (1..=k).map(Cell::Color).collect();
        return Ok(Pda::new(1, k as usize, cells).expect("K >= 1"));
    }
    theorem3_pda(SubsetGraphParams::new(k, 1, t, 0)?)
}
