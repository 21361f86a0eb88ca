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

//! Colored bipartite graphs on users (left) and packets (right).
//!
//! An array maps to a graph with an edge `(k, j)` for every non-star cell
//! `(j, k)`, colored by the cell's value, and back. The array is a valid
//! PDA exactly when every user vertex has the same degree and the coloring
//! is strong: two edges of one color share no endpoint and are not joined
//! by a third edge.

use std::fmt;

use thiserror::Error;

use crate::pda::{self, verify_pda, Cell, ParseError, ParseErrorKind, Pda, PdaError};

/// Largest edge count [`brute_force_sq`] will search.
pub const BRUTE_FORCE_EDGE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("both sides need at least one vertex (got {left} users, {right} packets)")]
    EmptySide { left: usize, right: usize },
    #[error("edge {0} references a vertex outside the graph")]
    VertexOutOfRange(Edge),
    #[error("edge {0} occurs more than once")]
    DuplicateEdge(Edge),
    #[error("edge {edge} has color {color}, outside 1..={max}")]
    ColorOutOfRange { edge: Edge, color: u32, max: u32 },
    #[error("colors must be exactly 1..={max}; color {missing} colors no edge")]
    GappedColors { max: u32, missing: u32 },
    #[error("an array without integer cells has no colored edges to convert")]
    NoColoredEdges,
    #[error("exhaustive search is capped at {cap} edges (got {edges})")]
    TooManyEdges { edges: usize, cap: usize },
    #[error(transparent)]
    InvalidPda(#[from] PdaError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// An edge between user `left` and packet `right`, zero-based; printed
/// one-based as `(k,j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
}

impl Edge {
    pub fn new(left: usize, right: usize) -> Self {
        Edge { left, right }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left + 1, self.right + 1)
    }
}

fn check_sides(left: usize, right: usize) -> Result<(), GraphError> {
    if left == 0 || right == 0 {
        Err(GraphError::EmptySide { left, right })
    } else {
        Ok(())
    }
}

/// Sorts and validates an edge list, rejecting out-of-range vertices and
/// repeated edges.
fn normalize<T, F>(left: usize, right: usize, items: &mut [T], edge_of: F) -> Result<(), GraphError>
where
    F: Fn(&T) -> Edge,
{
    check_sides(left, right)?;
    for item in items.iter() {
        let e = edge_of(item);
        if e.left >= left || e.right >= right {
            return Err(GraphError::VertexOutOfRange(e));
        }
    }
    items.sort_by_key(&edge_of);
    if let Some(w) = items.windows(2).find(|w| edge_of(&w[0]) == edge_of(&w[1])) {
        return Err(GraphError::DuplicateEdge(edge_of(&w[0])));
    }
    Ok(())
}

/// Sorted right-neighbour lists of every left vertex.
fn neighbor_lists(left: usize, edges: impl Iterator<Item = Edge>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); left];
    for e in edges {
        adj[e.left].push(e.right);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

fn has_edge(adj: &[Vec<usize>], left: usize, right: usize) -> bool {
    adj[left].binary_search(&right).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    edges: Vec<Edge>,
}

impl BipartiteGraph {
    pub fn new(
        left_count: usize,
        right_count: usize,
        mut edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        normalize(left_count, right_count, &mut edges, |e| *e)?;
        Ok(BipartiteGraph {
            left_count,
            right_count,
            edges,
        })
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    /// Edges sorted by `(left, right)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.left_count];
        for e in &self.edges {
            deg[e.left] += 1;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right_count];
        for e in &self.edges {
            deg[e.right] += 1;
        }
        deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredEdge {
    pub edge: Edge,
    pub color: u32,
}

/// A bipartite graph whose edges carry colors in `1..=S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredBipartiteGraph {
    left_count: usize,
    right_count: usize,
    num_colors: u32,
    edges: Vec<ColoredEdge>,
}

impl ColoredBipartiteGraph {
    /// Builds a graph with declared color count `num_colors`; every edge
    /// color must lie in `1..=num_colors`, but not every color need be used.
    pub fn new(
        left_count: usize,
        right_count: usize,
        num_colors: u32,
        mut edges: Vec<ColoredEdge>,
    ) -> Result<Self, GraphError> {
        normalize(left_count, right_count, &mut edges, |e| e.edge)?;
        if let Some(bad) = edges.iter().find(|e| e.color == 0 || e.color > num_colors) {
            return Err(GraphError::ColorOutOfRange {
                edge: bad.edge,
                color: bad.color,
                max: num_colors,
            });
        }
        Ok(ColoredBipartiteGraph {
            left_count,
            right_count,
            num_colors,
            edges,
        })
    }

    /// Like [`ColoredBipartiteGraph::new`] with `S` taken as the largest
    /// color present.
    pub fn from_edges(
        left_count: usize,
        right_count: usize,
        edges: Vec<ColoredEdge>,
    ) -> Result<Self, GraphError> {
        let s = edges.iter().map(|e| e.color).max().unwrap_or(0);
        Self::new(left_count, right_count, s, edges)
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn num_colors(&self) -> u32 {
        self.num_colors
    }

    /// Edges sorted by `(left, right)`.
    pub fn edges(&self) -> &[ColoredEdge] {
        &self.edges
    }

    pub fn uncolored(&self) -> BipartiteGraph {
        BipartiteGraph {
            left_count: self.left_count,
            right_count: self.right_count,
            edges: self.edges.iter().map(|e| e.edge).collect(),
        }
    }

    /// Edges of each color; index `s - 1` holds color `s`.
    pub fn color_classes(&self) -> Vec<Vec<Edge>> {
        let mut classes = vec![Vec::new(); self.num_colors as usize];
        for e in &self.edges {
            classes[e.color as usize - 1].push(e.edge);
        }
        classes
    }

    /// Fails with the first color in `1..=S` that colors no edge.
    pub fn check_contiguous(&self) -> Result<(), GraphError> {
        match self.color_classes().iter().position(Vec::is_empty) {
            Some(i) => Err(GraphError::GappedColors {
                max: self.num_colors,
                missing: i as u32 + 1,
            }),
            None => Ok(()),
        }
    }

    /// Relabels the colors in use to `1..=S'`, preserving their order.
    pub fn compacted(&self) -> ColoredBipartiteGraph {
        let mut used: Vec<u32> = self.edges.iter().map(|e| e.color).collect();
        used.sort_unstable();
        used.dedup();
        let edges = self
            .edges
            .iter()
            .map(|e| ColoredEdge {
                edge: e.edge,
                color: used.binary_search(&e.color).unwrap() as u32 + 1,
            })
            .collect();
        ColoredBipartiteGraph {
            left_count: self.left_count,
            right_count: self.right_count,
            num_colors: used.len() as u32,
            edges,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ColoringViolation {
    /// Two edges of one color share an endpoint.
    Adjacent {
        color: u32,
        first: Edge,
        second: Edge,
    },
    /// Two edges of one color are joined by the edge `via`.
    Linked {
        color: u32,
        first: Edge,
        second: Edge,
        via: Edge,
    },
}

impl fmt::Display for ColoringViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringViolation::Adjacent {
                color,
                first,
                second,
            } => {
                write!(
                    f,
                    "improper: color {color} on adjacent edges {first} and {second}"
                )
            }
            ColoringViolation::Linked {
                color,
                first,
                second,
                via,
            } => {
                write!(
                    f,
                    "not strong: color {color} on {first} and {second}, joined by {via}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringReport {
    pub proper: bool,
    pub strong: bool,
    /// Degree shared by every left vertex, if there is one.
    pub left_degree: Option<usize>,
    pub violations: Vec<ColoringViolation>,
}

fn common_value(values: &[usize]) -> Option<usize> {
    let first = *values.first()?;
    values.iter().all(|&v| v == first).then_some(first)
}

pub fn verify_strong_coloring(g: &ColoredBipartiteGraph) -> ColoringReport {
    let adj = neighbor_lists(g.left_count, g.edges.iter().map(|e| e.edge));
    let mut violations = Vec::new();
    let mut proper = true;

    for (i, class) in g.color_classes().iter().enumerate() {
        let color = i as u32 + 1;
        for (x, &first) in class.iter().enumerate() {
            for &second in &class[x + 1..] {
                if first.left == second.left || first.right == second.right {
                    proper = false;
                    violations.push(ColoringViolation::Adjacent {
                        color,
                        first,
                        second,
                    });
                    continue;
                }
                for via in [
                    Edge::new(first.left, second.right),
                    Edge::new(second.left, first.right),
                ] {
                    if has_edge(&adj, via.left, via.right) {
                        violations.push(ColoringViolation::Linked {
                            color,
                            first,
                            second,
                            via,
                        });
                    }
                }
            }
        }
    }

    let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
    ColoringReport {
        proper,
        strong: violations.is_empty(),
        left_degree: common_value(&degrees),
        violations,
    }
}

/// The colored graph of an arbitrary array, valid or not, with `S` the
/// largest color present.
pub fn graph_of_array(p: &Pda) -> ColoredBipartiteGraph {
    let mut edges = Vec::new();
    for k in 0..p.cols() {
        for j in 0..p.rows() {
            if let Cell::Color(color) = p.get(j, k) {
                edges.push(ColoredEdge {
                    edge: Edge::new(k, j),
                    color,
                });
            }
        }
    }
    ColoredBipartiteGraph {
        left_count: p.cols(),
        right_count: p.rows(),
        num_colors: p.num_colors(),
        edges,
    }
}

fn array_of_graph(g: &ColoredBipartiteGraph) -> Pda {
    let mut cells = vec![Cell::Star; g.left_count * g.right_count];
    for e in &g.edges {
        cells[e.edge.right * g.left_count + e.edge.left] = Cell::Color(e.color);
    }
    Pda::new(g.right_count, g.left_count, cells).expect("graph sides are nonempty")
}

/// Edge `(k, j)` for every integer cell `(j, k)`, colored by its value.
pub fn pda_to_graph(p: &Pda) -> Result<ColoredBipartiteGraph, GraphError> {
    let report = verify_pda(p);
    if let Some(first) = report.violations.first() {
        return Err(PdaError::Invalid {
            first: first.clone(),
            count: report.violations.len(),
        }
        .into());
    }
    if report.s == 0 {
        return Err(GraphError::NoColoredEdges);
    }
    Ok(graph_of_array(p))
}

/// Star wherever no edge exists, otherwise the edge's color.
pub fn graph_to_pda(g: &ColoredBipartiteGraph) -> Result<Pda, GraphError> {
    g.check_contiguous()?;
    Ok(array_of_graph(g))
}

fn graph_side_holds(g: &ColoredBipartiteGraph) -> bool {
    let report = verify_strong_coloring(g);
    report.strong && report.left_degree.is_some() && g.check_contiguous().is_ok()
}

/// Whether the array-side and graph-side characterizations of a PDA agree
/// on `p`: `verify_pda` accepts it exactly when its graph has constant user
/// degree and a strong coloring using every color.
pub fn theorem2_agrees(p: &Pda) -> bool {
    verify_pda(p).valid == graph_side_holds(&graph_of_array(p))
}

/// [`theorem2_agrees`] starting from the graph representation.
pub fn theorem2_agrees_graph(g: &ColoredBipartiteGraph) -> bool {
    verify_pda(&array_of_graph(g)).valid == graph_side_holds(g)
}

/// Exact strong chromatic index by backtracking, with an optimal coloring.
///
/// Two edges conflict when they share an endpoint or a third edge joins
/// them; the answer is the chromatic number of that conflict graph.
pub fn brute_force_sq(g: &BipartiteGraph) -> Result<(usize, ColoredBipartiteGraph), GraphError> {
    let n = g.edges.len();
    if n > BRUTE_FORCE_EDGE_CAP {
        return Err(GraphError::TooManyEdges {
            edges: n,
            cap: BRUTE_FORCE_EDGE_CAP,
        });
    }
    let adj = neighbor_lists(g.left_count, g.edges.iter().copied());
    let conflicts = |a: Edge, b: Edge| {
        a.left == b.left
            || a.right == b.right
            || has_edge(&adj, a.left, b.right)
            || has_edge(&adj, b.left, a.right)
    };

    let mut masks = vec![0u32; n];
    for (x, mask) in masks.iter_mut().enumerate() {
        for y in 0..n {
            if x != y && conflicts(g.edges[x], g.edges[y]) {
                *mask |= 1 << y;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(masks[x].count_ones()));

    let lower = greedy_clique(&order, &masks);
    let mut search = Search {
        order: &order,
        masks: &masks,
        colors: vec![usize::MAX; n],
        best: n + 1,
        best_colors: Vec::new(),
        lower,
    };
    search.run(0, 0);

    let edges = if n == 0 {
        Vec::new()
    } else {
        search
            .best_colors
            .iter()
            .zip(&g.edges)
            .map(|(&c, &edge)| ColoredEdge {
                edge,
                color: c as u32 + 1,
            })
            .collect()
    };
    let best = if n == 0 { 0 } else { search.best };
    let witness = ColoredBipartiteGraph::new(g.left_count, g.right_count, best as u32, edges)?;
    Ok((best, witness))
}

fn greedy_clique(order: &[usize], masks: &[u32]) -> usize {
    let mut clique = 0u32;
    for &x in order {
        if masks[x] & clique == clique {
            clique |= 1 << x;
        }
    }
    clique.count_ones() as usize
}

struct Search<'a> {
    order: &'a [usize],
    masks: &'a [u32],
    colors: Vec<usize>,
    best: usize,
    best_colors: Vec<usize>,
    lower: usize,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, used: usize) {
        if self.best <= self.lower {
            return;
        }
        if depth == self.order.len() {
            if used < self.best {
                self.best = used;
                self.best_colors = self.colors.clone();
            }
            return;
        }
        let edge = self.order[depth];
        // New colors are only ever opened in increasing order.
        for c in 0..=used {
            let total = used.max(c + 1);
            if total >= self.best {
                break;
            }
            let clash = (0..self.order.len())
                .any(|other| self.masks[edge] & (1 << other) != 0 && self.colors[other] == c);
            if clash {
                continue;
            }
            self.colors[edge] = c;
            self.run(depth + 1, total);
            self.colors[edge] = usize::MAX;
        }
    }
}

/// `BIGRAPH K F S`, then one `k j s` line per edge sorted by `(k, j)`.
pub fn serialize_graph(g: &ColoredBipartiteGraph) -> String {
    let mut out = format!(
        "BIGRAPH {} {} {}\n",
        g.left_count, g.right_count, g.num_colors
    );
    for e in &g.edges {
        out.push_str(&format!(
            "{} {} {}\n",
            e.edge.left + 1,
            e.edge.right + 1,
            e.color
        ));
    }
    out
}

pub fn parse_graph(text: &str) -> Result<ColoredBipartiteGraph, GraphError> {
    let lines = pda::split_lines(text)?;
    let header = pda::parse_header(&lines, "BIGRAPH", 3)?;
    let (k, f, s) = (header[0], header[1], header[2]);
    if k == 0 || f == 0 {
        return Err(ParseError::new(
            1,
            1,
            ParseErrorKind::BadHeader("K and F must be positive".into()),
        )
        .into());
    }
    let s = u32::try_from(s)
        .map_err(|_| ParseError::new(1, 1, ParseErrorKind::BadHeader("S is too large".into())))?;

    let mut edges = Vec::with_capacity(lines.len().saturating_sub(1));
    let mut seen = std::collections::HashMap::new();
    for &(line, text) in &lines[1..] {
        let toks: Vec<(usize, &str)> = pda::tokens(text).collect();
        if toks.len() != 3 {
            return Err(ParseError::new(
                line,
                1,
                ParseErrorKind::RaggedRow {
                    expected: 3,
                    found: toks.len(),
                },
            )
            .into());
        }
        let mut vals = [0usize; 3];
        for (slot, &(col, tok)) in vals.iter_mut().zip(&toks) {
            *slot = match tok.parse::<usize>() {
                Ok(v) if v > 0 && tok.bytes().all(|b| b.is_ascii_digit()) => v,
                _ => {
                    return Err(ParseError::new(
                        line,
                        col,
                        ParseErrorKind::BadToken(tok.to_string()),
                    )
                    .into())
                }
            };
        }
        let [left, right, color] = vals;
        let out_of_range = |what: &str, col: usize| {
            ParseError::new(
                line,
                col,
                ParseErrorKind::Other(format!("{what} out of range")),
            )
        };
        if left > k {
            return Err(out_of_range("user vertex", toks[0].0).into());
        }
        if right > f {
            return Err(out_of_range("packet vertex", toks[1].0).into());
        }
        if color > s as usize {
            return Err(out_of_range("color", toks[2].0).into());
        }
        let edge = Edge::new(left - 1, right - 1);
        if let Some(prev) = seen.insert(edge, line) {
            return Err(ParseError::new(
                line,
                1,
                ParseErrorKind::Other(format!("edge {edge} already listed on line {prev}")),
            )
            .into());
        }
        edges.push(ColoredEdge {
            edge,
            color: color as u32,
        });
    }
    ColoredBipartiteGraph::new(k, f, s, edges)
}
