//! Qubit orderings for constrained synthesis.
//!
//! An ordering maps each node to a rank in `0..n`. The constrained synthesizer
//! needs every prefix and every suffix of the ordering to induce a connected
//! subgraph; a Hamiltonian path gives both.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::topology::{ConnectivityGraph, GridShape};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitOrdering {
    rank: Vec<usize>,
    order: Vec<usize>,
}

impl QubitOrdering {
    pub fn identity(n: usize) -> Self {
        Self {
            rank: (0..n).collect(),
            order: (0..n).collect(),
        }
    }

    /// From `ranks[node] = rank`.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        let mut order = vec![usize::MAX; n];
        for (node, &r) in ranks.iter().enumerate() {
            if r >= n || order[r] != usize::MAX {
                return Err(Error::InvalidOrdering(format!("ranks are not a permutation of 0..{n}")));
            }
            order[r] = node;
        }
        Ok(Self { rank: ranks, order })
    }

    /// From `order[rank] = node`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let inv = Self::from_ranks(order)?;
        Ok(Self {
            rank: inv.order,
            order: inv.rank,
        })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, node: usize) -> usize {
        self.rank[node]
    }

    pub fn node(&self, rank: usize) -> usize {
        self.order[rank]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    /// Nodes listed by increasing rank.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn reversed(&self) -> Self {
        Self::from_order(self.order.iter().rev().copied().collect()).expect("permutation")
    }

    pub fn is_prefix_connected(&self, graph: &ConnectivityGraph) -> bool {
        self.sweeps_connected(graph, self.order.iter().copied())
    }

    pub fn is_suffix_connected(&self, graph: &ConnectivityGraph) -> bool {
        self.sweeps_connected(graph, self.order.iter().rev().copied())
    }

    fn sweeps_connected(&self, graph: &ConnectivityGraph, nodes: impl Iterator<Item = usize>) -> bool {
        let mut members = vec![false; self.len()];
        let mut seen_any = false;
        for node in nodes {
            // a newly added node must touch the nodes already present
            if seen_any && !graph.neighbors(node).iter().any(|&w| members[w]) {
                return false;
            }
            members[node] = true;
            seen_any = true;
        }
        true
    }

    /// Checks the prefix and suffix connectivity the synthesizer relies on.
    pub fn validate_for(&self, graph: &ConnectivityGraph) -> Result<()> {
        if self.len() != graph.n_nodes() {
            return Err(Error::InvalidOrdering(format!(
                "ordering has {} nodes, graph has {}",
                self.len(),
                graph.n_nodes()
            )));
        }
        if !self.is_prefix_connected(graph) {
            return Err(Error::InvalidOrdering("a prefix of the ordering is disconnected".into()));
        }
        if !self.is_suffix_connected(graph) {
            return Err(Error::InvalidOrdering("a suffix of the ordering is disconnected".into()));
        }
        Ok(())
    }

    /// One line of space-separated ranks, node by node.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.rank.iter().map(usize::to_string).collect();
        parts.join(" ")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let ranks = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(1, format!("bad rank {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_ranks(ranks)
    }
}

impl fmt::Display for QubitOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn require_grid(graph: &ConnectivityGraph) -> Result<GridShape> {
    graph
        .grid_shape()
        .ok_or_else(|| Error::InvalidOrdering("snake orderings need a grid-like graph".into()))
}

/// Boustrophedon walk over the lattice. `flip_rows`/`flip_cols` choose the
/// starting corner, `by_columns` sweeps columns instead of rows.
fn boustrophedon(shape: GridShape, flip_rows: bool, flip_cols: bool, by_columns: bool) -> Vec<usize> {
    let (major, minor) = if by_columns {
        (shape.cols, shape.rows)
    } else {
        (shape.rows, shape.cols)
    };
    let mut order = Vec::with_capacity(shape.rows * shape.cols);
    for a in 0..major {
        for b in 0..minor {
            let b = if a % 2 == 1 { minor - 1 - b } else { b };
            let (mut r, mut c) = if by_columns { (b, a) } else { (a, b) };
            if flip_rows {
                r = shape.rows - 1 - r;
            }
            if flip_cols {
                c = shape.cols - 1 - c;
            }
            order.push(shape.node(r, c));
        }
    }
    order
}

/// Row-major snake starting at the top-left node.
pub fn snake(graph: &ConnectivityGraph) -> Result<QubitOrdering> {
    let shape = require_grid(graph)?;
    QubitOrdering::from_order(boustrophedon(shape, false, false, false))
}

/// The snakes obtained from the four corners, sweeping rows or columns.
/// Duplicates (thin grids) are dropped; order of first appearance is kept.
pub fn symmetry_variants(graph: &ConnectivityGraph) -> Result<Vec<QubitOrdering>> {
    let shape = require_grid(graph)?;
    let mut out: Vec<QubitOrdering> = Vec::new();
    for by_columns in [false, true] {
        for (flip_rows, flip_cols) in [(false, false), (false, true), (true, false), (true, true)] {
            let o = QubitOrdering::from_order(boustrophedon(shape, flip_rows, flip_cols, by_columns))?;
            if !out.contains(&o) {
                out.push(o);
            }
        }
    }
    Ok(out)
}

/// Pairwise ordering cost `sum_{u<v} term(u, v, |rank(u) - rank(v)|)`.
#[derive(Clone, Debug)]
pub enum Objective {
    /// Minimum linear arrangement on the complete graph: `w_uv * gap`.
    MinLa { n: usize, weights: Vec<f64> },
    /// `d(u,v) * exp(-gap)`.
    Exp { n: usize, dist: Vec<f64> },
}

impl Objective {
    pub fn minla(weights: &[Vec<f64>]) -> Self {
        let n = weights.len();
        Objective::MinLa {
            n,
            weights: weights.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    /// MinLA with `w_uv = weight_of_distance(d(u,v))`.
    pub fn minla_by_distance(graph: &ConnectivityGraph, weight_of_distance: impl Fn(usize) -> f64) -> Self {
        let n = graph.n_nodes();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|u| (0..n).map(|v| weight_of_distance(graph.dist(u, v))).collect())
            .collect();
        Self::minla(&rows)
    }

    pub fn exp(graph: &ConnectivityGraph) -> Self {
        let n = graph.n_nodes();
        Objective::Exp {
            n,
            dist: (0..n * n).map(|i| graph.dist(i / n, i % n) as f64).collect(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        match self {
            Objective::MinLa { n, .. } | Objective::Exp { n, .. } => *n,
        }
    }

    #[inline]
    fn term(&self, u: usize, v: usize, gap: usize) -> f64 {
        match self {
            Objective::MinLa { n, weights } => weights[u * n + v] * gap as f64,
            Objective::Exp { n, dist } => dist[u * n + v] * (-(gap as f64)).exp(),
        }
    }

    pub fn cost(&self, o: &QubitOrdering) -> f64 {
        let n = self.n_nodes();
        assert_eq!(o.len(), n);
        let mut total = 0.0;
        for u in 0..n {
            for v in u + 1..n {
                total += self.term(u, v, o.rank(u).abs_diff(o.rank(v)));
            }
        }
        total
    }

    /// Change in cost when nodes `u` and `v` exchange ranks.
    fn swap_delta(&self, ranks: &[usize], u: usize, v: usize) -> f64 {
        let (ru, rv) = (ranks[u], ranks[v]);
        let mut delta = 0.0;
        for (w, &rw) in ranks.iter().enumerate() {
            if w == u || w == v {
                continue;
            }
            delta += self.term(u, w, rv.abs_diff(rw)) + self.term(v, w, ru.abs_diff(rw))
                - self.term(u, w, ru.abs_diff(rw))
                - self.term(v, w, rv.abs_diff(rw));
        }
        delta
    }
}

pub fn objective_minla(o: &QubitOrdering, weights: &[Vec<f64>]) -> f64 {
    Objective::minla(weights).cost(o)
}

pub fn objective_exp(o: &QubitOrdering, graph: &ConnectivityGraph) -> f64 {
    Objective::exp(graph).cost(o)
}

/// Steepest-descent pair swapping from random starting permutations.
///
/// Each restart applies the best improving swap (first pair in lexicographic
/// order on ties) until none improves. Returns the best local optimum and its
/// cost; ties between restarts keep the earliest.
pub fn local_search(objective: &Objective, restarts: usize, seed: u64) -> (QubitOrdering, f64) {
    assert!(restarts >= 1, "at least one restart");
    let n = objective.n_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(QubitOrdering, f64)> = None;
    for _ in 0..restarts {
        let mut ranks: Vec<usize> = (0..n).collect();
        ranks.shuffle(&mut rng);
        loop {
            let mut best_swap = None;
            let mut best_delta = -1e-12;
            for u in 0..n {
                for v in u + 1..n {
                    let d = objective.swap_delta(&ranks, u, v);
                    if d < best_delta {
                        best_delta = d;
                        best_swap = Some((u, v));
                    }
                }
            }
            match best_swap {
                Some((u, v)) => ranks.swap(u, v),
                None => break,
            }
        }
        let o = QubitOrdering::from_ranks(ranks).expect("permutation");
        let cost = objective.cost(&o);
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((o, cost));
        }
    }
    best.expect("at least one restart")
}
