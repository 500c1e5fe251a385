//! Qubit connectivity graphs and the lattices used in the experiments.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};

const UNREACHABLE: u32 = u32::MAX;

/// Row/column layout of a lattice graph, node `r * cols + c` at row `r`, column `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
}

impl GridShape {
    pub fn node(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }
}

/// Undirected, connected coupling graph with all-pairs hop distances.
#[derive(Clone, Debug)]
pub struct ConnectivityGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    is_edge: Vec<bool>,
    dist: Vec<u32>,
    coords: Option<Vec<(f64, f64)>>,
    grid: Option<GridShape>,
}

impl PartialEq for ConnectivityGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl ConnectivityGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut is_edge = vec![false; n * n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            if !is_edge[u * n + v] {
                is_edge[u * n + v] = true;
                is_edge[v * n + u] = true;
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut g = Self {
            n,
            adj,
            is_edge,
            dist: Vec::new(),
            coords: None,
            grid: None,
        };
        g.dist = (0..n).flat_map(|s| g.bfs(s, None)).collect();
        if g.dist.contains(&UNREACHABLE) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, &edges).expect("complete graph is connected")
    }

    /// Linear nearest-neighbour chain `0 - 1 - ... - (n-1)`.
    pub fn line(n: usize) -> Self {
        assert!(n >= 2, "line needs at least two nodes");
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        let mut g = Self::from_edges(n, &edges).expect("line is connected");
        g.coords = Some((0..n).map(|i| (0.0, i as f64)).collect());
        g.grid = Some(GridShape { rows: 1, cols: n });
        g
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        Self::radius_grid(rows, cols, 1.0)
    }

    pub fn grid_with_diagonals(rows: usize, cols: usize) -> Self {
        Self::radius_grid(rows, cols, std::f64::consts::SQRT_2)
    }

    /// Lattice points joined whenever their Euclidean distance is at most `radius`.
    pub fn radius_grid(rows: usize, cols: usize, radius: f64) -> Self {
        assert!(rows * cols >= 2, "grid needs at least two nodes");
        assert!(radius >= 1.0, "radius must be at least 1");
        let shape = GridShape { rows, cols };
        let r2 = radius * radius + 1e-9;
        let mut edges = Vec::new();
        for u in 0..rows * cols {
            for v in u + 1..rows * cols {
                let (dr, dc) = ((u / cols) as f64 - (v / cols) as f64, (u % cols) as f64 - (v % cols) as f64);
                if dr * dr + dc * dc <= r2 {
                    edges.push((u, v));
                }
            }
        }
        let mut g = Self::from_edges(rows * cols, &edges).expect("lattice is connected");
        g.coords = Some((0..rows * cols).map(|u| ((u / cols) as f64, (u % cols) as f64)).collect());
        g.grid = Some(shape);
        g
    }

    /// Adds `extra_edges` absent pairs drawn uniformly without replacement.
    pub fn augment_random(&self, extra_edges: usize, seed: u64) -> Result<Self> {
        let mut absent: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| !self.has_edge(u, v))
            .collect();
        if absent.len() < extra_edges {
            return Err(Error::Precondition(format!(
                "cannot add {extra_edges} edges, only {} pairs are absent",
                absent.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (chosen, _) = absent.partial_shuffle(&mut rng, extra_edges);
        let mut edges = self.edges();
        edges.extend_from_slice(chosen);
        let mut g = Self::from_edges(self.n, &edges)?;
        g.coords = self.coords.clone();
        Ok(g)
    }

    /// Edge-list text: node count on the first line, then one `u v` pair per line.
    pub fn load_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing node count"))?;
        let n: usize = header.parse().map_err(|_| parse_err(1, format!("bad node count {header:?}")))?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let nums: Vec<&str> = line.split_whitespace().collect();
            let p = |s: &str| s.parse::<usize>().map_err(|_| parse_err(lineno + 1, format!("bad node {s:?}")));
            match nums.as_slice() {
                [u, v] => edges.push((p(u)?, p(v)?)),
                _ => return Err(parse_err(lineno + 1, format!("expected \"u v\", got {line:?}"))),
            }
        }
        if edges.is_empty() {
            return Err(Error::InvalidGraph("edge list is empty".into()));
        }
        Self::from_edges(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.is_edge[u * self.n + v]
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn dist(&self, u: usize, v: usize) -> usize {
        self.dist[u * self.n + v] as usize
    }

    pub fn grid_shape(&self) -> Option<GridShape> {
        self.grid
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    /// Same edges with node `u` renamed to `map[u]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        let edges: Vec<_> = self.edges().into_iter().map(|(u, v)| (map[u], map[v])).collect();
        Self::from_edges(self.n, &edges).expect("relabelling preserves connectivity")
    }

    /// Hop distances from `source`, optionally restricted to the nodes marked in `allowed`.
    fn bfs(&self, source: usize, allowed: Option<&[bool]>) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == UNREACHABLE && allowed.is_none_or(|a| a[w]) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest paths from `u` to `v`, at most `cap` of them (`None` = all),
    /// in lexicographic order of node indices.
    pub fn all_shortest_paths(&self, u: usize, v: usize, cap: Option<usize>) -> Vec<Vec<usize>> {
        let to_v: Vec<u32> = self.dist[v * self.n..(v + 1) * self.n].to_vec();
        self.extract_paths(u, &to_v, cap)
    }

    /// Like [`all_shortest_paths`](Self::all_shortest_paths) but inside the
    /// subgraph induced by `allowed` (which must contain both endpoints).
    pub fn shortest_paths_within(&self, u: usize, v: usize, allowed: &[bool], cap: Option<usize>) -> Vec<Vec<usize>> {
        let to_v = self.bfs(v, Some(allowed));
        self.extract_paths(u, &to_v, cap)
    }

    /// Distances to `v` inside the subgraph induced by `allowed`; `None` where unreachable.
    pub fn distances_within(&self, v: usize, allowed: &[bool]) -> Vec<Option<usize>> {
        self.bfs(v, Some(allowed))
            .into_iter()
            .map(|d| (d != UNREACHABLE).then_some(d as usize))
            .collect()
    }

    fn extract_paths(&self, u: usize, to_v: &[u32], cap: Option<usize>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if to_v[u] == UNREACHABLE || cap == Some(0) {
            return out;
        }
        let mut path = vec![u];
        self.dfs_paths(&mut path, to_v, cap.unwrap_or(usize::MAX), &mut out);
        out
    }

    fn dfs_paths(&self, path: &mut Vec<usize>, to_v: &[u32], cap: usize, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().expect("non-empty path");
        if to_v[cur] == 0 {
            out.push(path.clone());
            return;
        }
        for &w in &self.adj[cur] {
            if out.len() >= cap {
                return;
            }
            if to_v[w] != UNREACHABLE && to_v[w] + 1 == to_v[cur] {
                path.push(w);
                self.dfs_paths(path, to_v, cap, out);
                path.pop();
            }
        }
    }

    /// Whether the nodes marked in `members` induce a connected subgraph.
    pub fn induces_connected(&self, members: &[bool]) -> bool {
        let Some(start) = members.iter().position(|&m| m) else {
            return true;
        };
        let dist = self.bfs(start, Some(members));
        members.iter().zip(&dist).all(|(&m, &d)| !m || d != UNREACHABLE)
    }
}

/// Named device couplings shipped with the crate.
pub const PRESETS: &[&str] = &["rigetti_16q_aspen", "ibm_qx5", "ibm_q20_tokyo"];

pub fn preset_edge_list(name: &str) -> Option<&'static str> {
    match name {
        "rigetti_16q_aspen" => Some(include_str!("../data/rigetti_16q_aspen.edges")),
        "ibm_qx5" => Some(include_str!("../data/ibm_qx5.edges")),
        "ibm_q20_tokyo" => Some(include_str!("../data/ibm_q20_tokyo.edges")),
        _ => None,
    }
}

/// Default Hamiltonian-path ordering of a preset, as a rank line.
pub fn preset_ordering(name: &str) -> Option<&'static str> {
    match name {
        "rigetti_16q_aspen" => Some(include_str!("../data/rigetti_16q_aspen.order")),
        "ibm_qx5" => Some(include_str!("../data/ibm_qx5.order")),
        "ibm_q20_tokyo" => Some(include_str!("../data/ibm_q20_tokyo.order")),
        _ => None,
    }
}

pub fn preset(name: &str) -> Result<ConnectivityGraph> {
    let text = preset_edge_list(name).ok_or_else(|| Error::InvalidGraph(format!("unknown preset {name:?}")))?;
    ConnectivityGraph::load_edge_list(text)
}

/// Parses an architecture description:
/// `complete:N`, `line:N`, `grid:RxC`, `gridd:RxC` (with diagonals),
/// `radius:RxC:R` (`R` a number or `sqrtK`), or a preset name.
pub fn parse_architecture(spec: &str) -> Result<ConnectivityGraph> {
    let bad = || Error::InvalidGraph(format!("unrecognized architecture {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let count = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let dims = |s: &str| -> Result<(usize, usize)> {
        let (r, c) = s.split_once('x').ok_or_else(bad)?;
        let (r, c) = (count(r)?, count(c)?);
        if r * c < 2 {
            return Err(bad());
        }
        Ok((r, c))
    };
    match parts.as_slice() {
        ["complete", n] => Ok(ConnectivityGraph::complete(count(n)?)),
        ["line", n] if count(n)? >= 2 => Ok(ConnectivityGraph::line(count(n)?)),
        ["grid", d] => dims(d).map(|(r, c)| ConnectivityGraph::grid(r, c)),
        ["gridd", d] => dims(d).map(|(r, c)| ConnectivityGraph::grid_with_diagonals(r, c)),
        ["radius", d, r] => {
            let (rows, cols) = dims(d)?;
            let radius = parse_radius(r).ok_or_else(bad)?;
            if radius < 1.0 {
                return Err(bad());
            }
            Ok(ConnectivityGraph::radius_grid(rows, cols, radius))
        }
        [name] => preset(name).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// `"2"`, `"1.5"` or `"sqrt5"`.
pub fn parse_radius(s: &str) -> Option<f64> {
    match s.strip_prefix("sqrt") {
        Some(k) => k.parse::<f64>().ok().map(f64::sqrt),
        None => s.parse().ok(),
    }
}
