//! Synthesis under a qubit connectivity graph.
//!
//! Everything runs in "rank space": qubits are renamed by their position in
//! a [`QubitOrdering`] so that the ordering becomes the identity. Row `k` of a
//! lower triangular operator is then built from the rows of qubits `< k`,
//! which already hold their final values. Each available parity is a fan-in
//! along a shortest path inside the prefix `{0..=k}`; it is described by the
//! set of rows it combines, so the decoding instance for row `k` lives in the
//! basis of those rows and only its target changes between operators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::ordering::{self, QubitOrdering};
use crate::syndrome::{
    solve_exact_with_warm_start, solve_in_cheapest_basis, weighted_greedy_ranked, SyndromeInstance,
    SyndromeSolution,
};
use crate::synth_full::derive_seed;
use crate::topology::{self, ConnectivityGraph};

fn check_path(graph: &ConnectivityGraph, path: &[usize]) -> Result<()> {
    if path.len() < 2 {
        return Err(Error::InvalidPath("a path needs at least two nodes".into()));
    }
    let mut seen = vec![false; graph.n_nodes()];
    for &v in path {
        if v >= graph.n_nodes() || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidPath(format!("node {v} is out of range or repeated")));
        }
    }
    if let Some(w) = path.windows(2).find(|w| !graph.has_edge(w[0], w[1])) {
        return Err(Error::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1])));
    }
    Ok(())
}

/// Gate count of [`fanin_via_path`] for `k = mask.len()` intermediate nodes.
pub fn fanin_cost(mask: &[bool]) -> u64 {
    let k = mask.len() as u64;
    if k == 0 {
        return 1;
    }
    let inner_zeros = mask[..mask.len() - 1].iter().filter(|&&a| !a).count() as u64;
    2 * k + 1 + 2 * inner_zeros + u64::from(!mask[mask.len() - 1])
}

/// Gate count of [`cnot_via_path`] for `k` intermediate nodes.
pub fn cnot_cost(k: usize) -> u64 {
    (4 * k as u64).max(1)
}

fn fanin_gates(path: &[usize], mask: &[bool], out: &mut Vec<CnotGate>) {
    let k = path.len() - 2;
    let t = path[k + 1];
    if k == 0 {
        out.push(CnotGate::new(path[0], t));
        return;
    }
    let start = out.len();
    // intermediate i of the mask sits at path[i], i = 1..=k
    for i in (1..k).rev() {
        if !mask[i - 1] {
            out.push(CnotGate::new(path[i], path[i + 1]));
        }
    }
    for i in 0..k {
        out.push(CnotGate::new(path[i], path[i + 1]));
    }
    let undo: Vec<CnotGate> = out[start..].iter().rev().copied().collect();
    out.push(CnotGate::new(path[k], t));
    out.extend(undo);
    if !mask[k - 1] {
        out.push(CnotGate::new(path[k], t));
    }
}

/// Adds to the last node of `path` the row of its first node combined with
/// the rows of the intermediate nodes selected by `mask`. All other rows are
/// left unchanged.
pub fn fanin_via_path(graph: &ConnectivityGraph, path: &[usize], mask: &[bool]) -> Result<Vec<CnotGate>> {
    check_path(graph, path)?;
    if mask.len() != path.len() - 2 {
        return Err(Error::InvalidPath(format!(
            "mask has {} entries for {} intermediate nodes",
            mask.len(),
            path.len() - 2
        )));
    }
    let mut out = Vec::with_capacity(fanin_cost(mask) as usize);
    fanin_gates(path, mask, &mut out);
    Ok(out)
}

/// Long-range CNOT from the first to the last node of `path`.
pub fn cnot_via_path(graph: &ConnectivityGraph, path: &[usize]) -> Result<Vec<CnotGate>> {
    fanin_via_path(graph, path, &vec![false; path.len().saturating_sub(2)])
}

/// A parity reachable by one fan-in template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedParity {
    /// Path from the source to the target.
    pub path: Vec<usize>,
    /// Which intermediate rows are included.
    pub mask: Vec<bool>,
    /// Rows combined, indexed by the nodes below the target.
    pub rows: BitVec,
    pub cost: u64,
}

impl WeightedParity {
    pub fn source(&self) -> usize {
        self.path[0]
    }

    /// Value of the parity for the given register state.
    pub fn value(&self, state: &BitMatrix) -> BitVec {
        let mut v = state.row_vec(self.path[0]);
        for (i, &on) in self.mask.iter().enumerate() {
            if on {
                v.xor_assign(&state.row_vec(self.path[i + 1]));
            }
        }
        v
    }

    fn is_full(&self) -> bool {
        self.mask.iter().all(|&a| a)
    }
}

/// Masks of `k` intermediates other than the full and empty ones, cheapest
/// first, at most `limit` of them.
fn partial_masks(k: usize, limit: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    if k == 0 || limit == 0 {
        return out;
    }
    // cost surcharge is 2 * (zeros among the first k-1) + (last is zero)
    'outer: for surcharge in 1..=(2 * k - 1) {
        let inner = surcharge / 2;
        let last_zero = surcharge % 2 == 1;
        if inner > k - 1 {
            continue;
        }
        for zeros in combinations(k - 1, inner) {
            let mut mask = vec![true; k];
            for z in zeros {
                mask[z] = false;
            }
            mask[k - 1] = !last_zero;
            if mask.iter().all(|&a| !a) {
                continue;
            }
            out.push(mask);
            if out.len() == limit {
                break 'outer;
            }
        }
    }
    out
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] != i + n - r) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Parities available to the node of rank `target_rank`: fan-ins from every
/// lower-ranked source along shortest paths inside the nodes of rank
/// `<= target_rank`. Each source contributes its single-row parity (the
/// long-range CNOT), the full combination along each of up to `sp_max`
/// paths, and up to `lc_max - 1` cheapest partial combinations per path.
/// Equal row sets keep the cheapest realization.
///
/// Paths and `rows` are expressed in node labels; `rows` is indexed by rank.
pub fn enumerate_parities(
    graph: &ConnectivityGraph,
    ordering: &QubitOrdering,
    target_rank: usize,
    sp_max: Option<usize>,
    lc_max: usize,
) -> Vec<WeightedParity> {
    let n = graph.n_nodes();
    let target = ordering.node(target_rank);
    let allowed: Vec<bool> = (0..n).map(|v| ordering.rank(v) <= target_rank).collect();
    let mut out: Vec<WeightedParity> = Vec::new();
    let mut index: HashMap<BitVec, usize> = HashMap::new();
    let mut add = |path: &[usize], mask: Vec<bool>, out: &mut Vec<WeightedParity>| {
        let mut rows = BitVec::zeros(target_rank);
        rows.set(ordering.rank(path[0]), true);
        for (i, &on) in mask.iter().enumerate() {
            if on {
                rows.set(ordering.rank(path[i + 1]), true);
            }
        }
        let cost = fanin_cost(&mask);
        match index.get(&rows) {
            Some(&i) if out[i].cost <= cost => {}
            Some(&i) => {
                out[i] = WeightedParity {
                    path: path.to_vec(),
                    mask,
                    rows,
                    cost,
                }
            }
            None => {
                index.insert(rows.clone(), out.len());
                out.push(WeightedParity {
                    path: path.to_vec(),
                    mask,
                    rows,
                    cost,
                });
            }
        }
    };
    for source_rank in 0..target_rank {
        let source = ordering.node(source_rank);
        let paths = graph.shortest_paths_within(source, target, &allowed, sp_max.map(|c| c.max(1)));
        for (pi, path) in paths.iter().enumerate() {
            let k = path.len() - 2;
            if pi == 0 {
                add(path, vec![false; k], &mut out);
            }
            add(path, vec![true; k], &mut out);
            for mask in partial_masks(k, lc_max.saturating_sub(1)) {
                add(path, mask, &mut out);
            }
        }
    }
    out
}

/// Precomputed parities for every target rank of one (graph, ordering) pair.
/// Paths are in rank labels.
#[derive(Clone, Debug)]
pub struct ParityTable {
    n: usize,
    targets: Vec<TargetParities>,
}

#[derive(Clone, Debug)]
struct TargetParities {
    parities: Vec<WeightedParity>,
    /// Columns are the row sets; the target is filled per use.
    instance: SyndromeInstance,
    /// Distance of each lower rank to the target inside the prefix.
    dist: Vec<usize>,
    /// `containing[q]`: parities whose row set includes rank `q`.
    containing: Vec<Vec<usize>>,
}

impl ParityTable {
    /// `rank_graph` must already be relabeled so that the ordering is the identity.
    pub fn new(rank_graph: &ConnectivityGraph, sp_max: Option<usize>, lc_max: usize) -> Result<Self> {
        let n = rank_graph.n_nodes();
        let identity = QubitOrdering::identity(n);
        if !identity.is_prefix_connected(rank_graph) {
            return Err(Error::InvalidOrdering("a prefix of the ordering is disconnected".into()));
        }
        let mut targets = Vec::with_capacity(n);
        for k in 0..n {
            let parities = enumerate_parities(rank_graph, &identity, k, sp_max, lc_max);
            let columns: Vec<BitVec> = parities.iter().map(|p| p.rows.clone()).collect();
            let costs = parities.iter().map(|p| p.cost).collect();
            let instance = SyndromeInstance::weighted(&columns, &BitVec::zeros(k), costs)?;
            let allowed: Vec<bool> = (0..n).map(|v| v <= k).collect();
            let dist = rank_graph
                .distances_within(k, &allowed)
                .into_iter()
                .take(k)
                .map(|d| d.expect("prefix is connected"))
                .collect();
            let mut containing = vec![Vec::new(); k];
            for (i, p) in parities.iter().enumerate() {
                for q in p.rows.ones() {
                    containing[q].push(i);
                }
            }
            targets.push(TargetParities {
                parities,
                instance,
                dist,
                containing,
            });
        }
        Ok(Self { n, targets })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn parities(&self, target_rank: usize) -> &[WeightedParity] {
        &self.targets[target_rank].parities
    }

    pub fn instance(&self, target_rank: usize, target: &BitVec) -> Result<SyndromeInstance> {
        let inst = &self.targets[target_rank].instance;
        let columns: Vec<BitVec> = (0..inst.n_columns()).map(|i| inst.column(i)).collect();
        SyndromeInstance::weighted(&columns, target, inst.costs().to_vec())
    }
}

/// How each row's weighted instance is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstrainedSolver {
    WeightedGreedy,
    /// Layer-by-layer elimination of the farthest components.
    Fast,
    Exact { budget: u64 },
}

impl fmt::Display for ConstrainedSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstrainedSolver::WeightedGreedy => write!(f, "greedy"),
            ConstrainedSolver::Fast => write!(f, "fast"),
            ConstrainedSolver::Exact { budget } => write!(f, "exact:{budget}"),
        }
    }
}

impl FromStr for ConstrainedSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "greedy" | "weighted_greedy" => Ok(Self::WeightedGreedy),
            "fast" => Ok(Self::Fast),
            other => match other.strip_prefix("exact:").map(str::parse::<u64>) {
                Some(Ok(budget)) if budget > 0 => Ok(Self::Exact { budget }),
                _ => Err(Error::Precondition(format!("unknown constrained solver {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The circuit implements the operator itself.
    Exact,
    /// The circuit implements the operator up to a permutation of its rows.
    UpToRowPermutation,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            "perm" | "permutation" => Ok(Mode::UpToRowPermutation),
            _ => Err(Error::Precondition(format!("unknown mode {s:?}, expected exact or perm"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::UpToRowPermutation => "perm",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedConfig {
    /// Maximum shortest paths per (source, target); `None` for all.
    pub sp_max: Option<usize>,
    /// Combinations per path (1 = full combination only).
    pub lc_max: usize,
    /// Restarts per ordering; the first is deterministic.
    pub niter: usize,
    pub niter_syndrome: usize,
    pub solver: ConstrainedSolver,
    pub ordering: QubitOrdering,
    /// Also try the grid symmetries of `ordering`.
    pub use_symmetries: bool,
    pub mode: Mode,
    pub seed: u64,
    /// Stop restarting once this much time has passed.
    pub time_limit: Option<Duration>,
}

impl ConstrainedConfig {
    /// Single deterministic pass with the default ordering of `graph`.
    pub fn for_graph(graph: &ConnectivityGraph) -> Self {
        let ordering = if graph.grid_shape().is_some() {
            ordering::snake(graph).expect("grid graph")
        } else {
            QubitOrdering::identity(graph.n_nodes())
        };
        Self {
            sp_max: None,
            lc_max: 1,
            niter: 1,
            niter_syndrome: 1,
            solver: ConstrainedSolver::WeightedGreedy,
            ordering,
            use_symmetries: false,
            mode: Mode::Exact,
            seed: 0,
            time_limit: None,
        }
    }

    pub fn validate(&self, graph: &ConnectivityGraph) -> Result<()> {
        if self.lc_max == 0 || self.niter == 0 || self.niter_syndrome == 0 || self.sp_max == Some(0) {
            return Err(Error::Precondition("counts in the configuration must be positive".into()));
        }
        self.ordering.validate_for(graph)
    }
}

/// Named benchmark architectures with their tuned parameters.
pub const TABLE1_ARCHITECTURES: &[&str] = &[
    "9q-square",
    "rigetti-16q",
    "ibm-qx5",
    "16q-square",
    "19q-line",
    "ibm-q20-tokyo",
    "25q-square",
    "25q-square-diag",
    "36q-square",
    "36q-square-diag",
    "49q-square",
    "49q-square-diag",
    "64q-square",
    "81q-square",
];

/// Graph and tuned configuration for one of [`TABLE1_ARCHITECTURES`].
pub fn table1_setup(name: &str) -> Result<(ConnectivityGraph, ConstrainedConfig)> {
    use ConstrainedSolver::{Fast, WeightedGreedy as Greedy};
    let (graph, niter, solver, sp_max) = match name {
        "9q-square" => (ConnectivityGraph::grid(3, 3), 100, Greedy, None),
        "rigetti-16q" => (topology::preset("rigetti_16q_aspen")?, 100, Greedy, None),
        "ibm-qx5" => (topology::preset("ibm_qx5")?, 100, Greedy, None),
        "16q-square" => (ConnectivityGraph::grid(4, 4), 100, Greedy, None),
        "19q-line" => (ConnectivityGraph::line(19), 100, Greedy, None),
        "ibm-q20-tokyo" => (topology::preset("ibm_q20_tokyo")?, 100, Greedy, None),
        "25q-square" => (ConnectivityGraph::grid(5, 5), 100, Greedy, None),
        "25q-square-diag" => (ConnectivityGraph::grid_with_diagonals(5, 5), 100, Greedy, None),
        "36q-square" => (ConnectivityGraph::grid(6, 6), 100, Greedy, Some(1)),
        "36q-square-diag" => (ConnectivityGraph::grid_with_diagonals(6, 6), 50, Greedy, Some(10)),
        "49q-square" => (ConnectivityGraph::grid(7, 7), 100, Fast, Some(1)),
        "49q-square-diag" => (ConnectivityGraph::grid_with_diagonals(7, 7), 10, Greedy, Some(10)),
        "64q-square" => (ConnectivityGraph::grid(8, 8), 50, Fast, Some(1)),
        "81q-square" => (ConnectivityGraph::grid(9, 9), 25, Fast, Some(1)),
        _ => return Err(Error::Precondition(format!("unknown architecture {name:?}"))),
    };
    let mut cfg = ConstrainedConfig::for_graph(&graph);
    if let Some(preset) = ["rigetti-16q", "ibm-qx5", "ibm-q20-tokyo"].iter().position(|&p| p == name) {
        let file = ["rigetti_16q_aspen", "ibm_qx5", "ibm_q20_tokyo"][preset];
        cfg.ordering = QubitOrdering::from_text(topology::preset_ordering(file).expect("shipped ordering"))?;
    }
    cfg.niter = niter;
    cfg.solver = solver;
    cfg.sp_max = sp_max;
    cfg.use_symmetries = graph.grid_shape().is_some() && name != "19q-line";
    Ok((graph, cfg))
}

/// Coordinates of `s` (length `k`) in the basis of the first `k` rows of the
/// unit lower triangular `l`.
fn lower_coordinates(l: &BitMatrix, k: usize, s: &BitVec) -> BitVec {
    let mut s = s.clone();
    let mut x = BitVec::zeros(k);
    for j in (0..k).rev() {
        if s.get(j) {
            x.set(j, true);
            s.xor_assign(&l.row_vec(j).truncated(k));
        }
    }
    debug_assert!(s.is_zero());
    x
}

/// Per-restart randomness: tie-breaking ranks and basis draws.
struct Restart {
    rng: Option<ChaCha8Rng>,
}

impl Restart {
    fn new(seed: Option<u64>) -> Self {
        Self {
            rng: seed.map(ChaCha8Rng::seed_from_u64),
        }
    }

    fn tie_ranks(&mut self, m: usize) -> Option<Vec<u32>> {
        let rng = self.rng.as_mut()?;
        let mut r: Vec<u32> = (0..m as u32).collect();
        r.shuffle(rng);
        Some(r)
    }

    fn next_seed(&mut self) -> u64 {
        use rand::Rng;
        self.rng.as_mut().map_or(0, |r| r.gen())
    }
}

/// Greedy layer elimination: while the residual has components, take the
/// farthest ones and clear them one by one with full-combination fan-ins
/// from those sources, choosing among paths by the basis cost left behind.
fn fast_columns(table: &ParityTable, k: usize, x: &BitVec, restart: &mut Restart) -> Vec<usize> {
    let tp = &table.targets[k];
    let single: Vec<u64> = {
        let mut c = vec![u64::MAX; k];
        for p in &tp.parities {
            if p.rows.weight() == 1 {
                let j = p.rows.ones().next().expect("weight one");
                c[j] = c[j].min(p.cost);
            }
        }
        c
    };
    let ranks = restart.tie_ranks(tp.parities.len());
    let mut s = x.clone();
    let mut picks = Vec::new();
    while let Some(far) = s.ones().map(|j| tp.dist[j]).max() {
        let mut best: Option<(u64, u32, usize)> = None;
        for (i, p) in tp.parities.iter().enumerate() {
            let src = p.path[0];
            if !p.is_full() || tp.dist[src] != far || !s.get(src) {
                continue;
            }
            let residual = s.xor(&p.rows);
            let bc: u64 = residual.ones().map(|j| single[j]).sum();
            let key = (bc, ranks.as_ref().map_or(i as u32, |r| r[i]), i);
            if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                best = Some(key);
            }
        }
        let (_, _, i) = best.expect("every source has a full-combination parity");
        s.xor_assign(&tp.parities[i].rows);
        picks.push(i);
    }
    picks
}

/// Weighted greedy in the basis of the cheapest live parities, repeated over
/// `niter_syndrome` draws of that basis (equal costs shuffled), keeping the
/// cheapest; exact decoding then starts from it.
fn solve_weighted(inst: &SyndromeInstance, cfg: &ConstrainedConfig, restart: &mut Restart) -> Result<Vec<usize>> {
    let mut greedy: Option<SyndromeSolution> = None;
    for t in 0..cfg.niter_syndrome {
        let ranks = restart.tie_ranks(inst.n_columns());
        let mut draw = (t > 0).then(|| ChaCha8Rng::seed_from_u64(restart.next_seed()));
        let rng = restart.rng.as_mut().or(draw.as_mut());
        let sol = solve_in_cheapest_basis(inst, rng, |i| weighted_greedy_ranked(i, ranks.as_deref()))?;
        if greedy.as_ref().is_none_or(|b| sol.weight < b.weight) {
            greedy = Some(sol);
        }
    }
    let greedy = greedy.expect("niter_syndrome >= 1");
    let sol: SyndromeSolution = match cfg.solver {
        ConstrainedSolver::Exact { budget } => match solve_exact_with_warm_start(inst, budget, Some(&greedy)) {
            Ok(s) => s,
            Err(Error::BudgetExhausted { best: Some(b) }) => b,
            Err(e) => return Err(e),
        },
        _ => greedy,
    };
    Ok(sol.support)
}

/// A parity live at some point of the circuit built so far.
struct LiveParity {
    value: BitVec,
    cost: u64,
    /// Number of gates executed when it is live.
    time: usize,
    template: usize,
}

/// Every value taken by every template parity of target `k` while `gates`
/// execute, deduplicated by value: cheapest first, then earliest, or a
/// uniformly random time among the cheapest when `rng` is given.
fn harvest_live(
    tp: &TargetParities,
    k: usize,
    gates: &[CnotGate],
    mut rng: Option<&mut ChaCha8Rng>,
) -> Vec<LiveParity> {
    use rand::Rng;
    let mut state: Vec<BitVec> = (0..k).map(|q| BitVec::unit(k, q)).collect();
    let mut out: Vec<LiveParity> = Vec::new();
    // number of cheapest occurrences seen so far, for reservoir sampling
    let mut seen: Vec<u32> = Vec::new();
    let mut index: HashMap<BitVec, usize> = HashMap::new();
    let mut eval = |ti: usize, time: usize, state: &[BitVec], out: &mut Vec<LiveParity>| {
        let p = &tp.parities[ti];
        let mut value = BitVec::zeros(k);
        for q in p.rows.ones() {
            value.xor_assign(&state[q]);
        }
        let entry = LiveParity {
            value,
            cost: p.cost,
            time,
            template: ti,
        };
        match index.get(&entry.value) {
            Some(&i) if out[i].cost < p.cost => {}
            Some(&i) if out[i].cost == p.cost => {
                seen[i] += 1;
                if let Some(r) = rng.as_deref_mut() {
                    if r.gen_range(0..seen[i]) == 0 {
                        out[i] = entry;
                    }
                }
            }
            Some(&i) => {
                out[i] = entry;
                seen[i] = 1;
            }
            None => {
                index.insert(entry.value.clone(), out.len());
                out.push(entry);
                seen.push(1);
            }
        }
    };
    for ti in 0..tp.parities.len() {
        eval(ti, 0, &state, &mut out);
    }
    for (t, g) in gates.iter().enumerate() {
        debug_assert!(g.target < k && g.control < k);
        let c = state[g.control].clone();
        state[g.target].xor_assign(&c);
        for &ti in &tp.containing[g.target] {
            eval(ti, t + 1, &state, &mut out);
        }
    }
    out
}

/// Lower triangular synthesis in rank space.
///
/// The weighted decoders choose among all parities that appeared along
/// template paths during the circuit built so far, and insert each chosen
/// template at the moment its parity is live. The target row is never touched
/// before its turn, so such insertions only affect it.
fn synth_lower_ranked(
    l: &BitMatrix,
    table: &ParityTable,
    cfg: &ConstrainedConfig,
    restart: &mut Restart,
) -> Result<CnotCircuit> {
    let n = l.n_rows();
    let mut gates: Vec<CnotGate> = Vec::new();
    for k in 1..n {
        let s = l.row_vec(k).truncated(k);
        if s.is_zero() {
            continue;
        }
        let tp = &table.targets[k];
        if cfg.solver == ConstrainedSolver::Fast {
            // appended at the end, in the basis of the finished rows
            let x = lower_coordinates(l, k, &s);
            for i in fast_columns(table, k, &x, restart) {
                let p = &tp.parities[i];
                fanin_gates(&p.path, &p.mask, &mut gates);
            }
            continue;
        }
        let live = harvest_live(tp, k, &gates, restart.rng.as_mut());
        let columns: Vec<BitVec> = live.iter().map(|p| p.value.clone()).collect();
        let costs = live.iter().map(|p| p.cost).collect();
        let inst = SyndromeInstance::weighted(&columns, &s, costs)?;
        let mut picks: Vec<(usize, usize)> = solve_weighted(&inst, cfg, restart)?
            .into_iter()
            .map(|i| (live[i].time, live[i].template))
            .collect();
        picks.sort_unstable();
        let mut offset = 0;
        let mut buf = Vec::new();
        for (time, ti) in picks {
            let p = &tp.parities[ti];
            buf.clear();
            fanin_gates(&p.path, &p.mask, &mut buf);
            let at = time + offset;
            gates.splice(at..at, buf.iter().copied());
            offset += buf.len();
        }
    }
    let mut c = CnotCircuit::new(n);
    c.extend_gates(&gates);
    Ok(c)
}

/// Synthesizes `l`, which must be unit lower triangular once rows and columns
/// are listed in the order of `cfg.ordering`. Best of `cfg.niter` restarts.
pub fn synth_triangular_constrained(
    l: &BitMatrix,
    graph: &ConnectivityGraph,
    cfg: &ConstrainedConfig,
) -> Result<CnotCircuit> {
    cfg.validate(graph)?;
    let order = cfg.ordering.order();
    let lr = l.reorder(order);
    if !lr.is_unit_lower_triangular() {
        return Err(Error::NotTriangular("unit lower triangular under the ordering"));
    }
    let rank_graph = graph.relabel(cfg.ordering.ranks());
    let table = ParityTable::new(&rank_graph, cfg.sp_max, cfg.lc_max)?;
    let mut best: Option<CnotCircuit> = None;
    for r in 0..cfg.niter {
        let mut restart = Restart::new((r > 0).then(|| derive_seed(cfg.seed, r as u64)));
        let c = synth_lower_ranked(&lr, &table, cfg, &mut restart)?;
        if best.as_ref().is_none_or(|b| c.len() < b.len()) {
            best = Some(c);
        }
    }
    Ok(best.expect("niter >= 1").relabel(order))
}

/// The parity of the residual's farthest components are cleared first.
/// Returns the gates (in node labels) adding the parity `s`, written in the
/// basis of the rows of lower-ranked nodes, to the node of rank `k`.
pub fn fast_heuristic_step(table: &ParityTable, ordering: &QubitOrdering, k: usize, s: &BitVec) -> Vec<CnotGate> {
    let mut restart = Restart::new(None);
    let mut gates = Vec::new();
    for i in fast_columns(table, k, s, &mut restart) {
        let p = &table.targets[k].parities[i];
        fanin_gates(&p.path, &p.mask, &mut gates);
    }
    gates
        .into_iter()
        .map(|g| CnotGate::new(ordering.node(g.control), ordering.node(g.target)))
        .collect()
}

/// Pre-circuit in rank space; tie-breaks are random when `rng` is given.
fn precircuit_ranked(a: &BitMatrix, rank_graph: &ConnectivityGraph, rng: Option<&mut ChaCha8Rng>) -> CnotCircuit {
    let n = a.n_rows();
    let mut m = a.clone();
    let mut c = CnotCircuit::new(n);
    let mut rng = rng;
    for k in 0..n {
        if m.leading_minor_invertible(k + 1) {
            continue;
        }
        let minor_ok = |row: &BitVec, m: &BitMatrix| {
            let mut rows: Vec<BitVec> = (0..k).map(|i| m.row_vec(i).truncated(k + 1)).collect();
            rows.push(row.truncated(k + 1));
            BitMatrix::from_rows(&rows).expect("equal lengths").rank() == k + 1
        };
        let allowed: Vec<bool> = (0..n).map(|v| v >= k).collect();
        // (cost, distance, tie, gates)
        let mut options: Vec<(u64, usize, u64, Vec<CnotGate>)> = Vec::new();
        for j in k + 1..n {
            let row_j = m.row_vec(j);
            if !minor_ok(&m.row_vec(k).xor(&row_j), &m) {
                continue;
            }
            let path = rank_graph
                .shortest_paths_within(j, k, &allowed, Some(1))
                .pop()
                .expect("suffix is connected");
            let d = path.len() - 1;
            let mut chain_sum = BitVec::zeros(n);
            for &q in &path[..d] {
                chain_sum.xor_assign(&m.row_vec(q));
            }
            let (cost, gates) = if minor_ok(&m.row_vec(k).xor(&chain_sum), &m) {
                (d as u64, path.windows(2).map(|w| CnotGate::new(w[0], w[1])).collect())
            } else {
                let mut g = Vec::new();
                fanin_gates(&path, &vec![false; d - 1], &mut g);
                (cnot_cost(d - 1), g)
            };
            let tie = match rng.as_deref_mut() {
                Some(r) => {
                    use rand::Rng;
                    r.gen()
                }
                None => j as u64,
            };
            options.push((cost, d, tie, gates));
        }
        let (_, _, _, gates) = options
            .into_iter()
            .min_by_key(|o| (o.0, o.1, o.2))
            .expect("an invertible matrix always has a fixing row");
        for g in gates {
            m.add_row(g.target, g.control);
            c.push(g.control, g.target);
        }
        debug_assert!(m.leading_minor_invertible(k + 1));
    }
    c
}

/// A compliant circuit `C` such that, with rows and columns listed in the
/// order of `ordering`, `simulate(C) * a` has every leading principal minor
/// invertible. Row additions are routed through the nodes not yet fixed.
pub fn compute_precircuit(a: &BitMatrix, graph: &ConnectivityGraph, ordering: &QubitOrdering) -> Result<CnotCircuit> {
    ordering.validate_for(graph)?;
    if a.rank() != a.n_rows() || !a.is_square() {
        return Err(Error::SingularMatrix);
    }
    let rank_graph = graph.relabel(ordering.ranks());
    Ok(precircuit_ranked(&a.reorder(ordering.order()), &rank_graph, None).relabel(ordering.order()))
}

/// Result of [`synth_general_constrained_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedOutcome {
    pub circuit: CnotCircuit,
    /// Row `i` of the input equals row `perm[i]` of the circuit's operator.
    pub perm: Vec<usize>,
    pub ordering: QubitOrdering,
    pub restarts: usize,
    pub timed_out: bool,
}

/// Per-ordering state: the factors to synthesize and the best circuit found
/// so far for each of them.
struct Variant {
    table: ParityTable,
    pre: CnotCircuit,
    perm: Vec<usize>,
    lower: BitMatrix,
    upper_t: BitMatrix,
    best_l: Option<CnotCircuit>,
    best_ut: Option<CnotCircuit>,
}

impl Variant {
    fn new(a: &BitMatrix, graph: &ConnectivityGraph, o: &QubitOrdering, cfg: &ConstrainedConfig) -> Result<Self> {
        let n = a.n_rows();
        let rank_graph = graph.relabel(o.ranks());
        let table = ParityTable::new(&rank_graph, cfg.sp_max, cfg.lc_max)?;
        let ar = a.reorder(o.order());
        let (pre, perm, factors) = match cfg.mode {
            Mode::Exact => {
                let pre = precircuit_ranked(&ar, &rank_graph, None);
                let f = pre.simulate().mul(&ar)?.plu_decompose()?;
                debug_assert!(f.perm.iter().enumerate().all(|(i, &p)| i == p));
                (pre, (0..n).collect(), f)
            }
            Mode::UpToRowPermutation => {
                let f = ar.plu_decompose()?;
                (CnotCircuit::new(n), f.perm.clone(), f)
            }
        };
        Ok(Self {
            table,
            pre,
            perm,
            upper_t: factors.upper.transpose(),
            lower: factors.lower,
            best_l: None,
            best_ut: None,
        })
    }

    fn restart(&mut self, cfg: &ConstrainedConfig, seed: Option<u64>) -> Result<()> {
        let mut restart = Restart::new(seed);
        let cl = synth_lower_ranked(&self.lower, &self.table, cfg, &mut restart)?;
        if self.best_l.as_ref().is_none_or(|b| cl.len() < b.len()) {
            self.best_l = Some(cl);
        }
        let cut = synth_lower_ranked(&self.upper_t, &self.table, cfg, &mut restart)?;
        if self.best_ut.as_ref().is_none_or(|b| cut.len() < b.len()) {
            self.best_ut = Some(cut);
        }
        Ok(())
    }

    fn size(&self) -> usize {
        self.pre.len() + self.best_l.as_ref().map_or(0, |c| c.len()) + self.best_ut.as_ref().map_or(0, |c| c.len())
    }

    /// The full circuit in rank space: `U`, then `L`, then the inverse of
    /// the pre-circuit.
    fn circuit(&self) -> CnotCircuit {
        let cl = self.best_l.as_ref().expect("at least one restart");
        let cu = self.best_ut.as_ref().expect("at least one restart").transpose();
        cu.concat(cl).concat(&self.pre.inverse())
    }
}

/// General synthesis. The pre-circuit (exact mode) and the LU factors are
/// computed once per ordering; each triangular factor then keeps its best
/// circuit over `cfg.niter` restarts, and the best ordering wins.
pub fn synth_general_constrained_report(
    a: &BitMatrix,
    graph: &ConnectivityGraph,
    cfg: &ConstrainedConfig,
) -> Result<ConstrainedOutcome> {
    cfg.validate(graph)?;
    if !a.is_square() || a.n_rows() != graph.n_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a {}-node graph",
            a.n_rows(),
            a.n_cols(),
            graph.n_nodes()
        )));
    }
    if a.rank() != a.n_rows() {
        return Err(Error::SingularMatrix);
    }
    let mut orderings = vec![cfg.ordering.clone()];
    if cfg.use_symmetries {
        for o in ordering::symmetry_variants(graph)? {
            if !orderings.contains(&o) && o.validate_for(graph).is_ok() {
                orderings.push(o);
            }
        }
    }
    let start = Instant::now();
    let mut variants: Vec<Variant> = orderings
        .iter()
        .map(|o| Variant::new(a, graph, o, cfg))
        .collect::<Result<_>>()?;
    let mut restarts = 0;
    let mut timed_out = false;
    // restart-major so that a time limit still samples every ordering
    'outer: for r in 0..cfg.niter {
        for (vi, v) in variants.iter_mut().enumerate() {
            if let Some(limit) = cfg.time_limit {
                if r > 0 && start.elapsed() > limit {
                    timed_out = true;
                    break 'outer;
                }
            }
            let seed = (r > 0).then(|| derive_seed(derive_seed(cfg.seed, vi as u64), r as u64));
            v.restart(cfg, seed)?;
            restarts += 1;
        }
    }
    let (vi, v) = variants
        .iter()
        .enumerate()
        .min_by_key(|(i, v)| (v.size(), *i))
        .expect("at least one ordering");
    let o = &orderings[vi];
    let order = o.order();
    let mut perm = vec![0; v.perm.len()];
    for (i, &p) in v.perm.iter().enumerate() {
        perm[order[i]] = order[p];
    }
    Ok(ConstrainedOutcome {
        circuit: v.circuit().relabel(order),
        perm,
        ordering: o.clone(),
        restarts,
        timed_out,
    })
}

/// Synthesizes `a` on `graph`. In exact mode the permutation is the identity
/// and the circuit implements `a`; otherwise row `i` of `a` is row `perm[i]`
/// of the circuit's operator.
pub fn synth_general_constrained(
    a: &BitMatrix,
    graph: &ConnectivityGraph,
    cfg: &ConstrainedConfig,
) -> Result<(CnotCircuit, Vec<usize>)> {
    let out = synth_general_constrained_report(a, graph, cfg)?;
    Ok((out.circuit, out.perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random_operator;
    use rand::Rng;

    fn transvection(n: usize, target: usize, rows: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::identity(n);
        for &r in rows {
            m.set(target, r, !m.get(target, r));
        }
        m
    }

    fn run(n: usize, gates: &[CnotGate]) -> BitMatrix {
        let mut c = CnotCircuit::new(n);
        c.extend_gates(gates);
        c.simulate()
    }

    #[test]
    fn cnot_template_examples() {
        let line = ConnectivityGraph::line(6);
        let g = cnot_via_path(&line, &[2, 3]).unwrap();
        assert_eq!(g, vec![CnotGate::new(2, 3)]);
        let g = cnot_via_path(&line, &[0, 1, 2, 3]).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(run(6, &g), transvection(6, 3, &[0]));
        let g = cnot_via_path(&line, &[5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(run(6, &g), transvection(6, 0, &[5]));
        assert!(cnot_via_path(&line, &[0, 2]).is_err());
        assert!(cnot_via_path(&line, &[0]).is_err());
        assert!(cnot_via_path(&line, &[0, 1, 0]).is_err());
    }

    #[test]
    fn fanin_template_examples() {
        let line = ConnectivityGraph::line(6);
        let g = fanin_via_path(&line, &[0, 1, 2, 3, 4, 5], &[true; 4]).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(run(6, &g), transvection(6, 5, &[0, 1, 2, 3, 4]));
        assert_eq!(fanin_via_path(&line, &[1, 0], &[]).unwrap(), vec![CnotGate::new(1, 0)]);
        assert!(fanin_via_path(&line, &[0, 1, 2], &[]).is_err());
    }

    #[test]
    fn partial_masks_are_cheapest_first() {
        let masks = partial_masks(3, 100);
        assert_eq!(masks.len(), 6);
        let costs: Vec<u64> = masks.iter().map(|m| fanin_cost(m)).collect();
        assert!(costs.windows(2).all(|w| w[0] <= w[1]), "{costs:?}");
        assert_eq!(masks[0], vec![true, true, false]);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn parity_enumeration_examples() {
        let line = ConnectivityGraph::line(4);
        let id = QubitOrdering::identity(4);
        let ps = enumerate_parities(&line, &id, 1, None, 1);
        assert_eq!(ps.len(), 1);
        assert_eq!((ps[0].cost, ps[0].rows.to_string()), (1, "1".to_string()));

        // opposite corners of a square: two paths with different middle nodes
        let g = ConnectivityGraph::grid(2, 2);
        let id = QubitOrdering::identity(4);
        let ps = enumerate_parities(&g, &id, 3, None, 1);
        let full: Vec<_> = ps.iter().filter(|p| p.source() == 0 && p.is_full()).collect();
        assert_eq!(full.len(), 2);
        // with the snake, node 3 comes before node 2 so only one path stays in the prefix
        let snake = ordering::snake(&g).unwrap();
        let ps = enumerate_parities(&g, &snake, snake.rank(3), None, 1);
        assert_eq!(ps.iter().filter(|p| p.source() == 0 && p.is_full()).count(), 1);
        assert_ne!(full[0].rows, full[1].rows);
    }

    #[test]
    fn enumerated_costs_and_values_match_templates() {
        let g = ConnectivityGraph::grid(3, 3);
        let o = ordering::snake(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let state = random_operator(9, 81, 3);
        for lc in [1, 3] {
            for k in 1..9 {
                for p in enumerate_parities(&g, &o, k, None, lc) {
                    let gates = fanin_via_path(&g, &p.path, &p.mask).unwrap();
                    assert_eq!(gates.len() as u64, p.cost);
                    let mut after = state.clone();
                    let mut c = CnotCircuit::new(9);
                    c.extend_gates(&gates);
                    c.apply_to(&mut after);
                    let t = o.node(k);
                    assert_eq!(after.row_vec(t), state.row_vec(t).xor(&p.value(&state)));
                    let rows: Vec<usize> = p.rows.ones().map(|r| o.node(r)).collect();
                    let expect = rows.iter().fold(BitVec::zeros(9), |acc, &v| acc.xor(&state.row_vec(v)));
                    assert_eq!(p.value(&state), expect);
                    let _ = rng.gen::<u8>();
                }
            }
        }
    }

    fn random_lower_under(o: &QubitOrdering, rng: &mut ChaCha8Rng) -> BitMatrix {
        let n = o.len();
        BitMatrix::from_fn(n, n, |i, j| {
            let (ri, rj) = (o.rank(i), o.rank(j));
            ri == rj || (rj < ri && rng.gen())
        })
    }

    #[test]
    fn triangular_examples() {
        let g = ConnectivityGraph::line(4);
        let cfg = ConstrainedConfig::for_graph(&g);
        assert!(synth_triangular_constrained(&BitMatrix::identity(4), &g, &cfg).unwrap().is_empty());
        let mut l = BitMatrix::identity(4);
        l.set(2, 1, true);
        assert_eq!(synth_triangular_constrained(&l, &g, &cfg).unwrap().gates(), &[CnotGate::new(1, 2)]);
        l.set(0, 3, true);
        assert!(synth_triangular_constrained(&l, &g, &cfg).is_err());
        let bad = ConstrainedConfig {
            ordering: QubitOrdering::from_order(vec![0, 2, 1, 3]).unwrap(),
            ..cfg
        };
        assert!(matches!(
            synth_triangular_constrained(&BitMatrix::identity(4), &g, &bad),
            Err(Error::InvalidOrdering(_))
        ));
    }

    #[test]
    fn triangular_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for g in [ConnectivityGraph::line(5), ConnectivityGraph::grid(3, 3)] {
            for solver in [
                ConstrainedSolver::WeightedGreedy,
                ConstrainedSolver::Fast,
                ConstrainedSolver::Exact { budget: 20_000 },
            ] {
                let cfg = ConstrainedConfig {
                    solver,
                    niter: 2,
                    ..ConstrainedConfig::for_graph(&g)
                };
                for _ in 0..35 {
                    let l = random_lower_under(&cfg.ordering, &mut rng);
                    let c = synth_triangular_constrained(&l, &g, &cfg).unwrap();
                    assert_eq!(c.simulate(), l);
                    assert!(c.complies_with(&g));
                }
            }
        }
    }

    #[test]
    fn fast_step_examples() {
        let g = ConnectivityGraph::line(6);
        let id = QubitOrdering::identity(6);
        let table = ParityTable::new(&g, None, 1).unwrap();
        // parity of the adjacent row only
        let gates = fast_heuristic_step(&table, &id, 5, &BitVec::unit(5, 4));
        assert_eq!(gates, vec![CnotGate::new(4, 5)]);
        // far end only: one full fan-in down the line, then undo the extra rows
        let s = BitVec::unit(5, 0);
        let gates = fast_heuristic_step(&table, &id, 5, &s);
        assert_eq!(run(6, &gates), transvection(6, 5, &[0]));
        let inst = table.instance(5, &s).unwrap();
        let greedy = weighted_greedy_ranked(&inst, None).unwrap();
        assert!(gates.len() as u64 >= greedy.weight.min(gates.len() as u64));
    }

    #[test]
    fn fast_step_bounded_by_exact_optimum() {
        let g = ConnectivityGraph::grid(3, 3);
        let o = ordering::snake(&g).unwrap();
        let rg = g.relabel(o.ranks());
        let table = ParityTable::new(&rg, None, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let k = rng.gen_range(1..9);
            let s = BitVec::from_bools(&(0..k).map(|_| rng.gen()).collect::<Vec<_>>());
            let gates = fast_heuristic_step(&table, &o, k, &s);
            let mut expect = BitMatrix::identity(9);
            for j in s.ones() {
                expect.add_row(o.node(k), o.node(j));
            }
            assert_eq!(run(9, &gates), expect);
            let inst = table.instance(k, &s).unwrap();
            let exact = solve_exact_with_warm_start(&inst, u64::MAX, None).unwrap().weight;
            assert!(gates.len() as u64 >= exact);
        }
    }

    #[test]
    fn precircuit_examples() {
        let g = ConnectivityGraph::line(2);
        let id = QubitOrdering::identity(2);
        assert!(compute_precircuit(&BitMatrix::identity(2), &g, &id).unwrap().is_empty());
        let swap = BitMatrix::permutation(&[1, 0]);
        let c = compute_precircuit(&swap, &g, &id).unwrap();
        assert_eq!(c.len(), 1);
        let fixed = c.simulate().mul(&swap).unwrap();
        assert!(fixed.leading_minor_invertible(1) && fixed.leading_minor_invertible(2));
    }

    #[test]
    fn precircuit_fixes_all_minors() {
        let g = ConnectivityGraph::grid(3, 3);
        for (i, o) in ordering::symmetry_variants(&g).unwrap().into_iter().enumerate().cycle().take(100) {
            let a = random_operator(9, 81, 1000 + i as u64 * 7919 + o.rank(0) as u64);
            let c = compute_precircuit(&a, &g, &o).unwrap();
            assert!(c.complies_with(&g));
            let fixed = c.simulate().mul(&a).unwrap().reorder(o.order());
            assert!((1..=9).all(|k| fixed.leading_minor_invertible(k)));
            let plu = fixed.plu_decompose().unwrap();
            assert!(plu.perm.iter().enumerate().all(|(i, &p)| i == p));
        }
    }

    #[test]
    fn general_examples() {
        let g = ConnectivityGraph::grid(2, 3);
        let cfg = ConstrainedConfig::for_graph(&g);
        let (c, perm) = synth_general_constrained(&BitMatrix::identity(6), &g, &cfg).unwrap();
        assert!(c.is_empty());
        assert_eq!(perm, (0..6).collect::<Vec<_>>());
        let p = vec![3, 0, 4, 1, 5, 2];
        let a = BitMatrix::permutation(&p);
        let perm_cfg = ConstrainedConfig {
            mode: Mode::UpToRowPermutation,
            ..cfg.clone()
        };
        let (c, perm) = synth_general_constrained(&a, &g, &perm_cfg).unwrap();
        assert!(c.is_empty());
        assert_eq!(perm, p);
        let (c, perm) = synth_general_constrained(&a, &g, &cfg).unwrap();
        assert_eq!(c.simulate(), a);
        assert_eq!(perm, (0..6).collect::<Vec<_>>());
        assert_eq!(
            synth_general_constrained(&BitMatrix::zeros(6, 6), &g, &cfg),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn general_round_trip_all_modes() {
        let graphs = [
            ConnectivityGraph::line(6),
            ConnectivityGraph::grid(3, 3),
            ConnectivityGraph::grid_with_diagonals(3, 4),
            topology::preset("ibm_qx5").unwrap(),
        ];
        for (gi, g) in graphs.iter().enumerate() {
            for mode in [Mode::Exact, Mode::UpToRowPermutation] {
                for solver in [ConstrainedSolver::WeightedGreedy, ConstrainedSolver::Fast] {
                    let cfg = ConstrainedConfig {
                        mode,
                        solver,
                        niter: 3,
                        use_symmetries: g.grid_shape().is_some(),
                        seed: gi as u64,
                        ..ConstrainedConfig::for_graph(g)
                    };
                    for t in 0..4 {
                        let n = g.n_nodes();
                        let a = random_operator(n, n * n, t);
                        let (c, perm) = synth_general_constrained(&a, g, &cfg).unwrap();
                        assert!(c.complies_with(g));
                        assert_eq!(c.simulate().permute_rows(&perm), a);
                        if mode == Mode::Exact {
                            assert!(perm.iter().enumerate().all(|(i, &p)| i == p));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn restarts_never_hurt() {
        let g = ConnectivityGraph::grid(3, 3);
        let a = random_operator(9, 81, 5);
        let mut prev = usize::MAX;
        for niter in [1, 5, 20] {
            let cfg = ConstrainedConfig {
                niter,
                seed: 11,
                ..ConstrainedConfig::for_graph(&g)
            };
            let size = synth_general_constrained(&a, &g, &cfg).unwrap().0.len();
            assert!(size <= prev);
            prev = size;
        }
    }

    #[test]
    fn table1_configs_resolve() {
        for name in TABLE1_ARCHITECTURES {
            let (g, cfg) = table1_setup(name).unwrap();
            cfg.validate(&g).unwrap();
        }
        assert!(table1_setup("nope").is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!("perm".parse::<Mode>().unwrap(), Mode::UpToRowPermutation);
        assert_eq!("exact:5".parse::<ConstrainedSolver>().unwrap(), ConstrainedSolver::Exact { budget: 5 });
        assert!("exact:0".parse::<ConstrainedSolver>().is_err());
        assert!("slow".parse::<ConstrainedSolver>().is_err());
    }
}
