//! Synthesis for all-to-all connectivity.
//!
//! A unit lower triangular operator is built row by row. Row `k` starts as
//! `e_k`; the parities it still needs are chosen among every parity that has
//! appeared on qubits `< k` so far, by solving a syndrome decoding instance.
//! Each chosen parity is added to qubit `k` by a CNOT inserted at the moment
//! that parity is live. General operators go through `A = P L U`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::syndrome::{
    solve_exact_with_warm_start, solve_greedy, solve_in_bases, solve_isd, solve_tree, BasisPreference,
    SyndromeInstance, SyndromeSolution,
};

/// Decoder used on each row's instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Greedy,
    Tree { width: usize, depth: usize },
    Isd { n_iter: usize },
    Exact { budget: u64 },
}

impl SolverKind {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SolverKind::Greedy => true,
            SolverKind::Tree { width, depth } => width > 0 && depth > 0,
            SolverKind::Isd { n_iter } => n_iter > 0,
            SolverKind::Exact { budget } => budget > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("solver parameters must be positive: {self}")))
        }
    }

    pub fn solve(&self, inst: &SyndromeInstance, seed: u64) -> Result<SyndromeSolution> {
        match *self {
            SolverKind::Greedy => solve_greedy(inst),
            SolverKind::Tree { width, depth } => solve_tree(inst, width, depth),
            SolverKind::Isd { n_iter } => solve_isd(inst, n_iter, seed),
            SolverKind::Exact { budget } => {
                let warm = solve_greedy(inst)?;
                match solve_exact_with_warm_start(inst, budget, Some(&warm)) {
                    Ok(s) => Ok(s),
                    Err(Error::BudgetExhausted { best: Some(b) }) => Ok(b),
                    Err(e) => Err(e),
                }
            }
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::Greedy => write!(f, "greedy"),
            SolverKind::Tree { width, depth } => write!(f, "tree:{width}:{depth}"),
            SolverKind::Isd { n_iter } => write!(f, "isd:{n_iter}"),
            SolverKind::Exact { budget } => write!(f, "exact:{budget}"),
        }
    }
}

/// Parses `greedy`, `tree:W:D`, `isd:N` or `exact:B`.
impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| {
            x.parse::<u64>()
                .map_err(|_| Error::Precondition(format!("bad solver parameter {x:?} in {s:?}")))
        };
        let kind = match parts.as_slice() {
            ["greedy"] => SolverKind::Greedy,
            ["tree", w, d] => SolverKind::Tree {
                width: num(w)? as usize,
                depth: num(d)? as usize,
            },
            ["isd", n] => SolverKind::Isd { n_iter: num(n)? as usize },
            ["exact", b] => SolverKind::Exact { budget: num(b)? },
            _ => return Err(Error::Precondition(format!("unknown solver {s:?}"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisConfig {
    pub solver: SolverKind,
    /// Number of random bases each instance is re-solved in.
    pub niter_syndrome: usize,
    pub seed: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Greedy,
            niter_syndrome: 1,
            seed: 0,
        }
    }
}

impl SynthesisConfig {
    pub fn with_solver(solver: SolverKind) -> Self {
        Self {
            solver,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.niter_syndrome == 0 {
            return Err(Error::Precondition("niter_syndrome must be positive".into()));
        }
        self.solver.validate()
    }
}

/// Mixes a stream index into a seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityEntry {
    pub parity: BitVec,
    pub qubit: usize,
    /// Number of gates executed when the parity becomes live.
    pub position: usize,
}

/// Every parity that appeared on a set of qubits, in order of appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityHistory {
    pub entries: Vec<ParityEntry>,
}

impl ParityHistory {
    /// Parities held by qubits `0..n_qubits` over the execution of `circuit`.
    pub fn harvest(circuit: &CnotCircuit, n_qubits: usize) -> Self {
        let n = circuit.n_wires();
        let mut state = BitMatrix::identity(n);
        let mut entries: Vec<ParityEntry> = (0..n_qubits)
            .map(|q| ParityEntry {
                parity: BitVec::unit(n, q),
                qubit: q,
                position: 0,
            })
            .collect();
        for (p, g) in circuit.gates().iter().enumerate() {
            state.add_row(g.target, g.control);
            if g.target < n_qubits {
                entries.push(ParityEntry {
                    parity: state.row_vec(g.target),
                    qubit: g.target,
                    position: p + 1,
                });
            }
        }
        Self { entries }
    }

    /// Whether every entry matches the simulated prefix of `circuit`.
    pub fn is_coherent_with(&self, circuit: &CnotCircuit) -> bool {
        self.entries.iter().all(|e| {
            e.position <= circuit.len() && {
                let prefix = CnotCircuit::from_gates(
                    circuit.n_wires(),
                    circuit.gates()[..e.position].iter().map(|g| (g.control, g.target)),
                )
                .expect("gates of a valid circuit");
                prefix.simulate().row_vec(e.qubit) == e.parity
            }
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn solve_row(inst: &SyndromeInstance, cfg: &SynthesisConfig, row: usize) -> Result<SyndromeSolution> {
    let seed = derive_seed(cfg.seed, row as u64);
    if cfg.niter_syndrome > 1 {
        let solver = cfg.solver;
        solve_in_bases(inst, cfg.niter_syndrome, seed, BasisPreference::Uniform, |i| solver.solve(i, seed))
    } else {
        cfg.solver.solve(inst, seed)
    }
}

/// Synthesizes a unit lower triangular operator. Every gate has `control < target`.
pub fn synth_lower_triangular(l: &BitMatrix, cfg: &SynthesisConfig) -> Result<CnotCircuit> {
    cfg.validate()?;
    if !l.is_square() || !l.is_unit_lower_triangular() {
        return Err(Error::NotTriangular("unit lower triangular"));
    }
    let n = l.n_rows();
    let mut circuit = CnotCircuit::new(n);
    for k in 1..n {
        let target = l.row_vec(k).truncated(k);
        if target.is_zero() {
            continue;
        }
        let history = ParityHistory::harvest(&circuit, k);
        let mut seen: HashMap<BitVec, usize> = HashMap::new();
        let mut columns = Vec::new();
        let mut owners = Vec::new();
        for e in history.entries {
            let p = e.parity.truncated(k);
            if !seen.contains_key(&p) {
                seen.insert(p.clone(), columns.len());
                columns.push(p);
                owners.push((e.position, e.qubit));
            }
        }
        let inst = SyndromeInstance::new(&columns, &target)?;
        let sol = solve_row(&inst, cfg, k)?;
        let mut picks: Vec<(usize, usize)> = sol.support.iter().map(|&i| owners[i]).collect();
        picks.sort_unstable();
        for (offset, (position, qubit)) in picks.into_iter().enumerate() {
            circuit.insert(position + offset, CnotGate::new(qubit, k));
        }
    }
    Ok(circuit)
}

/// Synthesizes an invertible operator up to a final relabeling of the outputs:
/// row `i` of `a` equals row `perm[i]` of the circuit's operator.
pub fn synth_general(a: &BitMatrix, cfg: &SynthesisConfig) -> Result<(CnotCircuit, Vec<usize>)> {
    let plu = a.plu_decompose()?;
    let cl = synth_lower_triangular(&plu.lower, cfg)?;
    let cu = synth_lower_triangular(&plu.upper.transpose(), cfg)?.transpose();
    Ok((cu.concat(&cl), plu.perm))
}

/// Gauss-Jordan elimination, column by column.
pub fn gaussian_elimination(a: &BitMatrix) -> Result<CnotCircuit> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("gaussian elimination of a non-square matrix".into()));
    }
    let n = a.n_rows();
    let mut work = a.clone();
    let mut ops = CnotCircuit::new(n);
    for c in 0..n {
        if !work.get(c, c) {
            let r = (c + 1..n).find(|&r| work.get(r, c)).ok_or(Error::SingularMatrix)?;
            work.add_row(c, r);
            ops.push(r, c);
        }
        for r in 0..n {
            if r != c && work.get(r, c) {
                work.add_row(r, c);
                ops.push(c, r);
            }
        }
    }
    // ops reduce `a` to the identity
    Ok(ops.inverse())
}

/// Default section size of the block-partitioned elimination.
pub fn pmh_default_section(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    ((n as f64).log2() / 2.0).floor().max(1.0) as usize
}

/// Block-partitioned elimination with sub-row deduplication, the
/// `O(n^2 / log n)` baseline.
pub fn pmh(a: &BitMatrix, section_size: Option<usize>) -> Result<CnotCircuit> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("pmh of a non-square matrix".into()));
    }
    let n = a.n_rows();
    let size = section_size.unwrap_or_else(|| pmh_default_section(n));
    if size == 0 {
        return Err(Error::Precondition("section size must be positive".into()));
    }
    let mut state = a.clone();
    let first = pmh_lower_pass(&mut state, size)?;
    let mut state = state.transpose();
    let second = pmh_lower_pass(&mut state, size)?;

    let mut out = CnotCircuit::new(n);
    for &(control, target) in &second {
        out.push(target, control);
    }
    for &(control, target) in first.iter().rev() {
        out.push(control, target);
    }
    Ok(out)
}

/// Clears everything below the diagonal; returns `(control, target)` row
/// operations in execution order.
fn pmh_lower_pass(state: &mut BitMatrix, size: usize) -> Result<Vec<(usize, usize)>> {
    let n = state.n_rows();
    let mut ops = Vec::new();
    for sec in 0..n.div_ceil(size) {
        let (lo, hi) = (sec * size, ((sec + 1) * size).min(n));
        let mut patterns: HashMap<Vec<bool>, usize> = HashMap::new();
        for row in lo..n {
            let pattern: Vec<bool> = (lo..hi).map(|c| state.get(row, c)).collect();
            if !pattern.iter().any(|&b| b) {
                continue;
            }
            match patterns.get(&pattern) {
                Some(&first) => {
                    state.add_row(row, first);
                    ops.push((first, row));
                }
                None => {
                    patterns.insert(pattern, row);
                }
            }
        }
        for col in lo..hi {
            let mut diag_one = state.get(col, col);
            for row in col + 1..n {
                if state.get(row, col) {
                    if !diag_one {
                        state.add_row(col, row);
                        ops.push((row, col));
                        diag_one = true;
                    }
                    state.add_row(row, col);
                    ops.push((col, row));
                }
            }
            if !diag_one {
                return Err(Error::SingularMatrix);
            }
        }
    }
    Ok(ops)
}
