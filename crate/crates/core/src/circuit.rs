//! CNOT circuits: representation, simulation and structural transforms.
//!
//! Gates execute left to right. Simulation starts from the identity and
//! applies `row[target] ^= row[control]` for each gate in order, so the
//! circuit `a ++ b` implements `simulate(b) * simulate(a)`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::gf2::BitMatrix;
use crate::topology::ConnectivityGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CnotGate {
    pub control: usize,
    pub target: usize,
}

impl CnotGate {
    pub fn new(control: usize, target: usize) -> Self {
        debug_assert_ne!(control, target);
        Self { control, target }
    }

    /// The gate whose matrix is the transpose of this one.
    pub fn transposed(self) -> Self {
        Self {
            control: self.target,
            target: self.control,
        }
    }
}

impl fmt::Display for CnotGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CNOT {} {}", self.control, self.target)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnotCircuit {
    n_wires: usize,
    gates: Vec<CnotGate>,
}

impl CnotCircuit {
    pub fn new(n_wires: usize) -> Self {
        Self {
            n_wires,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_wires: usize, gates: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut c = Self::new(n_wires);
        for (control, target) in gates {
            c.try_push(CnotGate { control, target })?;
        }
        Ok(c)
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[CnotGate] {
        &self.gates
    }

    /// Number of CNOT gates, the size metric.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn try_push(&mut self, gate: CnotGate) -> Result<()> {
        if gate.control == gate.target {
            return Err(Error::InvalidGate(format!("{gate}: control equals target")));
        }
        if gate.control >= self.n_wires || gate.target >= self.n_wires {
            return Err(Error::InvalidGate(format!("{gate}: wire out of range for {} wires", self.n_wires)));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a gate. Panics on an invalid gate.
    pub fn push(&mut self, control: usize, target: usize) {
        self.try_push(CnotGate { control, target }).expect("valid gate");
    }

    /// Inserts `gate` so that it executes after the first `position` gates.
    pub(crate) fn insert(&mut self, position: usize, gate: CnotGate) {
        debug_assert!(gate.control < self.n_wires && gate.target < self.n_wires);
        self.gates.insert(position, gate);
    }

    pub fn extend(&mut self, other: &CnotCircuit) {
        assert_eq!(self.n_wires, other.n_wires, "wire count mismatch");
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn extend_gates(&mut self, gates: &[CnotGate]) {
        for &g in gates {
            self.try_push(g).expect("valid gate");
        }
    }

    pub fn concat(&self, other: &CnotCircuit) -> CnotCircuit {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn simulate(&self) -> BitMatrix {
        let mut state = BitMatrix::identity(self.n_wires);
        self.apply_to(&mut state);
        state
    }

    /// Applies the gates as row operations to `state`, i.e. `state <- simulate(self) * state`.
    pub fn apply_to(&self, state: &mut BitMatrix) {
        for g in &self.gates {
            state.add_row(g.target, g.control);
        }
    }

    pub fn inverse(&self) -> CnotCircuit {
        CnotCircuit {
            n_wires: self.n_wires,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }

    /// Circuit implementing the transpose of `simulate(self)`.
    pub fn transpose(&self) -> CnotCircuit {
        CnotCircuit {
            n_wires: self.n_wires,
            gates: self.gates.iter().rev().map(|g| g.transposed()).collect(),
        }
    }

    /// Renames wire `w` to `map[w]`.
    pub fn relabel(&self, map: &[usize]) -> CnotCircuit {
        assert_eq!(map.len(), self.n_wires);
        CnotCircuit {
            n_wires: self.n_wires,
            gates: self
                .gates
                .iter()
                .map(|g| CnotGate::new(map[g.control], map[g.target]))
                .collect(),
        }
    }

    pub fn complies_with(&self, graph: &ConnectivityGraph) -> bool {
        self.first_violation(graph).is_none()
    }

    /// Index of the first gate acting on a non-edge of `graph`.
    pub fn first_violation(&self, graph: &ConnectivityGraph) -> Option<usize> {
        if graph.n_nodes() != self.n_wires {
            return Some(0);
        }
        self.gates.iter().position(|g| !graph.has_edge(g.control, g.target))
    }

    /// Text form: a line with the wire count, then one `CNOT c t` line per gate.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n_wires);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<CnotCircuit> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing wire count"))?;
        let n_wires: usize = header
            .trim()
            .parse()
            .map_err(|_| parse_err(1, format!("bad wire count {:?}", header.trim())))?;
        let mut c = CnotCircuit::new(n_wires);
        for (lineno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let gate = match parts.as_slice() {
                [name, a, b] if name.eq_ignore_ascii_case("CNOT") => {
                    let p = |s: &str| s.parse::<usize>().map_err(|_| parse_err(lineno + 1, format!("bad wire {s:?}")));
                    CnotGate {
                        control: p(a)?,
                        target: p(b)?,
                    }
                }
                _ => return Err(parse_err(lineno + 1, format!("expected \"CNOT c t\", got {line:?}"))),
            };
            c.try_push(gate).map_err(|e| parse_err(lineno + 1, e.to_string()))?;
        }
        Ok(c)
    }
}

/// A circuit of `n_gates` CNOTs with uniformly drawn distinct (control, target) pairs.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, n_gates: usize, rng: &mut R) -> CnotCircuit {
    assert!(n >= 2, "need at least two wires");
    let mut c = CnotCircuit::new(n);
    for _ in 0..n_gates {
        let control = rng.gen_range(0..n);
        let mut target = rng.gen_range(0..n - 1);
        if target >= control {
            target += 1;
        }
        c.gates.push(CnotGate { control, target });
    }
    c
}

/// The operator of a seeded random circuit.
pub fn random_operator(n: usize, n_gates: usize, seed: u64) -> BitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_circuit(n, n_gates, &mut rng).simulate()
}
