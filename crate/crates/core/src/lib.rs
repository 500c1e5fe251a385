//! CNOT circuit synthesis by syndrome decoding.
//!
//! Linear reversible operators over GF(2) are synthesized as CNOT circuits by
//! factoring them into triangular parts and building each row from parities
//! that already appear in the circuit. Choosing which parities to reuse is a
//! syndrome decoding problem, solved here by several heuristics and an exact
//! branch-and-bound. A constrained variant respects a hardware coupling graph.

pub mod circuit;
pub mod error;
pub mod gf2;
pub mod ordering;
pub mod syndrome;
pub mod synth_constrained;
pub mod synth_full;
pub mod topology;

pub use circuit::{random_circuit, random_operator, CnotCircuit, CnotGate};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec, PluFactors};
pub use ordering::QubitOrdering;
pub use syndrome::{SyndromeInstance, SyndromeSolution};
pub use topology::ConnectivityGraph;
