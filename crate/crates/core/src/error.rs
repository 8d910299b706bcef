use alloc::string::String;
use alloc::vec::Vec;

use crate::circuit::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid circuit: {}", join_violations(.0))]
    InvalidCircuit(Vec<Violation>),
    #[error("invalid clone count {clones}: {reason}")]
    InvalidCloneCount { clones: usize, reason: &'static str },
    #[error("no known telecloning circuit without ancilla qubits for M = {clones} (only M = 2, 3)")]
    NoAncillaUnsupported { clones: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("circuit needs {required} simulated qubits, cap is {cap}")]
    TooManyQubits { required: usize, cap: usize },
    #[error("circuit lacks the Bell-measurement structure: {0}")]
    MissingBellMeasurement(&'static str),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("qubit index {index} out of range for {count} qubits")]
    QubitOutOfRange { index: usize, count: usize },
    #[error("probability `{name}` = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("M = {clones} exceeds the layout capacity of {max} clones")]
    LayoutCapacity { clones: usize, max: usize },
    #[error("two-qubit interaction ({0}, {1}) is not on a coupling-graph edge")]
    OffEdgeInteraction(usize, usize),
    #[error("missing duration entry for `{0}`")]
    MissingDuration(String),
    #[error("gate `{0}` is not in the native gate set")]
    NotNative(&'static str),
    #[error("maximum-likelihood fit did not converge after {iterations} iterations")]
    MleNotConverged { iterations: usize, best: [f64; 3] },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
}

fn join_violations(v: &[Violation]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (i, violation) in v.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{violation}");
    }
    out
}
