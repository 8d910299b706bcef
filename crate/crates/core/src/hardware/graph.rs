//! Device coupling graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Undirected coupling graph over `num_qubits` physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    num_qubits: usize,
    /// Sorted `(min, max)` pairs without duplicates.
    edges: Vec<(usize, usize)>,
}

/// The 27-qubit heavy-hex lattice.
pub const HEAVY_HEX_27_EDGES: [(usize, usize); 28] = [
    (0, 1),
    (1, 2),
    (1, 4),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
    (14, 16),
    (15, 18),
    (16, 19),
    (17, 18),
    (18, 21),
    (19, 20),
    (19, 22),
    (21, 23),
    (22, 25),
    (23, 24),
    (24, 25),
    (25, 26),
];

pub fn heavy_hex_27() -> CouplingGraph {
    CouplingGraph::new(27, HEAVY_HEX_27_EDGES.to_vec()).expect("built-in lattice is valid")
}

impl CouplingGraph {
    pub fn new(num_qubits: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(alloc::format!("self-loop on qubit {a}")));
            }
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(Error::QubitOutOfRange { index: q, count: num_qubits });
                }
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self { num_qubits, edges: norm })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, q: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == q || b == q).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_qubits).map(|q| self.degree(q)).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_qubits == 0 {
            return true;
        }
        let mut seen = vec![false; self.num_qubits];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(q) = stack.pop() {
            for n in self.neighbors(q) {
                if !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True if consecutive entries of `path` are coupled.
    pub fn is_path(&self, path: &[usize]) -> bool {
        path.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}
