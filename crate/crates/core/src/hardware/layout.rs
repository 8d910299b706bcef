//! Role-to-physical-qubit assignments on the heavy-hex device.

use alloc::vec::Vec;

use crate::circuit::Role;
use crate::dicke::{Telecloning, Variant};
use crate::hardware::graph::CouplingGraph;
use crate::{Error, Result};

/// Most clones that fit on the 27-qubit device with ancillas.
pub const MAX_CLONES_WITH_ANCILLA: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub message: usize,
    pub port: usize,
    /// Ancilla `k` is `k+1` steps from the port along the chain.
    pub ancillas: Vec<usize>,
    /// Clone `k` is `k+1` steps from the port along the chain.
    pub clones: Vec<usize>,
}

/// Port at a degree-3 node; message, ancilla chain and clone chain each leave
/// through one of its neighbours. Chains are listed from the port outwards and
/// truncated from the far end for smaller clone counts.
const CANONICAL: [(usize, usize, [usize; 9], [usize; 10]); 7] = [
    (0, 1, [2, 3, 5, 8, 11, 14, 16, 19, 20], [4, 7, 10, 12, 15, 18, 21, 23, 24, 25]),
    (6, 7, [4, 1, 2, 3, 5, 8, 11, 14, 13], [10, 12, 15, 18, 21, 23, 24, 25, 22, 19]),
    (9, 8, [5, 3, 2, 1, 4, 7, 10, 12, 13], [11, 14, 16, 19, 22, 25, 24, 23, 21, 18]),
    (10, 12, [15, 18, 21, 23, 24, 25, 22, 19, 16], [13, 14, 11, 8, 5, 3, 2, 1, 4, 7]),
    (11, 14, [16, 19, 22, 25, 24, 23, 21, 18, 15], [13, 12, 10, 7, 4, 1, 2, 3, 5, 8]),
    (17, 18, [15, 12, 10, 7, 4, 1, 2, 3, 5], [21, 23, 24, 25, 22, 19, 16, 14, 11, 8]),
    (20, 19, [16, 14, 11, 8, 5, 3, 2, 1, 0], [22, 25, 24, 23, 21, 18, 15, 12, 10, 7]),
];

pub const LAYOUT_COUNT: usize = CANONICAL.len();

/// The seven canonical layouts for `clones` clones of `variant`.
pub fn enumerate_layouts(clones: usize, variant: Variant) -> Result<Vec<Layout>> {
    if variant.has_ancillas() && clones > MAX_CLONES_WITH_ANCILLA {
        return Err(Error::LayoutCapacity { clones, max: MAX_CLONES_WITH_ANCILLA });
    }
    Telecloning::new(clones, variant)?;
    let ancilla_count = if variant.has_ancillas() { clones - 1 } else { 0 };
    Ok(CANONICAL
        .iter()
        .map(|(message, port, anc, cl)| Layout {
            message: *message,
            port: *port,
            ancillas: anc[..ancilla_count].to_vec(),
            clones: cl[..clones].to_vec(),
        })
        .collect())
}

impl Layout {
    pub fn physical(&self, role: Role) -> Option<usize> {
        match role {
            Role::Message => Some(self.message),
            Role::Port => Some(self.port),
            Role::Ancilla(k) => self.ancillas.get(k).copied(),
            Role::Clone(k) => self.clones.get(k).copied(),
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut all = alloc::vec![self.message, self.port];
        all.extend(&self.ancillas);
        all.extend(&self.clones);
        all
    }

    /// Checks injectivity, range and that every chain is a coupled path.
    pub fn validate(&self, graph: &CouplingGraph) -> Result<()> {
        let all = self.qubits();
        for (i, &q) in all.iter().enumerate() {
            if q >= graph.num_qubits() {
                return Err(Error::QubitOutOfRange { index: q, count: graph.num_qubits() });
            }
            if all[..i].contains(&q) {
                return Err(Error::InvalidArgument(alloc::format!("physical qubit {q} assigned twice")));
            }
        }
        let check = |path: &[usize]| -> Result<()> {
            for w in path.windows(2) {
                if !graph.has_edge(w[0], w[1]) {
                    return Err(Error::OffEdgeInteraction(w[0], w[1]));
                }
            }
            Ok(())
        };
        check(&[self.message, self.port])?;
        let mut chain = alloc::vec![self.port];
        chain.extend(&self.ancillas);
        check(&chain)?;
        let mut chain = alloc::vec![self.port];
        chain.extend(&self.clones);
        check(&chain)
    }
}
