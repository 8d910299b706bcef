//! Single-qubit Pauli tomography of the clones and maximum-likelihood
//! reconstruction on the Bloch ball.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::analysis::{density_from_bloch, norm3};
use crate::circuit::Circuit;
use crate::dicke::{Basis, MessageState, Telecloning};
use crate::linalg::CMatrix;
use crate::sim::{mix_seed, Counts, NoiseModel, Simulator};
use crate::{Error, Result};

/// Outcome counts `[n0, n1]` of one qubit in each Pauli basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BasisCounts {
    pub x: [u64; 2],
    pub y: [u64; 2],
    pub z: [u64; 2],
}

impl BasisCounts {
    pub fn get(&self, basis: Basis) -> [u64; 2] {
        match basis {
            Basis::X => self.x,
            Basis::Y => self.y,
            Basis::Z => self.z,
        }
    }

    pub fn get_mut(&mut self, basis: Basis) -> &mut [u64; 2] {
        match basis {
            Basis::X => &mut self.x,
            Basis::Y => &mut self.y,
            Basis::Z => &mut self.z,
        }
    }

    fn as_array(&self) -> [[u64; 2]; 3] {
        [self.x, self.y, self.z]
    }

    fn check(&self) -> Result<()> {
        if self.as_array().iter().any(|[a, b]| a + b == 0) {
            return Err(Error::InvalidArgument("every basis needs at least one shot".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyRecord {
    pub clone_index: usize,
    pub shots_per_basis: u64,
    pub counts: BasisCounts,
    /// Maximum-likelihood estimate.
    pub reconstructed: CMatrix,
}

/// `r_B = (n0 - n1) / shots` and the (possibly unphysical) `(I + r.sigma)/2`.
pub fn linear_inversion(counts: &BasisCounts) -> Result<([f64; 3], CMatrix)> {
    counts.check()?;
    let r = counts.as_array().map(|[n0, n1]| (n0 as f64 - n1 as f64) / (n0 + n1) as f64);
    Ok((r, density_from_bloch(r)))
}

/// Radius the estimate is kept inside, so every reconstruction is full rank
/// and the log-likelihood stays finite.
const MAX_RADIUS: f64 = 1.0 - 1e-12;
const MAX_ITERATIONS: usize = 10_000;
const TOLERANCE: f64 = 1e-10;

fn project(r: [f64; 3]) -> [f64; 3] {
    let n = norm3(r);
    if n > MAX_RADIUS {
        r.map(|v| v * MAX_RADIUS / n)
    } else {
        r
    }
}

/// Mean log-likelihood of the counts at Bloch vector `r` (zero-count terms drop out).
pub fn log_likelihood(counts: &BasisCounts, r: [f64; 3]) -> f64 {
    let mut total = 0.0;
    let mut shots = 0u64;
    for (k, [n0, n1]) in counts.as_array().into_iter().enumerate() {
        if n0 > 0 {
            total += n0 as f64 * ((1.0 + r[k]) / 2.0).ln();
        }
        if n1 > 0 {
            total += n1 as f64 * ((1.0 - r[k]) / 2.0).ln();
        }
        shots += n0 + n1;
    }
    total / shots.max(1) as f64
}

fn gradient(counts: &BasisCounts, r: [f64; 3]) -> [f64; 3] {
    let arr = counts.as_array();
    let shots: u64 = arr.iter().map(|[a, b]| a + b).sum();
    let mut g = [0.0; 3];
    for k in 0..3 {
        let [n0, n1] = arr[k];
        g[k] = (n0 as f64 / (1.0 + r[k]) - n1 as f64 / (1.0 - r[k])) / shots as f64;
    }
    g
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Bloch vector of the maximum-likelihood state, by projected gradient ascent
/// with backtracking from the projected linear-inversion estimate.
pub fn mle_bloch(counts: &BasisCounts) -> Result<[f64; 3]> {
    let (start, _) = linear_inversion(counts)?;
    let mut r = project(start);
    let mut value = log_likelihood(counts, r);
    let mut step = 1.0;
    for iteration in 0..MAX_ITERATIONS {
        let g = gradient(counts, r);
        let unit = project([r[0] + g[0], r[1] + g[1], r[2] + g[2]]);
        if dist(unit, r) < TOLERANCE {
            return Ok(r);
        }
        let mut accepted = false;
        while step > 1e-20 {
            let trial = project([r[0] + step * g[0], r[1] + step * g[1], r[2] + step * g[2]]);
            let gain = g[0] * (trial[0] - r[0]) + g[1] * (trial[1] - r[1]) + g[2] * (trial[2] - r[2]);
            let v = log_likelihood(counts, trial);
            if v.is_finite() && v >= value + 1e-4 * gain {
                let moved = dist(trial, r);
                r = trial;
                value = v;
                step = (step * 2.0).min(1e8);
                accepted = true;
                if moved < TOLERANCE * 1e-3 {
                    return Ok(r);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No ascent direction left at machine precision.
            return Ok(r);
        }
        if iteration + 1 == MAX_ITERATIONS {
            break;
        }
    }
    Err(Error::MleNotConverged { iterations: MAX_ITERATIONS, best: r })
}

/// Maximum-likelihood single-qubit density matrix.
pub fn mle_fit(counts: &BasisCounts) -> Result<CMatrix> {
    mle_bloch(counts).map(density_from_bloch)
}

/// `[n0, n1]` of classical bit `clbit` in a counts table.
pub fn marginal(counts: &Counts, clbit: usize) -> [u64; 2] {
    let mut out = [0u64; 2];
    for (bits, n) in counts {
        let one = bits.as_bytes().get(clbit) == Some(&b'1');
        out[usize::from(one)] += n;
    }
    out
}

/// Runs the protocol once per basis and fits every clone.
///
/// `prepare` post-processes each circuit before simulation (transpilation,
/// scheduling passes); it must keep the classical-bit layout.
#[allow(clippy::too_many_arguments)]
pub fn tomography_run(
    sim: &Simulator,
    protocol: &Telecloning,
    message: MessageState,
    shots_per_basis: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
    prepare: &dyn Fn(Circuit) -> Result<Circuit>,
) -> Result<Vec<TomographyRecord>> {
    if shots_per_basis == 0 {
        return Err(Error::InvalidArgument("shots_per_basis must be at least 1".into()));
    }
    let m = protocol.clones();
    let mut counts = alloc::vec![BasisCounts::default(); m];
    for (b, basis) in Basis::ALL.into_iter().enumerate() {
        let circuit = prepare(protocol.protocol_circuit(message, Some(basis)))?;
        let raw = sim.run_shots(&circuit, shots_per_basis, mix_seed(seed, b as u64), noise)?;
        for (k, c) in counts.iter_mut().enumerate() {
            *c.get_mut(basis) = marginal(&raw, 2 + k);
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(clone_index, counts)| {
            Ok(TomographyRecord { clone_index, shots_per_basis, counts, reconstructed: mle_fit(&counts)? })
        })
        .collect()
}
