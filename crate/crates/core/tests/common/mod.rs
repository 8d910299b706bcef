#![allow(dead_code)]

use teleclone_core::analysis::norm3;
use teleclone_core::linalg::CMatrix;
use teleclone_core::sim::StateVector;
use teleclone_core::tomography::{log_likelihood, BasisCounts};
use teleclone_core::C64;

/// Dicke state of weight `weight` on `qubits` inside an `n`-qubit register,
/// by enumerating every basis index.
pub fn dicke_oracle(n: usize, qubits: &[usize], weight: usize) -> Vec<C64> {
    let mask: usize = qubits.iter().map(|q| 1 << q).sum();
    let members: Vec<usize> =
        (0..1usize << n).filter(|i| i & !mask == 0 && (i & mask).count_ones() as usize == weight).collect();
    let amp = 1.0 / (members.len() as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    for i in members {
        v[i] = C64::new(amp, 0.0);
    }
    v
}

/// `(1/sqrt(M+1)) sum_i |D_i>_{ap} |D_i>_{clones}` on `n` qubits.
pub fn telecloning_oracle(n: usize, ap: &[usize], clones: &[usize]) -> Vec<C64> {
    let m = clones.len();
    let mut out = vec![C64::new(0.0, 0.0); 1 << n];
    let norm = 1.0 / ((m + 1) as f64).sqrt();
    for i in 0..=m {
        let a = dicke_oracle(n, ap, i);
        let c = dicke_oracle(n, clones, i);
        for (x, ax) in a.iter().enumerate().filter(|(_, v)| v.norm() > 0.0) {
            for (y, cy) in c.iter().enumerate().filter(|(_, v)| v.norm() > 0.0) {
                out[x | y] += ax * cy * norm;
            }
        }
    }
    out
}

/// Basis state written left to right: `bits[0]` is qubit 0.
pub fn ket(bits: &str) -> StateVector {
    StateVector::basis(&bits.chars().map(|c| c == '1').collect::<Vec<_>>())
}

pub fn max_amp_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn real_diag(d: &[f64]) -> CMatrix {
    CMatrix::from_real_diagonal(d)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Ideal clone of a message: `(I + eta r.sigma) / 2`.
pub fn ideal_clone(bloch: [f64; 3], eta: f64) -> CMatrix {
    teleclone_core::analysis::density_from_bloch(bloch.map(|v| v * eta))
}

/// Deterministic pseudo-random angles for tests that do not need proptest.
pub fn angles(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = teleclone_core::sim::shot_rng(seed, 0);
    (0..count)
        .map(|_| {
            let u = teleclone_core::sim::uniform(&mut rng) * std::f64::consts::PI;
            let v = teleclone_core::sim::uniform(&mut rng) * 2.0 * std::f64::consts::PI;
            (u, v)
        })
        .collect()
}

/// Random density matrix `A A^dag / Tr`, of rank `rank`.
pub fn random_density(dim: usize, rank: usize, raw: &[f64]) -> CMatrix {
    let mut a = CMatrix::zeros(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in 0..rank.min(dim) {
            a.set(i, j, c(raw[k % raw.len()], raw[(k + 1) % raw.len()]));
            k += 2;
        }
    }
    let rho = a.matmul(&a.adjoint());
    let t = rho.trace().re;
    if t < 1e-9 {
        CMatrix::identity(dim).scaled(1.0 / dim as f64)
    } else {
        rho.scaled(1.0 / t)
    }
}

/// Brute-force likelihood maximum on a cubic grid clipped to the unit ball:
/// a coarse pass over the whole ball, then a `step` grid around the best
/// coarse point (the log-likelihood is concave, so the refinement window
/// cannot miss the optimum).
pub fn grid_oracle(c: &BasisCounts, step: f64) -> [f64; 3] {
    let search = |center: [f64; 3], half: f64, h: f64| {
        let n = (half / h).round() as i64;
        let mut best = (f64::NEG_INFINITY, center);
        for i in -n..=n {
            for j in -n..=n {
                for k in -n..=n {
                    let r = [center[0] + i as f64 * h, center[1] + j as f64 * h, center[2] + k as f64 * h];
                    if norm3(r) > 1.0 {
                        continue;
                    }
                    let v = log_likelihood(c, r);
                    if v > best.0 {
                        best = (v, r);
                    }
                }
            }
        }
        best.1
    };
    let coarse = search([0.0; 3], 1.0, 0.02);
    let mid = search(coarse, 0.04, 0.004);
    search(mid, 0.008, step)
}
