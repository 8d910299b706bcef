//! Cloning bounds, state fidelity, Bloch vectors and entanglement measures.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dicke::MessageState;
use crate::linalg::{CMatrix, ZERO_EIGENVALUE};
use crate::{Error, Result, C64};

/// Eigenvalues above this negative threshold count as zero.
const PSD_TOLERANCE: f64 = 1e-9;

fn check_counts(n: usize, m: usize) -> Result<()> {
    if n < 1 || m < n {
        return Err(Error::InvalidArgument(alloc::format!("need 1 <= N <= M, got N={n}, M={m}")));
    }
    Ok(())
}

/// Optimal fidelity of universal symmetric `N -> M` cloning of a qubit,
/// `(MN + M + N) / (M (N + 2))`.
pub fn theoretical_fidelity(n: usize, m: usize) -> Result<f64> {
    check_counts(n, m)?;
    let (n, m) = (n as f64, m as f64);
    Ok((m * n + m + n) / (m * (n + 2.0)))
}

/// Bloch-vector shrinking of an optimal clone, `(N/M) (M+2)/(N+2)`.
pub fn shrinking_factor(n: usize, m: usize) -> Result<f64> {
    check_counts(n, m)?;
    let (n, m) = (n as f64, m as f64);
    Ok((n / m) * (m + 2.0) / (n + 2.0))
}

fn check_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_hermitian(1e-10) {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let min = rho.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

fn check_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    check_density(a)?;
    check_density(b)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))^2`. Single-qubit inputs use
/// the closed form, larger ones the matrix square root.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_pair(a, b)?;
    Ok(if a.dim() == 2 { fidelity_qubit_unchecked(a, b) } else { fidelity_general_unchecked(a, b) })
}

/// `Tr(ab) + 2 sqrt(det a det b)` for 2x2 density matrices.
pub fn fidelity_qubit(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_pair(a, b)?;
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch { left: a.dim(), right: 2 });
    }
    Ok(fidelity_qubit_unchecked(a, b))
}

/// The matrix square-root formula for any dimension.
pub fn fidelity_general(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_pair(a, b)?;
    Ok(fidelity_general_unchecked(a, b))
}

/// Determinant of a 2x2 density matrix, snapped to zero at round-off level
/// so pure inputs do not pick up a spurious `sqrt(eps)` term.
fn det2(m: &CMatrix) -> f64 {
    let d = (m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)).re;
    if d <= ZERO_EIGENVALUE / 10.0 {
        0.0
    } else {
        d
    }
}

fn fidelity_qubit_unchecked(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap = a.matmul(b).trace().re;
    let dets = det2(a) * det2(b);
    (overlap + 2.0 * dets.sqrt()).clamp(0.0, 1.0)
}

fn fidelity_general_unchecked(a: &CMatrix, b: &CMatrix) -> f64 {
    let s = a.sqrt_psd();
    let inner = s.matmul(b).matmul(&s);
    let root_trace: f64 =
        inner.hermitian_eigenvalues().iter().filter(|&&v| v > ZERO_EIGENVALUE).map(|v| v.sqrt()).sum();
    (root_trace * root_trace).clamp(0.0, 1.0)
}

/// `<psi| rho |psi>`.
pub fn fidelity_to_pure(rho: &CMatrix, psi: &[C64]) -> Result<f64> {
    if rho.dim() != psi.len() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: psi.len() });
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * rho.get(i, j) * psi[j];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// `(Tr(rho X), Tr(rho Y), Tr(rho Z))`.
pub fn bloch_vector(rho: &CMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: 2 });
    }
    let off = rho.get(0, 1) + rho.get(1, 0).conj();
    Ok([off.re, -off.im, (rho.get(0, 0) - rho.get(1, 1)).re])
}

/// `(I + r.sigma) / 2`.
pub fn density_from_bloch(r: [f64; 3]) -> CMatrix {
    CMatrix::from_row_major(
        2,
        alloc::vec![
            C64::new((1.0 + r[2]) / 2.0, 0.0),
            C64::new(r[0] / 2.0, -r[1] / 2.0),
            C64::new(r[0] / 2.0, r[1] / 2.0),
            C64::new((1.0 - r[2]) / 2.0, 0.0),
        ],
    )
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Angle between two vectors, `None` if either is (numerically) zero.
pub fn angle_between(a: [f64; 3], b: [f64; 3]) -> Option<f64> {
    if norm3(a) < 1e-12 || norm3(b) < 1e-12 {
        return None;
    }
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    Some(norm3(cross).atan2(dot))
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: 4 });
    }
    check_density(rho)?;
    // Y (x) Y is real: +1 on |00>,|11> anti-diagonal corners, -1 on |01>,|10>.
    let mut yy = CMatrix::zeros(4);
    for (i, s) in [(0usize, -1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
        yy.set(i, 3 - i, C64::new(s, 0.0));
    }
    let tilde = yy.matmul(&rho.conj()).matmul(&yy);
    let s = rho.sqrt_psd();
    let r = s.matmul(&tilde).matmul(&s);
    let mut lambda: Vec<f64> =
        r.hermitian_eigenvalues().iter().map(|&v| if v > ZERO_EIGENVALUE { v.sqrt() } else { 0.0 }).collect();
    lambda.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).clamp(0.0, 1.0))
}

/// Transposes the qubits in `subsystem` of a `2^n x 2^n` matrix.
pub fn partial_transpose(rho: &CMatrix, subsystem: &[usize]) -> Result<CMatrix> {
    let n = rho.dim().trailing_zeros() as usize;
    let mut mask = 0usize;
    for &q in subsystem {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, count: n });
        }
        mask |= 1 << q;
    }
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let swap = (r ^ c) & mask;
            out.set(r ^ swap, c ^ swap, rho.get(r, c));
        }
    }
    Ok(out)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose over `subsystem`, which must be a nonempty proper subset.
pub fn negativity(rho: &CMatrix, subsystem: &[usize]) -> Result<f64> {
    let n = rho.dim().trailing_zeros() as usize;
    let mut sorted = subsystem.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() >= n || sorted.len() != subsystem.len() {
        return Err(Error::InvalidArgument("bipartition must be a nonempty proper subset of distinct qubits".into()));
    }
    check_density(rho)?;
    let pt = partial_transpose(rho, subsystem)?;
    Ok(pt.hermitian_eigenvalues().iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

/// `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let mut d = a.clone();
    d.add_assign_scaled(b, -1.0);
    Ok(0.5 * d.hermitian_eigenvalues().iter().map(|v| v.abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneMetrics {
    pub fidelity_to_message: f64,
    pub bloch: [f64; 3],
    /// Angle to the message's Bloch vector; `None` when the clone vector vanishes.
    pub bloch_angle_error: Option<f64>,
    pub bloch_magnitude: f64,
}

pub fn clone_metrics(rho: &CMatrix, message: &MessageState) -> Result<CloneMetrics> {
    let bloch = bloch_vector(rho)?;
    Ok(CloneMetrics {
        fidelity_to_message: fidelity_to_pure(rho, &message.amplitudes())?,
        bloch,
        bloch_angle_error: angle_between(bloch, message.bloch()),
        bloch_magnitude: norm3(bloch),
    })
}

/// Mean and population standard deviation; `(NaN, NaN)` for no data.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
