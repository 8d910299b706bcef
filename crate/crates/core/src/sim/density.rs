//! Dense density matrices. Row/column index bit `q` is qubit `q`.

use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::sim::gates::{Mat2, PAULIS};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    rho: CMatrix,
}

/// Applies `m` to one bit of a flat vector viewed as a tensor of qubits.
fn apply_on_bit(data: &mut [C64], bit: usize, m: &Mat2) {
    let stride = 1usize << bit;
    let mut base = 0;
    while base < data.len() {
        for i in base..base + stride {
            let a0 = data[i];
            let a1 = data[i | stride];
            data[i] = m[0][0] * a0 + m[0][1] * a1;
            data[i | stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

fn conj_mat(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn zero(n: usize) -> Self {
        let mut rho = CMatrix::zeros(1 << n);
        rho.set(0, 0, C64::new(1.0, 0.0));
        Self { n, rho }
    }

    /// Checks the matrix is Hermitian, unit trace and PSD (within 1e-10, 1e-10, 1e-9).
    pub fn new(rho: CMatrix) -> Result<Self> {
        let dim = rho.dim();
        if !dim.is_power_of_two() || dim == 0 {
            return Err(Error::InvalidArgument("density matrix dimension must be a power of two".into()));
        }
        if !rho.is_hermitian(1e-10) {
            return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidArgument(alloc::format!("density matrix trace {} != 1", tr.re)));
        }
        let min = rho.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { n: dim.trailing_zeros() as usize, rho })
    }

    /// Wraps without checks; the caller vouches for the invariants.
    pub fn from_matrix_unchecked(rho: CMatrix) -> Self {
        Self { n: rho.dim().trailing_zeros() as usize, rho }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let n = self.n;
        let data = self.rho.data_mut();
        apply_on_bit(data, n + q, m);
        apply_on_bit(data, q, &conj_mat(m));
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let n = self.n;
        let data = self.rho.data_mut();
        for (c, t) in [(n + control, n + target), (control, target)] {
            let (cb, tb) = (1usize << c, 1usize << t);
            for i in 0..data.len() {
                if i & cb != 0 && i & tb == 0 {
                    data.swap(i, i | tb);
                }
            }
        }
    }

    /// `sum_k K rho K^dag` on qubit `q`.
    pub fn apply_kraus_1q(&mut self, q: usize, kraus: &[Mat2]) {
        let mut acc = CMatrix::zeros(self.rho.dim());
        for k in kraus {
            let mut branch = self.clone();
            branch.apply_1q(q, k);
            acc.add_assign_scaled(&branch.rho, 1.0);
        }
        self.rho = acc;
    }

    /// With probability `p` replace qubit `q` by I/2.
    pub fn depolarize_1q(&mut self, q: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let mut acc = self.rho.scaled(1.0 - p);
        for pauli in &PAULIS {
            let mut branch = self.clone();
            branch.apply_1q(q, pauli);
            acc.add_assign_scaled(&branch.rho, p / 4.0);
        }
        self.rho = acc;
    }

    /// With probability `p` replace the pair `(a, b)` by I/4.
    pub fn depolarize_2q(&mut self, a: usize, b: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let mut acc = self.rho.scaled(1.0 - p);
        for pa in &PAULIS {
            for pb in &PAULIS {
                let mut branch = self.clone();
                branch.apply_1q(a, pa);
                branch.apply_1q(b, pb);
                acc.add_assign_scaled(&branch.rho, p / 16.0);
            }
        }
        self.rho = acc;
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        (0..self.rho.dim()).filter(|i| i & bit != 0).map(|i| self.rho.get(i, i).re).sum()
    }

    /// Projects qubit `q` onto `value` without renormalizing.
    pub fn project(&mut self, q: usize, value: bool) {
        let bit = 1usize << q;
        let dim = self.rho.dim();
        let data = self.rho.data_mut();
        for r in 0..dim {
            for c in 0..dim {
                if (r & bit != 0) != value || (c & bit != 0) != value {
                    data[r * dim + c] = C64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.rho = self.rho.scaled(factor);
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(partial_trace(&self.rho, keep)?))
    }
}

/// Partial trace of a `2^n x 2^n` matrix onto the qubits in `keep`; output
/// bit `k` is `keep[k]`.
pub fn partial_trace(rho: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let n = rho.dim().trailing_zeros() as usize;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace needs at least one kept qubit".into()));
    }
    for (k, &q) in keep.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, count: n });
        }
        if keep[..k].contains(&q) {
            return Err(Error::InvalidArgument(alloc::format!("qubit {q} kept twice")));
        }
    }
    let dim = 1usize << keep.len();
    let mask: usize = keep.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|b| keep.iter().enumerate().filter(|(j, _)| b >> j & 1 == 1).map(|(_, &q)| 1usize << q).sum())
        .collect();
    let mut out = CMatrix::zeros(dim);
    for rest in (0..rho.dim()).filter(|r| r & mask == 0) {
        for a in 0..dim {
            for b in 0..dim {
                let v = rho.get(rest | offsets[a], rest | offsets[b]);
                out.set(a, b, out.get(a, b) + v);
            }
        }
    }
    Ok(out)
}
