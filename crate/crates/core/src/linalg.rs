//! Small dense complex matrices.
//!
//! Hermitian spectral work goes through the real embedding
//! `A = X + iY  ->  [[X, -Y], [Y, X]]`, which is a *-homomorphism: every
//! eigenvalue of `A` appears twice in the embedding and `f(A)` embeds as
//! `f(embed(A))`. That lets a plain cyclic Jacobi solver for real symmetric
//! matrices handle every Hermitian case, degenerate spectra included.

use alloc::vec;
use alloc::vec::Vec;

// Unused when std is in the build graph (tests), whose inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data does not match dimension");
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Element-wise complex conjugate (not the adjoint).
    pub fn conj(&self) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scaled(&self, factor: f64) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn add_assign_scaled(&mut self, other: &CMatrix, factor: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = CMatrix::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + (j * m + l)] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self.data[i * n + j] - self.data[j * n + i].conj()).norm() <= tol))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order. Only the upper
    /// triangle is trusted; the matrix is symmetrized first.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let (values, _) = symmetric_eigen(self.real_embedding());
        let mut values = values;
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        // Every eigenvalue shows up twice in the embedding.
        values.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }

    /// Applies a real function to the spectrum of a Hermitian matrix.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n2 = 2 * self.dim;
        let (values, vectors) = symmetric_eigen(self.real_embedding());
        let fv: Vec<f64> = values.iter().map(|&v| f(v)).collect();
        // F = Q diag(f) Q^T, only the left half of the columns is needed.
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut re = 0.0;
                let mut im = 0.0;
                for k in 0..n2 {
                    let w = fv[k] * vectors[j * n2 + k];
                    re += vectors[i * n2 + k] * w;
                    im += vectors[(i + n) * n2 + k] * w;
                }
                out.data[i * n + j] = C64::new(re, im);
            }
        }
        out
    }

    /// Principal square root of a positive semidefinite Hermitian matrix.
    /// Eigenvalues at or below [`ZERO_EIGENVALUE`] are treated as exact zeros,
    /// since the square root would blow their round-off up to ~1e-8.
    pub fn sqrt_psd(&self) -> CMatrix {
        self.hermitian_map(|v| if v > ZERO_EIGENVALUE { v.sqrt() } else { 0.0 })
    }

    fn real_embedding(&self) -> Vec<f64> {
        let n = self.dim;
        let n2 = 2 * n;
        let mut a = vec![0.0; n2 * n2];
        for i in 0..n {
            for j in 0..n {
                // Hermitian part, so slightly asymmetric round-off cannot leak in.
                let z = 0.5 * (self.data[i * n + j] + self.data[j * n + i].conj());
                a[i * n2 + j] = z.re;
                a[(i + n) * n2 + (j + n)] = z.re;
                a[i * n2 + (j + n)] = -z.im;
                a[(i + n) * n2 + j] = z.im;
            }
        }
        a
    }
}

/// Eigenvalues of unit-trace matrices this small are indistinguishable from round-off.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

/// Cyclic Jacobi eigen-decomposition of a real symmetric `n x n` matrix
/// stored row-major. Returns `(eigenvalues, eigenvectors)` with eigenvector
/// `k` stored in column `k` of the row-major `n x n` output.
pub fn symmetric_eigen(mut a: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = (a.len() as f64).sqrt().round() as usize;
    assert_eq!(n * n, a.len(), "matrix must be square");
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    (values, v)
}
