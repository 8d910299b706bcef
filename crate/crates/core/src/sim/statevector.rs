//! Dense pure states. Amplitude index bit `q` is qubit `q`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::CMatrix;
use crate::sim::gates::Mat2;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// Computational basis state; `bits[q]` is qubit `q`.
    pub fn basis(bits: &[bool]) -> Self {
        let mut s = Self::zero(bits.len());
        let idx = bits.iter().enumerate().filter(|(_, b)| **b).fold(0usize, |acc, (q, _)| acc | (1 << q));
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[idx] = C64::new(1.0, 0.0);
        s
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument("amplitude count is not a power of two".into()));
        }
        let n = amps.len().trailing_zeros() as usize;
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * bit;
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let cb = 1usize << control;
        let tb = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Zeroes the amplitudes inconsistent with `q == value` without renormalizing.
    pub fn project(&mut self, q: usize, value: bool) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) != value {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    /// Density matrix of the qubits in `keep`; output bit `k` is `keep[k]`.
    pub fn reduced(&self, keep: &[usize]) -> CMatrix {
        let k = keep.len();
        let dim = 1usize << k;
        let mask: usize = keep.iter().map(|&q| 1usize << q).sum();
        let scatter = |b: usize| {
            keep.iter().enumerate().filter(|(j, _)| b >> j & 1 == 1).map(|(_, &q)| 1usize << q).sum::<usize>()
        };
        let offsets: Vec<usize> = (0..dim).map(scatter).collect();
        let mut rho = CMatrix::zeros(dim);
        for idx in 0..self.amps.len() {
            if idx & mask != 0 {
                continue;
            }
            // `idx` enumerates the traced-out configurations once each.
            let block: Vec<C64> = offsets.iter().map(|&o| self.amps[idx | o]).collect();
            if block.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                continue;
            }
            for a in 0..dim {
                if block[a].re == 0.0 && block[a].im == 0.0 {
                    continue;
                }
                for b in 0..dim {
                    let v = block[a] * block[b].conj();
                    let cur = rho.get(a, b);
                    rho.set(a, b, cur + v);
                }
            }
        }
        rho
    }

    pub fn to_density(&self) -> CMatrix {
        CMatrix::outer(&self.amps)
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}
