//! 2x2 gate matrices, row-major `[[m00, m01], [m10, m11]]`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::circuit::Gate;
use crate::C64;

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];
pub const PAULIS: [Mat2; 4] = [IDENTITY, PAULI_X, PAULI_Y, PAULI_Z];

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

pub fn rz(theta: f64) -> Mat2 {
    [[C64::from_polar(1.0, -theta / 2.0), ZERO], [ZERO, C64::from_polar(1.0, theta / 2.0)]]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn sx() -> Mat2 {
    let a = C64::new(0.5, 0.5);
    let b = C64::new(0.5, -0.5);
    [[a, b], [b, a]]
}

/// Matrix of a single-qubit unitary gate, `None` for anything else.
pub fn matrix(gate: &Gate) -> Option<Mat2> {
    Some(match gate {
        Gate::Ry(t) => ry(*t),
        Gate::Rz(t) => rz(*t),
        Gate::H => hadamard(),
        Gate::X => PAULI_X,
        Gate::Z => PAULI_Z,
        Gate::Sx => sx(),
        _ => return None,
    })
}

/// `a * b`.
pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Distance between two unitaries modulo global phase, `1 - |tr(a^dag b)|/2`.
pub fn phase_distance(a: &Mat2, b: &Mat2) -> f64 {
    let mut tr = ZERO;
    for i in 0..2 {
        for k in 0..2 {
            tr += a[k][i].conj() * b[k][i];
        }
    }
    1.0 - tr.norm() / 2.0
}
