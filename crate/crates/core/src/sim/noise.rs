//! Noise models and single-qubit channels.

#[allow(unused_imports)]
use num_traits::Float;

use crate::sim::density::DensityMatrix;
use crate::sim::gates::Mat2;
use crate::{Error, Result, C64};

/// Static gate-level noise.
///
/// Depolarizing noise follows every one-qubit gate except the virtual RZ, and
/// two-qubit depolarizing noise follows every CX. Readout flips the recorded
/// bit, not the collapsed state. Idle amplitude damping, when set, is a decay
/// rate per nanosecond applied over each idle gap of the simulator's clock.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    pub depolarizing_1q: f64,
    pub depolarizing_2q: f64,
    pub readout_flip: f64,
    pub amplitude_damping_idle: Option<f64>,
}

impl NoiseModel {
    pub fn depolarizing(p1: f64, p2: f64) -> Self {
        Self { depolarizing_1q: p1, depolarizing_2q: p2, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("depolarizing_1q", self.depolarizing_1q),
            ("depolarizing_2q", self.depolarizing_2q),
            ("readout_flip", self.readout_flip),
        ] {
            check_probability(name, v)?;
        }
        if let Some(rate) = self.amplitude_damping_idle {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::InvalidProbability { name: "amplitude_damping_idle", value: rate });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_1q == 0.0
            && self.depolarizing_2q == 0.0
            && self.readout_flip == 0.0
            && self.amplitude_damping_idle.is_none_or(|r| r == 0.0)
    }

    /// Damping probability over an idle gap of `ns` nanoseconds.
    pub fn idle_gamma(&self, ns: f64) -> f64 {
        match self.amplitude_damping_idle {
            Some(rate) if ns > 0.0 => 1.0 - (-rate * ns).exp(),
            _ => 0.0,
        }
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// Replace the qubit by I/2 with probability `p`.
    Depolarizing(f64),
    /// Flip |0> and |1> with probability `p`.
    BitFlip(f64),
    AmplitudeDamping(f64),
}

impl Channel {
    fn validate(&self) -> Result<()> {
        match *self {
            Channel::Depolarizing(p) => check_probability("depolarizing", p),
            Channel::BitFlip(p) => check_probability("bit_flip", p),
            Channel::AmplitudeDamping(g) => check_probability("amplitude_damping", g),
        }
    }
}

pub fn amplitude_damping_kraus(gamma: f64) -> [Mat2; 2] {
    let z = C64::new(0.0, 0.0);
    let k0 = [[C64::new(1.0, 0.0), z], [z, C64::new((1.0 - gamma).sqrt(), 0.0)]];
    let k1 = [[z, C64::new(gamma.sqrt(), 0.0)], [z, z]];
    [k0, k1]
}

/// Applies `channel` independently to each qubit in `qubits`.
pub fn apply_noise_channel(rho: &DensityMatrix, channel: Channel, qubits: &[usize]) -> Result<DensityMatrix> {
    channel.validate()?;
    let n = rho.num_qubits();
    let mut out = rho.clone();
    for &q in qubits {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, count: n });
        }
        match channel {
            Channel::Depolarizing(p) => out.depolarize_1q(q, p),
            Channel::BitFlip(p) => {
                let z = C64::new(0.0, 0.0);
                let a = C64::new((1.0 - p).sqrt(), 0.0);
                let b = C64::new(p.sqrt(), 0.0);
                out.apply_kraus_1q(q, &[[[a, z], [z, a]], [[z, b], [b, z]]]);
            }
            Channel::AmplitudeDamping(g) => out.apply_kraus_1q(q, &amplitude_damping_kraus(g)),
        }
    }
    Ok(out)
}
