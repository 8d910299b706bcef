//! Dicke-state unitaries and telecloning circuit builders.
//!
//! Every builder emits only RY, X, H, RZ and CX, and every CX acts on
//! neighbours of a fixed qubit line, so the circuits embed in a linear
//! nearest-neighbour chain without routing.
//!
//! Qubit order for bitstrings such as `|1^i 0^{m-i}>` is left to right: the
//! first character is the first qubit passed to the builder.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::circuit::{Builder, Circuit, Instruction, Role};
use crate::{Error, Result, C64};

/// Angle of the RY that leaves amplitude `sqrt(a/b)` on |0>.
pub fn ry_angle(a: f64, b: f64) -> f64 {
    2.0 * (a / b).sqrt().acos()
}

/// Appends the split-and-cyclic-shift unitary on `qubits`.
///
/// Maps `|1^i 0^{m-i}>` to `sqrt((m-i)/m) |1^i 0^{m-i}> + sqrt(i/m) |1^{i-1} 0^{m-i} 1>`.
/// The excitation at position `j` hops to `j+1` through a CX-RY-CX ladder, the
/// RY being controlled on the hop having happened and on the previous site.
pub fn append_scs(b: &mut Builder, qubits: &[usize]) {
    let m = qubits.len();
    for j in 0..m.saturating_sub(1) {
        let (a, t) = (qubits[j], qubits[j + 1]);
        let hop = (((j + 1) as f64) / m as f64).sqrt();
        let partial = -2.0 * hop.asin();
        b.cx(a, t);
        if j == 0 {
            b.cry(t, a, partial);
        } else {
            // Controls (previous site, t): rotate only when t is set; a full
            // flip when the previous site was empty, a partial hop otherwise.
            b.ucry(qubits[j - 1], t, a, [[0.0, -PI], [0.0, partial]]);
        }
        b.cx(a, t);
    }
}

/// Appends the Dicke-state unitary: SCS on the whole register, then
/// recursively on the leading `m-1` qubits.
pub fn append_dsu(b: &mut Builder, qubits: &[usize]) {
    for m in (2..=qubits.len()).rev() {
        append_scs(b, &qubits[..m]);
    }
}

pub fn build_scs(m: usize) -> Result<Circuit> {
    if m < 2 {
        return Err(Error::InvalidArgument(alloc::format!("SCS needs at least 2 qubits, got {m}")));
    }
    let mut b = Builder::new(m, 0);
    append_scs(&mut b, &(0..m).collect::<Vec<_>>());
    Ok(b.finish())
}

pub fn build_dsu(m: usize) -> Result<Circuit> {
    if m < 1 {
        return Err(Error::InvalidArgument("DSU needs at least 1 qubit".into()));
    }
    let mut b = Builder::new(m, 0);
    append_dsu(&mut b, &(0..m).collect::<Vec<_>>());
    Ok(b.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Ancillas present; only the first SCS stage runs on the ancilla/port block.
    WithAncillaOptimized,
    /// Ancillas present; a full DSU on the ancilla/port block.
    WithAncillaFull,
    /// Port and clones only. Exists for two and three clones.
    NoAncilla,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::WithAncillaOptimized, Variant::WithAncillaFull, Variant::NoAncilla];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::WithAncillaOptimized => "with-ancilla-optimized",
            Variant::WithAncillaFull => "with-ancilla-full",
            Variant::NoAncilla => "no-ancilla",
        }
    }

    pub fn has_ancillas(self) -> bool {
        !matches!(self, Variant::NoAncilla)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "with-ancilla-optimized" | "optimized" => Ok(Variant::WithAncillaOptimized),
            "with-ancilla-full" | "full" => Ok(Variant::WithAncillaFull),
            "no-ancilla" => Ok(Variant::NoAncilla),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown variant {s:?}"))),
        }
    }
}

/// A validated (clone count, variant) pair plus the logical qubit layout.
///
/// With ancillas (`2M+1` qubits): 0 is the message, `1..M` the ancillas
/// (qubit 1 farthest from the port), `M` the port and `M+1..=2M` the clones,
/// clone 0 next to the port. Without ancillas (`M+2` qubits): 0 message,
/// 1 port, `2..` clones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Telecloning {
    clones: usize,
    variant: Variant,
}

impl Telecloning {
    pub fn new(clones: usize, variant: Variant) -> Result<Self> {
        if clones < 2 {
            return Err(Error::InvalidCloneCount { clones, reason: "at least two clones are required" });
        }
        if variant == Variant::NoAncilla && clones > 3 {
            return Err(Error::NoAncillaUnsupported { clones });
        }
        Ok(Self { clones, variant })
    }

    pub fn clones(&self) -> usize {
        self.clones
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn num_qubits(&self) -> usize {
        if self.variant.has_ancillas() {
            2 * self.clones + 1
        } else {
            self.clones + 2
        }
    }

    pub fn message(&self) -> usize {
        0
    }

    pub fn port(&self) -> usize {
        if self.variant.has_ancillas() {
            self.clones
        } else {
            1
        }
    }

    /// Ancilla `k` sits `k+1` steps from the port.
    pub fn ancilla(&self, k: usize) -> Option<usize> {
        (self.variant.has_ancillas() && k + 1 < self.clones).then(|| self.clones - 1 - k)
    }

    pub fn clone_qubit(&self, k: usize) -> Option<usize> {
        (k < self.clones).then(|| self.port() + 1 + k)
    }

    pub fn clone_qubits(&self) -> Vec<usize> {
        (0..self.clones).map(|k| self.port() + 1 + k).collect()
    }

    pub fn roles(&self) -> Vec<(usize, Role)> {
        let mut roles = alloc::vec![(self.message(), Role::Message), (self.port(), Role::Port)];
        for k in 0..self.clones.saturating_sub(1) {
            if let Some(q) = self.ancilla(k) {
                roles.push((q, Role::Ancilla(k)));
            }
        }
        for k in 0..self.clones {
            roles.push((self.port() + 1 + k, Role::Clone(k)));
        }
        roles.sort_unstable();
        roles
    }

    fn builder(&self, num_clbits: usize) -> Builder {
        let mut b = Builder::new(self.num_qubits(), num_clbits);
        for (q, r) in self.roles() {
            b.set_role(q, r);
        }
        b
    }

    /// Appends the telecloning-state preparation (the message qubit is untouched).
    pub fn append_state_prep(&self, b: &mut Builder) {
        let m = self.clones;
        match self.variant {
            Variant::NoAncilla => {
                let p = self.port();
                let c = self.clone_qubits();
                b.ry(p, ry_angle(2.0, 3.0)).cx(p, c[0]);
                if m == 3 {
                    b.cry(c[0], c[1], ry_angle(1.0, 2.0));
                    b.x(p).cry(p, c[0], ry_angle(3.0, 4.0)).x(p);
                }
                append_dsu(b, &c);
            }
            Variant::WithAncillaOptimized | Variant::WithAncillaFull => {
                // The line runs from the far ancilla through the port to the
                // last clone. First build sum_i |1^i 0^{M-i}>|1^i 0^{M-i}> with
                // the two registers interleaved, so every gate is local.
                let line: Vec<usize> = (1..=2 * m).collect();
                for k in 0..m {
                    let (p, q) = (line[2 * k], line[2 * k + 1]);
                    let theta = ry_angle(1.0, (m + 1 - k) as f64);
                    if k == 0 {
                        b.ry(p, theta);
                    } else {
                        b.cry(line[2 * k - 1], p, theta);
                    }
                    b.cx(p, q);
                }
                // Bubble the interleaved slots apart: slot labels are
                // (register, index) with register 0 for the ancilla/port half.
                let mut labels: Vec<(usize, usize)> = (0..2 * m).map(|j| (j % 2, j / 2)).collect();
                for pass in 0..2 * m {
                    for j in 0..2 * m - 1 - pass {
                        if labels[j] > labels[j + 1] {
                            b.swap(line[j], line[j + 1]);
                            labels.swap(j, j + 1);
                        }
                    }
                }
                let (ap, clones) = line.split_at(m);
                if self.variant == Variant::WithAncillaOptimized {
                    append_scs(b, ap);
                } else {
                    append_dsu(b, ap);
                }
                append_dsu(b, clones);
            }
        }
    }

    /// The state-preparation circuit on all protocol qubits, no classical bits.
    pub fn state_circuit(&self) -> Circuit {
        let mut b = self.builder(0);
        self.append_state_prep(&mut b);
        b.finish()
    }

    /// The full protocol: message preparation and state preparation, Bell
    /// measurement, 2M corrections, optional basis change and clone readout.
    ///
    /// Classical bit 0 holds the port outcome (drives X), bit 1 the message
    /// outcome (drives Z), bit `2+k` clone `k` when a basis is given.
    pub fn protocol_circuit(&self, message: MessageState, basis: Option<Basis>) -> Circuit {
        let num_clbits = if basis.is_some() { 2 + self.clones } else { 2 };
        let mut b = self.builder(num_clbits);
        let (qm, p) = (self.message(), self.port());
        let clones = self.clone_qubits();

        b.ry(qm, message.psi).rz(qm, message.phi);
        self.append_state_prep(&mut b);
        b.barrier_all();

        b.cx(qm, p).h(qm);
        b.barrier_all();

        b.measure(p, 0).measure(qm, 1);
        b.barrier_all();

        for &c in &clones {
            b.cond(0, true, alloc::vec![Instruction::x(c)]);
            b.cond(1, true, alloc::vec![Instruction::z(c)]);
        }

        if let Some(basis) = basis {
            b.barrier_all();
            for &c in &clones {
                match basis {
                    Basis::X => {
                        b.h(c);
                    }
                    Basis::Y => {
                        b.rz(c, -PI / 2.0).h(c);
                    }
                    Basis::Z => {}
                }
            }
            b.barrier_all();
            for (k, &c) in clones.iter().enumerate() {
                b.measure(c, 2 + k);
            }
        }
        b.finish()
    }
}

pub fn build_telecloning_state(clones: usize, variant: Variant) -> Result<Circuit> {
    Ok(Telecloning::new(clones, variant)?.state_circuit())
}

pub fn build_protocol_circuit(
    clones: usize,
    variant: Variant,
    message: MessageState,
    basis: Option<Basis>,
) -> Result<Circuit> {
    Ok(Telecloning::new(clones, variant)?.protocol_circuit(message, basis))
}

/// `cos(psi/2)|0> + e^{i phi} sin(psi/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageState {
    pub psi: f64,
    pub phi: f64,
}

impl MessageState {
    pub fn new(psi: f64, phi: f64) -> Result<Self> {
        if !psi.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("message angles must be finite".into()));
        }
        Ok(Self { psi, phi })
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        let (s, c) = (self.psi / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (sp, cp) = self.psi.sin_cos();
        [sp * self.phi.cos(), sp * self.phi.sin(), cp]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            Basis::X => "x",
            Basis::Y => "y",
            Basis::Z => "z",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Basis::X),
            "y" | "Y" => Ok(Basis::Y),
            "z" | "Z" => Ok(Basis::Z),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown basis {s:?}"))),
        }
    }
}
