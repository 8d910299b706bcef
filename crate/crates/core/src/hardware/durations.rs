//! Gate durations in nanoseconds.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::circuit::{Gate, Instruction};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DurationTable {
    /// Keyed by gate name: `rz`, `sx`, `x`, `cx`, `measure`.
    pub gates: BTreeMap<String, f64>,
    /// Per-edge CX overrides keyed by `(min, max)` physical qubit.
    pub cx_edges: BTreeMap<(usize, usize), f64>,
    /// Classical processing time between a measurement and a conditional gate.
    pub feedforward_latency: f64,
}

impl Default for DurationTable {
    fn default() -> Self {
        let gates = [("rz", 0.0), ("sx", 35.0), ("x", 35.0), ("cx", 300.0), ("measure", 700.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self { gates, cx_edges: BTreeMap::new(), feedforward_latency: 500.0 }
    }
}

impl DurationTable {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidArgument(what));
        for (k, v) in &self.gates {
            if !(v.is_finite() && *v >= 0.0) {
                return bad(alloc::format!("duration of {k} must be a nonnegative number"));
            }
        }
        if let Some(rz) = self.gates.get("rz") {
            if *rz != 0.0 {
                return bad("rz is virtual and must have zero duration".to_string());
            }
        }
        if self.cx_edges.keys().any(|(a, b)| a >= b) {
            return bad("cx edge keys must be ordered (low, high) pairs".to_string());
        }
        if self.cx_edges.values().chain([&self.feedforward_latency]).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("durations must be nonnegative numbers".to_string());
        }
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<f64> {
        self.gates.get(name).copied().ok_or_else(|| Error::MissingDuration(name.to_string()))
    }

    /// Duration of a native instruction. A conditional costs the feed-forward
    /// latency plus its body.
    pub fn native(&self, ins: &Instruction) -> Result<f64> {
        match &ins.gate {
            Gate::Barrier => Ok(0.0),
            Gate::Cx => {
                let (a, b) = (ins.qubits[0], ins.qubits[1]);
                match self.cx_edges.get(&(a.min(b), a.max(b))) {
                    Some(d) => Ok(*d),
                    None => self.lookup("cx"),
                }
            }
            Gate::Measure(_) => self.lookup("measure"),
            Gate::Cond { body, .. } => {
                let mut total = self.feedforward_latency;
                for inner in body {
                    total += self.native(inner)?;
                }
                Ok(total)
            }
            g => self.lookup(g.name()),
        }
    }

    /// Like [`DurationTable::native`] but also prices logical gates by their
    /// native expansion: RY as two SX, H as one SX, Z as a virtual RZ.
    pub fn logical(&self, ins: &Instruction) -> Result<f64> {
        let fallback = |name: &str, sx_count: f64| -> Result<f64> {
            match self.gates.get(name) {
                Some(d) => Ok(*d),
                None if sx_count == 0.0 => self.lookup("rz"),
                None => Ok(sx_count * self.lookup("sx")?),
            }
        };
        match &ins.gate {
            Gate::Ry(_) => fallback("ry", 2.0),
            Gate::H => fallback("h", 1.0),
            Gate::Z => fallback("z", 0.0),
            Gate::Cond { body, .. } => {
                let mut total = self.feedforward_latency;
                for inner in body {
                    total += self.logical(inner)?;
                }
                Ok(total)
            }
            _ => self.native(ins),
        }
    }
}
