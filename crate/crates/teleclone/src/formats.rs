//! JSON wire formats.
//!
//! The core crate has no serde dependency, so every persisted type has a
//! mirror here with `From`/`TryFrom` conversions. Loading always validates.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use teleclone_core::circuit::{Circuit, Gate, Instruction, Role};
use teleclone_core::dicke::Basis;
use teleclone_core::hardware::{CouplingGraph, DurationTable};
use teleclone_core::linalg::CMatrix;
use teleclone_core::sim::{Counts, NoiseModel};
use teleclone_core::tomography::{BasisCounts, TomographyRecord};
use teleclone_core::C64;

use crate::{Error, Result};

/// Serde adapter for types that round-trip through `Display`/`FromStr`.
pub mod as_str {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub instructions: Vec<InstructionJson>,
    /// Qubit index to role name (`message`, `port`, `ancilla_k`, `clone_k`).
    #[serde(default)]
    pub roles: BTreeMap<usize, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstructionJson {
    pub gate: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond: Option<CondJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondJson {
    pub clbit: usize,
    /// 0 or 1.
    pub value: u8,
    pub body: Vec<InstructionJson>,
}

impl From<&Instruction> for InstructionJson {
    fn from(ins: &Instruction) -> Self {
        let mut out = InstructionJson {
            gate: ins.gate.name().to_string(),
            qubits: ins.qubits.clone(),
            angle: None,
            clbit: None,
            cond: None,
        };
        match &ins.gate {
            Gate::Ry(a) | Gate::Rz(a) => out.angle = Some(*a),
            Gate::Measure(c) => out.clbit = Some(*c),
            Gate::Cond { clbit, value, body } => {
                out.cond = Some(CondJson {
                    clbit: *clbit,
                    value: u8::from(*value),
                    body: body.iter().map(InstructionJson::from).collect(),
                })
            }
            _ => {}
        }
        out
    }
}

impl TryFrom<&InstructionJson> for Instruction {
    type Error = Error;

    fn try_from(j: &InstructionJson) -> Result<Self> {
        let bad = |what: &str| Error::Format(format!("instruction `{}`: {what}", j.gate));
        let angle = || j.angle.ok_or_else(|| bad("missing angle"));
        let expect_none = |has_angle: bool, has_clbit: bool, has_cond: bool| {
            if (j.angle.is_some() && !has_angle) || (j.clbit.is_some() && !has_clbit) || (j.cond.is_some() && !has_cond)
            {
                Err(bad("unexpected field"))
            } else {
                Ok(())
            }
        };
        let gate = match j.gate.as_str() {
            "ry" | "rz" => {
                expect_none(true, false, false)?;
                if j.gate == "ry" {
                    Gate::Ry(angle()?)
                } else {
                    Gate::Rz(angle()?)
                }
            }
            "measure" => {
                expect_none(false, true, false)?;
                Gate::Measure(j.clbit.ok_or_else(|| bad("missing clbit"))?)
            }
            "cond" => {
                expect_none(false, false, true)?;
                let c = j.cond.as_ref().ok_or_else(|| bad("missing cond"))?;
                let value = match c.value {
                    0 => false,
                    1 => true,
                    v => return Err(bad(&format!("condition value {v} is not a bit"))),
                };
                let body = c.body.iter().map(Instruction::try_from).collect::<Result<Vec<_>>>()?;
                let ins = Instruction::cond(c.clbit, value, body);
                if ins.qubits != j.qubits {
                    return Err(bad("qubits must list the body's qubits in ascending order"));
                }
                return Ok(ins);
            }
            name => {
                expect_none(false, false, false)?;
                match name {
                    "h" => Gate::H,
                    "x" => Gate::X,
                    "z" => Gate::Z,
                    "sx" => Gate::Sx,
                    "cx" => Gate::Cx,
                    "barrier" => Gate::Barrier,
                    _ => return Err(bad("unknown gate")),
                }
            }
        };
        Ok(Instruction::new(gate, j.qubits.clone()))
    }
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        CircuitJson {
            num_qubits: c.num_qubits(),
            num_clbits: c.num_clbits(),
            instructions: c.instructions().iter().map(InstructionJson::from).collect(),
            roles: c.roles().iter().map(|(q, r)| (*q, r.to_string())).collect(),
        }
    }
}

impl TryFrom<&CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(j: &CircuitJson) -> Result<Self> {
        let instructions = j.instructions.iter().map(Instruction::try_from).collect::<Result<Vec<_>>>()?;
        let roles = j.roles.iter().map(|(q, r)| Ok((*q, r.parse::<Role>()?))).collect::<Result<BTreeMap<_, _>>>()?;
        let circuit = Circuit::from_parts(j.num_qubits, j.num_clbits, instructions, roles);
        circuit.ensure_valid()?;
        Ok(circuit)
    }
}

pub fn circuit_to_json(c: &Circuit) -> Result<String> {
    c.ensure_valid()?;
    Ok(serde_json::to_string_pretty(&CircuitJson::from(c))?)
}

pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    Circuit::try_from(&serde_json::from_str::<CircuitJson>(text)?)
}

/// Counts as `{"bitstring": count}`, classical bit 0 leftmost.
pub fn counts_to_json(counts: &Counts) -> Result<String> {
    Ok(serde_json::to_string_pretty(counts)?)
}

pub fn counts_from_json(text: &str) -> Result<Counts> {
    let counts: Counts = serde_json::from_str(text)?;
    let mut width = None;
    for key in counts.keys() {
        if !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Format(format!("bitstring {key:?} has characters other than 0 and 1")));
        }
        if *width.get_or_insert(key.len()) != key.len() {
            return Err(Error::Format("bitstrings have different lengths".into()));
        }
    }
    Ok(counts)
}

/// `[[re, im], ...]` rows.
pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim()).map(|r| (0..m.dim()).map(|c| [m.get(r, c).re, m.get(r, c).im]).collect()).collect()
}

pub fn matrix_from_json(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Format("matrix must be square".into()));
    }
    let data = rows.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect();
    Ok(CMatrix::from_row_major(n, data))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyRecordJson {
    pub clone_index: usize,
    pub shots_per_basis: u64,
    /// Basis label to `[n0, n1]`.
    pub counts: BTreeMap<String, [u64; 2]>,
    /// Row-major 2x2 matrix of `[re, im]` pairs.
    pub reconstructed: Vec<Vec<[f64; 2]>>,
}

impl From<&TomographyRecord> for TomographyRecordJson {
    fn from(r: &TomographyRecord) -> Self {
        TomographyRecordJson {
            clone_index: r.clone_index,
            shots_per_basis: r.shots_per_basis,
            counts: Basis::ALL.iter().map(|b| (b.to_string(), r.counts.get(*b))).collect(),
            reconstructed: matrix_to_json(&r.reconstructed),
        }
    }
}

impl TryFrom<&TomographyRecordJson> for TomographyRecord {
    type Error = Error;

    fn try_from(j: &TomographyRecordJson) -> Result<Self> {
        let mut counts = BasisCounts::default();
        for (label, c) in &j.counts {
            *counts.get_mut(label.parse()?) = *c;
        }
        if j.counts.len() != 3 {
            return Err(Error::Format("tomography counts need exactly the bases x, y and z".into()));
        }
        let reconstructed = matrix_from_json(&j.reconstructed)?;
        if reconstructed.dim() != 2 {
            return Err(Error::Format("reconstructed state must be 2x2".into()));
        }
        Ok(TomographyRecord { clone_index: j.clone_index, shots_per_basis: j.shots_per_basis, counts, reconstructed })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CxEdgeJson {
    pub qubits: [usize; 2],
    pub duration: f64,
}

/// Durations in nanoseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationTableJson {
    pub gates: BTreeMap<String, f64>,
    #[serde(default)]
    pub cx_edges: Vec<CxEdgeJson>,
    pub feedforward_latency: f64,
}

impl From<&DurationTable> for DurationTableJson {
    fn from(d: &DurationTable) -> Self {
        DurationTableJson {
            gates: d.gates.clone(),
            cx_edges: d.cx_edges.iter().map(|(&(a, b), &duration)| CxEdgeJson { qubits: [a, b], duration }).collect(),
            feedforward_latency: d.feedforward_latency,
        }
    }
}

impl TryFrom<&DurationTableJson> for DurationTable {
    type Error = Error;

    fn try_from(j: &DurationTableJson) -> Result<Self> {
        let mut cx_edges = BTreeMap::new();
        for e in &j.cx_edges {
            let [a, b] = e.qubits;
            if a == b {
                return Err(Error::Format(format!("cx edge ({a}, {b}) is a self loop")));
            }
            cx_edges.insert((a.min(b), a.max(b)), e.duration);
        }
        let table = DurationTable { gates: j.gates.clone(), cx_edges, feedforward_latency: j.feedforward_latency };
        table.validate()?;
        Ok(table)
    }
}

pub fn durations_from_json(text: &str) -> Result<DurationTable> {
    DurationTable::try_from(&serde_json::from_str::<DurationTableJson>(text)?)
}

pub fn durations_to_json(d: &DurationTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(&DurationTableJson::from(d))?)
}

/// Versioned coupling-graph data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingGraphJson {
    pub version: u32,
    pub name: String,
    pub num_qubits: usize,
    pub edges: Vec<[usize; 2]>,
}

pub const COUPLING_GRAPH_VERSION: u32 = 1;

/// The bundled heavy-hex data file.
pub const HEAVY_HEX_27_JSON: &str = include_str!("../data/heavy_hex_27.v1.json");

impl TryFrom<&CouplingGraphJson> for CouplingGraph {
    type Error = Error;

    fn try_from(j: &CouplingGraphJson) -> Result<Self> {
        if j.version != COUPLING_GRAPH_VERSION {
            return Err(Error::Format(format!("unsupported coupling graph version {}", j.version)));
        }
        Ok(CouplingGraph::new(j.num_qubits, j.edges.iter().map(|[a, b]| (*a, *b)).collect())?)
    }
}

pub fn coupling_graph_to_json(name: &str, g: &CouplingGraph) -> Result<String> {
    let j = CouplingGraphJson {
        version: COUPLING_GRAPH_VERSION,
        name: name.to_string(),
        num_qubits: g.num_qubits(),
        edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
    };
    Ok(serde_json::to_string_pretty(&j)?)
}

pub fn coupling_graph_from_json(text: &str) -> Result<CouplingGraph> {
    CouplingGraph::try_from(&serde_json::from_str::<CouplingGraphJson>(text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModelJson {
    pub depolarizing_1q: f64,
    pub depolarizing_2q: f64,
    pub readout_flip: f64,
    /// Decay rate per nanosecond of idle time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_damping_idle: Option<f64>,
}

impl From<NoiseModelJson> for NoiseModel {
    fn from(j: NoiseModelJson) -> Self {
        NoiseModel {
            depolarizing_1q: j.depolarizing_1q,
            depolarizing_2q: j.depolarizing_2q,
            readout_flip: j.readout_flip,
            amplitude_damping_idle: j.amplitude_damping_idle,
        }
    }
}

impl From<NoiseModel> for NoiseModelJson {
    fn from(n: NoiseModel) -> Self {
        NoiseModelJson {
            depolarizing_1q: n.depolarizing_1q,
            depolarizing_2q: n.depolarizing_2q,
            readout_flip: n.readout_flip,
            amplitude_damping_idle: n.amplitude_damping_idle,
        }
    }
}
