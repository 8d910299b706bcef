//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a flat list of [`Instruction`]s over `num_qubits` qubits and
//! `num_clbits` classical bits. Mid-circuit measurement writes a classical bit,
//! and a conditional block runs its unitary body when one bit equals a value.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Ry(f64),
    Rz(f64),
    H,
    X,
    Z,
    Sx,
    Cx,
    Barrier,
    /// Measures the instruction's qubit into the given classical bit.
    Measure(usize),
    /// Runs `body` iff classical bit `clbit` equals `value`.
    Cond {
        clbit: usize,
        value: bool,
        body: Vec<Instruction>,
    },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Ry(_) => "ry",
            Gate::Rz(_) => "rz",
            Gate::H => "h",
            Gate::X => "x",
            Gate::Z => "z",
            Gate::Sx => "sx",
            Gate::Cx => "cx",
            Gate::Barrier => "barrier",
            Gate::Measure(_) => "measure",
            Gate::Cond { .. } => "cond",
        }
    }

    /// Expected qubit count, or `None` for variadic instructions.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Gate::Cx => Some(2),
            Gate::Barrier | Gate::Cond { .. } => None,
            _ => Some(1),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Barrier | Gate::Measure(_) | Gate::Cond { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    /// Operand qubits. For `Cx` the order is `[control, target]`; for `Cond`
    /// it is the sorted set of qubits touched by the body.
    pub qubits: Vec<usize>,
}

impl Instruction {
    pub fn new(gate: Gate, qubits: Vec<usize>) -> Self {
        Self { gate, qubits }
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self::new(Gate::Ry(angle), vec![q])
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self::new(Gate::Rz(angle), vec![q])
    }

    pub fn h(q: usize) -> Self {
        Self::new(Gate::H, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::new(Gate::X, vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::new(Gate::Z, vec![q])
    }

    pub fn sx(q: usize) -> Self {
        Self::new(Gate::Sx, vec![q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(Gate::Cx, vec![control, target])
    }

    pub fn barrier(qubits: Vec<usize>) -> Self {
        Self::new(Gate::Barrier, qubits)
    }

    pub fn measure(q: usize, clbit: usize) -> Self {
        Self::new(Gate::Measure(clbit), vec![q])
    }

    pub fn cond(clbit: usize, value: bool, body: Vec<Instruction>) -> Self {
        let mut qubits: Vec<usize> = body.iter().flat_map(|i| i.qubits.iter().copied()).collect();
        qubits.sort_unstable();
        qubits.dedup();
        Self::new(Gate::Cond { clbit, value, body }, qubits)
    }

    /// True for CX, including CX inside a conditional body.
    pub fn is_two_qubit(&self) -> bool {
        matches!(self.gate, Gate::Cx)
    }
}

/// What a qubit is used for in the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Message,
    Port,
    Ancilla(usize),
    Clone(usize),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Message => f.write_str("message"),
            Role::Port => f.write_str("port"),
            Role::Ancilla(k) => write!(f, "ancilla_{k}"),
            Role::Clone(k) => write!(f, "clone_{k}"),
        }
    }
}

impl core::str::FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(alloc::format!("unknown role {s:?}"));
        match s {
            "message" => Ok(Role::Message),
            "port" => Ok(Role::Port),
            _ => {
                if let Some(k) = s.strip_prefix("ancilla_") {
                    k.parse().map(Role::Ancilla).map_err(|_| bad())
                } else if let Some(k) = s.strip_prefix("clone_") {
                    k.parse().map(Role::Clone).map_err(|_| bad())
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// One broken invariant. `index` is the top-level instruction position.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    QubitOutOfRange { index: usize, qubit: usize },
    ClbitOutOfRange { index: usize, clbit: usize },
    SelfCoupled { index: usize },
    WrongArity { index: usize, gate: &'static str, expected: usize, found: usize },
    DuplicateOperand { index: usize, qubit: usize },
    NonFiniteAngle { index: usize },
    NonUnitaryInBody { index: usize, gate: &'static str },
    CondQubitsMismatch { index: usize },
    MultipleWrites { index: usize, clbit: usize },
    ReadBeforeWrite { index: usize, clbit: usize },
    RoleOutOfRange { qubit: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::QubitOutOfRange { index, qubit } => {
                write!(f, "instruction {index}: qubit {qubit} out of range")
            }
            Violation::ClbitOutOfRange { index, clbit } => {
                write!(f, "instruction {index}: classical bit {clbit} out of range")
            }
            Violation::SelfCoupled { index } => {
                write!(f, "instruction {index}: self-coupled two-qubit gate")
            }
            Violation::WrongArity { index, gate, expected, found } => {
                write!(f, "instruction {index}: {gate} takes {expected} qubit(s), got {found}")
            }
            Violation::DuplicateOperand { index, qubit } => {
                write!(f, "instruction {index}: qubit {qubit} listed twice")
            }
            Violation::NonFiniteAngle { index } => write!(f, "instruction {index}: non-finite angle"),
            Violation::NonUnitaryInBody { index, gate } => {
                write!(f, "instruction {index}: {gate} not allowed inside a conditional body")
            }
            Violation::CondQubitsMismatch { index } => {
                write!(f, "instruction {index}: conditional qubit list does not match its body")
            }
            Violation::MultipleWrites { index, clbit } => {
                write!(f, "instruction {index}: classical bit {clbit} written more than once")
            }
            Violation::ReadBeforeWrite { index, clbit } => {
                write!(f, "instruction {index}: read-before-write of classical bit {clbit}")
            }
            Violation::RoleOutOfRange { qubit } => write!(f, "role assigned to missing qubit {qubit}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub two_qubit_gate_count: usize,
    pub total_gate_count: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction>,
    roles: BTreeMap<usize, Role>,
}

impl Circuit {
    /// Assembles a circuit without checking it; call [`Circuit::validate`]
    /// before trusting data from outside the library.
    pub fn from_parts(
        num_qubits: usize,
        num_clbits: usize,
        instructions: Vec<Instruction>,
        roles: BTreeMap<usize, Role>,
    ) -> Self {
        Self { num_qubits, num_clbits, instructions, roles }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn roles(&self) -> &BTreeMap<usize, Role> {
        &self.roles
    }

    pub fn qubit_with_role(&self, role: Role) -> Option<usize> {
        self.roles.iter().find(|(_, r)| **r == role).map(|(q, _)| *q)
    }

    /// Clone qubits ordered by clone index.
    pub fn clone_qubits(&self) -> Vec<usize> {
        let mut clones: Vec<(usize, usize)> = self
            .roles
            .iter()
            .filter_map(|(q, r)| match r {
                Role::Clone(k) => Some((*k, *q)),
                _ => None,
            })
            .collect();
        clones.sort_unstable();
        clones.into_iter().map(|(_, q)| q).collect()
    }

    /// Number of COND blocks at the top level.
    pub fn cond_count(&self) -> usize {
        self.instructions.iter().filter(|i| matches!(i.gate, Gate::Cond { .. })).count()
    }

    /// Every invariant violation, in instruction order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut written = vec![false; self.num_clbits];
        for (index, ins) in self.instructions.iter().enumerate() {
            self.check_operands(index, ins, &mut out);
            match &ins.gate {
                Gate::Measure(clbit) => {
                    if *clbit >= self.num_clbits {
                        out.push(Violation::ClbitOutOfRange { index, clbit: *clbit });
                    } else if written[*clbit] {
                        out.push(Violation::MultipleWrites { index, clbit: *clbit });
                    } else {
                        written[*clbit] = true;
                    }
                }
                Gate::Cond { clbit, body, .. } => {
                    if *clbit >= self.num_clbits {
                        out.push(Violation::ClbitOutOfRange { index, clbit: *clbit });
                    } else if !written[*clbit] {
                        out.push(Violation::ReadBeforeWrite { index, clbit: *clbit });
                    }
                    for inner in body {
                        if !inner.gate.is_unitary() {
                            out.push(Violation::NonUnitaryInBody { index, gate: inner.gate.name() });
                        } else {
                            self.check_operands(index, inner, &mut out);
                        }
                    }
                    let expected = Instruction::cond(0, true, body.clone()).qubits;
                    if expected != ins.qubits {
                        out.push(Violation::CondQubitsMismatch { index });
                    }
                }
                _ => {}
            }
        }
        for &q in self.roles.keys() {
            if q >= self.num_qubits {
                out.push(Violation::RoleOutOfRange { qubit: q });
            }
        }
        out
    }

    fn check_operands(&self, index: usize, ins: &Instruction, out: &mut Vec<Violation>) {
        for &q in &ins.qubits {
            if q >= self.num_qubits {
                out.push(Violation::QubitOutOfRange { index, qubit: q });
            }
        }
        if let Some(expected) = ins.gate.arity() {
            if ins.qubits.len() != expected {
                out.push(Violation::WrongArity { index, gate: ins.gate.name(), expected, found: ins.qubits.len() });
            }
        }
        if matches!(ins.gate, Gate::Cx) && ins.qubits.len() == 2 && ins.qubits[0] == ins.qubits[1] {
            out.push(Violation::SelfCoupled { index });
        } else if matches!(ins.gate, Gate::Barrier) {
            for (k, q) in ins.qubits.iter().enumerate() {
                if ins.qubits[..k].contains(q) {
                    out.push(Violation::DuplicateOperand { index, qubit: *q });
                }
            }
        }
        if let Gate::Ry(a) | Gate::Rz(a) = ins.gate {
            if !a.is_finite() {
                out.push(Violation::NonFiniteAngle { index });
            }
        }
    }

    /// `Ok(())` or every violation wrapped in an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(v))
        }
    }

    /// Gate counts and depth. Barriers are ignored; a COND contributes its
    /// body gates, each ordered after the measurement it reads.
    pub fn stats(&self) -> Result<Stats> {
        self.ensure_valid()?;
        let mut s = Stats::default();
        let mut qlevel = vec![0usize; self.num_qubits];
        let mut clevel = vec![0usize; self.num_clbits];
        let place = |ins: &Instruction, floor: usize, s: &mut Stats, qlevel: &mut [usize]| -> usize {
            let level = ins.qubits.iter().map(|&q| qlevel[q]).max().unwrap_or(0).max(floor) + 1;
            for &q in &ins.qubits {
                qlevel[q] = level;
            }
            s.total_gate_count += 1;
            if ins.is_two_qubit() {
                s.two_qubit_gate_count += 1;
            }
            s.depth = s.depth.max(level);
            level
        };
        for ins in &self.instructions {
            match &ins.gate {
                Gate::Barrier => {}
                Gate::Measure(c) => {
                    clevel[*c] = place(ins, 0, &mut s, &mut qlevel);
                }
                Gate::Cond { clbit, body, .. } => {
                    for inner in body {
                        place(inner, clevel[*clbit], &mut s, &mut qlevel);
                    }
                }
                _ => {
                    place(ins, 0, &mut s, &mut qlevel);
                }
            }
        }
        Ok(s)
    }

    /// The same circuit with every barrier removed.
    pub fn without_barriers(&self) -> Circuit {
        let instructions = self.instructions.iter().filter(|i| !matches!(i.gate, Gate::Barrier)).cloned().collect();
        Circuit { instructions, ..self.clone() }
    }

    /// Applies `map` to every qubit index (instructions and roles).
    pub fn remap_qubits(&self, num_qubits: usize, map: impl Fn(usize) -> usize) -> Circuit {
        fn remap(ins: &Instruction, map: &dyn Fn(usize) -> usize) -> Instruction {
            match &ins.gate {
                Gate::Cond { clbit, value, body } => {
                    Instruction::cond(*clbit, *value, body.iter().map(|i| remap(i, map)).collect())
                }
                g => Instruction::new(g.clone(), ins.qubits.iter().map(|&q| map(q)).collect()),
            }
        }
        Circuit {
            num_qubits,
            num_clbits: self.num_clbits,
            instructions: self.instructions.iter().map(|i| remap(i, &map)).collect(),
            roles: self.roles.iter().map(|(q, r)| (map(*q), *r)).collect(),
        }
    }
}

/// Incremental circuit construction with a few composite gates.
#[derive(Debug, Clone)]
pub struct Builder {
    circuit: Circuit,
}

impl Builder {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Self { circuit: Circuit::from_parts(num_qubits, num_clbits, Vec::new(), BTreeMap::new()) }
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits
    }

    pub fn set_role(&mut self, qubit: usize, role: Role) -> &mut Self {
        self.circuit.roles.insert(qubit, role);
        self
    }

    pub fn push(&mut self, ins: Instruction) -> &mut Self {
        self.circuit.instructions.push(ins);
        self
    }

    pub fn extend(&mut self, ins: impl IntoIterator<Item = Instruction>) -> &mut Self {
        self.circuit.instructions.extend(ins);
        self
    }

    pub fn ry(&mut self, q: usize, angle: f64) -> &mut Self {
        self.push(Instruction::ry(q, angle))
    }

    pub fn rz(&mut self, q: usize, angle: f64) -> &mut Self {
        self.push(Instruction::rz(q, angle))
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::h(q))
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::x(q))
    }

    pub fn z(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::z(q))
    }

    pub fn sx(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::sx(q))
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Instruction::cx(control, target))
    }

    pub fn barrier(&mut self, qubits: Vec<usize>) -> &mut Self {
        self.push(Instruction::barrier(qubits))
    }

    /// Barrier across every qubit.
    pub fn barrier_all(&mut self) -> &mut Self {
        let all = (0..self.circuit.num_qubits).collect();
        self.barrier(all)
    }

    pub fn measure(&mut self, q: usize, clbit: usize) -> &mut Self {
        self.push(Instruction::measure(q, clbit))
    }

    pub fn cond(&mut self, clbit: usize, value: bool, body: Vec<Instruction>) -> &mut Self {
        self.push(Instruction::cond(clbit, value, body))
    }

    /// Controlled RY: `RY(theta)` on `target` iff `control` is |1>.
    pub fn cry(&mut self, control: usize, target: usize, theta: f64) -> &mut Self {
        self.ry(target, theta / 2.0).cx(control, target).ry(target, -theta / 2.0).cx(control, target)
    }

    /// RY on `target` with an angle chosen by two control bits:
    /// `theta[x][y]` where `x` is the state of `c1` and `y` of `c2`.
    pub fn ucry(&mut self, c1: usize, c2: usize, target: usize, theta: [[f64; 2]; 2]) -> &mut Self {
        let [[t00, t01], [t10, t11]] = theta;
        let a0 = (t00 + t01 + t10 + t11) / 4.0;
        let a1 = (t00 + t01 - t10 - t11) / 4.0;
        let a2 = (t00 - t01 - t10 + t11) / 4.0;
        let a3 = (t00 - t01 + t10 - t11) / 4.0;
        self.ry(target, a0)
            .cx(c1, target)
            .ry(target, a1)
            .cx(c2, target)
            .ry(target, a2)
            .cx(c1, target)
            .ry(target, a3)
            .cx(c2, target)
    }

    /// SWAP as three CX gates.
    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.cx(a, b).cx(b, a).cx(a, b)
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }
}

/// Human-readable listing, one instruction per line.
pub fn listing(circuit: &Circuit) -> String {
    use fmt::Write;
    fn line(out: &mut String, ins: &Instruction, indent: usize) {
        let pad = "  ".repeat(indent);
        match &ins.gate {
            Gate::Cond { clbit, value, body } => {
                let _ = writeln!(out, "{pad}if c{clbit} == {}:", u8::from(*value));
                for inner in body {
                    line(out, inner, indent + 1);
                }
            }
            Gate::Ry(a) | Gate::Rz(a) => {
                let _ = writeln!(out, "{pad}{}({a:.6}) {:?}", ins.gate.name(), ins.qubits);
            }
            Gate::Measure(c) => {
                let _ = writeln!(out, "{pad}measure {:?} -> c{c}", ins.qubits);
            }
            g => {
                let _ = writeln!(out, "{pad}{} {:?}", g.name(), ins.qubits);
            }
        }
    }
    let mut out = String::new();
    for ins in circuit.instructions() {
        line(&mut out, ins, 0);
    }
    out
}
