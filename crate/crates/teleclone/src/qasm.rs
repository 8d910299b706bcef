//! OpenQASM 3 export for the gate set of the circuit IR.
//!
//! Only export is supported. Conditionals become `if (c[k] == v) { ... }`.

use std::fmt::Write;

use teleclone_core::circuit::{Circuit, Gate, Instruction};

use crate::Result;

fn operands(qubits: &[usize]) -> String {
    qubits.iter().map(|q| format!("q[{q}]")).collect::<Vec<_>>().join(", ")
}

fn emit(out: &mut String, ins: &Instruction, indent: &str) {
    let q = operands(&ins.qubits);
    // Writing to a String cannot fail.
    let _ = match &ins.gate {
        Gate::Ry(a) => writeln!(out, "{indent}ry({a}) {q};"),
        Gate::Rz(a) => writeln!(out, "{indent}rz({a}) {q};"),
        Gate::Measure(c) => writeln!(out, "{indent}c[{c}] = measure {q};"),
        Gate::Cond { clbit, value, body } => {
            let _ = writeln!(out, "{indent}if (c[{clbit}] == {}) {{", u8::from(*value));
            let inner = format!("{indent}  ");
            for b in body {
                emit(out, b, &inner);
            }
            writeln!(out, "{indent}}}")
        }
        g => writeln!(out, "{indent}{} {q};", g.name()),
    };
}

/// Renders a valid circuit as OpenQASM 3. Output is deterministic; angles use
/// the shortest decimal form that round-trips.
pub fn export_qasm(circuit: &Circuit) -> Result<String> {
    circuit.ensure_valid()?;
    let mut out = String::from("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n");
    for (q, role) in circuit.roles() {
        let _ = writeln!(out, "// q[{q}]: {role}");
    }
    let _ = writeln!(out, "qubit[{}] q;", circuit.num_qubits());
    if circuit.num_clbits() > 0 {
        let _ = writeln!(out, "bit[{}] c;", circuit.num_clbits());
    }
    for ins in circuit.instructions() {
        emit(&mut out, ins, "");
    }
    Ok(out)
}
