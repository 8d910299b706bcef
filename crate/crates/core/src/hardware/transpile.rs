//! Lowering to the native gate set `{rz, sx, x, cx}` on a physical layout.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Gate, Instruction};
use crate::hardware::graph::CouplingGraph;
use crate::hardware::layout::Layout;
use crate::{Error, Result};

pub fn is_native(gate: &Gate) -> bool {
    match gate {
        Gate::Rz(_) | Gate::Sx | Gate::X | Gate::Cx | Gate::Measure(_) | Gate::Barrier => true,
        Gate::Cond { body, .. } => body.iter().all(|i| is_native(&i.gate)),
        _ => false,
    }
}

/// Native expansion of one instruction (qubits already physical). Each
/// expansion matches the original up to a global phase.
fn lower(ins: &Instruction, out: &mut Vec<Instruction>) {
    match &ins.gate {
        Gate::Ry(theta) => {
            let q = ins.qubits[0];
            out.extend([
                Instruction::sx(q),
                Instruction::rz(q, theta + PI),
                Instruction::sx(q),
                Instruction::rz(q, PI),
            ]);
        }
        Gate::H => {
            let q = ins.qubits[0];
            out.extend([Instruction::rz(q, FRAC_PI_2), Instruction::sx(q), Instruction::rz(q, FRAC_PI_2)]);
        }
        Gate::Z => out.push(Instruction::rz(ins.qubits[0], PI)),
        Gate::Cond { clbit, value, body } => {
            let mut inner = Vec::new();
            for b in body {
                lower(b, &mut inner);
            }
            out.push(Instruction::cond(*clbit, *value, inner));
        }
        _ => out.push(ins.clone()),
    }
}

/// Places a role-annotated circuit on `layout` and lowers it to native gates.
///
/// Every qubit must carry a role. Two-qubit gates must already lie on
/// coupling edges; no routing is attempted.
pub fn transpile_to_native(circuit: &Circuit, layout: &Layout, graph: &CouplingGraph) -> Result<Circuit> {
    circuit.ensure_valid()?;
    let mut map = alloc::vec![None; circuit.num_qubits()];
    for (&q, &role) in circuit.roles() {
        let p = layout
            .physical(role)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("layout has no qubit for role {role}")))?;
        if p >= graph.num_qubits() {
            return Err(Error::QubitOutOfRange { index: p, count: graph.num_qubits() });
        }
        map[q] = Some(p);
    }
    for ins in circuit.instructions() {
        for &q in &ins.qubits {
            if map[q].is_none() {
                return Err(Error::InvalidArgument(alloc::format!("qubit {q} has no role and cannot be placed")));
            }
        }
    }
    let placed = circuit.remap_qubits(graph.num_qubits(), |q| map[q].expect("checked above"));
    check_edges(&placed, graph)?;
    let mut out = Vec::new();
    for ins in placed.instructions() {
        lower(ins, &mut out);
    }
    Ok(Circuit::from_parts(placed.num_qubits(), placed.num_clbits(), out, placed.roles().clone()))
}

fn check_edges(circuit: &Circuit, graph: &CouplingGraph) -> Result<()> {
    fn walk(ins: &Instruction, graph: &CouplingGraph) -> Result<()> {
        match &ins.gate {
            Gate::Cx if !graph.has_edge(ins.qubits[0], ins.qubits[1]) => {
                Err(Error::OffEdgeInteraction(ins.qubits[0], ins.qubits[1]))
            }
            Gate::Cond { body, .. } => body.iter().try_for_each(|b| walk(b, graph)),
            _ => Ok(()),
        }
    }
    circuit.instructions().iter().try_for_each(|i| walk(i, graph))
}
