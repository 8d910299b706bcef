//! As-late-as-possible scheduling and X-X dynamical decoupling.

use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, Gate, Instruction};
use crate::hardware::durations::DurationTable;
use crate::hardware::transpile::is_native;
use crate::{Error, Result};

/// Start and end time (ns) of every top-level instruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub total: f64,
}

/// ALAP schedule. Barriers take no time and align their qubits; a
/// conditional cannot start before the measurement it reads has finished.
pub fn schedule_alap(circuit: &Circuit, durations: &DurationTable) -> Result<Schedule> {
    circuit.ensure_valid()?;
    let ins = circuit.instructions();
    let dur: Vec<f64> = ins.iter().map(|i| durations.native(i)).collect::<Result<_>>()?;
    // Work backwards in "time before the end".
    let mut qubit_free = vec![0.0f64; circuit.num_qubits()];
    let mut clbit_free = vec![0.0f64; circuit.num_clbits()];
    let mut rev_start = vec![0.0; ins.len()];
    for i in (0..ins.len()).rev() {
        let mut t = ins[i].qubits.iter().map(|&q| qubit_free[q]).fold(0.0, f64::max);
        if let Gate::Measure(c) = ins[i].gate {
            t = t.max(clbit_free[c]);
        }
        rev_start[i] = t;
        let done = t + dur[i];
        for &q in &ins[i].qubits {
            qubit_free[q] = done;
        }
        if let Gate::Cond { clbit, .. } = ins[i].gate {
            clbit_free[clbit] = clbit_free[clbit].max(done);
        }
    }
    let total = qubit_free.iter().copied().fold(0.0, f64::max);
    let start: Vec<f64> = (0..ins.len()).map(|i| total - rev_start[i] - dur[i]).collect();
    let end = (0..ins.len()).map(|i| start[i] + dur[i]).collect();
    Ok(Schedule { start, end, total })
}

/// One idle window that received X-X pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    pub qubit: usize,
    /// Index (in the input circuit) of the instruction the pairs precede.
    pub before: usize,
    pub pairs: usize,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DdReport {
    pub insertions: Vec<Insertion>,
}

impl DdReport {
    pub fn x_gates(&self) -> usize {
        self.insertions.iter().map(|i| 2 * i.pairs).sum()
    }
}

/// Inserts one X-X pair into every eligible idle window.
pub fn insert_dd(circuit: &Circuit, durations: &DurationTable) -> Result<Circuit> {
    insert_dd_with(circuit, durations, 1).map(|(c, _)| c)
}

/// Inserts up to `repetitions` X-X pairs per idle window and reports where.
///
/// A window is the gap between two consecutive instructions on a qubit
/// (barriers included as boundaries), ignoring the time before a qubit's first
/// operation and after its last. Windows overlapping the wait between a
/// measurement and a conditional that reads it are skipped on the
/// conditional's qubits. Pairs go immediately before the instruction closing
/// the window, so the ALAP schedule of the original gates is unchanged.
pub fn insert_dd_with(circuit: &Circuit, durations: &DurationTable, repetitions: usize) -> Result<(Circuit, DdReport)> {
    if let Some(ins) = circuit.instructions().iter().find(|i| !is_native(&i.gate)) {
        return Err(Error::NotNative(ins.gate.name()));
    }
    let sched = schedule_alap(circuit, durations)?;
    let x = durations.native(&Instruction::x(0))?;
    let ins = circuit.instructions();

    // Measurement start per classical bit, for the feed-forward wait.
    let mut measure_start = vec![None; circuit.num_clbits()];
    for (i, op) in ins.iter().enumerate() {
        if let Gate::Measure(c) = op.gate {
            measure_start[c] = Some(sched.start[i]);
        }
    }
    let mut forbidden: Vec<Vec<(f64, f64)>> = vec![Vec::new(); circuit.num_qubits()];
    for (i, op) in ins.iter().enumerate() {
        if let Gate::Cond { clbit, .. } = op.gate {
            if let Some(s) = measure_start[clbit] {
                for &q in &op.qubits {
                    forbidden[q].push((s, sched.start[i]));
                }
            }
        }
    }

    let mut report = DdReport::default();
    let mut before: Vec<Vec<usize>> = vec![Vec::new(); ins.len()];
    for (q, forbidden_q) in forbidden.iter().enumerate() {
        let touching: Vec<usize> = (0..ins.len()).filter(|&i| ins[i].qubits.contains(&q)).collect();
        let first_real = touching.iter().position(|&i| !matches!(ins[i].gate, Gate::Barrier));
        let last_real = touching.iter().rposition(|&i| !matches!(ins[i].gate, Gate::Barrier));
        let (Some(first), Some(last)) = (first_real, last_real) else { continue };
        for w in touching[first..=last].windows(2) {
            let (prev, next) = (w[0], w[1]);
            let (lo, hi) = (sched.end[prev], sched.start[next]);
            let gap = hi - lo;
            if gap < 2.0 * x || x <= 0.0 {
                continue;
            }
            if forbidden_q.iter().any(|&(a, b)| lo < b && a < hi) {
                continue;
            }
            let pairs = repetitions.min((gap / (2.0 * x)) as usize);
            if pairs == 0 {
                continue;
            }
            for _ in 0..2 * pairs {
                before[next].push(q);
            }
            report.insertions.push(Insertion { qubit: q, before: next, pairs, window: (lo, hi) });
        }
    }

    let mut out = Vec::with_capacity(ins.len() + report.x_gates());
    for (i, op) in ins.iter().enumerate() {
        out.extend(before[i].iter().map(|&q| Instruction::x(q)));
        out.push(op.clone());
    }
    let result = Circuit::from_parts(circuit.num_qubits(), circuit.num_clbits(), out, circuit.roles().clone());
    Ok((result, report))
}
