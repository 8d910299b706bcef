//! Circuit execution.
//!
//! A circuit is first lowered to a [`Program`] over the qubits it actually
//! touches, with noise operations interleaved. Noiseless programs run on
//! state vectors, noisy exact runs on density matrices, and noisy shots as
//! stochastic trajectories. Mid-circuit measurement is handled by enumerating
//! both outcomes (exact modes) or sampling one (trajectories).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::circuit::{Circuit, Gate, Instruction, Role};
use crate::hardware::DurationTable;
use crate::linalg::CMatrix;
use crate::sim::density::DensityMatrix;
use crate::sim::gates::{self, Mat2, PAULIS};
use crate::sim::noise::{amplitude_damping_kraus, NoiseModel};
use crate::sim::statevector::StateVector;
use crate::{Error, Result};

/// Bitstring (classical bit 0 first) to occurrence count.
pub type Counts = BTreeMap<String, u64>;

/// Branches with probability below this are dropped during enumeration.
const BRANCH_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct Simulator {
    /// Largest state vector, in qubits.
    pub max_qubits: usize,
    /// Largest density matrix, in qubits.
    pub max_density_qubits: usize,
    /// Most measurement branches enumerated before shot sampling falls back
    /// to per-shot trajectories.
    pub max_branches: usize,
    /// Clock model for idle amplitude damping.
    pub durations: DurationTable,
}

impl Default for Simulator {
    fn default() -> Self {
        Self { max_qubits: 24, max_density_qubits: 11, max_branches: 1 << 12, durations: DurationTable::default() }
    }
}

#[derive(Debug, Clone)]
enum Op {
    U1 { q: usize, m: Mat2 },
    Cx { c: usize, t: usize },
    Measure { q: usize, clbit: usize, flip: f64 },
    Cond { clbit: usize, value: bool, body: Vec<Op> },
    Depolarize1 { q: usize, p: f64 },
    Depolarize2 { a: usize, b: usize, p: f64 },
    Damp { q: usize, gamma: f64 },
}

/// A circuit lowered onto its active qubits.
#[derive(Debug, Clone)]
pub struct Program {
    num_qubits: usize,
    num_clbits: usize,
    ops: Vec<Op>,
    /// Circuit qubit to compact index.
    map: Vec<Option<usize>>,
    noisy: bool,
}

impl Program {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn compact(&self, q: usize) -> Result<usize> {
        self.map.get(q).copied().flatten().ok_or(Error::QubitOutOfRange { index: q, count: self.map.len() })
    }

    /// Index of the first op of the trailing run of measurements.
    fn terminal_start(&self) -> usize {
        let mut i = self.ops.len();
        while i > 0 && matches!(self.ops[i - 1], Op::Measure { flip, .. } if flip == 0.0) {
            i -= 1;
        }
        i
    }
}

fn touched(ins: &Instruction, out: &mut [bool]) {
    if let Gate::Barrier = ins.gate {
        return;
    }
    for &q in &ins.qubits {
        out[q] = true;
    }
}

impl Simulator {
    /// Lowers `circuit`, keeping `extra` qubits active even if untouched.
    pub fn compile(&self, circuit: &Circuit, noise: Option<&NoiseModel>, extra: &[usize]) -> Result<Program> {
        circuit.ensure_valid()?;
        if circuit.num_clbits() > 64 {
            return Err(Error::InvalidArgument("at most 64 classical bits are supported".into()));
        }
        let noise = match noise {
            Some(n) => {
                n.validate()?;
                (!n.is_noiseless()).then_some(*n)
            }
            None => None,
        };
        let nq = circuit.num_qubits();
        let mut active = vec![false; nq];
        for ins in circuit.instructions() {
            touched(ins, &mut active);
        }
        for &q in extra {
            if q >= nq {
                return Err(Error::QubitOutOfRange { index: q, count: nq });
            }
            active[q] = true;
        }
        let mut map = vec![None; nq];
        let mut n = 0;
        for q in 0..nq {
            if active[q] {
                map[q] = Some(n);
                n += 1;
            }
        }
        if n > self.max_qubits {
            return Err(Error::TooManyQubits { required: n, cap: self.max_qubits });
        }

        let mut lower = Lowering {
            map: &map,
            noise: noise.as_ref(),
            durations: &self.durations,
            clock: vec![0.0; nq],
            clbit_ready: vec![0.0; circuit.num_clbits()],
        };
        let mut ops = Vec::new();
        for ins in circuit.instructions() {
            lower.top_level(ins, &mut ops)?;
        }
        Ok(Program { num_qubits: n, num_clbits: circuit.num_clbits(), ops, map, noisy: noise.is_some() })
    }

    /// Final state of a measurement-free circuit. Qubits are not compacted.
    pub fn final_state(&self, circuit: &Circuit, initial: Option<StateVector>) -> Result<StateVector> {
        circuit.ensure_valid()?;
        let n = circuit.num_qubits();
        if n > self.max_qubits {
            return Err(Error::TooManyQubits { required: n, cap: self.max_qubits });
        }
        let mut state = match initial {
            Some(s) if s.num_qubits() != n => {
                return Err(Error::DimensionMismatch { left: s.num_qubits(), right: n });
            }
            Some(s) => s,
            None => StateVector::zero(n),
        };
        for ins in circuit.instructions() {
            match &ins.gate {
                Gate::Barrier => {}
                Gate::Cx => state.apply_cx(ins.qubits[0], ins.qubits[1]),
                Gate::Measure(_) | Gate::Cond { .. } => {
                    return Err(Error::InvalidArgument("final_state needs a measurement-free circuit".into()));
                }
                g => state.apply_1q(ins.qubits[0], &gates::matrix(g).expect("unitary gate")),
            }
        }
        Ok(state)
    }

    /// Full unitary of a measurement-free circuit; column `j` is the image of
    /// basis state `j`.
    pub fn unitary(&self, circuit: &Circuit) -> Result<CMatrix> {
        let n = circuit.num_qubits();
        if n > 12 {
            return Err(Error::TooManyQubits { required: n, cap: 12 });
        }
        let dim = 1usize << n;
        let mut u = CMatrix::zeros(dim);
        for j in 0..dim {
            let bits: Vec<bool> = (0..n).map(|q| j >> q & 1 == 1).collect();
            let out = self.final_state(circuit, Some(StateVector::basis(&bits)))?;
            for (i, a) in out.amplitudes().iter().enumerate() {
                u.set(i, j, *a);
            }
        }
        Ok(u)
    }

    /// Exact outcome distribution keyed by the classical register (bit `k` of
    /// the key is classical bit `k`).
    pub fn exact_distribution(&self, circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<BTreeMap<u64, f64>> {
        let program = self.compile(circuit, noise, &[])?;
        let mut dist = BTreeMap::new();
        if program.noisy {
            self.check_density(&program)?;
            let mut budget = self.max_branches;
            dfs_density(
                &program.ops,
                DensityMatrix::zero(program.num_qubits),
                1.0,
                0,
                &mut budget,
                &mut |w, bits, _| {
                    *dist.entry(bits).or_insert(0.0) += w;
                },
            )?;
        } else {
            for leaf in self.pure_leaves(&program, true)? {
                for (bits, p) in leaf.outcomes.iter().zip(&leaf.probs) {
                    *dist.entry(leaf.clbits | bits).or_insert(0.0) += leaf.weight * p;
                }
            }
        }
        Ok(dist)
    }

    /// Branch-averaged reduced density matrices, one per qubit group. Groups
    /// use circuit qubit indices.
    pub fn exact_reduced_states(
        &self,
        circuit: &Circuit,
        groups: &[Vec<usize>],
        noise: Option<&NoiseModel>,
    ) -> Result<Vec<CMatrix>> {
        let extra: Vec<usize> = groups.iter().flatten().copied().collect();
        let program = self.compile(circuit, noise, &extra)?;
        let compact: Vec<Vec<usize>> = groups
            .iter()
            .map(|g| g.iter().map(|&q| program.compact(q)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut acc: Vec<CMatrix> = compact.iter().map(|g| CMatrix::zeros(1 << g.len())).collect();
        let mut budget = self.max_branches;
        if program.noisy {
            self.check_density(&program)?;
            let mut failure = None;
            dfs_density(
                &program.ops,
                DensityMatrix::zero(program.num_qubits),
                1.0,
                0,
                &mut budget,
                &mut |w, _, rho| {
                    for (a, g) in acc.iter_mut().zip(&compact) {
                        match rho.partial_trace(g) {
                            Ok(r) => a.add_assign_scaled(r.matrix(), w),
                            Err(e) => failure = Some(e),
                        }
                    }
                },
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
        } else {
            dfs_pure(&program.ops, StateVector::zero(program.num_qubits), 1.0, 0, &mut budget, &mut |w, _, s| {
                for (a, g) in acc.iter_mut().zip(&compact) {
                    a.add_assign_scaled(&s.reduced(g), w);
                }
            })?;
        }
        Ok(acc)
    }

    /// Noiseless single-qubit clone states of a protocol circuit, by clone index.
    pub fn exact_clone_states(&self, circuit: &Circuit) -> Result<Vec<CMatrix>> {
        self.exact_clone_states_with_noise(circuit, None)
    }

    /// Clone states with exact (density-matrix) noise.
    pub fn exact_clone_states_with_noise(&self, circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<Vec<CMatrix>> {
        check_bell_structure(circuit)?;
        let groups: Vec<Vec<usize>> = circuit.clone_qubits().into_iter().map(|q| vec![q]).collect();
        self.exact_reduced_states(circuit, &groups, noise)
    }

    /// Prepares a reusable shot sampler.
    pub fn sampler(&self, circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<Sampler> {
        let program = self.compile(circuit, noise, &[])?;
        let kind = if program.noisy {
            SamplerKind::Trajectory
        } else {
            match self.pure_leaves(&program, true) {
                Ok(leaves) => {
                    let mut cumulative = Vec::with_capacity(leaves.len());
                    let mut total = 0.0;
                    for leaf in &leaves {
                        total += leaf.weight;
                        cumulative.push(total);
                    }
                    SamplerKind::Leaves { cumulative, leaves }
                }
                Err(Error::InvalidArgument(_)) => SamplerKind::Trajectory,
                Err(e) => return Err(e),
            }
        };
        Ok(Sampler { program, kind })
    }

    /// Runs `shots` shots. Shot `i` draws from its own stream of `seed`, so
    /// the result does not depend on batching.
    pub fn run_shots(&self, circuit: &Circuit, shots: u64, seed: u64, noise: Option<&NoiseModel>) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        Ok(self.sampler(circuit, noise)?.counts(0..shots, seed))
    }

    fn check_density(&self, program: &Program) -> Result<()> {
        if program.num_qubits > self.max_density_qubits {
            return Err(Error::TooManyQubits { required: program.num_qubits, cap: self.max_density_qubits });
        }
        Ok(())
    }

    /// Enumerates noiseless branches. With `split_terminal`, the trailing
    /// measurements are folded into a per-leaf outcome distribution instead
    /// of being branched on.
    fn pure_leaves(&self, program: &Program, split_terminal: bool) -> Result<Vec<Leaf>> {
        let end = if split_terminal { program.terminal_start() } else { program.ops.len() };
        let terminal: Vec<(usize, usize)> = program.ops[end..]
            .iter()
            .map(|op| match op {
                Op::Measure { q, clbit, .. } => (*q, *clbit),
                _ => unreachable!("terminal run holds only measurements"),
            })
            .collect();
        let mut leaves = Vec::new();
        let mut budget = self.max_branches;
        dfs_pure(
            &program.ops[..end],
            StateVector::zero(program.num_qubits),
            1.0,
            0,
            &mut budget,
            &mut |w, bits, s| {
                let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
                if terminal.is_empty() {
                    dist.insert(0, 1.0);
                } else {
                    for (idx, a) in s.amplitudes().iter().enumerate() {
                        let p = a.norm_sqr();
                        if p == 0.0 {
                            continue;
                        }
                        let key = terminal.iter().filter(|(q, _)| idx >> q & 1 == 1).fold(0u64, |k, (_, c)| k | 1 << c);
                        *dist.entry(key).or_insert(0.0) += p;
                    }
                }
                let (outcomes, probs): (Vec<u64>, Vec<f64>) = dist.into_iter().unzip();
                let cdf = probs
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect();
                leaves.push(Leaf { weight: w, clbits: bits, outcomes, probs, cdf });
            },
        )?;
        Ok(leaves)
    }
}

struct Lowering<'a> {
    map: &'a [Option<usize>],
    noise: Option<&'a NoiseModel>,
    durations: &'a DurationTable,
    /// Time each circuit qubit becomes free.
    clock: Vec<f64>,
    clbit_ready: Vec<f64>,
}

impl Lowering<'_> {
    fn idle_damping(&self) -> bool {
        self.noise.is_some_and(|n| n.amplitude_damping_idle.is_some_and(|r| r > 0.0))
    }

    fn top_level(&mut self, ins: &Instruction, ops: &mut Vec<Op>) -> Result<()> {
        if self.idle_damping() {
            if let Gate::Barrier = ins.gate {
                let t = ins.qubits.iter().map(|&q| self.clock[q]).fold(0.0, f64::max);
                for &q in &ins.qubits {
                    self.clock[q] = t;
                }
                return Ok(());
            }
            let noise = self.noise.expect("checked");
            let mut start = ins.qubits.iter().map(|&q| self.clock[q]).fold(0.0, f64::max);
            if let Gate::Cond { clbit, .. } = ins.gate {
                start = start.max(self.clbit_ready[clbit]);
            }
            for &q in &ins.qubits {
                let gamma = noise.idle_gamma(start - self.clock[q]);
                if gamma > 0.0 {
                    ops.push(Op::Damp { q: self.map[q].expect("active"), gamma });
                }
            }
            let end = start + self.durations.logical(ins)?;
            for &q in &ins.qubits {
                self.clock[q] = end;
            }
            if let Gate::Measure(c) = ins.gate {
                self.clbit_ready[c] = end;
            }
        }
        self.lower(ins, ops);
        Ok(())
    }

    fn lower(&self, ins: &Instruction, ops: &mut Vec<Op>) {
        let q = |i: usize| self.map[ins.qubits[i]].expect("active qubit");
        match &ins.gate {
            Gate::Barrier => {}
            Gate::Cx => {
                let (c, t) = (q(0), q(1));
                ops.push(Op::Cx { c, t });
                if let Some(n) = self.noise.filter(|n| n.depolarizing_2q > 0.0) {
                    ops.push(Op::Depolarize2 { a: c, b: t, p: n.depolarizing_2q });
                }
            }
            Gate::Measure(clbit) => {
                let flip = self.noise.map_or(0.0, |n| n.readout_flip);
                ops.push(Op::Measure { q: q(0), clbit: *clbit, flip });
            }
            Gate::Cond { clbit, value, body } => {
                let mut inner = Vec::new();
                for b in body {
                    self.lower(b, &mut inner);
                }
                ops.push(Op::Cond { clbit: *clbit, value: *value, body: inner });
            }
            g => {
                let target = q(0);
                ops.push(Op::U1 { q: target, m: gates::matrix(g).expect("unitary gate") });
                if !matches!(g, Gate::Rz(_)) {
                    if let Some(n) = self.noise.filter(|n| n.depolarizing_1q > 0.0) {
                        ops.push(Op::Depolarize1 { q: target, p: n.depolarizing_1q });
                    }
                }
            }
        }
    }
}

fn check_bell_structure(circuit: &Circuit) -> Result<()> {
    let measured = |role: Role| {
        circuit.qubit_with_role(role).is_some_and(|q| {
            circuit.instructions().iter().any(|i| matches!(i.gate, Gate::Measure(_)) && i.qubits[0] == q)
        })
    };
    if !measured(Role::Port) {
        return Err(Error::MissingBellMeasurement("no measurement of the port qubit"));
    }
    if !measured(Role::Message) {
        return Err(Error::MissingBellMeasurement("no measurement of the message qubit"));
    }
    if circuit.clone_qubits().is_empty() {
        return Err(Error::MissingBellMeasurement("no clone qubits in the role map"));
    }
    Ok(())
}

fn spend(budget: &mut usize) -> Result<()> {
    if *budget == 0 {
        return Err(Error::InvalidArgument("measurement branch limit exceeded".into()));
    }
    *budget -= 1;
    Ok(())
}

/// Depth-first walk over noiseless measurement branches. `visit` receives
/// (branch probability, classical register, normalized final state).
fn dfs_pure(
    ops: &[Op],
    mut state: StateVector,
    weight: f64,
    clbits: u64,
    budget: &mut usize,
    visit: &mut dyn FnMut(f64, u64, &StateVector),
) -> Result<()> {
    for (i, op) in ops.iter().enumerate() {
        match op {
            Op::Measure { q, clbit, .. } => {
                let p1 = state.prob_one(*q).clamp(0.0, 1.0);
                let mut outcomes = [(false, 1.0 - p1), (true, p1)];
                outcomes.iter_mut().for_each(|(_, p)| {
                    if *p < BRANCH_CUTOFF {
                        *p = 0.0
                    }
                });
                let live: Vec<(bool, f64)> = outcomes.into_iter().filter(|(_, p)| *p > 0.0).collect();
                for (k, &(bit, p)) in live.iter().enumerate() {
                    let mut branch = if k + 1 == live.len() {
                        core::mem::replace(&mut state, StateVector::zero(0))
                    } else {
                        state.clone()
                    };
                    branch.project(*q, bit);
                    branch.normalize();
                    let bits = if bit { clbits | 1 << clbit } else { clbits & !(1 << clbit) };
                    if live.len() > 1 {
                        spend(budget)?;
                    }
                    dfs_pure(&ops[i + 1..], branch, weight * p, bits, budget, visit)?;
                }
                return Ok(());
            }
            _ => apply_pure(op, &mut state, clbits),
        }
    }
    visit(weight, clbits, &state);
    Ok(())
}

fn apply_pure(op: &Op, state: &mut StateVector, clbits: u64) {
    match op {
        Op::U1 { q, m } => state.apply_1q(*q, m),
        Op::Cx { c, t } => state.apply_cx(*c, *t),
        Op::Cond { clbit, value, body } => {
            if (clbits >> clbit & 1 == 1) == *value {
                for inner in body {
                    apply_pure(inner, state, clbits);
                }
            }
        }
        Op::Measure { .. } | Op::Depolarize1 { .. } | Op::Depolarize2 { .. } | Op::Damp { .. } => {
            unreachable!("noiseless walk only sees unitary ops between measurements")
        }
    }
}

/// Depth-first walk over measurement branches of a noisy program, including
/// readout-flip branches.
fn dfs_density(
    ops: &[Op],
    mut rho: DensityMatrix,
    weight: f64,
    clbits: u64,
    budget: &mut usize,
    visit: &mut dyn FnMut(f64, u64, &DensityMatrix),
) -> Result<()> {
    for (i, op) in ops.iter().enumerate() {
        match op {
            Op::Measure { q, clbit, flip } => {
                let p1 = rho.prob_one(*q).clamp(0.0, 1.0);
                for (bit, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p < BRANCH_CUTOFF {
                        continue;
                    }
                    let mut branch = rho.clone();
                    branch.project(*q, bit);
                    branch.scale(1.0 / p);
                    for (recorded, pr) in [(bit, 1.0 - flip), (!bit, *flip)] {
                        if pr < BRANCH_CUTOFF {
                            continue;
                        }
                        spend(budget)?;
                        let bits = if recorded { clbits | 1 << clbit } else { clbits & !(1 << clbit) };
                        dfs_density(&ops[i + 1..], branch.clone(), weight * p * pr, bits, budget, visit)?;
                    }
                }
                return Ok(());
            }
            _ => apply_density(op, &mut rho, clbits),
        }
    }
    visit(weight, clbits, &rho);
    Ok(())
}

fn apply_density(op: &Op, rho: &mut DensityMatrix, clbits: u64) {
    match op {
        Op::U1 { q, m } => rho.apply_1q(*q, m),
        Op::Cx { c, t } => rho.apply_cx(*c, *t),
        Op::Cond { clbit, value, body } => {
            if (clbits >> clbit & 1 == 1) == *value {
                for inner in body {
                    apply_density(inner, rho, clbits);
                }
            }
        }
        Op::Depolarize1 { q, p } => rho.depolarize_1q(*q, *p),
        Op::Depolarize2 { a, b, p } => rho.depolarize_2q(*a, *b, *p),
        Op::Damp { q, gamma } => rho.apply_kraus_1q(*q, &amplitude_damping_kraus(*gamma)),
        Op::Measure { .. } => unreachable!("handled by the walker"),
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    weight: f64,
    clbits: u64,
    /// Terminal outcomes (classical-register bits) and their probabilities.
    outcomes: Vec<u64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Leaves { cumulative: Vec<f64>, leaves: Vec<Leaf> },
    Trajectory,
}

/// Draws shots from a compiled circuit; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Sampler {
    program: Program,
    kind: SamplerKind,
}

/// The RNG stream of one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("nonempty distribution");
    let target = u * total;
    cumulative.partition_point(|&c| c <= target).min(cumulative.len() - 1)
}

impl Sampler {
    pub fn num_clbits(&self) -> usize {
        self.program.num_clbits
    }

    /// True when shots are drawn from precomputed branch probabilities.
    pub fn is_branch_sampled(&self) -> bool {
        matches!(self.kind, SamplerKind::Leaves { .. })
    }

    /// Classical register of shot `shot` (bit `k` is classical bit `k`).
    pub fn sample(&self, shot: u64, seed: u64) -> u64 {
        let mut rng = shot_rng(seed, shot);
        match &self.kind {
            SamplerKind::Leaves { cumulative, leaves } => {
                let leaf = &leaves[pick(cumulative, uniform(&mut rng))];
                leaf.clbits | leaf.outcomes[pick(&leaf.cdf, uniform(&mut rng))]
            }
            SamplerKind::Trajectory => self.trajectory(&mut rng),
        }
    }

    fn trajectory(&self, rng: &mut ChaCha8Rng) -> u64 {
        let mut state = StateVector::zero(self.program.num_qubits);
        let mut clbits = 0u64;
        for op in &self.program.ops {
            step(op, &mut state, &mut clbits, rng);
        }
        clbits
    }

    /// Counts for the shots with indices in `shots`.
    pub fn counts(&self, shots: Range<u64>, seed: u64) -> Counts {
        let mut raw: BTreeMap<u64, u64> = BTreeMap::new();
        for shot in shots {
            *raw.entry(self.sample(shot, seed)).or_insert(0) += 1;
        }
        raw.into_iter().map(|(bits, n)| (bitstring(bits, self.program.num_clbits), n)).collect()
    }
}

fn step(op: &Op, state: &mut StateVector, clbits: &mut u64, rng: &mut ChaCha8Rng) {
    match op {
        Op::U1 { q, m } => state.apply_1q(*q, m),
        Op::Cx { c, t } => state.apply_cx(*c, *t),
        Op::Measure { q, clbit, flip } => {
            let bit = uniform(rng) < state.prob_one(*q);
            state.project(*q, bit);
            state.normalize();
            let recorded = if *flip > 0.0 && uniform(rng) < *flip { !bit } else { bit };
            if recorded {
                *clbits |= 1 << clbit;
            } else {
                *clbits &= !(1 << clbit);
            }
        }
        Op::Cond { clbit, value, body } => {
            if (*clbits >> clbit & 1 == 1) == *value {
                for inner in body {
                    step(inner, state, clbits, rng);
                }
            }
        }
        Op::Depolarize1 { q, p } => {
            if uniform(rng) < *p {
                state.apply_1q(*q, &PAULIS[(rng.next_u64() & 3) as usize]);
            }
        }
        Op::Depolarize2 { a, b, p } => {
            if uniform(rng) < *p {
                let k = rng.next_u64() & 15;
                state.apply_1q(*a, &PAULIS[(k & 3) as usize]);
                state.apply_1q(*b, &PAULIS[(k >> 2) as usize]);
            }
        }
        Op::Damp { q, gamma } => {
            let [k0, k1] = amplitude_damping_kraus(*gamma);
            let jump = gamma * state.prob_one(*q);
            state.apply_1q(*q, if uniform(rng) < jump { &k1 } else { &k0 });
            state.normalize();
        }
    }
}

/// Classical register as text, bit 0 first.
pub fn bitstring(bits: u64, num_clbits: usize) -> String {
    (0..num_clbits).map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect()
}

/// Derives an independent seed for sub-task `tag` (SplitMix64 finalizer).
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
