//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any of them failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use common::*;
use teleclone::experiment::{run_experiment, ExperimentConfig, ExperimentRecord, Grid};
use teleclone_core::analysis::*;
use teleclone_core::circuit::{Circuit, Gate};
use teleclone_core::dicke::*;
use teleclone_core::hardware::*;
use teleclone_core::linalg::CMatrix;
use teleclone_core::sim::{NoiseModel, Simulator};
use teleclone_core::tomography::{mle_bloch, tomography_run, BasisCounts};

const FIDELITY_TOL: f64 = 1e-9;
const ETA_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-7;
const ENTANGLEMENT_TOL: f64 = 1e-9;
const STATE_TOL: f64 = 1e-10;
const BELL_SIGMAS: f64 = 4.0;
const TOMOGRAPHY_TOL: f64 = 0.01;
const NOISE_FLOOR_TOL: f64 = 0.02;
const DICKE_TOL: f64 = 1e-12;
const MLE_GRID_TD: f64 = 2e-3;
const CLOSED_FORM_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Accumulates failures inside one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, summary: String) -> Outcome {
        if self.failures.is_empty() {
            outcome(true, summary)
        } else {
            let shown: Vec<_> = self.failures.iter().take(3).cloned().collect();
            outcome(false, format!("{} failures, e.g. {}", self.failures.len(), shown.join("; ")))
        }
    }
}

fn sim() -> Simulator {
    Simulator::default()
}

fn protocol(m: usize, v: Variant, psi: f64, phi: f64) -> Circuit {
    build_protocol_circuit(m, v, MessageState::new(psi, phi).unwrap(), None).unwrap()
}

fn exact_run(m: usize, v: Variant, n: usize) -> (ExperimentRecord, Duration) {
    let mut config = ExperimentConfig::new(m, v);
    config.grid = Grid { n_psi: n, n_phi: n };
    let t = Instant::now();
    let record = run_experiment(&config).unwrap();
    (record, t.elapsed())
}

fn runs() -> Vec<(usize, Variant, ExperimentRecord, Duration)> {
    let mut out = Vec::new();
    for m in 2..=5 {
        for v in Variant::ALL {
            if Telecloning::new(m, v).is_ok() {
                let (r, t) = exact_run(m, v, 20);
                out.push((m, v, r, t));
            }
        }
    }
    let (r, t) = exact_run(10, Variant::WithAncillaOptimized, 5);
    out.push((10, Variant::WithAncillaOptimized, r, t));
    out
}

fn optimal_fidelity(runs: &[(usize, Variant, ExperimentRecord, Duration)]) -> Outcome {
    let mut checks = Checks::default();
    let mut worst: f64 = 0.0;
    for (m, v, record, elapsed) in runs {
        let want = theoretical_fidelity(1, *m).unwrap();
        let got = record.aggregate.overall.mean.unwrap_or(f64::NAN);
        worst = worst.max((got - want).abs());
        checks.check((got - want).abs() <= FIDELITY_TOL, || format!("{v} M={m}: {got} vs {want}"));
        checks.check(record.aggregate.failed_points == 0, || format!("{v} M={m}: failed points"));
        for c in record.points.iter().flat_map(|p| &p.clones) {
            checks.check((c.fidelity - want).abs() <= FIDELITY_TOL, || format!("{v} M={m}: clone {}", c.fidelity));
        }
        let limit = if *m <= 5 { 300 } else { 1800 };
        checks.check(elapsed.as_secs() <= limit, || format!("{v} M={m}: {elapsed:?}"));
    }
    let times: Vec<String> = runs.iter().map(|(m, v, _, t)| format!("{v}/{m} {:.1}s", t.as_secs_f64())).collect();
    checks.finish(format!("max |F - F_opt| = {worst:.2e}; {}", times.join(", ")))
}

fn shrinking_factor_geometry(runs: &[(usize, Variant, ExperimentRecord, Duration)]) -> Outcome {
    let mut checks = Checks::default();
    let (mut worst_eta, mut worst_angle): (f64, f64) = (0.0, 0.0);
    for (m, v, record, _) in runs {
        let eta = shrinking_factor(1, *m).unwrap();
        for c in record.points.iter().flat_map(|p| &p.clones) {
            let angle = c.bloch_angle_error.unwrap_or(f64::INFINITY);
            worst_eta = worst_eta.max((c.bloch_magnitude - eta).abs());
            worst_angle = worst_angle.max(angle);
            checks
                .check((c.bloch_magnitude - eta).abs() <= ETA_TOL, || format!("{v} M={m}: |r| {}", c.bloch_magnitude));
            checks.check(angle <= ANGLE_TOL, || format!("{v} M={m}: angle {angle}"));
        }
    }
    checks.finish(format!("max |eta error| = {worst_eta:.2e}, max angle = {worst_angle:.2e} rad"))
}

fn clone_entanglement() -> Outcome {
    let mut checks = Checks::default();
    let c_want = 1.0 / 3.0;
    let n_want = (5f64.sqrt() - 2.0) / 6.0;
    let mut worst: f64 = 0.0;
    for v in Variant::ALL {
        for (psi, phi) in angles(10, 3) {
            let circuit = protocol(2, v, psi, phi);
            let rho = sim().exact_reduced_states(&circuit, &[circuit.clone_qubits()], None).unwrap().remove(0);
            let c = concurrence(&rho).unwrap();
            let n = negativity(&rho, &[0]).unwrap();
            worst = worst.max((c - c_want).abs()).max((n - n_want).abs());
            checks.check((c - c_want).abs() <= ENTANGLEMENT_TOL, || format!("{v}: C = {c}"));
            checks.check((n - n_want).abs() <= ENTANGLEMENT_TOL, || format!("{v}: N = {n}"));
        }
    }
    checks.finish(format!("C = 1/3, N = (sqrt5-2)/6 for 3 variants x 10 messages, max error {worst:.2e}"))
}

fn variant_equivalence() -> Outcome {
    let mut checks = Checks::default();
    let mut gates = Vec::new();
    let mut worst: f64 = 0.0;
    for m in 3..=5 {
        let opt = build_telecloning_state(m, Variant::WithAncillaOptimized).unwrap().stats().unwrap();
        let full = build_telecloning_state(m, Variant::WithAncillaFull).unwrap().stats().unwrap();
        gates.push(format!("M={m} {}<{}", opt.two_qubit_gate_count, full.two_qubit_gate_count));
        checks.check(opt.two_qubit_gate_count < full.two_qubit_gate_count, || format!("M={m}: gate counts"));
        for (psi, phi) in angles(5, 40 + m as u64) {
            let a = sim().exact_clone_states(&protocol(m, Variant::WithAncillaOptimized, psi, phi)).unwrap();
            let b = sim().exact_clone_states(&protocol(m, Variant::WithAncillaFull, psi, phi)).unwrap();
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max(x.max_abs_diff(y));
                checks.check(x.max_abs_diff(y) <= STATE_TOL, || format!("M={m}: states differ"));
            }
        }
    }
    checks.finish(format!("max state difference {worst:.2e}; two-qubit gates {}", gates.join(", ")))
}

fn protocol_statistics() -> Outcome {
    let mut checks = Checks::default();
    let shots = 10_000u64;
    let sigma = (shots as f64 * 0.25 * 0.75).sqrt();
    let mut worst_dev: f64 = 0.0;
    for v in [Variant::WithAncillaOptimized, Variant::WithAncillaFull] {
        for m in [2, 3] {
            for (k, (psi, phi)) in angles(3, 50 + m as u64).into_iter().enumerate() {
                let counts = sim().run_shots(&protocol(m, v, psi, phi), shots, k as u64, None).unwrap();
                let mut bell = [0u64; 4];
                for (bits, n) in &counts {
                    let b = bits.as_bytes();
                    bell[usize::from(b[0] == b'1') | usize::from(b[1] == b'1') << 1] += n;
                }
                for n in bell {
                    let dev = (n as f64 - shots as f64 / 4.0).abs() / sigma;
                    worst_dev = worst_dev.max(dev);
                    checks.check(dev <= BELL_SIGMAS, || format!("{v} M={m}: {bell:?}"));
                }
            }
        }
    }
    let tc = Telecloning::new(2, Variant::WithAncillaOptimized).unwrap();
    let mut worst_f: f64 = 0.0;
    for (k, (psi, phi)) in angles(3, 60).into_iter().enumerate() {
        let msg = MessageState::new(psi, phi).unwrap();
        let target = CMatrix::outer(&msg.amplitudes());
        let exact = sim().exact_clone_states(&tc.protocol_circuit(msg, None)).unwrap();
        for rec in tomography_run(&sim(), &tc, msg, shots, k as u64, None, &Ok).unwrap() {
            let f_exact = fidelity(&exact[rec.clone_index], &target).unwrap();
            let f_tomo = fidelity(&rec.reconstructed, &target).unwrap();
            worst_f = worst_f.max((f_tomo - f_exact).abs());
            checks.check((f_tomo - f_exact).abs() <= TOMOGRAPHY_TOL, || format!("tomography {f_tomo} vs {f_exact}"));
        }
    }
    checks.finish(format!("max Bell deviation {worst_dev:.2} sigma; max |F_mle - F_exact| = {worst_f:.4}"))
}

/// Removes adjacent X-X pairs that are not part of the original circuit and
/// checks the remainder equals the original, conditional bodies included.
fn dd_is_pairs_only(original: &Circuit, dd: &Circuit) -> bool {
    let (orig, ins) = (original.instructions(), dd.instructions());
    let (mut i, mut j) = (0, 0);
    while i < ins.len() {
        if j < orig.len() && ins[i] == orig[j] {
            i += 1;
            j += 1;
        } else if i + 1 < ins.len()
            && ins[i].gate == Gate::X
            && ins[i + 1].gate == Gate::X
            && ins[i].qubits == ins[i + 1].qubits
        {
            i += 2;
        } else {
            return false;
        }
    }
    j == orig.len()
}

fn transpile_and_dd() -> Outcome {
    let mut checks = Checks::default();
    let graph = heavy_hex_27();
    let durations = DurationTable::default();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for (m, v) in [
        (2, Variant::NoAncilla),
        (3, Variant::NoAncilla),
        (2, Variant::WithAncillaOptimized),
        (2, Variant::WithAncillaFull),
        (3, Variant::WithAncillaOptimized),
        (4, Variant::WithAncillaOptimized),
    ] {
        let layouts = enumerate_layouts(m, v).unwrap();
        for (k, (psi, phi)) in angles(4, 80 + m as u64).into_iter().enumerate() {
            let c = protocol(m, v, psi, phi);
            let reference = sim().exact_clone_states(&c).unwrap();
            let native = transpile_to_native(&c, &layouts[(2 * k + m) % layouts.len()], &graph).unwrap();
            let (dd, report) = insert_dd_with(&native, &durations, 1 + k % 2).unwrap();
            pairs += report.x_gates() / 2;
            checks.check(native.instructions().iter().all(|i| is_native(&i.gate)), || format!("{v} M={m}: not native"));
            checks.check(dd_is_pairs_only(&native, &dd), || format!("{v} M={m}: DD changed more than X-X pairs"));
            for stage in [&native, &dd] {
                for (a, b) in reference.iter().zip(&sim().exact_clone_states(stage).unwrap()) {
                    worst = worst.max(a.max_abs_diff(b));
                    checks.check(a.max_abs_diff(b) <= STATE_TOL, || format!("{v} M={m}: state changed"));
                }
            }
        }
    }
    checks.finish(format!("max state difference {worst:.2e}; {pairs} X-X pairs checked"))
}

fn noise_floor() -> Outcome {
    let mut checks = Checks::default();
    let strengths = [0.0, 0.001, 0.005, 0.02, 0.1, 0.3, 1.0];
    let mut tails = Vec::new();
    for (m, v) in [
        (2, Variant::NoAncilla),
        (2, Variant::WithAncillaOptimized),
        (3, Variant::WithAncillaOptimized),
        (4, Variant::WithAncillaOptimized),
    ] {
        let messages = angles(4, 90 + m as u64);
        let mean: Vec<f64> = strengths
            .iter()
            .map(|&p| {
                let noise = NoiseModel::depolarizing(p, p);
                let fs: Vec<f64> = messages
                    .iter()
                    .flat_map(|&(psi, phi)| {
                        let target = CMatrix::outer(&MessageState::new(psi, phi).unwrap().amplitudes());
                        sim()
                            .exact_clone_states_with_noise(&protocol(m, v, psi, phi), Some(&noise))
                            .unwrap()
                            .iter()
                            .map(|rho| fidelity(rho, &target).unwrap())
                            .collect::<Vec<_>>()
                    })
                    .collect();
                mean_std(&fs).0
            })
            .collect();
        for w in mean.windows(2) {
            checks.check(w[1] <= w[0] + 1e-12, || format!("{v} M={m}: not monotone {mean:?}"));
        }
        let last = mean[mean.len() - 1];
        tails.push(format!("{v}/{m} {last:.4}"));
        checks.check((last - 0.5).abs() <= NOISE_FLOOR_TOL, || format!("{v} M={m}: floor {last}"));
    }
    checks.finish(format!("monotone; fidelity at p=1: {}", tails.join(", ")))
}

fn oracle_suites() -> Outcome {
    let mut checks = Checks::default();
    let mut worst_dicke: f64 = 0.0;
    for m in 1..=6 {
        let circuit = build_dsu(m).unwrap();
        let all: Vec<usize> = (0..m).collect();
        for i in 0..=m {
            let input: String = "1".repeat(i) + &"0".repeat(m - i);
            let out = sim().final_state(&circuit, Some(ket(&input))).unwrap();
            let d = max_amp_diff(out.amplitudes(), &dicke_oracle(m, &all, i));
            worst_dicke = worst_dicke.max(d);
            checks.check(d <= DICKE_TOL, || format!("DSU M={m} i={i}: {d}"));
        }
    }

    let mut worst_td: f64 = 0.0;
    for raw in [
        [100, 0, 100, 0, 100, 0],
        [90, 10, 85, 15, 20, 80],
        [9000, 1000, 1000, 9000, 8000, 2000],
        [523, 477, 498, 502, 511, 489],
        [3, 0, 0, 3, 2, 1],
        [8333, 1667, 5000, 5000, 5000, 5000],
    ] {
        let c = BasisCounts { x: [raw[0], raw[1]], y: [raw[2], raw[3]], z: [raw[4], raw[5]] };
        let mle = density_from_bloch(mle_bloch(&c).unwrap());
        let grid = density_from_bloch(grid_oracle(&c, 1e-3));
        let td = trace_distance(&mle, &grid).unwrap();
        worst_td = worst_td.max(td);
        checks.check(td <= MLE_GRID_TD, || format!("MLE vs grid {raw:?}: {td}"));
    }

    let mut rng = teleclone_core::sim::shot_rng(7, 0);
    let mut u = || teleclone_core::sim::uniform(&mut rng) * 2.0 - 1.0;
    let mut worst_f: f64 = 0.0;
    for case in 0..10_000 {
        let ra: Vec<f64> = (0..8).map(|_| u()).collect();
        let rb: Vec<f64> = (0..8).map(|_| u()).collect();
        let a = random_density(2, 1 + case % 2, &ra);
        let b = random_density(2, 1 + (case / 2) % 2, &rb);
        let d = (fidelity_qubit(&a, &b).unwrap() - fidelity_general(&a, &b).unwrap()).abs();
        worst_f = worst_f.max(d);
        checks.check(d <= CLOSED_FORM_TOL, || format!("fidelity case {case}: {d}"));
    }
    checks.finish(format!("DSU {worst_dicke:.1e}, MLE trace distance {worst_td:.1e}, closed form {worst_f:.1e}"))
}

fn main() {
    let runs = runs();
    let results = [
        ("1 optimal fidelity", optimal_fidelity(&runs)),
        ("2 shrinking factor", shrinking_factor_geometry(&runs)),
        ("3 clone entanglement", clone_entanglement()),
        ("4 variant equivalence", variant_equivalence()),
        ("5 protocol statistics", protocol_statistics()),
        ("6 transpile and DD", transpile_and_dd()),
        ("7 noise floor", noise_floor()),
        ("8 oracle suites", oracle_suites()),
    ];
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<_> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
