mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use teleclone_core::circuit::{Builder, Circuit, Gate, Instruction, Role};
use teleclone_core::dicke::*;
use teleclone_core::hardware::*;
use teleclone_core::sim::{gates, Simulator};
use teleclone_core::Error;

fn sim() -> Simulator {
    Simulator::default()
}

fn protocol(m: usize, v: Variant, psi: f64, phi: f64, basis: Option<Basis>) -> Circuit {
    build_protocol_circuit(m, v, MessageState::new(psi, phi).unwrap(), basis).unwrap()
}

fn native(c: &Circuit, layout_index: usize) -> Circuit {
    let tc_m = c.clone_qubits().len();
    let v = variant_of(c);
    let layout = &enumerate_layouts(tc_m, v).unwrap()[layout_index];
    transpile_to_native(c, layout, &heavy_hex_27()).unwrap()
}

fn variant_of(c: &Circuit) -> Variant {
    let m = c.clone_qubits().len();
    if c.qubit_with_role(Role::Ancilla(0)).is_some() || (c.num_qubits() == 2 * m + 1 && m > 1) {
        Variant::WithAncillaOptimized
    } else {
        Variant::NoAncilla
    }
}

#[test]
fn heavy_hex_properties() {
    let g = heavy_hex_27();
    assert_eq!(g.num_qubits(), 27);
    assert_eq!(g.edges().len(), 28);
    assert_eq!(g.max_degree(), 3);
    assert!(g.is_connected());
    // Heavy-hex: degree-3 nodes never touch each other.
    for &(a, b) in g.edges() {
        assert!(g.degree(a) < 3 || g.degree(b) < 3, "{a}-{b}");
    }
    let degree_counts = (1..=3).map(|d| (0..27).filter(|&q| g.degree(q) == d).count()).collect::<Vec<_>>();
    assert_eq!(degree_counts.iter().sum::<usize>(), 27);
    assert_eq!(degree_counts[2], 8);
}

#[test]
fn graph_rejects_bad_edges() {
    assert!(CouplingGraph::new(3, vec![(0, 3)]).is_err());
    assert!(CouplingGraph::new(3, vec![(1, 1)]).is_err());
    let g = CouplingGraph::new(3, vec![(0, 1), (2, 1)]).unwrap();
    assert!(g.has_edge(1, 2) && !g.has_edge(0, 2));
    assert!(g.is_path(&[0, 1, 2]) && !g.is_path(&[0, 2]));
}

#[test]
fn layouts_validate() {
    let g = heavy_hex_27();
    for v in Variant::ALL {
        let max = if v.has_ancillas() { MAX_CLONES_WITH_ANCILLA } else { 3 };
        for m in 2..=max {
            let layouts = enumerate_layouts(m, v).unwrap();
            assert_eq!(layouts.len(), 7);
            for l in &layouts {
                l.validate(&g).unwrap();
                let expected = if v.has_ancillas() { 2 * m + 1 } else { m + 2 };
                assert_eq!(l.qubits().len(), expected, "{v} M={m}");
            }
        }
    }
    let big = enumerate_layouts(10, Variant::WithAncillaOptimized).unwrap();
    assert!(big.iter().all(|l| l.qubits().len() == 21));
    assert!(matches!(enumerate_layouts(11, Variant::WithAncillaOptimized), Err(Error::LayoutCapacity { .. })));
    assert!(enumerate_layouts(4, Variant::NoAncilla).is_err());
    // The seven placements are distinct.
    for (i, a) in big.iter().enumerate() {
        for b in &big[i + 1..] {
            assert_ne!(a.qubits(), b.qubits());
        }
    }
}

#[test]
fn invalid_layout_detected() {
    let g = heavy_hex_27();
    let mut l = enumerate_layouts(2, Variant::NoAncilla).unwrap().remove(0);
    l.clones[1] = l.message;
    assert!(l.validate(&g).is_err());
    let mut l = enumerate_layouts(2, Variant::NoAncilla).unwrap().remove(0);
    l.clones[1] = 26;
    assert!(matches!(l.validate(&g), Err(Error::OffEdgeInteraction(..))));
}

fn single_qubit_unitary(c: &Circuit) -> gates::Mat2 {
    let u = sim().unitary(c).unwrap();
    [[u.get(0, 0), u.get(0, 1)], [u.get(1, 0), u.get(1, 1)]]
}

fn lower_one(gate: Instruction) -> Circuit {
    // Transpile a one-qubit circuit by giving it the message role.
    let mut b = Builder::new(1, 0);
    b.set_role(0, Role::Message).push(gate);
    let layout = enumerate_layouts(2, Variant::NoAncilla).unwrap().remove(0);
    let placed = transpile_to_native(&b.finish(), &layout, &heavy_hex_27()).unwrap();
    let body = placed.instructions().iter().map(|i| Instruction { gate: i.gate.clone(), qubits: vec![0] }).collect();
    Circuit::from_parts(1, 0, body, Default::default())
}

#[test]
fn ry_and_h_lowerings() {
    for (_, theta) in angles(100, 17) {
        let theta = theta * 2.0 - 2.0 * PI;
        let lowered = lower_one(Instruction::ry(0, theta));
        assert!(lowered.instructions().iter().all(|i| is_native(&i.gate)));
        let d = gates::phase_distance(&single_qubit_unitary(&lowered), &gates::ry(theta));
        assert!(d < 1e-12, "theta={theta}: {d}");
    }
    let lowered = lower_one(Instruction::h(0));
    let names: Vec<_> = lowered.instructions().iter().map(|i| i.gate.name()).collect();
    assert_eq!(names, ["rz", "sx", "rz"]);
    assert!(gates::phase_distance(&single_qubit_unitary(&lowered), &gates::hadamard()) < 1e-12);
    let lowered = lower_one(Instruction::z(0));
    assert!(gates::phase_distance(&single_qubit_unitary(&lowered), &gates::PAULI_Z) < 1e-12);
}

#[test]
fn native_circuit_is_a_fixed_point() {
    let c = protocol(2, Variant::NoAncilla, 0.3, 0.9, Some(Basis::Y));
    let layout = &enumerate_layouts(2, Variant::NoAncilla).unwrap()[2];
    let t = transpile_to_native(&c, layout, &heavy_hex_27()).unwrap();
    assert_eq!(transpile_to_native(&t, layout, &heavy_hex_27()).unwrap(), t);
}

#[test]
fn off_edge_interaction_is_an_error() {
    let c = protocol(2, Variant::NoAncilla, 0.3, 0.9, None);
    let layout = Layout { message: 0, port: 1, ancillas: vec![], clones: vec![2, 26] };
    assert!(matches!(transpile_to_native(&c, &layout, &heavy_hex_27()), Err(Error::OffEdgeInteraction(..))));
    let mut b = Builder::new(2, 0);
    b.h(0).cx(0, 1);
    let layout = enumerate_layouts(2, Variant::NoAncilla).unwrap().remove(0);
    assert!(transpile_to_native(&b.finish(), &layout, &heavy_hex_27()).is_err());
}

#[test]
fn transpile_preserves_clone_states() {
    for (m, v) in [
        (2, Variant::NoAncilla),
        (3, Variant::NoAncilla),
        (2, Variant::WithAncillaFull),
        (3, Variant::WithAncillaOptimized),
        (4, Variant::WithAncillaOptimized),
    ] {
        for (k, (psi, phi)) in angles(3, 70 + m as u64).into_iter().enumerate() {
            let c = protocol(m, v, psi, phi, None);
            let layout = &enumerate_layouts(m, v).unwrap()[k * 2 % 7];
            let t = transpile_to_native(&c, layout, &heavy_hex_27()).unwrap();
            assert!(t.instructions().iter().all(|i| is_native(&i.gate)));
            let before = sim().exact_clone_states(&c).unwrap();
            let after = sim().exact_clone_states(&t).unwrap();
            for (a, b) in before.iter().zip(&after) {
                assert!(a.max_abs_diff(b) < 1e-10, "{v} M={m}");
            }
            let dd = insert_dd(&t, &DurationTable::default()).unwrap();
            for (a, b) in before.iter().zip(&sim().exact_clone_states(&dd).unwrap()) {
                assert!(a.max_abs_diff(b) < 1e-10, "{v} M={m} with DD");
            }
        }
    }
}

#[test]
fn schedule_respects_feed_forward() {
    let d = DurationTable::default();
    let t = native(&protocol(2, Variant::NoAncilla, 1.0, 1.0, None), 0);
    let s = schedule_alap(&t, &d).unwrap();
    let ins = t.instructions();
    for (i, op) in ins.iter().enumerate() {
        if let Gate::Cond { clbit, .. } = op.gate {
            let m = ins.iter().position(|x| x.gate == Gate::Measure(clbit)).unwrap();
            assert!(s.end[m] <= s.start[i] + 1e-9);
        }
    }
    assert!(s.total > 0.0);
    for i in 0..ins.len() {
        assert!(s.start[i] >= -1e-9 && s.end[i] <= s.total + 1e-9);
    }
}

#[test]
fn no_idle_time_means_no_dd() {
    let mut b = Builder::new(27, 1);
    b.sx(0).rz(0, 0.3).sx(0).measure(0, 0);
    let c = b.finish();
    let (out, report) = insert_dd_with(&c, &DurationTable::default(), 1).unwrap();
    assert_eq!(out, c);
    assert_eq!(report.x_gates(), 0);
}

#[test]
fn dd_needs_native_input() {
    let c = protocol(2, Variant::NoAncilla, 0.2, 0.2, None);
    assert!(matches!(insert_dd(&c, &DurationTable::default()), Err(Error::NotNative(_))));
    let t = native(&c, 0);
    let mut d = DurationTable::default();
    d.gates.remove("sx");
    assert!(matches!(insert_dd(&t, &d), Err(Error::MissingDuration(_))));
}

fn check_dd_shape(original: &Circuit, dd: &Circuit) {
    let ins = dd.instructions();
    // Removing the X-X pairs gives back the original circuit.
    let mut stripped = Vec::new();
    let mut i = 0;
    let mut pairs = 0;
    while i < ins.len() {
        let is_pair = ins[i].gate == Gate::X
            && i + 1 < ins.len()
            && ins[i + 1].gate == Gate::X
            && ins[i].qubits == ins[i + 1].qubits
            && !original_has_x_at(original, &stripped, &ins[i]);
        if is_pair {
            pairs += 1;
            i += 2;
        } else {
            stripped.push(ins[i].clone());
            i += 1;
        }
    }
    assert_eq!(stripped.as_slice(), original.instructions());
    // No X inside conditional bodies beyond what was there already.
    let body_x = |c: &Circuit| {
        c.instructions()
            .iter()
            .filter_map(|i| match &i.gate {
                Gate::Cond { body, .. } => Some(body.len()),
                _ => None,
            })
            .sum::<usize>()
    };
    assert_eq!(body_x(original), body_x(dd));
    assert!(pairs > 0);
}

fn original_has_x_at(original: &Circuit, prefix: &[Instruction], ins: &Instruction) -> bool {
    original.instructions().get(prefix.len()) == Some(ins)
}

#[test]
fn dd_inserts_adjacent_pairs_only() {
    for (m, v) in [(2, Variant::NoAncilla), (3, Variant::WithAncillaOptimized), (2, Variant::WithAncillaFull)] {
        for basis in [None, Some(Basis::X)] {
            let t = native(&protocol(m, v, 2.0, 3.0, basis), 4);
            for reps in 1..=3 {
                let (dd, report) = insert_dd_with(&t, &DurationTable::default(), reps).unwrap();
                check_dd_shape(&t, &dd);
                assert_eq!(dd.instructions().len(), t.instructions().len() + report.x_gates());
                assert!(report.insertions.iter().all(|ins| ins.pairs >= 1 && ins.pairs <= reps));
                assert!(report
                    .insertions
                    .iter()
                    .all(|ins| ins.window.1 - ins.window.0 >= 70.0 * ins.pairs as f64 - 1e-9));
            }
        }
    }
}

#[test]
fn dd_avoids_feed_forward_wait() {
    let d = DurationTable::default();
    let t = native(&protocol(2, Variant::NoAncilla, 1.0, 1.0, Some(Basis::Z)), 1);
    let s = schedule_alap(&t, &d).unwrap();
    let (_, report) = insert_dd_with(&t, &d, 1).unwrap();
    let ins = t.instructions();
    for (i, op) in ins.iter().enumerate() {
        if let Gate::Cond { clbit, .. } = op.gate {
            let m = ins.iter().position(|x| x.gate == Gate::Measure(clbit)).unwrap();
            for q in &op.qubits {
                for w in report.insertions.iter().filter(|w| w.qubit == *q) {
                    assert!(w.window.1 <= s.start[m] + 1e-9 || w.window.0 >= s.start[i] - 1e-9, "{w:?}");
                }
            }
        }
    }
}

#[test]
fn dd_leaves_distribution_unchanged() {
    for (m, v) in [(2, Variant::NoAncilla), (3, Variant::NoAncilla), (3, Variant::WithAncillaOptimized)] {
        for basis in Basis::ALL {
            let t = native(&protocol(m, v, 0.8, 4.0, Some(basis)), 3);
            let dd = insert_dd(&t, &DurationTable::default()).unwrap();
            let a = sim().exact_distribution(&t, None).unwrap();
            let b = sim().exact_distribution(&dd, None).unwrap();
            assert_eq!(a.len(), b.len());
            for (k, p) in &a {
                assert!((p - b[k]).abs() < 1e-12);
            }
            assert_eq!(sim().run_shots(&t, 2000, 5, None).unwrap(), sim().run_shots(&dd, 2000, 5, None).unwrap());
        }
    }
}

/// Branch-resolved check: the joint state of every active qubit, which keeps
/// measured qubits collapsed to their outcomes.
#[test]
fn dd_branch_states_match() {
    for (m, v) in [(2, Variant::NoAncilla), (3, Variant::NoAncilla), (2, Variant::WithAncillaOptimized)] {
        let t = native(&protocol(m, v, 1.7, 0.6, None), 5);
        let dd = insert_dd(&t, &DurationTable::default()).unwrap();
        let mut active: Vec<usize> = t.instructions().iter().flat_map(|i| i.qubits.clone()).collect();
        active.sort_unstable();
        active.dedup();
        let a = sim().exact_reduced_states(&t, &[active.clone()], None).unwrap();
        let b = sim().exact_reduced_states(&dd, &[active], None).unwrap();
        assert!(a[0].max_abs_diff(&b[0]) < 1e-10);
    }
}

#[test]
fn two_clone_no_ancilla_dd_count() {
    let d = DurationTable::default();
    let mut counts = Vec::new();
    for layout in 0..LAYOUT_COUNT {
        for basis in [None, Some(Basis::X), Some(Basis::Y), Some(Basis::Z)] {
            let t = native(&protocol(2, Variant::NoAncilla, 1.0, 2.0, basis), layout);
            counts.push(insert_dd_with(&t, &d, 1).unwrap().1.x_gates());
        }
    }
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    assert!((mean - 14.0).abs() <= 6.0, "{counts:?}");
}

#[test]
fn durations_validate() {
    let d = DurationTable::default();
    d.validate().unwrap();
    assert_eq!(d.native(&Instruction::rz(0, 1.0)).unwrap(), 0.0);
    assert_eq!(d.native(&Instruction::cx(0, 1)).unwrap(), 300.0);
    let mut bad = d.clone();
    bad.gates.insert("rz".into(), 5.0);
    assert!(bad.validate().is_err());
    let mut bad = d.clone();
    bad.gates.insert("sx".into(), -1.0);
    assert!(bad.validate().is_err());
    let mut edge = d.clone();
    edge.cx_edges.insert((0, 1), 420.0);
    edge.validate().unwrap();
    assert_eq!(edge.native(&Instruction::cx(0, 1)).unwrap(), 420.0);
    assert_eq!(edge.native(&Instruction::cx(1, 0)).unwrap(), 420.0);
    edge.cx_edges.insert((3, 2), 1.0);
    assert!(edge.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dd_is_semantically_inert(m in 2usize..=3, layout in 0usize..7, psi in 0.0f64..PI, phi in 0.0f64..2.0 * PI, reps in 1usize..4) {
        let t = native(&protocol(m, Variant::NoAncilla, psi, phi, Some(Basis::Y)), layout);
        let (dd, _) = insert_dd_with(&t, &DurationTable::default(), reps).unwrap();
        let a = sim().exact_distribution(&t, None).unwrap();
        let b = sim().exact_distribution(&dd, None).unwrap();
        for (k, p) in &a {
            prop_assert!((p - b.get(k).copied().unwrap_or(0.0)).abs() < 1e-12);
        }
    }
}
