mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use teleclone_core::analysis::{bloch_vector, fidelity, norm3, theoretical_fidelity, trace_distance};
use teleclone_core::dicke::*;
use teleclone_core::sim::Simulator;
use teleclone_core::tomography::*;

fn counts(x: [u64; 2], y: [u64; 2], z: [u64; 2]) -> BasisCounts {
    BasisCounts { x, y, z }
}

#[test]
fn linear_inversion_examples() {
    let (r, rho) = linear_inversion(&counts([50, 50], [50, 50], [100, 0])).unwrap();
    assert_eq!(r, [0.0, 0.0, 1.0]);
    assert!(rho.max_abs_diff(&real_diag(&[1.0, 0.0])) < 1e-15);
    let (r, _) = linear_inversion(&counts([75, 25], [10, 30], [3, 1])).unwrap();
    assert_eq!(r, [0.5, -0.5, 0.5]);
    assert!(linear_inversion(&counts([0, 0], [1, 0], [1, 0])).is_err());
}

#[test]
fn mle_keeps_physical_interior_estimates() {
    let c = counts([60, 40], [45, 55], [70, 30]);
    let (r, _) = linear_inversion(&c).unwrap();
    let m = mle_bloch(&c).unwrap();
    for k in 0..3 {
        assert!((m[k] - r[k]).abs() < 1e-8);
    }
}

#[test]
fn mle_projects_unphysical_corner() {
    // Linear inversion gives (1,1,1); the constrained optimum is on the sphere
    // along the same direction.
    let c = counts([100, 0], [100, 0], [100, 0]);
    let m = mle_bloch(&c).unwrap();
    let d = 1.0 / 3f64.sqrt();
    for v in m {
        assert!((v - d).abs() < 1e-6, "{m:?}");
    }
    let rho = mle_fit(&c).unwrap();
    assert!(rho.hermitian_eigenvalues()[0] >= 0.0);
}

#[test]
fn mle_matches_grid_oracle() {
    let cases = [
        counts([100, 0], [100, 0], [100, 0]),
        counts([90, 10], [85, 15], [20, 80]),
        counts([10_000, 0], [5000, 5000], [5000, 5000]),
        counts([9000, 1000], [1000, 9000], [8000, 2000]),
        counts([523, 477], [498, 502], [511, 489]),
        counts([3, 0], [0, 3], [2, 1]),
        counts([8333, 1667], [5000, 5000], [5000, 5000]),
    ];
    for c in cases {
        let mle = density_from(mle_bloch(&c).unwrap());
        let grid = density_from(grid_oracle(&c, 1e-3));
        let td = trace_distance(&mle, &grid).unwrap();
        assert!(td <= 2e-3, "{c:?}: {td}");
        assert!(
            log_likelihood(&c, bloch_vector(&mle).unwrap()) >= log_likelihood(&c, bloch_vector(&grid).unwrap()) - 1e-9
        );
    }
}

fn density_from(r: [f64; 3]) -> teleclone_core::linalg::CMatrix {
    teleclone_core::analysis::density_from_bloch(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mle_is_a_density_matrix(raw in proptest::array::uniform6(0u64..500)) {
        let c = counts([raw[0], raw[1] + 1], [raw[2] + 1, raw[3]], [raw[4], raw[5] + 1]);
        let rho = mle_fit(&c).unwrap();
        prop_assert!(rho.is_hermitian(1e-14));
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.hermitian_eigenvalues()[0] >= -1e-12);
        // Never worse than the projected linear-inversion starting point.
        let (r, _) = linear_inversion(&c).unwrap();
        let n = norm3(r);
        let start = if n > 1.0 { r.map(|v| v / n * (1.0 - 1e-12)) } else { r };
        prop_assert!(log_likelihood(&c, bloch_vector(&rho).unwrap()) >= log_likelihood(&c, start) - 1e-12);
    }
}

#[test]
fn marginal_counts() {
    let table: BTreeMap<String, u64> =
        [("000".to_string(), 5), ("101".to_string(), 7), ("011".to_string(), 11)].into_iter().collect();
    assert_eq!(marginal(&table, 0), [16, 7]);
    assert_eq!(marginal(&table, 1), [12, 11]);
    assert_eq!(marginal(&table, 2), [5, 18]);
    assert_eq!(marginal(&table, 3), [23, 0]);
}

#[test]
fn tomography_reproduces_exact_fidelity() {
    let sim = Simulator::default();
    let tc = Telecloning::new(2, Variant::WithAncillaOptimized).unwrap();
    for (k, (psi, phi)) in angles(3, 8).into_iter().enumerate() {
        let msg = MessageState::new(psi, phi).unwrap();
        let records = tomography_run(&sim, &tc, msg, 10_000, k as u64, None, &Ok).unwrap();
        assert_eq!(records.len(), 2);
        let exact = sim.exact_clone_states(&tc.protocol_circuit(msg, None)).unwrap();
        for rec in &records {
            assert_eq!(rec.shots_per_basis, 10_000);
            for b in Basis::ALL {
                assert_eq!(rec.counts.get(b).iter().sum::<u64>(), 10_000);
            }
            let f_exact = fidelity_to(&exact[rec.clone_index], &msg);
            let f_tomo = fidelity_to(&rec.reconstructed, &msg);
            assert!((f_exact - theoretical_fidelity(1, 2).unwrap()).abs() < 1e-10);
            assert!((f_tomo - f_exact).abs() < 0.01, "{f_tomo} vs {f_exact}");
        }
    }
}

fn fidelity_to(rho: &teleclone_core::linalg::CMatrix, msg: &MessageState) -> f64 {
    fidelity(rho, &teleclone_core::linalg::CMatrix::outer(&msg.amplitudes())).unwrap()
}

#[test]
fn tomography_is_seeded() {
    let sim = Simulator::default();
    let tc = Telecloning::new(2, Variant::NoAncilla).unwrap();
    let msg = MessageState::new(0.4, 0.2).unwrap();
    let a = tomography_run(&sim, &tc, msg, 500, 3, None, &Ok).unwrap();
    let b = tomography_run(&sim, &tc, msg, 500, 3, None, &Ok).unwrap();
    let c = tomography_run(&sim, &tc, msg, 500, 4, None, &Ok).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(tomography_run(&sim, &tc, msg, 0, 3, None, &Ok).is_err());
}
