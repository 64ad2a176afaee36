use iccr::validation::cosimulate;
use iccr::{run_trajectory, Boundary, ExperimentConfig};
use proptest::prelude::*;

fn config(n: usize, depth: usize, p: f64, t_rate: f64, seed: u64, ring: bool) -> ExperimentConfig {
    ExperimentConfig {
        n_qubits: n,
        depth,
        meas_rate: p,
        t_gate_rate: t_rate,
        seed,
        boundary: if ring { Boundary::Ring } else { Boundary::Open },
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_step_matches_the_statevector(
        n in 2usize..=6,
        depth in 1usize..=8,
        p in 0.0f64..=1.0,
        t_rate in prop_oneof![Just(0.0), 0.0f64..0.5],
        seed in any::<u64>(),
        ring in any::<bool>(),
    ) {
        let r = cosimulate(&config(n, depth, p, t_rate, seed, ring), 0).unwrap();
        prop_assert!(r.max_step_error < 1e-9, "step error {}", r.max_step_error);
        prop_assert!(r.sre_mismatch < 1e-9, "sre mismatch {}", r.sre_mismatch);
        prop_assert!(r.fidelity <= 1.0 + 1e-9);
        if r.only_exact_branches() {
            prop_assert!(r.fidelity > 1.0 - 1e-8, "fidelity {}", r.fidelity);
        }
    }

    #[test]
    fn clifford_only_trajectories_lose_magic_monotonically(
        n in 2usize..=40,
        depth in 1usize..=30,
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
        ring in any::<bool>(),
    ) {
        let rows = run_trajectory(&config(n, depth, p, 0.0, seed, ring), 0).unwrap().rows;
        prop_assert_eq!(rows.len(), depth + 1);
        for w in rows.windows(2) {
            prop_assert!(w[1].nullity_density <= w[0].nullity_density);
            prop_assert!(w[1].ln_fidelity <= w[0].ln_fidelity + 1e-12);
        }
        for r in &rows {
            prop_assert!(r.ln_fidelity <= 1e-12);
            for &m in &r.sre_density {
                prop_assert!((0.0..=1.0).contains(&m), "density {}", m);
            }
        }
    }
}

#[test]
fn trajectories_are_reproducible_and_distinct() {
    let cfg = config(20, 20, 0.1, 0.05, 3, true);
    let a = run_trajectory(&cfg, 5).unwrap();
    let b = run_trajectory(&cfg, 5).unwrap();
    let c = run_trajectory(&cfg, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
