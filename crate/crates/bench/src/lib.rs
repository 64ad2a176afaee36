//! Fixtures shared by the benchmarks.

use iccr::experiment::{run_trajectory_with, TrajectoryState};
use iccr::ExperimentConfig;

/// A trajectory state after `depth` layers at measurement rate `p`, with no
/// recorded observables beyond the endpoints.
pub fn evolved(n: usize, depth: usize, p: f64, seed: u64) -> TrajectoryState {
    let cfg = ExperimentConfig {
        n_qubits: n,
        depth,
        meas_rate: p,
        seed,
        sre_orders: vec![2.0],
        record_every: depth.max(1),
        ..Default::default()
    };
    run_trajectory_with(&cfg, 0, false, &mut ()).expect("fixture trajectory runs")
}
