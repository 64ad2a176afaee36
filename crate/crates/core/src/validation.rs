//! Cross-checks of the renormalized simulation against the dense oracle.
//!
//! A trajectory is run twice in lockstep: once through the tableau and the
//! product state, and once as an exact statevector receiving the same gates,
//! the same measurement outcomes and the same T gates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::dense::{fidelity, DenseState, TABLEAU_CAP};
use crate::error::{IccrError, Result};
use crate::experiment::{run_trajectory_with, ExperimentConfig, TrajectoryObserver};
use crate::gadget::{recycle_ancilla, resource_state};
use crate::gate::GateRecord;
use crate::magic::{sre, DEFAULT_ORDERS};
use crate::pauli::{Pauli, PauliString};
use crate::product_state::{ProductState, SingleQubitState};
use crate::renorm::{iccr_step, Branch, IterationReport, OutcomePolicy, VariationalConfig};
use crate::tableau::CliffordTableau;
use crate::SeededRng;

/// `u|Ψ⟩` as a statevector, replaying the gate log when there is one (exact
/// phases) and reading the tableau otherwise (up to a global phase).
pub fn replay(state: &ProductState, u: &CliffordTableau) -> Result<DenseState> {
    let psi = DenseState::from_product(state)?;
    match u.replay_log() {
        Some(log) => {
            let mut d = psi;
            d.apply_gates(&log)?;
            Ok(d)
        }
        None => psi.apply_tableau(u),
    }
}

fn is_exact(r: &IterationReport) -> bool {
    r.branch != Branch::VariationalTarget || r.support_size <= 2
}

/// Outcome of one co-simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CoSimReport {
    pub n_qubits: usize,
    /// `|⟨dense|replayed⟩|²` at the end of the trajectory.
    pub fidelity: f64,
    /// `∏ f_n` as reported by the steps.
    pub product_f: f64,
    /// Product of per-step fidelities recomputed densely.
    pub product_f_dense: f64,
    /// Largest `|f_n − f_n^dense|` over all steps.
    pub max_step_error: f64,
    pub n_steps: usize,
    /// Steps that took the variational branch with `|S| ≥ 3`.
    pub n_large_variational: usize,
    /// Largest `|M_n(Ψ) − M_n(replayed)|` over the default orders at the end.
    pub sre_mismatch: f64,
}

impl CoSimReport {
    pub fn only_exact_branches(&self) -> bool {
        self.n_large_variational == 0
    }
}

struct DenseObserver {
    dense: DenseState,
    pre: Option<DenseState>,
    product_f: f64,
    product_f_dense: f64,
    max_step_error: f64,
    n_steps: usize,
    n_large_variational: usize,
}

impl DenseObserver {
    fn check_step(
        &mut self,
        exact: DenseState,
        report: &IterationReport,
        state: &ProductState,
        u: &CliffordTableau,
    ) -> Result<()> {
        let f = fidelity(&exact, &replay(state, u)?)?;
        self.max_step_error = self.max_step_error.max((f - report.step_fidelity).abs());
        self.product_f *= report.step_fidelity;
        self.product_f_dense *= f;
        self.n_steps += 1;
        if !is_exact(report) {
            self.n_large_variational += 1;
        }
        Ok(())
    }
}

impl TrajectoryObserver for DenseObserver {
    fn gates(&mut self, _t: usize, gates: &[GateRecord]) -> Result<()> {
        self.dense.apply_gates(gates)
    }

    fn before_step(&mut self, state: &ProductState, u: &CliffordTableau) -> Result<()> {
        self.pre = Some(replay(state, u)?);
        Ok(())
    }

    fn measured(
        &mut self,
        _t: usize,
        report: &IterationReport,
        state: &ProductState,
        u: &CliffordTableau,
    ) -> Result<()> {
        let n = self.dense.n_qubits();
        let z = PauliString::single(n, report.measured_site, Pauli::Z)?;
        self.dense.project_pauli(&z, report.outcome_s)?;
        let mut exact = self.pre.take().expect("before_step precedes measured");
        exact.project_pauli(&z, report.outcome_s)?;
        self.check_step(exact, report, state, u)
    }

    fn t_gate(
        &mut self,
        _t: usize,
        site: usize,
        report: &IterationReport,
        state: &ProductState,
        u: &CliffordTableau,
    ) -> Result<()> {
        self.dense.apply_t(site)?;
        let mut exact = self.pre.take().expect("before_step precedes t_gate");
        exact.apply_t(site)?;
        self.check_step(exact, report, state, u)
    }
}

/// Runs trajectory `traj_index` of `cfg` alongside an exact statevector.
pub fn cosimulate(cfg: &ExperimentConfig, traj_index: u64) -> Result<CoSimReport> {
    if cfg.n_qubits > TABLEAU_CAP {
        return Err(IccrError::CapExceeded {
            cap: TABLEAU_CAP,
            requested: cfg.n_qubits,
        });
    }
    let initial = ProductState::from_angle(cfg.n_qubits, cfg.initial_angle);
    let mut obs = DenseObserver {
        dense: DenseState::from_product(&initial)?,
        pre: None,
        product_f: 1.0,
        product_f_dense: 1.0,
        max_step_error: 0.0,
        n_steps: 0,
        n_large_variational: 0,
    };
    let out = run_trajectory_with(cfg, traj_index, true, &mut obs)?;
    let replayed = replay(&out.state, &out.tableau)?;
    let mut sre_mismatch: f64 = 0.0;
    if cfg.n_qubits <= crate::dense::SRE_CAP {
        for n in DEFAULT_ORDERS {
            let d = (sre(&out.state, n)? - replayed.exact_sre(n)?).abs();
            sre_mismatch = sre_mismatch.max(d);
        }
    }
    Ok(CoSimReport {
        n_qubits: cfg.n_qubits,
        fidelity: fidelity(&obs.dense, &replayed)?,
        product_f: obs.product_f,
        product_f_dense: obs.product_f_dense,
        max_step_error: obs.max_step_error,
        n_steps: obs.n_steps,
        n_large_variational: obs.n_large_variational,
        sre_mismatch,
    })
}

/// Random small circuit configuration number `index` of a validation family.
pub fn random_circuit_config(
    family_seed: u64,
    index: u64,
    max_n: usize,
    rates: &[f64],
) -> ExperimentConfig {
    let mut rng = SeededRng::seed_from_u64(family_seed);
    rng.set_stream(index);
    let n_qubits = rng.random_range(2..=max_n.max(2));
    let depth = rng.random_range(1..=10);
    let meas_rate = rates[rng.random_range(0..rates.len())];
    let initial_angle = rng.random_range(0.05..PI / 4.0 - 0.05);
    ExperimentConfig {
        n_qubits,
        depth,
        meas_rate,
        n_trajectories: 1,
        seed: rng.random(),
        initial_angle,
        ..Default::default()
    }
}

/// Summary of a batch of co-simulated circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub accepted: usize,
    pub attempted: usize,
    /// Smallest end-of-trajectory fidelity (exact-branch batches).
    pub min_fidelity: f64,
    /// Largest `| |⟨dense|replayed⟩|² − ∏ f_n |`.
    pub max_bookkeeping_error: f64,
    /// Largest per-step `|f_n − f_n^dense|`.
    pub max_step_error: f64,
    pub max_sre_mismatch: f64,
    /// Accepted circuits with `| |⟨dense|replayed⟩|² − ∏ f_n | < 1e-6`.
    pub within_bookkeeping: usize,
    /// Circuits that failed with an error (for example an outcome that the
    /// exact state cannot produce).
    pub errors: usize,
}

/// Co-simulates random circuits until `count` of them satisfy `accept`, or
/// `max_attempts` circuits have been tried.
pub fn cosim_batch(
    family_seed: u64,
    max_n: usize,
    rates: &[f64],
    count: usize,
    max_attempts: usize,
    accept: impl Fn(&CoSimReport) -> bool,
) -> BatchSummary {
    let mut s = BatchSummary {
        accepted: 0,
        attempted: 0,
        min_fidelity: 1.0,
        max_bookkeeping_error: 0.0,
        max_step_error: 0.0,
        max_sre_mismatch: 0.0,
        within_bookkeeping: 0,
        errors: 0,
    };
    let mut index = 0;
    while s.accepted < count && s.attempted < max_attempts {
        let cfg = random_circuit_config(family_seed, index, max_n, rates);
        index += 1;
        s.attempted += 1;
        match cosimulate(&cfg, 0) {
            Ok(r) if accept(&r) => {
                s.accepted += 1;
                s.min_fidelity = s.min_fidelity.min(r.fidelity);
                let gap = (r.fidelity - r.product_f).abs();
                s.max_bookkeeping_error = s.max_bookkeeping_error.max(gap);
                if gap < 1e-6 {
                    s.within_bookkeeping += 1;
                }
                s.max_step_error = s.max_step_error.max(r.max_step_error);
                s.max_sre_mismatch = s.max_sre_mismatch.max(r.sre_mismatch);
            }
            Ok(_) => {}
            Err(_) => s.errors += 1,
        }
    }
    s
}

/// Largest amplitude error of `T|ψ⟩⊗|0⟩ = √2 (1+Z_A)/2 CX_{t→A} (|ψ⟩⊗|T⟩)`
/// over `trials` random `n`-qubit states and targets.
pub fn gadget_identity_error<R: Rng + ?Sized>(n: usize, trials: usize, rng: &mut R) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi = DenseState::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect())?;
        let t = rng.random_range(0..n);

        let mut lhs = psi.clone();
        lhs.apply_t(t)?;
        let lhs = lhs.with_qubit(&SingleQubitState::zero())?;

        let mut rhs = psi.with_qubit(&resource_state())?;
        rhs.apply_gates(&[GateRecord::cx(t, n)])?;
        let mut z = rhs.clone();
        z.apply_pauli(&PauliString::single(n + 1, n, Pauli::Z)?)?;
        let s2 = std::f64::consts::SQRT_2;
        for (a, b) in lhs
            .amplitudes()
            .iter()
            .zip(rhs.amplitudes().iter().zip(z.amplitudes()))
        {
            let r = (b.0 + b.1) * (s2 / 2.0);
            worst = worst.max((a - r).norm());
        }
    }
    Ok(worst)
}

/// Runs the gadget on a random product state after a random Clifford and
/// returns the fidelity between the recycled `N`-qubit state with `|0⟩`
/// appended and the `(N+1)`-qubit state just before recycling.
pub fn recycling_fidelity<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<f64> {
    let mut state = ProductState::random(n, rng);
    let mut u = CliffordTableau::identity_with_log(n);
    for layer in 1..=3 {
        let gates = crate::experiment::random_layer(rng, n, layer, crate::Boundary::Ring);
        u.compose(&gates)?;
    }
    let target = rng.random_range(0..n);
    let a = n;
    state.push(resource_state());
    u.add_qubit();
    u.compose(&[GateRecord::cx(target, a)])?;
    let cfg = VariationalConfig::default();
    let report = iccr_step(
        &mut state,
        &mut u,
        a,
        OutcomePolicy::PostselectPlus,
        rng,
        &cfg,
    )?;
    let before = replay(&state, &u)?;
    recycle_ancilla(&mut state, &mut u, a, report.target_site)?;
    let after = replay(&state, &u)?.with_qubit(&SingleQubitState::zero())?;
    fidelity(&before, &after)
}

/// Largest `|M_n^product − M_n^dense|` over `trials` random product states of
/// up to `max_n` qubits and orders 1, 2, 3.
pub fn sre_agreement<R: Rng + ?Sized>(max_n: usize, trials: usize, rng: &mut R) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let n = rng.random_range(1..=max_n);
        let state = ProductState::random(n, rng);
        let dense = DenseState::from_product(&state)?;
        for order in DEFAULT_ORDERS {
            worst = worst.max((sre(&state, order)? - dense.exact_sre(order)?).abs());
        }
    }
    Ok(worst)
}

/// One line of a validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Oracle equivalence on circuits whose steps are all exact.
pub fn check_exact_branches(max_n: usize, count: usize) -> Check {
    let s = cosim_batch(11, max_n, &[0.2, 0.5, 1.0], count, 50 * count, |r| {
        r.only_exact_branches()
    });
    Check {
        name: "exact-branch oracle equivalence".into(),
        passed: s.accepted == count && s.errors == 0 && s.min_fidelity > 1.0 - 1e-8,
        detail: format!(
            "{}/{} circuits (of {} tried), min fidelity 1-{:.3e}, errors {}",
            s.accepted,
            count,
            s.attempted,
            1.0 - s.min_fidelity,
            s.errors
        ),
    }
}

/// `|⟨dense|replayed⟩|² = ∏ f_n` on circuits with variational steps. The
/// detail also reports the per-step agreement of each `f_n` with its dense
/// value, which holds independently of the end-to-end comparison.
pub fn check_fidelity_bookkeeping(max_n: usize, count: usize) -> Check {
    let s = cosim_batch(12, max_n, &[0.2, 0.5, 1.0], count, 50 * count, |r| {
        r.n_large_variational > 0
    });
    Check {
        name: "fidelity bookkeeping".into(),
        passed: s.accepted == count && s.errors == 0 && s.max_bookkeeping_error < 1e-6,
        detail: format!(
            "{}/{} circuits, {} within 1e-6, max |F - prod f| {:.3e}, max per-step |f - f_dense| {:.3e}, errors {}",
            s.accepted,
            count,
            s.within_bookkeeping,
            s.max_bookkeeping_error,
            s.max_step_error,
            s.errors
        ),
    }
}

/// T-gadget identity and ancilla recycling.
pub fn check_gadget(max_n: usize, trials: usize) -> Check {
    let mut rng = SeededRng::seed_from_u64(13);
    let run = |rng: &mut SeededRng| -> Result<(f64, f64)> {
        let mut id_err: f64 = 0.0;
        let mut min_f: f64 = 1.0;
        for n in 1..=max_n.min(4) {
            id_err = id_err.max(gadget_identity_error(n, trials, rng)?);
        }
        for k in 0..trials {
            let n = 1 + k % max_n.min(6);
            min_f = min_f.min(recycling_fidelity(n, rng)?);
        }
        Ok((id_err, min_f))
    };
    match run(&mut rng) {
        Ok((e, f)) => Check {
            name: "T-gadget identity and recycling".into(),
            passed: e < 1e-12 && f > 1.0 - 1e-10,
            detail: format!(
                "identity error {e:.3e}, recycling fidelity 1-{:.3e}",
                1.0 - f
            ),
        },
        Err(e) => Check {
            name: "T-gadget identity and recycling".into(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Product-state entropies against the full Pauli spectrum, plus closed forms.
pub fn check_sre(max_n: usize, trials: usize) -> Check {
    let mut rng = SeededRng::seed_from_u64(14);
    let worst = sre_agreement(max_n.min(crate::dense::SRE_CAP), trials, &mut rng);
    let t = crate::magic::single_qubit_sre(&SingleQubitState::t_state(), 2.0).unwrap_or(f64::NAN);
    let q = crate::magic::single_qubit_sre(&SingleQubitState::from_angle(PI / 7.0), 2.0)
        .unwrap_or(f64::NAN);
    let dt = (t - (4.0f64 / 3.0).log2()).abs();
    let dq = (q - 0.391_419_919_936_801_5).abs();
    match worst {
        Ok(w) => Check {
            name: "stabilizer Renyi entropies".into(),
            passed: w < 1e-9 && dt < 1e-9 && dq < 1e-9,
            detail: format!("max |dM| {w:.3e}, m2(T) {t:.12}, m2(pi/7) {q:.12}"),
        },
        Err(e) => Check {
            name: "stabilizer Renyi entropies".into(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// The dense-oracle checks at the given size and sample counts.
pub fn oracle_suite(
    max_n: usize,
    exact_circuits: usize,
    variational_circuits: usize,
    trials: usize,
) -> Vec<Check> {
    vec![
        check_exact_branches(max_n, exact_circuits),
        check_fidelity_bookkeeping(max_n, variational_circuits),
        check_gadget(max_n, trials),
        check_sre(max_n, trials),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_circuit_matches_dense() {
        let cfg = ExperimentConfig {
            n_qubits: 4,
            depth: 6,
            meas_rate: 1.0,
            ..Default::default()
        };
        let r = cosimulate(&cfg, 0).unwrap();
        assert!(r.n_steps > 0);
        assert!(r.max_step_error < 1e-9, "{r:?}");
        if r.only_exact_branches() {
            assert!(r.fidelity > 1.0 - 1e-10, "{r:?}");
        }
        assert!(r.sre_mismatch < 1e-9);
    }

    #[test]
    fn per_step_fidelities_match_dense() {
        for k in 0..20 {
            let cfg = random_circuit_config(3, k, 6, &[0.2, 0.5]);
            let r = cosimulate(&cfg, 0).unwrap();
            assert!(r.max_step_error < 1e-9, "{cfg:?} {r:?}");
            assert!(r.sre_mismatch < 1e-9);
        }
    }

    #[test]
    fn t_gates_in_cosimulation() {
        let cfg = ExperimentConfig {
            n_qubits: 4,
            depth: 5,
            meas_rate: 0.3,
            t_gate_rate: 0.3,
            initial_angle: 0.0,
            ..Default::default()
        };
        let r = cosimulate(&cfg, 2).unwrap();
        assert!(r.max_step_error < 1e-9, "{r:?}");
    }

    #[test]
    fn gadget_checks() {
        let mut rng = SeededRng::seed_from_u64(1);
        assert!(gadget_identity_error(3, 10, &mut rng).unwrap() < 1e-12);
        for n in 1..=4 {
            assert!(recycling_fidelity(n, &mut rng).unwrap() > 1.0 - 1e-10);
        }
    }
}
