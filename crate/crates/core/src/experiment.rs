//! Monitored brick-wall circuits: trajectories, aggregation and CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford2::random_two_qubit_clifford;
use crate::error::{IccrError, Result};
use crate::gadget::inject_t_gate;
use crate::gate::GateRecord;
use crate::magic::{MagicReport, DEFAULT_ORDERS};
use crate::product_state::ProductState;
use crate::renorm::{iccr_step, IterationReport, OutcomePolicy, VariationalConfig};
use crate::tableau::CliffordTableau;
use crate::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    Ring,
    Open,
}

impl FromStr for Boundary {
    type Err = IccrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ring" | "periodic" => Ok(Boundary::Ring),
            "open" => Ok(Boundary::Open),
            other => Err(IccrError::Config(format!("unknown boundary {other:?}"))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Ring => "ring",
            Boundary::Open => "open",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    /// Number of brick-wall layers.
    pub depth: usize,
    /// Probability that a qubit is measured after a layer.
    pub meas_rate: f64,
    pub n_trajectories: usize,
    pub seed: u64,
    pub boundary: Boundary,
    /// Every qubit starts in `cos θ |0⟩ + sin θ |1⟩`.
    pub initial_angle: f64,
    pub sre_orders: Vec<f64>,
    /// Probability that a qubit receives a T gate after a layer.
    pub t_gate_rate: f64,
    pub output_path: Option<PathBuf>,
    /// Record observables every this many layers (and at the last layer).
    pub record_every: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_qubits: 16,
            depth: 32,
            meas_rate: 0.1,
            n_trajectories: 1,
            seed: 0,
            boundary: Boundary::Ring,
            initial_angle: std::f64::consts::PI / 7.0,
            sre_orders: DEFAULT_ORDERS.to_vec(),
            t_gate_rate: 0.0,
            output_path: None,
            record_every: 1,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| IccrError::Config(format!("bad value {value:?} for {key}")))
}

/// Parses a comma-separated list of Rényi orders.
pub fn parse_orders(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value("sre_orders", s))
        .collect()
}

impl ExperimentConfig {
    /// Sets one field from its name and textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "n_qubits" => self.n_qubits = parse_value(key, value)?,
            "depth" => self.depth = parse_value(key, value)?,
            "meas_rate" => self.meas_rate = parse_value(key, value)?,
            "n_trajectories" => self.n_trajectories = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "boundary" => self.boundary = value.parse()?,
            "initial_angle" => self.initial_angle = parse_value(key, value)?,
            "sre_orders" => self.sre_orders = parse_orders(value)?,
            "t_gate_rate" => self.t_gate_rate = parse_value(key, value)?,
            "output_path" => {
                let v = value.trim();
                self.output_path = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "record_every" => self.record_every = parse_value(key, value)?,
            other => return Err(IccrError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                IccrError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| IccrError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_config_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(IccrError::Config(m.to_string()));
        if self.n_qubits == 0 {
            return err("n_qubits must be positive");
        }
        if self.depth == 0 {
            return err("depth must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.meas_rate) {
            return err("meas_rate must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.t_gate_rate) {
            return err("t_gate_rate must lie in [0, 1]");
        }
        if self.n_trajectories == 0 {
            return err("n_trajectories must be positive");
        }
        if self.record_every == 0 {
            return err("record_every must be positive");
        }
        if !self.initial_angle.is_finite() {
            return err("initial_angle must be finite");
        }
        if self.sre_orders.is_empty() {
            return err("sre_orders must not be empty");
        }
        for &n in &self.sre_orders {
            if !n.is_finite() || n <= 0.0 {
                return Err(IccrError::InvalidOrder(n));
            }
        }
        Ok(())
    }

    /// Config file text that reproduces this configuration.
    pub fn to_config_text(&self) -> String {
        let orders: Vec<String> = self.sre_orders.iter().map(|n| n.to_string()).collect();
        format!(
            "n_qubits = {}\ndepth = {}\nmeas_rate = {}\nn_trajectories = {}\nseed = {}\nboundary = {}\ninitial_angle = {}\nsre_orders = {}\nt_gate_rate = {}\noutput_path = {}\nrecord_every = {}\n",
            self.n_qubits,
            self.depth,
            self.meas_rate,
            self.n_trajectories,
            self.seed,
            self.boundary,
            self.initial_angle,
            orders.join(","),
            self.t_gate_rate,
            self.output_path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            self.record_every
        )
    }
}

/// Random generator of trajectory `traj_index`: ChaCha8 keyed by `seed`, on
/// stream `traj_index`. Streams are independent, so adding trajectories does
/// not change existing ones.
pub fn trajectory_rng(seed: u64, traj_index: u64) -> SeededRng {
    let mut rng = SeededRng::seed_from_u64(seed);
    rng.set_stream(traj_index);
    rng
}

/// Qubit pairs of brick-wall layer `t` (1-based). Odd layers couple
/// `(0,1), (2,3), …`; even layers couple `(1,2), (3,4), …` and, on a ring
/// with an even number of qubits, `(N−1, 0)`.
pub fn layer_pairs(n: usize, t: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let start = if t % 2 == 1 { 0 } else { 1 };
    let mut pairs: Vec<(usize, usize)> = (start..n.saturating_sub(1))
        .step_by(2)
        .map(|a| (a, a + 1))
        .collect();
    if start == 1 && boundary == Boundary::Ring && n >= 3 && n % 2 == 0 {
        pairs.push((n - 1, 0));
    }
    pairs
}

/// One random brick-wall layer of two-qubit Cliffords.
pub fn random_layer<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    t: usize,
    boundary: Boundary,
) -> Vec<GateRecord> {
    layer_pairs(n, t, boundary)
        .into_iter()
        .map(|(a, b)| random_two_qubit_clifford(rng, a, b).expect("distinct sites"))
        .collect()
}

/// Sites selected independently with probability `rate`, ascending.
pub fn draw_sites<R: Rng + ?Sized>(rng: &mut R, n: usize, rate: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.random::<f64>() < rate).collect()
}

/// Hooks into a running trajectory. All methods default to no-ops.
pub trait TrajectoryObserver {
    fn gates(&mut self, _t: usize, _gates: &[GateRecord]) -> Result<()> {
        Ok(())
    }
    /// Called before every measurement or T gate with the current state.
    fn before_step(&mut self, _state: &ProductState, _u: &CliffordTableau) -> Result<()> {
        Ok(())
    }
    fn measured(
        &mut self,
        _t: usize,
        _report: &IterationReport,
        _state: &ProductState,
        _u: &CliffordTableau,
    ) -> Result<()> {
        Ok(())
    }
    fn t_gate(
        &mut self,
        _t: usize,
        _site: usize,
        _report: &IterationReport,
        _state: &ProductState,
        _u: &CliffordTableau,
    ) -> Result<()> {
        Ok(())
    }
}

impl TrajectoryObserver for () {}

/// Collects every report, tagged with its layer.
#[derive(Debug, Default)]
pub struct ReportLog {
    pub entries: StepLog,
}

impl TrajectoryObserver for ReportLog {
    fn measured(
        &mut self,
        t: usize,
        report: &IterationReport,
        _: &ProductState,
        _: &CliffordTableau,
    ) -> Result<()> {
        self.entries.push((t, report.clone()));
        Ok(())
    }

    fn t_gate(
        &mut self,
        t: usize,
        _: usize,
        report: &IterationReport,
        _: &ProductState,
        _: &CliffordTableau,
    ) -> Result<()> {
        self.entries.push((t, report.clone()));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: usize,
    /// `M_n / N` for each configured order.
    pub sre_density: Vec<f64>,
    pub nullity_density: f64,
    /// `ln ∏ f_n` over all steps so far.
    pub ln_fidelity: f64,
    /// Measurements performed so far.
    pub n_meas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryResult {
    pub rows: Vec<TrajectoryRow>,
}

/// Final state of a trajectory, for callers that need more than the rows.
#[derive(Debug, Clone)]
pub struct TrajectoryState {
    pub state: ProductState,
    pub tableau: CliffordTableau,
    pub result: TrajectoryResult,
}

fn record(
    cfg: &ExperimentConfig,
    t: usize,
    state: &ProductState,
    ln_f: f64,
    n_meas: usize,
) -> Result<TrajectoryRow> {
    let report = MagicReport::compute(state, &cfg.sre_orders)?;
    Ok(TrajectoryRow {
        t,
        sre_density: report.sre_densities().into_iter().map(|(_, m)| m).collect(),
        nullity_density: report.nullity_density(),
        ln_fidelity: ln_f,
        n_meas,
    })
}

/// Runs one trajectory.
///
/// Each layer `t = 1..=depth` composes random two-qubit Cliffords on the
/// brick-wall pairs, records observables if due, removes Born-sampled Z
/// measurements on Bernoulli(`meas_rate`) sites in ascending order, then
/// injects T gates on Bernoulli(`t_gate_rate`) sites. Row `t = 0` holds the
/// initial state.
pub fn run_trajectory_with<O: TrajectoryObserver + ?Sized>(
    cfg: &ExperimentConfig,
    traj_index: u64,
    keep_log: bool,
    observer: &mut O,
) -> Result<TrajectoryState> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let mut rng = trajectory_rng(cfg.seed, traj_index);
    let mut state = ProductState::from_angle(n, cfg.initial_angle);
    let mut u = if keep_log {
        CliffordTableau::identity_with_log(n)
    } else {
        CliffordTableau::identity(n)
    };
    let var = VariationalConfig::default();
    let mut ln_f = 0.0;
    let mut n_meas = 0;
    let mut rows = vec![record(cfg, 0, &state, ln_f, n_meas)?];
    for t in 1..=cfg.depth {
        let gates = random_layer(&mut rng, n, t, cfg.boundary);
        u.compose(&gates)?;
        observer.gates(t, &gates)?;
        if t % cfg.record_every == 0 || t == cfg.depth {
            rows.push(record(cfg, t, &state, ln_f, n_meas)?);
        }
        for j in draw_sites(&mut rng, n, cfg.meas_rate) {
            observer.before_step(&state, &u)?;
            let rep = iccr_step(
                &mut state,
                &mut u,
                j,
                OutcomePolicy::BornSample,
                &mut rng,
                &var,
            )?;
            ln_f += rep.step_fidelity.ln();
            n_meas += 1;
            observer.measured(t, &rep, &state, &u)?;
        }
        if cfg.t_gate_rate > 0.0 {
            for j in draw_sites(&mut rng, n, cfg.t_gate_rate) {
                observer.before_step(&state, &u)?;
                let rep = inject_t_gate(&mut state, &mut u, j, &mut rng, &var)?;
                ln_f += rep.step_fidelity.ln();
                observer.t_gate(t, j, &rep, &state, &u)?;
            }
        }
    }
    Ok(TrajectoryState {
        state,
        tableau: u,
        result: TrajectoryResult { rows },
    })
}

pub fn run_trajectory(cfg: &ExperimentConfig, traj_index: u64) -> Result<TrajectoryResult> {
    Ok(run_trajectory_with(cfg, traj_index, false, &mut ())?.result)
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub err: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        if values.is_empty() {
            return Stat {
                mean: f64::NAN,
                err: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return Stat { mean, err: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stat {
            mean,
            err: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedRow {
    pub t: usize,
    pub sre_density: Vec<Stat>,
    pub nullity_density: Stat,
    pub ln_fidelity: Stat,
    pub n_meas: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedTable {
    pub sre_orders: Vec<f64>,
    pub rows: Vec<AggregatedRow>,
}

/// Averages trajectories row by row, in trajectory order.
pub fn aggregate(orders: &[f64], results: &[TrajectoryResult]) -> AggregatedTable {
    let n_rows = results.first().map_or(0, |r| r.rows.len());
    let rows = (0..n_rows)
        .map(|k| {
            let col = |f: &dyn Fn(&TrajectoryRow) -> f64| -> Stat {
                Stat::of(&results.iter().map(|r| f(&r.rows[k])).collect::<Vec<_>>())
            };
            AggregatedRow {
                t: results[0].rows[k].t,
                sre_density: (0..orders.len())
                    .map(|o| col(&|r: &TrajectoryRow| r.sre_density[o]))
                    .collect(),
                nullity_density: col(&|r| r.nullity_density),
                ln_fidelity: col(&|r| r.ln_fidelity),
                n_meas: col(&|r| r.n_meas as f64),
            }
        })
        .collect();
    AggregatedTable {
        sre_orders: orders.to_vec(),
        rows,
    }
}

/// Runs all trajectories in parallel. The result does not depend on the
/// number of worker threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregatedTable> {
    cfg.validate()?;
    let results = (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|k| run_trajectory(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&cfg.sre_orders, &results))
}

/// Step reports of one trajectory, tagged with their layer.
pub type StepLog = Vec<(usize, IterationReport)>;

/// Like [`run_experiment`], also returning every trajectory's reports.
pub fn run_experiment_logged(cfg: &ExperimentConfig) -> Result<(AggregatedTable, Vec<StepLog>)> {
    cfg.validate()?;
    let runs = (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|k| {
            let mut log = ReportLog::default();
            let r = run_trajectory_with(cfg, k, false, &mut log)?;
            Ok((r.result, log.entries))
        })
        .collect::<Result<Vec<_>>>()?;
    let (results, logs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok((aggregate(&cfg.sre_orders, &results), logs))
}

fn order_label(n: f64) -> String {
    if n.fract() == 0.0 {
        format!("m{}", n as i64)
    } else {
        format!("m{n}")
    }
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

impl AggregatedTable {
    /// CSV with header `t,m1,m1_err,…,nullity_density,nullity_err,lnF,lnF_err,n_meas`
    /// and floats at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for &n in &self.sre_orders {
            let l = order_label(n);
            let _ = write!(out, ",{l},{l}_err");
        }
        out.push_str(",nullity_density,nullity_err,lnF,lnF_err,n_meas\n");
        for r in &self.rows {
            let _ = write!(out, "{}", r.t);
            for s in &r.sre_density {
                let _ = write!(out, ",{},{}", num(s.mean), num(s.err));
            }
            let _ = writeln!(
                out,
                ",{},{},{},{},{}",
                num(r.nullity_density.mean),
                num(r.nullity_density.err),
                num(r.ln_fidelity.mean),
                num(r.ln_fidelity.err),
                num(r.n_meas.mean)
            );
        }
        out
    }

    /// Mean of the order-`n` entropy density in the last row.
    pub fn final_sre_density(&self, n: f64) -> Option<f64> {
        let k = self.sre_orders.iter().position(|&o| o == n)?;
        self.rows.last().map(|r| r.sre_density[k].mean)
    }
}

/// JSON lines, one report per line, tagged with trajectory and layer.
/// Sites in the output are 0-based.
pub fn reports_to_json_lines(logs: &[StepLog]) -> Result<String> {
    #[derive(Serialize)]
    struct Line<'a> {
        trajectory: usize,
        t: usize,
        #[serde(flatten)]
        report: &'a IterationReport,
    }
    let mut out = String::new();
    for (k, log) in logs.iter().enumerate() {
        for (t, report) in log {
            let line = serde_json::to_string(&Line {
                trajectory: k,
                t: *t,
                report,
            })
            .map_err(|e| IccrError::Config(e.to_string()))?;
            out.push_str(&line);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Least-squares line `y = slope·x + intercept` and its `R²`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some((slope, my - slope * mx, r2))
}
