use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use iccr::experiment::{linear_fit, parse_orders, reports_to_json_lines, run_experiment_logged};
use iccr::validation::oracle_suite;
use iccr::{run_experiment, run_trajectory, ExperimentConfig, IccrError};

#[derive(Parser, Debug)]
#[command(name = "iccr", version, about = "Magic in monitored Clifford circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration and write the aggregated CSV.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of qubits.
        #[arg(long)]
        n: Option<usize>,
        /// Measurement rate.
        #[arg(long)]
        p: Option<f64>,
        /// Output CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every step report as JSON lines to this file.
        #[arg(long)]
        log_iterations: Option<PathBuf>,
    },
    /// Run a grid over measurement rates and sizes, one CSV per point.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Sizes, as `a,b,c` or `start:stop:step`.
        #[arg(long)]
        n: Option<String>,
        /// Measurement rates, as `a,b,c` or `start:stop:step`.
        #[arg(long)]
        p: Option<String>,
        /// Directory for the output files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check the simulator against the statevector oracle.
    Validate {
        /// Largest register used in the checks.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Random circuits whose steps are all exact.
        #[arg(long, default_value_t = 500)]
        circuits: usize,
        /// Random circuits with variational steps.
        #[arg(long, default_value_t = 200)]
        variational_circuits: usize,
        /// Random states per state check.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Time single trajectories for several sizes and fit the scaling exponent.
    Bench {
        /// Sizes, as `a,b,c` or `start:stop:step`.
        #[arg(long, default_value = "125,250,500,1000")]
        n: String,
        #[arg(long, default_value_t = 50)]
        depth: usize,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trajectories: Option<usize>,
    /// `ring` or `open`.
    #[arg(long)]
    boundary: Option<String>,
    /// Initial single-qubit angle in radians.
    #[arg(long)]
    angle: Option<f64>,
    /// Rényi orders, comma separated.
    #[arg(long)]
    orders: Option<String>,
    /// T-gate rate per qubit and layer.
    #[arg(long)]
    t_rate: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
}

enum Failure {
    Config(String),
    Validation,
}

impl From<IccrError> for Failure {
    fn from(e: IccrError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl CommonArgs {
    /// Config file (if any) with flag overrides applied. Not yet validated.
    fn load(&self) -> Result<(ExperimentConfig, bool), Failure> {
        let mut cfg = ExperimentConfig::default();
        let mut depth_given = false;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_config_text(&text)?;
            depth_given = text
                .lines()
                .any(|l| l.split_once('=').is_some_and(|(k, _)| k.trim() == "depth"));
        }
        if let Some(d) = self.depth {
            cfg.depth = d;
            depth_given = true;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(k) = self.trajectories {
            cfg.n_trajectories = k;
        }
        if let Some(b) = &self.boundary {
            cfg.boundary = b.parse()?;
        }
        if let Some(a) = self.angle {
            cfg.initial_angle = a;
        }
        if let Some(o) = &self.orders {
            cfg.sre_orders = parse_orders(o)?;
        }
        if let Some(r) = self.t_rate {
            cfg.t_gate_rate = r;
        }
        if let Some(r) = self.record_every {
            cfg.record_every = r;
        }
        Ok((cfg, depth_given))
    }
}

/// Parses `a,b,c` or an inclusive range `start:stop:step`.
fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Config(format!("bad grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let step: f64 = step.trim().parse().map_err(|_| bad())?;
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count)
                .map(|k| ((start + k as f64 * step) * 1e10).round() / 1e10)
                .collect())
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| bad()))
            .collect(),
        _ => Err(bad()),
    }
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>, Failure> {
    parse_grid(spec)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Failure::Config(format!("bad size {v}")))
            }
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

fn run(
    common: &CommonArgs,
    n: Option<usize>,
    p: Option<f64>,
    out: Option<PathBuf>,
    log: Option<PathBuf>,
) -> Result<(), Failure> {
    let (mut cfg, _) = common.load()?;
    if let Some(n) = n {
        cfg.n_qubits = n;
    }
    if let Some(p) = p {
        cfg.meas_rate = p;
    }
    if out.is_some() {
        cfg.output_path = out;
    }
    cfg.validate()?;
    let table = match &log {
        Some(path) => {
            let (table, logs) = run_experiment_logged(&cfg)?;
            write_file(path, &reports_to_json_lines(&logs)?)?;
            table
        }
        None => run_experiment(&cfg)?,
    };
    let csv = table.to_csv();
    match &cfg.output_path {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn sweep(
    common: &CommonArgs,
    n: Option<String>,
    p: Option<String>,
    out_dir: PathBuf,
) -> Result<(), Failure> {
    let (base, depth_given) = common.load()?;
    let sizes = match n {
        Some(spec) => parse_sizes(&spec)?,
        None => vec![base.n_qubits],
    };
    let rates = match p {
        Some(spec) => parse_grid(&spec)?,
        None => vec![base.meas_rate],
    };
    for &n in &sizes {
        for &p in &rates {
            let mut cfg = base.clone();
            cfg.n_qubits = n;
            cfg.meas_rate = p;
            if !depth_given {
                cfg.depth = 2 * n;
            }
            cfg.validate()?;
            let path = out_dir.join(format!("n{n}_p{p}.csv"));
            write_file(&path, &run_experiment(&cfg)?.to_csv())?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn validate(
    max_n: usize,
    circuits: usize,
    variational_circuits: usize,
    trials: usize,
) -> Result<(), Failure> {
    if !(1..=iccr::dense::TABLEAU_CAP).contains(&max_n) {
        return Err(Failure::Config(format!(
            "max-n must lie in 1..={}",
            iccr::dense::TABLEAU_CAP
        )));
    }
    let checks = oracle_suite(max_n, circuits, variational_circuits, trials);
    for c in &checks {
        println!("{c}");
    }
    if checks.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn bench(n: &str, depth: usize, p: f64, seed: u64) -> Result<(), Failure> {
    let sizes = parse_sizes(n)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    // Build the two-qubit Clifford table before the first timed run.
    iccr::clifford2::table();
    println!("{:>8} {:>12}", "N", "seconds");
    for &n in &sizes {
        let cfg = ExperimentConfig {
            n_qubits: n,
            depth,
            meas_rate: p,
            seed,
            record_every: depth,
            ..Default::default()
        };
        cfg.validate()?;
        let start = Instant::now();
        run_trajectory(&cfg, 0)?;
        let secs = start.elapsed().as_secs_f64();
        println!("{n:>8} {secs:>12.4}");
        xs.push((n as f64).ln());
        ys.push(secs.max(1e-9).ln());
    }
    if let Some((slope, _, r2)) = linear_fit(&xs, &ys) {
        println!("log-log slope {slope:.3} (R^2 {r2:.3})");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run {
            common,
            n,
            p,
            out,
            log_iterations,
        } => run(&common, n, p, out, log_iterations),
        Command::Sweep {
            common,
            n,
            p,
            out_dir,
        } => sweep(&common, n, p, out_dir),
        Command::Validate {
            max_n,
            circuits,
            variational_circuits,
            trials,
        } => validate(max_n, circuits, variational_circuits, trials),
        Command::Bench { n, depth, p, seed } => bench(&n, depth, p, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(2)
        }
    }
}
