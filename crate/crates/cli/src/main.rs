use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entcov::criterion::{criterion_matrix_from_data, detect, CorrelationData, DEFAULT_TOL};
use entcov::observables::{collective_spin_set, hp_quadrature_set};
use entcov::reference::{witness_optimize, AnnealParams};
use entcov::states::spin_ensemble_werner;
use entcov::suite::{run_uncertainty_suite, SuiteConfig};
use entcov::sweep::{
    flip_points, render_csv, run_spin_ensemble, run_werner_bell, spin_ensemble_table,
    werner_bell_table, Criterion, Experiment, Grid, SweepConfig, WITNESS_THRESHOLD,
};
use entcov::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "entcov",
    version,
    about = "Covariance-matrix entanglement criterion sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the Werner-Bell family over μ with the Pauli-product set.
    WernerBell(WernerBellArgs),
    /// Sweep the two-ensemble spin state over (μ, t).
    SpinEnsemble(SpinEnsembleArgs),
    /// Evaluate the criterion on a measured correlation file (JSON).
    FromData(FromDataArgs),
    /// Randomized uncertainty-relation property battery.
    UncertaintySuite(SuiteArgs),
    /// Decomposable witness search at one spin-ensemble point.
    Witness(WitnessArgs),
    /// Write the correlation data of one simulated spin-ensemble point.
    ExportData(ExportArgs),
}

#[derive(Args, Debug)]
struct MuGrid {
    #[arg(long, default_value_t = 0.0)]
    mu_min: f64,
    #[arg(long, default_value_t = 1.0)]
    mu_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 201)]
    mu_steps: usize,
}

impl MuGrid {
    fn grid(&self) -> Grid {
        Grid::new(self.mu_min, self.mu_max, self.mu_steps)
    }
}

#[derive(Args, Debug)]
struct AnnealArgs {
    #[arg(long, default_value_t = 300)]
    sweeps: usize,
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    #[arg(long, default_value_t = 0.98)]
    decay: f64,
    /// Coefficient box, in units of 1/(M+1)².
    #[arg(long = "box", default_value_t = 10.0)]
    box_factor: f64,
}

impl AnnealArgs {
    fn params(&self) -> AnnealParams {
        AnnealParams {
            sweeps: self.sweeps,
            t0: self.t0,
            decay: self.decay,
            box_factor: self.box_factor,
            ..AnnealParams::default()
        }
    }
}

#[derive(Args, Debug)]
struct WernerBellArgs {
    #[command(flatten)]
    mu: MuGrid,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpinEnsembleArgs {
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    mu_min: f64,
    #[arg(long, default_value_t = 1.0)]
    mu_max: f64,
    #[arg(long, default_value_t = 1)]
    mu_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long, default_value_t = 0.5)]
    t_max: f64,
    #[arg(long, default_value_t = 200)]
    t_steps: usize,
    /// Any of cm, ds, ppt, ew.
    #[arg(long, value_delimiter = ',', default_value = "cm,ds,ppt", value_parser = parse_criterion)]
    criteria: Vec<Criterion>,
    /// Row-major 3x3 rotation of the spin axes.
    #[arg(long, num_args = 9, allow_negative_numbers = true, value_name = "R")]
    rotate: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    anneal: AnnealArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FromDataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    anneal: AnnealArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExportSet {
    /// S^x, S^y, S^z on each ensemble.
    Spins,
    /// Holstein-Primakoff quadratures.
    Quadratures,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value_t = ExportSet::Spins)]
    set: ExportSet,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    /// A battery or check ran but found violations.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn format_values(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.6e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn werner_bell(args: WernerBellArgs) -> Result<(), Failure> {
    let mut cfg = SweepConfig::werner_bell(args.mu.grid());
    cfg.tolerance = args.tol;
    cfg.out = args.out.as_ref().map(|p| p.display().to_string());
    let rows = run_werner_bell(&cfg)?;
    emit(
        args.out.as_ref(),
        &render_csv(&cfg, &werner_bell_table(&rows))?,
    )?;
    let mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    let flags: Vec<bool> = rows.iter().map(|r| r.report.is_entangled()).collect();
    for x in flip_points(&mus, &flags) {
        eprintln!("cm verdict flips at mu = {x}");
    }
    Ok(())
}

fn spin_ensemble(args: SpinEnsembleArgs) -> Result<(), Failure> {
    let mut cfg = SweepConfig::spin_ensemble(
        args.m,
        Grid::new(args.mu_min, args.mu_max, args.mu_steps),
        Grid::new(args.t_min, args.t_max, args.t_steps),
        args.criteria,
    );
    cfg.tolerance = args.tol;
    cfg.seed = args.seed;
    cfg.anneal = args.anneal.params();
    cfg.out = args.out.as_ref().map(|p| p.display().to_string());
    if let Some(r) = &args.rotate {
        cfg.rotation = Some([[r[0], r[1], r[2]], [r[3], r[4], r[5]], [r[6], r[7], r[8]]]);
    }
    let rows = run_spin_ensemble(&cfg)?;
    emit(
        args.out.as_ref(),
        &render_csv(&cfg, &spin_ensemble_table(&cfg, &rows))?,
    )?;

    let ts = cfg.t.points();
    for mu_index in 0..cfg.mu.len() {
        let line: Vec<_> = rows.iter().filter(|r| r.mu_index == mu_index).collect();
        for c in &cfg.criteria {
            let flags: Vec<bool> = line
                .iter()
                .filter_map(|r| r.detected(*c, cfg.tolerance))
                .collect();
            for x in flip_points(&ts, &flags) {
                eprintln!(
                    "{c} verdict flips at mu = {}, t = {x}",
                    cfg.mu.point(mu_index)
                );
            }
        }
    }
    Ok(())
}

fn from_data(args: FromDataArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.input)?;
    let data = CorrelationData::from_json(&text)?;
    let report = detect(&criterion_matrix_from_data(&data)?, args.tol)?;
    println!("labels: {}", data.labels.join(" "));
    println!("eigenvalues: {}", format_values(&report.eigenvalues));
    println!("min_eigenvalue: {:.6e}", report.min_eigenvalue);
    println!("determinant: {:.6e}", report.determinant);
    println!("verdict: {}", report.verdict);
    Ok(())
}

fn uncertainty_suite(args: SuiteArgs) -> Result<(), Failure> {
    let report = run_uncertainty_suite(&SuiteConfig {
        trials: args.trials,
        max_n: args.max_n,
        seed: args.seed,
    })?;
    for o in &report.outcomes {
        println!(
            "{} {} checked={} failures={} worst={:.3e} tol={:.0e}",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.checked,
            o.failures,
            o.worst,
            o.tolerance
        );
    }
    if !report.passed() {
        return Err(Failure::Check(
            "uncertainty property battery reported failures".into(),
        ));
    }
    Ok(())
}

fn witness(args: WitnessArgs) -> Result<(), Failure> {
    let params = args.anneal.params();
    let rho = spin_ensemble_werner(args.m, args.mu, args.t)?;
    let result = witness_optimize(&rho, args.m, &params, args.seed)?;
    let text = serde_json::to_string_pretty(&serde_json::json!({
        "experiment": Experiment::Witness,
        "M": args.m,
        "mu": args.mu,
        "t": args.t,
        "params": params,
        "result": result,
        "detected": result.min_expectation < -WITNESS_THRESHOLD,
    }))
    .map_err(|e| Error::Numerical(e.to_string()))?;
    emit(args.out.as_ref(), &(text + "\n"))
}

fn export_data(args: ExportArgs) -> Result<(), Failure> {
    let set = match args.set {
        ExportSet::Spins => collective_spin_set(args.m)?,
        ExportSet::Quadratures => hp_quadrature_set(args.m)?,
    };
    let rho = spin_ensemble_werner(args.m, args.mu, args.t)?;
    let data = CorrelationData::from_state(&rho, &set)?;
    emit(args.out.as_ref(), &(data.to_json() + "\n"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::WernerBell(a) => werner_bell(a),
        Command::SpinEnsemble(a) => spin_ensemble(a),
        Command::FromData(a) => from_data(a),
        Command::UncertaintySuite(a) => uncertainty_suite(a),
        Command::Witness(a) => witness(a),
        Command::ExportData(a) => export_data(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.use_stderr() {
                true => ExitCode::from(EXIT_USAGE),
                false => ExitCode::SUCCESS,
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(EXIT_NUMERICAL),
                _ => ExitCode::from(EXIT_INPUT),
            }
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
