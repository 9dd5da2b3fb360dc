//! Command-line front end: sampling, spectra, headline statistics, the
//! exact-identity verification suite, batch experiments, and figures.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime/solver error, 3
//! verification-suite failure. Every seeded invocation is reproducible
//! byte for byte.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wigner::eigensolver::{decompose, decompose_values};
use wigner::ensemble::{sample_wigner, truncate, EntryLaw, TruncationSpec, WignerConfig};
use wigner::error::Error;
use wigner::experiments::{
    identity_report, load_config, parse_n_spec, run, run_figure, standard_z_grid,
    ExperimentConfig, ExperimentKind, FigureConfig, FigureKind, IdentityReport,
};
use wigner::statistics::{
    delocalization_stat, kolmogorov_distance, t_statistic, zeta_statistic, SpectralEdge,
};

#[derive(Parser)]
#[command(
    name = "wigner",
    version,
    about = "Spectral statistics of Wigner matrices with heavy-tailed entries",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Wigner matrix and print it as dense CSV rows
    Sample(MatrixArgs),
    /// Sample, diagonalize, and print the eigenvalues in ascending order
    Spectrum(MatrixArgs),
    /// Print one CSV line with delta_star, t_stat, zeta, v_stat
    Stats(MatrixArgs),
    /// Run the exact-identity and inequality suite and print the residual table
    Verify(VerifyArgs),
    /// Run a batch experiment and write records.csv plus manifest.json
    Experiment(ExperimentArgs),
    /// Render one of the standard figures (SVG plus companion CSV)
    Figure(FigureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawChoice {
    Gaussian,
    Pareto,
}

#[derive(Args)]
struct MatrixArgs {
    /// Entry law for the upper triangle
    #[arg(long, value_enum, default_value = "gaussian")]
    law: LawChoice,
    /// Pareto tail index (requires --law pareto; must exceed 3)
    #[arg(long)]
    mu: Option<f64>,
    /// Matrix dimension
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Clip entries at d_const * n^EXPONENT and recenter/rescale
    #[arg(long, value_name = "EXPONENT")]
    truncate: Option<f64>,
    /// Clipping prefactor (requires --truncate)
    #[arg(long, value_name = "D", default_value_t = 1.0)]
    d_const: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Entry law for the upper triangle
    #[arg(long, value_enum, default_value = "gaussian")]
    law: LawChoice,
    /// Pareto tail index (requires --law pareto; must exceed 3)
    #[arg(long)]
    mu: Option<f64>,
    /// Matrix dimension
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment kind: esd_histogram, kolmogorov_curve, edge_tw,
    /// delocalization, identity_suite, or local_law_scan
    kind: Option<String>,
    /// Read the whole run description from a config file instead of flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Entry law for the upper triangle
    #[arg(long, value_enum)]
    law: Option<LawChoice>,
    /// Pareto tail index (requires --law pareto; must exceed 3)
    #[arg(long)]
    mu: Option<f64>,
    /// Matrix dimensions: a single integer, a comma list, or a:b:step
    #[arg(long)]
    n: Option<String>,
    /// Trials per dimension
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Clip entries at d_const * n^EXPONENT and recenter/rescale
    #[arg(long, value_name = "EXPONENT")]
    truncate: Option<f64>,
    /// Clipping prefactor (requires --truncate)
    #[arg(long, value_name = "D")]
    d_const: Option<f64>,
    /// Histogram bins for side outputs
    #[arg(long)]
    bins: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (any count reproduces the same bytes)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure to render: fig1, fig2, fig3, or fig4
    kind: String,
    /// Matrix dimension override; a range a:b:step sets the fig2 grid
    #[arg(long)]
    n: Option<String>,
    /// Trials per panel override
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Histogram bins
    #[arg(long, default_value_t = 70)]
    bins: usize,
    /// Truncation exponent for the truncated series
    #[arg(long, value_name = "EXPONENT")]
    truncate: Option<f64>,
    /// Clipping prefactor (requires --truncate)
    #[arg(long, value_name = "D")]
    d_const: Option<f64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (any count reproduces the same bytes)
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

/// Failures routed to the exit-code taxonomy.
enum CliError {
    Usage(String),
    Runtime(String),
    /// The verify table has already been printed.
    Verification,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn main() {
    std::process::exit(run_cli());
}

fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is
            // a usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            1
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            2
        }
        Err(CliError::Verification) => 3,
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sample(args) => sample_cmd(&args),
        Command::Spectrum(args) => spectrum_cmd(&args),
        Command::Stats(args) => stats_cmd(&args),
        Command::Verify(args) => verify_cmd(&args),
        Command::Experiment(args) => experiment_cmd(args),
        Command::Figure(args) => figure_cmd(&args),
    }
}

fn entry_law(law: LawChoice, mu: Option<f64>) -> Result<EntryLaw<f64>, CliError> {
    match (law, mu) {
        (LawChoice::Gaussian, None) => Ok(EntryLaw::Gaussian),
        (LawChoice::Gaussian, Some(_)) => {
            Err(CliError::Usage("--mu only applies to --law pareto".into()))
        }
        (LawChoice::Pareto, Some(mu)) => Ok(EntryLaw::pareto(mu).map_err(CliError::from)?),
        (LawChoice::Pareto, None) => {
            Err(CliError::Usage("--law pareto requires --mu".into()))
        }
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl MatrixArgs {
    /// The sampled matrix, truncated when requested.
    fn build_matrix(&self) -> Result<wigner::SymmetricMatrix64, CliError> {
        let law = entry_law(self.law, self.mu)?;
        if self.n < 2 {
            return Err(CliError::Usage("--n must be at least 2".into()));
        }
        let w = sample_wigner(&WignerConfig { n: self.n, law, seed: self.seed });
        match self.truncate {
            None => Ok(w),
            Some(exponent) => {
                let spec = TruncationSpec::new(exponent, self.d_const)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(truncate(&w, &spec, law).map_err(CliError::from)?.breve)
            }
        }
    }
}

fn sample_cmd(args: &MatrixArgs) -> Result<(), CliError> {
    let w = args.build_matrix()?;
    let mut out = String::new();
    for j in 0..w.n() {
        let row: Vec<String> = (0..w.n()).map(|k| fmt_value(w.entry(j, k))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn spectrum_cmd(args: &MatrixArgs) -> Result<(), CliError> {
    let w = args.build_matrix()?;
    let values = decompose_values(&w).map_err(CliError::from)?;
    let mut out = String::new();
    for v in values {
        out.push_str(&fmt_value(v));
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn stats_cmd(args: &MatrixArgs) -> Result<(), CliError> {
    let w = args.build_matrix()?;
    let spectral = decompose(&w).map_err(CliError::from)?;
    let n = w.n();
    let delta_star = kolmogorov_distance(spectral.eigenvalues());
    let t_stat = t_statistic(delta_star, n).map_err(CliError::from)?;
    let zeta = zeta_statistic(spectral.lambda_max(), n, SpectralEdge::Upper);
    let v_stat = delocalization_stat(&spectral);
    println!(
        "{},{},{},{}",
        fmt_value(delta_star),
        fmt_value(t_stat),
        fmt_value(zeta),
        fmt_value(v_stat)
    );
    Ok(())
}

fn verify_cmd(args: &VerifyArgs) -> Result<(), CliError> {
    let law = entry_law(args.law, args.mu)?;
    if args.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let w = sample_wigner(&WignerConfig { n: args.n, law, seed: args.seed });
    let spectral = decompose(&w).map_err(CliError::from)?;
    let report = identity_report(&w, &spectral, &standard_z_grid()).map_err(CliError::from)?;
    print_report(args, &report);
    if report.passes() {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn print_report(args: &VerifyArgs, report: &IdentityReport) {
    let law = match args.law {
        LawChoice::Gaussian => "gaussian".to_string(),
        LawChoice::Pareto => format!("pareto(mu = {})", args.mu.unwrap_or(f64::NAN)),
    };
    println!(
        "identity suite: n = {}, law = {law}, seed = {}, z points = {}",
        report.n, args.seed, report.z_points
    );
    let rows = [
        ("schur complement residual", report.max_schur_residual, 1e-8, true),
        ("trace-minor residual", report.max_trace_minor_residual, 1e-8, true),
        ("lambda representation residual", report.max_lambda_residual, 1e-8, true),
        ("resolvent inequality slack", report.min_inequality_slack, -1e-12, false),
        ("q_nj window bound slack", report.min_q_bound_slack, -1e-12, false),
    ];
    println!("{:<34} {:>13} {:>13} {:>8}", "check", "worst", "threshold", "status");
    for (name, value, threshold, upper) in rows {
        let ok = if upper { value <= threshold } else { value >= threshold };
        let relation = if upper { "<=" } else { ">=" };
        println!(
            "{:<34} {:>13.3e} {:>10} {:>2.0e} {:>8}",
            name,
            value,
            relation,
            threshold,
            if ok { "pass" } else { "FAIL" }
        );
    }
}

fn experiment_cmd(args: ExperimentArgs) -> Result<(), CliError> {
    let config = experiment_config(args)?;
    let (records, manifest) = run(&config).map_err(CliError::from)?;
    println!("{} records in {:.2}s", records.len(), manifest.wall_clock_seconds);
    for name in manifest.outputs.keys() {
        println!("wrote {}", config.output_dir.join(name).display());
    }
    println!("wrote {}", config.output_dir.join("manifest.json").display());
    for note in &manifest.notes {
        println!("note: {note}");
    }
    Ok(())
}

fn experiment_config(args: ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    if let Some(path) = &args.config {
        let flags_given = args.kind.is_some()
            || args.law.is_some()
            || args.mu.is_some()
            || args.n.is_some()
            || args.trials.is_some()
            || args.seed.is_some()
            || args.truncate.is_some()
            || args.d_const.is_some()
            || args.bins.is_some()
            || args.out.is_some()
            || args.workers.is_some();
        if flags_given {
            return Err(CliError::Usage(
                "--config replaces the per-run flags; pass one or the other".into(),
            ));
        }
        // A bad path or bad file content is a usage problem, not a crash.
        return load_config(path).map_err(|e| CliError::Usage(e.to_string()));
    }

    let kind: ExperimentKind = args
        .kind
        .as_deref()
        .ok_or_else(|| CliError::Usage("an experiment kind (or --config) is required".into()))?
        .parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let law = entry_law(args.law.unwrap_or(LawChoice::Gaussian), args.mu)?;
    let n_values = parse_n_spec(args.n.as_deref().unwrap_or("200"))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut config =
        ExperimentConfig::new(kind, law, n_values, args.trials.unwrap_or(20), args.seed.unwrap_or(1));
    match (args.truncate, args.d_const) {
        (Some(exponent), d) => {
            config.truncation = Some(
                TruncationSpec::new(exponent, d.unwrap_or(1.0))
                    .map_err(|e| CliError::Usage(e.to_string()))?,
            );
        }
        (None, Some(_)) => {
            return Err(CliError::Usage("--d-const requires --truncate".into()));
        }
        (None, None) => {}
    }
    if let Some(bins) = args.bins {
        config.bins = bins;
    }
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn figure_cmd(args: &FigureArgs) -> Result<(), CliError> {
    let kind: FigureKind =
        args.kind.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let mut config = FigureConfig {
        bins: args.bins,
        master_seed: args.seed,
        output_dir: args.out.clone(),
        workers: args.workers,
        ..FigureConfig::default()
    };
    if let Some(spec) = &args.n {
        let ns = parse_n_spec(spec).map_err(|e| CliError::Usage(e.to_string()))?;
        config.n = Some(ns[0]);
        if ns.len() > 1 {
            config.n_values = Some(ns);
        }
    }
    config.trials = args.trials;
    match (args.truncate, args.d_const) {
        (Some(exponent), d) => {
            config.truncation = TruncationSpec::new(exponent, d.unwrap_or(1.0))
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        (None, Some(_)) => {
            return Err(CliError::Usage("--d-const requires --truncate".into()));
        }
        (None, None) => {}
    }
    let output = run_figure(kind, &config).map_err(CliError::from)?;
    println!("wrote {}", output.svg_path.display());
    println!("wrote {}", output.csv_path.display());
    Ok(())
}
