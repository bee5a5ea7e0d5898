//! Command-line front end: experiment runs (table or CSV) and the estimator
//! oracle validation battery.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vagreeks_engine::error::EngineError;
use vagreeks_engine::greeks::EstimatorTag;
use vagreeks_engine::model::Case;
use vagreeks_engine::product::FundDerivForm;
use vagreeks_engine::runner::{run_case, ModelChoice, ResultRow, RunConfig, CSV_HEADER};
use vagreeks_engine::scenario::QuadRule;
use vagreeks_engine::validation::{run_validation, ValidationConfig};

mod config;

#[derive(Parser)]
#[command(name = "vagreeks", about = "Monte Carlo VA liability greeks runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the liability and greek estimators for a model case.
    Run(RunArgs),
    /// Run the Black-Scholes estimator oracle battery.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Key=value config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in model case (A-E).
    #[arg(long)]
    case: Option<String>,
    /// Comma-separated estimators: bump,pathwise,clrm,mixed-pw-lr (or "all").
    #[arg(long)]
    estimators: Option<String>,
    /// Paths for the bump-and-revalue set-up.
    #[arg(long)]
    paths: Option<usize>,
    /// Outer variance/rate scenarios for the nested set-up.
    #[arg(long)]
    outer: Option<usize>,
    /// Inner equity paths per outer scenario.
    #[arg(long)]
    inner: Option<usize>,
    #[arg(long = "steps-per-year")]
    steps_per_year: Option<usize>,
    /// Relative central-bump size.
    #[arg(long)]
    bump: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: table or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Number of Monte Carlo samples per check.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 2008)]
    seed: u64,
    /// Test hook: additive corruption of the LRM gamma weight.
    #[arg(long, hide = true, default_value_t = 0.0)]
    inject_gamma_bias: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Table,
    Csv,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => match run_command(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Validate(args) => match validate_command(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}

fn run_command(args: &RunArgs) -> Result<(), EngineError> {
    let (config, format, out) = build_config(args)?;
    let rows = run_case(&config)?;
    let text = match format {
        OutputFormat::Csv => render_csv(&rows),
        OutputFormat::Table => render_table(&rows),
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn validate_command(args: &ValidateArgs) -> Result<bool, EngineError> {
    let report = run_validation(&ValidationConfig {
        n_samples: args.samples,
        seed: args.seed,
        gamma_weight_bias: args.inject_gamma_bias,
    })?;
    println!(
        "{:<36} {:>14} {:>14} {:>12} {:>8}  result",
        "check", "estimate", "target", "std_err", "z"
    );
    for c in &report.checks {
        println!(
            "{:<36} {:>14.8} {:>14.8} {:>12.3e} {:>8.2}  {}",
            c.name,
            c.value,
            c.target,
            c.std_err,
            c.z_score,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(report.passed())
}

/// Merges config file values and CLI flags (flags win) into a RunConfig.
fn build_config(
    args: &RunArgs,
) -> Result<(RunConfig, OutputFormat, Option<PathBuf>), EngineError> {
    let file = match &args.config {
        Some(path) => config::KeyValueFile::load(path)?,
        None => config::KeyValueFile::empty(),
    };
    let mut cfg = RunConfig::default();

    // model: exactly one of a case id or a full explicit parameter set
    let case_str = args.case.clone().or_else(|| file.get_string("case"));
    let explicit = config::explicit_params(&file)?;
    cfg.model = match (case_str, explicit) {
        (Some(c), None) => ModelChoice::Case(c.parse::<Case>()?),
        (None, Some(p)) => ModelChoice::Explicit(p),
        (Some(_), Some(_)) => {
            return Err(EngineError::Config(
                "give either a case or explicit model parameters, not both".into(),
            ))
        }
        (None, None) => ModelChoice::Case(Case::A),
    };

    cfg.product = config::product_spec(&file)?;
    if let Some(s) = args.estimators.clone().or_else(|| file.get_string("estimators")) {
        cfg.estimators = parse_estimators(&s)?;
    }
    cfg.n_paths = args.paths.or(file.get_usize("paths")?).unwrap_or(cfg.n_paths);
    cfg.n_outer = args.outer.or(file.get_usize("outer")?).unwrap_or(cfg.n_outer);
    cfg.n_inner = args.inner.or(file.get_usize("inner")?).unwrap_or(cfg.n_inner);
    cfg.steps_per_year = args
        .steps_per_year
        .or(file.get_usize("steps_per_year")?)
        .unwrap_or(cfg.steps_per_year);
    cfg.bump = args.bump.or(file.get_f64("bump")?).unwrap_or(cfg.bump);
    cfg.seed = args.seed.or(file.get_u64("seed")?).unwrap_or(cfg.seed);
    cfg.s0 = file.get_f64("s0")?.unwrap_or(cfg.s0);
    if let Some(q) = file.get_string("quad") {
        cfg.quad = match q.as_str() {
            "left" => QuadRule::LeftRiemann,
            "trapezoid" => QuadRule::Trapezoid,
            other => {
                return Err(EngineError::Config(format!("unknown quad rule '{other}'")))
            }
        };
    }
    if let Some(d) = file.get_string("deriv_form") {
        cfg.deriv_form = match d.as_str() {
            "indicator" => FundDerivForm::FloorIndicator,
            "literal-max" => FundDerivForm::LiteralMax,
            other => {
                return Err(EngineError::Config(format!(
                    "unknown deriv_form '{other}'"
                )))
            }
        };
    }

    let format = match args
        .format
        .clone()
        .or_else(|| file.get_string("format"))
        .as_deref()
    {
        None | Some("table") => OutputFormat::Table,
        Some("csv") => OutputFormat::Csv,
        Some(other) => {
            return Err(EngineError::Config(format!("unknown format '{other}'")))
        }
    };
    let out = args
        .out
        .clone()
        .or_else(|| file.get_string("out").map(PathBuf::from));
    file.check_unknown_keys()?;
    Ok((cfg, format, out))
}

fn parse_estimators(s: &str) -> Result<Vec<EstimatorTag>, EngineError> {
    if s.trim() == "all" {
        return Ok(vec![
            EstimatorTag::Bump,
            EstimatorTag::Pathwise,
            EstimatorTag::Clrm,
            EstimatorTag::MixedPwLr,
        ]);
    }
    s.split(',')
        .map(|part| match part.trim() {
            "bump" => Ok(EstimatorTag::Bump),
            "pathwise" => Ok(EstimatorTag::Pathwise),
            "clrm" => Ok(EstimatorTag::Clrm),
            "mixed-pw-lr" | "mixed" => Ok(EstimatorTag::MixedPwLr),
            other => Err(EngineError::Config(format!("unknown estimator '{other}'"))),
        })
        .collect()
}

fn render_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.to_csv());
        s.push('\n');
    }
    s
}

fn render_table(rows: &[ResultRow]) -> String {
    let mut s = format!(
        "{:<6} {:<12} {:<6} {:>14} {:>12} {:>8} {:>7} {:>12} {:>10}\n",
        "case", "estimator", "order", "value", "std_err", "outer", "inner", "seed", "runtime_s"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<6} {:<12} {:<6} {:>14.6e} {:>12.3e} {:>8} {:>7} {:>12} {:>10.2}\n",
            r.case,
            r.estimator,
            r.order,
            r.value,
            r.std_err,
            r.n_outer,
            r.n_inner,
            r.seed,
            r.runtime_s
        ));
    }
    s
}
