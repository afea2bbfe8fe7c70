use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nrpos::config::{split_values, Config};
use nrpos::error::CliError;
use nrpos::output::{write_rows, write_rows_to, write_samples};
use nrpos::runner::{run_monte_carlo, summarize, MetricsRow, RealizationResult};
use nrpos_core::oracles::integrals::validate_integrals;

#[derive(Parser)]
#[command(name = "nrpos", about = "Multi-user comb-PRS positioning experiments")]
struct Cli {
    /// JSON configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true, env = "NRPOS_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Summary CSV; printed to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Per-realization errors for CDF plots.
    #[arg(long, global = true)]
    cdf: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One Monte Carlo batch of every configured scheme.
    Run,
    /// Repeat the batch for each value of one configuration field.
    Sweep {
        /// Dotted field path, e.g. `scenario.bandwidth_hz`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; brackets group arrays.
        #[arg(long)]
        values: String,
    },
    /// Run a chosen subset of schemes.
    Baselines {
        #[arg(long, value_delimiter = ',', required = true)]
        schemes: Vec<String>,
    },
    /// Compare closed-form integrals against adaptive quadrature.
    ValidateIntegrals {
        #[arg(long, default_value_t = 200)]
        cases: u64,
    },
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let mut c = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        c.experiment.seed = s;
    }
    if let Some(r) = cli.realizations {
        c.experiment.realizations = r;
    }
    c.validate()?;
    Ok(c)
}

fn batch(
    config: &Config,
    label: &str,
    rows: &mut Vec<MetricsRow>,
    samples: &mut Vec<(String, Vec<RealizationResult>)>,
) -> Result<Option<String>, CliError> {
    let out = run_monte_carlo(config)?;
    let clips: usize = out.results.iter().map(|r| r.reward_clips).sum();
    eprintln!("{label}: {} realizations in {:.1} s, {clips} clipped rewards", out.results.len(), out.seconds);
    rows.extend(summarize(label, &config.schemes()?, &out.results, config.experiment.seed));
    samples.push((label.to_string(), out.results));
    Ok(out.error)
}

fn emit(
    cli: &Cli,
    config: &Config,
    rows: &[MetricsRow],
    samples: &[(String, Vec<RealizationResult>)],
) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => write_rows(rows, p)?,
        None => write_rows_to(rows, std::io::stdout().lock())?,
    }
    if let Some(p) = &cli.cdf {
        write_samples(samples, &config.schemes()?, p)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::ValidateIntegrals { cases } = cli.command {
        let seed = cli.seed.unwrap_or(1);
        let reports = validate_integrals(seed, cases)?;
        let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        let worst = |p: char| reports.iter().filter(|r| r.case.starts_with(p)).map(|r| r.rel_error).fold(0.0, f64::max);
        println!("cases {cases} worst Q {:.3e} worst C {:.3e} failed {}", worst('Q'), worst('C'), failed.len());
        for r in &failed {
            println!("FAIL {} value {:e} oracle {:e} rel {:.3e}", r.case, r.value, r.oracle, r.rel_error);
        }
        if !failed.is_empty() {
            return Err(CliError::Numerical(nrpos_core::Error::QuadratureNoConvergence {
                achieved: worst('C').max(worst('Q')),
                requested: nrpos_core::oracles::integrals::Q_TOL,
            }));
        }
        return Ok(());
    }
    let mut config = load(cli)?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut failure = None;
    match &cli.command {
        Command::Run => failure = batch(&config, "", &mut rows, &mut samples)?,
        Command::Baselines { schemes } => {
            config.experiment.schemes = schemes.clone();
            config.validate()?;
            failure = batch(&config, "", &mut rows, &mut samples)?;
        }
        Command::Sweep { param, values } => {
            let values = split_values(values);
            if values.is_empty() {
                return Err(CliError::Config("sweep needs at least one value".into()));
            }
            let variants = values
                .iter()
                .map(|v| Ok((format!("{param}={v}"), config.with_override(param, v)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            for (label, c) in &variants {
                if let Some(e) = batch(c, label, &mut rows, &mut samples)? {
                    failure = Some(e);
                    break;
                }
            }
        }
        Command::ValidateIntegrals { .. } => unreachable!("handled above"),
    }
    emit(cli, &config, &rows, &samples)?;
    match failure {
        Some(e) => Err(CliError::Numerical(nrpos_core::Error::InvalidArgument(e))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nrpos: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
