//! Command-line verification harness.
//!
//! Exit status: 0 when every case passes, 1 when some case fails, 2 on a
//! configuration or i/o error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sklyanin_core::verify::{emit, run, EtaKindArg, Format, Suite, SuiteConfig};
use sklyanin_core::Error;

#[derive(Debug, Parser)]
#[command(name = "sklyanin-verify", version, about = "Run residual checks of the theta-function, operator and metric identities")]
struct Cli {
    /// Suites to run (repeatable or comma separated): theta, space, operators,
    /// metric, kernel, biortho, hypergeo, sixj, all
    #[arg(long = "suite", value_delimiter = ',', default_value = "all")]
    suites: Vec<String>,

    /// Imaginary part of tau
    #[arg(long, default_value_t = 0.25)]
    tau_im: f64,

    /// Magnitude of eta
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    eta: f64,

    /// Direction of eta: real, imaginary or zero
    #[arg(long, default_value = "real")]
    eta_kind: String,

    /// Order N of the space Theta_N
    #[arg(long = "order-n", default_value_t = 3)]
    n: usize,

    /// Quadrature grid, as M1xM2
    #[arg(long, default_value = "64x64")]
    grid: String,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Tolerance override, key=value with key suite.case (repeatable)
    #[arg(long = "tol")]
    tols: Vec<String>,

    /// Output format: json, csv or text
    #[arg(long, default_value = "text")]
    format: String,

    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Config(format!("grid '{s}' must look like 64x64"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_tols(items: &[String]) -> Result<BTreeMap<String, f64>, Error> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("tolerance '{item}' must look like key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("tolerance value '{v}' is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn config(cli: &Cli) -> Result<(SuiteConfig, Format), Error> {
    let mut suites = Vec::new();
    for s in &cli.suites {
        suites.extend(Suite::parse_list(s.trim())?);
    }
    let cfg = SuiteConfig {
        suites,
        tau_im: cli.tau_im,
        eta: cli.eta,
        eta_kind: cli.eta_kind.parse::<EtaKindArg>()?,
        n: cli.n,
        grid: parse_grid(&cli.grid)?,
        seed: cli.seed,
        tol_overrides: parse_tols(&cli.tols)?,
    };
    Ok((cfg, cli.format.parse()?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|(cfg, format)| {
        let report = run(&cfg)?;
        emit(&report, format, cli.out.as_deref())?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            eprintln!(
                "{}/{} cases passed in {:.2} s",
                report.summary.passed, report.summary.total, report.summary.wall_time_s
            );
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
