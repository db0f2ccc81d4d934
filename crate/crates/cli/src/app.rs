use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use meancut::analysis::ApproxKind;

use crate::commands::{
    cmd_compare, cmd_eval, cmd_fit, cmd_scan, cmd_verify, Method, Report, Suite, Tolerances,
};
use crate::{CliError, Grid, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(
    name = "meancut",
    version,
    about = "Incomplete beta function at the mean cut: evaluation and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write CSV here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct TolArgs {
    /// Absolute tolerance for each μ quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Tolerance on the tail of the V series.
    #[arg(long, default_value_t = 1e-8)]
    pub series_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate P(k, l) on a grid with the chosen methods.
    Eval {
        /// k value or grid (a, a:b, a:b:S, a:b:xF).
        #[arg(long)]
        k: Grid,
        /// l value or grid.
        #[arg(long)]
        l: Grid,
        /// exact, float, raab, approx1, approx2, approx3 or all; comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        method: Vec<Method>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Cross-check the floating and product-form evaluators against the reference.
    Compare {
        #[arg(long)]
        k: Grid,
        #[arg(long)]
        l: Grid,
        /// Allowed relative error of the floating evaluator.
        #[arg(long, default_value_t = 1e-12)]
        float_rtol: f64,
        /// Allowed absolute error of the product form.
        #[arg(long, default_value_t = 1e-6)]
        raab_atol: f64,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run invariant suites.
    Verify {
        /// all, swap, bounds, raab, karamata, limit, lemma-u, lemma-c, binet or corollary.
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 30)]
        kmax: u64,
        #[arg(long, default_value_t = 30)]
        lmax: u64,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Fit the error exponent of an approximant.
    Fit {
        /// eq1 (fixed k, grid over l), eq2 (fixed l, grid over k) or eq3 (diagonal).
        #[arg(long)]
        kind: ApproxKind,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        lgrid: Option<Grid>,
        #[arg(long)]
        kgrid: Option<Grid>,
        #[arg(long)]
        diag: Option<Grid>,
    },
    /// List violations of 1/4 <= P <= 1/2.
    Scan {
        #[arg(long, default_value_t = 200)]
        kmax: u64,
        #[arg(long, default_value_t = 200)]
        lmax: u64,
    },
}

fn tolerances(t: TolArgs) -> Result<Tolerances, CliError> {
    Tolerances::new(t.tol, t.series_tol)
}

fn fit_grid(
    kind: ApproxKind,
    lgrid: Option<Grid>,
    kgrid: Option<Grid>,
    diag: Option<Grid>,
) -> Result<Grid, CliError> {
    let (grid, flag) = match kind {
        ApproxKind::PoissonLower => (lgrid, "--lgrid"),
        ApproxKind::PoissonUpper => (kgrid, "--kgrid"),
        ApproxKind::Half => (diag, "--diag"),
    };
    grid.ok_or_else(|| CliError::Usage(format!("{kind} needs {flag}")))
}

pub fn execute(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Eval { k, l, method, tol } => cmd_eval(&k, &l, &method, tolerances(tol)?),
        Command::Compare {
            k,
            l,
            float_rtol,
            raab_atol,
            tol,
        } => cmd_compare(&k, &l, float_rtol, raab_atol, tolerances(tol)?),
        Command::Verify {
            suite,
            kmax,
            lmax,
            tol,
        } => cmd_verify(suite, kmax, lmax, tolerances(tol)?),
        Command::Fit {
            kind,
            k,
            l,
            lgrid,
            kgrid,
            diag,
        } => {
            let fixed = match kind {
                ApproxKind::PoissonLower => k,
                ApproxKind::PoissonUpper => l,
                ApproxKind::Half => None,
            };
            cmd_fit(kind, fixed, &fit_grid(kind, lgrid, kgrid, diag)?)
        }
        Command::Scan { kmax, lmax } => cmd_scan(kmax, lmax),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    let report = match execute(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &report.csv),
        None => std::io::stdout().lock().write_all(&report.csv),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_FAIL;
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
