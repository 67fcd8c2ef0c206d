//! Command-line front end for the `stopline` solvers.
//!
//! Exit codes: `0` success, `1` solver or output failure, `2` usage or
//! configuration error.

pub mod config;
pub mod report;
pub mod verify;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stopline::{
    buyer_value_at, emit_csv, emit_plot, gains_g, mc_value, run_gamma_sweep, seller_value_at, solve_buyer,
    solve_seller, BuyerSolution, Regime, Reward, SellerSolution, StoppingRule,
};
use thiserror::Error;

pub use config::{parse_config, ConfigError, RunSpec};
pub use report::write_report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stopline", version, about = "Optimal trading boundaries for a two-regime price model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the seller's problem, print B and m, write value curves and a report.
    SolveSeller(RunArgs),
    /// Solve both problems, print a and b, write value curves and a report.
    SolveBuyer(RunArgs),
    /// Sweep the utility exponent over `sweep.gammas`, write CSV and SVG.
    Sweep(RunArgs),
    /// Monte Carlo value of the solved rule from `mc.start_x`, `mc.start_regime`.
    Simulate(RunArgs),
    /// Compare against the exact solution of the affine closed-form family.
    Verify(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run configuration file.
    config: PathBuf,
    /// Overrides `output.dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("solver failed: {0}")]
    Solver(#[from] stopline::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Run(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

type Action = fn(&RunSpec, &mut String) -> Result<(), Failure>;

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Like [`dispatch`], writing to the given streams.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    let (args, action): (&RunArgs, Action) = match &cli.command {
        Command::SolveSeller(a) => (a, cmd_solve_seller),
        Command::SolveBuyer(a) => (a, cmd_solve_buyer),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Verify(a) => (a, cmd_verify),
    };
    let mut spec = match load_config(&args.config) {
        Ok(spec) => spec,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    if let Some(dir) = &args.out_dir {
        spec.output.dir = dir.clone();
    }
    let mut text = String::new();
    let result = action(&spec, &mut text);
    let _ = write!(out, "{text}");
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn save(spec: &RunSpec, file: &Path, contents: &str, log: &mut String) -> Result<(), Failure> {
    let path = spec.output.resolve(file);
    let fail = |source| Failure::Output { path: path.clone(), source };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(fail)?;
    }
    std::fs::write(&path, contents).map_err(fail)?;
    writeln!(log, "wrote {}", path.display()).unwrap();
    Ok(())
}

const CURVE_POINTS: usize = 1000;

/// Value curves on `[L, 1.5·B]` under `+` and `[0, H]` under `−`.
fn curves_csv(spec: &RunSpec, seller: &SellerSolution, buyer: Option<&BuyerSolution>) -> Result<String, Failure> {
    let u = &spec.utility;
    let mut csv = String::from(if buyer.is_some() { "x,regime,seller,buyer\n" } else { "x,regime,seller\n" });
    let branches =
        [(Regime::Positive, spec.model.lower, 1.5 * seller.profit_take), (Regime::Negative, 0.0, spec.model.upper)];
    for (regime, lo, hi) in branches {
        for k in 0..=CURVE_POINTS {
            let x = lo + (hi - lo) * k as f64 / CURVE_POINTS as f64;
            write!(csv, "{x:.6},{regime},{:.9}", seller_value_at(seller, u, x, regime)?).unwrap();
            if let Some(b) = buyer {
                write!(csv, ",{:.9}", buyer_value_at(b, seller, u, x, regime)?).unwrap();
            }
            csv.push('\n');
        }
    }
    Ok(csv)
}

fn print_seller(sol: &SellerSolution, log: &mut String) {
    writeln!(log, "case: {}", sol.case).unwrap();
    writeln!(log, "A = {:.9}", sol.threshold).unwrap();
    writeln!(log, "B = {:.9}", sol.profit_take).unwrap();
    writeln!(log, "m = {:.9}", sol.stop_loss).unwrap();
    writeln!(log, "pasting residual at B: {:.3e}", sol.pasting_residual_b).unwrap();
    writeln!(log, "pasting residual at m: {:.3e}", sol.pasting_residual_m).unwrap();
    writeln!(log, "continuity residual at H: {:.3e}", sol.continuity_residual_h).unwrap();
    writeln!(log, "continuity residual at L: {:.3e}", sol.continuity_residual_l).unwrap();
}

fn cmd_solve_seller(spec: &RunSpec, log: &mut String) -> Result<(), Failure> {
    let seller = solve_seller(&spec.model, &spec.utility, &spec.numerics)?;
    print_seller(&seller, log);
    save(spec, &spec.output.curves, &curves_csv(spec, &seller, None)?, log)?;
    save(spec, &spec.output.report, &write_report(spec, &seller, None), log)
}

fn cmd_solve_buyer(spec: &RunSpec, log: &mut String) -> Result<(), Failure> {
    let seller = solve_seller(&spec.model, &spec.utility, &spec.numerics)?;
    print_seller(&seller, log);
    let buyer = solve_buyer(&spec.model, &spec.utility, &seller, &spec.numerics)?;
    writeln!(log, "a = {:.9}", buyer.buy_low).unwrap();
    writeln!(log, "b = {:.9}", buyer.buy_high).unwrap();
    writeln!(log, "pasting residual at a: {:.3e}", buyer.residuals.pasting_a).unwrap();
    writeln!(log, "pasting residual at b: {:.3e}", buyer.residuals.pasting_b).unwrap();
    save(spec, &spec.output.curves, &curves_csv(spec, &seller, Some(&buyer))?, log)?;
    save(spec, &spec.output.report, &write_report(spec, &seller, Some(&buyer)), log)
}

fn cmd_sweep(spec: &RunSpec, log: &mut String) -> Result<(), Failure> {
    let rows = run_gamma_sweep(&spec.model, &spec.gammas, &spec.numerics);
    let failed: Vec<String> =
        rows.iter().filter(|r| !r.is_ok()).map(|r| format!("gamma {}: {}", r.gamma, r.status_label())).collect();
    let csv = emit_csv(&rows);
    log.push_str(&csv);
    save(spec, &spec.output.csv, &csv, log)?;
    let plot = emit_plot(&rows, spec.model.lower)?;
    save(spec, &spec.output.svg, &plot, log)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("{} of {} rows failed: {}", failed.len(), rows.len(), failed.join(", "))))
    }
}

fn cmd_simulate(spec: &RunSpec, log: &mut String) -> Result<(), Failure> {
    let u = &spec.utility;
    let seller = solve_seller(&spec.model, u, &spec.numerics)?;
    let start = spec.mc.start;
    let (est, solved) = match spec.mc.problem {
        config::Problem::Seller => {
            let rule = StoppingRule::seller(seller.profit_take, seller.stop_loss);
            let est = mc_value(&spec.model, &|x, _| u.value(x), &rule, start, &spec.mc.params)?;
            (est, seller_value_at(&seller, u, start.price, start.regime)?)
        }
        config::Problem::Buyer => {
            let buyer = solve_buyer(&spec.model, u, &seller, &spec.numerics)?;
            let rule = StoppingRule::buyer(buyer.buy_low, buyer.buy_high);
            let gains = |x, f| gains_g(&seller, u, x, f).unwrap_or(f64::NAN);
            let est = mc_value(&spec.model, &gains, &rule, start, &spec.mc.params)?;
            (est, buyer_value_at(&buyer, &seller, u, start.price, start.regime)?)
        }
    };
    writeln!(log, "problem: {}", spec.mc.problem.name()).unwrap();
    writeln!(log, "start: ({}, {})", start.price, start.regime).unwrap();
    writeln!(log, "mean = {:.9}", est.mean).unwrap();
    writeln!(log, "stderr = {:.9}", est.stderr).unwrap();
    writeln!(log, "n_paths = {}", est.n_paths).unwrap();
    writeln!(log, "truncated_fraction = {:.6}", est.truncated_fraction).unwrap();
    writeln!(log, "solver value = {solved:.9}").unwrap();
    writeln!(log, "difference = {:.2} stderr", (est.mean - solved) / est.stderr).unwrap();
    if est.truncation_warning {
        writeln!(log, "warning: more than 5% of paths reached t_max").unwrap();
    }
    Ok(())
}

fn cmd_verify(spec: &RunSpec, log: &mut String) -> Result<(), Failure> {
    let checks = verify::run_checks(spec).map_err(|e| match e {
        verify::VerifyError::NotClosedForm(why) => {
            Failure::Usage(format!("verify needs the affine closed-form family: {why}"))
        }
        verify::VerifyError::Solver(e) => Failure::Solver(e),
    })?;
    for c in &checks {
        writeln!(log, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(log, "{} of {} checks passed", checks.len() - failed, checks.len()).unwrap();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Run(format!("{failed} checks failed")))
    }
}
