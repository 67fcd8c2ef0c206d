//! Checks a run of the affine closed-form family against its exact solution.

use stopline::closedform::AnalyticExample;
use stopline::{
    buyer_value_at, mc_value, seller_value_at, solve_buyer, solve_seller, verify_assumptions, BuyerSolution, Regime,
    RegimeDynamics, Reward, SellerSolution, StoppingRule,
};

use crate::config::RunSpec;

pub const BOUNDARY_TOL: f64 = 5e-3;
pub const THRESHOLD_TOL: f64 = 1e-6;
pub const CURVE_TOL: f64 = 1e-3;
pub const CURVE_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn within(name: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        let err = (got - want).abs();
        Self {
            name: name.into(),
            passed: err <= tol,
            detail: format!("got {got:.9}, exact {want:.9}, error {err:.2e} (tol {tol:.0e})"),
        }
    }
}

#[derive(Debug)]
pub enum VerifyError {
    /// The configured model has no closed-form solution to compare against.
    NotClosedForm(String),
    Solver(stopline::Error),
}

impl From<stopline::Error> for VerifyError {
    fn from(e: stopline::Error) -> Self {
        VerifyError::Solver(e)
    }
}

/// Exact solution for configs of the form `μ₊ = c(x + 1)`, `σ₊² = c·x²`, `r = c`
/// with a geometric negative regime.
pub fn exact_solution(spec: &RunSpec) -> Result<AnalyticExample, VerifyError> {
    let m = &spec.model;
    let not = |why: &str| VerifyError::NotClosedForm(why.to_string());
    let c = match m.positive {
        RegimeDynamics::Affine { mu, c, sigma2 } if mu == c && sigma2 == c && m.rate == c => c,
        _ => return Err(not("positive regime must be affine with mu = c = sigma2 = r")),
    };
    let (mu_minus, sigma2_minus) = match m.negative {
        RegimeDynamics::Gbm { mu, sigma2 } => (mu, sigma2),
        _ => return Err(not("negative regime must be gbm")),
    };
    Ok(AnalyticExample::solve(c, mu_minus, sigma2_minus, m.lower, m.upper, spec.utility.gamma())?)
}

/// Largest absolute gap between two curves over `CURVE_SAMPLES + 1` points of `[lo, hi]`.
fn max_gap(
    lo: f64,
    hi: f64,
    got: impl Fn(f64) -> stopline::Result<f64>,
    want: impl Fn(f64) -> f64,
) -> stopline::Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..=CURVE_SAMPLES {
        let x = lo + (hi - lo) * k as f64 / CURVE_SAMPLES as f64;
        worst = worst.max((got(x)? - want(x)).abs());
    }
    Ok(worst)
}

fn curve_check(name: &str, gap: f64) -> Check {
    Check {
        name: format!("value curve {name}"),
        passed: gap <= CURVE_TOL,
        detail: format!("max error {gap:.2e} over {} points (tol {CURVE_TOL:.0e})", CURVE_SAMPLES + 1),
    }
}

fn seller_checks(spec: &RunSpec, exact: &AnalyticExample, sol: &SellerSolution) -> stopline::Result<Vec<Check>> {
    let u = &spec.utility;
    let (l, h) = (spec.model.lower, spec.model.upper);
    let pos = max_gap(
        l,
        sol.profit_take,
        |x| seller_value_at(sol, u, x, Regime::Positive),
        |x| exact.seller_value(x, Regime::Positive),
    )?;
    let neg = max_gap(
        sol.stop_loss,
        h,
        |x| seller_value_at(sol, u, x, Regime::Negative),
        |x| exact.seller_value(x, Regime::Negative),
    )?;
    Ok(vec![
        Check::within("threshold A", sol.threshold, exact.threshold, THRESHOLD_TOL),
        Check::within("profit-take B", sol.profit_take, exact.profit_take, BOUNDARY_TOL),
        Check::within("stop-loss m", sol.stop_loss, exact.stop_loss, BOUNDARY_TOL),
        curve_check("seller (L, B) +", pos),
        curve_check("seller (m, H) -", neg),
    ])
}

fn buyer_checks(
    spec: &RunSpec,
    exact: &AnalyticExample,
    seller: &SellerSolution,
    sol: &BuyerSolution,
) -> stopline::Result<Vec<Check>> {
    let u = &spec.utility;
    let (l, h) = (spec.model.lower, spec.model.upper);
    let value = |regime| move |x| buyer_value_at(sol, seller, u, x, regime);
    let exact_value = |regime| move |x| exact.buyer_value(x, regime);
    let low = max_gap(l, sol.buy_low, value(Regime::Positive), exact_value(Regime::Positive))?;
    let mid = max_gap(sol.buy_low, sol.buy_high, value(Regime::Positive), exact_value(Regime::Positive))?;
    let tail = max_gap(sol.buy_high, 2.0 * seller.profit_take, value(Regime::Positive), exact_value(Regime::Positive))?;
    let neg = max_gap(0.0, h, value(Regime::Negative), exact_value(Regime::Negative))?;
    Ok(vec![
        Check::within("buy low a", sol.buy_low, exact.buy_low, BOUNDARY_TOL),
        Check::within("buy high b", sol.buy_high, exact.buy_high, BOUNDARY_TOL),
        curve_check("buyer (L, a) +", low),
        curve_check("buyer [a, b] +", mid),
        curve_check("buyer (b, 2B) +", tail),
        curve_check("buyer (0, H) -", neg),
    ])
}

/// Runs every check. Solver failures are errors, failed comparisons are not.
pub fn run_checks(spec: &RunSpec) -> Result<Vec<Check>, VerifyError> {
    let exact = exact_solution(spec)?;
    let u = &spec.utility;
    let report = verify_assumptions(&spec.model, u);
    let mut checks = vec![Check {
        name: "sign assumptions".into(),
        passed: report.all_ok(),
        detail: report.failure.map_or("hold".into(), |f| f.to_string()),
    }];
    let seller = solve_seller(&spec.model, u, &spec.numerics)?;
    checks.extend(seller_checks(spec, &exact, &seller)?);
    let buyer = solve_buyer(&spec.model, u, &seller, &spec.numerics)?;
    checks.extend(buyer_checks(spec, &exact, &seller, &buyer)?);
    let start = spec.mc.start;
    let rule = StoppingRule::seller(seller.profit_take, seller.stop_loss);
    let est = mc_value(&spec.model, &|x, _| u.value(x), &rule, start, &spec.mc.params)?;
    let want = exact.seller_value(start.price, start.regime);
    let err = (est.mean - want).abs();
    checks.push(Check {
        name: format!("Monte Carlo seller value at ({}, {})", start.price, start.regime),
        passed: err <= 3.0 * est.stderr,
        detail: format!(
            "mean {:.6} ± {:.6}, exact {want:.6}, {:.2} stderr, {} paths",
            est.mean,
            est.stderr,
            err / est.stderr,
            est.n_paths
        ),
    });
    Ok(checks)
}
