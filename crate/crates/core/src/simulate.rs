//! Euler–Maruyama simulation of the regime-flagged price process.
//!
//! Regime flips are detected at the end of each step: a positive path whose
//! price has fallen to `L` or below turns negative, a negative path at or
//! above `H` turns positive, and a negative path at or below zero is frozen
//! at the absorbing state `(0, −)`.
//!
//! Path `i` of a run with master seed `s` draws its normals from
//! `ChaCha8Rng::seed_from_u64(s)` on stream `i`, so every path is
//! reproducible on its own and results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Regime};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub t: f64,
    pub price: f64,
    pub regime: Regime,
    pub absorbed: bool,
}

impl PathState {
    pub fn new(price: f64, regime: Regime) -> Self {
        let absorbed = regime == Regime::Negative && price <= 0.0;
        Self { t: 0.0, price: if absorbed { 0.0 } else { price }, regime, absorbed }
    }
}

/// Advances one Euler–Maruyama step driven by the standard normal `z`.
pub fn step_euler(state: PathState, dt: f64, model: &ModelSpec, z: f64) -> Result<PathState> {
    if state.absorbed {
        return Ok(PathState { t: state.t + dt, ..state });
    }
    let dynamics = model.dynamics(state.regime);
    let floor = match state.regime {
        Regime::Positive => model.lower,
        Regime::Negative => 0.0,
    };
    let x = state.price;
    let variance = dynamics.variance_raw(x.max(floor)).max(0.0);
    let next = x + dynamics.drift_raw(x) * dt + (variance * dt).sqrt() * z;
    if !next.is_finite() {
        return Err(Error::Simulation(format!("price became {next} at t = {}", state.t)));
    }
    let mut out = PathState { t: state.t + dt, price: next, regime: state.regime, absorbed: false };
    match out.regime {
        Regime::Positive if next <= model.lower => out.regime = Regime::Negative,
        Regime::Negative if next >= model.upper => out.regime = Regime::Positive,
        _ => {}
    }
    if out.regime == Regime::Negative && next <= 0.0 {
        out.price = 0.0;
        out.absorbed = true;
    }
    Ok(out)
}

/// Closed price interval; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Stop as soon as `(S, F)` lies in one of the regime's intervals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StoppingRule {
    pub positive: Vec<Interval>,
    pub negative: Vec<Interval>,
}

impl StoppingRule {
    /// Sell on `[B, ∞)` in the positive regime and on `[0, m]` in the negative one.
    pub fn seller(profit_take: f64, stop_loss: f64) -> Self {
        Self {
            positive: vec![Interval::new(profit_take, f64::INFINITY)],
            negative: vec![Interval::new(0.0, stop_loss.max(0.0))],
        }
    }

    /// Buy on `[a, b]` in the positive regime and only at `0` in the negative one.
    pub fn buyer(buy_low: f64, buy_high: f64) -> Self {
        Self { positive: vec![Interval::new(buy_low, buy_high)], negative: vec![Interval::new(0.0, 0.0)] }
    }

    /// Stop immediately from any state.
    pub fn everywhere() -> Self {
        let all = vec![Interval::new(f64::NEG_INFINITY, f64::INFINITY)];
        Self { positive: all.clone(), negative: all }
    }

    pub fn contains(&self, x: f64, regime: Regime) -> bool {
        let set = match regime {
            Regime::Positive => &self.positive,
            Regime::Negative => &self.negative,
        };
        set.iter().any(|i| i.contains(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopOutcome {
    /// Stopping time, `∞` if the path was absorbed outside the rule.
    pub tau: f64,
    pub price: f64,
    pub regime: Regime,
    /// The horizon was reached first; `tau` is then the horizon.
    pub truncated: bool,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Runs one path. `substeps > 1` sums that many normals per step so a
/// coarse path shares its Brownian increments with a finer one.
fn run_path(
    model: &ModelSpec,
    start: PathState,
    rule: &StoppingRule,
    dt: f64,
    t_max: f64,
    substeps: u32,
    rng: &mut ChaCha8Rng,
) -> Result<StopOutcome> {
    let mut state = start;
    let scale = 1.0 / (substeps as f64).sqrt();
    loop {
        if rule.contains(state.price, state.regime) {
            return Ok(StopOutcome { tau: state.t, price: state.price, regime: state.regime, truncated: false });
        }
        if state.absorbed {
            return Ok(StopOutcome { tau: f64::INFINITY, price: 0.0, regime: Regime::Negative, truncated: false });
        }
        if state.t >= t_max - 0.5 * dt {
            return Ok(StopOutcome { tau: state.t, price: state.price, regime: state.regime, truncated: true });
        }
        let z = if substeps == 1 { normal(rng) } else { (0..substeps).map(|_| normal(rng)).sum::<f64>() * scale };
        state = step_euler(state, dt, model, z)?;
    }
}

/// Simulates one path from `start` until it enters `rule` or reaches `t_max`.
///
/// Uses the same random stream as path `0` of [`mc_value`] with this seed.
pub fn simulate_until_stop(
    model: &ModelSpec,
    start: PathState,
    rule: &StoppingRule,
    dt: f64,
    t_max: f64,
    seed: u64,
) -> Result<StopOutcome> {
    check_step(dt, t_max)?;
    run_path(model, start, rule, dt, t_max, 1, &mut path_rng(seed, 0))
}

/// Every state visited by one path over `steps` steps, starting with `start`.
pub fn trace_path(model: &ModelSpec, start: PathState, dt: f64, steps: usize, seed: u64) -> Result<Vec<PathState>> {
    check_step(dt, f64::INFINITY)?;
    let mut rng = path_rng(seed, 0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = start;
    out.push(state);
    for _ in 0..steps {
        state = step_euler(state, dt, model, normal(&mut rng))?;
        out.push(state);
    }
    Ok(out)
}

fn check_step(dt: f64, t_max: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("must be finite and > 0, got {dt}") });
    }
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter { name: "t_max", reason: format!("must be > 0, got {t_max}") });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub n_paths: usize,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        Self { n_paths: 20_000, dt: 1e-3, t_max: 200.0, seed: 1 }
    }
}

impl McParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 100 {
            return Err(Error::InvalidParameter {
                name: "n_paths",
                reason: format!("need at least 100 paths, got {}", self.n_paths),
            });
        }
        check_step(self.dt, self.t_max)
    }
}

/// Share of truncated paths above which an estimate is flagged.
pub const TRUNCATION_WARNING_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√n_paths`.
    pub stderr: f64,
    pub n_paths: usize,
    pub truncated_fraction: f64,
    pub truncation_warning: bool,
}

impl McEstimate {
    fn from_samples(values: &[f64], truncated: usize) -> Self {
        let n = values.len();
        let mean = parallel::sum(values.iter().copied()) / n as f64;
        let ss = parallel::sum(values.iter().map(|v| (v - mean) * (v - mean)));
        let stderr = if n > 1 { (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt() } else { 0.0 };
        let truncated_fraction = truncated as f64 / n as f64;
        Self {
            mean,
            stderr,
            n_paths: n,
            truncated_fraction,
            truncation_warning: truncated_fraction > TRUNCATION_WARNING_LEVEL,
        }
    }
}

/// Payoff received on stopping at `(S_τ, F_τ)`.
pub type Payoff<'a> = &'a (dyn Fn(f64, Regime) -> f64 + Sync);

fn discounted(model: &ModelSpec, payoff: Payoff<'_>, out: &StopOutcome) -> f64 {
    if out.tau.is_infinite() {
        0.0
    } else {
        (-model.rate * out.tau).exp() * payoff(out.price, out.regime)
    }
}

/// Per-path discounted payoffs under each rule, paths sharing random numbers across rules.
fn paired_samples(
    model: &ModelSpec,
    payoff: Payoff<'_>,
    rules: &[(&StoppingRule, f64, u32)],
    start: PathState,
    params: &McParams,
) -> Result<Vec<Vec<(f64, bool)>>> {
    params.validate()?;
    let per_path: Vec<Result<Vec<(f64, bool)>>> = parallel::install(|| {
        (0..params.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                rules
                    .iter()
                    .map(|&(rule, dt, substeps)| {
                        let mut rng = path_rng(params.seed, i);
                        let out = run_path(model, start, rule, dt, params.t_max, substeps, &mut rng)?;
                        Ok((discounted(model, payoff, &out), out.truncated))
                    })
                    .collect()
            })
            .collect()
    });
    let mut by_rule = vec![Vec::with_capacity(params.n_paths); rules.len()];
    for path in per_path {
        for (k, sample) in path?.into_iter().enumerate() {
            by_rule[k].push(sample);
        }
    }
    Ok(by_rule)
}

fn estimate(samples: &[(f64, bool)]) -> McEstimate {
    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    McEstimate::from_samples(&values, samples.iter().filter(|s| s.1).count())
}

fn difference(base: &[(f64, bool)], other: &[(f64, bool)]) -> (f64, f64) {
    let diffs: Vec<f64> = base.iter().zip(other).map(|(a, b)| a.0 - b.0).collect();
    let est = McEstimate::from_samples(&diffs, 0);
    (est.mean, est.stderr)
}

/// Monte Carlo estimate of `E[e^{−rτ} payoff(S_τ, F_τ)]` for the rule's hitting time.
///
/// Truncated paths contribute `e^{−r t_max} payoff(S_{t_max}, F_{t_max})`.
pub fn mc_value(
    model: &ModelSpec,
    payoff: Payoff<'_>,
    rule: &StoppingRule,
    start: PathState,
    params: &McParams,
) -> Result<McEstimate> {
    let samples = paired_samples(model, payoff, &[(rule, params.dt, 1)], start, params)?;
    Ok(estimate(&samples[0]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationEntry {
    pub estimate: McEstimate,
    /// Mean of `base − perturbed` over paired paths.
    pub mean_diff: f64,
    pub stderr_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub base: McEstimate,
    pub entries: Vec<PerturbationEntry>,
}

/// Compares `base` against each perturbed rule on common random numbers.
pub fn perturbation_test(
    model: &ModelSpec,
    payoff: Payoff<'_>,
    base: &StoppingRule,
    perturbed: &[StoppingRule],
    start: PathState,
    params: &McParams,
) -> Result<PerturbationReport> {
    let mut rules = vec![(base, params.dt, 1)];
    rules.extend(perturbed.iter().map(|r| (r, params.dt, 1)));
    let samples = paired_samples(model, payoff, &rules, start, params)?;
    let entries = samples[1..]
        .iter()
        .map(|s| {
            let (mean_diff, stderr_diff) = difference(&samples[0], s);
            PerturbationEntry { estimate: estimate(s), mean_diff, stderr_diff }
        })
        .collect();
    Ok(PerturbationReport { base: estimate(&samples[0]), entries })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepHalvingReport {
    /// Estimate at step `2·dt`.
    pub coarse: McEstimate,
    /// Estimate at step `dt`.
    pub fine: McEstimate,
    /// Mean of `fine − coarse` over coupled paths.
    pub mean_diff: f64,
    pub stderr_diff: f64,
}

/// Estimates at `2·dt` and `dt` where each coarse increment is the sum of
/// the two fine increments it spans, isolating the discretisation effect.
pub fn step_halving(
    model: &ModelSpec,
    payoff: Payoff<'_>,
    rule: &StoppingRule,
    start: PathState,
    params: &McParams,
) -> Result<StepHalvingReport> {
    let samples = paired_samples(model, payoff, &[(rule, 2.0 * params.dt, 2), (rule, params.dt, 1)], start, params)?;
    let (mean_diff, stderr_diff) = difference(&samples[1], &samples[0]);
    Ok(StepHalvingReport { coarse: estimate(&samples[0]), fine: estimate(&samples[1]), mean_diff, stderr_diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RegimeDynamics;

    fn model() -> ModelSpec {
        crate::closedform::example_model()
    }

    #[test]
    fn zero_drift_zero_noise_keeps_price() {
        let flat = ModelSpec::new(
            RegimeDynamics::Vasicek { c: 0.0, mu: 0.0, sigma2: 0.1 },
            RegimeDynamics::Vasicek { c: 0.0, mu: 0.0, sigma2: 0.1 },
            1.0,
            2.0,
            0.1,
        )
        .unwrap();
        let s = step_euler(PathState::new(1.5, Regime::Positive), 1e-3, &flat, 0.0).unwrap();
        assert_eq!(s.price, 1.5);
        assert_eq!(s.regime, Regime::Positive);
    }

    #[test]
    fn flags_flip_at_thresholds() {
        let m = model();
        let s = step_euler(PathState::new(1.0005, Regime::Positive), 1e-3, &m, -10.0).unwrap();
        assert!(s.price <= 1.0);
        assert_eq!(s.regime, Regime::Negative);
        let s = step_euler(PathState::new(1.9995, Regime::Negative), 1e-3, &m, 10.0).unwrap();
        assert!(s.price >= 2.0);
        assert_eq!(s.regime, Regime::Positive);
    }

    #[test]
    fn absorption_freezes() {
        let m = model();
        let s = step_euler(PathState::new(1e-6, Regime::Negative), 1e-3, &m, -1e6).unwrap();
        assert!(s.absorbed);
        assert_eq!(s.price, 0.0);
        let t = step_euler(s, 1e-3, &m, 5.0).unwrap();
        assert!(t.absorbed);
        assert_eq!(t.price, 0.0);
    }

    #[test]
    fn start_inside_rule_stops_at_once() {
        let m = model();
        let start = PathState::new(4.0, Regime::Positive);
        let out = simulate_until_stop(&m, start, &StoppingRule::seller(3.8, 1.7), 1e-3, 10.0, 3).unwrap();
        assert_eq!(out, StopOutcome { tau: 0.0, price: 4.0, regime: Regime::Positive, truncated: false });
        let out =
            simulate_until_stop(&m, PathState::new(1.5, Regime::Negative), &StoppingRule::everywhere(), 1e-3, 10.0, 3)
                .unwrap();
        assert_eq!(out.tau, 0.0);
    }

    #[test]
    fn same_seed_same_path() {
        let m = model();
        let rule = StoppingRule::seller(3.839282, 1.775502);
        let start = PathState::new(2.0, Regime::Positive);
        let a = simulate_until_stop(&m, start, &rule, 1e-3, 200.0, 42).unwrap();
        let b = simulate_until_stop(&m, start, &rule, 1e-3, 200.0, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_until_stop(&m, start, &rule, 1e-3, 200.0, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn immediate_stop_has_no_variance() {
        let m = model();
        let params = McParams { n_paths: 500, ..McParams::default() };
        let est = mc_value(
            &m,
            &|x, _| x.powf(0.8),
            &StoppingRule::everywhere(),
            PathState::new(1.7, Regime::Negative),
            &params,
        )
        .unwrap();
        assert!((est.mean - 1.7f64.powf(0.8)).abs() < 1e-14);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.truncated_fraction, 0.0);
    }

    #[test]
    fn truncation_is_reported() {
        let m = model();
        let params = McParams { n_paths: 100, dt: 1e-2, t_max: 0.05, seed: 9 };
        let rule = StoppingRule::default();
        let est = mc_value(&m, &|x, _| x, &rule, PathState::new(1.5, Regime::Positive), &params).unwrap();
        assert_eq!(est.truncated_fraction, 1.0);
        assert!(est.truncation_warning);
    }

    #[test]
    fn rejects_small_runs() {
        let m = model();
        let params = McParams { n_paths: 10, ..McParams::default() };
        assert!(mc_value(&m, &|x, _| x, &StoppingRule::everywhere(), PathState::new(1.5, Regime::Positive), &params)
            .is_err());
    }

    #[test]
    fn identical_perturbation_has_zero_difference() {
        let m = model();
        let params = McParams { n_paths: 200, dt: 1e-2, t_max: 20.0, seed: 5 };
        let rule = StoppingRule::seller(3.839282, 1.775502);
        let report = perturbation_test(
            &m,
            &|x, _| x.powf(0.8),
            &rule,
            std::slice::from_ref(&rule),
            PathState::new(2.0, Regime::Positive),
            &params,
        )
        .unwrap();
        assert_eq!(report.entries[0].mean_diff, 0.0);
        assert_eq!(report.entries[0].stderr_diff, 0.0);
    }
}
