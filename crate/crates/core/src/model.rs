//! Regime dynamics, the joint two-regime model and the power-utility family.
//!
//! Sign conventions follow the generator `𝓛_f h = μ_f h′ + ½σ_f² h″`. The
//! seller's problem is well posed when `𝓛⁻u − ru < 0` on `(0, H)` and
//! `𝓛⁺u − ru` changes sign exactly once, from `+` to `−`, at the
//! threshold `A > L`.

use crate::error::{AssumptionFailure, Error, Result};

/// Values with magnitude below this are treated as zero in sign checks.
pub const SIGN_DEADBAND: f64 = 1e-12;

/// Default scan step used to locate the threshold `A`.
pub const THRESHOLD_SCAN_STEP: f64 = 1e-3;

/// Market regime, the flag `F` of the price process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Positive,
    Negative,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Positive => f.write_str("+"),
            Regime::Negative => f.write_str("-"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "+" | "positive" | "pos" => Ok(Regime::Positive),
            "-" | "negative" | "neg" => Ok(Regime::Negative),
            other => Err(format!("unknown regime `{other}` (expected + or -)")),
        }
    }
}

/// Piecewise-linear drift and variance tables, flat beyond the end points.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDynamics {
    xs: Vec<f64>,
    drift: Vec<f64>,
    variance: Vec<f64>,
}

impl TabulatedDynamics {
    pub fn new(xs: Vec<f64>, drift: Vec<f64>, variance: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::InvalidParameter { name: "table", reason: "at least two nodes are required".into() });
        }
        if drift.len() != xs.len() || variance.len() != xs.len() {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: format!(
                    "length mismatch: {} nodes, {} drift values, {} variance values",
                    xs.len(),
                    drift.len(),
                    variance.len()
                ),
            });
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter { name: "table", reason: "nodes must be strictly increasing".into() });
        }
        if xs.iter().chain(&drift).chain(&variance).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter { name: "table", reason: "all entries must be finite".into() });
        }
        if variance.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "variance entries must be strictly positive".into(),
            });
        }
        Ok(Self { xs, drift, variance })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn drift_values(&self) -> &[f64] {
        &self.drift
    }

    pub fn variance_values(&self) -> &[f64] {
        &self.variance
    }

    fn interp(&self, ys: &[f64], x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return ys[0];
        }
        if x >= self.xs[n - 1] {
            return ys[n - 1];
        }
        let j = self.xs.partition_point(|&node| node <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let t = (x - x0) / (x1 - x0);
        ys[j - 1] + t * (ys[j] - ys[j - 1])
    }
}

/// Drift and volatility of the price in one regime.
///
/// Volatility parameters are given as variances (`sigma2 = σ²`).
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeDynamics {
    /// `μ(x) = mu·x + c`, `σ(x) = σ·x`. With `c = mu` this is `mu·(x + 1)`.
    Affine {
        mu: f64,
        c: f64,
        sigma2: f64,
    },
    /// `μ(x) = mu·x`, `σ(x) = σ·x`.
    Gbm {
        mu: f64,
        sigma2: f64,
    },
    /// `μ(x) = c − mu·x`, `σ(x) = σ`.
    Vasicek {
        c: f64,
        mu: f64,
        sigma2: f64,
    },
    /// `μ(x) = c − mu·x`, `σ(x) = σ·√x`.
    Cir {
        c: f64,
        mu: f64,
        sigma2: f64,
    },
    Tabulated(TabulatedDynamics),
}

impl RegimeDynamics {
    /// Affine drift `mu·(x + 1)` with linear volatility.
    pub fn affine(mu: f64, sigma2: f64) -> Self {
        RegimeDynamics::Affine { mu, c: mu, sigma2 }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RegimeDynamics::Affine { .. } => "affine",
            RegimeDynamics::Gbm { .. } => "gbm",
            RegimeDynamics::Vasicek { .. } => "vasicek",
            RegimeDynamics::Cir { .. } => "cir",
            RegimeDynamics::Tabulated(_) => "tabulated",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (params, sigma2): (&[f64], f64) = match self {
            RegimeDynamics::Affine { mu, c, sigma2 } => (&[*mu, *c], *sigma2),
            RegimeDynamics::Gbm { mu, sigma2 } => (&[*mu], *sigma2),
            RegimeDynamics::Vasicek { c, mu, sigma2 } | RegimeDynamics::Cir { c, mu, sigma2 } => (&[*c, *mu], *sigma2),
            // validated at construction
            RegimeDynamics::Tabulated(_) => return Ok(()),
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "drift",
                reason: format!("non-finite drift parameter in {self:?}"),
            });
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                reason: format!("must be finite and strictly positive, got {sigma2}"),
            });
        }
        Ok(())
    }

    /// Drift without validation. Used in hot loops after the model is checked.
    #[inline]
    pub(crate) fn drift_raw(&self, x: f64) -> f64 {
        match self {
            RegimeDynamics::Affine { mu, c, .. } => mu * x + c,
            RegimeDynamics::Gbm { mu, .. } => mu * x,
            RegimeDynamics::Vasicek { c, mu, .. } | RegimeDynamics::Cir { c, mu, .. } => c - mu * x,
            RegimeDynamics::Tabulated(t) => t.interp(&t.drift, x),
        }
    }

    /// `σ²(x)` without validation.
    #[inline]
    pub(crate) fn variance_raw(&self, x: f64) -> f64 {
        match self {
            RegimeDynamics::Affine { sigma2, .. } | RegimeDynamics::Gbm { sigma2, .. } => sigma2 * x * x,
            RegimeDynamics::Vasicek { sigma2, .. } => *sigma2,
            RegimeDynamics::Cir { sigma2, .. } => sigma2 * x,
            RegimeDynamics::Tabulated(t) => t.interp(&t.variance, x),
        }
    }

    pub fn drift(&self, x: f64) -> Result<f64> {
        let value = self.drift_raw(x);
        if !value.is_finite() {
            return Err(Error::InvalidParameter {
                name: "drift",
                reason: format!("non-finite drift {value} at x = {x}"),
            });
        }
        Ok(value)
    }

    pub fn vol(&self, x: f64) -> Result<f64> {
        let var = self.variance_raw(x);
        let sigma = match self {
            RegimeDynamics::Affine { sigma2, .. } | RegimeDynamics::Gbm { sigma2, .. } => sigma2.sqrt() * x,
            RegimeDynamics::Cir { sigma2, .. } if x >= 0.0 => sigma2.sqrt() * x.sqrt(),
            _ => var.sqrt(),
        };
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Ellipticity { x, sigma });
        }
        Ok(sigma)
    }

    /// `σ²(x)`, failing where the operator is not strictly elliptic.
    pub fn variance(&self, x: f64) -> Result<f64> {
        let var = self.variance_raw(x);
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::Ellipticity { x, sigma: var.max(0.0).sqrt() });
        }
        Ok(var)
    }
}

/// `𝓛h − rh = μ h′ + ½σ² h″ − r h` at `x`.
pub fn apply_generator(dynamics: &RegimeDynamics, rate: f64, h: f64, h1: f64, h2: f64, x: f64) -> Result<f64> {
    if !(h.is_finite() && h1.is_finite() && h2.is_finite() && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "h",
            reason: format!("non-finite input (h={h}, h'={h1}, h''={h2}, x={x})"),
        });
    }
    let mu = dynamics.drift(x)?;
    let var = dynamics.variance_raw(x);
    Ok(mu * h1 + 0.5 * var * h2 - rate * h)
}

/// A reward `u` with two derivatives.
pub trait Reward: Send + Sync {
    fn value(&self, x: f64) -> f64;
    fn first(&self, x: f64) -> f64;
    fn second(&self, x: f64) -> f64;
}

/// Power utility `u(x) = x^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerUtility {
    gamma: f64,
}

impl PowerUtility {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be finite and > 0, got {gamma}"),
            });
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Reward for PowerUtility {
    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            x.powf(self.gamma)
        }
    }

    fn first(&self, x: f64) -> f64 {
        self.gamma * x.powf(self.gamma - 1.0)
    }

    fn second(&self, x: f64) -> f64 {
        self.gamma * (self.gamma - 1.0) * x.powf(self.gamma - 2.0)
    }
}

/// Two regime dynamics glued together at `L < H`, discounted at rate `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub positive: RegimeDynamics,
    pub negative: RegimeDynamics,
    /// `L`: the positive regime ends when the price falls to this level.
    pub lower: f64,
    /// `H`: the negative regime ends when the price climbs to this level.
    pub upper: f64,
    pub rate: f64,
}

impl ModelSpec {
    pub fn new(positive: RegimeDynamics, negative: RegimeDynamics, lower: f64, upper: f64, rate: f64) -> Result<Self> {
        positive.validate()?;
        negative.validate()?;
        if !(lower.is_finite() && upper.is_finite() && lower > 0.0 && lower < upper) {
            return Err(Error::InvalidParameter {
                name: "L/H",
                reason: format!("need 0 < L < H, got L = {lower}, H = {upper}"),
            });
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter { name: "r", reason: format!("must be finite and > 0, got {rate}") });
        }
        Ok(Self { positive, negative, lower, upper, rate })
    }

    pub fn dynamics(&self, regime: Regime) -> &RegimeDynamics {
        match regime {
            Regime::Positive => &self.positive,
            Regime::Negative => &self.negative,
        }
    }

    /// Open price interval on which a regime operates: `(L, ∞)` or `(0, H)`.
    pub fn operative_domain(&self, regime: Regime) -> (f64, f64) {
        match regime {
            Regime::Positive => (self.lower, f64::INFINITY),
            Regime::Negative => (0.0, self.upper),
        }
    }

    /// Upper end of the search for `A` when none is given.
    pub fn default_search_hi(&self) -> f64 {
        (50.0 * self.upper).max(100.0)
    }

    /// `𝓛_f u − r u` at `x`.
    pub fn reward_drift(&self, regime: Regime, reward: &dyn Reward, x: f64) -> f64 {
        let dynamics = self.dynamics(regime);
        dynamics.drift_raw(x) * reward.first(x) + 0.5 * dynamics.variance_raw(x) * reward.second(x)
            - self.rate * reward.value(x)
    }
}

fn sign_of(value: f64) -> i8 {
    if value > SIGN_DEADBAND {
        1
    } else if value < -SIGN_DEADBAND {
        -1
    } else {
        0
    }
}

/// Threshold `A`: the unique sign change of `𝓛⁺u − ru` on `(L, search_hi]`.
pub fn find_a(model: &ModelSpec, reward: &dyn Reward, search_hi: f64) -> Result<f64> {
    find_a_with_step(model, reward, search_hi, THRESHOLD_SCAN_STEP)
}

pub fn find_a_with_step(model: &ModelSpec, reward: &dyn Reward, search_hi: f64, step: f64) -> Result<f64> {
    if !(search_hi > model.lower) {
        return Err(Error::InvalidParameter {
            name: "search_hi",
            reason: format!("must exceed L = {}, got {search_hi}", model.lower),
        });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter { name: "step", reason: format!("got {step}") });
    }
    let f = |x: f64| model.reward_drift(Regime::Positive, reward, x);
    let lo = model.lower;
    let count = ((search_hi - lo) / step).ceil() as usize;
    let node = |i: usize| if i == count { search_hi } else { lo + i as f64 * step };

    // (left node, right node, direction of change)
    let mut crossings: Vec<(f64, f64, i8)> = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for i in 0..=count {
        let x = node(i);
        let s = sign_of(f(x));
        if s == 0 {
            continue;
        }
        if let Some((x_prev, s_prev)) = last {
            if s != s_prev {
                crossings.push((x_prev, x, s));
            }
        }
        last = Some((x, s));
    }

    match crossings.as_slice() {
        [] => Err(Error::Assumption(AssumptionFailure::NoThreshold { search_hi })),
        [(a, b, dir)] => {
            if *dir > 0 {
                return Err(Error::Assumption(AssumptionFailure::WrongDirection { near: *a }));
            }
            Ok(bisect_sign(f, *a, *b, 1e-10))
        }
        many => Err(Error::Assumption(AssumptionFailure::NonMonotoneSign {
            crossings: many.iter().map(|c| 0.5 * (c.0 + c.1)).collect(),
        })),
    }
}

/// Bisection on a sign change of `f` between `lo` and `hi`.
fn bisect_sign(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let s_lo = sign_of(f(lo));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let s = sign_of(f(mid));
        if s == 0 {
            return mid;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sampled check of the sign conditions on `𝓛_f u − ru`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// Threshold `A`, when it exists and is unique.
    pub threshold: Option<f64>,
    /// `𝓛⁻u − ru < 0` at every sample on `(0, H)`.
    pub negative_sign_ok: bool,
    /// `+` on `(L, A)` and `−` on `(A, 10·A)` at every sample.
    pub positive_pattern_ok: bool,
    pub failure: Option<AssumptionFailure>,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.threshold.is_some() && self.negative_sign_ok && self.positive_pattern_ok
    }
}

/// Samples both sign conditions on a `1e−3` grid. Failures are reported in the
/// flags, never as an error.
pub fn verify_assumptions(model: &ModelSpec, reward: &dyn Reward) -> AssumptionReport {
    const STEP: f64 = 1e-3;
    const EPS: f64 = 1e-6;

    let h = model.upper;
    let cells = ((h - EPS) / STEP).ceil() as usize;
    let negative_sign_ok = (0..=cells).all(|i| {
        let x = (EPS + i as f64 * STEP).min(h);
        sign_of(model.reward_drift(Regime::Negative, reward, x)) < 0
    });

    let (threshold, failure) = match find_a(model, reward, model.default_search_hi()) {
        Ok(a) => (Some(a), None),
        Err(Error::Assumption(f)) => (None, Some(f)),
        Err(other) => (None, Some(AssumptionFailure::Other(other.to_string()))),
    };

    let positive_pattern_ok = match threshold {
        None => false,
        Some(a) => {
            let lo = model.lower;
            let hi = 10.0 * a;
            let cells = ((hi - lo) / STEP).ceil() as usize;
            (0..=cells).all(|i| {
                let x = (lo + i as f64 * STEP).min(hi);
                let s = sign_of(model.reward_drift(Regime::Positive, reward, x));
                if x < a {
                    s >= 0
                } else {
                    s <= 0
                }
            })
        }
    };

    AssumptionReport { threshold, negative_sign_ok, positive_pattern_ok, failure }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_model() -> ModelSpec {
        ModelSpec::new(
            RegimeDynamics::affine(0.1, 0.1),
            RegimeDynamics::Gbm { mu: 1.0 / 30.0, sigma2: 1.0 / 30.0 },
            1.0,
            2.0,
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn drift_formulas() {
        assert!((RegimeDynamics::affine(0.1, 0.1).drift(1.0).unwrap() - 0.2).abs() < 1e-15);
        let vas = RegimeDynamics::Vasicek { c: 0.7, mu: 0.1, sigma2: 0.1 };
        assert!(vas.drift(7.0).unwrap().abs() < 1e-15);
        let gbm = RegimeDynamics::Gbm { mu: 1.0 / 30.0, sigma2: 0.1 };
        assert!((gbm.drift(2.0).unwrap() - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn vol_formulas() {
        let gbm = RegimeDynamics::Gbm { mu: 0.0, sigma2: 1.0 / 30.0 };
        assert!((gbm.vol(1.0).unwrap() - (1.0f64 / 30.0).sqrt()).abs() < 1e-15);
        let cir = RegimeDynamics::Cir { c: 0.7, mu: 0.1, sigma2: 0.1 };
        assert!((cir.vol(4.0).unwrap() - 0.1f64.sqrt() * 2.0).abs() < 1e-15);
        let vas = RegimeDynamics::Vasicek { c: 0.7, mu: 0.1, sigma2: 0.1 };
        for x in [0.01, 1.0, 123.0] {
            assert!((vas.vol(x).unwrap() - 0.1f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn vol_rejects_degenerate_points() {
        let gbm = RegimeDynamics::Gbm { mu: 0.0, sigma2: 0.1 };
        assert!(matches!(gbm.vol(0.0), Err(Error::Ellipticity { .. })));
        let cir = RegimeDynamics::Cir { c: 0.7, mu: 0.1, sigma2: 0.1 };
        assert!(matches!(cir.vol(-1.0), Err(Error::Ellipticity { .. })));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(RegimeDynamics::Gbm { mu: f64::NAN, sigma2: 0.1 }.validate().is_err());
        assert!(RegimeDynamics::Gbm { mu: 0.1, sigma2: 0.0 }.validate().is_err());
        let pos = RegimeDynamics::affine(0.1, 0.1);
        let neg = RegimeDynamics::Gbm { mu: 0.1, sigma2: 0.1 };
        assert!(ModelSpec::new(pos.clone(), neg.clone(), 2.0, 1.0, 0.1).is_err());
        assert!(ModelSpec::new(pos.clone(), neg.clone(), 0.0, 1.0, 0.1).is_err());
        assert!(ModelSpec::new(pos, neg, 1.0, 2.0, 0.0).is_err());
        assert!(PowerUtility::new(0.0).is_err());
        assert!(PowerUtility::new(1.3).is_ok());
    }

    #[test]
    fn generator_vanishes_at_threshold() {
        let model = example_model();
        let u = PowerUtility::new(0.8).unwrap();
        let x = 20.0 / 7.0;
        let v = apply_generator(&model.positive, 0.1, u.value(x), u.first(x), u.second(x), x).unwrap();
        assert!(v.abs() < 1e-14, "{v}");
        let v1 = apply_generator(&model.positive, 0.1, 1.0, 0.8, 0.8 * -0.2, 1.0).unwrap();
        // c·x^γ·(γ(γ+1)/2 − 1 + γ/x) at x = 1
        assert!((v1 - 0.052).abs() < 1e-14, "{v1}");
        assert_eq!(apply_generator(&model.negative, 0.1, 0.0, 0.0, 0.0, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn generator_rejects_non_finite_input() {
        let model = example_model();
        assert!(apply_generator(&model.positive, 0.1, f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn threshold_of_closed_form_example() {
        let model = example_model();
        let u = PowerUtility::new(0.8).unwrap();
        let a = find_a(&model, &u, model.default_search_hi()).unwrap();
        assert!((a - 20.0 / 7.0).abs() < 1e-8, "{a}");
    }

    #[test]
    fn linear_utility_has_no_threshold() {
        let model = example_model();
        let u = PowerUtility::new(1.0).unwrap();
        let err = find_a(&model, &u, model.default_search_hi()).unwrap_err();
        assert!(matches!(err, Error::Assumption(AssumptionFailure::NoThreshold { .. })));
    }

    #[test]
    fn threshold_stable_under_step_halving() {
        let model = example_model();
        let u = PowerUtility::new(0.8).unwrap();
        let hi = model.default_search_hi();
        let a1 = find_a_with_step(&model, &u, hi, 1e-3).unwrap();
        let a2 = find_a_with_step(&model, &u, hi, 5e-4).unwrap();
        assert!((a1 - a2).abs() < 1e-8);
    }

    #[test]
    fn sign_pattern_matches_threshold() {
        let model = example_model();
        let u = PowerUtility::new(0.8).unwrap();
        let a = 20.0 / 7.0;
        for i in 0..20_000 {
            let x = 1.0 + i as f64 * 1e-3;
            if (x - a).abs() < 1e-9 {
                continue;
            }
            let s = sign_of(model.reward_drift(Regime::Positive, &u, x));
            assert_eq!(s, if x < a { 1 } else { -1 }, "x = {x}");
        }
    }

    #[test]
    fn assumption_report_for_closed_form_example() {
        let model = example_model();
        let u = PowerUtility::new(0.8).unwrap();
        let report = verify_assumptions(&model, &u);
        assert!(report.all_ok(), "{report:?}");
        assert!((report.threshold.unwrap() - 20.0 / 7.0).abs() < 1e-8);
    }

    #[test]
    fn gbm_with_linear_utility_fails_positive_pattern() {
        let model = ModelSpec::new(
            RegimeDynamics::Gbm { mu: 0.2, sigma2: 0.1 },
            RegimeDynamics::Gbm { mu: 0.02, sigma2: 0.1 },
            1.0,
            2.0,
            0.1,
        )
        .unwrap();
        let u = PowerUtility::new(1.0).unwrap();
        let report = verify_assumptions(&model, &u);
        assert!(!report.positive_pattern_ok);
        assert!(report.negative_sign_ok);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let t = TabulatedDynamics::new(vec![1.0, 2.0], vec![0.0, 1.0], vec![0.1, 0.3]).unwrap();
        let d = RegimeDynamics::Tabulated(t);
        assert!((d.drift(1.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.variance(1.5).unwrap() - 0.2).abs() < 1e-15);
        assert!((d.drift(5.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(TabulatedDynamics::new(vec![1.0, 1.0], vec![0.0; 2], vec![0.1; 2]).is_err());
        assert!(TabulatedDynamics::new(vec![1.0, 2.0], vec![0.0; 2], vec![0.1, 0.0]).is_err());
    }

    #[test]
    fn regime_parses() {
        assert_eq!("+".parse::<Regime>().unwrap(), Regime::Positive);
        assert_eq!("negative".parse::<Regime>().unwrap(), Regime::Negative);
        assert!("x".parse::<Regime>().is_err());
    }
}
