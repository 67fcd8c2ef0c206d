//! The affine example with closed-form value functions.
//!
//! In the positive regime `dS = c(S + 1)dt + √c·S dW` with discount rate
//! `r = c`; the general solution of `𝓛⁺v − rv = 0` is then
//! `C₁(x − 1)e^{2/x} + C₂(x + 1)`. The negative regime is a geometric
//! Brownian motion whose solutions are powers `x^α`, `x^β`.
//!
//! Two oracles live here. The `ORACLE_*` constants and the `oracle_*`
//! functions carry the reference seven-digit solution for `γ = 0.8`,
//! `L = 1`, `H = 2`. [`AnalyticExample`] rebuilds the same solution for any
//! `γ` from the general solutions and scalar root finding alone, with no
//! finite differences involved.

use crate::error::{Error, Result};
use crate::model::{ModelSpec, PowerUtility, Regime, RegimeDynamics, Reward};
use crate::scan::{first_root, linspace};

pub const ORACLE_GAMMA: f64 = 0.8;
pub const ORACLE_MU_MINUS: f64 = 1.0 / 30.0;
pub const ORACLE_SIGMA2_MINUS: f64 = 1.0 / 30.0;
pub const ORACLE_RATE: f64 = 0.1;
pub const ORACLE_C: f64 = 0.1;
pub const ORACLE_L: f64 = 1.0;
pub const ORACLE_H: f64 = 2.0;
pub const ORACLE_A: f64 = 20.0 / 7.0;
pub const ORACLE_B: f64 = 3.839282;
pub const ORACLE_M: f64 = 1.775502;
pub const ORACLE_BUY_LOW: f64 = 1.1632;
pub const ORACLE_BUY_HIGH: f64 = 2.1686;

/// Reference value-function coefficients, in display order.
pub mod coeffs {
    pub const SELLER_POS_C1: f64 = 0.1075171;
    pub const SELLER_POS_C2: f64 = 0.5;
    pub const SELLER_NEG_C3: f64 = 2.126333;
    pub const SELLER_NEG_C4: f64 = 0.3816175;
    pub const BUYER_POS_D1: f64 = 0.0408;
    pub const BUYER_POS_D2: f64 = 0.0138;
    pub const BUYER_TAIL: f64 = 0.1858;
    pub const BUYER_NEG: f64 = 0.0277;
}

/// `(x − 1)e^{2/x}`, the first positive-regime solution.
pub fn affine_solution_1(x: f64) -> f64 {
    (x - 1.0) * (2.0 / x).exp()
}

/// `(x + 1)`, the second positive-regime solution.
pub fn affine_solution_2(x: f64) -> f64 {
    x + 1.0
}

fn affine_solution_1_prime(x: f64) -> f64 {
    (2.0 / x).exp() * (1.0 - 2.0 * (x - 1.0) / (x * x))
}

/// The decreasing combination `(x + 1) − (x − 1)e^{2/x}`, before normalisation.
pub fn affine_phi(x: f64) -> f64 {
    affine_solution_2(x) - affine_solution_1(x)
}

fn affine_phi_prime(x: f64) -> f64 {
    1.0 - affine_solution_1_prime(x)
}

/// The example model with the reference parameters.
pub fn example_model() -> ModelSpec {
    example_model_with(ORACLE_C, ORACLE_MU_MINUS, ORACLE_SIGMA2_MINUS, ORACLE_L, ORACLE_H)
        .expect("reference parameters are valid")
}

/// The example family: affine positive regime with `mu = sigma2 = r = c`.
pub fn example_model_with(c: f64, mu_minus: f64, sigma2_minus: f64, lower: f64, upper: f64) -> Result<ModelSpec> {
    ModelSpec::new(
        RegimeDynamics::affine(c, c),
        RegimeDynamics::Gbm { mu: mu_minus, sigma2: sigma2_minus },
        lower,
        upper,
        c,
    )
}

pub fn example_utility() -> PowerUtility {
    PowerUtility::new(ORACLE_GAMMA).expect("gamma is positive")
}

/// Reference seller value `V(x, f)`. `NaN` outside the state space.
pub fn oracle_seller_value(x: f64, regime: Regime) -> f64 {
    use coeffs::*;
    match regime {
        Regime::Positive if x < ORACLE_L => f64::NAN,
        Regime::Positive if x >= ORACLE_B => x.powf(ORACLE_GAMMA),
        Regime::Positive => SELLER_POS_C1 * affine_solution_1(x) + SELLER_POS_C2 * affine_solution_2(x),
        Regime::Negative if !(0.0..=ORACLE_H).contains(&x) => f64::NAN,
        Regime::Negative if x <= ORACLE_M => x.powf(ORACLE_GAMMA),
        Regime::Negative => SELLER_NEG_C3 * x.powi(-3) + SELLER_NEG_C4 * x * x,
    }
}

/// Reference buyer value `V_p(x, f)`. `NaN` outside the state space.
pub fn oracle_buyer_value(x: f64, regime: Regime) -> f64 {
    use coeffs::*;
    match regime {
        Regime::Positive if x < ORACLE_L => f64::NAN,
        Regime::Positive if x < ORACLE_BUY_LOW => {
            BUYER_POS_D1 * affine_solution_1(x) + BUYER_POS_D2 * affine_solution_2(x)
        }
        Regime::Positive if x <= ORACLE_BUY_HIGH => oracle_seller_value(x, Regime::Positive) - x.powf(ORACLE_GAMMA),
        Regime::Positive => BUYER_TAIL * affine_phi(x),
        Regime::Negative if !(0.0..=ORACLE_H).contains(&x) => f64::NAN,
        Regime::Negative => BUYER_NEG * x * x,
    }
}

/// Roots of `½σ²y² + (μ − ½σ²)y − r = 0`, larger first.
///
/// `x^y` solves `μx v′ + ½σ²x² v″ − rv = 0` exactly for these `y`.
pub fn negative_regime_exponents(mu: f64, sigma2: f64, rate: f64) -> (f64, f64) {
    let qa = 0.5 * sigma2;
    let qb = mu - 0.5 * sigma2;
    let disc = (qb * qb + 4.0 * qa * rate).sqrt();
    // avoid cancellation in the smaller-magnitude root
    let q = -0.5 * (qb + qb.signum() * disc);
    let (r1, r2) = if q == 0.0 { (0.0, -qb / qa) } else { (q / qa, -rate / q) };
    if r1 >= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Solution pair with values and slopes, for 2×2 fitting.
#[derive(Clone, Copy)]
struct Basis {
    f1: fn(f64, f64) -> f64,
    d1: fn(f64, f64) -> f64,
    f2: fn(f64, f64) -> f64,
    d2: fn(f64, f64) -> f64,
    /// Exponents for the power basis; ignored by the affine one.
    p1: f64,
    p2: f64,
}

impl Basis {
    fn affine() -> Self {
        Basis {
            f1: |x, _| affine_solution_1(x),
            d1: |x, _| affine_solution_1_prime(x),
            f2: |x, _| affine_solution_2(x),
            d2: |_, _| 1.0,
            p1: 0.0,
            p2: 0.0,
        }
    }

    fn power(p1: f64, p2: f64) -> Self {
        Basis {
            f1: |x, p| x.powf(p),
            d1: |x, p| p * x.powf(p - 1.0),
            f2: |x, p| x.powf(p),
            d2: |x, p| p * x.powf(p - 1.0),
            p1,
            p2,
        }
    }

    fn value(&self, c: (f64, f64), x: f64) -> f64 {
        c.0 * (self.f1)(x, self.p1) + c.1 * (self.f2)(x, self.p2)
    }

    fn slope(&self, c: (f64, f64), x: f64) -> f64 {
        c.0 * (self.d1)(x, self.p1) + c.1 * (self.d2)(x, self.p2)
    }

    /// Coefficients with `v(x0) = v0` and `v(x1) = v1`.
    fn through(&self, x0: f64, v0: f64, x1: f64, v1: f64) -> (f64, f64) {
        solve2(
            [(self.f1)(x0, self.p1), (self.f2)(x0, self.p2)],
            [(self.f1)(x1, self.p1), (self.f2)(x1, self.p2)],
            [v0, v1],
        )
    }
}

fn solve2(row0: [f64; 2], row1: [f64; 2], rhs: [f64; 2]) -> (f64, f64) {
    let det = row0[0] * row1[1] - row0[1] * row1[0];
    ((rhs[0] * row1[1] - row0[1] * rhs[1]) / det, (row0[0] * rhs[1] - rhs[0] * row1[0]) / det)
}

/// Exact solution of both problems for the example family.
#[derive(Debug, Clone)]
pub struct AnalyticExample {
    pub gamma: f64,
    pub lower: f64,
    pub upper: f64,
    pub threshold: f64,
    pub profit_take: f64,
    pub stop_loss: f64,
    /// `(C₁, C₂)` of the positive seller curve.
    pub seller_pos: (f64, f64),
    /// Coefficients of `(x^α, x^β)` for the negative seller curve.
    pub seller_neg: (f64, f64),
    pub exponents: (f64, f64),
    pub buy_low: f64,
    pub buy_high: f64,
    /// `(D₁, D₂)` of the positive buyer curve on `[L, a]`.
    pub buyer_pos: (f64, f64),
    /// Coefficient of `x^α` for the negative buyer curve.
    pub buyer_neg: f64,
    /// Multiplier of the unnormalised `affine_phi` on `(b, ∞)`.
    pub tail_coeff: f64,
}

impl AnalyticExample {
    /// The reference configuration.
    pub fn reference() -> Result<Self> {
        Self::solve(ORACLE_C, ORACLE_MU_MINUS, ORACLE_SIGMA2_MINUS, ORACLE_L, ORACLE_H, ORACLE_GAMMA)
    }

    /// Only configurations where the stop-loss stays at or above `L` and
    /// `a < H` are supported.
    pub fn solve(c: f64, mu_minus: f64, sigma2_minus: f64, lower: f64, upper: f64, gamma: f64) -> Result<Self> {
        let model = example_model_with(c, mu_minus, sigma2_minus, lower, upper)?;
        let u = PowerUtility::new(gamma)?;
        let threshold = crate::model::find_a(&model, &u, model.default_search_hi())?;
        let pos = Basis::affine();
        let exponents = negative_regime_exponents(mu_minus, sigma2_minus, c);
        let neg = Basis::power(exponents.0, exponents.1);
        let tight = 1e-13;

        // profit-taking boundary
        let u_l = u.value(lower);
        let pos_at = |b: f64| pos.through(lower, u_l, b, u.value(b));
        let resid_b = |b: f64| -> Result<f64> { Ok(pos.slope(pos_at(b), b) - u.first(b)) };
        let b_grid = linspace(threshold, (10.0 * threshold).max(2.0 * upper), 4000);
        let profit_take = first_root("analytic B", &b_grid, 0.0, tight, resid_b, resid_b)?.x;
        let seller_pos = pos_at(profit_take);
        if profit_take <= upper {
            return Err(Error::Unsupported("analytic example needs B > H".into()));
        }

        // stop-loss boundary
        let v_h = pos.value(seller_pos, upper);
        let neg_at = |m: f64| neg.through(m, u.value(m), upper, v_h);
        let resid_m = |m: f64| -> Result<f64> { Ok(neg.slope(neg_at(m), m) - u.first(m)) };
        let m_grid: Vec<f64> = (1..4000).map(|k| upper * (1.0 - k as f64 / 4000.0)).collect();
        let stop_loss = first_root("analytic m", &m_grid, 0.0, tight, resid_m, resid_m)?.x;
        if stop_loss < lower {
            return Err(Error::Unsupported("analytic example needs m >= L".into()));
        }
        let seller_neg = neg_at(stop_loss);

        // positive gains g = V − u on [L, B]
        let g = |x: f64| pos.value(seller_pos, x) - u.value(x);
        let g1 = |x: f64| pos.slope(seller_pos, x) - u.first(x);

        // b maximises g/φ
        let rho = |x: f64| -> Result<f64> { Ok(g(x) * affine_phi_prime(x) - g1(x) * affine_phi(x)) };
        let hi = threshold.min(profit_take);
        let b_grid = linspace(lower + 1e-9, hi, 4000);
        let buy_high = first_root("analytic b", &b_grid, 0.0, tight, rho, rho)?.x;
        let tail_coeff = g(buy_high) / affine_phi(buy_high);

        let k = if buy_high < upper { tail_coeff * affine_phi(upper) } else { g(upper) };
        let buyer_neg = k / upper.powf(exponents.0);
        let w = buyer_neg * lower.powf(exponents.0);

        let vp_at = |a: f64| pos.through(lower, w, a, g(a));
        let resid_a = |a: f64| -> Result<f64> { Ok(pos.slope(vp_at(a), a) - g1(a)) };
        let a_grid = linspace(lower + 1e-6 * (buy_high - lower), buy_high, 4000);
        let buy_low = first_root("analytic a", &a_grid, 0.0, tight, resid_a, resid_a)?.x;
        if buy_low >= upper {
            return Err(Error::Unsupported("analytic example needs a < H".into()));
        }
        let buyer_pos = vp_at(buy_low);

        Ok(Self {
            gamma,
            lower,
            upper,
            threshold,
            profit_take,
            stop_loss,
            seller_pos,
            seller_neg,
            exponents,
            buy_low,
            buy_high,
            buyer_pos,
            buyer_neg,
            tail_coeff,
        })
    }

    /// `V(x, f)`. `NaN` outside the state space.
    pub fn seller_value(&self, x: f64, regime: Regime) -> f64 {
        match regime {
            Regime::Positive if x < self.lower => f64::NAN,
            Regime::Positive if x >= self.profit_take => x.powf(self.gamma),
            Regime::Positive => Basis::affine().value(self.seller_pos, x),
            Regime::Negative if !(0.0..=self.upper).contains(&x) => f64::NAN,
            Regime::Negative if x <= self.stop_loss => x.powf(self.gamma),
            Regime::Negative => Basis::power(self.exponents.0, self.exponents.1).value(self.seller_neg, x),
        }
    }

    /// `g(x, f) = V(x, f) − u(x)`.
    pub fn gains(&self, x: f64, regime: Regime) -> f64 {
        self.seller_value(x, regime) - x.powf(self.gamma)
    }

    /// `V_p(x, f)`. `NaN` outside the state space.
    pub fn buyer_value(&self, x: f64, regime: Regime) -> f64 {
        match regime {
            Regime::Positive if x < self.lower => f64::NAN,
            Regime::Positive if x < self.buy_low => Basis::affine().value(self.buyer_pos, x),
            Regime::Positive if x <= self.buy_high => self.gains(x, regime),
            Regime::Positive => self.tail_coeff * affine_phi(x),
            Regime::Negative if !(0.0..=self.upper).contains(&x) => f64::NAN,
            Regime::Negative => self.buyer_neg * x.powf(self.exponents.0),
        }
    }
}
