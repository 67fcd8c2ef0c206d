//! The buyer's free boundary problem.
//!
//! A buyer who later sells optimally collects `g = V − u`, the seller's
//! value minus the purchase price in utility terms. They buy on an interval
//! `[a, b]` in the positive regime and never in the negative regime except
//! at the absorbing state `0`. Above `b` the value is a multiple of the
//! decreasing fundamental solution `φ₊`, which pins `b` down independently;
//! `a` follows from pasting against `g` once the negative-regime curve fixes
//! the value at `L`.

use crate::error::{Error, Result};
use crate::model::{Regime, Reward};
use crate::odesolve::{fundamental_phi_plus_auto, solve_linear_bvp, FundamentalSolution, GridFunction};
use crate::scan::{first_root, linspace};
use crate::seller::{seller_derivative_at, seller_value_at, Numerics, SellerSolution};
use crate::ModelSpec;

const B_SCAN_POINTS: usize = 400;
const B_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuyerResiduals {
    /// `v_p′(a⁻) − g′(a, +)`.
    pub pasting_a: f64,
    /// Slope mismatch of the tail at `b`.
    pub pasting_b: f64,
    pub continuity_l: f64,
    pub continuity_h: f64,
}

#[derive(Debug, Clone)]
pub struct BuyerSolution {
    /// `a`: lower end of the buy interval.
    pub buy_low: f64,
    /// `b`: upper end of the buy interval.
    pub buy_high: f64,
    /// Value on `[L, a]` in the positive regime.
    pub vp_pos: GridFunction,
    /// Value on `[0, H]` in the negative regime.
    pub vp_neg: GridFunction,
    /// `g(b, +) / φ₊(b)`.
    pub tail_coeff: f64,
    pub phi: FundamentalSolution,
    pub residuals: BuyerResiduals,
    pub lower: f64,
    pub upper: f64,
}

/// `g(x, f) = V(x, f) − u(x)`.
pub fn gains_g(seller: &SellerSolution, reward: &dyn Reward, x: f64, regime: Regime) -> Result<f64> {
    Ok(seller_value_at(seller, reward, x, regime)? - reward.value(x))
}

fn gains_slope(seller: &SellerSolution, reward: &dyn Reward, x: f64) -> Result<f64> {
    Ok(seller_derivative_at(seller, reward, x, Regime::Positive)? - reward.first(x))
}

fn rho(seller: &SellerSolution, reward: &dyn Reward, phi: &FundamentalSolution, x: f64) -> Result<f64> {
    let g = gains_g(seller, reward, x, Regime::Positive)?;
    let g1 = gains_slope(seller, reward, x)?;
    Ok(g * phi.derivative(x)? - g1 * phi.value(x)?)
}

/// Upper buy boundary `b`: the root of `g·φ₊′ − g′·φ₊` on `(L, min(A, B)]`.
pub fn find_b(seller: &SellerSolution, reward: &dyn Reward, phi: &FundamentalSolution, threshold: f64) -> Result<f64> {
    let hi = threshold.min(seller.profit_take);
    if !(hi > seller.lower) {
        return Err(Error::InvalidParameter { name: "A", reason: format!("search interval (L, {hi}] is empty") });
    }
    let lo = seller.lower + 1e-9 * (hi - seller.lower);
    let candidates = linspace(lo, hi, B_SCAN_POINTS);
    let f = |x: f64| rho(seller, reward, phi, x);
    let root = first_root("upper buy boundary b", &candidates, 0.0, B_TOL, f, f)?;
    Ok(root.x)
}

/// Solves the buyer problem on top of a solved seller problem.
pub fn solve_buyer(
    model: &ModelSpec,
    reward: &dyn Reward,
    seller: &SellerSolution,
    numerics: &Numerics,
) -> Result<BuyerSolution> {
    numerics.validate()?;
    let (lower, upper) = (model.lower, model.upper);
    let threshold = seller.threshold;
    let x_max = numerics.default_x_max(threshold, upper);
    let phi = fundamental_phi_plus_auto(model, x_max, numerics.cells_per_unit, numerics.max_cells)?;

    let buy_high = find_b(seller, reward, &phi, threshold)?;
    let g_b = gains_g(seller, reward, buy_high, Regime::Positive)?;
    let tail_coeff = g_b / phi.value(buy_high)?;
    if !(g_b > 0.0) {
        return Err(Error::InvalidShape(format!("gains at b = {buy_high} are not positive ({g_b})")));
    }

    // v_p(H, +): the tail if H lies above b, otherwise g(H, +) as long as a < H
    let k = if buy_high < upper {
        tail_coeff * phi.value(upper)?
    } else {
        gains_g(seller, reward, upper, Regime::Positive)?
    };
    let vp_neg = solve_linear_bvp(&model.negative, model.rate, 0.0, upper, 0.0, k, numerics.cells(0.0, upper))?;
    let w = vp_neg.value_at(lower)?;

    let curve = |n: &Numerics, a: f64| -> Result<GridFunction> {
        let g_a = gains_g(seller, reward, a, Regime::Positive)?;
        solve_linear_bvp(&model.positive, model.rate, lower, a, w, g_a, n.cells(lower, a))
    };
    let residual =
        |n: &Numerics, a: f64| -> Result<f64> { Ok(curve(n, a)?.derivative_at(a)? - gains_slope(seller, reward, a)?) };
    let coarse = numerics.coarse();
    let lo = lower + 1e-6 * (buy_high - lower);
    let candidates = linspace(lo, buy_high, numerics.scan_points);
    let root = first_root(
        "lower buy boundary a",
        &candidates,
        numerics.tol_pasting,
        numerics.boundary_tol,
        |a| residual(&coarse, a),
        |a| residual(numerics, a),
    )?;
    let buy_low = root.x;
    if !(buy_low > lower && buy_low < buy_high) {
        return Err(Error::InvalidShape(format!(
            "lower buy boundary a = {buy_low} is outside (L, b) = ({lower}, {buy_high})"
        )));
    }
    if buy_high >= upper && buy_low >= upper {
        return Err(Error::Unsupported(format!(
            "buy interval starts at a = {buy_low} >= H = {upper}; v_p(H, +) would be self-referential"
        )));
    }
    let vp_pos = curve(numerics, buy_low)?;

    let pasting_a = vp_pos.derivative_at(buy_low)? - gains_slope(seller, reward, buy_low)?;
    let pasting_b = tail_coeff * phi.derivative(buy_high)? - gains_slope(seller, reward, buy_high)?;
    let mut sol = BuyerSolution {
        buy_low,
        buy_high,
        vp_pos,
        vp_neg,
        tail_coeff,
        phi,
        residuals: BuyerResiduals { pasting_a, pasting_b, continuity_l: 0.0, continuity_h: 0.0 },
        lower,
        upper,
    };
    let at_h = buyer_value_at(&sol, seller, reward, upper, Regime::Positive)?;
    sol.residuals.continuity_l = (sol.vp_pos.first() - sol.vp_neg.value_at(lower)?).abs();
    sol.residuals.continuity_h = (sol.vp_neg.last() - at_h).abs();
    Ok(sol)
}

/// `V_p(x, f)` from a solved buyer problem. Zero beyond the `φ₊` truncation point.
pub fn buyer_value_at(
    sol: &BuyerSolution,
    seller: &SellerSolution,
    reward: &dyn Reward,
    x: f64,
    regime: Regime,
) -> Result<f64> {
    match regime {
        Regime::Positive => {
            if !(x >= sol.lower) {
                return Err(Error::Domain { x, lo: sol.lower, hi: f64::INFINITY });
            }
            if x < sol.buy_low {
                sol.vp_pos.value_at(x)
            } else if x <= sol.buy_high {
                gains_g(seller, reward, x, Regime::Positive)
            } else if x <= sol.phi.x_max() {
                Ok(sol.tail_coeff * sol.phi.value(x)?)
            } else {
                Ok(0.0)
            }
        }
        Regime::Negative => {
            if !(x >= 0.0 && x <= sol.upper) {
                return Err(Error::Domain { x, lo: 0.0, hi: sol.upper });
            }
            sol.vp_neg.value_at(x)
        }
    }
}
