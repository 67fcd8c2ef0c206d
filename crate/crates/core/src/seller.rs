//! The seller's free boundary problem.
//!
//! In the positive regime the seller holds on `(L, B)` and sells on
//! `[B, ∞)`; in the negative regime they hold on `(m, H)` and sell on
//! `[0, m]`. Each regime contributes one linear ODE, the two are linked
//! through the values at `L` and `H`, and `B`, `m` are fixed by smooth
//! pasting against the utility.
//!
//! Stage 1 assumes `m ≥ L`, which decouples the regimes: the positive
//! problem starts from `v(L, +) = u(L)` and hands `v(H, +)` to the negative
//! problem. When the resulting `m` falls below `L`, stage 2 searches for
//! the common value `w = v(L, ±)` that makes both curves agree at `L`.

use crate::error::{Error, Result};
use crate::model::{find_a, ModelSpec, Regime, Reward};
use crate::odesolve::{cells_for, solve_linear_bvp, GridFunction};
use crate::scan::{first_root, linspace};

/// Discretisation and tolerance settings shared by both solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    /// Grid density for boundary value problems.
    pub cells_per_unit: f64,
    /// Hard cap on cells per grid.
    pub max_cells: usize,
    /// A scanned boundary candidate is accepted outright if its pasting
    /// residual is within this tolerance.
    pub tol_pasting: f64,
    /// Bisection stops once free boundaries are bracketed this tightly.
    pub boundary_tol: f64,
    /// Target for the continuity residual at `L` in the stage-2 search.
    pub tol_continuity: f64,
    /// Candidates per bracketing scan.
    pub scan_points: usize,
    /// Far-field truncation for `φ₊`; `None` means `250·max(H, A)`.
    pub x_max: Option<f64>,
    /// Largest profit-taking boundary tried; `None` means `max(10·A, 2·H)`.
    pub b_max: Option<f64>,
    /// Upper end of the search for `A`; `None` means `max(100, 50·H)`.
    pub threshold_search_hi: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            cells_per_unit: 4096.0,
            max_cells: 1 << 22,
            tol_pasting: 1e-6,
            boundary_tol: 1e-6,
            tol_continuity: 1e-9,
            scan_points: 200,
            x_max: None,
            b_max: None,
            threshold_search_hi: None,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be > 0, got {v}") })
            }
        };
        positive("cells_per_unit", self.cells_per_unit)?;
        positive("tol_pasting", self.tol_pasting)?;
        positive("boundary_tol", self.boundary_tol)?;
        positive("tol_continuity", self.tol_continuity)?;
        if self.scan_points < 4 {
            return Err(Error::InvalidParameter {
                name: "scan_points",
                reason: format!("need at least 4, got {}", self.scan_points),
            });
        }
        if let Some(x) = self.x_max {
            positive("x_max", x)?;
        }
        if let Some(x) = self.b_max {
            positive("b_max", x)?;
        }
        Ok(())
    }

    pub(crate) fn cells(&self, lo: f64, hi: f64) -> usize {
        cells_for(lo, hi, self.cells_per_unit, self.max_cells)
    }

    /// Grid density used for bracketing scans before bisection.
    pub(crate) fn coarse(&self) -> Numerics {
        Numerics { cells_per_unit: (self.cells_per_unit / 16.0).max(64.0), ..self.clone() }
    }

    pub fn default_b_max(&self, threshold: f64, upper: f64) -> f64 {
        self.b_max.unwrap_or((10.0 * threshold).max(2.0 * upper))
    }

    pub fn default_x_max(&self, threshold: f64, upper: f64) -> f64 {
        self.x_max.unwrap_or(250.0 * threshold.max(upper))
    }
}

/// Which coupling between the regimes the solution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SellerCase {
    /// `m ≥ L`: selling on regime switch, regimes decouple.
    MAboveL,
    /// `0 < m < L`: the holder rides through the switch at `L`.
    MBelowL,
    /// `m = 0`: no smooth-pasting point in the negative regime.
    MZero,
}

impl std::fmt::Display for SellerCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SellerCase::MAboveL => "MAboveL",
            SellerCase::MBelowL => "MBelowL",
            SellerCase::MZero => "MZero",
        })
    }
}

impl std::str::FromStr for SellerCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "MAboveL" => Ok(SellerCase::MAboveL),
            "MBelowL" => Ok(SellerCase::MBelowL),
            "MZero" => Ok(SellerCase::MZero),
            other => Err(format!("unknown seller case `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SellerSolution {
    /// `B`: sell once the price reaches this level in the positive regime.
    pub profit_take: f64,
    /// `m`: sell once the price falls to this level in the negative regime.
    pub stop_loss: f64,
    pub case: SellerCase,
    /// Threshold `A` the search for `B` started from.
    pub threshold: f64,
    /// Value on `[L, B]` in the positive regime.
    pub v_pos: GridFunction,
    /// Value on `[max(m, 0), H]` in the negative regime.
    pub v_neg: GridFunction,
    pub pasting_residual_b: f64,
    pub pasting_residual_m: f64,
    pub continuity_residual_h: f64,
    pub continuity_residual_l: f64,
    pub lower: f64,
    pub upper: f64,
}

fn positive_curve(
    model: &ModelSpec,
    reward: &dyn Reward,
    v_at_l: f64,
    boundary: f64,
    numerics: &Numerics,
) -> Result<GridFunction> {
    solve_linear_bvp(
        &model.positive,
        model.rate,
        model.lower,
        boundary,
        v_at_l,
        reward.value(boundary),
        numerics.cells(model.lower, boundary),
    )
}

fn negative_curve(
    model: &ModelSpec,
    reward: &dyn Reward,
    v_at_h: f64,
    boundary: f64,
    numerics: &Numerics,
) -> Result<GridFunction> {
    solve_linear_bvp(
        &model.negative,
        model.rate,
        boundary,
        model.upper,
        reward.value(boundary),
        v_at_h,
        numerics.cells(boundary, model.upper),
    )
}

/// Profit-taking boundary `B ∈ [A, B_max]` and the positive value curve on `[L, B]`.
pub fn solve_positive_stage(
    model: &ModelSpec,
    reward: &dyn Reward,
    v_at_l: f64,
    threshold: f64,
    numerics: &Numerics,
) -> Result<(f64, GridFunction)> {
    let u_l = reward.value(model.lower);
    if !(v_at_l >= u_l - 1e-12) {
        return Err(Error::InvalidParameter {
            name: "v_at_L",
            reason: format!("must be at least u(L) = {u_l}, got {v_at_l}"),
        });
    }
    if !(threshold > model.lower) {
        return Err(Error::InvalidParameter {
            name: "A",
            reason: format!("threshold {threshold} must exceed L = {}", model.lower),
        });
    }
    let b_max = numerics.default_b_max(threshold, model.upper);
    let candidates = linspace(threshold, b_max.max(threshold * (1.0 + 1e-9)), numerics.scan_points);
    let coarse = numerics.coarse();
    let residual = |n: &Numerics, b: f64| -> Result<f64> {
        let v = positive_curve(model, reward, v_at_l, b, n)?;
        Ok(v.derivative_at(b)? - reward.first(b))
    };
    let root = first_root(
        "profit-taking boundary B",
        &candidates,
        numerics.tol_pasting,
        numerics.boundary_tol,
        |b| residual(&coarse, b),
        |b| residual(numerics, b),
    )?;
    let curve = positive_curve(model, reward, v_at_l, root.x, numerics)?;
    Ok((root.x, curve))
}

/// Candidate stop-loss levels, scanned downward from just below `H`.
fn stop_loss_candidates(upper: f64, scan_points: usize) -> Vec<f64> {
    let mut offsets: Vec<f64> =
        (0..).map(|j| 1e-8 * 2f64.powi(j)).take_while(|&t| t < 1.0 / scan_points as f64).collect();
    offsets.extend((1..scan_points).map(|k| k as f64 / scan_points as f64));
    offsets.extend([1.0 - 1e-3, 1.0 - 1e-4]);
    offsets.iter().map(|t| upper * (1.0 - t)).collect()
}

/// Stop-loss boundary `m ∈ [0, H)` and the negative value curve on `[m, H]`.
///
/// Returns `m = 0` with the pasting condition waived when no positive level
/// satisfies it.
pub fn solve_negative_stage(
    model: &ModelSpec,
    reward: &dyn Reward,
    v_at_h: f64,
    numerics: &Numerics,
) -> Result<(f64, GridFunction)> {
    let u_h = reward.value(model.upper);
    if !(v_at_h > u_h) {
        return Err(Error::InvalidParameter {
            name: "v_at_H",
            reason: format!("must exceed u(H) = {u_h}, got {v_at_h}"),
        });
    }
    let candidates = stop_loss_candidates(model.upper, numerics.scan_points);
    let coarse = numerics.coarse();
    let residual = |n: &Numerics, m: f64| -> Result<f64> {
        let v = negative_curve(model, reward, v_at_h, m, n)?;
        Ok(v.derivative_at(m)? - reward.first(m))
    };
    let root = first_root(
        "stop-loss boundary m",
        &candidates,
        numerics.tol_pasting,
        numerics.boundary_tol,
        |m| residual(&coarse, m),
        |m| residual(numerics, m),
    );
    match root {
        Ok(root) => {
            if root.x >= candidates[0] {
                return Err(Error::InvalidShape(format!(
                    "stop-loss boundary m = {} sits at H: the negative regime never continues",
                    root.x
                )));
            }
            let curve = negative_curve(model, reward, v_at_h, root.x, numerics)?;
            Ok((root.x, curve))
        }
        Err(Error::NoBracket { samples, .. }) => {
            if samples.first().is_some_and(|&(_, r)| r < 0.0) {
                return Err(Error::InvalidShape(
                    "pasting residual is negative right below H: no continuation region".into(),
                ));
            }
            let curve = negative_curve(model, reward, v_at_h, 0.0, numerics)?;
            Ok((0.0, curve))
        }
        Err(other) => Err(other),
    }
}

/// `V(H, +)` read off a positive curve on `[L, B]`.
fn value_at_upper(v_pos: &GridFunction, profit_take: f64, model: &ModelSpec, reward: &dyn Reward) -> Result<f64> {
    if model.upper >= profit_take {
        Ok(reward.value(model.upper))
    } else {
        v_pos.value_at(model.upper)
    }
}

struct Coupled {
    profit_take: f64,
    v_pos: GridFunction,
    stop_loss: f64,
    v_neg: GridFunction,
    /// `v(L, −) − v(L, +)`.
    gap_at_l: f64,
}

fn solve_coupled(
    model: &ModelSpec,
    reward: &dyn Reward,
    threshold: f64,
    w: f64,
    numerics: &Numerics,
) -> Result<Coupled> {
    let (profit_take, v_pos) = solve_positive_stage(model, reward, w, threshold, numerics)?;
    let v_at_h = value_at_upper(&v_pos, profit_take, model, reward)?;
    if profit_take <= model.upper {
        return Err(Error::InvalidShape(format!(
            "profit-taking boundary B = {profit_take} does not exceed H = {}",
            model.upper
        )));
    }
    let (stop_loss, v_neg) = solve_negative_stage(model, reward, v_at_h, numerics)?;
    let neg_at_l = if stop_loss < model.lower { v_neg.value_at(model.lower)? } else { reward.value(model.lower) };
    Ok(Coupled { profit_take, v_pos, stop_loss, v_neg, gap_at_l: neg_at_l - w })
}

/// Solves the full seller problem.
pub fn solve_seller(model: &ModelSpec, reward: &dyn Reward, numerics: &Numerics) -> Result<SellerSolution> {
    numerics.validate()?;
    let search_hi = numerics.threshold_search_hi.unwrap_or(model.default_search_hi());
    let threshold = find_a(model, reward, search_hi)?;
    let u_l = reward.value(model.lower);

    let stage1 = solve_coupled(model, reward, threshold, u_l, numerics)?;
    let (solution, gap) = if stage1.stop_loss >= model.lower {
        (stage1, 0.0)
    } else {
        let solution = couple_at_lower(model, reward, threshold, stage1, numerics)?;
        let gap = solution.gap_at_l.abs();
        (solution, gap)
    };

    let case = if solution.stop_loss >= model.lower {
        SellerCase::MAboveL
    } else if solution.stop_loss > 0.0 {
        SellerCase::MBelowL
    } else {
        SellerCase::MZero
    };
    let pasting_residual_b = solution.v_pos.derivative_at(solution.profit_take)? - reward.first(solution.profit_take);
    let pasting_residual_m = if solution.stop_loss > 0.0 {
        solution.v_neg.derivative_at(solution.stop_loss)? - reward.first(solution.stop_loss)
    } else {
        0.0
    };
    let v_at_h = value_at_upper(&solution.v_pos, solution.profit_take, model, reward)?;
    let continuity_residual_h = (v_at_h - solution.v_neg.last()).abs();

    Ok(SellerSolution {
        profit_take: solution.profit_take,
        stop_loss: solution.stop_loss,
        case,
        threshold,
        v_pos: solution.v_pos,
        v_neg: solution.v_neg,
        pasting_residual_b,
        pasting_residual_m,
        continuity_residual_h,
        continuity_residual_l: gap,
        lower: model.lower,
        upper: model.upper,
    })
}

/// Stage 2: bisection on `w = v(L, ±)` until the two regimes agree at `L`.
fn couple_at_lower(
    model: &ModelSpec,
    reward: &dyn Reward,
    threshold: f64,
    at_u_l: Coupled,
    numerics: &Numerics,
) -> Result<Coupled> {
    let u_l = reward.value(model.lower);
    let u_h = reward.value(model.upper);
    debug_assert!(at_u_l.gap_at_l > 0.0);

    let mut samples = vec![(u_l, at_u_l.gap_at_l)];
    let mut lo = (u_l, at_u_l);
    let mut span = 10.0 * (u_h - u_l).abs().max(1e-6);
    let mut hi = None;
    for _ in 0..12 {
        let w = u_l + span;
        let trial = solve_coupled(model, reward, threshold, w, numerics)?;
        samples.push((w, trial.gap_at_l));
        if trial.gap_at_l <= 0.0 {
            hi = Some((w, trial));
            break;
        }
        lo = (w, trial);
        span *= 2.0;
    }
    let Some(mut hi) = hi else {
        return Err(Error::NoBracket { what: "continuity value v(L)", lo: u_l, hi: u_l + span, samples });
    };

    if hi.1.gap_at_l.abs() <= numerics.tol_continuity {
        return Ok(hi.1);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo.0 + hi.0);
        if !(mid > lo.0 && mid < hi.0) {
            break;
        }
        let trial = solve_coupled(model, reward, threshold, mid, numerics)?;
        if trial.gap_at_l.abs() <= numerics.tol_continuity {
            return Ok(trial);
        }
        if trial.gap_at_l > 0.0 {
            lo = (mid, trial);
        } else {
            hi = (mid, trial);
        }
    }
    Ok(if lo.1.gap_at_l.abs() < hi.1.gap_at_l.abs() { lo.1 } else { hi.1 })
}

/// `V(x, f)` from a solved seller problem.
pub fn seller_value_at(sol: &SellerSolution, reward: &dyn Reward, x: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Positive => {
            if !(x >= sol.lower) {
                return Err(Error::Domain { x, lo: sol.lower, hi: f64::INFINITY });
            }
            if x >= sol.profit_take {
                Ok(reward.value(x))
            } else {
                sol.v_pos.value_at(x)
            }
        }
        Regime::Negative => {
            if !(x >= 0.0 && x <= sol.upper) {
                return Err(Error::Domain { x, lo: 0.0, hi: sol.upper });
            }
            if x <= sol.stop_loss {
                Ok(reward.value(x))
            } else {
                sol.v_neg.value_at(x)
            }
        }
    }
}

/// `∂V/∂x (x, f)`, taking the left derivative at `B`.
pub(crate) fn seller_derivative_at(sol: &SellerSolution, reward: &dyn Reward, x: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Positive => {
            if !(x >= sol.lower) {
                return Err(Error::Domain { x, lo: sol.lower, hi: f64::INFINITY });
            }
            if x > sol.profit_take {
                Ok(reward.first(x))
            } else {
                sol.v_pos.derivative_at(x)
            }
        }
        Regime::Negative => {
            if !(x >= 0.0 && x <= sol.upper) {
                return Err(Error::Domain { x, lo: 0.0, hi: sol.upper });
            }
            if x < sol.stop_loss {
                Ok(reward.first(x))
            } else {
                sol.v_neg.derivative_at(x)
            }
        }
    }
}
