//! Finite-difference solutions of `𝓛_f v − r v = 0` on uniform grids.
//!
//! Every value curve in the crate is a [`GridFunction`]. Boundary value
//! problems use second-order central differences and a single tridiagonal
//! solve, so each call is exact up to `O(step²)`.

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Regime, RegimeDynamics};
use crate::tridiag;

/// Fewest cells a grid may have.
pub const MIN_CELLS: usize = 16;

/// Samples of a function on the uniform grid `lo + i·(hi − lo)/n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need finite lo < hi, got [{lo}, {hi}]"),
            });
        }
        if values.len() < MIN_CELLS + 1 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need at least {MIN_CELLS} cells, got {}", values.len().saturating_sub(1)),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite grid value at node {i}")));
        }
        Ok(Self { lo, hi, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(lo: f64, hi: f64, cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (hi - lo) / cells as f64;
        let values = (0..=cells).map(|i| f(if i == cells { hi } else { lo + i as f64 * h })).collect();
        Self::new(lo, hi, values)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.cells() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.cells() {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.cells()]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `(node index, fraction)` with `index < cells` and `fraction ∈ [0, 1]`.
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !self.contains(x) {
            return Err(Error::Domain { x, lo: self.lo, hi: self.hi });
        }
        let t = (x - self.lo) / self.step();
        let i = (t.floor() as usize).min(self.cells() - 1);
        Ok((i, (t - i as f64).clamp(0.0, 1.0)))
    }

    fn node_derivative(&self, i: usize) -> f64 {
        let v = &self.values;
        let n = self.cells();
        let h = self.step();
        if i == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        } else if i == n {
            (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h)
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        }
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        let (i, t) = self.locate(x)?;
        Ok(self.values[i] + t * (self.values[i + 1] - self.values[i]))
    }

    pub fn derivative_at(&self, x: f64) -> Result<f64> {
        let (i, t) = self.locate(x)?;
        let d0 = self.node_derivative(i);
        if t == 0.0 {
            return Ok(d0);
        }
        let d1 = self.node_derivative(i + 1);
        Ok(d0 + t * (d1 - d0))
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// First derivative: central differences inside, second-order one-sided at the
/// ends, linear interpolation of the node stencils off the grid.
pub fn derivative_at(g: &GridFunction, x: f64) -> Result<f64> {
    g.derivative_at(x)
}

/// Linear interpolation between neighbouring nodes.
pub fn resample(g: &GridFunction, x: f64) -> Result<f64> {
    g.value_at(x)
}

/// Cell count for `[lo, hi]` at a given linear density, clamped to `[MIN_CELLS, max_cells]`.
pub fn cells_for(lo: f64, hi: f64, cells_per_unit: f64, max_cells: usize) -> usize {
    let wanted = ((hi - lo) * cells_per_unit).ceil();
    if !wanted.is_finite() {
        return max_cells.max(MIN_CELLS);
    }
    (wanted as usize).clamp(MIN_CELLS, max_cells.max(MIN_CELLS))
}

/// Solves `μ v′ + ½σ² v″ − r v = 0` on `[lo, hi]` with `v(lo) = v_lo`, `v(hi) = v_hi`.
pub fn solve_linear_bvp(
    dynamics: &RegimeDynamics,
    rate: f64,
    lo: f64,
    hi: f64,
    v_lo: f64,
    v_hi: f64,
    cells: usize,
) -> Result<GridFunction> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter { name: "interval", reason: format!("need lo < hi, got [{lo}, {hi}]") });
    }
    if cells < MIN_CELLS {
        return Err(Error::InvalidParameter {
            name: "cells",
            reason: format!("need at least {MIN_CELLS}, got {cells}"),
        });
    }
    if !(v_lo.is_finite() && v_hi.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "boundary value",
            reason: format!("non-finite boundary data ({v_lo}, {v_hi})"),
        });
    }

    let h = (hi - lo) / cells as f64;
    let m = cells - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for k in 0..m {
        let x = lo + (k + 1) as f64 * h;
        let mu = dynamics.drift_raw(x);
        let var = dynamics.variance_raw(x);
        if !(var > 0.0 && var.is_finite()) {
            return Err(Error::Ellipticity { x, sigma: var.max(0.0).sqrt() });
        }
        if !mu.is_finite() {
            return Err(Error::Numerical(format!("non-finite drift at x = {x}")));
        }
        let diffusion = 0.5 * var / (h * h);
        let advection = 0.5 * mu / h;
        lower[k] = diffusion - advection;
        diag[k] = -2.0 * diffusion - rate;
        upper[k] = diffusion + advection;
    }
    rhs[0] -= lower[0] * v_lo;
    rhs[m - 1] -= upper[m - 1] * v_hi;

    let interior = tridiag::solve(&lower, &diag, &upper, &rhs)?;
    let mut values = Vec::with_capacity(cells + 1);
    values.push(v_lo);
    values.extend(interior);
    values.push(v_hi);
    GridFunction::new(lo, hi, values)
}

/// The decreasing positive solution `φ₊` of `𝓛⁺φ − rφ = 0`, normalised so `φ₊(H) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    pub phi_plus: GridFunction,
}

impl FundamentalSolution {
    pub fn x_max(&self) -> f64 {
        self.phi_plus.hi()
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.phi_plus.value_at(x)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.phi_plus.derivative_at(x)
    }
}

/// `φ₊` on `[L, x_max]` from the Dirichlet problem `φ(L) = 1`, `φ(x_max) = 0`,
/// rescaled so that `φ(H) = 1`.
pub fn fundamental_phi_plus(model: &ModelSpec, x_max: f64, cells: usize) -> Result<FundamentalSolution> {
    if !(x_max > model.upper) {
        return Err(Error::InvalidParameter {
            name: "x_max",
            reason: format!("must exceed H = {}, got {x_max}", model.upper),
        });
    }
    let mut phi = solve_linear_bvp(model.dynamics(Regime::Positive), model.rate, model.lower, x_max, 1.0, 0.0, cells)?;
    let at_h = phi.value_at(model.upper)?;
    if !(at_h > 0.0) {
        return Err(Error::TruncationTooSmall { x_max, reason: format!("phi(H) = {at_h} is not positive") });
    }
    phi.scale(1.0 / at_h);

    let values = phi.values();
    let n = phi.cells();
    for i in 0..n {
        // values that have underflowed to zero are accepted as a flat tail
        let strictly = values[i + 1] < values[i] || (values[i] == 0.0 && values[i + 1] == 0.0);
        if !strictly || values[i] < 0.0 {
            return Err(Error::TruncationTooSmall {
                x_max,
                reason: format!("phi is not strictly decreasing and positive near x = {}", phi.node(i)),
            });
        }
    }
    Ok(FundamentalSolution { phi_plus: phi })
}

/// [`fundamental_phi_plus`] with doubling retries on truncation failure.
pub fn fundamental_phi_plus_auto(
    model: &ModelSpec,
    x_max: f64,
    cells_per_unit: f64,
    max_cells: usize,
) -> Result<FundamentalSolution> {
    let mut x_max = x_max;
    let mut last_err = None;
    for _ in 0..6 {
        let cells = cells_for(model.lower, x_max, cells_per_unit, max_cells);
        match fundamental_phi_plus(model, x_max, cells) {
            Ok(sol) => return Ok(sol),
            Err(err @ Error::TruncationTooSmall { .. }) => {
                last_err = Some(err);
                x_max *= 2.0;
            }
            Err(err) => return Err(err),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_function_invariants() {
        assert!(GridFunction::new(0.0, 1.0, vec![0.0; 17]).is_ok());
        assert!(GridFunction::new(0.0, 1.0, vec![0.0; 10]).is_err());
        assert!(GridFunction::new(1.0, 1.0, vec![0.0; 17]).is_err());
        let mut v = vec![0.0; 17];
        v[3] = f64::NAN;
        assert!(GridFunction::new(0.0, 1.0, v).is_err());
    }

    #[test]
    fn derivative_of_square() {
        let g = GridFunction::from_fn(0.0, 1.0, 64, |x| x * x).unwrap();
        assert!((derivative_at(&g, 0.5).unwrap() - 1.0).abs() < 1e-12);
        // one-sided stencils are exact for quadratics
        assert!((derivative_at(&g, 0.0).unwrap()).abs() < 1e-12);
        assert!((derivative_at(&g, 1.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(derivative_at(&g, 1.5).is_err());
    }

    #[test]
    fn derivative_of_power() {
        let g = GridFunction::from_fn(0.5, 1.5, 4096, |x| x.powf(0.8)).unwrap();
        assert!((derivative_at(&g, 1.0).unwrap() - 0.8).abs() < 1e-4);
        assert!((derivative_at(&g, 1.0001).unwrap() - 0.8 * 1.0001f64.powf(-0.2)).abs() < 1e-4);
    }

    #[test]
    fn resample_is_linear() {
        let g = GridFunction::from_fn(0.0, 2.0, 16, |x| 3.0 * x - 1.0).unwrap();
        assert_eq!(resample(&g, g.node(5)).unwrap(), g.values()[5]);
        let mid = 0.5 * (g.node(2) + g.node(3));
        assert!((resample(&g, mid).unwrap() - (3.0 * mid - 1.0)).abs() < 1e-14);
        assert!(resample(&g, -0.1).is_err());
    }

    #[test]
    fn resample_power_error_small() {
        let g = GridFunction::from_fn(1.0, 2.0, 4096, |x| x.powf(0.8)).unwrap();
        for k in 0..1000 {
            let x = 1.0 + (k as f64 * 0.618_033_988_75).fract();
            assert!((resample(&g, x).unwrap() - x.powf(0.8)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let d = RegimeDynamics::Gbm { mu: 0.03, sigma2: 0.04 };
        let g = solve_linear_bvp(&d, 0.1, 0.5, 2.0, 0.0, 0.0, 100).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bvp_rejects_bad_input() {
        let d = RegimeDynamics::Gbm { mu: 0.03, sigma2: 0.04 };
        assert!(solve_linear_bvp(&d, 0.1, 2.0, 1.0, 0.0, 0.0, 100).is_err());
        assert!(solve_linear_bvp(&d, 0.1, 1.0, 2.0, 0.0, 0.0, 8).is_err());
        assert!(solve_linear_bvp(&d, 0.1, -1.0, 2.0, 0.0, 1.0, 96).is_err());
    }
}
