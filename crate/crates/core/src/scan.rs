//! Bracket-then-bisect root search shared by the boundary solvers.

use crate::error::{Error, Result};

pub(crate) struct Root {
    pub x: f64,
}

/// Finds the first sign change of `fine` along `candidates` (in scan order)
/// and bisects it down to `x_tol`.
///
/// The scan itself runs on `coarse`, a cheaper approximation of `fine`. The
/// coarse bracket is then confirmed on `fine`, widening by one candidate at a
/// time if the two disagree. A candidate whose fine residual is within
/// `accept` of zero is returned directly.
pub(crate) fn first_root(
    what: &'static str,
    candidates: &[f64],
    accept: f64,
    x_tol: f64,
    mut coarse: impl FnMut(f64) -> Result<f64>,
    mut fine: impl FnMut(f64) -> Result<f64>,
) -> Result<Root> {
    assert!(!candidates.is_empty());
    let first = candidates[0];
    let r_first = fine(first)?;
    if r_first.abs() <= accept {
        return Ok(Root { x: first });
    }

    let mut samples = Vec::with_capacity(candidates.len());
    let mut prev = coarse(first)?;
    samples.push((first, prev));
    let mut hit = None;
    for (k, &x) in candidates.iter().enumerate().skip(1) {
        let r = coarse(x)?;
        samples.push((x, r));
        if r == 0.0 || (r > 0.0) != (prev > 0.0) {
            hit = Some(k);
            break;
        }
        prev = r;
    }
    let Some(k) = hit else {
        let lo = candidates[0].min(candidates[candidates.len() - 1]);
        let hi = candidates[0].max(candidates[candidates.len() - 1]);
        return Err(Error::NoBracket { what, lo, hi, samples });
    };

    // confirm on the fine residual
    let mut i = k - 1;
    let mut j = k;
    let mut r_i = if i == 0 { r_first } else { fine(candidates[i])? };
    let mut r_j = fine(candidates[j])?;
    while (r_i > 0.0) == (r_j > 0.0) && r_i != 0.0 && r_j != 0.0 {
        let moved_left = i > 0;
        let moved_right = j + 1 < candidates.len();
        if !moved_left && !moved_right {
            let lo = candidates[0].min(candidates[candidates.len() - 1]);
            let hi = candidates[0].max(candidates[candidates.len() - 1]);
            return Err(Error::NoBracket { what, lo, hi, samples });
        }
        if moved_left {
            i -= 1;
            r_i = fine(candidates[i])?;
        }
        if moved_right && (r_i > 0.0) == (r_j > 0.0) {
            j += 1;
            r_j = fine(candidates[j])?;
        }
    }
    if r_i.abs() <= accept {
        return Ok(Root { x: candidates[i] });
    }

    let (mut a, mut b) = (candidates[i], candidates[j]);
    let mut r_a = r_i;
    let mut r_b = r_j;
    if r_b == 0.0 {
        return Ok(Root { x: b });
    }
    for _ in 0..200 {
        if (b - a).abs() <= x_tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let r = fine(mid)?;
        if r == 0.0 {
            return Ok(Root { x: mid });
        }
        if (r > 0.0) == (r_a > 0.0) {
            a = mid;
            r_a = r;
        } else {
            b = mid;
            r_b = r;
        }
    }
    // keep the endpoint with the smaller residual when bisection stalls
    let x = if (b - a).abs() <= x_tol {
        0.5 * (a + b)
    } else if r_a.abs() < r_b.abs() {
        a
    } else {
        b
    };
    Ok(Root { x })
}

/// `count + 1` evenly spaced points from `from` to `to` inclusive.
pub(crate) fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|k| if k == count { to } else { from + (to - from) * k as f64 / count as f64 }).collect()
}
