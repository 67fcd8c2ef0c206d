//! Plain-text run summary.

use std::fmt::Write as _;

use stopline::{verify_assumptions, BuyerSolution, SellerSolution};

use crate::config::RunSpec;

fn num(x: f64) -> String {
    format!("{x:.9}")
}

fn residual(x: f64) -> String {
    format!("{x:.3e}")
}

/// Summary of a solved run: boundaries, residuals, case flags, the sign
/// checks and every effective parameter.
pub fn write_report(spec: &RunSpec, seller: &SellerSolution, buyer: Option<&BuyerSolution>) -> String {
    let mut out = String::new();
    out.push_str("stopline report\n\n[assumptions]\n");
    let check = verify_assumptions(&spec.model, &spec.utility);
    let flag = |ok: bool| if ok { "ok" } else { "violated" };
    match check.threshold {
        Some(a) => writeln!(out, "threshold A: {}", num(a)).unwrap(),
        None => out.push_str("threshold A: none\n"),
    }
    writeln!(out, "negative regime sign: {}", flag(check.negative_sign_ok)).unwrap();
    writeln!(out, "positive regime sign pattern: {}", flag(check.positive_pattern_ok)).unwrap();
    if let Some(failure) = &check.failure {
        writeln!(out, "failure: {failure}").unwrap();
    }

    out.push_str("\n[seller]\n");
    writeln!(out, "case: {}", seller.case).unwrap();
    writeln!(out, "profit-take B: {}", num(seller.profit_take)).unwrap();
    writeln!(out, "stop-loss m: {}", num(seller.stop_loss)).unwrap();
    writeln!(out, "threshold A: {}", num(seller.threshold)).unwrap();
    writeln!(out, "pasting residual at B: {}", residual(seller.pasting_residual_b)).unwrap();
    writeln!(out, "pasting residual at m: {}", residual(seller.pasting_residual_m)).unwrap();
    writeln!(out, "continuity residual at H: {}", residual(seller.continuity_residual_h)).unwrap();
    writeln!(out, "continuity residual at L: {}", residual(seller.continuity_residual_l)).unwrap();

    out.push_str("\n[buyer]\n");
    match buyer {
        Some(b) => {
            writeln!(out, "buy low a: {}", num(b.buy_low)).unwrap();
            writeln!(out, "buy high b: {}", num(b.buy_high)).unwrap();
            writeln!(out, "tail coefficient: {}", num(b.tail_coeff)).unwrap();
            writeln!(out, "pasting residual at a: {}", residual(b.residuals.pasting_a)).unwrap();
            writeln!(out, "pasting residual at b: {}", residual(b.residuals.pasting_b)).unwrap();
            writeln!(out, "continuity residual at L: {}", residual(b.residuals.continuity_l)).unwrap();
            writeln!(out, "continuity residual at H: {}", residual(b.residuals.continuity_h)).unwrap();
        }
        None => out.push_str("not computed\n"),
    }

    out.push_str("\n[parameters]\n");
    for (key, value) in spec.effective() {
        writeln!(out, "{key} = {value}").unwrap();
    }
    out
}
