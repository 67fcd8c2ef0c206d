//! Boundaries as functions of the utility exponent `γ`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::buyer::solve_buyer;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, PowerUtility};
use crate::parallel;
use crate::seller::{solve_seller, Numerics, SellerCase};

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Ok,
    /// The solver returned an error.
    Failed(String),
    /// The solver returned boundaries in the wrong order.
    Invalid(String),
    /// Not attempted because a prerequisite failed.
    Skipped,
}

impl SolveStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, SolveStatus::Ok)
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveStatus::Ok => f.write_str("ok"),
            SolveStatus::Failed(msg) => write!(f, "failed: {msg}"),
            SolveStatus::Invalid(msg) => write!(f, "invalid: {msg}"),
            SolveStatus::Skipped => f.write_str("skipped"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub threshold: Option<f64>,
    pub profit_take: Option<f64>,
    pub stop_loss: Option<f64>,
    pub buy_low: Option<f64>,
    pub buy_high: Option<f64>,
    pub seller_case: Option<SellerCase>,
    pub seller_status: SolveStatus,
    pub buyer_status: SolveStatus,
}

impl SweepRow {
    fn empty(gamma: f64) -> Self {
        Self {
            gamma,
            threshold: None,
            profit_take: None,
            stop_loss: None,
            buy_low: None,
            buy_high: None,
            seller_case: None,
            seller_status: SolveStatus::Skipped,
            buyer_status: SolveStatus::Skipped,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.seller_status.is_ok() && self.buyer_status.is_ok()
    }

    /// Single status cell for the CSV output.
    pub fn status_label(&self) -> String {
        if self.is_ok() {
            "ok".to_string()
        } else {
            format!("seller {}; buyer {}", self.seller_status, self.buyer_status)
        }
    }
}

fn solve_row(template: &ModelSpec, gamma: f64, numerics: &Numerics) -> SweepRow {
    let mut row = SweepRow::empty(gamma);
    let utility = match PowerUtility::new(gamma) {
        Ok(u) => u,
        Err(e) => {
            row.seller_status = SolveStatus::Failed(e.to_string());
            return row;
        }
    };
    let seller = match solve_seller(template, &utility, numerics) {
        Ok(s) => s,
        Err(e) => {
            row.seller_status = SolveStatus::Failed(e.to_string());
            return row;
        }
    };
    row.threshold = Some(seller.threshold);
    row.profit_take = Some(seller.profit_take);
    row.stop_loss = Some(seller.stop_loss);
    row.seller_case = Some(seller.case);
    row.seller_status = if !(seller.threshold <= seller.profit_take) {
        SolveStatus::Invalid(format!("A = {} exceeds B = {}", seller.threshold, seller.profit_take))
    } else if !(seller.stop_loss < template.upper) {
        SolveStatus::Invalid(format!("m = {} is not below H", seller.stop_loss))
    } else {
        SolveStatus::Ok
    };

    match solve_buyer(template, &utility, &seller, numerics) {
        Ok(b) => {
            row.buy_low = Some(b.buy_low);
            row.buy_high = Some(b.buy_high);
            row.buyer_status = if !(b.buy_high <= seller.threshold) {
                SolveStatus::Invalid(format!("b = {} exceeds A = {}", b.buy_high, seller.threshold))
            } else if !(template.lower < b.buy_low && b.buy_low < b.buy_high) {
                SolveStatus::Invalid(format!("a = {} is outside (L, b)", b.buy_low))
            } else {
                SolveStatus::Ok
            };
        }
        Err(e) => row.buyer_status = SolveStatus::Failed(e.to_string()),
    }
    row
}

/// Solves both problems for each `γ`, keeping the input order. Failures are
/// recorded in the row statuses.
pub fn run_gamma_sweep(template: &ModelSpec, gammas: &[f64], numerics: &Numerics) -> Vec<SweepRow> {
    parallel::install(|| gammas.par_iter().map(|&g| solve_row(template, g, numerics)).collect())
}

/// `x` with six significant digits, keeping trailing zeros.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mut exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    if (x.abs() / 10f64.powi(exp) * 1e5).round() >= 1e6 {
        exp += 1;
    }
    if (-5..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn csv_field(value: Option<f64>) -> String {
    value.map(format_sig6).unwrap_or_default()
}

fn sanitize(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            ',' => ';',
            '\n' | '\r' | '"' => ' ',
            c => c,
        })
        .collect()
}

pub const CSV_HEADER: &str = "gamma,A,B,m,a,b,seller_case,status";

/// One header line and one line per row.
pub fn emit_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let case = row.seller_case.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig6(row.gamma),
            csv_field(row.threshold),
            csv_field(row.profit_take),
            csv_field(row.stop_loss),
            csv_field(row.buy_low),
            csv_field(row.buy_high),
            case,
            sanitize(&row.status_label())
        );
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

type Series = (&'static str, &'static str, fn(&SweepRow) -> Option<f64>);

const SERIES: [Series; 4] = [
    ("B", "#1f77b4", |r| r.profit_take),
    ("m", "#d62728", |r| r.stop_loss),
    ("a", "#2ca02c", |r| r.buy_low),
    ("b", "#ff7f0e", |r| r.buy_high),
];

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// SVG chart of `B`, `m`, `a`, `b` against `γ` with a dashed line at `reference_level`.
pub fn emit_plot(rows: &[SweepRow], reference_level: f64) -> Result<String> {
    let usable: Vec<&SweepRow> = rows.iter().filter(|r| r.profit_take.is_some()).collect();
    if usable.len() < 2 {
        return Err(Error::Plot(format!("need at least 2 rows with a solved seller problem, got {}", usable.len())));
    }
    let x_lo = usable.iter().map(|r| r.gamma).fold(f64::INFINITY, f64::min);
    let x_hi = usable.iter().map(|r| r.gamma).fold(f64::NEG_INFINITY, f64::max);
    let mut y_lo = reference_level;
    let mut y_hi = reference_level;
    for r in &usable {
        for (_, _, get) in SERIES {
            if let Some(v) = get(r) {
                y_lo = y_lo.min(v);
                y_hi = y_hi.max(v);
            }
        }
    }
    let pad = 0.05 * (y_hi - y_lo).max(1e-9);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);
    let x_span = (x_hi - x_lo).max(1e-12);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |g: f64| LEFT + (g - x_lo) / x_span * plot_w;
    let py = |v: f64| TOP + (y_hi - v) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP, TOP + plot_h);
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="M{x0:.2},{y0:.2} L{x0:.2},{y1:.2} L{x1:.2},{y1:.2}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let t = k as f64 / TICKS as f64;
        let g = x_lo + t * x_span;
        let x = px(g);
        let _ = writeln!(svg, r#"<path class="tick" d="M{x:.2},{y1:.2} L{x:.2},{:.2}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y1 + 20.0, tick_label(g));
        let v = y_lo + t * (y_hi - y_lo);
        let y = py(v);
        let _ = writeln!(svg, r#"<path class="tick" d="M{:.2},{y:.2} L{x0:.2},{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ =
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, tick_label(v));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">gamma</text>"#,
        LEFT + 0.5 * plot_w,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">price</text>"#,
        TOP + 0.5 * plot_h,
        TOP + 0.5 * plot_h
    );

    let yr = py(reference_level);
    let _ = writeln!(
        svg,
        r##"<line class="reference" x1="{x0:.2}" y1="{yr:.2}" x2="{x1:.2}" y2="{yr:.2}" stroke="#555555" stroke-dasharray="6 4"/>"##
    );

    for (name, color, get) in SERIES {
        let points: Vec<String> =
            usable.iter().filter_map(|r| get(r).map(|v| format!("{:.2},{:.2}", px(r.gamma), py(v)))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-name="{name}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
    }

    let lx = x1 + 20.0;
    let entries = SERIES.iter().map(|(n, c, _)| (*n, *c)).chain(std::iter::once(("L", "#555555")));
    for (k, (name, color)) in entries.enumerate() {
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(svg, r#"<rect x="{lx:.2}" y="{:.2}" width="18" height="4" fill="{color}"/>"#, ly - 2.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{name}</text>"#, lx + 24.0, ly + 4.0);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(3.839282), "3.83928");
        assert_eq!(format_sig6(1.775502), "1.77550");
        assert_eq!(format_sig6(0.7), "0.700000");
        assert_eq!(format_sig6(153.91234), "153.912");
        assert_eq!(format_sig6(9.999996), "10.0000");
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(1.5e-7), "1.50000e-7");
    }

    #[test]
    fn sanitizes_status() {
        assert_eq!(sanitize("a,b\nc"), "a;b c");
    }
}
