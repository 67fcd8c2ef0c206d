use proptest::prelude::*;
use stopline::closedform::example_model;
use stopline::{
    emit_csv, emit_plot, format_sig6, run_gamma_sweep, Numerics, SellerCase, SolveStatus, SweepRow, CSV_HEADER,
};

fn row(gamma: f64) -> SweepRow {
    SweepRow {
        gamma,
        threshold: Some(2.8 + gamma),
        profit_take: Some(3.8 + gamma),
        stop_loss: Some(1.7 - 0.1 * gamma),
        buy_low: Some(1.1 + 0.01 * gamma),
        buy_high: Some(2.1 + gamma),
        seller_case: Some(SellerCase::MAboveL),
        seller_status: SolveStatus::Ok,
        buyer_status: SolveStatus::Ok,
    }
}

/// Checks that every tag is closed in order and returns the element names.
fn well_formed_elements(svg: &str) -> Vec<String> {
    let mut stack: Vec<String> = Vec::new();
    let mut names = Vec::new();
    let mut rest = svg;
    while let Some(start) = rest.find('<') {
        let end = rest[start..].find('>').expect("unterminated tag") + start;
        let tag = &rest[start + 1..end];
        rest = &rest[end + 1..];
        if let Some(name) = tag.strip_prefix('/') {
            assert_eq!(stack.pop().as_deref(), Some(name.trim()), "mismatched closing tag");
            continue;
        }
        let name: String = tag.chars().take_while(|c| !c.is_whitespace() && *c != '/').collect();
        assert_eq!(tag.matches('"').count() % 2, 0, "unbalanced quotes in <{name}>");
        names.push(name.clone());
        if !tag.ends_with('/') {
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed: {stack:?}");
    names
}

#[test]
fn csv_single_row() {
    let text = emit_csv(&[row(0.8)]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines[0], "gamma,A,B,m,a,b,seller_case,status");
    assert_eq!(lines[1], "0.800000,3.60000,4.60000,1.62000,1.10800,2.90000,MAboveL,ok");
}

#[test]
fn csv_failed_buyer_leaves_blanks() {
    let mut r = row(0.9);
    r.buy_low = None;
    r.buy_high = None;
    r.buyer_status = SolveStatus::Failed("no bracket, see samples".into());
    let text = emit_csv(&[r]);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields.len(), 8);
    assert_eq!(fields[4], "");
    assert_eq!(fields[5], "");
    assert_ne!(fields[7], "ok");
    assert!(fields[7].contains("failed"));
}

#[test]
fn csv_round_trips_to_printed_precision() {
    let rows: Vec<SweepRow> = [0.5, 0.7, 1.3].iter().map(|&g| row(g)).collect();
    let text = emit_csv(&rows);
    for (line, r) in text.lines().skip(1).zip(&rows) {
        let f: Vec<f64> = line.split(',').take(6).map(|s| s.parse().unwrap()).collect();
        let want = [
            r.gamma,
            r.threshold.unwrap(),
            r.profit_take.unwrap(),
            r.stop_loss.unwrap(),
            r.buy_low.unwrap(),
            r.buy_high.unwrap(),
        ];
        for (got, want) in f.iter().zip(want) {
            assert!(((got - want) / want).abs() <= 5e-6);
        }
    }
}

#[test]
fn closed_form_single_gamma_row() {
    let rows = run_gamma_sweep(&example_model(), &[0.8], &Numerics::default());
    assert!(rows[0].is_ok(), "{rows:?}");
    let text = emit_csv(&rows);
    assert!(text.contains("3.83928"), "{text}");
    assert!(text.contains("1.77550"), "{text}");
}

#[test]
fn failures_do_not_abort_sweep() {
    // γ = 1 has no threshold, 0.6 pulls B under H
    let rows = run_gamma_sweep(&example_model(), &[0.6, 0.8, 1.0], &Numerics::default());
    assert_eq!(rows.len(), 3);
    assert!(!rows[0].is_ok());
    assert!(rows[1].is_ok());
    assert!(matches!(rows[2].seller_status, SolveStatus::Failed(_)));
    assert_eq!(rows[2].buyer_status, SolveStatus::Skipped);
    let text = emit_csv(&rows);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.split(',').count() == 8));
}

#[test]
fn plot_has_four_series_and_reference() {
    let svg = emit_plot(&[row(0.7), row(0.8)], 1.0).unwrap();
    let names = well_formed_elements(&svg);
    assert_eq!(names[0], "svg");
    assert_eq!(names.iter().filter(|n| *n == "polyline").count(), 4);
    assert_eq!(names.iter().filter(|n| *n == "line").count(), 1);
    assert!(svg.contains("<text") && svg.contains(">B<") && svg.contains(">m<"));
}

#[test]
fn plot_is_deterministic() {
    let rows = [row(0.7), row(0.8), row(0.9)];
    assert_eq!(emit_plot(&rows, 1.0).unwrap(), emit_plot(&rows, 1.0).unwrap());
}

#[test]
fn plot_needs_two_rows() {
    assert!(emit_plot(&[row(0.7)], 1.0).is_err());
    let mut failed = row(0.8);
    failed.profit_take = None;
    assert!(emit_plot(&[row(0.7), failed], 1.0).is_err());
}

fn polyline_points(svg: &str, name: &str) -> Vec<(f64, f64)> {
    let key = format!("data-name=\"{name}\" points=\"");
    let start = svg.find(&key).unwrap() + key.len();
    let end = svg[start..].find('"').unwrap() + start;
    svg[start..end]
        .split(' ')
        .map(|p| {
            let (x, y) = p.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn rendered_profit_take_follows_data() {
    let rows: Vec<SweepRow> = [0.7, 0.75, 0.8, 0.85].iter().map(|&g| row(g)).collect();
    let svg = emit_plot(&rows, 1.0).unwrap();
    let pts = polyline_points(&svg, "B");
    assert_eq!(pts.len(), 4);
    // larger values sit higher, so lower on the SVG y axis
    assert!(pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
}

proptest! {
    #[test]
    fn sig6_keeps_six_digits(x in 1e-4f64..1e5) {
        let s = format_sig6(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-6);
        let digits = s.chars().take_while(|c| *c != 'e').filter(|c| c.is_ascii_digit()).collect::<String>();
        prop_assert_eq!(digits.trim_start_matches('0').len(), 6, "{}", s);
    }
}
