use proptest::prelude::*;
use stopline::closedform::{affine_phi, coeffs, example_model, ORACLE_B, ORACLE_M};
use stopline::{fundamental_phi_plus, fundamental_phi_plus_auto, presets, solve_linear_bvp, GridFunction};

fn seller_pos(x: f64) -> f64 {
    coeffs::SELLER_POS_C1 * (x - 1.0) * (2.0 / x).exp() + coeffs::SELLER_POS_C2 * (x + 1.0)
}

fn seller_neg(x: f64) -> f64 {
    coeffs::SELLER_NEG_C3 * x.powi(-3) + coeffs::SELLER_NEG_C4 * x * x
}

fn max_error(g: &GridFunction, exact: impl Fn(f64) -> f64) -> f64 {
    (0..=g.cells()).map(|i| (g.values()[i] - exact(g.node(i))).abs()).fold(0.0, f64::max)
}

#[test]
fn negative_regime_matches_closed_form() {
    let m = example_model();
    let (lo, hi) = (ORACLE_M, 2.0);
    let g = solve_linear_bvp(&m.negative, m.rate, lo, hi, seller_neg(lo), seller_neg(hi), 4096).unwrap();
    assert!(max_error(&g, seller_neg) <= 1e-4);
}

#[test]
fn positive_regime_matches_closed_form() {
    let m = example_model();
    let (lo, hi) = (1.0, ORACLE_B);
    let g = solve_linear_bvp(&m.positive, m.rate, lo, hi, seller_pos(lo), seller_pos(hi), 4096).unwrap();
    assert!(max_error(&g, seller_pos) <= 1e-4);
}

#[test]
fn second_order_convergence() {
    let m = example_model();
    type Case<'a> = (f64, f64, &'a stopline::RegimeDynamics, fn(f64) -> f64);
    let cases: [Case; 2] = [(1.0, ORACLE_B, &m.positive, seller_pos), (ORACLE_M, 2.0, &m.negative, seller_neg)];
    for (lo, hi, dynamics, exact) in cases {
        let errors: Vec<f64> = [32usize, 64, 128, 256]
            .iter()
            .map(|&n| {
                let g = solve_linear_bvp(dynamics, m.rate, lo, hi, exact(lo), exact(hi), n).unwrap();
                max_error(&g, exact)
            })
            .collect();
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.0..=5.0).contains(&ratio), "ratio {ratio} from {errors:?}");
        }
    }
}

#[test]
fn derivative_matches_utility_slope_at_profit_take() {
    let m = example_model();
    let g = solve_linear_bvp(&m.positive, m.rate, 1.0, ORACLE_B, 1.0, ORACLE_B.powf(0.8), 4096).unwrap();
    let slope = g.derivative_at(ORACLE_B).unwrap();
    assert!((slope - 0.8 * ORACLE_B.powf(-0.2)).abs() <= 1e-3);
}

#[test]
fn phi_matches_closed_form() {
    let m = example_model();
    let phi = fundamental_phi_plus_auto(&m, 250.0 * (20.0 / 7.0), 4096.0, 1 << 22).unwrap();
    assert_eq!(phi.value(2.0).unwrap(), 1.0);
    let norm = affine_phi(2.0);
    for k in 0..=400 {
        let x = 1.0 + 4.0 * k as f64 / 400.0;
        let want = affine_phi(x) / norm;
        let got = phi.value(x).unwrap();
        assert!(((got - want) / want).abs() <= 1e-3, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn phi_is_stable_under_truncation_doubling() {
    let m = example_model();
    let a = 20.0 / 7.0;
    let x_max = 250.0 * a;
    let one = fundamental_phi_plus(&m, x_max, (4096.0 * (x_max - 1.0)) as usize).unwrap();
    let two = fundamental_phi_plus(&m, 2.0 * x_max, (4096.0 * (2.0 * x_max - 1.0)) as usize).unwrap();
    for k in 0..=200 {
        let x = 1.0 + (2.0 * a - 1.0) * k as f64 / 200.0;
        let (p, q) = (one.value(x).unwrap(), two.value(x).unwrap());
        assert!(((p - q) / q).abs() <= 1e-6, "x = {x}: {p} vs {q}");
    }
}

#[test]
fn phi_is_decreasing_and_positive_for_presets() {
    for name in presets::NAMES {
        let m = presets::by_name(name).unwrap();
        let phi = fundamental_phi_plus_auto(&m, 500.0, 1024.0, 1 << 20).unwrap();
        let v = phi.phi_plus.values();
        assert!(v.windows(2).all(|w| w[1] <= w[0]), "{name}");
        assert!(v[..v.len() - 1].iter().all(|&p| p >= 0.0), "{name}");
        assert!((phi.value(m.upper).unwrap() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn truncation_below_upper_is_rejected() {
    let m = example_model();
    assert!(fundamental_phi_plus(&m, 1.5, 1024).is_err());
}

proptest! {
    #[test]
    fn maximum_principle(
        name in prop::sample::select(presets::NAMES.to_vec()),
        v_lo in 0.0f64..3.0,
        v_hi in 0.0f64..3.0,
        lo in 1.0f64..1.5,
        width in 0.2f64..5.0,
        cells in 16usize..600,
    ) {
        let m = presets::by_name(name).unwrap();
        let g = solve_linear_bvp(&m.positive, m.rate, lo, lo + width, v_lo, v_hi, cells).unwrap();
        prop_assert!(g.values().iter().all(|&v| v >= -1e-14));
        let h = solve_linear_bvp(&m.negative, m.rate, 0.0, m.upper, v_lo, v_hi, cells).unwrap();
        prop_assert!(h.values().iter().all(|&v| v >= -1e-14));
    }

    #[test]
    fn resample_of_power_is_accurate(x in 1.0f64..2.0) {
        let g = GridFunction::from_fn(1.0, 2.0, 4096, |t| t.powf(0.8)).unwrap();
        prop_assert!((stopline::resample(&g, x).unwrap() - x.powf(0.8)).abs() <= 1e-6);
    }
}
