//! Parameter sets used throughout the tests and shipped configurations.
//!
//! Integrability of the scale and speed densities holds analytically for
//! each of these; it is not checked numerically.

use crate::model::{ModelSpec, RegimeDynamics};

const NEGATIVE: RegimeDynamics = RegimeDynamics::Gbm { mu: 1.0 / 30.0, sigma2: 1.0 / 30.0 };

/// The closed-form affine example: `μ₊(x) = 0.1(x + 1)`, `σ₊²(x) = 0.1x²`, `r = 0.1`.
pub fn affine_closed_form() -> ModelSpec {
    crate::closedform::example_model()
}

/// Affine positive drift `0.15x + 0.16`, `σ₊²(x) = 0.1x²`, `r = 0.15`.
pub fn table1() -> ModelSpec {
    ModelSpec::new(RegimeDynamics::Affine { mu: 0.15, c: 0.16, sigma2: 0.1 }, NEGATIVE, 1.0, 2.0, 0.15)
        .expect("valid preset")
}

/// Vasicek positive regime `dS = (0.7 − 0.1S)dt + √0.1 dW`, `r = 0.1`.
pub fn table2_vasicek() -> ModelSpec {
    ModelSpec::new(RegimeDynamics::Vasicek { c: 0.7, mu: 0.1, sigma2: 0.1 }, NEGATIVE, 1.0, 2.0, 0.1)
        .expect("valid preset")
}

/// CIR positive regime `dS = (0.7 − 0.1S)dt + √(0.1S) dW`, `r = 0.1`.
pub fn table2_cir() -> ModelSpec {
    ModelSpec::new(RegimeDynamics::Cir { c: 0.7, mu: 0.1, sigma2: 0.1 }, NEGATIVE, 1.0, 2.0, 0.1).expect("valid preset")
}

/// Looks a preset up by name.
pub fn by_name(name: &str) -> Option<ModelSpec> {
    match name {
        "affine_closed_form" => Some(affine_closed_form()),
        "table1" => Some(table1()),
        "table2_vasicek" => Some(table2_vasicek()),
        "table2_cir" => Some(table2_cir()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["affine_closed_form", "table1", "table2_vasicek", "table2_cir"];
