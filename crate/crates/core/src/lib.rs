//! Optimal trading boundaries for a two-regime stock price model built around
//! a support/resistance line.
//!
//! The price `S` follows one of two diffusions depending on a flag `F`. The
//! flag turns negative when the price falls to the lower level `L` and turns
//! positive when it climbs to the upper level `H`. The crate solves the
//! seller's optimal stopping problem (sell boundaries `B` and `m`), the
//! buyer's problem on top of it (buy interval `[a, b]`), and checks both
//! against an Euler–Maruyama simulation of the same process.
//!
//! * [`model`]: dynamics, utilities, the threshold `A` and sign checks
//! * [`odesolve`]: finite-difference boundary value problems and `φ₊`
//! * [`seller`] / [`buyer`]: the two linked free boundary problems
//! * [`closedform`]: the analytic affine example used as an oracle
//! * [`simulate`]: Monte Carlo valuation of stopping rules
//! * [`sweep`]: utility-exponent sweeps with CSV and SVG output

pub mod buyer;
pub mod closedform;
mod error;
pub mod model;
pub mod odesolve;
mod parallel;
pub mod presets;
mod scan;
pub mod seller;
pub mod simulate;
pub mod sweep;
pub mod tridiag;

pub use buyer::{buyer_value_at, find_b, gains_g, solve_buyer, BuyerResiduals, BuyerSolution};
pub use error::{AssumptionFailure, Error, Result};
pub use model::{
    apply_generator, find_a, find_a_with_step, verify_assumptions, AssumptionReport, ModelSpec, PowerUtility, Regime,
    RegimeDynamics, Reward, TabulatedDynamics,
};
pub use odesolve::{
    derivative_at, fundamental_phi_plus, fundamental_phi_plus_auto, resample, solve_linear_bvp, FundamentalSolution,
    GridFunction,
};
pub use parallel::THREADS_ENV;
pub use seller::{
    seller_value_at, solve_negative_stage, solve_positive_stage, solve_seller, Numerics, SellerCase, SellerSolution,
};
pub use simulate::{
    mc_value, perturbation_test, simulate_until_stop, step_euler, step_halving, trace_path, Interval, McEstimate,
    McParams, PathState, Payoff, PerturbationEntry, PerturbationReport, StepHalvingReport, StopOutcome, StoppingRule,
};
pub use sweep::{emit_csv, emit_plot, format_sig6, run_gamma_sweep, SolveStatus, SweepRow, CSV_HEADER};
