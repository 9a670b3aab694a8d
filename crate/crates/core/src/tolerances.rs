//! Thresholds used by the checks and the acceptance suites.
//!
//! They are sized for the reference resolution `n = 256`, `dt = 1e−4`.

pub const REFERENCE_N: usize = 256;
pub const REFERENCE_DT: f64 = 1e-4;

/// Empirical order of the convolution route for `Λ⁻²` as `n` doubles.
pub const CONVOLUTION_ORDER: f64 = 2.0;
/// `‖Λ²Λ⁻²f − f‖∞ / ‖f‖∞`.
pub const ROUND_TRIP_REL: f64 = 1e-12;

pub const ENERGY_DRIFT: f64 = 1e-8;
pub const MEAN_DRIFT: f64 = 1e-10;
pub const MOMENTUM_DRIFT: f64 = 1e-9;
/// Generic bound for any invariant implied by the parameters on smooth runs.
pub const CONSERVATION_DRIFT: f64 = 1e-7;
pub const L1_DRIFT: f64 = 1e-7;
/// `|∫|u| − |∫u||` on sign-preserved runs.
pub const L1_EQUIVALENCE: f64 = 1e-9;

/// Relative slack for one-signedness, scaled by `‖m₀‖∞`.
pub const SIGN_REL: f64 = 1e-6;

pub fn sign_tolerance(scale: f64) -> f64 {
    SIGN_REL * scale
}

pub const FLOW_RESIDUAL: f64 = 1e-5;
pub const JACOBIAN_GAP: f64 = 1e-6;

/// Absolute floor and relative part of the `dI/dt` tolerance.
pub const GROWTH_IDENTITY_ABS: f64 = 1e-6;
pub const GROWTH_IDENTITY_REL: f64 = 1e-3;
/// Chain-rule `dI/dt` against its closed form.
pub const DI_IDENTITY: f64 = 1e-6;

pub const NONLOCAL_IDENTITY: f64 = 1e-10;
pub const FORMULATION_GAP: f64 = 1e-7;

/// `min f ≥ −F_SIGN_EXACT·scale` where the sign is algebraic.
pub const F_SIGN_EXACT: f64 = 1e-12;
/// `min f ≥ −F_SIGN_RUN·scale` where it relies on a sign-preserved run.
pub const F_SIGN_RUN: f64 = 1e-6;

pub const PROBE_OFF_SUPPORT: f64 = 1e-8;
pub const PROBE_MASS: f64 = 1e-4;

pub const TIME_ORDER: f64 = 3.8;
pub const SPATIAL_CHANGE: f64 = 1e-9;
