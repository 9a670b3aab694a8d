//! Closed-form periodic Green's function of `1 − ∂x²` on the unit circle.
//!
//! `g(x) = cosh(x − ⌊x⌋ − 1/2) / (2 sinh(1/2))`, so that `Λ⁻²f = g ∗ f`.
//! The argument is reduced to `[0,1)` before the hyperbolic call, which keeps
//! the evaluation bounded for any real `x`.

fn centered(x: f64) -> f64 {
    x - x.floor() - 0.5
}

fn normalization() -> f64 {
    2.0 * 0.5f64.sinh()
}

/// Kernel value `g(x)`.
pub fn green(x: f64) -> f64 {
    centered(x).cosh() / normalization()
}

/// One-sided derivative `g'(x)`, defined everywhere except the integers,
/// where the right-hand limit is returned.
pub fn green_derivative(x: f64) -> f64 {
    centered(x).sinh() / normalization()
}

/// `g(0)`, the kernel maximum.
pub fn green_peak() -> f64 {
    green(0.0)
}

/// `g(1/2)`, the kernel minimum.
pub fn green_floor() -> f64 {
    green(0.5)
}
