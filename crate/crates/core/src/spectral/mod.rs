//! Fourier collocation on the unit circle.
//!
//! Differentiation and the Helmholtz operator `Λ² = 1 − ∂x²` act diagonally
//! on Fourier modes: mode `k` picks up `(2πik)^order` or `1 + 4π²k²`. The
//! inverse `Λ⁻²` is available both spectrally and as a direct trapezoidal
//! convolution with the closed-form kernel in [`kernel`]; the two are kept
//! independent so one can audit the other.
//!
//! Conventions: forward transforms are unnormalized, inverse transforms are
//! scaled by `1/n`. Odd-order symbols vanish on the Nyquist mode so that real
//! fields map to real fields.

mod field;
pub mod kernel;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

pub use field::{Field, Grid};
pub use kernel::{green, green_derivative};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid needs an even number of nodes >= 8, got {0}")]
    InvalidGrid(usize),
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("derivative order {0} not supported (1..=4)")]
    InvalidOrder(u32),
}

/// How pointwise products of grid functions are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dealias {
    /// Multiply samples directly on the grid.
    #[default]
    Off,
    /// Zero-pad to `(q+1)·n/2` points for a `q`-fold product, multiply there,
    /// and truncate back. For `q = 2` this is the classical 2/3 rule.
    Padded,
}

type Plan = Arc<dyn Fft<f64>>;

/// Spectral operators bound to one grid.
pub struct Spectral {
    grid: Grid,
    forward: Plan,
    inverse: Plan,
    dealias: Dealias,
    padded_plans: Mutex<HashMap<usize, (Plan, Plan)>>,
    lag_kernel: OnceLock<Vec<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("grid", &self.grid)
            .field("dealias", &self.dealias)
            .finish()
    }
}

impl Clone for Spectral {
    fn clone(&self) -> Self {
        Self::with_dealias(self.grid, self.dealias)
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        Self::with_dealias(grid, Dealias::Off)
    }

    pub fn with_dealias(grid: Grid, dealias: Dealias) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
            dealias,
            padded_plans: Mutex::new(HashMap::new()),
            lag_kernel: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    /// Unnormalized forward DFT of the samples.
    pub fn spectrum(&self, f: &Field) -> Vec<Complex64> {
        assert_eq!(f.grid(), self.grid, "field lives on a different grid");
        let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse of [`Spectral::spectrum`]; the imaginary part is discarded.
    pub fn from_spectrum(
        &self,
        mut spec: Vec<Complex64>,
        op: &'static str,
    ) -> Result<Field, SpectralError> {
        self.inverse.process(&mut spec);
        let scale = 1.0 / self.grid.len() as f64;
        let values: Vec<f64> = spec.iter().map(|c| c.re * scale).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite(op));
        }
        Ok(Field::from_values_unchecked(self.grid, values))
    }

    fn apply_symbol(
        &self,
        f: &Field,
        op: &'static str,
        symbol: impl Fn(i64) -> Complex64,
    ) -> Result<Field, SpectralError> {
        let mut spec = self.spectrum(f);
        for (j, c) in spec.iter_mut().enumerate() {
            *c *= symbol(self.grid.wavenumber(j));
        }
        self.from_spectrum(spec, op)
    }

    fn is_nyquist(&self, k: i64) -> bool {
        k == self.grid.nyquist() as i64
    }

    /// `∂x^order f` for `order ∈ 1..=4`.
    pub fn derivative(&self, f: &Field, order: u32) -> Result<Field, SpectralError> {
        if !(1..=4).contains(&order) {
            return Err(SpectralError::InvalidOrder(order));
        }
        self.apply_symbol(f, "derivative", |k| {
            if order % 2 == 1 && self.is_nyquist(k) {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(0.0, 2.0 * PI * k as f64).powu(order)
        })
    }

    /// `Λ²f = f − f_xx`.
    pub fn helmholtz_apply(&self, f: &Field) -> Result<Field, SpectralError> {
        self.apply_symbol(f, "helmholtz_apply", |k| Complex64::new(helmholtz_symbol(k), 0.0))
    }

    /// `Λ⁻²f`, dividing mode `k` by `1 + 4π²k²`.
    pub fn helmholtz_invert_spectral(&self, f: &Field) -> Result<Field, SpectralError> {
        self.apply_symbol(f, "helmholtz_invert_spectral", |k| {
            Complex64::new(1.0 / helmholtz_symbol(k), 0.0)
        })
    }

    /// `Λ⁻²f = g ∗ f` by the periodic trapezoidal rule over the nodes.
    ///
    /// Second order in `dx`: the kernel's derivative jumps by −1 at lag zero.
    pub fn helmholtz_invert_convolution(&self, f: &Field) -> Result<Field, SpectralError> {
        assert_eq!(f.grid(), self.grid, "field lives on a different grid");
        let n = self.grid.len();
        let lag = self
            .lag_kernel
            .get_or_init(|| (0..n).map(|l| green(l as f64 / n as f64)).collect());
        let src = f.values();
        let scale = 1.0 / n as f64;
        let values: Vec<f64> = (0..n)
            .map(|j| {
                let mut acc = 0.0;
                for (k, &fk) in src.iter().enumerate() {
                    acc += lag[(j + n - k) % n] * fk;
                }
                acc * scale
            })
            .collect();
        Field::new(self.grid, values)
            .map_err(|_| SpectralError::NonFinite("helmholtz_invert_convolution"))
    }

    /// `∂xΛ⁻²f = g' ∗ f`.
    pub fn grad_inv(&self, f: &Field) -> Result<Field, SpectralError> {
        self.apply_symbol(f, "grad_inv", |k| {
            if self.is_nyquist(k) {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(0.0, 2.0 * PI * k as f64 / helmholtz_symbol(k))
        })
    }

    /// Product of all `factors`, de-aliased according to [`Spectral::dealias`].
    ///
    /// Panics on an empty factor list.
    pub fn product(&self, factors: &[&Field]) -> Result<Field, SpectralError> {
        assert!(!factors.is_empty(), "product of no factors");
        if factors.len() == 1 {
            return Ok(factors[0].clone());
        }
        match self.dealias {
            Dealias::Off => {
                let mut acc = factors[0].clone();
                for f in &factors[1..] {
                    acc = &acc * *f;
                }
                if acc.is_finite() {
                    Ok(acc)
                } else {
                    Err(SpectralError::NonFinite("product"))
                }
            }
            Dealias::Padded => self.padded_product(factors),
        }
    }

    fn padded_plans(&self, m: usize) -> (Plan, Plan) {
        let mut cache = self.padded_plans.lock().expect("plan cache poisoned");
        cache
            .entry(m)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (planner.plan_fft_forward(m), planner.plan_fft_inverse(m))
            })
            .clone()
    }

    fn padded_product(&self, factors: &[&Field]) -> Result<Field, SpectralError> {
        let n = self.grid.len();
        let half = n / 2;
        let q = factors.len();
        let m = {
            let m = (q + 1) * half;
            m + m % 2
        };
        let (fwd, inv) = self.padded_plans(m);
        let mut acc = vec![1.0; m];
        for f in factors {
            let spec = self.spectrum(f);
            let mut padded = vec![Complex64::new(0.0, 0.0); m];
            padded[..half].copy_from_slice(&spec[..half]);
            for j in half + 1..n {
                padded[m - (n - j)] = spec[j];
            }
            padded[half] = spec[half] * 0.5;
            padded[m - half] = spec[half] * 0.5;
            inv.process(&mut padded);
            for (a, c) in acc.iter_mut().zip(&padded) {
                *a *= c.re / n as f64;
            }
        }
        let mut buf: Vec<Complex64> = acc.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.process(&mut buf);
        let scale = n as f64 / m as f64;
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        spec[..half].copy_from_slice(&buf[..half]);
        for j in half + 1..n {
            spec[j] = buf[m - (n - j)];
        }
        for c in spec.iter_mut() {
            *c *= scale;
        }
        self.from_spectrum(spec, "product")
    }

    /// Trigonometric interpolant of `f`, evaluable off the grid.
    pub fn interpolant(&self, f: &Field) -> Interpolant {
        let n = self.grid.len();
        let spec = self.spectrum(f);
        let coeffs = spec[..=n / 2]
            .iter()
            .map(|c| c / n as f64)
            .collect();
        Interpolant { coeffs }
    }

    /// `∫_a^b f dx` of the trigonometric interpolant, for `a ≤ b` or `a > b`.
    pub fn integrate_interval(&self, f: &Field, a: f64, b: f64) -> f64 {
        self.interpolant(f).integrate(a, b)
    }
}

/// Symbol of `1 − ∂x²` at wavenumber `k`.
pub fn helmholtz_symbol(k: i64) -> f64 {
    1.0 + 4.0 * PI * PI * (k as f64) * (k as f64)
}

/// Band-limited interpolant `Σ c_k e^{2πikx}` of a real grid function.
///
/// Stores the one-sided coefficients `c_0..=c_{n/2}` already scaled by `1/n`.
#[derive(Debug, Clone)]
pub struct Interpolant {
    coeffs: Vec<Complex64>,
}

impl Interpolant {
    fn nyquist(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn phase(x: f64) -> Complex64 {
        let theta = 2.0 * PI * (x - x.floor());
        Complex64::new(theta.cos(), theta.sin())
    }

    /// Value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// Value and first derivative at `x`.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let z = Self::phase(x);
        let big = self.nyquist();
        let mut zk = z;
        let mut value = self.coeffs[0].re;
        let mut slope = 0.0;
        for k in 1..big {
            let term = self.coeffs[k] * zk;
            value += 2.0 * term.re;
            // d/dx of 2 Re(c z^k) = 2 Re(2πik c z^k) = −4πk Im(c z^k)
            slope -= 4.0 * PI * k as f64 * term.im;
            zk *= z;
        }
        let nyq = self.coeffs[big].re;
        let arg = 2.0 * PI * big as f64 * (x - x.floor());
        value += nyq * arg.cos();
        slope -= nyq * 2.0 * PI * big as f64 * arg.sin();
        (value, slope)
    }

    /// Exact integral of the interpolant over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let big = self.nyquist();
        let mut total = self.coeffs[0].re * (b - a);
        let (za, zb) = (Self::phase(a), Self::phase(b));
        let (mut zka, mut zkb) = (za, zb);
        for k in 1..big {
            let w = 2.0 * PI * k as f64;
            // ∫ 2 Re(c e^{iwx}) dx = 2 Re(c e^{iwx} / (iw))
            let diff = self.coeffs[k] * (zkb - zka) / Complex64::new(0.0, w);
            total += 2.0 * diff.re;
            zka *= za;
            zkb *= zb;
        }
        let w = 2.0 * PI * big as f64;
        total += self.coeffs[big].re * ((w * b).sin() - (w * a).sin()) / w;
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    fn close(a: &Field, b: &Field, tol: f64) {
        let d = a.distance(b);
        assert!(d < tol, "distance {d:e} exceeds {tol:e}");
    }

    #[test]
    fn first_derivative_of_sine() {
        let sp = Spectral::new(grid(64));
        let f = Field::from_fn(sp.grid(), |x| (2.0 * PI * x).sin()).unwrap();
        let want = Field::from_fn(sp.grid(), |x| 2.0 * PI * (2.0 * PI * x).cos()).unwrap();
        close(&sp.derivative(&f, 1).unwrap(), &want, 1e-12);
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let sp = Spectral::new(grid(32));
        let f = Field::constant(sp.grid(), 5.0);
        for order in 1..=4 {
            assert!(sp.derivative(&f, order).unwrap().max_abs() < 1e-12);
        }
        assert!(matches!(sp.derivative(&f, 5), Err(SpectralError::InvalidOrder(5))));
        assert!(matches!(sp.derivative(&f, 0), Err(SpectralError::InvalidOrder(0))));
    }

    #[test]
    fn second_derivative_matches_centered_differences() {
        let n = 256;
        let sp = Spectral::new(grid(n));
        let f = Field::from_fn(sp.grid(), |x| (4.0 * PI * x).cos()).unwrap();
        let exact = Field::from_fn(sp.grid(), |x| -16.0 * PI * PI * (4.0 * PI * x).cos()).unwrap();
        let spectral = sp.derivative(&f, 2).unwrap();
        close(&spectral, &exact, 1e-9);
        // Centered differences approach the same values at O(dx²).
        let h = sp.grid().dx();
        let v = f.values();
        let fd: Vec<f64> = (0..n)
            .map(|j| (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]) / (h * h))
            .collect();
        let fd = Field::new(sp.grid(), fd).unwrap();
        let err = fd.distance(&spectral);
        let bound = (4.0 * PI).powi(4) * h * h / 12.0 * 1.01;
        assert!(err < bound, "fd gap {err:e} vs {bound:e}");
    }

    #[test]
    fn odd_derivatives_have_zero_mean() {
        let sp = Spectral::new(grid(32));
        let f = Field::from_fn(sp.grid(), |x| (x - 0.3).powi(2) * (2.0 * PI * x).sin().exp()).unwrap();
        assert!(sp.derivative(&f, 1).unwrap().mean().abs() < 1e-12);
        assert!(sp.derivative(&f, 3).unwrap().mean().abs() < 1e-9);
    }

    #[test]
    fn helmholtz_on_single_modes() {
        let sp = Spectral::new(grid(64));
        let g = sp.grid();
        let cos2 = Field::from_fn(g, |x| (2.0 * PI * x).cos()).unwrap();
        let sin6 = Field::from_fn(g, |x| (6.0 * PI * x).sin()).unwrap();
        let s1 = 1.0 + 4.0 * PI * PI;
        let s3 = 1.0 + 36.0 * PI * PI;
        close(&sp.helmholtz_apply(&cos2).unwrap(), &(&cos2 * s1), 1e-11);
        close(&sp.helmholtz_apply(&sin6).unwrap(), &(&sin6 * s3), 1e-10);
        close(&sp.helmholtz_invert_spectral(&cos2).unwrap(), &(&cos2 * (1.0 / s1)), 1e-15);
        let k = Field::constant(g, 3.5);
        close(&sp.helmholtz_apply(&k).unwrap(), &k, 1e-14);
        close(&sp.helmholtz_invert_spectral(&k).unwrap(), &k, 1e-14);
    }

    #[test]
    fn convolution_inverse_examples() {
        let sp = Spectral::new(grid(256));
        let g = sp.grid();
        let one = Field::constant(g, 1.0);
        // ∫g = 1; the trapezoidal sum of the kinked kernel is within O(dx²).
        close(&sp.helmholtz_invert_convolution(&one).unwrap(), &one, 1e-5);
        let cos2 = Field::from_fn(g, |x| (2.0 * PI * x).cos()).unwrap();
        let want = &cos2 * (1.0 / (1.0 + 4.0 * PI * PI));
        close(&sp.helmholtz_invert_convolution(&cos2).unwrap(), &want, 1e-4);
        let mut spike = vec![0.0; 256];
        spike[40] = 256.0;
        let out = sp
            .helmholtz_invert_convolution(&Field::new(g, spike).unwrap())
            .unwrap();
        assert!((out.max() - kernel::green_peak()).abs() < 1e-14);
        assert!((out.values()[40] - 1.0820).abs() < 1e-4);
        assert!((out.values()[40 + 128] - kernel::green_floor()).abs() < 1e-14);
    }

    #[test]
    fn grad_inv_examples() {
        let sp = Spectral::new(grid(64));
        let g = sp.grid();
        assert!(sp.grad_inv(&Field::constant(g, 2.0)).unwrap().max_abs() < 1e-14);
        let sin2 = Field::from_fn(g, |x| (2.0 * PI * x).sin()).unwrap();
        let want = Field::from_fn(g, |x| {
            2.0 * PI * (2.0 * PI * x).cos() / (1.0 + 4.0 * PI * PI)
        })
        .unwrap();
        close(&sp.grad_inv(&sin2).unwrap(), &want, 1e-14);
    }

    #[test]
    fn grad_inv_agrees_with_kernel_derivative_convolution() {
        // g' is smooth away from lag zero, so a fine trapezoid converges to
        // ∂xΛ⁻²f up to the O(dx) jump contribution.
        let n = 512;
        let sp = Spectral::new(grid(n));
        let f = Field::from_fn(sp.grid(), |x| (2.0 * PI * x).sin() + 0.3 * (4.0 * PI * x).cos()).unwrap();
        let spectral = sp.grad_inv(&f).unwrap();
        let v = f.values();
        let conv: Vec<f64> = (0..n)
            .map(|j| {
                // Midpoint value at lag 0: average of the one-sided limits is 0.
                (0..n)
                    .map(|k| {
                        if j == k {
                            0.0
                        } else {
                            green_derivative((j as f64 - k as f64) / n as f64) * v[k]
                        }
                    })
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
        let conv = Field::new(sp.grid(), conv).unwrap();
        assert!(conv.distance(&spectral) < 1e-5);
    }

    #[test]
    fn padded_product_is_exact_for_band_limited_factors() {
        let n = 16;
        let g = grid(n);
        let sp = Spectral::with_dealias(g, Dealias::Padded);
        // cos(2π·5x)² = ½ + ½cos(2π·10x); mode 10 aliases to −6 on 16 nodes.
        let f = Field::from_fn(g, |x| (10.0 * PI * x).cos()).unwrap();
        let dealiased = sp.product(&[&f, &f]).unwrap();
        close(&dealiased, &Field::constant(g, 0.5), 1e-14);
        let aliased = Spectral::new(g).product(&[&f, &f]).unwrap();
        assert!(aliased.distance(&Field::constant(g, 0.5)) > 0.4);
        // A well-resolved triple product is unchanged by padding.
        let h = Field::from_fn(g, |x| 1.0 + (2.0 * PI * x).sin()).unwrap();
        let a = sp.product(&[&h, &h, &h]).unwrap();
        let b = Spectral::new(g).product(&[&h, &h, &h]).unwrap();
        close(&a, &b, 1e-13);
    }

    #[test]
    fn interpolant_reproduces_nodes_and_derivative() {
        let sp = Spectral::new(grid(32));
        let f = Field::from_fn(sp.grid(), |x| (2.0 * PI * x).sin() + 0.25 * (6.0 * PI * x).cos()).unwrap();
        let it = sp.interpolant(&f);
        for (j, &v) in f.values().iter().enumerate() {
            assert!((it.eval(sp.grid().node(j)) - v).abs() < 1e-13);
        }
        let x = 0.3137;
        let (val, slope) = it.eval_with_derivative(x);
        let want = (2.0 * PI * x).sin() + 0.25 * (6.0 * PI * x).cos();
        let want_slope = 2.0 * PI * (2.0 * PI * x).cos() - 0.25 * 6.0 * PI * (6.0 * PI * x).sin();
        assert!((val - want).abs() < 1e-13);
        assert!((slope - want_slope).abs() < 1e-12);
        assert!((it.eval(x + 3.0) - want).abs() < 1e-12);
    }

    #[test]
    fn interval_integral_of_modes() {
        let sp = Spectral::new(grid(32));
        let f = Field::from_fn(sp.grid(), |x| 2.0 + (2.0 * PI * x).cos()).unwrap();
        let (a, b) = (0.1, 0.35);
        let want = 2.0 * (b - a) + ((2.0 * PI * b).sin() - (2.0 * PI * a).sin()) / (2.0 * PI);
        assert!((sp.integrate_interval(&f, a, b) - want).abs() < 1e-14);
        assert!((sp.integrate_interval(&f, 0.0, 1.0) - 2.0).abs() < 1e-14);
    }
}
