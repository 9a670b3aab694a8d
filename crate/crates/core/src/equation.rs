//! Right-hand sides of the b-family equation
//!
//! ```text
//! u_t − u_txx + (b+c)uᵖu_x = b uᵖ⁻¹u_x u_xx + c uᵖu_xxx
//! ```
//!
//! in its non-local velocity form and its momentum transport form, together
//! with the densities `f` and `F = ∂xΛ⁻²f` that drive the unique-continuation
//! arguments.

use thiserror::Error;

use crate::spectral::{Field, Spectral, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParameterError {
    #[error("b must be a finite non-negative real, got {0}")]
    NegativeB(f64),
    #[error("c must be a finite positive real, got {0}")]
    NonPositiveC(f64),
    #[error("p must be a positive integer, got {0}")]
    ZeroP(u32),
}

/// The triple `(b, c, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    b: f64,
    c: f64,
    p: u32,
}

impl Parameters {
    pub fn new(b: f64, c: f64, p: u32) -> Result<Self, ParameterError> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(ParameterError::NegativeB(b));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(ParameterError::NonPositiveC(c));
        }
        if p == 0 {
            return Err(ParameterError::ZeroP(p));
        }
        Ok(Self { b, c, p })
    }

    /// Camassa-Holm: `b = 2, c = 1, p = 1`.
    pub fn camassa_holm() -> Self {
        Self { b: 2.0, c: 1.0, p: 1 }
    }

    /// Degasperis-Procesi: `b = 3, c = 1, p = 1`.
    pub fn degasperis_procesi() -> Self {
        Self { b: 3.0, c: 1.0, p: 1 }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `p = 1` and `0 ≤ b ≤ 3c`.
    pub fn is_h1(&self) -> bool {
        self.p == 1 && self.b <= 3.0 * self.c
    }

    /// `b = pc`.
    pub fn is_h2(&self) -> bool {
        self.b == self.p as f64 * self.c
    }

    /// `∫u` and `∫m` are conserved when `p = 1` or `b = pc`.
    pub fn conserves_mean(&self) -> bool {
        self.p == 1 || self.is_h2()
    }

    /// `½∫(u² + u_x²)` is conserved when `b = (p+1)c`.
    pub fn conserves_energy(&self) -> bool {
        self.b == (self.p + 1) as f64 * self.c
    }

    /// The `p = 1, b = 0` regime with global solutions for one-signed momentum.
    pub fn is_global_regime(&self) -> bool {
        self.p == 1 && self.b == 0.0
    }

    /// Coefficient of `uᵖ⁻¹u_x²` in `f`.
    pub fn slope_coefficient(&self) -> f64 {
        (3.0 * self.p as f64 * self.c - self.b) / 2.0
    }

    /// Coefficient of `uᵖ⁺¹` in `f`.
    pub fn power_coefficient(&self) -> f64 {
        self.b / (self.p + 1) as f64
    }

    /// Coefficient `(p−1)(b−pc)/2` of the extra `Λ⁻²(uᵖ⁻²u_x³)` term.
    pub fn cubic_coefficient(&self) -> f64 {
        (self.p as f64 - 1.0) * (self.b - self.p as f64 * self.c) / 2.0
    }

    /// Exponent `b/(pc)` in the flow identity `m(t,γ)·γ_x^{b/(pc)} = m₀`.
    pub fn flow_exponent(&self) -> f64 {
        self.b / (self.p as f64 * self.c)
    }
}

/// A time-stamped solution sample.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Field,
}

impl State {
    pub fn new(t: f64, u: Field) -> Self {
        Self { t, u }
    }
}

/// The equation bound to a grid and a parameter set.
#[derive(Debug, Clone)]
pub struct Equation {
    spectral: Spectral,
    par: Parameters,
}

impl Equation {
    pub fn new(spectral: Spectral, par: Parameters) -> Self {
        Self { spectral, par }
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn parameters(&self) -> Parameters {
        self.par
    }

    pub fn momentum(&self, u: &Field) -> Result<Field, SpectralError> {
        self.spectral.helmholtz_apply(u)
    }

    pub fn velocity(&self, m: &Field) -> Result<Field, SpectralError> {
        self.spectral.helmholtz_invert_spectral(m)
    }

    /// `base^power · tail...` as one de-aliasing product; `power = 0` drops `base`.
    fn power_product(&self, base: &Field, power: u32, tail: &[&Field]) -> Result<Field, SpectralError> {
        let mut factors: Vec<&Field> = std::iter::repeat_n(base, power as usize).collect();
        factors.extend_from_slice(tail);
        if factors.is_empty() {
            return Ok(Field::constant(base.grid(), 1.0));
        }
        self.spectral.product(&factors)
    }

    /// `c uᵖ u_x`.
    pub fn advection(&self, u: &Field) -> Result<Field, SpectralError> {
        let ux = self.spectral.derivative(u, 1)?;
        self.advection_with(u, &ux)
    }

    pub(crate) fn advection_with(&self, u: &Field, ux: &Field) -> Result<Field, SpectralError> {
        Ok(&self.power_product(u, self.par.p, &[ux])? * self.par.c)
    }

    /// `f = (3pc−b)/2 · uᵖ⁻¹u_x² + b/(p+1) · uᵖ⁺¹`.
    pub fn f_density(&self, u: &Field) -> Result<Field, SpectralError> {
        let ux = self.spectral.derivative(u, 1)?;
        self.f_density_with(u, &ux)
    }

    pub(crate) fn f_density_with(&self, u: &Field, ux: &Field) -> Result<Field, SpectralError> {
        let p = self.par.p;
        let slope = self.power_product(u, p - 1, &[ux, ux])?;
        let mut f = &slope * self.par.slope_coefficient();
        let beta = self.par.power_coefficient();
        if beta != 0.0 {
            f = &f + &(&self.power_product(u, p + 1, &[])? * beta);
        }
        Ok(f)
    }

    /// `F = ∂xΛ⁻²f`.
    pub fn f_gradient(&self, u: &Field) -> Result<Field, SpectralError> {
        self.spectral.grad_inv(&self.f_density(u)?)
    }

    /// `u_t` from the non-local form
    ///
    /// ```text
    /// u_t = −c uᵖu_x − ∂xΛ⁻²f − (p−1)(b−pc)/2 · Λ⁻²(uᵖ⁻²u_x³)
    /// ```
    ///
    /// The last term is skipped whenever its coefficient vanishes, so `uᵖ⁻²`
    /// is never formed for `p = 1`.
    pub fn rhs_nonlocal(&self, u: &Field) -> Result<Field, SpectralError> {
        let ux = self.spectral.derivative(u, 1)?;
        self.rhs_nonlocal_with(u, &ux)
    }

    pub(crate) fn rhs_nonlocal_with(&self, u: &Field, ux: &Field) -> Result<Field, SpectralError> {
        let adv = self.advection_with(u, ux)?;
        let force = self.spectral.grad_inv(&self.f_density_with(u, ux)?)?;
        let mut rhs = &(-&adv) - &force;
        let cubic = self.par.cubic_coefficient();
        if cubic != 0.0 {
            let inner = self.power_product(u, self.par.p - 2, &[ux, ux, ux])?;
            let smoothed = self.spectral.helmholtz_invert_spectral(&inner)?;
            rhs = &rhs - &(&smoothed * cubic);
        }
        check_finite(rhs, "rhs_nonlocal")
    }

    /// `m_t = −c uᵖ m_x − b uᵖ⁻¹u_x m` with `u = Λ⁻²m`.
    pub fn rhs_momentum(&self, m: &Field) -> Result<Field, SpectralError> {
        let u = self.velocity(m)?;
        let ux = self.spectral.grad_inv(m)?;
        self.rhs_momentum_with(m, &u, &ux)
    }

    pub(crate) fn rhs_momentum_with(
        &self,
        m: &Field,
        u: &Field,
        ux: &Field,
    ) -> Result<Field, SpectralError> {
        let p = self.par.p;
        let mx = self.spectral.derivative(m, 1)?;
        let mut rhs = &self.power_product(u, p, &[&mx])? * (-self.par.c);
        if self.par.b != 0.0 {
            let stretch = self.power_product(u, p - 1, &[ux, m])?;
            rhs = &rhs - &(&stretch * self.par.b);
        }
        check_finite(rhs, "rhs_momentum")
    }
}

fn check_finite(f: Field, op: &'static str) -> Result<Field, SpectralError> {
    if f.is_finite() {
        Ok(f)
    } else {
        Err(SpectralError::NonFinite(op))
    }
}
