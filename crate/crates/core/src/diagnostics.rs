//! Invariant reports and the checks built on them.
//!
//! All integrals use the grid mean, which is exact for resolvable
//! trigonometric polynomials.

use thiserror::Error;

use crate::equation::{Equation, Parameters, State};
use crate::integrator::{ObserveError, Observer};
use crate::spectral::{kernel, Field, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Numeric(#[from] SpectralError),
    #[error("check requires {required}, got b = {b}, c = {c}, p = {p}")]
    Regime { required: &'static str, b: f64, c: f64, p: u32 },
    #[error("initial momentum changes sign (min {min:e}, max {max:e})")]
    SignChanging { min: f64, max: f64 },
    #[error("window [{a}, {b}] must satisfy 0 <= a < b < 1")]
    Window { a: f64, b: f64 },
    #[error("empty report series")]
    EmptySeries,
}

fn regime_error(required: &'static str, par: Parameters) -> DiagnosticsError {
    DiagnosticsError::Regime { required, b: par.b(), c: par.c(), p: par.p() }
}

/// Per-observation record of the audited quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub t: f64,
    /// `∫u`
    pub h1: f64,
    /// `½∫(u² + u_x²)`
    pub h2: f64,
    /// `∫m`
    pub m_total: f64,
    /// `∫|m|`
    pub l1_m: f64,
    /// `∫(u²+u_x²)/4 + (u_x²+u_xx²)/2 + (u_xx²+u_xxx²)/2`
    pub i_u: f64,
    pub sup_u: f64,
    pub sup_ux: f64,
    pub min_m: f64,
    pub max_m: f64,
    pub f_min: f64,
    pub f_max: f64,
    /// `max |F + u_t + c uᵖu_x|`
    pub eq606_residual: f64,
    /// `∫|u|`
    pub l1_u: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub min_ux: f64,
    /// `c∫(−2u_x u_xx² − ½u_x u_xxx²)`, the closed-form `dI/dt` of the `b = 0, p = 1` regime.
    pub di_rhs: f64,
    /// `|dI/dt − di_rhs|` with `dI/dt` from the chain rule through `u_t`;
    /// only computed in the `b = 0, p = 1` regime.
    pub di_identity_residual: Option<f64>,
}

impl InvariantReport {
    /// Column names of [`InvariantReport::csv_row`].
    pub const CSV_HEADER: [&'static str; 13] = [
        "t", "H1", "H2", "M_total", "L1_m", "I_u", "sup_u", "sup_ux", "min_m", "max_m", "f_min",
        "f_max", "eq606_residual",
    ];

    pub fn csv_row(&self) -> [f64; 13] {
        [
            self.t,
            self.h1,
            self.h2,
            self.m_total,
            self.l1_m,
            self.i_u,
            self.sup_u,
            self.sup_ux,
            self.min_m,
            self.max_m,
            self.f_min,
            self.f_max,
            self.eq606_residual,
        ]
    }
}

/// Computes every audited quantity for one state.
pub fn report(s: &State, eq: &Equation) -> Result<InvariantReport, SpectralError> {
    let sp = eq.spectral();
    let par = eq.parameters();
    let u = &s.u;
    let ux = sp.derivative(u, 1)?;
    let uxx = sp.derivative(u, 2)?;
    let uxxx = sp.derivative(u, 3)?;
    let m = sp.helmholtz_apply(u)?;
    let f = eq.f_density(u)?;
    let ut = eq.rhs_nonlocal(u)?;
    let big_f = eq.f_gradient(u)?;
    let adv = eq.advection(u)?;
    let eq606 = (&(&big_f + &ut) + &adv).max_abs();

    let sq = |a: &Field| a * a;
    let (u2, ux2, uxx2, uxxx2) = (sq(u), sq(&ux), sq(&uxx), sq(&uxxx));
    let i_density = &(&(&(&u2 + &ux2) * 0.25) + &(&(&ux2 + &uxx2) * 0.5)) + &(&(&uxx2 + &uxxx2) * 0.5);
    let di_rhs = par.c() * (&(&(&ux * &uxx2) * -2.0) - &(&(&ux * &uxxx2) * 0.5)).integral();

    let di_identity_residual = if par.is_global_regime() {
        // dI/dt = ∫ ½u u_t + (3/2)u_x u_tx + 2u_xx u_txx + u_xxx u_txxx
        let utx = sp.derivative(&ut, 1)?;
        let utxx = sp.derivative(&ut, 2)?;
        let utxxx = sp.derivative(&ut, 3)?;
        let chain = (&(&(&(&(u * &ut) * 0.5) + &(&(&ux * &utx) * 1.5)) + &(&(&uxx * &utxx) * 2.0))
            + &(&uxxx * &utxxx))
            .integral();
        Some((chain - di_rhs).abs())
    } else {
        None
    };

    Ok(InvariantReport {
        t: s.t,
        h1: u.integral(),
        h2: 0.5 * (&u2 + &ux2).integral(),
        m_total: m.integral(),
        l1_m: m.l1_norm(),
        i_u: i_density.integral(),
        sup_u: u.max_abs(),
        sup_ux: ux.max_abs(),
        min_m: m.min(),
        max_m: m.max(),
        f_min: f.min(),
        f_max: f.max(),
        eq606_residual: eq606,
        l1_u: u.l1_norm(),
        min_u: u.min(),
        max_u: u.max(),
        min_ux: ux.min(),
        di_rhs,
        di_identity_residual,
    })
}

/// Observer that records an [`InvariantReport`] for every observed state.
#[derive(Debug)]
pub struct ReportCollector<'a> {
    eq: &'a Equation,
    pub reports: Vec<InvariantReport>,
}

impl<'a> ReportCollector<'a> {
    pub fn new(eq: &'a Equation) -> Self {
        Self { eq, reports: Vec::new() }
    }
}

impl Observer for ReportCollector<'_> {
    fn observe(&mut self, state: &State) -> Result<(), ObserveError> {
        self.reports.push(report(state, self.eq)?);
        Ok(())
    }
}

/// Guard against division by zero in relative drifts.
pub const DRIFT_EPS: f64 = 1e-300;

/// Signed invariants (`∫u`, `∫m`) can vanish while the solution does not;
/// their drift is then measured against this fraction of `sup|u|` or `∫|m|`.
pub const DRIFT_FLOOR: f64 = 1e-6;

/// `max_t |Q(t) − Q(0)| / max(|Q(0)|, ε)`.
pub fn relative_drift(values: impl IntoIterator<Item = f64>) -> f64 {
    relative_drift_with_floor(values, DRIFT_EPS)
}

/// As [`relative_drift`] with the denominator bounded below by `floor.max(ε)`.
pub fn relative_drift_with_floor(values: impl IntoIterator<Item = f64>, floor: f64) -> f64 {
    let mut it = values.into_iter();
    let Some(q0) = it.next() else { return 0.0 };
    let scale = q0.abs().max(floor).max(DRIFT_EPS);
    it.map(|q| (q - q0).abs() / scale).fold(0.0, f64::max)
}

/// Relative drifts of the invariants whose conservation the parameters imply.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriftTable {
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub m_total: Option<f64>,
    pub l1_m: Option<f64>,
}

impl DriftTable {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        [("H1", self.h1), ("H2", self.h2), ("M_total", self.m_total), ("L1_m", self.l1_m)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

/// Sign-preserved data: the first report's momentum is one-signed.
pub fn momentum_one_signed(first: &InvariantReport) -> bool {
    first.min_m >= 0.0 || first.max_m <= 0.0
}

pub fn drift(series: &[InvariantReport], par: Parameters) -> DriftTable {
    let Some(first) = series.first() else { return DriftTable::default() };
    let of = |get: fn(&InvariantReport) -> f64, floor: f64| {
        relative_drift_with_floor(series.iter().map(get), floor)
    };
    let mean = par.conserves_mean();
    DriftTable {
        h1: mean.then(|| of(|r| r.h1, DRIFT_FLOOR * first.sup_u)),
        h2: par.conserves_energy().then(|| of(|r| r.h2, DRIFT_EPS)),
        m_total: mean.then(|| of(|r| r.m_total, DRIFT_FLOOR * first.l1_m)),
        l1_m: (mean && momentum_one_signed(first)).then(|| of(|r| r.l1_m, DRIFT_EPS)),
    }
}

/// Outcome of the `I(u)` growth audit.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    /// Largest `|ΔI/Δt − R|` over interior observations (centered differences).
    pub identity_residual: f64,
    pub identity_pass: bool,
    /// Largest per-state chain-rule residual recorded in the reports.
    pub instantaneous_residual: f64,
    /// `C₂ = max_t ‖u_x‖∞`.
    pub slope_bound: f64,
    /// `Â = 2C₂`, so `dI/dt ≤ c·Â·I`.
    pub rate: f64,
    /// Largest `I(t) / (I(0)·e^{cÂt})`.
    pub envelope_ratio: f64,
    pub envelope_pass: bool,
}

impl GrowthCheck {
    pub fn passed(&self) -> bool {
        self.identity_pass && self.envelope_pass
    }
}

/// Slack on the Gronwall envelope for round-off.
pub const ENVELOPE_SLACK: f64 = 1e-6;

/// Audits `dI/dt = c∫(−u_x)(2u_xx² + ½u_xxx²)` and the envelope
/// `I(t) ≤ I(0)e^{cÂt}` with `Â = 2·max_t‖u_x‖∞` for the `b = 0, p = 1` regime.
///
/// The envelope follows from `∫(2u_xx² + ½u_xxx²) ≤ 2I`.
pub fn growth_envelope_check(
    series: &[InvariantReport],
    par: Parameters,
) -> Result<GrowthCheck, DiagnosticsError> {
    if !par.is_global_regime() {
        return Err(regime_error("b = 0 and p = 1", par));
    }
    let first = series.first().ok_or(DiagnosticsError::EmptySeries)?;
    let mut identity_residual: f64 = 0.0;
    let mut identity_pass = true;
    for w in series.windows(3) {
        let (a, mid, b) = (&w[0], &w[1], &w[2]);
        let (h0, h1) = (mid.t - a.t, b.t - mid.t);
        // Three-point derivative on a possibly non-uniform stencil.
        let slope = -h1 / (h0 * (h0 + h1)) * a.i_u + (h1 - h0) / (h0 * h1) * mid.i_u
            + h0 / (h1 * (h0 + h1)) * b.i_u;
        let gap = (slope - mid.di_rhs).abs();
        identity_residual = identity_residual.max(gap);
        if gap > crate::tolerances::GROWTH_IDENTITY_ABS.max(crate::tolerances::GROWTH_IDENTITY_REL * mid.di_rhs.abs()) {
            identity_pass = false;
        }
    }
    let instantaneous_residual = series
        .iter()
        .filter_map(|r| r.di_identity_residual)
        .fold(0.0, f64::max);
    let slope_bound = series.iter().map(|r| r.sup_ux).fold(0.0, f64::max);
    let rate = 2.0 * slope_bound;
    let mut envelope_ratio: f64 = 0.0;
    let mut envelope_pass = true;
    for r in series {
        let bound = first.i_u * (par.c() * rate * (r.t - first.t)).exp();
        if r.i_u > bound * (1.0 + ENVELOPE_SLACK) {
            envelope_pass = false;
        }
        if bound > 0.0 {
            envelope_ratio = envelope_ratio.max(r.i_u / bound);
        }
    }
    Ok(GrowthCheck {
        identity_residual,
        identity_pass,
        instantaneous_residual,
        slope_bound,
        rate,
        envelope_ratio,
        envelope_pass,
    })
}

/// Outcome of the slope bound `‖u_x‖∞ ≤ ‖m₀‖_{L¹} + ‖u‖_{L¹}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UxBound {
    /// `C₁ = ‖m₀‖_{L¹}`.
    pub c1: f64,
    pub observed_max: f64,
    /// Smallest `C₁ + ‖u(t)‖_{L¹} − ‖u_x(t)‖∞` over the series.
    pub margin: f64,
    pub pass: bool,
}

pub fn ux_bound_check(
    series: &[InvariantReport],
    m0: &Field,
    par: Parameters,
) -> Result<UxBound, DiagnosticsError> {
    if !par.is_global_regime() {
        return Err(regime_error("b = 0 and p = 1", par));
    }
    if series.is_empty() {
        return Err(DiagnosticsError::EmptySeries);
    }
    let tol = crate::tolerances::sign_tolerance(m0.max_abs());
    let (min, max) = (m0.min(), m0.max());
    if min < -tol && max > tol {
        return Err(DiagnosticsError::SignChanging { min, max });
    }
    let c1 = m0.l1_norm();
    let observed_max = series.iter().map(|r| r.sup_ux).fold(0.0, f64::max);
    let margin = series
        .iter()
        .map(|r| c1 + r.l1_u - r.sup_ux)
        .fold(f64::INFINITY, f64::min);
    Ok(UxBound { c1, observed_max, margin, pass: margin >= 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub enum BreakingStatus {
    /// `‖u‖∞ + ‖u_x‖∞ < M` throughout. `envelope_held` reports whether `I(u)`
    /// stayed under its growth envelope (only defined for `b = 0, p = 1`).
    Bounded { max_sum: f64, envelope_held: Option<bool> },
    /// First observation with `‖u‖∞ + ‖u_x‖∞ ≥ M`.
    GuardTripped { t_star: f64, value: f64 },
}

impl BreakingStatus {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Self::Bounded { .. })
    }
}

pub fn breaking_monitor(series: &[InvariantReport], threshold: f64, par: Parameters) -> BreakingStatus {
    let mut max_sum: f64 = 0.0;
    for r in series {
        let s = r.sup_u + r.sup_ux;
        if s >= threshold {
            return BreakingStatus::GuardTripped { t_star: r.t, value: s };
        }
        max_sum = max_sum.max(s);
    }
    let envelope_held = growth_envelope_check(series, par).ok().map(|g| g.envelope_pass);
    BreakingStatus::Bounded { max_sum, envelope_held }
}

/// The quantities entering the unique-continuation argument on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationProbe {
    pub a: f64,
    pub b: f64,
    /// (i) `max |u|` over the nodes in `[a,b]`.
    pub window_max_u: f64,
    /// (ii) `F(b) − F(a)`.
    pub flux_jump: f64,
    /// (iii) `∫_a^b Λ⁻²f dx`.
    pub smoothed_mass: f64,
    /// (iv) `max |u|` on the circle.
    pub global_max_u: f64,
    pub delta: f64,
    pub threshold: f64,
    /// Contrapositive of the continuation results: if (iv) > δ then one of
    /// (i)–(iii) exceeds the threshold.
    pub consistent: bool,
}

/// Relative size of the (ii)/(iii) threshold against `δ²(b−a)·g_min`.
pub const PROBE_THRESHOLD_FACTOR: f64 = 1e-3;

pub fn continuation_probe(
    s: &State,
    eq: &Equation,
    window: (f64, f64),
    delta: f64,
) -> Result<ContinuationProbe, DiagnosticsError> {
    let par = eq.parameters();
    if !(par.is_h1() || par.is_h2()) {
        return Err(regime_error("H1 (p = 1, b <= 3c) or H2 (b = pc)", par));
    }
    let (a, b) = window;
    if !(0.0 <= a && a < b && b < 1.0) {
        return Err(DiagnosticsError::Window { a, b });
    }
    let sp = eq.spectral();
    let u = &s.u;
    let interp = sp.interpolant(u);
    let grid = u.grid();
    // Nodes inside the window; a window narrower than the grid spacing falls
    // back to the interpolant at its ends.
    let on_nodes = u
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| (a..=b).contains(&grid.node(*j)))
        .map(|(_, v)| v.abs())
        .reduce(f64::max);
    let window_max_u = on_nodes.unwrap_or_else(|| interp.eval(a).abs().max(interp.eval(b).abs()));
    let f = eq.f_density(u)?;
    let big_f = sp.interpolant(&sp.grad_inv(&f)?);
    let flux_jump = big_f.eval(b) - big_f.eval(a);
    let smoothed_mass = sp.integrate_interval(&sp.helmholtz_invert_spectral(&f)?, a, b);
    let global_max_u = u.max_abs();
    let threshold = PROBE_THRESHOLD_FACTOR * delta * delta * (b - a) * kernel::green_floor();
    let consistent = global_max_u <= delta
        || window_max_u > threshold
        || flux_jump.abs() > threshold
        || smoothed_mass.abs() > threshold;
    Ok(ContinuationProbe {
        a,
        b,
        window_max_u,
        flux_jump,
        smoothed_mass,
        global_max_u,
        delta,
        threshold,
        consistent,
    })
}
