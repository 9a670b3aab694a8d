//! Classical fourth-order Runge-Kutta time stepping.
//!
//! Either formulation can be advanced. The momentum form evolves `m` and
//! reconstructs `u = Λ⁻²m` at every stage. A guard on `‖u‖∞ + ‖u_x‖∞` is
//! checked at every stage; tripping it aborts the step and is reported as a
//! breakdown, never retried with a smaller step.

use thiserror::Error;

use crate::equation::{Equation, State};
use crate::spectral::{Field, SpectralError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    NonlocalU,
    MomentumM,
}

impl std::str::FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nonlocal-u" => Ok(Self::NonlocalU),
            "momentum-m" => Ok(Self::MomentumM),
            other => Err(format!("unknown formulation `{other}` (nonlocal-u | momentum-m)")),
        }
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::NonlocalU => "nonlocal-u",
            Self::MomentumM => "momentum-m",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("dt must lie in (0, 0.1], got {0}")]
    Dt(f64),
    #[error("t_end must be positive, got {0}")]
    TEnd(f64),
    #[error("cfl_limit must lie in (0, 1], got {0}")]
    Cfl(f64),
    #[error("max_value_guard must be positive, got {0}")]
    Guard(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    dt: f64,
    t_end: f64,
    formulation: Formulation,
    cfl_limit: f64,
    max_value_guard: f64,
}

impl StepConfig {
    pub const DEFAULT_CFL: f64 = 0.5;
    pub const DEFAULT_GUARD: f64 = 1e6;

    pub fn new(dt: f64, t_end: f64) -> Result<Self, ConfigError> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(ConfigError::Dt(dt));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(ConfigError::TEnd(t_end));
        }
        Ok(Self {
            dt,
            t_end,
            formulation: Formulation::NonlocalU,
            cfl_limit: Self::DEFAULT_CFL,
            max_value_guard: Self::DEFAULT_GUARD,
        })
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }

    pub fn with_cfl_limit(mut self, cfl: f64) -> Result<Self, ConfigError> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(ConfigError::Cfl(cfl));
        }
        self.cfl_limit = cfl;
        Ok(self)
    }

    pub fn with_guard(mut self, guard: f64) -> Result<Self, ConfigError> {
        if !(guard > 0.0) {
            return Err(ConfigError::Guard(guard));
        }
        self.max_value_guard = guard;
        Ok(self)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn cfl_limit(&self) -> f64 {
        self.cfl_limit
    }

    pub fn max_value_guard(&self) -> f64 {
        self.max_value_guard
    }

    /// Number of steps to reach `t_end`; the last one may be shorter than `dt`.
    pub fn step_count(&self) -> usize {
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error(transparent)]
    Numeric(#[from] SpectralError),
    #[error("guard exceeded at t = {t}: ‖u‖∞ + ‖u_x‖∞ = {value:e}")]
    Breakdown { t: f64, value: f64 },
    #[error("dt = {dt} exceeds the CFL bound {limit} at t = {t}")]
    Cfl { t: f64, dt: f64, limit: f64 },
}

const CFL_EPS: f64 = 1e-12;

/// Largest admissible step for `u` under the advective CFL bound.
pub fn cfl_bound(eq: &Equation, u: &Field, cfl_limit: f64) -> f64 {
    let par = eq.parameters();
    let speed = par.c() * u.max_abs().powi(par.p() as i32);
    cfl_limit * u.grid().dx() / speed.max(CFL_EPS)
}

fn guard(t: f64, u: &Field, ux: &Field, limit: f64) -> Result<(), StepError> {
    let value = u.max_abs() + ux.max_abs();
    if value > limit {
        return Err(StepError::Breakdown { t, value });
    }
    Ok(())
}

fn axpy(base: &Field, h: f64, k: &Field) -> Field {
    base + &(k * h)
}

fn rk4<F>(y: &Field, t: f64, dt: f64, mut rate: F) -> Result<Field, StepError>
where
    F: FnMut(&Field, f64) -> Result<Field, StepError>,
{
    let k1 = rate(y, t)?;
    let k2 = rate(&axpy(y, 0.5 * dt, &k1), t + 0.5 * dt)?;
    let k3 = rate(&axpy(y, 0.5 * dt, &k2), t + 0.5 * dt)?;
    let k4 = rate(&axpy(y, dt, &k3), t + dt)?;
    let incr = &(&(&k1 + &(&k2 * 2.0)) + &(&k3 * 2.0)) + &k4;
    let out = axpy(y, dt / 6.0, &incr);
    if !out.is_finite() {
        return Err(SpectralError::NonFinite("rk4 update").into());
    }
    Ok(out)
}

fn step_by(eq: &Equation, s: &State, dt: f64, cfg: &StepConfig) -> Result<State, StepError> {
    let limit = cfl_bound(eq, &s.u, cfg.cfl_limit);
    if dt > limit {
        return Err(StepError::Cfl { t: s.t, dt, limit });
    }
    let sp = eq.spectral();
    let guard_limit = cfg.max_value_guard;
    let u = match cfg.formulation {
        Formulation::NonlocalU => rk4(&s.u, s.t, dt, |u, t| {
            let ux = sp.derivative(u, 1)?;
            guard(t, u, &ux, guard_limit)?;
            Ok(eq.rhs_nonlocal_with(u, &ux)?)
        })?,
        Formulation::MomentumM => {
            let m0 = sp.helmholtz_apply(&s.u)?;
            let m = rk4(&m0, s.t, dt, |m, t| {
                let u = sp.helmholtz_invert_spectral(m)?;
                let ux = sp.grad_inv(m)?;
                guard(t, &u, &ux, guard_limit)?;
                Ok(eq.rhs_momentum_with(m, &u, &ux)?)
            })?;
            sp.helmholtz_invert_spectral(&m)?
        }
    };
    Ok(State::new(s.t + dt, u))
}

/// One RK4 step of size `cfg.dt()`.
pub fn step(eq: &Equation, s: &State, cfg: &StepConfig) -> Result<State, StepError> {
    step_by(eq, s, cfg.dt, cfg)
}

pub type ObserveError = Box<dyn std::error::Error + Send + Sync>;

/// Receives states during [`evolve`].
pub trait Observer {
    fn observe(&mut self, state: &State) -> Result<(), ObserveError>;
}

impl<F> Observer for F
where
    F: FnMut(&State) -> Result<(), ObserveError>,
{
    fn observe(&mut self, state: &State) -> Result<(), ObserveError> {
        self(state)
    }
}

/// A guard trip: the first stage at which `‖u‖∞ + ‖u_x‖∞` exceeded the limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakdown {
    pub t: f64,
    pub step: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    /// Last state reached; on breakdown, the last state before the failing step.
    pub state: State,
    pub steps: usize,
    pub breakdown: Option<Breakdown>,
}

impl Evolution {
    pub fn broke_down(&self) -> bool {
        self.breakdown.is_some()
    }
}

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("step {step}: {source}")]
    Step { step: usize, source: StepError },
    #[error("observer failed after step {step}: {source}")]
    Observer { step: usize, source: ObserveError },
}

/// Iterates [`step`] from `s0` to `t_end`.
///
/// Observers see the initial state, every `stride`-th state and the final
/// state. A guard trip ends the run early and is recorded in
/// [`Evolution::breakdown`]; everything observed so far stays valid.
pub fn evolve(
    eq: &Equation,
    s0: &State,
    cfg: &StepConfig,
    stride: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<Evolution, EvolveError> {
    let stride = stride.max(1);
    let total = cfg.step_count();
    let notify = |observers: &mut [&mut dyn Observer], s: &State, step: usize| {
        observers
            .iter_mut()
            .try_for_each(|o| o.observe(s))
            .map_err(|source| EvolveError::Observer { step, source })
    };
    notify(observers, s0, 0)?;
    let mut state = s0.clone();
    let t0 = s0.t;
    for k in 1..=total {
        // Times are k·dt from the start so they do not accumulate round-off.
        let target = if k == total { t0 + cfg.t_end } else { t0 + k as f64 * cfg.dt };
        let dt = target - state.t;
        match step_by(eq, &state, dt, cfg) {
            Ok(mut next) => {
                next.t = target;
                state = next;
            }
            Err(StepError::Breakdown { t, value }) => {
                return Ok(Evolution {
                    state,
                    steps: k - 1,
                    breakdown: Some(Breakdown { t, step: k, value }),
                });
            }
            Err(source) => return Err(EvolveError::Step { step: k, source }),
        }
        if k % stride == 0 || k == total {
            notify(observers, &state, k)?;
        }
    }
    Ok(Evolution {
        state,
        steps: total,
        breakdown: None,
    })
}
