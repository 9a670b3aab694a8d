//! Characteristic flow `γ_t = c u(t,γ)ᵖ`, `γ(0,x) = x`, and its Jacobian
//! `γ_x`, integrated offline against stored solution frames.
//!
//! Frames are interpolated spectrally in space and linearly in time. The
//! Jacobian is carried two ways: by RK4 on the linear ODE
//! `γ_tx = pc uᵖ⁻¹u_x γ_x`, and as the exponential of the accumulated
//! exponent `∫ pc uᵖ⁻¹u_x(τ,γ) dτ`. Along the flow `m(t,γ)·γ_x^{b/(pc)}`
//! equals `m₀(x)`.

use thiserror::Error;

use crate::equation::{Parameters, State};
use crate::integrator::{ObserveError, Observer};
use crate::spectral::{Field, Interpolant, Spectral};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("Jacobian of seed {seed} became non-positive ({value:e}) at t = {t}")]
    Degenerate { seed: usize, t: f64, value: f64 },
    #[error("time {t} outside the stored frames [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("seed {0} outside [0,1)")]
    InvalidSeed(f64),
    #[error("frames must be pushed in increasing time order")]
    Unordered,
}

/// Time-ordered solution frames with dense output.
#[derive(Debug)]
pub struct FrameSeries {
    spectral: Spectral,
    times: Vec<f64>,
    frames: Vec<Interpolant>,
}

impl FrameSeries {
    pub fn new(spectral: Spectral) -> Self {
        Self { spectral, times: Vec::new(), frames: Vec::new() }
    }

    pub fn push(&mut self, t: f64, u: &Field) -> Result<(), FlowError> {
        if self.times.last().is_some_and(|&last| t <= last) {
            return Err(FlowError::Unordered);
        }
        self.times.push(t);
        self.frames.push(self.spectral.interpolant(u));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Slack for stage times that land on a frame up to round-off.
    fn snap(&self, t: f64) -> f64 {
        let span = self.times.last().copied().unwrap_or(0.0).abs().max(1.0);
        let eps = 1e-12 * span;
        match (self.times.first(), self.times.last()) {
            (Some(&a), _) if t < a && a - t <= eps => a,
            (_, Some(&b)) if t > b && t - b <= eps => b,
            _ => t,
        }
    }

    /// `(u, u_x)` at `(t, x)`.
    pub fn sample(&self, t: f64, x: f64) -> Result<(f64, f64), FlowError> {
        let t = self.snap(t);
        let (start, end) = match (self.times.first(), self.times.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(FlowError::OutOfRange { t, start: f64::NAN, end: f64::NAN }),
        };
        if t < start || t > end {
            return Err(FlowError::OutOfRange { t, start, end });
        }
        let i = self.times.partition_point(|&ti| ti <= t);
        if i == 0 || self.times[i - 1] == t || i == self.times.len() {
            let j = if i == 0 { 0 } else { i - 1 };
            return Ok(self.frames[j].eval_with_derivative(x));
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let theta = (t - t0) / (t1 - t0);
        let (u0, ux0) = self.frames[i - 1].eval_with_derivative(x);
        let (u1, ux1) = self.frames[i].eval_with_derivative(x);
        Ok(((1.0 - theta) * u0 + theta * u1, (1.0 - theta) * ux0 + theta * ux1))
    }
}

impl Observer for FrameSeries {
    fn observe(&mut self, state: &State) -> Result<(), ObserveError> {
        Ok(self.push(state.t, &state.u)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianRule {
    /// RK4 on `γ_tx = pc uᵖ⁻¹u_x γ_x`.
    CoupledOde,
    /// `exp` of the accumulated exponent.
    Quadrature,
}

/// Characteristic curves seeded at `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    t: f64,
    seeds: Vec<f64>,
    lifted: Vec<f64>,
    jac: Vec<f64>,
    exponent: Vec<f64>,
}

impl TrajectorySet {
    pub fn new(seeds: Vec<f64>) -> Result<Self, FlowError> {
        if let Some(&bad) = seeds.iter().find(|&&x| !(0.0..1.0).contains(&x)) {
            return Err(FlowError::InvalidSeed(bad));
        }
        let n = seeds.len();
        Ok(Self {
            t: 0.0,
            lifted: seeds.clone(),
            seeds,
            jac: vec![1.0; n],
            exponent: vec![0.0; n],
        })
    }

    /// `count` equispaced seeds `i/count`.
    pub fn uniform(count: usize) -> Self {
        Self::new((0..count).map(|i| i as f64 / count as f64).collect())
            .expect("uniform seeds lie in [0,1)")
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn seeds(&self) -> &[f64] {
        &self.seeds
    }

    /// Unreduced positions; their order is the winding-aware order.
    pub fn lifted(&self) -> &[f64] {
        &self.lifted
    }

    /// Positions reduced to `[0,1)`.
    pub fn positions(&self) -> Vec<f64> {
        self.lifted.iter().map(|x| x.rem_euclid(1.0)).collect()
    }

    pub fn jacobians(&self, rule: JacobianRule) -> Vec<f64> {
        match rule {
            JacobianRule::CoupledOde => self.jac.clone(),
            JacobianRule::Quadrature => self.exponent.iter().map(|e| e.exp()).collect(),
        }
    }

    /// Largest relative gap between the two Jacobian computations.
    pub fn jacobian_gap(&self) -> f64 {
        self.jac
            .iter()
            .zip(&self.exponent)
            .map(|(j, e)| {
                let q = e.exp();
                (j - q).abs() / q
            })
            .fold(0.0, f64::max)
    }

    /// Whether lifted positions of initially ordered seeds are still ordered.
    pub fn is_monotone(&self) -> bool {
        let mut idx: Vec<usize> = (0..self.seeds.len()).collect();
        idx.sort_by(|&a, &b| self.seeds[a].total_cmp(&self.seeds[b]));
        idx.windows(2).all(|w| self.lifted[w[0]] < self.lifted[w[1]])
    }
}

/// Advances every trajectory by `dt` with RK4 on `(γ, γ_x, exponent)`.
pub fn advance_flow(
    traj: &TrajectorySet,
    frames: &FrameSeries,
    par: Parameters,
    dt: f64,
) -> Result<TrajectorySet, FlowError> {
    let c = par.c();
    let p = par.p() as i32;
    // (velocity, growth rate of log γ_x) at (t, x)
    let field = |t: f64, x: f64| -> Result<(f64, f64), FlowError> {
        let (u, ux) = frames.sample(t, x)?;
        Ok((c * u.powi(p), p as f64 * c * u.powi(p - 1) * ux))
    };
    let t0 = traj.t;
    let mut next = traj.clone();
    for i in 0..traj.seeds.len() {
        let (x, j) = (traj.lifted[i], traj.jac[i]);
        let (v1, a1) = field(t0, x)?;
        let (v2, a2) = field(t0 + 0.5 * dt, x + 0.5 * dt * v1)?;
        let (v3, a3) = field(t0 + 0.5 * dt, x + 0.5 * dt * v2)?;
        let (v4, a4) = field(t0 + dt, x + dt * v3)?;
        next.lifted[i] = x + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
        next.exponent[i] = traj.exponent[i] + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        let k1 = a1 * j;
        let k2 = a2 * (j + 0.5 * dt * k1);
        let k3 = a3 * (j + 0.5 * dt * k2);
        let k4 = a4 * (j + dt * k3);
        let jac = j + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(jac > 0.0) {
            return Err(FlowError::Degenerate { seed: i, t: t0 + dt, value: jac });
        }
        next.jac[i] = jac;
    }
    next.t = t0 + dt;
    Ok(next)
}

/// Repeats [`advance_flow`] with step `dt` until `t_end` (last step shortened).
pub fn integrate_flow(
    traj: &TrajectorySet,
    frames: &FrameSeries,
    par: Parameters,
    dt: f64,
    t_end: f64,
) -> Result<TrajectorySet, FlowError> {
    let mut cur = traj.clone();
    let t0 = traj.t;
    let steps = (((t_end - t0) / dt) - 1e-9).ceil().max(0.0) as usize;
    for k in 1..=steps {
        let target = if k == steps { t_end } else { t0 + k as f64 * dt };
        cur = advance_flow(&cur, frames, par, target - cur.t)?;
        cur.t = target;
    }
    Ok(cur)
}

/// `max_i |m(t,γ_i)·γ_x(t,x_i)^{b/(pc)} − m₀(x_i)|`, with `m` and `m₀`
/// evaluated by spectral interpolation.
pub fn flow_conservation_residual(
    traj: &TrajectorySet,
    m: &Interpolant,
    m0: &Interpolant,
    par: Parameters,
    rule: JacobianRule,
) -> f64 {
    let exponent = par.flow_exponent();
    traj.jacobians(rule)
        .iter()
        .zip(traj.lifted.iter().zip(&traj.seeds))
        .map(|(&jac, (&x, &seed))| {
            let weight = if exponent == 0.0 { 1.0 } else { (exponent * jac.ln()).exp() };
            (m.eval(x) * weight - m0.eval(seed)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    fn frames_of(sp: &Spectral, fields: &[(f64, Field)]) -> FrameSeries {
        let mut fs = FrameSeries::new(sp.clone());
        for (t, u) in fields {
            fs.push(*t, u).unwrap();
        }
        fs
    }

    #[test]
    fn constant_velocity_translates_seeds() {
        let sp = Spectral::new(Grid::new(16).unwrap());
        let u = Field::constant(sp.grid(), 0.7);
        let fs = frames_of(&sp, &[(0.0, u.clone()), (1.0, u)]);
        let par = Parameters::new(1.0, 2.0, 2).unwrap();
        let traj = TrajectorySet::uniform(8);
        let out = integrate_flow(&traj, &fs, par, 0.1, 1.0).unwrap();
        let shift = 2.0 * 0.49;
        for (seed, x) in out.seeds().iter().zip(out.positions()) {
            let want = (seed + shift).rem_euclid(1.0);
            assert!((x - want).abs() < 1e-13);
        }
        for rule in [JacobianRule::CoupledOde, JacobianRule::Quadrature] {
            assert!(out.jacobians(rule).iter().all(|&j| (j - 1.0).abs() < 1e-14));
        }
        assert!(out.is_monotone());
    }

    #[test]
    fn flat_slope_at_seed_keeps_unit_jacobian() {
        let sp = Spectral::new(Grid::new(32).unwrap());
        let u = Field::from_fn(sp.grid(), |x| 0.1 * (2.0 * PI * x).sin().powi(2)).unwrap();
        let fs = frames_of(&sp, &[(0.0, u.clone()), (0.5, u)]);
        let par = Parameters::new(0.0, 1.0, 1).unwrap();
        // Seeds where both u and u_x vanish stay put with γ_x = 1.
        let traj = TrajectorySet::new(vec![0.0, 0.5]).unwrap();
        let out = integrate_flow(&traj, &fs, par, 0.01, 0.5).unwrap();
        for rule in [JacobianRule::CoupledOde, JacobianRule::Quadrature] {
            assert!(out.jacobians(rule).iter().all(|&j| (j - 1.0).abs() < 1e-13));
        }
    }

    #[test]
    fn residual_is_zero_at_start() {
        let sp = Spectral::new(Grid::new(32).unwrap());
        let m0 = Field::from_fn(sp.grid(), |x| 1.0 + 0.5 * (2.0 * PI * x).cos()).unwrap();
        let it = sp.interpolant(&m0);
        let traj = TrajectorySet::uniform(16);
        let r = flow_conservation_residual(&traj, &it, &it, Parameters::camassa_holm(), JacobianRule::CoupledOde);
        assert!(r < 1e-15);
    }

    #[test]
    fn linear_time_interpolation_between_frames() {
        let sp = Spectral::new(Grid::new(16).unwrap());
        let fs = frames_of(
            &sp,
            &[(0.0, Field::constant(sp.grid(), 1.0)), (2.0, Field::constant(sp.grid(), 3.0))],
        );
        let (u, ux) = fs.sample(0.5, 0.3).unwrap();
        assert!((u - 1.5).abs() < 1e-15 && ux.abs() < 1e-15);
        assert!(matches!(fs.sample(2.5, 0.0), Err(FlowError::OutOfRange { .. })));
        let mut fs = fs;
        assert!(matches!(fs.push(1.0, &Field::zeros(sp.grid())), Err(FlowError::Unordered)));
    }

    #[test]
    fn seeds_are_validated() {
        assert!(matches!(TrajectorySet::new(vec![0.2, 1.0]), Err(FlowError::InvalidSeed(_))));
        assert!(TrajectorySet::new(vec![-0.1]).is_err());
    }

    #[test]
    fn rough_stage_slopes_are_reported_as_degenerate() {
        // Seed at x = 0 where u = 0, so γ stays put and only the stage slopes
        // u_x(0) = 0, −4, −4, −3 enter; one RK4 step of size 1 gives γ_x < 0.
        let sp = Spectral::new(Grid::new(16).unwrap());
        let slope = |a: f64| Field::from_fn(sp.grid(), |x| a * (2.0 * PI * x).sin() / (2.0 * PI)).unwrap();
        let fs = frames_of(&sp, &[(0.0, slope(0.0)), (0.5, slope(-4.0)), (1.0, slope(-3.0))]);
        let traj = TrajectorySet::new(vec![0.0]).unwrap();
        let err = advance_flow(&traj, &fs, Parameters::new(0.0, 1.0, 1).unwrap(), 1.0).unwrap_err();
        assert!(matches!(err, FlowError::Degenerate { seed: 0, .. }));
    }
}
