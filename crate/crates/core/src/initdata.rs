//! Initial conditions.
//!
//! Momentum-first data is specified through `m₀` and mapped to `u₀ = Λ⁻²m₀`,
//! which is how one-signed momentum (the hypothesis of the sign-preservation
//! and global-existence results) is produced exactly.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::spectral::{kernel, Field, Grid, Spectral, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InitError {
    #[error(transparent)]
    Numeric(#[from] SpectralError),
    #[error("momentum violates the {constraint} constraint: min m0 = {min:e}, max m0 = {max:e}")]
    SignViolation {
        constraint: SignConstraint,
        min: f64,
        max: f64,
    },
    #[error("invalid initial-data parameter: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConstraint {
    #[default]
    Any,
    NonNegative,
    NonPositive,
}

impl std::fmt::Display for SignConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Any => "any",
            Self::NonNegative => "nonnegative",
            Self::NonPositive => "nonpositive",
        })
    }
}

impl std::str::FromStr for SignConstraint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any" => Ok(Self::Any),
            "nonnegative" => Ok(Self::NonNegative),
            "nonpositive" => Ok(Self::NonPositive),
            other => Err(format!("unknown sign constraint `{other}` (any | nonnegative | nonpositive)")),
        }
    }
}

/// Random trigonometric content added on top of a deterministic series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomModes {
    pub count: usize,
    pub amplitude: f64,
    pub seed: u64,
}

/// `offset + Σ_k cos[k−1]·cos(2πkx) + sin[k−1]·sin(2πkx)` plus optional random modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierSeries {
    pub offset: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub random: Option<RandomModes>,
}

impl FourierSeries {
    pub fn constant(offset: f64) -> Self {
        Self { offset, ..Self::default() }
    }

    /// `offset + amplitude·cos(2πx)`.
    pub fn cosine(offset: f64, amplitude: f64) -> Self {
        Self { offset, cos: vec![amplitude], ..Self::default() }
    }

    pub fn negated(&self) -> Self {
        Self {
            offset: -self.offset,
            cos: self.cos.iter().map(|v| -v).collect(),
            sin: self.sin.iter().map(|v| -v).collect(),
            random: self.random.map(|r| RandomModes { amplitude: -r.amplitude, ..r }),
        }
    }

    pub fn sample(&self, grid: Grid) -> Result<Field, SpectralError> {
        let mut f = Field::from_fn(grid, |x| {
            let mut v = self.offset;
            for (k, a) in self.cos.iter().enumerate() {
                v += a * (2.0 * PI * (k + 1) as f64 * x).cos();
            }
            for (k, a) in self.sin.iter().enumerate() {
                v += a * (2.0 * PI * (k + 1) as f64 * x).sin();
            }
            v
        })?;
        if let Some(r) = self.random {
            let noise = random_band_limited(grid, r.count, r.amplitude.abs(), r.seed);
            let noise = &(&noise - &Field::constant(grid, noise.mean())) * r.amplitude.signum();
            f = &f + &noise;
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// `u₀` given directly as a Fourier series.
    FourierModes(FourierSeries),
    /// `m₀` given as a Fourier series, `u₀ = Λ⁻²m₀`.
    MomentumFirst { momentum: FourierSeries, sign: SignConstraint },
    /// `offset + amplitude·Σ_j exp(−(x − center − j)²/(2 width²))`, optionally
    /// rescaled so that `½∫(u² + u_x²) = energy`.
    GaussianBump {
        offset: f64,
        amplitude: f64,
        center: f64,
        width: f64,
        energy: Option<f64>,
    },
    /// `amplitude·g(x − center)`; its momentum is a point mass.
    PeakonProfile { amplitude: f64, center: f64 },
}

impl InitSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::FourierModes(_) => "fourier-modes",
            Self::MomentumFirst { .. } => "momentum-first",
            Self::GaussianBump { .. } => "gaussian-bump-periodic",
            Self::PeakonProfile { .. } => "peakon-profile",
        }
    }
}

/// `u₀` with a certificate of its momentum range.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: Field,
    pub m0: Field,
    pub m0_min: f64,
    pub m0_max: f64,
    /// Data below the H³ class the theorems assume; useful only as a stress test.
    pub stress_test_only: bool,
}

pub fn build(spec: &InitSpec, sp: &Spectral) -> Result<InitialData, InitError> {
    let grid = sp.grid();
    let (u0, m0, stress) = match spec {
        InitSpec::FourierModes(series) => {
            let u0 = series.sample(grid)?;
            let m0 = sp.helmholtz_apply(&u0)?;
            (u0, m0, false)
        }
        InitSpec::MomentumFirst { momentum, sign } => {
            let m0 = momentum.sample(grid)?;
            let (min, max) = (m0.min(), m0.max());
            let violated = match sign {
                SignConstraint::Any => false,
                SignConstraint::NonNegative => min < 0.0,
                SignConstraint::NonPositive => max > 0.0,
            };
            if violated {
                return Err(InitError::SignViolation { constraint: *sign, min, max });
            }
            (sp.helmholtz_invert_spectral(&m0)?, m0, false)
        }
        InitSpec::GaussianBump { offset, amplitude, center, width, energy } => {
            if !(*width > 0.0) {
                return Err(InitError::Invalid(format!("bump width must be positive, got {width}")));
            }
            let bump = Field::from_fn(grid, |x| {
                (-3..=3)
                    .map(|j| {
                        let d = x - center - j as f64;
                        (-d * d / (2.0 * width * width)).exp()
                    })
                    .sum::<f64>()
            })?;
            let mut u0 = &Field::constant(grid, *offset) + &(&bump * *amplitude);
            if let Some(target) = energy {
                if !(*target > 0.0) {
                    return Err(InitError::Invalid(format!("energy must be positive, got {target}")));
                }
                let ux = sp.derivative(&u0, 1)?;
                let current = 0.5 * (&(&u0 * &u0) + &(&ux * &ux)).integral();
                if current == 0.0 {
                    return Err(InitError::Invalid("cannot normalize zero data".into()));
                }
                u0 = &u0 * (target / current).sqrt();
            }
            let m0 = sp.helmholtz_apply(&u0)?;
            (u0, m0, false)
        }
        InitSpec::PeakonProfile { amplitude, center } => {
            let u0 = Field::from_fn(grid, |x| amplitude * kernel::green(x - center))?;
            let m0 = sp.helmholtz_apply(&u0)?;
            (u0, m0, true)
        }
    };
    Ok(InitialData {
        m0_min: m0.min(),
        m0_max: m0.max(),
        u0,
        m0,
        stress_test_only: stress,
    })
}

/// Reproducible random trigonometric polynomial with modes `0..=modes`.
///
/// Coefficients are uniform in `[−amplitude, amplitude]`, damped by `1/k`.
pub fn random_band_limited(grid: Grid, modes: usize, amplitude: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = rng.gen_range(-amplitude..=amplitude);
    let coeffs: Vec<(f64, f64)> = (1..=modes)
        .map(|k| {
            let a = rng.gen_range(-amplitude..=amplitude) / k as f64;
            let b = rng.gen_range(-amplitude..=amplitude) / k as f64;
            (a, b)
        })
        .collect();
    Field::from_fn(grid, |x| {
        coeffs.iter().enumerate().fold(mean, |acc, (i, (a, b))| {
            let w = 2.0 * PI * (i + 1) as f64 * x;
            acc + a * w.cos() + b * w.sin()
        })
    })
    .expect("trigonometric polynomial with finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize) -> Spectral {
        Spectral::new(Grid::new(n).unwrap())
    }

    #[test]
    fn momentum_first_single_mode() {
        let sp = sp(64);
        let spec = InitSpec::MomentumFirst {
            momentum: FourierSeries::cosine(1.0, 0.5),
            sign: SignConstraint::NonNegative,
        };
        let data = build(&spec, &sp).unwrap();
        let want = Field::from_fn(sp.grid(), |x| {
            1.0 + 0.5 * (2.0 * PI * x).cos() / (1.0 + 4.0 * PI * PI)
        })
        .unwrap();
        assert!(data.u0.distance(&want) < 1e-15);
        assert!((data.m0_min - 0.5).abs() < 1e-15);
        assert!((data.m0_max - 1.5).abs() < 1e-15);
        assert!(!data.stress_test_only);
        let back = sp.helmholtz_apply(&data.u0).unwrap();
        assert!(back.distance(&data.m0) < 1e-12 * data.m0.max_abs());
    }

    #[test]
    fn sign_constraint_is_enforced() {
        let sp = sp(32);
        let bad = InitSpec::MomentumFirst {
            momentum: FourierSeries::cosine(1.0, 1.5),
            sign: SignConstraint::NonNegative,
        };
        assert!(matches!(build(&bad, &sp), Err(InitError::SignViolation { .. })));
        let mirrored = InitSpec::MomentumFirst {
            momentum: FourierSeries::cosine(1.0, 0.5).negated(),
            sign: SignConstraint::NonPositive,
        };
        let data = build(&mirrored, &sp).unwrap();
        assert!(data.m0_max <= -0.5 + 1e-15);
        // Exact zeros are allowed.
        let touching = InitSpec::MomentumFirst {
            momentum: FourierSeries::cosine(1.0, 1.0),
            sign: SignConstraint::NonNegative,
        };
        assert!(build(&touching, &sp).is_ok());
    }

    #[test]
    fn fourier_modes_momentum_changes_sign() {
        let sp = sp(64);
        let data = build(&InitSpec::FourierModes(FourierSeries::cosine(0.2, 0.1)), &sp).unwrap();
        let amp = 0.1 * (1.0 + 4.0 * PI * PI);
        assert!((data.m0_max - (0.2 + amp)).abs() < 1e-12);
        assert!((data.m0_min - (0.2 - amp)).abs() < 1e-12);
        assert!(data.m0_min < 0.0 && data.m0_max > 0.0);
    }

    #[test]
    fn peakon_is_flagged() {
        let sp = sp(128);
        let data = build(&InitSpec::PeakonProfile { amplitude: 1.0, center: 0.5 }, &sp).unwrap();
        assert!(data.stress_test_only);
        assert!((data.u0.max() - kernel::green_peak()).abs() < 1e-14);
        // Point-mass momentum: the spectral Λ²u₀ concentrates near the crest.
        assert!(data.m0_max > 10.0);
    }

    #[test]
    fn gaussian_bump_energy_normalization() {
        let sp = sp(128);
        let spec = InitSpec::GaussianBump {
            offset: 0.0,
            amplitude: 1.0,
            center: 0.5,
            width: 0.08,
            energy: Some(0.25),
        };
        let data = build(&spec, &sp).unwrap();
        let ux = sp.derivative(&data.u0, 1).unwrap();
        let h2 = 0.5 * (&(&data.u0 * &data.u0) + &(&ux * &ux)).integral();
        assert!((h2 - 0.25).abs() < 1e-12);
        let bad = InitSpec::GaussianBump { offset: 0.0, amplitude: 1.0, center: 0.5, width: 0.0, energy: None };
        assert!(matches!(build(&bad, &sp), Err(InitError::Invalid(_))));
    }

    #[test]
    fn random_modes_are_reproducible() {
        let g = Grid::new(32).unwrap();
        let a = random_band_limited(g, 5, 1.0, 42);
        let b = random_band_limited(g, 5, 1.0, 42);
        let c = random_band_limited(g, 5, 1.0, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let series = FourierSeries {
            offset: 1.0,
            random: Some(RandomModes { count: 3, amplitude: 0.1, seed: 9 }),
            ..FourierSeries::default()
        };
        let f = series.sample(g).unwrap();
        assert!((f.mean() - 1.0).abs() < 1e-15);
    }
}
