use bfamily::characteristics::{integrate_flow, FrameSeries, JacobianRule, TrajectorySet};
use bfamily::diagnostics::{relative_drift, report};
use bfamily::initdata::{build, random_band_limited, FourierSeries, InitError, InitSpec, SignConstraint};
use bfamily::integrator::{step, StepConfig};
use bfamily::{Equation, Field, Grid, Parameters, Spectral, State};
use proptest::prelude::*;

fn any_parameters() -> impl Strategy<Value = Parameters> {
    (0.0f64..4.0, 0.2f64..2.0, 1u32..=4).prop_map(|(b, c, p)| Parameters::new(b, c, p).unwrap())
}

fn spectral(n: usize) -> Spectral {
    Spectral::new(Grid::new(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn helmholtz_round_trip(n in prop::sample::select(vec![16usize, 32, 64, 128]), seed in 0u64..1000) {
        let sp = spectral(n);
        let f = random_band_limited(sp.grid(), n / 4, 1.0, seed);
        let back = sp.helmholtz_invert_spectral(&sp.helmholtz_apply(&f).unwrap()).unwrap();
        prop_assert!(back.distance(&f) <= 1e-12 * f.max_abs().max(1e-300));
    }

    #[test]
    fn inverse_keeps_the_mean(seed in 0u64..1000) {
        let sp = spectral(64);
        let f = random_band_limited(sp.grid(), 10, 1.0, seed);
        let g = sp.helmholtz_invert_spectral(&f).unwrap();
        prop_assert!((g.integral() - f.integral()).abs() < 1e-14);
    }

    #[test]
    fn convolution_of_non_negative_data_is_non_negative(seed in 0u64..1000) {
        let sp = spectral(64);
        let f = random_band_limited(sp.grid(), 6, 1.0, seed).map(f64::abs).unwrap();
        let g = sp.helmholtz_invert_convolution(&f).unwrap();
        prop_assert!(g.min() >= -1e-14 * f.max_abs());
    }

    #[test]
    fn grad_inv_annihilates_constants(kappa in -10.0f64..10.0) {
        let sp = spectral(32);
        let out = sp.grad_inv(&Field::constant(sp.grid(), kappa)).unwrap();
        prop_assert!(out.max_abs() < 1e-14 * kappa.abs().max(1.0));
    }

    #[test]
    fn constants_are_steady(par in any_parameters(), kappa in -0.8f64..0.8) {
        let eq = Equation::new(spectral(32), par);
        let cfg = StepConfig::new(1e-3, 1e-2).unwrap();
        let mut s = State::new(0.0, Field::constant(eq.spectral().grid(), kappa));
        for _ in 0..10 {
            s = step(&eq, &s, &cfg).unwrap();
        }
        prop_assert!(s.u.distance(&Field::constant(eq.spectral().grid(), kappa)) < 1e-13);
    }

    #[test]
    fn steps_are_deterministic(par in any_parameters(), seed in 0u64..1000) {
        let eq = Equation::new(spectral(32), par);
        let cfg = StepConfig::new(1e-3, 1e-2).unwrap();
        let s = State::new(0.0, random_band_limited(eq.spectral().grid(), 4, 0.3, seed));
        let a = step(&eq, &s, &cfg).unwrap();
        let b = step(&eq, &s, &cfg).unwrap();
        prop_assert_eq!(a.u.values(), b.u.values());
    }

    #[test]
    fn flow_stays_ordered_with_positive_jacobian(par in any_parameters(), seed in 0u64..1000) {
        let sp = spectral(32);
        let u0 = random_band_limited(sp.grid(), 3, 0.3, seed);
        let u1 = random_band_limited(sp.grid(), 3, 0.3, seed + 1);
        let mut frames = FrameSeries::new(sp.clone());
        frames.push(0.0, &u0).unwrap();
        frames.push(0.3, &u1).unwrap();
        let out = integrate_flow(&TrajectorySet::uniform(16), &frames, par, 0.01, 0.3).unwrap();
        prop_assert!(out.is_monotone());
        for rule in [JacobianRule::CoupledOde, JacobianRule::Quadrature] {
            prop_assert!(out.jacobians(rule).iter().all(|&j| j > 0.0));
        }
        prop_assert!(out.jacobian_gap() < 1e-6);
    }

    #[test]
    fn report_quantities_are_consistent(par in any_parameters(), seed in 0u64..1000) {
        let eq = Equation::new(spectral(64), par);
        let u = random_band_limited(eq.spectral().grid(), 6, 0.5, seed);
        let r = report(&State::new(0.0, u), &eq).unwrap();
        prop_assert!(r.h2 >= 0.0 && r.l1_m >= 0.0 && r.i_u >= 0.0);
        prop_assert!(r.l1_m >= r.m_total.abs() - 1e-14);
        // The domain has unit length.
        prop_assert!(r.sup_u >= r.h1.abs() - 1e-14);
        prop_assert!(r.min_m <= r.max_m && r.f_min <= r.f_max);
    }

    #[test]
    fn drift_is_zero_only_for_flat_series(v0 in -5.0f64..5.0, bumps in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        prop_assume!(v0 != 0.0);
        prop_assert_eq!(relative_drift(std::iter::repeat_n(v0, 5)), 0.0);
        let series: Vec<f64> = std::iter::once(v0).chain(bumps.iter().map(|d| v0 + d)).collect();
        let d = relative_drift(series);
        prop_assert!(d >= 0.0);
        let worst = bumps.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        prop_assert_eq!(d == 0.0, worst == 0.0);
    }

    #[test]
    fn non_negative_momentum_gives_non_negative_velocity(offset in 0.1f64..2.0, ratio in 0.0f64..=1.0, k in 1usize..5) {
        let sp = spectral(64);
        let mut cos = vec![0.0; k];
        cos[k - 1] = ratio * offset;
        let momentum = FourierSeries { offset, cos, ..FourierSeries::default() };
        let spec = InitSpec::MomentumFirst { momentum, sign: SignConstraint::NonNegative };
        let data = build(&spec, &sp).unwrap();
        prop_assert!(data.m0_min >= -1e-15 * offset);
        prop_assert!(data.u0.min() >= -1e-12 * offset);
    }

    #[test]
    fn sign_constraint_rejects_violations(offset in 0.1f64..2.0, excess in 1.01f64..3.0) {
        let sp = spectral(32);
        let momentum = FourierSeries::cosine(offset, excess * offset);
        for sign in [SignConstraint::NonNegative, SignConstraint::NonPositive] {
            let m = if sign == SignConstraint::NonPositive { momentum.negated() } else { momentum.clone() };
            let err = build(&InitSpec::MomentumFirst { momentum: m, sign }, &sp).unwrap_err();
            prop_assert!(matches!(err, InitError::SignViolation { .. }), "{}", err);
        }
    }
}
