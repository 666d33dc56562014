//! Randomized invariants of the forward solver and the inversions.

use std::f64::consts::PI;

use proptest::prelude::*;
use zeroline::born_inversion::born_phase_partial;
use zeroline::io::{fmt_num, parse_num};
use zeroline::piecewise_inversion::{backward_sweep, JumpRecord};
use zeroline::potentials::{ExponentialPotential, PiecewiseConstantPotential, Potential};
use zeroline::radial::{nth_zero, nth_zero_with, AngularParameter, Backend, DEFAULT_CEILING};
use zeroline::random::{random_steps, rng, StepSpec};
use zeroline::zero_lines::{line_from_csv, line_to_csv, trace_fixed_l, LineData, ParamKind};

fn steps(seed: u64) -> PiecewiseConstantPotential {
    random_steps(&mut rng(seed), &StepSpec::default())
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exact_and_numeric_backends_agree(seed in any::<u64>(), e in 0.5f64..40.0, n in 1usize..4) {
        let p: Potential = steps(seed).into();
        let s = AngularParameter::s_wave();
        let a = nth_zero_with(&p, s, e, n, 1e-12, Backend::Exact, DEFAULT_CEILING).unwrap();
        let b = nth_zero_with(&p, s, e, n, 1e-10, Backend::Numeric, DEFAULT_CEILING).unwrap();
        prop_assert!((a - b).abs() <= 1e-7 * a.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn zeros_move_inward_with_energy(seed in any::<u64>(), e in 0.5f64..30.0, de in 0.01f64..10.0, n in 1usize..4) {
        let p: Potential = steps(seed).into();
        let s = AngularParameter::s_wave();
        let lo = nth_zero(&p, s, e, n, 1e-10).unwrap();
        let hi = nth_zero(&p, s, e + de, n, 1e-10).unwrap();
        prop_assert!(hi < lo);
    }

    #[test]
    fn zeros_move_outward_with_angular_momentum(lam in 0.5f64..4.0, dl in 0.05f64..2.0, e in 1.0f64..30.0, v0 in -4.0f64..-0.1, mu in 0.5f64..2.0) {
        let p: Potential = ExponentialPotential::new(v0, mu).unwrap().into();
        let a = nth_zero(&p, AngularParameter::new(lam).unwrap(), e, 1, 1e-10).unwrap();
        let b = nth_zero(&p, AngularParameter::new(lam + dl).unwrap(), e, 1, 1e-10).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn free_zeros_scale_with_momentum(e in 0.1f64..200.0, n in 1usize..8) {
        let r = nth_zero(&Potential::Zero, AngularParameter::s_wave(), e, n, 1e-12).unwrap();
        prop_assert!((r * e.sqrt() - n as f64 * PI).abs() <= 1e-9 * n as f64 * PI);
    }

    #[test]
    fn backward_sweep_accumulates_jumps(raw in prop::collection::vec((0.1f64..10.0, -3.0f64..3.0), 1..6)) {
        let mut pts = raw.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
        let jumps: Vec<JumpRecord> = pts
            .iter()
            .map(|&(a, dv)| JumpRecord {
                a,
                jump3: 0.0,
                slope: 1.0,
                delta_v: dv,
                delta_v_err: 0.0,
                confidence: f64::INFINITY,
                kind: ParamKind::Energy,
                low_confidence: false,
                merged: false,
            })
            .collect();
        let p = backward_sweep(&jumps).unwrap();
        for (i, &(a, dv)) in pts.iter().enumerate() {
            let right = if i + 1 < pts.len() { p.values()[i + 1] } else { 0.0 };
            prop_assert!((right - p.values()[i] - dv).abs() < 1e-12);
            prop_assert_eq!(p.breakpoints()[i], a);
        }
    }

    #[test]
    fn born_phase_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, k in 0.3f64..6.0, ell in 0usize..4) {
        let (p1, p2) = (steps(s1), steps(s2));
        let mix = Potential::linear_combination_piecewise(a, &p1, b, &p2);
        let lhs = born_phase_partial(&mix.into(), ell, k).unwrap();
        let rhs = a * born_phase_partial(&p1.into(), ell, k).unwrap() + b * born_phase_partial(&p2.into(), ell, k).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (lhs.abs() + rhs.abs()).max(1e-6));
    }

    #[test]
    fn numbers_survive_text(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(parse_num(&fmt_num(x), 1).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn traced_lines_are_monotone_and_round_trip(seed in any::<u64>(), n in 1usize..4) {
        let p: Potential = steps(seed).into();
        let grid: Vec<f64> = (0..25).map(|i| 30.0 - 29.0 * i as f64 / 24.0).collect();
        let line = trace_fixed_l(&p, n, AngularParameter::s_wave(), &grid, 1e-10).unwrap();
        line.check_invariants().unwrap();
        match line_from_csv(&line_to_csv(&line, &[])).unwrap() {
            LineData::Fixed(back) => prop_assert_eq!(back.samples, line.samples),
            LineData::Mixed(_) => prop_assert!(false, "fixed line read back as mixed"),
        }
    }
}
