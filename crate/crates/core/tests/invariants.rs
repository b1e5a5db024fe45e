//! Property tests for structural invariants: model reduction, linearity of
//! the homogeneous flow, kernel hermiticity, metric identities, inequality
//! implications, formatting round trips, and trajectory reproducibility.

mod common;

use common::{case_a, demo_couplings, demo_oscillator, random_valid_state};
use covpair::{
    density_matrix_eval, emit_csv, entanglement_test, format_sig, general_rhs, integrate,
    parse_csv, simon_lengths, simplified_rhs, stationary_state, subsystem_metrics,
    to_covariance_state, CovarianceState, IntegratorConfig, LindbladCouplings, Model,
    OscillatorParams, SimonParams, Subsystem,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_osc() -> impl Strategy<Value = OscillatorParams> {
    (0.2f64..3.0, 0.2f64..3.0, 0.2f64..2.0).prop_map(|(omega_a, omega_b, lambda)| {
        OscillatorParams {
            omega_a,
            omega_b,
            lambda,
        }
    })
}

fn arb_state() -> impl Strategy<Value = CovarianceState> {
    proptest::array::uniform10(-3.0f64..3.0).prop_map(|v| CovarianceState::from_vec(0.0, v))
}

/// Couplings inside the reduced model: only the restricted entries vanish.
fn arb_simplified() -> impl Strategy<Value = LindbladCouplings> {
    proptest::array::uniform9(-1.0f64..1.0).prop_map(|h| LindbladCouplings {
        h11: h[0],
        h22: h[1],
        h33: h[2],
        h44: h[3],
        h13: [h[4], h[5]],
        h24: [h[6], h[7]],
        h12: [h[8], 0.0],
        ..Default::default()
    })
}

/// As above but with strictly positive damping, so a stationary state exists.
fn arb_damped_simplified() -> impl Strategy<Value = LindbladCouplings> {
    (arb_simplified(), 0.05f64..1.0, 0.05f64..1.0).prop_map(|(mut h, ga, gb)| {
        h.h13[1] = ga;
        h.h24[1] = gb;
        h
    })
}

/// Fully general couplings with every drive (diagonals and real parts)
/// removed; what remains generates a homogeneous linear flow.
fn arb_homogeneous() -> impl Strategy<Value = LindbladCouplings> {
    proptest::array::uniform6(-1.0f64..1.0).prop_map(|h| LindbladCouplings {
        h11: 0.0,
        h22: 0.0,
        h33: 0.0,
        h44: 0.0,
        h12: [0.0, h[0]],
        h13: [0.0, h[1]],
        h14: [0.0, h[2]],
        h23: [0.0, h[3]],
        h24: [0.0, h[4]],
        h34: [0.0, h[5]],
    })
}

fn state_from_seed(g: [f64; 16]) -> CovarianceState {
    let mut sigma = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            sigma[i][j] = (0..4).map(|k| g[4 * i + k] * g[4 * j + k]).sum::<f64>();
        }
    }
    for (i, row) in sigma.iter_mut().enumerate() {
        row[i] += 0.15;
    }
    CovarianceState {
        tau: 0.0,
        c11: sigma[0][0],
        c12: sigma[0][1],
        c22: sigma[1][1],
        b11: sigma[2][0],
        b12: sigma[2][1],
        b21: sigma[3][0],
        b22: sigma[3][1],
        a11: sigma[2][2],
        a12: sigma[2][3],
        a22: sigma[3][3],
    }
}

fn arb_valid_state() -> impl Strategy<Value = CovarianceState> {
    proptest::array::uniform16(-0.7f64..0.7).prop_map(state_from_seed)
}

fn arb_simon() -> impl Strategy<Value = SimonParams> {
    (
        0.1f64..3.0,
        0.1f64..3.0,
        0.1f64..3.0,
        0.1f64..3.0,
        -0.9f64..0.9,
        -0.9f64..0.9,
    )
        .prop_map(|(a1, b1, a2, b2, t, s)| SimonParams {
            a1,
            b1,
            a2,
            b2,
            a12: t * (a1 * a2).sqrt(),
            b12: s * (b1 * b2).sqrt(),
        })
}

proptest! {
    #[test]
    fn general_rhs_reduces_to_simplified(
        s in arb_state(),
        osc in arb_osc(),
        h in arb_simplified(),
    ) {
        let g = general_rhs(&s, &osc, &h);
        let r = simplified_rhs(&s, &osc, &h).unwrap();
        for i in 0..10 {
            prop_assert!((g[i] - r[i]).abs() <= 1e-12, "component {i}: {} vs {}", g[i], r[i]);
        }
    }

    #[test]
    fn homogeneous_flow_is_linear(
        x in arb_state(),
        y in arb_state(),
        osc in arb_osc(),
        h in arb_homogeneous(),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let fx = general_rhs(&x, &osc, &h);
        let fy = general_rhs(&y, &osc, &h);
        let mut combo = [0.0; 10];
        let (xv, yv) = (x.to_vec(), y.to_vec());
        for i in 0..10 {
            combo[i] = alpha * xv[i] + beta * yv[i];
        }
        let fc = general_rhs(&CovarianceState::from_vec(0.0, combo), &osc, &h);
        let scale = 1.0 + fc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..10 {
            let expected = alpha * fx[i] + beta * fy[i];
            prop_assert!(
                (fc[i] - expected).abs() <= 1e-10 * scale,
                "component {i}: {} vs {}",
                fc[i],
                expected
            );
        }
    }

    #[test]
    fn density_kernel_is_hermitian(
        s in arb_valid_state(),
        rr in proptest::array::uniform2(-2.0f64..2.0),
        r in proptest::array::uniform2(-2.0f64..2.0),
    ) {
        let plus = density_matrix_eval(&s, rr, r).unwrap();
        let minus = density_matrix_eval(&s, rr, [-r[0], -r[1]]).unwrap();
        prop_assert!((plus - minus.conj()).norm() <= 1e-15 * plus.norm().max(1e-300));
        let diag = density_matrix_eval(&s, rr, [0.0, 0.0]).unwrap();
        prop_assert_eq!(diag.im, 0.0);
        prop_assert!(diag.re > 0.0);
    }

    #[test]
    fn subsystem_metric_identities(s in arb_valid_state()) {
        for which in [Subsystem::A, Subsystem::B] {
            let m = subsystem_metrics(&s, which).unwrap();
            let (pos, mom, cross) = match which {
                Subsystem::A => (s.c11, s.a11, s.b11),
                Subsystem::B => (s.c22, s.a22, s.b22),
            };
            prop_assert_eq!(m.d_corr_sq, pos);
            prop_assert!((m.omega_sq - (mom * pos - cross * cross)).abs() <= 1e-15);
            prop_assert!((m.d_decoh_sq * 2.0 * m.omega_sq - pos).abs() <= 1e-14 * pos);
            prop_assert!((0.0..1.0).contains(&m.xi));
            if !m.xi_clamped {
                let reconstructed = (1.0 + m.xi) / (4.0 * (1.0 - m.xi));
                prop_assert!((reconstructed - m.omega_sq).abs() <= 1e-12 * m.omega_sq.max(1.0));
            }
        }
    }

    #[test]
    fn composite_lengths_never_exceed_single(p in arb_simon()) {
        let l = simon_lengths(&p).unwrap();
        prop_assert!(l.comp_corr_a <= l.corr_a * (1.0 + 1e-12));
        prop_assert!(l.comp_corr_b <= l.corr_b * (1.0 + 1e-12));
        prop_assert!((l.comp_decoh_a - l.decoh_a).abs() <= 1e-15 * l.decoh_a);
        prop_assert!((l.comp_decoh_b - l.decoh_b).abs() <= 1e-15 * l.decoh_b);
    }

    /// States passing the matrix separability form also satisfy the scalar
    /// length-scale inequality; the converse does not hold in general.
    #[test]
    fn matrix_separability_implies_scalar_bound(p in arb_simon()) {
        let s = to_covariance_state(&p).unwrap();
        let report = entanglement_test(&s);
        prop_assume!(report.sep_lhs >= report.sep_rhs);
        let l = simon_lengths(&p).unwrap();
        prop_assert!(
            l.ineq32_lhs <= l.ineq32_rhs + 1e-9 * l.ineq32_rhs.abs().max(1.0),
            "lhs {} rhs {}",
            l.ineq32_lhs,
            l.ineq32_rhs
        );
    }

    #[test]
    fn entanglement_flag_matches_cross_determinant(p in arb_simon()) {
        let s = to_covariance_state(&p).unwrap();
        let report = entanglement_test(&s);
        prop_assert_eq!(report.entangled, s.det_cs() < 0.0);
        prop_assert_eq!(report.det_cs, s.det_cs());
    }

    #[test]
    fn seventeen_digit_formatting_roundtrips(x in proptest::num::f64::ANY) {
        prop_assume!(x.is_finite());
        let text = format_sig(x, 17);
        let back: f64 = text.parse().unwrap();
        prop_assert_eq!(back, x, "text {}", text);
    }

    #[test]
    fn csv_emission_roundtrips(
        raw in proptest::collection::vec(proptest::array::uniform3(-1e12f64..1e12), 1..20),
    ) {
        let rows: Vec<Vec<f64>> = raw.into_iter().map(|r| r.to_vec()).collect();
        let text = emit_csv(&["a", "b", "c"], &rows, 17);
        let (header, parsed) = parse_csv(&text).unwrap();
        prop_assert_eq!(header, vec!["a", "b", "c"]);
        prop_assert_eq!(parsed, rows);
    }

    #[test]
    fn stationary_point_has_vanishing_rhs(
        osc in arb_osc(),
        h in arb_damped_simplified(),
    ) {
        let s = stationary_state(&osc, &h, Model::Simplified).unwrap();
        let rhs = simplified_rhs(&s, &osc, &h).unwrap();
        let scale = 1.0 + s.to_vec().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (i, v) in rhs.iter().enumerate() {
            prop_assert!(v.abs() <= 1e-10 * scale, "residual {v} in component {i}");
        }
    }

    #[test]
    fn initial_conversion_is_lossless(p in arb_simon()) {
        let s = to_covariance_state(&p).unwrap();
        prop_assert_eq!(s.tau, 0.0);
        prop_assert_eq!(s.c11, p.a1);
        prop_assert_eq!(s.a11, p.b1);
        prop_assert_eq!(s.c22, p.a2);
        prop_assert_eq!(s.a22, p.b2);
        prop_assert_eq!(s.c12, p.a12);
        prop_assert_eq!(s.a12, p.b12);
        prop_assert_eq!(s.b11, 0.0);
        prop_assert_eq!(s.b22, 0.0);
        prop_assert_eq!(s.b12, 0.0);
        prop_assert_eq!(s.b21, 0.0);
    }
}

#[test]
fn trajectory_grid_and_determinism() {
    let osc = demo_oscillator();
    let couplings = demo_couplings();
    let initial = to_covariance_state(&case_a()).unwrap();
    let cfg = IntegratorConfig {
        dt: 1e-3,
        t_end: 0.7371, // endpoint off the step grid, forcing a short tail
        sample_stride: 7,
        ..IntegratorConfig::default()
    };
    let first = integrate(&initial, &osc, &couplings, &cfg, Model::Simplified).unwrap();
    let second = integrate(&initial, &osc, &couplings, &cfg, Model::Simplified).unwrap();

    assert_eq!(first.samples.len(), second.samples.len());
    for ((t1, s1), (t2, s2)) in first.samples.iter().zip(&second.samples) {
        assert_eq!(t1, t2);
        assert_eq!(s1.to_vec(), s2.to_vec());
    }

    let (t0, s0) = &first.samples[0];
    assert_eq!(*t0, initial.tau);
    assert_eq!(s0.to_vec(), initial.to_vec());
    for pair in first.samples.windows(2) {
        assert!(pair[1].0 > pair[0].0, "taus must strictly increase");
    }
    assert_eq!(first.samples.last().unwrap().0, cfg.t_end);
}

#[test]
fn drift_free_uncertainty_products_without_couplings() {
    let zero = LindbladCouplings {
        h12: [0.0, 0.0],
        h24: [0.0, 0.0],
        ..Default::default()
    };
    let osc = demo_oscillator();
    let cfg = IntegratorConfig {
        t_end: 5.0,
        sample_stride: 50,
        ..IntegratorConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..3 {
        let initial = random_valid_state(&mut rng);
        let traj = integrate(&initial, &osc, &zero, &cfg, Model::Simplified).unwrap();
        let metrics = traj.metrics.as_ref().expect("full-rank samples");
        let first = &metrics[0];
        for m in metrics {
            assert!((m.omega_a_sq - first.omega_a_sq).abs() < 1e-9);
            assert!((m.omega_b_sq - first.omega_b_sq).abs() < 1e-9);
        }
    }
}
