//! Fixed-step and step-doubling RK4 integration of the covariance equations
//! of motion, plus finite-difference residual checks and comparison against
//! the closed-form trajectories.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::{a_block, b_block, cross_block, ClosedFormError, ClosedFormParams};
use crate::lindblad::{
    general_rhs, require_simplified, simplified_rhs, DynamicsError, LindbladCouplings, Model,
    OscillatorParams,
};
use crate::state::{subsystem_metrics, CovarianceState, Subsystem};

/// Any component beyond this magnitude aborts the run as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    Rk4Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every n-th step in the output (the final point is always kept).
    pub sample_stride: usize,
    pub method: Method,
    /// Per-step error bound for the step-doubling method.
    pub adapt_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_end: 10.0,
            sample_stride: 10,
            method: Method::Rk4,
            adapt_tol: 1e-9,
        }
    }
}

/// Derived per-sample quantities stored alongside the raw components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMetrics {
    pub det_cs: f64,
    pub omega_a_sq: f64,
    pub omega_b_sq: f64,
    pub d_decoh_a_sq: f64,
    pub d_decoh_b_sq: f64,
}

/// Sampled solution of one run, carrying the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub osc: OscillatorParams,
    pub couplings: LindbladCouplings,
    pub model: Model,
    pub samples: Vec<(f64, CovarianceState)>,
    /// Present when every sample has nondegenerate subsystem blocks.
    pub metrics: Option<Vec<SampleMetrics>>,
}

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("bad integrator config: {what}")]
    BadConfig { what: &'static str },
    #[error("solution diverged near tau = {tau}")]
    Diverged { tau: f64 },
    #[error(transparent)]
    Model(#[from] DynamicsError),
}

fn eval_rhs(
    model: Model,
    y: &[f64; 10],
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> [f64; 10] {
    let s = CovarianceState::from_vec(0.0, *y);
    match model {
        Model::General => general_rhs(&s, osc, h),
        // Restriction is validated once before stepping begins.
        Model::Simplified => simplified_rhs(&s, osc, h).expect("couplings validated"),
    }
}

fn rk4_step(
    model: Model,
    y: &[f64; 10],
    dt: f64,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> [f64; 10] {
    let stage = |scale: f64, k: &[f64; 10]| {
        let mut z = *y;
        for i in 0..10 {
            z[i] += scale * dt * k[i];
        }
        eval_rhs(model, &z, osc, h)
    };
    let k1 = eval_rhs(model, y, osc, h);
    let k2 = stage(0.5, &k1);
    let k3 = stage(0.5, &k2);
    let k4 = stage(1.0, &k3);
    let mut out = *y;
    for i in 0..10 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn check_finite(y: &[f64; 10], tau: f64) -> Result<(), IntegrateError> {
    for v in y {
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            return Err(IntegrateError::Diverged { tau });
        }
    }
    Ok(())
}

/// Advances one outer step of width `dt` with internal step doubling: each
/// substep is accepted when the big-step versus two-half-steps discrepancy,
/// scaled by 1/15, stays within `tol`.
fn adaptive_span(
    model: Model,
    y: &[f64; 10],
    tau0: f64,
    dt: f64,
    tol: f64,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> Result<[f64; 10], IntegrateError> {
    let mut y = *y;
    let mut done = 0.0;
    let mut sub = dt;
    while done < dt - 1e-12 * dt {
        sub = sub.min(dt - done);
        if sub < 1e-14 * dt {
            return Err(IntegrateError::Diverged { tau: tau0 + done });
        }
        let big = rk4_step(model, &y, sub, osc, h);
        let half = rk4_step(model, &y, 0.5 * sub, osc, h);
        let two = rk4_step(model, &half, 0.5 * sub, osc, h);
        let mut err = 0.0f64;
        for i in 0..10 {
            err = err.max((big[i] - two[i]).abs() / 15.0);
        }
        if !err.is_finite() {
            return Err(IntegrateError::Diverged { tau: tau0 + done });
        }
        if err <= tol {
            done += sub;
            y = two;
            check_finite(&y, tau0 + done)?;
            if err < tol / 32.0 {
                sub *= 2.0;
            }
        } else {
            sub *= 0.5;
        }
    }
    Ok(y)
}

/// Integrates from `initial` (whose `tau` is the start time) to `t_end`,
/// sampling on the uniform grid `tau_k = tau_0 + k dt` every `sample_stride`
/// steps. The endpoint is always included, through a shortened final step if
/// `t_end` is not on the grid. The adaptive method subdivides each grid cell
/// internally but reports on the same grid.
pub fn integrate(
    initial: &CovarianceState,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
    cfg: &IntegratorConfig,
    model: Model,
) -> Result<Trajectory, IntegrateError> {
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(IntegrateError::BadConfig {
            what: "dt must be positive",
        });
    }
    if !cfg.t_end.is_finite() || cfg.t_end <= initial.tau {
        return Err(IntegrateError::BadConfig {
            what: "t_end must exceed the initial tau",
        });
    }
    if cfg.sample_stride == 0 {
        return Err(IntegrateError::BadConfig {
            what: "sample_stride must be at least 1",
        });
    }
    if matches!(cfg.method, Method::Rk4Adaptive)
        && !(cfg.adapt_tol.is_finite() && cfg.adapt_tol > 0.0)
    {
        return Err(IntegrateError::BadConfig {
            what: "adapt_tol must be positive",
        });
    }
    if matches!(model, Model::Simplified) {
        require_simplified(h)?;
    }

    let t0 = initial.tau;
    let span = cfg.t_end - t0;
    let n_full = (span / cfg.dt + 1e-9).floor() as u64;
    let remainder = span - n_full as f64 * cfg.dt;
    let has_tail = remainder > 1e-12 * cfg.dt;

    let mut y = initial.to_vec();
    check_finite(&y, t0)?;
    let mut samples = vec![(t0, *initial)];

    for k in 0..n_full {
        let tau = t0 + k as f64 * cfg.dt;
        y = match cfg.method {
            Method::Rk4 => rk4_step(model, &y, cfg.dt, osc, h),
            Method::Rk4Adaptive => adaptive_span(model, &y, tau, cfg.dt, cfg.adapt_tol, osc, h)?,
        };
        let tau_next = t0 + (k + 1) as f64 * cfg.dt;
        check_finite(&y, tau_next)?;
        if (k + 1) % cfg.sample_stride as u64 == 0 {
            samples.push((tau_next, CovarianceState::from_vec(tau_next, y)));
        }
    }
    if has_tail {
        let tau = t0 + n_full as f64 * cfg.dt;
        y = match cfg.method {
            Method::Rk4 => rk4_step(model, &y, remainder, osc, h),
            Method::Rk4Adaptive => adaptive_span(model, &y, tau, remainder, cfg.adapt_tol, osc, h)?,
        };
        check_finite(&y, cfg.t_end)?;
    }
    let need_final = samples
        .last()
        .is_none_or(|(t, _)| (cfg.t_end - t).abs() > 1e-9 * cfg.dt);
    if need_final {
        samples.push((cfg.t_end, CovarianceState::from_vec(cfg.t_end, y)));
    }

    let metrics = samples
        .iter()
        .map(|(_, s)| {
            let ma = subsystem_metrics(s, Subsystem::A).ok()?;
            let mb = subsystem_metrics(s, Subsystem::B).ok()?;
            Some(SampleMetrics {
                det_cs: s.det_cs(),
                omega_a_sq: ma.omega_sq,
                omega_b_sq: mb.omega_sq,
                d_decoh_a_sq: ma.d_decoh_sq,
                d_decoh_b_sq: mb.d_decoh_sq,
            })
        })
        .collect::<Option<Vec<_>>>();

    Ok(Trajectory {
        osc: *osc,
        couplings: *h,
        model,
        samples,
        metrics,
    })
}

#[derive(Debug, Error)]
pub enum ResidualError {
    #[error("residual check needs at least 3 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("residual check needs uniform sample spacing (found {found}, expected {expected})")]
    NonuniformSpacing { found: f64, expected: f64 },
    #[error(transparent)]
    Model(#[from] DynamicsError),
}

/// Largest absolute defect between centered finite differences of the
/// samples and the equations of motion evaluated at the interior points.
/// The value scales with the square of the sample spacing.
pub fn residual_check(
    traj: &Trajectory,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
    model: Model,
) -> Result<f64, ResidualError> {
    let n = traj.samples.len();
    if n < 3 {
        return Err(ResidualError::TooFewSamples { got: n });
    }
    let dt = traj.samples[1].0 - traj.samples[0].0;
    for w in traj.samples.windows(2) {
        let step = w[1].0 - w[0].0;
        if (step - dt).abs() > 1e-9 * dt.abs() {
            return Err(ResidualError::NonuniformSpacing {
                found: step,
                expected: dt,
            });
        }
    }
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let prev = traj.samples[i - 1].1.to_vec();
        let next = traj.samples[i + 1].1.to_vec();
        let rhs = match model {
            Model::General => general_rhs(&traj.samples[i].1, osc, h),
            Model::Simplified => simplified_rhs(&traj.samples[i].1, osc, h)?,
        };
        for j in 0..10 {
            let fd = (next[j] - prev[j]) / (2.0 * dt);
            worst = worst.max((fd - rhs[j]).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("trajectory parameter mismatch: {what}")]
    ParamMismatch { what: &'static str },
    #[error("closed forms apply to the simplified model only")]
    ModelMismatch,
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// Per-component worst-case deviations between a trajectory and the closed
/// forms evaluated at the same sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormComparison {
    /// Maximum absolute difference per component, in state-vector order.
    /// Cross entries are NaN when the cross forms were not evaluated.
    pub max_abs_diff: [f64; 10],
    /// False at equal frequencies, where the cross forms are unavailable.
    pub cross_evaluated: bool,
    pub samples_compared: usize,
}

/// Evaluates the closed forms at every sample time of `traj` and reports the
/// worst deviation per component. The trajectory must have been produced by
/// the simplified model with exactly the parameters captured in `p`.
pub fn compare_closed_form(
    traj: &Trajectory,
    p: &ClosedFormParams,
) -> Result<ClosedFormComparison, CompareError> {
    if traj.model != Model::Simplified {
        return Err(CompareError::ModelMismatch);
    }
    let first = traj.samples.first().ok_or(CompareError::EmptyTrajectory)?;

    if traj.osc != p.osc {
        return Err(CompareError::ParamMismatch { what: "oscillator" });
    }
    let h = &traj.couplings;
    let scalars_match = h.h11 == p.h11
        && h.h33 == p.h33
        && h.h13r() == p.h13r
        && h.h22 == p.h22
        && h.h44 == p.h44
        && h.h24r() == p.h24r
        && h.h12r() == p.h12r
        && 2.0 * h.h13i() / p.osc.omega_a == p.rates.gamma_a
        && 2.0 * h.h24i() / p.osc.omega_b == p.rates.gamma_b;
    if !scalars_match {
        return Err(CompareError::ParamMismatch { what: "couplings" });
    }
    let init =
        crate::simon::to_covariance_state(&p.init).map_err(|_| CompareError::ParamMismatch {
            what: "initial state",
        })?;
    if first.1 != init {
        return Err(CompareError::ParamMismatch {
            what: "initial state",
        });
    }

    let cross_evaluated = p.osc.r() != 1.0;
    let mut max_abs_diff = [0.0f64; 10];
    if !cross_evaluated {
        for d in &mut max_abs_diff[6..10] {
            *d = f64::NAN;
        }
    }
    for (tau, s) in &traj.samples {
        let (a11, b11, c11) = a_block(*tau, p);
        let (a22, b22, c22) = b_block(*tau, p);
        let got = s.to_vec();
        let mut expected = [a11, b11, c11, a22, b22, c22, 0.0, 0.0, 0.0, 0.0];
        let upto = if cross_evaluated {
            let (a12, b12, b21, c12) = cross_block(*tau, p)?;
            expected[6..10].copy_from_slice(&[a12, b12, b21, c12]);
            10
        } else {
            6
        };
        for j in 0..upto {
            max_abs_diff[j] = max_abs_diff[j].max((got[j] - expected[j]).abs());
        }
    }
    Ok(ClosedFormComparison {
        max_abs_diff,
        cross_evaluated,
        samples_compared: traj.samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simon::{to_covariance_state, SimonParams};

    fn demo_osc() -> OscillatorParams {
        OscillatorParams {
            omega_a: 1.0,
            omega_b: 3.0,
            lambda: 1.0,
        }
    }

    fn demo_couplings() -> LindbladCouplings {
        LindbladCouplings {
            h11: 1.0,
            h22: 2.0,
            h33: 1.0,
            h44: 4.0,
            h13: [1.0, 0.125],
            h24: [1.0, 0.375],
            ..LindbladCouplings::default()
        }
    }

    fn demo_init() -> SimonParams {
        SimonParams {
            a1: 0.5,
            b1: 0.5,
            a2: 0.5,
            b2: 0.5,
            a12: 0.5,
            b12: -0.5,
        }
    }

    fn demo_state() -> CovarianceState {
        to_covariance_state(&demo_init()).unwrap()
    }

    #[test]
    fn sample_grid_is_uniform_and_complete() {
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 1.0,
            sample_stride: 100,
            ..IntegratorConfig::default()
        };
        let traj = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 11);
        for (i, (tau, _)) in traj.samples.iter().enumerate() {
            assert!((tau - 0.1 * i as f64).abs() < 1e-12);
        }
        assert!(traj.metrics.is_some());
        assert_eq!(traj.metrics.as_ref().unwrap().len(), 11);
    }

    #[test]
    fn endpoint_off_grid_is_appended() {
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 0.0105,
            sample_stride: 10,
            ..IntegratorConfig::default()
        };
        let traj = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        let taus: Vec<f64> = traj.samples.iter().map(|(t, _)| *t).collect();
        assert_eq!(taus.len(), 3);
        assert_eq!(taus[2], 0.0105);
    }

    #[test]
    fn undamped_rotation_preserves_invariants() {
        let h = LindbladCouplings {
            h12: [0.0; 2],
            h24: [0.0; 2],
            ..LindbladCouplings::default()
        };
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 5.0,
            sample_stride: 500,
            ..IntegratorConfig::default()
        };
        let initial = CovarianceState {
            a11: 0.9,
            c11: 0.6,
            b11: 0.2,
            ..demo_state()
        };
        let traj = integrate(&initial, &demo_osc(), &h, &cfg, Model::Simplified).unwrap();
        let trace0 = initial.a11 + initial.c11;
        let det0 = initial.a11 * initial.c11 - initial.b11 * initial.b11;
        for (_, s) in &traj.samples {
            assert!((s.a11 + s.c11 - trace0).abs() < 1e-10);
            assert!((s.a11 * s.c11 - s.b11 * s.b11 - det0).abs() < 1e-10);
        }
    }

    #[test]
    fn fixed_step_matches_closed_form_blocks() {
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 5.0,
            sample_stride: 100,
            ..IntegratorConfig::default()
        };
        let traj = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        let p = ClosedFormParams::new(demo_osc(), &demo_couplings(), demo_init()).unwrap();
        let report = compare_closed_form(&traj, &p).unwrap();
        for j in 0..6 {
            assert!(
                report.max_abs_diff[j] < 1e-8,
                "component {j} differs by {}",
                report.max_abs_diff[j]
            );
        }
        // Cross forms are a fixed reference shape, not exact solutions.
        assert!(report.cross_evaluated);
        assert!(report.max_abs_diff[7] > 1e-2);
    }

    #[test]
    fn adaptive_tracks_fixed_grid() {
        let fixed_cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 3.0,
            sample_stride: 100,
            ..IntegratorConfig::default()
        };
        let adaptive_cfg = IntegratorConfig {
            dt: 0.1,
            method: Method::Rk4Adaptive,
            adapt_tol: 1e-10,
            sample_stride: 1,
            ..fixed_cfg
        };
        let fixed = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &fixed_cfg,
            Model::Simplified,
        )
        .unwrap();
        let adaptive = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &adaptive_cfg,
            Model::Simplified,
        )
        .unwrap();
        assert_eq!(fixed.samples.len(), adaptive.samples.len());
        for ((t1, s1), (t2, s2)) in fixed.samples.iter().zip(&adaptive.samples) {
            assert!((t1 - t2).abs() < 1e-12);
            for (a, b) in s1.to_vec().iter().zip(s2.to_vec()) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn oversized_step_diverges() {
        let cfg = IntegratorConfig {
            dt: 1.0,
            t_end: 100.0,
            sample_stride: 1,
            ..IntegratorConfig::default()
        };
        assert!(matches!(
            integrate(
                &demo_state(),
                &demo_osc(),
                &demo_couplings(),
                &cfg,
                Model::Simplified
            ),
            Err(IntegrateError::Diverged { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig {
            dt: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(matches!(
            integrate(
                &demo_state(),
                &demo_osc(),
                &demo_couplings(),
                &bad,
                Model::Simplified
            ),
            Err(IntegrateError::BadConfig { .. })
        ));
        let bad = IntegratorConfig {
            sample_stride: 0,
            ..IntegratorConfig::default()
        };
        assert!(matches!(
            integrate(
                &demo_state(),
                &demo_osc(),
                &demo_couplings(),
                &bad,
                Model::Simplified
            ),
            Err(IntegrateError::BadConfig { .. })
        ));
    }

    #[test]
    fn residual_shrinks_with_spacing() {
        let run = |stride: usize| {
            let cfg = IntegratorConfig {
                dt: 1e-3,
                t_end: 0.5,
                sample_stride: stride,
                ..IntegratorConfig::default()
            };
            let traj = integrate(
                &demo_state(),
                &demo_osc(),
                &demo_couplings(),
                &cfg,
                Model::Simplified,
            )
            .unwrap();
            residual_check(&traj, &demo_osc(), &demo_couplings(), Model::Simplified).unwrap()
        };
        let coarse = run(20);
        let fine = run(5);
        assert!(coarse < 1e-2);
        assert!(fine < coarse / 8.0, "coarse {coarse}, fine {fine}");
    }

    #[test]
    fn residual_check_input_validation() {
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 0.002,
            sample_stride: 10,
            ..IntegratorConfig::default()
        };
        let short = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        assert!(matches!(
            residual_check(&short, &demo_osc(), &demo_couplings(), Model::Simplified),
            Err(ResidualError::TooFewSamples { got: 2 })
        ));

        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 0.0105,
            sample_stride: 3,
            ..IntegratorConfig::default()
        };
        let uneven = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        assert!(matches!(
            residual_check(&uneven, &demo_osc(), &demo_couplings(), Model::Simplified),
            Err(ResidualError::NonuniformSpacing { .. })
        ));
    }

    #[test]
    fn comparison_rejects_mismatched_runs() {
        let cfg = IntegratorConfig {
            dt: 1e-2,
            t_end: 1.0,
            sample_stride: 10,
            ..IntegratorConfig::default()
        };
        let traj = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        let mut other = demo_couplings();
        other.h11 = 2.0;
        let p = ClosedFormParams::new(demo_osc(), &other, demo_init()).unwrap();
        assert!(matches!(
            compare_closed_form(&traj, &p),
            Err(CompareError::ParamMismatch { what: "couplings" })
        ));

        let general = integrate(
            &demo_state(),
            &demo_osc(),
            &demo_couplings(),
            &cfg,
            Model::General,
        )
        .unwrap();
        let p = ClosedFormParams::new(demo_osc(), &demo_couplings(), demo_init()).unwrap();
        assert!(matches!(
            compare_closed_form(&general, &p),
            Err(CompareError::ModelMismatch)
        ));

        let other_init = SimonParams {
            a12: 0.0,
            b12: 0.0,
            ..demo_init()
        };
        let p = ClosedFormParams::new(demo_osc(), &demo_couplings(), other_init).unwrap();
        assert!(matches!(
            compare_closed_form(&traj, &p),
            Err(CompareError::ParamMismatch {
                what: "initial state"
            })
        ));
    }

    #[test]
    fn equal_frequencies_skip_cross_comparison() {
        let osc = OscillatorParams {
            omega_b: 1.0,
            ..demo_osc()
        };
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 1.0,
            sample_stride: 100,
            ..IntegratorConfig::default()
        };
        let traj = integrate(
            &demo_state(),
            &osc,
            &demo_couplings(),
            &cfg,
            Model::Simplified,
        )
        .unwrap();
        let p = ClosedFormParams::new(osc, &demo_couplings(), demo_init()).unwrap();
        let report = compare_closed_form(&traj, &p).unwrap();
        assert!(!report.cross_evaluated);
        for j in 0..6 {
            assert!(report.max_abs_diff[j] < 1e-8);
        }
        for j in 6..10 {
            assert!(report.max_abs_diff[j].is_nan());
        }
    }
}
