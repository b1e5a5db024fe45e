//! Parameter sweeps over a base run configuration.
//!
//! Each sweep row re-runs the trajectory with one parameter replaced and
//! reports the end-of-run cross determinant next to the two analytic
//! stationary routes, flagging rows where the routes disagree.

use std::thread;

use thiserror::Error;

use crate::closed_form::{det_cs_asymptotic, ClosedFormParams};
use crate::config::{validate_config, ConfigError, RunConfig};
use crate::csvio::emit_csv;
use crate::integrator::{integrate, IntegrateError};
use crate::lindblad::stationary_state;
use crate::simon::to_covariance_state;
use crate::windows::entanglement_windows;

/// Relative tolerance above which the stationary and asymptotic routes are
/// reported as inconsistent.
pub const ROUTE_TOL: f64 = 1e-6;

pub(crate) const WINDOW_HYSTERESIS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Dotted path of the swept parameter, e.g. `couplings.h12r`.
    pub param_path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep needs at least one value")]
    Empty,
    #[error("sweep value {value} for {path:?} is not finite")]
    NonFinite { path: String, value: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("integration failed at {path} = {value}: {source}")]
    Integrate {
        path: String,
        value: f64,
        source: IntegrateError,
    },
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub csv: String,
}

/// Writes `value` into the configuration field named by `path`. The virtual
/// path `oscillator.r` sets the frequency ratio by scaling `omega_b`.
pub fn set_param(cfg: &mut RunConfig, path: &str, value: f64) -> Result<(), ConfigError> {
    let slot: &mut f64 = match path {
        "oscillator.omega_a" => &mut cfg.oscillator.omega_a,
        "oscillator.omega_b" => &mut cfg.oscillator.omega_b,
        "oscillator.lambda" => &mut cfg.oscillator.lambda,
        "oscillator.r" => {
            cfg.oscillator.omega_b = value * cfg.oscillator.omega_a;
            return Ok(());
        }
        "couplings.h11" => &mut cfg.couplings.h11,
        "couplings.h22" => &mut cfg.couplings.h22,
        "couplings.h33" => &mut cfg.couplings.h33,
        "couplings.h44" => &mut cfg.couplings.h44,
        "couplings.h12r" => &mut cfg.couplings.h12[0],
        "couplings.h12i" => &mut cfg.couplings.h12[1],
        "couplings.h13r" => &mut cfg.couplings.h13[0],
        "couplings.h13i" => &mut cfg.couplings.h13[1],
        "couplings.h14r" => &mut cfg.couplings.h14[0],
        "couplings.h14i" => &mut cfg.couplings.h14[1],
        "couplings.h23r" => &mut cfg.couplings.h23[0],
        "couplings.h23i" => &mut cfg.couplings.h23[1],
        "couplings.h24r" => &mut cfg.couplings.h24[0],
        "couplings.h24i" => &mut cfg.couplings.h24[1],
        "couplings.h34r" => &mut cfg.couplings.h34[0],
        "couplings.h34i" => &mut cfg.couplings.h34[1],
        "initial.a1" => &mut cfg.initial.a1,
        "initial.b1" => &mut cfg.initial.b1,
        "initial.a2" => &mut cfg.initial.a2,
        "initial.b2" => &mut cfg.initial.b2,
        "initial.a12" => &mut cfg.initial.a12,
        "initial.b12" => &mut cfg.initial.b12,
        "integrator.dt" => &mut cfg.integrator.dt,
        "integrator.t_end" => &mut cfg.integrator.t_end,
        "integrator.adapt_tol" => &mut cfg.integrator.adapt_tol,
        _ => {
            return Err(ConfigError::UnknownParamPath {
                path: path.to_string(),
            })
        }
    };
    *slot = value;
    Ok(())
}

fn routes_inconsistent(a: f64, b: f64) -> bool {
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() > ROUTE_TOL * 1.0_f64.max(a.abs()).max(b.abs())
}

fn sweep_row(base: &RunConfig, path: &str, value: f64) -> Result<[f64; 6], SweepError> {
    let mut cfg = base.clone();
    set_param(&mut cfg, path, value)?;
    validate_config(&cfg)?;

    let initial = to_covariance_state(&cfg.initial).map_err(|e| ConfigError::Invalid {
        what: e.to_string(),
    })?;
    let traj = integrate(
        &initial,
        &cfg.oscillator,
        &cfg.couplings,
        &cfg.integrator,
        cfg.model,
    )
    .map_err(|source| SweepError::Integrate {
        path: path.to_string(),
        value,
        source,
    })?;
    let det_end = traj.samples.last().map_or(f64::NAN, |(_, s)| s.det_cs());
    let windows = entanglement_windows(&traj, WINDOW_HYSTERESIS);

    let det_stationary = stationary_state(&cfg.oscillator, &cfg.couplings, cfg.model)
        .map_or(f64::NAN, |s| s.det_cs());
    let det_asymptotic = ClosedFormParams::new(cfg.oscillator, &cfg.couplings, cfg.initial)
        .and_then(|p| det_cs_asymptotic(&p))
        .map_or(f64::NAN, |(det, _)| det);

    let inconsistent = if routes_inconsistent(det_stationary, det_asymptotic) {
        1.0
    } else {
        0.0
    };
    Ok([
        value,
        det_end,
        det_stationary,
        det_asymptotic,
        windows.intervals.len() as f64,
        inconsistent,
    ])
}

/// Runs the sweep, distributing values over worker threads. Row order always
/// follows `spec.values` and the CSV is byte-stable across runs.
pub fn run_sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    if spec.values.is_empty() {
        return Err(SweepError::Empty);
    }
    for &value in &spec.values {
        if !value.is_finite() {
            return Err(SweepError::NonFinite {
                path: spec.param_path.clone(),
                value,
            });
        }
    }
    // Fail fast on paths that do not exist before spawning any work.
    set_param(&mut cfg.clone(), &spec.param_path, spec.values[0])?;

    let n = spec.values.len();
    let workers = thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(n);
    let chunk_size = n.div_ceil(workers);

    let mut slots: Vec<Option<Result<[f64; 6], SweepError>>> = Vec::new();
    slots.resize_with(n, || None);
    thread::scope(|scope| {
        for (slot_chunk, value_chunk) in slots
            .chunks_mut(chunk_size)
            .zip(spec.values.chunks(chunk_size))
        {
            scope.spawn(move || {
                for (slot, &value) in slot_chunk.iter_mut().zip(value_chunk) {
                    *slot = Some(sweep_row(cfg, &spec.param_path, value));
                }
            });
        }
    });

    let mut rows = Vec::with_capacity(n);
    for slot in slots {
        rows.push(slot.expect("every sweep slot is filled")?);
    }

    let header: Vec<String> = [
        "value",
        "det_cs_end",
        "det_cs_stationary",
        "det_cs_asymptotic",
        "window_count",
        "inconsistent",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.to_vec()).collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv = emit_csv(&header_refs, &rows, cfg.outputs.precision);
    Ok(SweepResult { header, rows, csv })
}
