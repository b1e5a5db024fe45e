//! Browser demo of the oscillator-pair covariance dynamics.
//!
//! The chart builders are plain Rust returning SVG strings, so the crate
//! compiles and tests natively. The wasm-bindgen exports are gated to the
//! wasm32 target and only forward scalar slider values to the builders.

// `!(x > 0)` checks are deliberate: NaN must take the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use covpair::svg::{heatmap, line_chart, ChartConfig, HeatmapConfig, Series};
use covpair::{
    entanglement_test, entanglement_windows, format_sig, integrate, stationary_state,
    to_covariance_state, CovarianceState, IntegratorConfig, LindbladCouplings, Model,
    OscillatorParams, SimonParams, Subsystem, Trajectory,
};

/// Hysteresis half-width for window detection, matching the CLI and the
/// bundled figure outputs.
const WINDOW_HYSTERESIS: f64 = 1e-8;

/// Longest dimensionless time span a single page interaction may request.
const MAX_SPAN: f64 = 100.0;

/// Phase-space cells per heatmap axis.
const WIGNER_CELLS: usize = 61;

/// Slider-facing knobs. The coupling family is the bundled demo set with the
/// second frequency, a common scale on the damping (imaginary) parts, and the
/// real cross drive left adjustable. The first oscillator's frequency and the
/// overall rate are fixed at 1, so `t_end` is directly the dimensionless time.
#[derive(Debug, Clone, Copy)]
pub struct DemoKnobs {
    pub omega_b: f64,
    /// Scale on the imaginary parts of the intra-oscillator couplings.
    pub damping: f64,
    /// Real part of the cross coupling.
    pub drive: f64,
    /// Initial cross covariance of the positions.
    pub a12: f64,
    /// Initial cross covariance of the momenta.
    pub b12: f64,
    pub t_end: f64,
}

impl Default for DemoKnobs {
    fn default() -> Self {
        DemoKnobs {
            omega_b: 3.0,
            damping: 1.0,
            drive: 1.0,
            a12: 0.0,
            b12: 0.0,
            t_end: 15.0,
        }
    }
}

fn check(name: &str, value: f64, lo: f64, hi: f64) -> Result<(), String> {
    if !value.is_finite() || value < lo || value > hi {
        return Err(format!("{name} = {value} outside [{lo}, {hi}]"));
    }
    Ok(())
}

fn check_knobs(k: &DemoKnobs) -> Result<(), String> {
    check("omega_b", k.omega_b, 0.05, 20.0)?;
    check("damping", k.damping, 0.0, 10.0)?;
    check("drive", k.drive, -10.0, 10.0)?;
    check("a12", k.a12, -2.0, 2.0)?;
    check("b12", k.b12, -2.0, 2.0)?;
    check("t_end", k.t_end, 1e-6, MAX_SPAN)
}

fn oscillator(k: &DemoKnobs) -> OscillatorParams {
    OscillatorParams {
        omega_a: 1.0,
        omega_b: k.omega_b,
        lambda: 1.0,
    }
}

fn couplings(k: &DemoKnobs) -> LindbladCouplings {
    LindbladCouplings {
        h11: 1.0,
        h22: 2.0,
        h33: 1.0,
        h44: 4.0,
        h12: [k.drive, 0.0],
        h13: [1.0, 0.125 * k.damping],
        h24: [1.0, 0.375 * k.damping],
        h14: [0.0; 2],
        h23: [0.0; 2],
        h34: [0.0; 2],
    }
}

fn initial(k: &DemoKnobs) -> SimonParams {
    SimonParams {
        a1: 0.5,
        b1: 0.5,
        a2: 0.5,
        b2: 0.5,
        a12: k.a12,
        b12: k.b12,
    }
}

/// Step size fixed, stride chosen to keep roughly a thousand chart points.
fn integrator_for(t_end: f64) -> IntegratorConfig {
    let dt = 1e-3;
    let steps = (t_end / dt).ceil() as usize;
    IntegratorConfig {
        dt,
        t_end,
        sample_stride: (steps / 1200).max(1),
        ..IntegratorConfig::default()
    }
}

fn run(k: &DemoKnobs) -> Result<Trajectory, String> {
    check_knobs(k)?;
    let state = to_covariance_state(&initial(k)).map_err(|e| e.to_string())?;
    integrate(
        &state,
        &oscillator(k),
        &couplings(k),
        &integrator_for(k.t_end),
        Model::Simplified,
    )
    .map_err(|e| e.to_string())
}

/// Cross-block determinant over time with the entanglement windows shaded
/// and the long-time classification in the subtitle.
pub fn determinant_chart_svg(k: &DemoKnobs) -> Result<String, String> {
    let traj = run(k)?;
    let windows = entanglement_windows(&traj, WINDOW_HYSTERESIS);
    let subtitle = match stationary_state(&oscillator(k), &couplings(k), Model::Simplified) {
        Ok(s) => {
            let ent = entanglement_test(&s);
            format!(
                "long-time det_cs = {} ({}); {} entanglement window(s)",
                format_sig(ent.det_cs, 6),
                if ent.entangled {
                    "entangled"
                } else {
                    "separable"
                },
                windows.intervals.len()
            )
        }
        Err(_) => format!(
            "no stationary state (undamped); {} entanglement window(s)",
            windows.intervals.len()
        ),
    };
    let points: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .map(|(tau, s)| (*tau, s.det_cs()))
        .collect();
    Ok(line_chart(
        &ChartConfig {
            title: "cross-block determinant".into(),
            subtitle,
            x_label: "tau".into(),
            y_label: "det_cs".into(),
            shaded: windows.intervals.clone(),
            zero_line: true,
            ..ChartConfig::default()
        },
        &[Series {
            label: "det_cs".into(),
            points,
        }],
    ))
}

/// Squared decoherence lengths of both oscillators over time.
pub fn decoherence_chart_svg(k: &DemoKnobs) -> Result<String, String> {
    let traj = run(k)?;
    let metrics = traj
        .metrics
        .as_ref()
        .ok_or("a subsystem block degenerated during the run; no decoherence metrics")?;
    let taus = traj.samples.iter().map(|(tau, _)| *tau);
    let series = [
        Series {
            label: "d_decoh_A_sq".into(),
            points: taus
                .clone()
                .zip(metrics.iter().map(|m| m.d_decoh_a_sq))
                .collect(),
        },
        Series {
            label: "d_decoh_B_sq".into(),
            points: taus.zip(metrics.iter().map(|m| m.d_decoh_b_sq)).collect(),
        },
    ];
    let last = metrics.last().expect("trajectory is never empty");
    Ok(line_chart(
        &ChartConfig {
            title: "squared decoherence lengths".into(),
            subtitle: format!(
                "final d_decoh_A_sq = {}, d_decoh_B_sq = {}",
                format_sig(last.d_decoh_a_sq, 6),
                format_sig(last.d_decoh_b_sq, 6)
            ),
            x_label: "tau".into(),
            y_label: "squared length".into(),
            ..ChartConfig::default()
        },
        &series,
    ))
}

fn subsystem_from(which: &str) -> Result<Subsystem, String> {
    match which {
        "a" | "A" => Ok(Subsystem::A),
        "b" | "B" => Ok(Subsystem::B),
        _ => Err(format!(
            "unknown subsystem {which:?} (expected \"a\" or \"b\")"
        )),
    }
}

fn state_at(k: &DemoKnobs, tau: f64) -> Result<CovarianceState, String> {
    if tau == 0.0 {
        check_knobs(k)?;
        return to_covariance_state(&initial(k)).map_err(|e| e.to_string());
    }
    let mut snapshot = *k;
    snapshot.t_end = tau;
    let traj = run(&snapshot)?;
    Ok(traj.samples.last().expect("trajectory is never empty").1)
}

/// Reduced Wigner function of one oscillator at a single time, rendered as a
/// heatmap over the square `[-half_width, half_width]^2` in phase space.
pub fn wigner_snapshot_svg(
    k: &DemoKnobs,
    tau: f64,
    which: &str,
    half_width: f64,
) -> Result<String, String> {
    check("tau", tau, 0.0, MAX_SPAN)?;
    check("half_width", half_width, 0.1, 20.0)?;
    let sub = subsystem_from(which)?;
    let state = state_at(k, tau)?;

    let m = state.subsystem_block(sub);
    let (pos, cross, mom) = (m[0][0], m[0][1], m[1][1]);
    let det = pos * mom - cross * cross;
    if !(det > 0.0) || pos <= 0.0 {
        return Err(format!(
            "reduced covariance block is not positive definite at tau = {} (det = {})",
            format_sig(tau, 6),
            format_sig(det, 6)
        ));
    }

    let norm = 1.0 / (2.0 * std::f64::consts::PI * det.sqrt());
    let cell = 2.0 * half_width / WIGNER_CELLS as f64;
    let mut grid = Vec::with_capacity(WIGNER_CELLS);
    for j in 0..WIGNER_CELLS {
        let p = -half_width + (j as f64 + 0.5) * cell;
        let mut row = Vec::with_capacity(WIGNER_CELLS);
        for i in 0..WIGNER_CELLS {
            let r = -half_width + (i as f64 + 0.5) * cell;
            let quad = (mom * r * r - 2.0 * cross * r * p + pos * p * p) / det;
            row.push(norm * (-0.5 * quad).exp());
        }
        grid.push(row);
    }

    let (name, x_label, y_label) = match sub {
        Subsystem::A => ("A", "R1", "p1"),
        Subsystem::B => ("B", "R2", "p2"),
    };
    Ok(heatmap(
        &HeatmapConfig {
            title: format!(
                "subsystem {name} reduced Wigner function at tau = {}",
                format_sig(tau, 6)
            ),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..HeatmapConfig::default()
        },
        (-half_width, half_width, -half_width, half_width),
        &grid,
    ))
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn knobs(
        omega_b: f64,
        damping: f64,
        drive: f64,
        a12: f64,
        b12: f64,
        t_end: f64,
    ) -> super::DemoKnobs {
        super::DemoKnobs {
            omega_b,
            damping,
            drive,
            a12,
            b12,
            t_end,
        }
    }

    #[wasm_bindgen]
    pub fn determinant_chart(
        omega_b: f64,
        damping: f64,
        drive: f64,
        a12: f64,
        b12: f64,
        t_end: f64,
    ) -> Result<String, JsError> {
        super::determinant_chart_svg(&knobs(omega_b, damping, drive, a12, b12, t_end))
            .map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn decoherence_chart(
        omega_b: f64,
        damping: f64,
        drive: f64,
        a12: f64,
        b12: f64,
        t_end: f64,
    ) -> Result<String, JsError> {
        super::decoherence_chart_svg(&knobs(omega_b, damping, drive, a12, b12, t_end))
            .map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn wigner_snapshot(
        omega_b: f64,
        damping: f64,
        drive: f64,
        a12: f64,
        b12: f64,
        tau: f64,
        which: String,
        half_width: f64,
    ) -> Result<String, JsError> {
        let k = knobs(omega_b, damping, drive, a12, b12, tau.max(1.0));
        super::wigner_snapshot_svg(&k, tau, &which, half_width).map_err(|e| JsError::new(&e))
    }
}
