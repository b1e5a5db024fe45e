//! Extraction of entanglement windows from a sampled trajectory.
//!
//! The cross-block determinant classifies each sample: negative means
//! entangled. A small hysteresis band around zero suppresses chatter from
//! numerical noise; samples inside the band never change the current
//! classification.

use crate::integrator::Trajectory;

/// Closed intervals of `tau` with a negative cross-block determinant, plus
/// the interpolated zero crossings between classifications.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntanglementWindows {
    pub intervals: Vec<(f64, f64)>,
    pub crossing_taus: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    Unknown,
    Entangled,
    Separable,
}

/// Linear zero crossing between the last adjacent sample pair at or before
/// index `i` whose determinants straddle zero, clamped into that pair's
/// interval.
fn last_sign_change(taus: &[f64], dets: &[f64], i: usize) -> f64 {
    for k in (1..=i).rev() {
        let (d0, d1) = (dets[k - 1], dets[k]);
        if d0.is_finite() && d1.is_finite() && (d0 < 0.0) != (d1 < 0.0) {
            let (t0, t1) = (taus[k - 1], taus[k]);
            let t = t0 + (t1 - t0) * (-d0) / (d1 - d0);
            return t.clamp(t0.min(t1), t0.max(t1));
        }
    }
    taus[i]
}

/// Scans the trajectory's cross-block determinant. A window opens at the
/// trajectory start when the first decisive sample is negative, at the
/// interpolated crossing otherwise, and a window still open at the final
/// sample closes there. `hysteresis` sets the half-width of the dead band.
pub fn entanglement_windows(traj: &Trajectory, hysteresis: f64) -> EntanglementWindows {
    let hyst = hysteresis.abs();
    let taus: Vec<f64> = traj.samples.iter().map(|(t, _)| *t).collect();
    let dets: Vec<f64> = match &traj.metrics {
        Some(m) => m.iter().map(|s| s.det_cs).collect(),
        None => traj.samples.iter().map(|(_, s)| s.det_cs()).collect(),
    };

    let mut out = EntanglementWindows::default();
    let mut class = Class::Unknown;
    let mut open_at: Option<f64> = None;

    for i in 0..dets.len() {
        let d = dets[i];
        if !d.is_finite() || d.abs() <= hyst {
            continue;
        }
        let decided = if d < 0.0 {
            Class::Entangled
        } else {
            Class::Separable
        };
        match (class, decided) {
            (Class::Unknown, Class::Entangled) => {
                open_at = Some(taus[0]);
            }
            (Class::Unknown, Class::Separable) => {}
            (Class::Separable, Class::Entangled) => {
                let t = last_sign_change(&taus, &dets, i);
                out.crossing_taus.push(t);
                open_at = Some(t);
            }
            (Class::Entangled, Class::Separable) => {
                let t = last_sign_change(&taus, &dets, i);
                out.crossing_taus.push(t);
                if let Some(start) = open_at.take() {
                    out.intervals.push((start, t));
                }
            }
            _ => {}
        }
        class = decided;
    }
    if let (Some(start), Some(end)) = (open_at, taus.last()) {
        out.intervals.push((start, *end));
    }
    out
}
