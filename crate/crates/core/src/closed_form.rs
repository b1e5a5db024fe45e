//! Fixed reference closed-form trajectories for the reduced model with a
//! diagonal-form initial state.
//!
//! The two single-oscillator blocks are exact solutions of the reduced
//! equations of motion. The cross-block expressions are kept in their fixed
//! reference form: they reproduce the initial values and the correct decay
//! rate, and their long-time constants are exact for the momentum cross
//! moment, but they are not exact solutions at intermediate times. The
//! comparison tooling reports the resulting deviations instead of hiding
//! them.

use thiserror::Error;

use crate::lindblad::{
    require_simplified, DampingRates, DynamicsError, LindbladCouplings, OscillatorParams,
};
use crate::simon::{SimonError, SimonParams};

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("cross-block forms are singular at equal frequencies (r = 1)")]
    EqualFrequencies,
    #[error("no asymptote: combined damping rate {gamma} is not positive")]
    NoAsymptote { gamma: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParams { name: &'static str, value: f64 },
    #[error(transparent)]
    Model(#[from] DynamicsError),
    #[error(transparent)]
    Init(#[from] SimonError),
}

/// Long-time verdict from the sign of the asymptotic cross-block determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Entangled,
    Unentangled,
}

/// Parameters of the closed-form trajectories: reduced-model couplings plus
/// a diagonal-form initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormParams {
    pub osc: OscillatorParams,
    pub rates: DampingRates,
    pub h11: f64,
    pub h33: f64,
    pub h13r: f64,
    pub h22: f64,
    pub h44: f64,
    pub h24r: f64,
    pub h12r: f64,
    pub init: SimonParams,
}

impl ClosedFormParams {
    /// Validates the reduced-model restriction and the initial state, then
    /// captures the scalar couplings the closed forms depend on.
    pub fn new(
        osc: OscillatorParams,
        h: &LindbladCouplings,
        init: SimonParams,
    ) -> Result<Self, ClosedFormError> {
        require_simplified(h)?;
        for (name, value) in [
            ("omega_a", osc.omega_a),
            ("omega_b", osc.omega_b),
            ("lambda", osc.lambda),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ClosedFormError::InvalidParams { name, value });
            }
        }
        crate::simon::to_covariance_state(&init)?;
        Ok(ClosedFormParams {
            osc,
            rates: DampingRates::from_couplings(&osc, h),
            h11: h.h11,
            h33: h.h33,
            h13r: h.h13r(),
            h22: h.h22,
            h44: h.h44,
            h24r: h.h24r(),
            h12r: h.h12r(),
            init,
        })
    }
}

/// `(1 - exp(-x)) / x`, continuous at 0.
fn phi(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -f64::exp_m1(-x) / x
    }
}

/// Exact single-oscillator block: `(momentum, cross, position)` variances at
/// phase `theta = tau * omega / lambda` under damping rate `gamma`.
#[allow(clippy::too_many_arguments)]
fn osc_block(
    theta: f64,
    gamma: f64,
    omega: f64,
    h_mom: f64,
    h_pos: f64,
    h_cross: f64,
    m0: f64,
    p0: f64,
) -> (f64, f64, f64) {
    let e = (-gamma * theta).exp();
    let c2 = (2.0 * theta).cos();
    let s2 = (2.0 * theta).sin();
    let g4 = gamma * gamma + 4.0;
    // (1 - e) / gamma, regular as gamma -> 0.
    let em1 = theta * phi(gamma * theta);
    let qm = h_mom / omega;
    let qp = h_pos / omega;
    let qc = h_cross / omega;

    let a = 0.5 * m0 * e * (1.0 + c2)
        + 0.5 * p0 * e * (1.0 - c2)
        + qm / g4 * (gamma * (1.0 - 0.5 * e * (1.0 + c2)) + 2.0 * em1 + e * s2)
        + qp / (2.0 * g4) * (-gamma * e * (1.0 - c2) + 4.0 * em1 - 2.0 * e * s2)
        + qc / g4 * (2.0 * (1.0 - e * c2) - gamma * e * s2);

    let b = 0.5 * (m0 - p0) * e * s2 + (qm - qp) / g4 * (1.0 - e * (c2 + 0.5 * gamma * s2))
        - qc / g4 * (gamma * (1.0 - e * c2) + 2.0 * e * s2);

    let c = 0.5 * p0 * e * (1.0 + c2)
        + 0.5 * m0 * e * (1.0 - c2)
        + qp / (2.0 * g4) * (gamma * (1.0 - e * c2) + g4 * em1 + 2.0 * e * s2)
        + qm / (2.0 * g4) * (-gamma * e * (1.0 - c2) + 4.0 * em1 - 2.0 * e * s2)
        - qc / g4 * (2.0 * (1.0 - e * c2) - gamma * e * s2);

    (a, b, c)
}

/// First-oscillator block `(A11, B11, C11)` at time `tau`.
pub fn a_block(tau: f64, p: &ClosedFormParams) -> (f64, f64, f64) {
    osc_block(
        tau * p.osc.omega_a / p.osc.lambda,
        p.rates.gamma_a,
        p.osc.omega_a,
        p.h11,
        p.h33,
        p.h13r,
        p.init.b1,
        p.init.a1,
    )
}

/// Second-oscillator block `(A22, B22, C22)` at time `tau`.
pub fn b_block(tau: f64, p: &ClosedFormParams) -> (f64, f64, f64) {
    osc_block(
        tau * p.osc.omega_b / p.osc.lambda,
        p.rates.gamma_b,
        p.osc.omega_b,
        p.h22,
        p.h44,
        p.h24r,
        p.init.b2,
        p.init.a2,
    )
}

/// Cross block `(A12, B12, B21, C12)` at time `tau` in the fixed reference
/// form. Unavailable at equal frequencies, where the `1/(1 - r)` factors
/// blow up.
pub fn cross_block(
    tau: f64,
    p: &ClosedFormParams,
) -> Result<(f64, f64, f64, f64), ClosedFormError> {
    let r = p.osc.r();
    if r == 1.0 {
        return Err(ClosedFormError::EqualFrequencies);
    }
    let gamma = p.rates.gamma;
    let theta = tau * p.osc.omega_a / p.osc.lambda;
    let e = (-gamma * theta).exp();
    let k = p.h12r / p.osc.omega_a;
    let (a12, b12) = (p.init.a12, p.init.b12);

    let (sp, cp) = ((1.0 + r) * theta).sin_cos();
    let (sm, cm) = ((1.0 - r) * theta).sin_cos();
    let g2 = gamma * gamma;
    let dp = g2 + (1.0 + r) * (1.0 + r);
    let dm = g2 + (1.0 - r) * (1.0 - r);
    let d = dp * dm;
    let (st, ct) = theta.sin_cos();
    let (srt, crt) = (r * theta).sin_cos();

    let a = b12 * e * ct * crt + a12 * e * st * srt + k * gamma * (g2 + 1.0 + r * r) / d
        - k * (gamma * e / 2.0) * (cp / dp + cm / dm)
        + k * (e / 2.0) * ((1.0 + r) * sp / dp - (1.0 - r) * sm / dm);

    let b_ab = (b12 * e / 4.0) * (sp + sm)
        - (a12 * e / 2.0) * (3.0 * sp / (1.0 + r) + sm / (1.0 - r))
        + k * (g2 + 1.0 + r * r - r) / d
        - k * (3.0 * e / (4.0 * (1.0 + r) * dp)) * (gamma * sp + (1.0 + r) * cp)
        - k * (e / (4.0 * (1.0 - r) * dm)) * (gamma * sm + (1.0 - r) * cm);

    let b_ba = (b12 * e / (4.0 * (1.0 + r)))
        * ((2.0 + r) * sp / (1.0 + r) + (2.0 - r) * sm / (1.0 - r))
        - (a12 * e / 2.0) * (sp + sm)
        + k * (g2 + 1.0) / d
        - k * ((2.0 + r) * e / (4.0 * (1.0 + r) * dp)) * (-gamma * sp + (1.0 + r) * cp)
        - k * ((2.0 - r) * e / (4.0 * (1.0 - r) * dm)) * (-gamma * sm + (1.0 - r) * cm);

    let c = a12 * e * ct * crt
        + b12 * e * st * srt
        + k * gamma * r / d
        + k * (e / (4.0 * dp)) * (gamma * cp - (1.0 + r) * sp)
        - k * (e / (4.0 * dm)) * (gamma * cm - (1.0 - r) * sm);

    Ok((a, b_ab, b_ba, c))
}

/// Long-time constants `(A12, B12, B21, C12)` of the cross-block forms.
/// Requires positive combined damping; remains valid at equal frequencies.
pub fn cross_block_asymptotic(
    p: &ClosedFormParams,
) -> Result<(f64, f64, f64, f64), ClosedFormError> {
    let gamma = p.rates.gamma;
    if gamma <= 0.0 {
        return Err(ClosedFormError::NoAsymptote { gamma });
    }
    let r = p.osc.r();
    let k = p.h12r / p.osc.omega_a;
    let g2 = gamma * gamma;
    let dp = g2 + (1.0 + r) * (1.0 + r);
    let dm = g2 + (1.0 - r) * (1.0 - r);
    let d = dp * dm;
    Ok((
        k * gamma * (g2 + 1.0 + r * r) / d,
        k * (g2 + 1.0 + r * r - r) / d,
        k * (g2 + 1.0) / d,
        k * gamma * r / d,
    ))
}

/// Determinant of the asymptotic cross block and the entanglement verdict
/// its sign implies.
pub fn det_cs_asymptotic(p: &ClosedFormParams) -> Result<(f64, Classification), ClosedFormError> {
    let (a12, b12, b21, c12) = cross_block_asymptotic(p)?;
    let det = c12 * a12 - b12 * b21;
    let class = if det < 0.0 {
        Classification::Entangled
    } else {
        Classification::Unentangled
    };
    Ok((det, class))
}
