//! Covariance equations of motion for two linearly coupled oscillators with
//! Lindblad dissipation, plus the stationary-state solver and a positivity
//! check on the coupling matrix.
//!
//! All rates are expressed in the dimensionless time `tau = lambda * t`; the
//! right-hand sides below are derivatives with respect to `tau`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{solve, sym_eigenvalues};
use crate::state::CovarianceState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub lambda: f64,
}

impl OscillatorParams {
    /// Frequency ratio `omega_b / omega_a`.
    pub fn r(&self) -> f64 {
        self.omega_b / self.omega_a
    }
}

fn unit_re() -> [f64; 2] {
    [1.0, 0.0]
}

/// Couplings of the dissipator, indexed over (x, y, px, py). Diagonal entries
/// are real; off-diagonal entries are stored as `[re, im]`. The h12 and h24
/// pairs default to `[1, 0]`; everything else defaults to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladCouplings {
    #[serde(default)]
    pub h11: f64,
    #[serde(default)]
    pub h22: f64,
    #[serde(default)]
    pub h33: f64,
    #[serde(default)]
    pub h44: f64,
    #[serde(default = "unit_re")]
    pub h12: [f64; 2],
    #[serde(default)]
    pub h13: [f64; 2],
    #[serde(default)]
    pub h14: [f64; 2],
    #[serde(default)]
    pub h23: [f64; 2],
    #[serde(default = "unit_re")]
    pub h24: [f64; 2],
    #[serde(default)]
    pub h34: [f64; 2],
}

impl Default for LindbladCouplings {
    fn default() -> Self {
        LindbladCouplings {
            h11: 0.0,
            h22: 0.0,
            h33: 0.0,
            h44: 0.0,
            h12: unit_re(),
            h13: [0.0; 2],
            h14: [0.0; 2],
            h23: [0.0; 2],
            h24: unit_re(),
            h34: [0.0; 2],
        }
    }
}

macro_rules! parts {
    ($($field:ident => $re:ident, $im:ident;)*) => {
        impl LindbladCouplings {
            $(
                pub fn $re(&self) -> f64 {
                    self.$field[0]
                }
                pub fn $im(&self) -> f64 {
                    self.$field[1]
                }
            )*
        }
    };
}

parts! {
    h12 => h12r, h12i;
    h13 => h13r, h13i;
    h14 => h14r, h14i;
    h23 => h23r, h23i;
    h24 => h24r, h24i;
    h34 => h34r, h34i;
}

/// Damping rates induced by the imaginary position-momentum couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingRates {
    pub gamma_a: f64,
    pub gamma_b: f64,
    /// Combined rate `(gamma_a + r * gamma_b) / 2`.
    pub gamma: f64,
}

impl DampingRates {
    pub fn from_couplings(osc: &OscillatorParams, h: &LindbladCouplings) -> Self {
        let gamma_a = 2.0 * h.h13i() / osc.omega_a;
        let gamma_b = 2.0 * h.h24i() / osc.omega_b;
        DampingRates {
            gamma_a,
            gamma_b,
            gamma: 0.5 * (gamma_a + osc.r() * gamma_b),
        }
    }
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("coupling {name} = {value} must vanish in the simplified model")]
    ModelViolation { name: &'static str, value: f64 },
    #[error("dynamics admit no stationary state (singular linear system)")]
    NoStationaryState,
}

/// Which right-hand side to use: the full coupling set or the reduced set in
/// which only the diagonals, h12 (real part), h13, and h24 act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    General,
    Simplified,
}

/// Positivity report for the Hermitian coupling matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    /// Eigenvalues sorted ascending.
    pub eigenvalues: [f64; 4],
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

/// Eigenvalue test of the 4x4 Hermitian coupling matrix, computed through the
/// real symmetric 8x8 embedding `[[S, -K], [K, S]]` whose spectrum doubles
/// the Hermitian one. Failure indicates the couplings do not form a valid
/// dissipator; the equations of motion remain integrable regardless.
pub fn psd_check(h: &LindbladCouplings) -> PsdReport {
    let mut re = [[0.0; 4]; 4];
    let mut im = [[0.0; 4]; 4];
    re[0][0] = h.h11;
    re[1][1] = h.h22;
    re[2][2] = h.h33;
    re[3][3] = h.h44;
    let off = [
        (0, 1, h.h12),
        (0, 2, h.h13),
        (0, 3, h.h14),
        (1, 2, h.h23),
        (1, 3, h.h24),
        (2, 3, h.h34),
    ];
    for (j, k, [hr, hi]) in off {
        re[j][k] = hr;
        re[k][j] = hr;
        im[j][k] = hi;
        im[k][j] = -hi;
    }

    let mut m = [[0.0; 8]; 8];
    for j in 0..4 {
        for k in 0..4 {
            m[j][k] = re[j][k];
            m[j + 4][k + 4] = re[j][k];
            m[j][k + 4] = -im[j][k];
            m[j + 4][k] = im[j][k];
        }
    }
    let doubled = sym_eigenvalues(m);
    let mut eigenvalues = [0.0; 4];
    for i in 0..4 {
        eigenvalues[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    }
    let min_eigenvalue = eigenvalues[0];
    let scale = eigenvalues.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    PsdReport {
        eigenvalues,
        min_eigenvalue,
        is_psd: min_eigenvalue >= -1e-12 * scale,
    }
}

/// Full equations of motion. Returns the derivative of the ten covariance
/// components with respect to `tau`, in state-vector order.
pub fn general_rhs(
    s: &CovarianceState,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> [f64; 10] {
    let (wa, wb, lam) = (osc.omega_a, osc.omega_b, osc.lambda);
    let g = h.h13i() + h.h24i();
    let d = [
        // a11
        -2.0 * wa * s.b11
            - 2.0 * h.h13i() * s.a11
            - 2.0 * h.h12i() * s.b12
            - 2.0 * h.h14i() * s.a12
            + h.h11,
        // b11
        wa * s.a11 - wa * s.c11 - 2.0 * h.h13i() * s.b11 + h.h34i() * s.a12
            - 2.0 * h.h23i() * s.b12
            - h.h14i() * s.b21
            - h.h12i() * s.c12
            - h.h13r(),
        // c11
        2.0 * wa * s.b11 - 2.0 * h.h13i() * s.c11 + 2.0 * h.h34i() * s.b21 - 2.0 * h.h23i() * s.c12
            + h.h33,
        // a22
        -2.0 * wb * s.b22 - 2.0 * h.h24i() * s.a22
            + 2.0 * h.h23i() * s.a12
            + 2.0 * h.h12i() * s.b21
            + h.h22,
        // b22
        wb * s.a22 - wb * s.c22 - 2.0 * h.h24i() * s.b22 + h.h34i() * s.a12 + h.h23i() * s.b12
            - h.h14i() * s.b21
            + h.h12i() * s.c12
            - h.h24r(),
        // c22
        2.0 * wb * s.b22 - 2.0 * h.h24i() * s.c22 - 2.0 * h.h34i() * s.b12 - 2.0 * h.h14i() * s.c12
            + h.h44,
        // a12
        -wa * s.b21 - wb * s.b12 - g * s.a12 + h.h23i() * s.a11 - h.h14i() * s.a22
            + h.h12i() * s.b11
            - h.h12i() * s.b22
            + h.h12r(),
        // b12
        wb * s.a12
            - wa * s.c12
            - g * s.b12
            - h.h34i() * s.a11
            - h.h14i() * s.b11
            - h.h14i() * s.b22
            - h.h12i() * s.c22
            - h.h14r(),
        // b21
        wa * s.a12 - wb * s.c12 - g * s.b21 - h.h34i() * s.a22 + h.h23i() * s.b11
            - h.h23i() * s.b22
            - h.h12i() * s.c11
            + h.h23r(),
        // c12
        wa * s.b12 + wb * s.b21 - g * s.c12 - h.h14i() * s.c11 - h.h23i() * s.c22 + h.h34r(),
    ];
    d.map(|v| v / lam)
}

pub(crate) fn require_simplified(h: &LindbladCouplings) -> Result<(), DynamicsError> {
    let must_vanish = [
        ("h12 imaginary part", h.h12i()),
        ("h14 real part", h.h14r()),
        ("h14 imaginary part", h.h14i()),
        ("h23 real part", h.h23r()),
        ("h23 imaginary part", h.h23i()),
        ("h34 real part", h.h34r()),
        ("h34 imaginary part", h.h34i()),
    ];
    for (name, value) in must_vanish {
        if value != 0.0 {
            return Err(DynamicsError::ModelViolation { name, value });
        }
    }
    Ok(())
}

/// Reduced equations of motion: the two oscillators damp independently and
/// couple only through the real h12 drive. Errors if a coupling outside the
/// reduced set is nonzero.
pub fn simplified_rhs(
    s: &CovarianceState,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> Result<[f64; 10], DynamicsError> {
    require_simplified(h)?;
    let (wa, wb, lam) = (osc.omega_a, osc.omega_b, osc.lambda);
    let g = h.h13i() + h.h24i();
    let d = [
        -2.0 * wa * s.b11 - 2.0 * h.h13i() * s.a11 + h.h11,
        wa * s.a11 - wa * s.c11 - 2.0 * h.h13i() * s.b11 - h.h13r(),
        2.0 * wa * s.b11 - 2.0 * h.h13i() * s.c11 + h.h33,
        -2.0 * wb * s.b22 - 2.0 * h.h24i() * s.a22 + h.h22,
        wb * s.a22 - wb * s.c22 - 2.0 * h.h24i() * s.b22 - h.h24r(),
        2.0 * wb * s.b22 - 2.0 * h.h24i() * s.c22 + h.h44,
        -wa * s.b21 - wb * s.b12 - g * s.a12 + h.h12r(),
        wb * s.a12 - wa * s.c12 - g * s.b12,
        wa * s.a12 - wb * s.c12 - g * s.b21,
        wa * s.b12 + wb * s.b21 - g * s.c12,
    ];
    Ok(d.map(|v| v / lam))
}

fn rhs_for(
    model: Model,
    s: &CovarianceState,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> Result<[f64; 10], DynamicsError> {
    match model {
        Model::General => Ok(general_rhs(s, osc, h)),
        Model::Simplified => simplified_rhs(s, osc, h),
    }
}

fn probe_affine(
    model: Model,
    osc: &OscillatorParams,
    h: &LindbladCouplings,
) -> Result<([[f64; 10]; 10], [f64; 10]), DynamicsError> {
    let zero = CovarianceState::from_vec(0.0, [0.0; 10]);
    let c = rhs_for(model, &zero, osc, h)?;
    let mut m = [[0.0; 10]; 10];
    for j in 0..10 {
        let mut e = [0.0; 10];
        e[j] = 1.0;
        let col = rhs_for(model, &CovarianceState::from_vec(0.0, e), osc, h)?;
        for i in 0..10 {
            m[i][j] = col[i] - c[i];
        }
    }
    Ok((m, c))
}

/// Solves the linear stationarity condition for the covariance components.
/// The reduced model splits into two 3x3 single-oscillator blocks and one
/// 4x4 cross block; the full model is solved as a single 10x10 system. A
/// singular system (for example, zero damping) is an error.
pub fn stationary_state(
    osc: &OscillatorParams,
    h: &LindbladCouplings,
    model: Model,
) -> Result<CovarianceState, DynamicsError> {
    let (m, c) = probe_affine(model, osc, h)?;
    let mut x = [0.0; 10];
    match model {
        Model::Simplified => {
            solve_block::<3>(&m, &c, 0, &mut x)?;
            solve_block::<3>(&m, &c, 3, &mut x)?;
            solve_block::<4>(&m, &c, 6, &mut x)?;
        }
        Model::General => {
            let neg_c = c.map(|v| -v);
            x = solve(m, neg_c).ok_or(DynamicsError::NoStationaryState)?;
        }
    }
    Ok(CovarianceState::from_vec(0.0, x))
}

fn solve_block<const N: usize>(
    m: &[[f64; 10]; 10],
    c: &[f64; 10],
    offset: usize,
    x: &mut [f64; 10],
) -> Result<(), DynamicsError> {
    let mut mb = [[0.0; N]; N];
    let mut cb = [0.0; N];
    for i in 0..N {
        cb[i] = -c[offset + i];
        for j in 0..N {
            mb[i][j] = m[offset + i][offset + j];
        }
    }
    let xb = solve(mb, cb).ok_or(DynamicsError::NoStationaryState)?;
    x[offset..offset + N].copy_from_slice(&xb);
    Ok(())
}
