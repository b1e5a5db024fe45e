//! Two-mode Gaussian covariance state and pointwise phase-space evaluations.
//!
//! Conventions used throughout the crate: the symmetrized second moments are
//! `⟨p_i p_j⟩ = A_ij`, `⟨R_i R_j⟩ = C_ij`, `⟨R_i p_j⟩ = B_ji`, with `A` and `C`
//! symmetric while the cross matrix `B` is not symmetric in general. The
//! characteristic (ambiguity) function of the state is
//! `A(Q, r) = exp(-(rᵀA r + 2 rᵀB Q + QᵀC Q)/2)`, so second derivatives at the
//! origin recover every covariance.

// `!(x > 0)` checks are deliberate: NaN must take the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky, det2, forward_sub, inv2, mul2, trace2, transpose2};

/// Finite-difference tolerance used by the covariance-extraction checks.
pub const COVARIANCE_FD_TOL: f64 = 1e-6;
/// Relative symmetry tolerance enforced on the kernel cross matrix.
pub const KERNEL_SYMMETRY_TOL: f64 = 1e-12;

/// The ten Gaussian covariance coefficients at one dimensionless time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceState {
    /// Dimensionless time `tau = lambda * t`.
    pub tau: f64,
    pub a11: f64,
    pub b11: f64,
    pub c11: f64,
    pub a22: f64,
    pub b22: f64,
    pub c22: f64,
    pub a12: f64,
    pub b12: f64,
    pub b21: f64,
    pub c12: f64,
}

/// Component names in the fixed vector ordering used by solvers and CSV
/// output: `(A11, B11, C11, A22, B22, C22, A12, B12, B21, C12)`.
pub const COMPONENT_NAMES: [&str; 10] = [
    "A11", "B11", "C11", "A22", "B22", "C22", "A12", "B12", "B21", "C12",
];

impl CovarianceState {
    pub fn to_vec(&self) -> [f64; 10] {
        [
            self.a11, self.b11, self.c11, self.a22, self.b22, self.c22, self.a12, self.b12,
            self.b21, self.c12,
        ]
    }

    pub fn from_vec(tau: f64, v: [f64; 10]) -> Self {
        Self {
            tau,
            a11: v[0],
            b11: v[1],
            c11: v[2],
            a22: v[3],
            b22: v[4],
            c22: v[5],
            a12: v[6],
            b12: v[7],
            b21: v[8],
            c12: v[9],
        }
    }

    /// Momentum covariance block `A`.
    pub fn a_mat(&self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a12, self.a22]]
    }

    /// Cross covariance block `B` (rows index momenta in `⟨R_i p_j⟩ = B_ji`).
    pub fn b_mat(&self) -> [[f64; 2]; 2] {
        [[self.b11, self.b12], [self.b21, self.b22]]
    }

    /// Position covariance block `C`.
    pub fn c_mat(&self) -> [[f64; 2]; 2] {
        [[self.c11, self.c12], [self.c12, self.c22]]
    }

    /// Full 4x4 phase-space covariance over `u = (R1, R2, p1, p2)`.
    pub fn sigma(&self) -> [[f64; 4]; 4] {
        let c = self.c_mat();
        let b = self.b_mat();
        let bt = transpose2(b);
        let a = self.a_mat();
        [
            [c[0][0], c[0][1], bt[0][0], bt[0][1]],
            [c[1][0], c[1][1], bt[1][0], bt[1][1]],
            [b[0][0], b[0][1], a[0][0], a[0][1]],
            [b[1][0], b[1][1], a[1][0], a[1][1]],
        ]
    }

    /// Per-oscillator 2x2 covariance block in `(R, p)` order: `A_s` for the
    /// first oscillator, `B_s` for the second.
    pub fn subsystem_block(&self, which: Subsystem) -> [[f64; 2]; 2] {
        match which {
            Subsystem::A => [[self.c11, self.b11], [self.b11, self.a11]],
            Subsystem::B => [[self.c22, self.b22], [self.b22, self.a22]],
        }
    }

    /// Cross block `C_s` coupling `(R1, p1)` to `(R2, p2)`.
    pub fn cross_block(&self) -> [[f64; 2]; 2] {
        [[self.c12, self.b12], [self.b21, self.a12]]
    }

    /// Determinant of the cross block; negative exactly when entangled.
    pub fn det_cs(&self) -> f64 {
        self.c12 * self.a12 - self.b12 * self.b21
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("non-finite covariance entry {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("nonpositive variance {name} = {value}")]
    NonpositiveVariance { name: &'static str, value: f64 },
    #[error("position block is singular or indefinite (det C = {det_c})")]
    SingularPositionBlock { det_c: f64 },
    #[error("phase-space covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("kernel cross matrix asymmetry {skew} exceeds tolerance")]
    AsymmetricKernel { skew: f64 },
    #[error("subsystem {which:?} has nonpositive uncertainty product {omega_sq}")]
    DegenerateSubsystem { which: Subsystem, omega_sq: f64 },
}

/// One named validation check with its outcome.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome list of the soft validity checks.
///
/// Hard failures (non-finite input, nonpositive variances where a kernel is
/// required) surface as errors instead; inequality violations are reported
/// here without aborting, since dynamics driven by an indefinite coupling
/// matrix can transiently break them.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(CheckResult {
            name,
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn require_finite(s: &CovarianceState) -> Result<(), StateError> {
    let v = s.to_vec();
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(StateError::NonFinite {
                name: COMPONENT_NAMES[i],
                value: x,
            });
        }
    }
    if !s.tau.is_finite() {
        return Err(StateError::NonFinite {
            name: "tau",
            value: s.tau,
        });
    }
    Ok(())
}

/// Checks diagonal positivity, both subsystem uncertainty products, and both
/// Schwarz quantities. Non-finite entries are a hard error; everything else
/// is a soft pass/fail entry in the report.
pub fn validate_state(s: &CovarianceState) -> Result<ValidationReport, StateError> {
    require_finite(s)?;
    let mut report = ValidationReport::default();

    let diag = [
        ("A11", s.a11),
        ("A22", s.a22),
        ("C11", s.c11),
        ("C22", s.c22),
    ];
    let positive = diag.iter().all(|&(_, v)| v > 0.0);
    report.push(
        "positive_diagonals",
        positive,
        format!("A11={} A22={} C11={} C22={}", s.a11, s.a22, s.c11, s.c22),
    );

    let omega_a = s.a11 * s.c11 - s.b11 * s.b11;
    let omega_b = s.a22 * s.c22 - s.b22 * s.b22;
    report.push(
        "heisenberg_a",
        omega_a >= 0.25,
        format!("omega_a_sq={omega_a}"),
    );
    report.push(
        "heisenberg_b",
        omega_b >= 0.25,
        format!("omega_b_sq={omega_b}"),
    );

    let k_a = s.c11 * s.c22 - s.c12 * s.c12;
    let k_b = s.a11 * s.a22 - s.a12 * s.a12;
    report.push("schwarz_positions", k_a >= 0.0, format!("k_a={k_a}"));
    report.push("schwarz_momenta", k_b >= 0.0, format!("k_b={k_b}"));

    Ok(report)
}

/// Correlation/decoherence metrics of one oscillator's reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemMetrics {
    /// Uncertainty product `Ω² = A_ii C_ii - B_ii²` (det of the 2x2 block).
    pub omega_sq: f64,
    /// Mixedness parameter `ξ` with `Ω² = (1+ξ)/(4(1-ξ))`, clamped to `[0, 1)`.
    pub xi: f64,
    /// True when the raw `ξ` fell outside `[0, 1)` before clamping,
    /// i.e. `Ω² < 1/4` (transiently possible under indefinite couplings).
    pub xi_clamped: bool,
    /// Correlation length squared: the position variance.
    pub d_corr_sq: f64,
    /// Decoherence length squared: `d_corr_sq / (2 Ω²)`.
    pub d_decoh_sq: f64,
}

pub fn subsystem_metrics(
    s: &CovarianceState,
    which: Subsystem,
) -> Result<SubsystemMetrics, StateError> {
    let (pos_name, pos, mom_name, mom, cross) = match which {
        Subsystem::A => ("C11", s.c11, "A11", s.a11, s.b11),
        Subsystem::B => ("C22", s.c22, "A22", s.a22, s.b22),
    };
    if !(pos > 0.0) {
        return Err(StateError::NonpositiveVariance {
            name: pos_name,
            value: pos,
        });
    }
    if !(mom > 0.0) {
        return Err(StateError::NonpositiveVariance {
            name: mom_name,
            value: mom,
        });
    }
    let omega_sq = mom * pos - cross * cross;
    if omega_sq <= 0.0 {
        return Err(StateError::DegenerateSubsystem { which, omega_sq });
    }
    let raw_xi = (4.0 * omega_sq - 1.0) / (4.0 * omega_sq + 1.0);
    let xi_clamped = raw_xi < 0.0;
    Ok(SubsystemMetrics {
        omega_sq,
        xi: if xi_clamped { 0.0 } else { raw_xi },
        xi_clamped,
        d_corr_sq: pos,
        d_decoh_sq: pos / (2.0 * omega_sq),
    })
}

/// Determinant-based entanglement test for the two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    /// `det A_s`, the first oscillator's uncertainty product.
    pub det_as: f64,
    /// `det B_s`, the second oscillator's uncertainty product.
    pub det_bs: f64,
    /// `det C_s`; negative exactly when the state is entangled.
    pub det_cs: f64,
    /// Schwarz quantity of the position block, `C11 C22 - C12²`.
    pub k_a: f64,
    /// Schwarz quantity of the momentum block, `A11 A22 - A12²`.
    pub k_b: f64,
    /// Left side of the matrix-form Heisenberg inequality
    /// `det A_s det B_s + (1/4 - det C_s)² - tr(A_s J C_s J B_s J C_sᵀ J)`.
    pub heis_lhs: f64,
    /// Right side of the same inequality, `(det A_s + det B_s)/4`.
    pub heis_rhs: f64,
    /// Left side of the separability form, which replaces `det C_s` by its
    /// absolute value; violated by entangled states.
    pub sep_lhs: f64,
    /// Right side of the separability form (same as `heis_rhs`).
    pub sep_rhs: f64,
    pub entangled: bool,
}

const J: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

pub fn entanglement_test(s: &CovarianceState) -> EntanglementReport {
    let a_s = s.subsystem_block(Subsystem::A);
    let b_s = s.subsystem_block(Subsystem::B);
    let c_s = s.cross_block();

    let det_as = det2(a_s);
    let det_bs = det2(b_s);
    let det_cs = det2(c_s);

    // tr(A_s J C_s J B_s J C_sᵀ J)
    let m = mul2(
        mul2(mul2(a_s, J), mul2(c_s, J)),
        mul2(mul2(b_s, J), mul2(transpose2(c_s), J)),
    );
    let trace_term = trace2(m);

    let rhs = 0.25 * (det_as + det_bs);
    let heis_lhs = det_as * det_bs + (0.25 - det_cs) * (0.25 - det_cs) - trace_term;
    let sep_lhs = det_as * det_bs + (0.25 - det_cs.abs()) * (0.25 - det_cs.abs()) - trace_term;

    EntanglementReport {
        det_as,
        det_bs,
        det_cs,
        k_a: s.c11 * s.c22 - s.c12 * s.c12,
        k_b: s.a11 * s.a22 - s.a12 * s.a12,
        heis_lhs,
        heis_rhs: rhs,
        sep_lhs,
        sep_rhs: rhs,
        entangled: det_cs < 0.0,
    }
}

/// Precomputed pieces of the position-representation density kernel
/// `rho(R, r) = norm * exp(-(Rᵀ C⁻¹ R - 2i Rᵀ E r + rᵀ α r)/2)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianKernel {
    pub c_inv: [[f64; 2]; 2],
    /// `E = C⁻¹ Bᵀ`.
    pub e_mat: [[f64; 2]; 2],
    /// `α = A - B C⁻¹ Bᵀ`, symmetric up to rounding.
    pub alpha: [[f64; 2]; 2],
    /// `1 / (2π sqrt(det C))`.
    pub norm: f64,
}

pub fn gaussian_kernel(s: &CovarianceState) -> Result<GaussianKernel, StateError> {
    require_finite(s)?;
    let c = s.c_mat();
    let det_c = det2(c);
    if !(det_c > 0.0) || s.c11 <= 0.0 {
        return Err(StateError::SingularPositionBlock { det_c });
    }
    let c_inv = inv2(c).expect("det checked above");
    let b = s.b_mat();
    let e_mat = mul2(c_inv, transpose2(b));
    let d = mul2(b, e_mat);
    let a = s.a_mat();
    let alpha = [
        [a[0][0] - d[0][0], a[0][1] - d[0][1]],
        [a[1][0] - d[1][0], a[1][1] - d[1][1]],
    ];
    let skew = (alpha[0][1] - alpha[1][0]).abs();
    if skew > KERNEL_SYMMETRY_TOL * alpha[0][1].abs().max(1.0) {
        return Err(StateError::AsymmetricKernel { skew });
    }
    Ok(GaussianKernel {
        c_inv,
        e_mat,
        alpha,
        norm: 1.0 / (2.0 * std::f64::consts::PI * det_c.sqrt()),
    })
}

fn quad2(m: [[f64; 2]; 2], x: [f64; 2], y: [f64; 2]) -> f64 {
    x[0] * (m[0][0] * y[0] + m[0][1] * y[1]) + x[1] * (m[1][0] * y[0] + m[1][1] * y[1])
}

/// Density matrix element at center-of-mass coordinates `rr` and relative
/// coordinates `r`. Hermiticity `rho(R, -r) = conj(rho(R, r))` holds exactly.
pub fn density_matrix_eval(
    s: &CovarianceState,
    rr: [f64; 2],
    r: [f64; 2],
) -> Result<Complex64, StateError> {
    let k = gaussian_kernel(s)?;
    let re = -0.5 * (quad2(k.c_inv, rr, rr) + quad2(k.alpha, r, r));
    let im = quad2(k.e_mat, rr, r);
    Ok(k.norm * Complex64::new(re, im).exp())
}

/// Characteristic (ambiguity) function; equals 1 exactly at the origin.
pub fn ambiguity_eval(s: &CovarianceState, q: [f64; 2], r: [f64; 2]) -> f64 {
    let a = s.a_mat();
    let b = s.b_mat();
    let c = s.c_mat();
    let form = quad2(a, r, r) + 2.0 * quad2(b, r, q) + quad2(c, q, q);
    (-0.5 * form).exp()
}

/// Wigner function at phase-space point `(rr, p)`, normalized so that
/// integrating `f/(2π)²` over all of phase space gives 1.
pub fn wigner_eval(s: &CovarianceState, rr: [f64; 2], p: [f64; 2]) -> Result<f64, StateError> {
    require_finite(s)?;
    let sigma = s.sigma();
    let l = cholesky(sigma).ok_or(StateError::NotPositiveDefinite)?;
    let u = [rr[0], rr[1], p[0], p[1]];
    let z = forward_sub(&l, u);
    let quad: f64 = z.iter().map(|v| v * v).sum();
    let sqrt_det = l[0][0] * l[1][1] * l[2][2] * l[3][3];
    Ok((-0.5 * quad).exp() / sqrt_det)
}

/// Reduced (single-oscillator) density matrix element. The marginal depends
/// only on that oscillator's own covariance block.
pub fn reduced_density_eval(
    s: &CovarianceState,
    which: Subsystem,
    rc: f64,
    r: f64,
) -> Result<Complex64, StateError> {
    require_finite(s)?;
    let (pos_name, pos, mom, cross) = match which {
        Subsystem::A => ("C11", s.c11, s.a11, s.b11),
        Subsystem::B => ("C22", s.c22, s.a22, s.b22),
    };
    if !(pos > 0.0) {
        return Err(StateError::NonpositiveVariance {
            name: pos_name,
            value: pos,
        });
    }
    let omega_sq = mom * pos - cross * cross;
    let inv = 1.0 / (2.0 * pos);
    let re = -inv * (rc * rc + omega_sq * r * r);
    let im = inv * 2.0 * cross * rc * r;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * pos).sqrt();
    Ok(norm * Complex64::new(re, im).exp())
}
