//! Diagonal-covariance (Simon-form) parameterization of the initial state.
//!
//! The pair starts with uncorrelated position/momentum within each oscillator:
//! `⟨x²⟩ = a1`, `⟨p_x²⟩ = b1`, `⟨y²⟩ = a2`, `⟨p_y²⟩ = b2`, plus the two cross
//! moments `⟨xy⟩ = a12` and `⟨p_x p_y⟩ = b12`. All other second moments are
//! zero. This module provides the validity inequalities, the conversion to a
//! full covariance state, the associated length scales, and the position-space
//! density kernels of the parameterized state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{entanglement_test, CovarianceState, Subsystem, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimonParams {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    #[serde(default)]
    pub a12: f64,
    #[serde(default)]
    pub b12: f64,
}

impl SimonParams {
    /// Schwarz quantity of the position sector, `a1 a2 - a12²`.
    pub fn k_a(&self) -> f64 {
        self.a1 * self.a2 - self.a12 * self.a12
    }

    /// Schwarz quantity of the momentum sector, `b1 b2 - b12²`.
    pub fn k_b(&self) -> f64 {
        self.b1 * self.b2 - self.b12 * self.b12
    }
}

#[derive(Debug, Error)]
pub enum SimonError {
    #[error("non-finite parameter {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("nonpositive variance {name} = {value}")]
    NonpositiveVariance { name: &'static str, value: f64 },
    #[error("composite kernel is singular: k_a = {k_a}")]
    SingularComposite { k_a: f64 },
}

fn hard_checks(p: &SimonParams) -> Result<(), SimonError> {
    let named = [
        ("a1", p.a1),
        ("b1", p.b1),
        ("a2", p.a2),
        ("b2", p.b2),
        ("a12", p.a12),
        ("b12", p.b12),
    ];
    for (name, value) in named {
        if !value.is_finite() {
            return Err(SimonError::NonFinite { name, value });
        }
    }
    for (name, value) in &named[..4] {
        if *value <= 0.0 {
            return Err(SimonError::NonpositiveVariance {
                name,
                value: *value,
            });
        }
    }
    Ok(())
}

/// Reports the Schwarz and per-oscillator Heisenberg inequalities, then the
/// matrix-form bipartite inequalities evaluated on the corresponding
/// covariance state. Nonpositive or non-finite variances are hard errors.
pub fn validate_simon(p: &SimonParams) -> Result<ValidationReport, SimonError> {
    hard_checks(p)?;
    let mut report = ValidationReport::default();

    let k_a = p.k_a();
    let k_b = p.k_b();
    report.push("schwarz_a", k_a >= 0.0, format!("k_a={k_a}"));
    report.push("schwarz_b", k_b >= 0.0, format!("k_b={k_b}"));

    let omega_a = p.a1 * p.b1;
    let omega_b = p.a2 * p.b2;
    report.push("heisenberg_a", omega_a >= 0.25, format!("a1*b1={omega_a}"));
    report.push("heisenberg_b", omega_b >= 0.25, format!("a2*b2={omega_b}"));

    let ent = entanglement_test(&to_covariance_state(p)?);
    let slack = |lhs: f64, rhs: f64| 1e-12 * lhs.abs().max(rhs.abs()).max(1.0);
    report.push(
        "bipartite_heisenberg",
        ent.heis_lhs >= ent.heis_rhs - slack(ent.heis_lhs, ent.heis_rhs),
        format!("lhs={} rhs={}", ent.heis_lhs, ent.heis_rhs),
    );
    report.push(
        "bipartite_separability",
        ent.sep_lhs >= ent.sep_rhs - slack(ent.sep_lhs, ent.sep_rhs),
        format!(
            "lhs={} rhs={} det_cs={} (violation indicates entanglement)",
            ent.sep_lhs, ent.sep_rhs, ent.det_cs
        ),
    );
    Ok(report)
}

/// Builds the covariance state at `tau = 0`: momenta take the `b` values,
/// positions the `a` values, and every position-momentum cross moment is 0.
/// Reading the covariance blocks back recovers the parameters exactly.
pub fn to_covariance_state(p: &SimonParams) -> Result<CovarianceState, SimonError> {
    hard_checks(p)?;
    Ok(CovarianceState {
        tau: 0.0,
        a11: p.b1,
        b11: 0.0,
        c11: p.a1,
        a22: p.b2,
        b22: 0.0,
        c22: p.a2,
        a12: p.b12,
        b12: 0.0,
        b21: 0.0,
        c12: p.a12,
    })
}

/// A squared length that may be unbounded (a vanishing denominator means the
/// corresponding Gaussian factor is absent entirely).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthSq {
    Finite(f64),
    Unbounded,
}

impl LengthSq {
    fn from_ratio(num: f64, den: f64) -> Self {
        if den == 0.0 {
            LengthSq::Unbounded
        } else {
            LengthSq::Finite(num / den)
        }
    }

    /// Numeric view with `Unbounded` mapped to `+inf`.
    pub fn as_f64(&self) -> f64 {
        match self {
            LengthSq::Finite(v) => *v,
            LengthSq::Unbounded => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for LengthSq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LengthSq::Finite(v) => write!(f, "{v}"),
            LengthSq::Unbounded => write!(f, "inf"),
        }
    }
}

/// Squared length scales of the parameterized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimonLengths {
    /// Subsystem correlation lengths: the position variances.
    pub corr_a: f64,
    pub corr_b: f64,
    /// Subsystem decoherence lengths `1/(4 b)`.
    pub decoh_a: f64,
    pub decoh_b: f64,
    /// Mixedness lengths `4a/(4Ω² - 1)`; unbounded for a pure state.
    pub mix_a: LengthSq,
    pub mix_b: LengthSq,
    /// Composite correlation lengths `K_A/a2` and `K_A/a1`; never exceed the
    /// subsystem values.
    pub comp_corr_a: f64,
    pub comp_corr_b: f64,
    /// Composite decoherence lengths; identical to the subsystem values.
    pub comp_decoh_a: f64,
    pub comp_decoh_b: f64,
    /// Entanglement lengths `1/b12` and `K_A/a12`; unbounded when the
    /// corresponding cross moment vanishes.
    pub ent_1: LengthSq,
    pub ent_2: LengthSq,
    /// Sides of the scalar bipartite bound `a12 b12 / K_A <= 1/(4K_A) + 2K_B`.
    /// Non-finite when `K_A = 0`.
    pub ineq32_lhs: f64,
    pub ineq32_rhs: f64,
}

pub fn simon_lengths(p: &SimonParams) -> Result<SimonLengths, SimonError> {
    hard_checks(p)?;
    let k_a = p.k_a();
    let k_b = p.k_b();
    Ok(SimonLengths {
        corr_a: p.a1,
        corr_b: p.a2,
        decoh_a: 1.0 / (4.0 * p.b1),
        decoh_b: 1.0 / (4.0 * p.b2),
        mix_a: LengthSq::from_ratio(4.0 * p.a1, 4.0 * p.a1 * p.b1 - 1.0),
        mix_b: LengthSq::from_ratio(4.0 * p.a2, 4.0 * p.a2 * p.b2 - 1.0),
        comp_corr_a: k_a / p.a2,
        comp_corr_b: k_a / p.a1,
        comp_decoh_a: 1.0 / (4.0 * p.b1),
        comp_decoh_b: 1.0 / (4.0 * p.b2),
        ent_1: LengthSq::from_ratio(1.0, p.b12),
        ent_2: LengthSq::from_ratio(k_a, p.a12),
        ineq32_lhs: p.a12 * p.b12 / k_a,
        ineq32_rhs: 1.0 / (4.0 * k_a) + 2.0 * k_b,
    })
}

/// Position-representation matrix element of the composite state at
/// `(x1, y1 | x2, y2)`, with relative coordinates `x = x1 - x2`,
/// `y = y1 - y2` and centers `X = (x1 + x2)/2`, `Y = (y1 + y2)/2`.
/// Requires `K_A > 0`; the reduced kernels below remain available otherwise.
pub fn simon_density_eval(
    p: &SimonParams,
    coords: (f64, f64, f64, f64),
) -> Result<f64, SimonError> {
    hard_checks(p)?;
    let k_a = p.k_a();
    if k_a <= 0.0 {
        return Err(SimonError::SingularComposite { k_a });
    }
    let (x1, y1, x2, y2) = coords;
    let x = x1 - x2;
    let y = y1 - y2;
    let cx = 0.5 * (x1 + x2);
    let cy = 0.5 * (y1 + y2);
    let momentum_part = x * x * p.b1 + 2.0 * x * y * p.b12 + y * y * p.b2;
    let position_part = (cx * cx * p.a2 - 2.0 * cx * cy * p.a12 + cy * cy * p.a1) / k_a;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * k_a.sqrt());
    Ok(norm * (-0.5 * (momentum_part + position_part)).exp())
}

/// Prefactor convention for the reduced kernel of the second oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedForm {
    /// Prefactor chosen so the diagonal integrates to 1.
    TraceNormalized,
    /// Fixed reference form, which uses the momentum variance in the second
    /// oscillator's prefactor and therefore does not integrate to unit trace.
    Reference,
}

/// Reduced single-oscillator kernel at bra/ket positions `(c1, c2)`.
pub fn simon_reduced_eval(
    p: &SimonParams,
    which: Subsystem,
    c1: f64,
    c2: f64,
    form: ReducedForm,
) -> Result<f64, SimonError> {
    hard_checks(p)?;
    let (pos, mom) = match which {
        Subsystem::A => (p.a1, p.b1),
        Subsystem::B => (p.a2, p.b2),
    };
    let plus = mom + 1.0 / (4.0 * pos);
    let minus = mom - 1.0 / (4.0 * pos);
    let exponent = -0.5 * (plus * (c1 * c1 + c2 * c2) - 2.0 * c1 * c2 * minus);
    let pref_var = match (which, form) {
        (Subsystem::B, ReducedForm::Reference) => mom,
        _ => pos,
    };
    Ok(exponent.exp() / (2.0 * std::f64::consts::PI * pref_var).sqrt())
}
