//! Covariance dynamics of a pair of coupled dissipative quantum oscillators.
//!
//! The state of the pair is a zero-mean two-mode Gaussian, fully described by
//! ten second moments (three momentum covariances, three position covariances,
//! four position-momentum cross covariances). Under a Lindblad master equation
//! these moments obey a linear ten-dimensional ODE system. This crate provides:
//!
//! * [`state`]: the covariance state, pointwise evaluation of the density
//!   matrix / characteristic (ambiguity) function / Wigner function, subsystem
//!   correlation and decoherence metrics, and the determinant-based
//!   entanglement test for two-mode Gaussians.
//! * [`simon`]: the diagonal-covariance initial-condition parameterization
//!   (Simon form), its validity inequalities, length scales, and density
//!   kernels.
//! * [`lindblad`]: coupling parameters, the general and reduced ODE right-hand
//!   sides, positivity diagnostics, and stationary-state solves.
//! * [`closed_form`]: the analytic solution of the reduced model, retained in
//!   its fixed reference form, plus the long-time determinant classification.
//! * [`integrator`]: fixed-step RK4 (the normative numerical route), an
//!   adaptive variant for convergence studies, residual checks, and
//!   closed-form comparison.
//! * [`windows`]: detection of time intervals where the cross-covariance
//!   determinant is negative (entanglement windows) with hysteresis.
//! * [`csvio`] / [`svg`]: deterministic numeric formatting, CSV emission and
//!   parsing, and dependency-free SVG charts.
//! * [`config`] / [`figures`] / [`sweep`] / [`compare`]: the run configuration
//!   surface, canned figure reproductions, threaded parameter sweeps, and the
//!   two-route consistency report for the long-time cross block.

pub mod closed_form;
pub mod compare;
pub mod config;
pub mod csvio;
pub mod figures;
pub mod integrator;
pub mod linalg;
pub mod lindblad;
pub mod simon;
pub mod state;
pub mod svg;
pub mod sweep;
pub mod windows;

pub use closed_form::{Classification, ClosedFormError, ClosedFormParams};
pub use compare::{compare_run, ComparisonReport};
pub use config::{load_config, parse_config, ConfigError, OutputConfig, RunConfig};
pub use csvio::{emit_csv, format_sig, parse_csv, CsvError};
pub use figures::{run_figure, FigureError, FigureId, FigureOutput, RunOverrides};
pub use integrator::{
    compare_closed_form, integrate, residual_check, ClosedFormComparison, CompareError,
    IntegrateError, IntegratorConfig, Method, ResidualError, SampleMetrics, Trajectory,
};
pub use lindblad::{
    general_rhs, psd_check, simplified_rhs, stationary_state, DampingRates, DynamicsError,
    LindbladCouplings, Model, OscillatorParams, PsdReport,
};
pub use simon::{
    simon_density_eval, simon_lengths, simon_reduced_eval, to_covariance_state, validate_simon,
    LengthSq, ReducedForm, SimonError, SimonLengths, SimonParams,
};
pub use state::{
    ambiguity_eval, density_matrix_eval, entanglement_test, gaussian_kernel, reduced_density_eval,
    subsystem_metrics, validate_state, wigner_eval, CheckResult, CovarianceState,
    EntanglementReport, GaussianKernel, StateError, Subsystem, SubsystemMetrics, ValidationReport,
};
pub use sweep::{run_sweep, set_param, SweepError, SweepResult, SweepSpec};
pub use windows::{entanglement_windows, EntanglementWindows};
