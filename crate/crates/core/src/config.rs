//! JSON run configuration: oscillator frequencies, dissipator couplings,
//! initial state, model selection, integrator settings, and output paths.
//! Unknown keys are rejected so typos fail loudly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::IntegratorConfig;
use crate::lindblad::{require_simplified, LindbladCouplings, Model, OscillatorParams};
use crate::simon::SimonParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {what}")]
    Invalid { what: String },
    #[error("unknown parameter path {path:?}")]
    UnknownParamPath { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
    /// Significant digits for CSV cells.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_precision() -> usize {
    9
}

fn default_model() -> Model {
    Model::Simplified
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub oscillator: OscillatorParams,
    #[serde(default)]
    pub couplings: LindbladCouplings,
    pub initial: SimonParams,
    #[serde(default = "default_model")]
    pub model: Model,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub outputs: OutputConfig,
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    validate_config(&cfg)?;
    Ok(cfg)
}

/// Reads, parses, and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn invalid(what: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { what: what.into() }
}

/// Structural validation beyond what the schema can express: positive
/// frequencies and steps, finite couplings, a usable precision, and the
/// coupling restriction when the simplified model is selected.
pub fn validate_config(cfg: &RunConfig) -> Result<(), ConfigError> {
    for (name, value) in [
        ("oscillator.omega_a", cfg.oscillator.omega_a),
        ("oscillator.omega_b", cfg.oscillator.omega_b),
        ("oscillator.lambda", cfg.oscillator.lambda),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(invalid(format!("{name} must be positive, got {value}")));
        }
    }
    let h = &cfg.couplings;
    let entries = [
        ("h11", h.h11),
        ("h22", h.h22),
        ("h33", h.h33),
        ("h44", h.h44),
        ("h12[0]", h.h12[0]),
        ("h12[1]", h.h12[1]),
        ("h13[0]", h.h13[0]),
        ("h13[1]", h.h13[1]),
        ("h14[0]", h.h14[0]),
        ("h14[1]", h.h14[1]),
        ("h23[0]", h.h23[0]),
        ("h23[1]", h.h23[1]),
        ("h24[0]", h.h24[0]),
        ("h24[1]", h.h24[1]),
        ("h34[0]", h.h34[0]),
        ("h34[1]", h.h34[1]),
    ];
    for (name, value) in entries {
        if !value.is_finite() {
            return Err(invalid(format!(
                "couplings.{name} must be finite, got {value}"
            )));
        }
    }
    for (name, value) in [
        ("initial.a1", cfg.initial.a1),
        ("initial.b1", cfg.initial.b1),
        ("initial.a2", cfg.initial.a2),
        ("initial.b2", cfg.initial.b2),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(invalid(format!("{name} must be positive, got {value}")));
        }
    }
    for (name, value) in [
        ("initial.a12", cfg.initial.a12),
        ("initial.b12", cfg.initial.b12),
    ] {
        if !value.is_finite() {
            return Err(invalid(format!("{name} must be finite, got {value}")));
        }
    }
    let i = &cfg.integrator;
    if !i.dt.is_finite() || i.dt <= 0.0 {
        return Err(invalid(format!(
            "integrator.dt must be positive, got {}",
            i.dt
        )));
    }
    if !i.t_end.is_finite() || i.t_end <= 0.0 {
        return Err(invalid(format!(
            "integrator.t_end must be positive, got {}",
            i.t_end
        )));
    }
    if i.sample_stride == 0 {
        return Err(invalid("integrator.sample_stride must be at least 1"));
    }
    if !i.adapt_tol.is_finite() || i.adapt_tol <= 0.0 {
        return Err(invalid(format!(
            "integrator.adapt_tol must be positive, got {}",
            i.adapt_tol
        )));
    }
    if cfg.outputs.precision == 0 || cfg.outputs.precision > 17 {
        return Err(invalid(format!(
            "outputs.precision must be in 1..=17, got {}",
            cfg.outputs.precision
        )));
    }
    if cfg.model == Model::Simplified {
        require_simplified(&cfg.couplings)
            .map_err(|e| invalid(format!("simplified model selected but {e}")))?;
    }
    Ok(())
}
