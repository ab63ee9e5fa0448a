//! One-sided proportional control: sensor `n` drives actuator `n`.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Proportional gains, either shared by all channels or given per channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gains {
    Uniform(f64),
    PerChannel(Vec<f64>),
}

impl Gains {
    pub fn expand(&self, channels: usize) -> Result<Vec<f64>, ModelError> {
        match self {
            Gains::Uniform(kp) => Ok(vec![*kp; channels]),
            Gains::PerChannel(kp) if kp.len() == channels => Ok(kp.clone()),
            Gains::PerChannel(kp) => Err(ModelError::invalid(
                "controller.kp",
                format!("expected {channels} gains, got {}", kp.len()),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    kp: Vec<f64>,
    y_ref: f64,
    u_min: f64,
    u_max: Option<f64>,
}

impl ControllerConfig {
    /// `u_max = None` leaves the inputs unbounded above.
    pub fn new(kp: Vec<f64>, y_ref: f64, u_min: f64, u_max: Option<f64>) -> Result<Self, ModelError> {
        if kp.is_empty() {
            return Err(ModelError::invalid("controller.kp", "at least one gain is required"));
        }
        if let Some(n) = kp.iter().position(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(ModelError::invalid(
                format!("controller.kp[{n}]"),
                "must be finite and >= 0",
            ));
        }
        if !y_ref.is_finite() {
            return Err(ModelError::invalid("controller.y_ref", "must be finite"));
        }
        if !u_min.is_finite() {
            return Err(ModelError::invalid("controller.u_min", "must be finite"));
        }
        if let Some(hi) = u_max {
            if !hi.is_finite() {
                return Err(ModelError::invalid("controller.u_max", "must be finite or null"));
            }
            if hi < u_min {
                return Err(ModelError::invalid("controller.u_max", "must be >= u_min"));
            }
        }
        Ok(ControllerConfig {
            kp,
            y_ref,
            u_min,
            u_max,
        })
    }

    pub fn channels(&self) -> usize {
        self.kp.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.kp
    }

    pub fn y_ref(&self) -> f64 {
        self.y_ref
    }

    /// `e_n = y_ref - y_n`.
    pub fn control_error(&self, outputs: &[f64]) -> Vec<f64> {
        outputs.iter().map(|y| self.y_ref - y).collect()
    }

    /// `u_n = kp_n·e_n` for `e_n > 0`, otherwise 0, then clamped to the input bounds.
    pub fn proportional_law(&self, errors: &[f64]) -> Vec<f64> {
        assert_eq!(errors.len(), self.kp.len(), "one error per actuator");
        errors
            .iter()
            .zip(&self.kp)
            .map(|(&e, &kp)| {
                let raw = if e > 0.0 { kp * e } else { 0.0 };
                let u = raw.max(self.u_min);
                match self.u_max {
                    Some(hi) => u.min(hi),
                    None => u,
                }
            })
            .collect()
    }

    /// Inputs for the given sensor outputs.
    pub fn inputs(&self, outputs: &[f64]) -> Vec<f64> {
        self.proportional_law(&self.control_error(outputs))
    }
}
