//! Temperature-dependent material laws and the emitted-flux boundary law.
//!
//! All temperatures are absolute (Kelvin) and non-negative.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Upper end of the temperature range on which material laws are checked.
pub const DEFAULT_THETA_CAP: f64 = 3000.0;

/// Stefan-Boltzmann constant in W/(m²·K⁴).
pub const STEFAN_BOLTZMANN: f64 = 5.67e-8;

/// Constant density with affine heat capacity `c(θ) = c0 + c1·θ` and
/// conductivity `λ(θ) = lambda0 + lambda1·θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalMaterial {
    /// Mass density in kg/m³.
    pub rho: f64,
    /// Heat capacity offset in J/(kg·K).
    pub c0: f64,
    /// Heat capacity slope in J/(kg·K²).
    pub c1: f64,
    /// Conductivity offset in W/(m·K).
    pub lambda0: f64,
    /// Conductivity slope in W/(m·K²).
    pub lambda1: f64,
}

impl ThermalMaterial {
    /// Builds a material and checks positivity of `c` and `λ` on `[0, DEFAULT_THETA_CAP]`.
    pub fn new(rho: f64, c0: f64, c1: f64, lambda0: f64, lambda1: f64) -> Result<Self, ModelError> {
        let mat = ThermalMaterial {
            rho,
            c0,
            c1,
            lambda0,
            lambda1,
        };
        mat.validate(DEFAULT_THETA_CAP)?;
        Ok(mat)
    }

    /// Steel-like plate used by both reference scenarios.
    pub fn steel_plate() -> Self {
        ThermalMaterial {
            rho: 7800.0,
            c0: 330.0,
            c1: 0.4,
            lambda0: 10.0,
            lambda1: 0.1,
        }
    }

    /// Checks the invariants on `[0, theta_cap]`. Both laws are affine, so
    /// checking the two endpoints covers the whole interval.
    pub fn validate(&self, theta_cap: f64) -> Result<(), ModelError> {
        for (name, value) in [
            ("rho", self.rho),
            ("c0", self.c0),
            ("c1", self.c1),
            ("lambda0", self.lambda0),
            ("lambda1", self.lambda1),
        ] {
            if !value.is_finite() {
                return Err(ModelError::invalid(format!("material.{name}"), "must be finite"));
            }
        }
        if self.rho <= 0.0 {
            return Err(ModelError::invalid("material.rho", "must be > 0"));
        }
        for theta in [0.0, theta_cap] {
            if self.heat_capacity(theta) <= 0.0 {
                return Err(ModelError::invalid(
                    "material.c1",
                    format!("heat capacity must stay > 0 on [0, {theta_cap}] K"),
                ));
            }
            if self.thermal_conductivity(theta) <= 0.0 {
                return Err(ModelError::invalid(
                    "material.lambda1",
                    format!("thermal conductivity must stay > 0 on [0, {theta_cap}] K"),
                ));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn heat_capacity(&self, theta: f64) -> f64 {
        debug_assert!(theta >= 0.0 || theta.is_nan());
        self.c0 + self.c1 * theta
    }

    #[inline]
    pub fn thermal_conductivity(&self, theta: f64) -> f64 {
        debug_assert!(theta >= 0.0 || theta.is_nan());
        self.lambda0 + self.lambda1 * theta
    }

    /// Conductivity on the face between two cells, taken at their mean temperature.
    #[inline]
    pub fn face_conductivity(&self, theta_a: f64, theta_b: f64) -> f64 {
        self.thermal_conductivity((theta_a + theta_b) / 2.0)
    }

    /// `ρ·c(θ)`, in J/(m³·K).
    #[inline]
    pub fn volumetric_heat_coefficient(&self, theta: f64) -> f64 {
        self.rho * self.heat_capacity(theta)
    }

    /// Thermal diffusivity `λ(θ) / (ρ·c(θ))` in m²/s.
    pub fn diffusivity(&self, theta: f64) -> f64 {
        self.thermal_conductivity(theta) / self.volumetric_heat_coefficient(theta)
    }
}

impl Default for ThermalMaterial {
    fn default() -> Self {
        Self::steel_plate()
    }
}

/// Convection and radiation exchange with the ambient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceExchange {
    /// Heat-transfer coefficient in W/(m²·K).
    pub h: f64,
    /// Constant emissivity in `[0, 1]`.
    pub emissivity: f64,
    /// Stefan-Boltzmann constant in W/(m²·K⁴).
    pub sigma: f64,
    /// Ambient temperature in K.
    pub theta_amb: f64,
}

impl SurfaceExchange {
    pub fn new(h: f64, emissivity: f64, sigma: f64, theta_amb: f64) -> Result<Self, ModelError> {
        let exch = SurfaceExchange {
            h,
            emissivity,
            sigma,
            theta_amb,
        };
        exch.validate()?;
        Ok(exch)
    }

    /// Still air around a lightly oxidized steel surface at 300 K.
    pub fn ambient_air() -> Self {
        SurfaceExchange {
            h: 10.0,
            emissivity: 0.6,
            sigma: STEFAN_BOLTZMANN,
            theta_amb: 300.0,
        }
    }

    /// No exchange at all; the ambient temperature is irrelevant.
    pub fn insulated(theta_amb: f64) -> Self {
        SurfaceExchange {
            h: 0.0,
            emissivity: 0.0,
            sigma: STEFAN_BOLTZMANN,
            theta_amb,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [
            ("h", self.h),
            ("emissivity", self.emissivity),
            ("sigma", self.sigma),
            ("theta_amb", self.theta_amb),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(ModelError::invalid(format!("exchange.{name}"), "must be finite"));
            }
        }
        if self.h < 0.0 {
            return Err(ModelError::invalid("exchange.h", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.emissivity) {
            return Err(ModelError::invalid("exchange.emissivity", "must lie in [0, 1]"));
        }
        if self.sigma <= 0.0 {
            return Err(ModelError::invalid("exchange.sigma", "must be > 0"));
        }
        if self.theta_amb < 0.0 {
            return Err(ModelError::invalid("exchange.theta_amb", "must be >= 0"));
        }
        Ok(())
    }

    /// Heat flux into the body through an exposed surface at temperature `theta`:
    /// `-h(θ - θ_amb) - ε·σ·(θ⁴ - θ_amb⁴)`. Negative means the body loses heat.
    #[inline]
    pub fn emitted_flux(&self, theta: f64) -> f64 {
        debug_assert!(theta >= 0.0 || theta.is_nan());
        let amb = self.theta_amb;
        -self.h * (theta - amb) - self.emissivity * self.sigma * (theta.powi(4) - amb.powi(4))
    }
}

impl Default for SurfaceExchange {
    fn default() -> Self {
        Self::ambient_air()
    }
}
