//! Actuation and stiffness development laws.
//!
//! Every function here is pure. The physics stepper calls them once per voxel
//! per step.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which interoceptive signal, if any, drives stiffness change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DevelopmentRule {
    /// Stiffness stays at its congenital value.
    #[default]
    None,
    /// `dk/dt = alpha * d(stress)/dt`.
    Stress,
    /// `dk/dt = alpha * d(pressure)/dt`.
    Pressure,
}

impl DevelopmentRule {
    pub const ALL: [DevelopmentRule; 3] = [
        DevelopmentRule::None,
        DevelopmentRule::Stress,
        DevelopmentRule::Pressure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DevelopmentRule::None => "none",
            DevelopmentRule::Stress => "stress",
            DevelopmentRule::Pressure => "pressure",
        }
    }
}

impl fmt::Display for DevelopmentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DevelopmentRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(DevelopmentRule::None),
            "stress" => Ok(DevelopmentRule::Stress),
            "pressure" => Ok(DevelopmentRule::Pressure),
            other => Err(Error::InvalidInput(format!(
                "unknown development rule `{other}` (expected none, stress or pressure)"
            ))),
        }
    }
}

/// Linear actuation damping: 1 for the softest material, 0 for the stiffest.
///
/// Fails when `k` lies outside `[k_min, k_max]`, which means a clamp upstream
/// was skipped.
pub fn xi(k: f64, k_min: f64, k_max: f64) -> Result<f64> {
    if !(k_min < k_max) {
        return Err(Error::InvalidConfig(format!(
            "k_min ({k_min}) must be below k_max ({k_max})"
        )));
    }
    if !(k_min..=k_max).contains(&k) {
        return Err(Error::StiffnessOutOfRange { k, k_min, k_max });
    }
    Ok(xi_unchecked(k, k_min, k_max))
}

#[inline]
pub(crate) fn xi_unchecked(k: f64, k_min: f64, k_max: f64) -> f64 {
    (k_max - k) / (k_max - k_min)
}

/// Rest-length multiplier of a voxel at actuation time `t`:
/// `1 + A sin(2 pi f t + phi) xi(k)`.
#[inline]
pub fn voxel_length(
    t: f64,
    phase: f64,
    k: f64,
    amplitude: f64,
    frequency: f64,
    k_min: f64,
    k_max: f64,
) -> f64 {
    1.0 + amplitude * (2.0 * PI * frequency * t + phase).sin() * xi_unchecked(k, k_min, k_max)
}

/// One forward-difference update of a development rule, clamped to the
/// stiffness range.
///
/// `signal_delta` is the change of the (filtered) stress or pressure since the
/// previous development update; it is ignored under [`DevelopmentRule::None`].
#[inline]
pub fn develop(
    k: f64,
    alpha: f64,
    signal_delta: f64,
    rule: DevelopmentRule,
    k_min: f64,
    k_max: f64,
) -> f64 {
    match rule {
        DevelopmentRule::None => k,
        DevelopmentRule::Stress | DevelopmentRule::Pressure => {
            (k + alpha * signal_delta).clamp(k_min, k_max)
        }
    }
}
