//! Point-mass/spring lattice dynamics.
//!
//! Each present voxel is a point mass at its lattice centre. Face-adjacent
//! voxels are joined by Hookean springs whose stiffness is the series
//! combination of the two moduli; optional shear springs join edge-adjacent
//! voxels so that the lattice resists shearing. The body sits on a flat
//! penalty-contact ground with Coulomb friction and is integrated with
//! semi-implicit Euler.

mod lattice;
mod sim;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lattice::{build_lattice, Body, Spring, SpringKind};
pub use sim::{
    compute_signals, simulate, stable_dt, FinalVoxelState, SimResult, SimState, Simulator,
    TrajectorySample, Unstable,
};

/// Physical and numerical parameters of a simulation. All values are SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    /// Rest edge length of a voxel (m).
    pub voxel_edge_length: f64,
    /// Material density (kg/m^3).
    pub density: f64,
    /// Gravitational acceleration magnitude, acting along -z (m/s^2).
    pub gravity: f64,
    /// Ground penalty stiffness (N/m).
    pub ground_stiffness: f64,
    pub friction_coefficient: f64,
    /// Fraction of critical damping applied to every spring and to ground
    /// contact.
    pub damping_ratio: f64,
    /// Fraction of the single-spring stability limit used as timestep. The
    /// highest lattice mode sits above the single-spring frequency, so values
    /// much above 0.6 can diverge for fully stiff bodies.
    pub dt_safety_factor: f64,
    /// Seconds of gravity-only settling before the start position is taken.
    pub settle_duration: f64,
    /// Number of actuation periods simulated after settling.
    pub sim_cycles: f64,
    pub actuation_amplitude: f64,
    /// Actuation frequency (Hz).
    pub actuation_frequency: f64,
    pub k_min: f64,
    pub k_max: f64,
    /// Time constant of the exponential stress/pressure filter (s); 0 uses
    /// the raw signal.
    pub signal_filter_time_constant: f64,
    /// Shear spring stiffness relative to a face spring of the same
    /// materials; 0 builds face springs only.
    pub shear_stiffness_ratio: f64,
    /// Moduli above this value are treated as this value when computing
    /// spring stiffness. Such materials are already rigid at the loads a
    /// centimetre-scale body produces, and the cap keeps the stable timestep
    /// at the ground-contact limit. Actuation damping always uses the true
    /// modulus. Set equal to `k_max` to disable.
    pub max_dynamic_modulus: f64,
    /// Seconds between development updates; 0 develops on every step.
    pub development_interval: f64,
    /// Seconds between recorded centre-of-mass samples.
    pub trajectory_interval: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            voxel_edge_length: 0.01,
            density: 1e4,
            gravity: 9.81,
            ground_stiffness: 1e6,
            friction_coefficient: 1.0,
            damping_ratio: 0.2,
            dt_safety_factor: 0.5,
            settle_duration: 0.5,
            sim_cycles: 25.0,
            actuation_amplitude: 0.145,
            actuation_frequency: 5.0,
            k_min: 1e4,
            k_max: 1e10,
            signal_filter_time_constant: 0.2,
            shear_stiffness_ratio: 0.5,
            max_dynamic_modulus: 1e7,
            development_interval: 0.0,
            trajectory_interval: 0.01,
        }
    }
}

impl LatticeConfig {
    /// Mass of one voxel (kg).
    pub fn voxel_mass(&self) -> f64 {
        self.density * self.voxel_edge_length.powi(3)
    }

    /// Length of the actuated phase (s).
    pub fn actuation_duration(&self) -> f64 {
        self.sim_cycles / self.actuation_frequency
    }

    /// Checks every invariant, naming the offending keys.
    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("`{name}` must be a positive finite number (got {v})"));
            }
        };
        positive("voxel_edge_length", self.voxel_edge_length);
        positive("density", self.density);
        positive("ground_stiffness", self.ground_stiffness);
        positive("actuation_frequency", self.actuation_frequency);
        positive("k_min", self.k_min);
        positive("k_max", self.k_max);
        positive("max_dynamic_modulus", self.max_dynamic_modulus);
        positive("trajectory_interval", self.trajectory_interval);

        let mut non_negative = |name: &str, v: f64| {
            if !(v.is_finite() && v >= 0.0) {
                problems.push(format!("`{name}` must be finite and non-negative (got {v})"));
            }
        };
        non_negative("gravity", self.gravity);
        non_negative("friction_coefficient", self.friction_coefficient);
        non_negative("damping_ratio", self.damping_ratio);
        non_negative("settle_duration", self.settle_duration);
        non_negative("sim_cycles", self.sim_cycles);
        non_negative("signal_filter_time_constant", self.signal_filter_time_constant);
        non_negative("shear_stiffness_ratio", self.shear_stiffness_ratio);
        non_negative("development_interval", self.development_interval);

        if !(self.dt_safety_factor > 0.0 && self.dt_safety_factor < 1.0) {
            problems.push(format!(
                "`dt_safety_factor` must lie in (0, 1) (got {})",
                self.dt_safety_factor
            ));
        }
        if !(0.0..=0.2).contains(&self.actuation_amplitude) {
            problems.push(format!(
                "`actuation_amplitude` must lie in [0, 0.2] (got {})",
                self.actuation_amplitude
            ));
        }
        if self.k_min >= self.k_max {
            problems.push(format!(
                "`k_min` ({}) must be below `k_max` ({})",
                self.k_min, self.k_max
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }
}
