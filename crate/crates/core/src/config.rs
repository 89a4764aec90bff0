//! Flat JSON run configuration.
//!
//! Every key is optional and falls back to its default; unknown keys are
//! rejected. Physics keys carry the same names and units as
//! [`LatticeConfig`].

use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_RESAMPLES;
use crate::development::DevelopmentRule;
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::genome::LatticeDims;
use crate::physics::LatticeConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    // evolution
    pub population_size: usize,
    pub generations: usize,
    pub checkpoint_interval: usize,
    pub development_rule: DevelopmentRule,
    /// Lattice size as `[nx, ny, nz]`.
    pub lattice_dims: [usize; 3],

    // analysis
    pub robustness_samples: usize,
    pub bootstrap_resamples: usize,

    // physics
    pub voxel_edge_length: f64,
    pub density: f64,
    pub gravity: f64,
    pub ground_stiffness: f64,
    pub friction_coefficient: f64,
    pub damping_ratio: f64,
    pub dt_safety_factor: f64,
    pub settle_duration: f64,
    pub sim_cycles: f64,
    pub actuation_amplitude: f64,
    pub actuation_frequency: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub signal_filter_time_constant: f64,
    pub shear_stiffness_ratio: f64,
    pub max_dynamic_modulus: f64,
    pub development_interval: f64,
    pub trajectory_interval: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let evo = EvolutionConfig::default();
        RunConfig::from_parts(&evo, 10, DEFAULT_RESAMPLES)
    }
}

impl RunConfig {
    pub fn from_parts(evolution: &EvolutionConfig, robustness_samples: usize, bootstrap_resamples: usize) -> Self {
        let l = &evolution.lattice;
        RunConfig {
            population_size: evolution.population_size,
            generations: evolution.generations,
            checkpoint_interval: evolution.checkpoint_interval,
            development_rule: evolution.development_rule,
            lattice_dims: [evolution.dims.nx, evolution.dims.ny, evolution.dims.nz],
            robustness_samples,
            bootstrap_resamples,
            voxel_edge_length: l.voxel_edge_length,
            density: l.density,
            gravity: l.gravity,
            ground_stiffness: l.ground_stiffness,
            friction_coefficient: l.friction_coefficient,
            damping_ratio: l.damping_ratio,
            dt_safety_factor: l.dt_safety_factor,
            settle_duration: l.settle_duration,
            sim_cycles: l.sim_cycles,
            actuation_amplitude: l.actuation_amplitude,
            actuation_frequency: l.actuation_frequency,
            k_min: l.k_min,
            k_max: l.k_max,
            signal_filter_time_constant: l.signal_filter_time_constant,
            shear_stiffness_ratio: l.shear_stiffness_ratio,
            max_dynamic_modulus: l.max_dynamic_modulus,
            development_interval: l.development_interval,
            trajectory_interval: l.trajectory_interval,
        }
    }

    /// Parses and validates a configuration file's contents.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn dims(&self) -> LatticeDims {
        let [nx, ny, nz] = self.lattice_dims;
        LatticeDims::new(nx, ny, nz)
    }

    pub fn lattice(&self) -> LatticeConfig {
        LatticeConfig {
            voxel_edge_length: self.voxel_edge_length,
            density: self.density,
            gravity: self.gravity,
            ground_stiffness: self.ground_stiffness,
            friction_coefficient: self.friction_coefficient,
            damping_ratio: self.damping_ratio,
            dt_safety_factor: self.dt_safety_factor,
            settle_duration: self.settle_duration,
            sim_cycles: self.sim_cycles,
            actuation_amplitude: self.actuation_amplitude,
            actuation_frequency: self.actuation_frequency,
            k_min: self.k_min,
            k_max: self.k_max,
            signal_filter_time_constant: self.signal_filter_time_constant,
            shear_stiffness_ratio: self.shear_stiffness_ratio,
            max_dynamic_modulus: self.max_dynamic_modulus,
            development_interval: self.development_interval,
            trajectory_interval: self.trajectory_interval,
        }
    }

    pub fn evolution(&self, seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            population_size: self.population_size,
            generations: self.generations,
            seed,
            development_rule: self.development_rule,
            lattice: self.lattice(),
            dims: self.dims(),
            checkpoint_interval: self.checkpoint_interval,
        }
    }

    /// Checks every key, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.population_size < 2 {
            problems.push(format!("`population_size` must be at least 2 (got {})", self.population_size));
        }
        if self.generations < 1 {
            problems.push("`generations` must be at least 1".to_string());
        }
        if self.lattice_dims.contains(&0) {
            problems.push(format!("`lattice_dims` entries must be positive (got {:?})", self.lattice_dims));
        }
        if self.robustness_samples < 1 {
            problems.push("`robustness_samples` must be at least 1".to_string());
        }
        if self.bootstrap_resamples < crate::analysis::MIN_RESAMPLES {
            problems.push(format!(
                "`bootstrap_resamples` must be at least {} (got {})",
                crate::analysis::MIN_RESAMPLES,
                self.bootstrap_resamples
            ));
        }
        if let Err(Error::InvalidConfig(msg)) = self.lattice().validate() {
            problems.push(msg);
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }
}
