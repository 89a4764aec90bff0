//! Voxel-lattice soft robots whose material stiffness develops during their
//! lifetime in response to interoceptive stress or pressure.
//!
//! The crate is organised bottom-up:
//!
//! - [`development`]: actuation damping, rest-length law and the three
//!   stiffness development rules.
//! - [`genome`]: quad-CPPN genomes, phenotype expression and mutation.
//! - [`physics`]: point-mass/spring lattice dynamics with ground contact.
//! - [`evolution`]: age-fitness Pareto optimisation.
//! - [`analysis`]: diversity, robustness, canalization and bootstrap tests.
//! - [`config`] and [`persist`]: run configuration and on-disk formats.

pub mod analysis;
pub mod config;
pub mod development;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod persist;
pub mod physics;

pub use development::DevelopmentRule;
pub use error::{Error, Result};
pub use genome::{Cppn, Genome, GenomeId, Phenotype};
pub use physics::{LatticeConfig, SimResult};

/// Deterministic random source used everywhere a seed is involved.
///
/// ChaCha is used rather than `StdRng` because its output stream is stable
/// across `rand` releases, which the reproducibility guarantees depend on.
pub type SeededRng = rand_chacha::ChaCha8Rng;
