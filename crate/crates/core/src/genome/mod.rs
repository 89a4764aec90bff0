//! Quad-CPPN genomes.
//!
//! Four independent networks encode geometry, congenital stiffness,
//! development gain and actuation phase. [`express`] turns a genome into a
//! [`Phenotype`]; [`Genome::mutate`] produces a child.

mod cppn;
mod express;
mod mutate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cppn::{
    Activation, Cppn, CppnRepr, Link, Node, INPUT_BIAS, INPUT_R, INPUT_X, INPUT_Y, INPUT_Z,
    NUM_INPUTS, OUTPUT,
};
pub use express::{
    components, express, lattice_coordinate, map_gain, map_phase, map_stiffness, LatticeDims,
    Phenotype, GAIN_LIMIT, STIFFNESS_MAX, STIFFNESS_MIN,
};
pub use mutate::{random_cppn, MutationOp, MAX_MUTATION_ATTEMPTS, WEIGHT_PERTURBATION_STD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GenomeId(pub u64);

impl fmt::Display for GenomeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a network inside a [`Genome`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Geometry = 0,
    Stiffness = 1,
    Gain = 2,
    Phase = 3,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::Geometry, Channel::Stiffness, Channel::Gain, Channel::Phase];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Networks {
    pub c1: Cppn,
    pub c2: Cppn,
    pub c3: Cppn,
    pub c4: Cppn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Genome {
    pub id: GenomeId,
    pub parent_id: Option<GenomeId>,
    pub networks: Networks,
}

impl Genome {
    pub fn new(id: GenomeId, parent_id: Option<GenomeId>, networks: [Cppn; 4]) -> Self {
        let [c1, c2, c3, c4] = networks;
        Genome {
            id,
            parent_id,
            networks: Networks { c1, c2, c3, c4 },
        }
    }

    pub fn network(&self, channel: Channel) -> &Cppn {
        match channel {
            Channel::Geometry => &self.networks.c1,
            Channel::Stiffness => &self.networks.c2,
            Channel::Gain => &self.networks.c3,
            Channel::Phase => &self.networks.c4,
        }
    }

    pub(crate) fn network_mut(&mut self, channel: Channel) -> &mut Cppn {
        match channel {
            Channel::Geometry => &mut self.networks.c1,
            Channel::Stiffness => &mut self.networks.c2,
            Channel::Gain => &mut self.networks.c3,
            Channel::Phase => &mut self.networks.c4,
        }
    }

    /// Fresh genome: every network connects all inputs straight to the output
    /// with standard-normal weights and a random output activation.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, id: GenomeId) -> Genome {
        let nets = [random_cppn(rng), random_cppn(rng), random_cppn(rng), random_cppn(rng)];
        Genome::new(id, None, nets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("genome serialization is infallible")
    }

    pub fn from_json(text: &str) -> crate::Result<Genome> {
        Ok(serde_json::from_str(text)?)
    }
}
