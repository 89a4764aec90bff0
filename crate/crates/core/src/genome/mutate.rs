use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::cppn::{Activation, Cppn, Link, Node, NUM_INPUTS, OUTPUT};
use super::{Channel, Genome, GenomeId};

/// Standard deviation of the Gaussian weight perturbation.
pub const WEIGHT_PERTURBATION_STD: f64 = 0.5;
/// Draws of an inapplicable operation before a network is left unchanged.
pub const MAX_MUTATION_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationOp {
    /// Split an enabled link with a new hidden node.
    AddNode,
    /// Connect a random non-cycle-forming pair.
    AddLink,
    RemoveLink,
    PerturbWeight,
    ChangeActivation,
}

impl MutationOp {
    pub const ALL: [MutationOp; 5] = [
        MutationOp::AddNode,
        MutationOp::AddLink,
        MutationOp::RemoveLink,
        MutationOp::PerturbWeight,
        MutationOp::ChangeActivation,
    ];
}

pub fn random_cppn<R: Rng + ?Sized>(rng: &mut R) -> Cppn {
    let activation = *Activation::ALL.choose(rng).expect("non-empty");
    let links = (0..NUM_INPUTS)
        .map(|src| Link {
            src,
            dst: OUTPUT,
            weight: StandardNormal.sample(rng),
            enabled: true,
        })
        .collect();
    Cppn::new(vec![Node { id: OUTPUT, activation }], links).expect("fully connected start is valid")
}

impl Cppn {
    /// Applies one mutation, returning `None` if it is inapplicable to this
    /// network.
    pub fn mutated<R: Rng + ?Sized>(&self, op: MutationOp, rng: &mut R) -> Option<Cppn> {
        let (mut nodes, mut links) = self.clone().into_parts();
        match op {
            MutationOp::AddNode => {
                let enabled: Vec<usize> = (0..links.len()).filter(|&i| links[i].enabled).collect();
                let &pick = enabled.choose(rng)?;
                let old = links[pick];
                links[pick].enabled = false;
                let id = nodes.iter().map(|n| n.id).max().unwrap_or(OUTPUT) + 1;
                let activation = *Activation::ALL.choose(rng).expect("non-empty");
                nodes.push(Node { id, activation });
                links.push(Link { src: old.src, dst: id, weight: 1.0, enabled: true });
                links.push(Link { src: id, dst: old.dst, weight: old.weight, enabled: true });
            }
            MutationOp::AddLink => {
                let sources = (0..NUM_INPUTS).chain(nodes.iter().map(|n| n.id));
                let mut candidates = Vec::new();
                for src in sources {
                    for dst in nodes.iter().map(|n| n.id) {
                        if links.iter().any(|l| l.src == src && l.dst == dst) {
                            continue;
                        }
                        if !self.would_cycle(src, dst) {
                            candidates.push((src, dst));
                        }
                    }
                }
                let &(src, dst) = candidates.choose(rng)?;
                let weight = StandardNormal.sample(rng);
                links.push(Link { src, dst, weight, enabled: true });
            }
            MutationOp::RemoveLink => {
                if links.is_empty() {
                    return None;
                }
                let i = rng.random_range(0..links.len());
                links.remove(i);
            }
            MutationOp::PerturbWeight => {
                if links.is_empty() {
                    return None;
                }
                let i = rng.random_range(0..links.len());
                let noise = Normal::new(0.0, WEIGHT_PERTURBATION_STD).expect("valid std");
                links[i].weight += noise.sample(rng);
            }
            MutationOp::ChangeActivation => {
                let i = rng.random_range(0..nodes.len());
                let current = nodes[i].activation;
                let others: Vec<Activation> =
                    Activation::ALL.into_iter().filter(|&a| a != current).collect();
                nodes[i].activation = *others.choose(rng).expect("non-empty");
            }
        }
        Some(Cppn::new(nodes, links).expect("mutation preserves validity"))
    }
}

impl Genome {
    /// Produces a child genome.
    ///
    /// Each network is selected independently with probability 1/2 (one is
    /// picked uniformly if none was). Every selected network receives one
    /// uniformly drawn operation, redrawn up to [`MAX_MUTATION_ATTEMPTS`]
    /// times while inapplicable.
    pub fn mutate<R: Rng + ?Sized>(&self, rng: &mut R, child_id: GenomeId) -> Genome {
        let mut selected: Vec<Channel> =
            Channel::ALL.into_iter().filter(|_| rng.random_bool(0.5)).collect();
        if selected.is_empty() {
            selected.push(*Channel::ALL.choose(rng).expect("non-empty"));
        }
        let mut child = self.clone();
        child.id = child_id;
        child.parent_id = Some(self.id);
        for ch in selected {
            for _ in 0..MAX_MUTATION_ATTEMPTS {
                let op = *MutationOp::ALL.choose(rng).expect("non-empty");
                if let Some(net) = child.network(ch).mutated(op, rng) {
                    *child.network_mut(ch) = net;
                    break;
                }
            }
        }
        child
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{INPUT_X, INPUT_Y};
    use crate::SeededRng;
    use rand::SeedableRng;

    fn single_link() -> Cppn {
        Cppn::new(
            vec![Node { id: OUTPUT, activation: Activation::Linear }],
            vec![Link { src: INPUT_X, dst: OUTPUT, weight: 0.8, enabled: true }],
        )
        .unwrap()
    }

    #[test]
    fn add_node_splits_link() {
        let mut rng = SeededRng::seed_from_u64(0);
        let net = single_link().mutated(MutationOp::AddNode, &mut rng).unwrap();
        assert_eq!(net.nodes().len(), 2);
        assert_eq!(net.links().len(), 3);
        assert!(!net.links()[0].enabled);
        let new_id = net.nodes()[1].id;
        assert!(net.links().iter().any(|l| l.src == INPUT_X && l.dst == new_id && l.weight == 1.0));
        assert!(net.links().iter().any(|l| l.src == new_id && l.dst == OUTPUT && l.weight == 0.8));
    }

    #[test]
    fn inapplicable_ops_report_none() {
        let mut rng = SeededRng::seed_from_u64(0);
        let empty = Cppn::new(vec![Node { id: OUTPUT, activation: Activation::Sine }], vec![]).unwrap();
        assert!(empty.mutated(MutationOp::RemoveLink, &mut rng).is_none());
        assert!(empty.mutated(MutationOp::PerturbWeight, &mut rng).is_none());
        assert!(empty.mutated(MutationOp::AddNode, &mut rng).is_none());
        assert!(empty.mutated(MutationOp::AddLink, &mut rng).is_some());
    }

    #[test]
    fn add_link_saturates() {
        // output only: every input already linked, nothing left to add
        let full = Cppn::new(
            vec![Node { id: OUTPUT, activation: Activation::Sine }],
            (0..NUM_INPUTS)
                .map(|src| Link { src, dst: OUTPUT, weight: 1.0, enabled: true })
                .collect(),
        )
        .unwrap();
        let mut rng = SeededRng::seed_from_u64(5);
        assert!(full.mutated(MutationOp::AddLink, &mut rng).is_none());
    }

    #[test]
    fn change_activation_always_changes() {
        let mut rng = SeededRng::seed_from_u64(9);
        for _ in 0..50 {
            let net = single_link().mutated(MutationOp::ChangeActivation, &mut rng).unwrap();
            assert_ne!(net.activation_of(OUTPUT), Some(Activation::Linear));
        }
    }

    #[test]
    fn mutate_sets_lineage_and_is_deterministic() {
        let mut rng = SeededRng::seed_from_u64(42);
        let parent = Genome::random(&mut rng, GenomeId(1));
        let a = parent.mutate(&mut SeededRng::seed_from_u64(7), GenomeId(2));
        let b = parent.mutate(&mut SeededRng::seed_from_u64(7), GenomeId(2));
        assert_eq!(a, b);
        assert_eq!(a.id, GenomeId(2));
        assert_eq!(a.parent_id, Some(GenomeId(1)));
        assert_ne!(a.networks, parent.networks);
    }

    #[test]
    fn remove_link_keeps_graph_valid() {
        let mut rng = SeededRng::seed_from_u64(3);
        let net = Cppn::new(
            vec![Node { id: OUTPUT, activation: Activation::Linear }],
            vec![
                Link { src: INPUT_X, dst: OUTPUT, weight: 1.0, enabled: true },
                Link { src: INPUT_Y, dst: OUTPUT, weight: 1.0, enabled: true },
            ],
        )
        .unwrap();
        let net = net.mutated(MutationOp::RemoveLink, &mut rng).unwrap();
        assert_eq!(net.links().len(), 1);
    }
}
