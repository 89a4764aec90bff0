//! Compositional pattern-producing networks.
//!
//! A [`Cppn`] is a feed-forward graph over five fixed inputs (`x`, `y`, `z`,
//! `r`, bias) and a single output node. Hidden nodes carry one of a small set
//! of activation functions. The graph is validated and compiled into a
//! topological evaluation plan at construction, so evaluation never fails.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node id of the `x` input.
pub const INPUT_X: u32 = 0;
/// Node id of the `y` input.
pub const INPUT_Y: u32 = 1;
/// Node id of the `z` input.
pub const INPUT_Z: u32 = 2;
/// Node id of the radial distance input.
pub const INPUT_R: u32 = 3;
/// Node id of the constant bias input (always 1).
pub const INPUT_BIAS: u32 = 4;
/// Number of fixed input nodes; ids `0..NUM_INPUTS` are reserved for them.
pub const NUM_INPUTS: u32 = 5;
/// Node id of the single output node.
pub const OUTPUT: u32 = 5;

/// Node activation functions.
///
/// `Sigmoid` and `Gaussian` are the bipolar variants, rescaled to `(-1, 1)`
/// and `(-1, 1]` so that an output node using them can produce values on
/// both sides of the geometry threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sine,
    Sigmoid,
    Gaussian,
    Abs,
    Linear,
}

impl Activation {
    pub const ALL: [Activation; 5] = [
        Activation::Sine,
        Activation::Sigmoid,
        Activation::Gaussian,
        Activation::Abs,
        Activation::Linear,
    ];

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sine => x.sin(),
            Activation::Sigmoid => 2.0 / (1.0 + (-x).exp()) - 1.0,
            Activation::Gaussian => 2.0 * (-x * x).exp() - 1.0,
            Activation::Abs => x.abs(),
            Activation::Linear => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: u32,
    pub activation: Activation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub src: u32,
    pub dst: u32,
    pub weight: f64,
    pub enabled: bool,
}

/// Serialized shape of a network: `{nodes: [...], links: [...]}`.
///
/// Input nodes are implicit and never listed in `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CppnRepr {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, Default)]
struct Plan {
    /// Activation slot order: inputs occupy `0..NUM_INPUTS`, then `order`.
    order: Vec<PlanNode>,
    output_slot: usize,
}

#[derive(Debug, Clone)]
struct PlanNode {
    activation: Activation,
    /// `(slot, weight)` of each enabled incoming link, in link-list order.
    incoming: Vec<(usize, f64)>,
}

/// A validated, acyclic CPPN.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "CppnRepr", into = "CppnRepr")]
pub struct Cppn {
    nodes: Vec<Node>,
    links: Vec<Link>,
    plan: Plan,
}

impl PartialEq for Cppn {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.links == other.links
    }
}

impl TryFrom<CppnRepr> for Cppn {
    type Error = Error;

    fn try_from(repr: CppnRepr) -> Result<Self> {
        Cppn::new(repr.nodes, repr.links)
    }
}

impl From<Cppn> for CppnRepr {
    fn from(cppn: Cppn) -> Self {
        CppnRepr {
            nodes: cppn.nodes,
            links: cppn.links,
        }
    }
}

impl Cppn {
    /// Validates the graph and compiles its evaluation plan.
    ///
    /// Rejects duplicate or reserved node ids, a missing output node, links
    /// with dangling endpoints or into inputs, duplicate links, non-finite
    /// weights and cycles (disabled links included).
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(nodes.len());
        for node in &nodes {
            if node.id < NUM_INPUTS {
                return Err(Error::InvalidNetwork(format!(
                    "node id {} is reserved for an input",
                    node.id
                )));
            }
            if !ids.insert(node.id) {
                return Err(Error::InvalidNetwork(format!("duplicate node id {}", node.id)));
            }
        }
        if !ids.contains(&OUTPUT) {
            return Err(Error::InvalidNetwork("missing output node".into()));
        }
        let mut pairs = HashSet::with_capacity(links.len());
        for link in &links {
            if link.src >= NUM_INPUTS && !ids.contains(&link.src) {
                return Err(Error::InvalidNetwork(format!(
                    "link source {} does not exist",
                    link.src
                )));
            }
            if !ids.contains(&link.dst) {
                return Err(Error::InvalidNetwork(format!(
                    "link target {} is not a non-input node",
                    link.dst
                )));
            }
            if link.src == link.dst {
                return Err(Error::CyclicNetwork(link.src));
            }
            if !link.weight.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "link {}->{} has non-finite weight",
                    link.src, link.dst
                )));
            }
            if !pairs.insert((link.src, link.dst)) {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate link {}->{}",
                    link.src, link.dst
                )));
            }
        }
        let plan = compile(&nodes, &links)?;
        Ok(Cppn { nodes, links, plan })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn activation_of(&self, id: u32) -> Option<Activation> {
        self.nodes.iter().find(|n| n.id == id).map(|n| n.activation)
    }

    /// Evaluates the network at normalized coordinates, returning a value in
    /// `[-1, 1]` (the output is hard-clamped).
    pub fn evaluate(&self, x: f64, y: f64, z: f64, r: f64) -> f64 {
        let mut scratch = Vec::new();
        self.evaluate_with(&mut scratch, x, y, z, r)
    }

    /// Like [`evaluate`](Self::evaluate) but reuses a caller-owned buffer.
    pub fn evaluate_with(&self, scratch: &mut Vec<f64>, x: f64, y: f64, z: f64, r: f64) -> f64 {
        scratch.clear();
        scratch.extend_from_slice(&[x, y, z, r, 1.0]);
        for node in &self.plan.order {
            let mut sum = 0.0;
            for &(slot, weight) in &node.incoming {
                sum += weight * scratch[slot];
            }
            scratch.push(node.activation.apply(sum));
        }
        scratch[self.plan.output_slot].clamp(-1.0, 1.0)
    }

    /// Whether adding a link `src -> dst` would close a cycle.
    pub fn would_cycle(&self, src: u32, dst: u32) -> bool {
        if src == dst {
            return true;
        }
        // a cycle appears iff src is already reachable from dst
        let mut adjacency: HashMap<u32, Vec<u32>> = HashMap::new();
        for link in &self.links {
            adjacency.entry(link.src).or_default().push(link.dst);
        }
        let mut stack = vec![dst];
        let mut seen = HashSet::new();
        while let Some(n) = stack.pop() {
            if n == src {
                return true;
            }
            if seen.insert(n) {
                if let Some(next) = adjacency.get(&n) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        false
    }

    pub(crate) fn into_parts(self) -> (Vec<Node>, Vec<Link>) {
        (self.nodes, self.links)
    }
}

/// Kahn's algorithm over all links. Ties are resolved by ascending node id so
/// the plan (and hence floating-point summation order) is deterministic.
fn compile(nodes: &[Node], links: &[Link]) -> Result<Plan> {
    let mut indegree: HashMap<u32, usize> = nodes.iter().map(|n| (n.id, 0)).collect();
    let mut outgoing: HashMap<u32, Vec<u32>> = HashMap::new();
    for link in links {
        *indegree.get_mut(&link.dst).expect("validated target") += 1;
        outgoing.entry(link.src).or_default().push(link.dst);
    }

    let mut ready: std::collections::BTreeSet<u32> = indegree
        .iter()
        .filter(|&(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();
    // inputs have no incoming links; release their edges first
    for input in 0..NUM_INPUTS {
        if let Some(targets) = outgoing.get(&input) {
            for t in targets {
                let d = indegree.get_mut(t).expect("validated target");
                *d -= 1;
                if *d == 0 {
                    ready.insert(*t);
                }
            }
        }
    }

    let mut topo = Vec::with_capacity(nodes.len());
    while let Some(id) = ready.pop_first() {
        topo.push(id);
        if let Some(targets) = outgoing.get(&id) {
            for t in targets {
                let d = indegree.get_mut(t).expect("validated target");
                *d -= 1;
                if *d == 0 {
                    ready.insert(*t);
                }
            }
        }
    }
    if topo.len() != nodes.len() {
        let stuck = indegree
            .iter()
            .filter(|&(id, &d)| d > 0 && !topo.contains(id))
            .map(|(&id, _)| id)
            .min()
            .unwrap_or(OUTPUT);
        return Err(Error::CyclicNetwork(stuck));
    }

    let mut slot_of: HashMap<u32, usize> = (0..NUM_INPUTS).map(|i| (i, i as usize)).collect();
    for (i, id) in topo.iter().enumerate() {
        slot_of.insert(*id, NUM_INPUTS as usize + i);
    }
    let activation: HashMap<u32, Activation> = nodes.iter().map(|n| (n.id, n.activation)).collect();
    let order = topo
        .iter()
        .map(|id| PlanNode {
            activation: activation[id],
            incoming: links
                .iter()
                .filter(|l| l.enabled && l.dst == *id)
                .map(|l| (slot_of[&l.src], l.weight))
                .collect(),
        })
        .collect();
    Ok(Plan {
        order,
        output_slot: slot_of[&OUTPUT],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn passthrough(weight: f64) -> Cppn {
        Cppn::new(
            vec![Node { id: OUTPUT, activation: Activation::Linear }],
            vec![Link { src: INPUT_X, dst: OUTPUT, weight, enabled: true }],
        )
        .unwrap()
    }

    #[test]
    fn linear_passthrough() {
        let net = passthrough(1.0);
        assert_eq!(net.evaluate(0.0, 0.3, -0.2, 0.5), 0.0);
        assert_eq!(net.evaluate(1.0, 0.0, 0.0, 1.0), 1.0);
    }

    #[test]
    fn output_is_clamped() {
        let net = passthrough(5.0);
        assert_eq!(net.evaluate(1.0, 0.0, 0.0, 0.0), 1.0);
        assert_eq!(net.evaluate(-1.0, 0.0, 0.0, 0.0), -1.0);
    }

    #[test]
    fn disabled_links_are_inert() {
        let net = Cppn::new(
            vec![Node { id: OUTPUT, activation: Activation::Linear }],
            vec![Link { src: INPUT_BIAS, dst: OUTPUT, weight: 0.7, enabled: false }],
        )
        .unwrap();
        assert_eq!(net.evaluate(0.2, 0.2, 0.2, 0.2), 0.0);
    }

    #[test]
    fn rejects_cycles() {
        let nodes = vec![
            Node { id: OUTPUT, activation: Activation::Sine },
            Node { id: 6, activation: Activation::Abs },
            Node { id: 7, activation: Activation::Abs },
        ];
        let links = vec![
            Link { src: INPUT_X, dst: 6, weight: 1.0, enabled: true },
            Link { src: 6, dst: 7, weight: 1.0, enabled: true },
            Link { src: 7, dst: 6, weight: 1.0, enabled: false },
            Link { src: 7, dst: OUTPUT, weight: 1.0, enabled: true },
        ];
        assert!(matches!(Cppn::new(nodes, links), Err(Error::CyclicNetwork(_))));
    }

    #[test]
    fn rejects_malformed_graphs() {
        let out = Node { id: OUTPUT, activation: Activation::Linear };
        assert!(Cppn::new(vec![], vec![]).is_err());
        assert!(Cppn::new(vec![out, out], vec![]).is_err());
        assert!(Cppn::new(vec![out, Node { id: 2, activation: Activation::Abs }], vec![]).is_err());
        let dangling = Link { src: 9, dst: OUTPUT, weight: 1.0, enabled: true };
        assert!(Cppn::new(vec![out], vec![dangling]).is_err());
        let into_input = Link { src: OUTPUT, dst: INPUT_X, weight: 1.0, enabled: true };
        assert!(Cppn::new(vec![out], vec![into_input]).is_err());
        let nan = Link { src: INPUT_X, dst: OUTPUT, weight: f64::NAN, enabled: true };
        assert!(Cppn::new(vec![out], vec![nan]).is_err());
    }

    #[test]
    fn would_cycle_detects_back_edges() {
        let net = Cppn::new(
            vec![
                Node { id: OUTPUT, activation: Activation::Linear },
                Node { id: 6, activation: Activation::Sine },
            ],
            vec![
                Link { src: INPUT_X, dst: 6, weight: 1.0, enabled: true },
                Link { src: 6, dst: OUTPUT, weight: 1.0, enabled: true },
            ],
        )
        .unwrap();
        assert!(net.would_cycle(OUTPUT, 6));
        assert!(!net.would_cycle(INPUT_Y, 6));
        assert!(net.would_cycle(6, 6));
    }

    #[test]
    fn activations_stay_bounded_where_expected() {
        for i in -200..=200 {
            let x = i as f64 * 0.1;
            for act in [Activation::Sine, Activation::Sigmoid, Activation::Gaussian] {
                let y = act.apply(x);
                assert!((-1.0..=1.0).contains(&y), "{act:?}({x}) = {y}");
            }
        }
        assert_eq!(Activation::Gaussian.apply(0.0), 1.0);
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.0);
    }
}
