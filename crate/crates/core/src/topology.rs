//! Networks of Function-Representations arranged as a pipeline of stages.
//!
//! A stage is either a single node or a parallel block whose nodes all see
//! the stage input and whose outputs are arbitrated down to one value.

use std::collections::HashSet;

use serde::Serialize;

use crate::analysis::{classify_column, find_reducer, ClassReport};
use crate::domain::FiniteDomain;
use crate::error::{Error, Result};
use crate::families::circular_distance;
use crate::repr::FunctionRep;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub fr: FunctionRep,
}

impl Node {
    pub fn new(id: impl Into<String>, fr: FunctionRep) -> Self {
        Node { id: id.into(), fr }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum ArbitrationPolicy {
    /// First node, in declaration order, with a non-NULL output.
    FirstNonNull,
    /// Node whose parameter is closest (circular distance) to the input.
    BestScore,
    /// First node in the listed order with a non-NULL output.
    Priority(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    Sequential(Node),
    Parallel {
        nodes: Vec<Node>,
        policy: ArbitrationPolicy,
    },
}

impl Stage {
    pub fn nodes(&self) -> &[Node] {
        match self {
            Stage::Sequential(node) => std::slice::from_ref(node),
            Stage::Parallel { nodes, .. } => nodes,
        }
    }
}

/// A validated, immutable stage pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    domain: FiniteDomain,
    stages: Vec<Stage>,
    // Priority stages resolved to node positions, parallel to `stages`.
    priority_orders: Vec<Option<Vec<usize>>>,
}

impl Network {
    pub fn new(domain: FiniteDomain, stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Config("a network needs at least one stage".into()));
        }
        let mut ids = HashSet::new();
        let mut priority_orders = Vec::with_capacity(stages.len());
        for (position, stage) in stages.iter().enumerate() {
            if stage.nodes().is_empty() {
                return Err(Error::Config(format!("parallel stage {position} has no nodes")));
            }
            for node in stage.nodes() {
                if node.fr.domain() != &domain {
                    return Err(Error::DomainMismatch {
                        expected: domain.name().to_string(),
                        found: node.fr.domain().name().to_string(),
                    });
                }
                if !ids.insert(node.id.as_str()) {
                    return Err(Error::Config(format!("duplicate node id '{}'", node.id)));
                }
            }
            priority_orders.push(match stage {
                Stage::Parallel {
                    nodes,
                    policy: ArbitrationPolicy::Priority(order),
                } => Some(resolve_priority(nodes, order, position)?),
                Stage::Parallel {
                    policy: ArbitrationPolicy::BestScore,
                    ..
                } if domain.null_index().is_none() => {
                    return Err(Error::Config(format!(
                        "best-score arbitration in stage {position} needs a domain with a NULL element"
                    )));
                }
                _ => None,
            });
        }
        Ok(Network {
            domain,
            stages,
            priority_orders,
        })
    }

    /// A pure sequential chain.
    pub fn chain(domain: FiniteDomain, nodes: Vec<Node>) -> Result<Self> {
        Self::new(domain, nodes.into_iter().map(Stage::Sequential).collect())
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn run(&self, input: usize) -> Result<usize> {
        self.domain.check_index(input)?;
        Ok(self.run_unchecked(input))
    }

    fn run_unchecked(&self, input: usize) -> usize {
        self.stages
            .iter()
            .zip(&self.priority_orders)
            .fold(input, |value, (stage, order)| {
                self.run_stage(stage, order.as_deref(), value)
            })
    }

    fn run_stage(&self, stage: &Stage, order: Option<&[usize]>, input: usize) -> usize {
        match stage {
            Stage::Sequential(node) => apply_node(&self.domain, &node.fr, input),
            Stage::Parallel { nodes, policy } => {
                let outputs: Vec<usize> = nodes
                    .iter()
                    .map(|node| apply_node(&self.domain, &node.fr, input))
                    .collect();
                self.arbitrate(nodes, policy, order, input, &outputs)
            }
        }
    }

    fn arbitrate(
        &self,
        nodes: &[Node],
        policy: &ArbitrationPolicy,
        order: Option<&[usize]>,
        input: usize,
        outputs: &[usize],
    ) -> usize {
        let null = self.domain.null_index();
        let first_non_null = |positions: &mut dyn Iterator<Item = usize>| {
            positions
                .map(|k| outputs[k])
                .find(|&o| Some(o) != null)
                .or(null)
                // without NULL every output is non-NULL, so find() succeeded
                .expect("non-empty stage")
        };
        match policy {
            ArbitrationPolicy::FirstNonNull => first_non_null(&mut (0..outputs.len())),
            ArbitrationPolicy::Priority(_) => {
                let order = order.expect("priority order resolved at construction");
                first_non_null(&mut order.iter().copied())
            }
            ArbitrationPolicy::BestScore => {
                let null = null.expect("checked at construction");
                if input == null {
                    return null;
                }
                let ring = self.domain.base_size();
                nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, node)| node.fr.param() != null)
                    // min_by_key keeps the first of equal keys
                    .min_by_key(|(_, node)| circular_distance(input, node.fr.param(), ring))
                    .map_or(null, |(k, _)| outputs[k])
            }
        }
    }

    /// The network as a single column: entry `i` is `run(i)`.
    pub fn compose_table(&self) -> Vec<usize> {
        self.domain.indices().map(|i| self.run_unchecked(i)).collect()
    }

    pub fn classify(&self) -> ClassReport {
        classify_column(&self.compose_table())
    }
}

/// Applies a node's FR, letting NULL bypass families that do not define it.
fn apply_node(domain: &FiniteDomain, fr: &FunctionRep, input: usize) -> usize {
    if domain.is_null(input) && !fr.family().defines_null() {
        input
    } else {
        fr.family().eval(input, fr.param())
    }
}

fn resolve_priority(nodes: &[Node], order: &[String], position: usize) -> Result<Vec<usize>> {
    let mut resolved = Vec::with_capacity(order.len());
    for id in order {
        let k = nodes
            .iter()
            .position(|node| &node.id == id)
            .ok_or_else(|| Error::Config(format!("priority lists '{id}', which is not in stage {position}")))?;
        if resolved.contains(&k) {
            return Err(Error::Config(format!(
                "priority lists '{id}' twice in stage {position}"
            )));
        }
        resolved.push(k);
    }
    if resolved.len() != nodes.len() {
        return Err(Error::Config(format!(
            "priority order of stage {position} must list all {} nodes",
            nodes.len()
        )));
    }
    Ok(resolved)
}

pub fn run(net: &Network, input: usize) -> Result<usize> {
    net.run(input)
}

pub fn compose_table(net: &Network) -> Vec<usize> {
    net.compose_table()
}

pub fn classify_network(net: &Network) -> ClassReport {
    net.classify()
}

/// Merges adjacent sequential stages of the same family into one stage
/// whenever a reducer exists, until no merge applies. The composed table is
/// unchanged.
///
/// A merged node is named `<first>_<second>`.
pub fn reduce_chain(net: &Network) -> Network {
    let mut stages: Vec<Stage> = Vec::with_capacity(net.stages.len());
    for stage in net.stages.iter().cloned() {
        stages.push(stage);
        while stages.len() >= 2 {
            let len = stages.len();
            let merged = match (&stages[len - 2], &stages[len - 1]) {
                (Stage::Sequential(first), Stage::Sequential(second)) => merge_nodes(&net.domain, first, second),
                _ => None,
            };
            match merged {
                Some(node) => {
                    stages.truncate(len - 2);
                    stages.push(Stage::Sequential(node));
                }
                None => break,
            }
        }
    }
    Network::new(net.domain.clone(), uniquify(stages)).expect("reduction preserves network validity")
}

fn merge_nodes(domain: &FiniteDomain, first: &Node, second: &Node) -> Option<Node> {
    let family = first.fr.family();
    if family != second.fr.family() {
        return None;
    }
    let reducer = find_reducer(family, first.fr.param(), second.fr.param()).ok()??;
    let merged = FunctionRep::new(family.clone(), reducer).ok()?;
    // The reducer is exact on the family; NULL bypass in the network can
    // still differ for families that leave NULL undefined.
    let agrees = domain.indices().all(|i| {
        let chained = apply_node(domain, &second.fr, apply_node(domain, &first.fr, i));
        chained == apply_node(domain, &merged, i)
    });
    agrees.then(|| Node::new(format!("{}_{}", first.id, second.id), merged))
}

// Merged names can collide with ids elsewhere in the network.
fn uniquify(mut stages: Vec<Stage>) -> Vec<Stage> {
    let mut seen = HashSet::new();
    for stage in &mut stages {
        let nodes: &mut [Node] = match stage {
            Stage::Sequential(node) => std::slice::from_mut(node),
            Stage::Parallel { nodes, .. } => nodes,
        };
        for node in nodes {
            if !seen.insert(node.id.clone()) {
                let mut k = 2;
                while seen.contains(&format!("{}_{k}", node.id)) {
                    k += 1;
                }
                node.id = format!("{}_{k}", node.id);
                seen.insert(node.id.clone());
            }
        }
    }
    stages
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::analysis::FunctionKind;
    use crate::families::{FamilyRule, ParamFamily};

    fn family(domain: &FiniteDomain, rule: FamilyRule) -> Arc<ParamFamily> {
        Arc::new(ParamFamily::new("f", domain.clone(), rule).unwrap())
    }

    fn node(id: &str, f: &Arc<ParamFamily>, v: usize) -> Node {
        Node::new(id, FunctionRep::new(f.clone(), v).unwrap())
    }

    fn memory_block(policy: ArbitrationPolicy) -> Network {
        let d = FiniteDomain::with_null("M8", 8).unwrap();
        let mem = family(&d, FamilyRule::ThresholdMemory { theta: 1 });
        Network::new(
            d,
            vec![Stage::Parallel {
                nodes: vec![node("m2", &mem, 2), node("m6", &mem, 6)],
                policy,
            }],
        )
        .unwrap()
    }

    #[test]
    fn run_affine_chain() {
        let d = FiniteDomain::plain("Z8", 8).unwrap();
        let add = family(&d, FamilyRule::AffineMod { a: 1 });
        let net = Network::chain(d, vec![node("a", &add, 3), node("b", &add, 5)]).unwrap();
        assert_eq!(net.run(6).unwrap(), 6);
        assert!(net.run(8).is_err());
    }

    #[test]
    fn parallel_memory_first_non_null() {
        let net = memory_block(ArbitrationPolicy::FirstNonNull);
        assert_eq!(net.run(5).unwrap(), 6);
        assert_eq!(net.run(2).unwrap(), 2);
        assert_eq!(net.run(4).unwrap(), 8);
        assert_eq!(net.run(8).unwrap(), 8);
    }

    #[test]
    fn parallel_memory_priority_and_best() {
        let d = FiniteDomain::with_null("M8", 8).unwrap();
        let mem = family(&d, FamilyRule::ThresholdMemory { theta: 2 });
        let nodes = vec![node("m2", &mem, 2), node("m6", &mem, 6)];
        let first = Network::new(
            d.clone(),
            vec![Stage::Parallel {
                nodes: nodes.clone(),
                policy: ArbitrationPolicy::FirstNonNull,
            }],
        )
        .unwrap();
        let prio = Network::new(
            d.clone(),
            vec![Stage::Parallel {
                nodes: nodes.clone(),
                policy: ArbitrationPolicy::Priority(vec!["m6".into(), "m2".into()]),
            }],
        )
        .unwrap();
        let best = Network::new(
            d,
            vec![Stage::Parallel {
                nodes,
                policy: ArbitrationPolicy::BestScore,
            }],
        )
        .unwrap();
        // input 4 is within 2 of both stored values
        assert_eq!(first.run(4).unwrap(), 2);
        assert_eq!(prio.run(4).unwrap(), 6);
        // equal distances: declaration order wins
        assert_eq!(best.run(4).unwrap(), 2);
        assert_eq!(best.run(5).unwrap(), 6);
        // nearest node recalls nothing beyond its threshold
        assert_eq!(best.run(0).unwrap(), 2);
        assert_eq!(best.run(8).unwrap(), 8);
    }

    #[test]
    fn construction_errors() {
        let d = FiniteDomain::plain("Z4", 4).unwrap();
        let other = FiniteDomain::plain("Z4b", 4).unwrap();
        let add = family(&d, FamilyRule::AffineMod { a: 1 });
        let foreign = family(&other, FamilyRule::AffineMod { a: 1 });

        assert!(Network::new(d.clone(), vec![]).is_err());
        assert!(Network::chain(d.clone(), vec![node("a", &add, 1), node("a", &add, 2)]).is_err());
        assert!(matches!(
            Network::chain(d.clone(), vec![node("a", &foreign, 1)]),
            Err(Error::DomainMismatch { .. })
        ));
        let empty = Stage::Parallel {
            nodes: vec![],
            policy: ArbitrationPolicy::FirstNonNull,
        };
        assert!(Network::new(d.clone(), vec![empty]).is_err());
        let best = Stage::Parallel {
            nodes: vec![node("a", &add, 1)],
            policy: ArbitrationPolicy::BestScore,
        };
        assert!(matches!(Network::new(d.clone(), vec![best]), Err(Error::Config(_))));
        for order in [vec!["a"], vec!["a", "a"], vec!["a", "zz"]] {
            let stage = Stage::Parallel {
                nodes: vec![node("a", &add, 1), node("b", &add, 2)],
                policy: ArbitrationPolicy::Priority(order.iter().map(|s| s.to_string()).collect()),
            };
            assert!(Network::new(d.clone(), vec![stage]).is_err(), "{order:?}");
        }
    }

    #[test]
    fn compose_table_examples() {
        let d = FiniteDomain::plain("Z4", 4).unwrap();
        let add = family(&d, FamilyRule::AffineMod { a: 1 });
        let single = Network::chain(d.clone(), vec![node("id", &add, 0)]).unwrap();
        assert_eq!(single.compose_table(), vec![0, 1, 2, 3]);
        let chain = Network::chain(d, vec![node("a", &add, 1), node("b", &add, 2)]).unwrap();
        assert_eq!(chain.compose_table(), vec![3, 0, 1, 2]);

        let z5 = FiniteDomain::plain("Z5", 5).unwrap();
        let sq = family(&z5, FamilyRule::PolyMod { e: 2 });
        let quartic = Network::chain(z5, vec![node("a", &sq, 0), node("b", &sq, 0)]).unwrap();
        assert_eq!(quartic.compose_table(), vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn reduce_chain_examples() {
        let d = FiniteDomain::plain("Z8", 8).unwrap();
        let add = family(&d, FamilyRule::AffineMod { a: 1 });
        let chain = Network::chain(
            d.clone(),
            vec![node("a", &add, 1), node("b", &add, 2), node("c", &add, 3)],
        )
        .unwrap();
        let reduced = reduce_chain(&chain);
        assert_eq!(reduced.stages().len(), 1);
        assert_eq!(reduced.stages()[0].nodes()[0].fr.param(), 6);
        assert_eq!(reduced.stages()[0].nodes()[0].id, "a_b_c");
        assert_eq!(reduced.compose_table(), chain.compose_table());

        let z5 = FiniteDomain::plain("Z5", 5).unwrap();
        let sq = family(&z5, FamilyRule::PolyMod { e: 2 });
        let quartic = Network::chain(z5, vec![node("a", &sq, 0), node("b", &sq, 0)]).unwrap();
        assert_eq!(reduce_chain(&quartic), quartic);

        let single = Network::chain(d, vec![node("a", &add, 4)]).unwrap();
        assert_eq!(reduce_chain(&single), single);
    }

    #[test]
    fn reduce_chain_folds_whole_multiplicative_chain() {
        // 2·3 ≡ 0 (mod 6), then 0·5 ≡ 0
        let d = FiniteDomain::plain("Z6", 6).unwrap();
        let mul = family(&d, FamilyRule::MulMod);
        let chain = Network::chain(d, vec![node("a", &mul, 2), node("b", &mul, 3), node("c", &mul, 5)]).unwrap();
        let reduced = reduce_chain(&chain);
        assert_eq!(reduced.stages().len(), 1);
        assert_eq!(reduced.stages()[0].nodes()[0].fr.param(), 0);
        assert_eq!(reduced.compose_table(), chain.compose_table());
    }

    #[test]
    fn reduce_chain_keeps_table_with_null_bypass() {
        // A table family that maps NULL somewhere else: merging through NULL
        // would change behaviour, so such a pair must stay separate.
        let d = FiniteDomain::with_null("D", 2).unwrap();
        // rows are inputs 0, 1, NULL; columns are params 0, 1, NULL
        let matrix = vec![vec![2, 1, 0], vec![2, 0, 1], vec![0, 0, 0]];
        let t = Arc::new(ParamFamily::table("t", d.clone(), matrix).unwrap());
        let chain = Network::chain(d, vec![node("a", &t, 0), node("b", &t, 1)]).unwrap();
        let reduced = reduce_chain(&chain);
        assert_eq!(reduced.compose_table(), chain.compose_table());
    }

    #[test]
    fn classify_network_examples() {
        let d = FiniteDomain::plain("Z8", 8).unwrap();
        let add = family(&d, FamilyRule::AffineMod { a: 3 });
        let bij = Network::chain(d.clone(), vec![node("a", &add, 1), node("b", &add, 7)]).unwrap();
        assert_eq!(classify_network(&bij).kind, FunctionKind::Associative);

        let zero = Arc::new(ParamFamily::table("zero", d.clone(), vec![vec![0; 8]; 8]).unwrap());
        let with_const = Network::chain(d, vec![node("a", &add, 1), node("z", &zero, 0)]).unwrap();
        let report = classify_network(&with_const);
        assert_eq!(report.kind, FunctionKind::Additive);
        assert_eq!(report.image_size, 1);

        let z5 = FiniteDomain::plain("Z5", 5).unwrap();
        let sq = family(&z5, FamilyRule::PolyMod { e: 2 });
        let quartic = Network::chain(z5, vec![node("a", &sq, 0), node("b", &sq, 0)]).unwrap();
        let report = classify_network(&quartic);
        assert_eq!(report.kind, FunctionKind::Additive);
        assert_eq!(report.image_size, 2);
    }
}
