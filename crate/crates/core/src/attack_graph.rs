//! Vulnerability DAG with noisy-OR exploitation.
//!
//! Nodes are vulnerabilities numbered `1..=n`. Entry nodes have no parents
//! and are exploited with their own probability (typically an EPSS score);
//! every other node is exploited through its exploited parents, each parent
//! `i` succeeding independently with probability `e_ij`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::CompensatedSum;
use crate::rng::{Domain, StreamFactory};

pub type NodeId = u32;

/// Largest node count for which the joint law is enumerated exactly.
pub const DEFAULT_ENUMERATION_CAP: usize = 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VulnNode {
    pub id: NodeId,
    /// Free text, usually a CVE identifier.
    #[serde(default)]
    pub label: String,
    /// Exploitation probability of an entry node. Must be absent on nodes
    /// with parents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_prob: Option<f64>,
    /// CVSS base score. Carried through untouched; no formula reads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cvss: Option<f64>,
}

impl VulnNode {
    pub fn entry(id: NodeId, label: impl Into<String>, p: f64) -> Self {
        Self {
            id,
            label: label.into(),
            entry_prob: Some(p),
            cvss: None,
        }
    }

    pub fn inner(id: NodeId, label: impl Into<String>) -> Self {
        Self {
            id,
            label: label.into(),
            entry_prob: None,
            cvss: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// `Pr(S_dst = 1 | S_src = 1)` in isolation.
    pub cond_prob: f64,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId, cond_prob: f64) -> Self {
        Self { src, dst, cond_prob }
    }
}

/// Raw graph as authored. Use [`AttackGraph::validate`] to list problems and
/// [`AttackGraph::compile`] to obtain an [`ExploitNetwork`] for computation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AttackGraph {
    pub nodes: Vec<VulnNode>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyGraph,
    DuplicateNode(NodeId),
    /// Node ids must be exactly `1..=n`.
    NodeIdOutOfRange { id: NodeId, n: usize },
    EntryProbOutOfRange { node: NodeId, p: f64 },
    MissingEntryProb(NodeId),
    EntryProbOnParentedNode(NodeId),
    CondProbOutOfRange { src: NodeId, dst: NodeId, p: f64 },
    SelfLoop(NodeId),
    DuplicateEdge { src: NodeId, dst: NodeId },
    UnknownEndpoint { src: NodeId, dst: NodeId, missing: NodeId },
    /// Nodes that cannot be ordered parent-first.
    Cycle(Vec<NodeId>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGraph => write!(f, "graph has no nodes"),
            Violation::DuplicateNode(id) => write!(f, "duplicate node id {id}"),
            Violation::NodeIdOutOfRange { id, n } => {
                write!(f, "node id {id} outside 1..={n}")
            }
            Violation::EntryProbOutOfRange { node, p } => {
                write!(f, "node {node}: entry_prob {p} outside [0, 1]")
            }
            Violation::MissingEntryProb(id) => {
                write!(f, "node {id}: parentless node needs entry_prob")
            }
            Violation::EntryProbOnParentedNode(id) => {
                write!(f, "node {id}: entry_prob on parented node")
            }
            Violation::CondProbOutOfRange { src, dst, p } => {
                write!(f, "edge {src}->{dst}: cond_prob {p} outside [0, 1]")
            }
            Violation::SelfLoop(id) => write!(f, "edge {id}->{id}: self-loop"),
            Violation::DuplicateEdge { src, dst } => write!(f, "edge {src}->{dst}: duplicate"),
            Violation::UnknownEndpoint { src, dst, missing } => {
                write!(f, "edge {src}->{dst}: unknown node {missing}")
            }
            Violation::Cycle(ids) => {
                let ids: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
                write!(f, "cycle through nodes {}", ids.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid attack graph: {0}")]
    Invalid(ValidationReport),
    #[error("graph has {n} nodes, above the enumeration cap of {cap}")]
    EnumerationTooLarge { n: usize, cap: usize },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("state vector has length {got}, expected {expected}")]
    StateLength { expected: usize, got: usize },
}

/// One exploitation outcome per node; index `i` holds node `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector {
    pub states: Vec<bool>,
}

impl StateVector {
    pub fn new(states: Vec<bool>) -> Self {
        Self { states }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            states: vec![false; n],
        }
    }

    /// Bit `i` of `mask` is the state of node `i + 1`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self {
            states: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    /// State with exactly the listed nodes exploited.
    pub fn with_exploited(n: usize, exploited: &[NodeId]) -> Self {
        let mut s = Self::zeros(n);
        for &id in exploited {
            s.states[id as usize - 1] = true;
        }
        s
    }

    pub fn mask(&self) -> u64 {
        self.states
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| m | (u64::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_exploited(&self, id: NodeId) -> bool {
        self.states[id as usize - 1]
    }
}

impl AttackGraph {
    pub fn new(nodes: Vec<VulnNode>, edges: Vec<Edge>) -> Self {
        Self { nodes, edges }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Lists every invariant breach; an empty report means the graph can be
    /// compiled.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.nodes.len();
        if n == 0 {
            violations.push(Violation::EmptyGraph);
        }

        let mut seen = BTreeSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id) {
                violations.push(Violation::DuplicateNode(node.id));
            }
            if node.id == 0 || node.id as usize > n {
                violations.push(Violation::NodeIdOutOfRange { id: node.id, n });
            }
            if let Some(p) = node.entry_prob {
                if !(0.0..=1.0).contains(&p) {
                    violations.push(Violation::EntryProbOutOfRange { node: node.id, p });
                }
            }
        }

        let mut pairs = BTreeSet::new();
        let mut parented = BTreeSet::new();
        for e in &self.edges {
            if !(0.0..=1.0).contains(&e.cond_prob) {
                violations.push(Violation::CondProbOutOfRange {
                    src: e.src,
                    dst: e.dst,
                    p: e.cond_prob,
                });
            }
            if e.src == e.dst {
                violations.push(Violation::SelfLoop(e.src));
            }
            if !pairs.insert((e.src, e.dst)) {
                violations.push(Violation::DuplicateEdge { src: e.src, dst: e.dst });
            }
            for end in [e.src, e.dst] {
                if !seen.contains(&end) {
                    violations.push(Violation::UnknownEndpoint {
                        src: e.src,
                        dst: e.dst,
                        missing: end,
                    });
                }
            }
            parented.insert(e.dst);
        }

        for node in &self.nodes {
            let has_parents = parented.contains(&node.id);
            match (has_parents, node.entry_prob.is_some()) {
                (false, false) => violations.push(Violation::MissingEntryProb(node.id)),
                (true, true) => violations.push(Violation::EntryProbOnParentedNode(node.id)),
                _ => {}
            }
        }

        let (_, stuck) = self.kahn_order();
        if !stuck.is_empty() {
            violations.push(Violation::Cycle(stuck));
        }

        ValidationReport { violations }
    }

    /// Kahn's algorithm with ascending-id tie-breaking over known nodes and
    /// edges between known nodes. Returns the order and the nodes left on
    /// cycles.
    fn kahn_order(&self) -> (Vec<NodeId>, Vec<NodeId>) {
        let ids: BTreeSet<NodeId> = self.nodes.iter().map(|n| n.id).collect();
        let mut indegree: BTreeMap<NodeId, usize> = ids.iter().map(|&i| (i, 0)).collect();
        let mut children: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for e in &self.edges {
            if ids.contains(&e.src) && ids.contains(&e.dst) && children.entry(e.src).or_default().insert(e.dst) {
                *indegree.get_mut(&e.dst).expect("known node") += 1;
            }
        }
        let mut frontier: Vec<NodeId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&i, _)| i)
            .collect();
        let mut order = Vec::with_capacity(ids.len());
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for &id in &frontier {
                order.push(id);
                for k in children.get(&id).into_iter().flatten() {
                    let d = indegree.get_mut(k).expect("known node");
                    *d -= 1;
                    if *d == 0 {
                        next.insert(*k);
                    }
                }
            }
            frontier = next.into_iter().collect();
        }
        let placed: BTreeSet<NodeId> = order.iter().copied().collect();
        let stuck = ids.difference(&placed).copied().collect();
        (order, stuck)
    }

    /// Parent-first order built level by level, ascending id within a level.
    pub fn topological_order(&self) -> Result<Vec<NodeId>, GraphError> {
        let (order, stuck) = self.kahn_order();
        if stuck.is_empty() {
            Ok(order)
        } else {
            Err(GraphError::Invalid(ValidationReport {
                violations: vec![Violation::Cycle(stuck)],
            }))
        }
    }

    pub fn compile(&self) -> Result<ExploitNetwork, GraphError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(GraphError::Invalid(report));
        }
        let n = self.nodes.len();
        let mut labels = vec![String::new(); n];
        let mut entry = vec![None; n];
        for node in &self.nodes {
            let i = node.id as usize - 1;
            labels[i] = node.label.clone();
            entry[i] = node.entry_prob;
        }
        let mut parents = vec![Vec::new(); n];
        for e in &self.edges {
            parents[e.dst as usize - 1].push((e.src as usize - 1, e.cond_prob));
        }
        for p in &mut parents {
            p.sort_by_key(|&(i, _)| i);
        }
        let order = self
            .topological_order()?
            .into_iter()
            .map(|id| id as usize - 1)
            .collect();
        Ok(ExploitNetwork {
            labels,
            entry,
            parents,
            order,
        })
    }
}

/// Validated, index-based form of an [`AttackGraph`]. Immutable and cheap to
/// share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploitNetwork {
    labels: Vec<String>,
    entry: Vec<Option<f64>>,
    /// `(parent index, e_ij)` sorted by parent index.
    parents: Vec<Vec<(usize, f64)>>,
    order: Vec<usize>,
}

impl ExploitNetwork {
    pub fn node_count(&self) -> usize {
        self.entry.len()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get((id as usize).wrapping_sub(1)).map(String::as_str)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id >= 1 && id as usize <= self.node_count()
    }

    /// Parent-first node ids.
    pub fn order(&self) -> Vec<NodeId> {
        self.order.iter().map(|&i| i as NodeId + 1).collect()
    }

    pub fn parents(&self, id: NodeId) -> Vec<(NodeId, f64)> {
        self.parents[id as usize - 1]
            .iter()
            .map(|&(i, e)| (i as NodeId + 1, e))
            .collect()
    }

    #[inline]
    fn prob_at(&self, idx: usize, exploited: impl Fn(usize) -> bool) -> f64 {
        if let Some(p) = self.entry[idx] {
            return p;
        }
        let mut survive = 1.0;
        let mut any = false;
        for &(parent, e) in &self.parents[idx] {
            if exploited(parent) {
                any = true;
                survive *= 1.0 - e;
            }
        }
        if any {
            1.0 - survive
        } else {
            0.0
        }
    }

    /// `Pr(S_node = 1 | parents)` under the noisy-OR rule. Only the parent
    /// entries of `state` are read.
    pub fn conditional_exploit_prob(&self, node: NodeId, state: &StateVector) -> Result<f64, GraphError> {
        if !self.contains(node) {
            return Err(GraphError::UnknownNode(node));
        }
        self.check_len(state)?;
        Ok(self.prob_at(node as usize - 1, |i| state.states[i]))
    }

    fn check_len(&self, state: &StateVector) -> Result<(), GraphError> {
        if state.len() != self.node_count() {
            return Err(GraphError::StateLength {
                expected: self.node_count(),
                got: state.len(),
            });
        }
        Ok(())
    }

    /// Probability of one full state, as the parent-first product of
    /// conditional terms.
    pub fn state_probability(&self, state: &StateVector) -> Result<f64, GraphError> {
        self.check_len(state)?;
        Ok(self.order.iter().fold(1.0, |acc, &i| {
            let p = self.prob_at(i, |j| state.states[j]);
            acc * if state.states[i] { p } else { 1.0 - p }
        }))
    }

    /// Exact law over all `2^n` states.
    pub fn enumerate_joint(&self, cap: usize) -> Result<JointDistribution, GraphError> {
        let n = self.node_count();
        if n > cap || n >= 64 {
            return Err(GraphError::EnumerationTooLarge { n, cap });
        }
        let mut probs = vec![0.0; 1usize << n];
        self.expand(0, 0, 1.0, &mut probs);
        Ok(JointDistribution { n, probs })
    }

    fn expand(&self, depth: usize, mask: u64, prob: f64, out: &mut [f64]) {
        if depth == self.order.len() {
            out[mask as usize] = prob;
            return;
        }
        let i = self.order[depth];
        let p = self.prob_at(i, |j| mask >> j & 1 == 1);
        self.expand(depth + 1, mask | 1 << i, prob * p, out);
        self.expand(depth + 1, mask, prob * (1.0 - p), out);
    }

    /// Draws node states parent-first; one uniform per node.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, states: &mut [bool]) {
        debug_assert_eq!(states.len(), self.node_count());
        for &i in &self.order {
            let p = self.prob_at(i, |j| states[j]);
            states[i] = rng.random::<f64>() < p;
        }
    }

    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StateVector {
        let mut states = vec![false; self.node_count()];
        self.sample_into(rng, &mut states);
        StateVector { states }
    }

    /// Exact per-node exploitation probabilities.
    pub fn marginal_exploit_probs(&self, cap: usize) -> Result<Vec<f64>, GraphError> {
        Ok(self.enumerate_joint(cap)?.marginals())
    }

    /// Exact marginals when `n <= cap`; otherwise a Monte Carlo estimate
    /// from `samples` draws with per-node standard errors.
    pub fn marginal_estimate(&self, cap: usize, samples: usize, seed: u64) -> MarginalEstimate {
        match self.marginal_exploit_probs(cap) {
            Ok(probs) => MarginalEstimate {
                probs,
                std_errors: None,
            },
            Err(_) => {
                let factory = StreamFactory::new(seed, Domain::StateSampling);
                let mut rng = factory.stream(0, 0);
                let n = self.node_count();
                let mut counts = vec![0u64; n];
                let mut states = vec![false; n];
                for _ in 0..samples {
                    self.sample_into(&mut rng, &mut states);
                    for (c, &s) in counts.iter_mut().zip(&states) {
                        *c += u64::from(s);
                    }
                }
                let r = samples.max(1) as f64;
                let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / r).collect();
                let std_errors = probs.iter().map(|p| (p * (1.0 - p) / r).sqrt()).collect();
                MarginalEstimate {
                    probs,
                    std_errors: Some(std_errors),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalEstimate {
    pub probs: Vec<f64>,
    /// Present only for Monte Carlo estimates.
    pub std_errors: Option<Vec<f64>>,
}

/// Exact state law indexed by bit mask (bit `i` = node `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of_mask(&self, mask: u64) -> f64 {
        self.probs[mask as usize]
    }

    pub fn prob(&self, state: &StateVector) -> f64 {
        self.probs[state.mask() as usize]
    }

    /// Compensated total; equals 1 up to rounding.
    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateVector, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, &p)| (StateVector::from_mask(m as u64, self.n), p))
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.probs
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| m >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    /// `E[f(S)]`, accumulated with compensation.
    pub fn expectation(&self, mut f: impl FnMut(&StateVector) -> f64) -> f64 {
        self.iter()
            .filter(|(_, p)| *p != 0.0)
            .map(|(s, p)| p * f(&s))
            .collect::<CompensatedSum>()
            .value()
    }
}

/// The seven-node smart-home graph used throughout the examples: entry
/// nodes 1, 2, 7 and every arc with `e_ij = .01`.
pub fn case_study_graph() -> AttackGraph {
    let nodes = vec![
        VulnNode::entry(1, "CVE-2022-22667", 0.01),
        VulnNode::entry(2, "CVE-2020-27403", 0.02),
        VulnNode::inner(3, "CVE-2018-3919"),
        VulnNode::inner(4, "CVE-2021-29438"),
        VulnNode::inner(5, "CVE-2021-32934"),
        VulnNode::inner(6, "CVE-2019-7256"),
        VulnNode::entry(7, "CVE-2017-8759", 0.9),
    ];
    let edges = [(1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (7, 5), (7, 6)]
        .into_iter()
        .map(|(s, d)| Edge::new(s, d, 0.01))
        .collect();
    AttackGraph::new(nodes, edges)
}
