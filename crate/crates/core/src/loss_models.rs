//! Business lines and their state-conditional loss laws.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;
use thiserror::Error;

use crate::attack_graph::{AttackGraph, ExploitNetwork, GraphError, JointDistribution, NodeId, StateVector};
use crate::pricing::Policy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LineError {
    #[error("line {line}: trigger set is empty")]
    EmptyTriggerSet { line: u32 },
    #[error("line {line}: trigger node {node} is not in the graph")]
    UnknownTrigger { line: u32, node: NodeId },
    #[error("line {line}: trigger node {node} listed twice")]
    DuplicateTrigger { line: u32, node: NodeId },
    #[error("line index {0} used more than once")]
    DuplicateIndex(u32),
    #[error("line {line}: {msg}")]
    BadParameter { line: u32, msg: String },
    #[error("no line with index {0}")]
    UnknownLine(u32),
}

/// Conditional loss family of a line, parameterized per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Exponential with rate `sum_i a_i s_i`; zero when no trigger is exploited.
    RateSumExponential {
        #[serde(with = "node_keys")]
        rates: BTreeMap<NodeId, f64>,
    },
    /// `Lognormal(mu, sigma^2)` once any trigger is exploited.
    TriggeredLognormal { mu: f64, sigma: f64 },
    /// `Gamma(alpha, rate beta)` once any trigger is exploited.
    TriggeredGamma { alpha: f64, beta: f64 },
}

// JSON object keys are strings, and internally tagged enums buffer their
// content, so node ids are converted explicitly.
mod node_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::attack_graph::NodeId;

    pub fn serialize<S: Serializer>(map: &BTreeMap<NodeId, f64>, s: S) -> Result<S::Ok, S::Error> {
        map.iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<BTreeMap<String, f64>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<NodeId, f64>, D::Error> {
        BTreeMap::<String, f64>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.parse::<NodeId>()
                    .map(|id| (id, v))
                    .map_err(|_| D::Error::custom(format!("rate key `{k}` is not a node id")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusinessLine {
    pub index: u32,
    pub name: String,
    pub trigger_set: Vec<NodeId>,
    pub model: DistributionSpec,
}

impl BusinessLine {
    pub fn new(index: u32, name: impl Into<String>, trigger_set: Vec<NodeId>, model: DistributionSpec) -> Self {
        Self {
            index,
            name: name.into(),
            trigger_set,
            model,
        }
    }

    fn check(&self, n: usize) -> Result<(), LineError> {
        let line = self.index;
        if self.trigger_set.is_empty() {
            return Err(LineError::EmptyTriggerSet { line });
        }
        let mut seen = BTreeSet::new();
        for &node in &self.trigger_set {
            if node == 0 || node as usize > n {
                return Err(LineError::UnknownTrigger { line, node });
            }
            if !seen.insert(node) {
                return Err(LineError::DuplicateTrigger { line, node });
            }
        }
        let bad = |msg: String| Err(LineError::BadParameter { line, msg });
        match &self.model {
            DistributionSpec::RateSumExponential { rates } => {
                let keys: BTreeSet<NodeId> = rates.keys().copied().collect();
                if keys != seen {
                    return bad("rates must be given for exactly the trigger nodes".into());
                }
                if let Some((node, r)) = rates.iter().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
                    return bad(format!("rate {r} for node {node} must be positive"));
                }
            }
            DistributionSpec::TriggeredLognormal { mu, sigma } => {
                if !mu.is_finite() || !(sigma.is_finite() && *sigma > 0.0) {
                    return bad(format!("lognormal needs finite mu and sigma > 0 (mu={mu}, sigma={sigma})"));
                }
            }
            DistributionSpec::TriggeredGamma { alpha, beta } => {
                if !(alpha.is_finite() && *alpha > 0.0 && beta.is_finite() && *beta > 0.0) {
                    return bad(format!("gamma needs alpha > 0 and beta > 0 (alpha={alpha}, beta={beta})"));
                }
            }
        }
        Ok(())
    }

    /// Conditional law of the line's loss given a state.
    pub fn conditional_distribution(&self, state: &StateVector) -> ConditionalLoss {
        self.conditional_from(&state.states)
    }

    pub(crate) fn conditional_from(&self, states: &[bool]) -> ConditionalLoss {
        let hit = |id: &NodeId| states[*id as usize - 1];
        match &self.model {
            DistributionSpec::RateSumExponential { rates } => {
                let rate: f64 = self
                    .trigger_set
                    .iter()
                    .filter(|id| hit(id))
                    .map(|id| rates[id])
                    .sum();
                if rate > 0.0 {
                    ConditionalLoss::Exponential { rate }
                } else {
                    ConditionalLoss::Zero
                }
            }
            DistributionSpec::TriggeredLognormal { mu, sigma } if self.trigger_set.iter().any(hit) => {
                ConditionalLoss::Lognormal { mu: *mu, sigma: *sigma }
            }
            DistributionSpec::TriggeredGamma { alpha, beta } if self.trigger_set.iter().any(hit) => {
                ConditionalLoss::Gamma {
                    alpha: *alpha,
                    beta: *beta,
                }
            }
            _ => ConditionalLoss::Zero,
        }
    }

    pub fn sample_loss<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> f64 {
        self.conditional_distribution(state).sample(rng)
    }

    pub fn conditional_mean(&self, state: &StateVector) -> f64 {
        self.conditional_distribution(state).mean()
    }

    pub fn limited_expected_value(&self, state: &StateVector, policy: &Policy) -> f64 {
        self.conditional_distribution(state)
            .limited_expected_value(policy.deductible(), policy.coverage())
    }
}

/// A loss law after conditioning on the exploitation state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionalLoss {
    /// Point mass at 0.
    Zero,
    Exponential { rate: f64 },
    Lognormal { mu: f64, sigma: f64 },
    /// Shape `alpha`, rate `beta`.
    Gamma { alpha: f64, beta: f64 },
}

fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

impl ConditionalLoss {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, ConditionalLoss::Zero)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ConditionalLoss::Zero => 0.0,
            ConditionalLoss::Exponential { rate } => Exp::new(rate).expect("positive rate").sample(rng),
            ConditionalLoss::Lognormal { mu, sigma } => {
                LogNormal::new(mu, sigma).expect("positive sigma").sample(rng)
            }
            ConditionalLoss::Gamma { alpha, beta } => {
                Gamma::new(alpha, 1.0 / beta).expect("positive shape and scale").sample(rng)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ConditionalLoss::Zero => 0.0,
            ConditionalLoss::Exponential { rate } => 1.0 / rate,
            ConditionalLoss::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            ConditionalLoss::Gamma { alpha, beta } => alpha / beta,
        }
    }

    /// `E[min((L - d)+, c)]`, i.e. the integral of the survival function
    /// over `[d, d + c]`. `c` may be infinite.
    pub fn limited_expected_value(&self, d: f64, c: f64) -> f64 {
        let u = d + c;
        match *self {
            ConditionalLoss::Zero => 0.0,
            ConditionalLoss::Exponential { rate } => ((-rate * d).exp() - (-rate * u).exp()) / rate,
            ConditionalLoss::Lognormal { mu, sigma } => {
                let m = self.mean();
                let z = |x: f64| (x.ln() - mu) / sigma;
                let (zd, zu) = (z(d), z(u));
                let upper = if u.is_infinite() {
                    0.0
                } else {
                    u * normal_sf(zu) - m * normal_sf(zu - sigma)
                };
                m * normal_sf(zd - sigma) - d * normal_sf(zd) + upper
            }
            ConditionalLoss::Gamma { alpha, beta } => {
                let m = self.mean();
                let upper = if u.is_infinite() {
                    0.0
                } else {
                    u * gamma_ur(alpha, beta * u) - m * gamma_ur(alpha + 1.0, beta * u)
                };
                let lower = if d == 0.0 {
                    m
                } else {
                    m * gamma_ur(alpha + 1.0, beta * d) - d * gamma_ur(alpha, beta * d)
                };
                lower + upper
            }
        }
    }
}

/// Validated attack graph plus its business lines, in ascending line index.
#[derive(Debug, Clone)]
pub struct RiskModel {
    network: ExploitNetwork,
    lines: Vec<BusinessLine>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Line(#[from] LineError),
}

impl From<ModelError> for crate::Error {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Graph(g) => g.into(),
            ModelError::Line(l) => l.into(),
        }
    }
}

impl RiskModel {
    pub fn new(graph: &AttackGraph, mut lines: Vec<BusinessLine>) -> Result<Self, ModelError> {
        let network = graph.compile()?;
        let mut seen = BTreeSet::new();
        for line in &lines {
            if !seen.insert(line.index) {
                return Err(LineError::DuplicateIndex(line.index).into());
            }
            line.check(network.node_count())?;
        }
        lines.sort_by_key(|l| l.index);
        Ok(Self { network, lines })
    }

    pub fn network(&self) -> &ExploitNetwork {
        &self.network
    }

    pub fn lines(&self) -> &[BusinessLine] {
        &self.lines
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn node_count(&self) -> usize {
        self.network.node_count()
    }

    pub fn line(&self, index: u32) -> Result<&BusinessLine, LineError> {
        self.lines
            .iter()
            .find(|l| l.index == index)
            .ok_or(LineError::UnknownLine(index))
    }

    /// Position of line `index` in [`RiskModel::lines`].
    pub fn line_position(&self, index: u32) -> Result<usize, LineError> {
        self.lines
            .iter()
            .position(|l| l.index == index)
            .ok_or(LineError::UnknownLine(index))
    }

    /// One home-year: states parent-first, then one loss per line in
    /// ascending line order.
    pub(crate) fn draw_home<R: Rng + ?Sized>(&self, rng: &mut R, states: &mut [bool], losses: &mut [f64]) {
        self.network.sample_into(rng, states);
        for (line, out) in self.lines.iter().zip(losses.iter_mut()) {
            *out = line.conditional_from(states).sample(rng);
        }
    }

    /// `E[L_m] = sum_s Pr(s) E[L_m | s]`.
    pub fn exact_line_mean(&self, index: u32, joint: &JointDistribution) -> Result<f64, LineError> {
        let line = self.line(index)?;
        Ok(joint.expectation(|s| line.conditional_mean(s)))
    }

    /// `E[min((L_m - d)+, C)]` under the joint state law.
    pub fn exact_line_lev(&self, index: u32, joint: &JointDistribution, policy: &Policy) -> Result<f64, LineError> {
        let line = self.line(index)?;
        Ok(joint.expectation(|s| line.limited_expected_value(s, policy)))
    }
}

/// Line definitions of the seven-node smart-home example: data breach, loss
/// of use, ransomware, cyber extortion, online fraud, property theft.
pub fn case_study_lines() -> Vec<BusinessLine> {
    let rates = |pairs: &[(NodeId, f64)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
    vec![
        BusinessLine::new(
            1,
            "data breach",
            vec![1, 2, 3, 4, 7],
            DistributionSpec::RateSumExponential {
                rates: rates(&[(1, 1.0 / 160.0), (2, 1.0 / 32.0), (3, 1.0 / 80.0), (4, 1.0 / 80.0), (7, 1.0 / 160.0)]),
            },
        ),
        BusinessLine::new(
            2,
            "loss of use",
            vec![3, 5],
            DistributionSpec::RateSumExponential {
                rates: rates(&[(3, 1.0 / 640.0), (5, 1.0 / 320.0)]),
            },
        ),
        BusinessLine::new(3, "ransomware", vec![7], DistributionSpec::TriggeredLognormal { mu: 4.0, sigma: 1.0 }),
        BusinessLine::new(4, "cyber extortion", vec![5], DistributionSpec::TriggeredLognormal { mu: 7.0, sigma: 1.0 }),
        BusinessLine::new(5, "online fraud", vec![1], DistributionSpec::TriggeredGamma { alpha: 1000.0, beta: 1.0 }),
        BusinessLine::new(6, "property theft", vec![6], DistributionSpec::TriggeredGamma { alpha: 2000.0, beta: 1.0 }),
    ]
}
