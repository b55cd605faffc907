//! Outcome-resolution trees and their exhaustive evaluation.
//!
//! A tree describes how the outcome of an option is mentally resolved, one
//! stage per level. Each internal node is a set of probabilistic branches;
//! each terminal carries a payoff. The surprise generated at stage `t` is the
//! reach-weighted sum, over internal nodes at depth `t - 1`, of the expected
//! kernel value of the expectation errors produced by their branches.
//!
//! Evaluation enumerates every node; there is no sampling.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{ModelParams, SurpriseValue};

/// Tolerance on the sum of branch probabilities at a node.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ResolutionNode {
    Terminal {
        payoff: f64,
    },
    Internal {
        branches: Vec<Branch>,
        /// Multiplies the surprise contributed by this node only.
        surprise_weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub child: ResolutionNode,
}

impl Branch {
    pub fn new(probability: f64, child: ResolutionNode) -> Self {
        Branch { probability, child }
    }
}

/// Outcome of [`ResolutionNode::evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult {
    /// Expected payoff `U0`.
    pub expected_value: f64,
    /// `Δ_t` for `t = 1..=depth`, stored at index `t - 1`.
    pub stage_surprises: Vec<f64>,
    pub total_surprise: f64,
    pub utility: f64,
}

/// Surprise generated by one internal node, before and after reach weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeContribution {
    pub path: String,
    pub depth: usize,
    pub reach_probability: f64,
    /// `surprise_weight · Σ_b p_b δ(E_b − E_v)`.
    pub local_surprise: f64,
}

impl NodeContribution {
    pub fn weighted(&self) -> f64 {
        self.reach_probability * self.local_surprise
    }
}

/// Nodes whose probabilities were rescaled to sum exactly to one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub renormalized: Vec<Renormalization>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Renormalization {
    pub path: String,
    pub original_sum: f64,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.renormalized.is_empty()
    }
}

fn child_path(path: &str, index: usize) -> String {
    format!("{path}/{index}")
}

impl ResolutionNode {
    pub fn terminal(payoff: f64) -> Self {
        ResolutionNode::Terminal { payoff }
    }

    /// Internal node with unit surprise weight; validated immediately.
    pub fn internal(branches: Vec<Branch>) -> Result<Self> {
        let node = ResolutionNode::Internal {
            branches,
            surprise_weight: 1.0,
        };
        node.validate_local("root")?;
        Ok(node)
    }

    /// Two-way split `(p → first, 1 − p → second)` for builders whose `p` is
    /// already known to lie in `(0, 1)`.
    pub(crate) fn split(p: f64, first: ResolutionNode, second: ResolutionNode) -> Self {
        ResolutionNode::Internal {
            branches: vec![Branch::new(p, first), Branch::new(1.0 - p, second)],
            surprise_weight: 1.0,
        }
    }

    /// Sets the surprise weight; no effect on terminals.
    pub fn with_weight(mut self, weight: f64) -> Self {
        if let ResolutionNode::Internal {
            surprise_weight, ..
        } = &mut self
        {
            *surprise_weight = weight;
        }
        self
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, ResolutionNode::Terminal { .. })
    }

    /// Number of resolution stages (longest root-to-terminal path).
    pub fn depth(&self) -> usize {
        match self {
            ResolutionNode::Terminal { .. } => 0,
            ResolutionNode::Internal { branches, .. } => {
                1 + branches.iter().map(|b| b.child.depth()).max().unwrap_or(0)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ResolutionNode::Terminal { .. } => 1,
            ResolutionNode::Internal { branches, .. } => {
                1 + branches.iter().map(|b| b.child.node_count()).sum::<usize>()
            }
        }
    }

    /// All terminal payoffs in depth-first order.
    pub fn payoffs(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_payoffs(&mut out);
        out
    }

    fn collect_payoffs(&self, out: &mut Vec<f64>) {
        match self {
            ResolutionNode::Terminal { payoff } => out.push(*payoff),
            ResolutionNode::Internal { branches, .. } => {
                for b in branches {
                    b.child.collect_payoffs(out);
                }
            }
        }
    }

    /// Smallest and largest terminal payoff.
    pub fn payoff_range(&self) -> (f64, f64) {
        self.payoffs()
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            })
    }

    /// Copy of the tree with every terminal payoff passed through `f`.
    pub fn map_payoffs<F: Fn(f64) -> f64>(&self, f: &F) -> ResolutionNode {
        match self {
            ResolutionNode::Terminal { payoff } => ResolutionNode::Terminal { payoff: f(*payoff) },
            ResolutionNode::Internal {
                branches,
                surprise_weight,
            } => ResolutionNode::Internal {
                branches: branches
                    .iter()
                    .map(|b| Branch::new(b.probability, b.child.map_payoffs(f)))
                    .collect(),
                surprise_weight: *surprise_weight,
            },
        }
    }

    fn validate_local(&self, path: &str) -> Result<()> {
        match self {
            ResolutionNode::Terminal { payoff } => {
                if !payoff.is_finite() {
                    return Err(ModelError::InvalidTree {
                        path: path.to_string(),
                        reason: format!("payoff {payoff} is not finite"),
                    });
                }
            }
            ResolutionNode::Internal {
                branches,
                surprise_weight,
            } => {
                if branches.is_empty() {
                    return Err(ModelError::InvalidTree {
                        path: path.to_string(),
                        reason: "internal node has no branches".into(),
                    });
                }
                if !surprise_weight.is_finite() || *surprise_weight < 0.0 {
                    return Err(ModelError::InvalidTree {
                        path: path.to_string(),
                        reason: format!(
                            "surprise weight {surprise_weight} must be finite and >= 0"
                        ),
                    });
                }
                for (i, b) in branches.iter().enumerate() {
                    let p = b.probability;
                    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
                        return Err(ModelError::InvalidTree {
                            path: child_path(path, i),
                            reason: format!("branch probability {p} outside (0, 1]"),
                        });
                    }
                }
                let sum: f64 = branches.iter().map(|b| b.probability).sum();
                if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                    return Err(ModelError::ProbabilitySum {
                        path: path.to_string(),
                        sum,
                    });
                }
            }
        }
        Ok(())
    }

    fn validate_at(&self, path: &str) -> Result<()> {
        self.validate_local(path)?;
        if let ResolutionNode::Internal { branches, .. } = self {
            for (i, b) in branches.iter().enumerate() {
                b.child.validate_at(&child_path(path, i))?;
            }
        }
        Ok(())
    }

    /// Checks finiteness, branch probabilities and their sums.
    pub fn validate(&self) -> Result<()> {
        self.validate_at("root")
    }

    /// Validates, then rescales every branch set whose sum is within
    /// [`PROBABILITY_TOLERANCE`] of one (but not exactly one) by its sum.
    pub fn normalized(&self) -> Result<(ResolutionNode, ValidationReport)> {
        self.validate()?;
        let mut report = ValidationReport::default();
        let node = self.renormalize("root", &mut report);
        Ok((node, report))
    }

    fn renormalize(&self, path: &str, report: &mut ValidationReport) -> ResolutionNode {
        match self {
            ResolutionNode::Terminal { .. } => self.clone(),
            ResolutionNode::Internal {
                branches,
                surprise_weight,
            } => {
                let sum: f64 = branches.iter().map(|b| b.probability).sum();
                let scale = if sum == 1.0 {
                    None
                } else {
                    report.renormalized.push(Renormalization {
                        path: path.to_string(),
                        original_sum: sum,
                    });
                    Some(sum)
                };
                ResolutionNode::Internal {
                    branches: branches
                        .iter()
                        .enumerate()
                        .map(|(i, b)| {
                            let p = scale.map_or(b.probability, |s| b.probability / s);
                            Branch::new(p, b.child.renormalize(&child_path(path, i), report))
                        })
                        .collect(),
                    surprise_weight: *surprise_weight,
                }
            }
        }
    }

    fn expected_unchecked(&self) -> f64 {
        match self {
            ResolutionNode::Terminal { payoff } => *payoff,
            ResolutionNode::Internal { branches, .. } => branches
                .iter()
                .map(|b| b.probability * b.child.expected_unchecked())
                .sum(),
        }
    }

    /// Probability-weighted mean payoff.
    pub fn expected_value(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.expected_unchecked())
    }

    /// `Δ_t` per depth, computed level by level.
    pub fn stage_surprises(&self, params: &ModelParams) -> Result<Vec<f64>> {
        self.validate()?;
        let annotated = Annotated::build(self);
        Ok(annotated.stage_surprises(params))
    }

    /// Per-node surprise contributions, collected depth-first.
    pub fn node_contributions(&self, params: &ModelParams) -> Result<Vec<NodeContribution>> {
        self.validate()?;
        let mut out = Vec::new();
        self.contribute("root", 0, 1.0, params, &mut out);
        Ok(out)
    }

    // Returns this node's expected value.
    fn contribute(
        &self,
        path: &str,
        depth: usize,
        reach: f64,
        params: &ModelParams,
        out: &mut Vec<NodeContribution>,
    ) -> f64 {
        match self {
            ResolutionNode::Terminal { payoff } => *payoff,
            ResolutionNode::Internal {
                branches,
                surprise_weight,
            } => {
                let slot = out.len();
                out.push(NodeContribution {
                    path: path.to_string(),
                    depth,
                    reach_probability: reach,
                    local_surprise: 0.0,
                });
                let child_values: Vec<f64> = branches
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        b.child.contribute(
                            &child_path(path, i),
                            depth + 1,
                            reach * b.probability,
                            params,
                            out,
                        )
                    })
                    .collect();
                let ev: f64 = branches
                    .iter()
                    .zip(&child_values)
                    .map(|(b, v)| b.probability * v)
                    .sum();
                let local: f64 = branches
                    .iter()
                    .zip(&child_values)
                    .map(|(b, v)| b.probability * params.kernel(v - ev))
                    .sum();
                out[slot].local_surprise = surprise_weight * local;
                ev
            }
        }
    }

    /// Full evaluation: `U0`, `Δ_t`, `Δ` and `U = U0 · g(Δ)`.
    pub fn evaluate(&self, params: &ModelParams) -> Result<EvaluationResult> {
        self.validate()?;
        let annotated = Annotated::build(self);
        let stage_surprises = annotated.stage_surprises(params);
        let total_surprise: f64 = stage_surprises.iter().sum();
        let expected_value = annotated.expected_value;
        let utility =
            crate::model::utility(expected_value, SurpriseValue::new(total_surprise)?, params);
        Ok(EvaluationResult {
            expected_value,
            stage_surprises,
            total_surprise,
            utility,
        })
    }

    /// `Σ_b p_b (E_b − E_v)` at every internal node, keyed by path.
    pub fn martingale_residuals(&self) -> Result<Vec<(String, f64)>> {
        self.validate()?;
        let mut out = Vec::new();
        Annotated::build(self).residuals("root", &mut out);
        Ok(out)
    }

    /// Removes internal nodes that consist of a single probability-one
    /// branch. Such nodes produce no expectation error, so evaluation is
    /// unchanged apart from the depth indexing of later stages.
    pub fn collapse_deterministic(&self) -> ResolutionNode {
        match self {
            ResolutionNode::Terminal { .. } => self.clone(),
            ResolutionNode::Internal {
                branches,
                surprise_weight,
            } => {
                if branches.len() == 1 {
                    return branches[0].child.collapse_deterministic();
                }
                ResolutionNode::Internal {
                    branches: branches
                        .iter()
                        .map(|b| Branch::new(b.probability, b.child.collapse_deterministic()))
                        .collect(),
                    surprise_weight: *surprise_weight,
                }
            }
        }
    }

    /// Parses the JSON tree format and renormalizes within tolerance.
    pub fn from_json(text: &str) -> Result<(ResolutionNode, ValidationReport)> {
        let spec: NodeSpec =
            serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        ResolutionNode::from(spec).normalized()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&NodeSpec::from(self)).expect("tree serialization is infallible")
    }
}

/// Tree with the expected value cached at every node.
struct Annotated<'a> {
    node: &'a ResolutionNode,
    expected_value: f64,
    children: Vec<(f64, Annotated<'a>)>,
}

impl<'a> Annotated<'a> {
    fn build(node: &'a ResolutionNode) -> Self {
        match node {
            ResolutionNode::Terminal { payoff } => Annotated {
                node,
                expected_value: *payoff,
                children: Vec::new(),
            },
            ResolutionNode::Internal { branches, .. } => {
                let children: Vec<(f64, Annotated<'a>)> = branches
                    .iter()
                    .map(|b| (b.probability, Annotated::build(&b.child)))
                    .collect();
                let expected_value = children.iter().map(|(p, c)| p * c.expected_value).sum();
                Annotated {
                    node,
                    expected_value,
                    children,
                }
            }
        }
    }

    fn local_surprise(&self, params: &ModelParams) -> f64 {
        let weight = match self.node {
            ResolutionNode::Internal {
                surprise_weight, ..
            } => *surprise_weight,
            ResolutionNode::Terminal { .. } => return 0.0,
        };
        let local: f64 = self
            .children
            .iter()
            .map(|(p, c)| p * params.kernel(c.expected_value - self.expected_value))
            .sum();
        weight * local
    }

    fn stage_surprises(&self, params: &ModelParams) -> Vec<f64> {
        let mut stages = Vec::new();
        let mut frontier: Vec<(f64, &Annotated<'a>)> = vec![(1.0, self)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            let mut stage = 0.0;
            let mut any_internal = false;
            for (reach, node) in frontier {
                if node.children.is_empty() {
                    continue;
                }
                any_internal = true;
                stage += reach * node.local_surprise(params);
                for (p, child) in &node.children {
                    next.push((reach * p, child));
                }
            }
            if any_internal {
                stages.push(stage);
            }
            frontier = next;
        }
        stages
    }

    fn residuals(&self, path: &str, out: &mut Vec<(String, f64)>) {
        if self.children.is_empty() {
            return;
        }
        let r: f64 = self
            .children
            .iter()
            .map(|(p, c)| p * (c.expected_value - self.expected_value))
            .sum();
        out.push((path.to_string(), r));
        for (i, (_, c)) in self.children.iter().enumerate() {
            c.residuals(&child_path(path, i), out);
        }
    }
}

/// Serialized form: `{"payoff": x}` or
/// `{"branches": [{"p": x, "node": ...}, ...], "weight": w}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum NodeSpec {
    Terminal {
        payoff: f64,
    },
    Internal {
        branches: Vec<BranchSpec>,
        #[serde(default = "unit_weight", skip_serializing_if = "is_unit")]
        weight: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchSpec {
    p: f64,
    node: NodeSpec,
}

fn unit_weight() -> f64 {
    1.0
}

fn is_unit(w: &f64) -> bool {
    *w == 1.0
}

impl From<NodeSpec> for ResolutionNode {
    fn from(spec: NodeSpec) -> Self {
        match spec {
            NodeSpec::Terminal { payoff } => ResolutionNode::Terminal { payoff },
            NodeSpec::Internal { branches, weight } => ResolutionNode::Internal {
                branches: branches
                    .into_iter()
                    .map(|b| Branch::new(b.p, b.node.into()))
                    .collect(),
                surprise_weight: weight,
            },
        }
    }
}

impl From<&ResolutionNode> for NodeSpec {
    fn from(node: &ResolutionNode) -> Self {
        match node {
            ResolutionNode::Terminal { payoff } => NodeSpec::Terminal { payoff: *payoff },
            ResolutionNode::Internal {
                branches,
                surprise_weight,
            } => NodeSpec::Internal {
                branches: branches
                    .iter()
                    .map(|b| BranchSpec {
                        p: b.probability,
                        node: (&b.child).into(),
                    })
                    .collect(),
                weight: *surprise_weight,
            },
        }
    }
}
