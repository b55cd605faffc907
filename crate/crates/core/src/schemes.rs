//! Tree builders for every branching scheme the model evaluates.

use serde::{Deserialize, Serialize};

use crate::closed_form::{DualRiskSpec, DualScheme, TimingRiskSpec};
use crate::error::{finite, invalid, open_unit, ModelError, Result};
use crate::tree::ResolutionNode;

/// `(hi, p; lo, 1 − p)`.
pub fn build_binary_gamble(hi: f64, lo: f64, p: f64) -> Result<ResolutionNode> {
    open_unit("p", p)?;
    finite("hi", hi)?;
    finite("lo", lo)?;
    Ok(ResolutionNode::split(
        p,
        ResolutionNode::terminal(hi),
        ResolutionNode::terminal(lo),
    ))
}

/// Hazard chain of depth `n` that ends in `leaf` if every step survives.
fn chain_to(p: f64, n: u32, leaf: ResolutionNode) -> ResolutionNode {
    (0..n).fold(leaf, |next, _| {
        ResolutionNode::split(p, ResolutionNode::terminal(0.0), next)
    })
}

/// Unit reward after `n` steps; each step loses it with probability `p`.
pub fn build_hazard_chain(p: f64, n: u32) -> Result<ResolutionNode> {
    open_unit("p", p)?;
    if n < 1 {
        return Err(invalid("n", 0.0, "hazard chain needs at least one step"));
    }
    Ok(chain_to(p, n, ResolutionNode::terminal(1.0)))
}

/// Timing-risk tree.
///
/// Depths `0..n−1` hold the shared hazard steps `1..n−1`. The node at depth
/// `n − 1` resolves the timing and carries weight `k_tr`: the early branch
/// pays 1, the late branch runs hazard steps `n` and `n + 1` before paying.
pub fn build_timing_risk(spec: &TimingRiskSpec) -> ResolutionNode {
    let p = spec.p();
    let late = chain_to(p, 2, ResolutionNode::terminal(1.0));
    let timing = ResolutionNode::split(spec.p_tr(), ResolutionNode::terminal(1.0), late)
        .with_weight(spec.k_tr());
    chain_to(p, spec.n() - 1, timing)
}

fn prob_gamble(p_pr: f64) -> ResolutionNode {
    ResolutionNode::split(
        p_pr,
        ResolutionNode::terminal(1.0),
        ResolutionNode::terminal(0.0),
    )
}

/// Dual risk with the probabilistic risk resolved as its own node, after
/// or before the hazard chain.
pub fn build_dual_scheme_a(spec: &DualRiskSpec) -> Result<ResolutionNode> {
    let (p, n, p_pr) = (spec.p(), spec.n(), spec.p_pr());
    match spec.scheme() {
        DualScheme::SeparateAfter => Ok(chain_to(p, n, prob_gamble(p_pr))),
        DualScheme::SeparateBefore => Ok(ResolutionNode::split(
            p_pr,
            chain_to(p, n, ResolutionNode::terminal(1.0)),
            ResolutionNode::terminal(0.0),
        )),
        DualScheme::Incorporated => Err(ModelError::Unsupported(
            "scheme A builder needs a separate-after or separate-before spec".into(),
        )),
    }
}

/// Dual risk folded into the hazard: a plain chain at the inflated hazard.
pub fn build_dual_scheme_b(spec: &DualRiskSpec) -> Result<ResolutionNode> {
    let inflated = open_unit("inflated hazard", spec.inflated_hazard())?;
    build_hazard_chain(inflated, spec.n())
}

/// Dispatches on the spec's scheme.
pub fn build_dual(spec: &DualRiskSpec) -> Result<ResolutionNode> {
    match spec.scheme() {
        DualScheme::Incorporated => build_dual_scheme_b(spec),
        _ => build_dual_scheme_a(spec),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioVariant {
    /// Each step may complete the task (the good exit); running out of
    /// steps hits the deadline.
    Procrastination,
    /// Each step may break down with a stage-specific loss; surviving all
    /// stages concludes the agreement.
    Negotiation,
}

/// Chain-shaped scenario with a per-step exit branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub variant: ScenarioVariant,
    /// Completion (procrastination) or breakdown (negotiation) probability
    /// per step.
    pub step_probabilities: Vec<f64>,
    /// Payoff of leaving the chain at each step.
    pub exit_payoffs: Vec<f64>,
    /// Deadline loss (procrastination) or agreement payoff (negotiation).
    pub final_payoff: f64,
}

impl ScenarioSpec {
    pub fn horizon(&self) -> usize {
        self.step_probabilities.len()
    }

    fn validate(&self) -> Result<()> {
        if self.step_probabilities.is_empty() {
            return Err(invalid("horizon", 0.0, "scenario needs at least one step"));
        }
        if self.exit_payoffs.len() != self.step_probabilities.len() {
            return Err(ModelError::InvalidTree {
                path: "scenario".into(),
                reason: format!(
                    "{} step probabilities but {} exit payoffs",
                    self.step_probabilities.len(),
                    self.exit_payoffs.len()
                ),
            });
        }
        for &p in &self.step_probabilities {
            open_unit("step probability", p)?;
        }
        for &x in &self.exit_payoffs {
            finite("exit payoff", x)?;
        }
        finite("final payoff", self.final_payoff)?;
        Ok(())
    }
}

pub fn build_scenario(spec: &ScenarioSpec) -> Result<ResolutionNode> {
    spec.validate()?;
    let tree = spec
        .step_probabilities
        .iter()
        .zip(&spec.exit_payoffs)
        .rev()
        .fold(
            ResolutionNode::terminal(spec.final_payoff),
            |next, (&p, &exit)| ResolutionNode::split(p, ResolutionNode::terminal(exit), next),
        );
    Ok(tree)
}
