//! One entry point for evaluating any named scheme or an explicit tree.
//!
//! Named schemes use the closed forms; trees (and gambles, whose payoffs are
//! arbitrary) go through the exhaustive evaluator with outcome scaling.

use serde::Serialize;

use crate::closed_form::{
    discount_factor, discount_ratio, dual_surprise, hazard_total_surprise, timing_components,
    timing_ratio, DualRiskSpec, HazardSpec, TimingRiskSpec,
};
use crate::error::{ModelError, Result};
use crate::model::ModelParams;
use crate::scaling::{derive_transform, evaluate_scaled, ScalingMode};
use crate::schemes::build_binary_gamble;
use crate::tree::ResolutionNode;

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    Gamble { hi: f64, lo: f64, p: f64 },
    Hazard(HazardSpec),
    Timing(TimingRiskSpec),
    Dual(DualRiskSpec),
    Tree(ResolutionNode),
}

impl Scheme {
    pub fn id(&self) -> &'static str {
        match self {
            Scheme::Gamble { .. } => "gamble",
            Scheme::Hazard(_) => "hazard",
            Scheme::Timing(_) => "timing",
            Scheme::Dual(d) => d.scheme().id(),
            Scheme::Tree(_) => "tree",
        }
    }

    /// Named parameters in output-column order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self {
            Scheme::Gamble { hi, lo, p } => vec![("hi", *hi), ("lo", *lo), ("p", *p)],
            Scheme::Hazard(h) => vec![("p", h.p()), ("n", h.n())],
            Scheme::Timing(t) => vec![
                ("p", t.p()),
                ("n", t.n() as f64),
                ("p_tr", t.p_tr()),
                ("k_tr", t.k_tr()),
            ],
            Scheme::Dual(d) => vec![
                ("p", d.p()),
                ("n", d.n() as f64),
                ("p_pr", d.p_pr()),
                ("k2_prob", d.k2_prob()),
            ],
            Scheme::Tree(_) => Vec::new(),
        }
    }

    /// Name of the scheme-specific derived quantity, if any.
    pub fn extra_column(&self) -> Option<&'static str> {
        match self {
            Scheme::Timing(_) => Some("ratio"),
            Scheme::Dual(_) => Some("d"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeEvaluation {
    /// Expected payoff on the original scale.
    pub u0: f64,
    /// Total surprise (of the scaled problem when scaling applies).
    pub delta: f64,
    pub utility: f64,
    /// `U_tr/U_fix` for timing risk, the discount ratio `D` for dual risk.
    pub extra: Option<f64>,
}

// Closed-form schemes pay 0 or 1, so only an explicit transform changes them.
fn require_unit_scale(scaling: ScalingMode, scheme: &str) -> Result<()> {
    let unit = ResolutionNode::Internal {
        branches: vec![
            crate::tree::Branch::new(0.5, ResolutionNode::terminal(0.0)),
            crate::tree::Branch::new(0.5, ResolutionNode::terminal(1.0)),
        ],
        surprise_weight: 1.0,
    };
    if derive_transform(&unit, scaling)?.is_identity() {
        Ok(())
    } else {
        Err(ModelError::Unsupported(format!(
            "scaling '{scaling}' is only supported for gamble and tree schemes, not {scheme}"
        )))
    }
}

pub fn evaluate_scheme(
    scheme: &Scheme,
    params: &ModelParams,
    scaling: ScalingMode,
) -> Result<SchemeEvaluation> {
    match scheme {
        Scheme::Gamble { hi, lo, p } => {
            let tree = build_binary_gamble(*hi, *lo, *p)?;
            tree_evaluation(&tree, params, scaling)
        }
        Scheme::Tree(tree) => tree_evaluation(tree, params, scaling),
        Scheme::Hazard(spec) => {
            require_unit_scale(scaling, "hazard")?;
            Ok(SchemeEvaluation {
                u0: spec.survival().powf(spec.n()),
                delta: hazard_total_surprise(spec, params),
                utility: discount_factor(spec, params),
                extra: None,
            })
        }
        Scheme::Timing(spec) => {
            require_unit_scale(scaling, "timing")?;
            let c = timing_components(spec, params);
            Ok(SchemeEvaluation {
                u0: c.e_tr,
                delta: c.delta_total,
                utility: c.e_tr * params.modulate(c.delta_total),
                extra: Some(timing_ratio(spec, params)),
            })
        }
        Scheme::Dual(spec) => {
            require_unit_scale(scaling, spec.scheme().id())?;
            let u0 = spec.expected_value();
            let delta = dual_surprise(spec, params);
            Ok(SchemeEvaluation {
                u0,
                delta,
                utility: u0 * params.modulate(delta),
                extra: Some(discount_ratio(spec, params)?),
            })
        }
    }
}

fn tree_evaluation(
    tree: &ResolutionNode,
    params: &ModelParams,
    scaling: ScalingMode,
) -> Result<SchemeEvaluation> {
    let u0 = tree.expected_value()?;
    let r = evaluate_scaled(tree, params, scaling)?;
    Ok(SchemeEvaluation {
        u0,
        delta: r.scaled.total_surprise,
        utility: r.utility,
        extra: None,
    })
}
