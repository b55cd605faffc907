//! Anticipated-surprise model of risky and intertemporal choice.
//!
//! An option is represented as an outcome-resolution tree. Each resolution
//! stage revises the expected payoff; the revisions pass through an
//! asymmetric convex kernel and are averaged into a total surprise `Δ`,
//! which scales the expected value into a utility `U = U0 · g(Δ)`.
//!
//! - [`model`]: the kernel `δ`, modulation `g` and utility.
//! - [`tree`]: exhaustive tree evaluation, the reference for every formula.
//! - [`closed_form`]: analytic results for hazard, timing-risk and dual-risk
//!   options.
//! - [`schemes`]: tree builders for those options and for chain scenarios.
//! - [`scaling`]: affine outcome normalization around evaluation.
//! - [`eval`], [`sweep`], [`figures`]: batch evaluation and table output,
//!   parallelized with rayon when the `parallel` feature is enabled.

pub mod closed_form;
pub mod error;
pub mod eval;
pub mod exec;
pub mod figures;
pub mod model;
pub mod scaling;
pub mod schemes;
pub mod sweep;
pub mod table;
pub mod tree;

pub use closed_form::{
    discount_factor, discount_ratio, dual_surprise, hazard_stage_surprise, hazard_total_surprise,
    prob_only_surprise, timing_components, timing_ratio, DualRiskSpec, DualScheme, HazardSpec,
    TimingComponents, TimingRiskSpec,
};
pub use error::{ModelError, Result};
pub use eval::{evaluate_scheme, Scheme, SchemeEvaluation};
pub use exec::Execution;
pub use figures::{figure_table, FigureId, FigureOverrides};
pub use model::{
    surprise_kernel, surprise_modulation, utility, ModelParams, Modulation, SurpriseValue,
};
pub use scaling::{derive_transform, evaluate_scaled, AffineTransform, ScalingMode};
pub use schemes::{
    build_binary_gamble, build_dual_scheme_a, build_dual_scheme_b, build_hazard_chain,
    build_scenario, build_timing_risk, ScenarioSpec, ScenarioVariant,
};
pub use sweep::{run_sweep, Grid, SweepSpec, SweepTarget};
pub use table::Table;
pub use tree::{Branch, EvaluationResult, ResolutionNode};
