//! Outcome scaling applied before evaluation and undone on the utility.
//!
//! The multiplicative utility `U0 · g(Δ)` misbehaves when `U0` is negative or
//! near zero, and the power kernel makes surprise grow with payoff size. Both
//! are tamed by mapping payoffs affinely into `[0, 1]` (or part-way there),
//! evaluating, and mapping the resulting utility back.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{finite, invalid, Result};
use crate::model::ModelParams;
use crate::tree::{EvaluationResult, ResolutionNode};

/// `x′ = (x − offset) / scale`, inverted on utilities as `U = scale·U′ + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineTransform {
    scale: f64,
    offset: f64,
}

impl AffineTransform {
    pub const IDENTITY: AffineTransform = AffineTransform {
        scale: 1.0,
        offset: 0.0,
    };

    pub fn new(scale: f64, offset: f64) -> Result<Self> {
        finite("scale", scale)?;
        finite("offset", offset)?;
        if scale <= 0.0 {
            return Err(invalid("scale", scale, "must be positive"));
        }
        Ok(AffineTransform { scale, offset })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.offset) / self.scale
    }

    pub fn invert(&self, u: f64) -> f64 {
        self.scale * u + self.offset
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScalingMode {
    #[default]
    None,
    /// Minimum payoff to 0, maximum to 1.
    Full,
    /// Minimum payoff to 0, range shrunk to `width^(1−gamma)`; `gamma = 1`
    /// is `Full`.
    Partial { gamma: f64 },
    /// Caller-supplied transform, e.g. `x′ = p^(1/α)·x` for one lottery.
    Fixed(AffineTransform),
}

impl ScalingMode {
    pub fn partial(gamma: f64) -> Result<Self> {
        finite("gamma", gamma)?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid("gamma", gamma, "must lie in (0, 1]"));
        }
        Ok(ScalingMode::Partial { gamma })
    }

    /// Pure rescaling `x′ = x / divisor`.
    pub fn divide_by(divisor: f64) -> Result<Self> {
        AffineTransform::new(divisor, 0.0).map(ScalingMode::Fixed)
    }
}

impl FromStr for ScalingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse_num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| format!("invalid number '{v}' in scaling '{s}'"))
        };
        match s {
            "none" => Ok(ScalingMode::None),
            "full" => Ok(ScalingMode::Full),
            _ => {
                if let Some(g) = s.strip_prefix("partial:") {
                    ScalingMode::partial(parse_num(g)?).map_err(|e| e.to_string())
                } else if let Some(d) = s.strip_prefix("scale:") {
                    ScalingMode::divide_by(parse_num(d)?).map_err(|e| e.to_string())
                } else {
                    Err(format!(
                        "unknown scaling '{s}', expected none, full, partial:<gamma> or scale:<s>"
                    ))
                }
            }
        }
    }
}

impl fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingMode::None => write!(f, "none"),
            ScalingMode::Full => write!(f, "full"),
            ScalingMode::Partial { gamma } => write!(f, "partial:{gamma}"),
            ScalingMode::Fixed(t) if t.offset == 0.0 => write!(f, "scale:{}", t.scale),
            ScalingMode::Fixed(t) => write!(f, "affine:{}:{}", t.scale, t.offset),
        }
    }
}

/// Transform implied by `mode` for the payoffs of `tree`.
///
/// A tree whose payoffs are all equal gets the identity under `Full` and
/// `Partial`.
pub fn derive_transform(tree: &ResolutionNode, mode: ScalingMode) -> Result<AffineTransform> {
    let (lo, hi) = tree.payoff_range();
    let width = hi - lo;
    match mode {
        ScalingMode::None => Ok(AffineTransform::IDENTITY),
        ScalingMode::Fixed(t) => Ok(t),
        ScalingMode::Full | ScalingMode::Partial { .. } if width.is_nan() || width <= 0.0 => {
            Ok(AffineTransform::IDENTITY)
        }
        ScalingMode::Full => AffineTransform::new(width, lo),
        ScalingMode::Partial { gamma } => AffineTransform::new(width.powf(gamma), lo),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledEvaluation {
    pub transform: AffineTransform,
    /// Evaluation of the transformed tree.
    pub scaled: EvaluationResult,
    /// Utility mapped back to the original payoff scale.
    pub utility: f64,
}

/// Transform payoffs, evaluate, and invert the transform on the utility.
pub fn evaluate_scaled(
    tree: &ResolutionNode,
    params: &ModelParams,
    mode: ScalingMode,
) -> Result<ScaledEvaluation> {
    tree.validate()?;
    let transform = derive_transform(tree, mode)?;
    let scaled = if transform.is_identity() {
        tree.evaluate(params)?
    } else {
        tree.map_payoffs(&|x| transform.apply(x)).evaluate(params)?
    };
    let utility = transform.invert(scaled.utility);
    Ok(ScaledEvaluation {
        transform,
        scaled,
        utility,
    })
}
