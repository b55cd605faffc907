//! One-parameter sweeps over a scheme.

use std::str::FromStr;

use crate::closed_form::{DualRiskSpec, HazardSpec, TimingRiskSpec};
use crate::error::{finite, invalid, ModelError, Result};
use crate::eval::{evaluate_scheme, Scheme};
use crate::exec::Execution;
use crate::model::ModelParams;
use crate::scaling::ScalingMode;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    P,
    N,
    PTr,
    PPr,
    KTr,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::P => "p",
            SweepTarget::N => "n",
            SweepTarget::PTr => "p_tr",
            SweepTarget::PPr => "p_pr",
            SweepTarget::KTr => "k_tr",
        }
    }
}

impl FromStr for SweepTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "p" => Ok(SweepTarget::P),
            "n" => Ok(SweepTarget::N),
            "p_tr" | "p-tr" => Ok(SweepTarget::PTr),
            "p_pr" | "p-pr" => Ok(SweepTarget::PPr),
            "k_tr" | "k-tr" => Ok(SweepTarget::KTr),
            other => Err(format!(
                "unknown sweep target '{other}', expected p, n, p_tr, p_pr or k_tr"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// `count` evenly spaced points from `start` to `stop` inclusive.
    Linspace {
        start: f64,
        stop: f64,
        count: usize,
    },
    Values(Vec<f64>),
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, count: usize) -> Self {
        Grid::Linspace { start, stop, count }
    }

    /// Grid points; linspace points are snapped to 12 decimals so that a
    /// grid like 0.30, 0.31, … prints as written.
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            Grid::Linspace { start, stop, count } => {
                finite("grid start", *start)?;
                finite("grid stop", *stop)?;
                if *count < 2 {
                    return Err(invalid("grid count", *count as f64, "must be at least 2"));
                }
                let last = (*count - 1) as f64;
                (0..*count)
                    .map(|i| snap(start + (stop - start) * i as f64 / last))
                    .collect()
            }
            Grid::Values(v) => {
                if v.len() < 2 {
                    return Err(invalid("grid count", v.len() as f64, "must be at least 2"));
                }
                for &x in v {
                    finite("grid value", x)?;
                }
                v.clone()
            }
        };
        let increasing = pts.windows(2).all(|w| w[0] < w[1]);
        let decreasing = pts.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(ModelError::Unsupported(
                "sweep grid must be strictly monotone".into(),
            ));
        }
        Ok(pts)
    }
}

fn snap(x: f64) -> f64 {
    format!("{x:.12}").parse().unwrap_or(x)
}

fn integer_steps(value: f64) -> Result<u32> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u32)
    } else {
        Err(invalid(
            "n",
            value,
            "this scheme needs a whole number of steps",
        ))
    }
}

/// Copy of `scheme` with the sweep target set to `value`.
pub fn with_target(scheme: &Scheme, target: SweepTarget, value: f64) -> Result<Scheme> {
    let unsupported = || {
        Err(ModelError::Unsupported(format!(
            "scheme {} has no sweepable parameter {}",
            scheme.id(),
            target.name()
        )))
    };
    Ok(match (scheme, target) {
        (Scheme::Gamble { hi, lo, .. }, SweepTarget::P) => Scheme::Gamble {
            hi: *hi,
            lo: *lo,
            p: value,
        },
        (Scheme::Hazard(h), SweepTarget::P) => Scheme::Hazard(HazardSpec::new(value, h.n())?),
        (Scheme::Hazard(h), SweepTarget::N) => Scheme::Hazard(HazardSpec::new(h.p(), value)?),
        (Scheme::Timing(t), _) => {
            let (mut p, mut n, mut p_tr, mut k_tr) = (t.p(), t.n(), t.p_tr(), t.k_tr());
            match target {
                SweepTarget::P => p = value,
                SweepTarget::N => n = integer_steps(value)?,
                SweepTarget::PTr => p_tr = value,
                SweepTarget::KTr => k_tr = value,
                SweepTarget::PPr => return unsupported(),
            }
            Scheme::Timing(TimingRiskSpec::new(p, n, p_tr, k_tr)?)
        }
        (Scheme::Dual(d), _) => {
            let (mut p, mut n, mut p_pr) = (d.p(), d.n(), d.p_pr());
            match target {
                SweepTarget::P => p = value,
                SweepTarget::N => n = integer_steps(value)?,
                SweepTarget::PPr => p_pr = value,
                SweepTarget::PTr | SweepTarget::KTr => return unsupported(),
            }
            Scheme::Dual(DualRiskSpec::new(p, n, p_pr, d.scheme())?.with_k2_prob(d.k2_prob())?)
        }
        _ => return unsupported(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub grid: Grid,
    /// Scheme supplying every parameter other than the target.
    pub base: Scheme,
    pub params: ModelParams,
    pub scaling: ScalingMode,
}

/// Evaluates every grid point; rows follow grid order.
///
/// Columns: the target, `u0`, `delta`, `u`, then the scheme's extra column.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Table> {
    let points = spec.grid.points()?;
    let schemes: Vec<Scheme> = points
        .iter()
        .map(|&x| with_target(&spec.base, spec.target, x))
        .collect::<Result<_>>()?;
    let evals = exec.try_map(&schemes, |s| evaluate_scheme(s, &spec.params, spec.scaling))?;

    let mut columns = vec![spec.target.name(), "u0", "delta", "u"];
    let extra = spec.base.extra_column();
    columns.extend(extra);
    let mut table = Table::new(columns);
    for (x, e) in points.iter().zip(evals) {
        let mut row = vec![*x, e.u0, e.delta, e.utility];
        if extra.is_some() {
            row.push(e.extra.unwrap_or(f64::NAN));
        }
        table.push(row);
    }
    Ok(table)
}
