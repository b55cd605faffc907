//! Figure data: each figure is a table of curves over one grid.
//!
//! Every curve is produced through [`evaluate_scheme`] (or a plain
//! reference formula), so a figure cell always equals the corresponding
//! single-point evaluation.

use std::fmt;
use std::str::FromStr;

use crate::closed_form::{DualRiskSpec, DualScheme, HazardSpec, TimingRiskSpec, DEFAULT_K2_PROB};
use crate::error::Result;
use crate::eval::{evaluate_scheme, Scheme, SchemeEvaluation};
use crate::exec::Execution;
use crate::model::{ModelParams, Modulation};
use crate::scaling::ScalingMode;
use crate::sweep::Grid;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig3Left,
    Fig3Right,
    Fig5Left,
    Fig5Right,
    Fig7,
    FigA1,
    FigA2,
    FigA3,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig1,
        FigureId::Fig3Left,
        FigureId::Fig3Right,
        FigureId::Fig5Left,
        FigureId::Fig5Right,
        FigureId::Fig7,
        FigureId::FigA1,
        FigureId::FigA2,
        FigureId::FigA3,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig3Left => "fig3-left",
            FigureId::Fig3Right => "fig3-right",
            FigureId::Fig5Left => "fig5-left",
            FigureId::Fig5Right => "fig5-right",
            FigureId::Fig7 => "fig7",
            FigureId::FigA1 => "figA1",
            FigureId::FigA2 => "figA2",
            FigureId::FigA3 => "figA3",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let known: Vec<_> = FigureId::ALL.iter().map(|f| f.id()).collect();
                format!("unknown figure '{s}', expected one of {}", known.join(", "))
            })
    }
}

/// Optional replacements for the parameters baked into each figure.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FigureOverrides {
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub modulation: Option<Modulation>,
    /// Hazard probability of the intertemporal figures.
    pub p: Option<f64>,
    /// Delay of the timing (right panel) and dual-risk figures.
    pub n: Option<u32>,
    pub k2_prob: Option<f64>,
}

/// Per-figure constants; overrides replace the matching field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSettings {
    pub params: ModelParams,
    pub p: f64,
    pub n: u32,
    pub k2_prob: f64,
}

pub const HAZARD_P: f64 = 0.03;
pub const K_EXP: f64 = 0.3;
pub const K_HYPO: f64 = 0.88;
pub const K_EXP_ALT: f64 = 0.2;
pub const SURPRISE_SLOPE: f64 = 0.088;
pub const TIMING_P_TR: f64 = 0.5;
pub const TIMING_WEIGHTS: [f64; 2] = [10.0, 0.0];

impl FigureId {
    /// Parameters baked into the figure, before overrides.
    pub fn default_settings(self) -> FigureSettings {
        let base = ModelParams::default();
        let delay = ModelParams::intertemporal();
        let (params, k2_prob) = match self {
            FigureId::Fig1 | FigureId::FigA3 => (base, DEFAULT_K2_PROB),
            FigureId::FigA1 => (
                base.with_modulation(Modulation::ExponentialNegative),
                DEFAULT_K2_PROB,
            ),
            FigureId::FigA2 => (delay, 10.0),
            _ => (delay, DEFAULT_K2_PROB),
        };
        FigureSettings {
            params,
            p: HAZARD_P,
            n: 4,
            k2_prob,
        }
    }

    pub fn settings(self, o: &FigureOverrides) -> Result<FigureSettings> {
        let d = self.default_settings();
        let params = ModelParams::new(
            o.k.unwrap_or(d.params.k()),
            o.alpha.unwrap_or(d.params.alpha()),
            o.k1.unwrap_or(d.params.k1()),
            o.k2.unwrap_or(d.params.k2()),
        )?
        .with_modulation(o.modulation.unwrap_or(d.params.modulation()));
        Ok(FigureSettings {
            params,
            p: o.p.unwrap_or(d.p),
            n: o.n.unwrap_or(d.n),
            k2_prob: o.k2_prob.unwrap_or(d.k2_prob),
        })
    }

    pub fn grid(self) -> Grid {
        match self {
            FigureId::Fig1 => Grid::linspace(0.01, 0.99, 99),
            FigureId::Fig3Left | FigureId::Fig3Right | FigureId::FigA1 => {
                Grid::linspace(1.0, 50.0, 50)
            }
            FigureId::Fig5Left => Grid::linspace(2.0, 12.0, 11),
            FigureId::Fig5Right => Grid::linspace(0.05, 0.95, 19),
            FigureId::Fig7 => Grid::linspace(0.3, 0.99, 70),
            FigureId::FigA2 => Grid::linspace(0.05, 0.99, 95),
            FigureId::FigA3 => Grid::linspace(0.01, 0.5, 50),
        }
    }

    pub fn x_column(self) -> &'static str {
        match self {
            FigureId::Fig1 | FigureId::FigA3 => "p",
            FigureId::Fig3Left | FigureId::Fig3Right | FigureId::FigA1 | FigureId::Fig5Left => "n",
            FigureId::Fig5Right => "p_tr",
            FigureId::Fig7 | FigureId::FigA2 => "p_pr",
        }
    }

    pub fn curve_columns(self) -> &'static [&'static str] {
        match self {
            FigureId::Fig1 => &["u", "expected_value"],
            FigureId::Fig3Left => &["abs_delta", "reference_slope_0_088"],
            FigureId::Fig3Right => &["as_model", "exponential", "hyperbolic"],
            FigureId::Fig5Left | FigureId::Fig5Right => &["ratio_k_tr_10", "ratio_k_tr_0"],
            FigureId::Fig7 | FigureId::FigA2 => &["d_a_after", "d_a_before", "d_b"],
            FigureId::FigA1 => &["as_model", "exponential"],
            FigureId::FigA3 => &["unscaled", "full", "partial"],
        }
    }
}

/// The evaluations behind one figure cell.
///
/// Returned as `(scheme, params, scaling)` triples so that callers can
/// reproduce any cell with a single [`evaluate_scheme`] call.
pub fn cell_inputs(
    fig: FigureId,
    settings: &FigureSettings,
    x: f64,
) -> Result<Vec<(Scheme, ModelParams, ScalingMode)>> {
    let params = settings.params;
    let none = ScalingMode::None;
    Ok(match fig {
        FigureId::Fig1 => vec![(
            Scheme::Gamble {
                hi: 1.0,
                lo: 0.0,
                p: x,
            },
            params,
            none,
        )],
        FigureId::Fig3Left | FigureId::Fig3Right | FigureId::FigA1 => {
            vec![(
                Scheme::Hazard(HazardSpec::new(settings.p, x)?),
                params,
                none,
            )]
        }
        FigureId::Fig5Left | FigureId::Fig5Right => {
            let (n, p_tr) = if fig == FigureId::Fig5Left {
                (x as u32, TIMING_P_TR)
            } else {
                (settings.n, x)
            };
            TIMING_WEIGHTS
                .iter()
                .map(|&k_tr| {
                    Ok((
                        Scheme::Timing(TimingRiskSpec::new(settings.p, n, p_tr, k_tr)?),
                        params,
                        none,
                    ))
                })
                .collect::<Result<_>>()?
        }
        FigureId::Fig7 | FigureId::FigA2 => DualScheme::ALL
            .iter()
            .map(|&scheme| {
                let spec = DualRiskSpec::new(settings.p, settings.n, x, scheme)?
                    .with_k2_prob(settings.k2_prob)?;
                Ok((Scheme::Dual(spec), params, none))
            })
            .collect::<Result<_>>()?,
        FigureId::FigA3 => {
            let lottery = Scheme::Gamble {
                hi: 1.0 / x,
                lo: 0.0,
                p: x,
            };
            let partial = ScalingMode::divide_by(x.powf(-1.0 / params.alpha()))?;
            vec![
                (lottery.clone(), params, none),
                (lottery.clone(), params, ScalingMode::Full),
                (lottery, params, partial),
            ]
        }
    })
}

fn row_for(fig: FigureId, settings: &FigureSettings, x: f64) -> Result<Vec<f64>> {
    let evals: Vec<SchemeEvaluation> = cell_inputs(fig, settings, x)?
        .iter()
        .map(|(s, p, m)| evaluate_scheme(s, p, *m))
        .collect::<Result<_>>()?;
    let mut row = vec![x];
    match fig {
        FigureId::Fig1 => row.extend([evals[0].utility, evals[0].u0]),
        FigureId::Fig3Left => row.extend([evals[0].delta.abs(), SURPRISE_SLOPE * x]),
        FigureId::Fig3Right => row.extend([
            evals[0].utility,
            (-K_EXP * x).exp(),
            1.0 / (1.0 + K_HYPO * x),
        ]),
        FigureId::FigA1 => row.extend([evals[0].utility, (-K_EXP_ALT * x).exp()]),
        FigureId::Fig5Left | FigureId::Fig5Right | FigureId::Fig7 | FigureId::FigA2 => {
            row.extend(evals.iter().map(|e| e.extra.unwrap_or(f64::NAN)))
        }
        FigureId::FigA3 => row.extend(evals.iter().map(|e| e.utility)),
    }
    Ok(row)
}

/// Builds the full data table for `fig`.
pub fn figure_table(fig: FigureId, overrides: &FigureOverrides, exec: Execution) -> Result<Table> {
    let settings = fig.settings(overrides)?;
    let points = fig.grid().points()?;
    let rows = exec.try_map(&points, |&x| row_for(fig, &settings, x))?;
    let mut table =
        Table::new(std::iter::once(fig.x_column()).chain(fig.curve_columns().iter().copied()));
    for row in rows {
        table.push(row);
    }
    Ok(table)
}
