//! Analytic surprise and utility formulas for the hazard chain, timing risk
//! and dual risk schemes.
//!
//! Every function here has a tree counterpart in [`crate::schemes`]; the
//! test suites check the two against each other.
//!
//! Shorthand used below: `q = 1 − p`, `α′ = α − 1` and the per-step hazard
//! constant `C = k·p − p^α·q^(1−α)`.

use serde::{Deserialize, Serialize};

use crate::error::{finite, invalid, open_unit, ModelError, Result};
use crate::model::ModelParams;

/// Constant-hazard delayed reward: loss probability `p` per step, `n` steps.
///
/// `n` may be fractional; the total-surprise formula is then read as a
/// continuous extension in the number of steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardSpec {
    p: f64,
    n: f64,
}

impl HazardSpec {
    pub fn new(p: f64, n: f64) -> Result<Self> {
        open_unit("p", p)?;
        finite("n", n)?;
        if n < 0.0 {
            return Err(invalid("n", n, "number of steps must be non-negative"));
        }
        Ok(HazardSpec { p, n })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn survival(&self) -> f64 {
        1.0 - self.p
    }
}

/// Reward at step `n − 1` with probability `p_tr`, otherwise at `n + 1`,
/// under hazard `p`. `k_tr` weights the surprise of resolving the timing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingRiskSpec {
    p: f64,
    n: u32,
    p_tr: f64,
    k_tr: f64,
}

impl TimingRiskSpec {
    pub fn new(p: f64, n: u32, p_tr: f64, k_tr: f64) -> Result<Self> {
        open_unit("p", p)?;
        open_unit("p_tr", p_tr)?;
        finite("k_tr", k_tr)?;
        if n < 2 {
            return Err(invalid("n", n as f64, "timing risk needs n >= 2"));
        }
        if k_tr < 0.0 {
            return Err(invalid("k_tr", k_tr, "must be non-negative"));
        }
        Ok(TimingRiskSpec { p, n, p_tr, k_tr })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p_tr(&self) -> f64 {
        self.p_tr
    }

    pub fn k_tr(&self) -> f64 {
        self.k_tr
    }

    /// Mean delay `p_tr·(n − 1) + (1 − p_tr)·(n + 1)`.
    pub fn mean_delay(&self) -> f64 {
        let n = self.n as f64;
        self.p_tr * (n - 1.0) + (1.0 - self.p_tr) * (n + 1.0)
    }
}

/// How the explicit probabilistic risk of a delayed reward is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualScheme {
    /// Hazard chain first, then the probabilistic gamble.
    SeparateAfter,
    /// Probabilistic gamble first, then the hazard chain.
    SeparateBefore,
    /// Folded into an inflated per-step hazard `1 − p_pr^(1/n)·(1 − p)`.
    Incorporated,
}

impl DualScheme {
    pub const ALL: [DualScheme; 3] = [
        DualScheme::SeparateAfter,
        DualScheme::SeparateBefore,
        DualScheme::Incorporated,
    ];

    pub fn id(self) -> &'static str {
        match self {
            DualScheme::SeparateAfter => "dual-a-after",
            DualScheme::SeparateBefore => "dual-a-before",
            DualScheme::Incorporated => "dual-b",
        }
    }
}

/// Default modulation gain for the probabilistic-only reference utility.
pub const DEFAULT_K2_PROB: f64 = 2.0;

/// Delayed reward (`n` steps, hazard `p`) paid only with probability `p_pr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualRiskSpec {
    p: f64,
    n: u32,
    p_pr: f64,
    scheme: DualScheme,
    k2_prob: f64,
}

impl DualRiskSpec {
    pub fn new(p: f64, n: u32, p_pr: f64, scheme: DualScheme) -> Result<Self> {
        open_unit("p", p)?;
        open_unit("p_pr", p_pr)?;
        if n < 1 {
            return Err(invalid("n", n as f64, "needs at least one step"));
        }
        let spec = DualRiskSpec {
            p,
            n,
            p_pr,
            scheme,
            k2_prob: DEFAULT_K2_PROB,
        };
        if scheme == DualScheme::Incorporated {
            open_unit("inflated hazard", spec.inflated_hazard())?;
        }
        Ok(spec)
    }

    pub fn with_k2_prob(mut self, k2_prob: f64) -> Result<Self> {
        finite("k2_prob", k2_prob)?;
        if k2_prob < 0.0 {
            return Err(invalid("k2_prob", k2_prob, "must be non-negative"));
        }
        self.k2_prob = k2_prob;
        Ok(self)
    }

    pub fn with_scheme(self, scheme: DualScheme) -> Result<Self> {
        DualRiskSpec::new(self.p, self.n, self.p_pr, scheme)?.with_k2_prob(self.k2_prob)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p_pr(&self) -> f64 {
        self.p_pr
    }

    pub fn scheme(&self) -> DualScheme {
        self.scheme
    }

    pub fn k2_prob(&self) -> f64 {
        self.k2_prob
    }

    /// Per-step hazard `p′ = 1 − p_pr^(1/n)·(1 − p)` of the incorporated scheme.
    pub fn inflated_hazard(&self) -> f64 {
        1.0 - self.p_pr.powf(1.0 / self.n as f64) * (1.0 - self.p)
    }

    /// `p_pr · (1 − p)^n`, identical for every scheme.
    pub fn expected_value(&self) -> f64 {
        self.p_pr * (1.0 - self.p).powi(self.n as i32)
    }
}

/// `C = k·p − p^α·(1 − p)^(1−α)`.
pub fn hazard_constant(p: f64, params: &ModelParams) -> f64 {
    let a = params.alpha();
    params.k() * p - p.powf(a) * (1.0 - p).powf(1.0 - a)
}

/// Root of [`hazard_constant`] in `(0, 1)` found by bisection, if `C`
/// changes sign there.
pub fn hazard_constant_root(params: &ModelParams) -> Option<f64> {
    let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
    let f = |p: f64| hazard_constant(p, params);
    if f(lo).signum() == f(hi).signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Surprise of stage `t` of the hazard chain:
/// `q^(t−1) · (−C · q^(α(n−t+1)))`.
pub fn hazard_stage_surprise(spec: &HazardSpec, t: u32, params: &ModelParams) -> Result<f64> {
    if t < 1 || t as f64 > spec.n {
        return Err(ModelError::StageOutOfRange {
            stage: t,
            steps: spec.n,
        });
    }
    let q = spec.survival();
    let c = hazard_constant(spec.p, params);
    let t = t as f64;
    Ok(q.powf(t - 1.0) * (-c * q.powf(params.alpha() * (spec.n - t + 1.0))))
}

/// Total surprise of the hazard chain,
/// `−C · q^(n+α′) · (1 − q^(nα′)) / (1 − q^α′)`.
pub fn hazard_total_surprise(spec: &HazardSpec, params: &ModelParams) -> f64 {
    total_for(spec.p, spec.n, params)
}

fn total_for(p: f64, n: f64, params: &ModelParams) -> f64 {
    let q = 1.0 - p;
    let a1 = params.alpha() - 1.0;
    let c = hazard_constant(p, params);
    -c * q.powf(n + a1) * (1.0 - q.powf(n * a1)) / (1.0 - q.powf(a1))
}

/// Utility of a unit reward delayed by `n` steps, `q^n · g(Δ)`.
pub fn discount_factor(spec: &HazardSpec, params: &ModelParams) -> f64 {
    let u0 = spec.survival().powf(spec.n);
    u0 * params.modulate(hazard_total_surprise(spec, params))
}

/// Surprise of the single-stage gamble `(1, p_pr; 0, 1 − p_pr)`:
/// `p_pr·(1 − p_pr)^α − k·(1 − p_pr)·p_pr^α`, and 0 at the boundaries.
pub fn prob_only_surprise(p_pr: f64, params: &ModelParams) -> Result<f64> {
    finite("p_pr", p_pr)?;
    if !(0.0..=1.0).contains(&p_pr) {
        return Err(invalid("p_pr", p_pr, "must lie in [0, 1]"));
    }
    if p_pr == 0.0 || p_pr == 1.0 {
        return Ok(0.0);
    }
    Ok(gamble_surprise(p_pr, params))
}

fn gamble_surprise(p: f64, params: &ModelParams) -> f64 {
    let a = params.alpha();
    p * (1.0 - p).powf(a) - params.k() * (1.0 - p) * p.powf(a)
}

/// Surprise decomposition of the timing-risk option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingComponents {
    /// Hazard stages shared by both timings (steps `1..n−1`).
    pub delta_common: f64,
    /// Unweighted surprise of resolving whether the reward comes early.
    pub delta_tr0: f64,
    /// Hazard stages `n` and `n + 1` on the late branch.
    pub delta_late: f64,
    /// `delta_common + k_tr·delta_tr0 + delta_late`.
    pub delta_total: f64,
    /// Expected value of the timing lottery.
    pub e_tr: f64,
    /// Expected value of a fixed delay at the mean timing.
    pub e_fix: f64,
}

pub fn timing_components(spec: &TimingRiskSpec, params: &ModelParams) -> TimingComponents {
    let (p, p_tr) = (spec.p, spec.p_tr);
    let n = spec.n as f64;
    let q = 1.0 - p;
    let a = params.alpha();
    let a1 = a - 1.0;
    let k = params.k();
    let c = hazard_constant(p, params);

    // Expected value at the timing node, relative to the survival factor q
    // that the plain chain would carry one step later.
    let timing_value = q * q * (1.0 - p_tr) + p_tr;
    let e_scale = (timing_value / q).powf(a);
    let delta_common =
        -c * e_scale * q.powf(n + a1) * ((1.0 - q.powf(n * a1)) / (1.0 - q.powf(a1)) - 1.0);

    let delta_tr0 = q.powf(n - 1.0)
        * (1.0 - q * q).powf(a)
        * (p_tr * (1.0 - p_tr).powf(a) - k * (1.0 - p_tr) * p_tr.powf(a));

    let delta_late = p
        * q.powf(n + a)
        * (1.0 - p_tr)
        * (p.powf(a - 1.0) * (1.0 + q.powf(1.0 - a)) - k * (1.0 + q.powf(a - 1.0)));

    let e_tr = p_tr * q.powf(n - 1.0) + (1.0 - p_tr) * q.powf(n + 1.0);
    let e_fix = q.powf(spec.mean_delay());

    TimingComponents {
        delta_common,
        delta_tr0,
        delta_late,
        delta_total: delta_common + spec.k_tr * delta_tr0 + delta_late,
        e_tr,
        e_fix,
    }
}

/// `U_tr / U_fix`: timing lottery against a fixed delay at its mean timing.
pub fn timing_ratio(spec: &TimingRiskSpec, params: &ModelParams) -> f64 {
    let comps = timing_components(spec, params);
    let u_tr = comps.e_tr * params.modulate(comps.delta_total);
    let fixed = HazardSpec {
        p: spec.p,
        n: spec.mean_delay(),
    };
    u_tr / discount_factor(&fixed, params)
}

/// Total surprise of a dual-risk option under its scheme.
pub fn dual_surprise(spec: &DualRiskSpec, params: &ModelParams) -> f64 {
    let (p, p_pr) = (spec.p, spec.p_pr);
    let n = spec.n as f64;
    let q = 1.0 - p;
    let a = params.alpha();
    let hazard = total_for(p, n, params);
    // Probabilistic gamble reached after surviving every hazard step.
    let delta_pr0 = q.powf(n) * gamble_surprise(p_pr, params);
    match spec.scheme {
        DualScheme::SeparateAfter => p_pr.powf(a) * hazard + delta_pr0,
        // Hazard stages are reached with probability p_pr at full scale; the
        // gamble now sits at the root, where its jumps are q^n times larger.
        DualScheme::SeparateBefore => p_pr * hazard + q.powf(n * (a - 1.0)) * delta_pr0,
        DualScheme::Incorporated => total_for(spec.inflated_hazard(), n, params),
    }
}

/// Discount ratio `D = U_pt / (U_p · U_t)`.
///
/// `U_p` is modulated with `k2_prob` in place of `k2`.
pub fn discount_ratio(spec: &DualRiskSpec, params: &ModelParams) -> Result<f64> {
    let u_pt = spec.expected_value() * params.modulate(dual_surprise(spec, params));
    let hazard = HazardSpec {
        p: spec.p,
        n: spec.n as f64,
    };
    let u_t = discount_factor(&hazard, params);
    let prob_params = params.with_k2(spec.k2_prob)?;
    let u_p = spec.p_pr * prob_params.modulate(gamble_surprise(spec.p_pr, params));
    Ok(u_pt / (u_p * u_t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> ModelParams {
        ModelParams::intertemporal()
    }

    #[test]
    fn spec_validation() {
        assert!(HazardSpec::new(0.0, 4.0).is_err());
        assert!(HazardSpec::new(1.0, 4.0).is_err());
        assert!(HazardSpec::new(0.1, -1.0).is_err());
        assert!(TimingRiskSpec::new(0.03, 1, 0.5, 10.0).is_err());
        assert!(TimingRiskSpec::new(0.03, 4, 1.0, 10.0).is_err());
        assert!(TimingRiskSpec::new(0.03, 4, 0.5, -1.0).is_err());
        assert!(DualRiskSpec::new(0.03, 4, 0.0, DualScheme::SeparateAfter).is_err());
        assert!(DualRiskSpec::new(0.03, 0, 0.5, DualScheme::Incorporated).is_err());
    }

    #[test]
    fn stage_range_checked() {
        let spec = HazardSpec::new(0.03, 4.0).unwrap();
        assert!(hazard_stage_surprise(&spec, 0, &fig3()).is_err());
        assert!(hazard_stage_surprise(&spec, 5, &fig3()).is_err());
        assert!(hazard_stage_surprise(&spec, 4, &fig3()).is_ok());
    }

    #[test]
    fn stages_telescope_to_total() {
        for &p in &[0.01, 0.03, 0.1, 0.3] {
            for n in 1..=12 {
                let spec = HazardSpec::new(p, n as f64).unwrap();
                let sum: f64 = (1..=n)
                    .map(|t| hazard_stage_surprise(&spec, t, &fig3()).unwrap())
                    .sum();
                assert!((sum - hazard_total_surprise(&spec, &fig3())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn last_stage_is_most_negative_for_small_p() {
        let spec = HazardSpec::new(0.03, 8.0).unwrap();
        let stages: Vec<f64> = (1..=8)
            .map(|t| hazard_stage_surprise(&spec, t, &fig3()).unwrap())
            .collect();
        let min = stages.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(min, stages[7]);
    }

    #[test]
    fn vanishing_hazard_gives_no_surprise() {
        let spec = HazardSpec::new(1e-12, 4.0).unwrap();
        for t in 1..=4 {
            assert!(hazard_stage_surprise(&spec, t, &fig3()).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn one_step_total_is_single_gamble() {
        let params = fig3();
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let spec = HazardSpec::new(p, 1.0).unwrap();
            let q = 1.0 - p;
            // Survival is the "win" branch of a gamble with win probability q.
            let single = q * p.powf(1.6) - 3.0 * p * q.powf(1.6);
            assert!((hazard_total_surprise(&spec, &params) - single).abs() < 1e-12);
        }
    }

    #[test]
    fn discount_factor_at_zero_delay() {
        let spec = HazardSpec::new(0.03, 0.0).unwrap();
        assert_eq!(discount_factor(&spec, &fig3()), 1.0);
    }

    #[test]
    fn prob_only_examples() {
        let p = ModelParams::default();
        assert!((prob_only_surprise(0.5, &p).unwrap() + 0.329877).abs() < 1e-6);
        assert_eq!(prob_only_surprise(1.0, &p).unwrap(), 0.0);
        assert_eq!(prob_only_surprise(0.0, &p).unwrap(), 0.0);
        assert!(prob_only_surprise(0.999999, &p).unwrap().abs() < 1e-4);
        assert!(prob_only_surprise(0.01, &p).unwrap() > 0.0);
        assert!(prob_only_surprise(1.5, &p).is_err());
    }

    #[test]
    fn hazard_constant_sign() {
        let params = fig3();
        for i in 1..=30 {
            let p = i as f64 / 100.0;
            assert!(hazard_constant(p, &params) > 0.0, "p = {p}");
        }
        let root = hazard_constant_root(&params).unwrap();
        assert!((root - 0.8618832502903914).abs() < 1e-9, "{root}");
        assert!(hazard_constant(root - 1e-6, &params) > 0.0);
        assert!(hazard_constant(root + 1e-6, &params) < 0.0);
    }

    #[test]
    fn timing_degenerate_limits() {
        let params = fig3();
        for &p_tr in &[1e-9, 1.0 - 1e-9] {
            let spec = TimingRiskSpec::new(0.03, 4, p_tr, 10.0).unwrap();
            let c = timing_components(&spec, &params);
            assert!(c.delta_tr0.abs() < 1e-7);
            assert!((c.e_tr - c.e_fix).abs() < 1e-9);
        }
    }

    #[test]
    fn timing_lottery_beats_fixed_expected_value() {
        let spec = TimingRiskSpec::new(0.03, 4, 0.5, 10.0).unwrap();
        let c = timing_components(&spec, &fig3());
        assert!(c.e_tr > c.e_fix);
        let q: f64 = 0.97;
        let closed = q.powi(3) * (0.5 + 0.5 * q * q - q.powf(1.0));
        assert!((c.e_tr - c.e_fix - closed).abs() < 1e-15);
    }

    #[test]
    fn dual_reduces_to_hazard_as_p_pr_approaches_one() {
        let params = fig3();
        let hazard = hazard_total_surprise(&HazardSpec::new(0.03, 4.0).unwrap(), &params);
        for scheme in DualScheme::ALL {
            let spec = DualRiskSpec::new(0.03, 4, 1.0 - 1e-12, scheme).unwrap();
            assert!(
                (dual_surprise(&spec, &params) - hazard).abs() < 1e-9,
                "{scheme:?}"
            );
        }
    }

    #[test]
    fn inflated_hazard_preserves_expected_value() {
        let spec = DualRiskSpec::new(0.03, 4, 0.7, DualScheme::Incorporated).unwrap();
        let p2 = spec.inflated_hazard();
        assert!(((1.0 - p2).powi(4) - spec.expected_value()).abs() < 1e-15);
    }
}
