//! Scalar kernels of the anticipated-surprise model.
//!
//! An expectation error `z` is turned into a surprise by the asymmetric power
//! kernel
//!
//! ```text
//! δ(z) = z^α          for z ≥ 0
//! δ(z) = -k · |z|^α   for z < 0
//! ```
//!
//! and an accumulated surprise `Δ` scales the expected value through the
//! modulation `g(Δ)`, giving `U = U0 · g(Δ)`.

use serde::{Deserialize, Serialize};

use crate::error::{finite, invalid, Result};

/// How a negative total surprise discounts utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modulation {
    /// `1 / (1 + k2·|Δ|)` for negative surprise.
    #[default]
    Hyperbolic,
    /// `exp(-k2·|Δ|)` for negative surprise.
    ExponentialNegative,
}

impl std::str::FromStr for Modulation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hyperbolic" => Ok(Modulation::Hyperbolic),
            "exponential-negative" | "exponential" => Ok(Modulation::ExponentialNegative),
            other => Err(format!(
                "unknown modulation '{other}', expected hyperbolic or exponential-negative"
            )),
        }
    }
}

/// Parameter bundle of the model.
///
/// Invariants: `k > 1`, `alpha > 1`, `k1 >= 0`, `k2 >= 0`, all finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    k: f64,
    alpha: f64,
    k1: f64,
    k2: f64,
    modulation: Modulation,
}

impl Default for ModelParams {
    /// `k = 3, α = 1.6, k1 = k2 = 2`, hyperbolic modulation.
    fn default() -> Self {
        ModelParams {
            k: 3.0,
            alpha: 1.6,
            k1: 2.0,
            k2: 2.0,
            modulation: Modulation::Hyperbolic,
        }
    }
}

impl ModelParams {
    pub fn new(k: f64, alpha: f64, k1: f64, k2: f64) -> Result<Self> {
        finite("k", k)?;
        finite("alpha", alpha)?;
        finite("k1", k1)?;
        finite("k2", k2)?;
        if k <= 1.0 {
            return Err(invalid("k", k, "risk-aversion factor must exceed 1"));
        }
        if alpha <= 1.0 {
            return Err(invalid("alpha", alpha, "convexity exponent must exceed 1"));
        }
        if k1 < 0.0 {
            return Err(invalid("k1", k1, "must be non-negative"));
        }
        if k2 < 0.0 {
            return Err(invalid("k2", k2, "must be non-negative"));
        }
        Ok(ModelParams {
            k,
            alpha,
            k1,
            k2,
            modulation: Modulation::Hyperbolic,
        })
    }

    /// Default parameters with `k2 = 10`, the setting used for delayed rewards.
    pub fn intertemporal() -> Self {
        ModelParams {
            k2: 10.0,
            ..ModelParams::default()
        }
    }

    pub fn with_modulation(mut self, modulation: Modulation) -> Self {
        self.modulation = modulation;
        self
    }

    pub fn with_k2(self, k2: f64) -> Result<Self> {
        ModelParams::new(self.k, self.alpha, self.k1, k2)
            .map(|p| p.with_modulation(self.modulation))
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Unchecked surprise kernel; callers guarantee a finite argument.
    #[inline]
    pub(crate) fn kernel(&self, z: f64) -> f64 {
        if z >= 0.0 {
            z.powf(self.alpha)
        } else {
            -self.k * (-z).powf(self.alpha)
        }
    }

    #[inline]
    pub(crate) fn modulate(&self, delta: f64) -> f64 {
        if delta >= 0.0 {
            (self.k1 * delta).exp()
        } else {
            match self.modulation {
                Modulation::Hyperbolic => 1.0 / (1.0 + self.k2 * -delta),
                Modulation::ExponentialNegative => (-self.k2 * -delta).exp(),
            }
        }
    }
}

/// A total (or per-stage) anticipated surprise.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurpriseValue(f64);

impl SurpriseValue {
    pub fn new(value: f64) -> Result<Self> {
        finite("surprise", value).map(SurpriseValue)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SurpriseValue {
    type Error = crate::ModelError;

    fn try_from(value: f64) -> Result<Self> {
        SurpriseValue::new(value)
    }
}

/// Surprise `δ(z)` produced by an expectation error `z`.
pub fn surprise_kernel(z: f64, params: &ModelParams) -> Result<f64> {
    finite("expectation error", z)?;
    Ok(params.kernel(z))
}

/// Utility multiplier `g(Δ)`; strictly positive and equal to 1 at `Δ = 0`.
pub fn surprise_modulation(delta: SurpriseValue, params: &ModelParams) -> f64 {
    params.modulate(delta.0)
}

/// Surprise-corrected utility `U = U0 · g(Δ)`.
///
/// Negative `u0` is accepted but the multiplicative form then inverts the
/// sign of the correction; scale outcomes into `[0, 1]` first (see
/// [`crate::scaling`]).
pub fn utility(u0: f64, delta: SurpriseValue, params: &ModelParams) -> f64 {
    u0 * params.modulate(delta.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(x: f64) -> SurpriseValue {
        SurpriseValue::new(x).unwrap()
    }

    #[test]
    fn kernel_fixed_points() {
        let p = ModelParams::default();
        assert_eq!(surprise_kernel(0.0, &p).unwrap(), 0.0);
        assert_eq!(surprise_kernel(1.0, &p).unwrap(), 1.0);
        assert_eq!(surprise_kernel(-1.0, &p).unwrap(), -3.0);
    }

    #[test]
    fn kernel_half() {
        // exp(1.6 * ln 0.5)
        let expected = (1.6 * 0.5f64.ln()).exp();
        let got = surprise_kernel(0.5, &ModelParams::default()).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.329877).abs() < 1e-6);
    }

    #[test]
    fn kernel_rejects_nan() {
        assert!(surprise_kernel(f64::NAN, &ModelParams::default()).is_err());
        assert!(surprise_kernel(f64::INFINITY, &ModelParams::default()).is_err());
    }

    #[test]
    fn modulation_values() {
        let p = ModelParams::default();
        assert_eq!(surprise_modulation(sv(0.0), &p), 1.0);
        let g = surprise_modulation(sv(-0.329877), &p);
        assert!((g - 1.0 / (1.0 + 2.0 * 0.329877)).abs() < 1e-12);
        assert!((g - 0.602499).abs() < 1e-6);
        assert!((0.5 * g - 0.301).abs() < 5e-4);

        let e = p.with_modulation(Modulation::ExponentialNegative);
        let g = surprise_modulation(sv(-0.329877), &e);
        assert!((g - (-0.659754f64).exp()).abs() < 1e-12);
        assert!((g - 0.516978).abs() < 1e-6);
    }

    #[test]
    fn utility_examples() {
        let p = ModelParams::default();
        assert_eq!(utility(1.0, sv(0.0), &p), 1.0);
        assert_eq!(utility(0.0, sv(-5.0), &p), 0.0);
        let u = utility(0.5, sv(-0.329877), &p);
        assert!((u - 0.3012).abs() < 1e-4);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 1.6, 2.0, 2.0).is_err());
        assert!(ModelParams::new(3.0, 1.0, 2.0, 2.0).is_err());
        assert!(ModelParams::new(3.0, 1.6, -0.1, 2.0).is_err());
        assert!(ModelParams::new(3.0, 1.6, 2.0, -1.0).is_err());
        assert!(ModelParams::new(3.0, f64::NAN, 2.0, 2.0).is_err());
        assert!(ModelParams::new(3.0, 1.6, 0.0, 0.0).is_ok());
        assert_eq!(ModelParams::intertemporal().k2(), 10.0);
    }

    #[test]
    fn modulation_parses() {
        assert_eq!("hyperbolic".parse(), Ok(Modulation::Hyperbolic));
        assert_eq!(
            "exponential-negative".parse(),
            Ok(Modulation::ExponentialNegative)
        );
        assert!("linear".parse::<Modulation>().is_err());
    }
}
