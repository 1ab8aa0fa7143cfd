//! Distribution functions and the leafwise spectrum `N_F(λ)`.
//!
//! For an irrational slope every leaf is a dense line and
//! `N_F(λ) = √λ / π`. For `α = p/q` the leaves are closed circles of length
//! `ℓ = √(p²+q²)` and `N_F` is the step function
//! `ℓ⁻¹ · #{k ∈ ℤ : 4π²k²/ℓ² < λ}`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::slope::{Slope, SlopeKind};
use crate::spectrum::FOUR_PI_SQ;

/// Finitely many jumps `(τ, height)` with strictly increasing locations.
///
/// A step function built from a truncated sequence carries a cap: it is only
/// known for `λ ≤ cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    jumps: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    cap: Option<f64>,
}

impl StepFunction {
    pub fn new(jumps: Vec<(f64, f64)>, cap: Option<f64>) -> Result<Self> {
        if jumps.iter().any(|&(t, h)| !t.is_finite() || !(h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidArgument("jumps need finite locations and positive heights".into()));
        }
        if jumps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument("jump locations must be strictly increasing".into()));
        }
        if let (Some(cap), Some(&(last, _))) = (cap, jumps.last()) {
            if last > cap {
                return Err(Error::InvalidArgument(format!("jump at {last} lies beyond the cap {cap}")));
            }
        }
        let cumulative = jumps
            .iter()
            .scan(0.0, |acc, &(_, h)| {
                *acc += h;
                Some(*acc)
            })
            .collect();
        Ok(StepFunction { jumps, cumulative, cap })
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    /// Sum of the heights of all jumps strictly below `lambda`.
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        self.check_cap(lambda)?;
        let below = self.jumps.partition_point(|&(t, _)| t < lambda);
        Ok(if below == 0 { 0.0 } else { self.cumulative[below - 1] })
    }

    /// The same jumps with every height multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<StepFunction> {
        StepFunction::new(self.jumps.iter().map(|&(t, h)| (t, h * factor)).collect(), self.cap)
    }

    pub(crate) fn check_cap(&self, lambda: f64) -> Result<()> {
        match self.cap {
            Some(cap) if lambda > cap => Err(Error::BeyondCap { lambda, cap }),
            _ => Ok(()),
        }
    }
}

/// Absolutely continuous distribution function `F(λ) = ∫_{s₀}^{λ} ρ(τ) dτ`.
#[derive(Clone)]
pub struct SmoothDensity {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support_start: f64,
    sqrt_coefficient: Option<f64>,
}

impl SmoothDensity {
    pub fn new(density: impl Fn(f64) -> f64 + Send + Sync + 'static, support_start: f64) -> Self {
        SmoothDensity { density: Arc::new(density), support_start, sqrt_coefficient: None }
    }

    /// `F(λ) = c·√λ` for `λ > 0`, density `c / (2√τ)`.
    pub fn sqrt_law(coefficient: f64) -> Self {
        SmoothDensity {
            density: Arc::new(move |t: f64| if t > 0.0 { coefficient / (2.0 * t.sqrt()) } else { 0.0 }),
            support_start: 0.0,
            sqrt_coefficient: Some(coefficient),
        }
    }

    pub fn density(&self, tau: f64) -> f64 {
        if tau < self.support_start {
            0.0
        } else {
            (self.density)(tau)
        }
    }

    pub fn support_start(&self) -> f64 {
        self.support_start
    }

    /// `Some(c)` when this is the closed form `c·√λ`.
    pub fn sqrt_coefficient(&self) -> Option<f64> {
        self.sqrt_coefficient
    }

    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        let s0 = self.support_start;
        if lambda <= s0 {
            return Ok(0.0);
        }
        if let Some(c) = self.sqrt_coefficient {
            return Ok(c * lambda.sqrt());
        }
        // τ = s₀ + (λ − s₀) sin²θ absorbs an inverse-square-root edge at s₀
        let width = lambda - s0;
        let q = quadrature::integrate(
            |th: f64| {
                let (sin, cos) = th.sin_cos();
                self.density(s0 + width * sin * sin) * 2.0 * width * sin * cos
            },
            0.0,
            FRAC_PI_2,
            1e-12,
            2000,
        )?;
        Ok(q.value)
    }
}

impl fmt::Debug for SmoothDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothDensity")
            .field("support_start", &self.support_start)
            .field("sqrt_coefficient", &self.sqrt_coefficient)
            .finish_non_exhaustive()
    }
}

/// Non-decreasing, left-continuous `F` with `F = 0` below its support.
#[derive(Clone, Debug)]
pub enum DistributionFunction {
    Step(StepFunction),
    Smooth(SmoothDensity),
}

impl DistributionFunction {
    /// `F(λ)`; at a jump the jump itself is excluded.
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        match self {
            DistributionFunction::Step(step) => step.evaluate(lambda),
            DistributionFunction::Smooth(smooth) => smooth.evaluate(lambda),
        }
    }

    /// Upper end of the validity domain, if any.
    pub fn cap(&self) -> Option<f64> {
        match self {
            DistributionFunction::Step(step) => step.cap(),
            DistributionFunction::Smooth(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum DistributionRepr {
    Step {
        jumps: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<f64>,
    },
    Sqrt {
        coefficient: f64,
    },
}

impl TryFrom<&DistributionFunction> for DistributionRepr {
    type Error = Error;

    fn try_from(df: &DistributionFunction) -> Result<Self> {
        match df {
            DistributionFunction::Step(step) => {
                Ok(DistributionRepr::Step { jumps: step.jumps.clone(), cap: step.cap })
            }
            DistributionFunction::Smooth(smooth) => match smooth.sqrt_coefficient {
                Some(coefficient) => Ok(DistributionRepr::Sqrt { coefficient }),
                None => Err(Error::Unserializable("only the square-root law has a JSON form".into())),
            },
        }
    }
}

impl Serialize for DistributionFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        DistributionRepr::try_from(self).map_err(S::Error::custom)?.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DistributionFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match DistributionRepr::deserialize(deserializer)? {
            DistributionRepr::Step { jumps, cap } => {
                StepFunction::new(jumps, cap).map(DistributionFunction::Step).map_err(D::Error::custom)
            }
            DistributionRepr::Sqrt { coefficient } => {
                Ok(DistributionFunction::Smooth(SmoothDensity::sqrt_law(coefficient)))
            }
        }
    }
}

/// The leafwise spectrum of a slope.
#[derive(Clone, Debug)]
pub struct LeafSpectrum {
    pub slope: Slope,
    pub df: DistributionFunction,
}

impl LeafSpectrum {
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        self.df.evaluate(lambda)
    }
}

/// Length `√(p²+q²)` of a closed leaf of slope `p/q`.
pub fn leaf_length(p: i64, q: i64) -> f64 {
    let (p, q) = (p as f64, q as f64);
    (p * p + q * q).sqrt()
}

/// `N_F` for the slope. Rational slopes keep the jumps at
/// `τ_k = 4π²k²/(p²+q²) ≤ lambda_max`, folding `±k` into one jump.
pub fn leafwise_df(s: &Slope, lambda_max: f64) -> LeafSpectrum {
    let df = match s.kind() {
        SlopeKind::Irrational(_) => DistributionFunction::Smooth(SmoothDensity::sqrt_law(1.0 / PI)),
        SlopeKind::Rational { p, q } => {
            let len = leaf_length(*p, *q);
            let len2 = len * len;
            let mut jumps = Vec::new();
            if lambda_max >= 0.0 {
                jumps.push((0.0, 1.0 / len));
                let mut k = 1u64;
                loop {
                    let kf = k as f64;
                    let tau = FOUR_PI_SQ * kf * kf / len2;
                    if tau > lambda_max {
                        break;
                    }
                    jumps.push((tau, 2.0 / len));
                    k += 1;
                }
            }
            let step = StepFunction::new(jumps, Some(lambda_max)).expect("leaf jumps are increasing");
            DistributionFunction::Step(step)
        }
    };
    LeafSpectrum { slope: s.clone(), df }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn step(jumps: &[(f64, f64)]) -> StepFunction {
        StepFunction::new(jumps.to_vec(), None).unwrap()
    }

    #[test]
    fn step_is_left_continuous() {
        let f = step(&[(0.0, 0.5), (1.0, 1.0)]);
        assert_eq!(f.evaluate(1.0).unwrap(), 0.5);
        assert_eq!(f.evaluate(1.5).unwrap(), 1.5);
        assert_eq!(f.evaluate(0.0).unwrap(), 0.0);
        assert_eq!(f.evaluate(-4.0).unwrap(), 0.0);
    }

    #[test]
    fn step_validation() {
        assert!(StepFunction::new(vec![(1.0, 1.0), (1.0, 2.0)], None).is_err());
        assert!(StepFunction::new(vec![(1.0, -1.0)], None).is_err());
        assert!(StepFunction::new(vec![(3.0, 1.0)], Some(2.0)).is_err());
        let f = StepFunction::new(vec![(1.0, 1.0)], Some(2.0)).unwrap();
        assert!(matches!(f.evaluate(2.5), Err(Error::BeyondCap { .. })));
        assert_eq!(f.evaluate(2.0).unwrap(), 1.0);
    }

    #[test]
    fn sqrt_law() {
        let f = SmoothDensity::sqrt_law(1.0 / PI);
        assert!((f.evaluate(4.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert_eq!(f.evaluate(0.0).unwrap(), 0.0);
        // the generic quadrature path agrees with the closed form
        let generic = SmoothDensity::new(|t| 1.0 / (2.0 * PI * t.sqrt()), 0.0);
        assert!((generic.evaluate(4.0).unwrap() - 2.0 / PI).abs() < 1e-11);
    }

    #[test]
    fn leafwise_examples() {
        let golden = leafwise_df(&Slope::golden(), 100.0);
        assert!((golden.evaluate(PI * PI).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(golden.evaluate(0.0).unwrap(), 0.0);

        let one = leafwise_df(&Slope::reduce(1, 1).unwrap(), 100.0);
        assert!((one.evaluate(10.0).unwrap() - 1.0 / SQRT_2).abs() < 1e-15);
        assert_eq!(one.evaluate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn rational_jumps_follow_the_leaf_spectrum() {
        for (p, q) in [(1, 2), (2, 3), (-5, 7), (0, 1)] {
            let ls = leafwise_df(&Slope::reduce(p, q).unwrap(), 2e4);
            let DistributionFunction::Step(step) = &ls.df else { panic!("rational slope gives a step") };
            let len = leaf_length(p, q);
            let alpha = p as f64 / q as f64;
            for (j, &(tau, height)) in step.jumps().iter().enumerate().take(51) {
                let jf = j as f64;
                let by_spacing = (2.0 * PI * jf / len).powi(2);
                let by_leaf = FOUR_PI_SQ / (1.0 + alpha * alpha) * jf * jf / (q * q) as f64;
                assert!((tau - by_spacing).abs() <= 1e-13 * by_spacing.max(1.0));
                assert!((tau - by_leaf).abs() <= 1e-13 * by_leaf.max(1.0));
                assert_eq!(height, if j == 0 { 1.0 / len } else { 2.0 / len });
            }
        }
    }

    #[test]
    fn json_forms() {
        let f = DistributionFunction::Step(step(&[(0.0, 0.5), (1.0, 1.0)]));
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"type":"step","jumps":[[0.0,0.5],[1.0,1.0]]}"#);
        let g = leafwise_df(&Slope::golden(), 1.0).df;
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, format!(r#"{{"type":"sqrt","coefficient":{}}}"#, 1.0 / PI));
        let back: DistributionFunction = serde_json::from_str(&text).unwrap();
        assert!((back.evaluate(9.0).unwrap() - 3.0 / PI).abs() < 1e-15);
        let generic = DistributionFunction::Smooth(SmoothDensity::new(|_| 1.0, 0.0));
        assert!(serde_json::to_string(&generic).is_err());
        assert!(serde_json::from_str::<DistributionFunction>(r#"{"type":"step","jumps":[[1,1],[0,1]]}"#).is_err());
    }
}
