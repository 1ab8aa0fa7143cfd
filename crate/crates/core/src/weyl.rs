//! The adiabatic Weyl convolution
//!
//! ```text
//! N_h(λ) ≈ h^{−q} · (4π)^{−q/2} / Γ(q/2 + 1) · ∫_{−∞}^{λ} (λ − τ)^{q/2} dN_F(τ)
//! ```
//!
//! evaluated as a Stieltjes integral against any [`DistributionFunction`].
//! `q` is the transverse dimension; the torus foliation has `q = 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::leafwise::{leafwise_df, DistributionFunction, SmoothDensity, StepFunction};
use crate::quadrature;
use crate::slope::Slope;
use crate::spectrum::AdiabaticScale;

/// Default absolute tolerance of the smooth-density quadrature.
pub const DEFAULT_QUADRATURE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylParams {
    q: u32,
    lambda: f64,
    quadrature_tolerance: f64,
}

impl WeylParams {
    pub fn new(q: u32, lambda: f64, quadrature_tolerance: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("transverse dimension must be >= 1".into()));
        }
        if !(quadrature_tolerance > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
        }
        if lambda.is_nan() {
            return Err(Error::InvalidArgument("lambda is NaN".into()));
        }
        Ok(WeylParams { q, lambda, quadrature_tolerance })
    }

    /// `q = 1` with the default tolerance.
    pub fn torus(lambda: f64) -> Result<Self> {
        Self::new(1, lambda, DEFAULT_QUADRATURE_TOLERANCE)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn quadrature_tolerance(&self) -> f64 {
        self.quadrature_tolerance
    }
}

/// `Γ(q/2 + 1)` by the recurrence `Γ(x+1) = xΓ(x)` from `Γ(1) = 1` or `Γ(1/2) = √π`.
fn gamma_half_integer_plus_one(q: u32) -> f64 {
    let mut x = if q.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut g = if q.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let target = q as f64 / 2.0 + 1.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// `(4π)^{−q/2} / Γ(q/2 + 1)`
pub fn weyl_coefficient(q: u32) -> f64 {
    (4.0 * PI).powf(-(q as f64) / 2.0) / gamma_half_integer_plus_one(q)
}

#[inline]
fn transverse_power(gap: f64, q: u32) -> f64 {
    debug_assert!(gap >= 0.0);
    if q == 1 {
        gap.sqrt()
    } else if q.is_multiple_of(2) {
        gap.powi(q as i32 / 2)
    } else {
        gap.powf(q as f64 / 2.0)
    }
}

/// `∫_{−∞}^{λ} (λ − τ)^{q/2} dF(τ)`.
pub fn stieltjes_convolve(df: &DistributionFunction, params: &WeylParams) -> Result<f64> {
    match df {
        DistributionFunction::Step(step) => convolve_step(step, params),
        DistributionFunction::Smooth(smooth) => convolve_smooth(smooth, params),
    }
}

fn convolve_step(step: &StepFunction, params: &WeylParams) -> Result<f64> {
    let lambda = params.lambda;
    step.check_cap(lambda)?;
    Ok(step
        .jumps()
        .iter()
        .take_while(|&&(tau, _)| tau < lambda)
        .map(|&(tau, height)| height * transverse_power(lambda - tau, params.q))
        .sum())
}

fn convolve_smooth(smooth: &SmoothDensity, params: &WeylParams) -> Result<f64> {
    let lambda = params.lambda;
    let s0 = smooth.support_start();
    if lambda <= s0 {
        return Ok(0.0);
    }
    // τ = s₀ + w sin²θ, so λ − τ = w cos²θ and dτ = 2w sinθ cosθ dθ
    let width = lambda - s0;
    let q = params.q;
    let integrand = |th: f64| {
        let (sin, cos) = th.sin_cos();
        let tau = s0 + width * sin * sin;
        transverse_power(width * cos * cos, q) * smooth.density(tau) * 2.0 * width * sin * cos
    };
    let result = quadrature::integrate(integrand, 0.0, FRAC_PI_2, params.quadrature_tolerance, 4000)?;
    Ok(result.value)
}

/// Right-hand side of the adiabatic Weyl formula for the torus foliation of slope `s`.
pub fn weyl_estimate(s: &Slope, h: AdiabaticScale, params: &WeylParams) -> Result<f64> {
    if params.lambda <= 0.0 {
        return Ok(0.0);
    }
    let leaves = leafwise_df(s, params.lambda);
    let integral = stieltjes_convolve(&leaves.df, params)?;
    Ok(h.get().powi(-(params.q as i32)) * weyl_coefficient(params.q) * integral)
}
