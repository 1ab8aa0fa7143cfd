//! Heat trace `tr e^{−tΔ_h}` by two independent series.
//!
//! The spectral series sums `e^{−tλ_kl}` over the eigenvalues. The image
//! series sums the periodised Euclidean heat kernel on the diagonal,
//!
//! ```text
//! tr e^{−tΔ_h} = h⁻¹/(4πt) Σ_{k,l} exp[ −(k+αl)²/(4t(1+α²)) − (−αk+l)²/(4th²(1+α²)) ],
//! ```
//!
//! and agrees with the first by Poisson summation. Each series is truncated
//! at an ellipse and reports a rigorous bound on what it left out.
//!
//! Both bounds rest on the same lattice estimate: if every point with
//! `Q(n) < x` lies in an ellipse of area `A·x` and perimeter at most `P·√x`,
//! the unit squares around those points fit in the ellipse widened by
//! `√2/2`, so `#{Q < x} ≤ A·x + (√2/2)·P·√x + π/2`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::leafwise::{DistributionFunction, StepFunction};
use crate::quadrature;
use crate::slope::Slope;
use crate::spectrum::{self, AdiabaticScale, EnergyWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMethod {
    Spectral,
    Image,
}

impl TraceMethod {
    pub fn name(self) -> &'static str {
        match self {
            TraceMethod::Spectral => "spectral",
            TraceMethod::Image => "image",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTraceResult {
    pub value: f64,
    /// Upper bound on the sum of the omitted terms.
    pub truncation_bound: f64,
    pub terms_used: u64,
    pub method: TraceMethod,
}

/// `#{Q < x} ≤ linear·x + root·√x + constant`
#[derive(Clone, Copy, Debug)]
struct CountingGrowth {
    linear: f64,
    root: f64,
    constant: f64,
}

impl CountingGrowth {
    /// Ellipse with semi-axes `a·√x` and `b·√x`.
    fn ellipse(a: f64, b: f64) -> Self {
        CountingGrowth {
            linear: PI * a * b,
            // perimeter ≤ 4(a+b)√x, widened by √2/2
            root: 2.0 * SQRT_2 * (a + b),
            constant: PI / 2.0,
        }
    }

    /// Bound on `Σ_{Q ≥ x} e^{−sQ}`.
    ///
    /// Integrating by parts, the tail is at most `s ∫_x^∞ e^{−sy} N(y) dy`;
    /// `√y ≤ √x + (y−x)/(2√x)` handles the root term.
    fn tail(&self, s: f64, x: f64) -> f64 {
        let root_x = x.sqrt();
        (-s * x).exp()
            * (self.linear * (x + 1.0 / s) + self.root * (root_x + 1.0 / (2.0 * s * root_x)) + self.constant)
    }

    /// Smallest cutoff on a geometric grid whose tail is at most `target`.
    fn cutoff(&self, s: f64, target: f64) -> f64 {
        let mut x = 1.0 / s;
        while self.tail(s, x) > target {
            x *= 1.05;
        }
        x
    }
}

/// Sums in ascending order with Neumaier compensation.
fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn check_trace_args(t: f64, eps: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be positive and finite, got {t}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// `Σ e^{−tλ_kl}` over the spectrum of `Δ_h`, with omitted tail `≤ eps`.
pub fn heat_trace_spectral(s: &Slope, h: AdiabaticScale, t: f64, eps: f64) -> Result<HeatTraceResult> {
    heat_trace_spectral_with(s, h, t, eps, Execution::default())
}

pub fn heat_trace_spectral_with(
    s: &Slope,
    h: AdiabaticScale,
    t: f64,
    eps: f64,
    exec: Execution,
) -> Result<HeatTraceResult> {
    check_trace_args(t, eps)?;
    // λ < x  ⇔  u² + h²v² < x/4π² in rotated coordinates
    let semi = 1.0 / (2.0 * PI);
    let growth = CountingGrowth::ellipse(semi, semi / h.get());
    let cutoff = growth.cutoff(t, eps);
    let values = spectrum::eigenvalue_values(s, h, cutoff * (1.0 + 1e-9), exec)?;
    let terms_used = values.len() as u64;
    let terms = values.into_iter().map(|v| (-t * v).exp()).collect();
    Ok(HeatTraceResult {
        value: stable_sum(terms),
        truncation_bound: growth.tail(t, cutoff),
        terms_used,
        method: TraceMethod::Spectral,
    })
}

/// Exponent of the `(k, l)` image term, without the `h⁻¹/(4πt)` prefactor.
pub fn image_exponent(alpha: f64, h: f64, t: f64, k: i64, l: i64) -> f64 {
    let (k, l) = (k as f64, l as f64);
    let norm = 1.0 + alpha * alpha;
    let along = k + alpha * l;
    let across = -alpha * k + l;
    along * along / (4.0 * t * norm) + across * across / (4.0 * t * h * h * norm)
}

/// The `(k, l)` image term `exp(−…)`, without the prefactor.
pub fn image_term(s: &Slope, h: AdiabaticScale, t: f64, k: i64, l: i64) -> f64 {
    (-image_exponent(s.value(), h.get(), t, k, l)).exp()
}

/// The image (theta) series, with omitted tail `≤ eps`.
pub fn heat_trace_image(s: &Slope, h: AdiabaticScale, t: f64, eps: f64) -> Result<HeatTraceResult> {
    heat_trace_image_with(s, h, t, eps, Execution::default())
}

pub fn heat_trace_image_with(
    s: &Slope,
    h: AdiabaticScale,
    t: f64,
    eps: f64,
    exec: Execution,
) -> Result<HeatTraceResult> {
    check_trace_args(t, eps)?;
    let alpha = s.value();
    let hv = h.get();
    let prefactor = 1.0 / (4.0 * PI * t * hv);
    // exponent < x  ⇔  u² + v²/h² < 4tx, semi-axes √(4t)·√x and h√(4t)·√x
    let radius = (4.0 * t).sqrt();
    let growth = CountingGrowth::ellipse(radius, hv * radius);
    let cutoff = growth.cutoff(1.0, eps / prefactor);

    // (k + αl)² + g(l − αk)² < m with g = h⁻², m = 4t(1+α²)·cutoff
    let norm = 1.0 + alpha * alpha;
    let g = 1.0 / (hv * hv);
    let m = 4.0 * t * norm * cutoff * (1.0 + 1e-9);
    let kmax = ((m / norm).sqrt() * (1.0 + alpha.abs() * hv) / norm.sqrt()).ceil() + 1.0;
    if !kmax.is_finite() || kmax > spectrum::MAX_STRIP_INDEX as f64 {
        return Err(Error::Overflow("image series range exceeds 2^62".into()));
    }
    let kmax = kmax as i64;
    let lead = alpha * alpha + g;
    let exponents = exec.flat_collect(-kmax, kmax, |k| {
        let kf = k as f64;
        let disc = lead * m - g * norm * norm * kf * kf;
        if disc < 0.0 {
            return Vec::new();
        }
        let center = -kf * alpha * (1.0 - g) / lead;
        let half = disc.sqrt() / lead;
        let lo = (center - half).floor() as i64 - 1;
        let hi = (center + half).ceil() as i64 + 1;
        (lo..=hi).map(|l| image_exponent(alpha, hv, t, k, l)).collect()
    });
    let terms_used = exponents.len() as u64;
    let terms = exponents.into_iter().map(|e| (-e).exp()).collect();
    Ok(HeatTraceResult {
        value: prefactor * stable_sum(terms),
        truncation_bound: prefactor * growth.tail(1.0, cutoff),
        terms_used,
        method: TraceMethod::Image,
    })
}

/// `lim_{h→0} h · tr e^{−tΔ_h} = 1/(4πt)` for irrational slopes.
pub fn adiabatic_trace_limit(s: &Slope, t: f64) -> Result<f64> {
    if s.is_rational() {
        return Err(Error::RationalSlope);
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(1.0 / (4.0 * PI * t))
}

/// Laplace–Stieltjes transform `∫ e^{−λt} dF(λ)` of a distribution function
/// of at most polynomial growth.
pub fn laplace_stieltjes(df: &DistributionFunction, t: f64) -> Result<f64> {
    laplace_stieltjes_with_growth(df, t, 0.0)
}

/// As [`laplace_stieltjes`], for `F` growing like `e^{growth·λ}`; requires
/// `t > growth`.
pub fn laplace_stieltjes_with_growth(df: &DistributionFunction, t: f64, growth: f64) -> Result<f64> {
    if !(t > growth) {
        return Err(Error::Divergent { t, growth });
    }
    match df {
        DistributionFunction::Step(step) => {
            Ok(stable_sum(step.jumps().iter().map(|&(tau, height)| height * (-tau * t).exp()).collect()))
        }
        DistributionFunction::Smooth(smooth) => {
            if let Some(c) = smooth.sqrt_coefficient() {
                return Ok(0.5 * c * (PI / t).sqrt());
            }
            // τ = s₀ + u² on [0, U] with e^{−tU²} far below double precision
            let s0 = smooth.support_start();
            let upper = (60.0 / t).sqrt();
            let q = quadrature::integrate(
                |u: f64| {
                    let tau = s0 + u * u;
                    (-tau * t).exp() * smooth.density(tau) * 2.0 * u
                },
                0.0,
                upper,
                1e-12,
                4000,
            )?;
            Ok(q.value)
        }
    }
}

/// `N_h` as a step function on `(−∞, lambda_max]`, with one jump per
/// distinct eigenvalue and the multiplicity as its height.
pub fn sampled_counting_function(s: &Slope, h: AdiabaticScale, lambda_max: f64) -> Result<DistributionFunction> {
    let records = spectrum::eigenvalues_below(s, h, EnergyWindow::absolute(lambda_max))?;
    let mut jumps: Vec<(f64, f64)> = Vec::new();
    for r in records {
        match jumps.last_mut() {
            Some(last) if last.0 == r.value => last.1 += 1.0,
            _ => jumps.push((r.value, 1.0)),
        }
    }
    Ok(DistributionFunction::Step(StepFunction::new(jumps, Some(lambda_max))?))
}
