//! Closed-form leading terms of `N_h(λ)` as `h → 0`.
//!
//! * irrational `α`: `h⁻¹ λ / (4π)`
//! * `α = p/q`: `h⁻¹ Σ_{k ∈ ℤ, 4π²k²/(p²+q²) < λ} (λ − 4π²k²/(p²+q²))^{1/2} / (π√(p²+q²))`
//!
//! These are written out directly and do not go through the Stieltjes
//! machinery in [`crate::weyl`], so the two can be compared.

use std::f64::consts::PI;

use crate::slope::{Slope, SlopeKind};
use crate::spectrum::{AdiabaticScale, FOUR_PI_SQ};

pub fn irrational_leading_term(h: AdiabaticScale, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    lambda / (4.0 * PI * h.get())
}

pub fn rational_leading_term(p: i64, q: i64, h: AdiabaticScale, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let len2 = (p as f64).powi(2) + (q as f64).powi(2);
    let spacing = FOUR_PI_SQ / len2;
    let kmax = (lambda / spacing).sqrt().ceil() as i64;
    let sum: f64 = (-kmax..=kmax)
        .map(|k| lambda - spacing * (k * k) as f64)
        .filter(|&gap| gap > 0.0)
        .map(f64::sqrt)
        .sum();
    sum / (PI * len2.sqrt() * h.get())
}

/// The leading term matching the slope class.
pub fn leading_term(s: &Slope, h: AdiabaticScale, lambda: f64) -> f64 {
    match s.kind() {
        SlopeKind::Rational { p, q } => rational_leading_term(*p, *q, h, lambda),
        SlopeKind::Irrational(_) => irrational_leading_term(h, lambda),
    }
}
