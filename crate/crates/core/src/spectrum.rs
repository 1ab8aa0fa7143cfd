//! Exact spectral data of the adiabatic Laplacian `Δ_h = Δ_F + h²Δ_H`.
//!
//! The eigenfunctions are the Fourier modes `e^{2πi(kx+ly)}`, so the
//! counting function `N_h(λ)` is the number of integer points inside the
//! ellipse
//!
//! ```text
//! 4π² [ (k+αl)² + h²(−αk+l)² ] / (1+α²) < λ.
//! ```
//!
//! [`count_exact`] walks the ellipse strip by strip: for every value of the
//! strip index the admissible values of the other index form one interval,
//! found from the quadratic's roots and then pinned down by evaluating
//! [`eigenvalue`] at its ends. [`count_naive`] is the exhaustive double loop
//! used to check it.

use std::f64::consts::PI;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::slope::Slope;

/// `4π²`
pub const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// Largest strip index accepted by [`count_exact`].
pub const MAX_STRIP_INDEX: u64 = 1 << 62;

/// Largest bounding box [`count_naive`] will scan.
pub const NAIVE_POINT_LIMIT: u64 = 100_000_000;

/// Largest spectrum [`eigenvalues_below`] will materialise.
pub const EIGENVALUE_LIST_LIMIT: u64 = 10_000_000;

/// The adiabatic parameter `h ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AdiabaticScale(f64);

impl AdiabaticScale {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h <= 1.0 {
            Ok(AdiabaticScale(h))
        } else {
            Err(Error::InvalidArgument(format!("h must lie in (0, 1], got {h}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Units a threshold was supplied in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyUnit {
    Absolute,
    /// `μ = λ / 4π²`
    Reduced,
}

/// Spectral threshold, kept in both absolute and reduced units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyWindow {
    lambda: f64,
    reduced: f64,
    unit: EnergyUnit,
}

impl EnergyWindow {
    pub fn absolute(lambda: f64) -> Self {
        EnergyWindow { lambda, reduced: lambda / FOUR_PI_SQ, unit: EnergyUnit::Absolute }
    }

    pub fn reduced(mu: f64) -> Self {
        EnergyWindow { lambda: FOUR_PI_SQ * mu, reduced: mu, unit: EnergyUnit::Reduced }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn reduced_value(&self) -> f64 {
        self.reduced
    }

    pub fn unit(&self) -> EnergyUnit {
        self.unit
    }
}

/// Result of a lattice count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LatticeCount {
    /// Points with `λ_kl < λ`.
    pub count: u64,
    /// Points with `|λ_kl − λ| ≤ tol`.
    pub near_boundary: u64,
    pub strips_visited: u64,
}

/// One eigenvalue together with the mode that carries it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueRecord {
    pub k: i64,
    pub l: i64,
    pub value: f64,
}

/// `λ_kl = 4π² [ (k+αl)² + h²(−αk+l)² ] / (1+α²)`
pub fn eigenvalue(s: &Slope, h: AdiabaticScale, k: i64, l: i64) -> f64 {
    eigenvalue_raw(s.value(), h.get() * h.get(), k, l)
}

#[inline]
fn eigenvalue_raw(alpha: f64, h2: f64, k: i64, l: i64) -> f64 {
    let (k, l) = (k as f64, l as f64);
    let along = k + alpha * l;
    let across = l - alpha * k;
    FOUR_PI_SQ * (along * along + h2 * across * across) / (1.0 + alpha * alpha)
}

/// Ellipse geometry shared by the strip walkers.
///
/// The strip index `x` is `k` unless `|α| > 1`, in which case it is `l`;
/// `y` is the other index. In these variables the quadratic form reads
/// `cx·x² + bxy·xy + cy·y²` with discriminant `4h²(1+α²)²`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StripGeometry {
    alpha: f64,
    h: f64,
    h2: f64,
    scale: f64,
    bxy: f64,
    cy: f64,
    det: f64,
    swapped: bool,
}

impl StripGeometry {
    pub(crate) fn new(alpha: f64, h: f64) -> Self {
        let h2 = h * h;
        let a2 = alpha * alpha;
        let swapped = alpha.abs() > 1.0;
        let coeff_k2 = 1.0 + h2 * a2;
        let coeff_l2 = a2 + h2;
        StripGeometry {
            alpha,
            h,
            h2,
            scale: FOUR_PI_SQ / (1.0 + a2),
            bxy: 2.0 * alpha * (1.0 - h2),
            cy: if swapped { coeff_k2 } else { coeff_l2 },
            det: 4.0 * h2 * (1.0 + a2) * (1.0 + a2),
            swapped,
        }
    }

    #[cfg(test)]
    fn swapped(&self) -> bool {
        self.swapped
    }

    /// Maps a (strip, free) index pair back to `(k, l)`.
    #[inline]
    pub(crate) fn mode(&self, x: i64, y: i64) -> (i64, i64) {
        if self.swapped {
            (y, x)
        } else {
            (x, y)
        }
    }

    #[inline]
    pub(crate) fn value(&self, x: i64, y: i64) -> f64 {
        let (k, l) = self.mode(x, y);
        eigenvalue_raw(self.alpha, self.h2, k, l)
    }

    /// Bounds `(|k|max, |l|max)` of the ellipse `λ_kl < level`, as floats.
    fn index_bounds(&self, level: f64) -> (f64, f64) {
        let root = level.max(0.0).sqrt() / (2.0 * PI * (1.0 + self.alpha * self.alpha).sqrt());
        let a = self.alpha.abs();
        (root * (1.0 + a / self.h), root * (a + 1.0 / self.h))
    }

    /// Largest strip index that can meet the ellipse `λ_kl < level`.
    pub(crate) fn strip_bound(&self, level: f64) -> Result<i64> {
        let (bk, bl) = self.index_bounds(level);
        let bound = if self.swapped { bl } else { bk }.ceil();
        if !bound.is_finite() || bound > MAX_STRIP_INDEX as f64 {
            return Err(Error::Overflow(format!(
                "strip range {bound:e} exceeds the limit of 2^62 strips"
            )));
        }
        Ok(bound as i64)
    }

    /// Bounds on both indices, in `(k, l)` order.
    fn box_bounds(&self, level: f64) -> Result<(i64, i64)> {
        let (bk, bl) = self.index_bounds(level);
        let (bk, bl) = (bk.ceil(), bl.ceil());
        if !(bk.is_finite() && bl.is_finite())
            || bk > MAX_STRIP_INDEX as f64
            || bl > MAX_STRIP_INDEX as f64
        {
            return Err(Error::Overflow("bounding box exceeds 2^62".into()));
        }
        Ok((bk as i64, bl as i64))
    }

    /// Approximate real interval of `y` with `λ < level` on strip `x`.
    #[inline]
    fn root_interval(&self, x: i64, level: f64) -> (f64, f64) {
        let xf = x as f64;
        let r = level / self.scale;
        let disc = 4.0 * self.cy * r - self.det * xf * xf;
        let center = -self.bxy * xf / (2.0 * self.cy);
        let half = if disc > 0.0 { disc.sqrt() / (2.0 * self.cy) } else { 0.0 };
        (center - half, center + half)
    }

    /// The integer interval `{y : inside(y)}` on strip `x`, located near the
    /// real roots for `level` and settled by `inside`. `inside` must describe
    /// a set of consecutive integers.
    #[inline]
    pub(crate) fn strip_range(
        &self,
        x: i64,
        level: f64,
        inside: impl Fn(i64) -> bool,
    ) -> Option<(i64, i64)> {
        let (y1, y2) = self.root_interval(x, level);
        let mut lo = y1.ceil() as i64;
        let mut hi = y2.floor() as i64;
        if lo > hi {
            let mid = ((y1 + y2) / 2.0).round() as i64;
            if !inside(mid) {
                return None;
            }
            lo = mid;
            hi = mid;
        }
        while lo <= hi && !inside(lo) {
            lo += 1;
        }
        while hi >= lo && !inside(hi) {
            hi -= 1;
        }
        if lo > hi {
            return None;
        }
        while inside(lo - 1) {
            lo -= 1;
        }
        while inside(hi + 1) {
            hi += 1;
        }
        Some((lo, hi))
    }

    /// Number of points on strip `x` whose eigenvalue satisfies `pred`, where
    /// `pred` is a threshold test at `level`.
    #[inline]
    fn strip_count(&self, x: i64, level: f64, pred: impl Fn(f64) -> bool) -> u64 {
        self.strip_range(x, level, |y| pred(self.value(x, y)))
            .map_or(0, |(lo, hi)| (hi - lo + 1) as u64)
    }
}

fn check_window(w: &EnergyWindow, tol: f64) -> Result<()> {
    if w.lambda().is_nan() {
        return Err(Error::InvalidArgument("lambda is NaN".into()));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tie tolerance must be finite and >= 0, got {tol}")));
    }
    Ok(())
}

/// Exact `N_h(λ) = #{(k,l) : λ_kl < λ}` by strip counting, using the
/// default [`Execution`].
pub fn count_exact(s: &Slope, h: AdiabaticScale, w: EnergyWindow, tol: f64) -> Result<LatticeCount> {
    count_exact_with(s, h, w, tol, Execution::default())
}

/// [`count_exact`] with an explicit execution strategy. The result does not
/// depend on the strategy.
pub fn count_exact_with(
    s: &Slope,
    h: AdiabaticScale,
    w: EnergyWindow,
    tol: f64,
    exec: Execution,
) -> Result<LatticeCount> {
    check_window(&w, tol)?;
    let lambda = w.lambda();
    let upper = lambda + tol;
    let lower = lambda - tol;
    if upper < 0.0 {
        return Ok(LatticeCount::default());
    }
    let geom = StripGeometry::new(s.value(), h.get());
    let bound = geom.strip_bound(upper)?;
    let (count, near_boundary) = exec.map_reduce(
        -bound,
        bound,
        (0u64, 0u64),
        |x| {
            let below = geom.strip_count(x, lambda, |v| v < lambda);
            let near = geom.strip_count(x, upper, |v| v <= upper)
                - geom.strip_count(x, lower, |v| v < lower);
            (below, near)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    Ok(LatticeCount { count, near_boundary, strips_visited: (2 * bound + 1) as u64 })
}

/// Number of strips [`count_exact`] would visit, without counting. Lets
/// callers enforce their own work budget before committing to a count.
pub fn strips_required(s: &Slope, h: AdiabaticScale, w: EnergyWindow, tol: f64) -> Result<u64> {
    check_window(&w, tol)?;
    let upper = w.lambda() + tol;
    if upper < 0.0 {
        return Ok(0);
    }
    let bound = StripGeometry::new(s.value(), h.get()).strip_bound(upper)?;
    Ok((2 * bound + 1) as u64)
}

/// Exhaustive double loop over the bounding box of the ellipse. Reports exact
/// ties (`λ_kl == λ`) as `near_boundary`.
pub fn count_naive(s: &Slope, h: AdiabaticScale, w: EnergyWindow) -> Result<LatticeCount> {
    check_window(&w, 0.0)?;
    let lambda = w.lambda();
    if lambda < 0.0 {
        return Ok(LatticeCount::default());
    }
    let alpha = s.value();
    let h2 = h.get() * h.get();
    let (kmax, lmax) = StripGeometry::new(alpha, h.get()).box_bounds(lambda)?;
    let points = (2 * kmax as u128 + 1) * (2 * lmax as u128 + 1);
    if points > NAIVE_POINT_LIMIT as u128 {
        return Err(Error::InstanceTooLarge(format!(
            "bounding box holds {points} points, limit is {NAIVE_POINT_LIMIT}"
        )));
    }
    let mut result = LatticeCount { strips_visited: (2 * kmax + 1) as u64, ..Default::default() };
    for k in -kmax..=kmax {
        for l in -lmax..=lmax {
            let v = eigenvalue_raw(alpha, h2, k, l);
            if v < lambda {
                result.count += 1;
            } else if v == lambda {
                result.near_boundary += 1;
            }
        }
    }
    Ok(result)
}

/// All eigenvalues strictly below `λ`, ascending, ties ordered by `(k, l)`.
pub fn eigenvalues_below(s: &Slope, h: AdiabaticScale, w: EnergyWindow) -> Result<Vec<EigenvalueRecord>> {
    eigenvalues_below_with(s, h, w, Execution::default())
}

pub fn eigenvalues_below_with(
    s: &Slope,
    h: AdiabaticScale,
    w: EnergyWindow,
    exec: Execution,
) -> Result<Vec<EigenvalueRecord>> {
    let total = count_exact_with(s, h, w, 0.0, exec)?.count;
    if total > EIGENVALUE_LIST_LIMIT {
        return Err(Error::TooManyEigenvalues { count: total, limit: EIGENVALUE_LIST_LIMIT });
    }
    let lambda = w.lambda();
    if total == 0 {
        return Ok(Vec::new());
    }
    let geom = StripGeometry::new(s.value(), h.get());
    let bound = geom.strip_bound(lambda)?;
    let mut records = exec.flat_collect(-bound, bound, |x| {
        match geom.strip_range(x, lambda, |y| geom.value(x, y) < lambda) {
            Some((lo, hi)) => (lo..=hi)
                .map(|y| {
                    let (k, l) = geom.mode(x, y);
                    EigenvalueRecord { k, l, value: geom.value(x, y) }
                })
                .collect(),
            None => Vec::new(),
        }
    });
    records.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.k.cmp(&b.k)).then(a.l.cmp(&b.l)));
    Ok(records)
}

/// Every eigenvalue of every mode inside `λ_kl < level` (unsorted). Used by
/// the spectral heat trace.
pub(crate) fn eigenvalue_values(s: &Slope, h: AdiabaticScale, level: f64, exec: Execution) -> Result<Vec<f64>> {
    let geom = StripGeometry::new(s.value(), h.get());
    let bound = geom.strip_bound(level)?;
    Ok(exec.flat_collect(-bound, bound, |x| {
        match geom.strip_range(x, level, |y| geom.value(x, y) < level) {
            Some((lo, hi)) => (lo..=hi).map(|y| geom.value(x, y)).collect(),
            None => Vec::new(),
        }
    }))
}

/// Counts with integer arithmetic only, for a rational slope `p/q`, a
/// rational `h²` and a rational reduced threshold `μ = λ/4π²`.
///
/// After clearing denominators the test `λ_kl < λ` becomes
/// `d·b·(qk+pl)² + d·a·(ql−pk)² < c·b·(p²+q²)` with `h² = a/b`, `μ = c/d`.
/// `near_boundary` counts exact ties.
pub fn count_exact_rational(
    s: &Slope,
    h_squared: Ratio<i64>,
    mu: Ratio<i64>,
    exec: Execution,
) -> Result<LatticeCount> {
    let (p, q) = s
        .as_fraction()
        .ok_or_else(|| Error::InvalidArgument("exact arithmetic needs a rational slope".into()))?;
    if *h_squared.numer() <= 0 || h_squared > Ratio::from_integer(1) {
        return Err(Error::InvalidArgument(format!("h² must lie in (0, 1], got {h_squared}")));
    }
    if *mu.numer() < 0 {
        return Ok(LatticeCount::default());
    }
    let (a, b) = (*h_squared.numer() as i128, *h_squared.denom() as i128);
    let (c, d) = (*mu.numer() as i128, *mu.denom() as i128);
    let (p, q) = (p as i128, q as i128);

    let h = (a as f64 / b as f64).sqrt();
    let lambda = FOUR_PI_SQ * c as f64 / d as f64;
    let geom = StripGeometry::new(p as f64 / q as f64, h);
    // one extra strip and index of slack covers rounding in the float bounds
    let bound = geom.strip_bound(lambda)? + 1;
    let (bk, bl) = geom.box_bounds(lambda)?;
    let reach = bk.max(bl) as i128 + 3;

    let overflow = || Error::Overflow("exact lattice test exceeds 128-bit range".into());
    let lin = (p.abs() + q).checked_mul(reach).ok_or_else(overflow)?;
    let lin2 = lin.checked_mul(lin).ok_or_else(overflow)?;
    d.checked_mul(a.max(b))
        .and_then(|x| x.checked_mul(lin2))
        .and_then(|x| x.checked_mul(2))
        .ok_or_else(overflow)?;
    let target = c
        .checked_mul(b)
        .and_then(|x| x.checked_mul(p * p + q * q))
        .ok_or_else(overflow)?;

    let form = move |k: i64, l: i64| -> i128 {
        let (k, l) = (k as i128, l as i128);
        let along = q * k + p * l;
        let across = q * l - p * k;
        d * b * along * along + d * a * across * across
    };
    let count_where = |x: i64, pred: &(dyn Fn(i128) -> bool + Sync)| -> u64 {
        geom.strip_range(x, lambda, |y| {
            let (k, l) = geom.mode(x, y);
            pred(form(k, l))
        })
        .map_or(0, |(lo, hi)| (hi - lo + 1) as u64)
    };
    let (count, near_boundary) = exec.map_reduce(
        -bound,
        bound,
        (0u64, 0u64),
        |x| {
            let below = count_where(x, &|g| g < target);
            let at_most = count_where(x, &|g| g <= target);
            (below, at_most - below)
        },
        |u, v| (u.0 + v.0, u.1 + v.1),
    );
    Ok(LatticeCount { count, near_boundary, strips_visited: (2 * bound + 1) as u64 })
}

/// Parses `"a/b"`, an integer, or a plain decimal (optionally with an
/// exponent) into an exact fraction.
pub fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("not an exact rational: {text:?}"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut numer: i128 = digits.parse().map_err(|_| bad())?;
    let mut denom: i128 = 1;
    let shift = exponent - frac_part.len() as i32;
    let ten_pow = |n: u32| 10i128.checked_pow(n).ok_or_else(bad);
    if shift >= 0 {
        numer = numer.checked_mul(ten_pow(shift as u32)?).ok_or_else(bad)?;
    } else {
        denom = ten_pow((-shift) as u32)?;
    }
    let r = Ratio::new(numer, denom);
    let n = i64::try_from(*r.numer()).map_err(|_| bad())?;
    let d = i64::try_from(*r.denom()).map_err(|_| bad())?;
    Ok(Ratio::new(if negative { -n } else { n }, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale(h: f64) -> AdiabaticScale {
        AdiabaticScale::new(h).unwrap()
    }

    fn slope(s: &str) -> Slope {
        s.parse().unwrap()
    }

    fn count(s: &str, h: f64, lambda: f64) -> u64 {
        count_exact(&slope(s), scale(h), EnergyWindow::absolute(lambda), 0.0).unwrap().count
    }

    #[test]
    fn scale_bounds() {
        assert!(AdiabaticScale::new(0.0).is_err());
        assert!(AdiabaticScale::new(1.5).is_err());
        assert!(AdiabaticScale::new(f64::NAN).is_err());
        assert!(AdiabaticScale::new(1.0).is_ok());
    }

    #[test]
    fn eigenvalue_examples() {
        for s in ["0/1", "1/2", "golden", "-3/2"] {
            assert_eq!(eigenvalue(&slope(s), scale(0.3), 0, 0), 0.0);
        }
        assert_eq!(eigenvalue(&slope("1/1"), scale(1.0), 1, 0), FOUR_PI_SQ);
        let v = eigenvalue(&slope("0/1"), scale(0.5), 0, 1);
        assert!((v - PI * PI).abs() < 1e-14);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count("0/1", 0.01, 1.0), 31);
        assert_eq!(count("golden", 0.2, 0.0), 0);
        assert_eq!(count("2/3", 0.05, 1e-9), 1);
        assert_eq!(count("1/1", 1.0, FOUR_PI_SQ * 2.5), 9);
        assert_eq!(count("1/1", 1.0, 40.0), 5);
    }

    #[test]
    fn negative_lambda_counts_nothing() {
        let c = count_exact(&slope("1/2"), scale(0.5), EnergyWindow::absolute(-3.0), 0.0).unwrap();
        assert_eq!(c, LatticeCount::default());
    }

    #[test]
    fn strip_budget_matches_the_count() {
        for (s, h, lambda) in [("golden", 0.01, 30.0), ("-5/2", 0.3, 100.0), ("0/1", 1.0, 0.0)] {
            let w = EnergyWindow::absolute(lambda);
            let c = count_exact(&slope(s), scale(h), w, 0.5).unwrap();
            assert_eq!(strips_required(&slope(s), scale(h), w, 0.5).unwrap(), c.strips_visited);
        }
        let w = EnergyWindow::absolute(-1.0);
        assert_eq!(strips_required(&slope("1/2"), scale(0.5), w, 0.0).unwrap(), 0);
    }

    #[test]
    fn zero_mode_is_a_tie_at_zero() {
        let c = count_exact(&slope("golden"), scale(0.5), EnergyWindow::absolute(0.0), 0.0).unwrap();
        assert_eq!((c.count, c.near_boundary), (0, 1));
    }

    #[test]
    fn ties_are_reported() {
        // h = 1, α = 0: eigenvalue 4π² is shared by four modes
        let w = EnergyWindow::absolute(FOUR_PI_SQ);
        let c = count_exact(&slope("0/1"), scale(1.0), w, 0.0).unwrap();
        assert_eq!((c.count, c.near_boundary), (1, 4));
        let n = count_naive(&slope("0/1"), scale(1.0), w).unwrap();
        assert_eq!((n.count, n.near_boundary), (1, 4));
        // a wide tolerance catches the next shell too
        let c = count_exact(&slope("0/1"), scale(1.0), w, FOUR_PI_SQ * 1.01).unwrap();
        assert_eq!(c.near_boundary, 1 + 4 + 4);
    }

    #[test]
    fn naive_examples() {
        let n = count_naive(&slope("0/1"), scale(1.0), EnergyWindow::absolute(1.0)).unwrap();
        assert_eq!(n.count, 1);
        for (s, h, lambda) in [("2/3", 0.2, 100.0), ("golden", 0.5, 50.0), ("-7/3", 0.15, 80.0)] {
            let w = EnergyWindow::absolute(lambda);
            assert_eq!(
                count_exact(&slope(s), scale(h), w, 0.0).unwrap().count,
                count_naive(&slope(s), scale(h), w).unwrap().count,
                "{s} {h} {lambda}"
            );
        }
    }

    #[test]
    fn naive_refuses_huge_boxes() {
        let err = count_naive(&slope("golden"), scale(1e-4), EnergyWindow::absolute(1e4)).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge(_)));
    }

    #[test]
    fn strip_overflow() {
        let err = count_exact(&slope("1/1"), scale(1e-300), EnergyWindow::absolute(1e300), 0.0).unwrap_err();
        assert!(matches!(err, Error::Overflow(_)));
    }

    #[test]
    fn strips_respect_bound_and_swap() {
        // |α| > 1 walks strips in l, whose range is the shorter one
        let s = slope("3/1");
        let h = scale(0.1);
        let c = count_exact(&s, h, EnergyWindow::absolute(50.0), 0.0).unwrap();
        let geom = StripGeometry::new(3.0, 0.1);
        assert!(geom.swapped());
        let (bk, bl) = geom.box_bounds(50.0).unwrap();
        assert!(bl < bk);
        assert_eq!(c.strips_visited, (2 * bl + 1) as u64);
    }

    #[test]
    fn listing_matches_count() {
        let s = slope("1/1");
        let list = eigenvalues_below(&s, scale(1.0), EnergyWindow::absolute(40.0)).unwrap();
        assert_eq!(list.len(), 5);
        assert_eq!((list[0].k, list[0].l, list[0].value), (0, 0, 0.0));
        assert!(list[1..].iter().all(|r| (r.value - FOUR_PI_SQ).abs() < 1e-12));
        let modes: Vec<_> = list[1..].iter().map(|r| (r.k, r.l)).collect();
        assert_eq!(modes, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
        assert!(eigenvalues_below(&s, scale(1.0), EnergyWindow::absolute(0.0)).unwrap().is_empty());

        let s = slope("golden");
        let w = EnergyWindow::absolute(120.0);
        let list = eigenvalues_below(&s, scale(0.05), w).unwrap();
        assert_eq!(list.len() as u64, count_exact(&s, scale(0.05), w, 0.0).unwrap().count);
        assert!(list.windows(2).all(|p| p[0].value <= p[1].value));
        assert!(list.iter().all(|r| r.value == eigenvalue(&s, scale(0.05), r.k, r.l)));
    }

    #[test]
    fn listing_limit() {
        let err = eigenvalues_below(&slope("golden"), scale(1e-3), EnergyWindow::absolute(2e5)).unwrap_err();
        assert!(matches!(err, Error::TooManyEigenvalues { .. }));
    }

    #[test]
    fn parse_ratio_forms() {
        assert_eq!(parse_ratio("0.01").unwrap(), Ratio::new(1, 100));
        assert_eq!(parse_ratio("2.5").unwrap(), Ratio::new(5, 2));
        assert_eq!(parse_ratio("-3/6").unwrap(), Ratio::new(-1, 2));
        assert_eq!(parse_ratio("1e-3").unwrap(), Ratio::new(1, 1000));
        assert_eq!(parse_ratio("12").unwrap(), Ratio::from_integer(12));
        assert!(parse_ratio("abc").is_err());
        assert!(parse_ratio("1/0").is_err());
    }

    #[test]
    fn integer_path_matches_float_path() {
        for (s, h, mu) in [("1/2", "1/100", "3/4"), ("2/3", "1/25", "5/2"), ("-5/2", "9/100", "7/3")] {
            let h2 = parse_ratio(h).unwrap();
            let mu = parse_ratio(mu).unwrap();
            let exact = count_exact_rational(&slope(s), h2, mu, Execution::Sequential).unwrap();
            let hf = (*h2.numer() as f64 / *h2.denom() as f64).sqrt();
            let w = EnergyWindow::reduced(*mu.numer() as f64 / *mu.denom() as f64);
            let float = count_exact(&slope(s), scale(hf), w, 0.0).unwrap();
            assert_eq!(exact.count, float.count, "{s} {h} {mu}");
        }
    }

    #[test]
    fn integer_path_sees_exact_ties() {
        // α = 0, h² = 1, μ = 1: the four modes (±1,0), (0,±1) sit on the boundary
        let c = count_exact_rational(&slope("0/1"), Ratio::from_integer(1), Ratio::from_integer(1), Execution::Sequential)
            .unwrap();
        assert_eq!((c.count, c.near_boundary), (1, 4));
        // α = 1, h² = 1/4, μ = 1/4 ... λ_kl·(1+α²)/4π² = (k+l)² + (l−k)²/4
        let c = count_exact_rational(&slope("1/1"), Ratio::new(1, 4), Ratio::new(1, 4), Execution::Parallel).unwrap();
        let oracle = (-5i64..=5)
            .flat_map(|k| (-5i64..=5).map(move |l| (k, l)))
            .filter(|&(k, l)| 4 * (k + l).pow(2) + (l - k).pow(2) < 2)
            .count() as u64;
        assert_eq!(c.count, oracle);
        assert!(count_exact_rational(&slope("golden"), Ratio::new(1, 4), Ratio::new(1, 4), Execution::Parallel).is_err());
    }
}
