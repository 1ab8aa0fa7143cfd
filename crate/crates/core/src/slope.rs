//! Foliation slopes and their continued-fraction expansions.
//!
//! A [`Slope`] is either an exact reduced fraction `p/q` or a named
//! irrational carried together with a long decimal expansion. Whether a slope
//! is rational is decided by how it was constructed, never by inspecting the
//! floating-point value.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Minimum number of significant digits stored for an irrational slope.
pub const MIN_SIGNIFICANT_DIGITS: usize = 30;

const GOLDEN_DIGITS: &str = "1.6180339887498948482045868343656381177203091798058";
const SQRT2_DIGITS: &str = "1.4142135623730950488016887242096980785696718753769";
const E_DIGITS: &str = "2.7182818284590452353602874713526624977572470936999";
const PI_DIGITS: &str = "3.1415926535897932384626433832795028841971693993751";
const CBRT2_DIGITS: &str = "1.2599210498948731647672106072782283505702514647015";

/// Catalog of irrational slopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IrrationalTag {
    Golden,
    Sqrt2,
    E,
    Pi,
    Cbrt2,
    /// User-supplied decimal expansion.
    Custom,
}

impl IrrationalTag {
    pub const CATALOG: [IrrationalTag; 5] = [
        IrrationalTag::Golden,
        IrrationalTag::Sqrt2,
        IrrationalTag::E,
        IrrationalTag::Pi,
        IrrationalTag::Cbrt2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IrrationalTag::Golden => "golden",
            IrrationalTag::Sqrt2 => "sqrt2",
            IrrationalTag::E => "e",
            IrrationalTag::Pi => "pi",
            IrrationalTag::Cbrt2 => "cbrt2",
            IrrationalTag::Custom => "custom",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::CATALOG.into_iter().find(|t| t.name() == name)
    }

    fn digits(self) -> Option<&'static str> {
        match self {
            IrrationalTag::Golden => Some(GOLDEN_DIGITS),
            IrrationalTag::Sqrt2 => Some(SQRT2_DIGITS),
            IrrationalTag::E => Some(E_DIGITS),
            IrrationalTag::Pi => Some(PI_DIGITS),
            IrrationalTag::Cbrt2 => Some(CBRT2_DIGITS),
            IrrationalTag::Custom => None,
        }
    }
}

/// An irrational slope: tag, nearest 64-bit value and the decimal it was rounded from.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedIrrational {
    tag: IrrationalTag,
    value: f64,
    digits: String,
}

impl NamedIrrational {
    pub fn tag(&self) -> IrrationalTag {
        self.tag
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The high-precision decimal expansion.
    pub fn digits(&self) -> &str {
        &self.digits
    }
}

/// The two slope classes.
#[derive(Clone, Debug, PartialEq)]
pub enum SlopeKind {
    /// Reduced fraction with `q >= 1` and `gcd(|p|, q) = 1`.
    Rational { p: i64, q: i64 },
    Irrational(NamedIrrational),
}

/// Slope of the Kronecker foliation.
#[derive(Clone, Debug, PartialEq)]
pub struct Slope {
    kind: SlopeKind,
}

impl Slope {
    /// Builds the reduced fraction `p/q`; the sign is carried by `p`.
    pub fn reduce(p: i64, q: i64) -> Result<Slope> {
        if q == 0 {
            return Err(Error::InvalidSlope("zero denominator".into()));
        }
        let (p, q) = reduce_i128(p as i128, q as i128);
        let p = i64::try_from(p).map_err(|_| Error::InvalidSlope("numerator out of range".into()))?;
        let q =
            i64::try_from(q).map_err(|_| Error::InvalidSlope("denominator out of range".into()))?;
        Ok(Slope { kind: SlopeKind::Rational { p, q } })
    }

    pub fn zero() -> Slope {
        Slope { kind: SlopeKind::Rational { p: 0, q: 1 } }
    }

    pub fn golden() -> Slope {
        Self::catalog(IrrationalTag::Golden)
    }

    pub fn sqrt2() -> Slope {
        Self::catalog(IrrationalTag::Sqrt2)
    }

    /// A catalog irrational. Panics on [`IrrationalTag::Custom`].
    pub fn catalog(tag: IrrationalTag) -> Slope {
        let digits = tag.digits().expect("custom slopes need digits, use Slope::custom");
        Slope {
            kind: SlopeKind::Irrational(NamedIrrational {
                tag,
                value: digits.parse().expect("catalog digits are valid"),
                digits: digits.to_string(),
            }),
        }
    }

    /// A user-supplied irrational given by at least
    /// [`MIN_SIGNIFICANT_DIGITS`] significant decimal digits.
    pub fn custom(decimal: &str) -> Result<Slope> {
        let parsed = Decimal::parse(decimal)?;
        if parsed.significant_digits < MIN_SIGNIFICANT_DIGITS {
            return Err(Error::InvalidSlope(format!(
                "custom irrational needs at least {MIN_SIGNIFICANT_DIGITS} significant digits, got {}",
                parsed.significant_digits
            )));
        }
        let value: f64 = decimal
            .parse()
            .map_err(|_| Error::InvalidSlope(format!("not a decimal: {decimal}")))?;
        Ok(Slope {
            kind: SlopeKind::Irrational(NamedIrrational {
                tag: IrrationalTag::Custom,
                value,
                digits: decimal.to_string(),
            }),
        })
    }

    pub fn kind(&self) -> &SlopeKind {
        &self.kind
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, SlopeKind::Rational { .. })
    }

    /// `Some((p, q))` for rational slopes.
    pub fn as_fraction(&self) -> Option<(i64, i64)> {
        match self.kind {
            SlopeKind::Rational { p, q } => Some((p, q)),
            SlopeKind::Irrational(_) => None,
        }
    }

    /// Nearest 64-bit value of the slope.
    pub fn value(&self) -> f64 {
        match &self.kind {
            SlopeKind::Rational { p, q } => *p as f64 / *q as f64,
            SlopeKind::Irrational(irr) => irr.value,
        }
    }

    /// Continued-fraction expansion. Irrational slopes only expand as far as
    /// their stored digits certify each partial quotient.
    pub fn continued_fraction(&self, terms: Terms) -> Result<ContinuedFraction> {
        match &self.kind {
            SlopeKind::Rational { p, q } => Ok(rational_expansion(*p as i128, *q as i128, terms)),
            SlopeKind::Irrational(irr) => {
                let n = match terms {
                    Terms::Count(n) => n,
                    Terms::Full => {
                        return Err(Error::InvalidArgument(
                            "an irrational slope has no finite expansion".into(),
                        ))
                    }
                };
                certified_expansion(&irr.digits, n)
            }
        }
    }

    /// `|alpha - p/q|`, computed exactly against the stored digits and
    /// rounded to the nearest float.
    pub fn approximation_error(&self, p: i128, q: i128) -> f64 {
        let alpha = self.exact_value();
        let approx = BigRational::new(BigInt::from(p), BigInt::from(q));
        (alpha - approx).abs().to_f64().unwrap_or(f64::INFINITY)
    }

    /// Exact rational value of `p/q`, or of the stored decimal expansion.
    fn exact_value(&self) -> BigRational {
        match &self.kind {
            SlopeKind::Rational { p, q } => BigRational::new(BigInt::from(*p), BigInt::from(*q)),
            SlopeKind::Irrational(irr) => {
                Decimal::parse(&irr.digits).expect("stored digits are valid").value
            }
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SlopeKind::Rational { p, q } => write!(f, "{p}/{q}"),
            SlopeKind::Irrational(irr) if irr.tag == IrrationalTag::Custom => {
                write!(f, "dec:{}", irr.digits)
            }
            SlopeKind::Irrational(irr) => f.write_str(irr.tag.name()),
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let s = s.trim();
        if let Some(digits) = s.strip_prefix("dec:") {
            return Slope::custom(digits);
        }
        if let Some(tag) = IrrationalTag::from_name(s) {
            return Ok(Slope::catalog(tag));
        }
        let bad = || Error::InvalidSlope(format!("cannot parse slope {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                Slope::reduce(p, q)
            }
            None => Slope::reduce(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SlopeRepr {
    Rational { p: i64, q: i64 },
    Irrational { tag: String, value: String },
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match &self.kind {
            SlopeKind::Rational { p, q } => SlopeRepr::Rational { p: *p, q: *q },
            SlopeKind::Irrational(irr) => SlopeRepr::Irrational {
                tag: irr.tag.name().to_string(),
                value: irr.digits.clone(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Slope, D::Error> {
        use serde::de::Error as _;
        match SlopeRepr::deserialize(deserializer)? {
            SlopeRepr::Rational { p, q } => Slope::reduce(p, q).map_err(D::Error::custom),
            SlopeRepr::Irrational { tag, value } => match IrrationalTag::from_name(&tag) {
                Some(tag) => Ok(Slope::catalog(tag)),
                None if tag == "custom" => Slope::custom(&value).map_err(D::Error::custom),
                None => Err(D::Error::custom(format!("unknown irrational tag {tag:?}"))),
            },
        }
    }
}

/// How many partial quotients to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terms {
    Count(usize),
    /// Run to termination; rational slopes only.
    Full,
}

/// Partial quotients `[a0; a1, a2, ...]` with their convergents `pn/qn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    partial_quotients: Vec<i128>,
    convergents: Vec<(i128, i128)>,
    terminated: bool,
}

impl ContinuedFraction {
    /// Builds the expansion from explicit quotients. `a1, a2, ...` must be positive.
    pub fn from_quotients(quotients: &[i128]) -> Result<ContinuedFraction> {
        if quotients.iter().skip(1).any(|&a| a < 1) {
            return Err(Error::InvalidArgument("partial quotients after a0 must be >= 1".into()));
        }
        let mut cf = ContinuedFraction {
            partial_quotients: Vec::new(),
            convergents: Vec::new(),
            terminated: true,
        };
        for &a in quotients {
            cf.push(a)?;
        }
        Ok(cf)
    }

    pub fn partial_quotients(&self) -> &[i128] {
        &self.partial_quotients
    }

    pub fn convergents(&self) -> &[(i128, i128)] {
        &self.convergents
    }

    /// True when the expansion ended because the remainder vanished.
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Value of the last convergent.
    pub fn last_convergent(&self) -> Option<(i128, i128)> {
        self.convergents.last().copied()
    }

    /// `[a0;a1,a2,...]`
    pub fn notation(&self) -> String {
        let mut out = String::from("[");
        for (i, a) in self.partial_quotients.iter().enumerate() {
            match i {
                0 => out.push_str(&a.to_string()),
                1 => out.push_str(&format!(";{a}")),
                _ => out.push_str(&format!(",{a}")),
            }
        }
        out.push(']');
        out
    }

    fn push(&mut self, a: i128) -> Result<()> {
        let n = self.convergents.len();
        let (p1, q1) = if n >= 1 { self.convergents[n - 1] } else { (1, 0) };
        let (p2, q2) = if n >= 2 { self.convergents[n - 2] } else if n == 1 { (1, 0) } else { (0, 1) };
        let overflow = || Error::Overflow("convergent exceeds 128-bit range".into());
        let p = a.checked_mul(p1).and_then(|x| x.checked_add(p2)).ok_or_else(overflow)?;
        let q = a.checked_mul(q1).and_then(|x| x.checked_add(q2)).ok_or_else(overflow)?;
        self.partial_quotients.push(a);
        self.convergents.push((p, q));
        Ok(())
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

fn reduce_i128(p: i128, q: i128) -> (i128, i128) {
    let g = p.gcd(&q);
    let (mut p, mut q) = if g == 0 { (p, q) } else { (p / g, q / g) };
    if q < 0 {
        p = -p;
        q = -q;
    }
    (p, q)
}

fn rational_expansion(mut p: i128, mut q: i128, terms: Terms) -> ContinuedFraction {
    let limit = match terms {
        Terms::Count(n) => n,
        Terms::Full => usize::MAX,
    };
    let mut cf = ContinuedFraction {
        partial_quotients: Vec::new(),
        convergents: Vec::new(),
        terminated: false,
    };
    while cf.partial_quotients.len() < limit {
        let a = p.div_euclid(q);
        // convergents of p/q never exceed |p|, q in magnitude
        cf.push(a).expect("rational convergents are bounded by the input");
        let r = p - a * q;
        if r == 0 {
            cf.terminated = true;
            break;
        }
        p = q;
        q = r;
    }
    cf
}

/// Runs the Euclidean algorithm on both ends of the interval the stored digits
/// pin the slope to, keeping only quotients on which the ends agree.
fn certified_expansion(digits: &str, n: usize) -> Result<ContinuedFraction> {
    let dec = Decimal::parse(digits)?;
    let mut lo = &dec.value - &dec.ulp;
    let mut hi = &dec.value + &dec.ulp;
    let mut cf = ContinuedFraction {
        partial_quotients: Vec::new(),
        convergents: Vec::new(),
        terminated: false,
    };
    while cf.partial_quotients.len() < n {
        let a_lo = lo.floor();
        let a_hi = hi.floor();
        let certified = cf.partial_quotients.len();
        if a_lo != a_hi {
            return Err(Error::PrecisionExhausted { certified });
        }
        let a = a_lo
            .to_integer()
            .to_i128()
            .ok_or_else(|| Error::Overflow("partial quotient exceeds 128-bit range".into()))?;
        cf.push(a)?;
        let frac_lo = &lo - &a_lo;
        let frac_hi = &hi - &a_hi;
        if frac_lo.is_zero() || frac_hi.is_zero() {
            if cf.partial_quotients.len() < n {
                return Err(Error::PrecisionExhausted { certified: certified + 1 });
            }
            break;
        }
        // x -> 1/(x - a) reverses the order of the interval ends
        lo = frac_hi.recip();
        hi = frac_lo.recip();
    }
    Ok(cf)
}

/// A parsed decimal string: exact value, one unit in its last place, and
/// significant-digit count.
struct Decimal {
    value: BigRational,
    ulp: BigRational,
    significant_digits: usize,
}

impl Decimal {
    fn parse(s: &str) -> Result<Decimal> {
        let bad = || Error::InvalidSlope(format!("not a plain decimal: {s:?}"));
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let all: String = format!("{int_part}{frac_part}");
        let significant_digits = all.trim_start_matches('0').len();
        let mantissa: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let mantissa = if negative { -mantissa } else { mantissa };
        Ok(Decimal {
            value: BigRational::new(mantissa, scale.clone()),
            ulp: BigRational::new(BigInt::one(), scale),
            significant_digits,
        })
    }
}
