//! Certified arithmetic on nonnegative integers that may be far too large to
//! write down.
//!
//! A [`Magnitude`] is either an exact integer or a tower enclosure
//! `Tower { height, body }`, meaning `log10` applied `height` times to the
//! value lies in `body`. Every operation returns an enclosure of the true
//! result; enclosures are only ever widened, never clipped.

pub mod exact;
pub mod fixed;
pub mod interval;
mod level;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use interval::{decimal_string, parse_decimal, Interval};
use level::{Level, Undefined};

use fixed::Fx;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Magnitude {
    Exact(BigUint),
    Tower { height: u32, body: Interval },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MagnitudeError {
    #[error("lower index exceeds upper index")]
    OrderViolation,
    #[error("ordering of the operands cannot be certified")]
    IndeterminateOrder,
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("iterated logarithm undefined at depth {0}")]
    DepthExceedsValue(u32),
    #[error("enclosure too wide to continue")]
    Imprecise,
    #[error("invalid tower: {0}")]
    InvalidTower(String),
}

impl From<Undefined> for MagnitudeError {
    fn from(_: Undefined) -> Self {
        MagnitudeError::Imprecise
    }
}

pub type Result<T> = std::result::Result<T, MagnitudeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Less,
    Greater,
    Equal,
    Indeterminate,
}

/// Evaluation settings shared by all operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Context {
    /// Results predicted to need more bits than this are kept as towers.
    pub exact_threshold_bits: u64,
    /// Significant decimal digits kept in tower endpoints.
    pub precision_digits: u32,
    /// Largest tower height produced before reporting `CapacityExceeded`.
    pub max_height: u32,
}

impl Default for Context {
    fn default() -> Self {
        Context { exact_threshold_bits: 1 << 24, precision_digits: 30, max_height: 256 }
    }
}

fn log10_2_bits_up(log10_hi: &BigRational) -> BigRational {
    // log2 = log10 * 3.3219281 (rounded up)
    log10_hi * BigRational::new(BigInt::from(33219281), BigInt::from(10000000))
}

impl Magnitude {
    pub fn from_u64(n: u64) -> Magnitude {
        Magnitude::Exact(BigUint::from(n))
    }

    pub fn zero() -> Magnitude {
        Magnitude::Exact(BigUint::zero())
    }

    pub fn one() -> Magnitude {
        Magnitude::Exact(BigUint::one())
    }

    /// Tower with a validated body (`height >= 1`, `lo >= 0`).
    pub fn tower(height: u32, body: Interval) -> Result<Magnitude> {
        if height == 0 {
            return Err(MagnitudeError::InvalidTower("height must be at least 1".into()));
        }
        if body.lo().is_negative() {
            return Err(MagnitudeError::InvalidTower("body must be nonnegative".into()));
        }
        Ok(Magnitude::Tower { height, body })
    }

    /// Tower from decimal endpoint strings, e.g. `("1", "100", "100")`.
    pub fn tower_str(height: u32, lo: &str, hi: &str) -> Result<Magnitude> {
        let bad = || MagnitudeError::InvalidTower(format!("bad endpoints {lo:?}, {hi:?}"));
        let l = parse_decimal(lo).ok_or_else(bad)?;
        let h = parse_decimal(hi).ok_or_else(bad)?;
        if l > h {
            return Err(bad());
        }
        Magnitude::tower(height, Interval::from_raw(l, h))
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            Magnitude::Exact(n) => Some(n),
            Magnitude::Tower { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    pub fn height(&self) -> u32 {
        match self {
            Magnitude::Exact(_) => 0,
            Magnitude::Tower { height, .. } => *height,
        }
    }

    fn level(&self) -> Level {
        match self {
            Magnitude::Exact(n) => Level::exact(n),
            Magnitude::Tower { height, body } => Level::new(*height, body.clone()),
        }
    }

    /// Human-readable form: full decimal up to 80 digits, otherwise digit count
    /// and leading digits; towers as nested powers of ten.
    pub fn render(&self) -> String {
        match self {
            Magnitude::Exact(n) => {
                let s = n.to_string();
                if s.len() <= 80 {
                    s
                } else {
                    format!("{} digits, leading 20 digits {}…", s.len(), &s[..20])
                }
            }
            Magnitude::Tower { height, body } => {
                let h = *height as usize;
                format!("{}{}{}", "10^(".repeat(h), body, ")".repeat(h))
            }
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<u64> for Magnitude {
    fn from(n: u64) -> Self {
        Magnitude::from_u64(n)
    }
}

impl From<BigUint> for Magnitude {
    fn from(n: BigUint) -> Self {
        Magnitude::Exact(n)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Repr {
    Exact { value: String },
    Tower { height: u32, lo: String, hi: String },
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = match self {
            Magnitude::Exact(n) => Repr::Exact { value: n.to_string() },
            Magnitude::Tower { height, body } => Repr::Tower {
                height: *height,
                lo: decimal_string(body.lo()),
                hi: decimal_string(body.hi()),
            },
        };
        r.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Magnitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        match Repr::deserialize(d)? {
            Repr::Exact { value } => value.parse::<BigUint>().map(Magnitude::Exact).map_err(D::Error::custom),
            Repr::Tower { height, lo, hi } => Magnitude::tower_str(height, &lo, &hi).map_err(D::Error::custom),
        }
    }
}

impl Context {
    fn digits(&self) -> u32 {
        self.precision_digits
    }

    fn prec(&self) -> u32 {
        fixed::prec_for_digits(self.precision_digits)
    }

    /// Convert a level back to a magnitude, normalizing the height.
    fn finish(&self, l: Level) -> Result<Magnitude> {
        let d = self.digits();
        let mut l = l.normalize(d);
        if l.height == 0 {
            let b = &l.body;
            if b.lo() == b.hi() && b.lo().is_integer() && !b.lo().is_negative() {
                let n = b.lo().to_integer().to_biguint().unwrap();
                if n.bits() <= self.exact_threshold_bits || n < BigUint::from(10u32) {
                    return Ok(Magnitude::Exact(n));
                }
            }
            if !b.is_positive() {
                return Err(MagnitudeError::Imprecise);
            }
            l = Level::new(1, b.log10(d)).normalize(d);
        }
        if l.height > self.max_height {
            return Err(MagnitudeError::CapacityExceeded(format!("tower height {} exceeds {}", l.height, self.max_height)));
        }
        // positive integers have nonnegative logarithms
        let body = if l.height == 1 && l.body.lo().is_negative() {
            Interval::from_raw(BigRational::zero(), l.body.hi().clone().max(BigRational::zero()))
        } else {
            l.body
        };
        Ok(Magnitude::Tower { height: l.height, body })
    }

    /// `10^x` where `x` is a `log10` enclosure of the result.
    fn finish_log(&self, log_form: Level) -> Result<Magnitude> {
        self.finish(log_form.exp10())
    }

    /// Level for `log10(a)`; `a` must be positive.
    fn log_level(&self, a: &Magnitude) -> Result<Level> {
        Ok(a.level().log10(self.digits())?)
    }

    /// Re-express a magnitude at its canonical height.
    pub fn normalize(&self, a: &Magnitude) -> Result<Magnitude> {
        match a {
            Magnitude::Exact(_) => Ok(a.clone()),
            Magnitude::Tower { .. } => self.finish(a.level()),
        }
    }

    /// Whether the two enclosures can describe the same value.
    pub fn overlaps(&self, a: &Magnitude, b: &Magnitude) -> bool {
        matches!(self.compare(a, b), Comparison::Equal | Comparison::Indeterminate)
    }

    pub fn compare(&self, a: &Magnitude, b: &Magnitude) -> Comparison {
        if let (Magnitude::Exact(x), Magnitude::Exact(y)) = (a, b) {
            return match x.cmp(y) {
                Ordering::Less => Comparison::Less,
                Ordering::Greater => Comparison::Greater,
                Ordering::Equal => Comparison::Equal,
            };
        }
        let (la, lb) = (a.level(), b.level());
        let h = la.height.max(lb.height);
        let (alo, ahi) = la.raise_bounds(h, self.digits());
        let (blo, bhi) = lb.raise_bounds(h, self.digits());
        let below = |hi: &Option<BigRational>, lo: &Option<BigRational>| match (hi, lo) {
            (Some(x), Some(y)) => x < y,
            (None, Some(_)) => true,
            _ => false,
        };
        if below(&ahi, &blo) {
            Comparison::Less
        } else if below(&bhi, &alo) {
            Comparison::Greater
        } else {
            Comparison::Indeterminate
        }
    }

    /// Enclosure of `max(a, b)`.
    pub fn max(&self, a: &Magnitude, b: &Magnitude) -> Result<Magnitude> {
        match self.compare(a, b) {
            Comparison::Less => Ok(b.clone()),
            Comparison::Greater | Comparison::Equal => Ok(a.clone()),
            Comparison::Indeterminate => self.finish(a.level().max(&b.level(), self.digits())?),
        }
    }

    pub fn add(&self, a: &Magnitude, b: &Magnitude) -> Result<Magnitude> {
        if let (Magnitude::Exact(x), Magnitude::Exact(y)) = (a, b) {
            if x.bits().max(y.bits()) < self.exact_threshold_bits {
                return Ok(Magnitude::Exact(x + y));
            }
        }
        if a.as_exact().is_some_and(Zero::is_zero) {
            return Ok(b.clone());
        }
        if b.as_exact().is_some_and(Zero::is_zero) {
            return Ok(a.clone());
        }
        self.finish(a.level().add(&b.level(), self.digits())?)
    }

    /// `a - c` for a small exact `c`; for towers this only loosens the lower
    /// endpoint and requires `c` to be negligible next to `a`.
    pub fn sub_small(&self, a: &Magnitude, c: &BigUint) -> Result<Magnitude> {
        match a {
            Magnitude::Exact(x) => {
                if c > x {
                    Err(MagnitudeError::OrderViolation)
                } else {
                    Ok(Magnitude::Exact(x - c))
                }
            }
            Magnitude::Tower { .. } => {
                let c = BigRational::from_integer(BigInt::from(c.clone()));
                self.finish(a.level().sub_small(&c, self.digits())?)
            }
        }
    }

    pub fn multiply(&self, a: &Magnitude, b: &Magnitude) -> Result<Magnitude> {
        if let (Magnitude::Exact(x), Magnitude::Exact(y)) = (a, b) {
            if x.is_zero() || y.is_zero() || x.bits() + y.bits() <= self.exact_threshold_bits {
                return Ok(Magnitude::Exact(x * y));
            }
        }
        if a.as_exact().is_some_and(Zero::is_zero) || b.as_exact().is_some_and(Zero::is_zero) {
            return Ok(Magnitude::zero());
        }
        let s = self.log_level(a)?.add(&self.log_level(b)?, self.digits())?;
        self.finish_log(s)
    }

    /// `base^exp`, with the convention `0^0 = 1`.
    pub fn power(&self, base: &Magnitude, exp: &Magnitude) -> Result<Magnitude> {
        if exp.as_exact().is_some_and(Zero::is_zero) || base.as_exact().is_some_and(One::is_one) {
            return Ok(Magnitude::one());
        }
        if base.as_exact().is_some_and(Zero::is_zero) {
            return Ok(Magnitude::zero());
        }
        if let (Magnitude::Exact(x), Magnitude::Exact(e)) = (base, exp) {
            if let Some(e) = e.to_u64() {
                if e.saturating_mul(x.bits()) <= self.exact_threshold_bits {
                    return Ok(Magnitude::Exact(x.pow(e as u32)));
                }
            }
        }
        let p = exp.level().mul(&self.log_level(base)?, self.digits())?;
        self.finish_log(p)
    }

    pub fn factorial(&self, n: &Magnitude) -> Result<Magnitude> {
        let d = self.digits();
        match n {
            Magnitude::Exact(x) => {
                if let Some(v) = x.to_u64() {
                    if v.saturating_mul(x.bits().max(1)) <= self.exact_threshold_bits {
                        return Ok(Magnitude::Exact(exact::factorial_u64(v)));
                    }
                }
                let prec = self.prec() + x.bits() as u32 + 8;
                let l = to_log10(&fixed::ln_factorial(x, prec));
                self.finish_log(Level::new(0, Interval::from_fx(&l, d)))
            }
            Magnitude::Tower { .. } => {
                // n (log10 n - log10 e) <= log10 n! <= n log10 n
                let ln = self.log_level(n)?;
                let e_up = BigRational::new(BigInt::from(4343), BigInt::from(10000));
                let lower = n.level().mul(&ln.sub_small(&e_up, d)?, d)?;
                let upper = n.level().mul(&ln, d)?;
                self.finish_log(combine(&[lower], &[upper], d)?)
            }
        }
    }

    pub fn binomial(&self, n: &Magnitude, k: &Magnitude) -> Result<Magnitude> {
        match self.compare(k, n) {
            Comparison::Greater => return Err(MagnitudeError::OrderViolation),
            Comparison::Equal => return Ok(Magnitude::one()),
            Comparison::Indeterminate => return Err(MagnitudeError::IndeterminateOrder),
            Comparison::Less => {}
        }
        self.binomial_ordered(n, k, &Magnitude::one())
    }

    /// `C(n, k)` where the caller guarantees `n >= ratio * k` (with
    /// `ratio >= 1`), for operands whose ordering is known structurally but
    /// cannot be certified from their enclosures.
    pub fn binomial_ordered(&self, n: &Magnitude, k: &Magnitude, ratio: &Magnitude) -> Result<Magnitude> {
        let d = self.digits();
        if let (Magnitude::Exact(nx), Magnitude::Exact(kx)) = (n, k) {
            return self.binomial_exact(nx, kx);
        }
        if k.as_exact().is_some_and(Zero::is_zero) {
            return Ok(Magnitude::one());
        }
        if k.as_exact().is_some_and(One::is_one) {
            return Ok(n.clone());
        }
        let ln = self.log_level(n)?;
        let mut lowers = vec![ln.clone()];
        let mut uppers = vec![k.level().mul(&ln, d)?];
        // C(n, k) <= 2^n
        let log2 = Level::new(0, Interval::from_raw(BigRational::new(30102.into(), 100000.into()), BigRational::new(30103.into(), 100000.into())));
        uppers.push(n.level().mul(&log2, d)?);
        if self.compare(ratio, &Magnitude::one()) == Comparison::Greater {
            lowers.push(k.level().mul(&self.log_level(ratio)?, d)?);
        }
        if let Magnitude::Exact(kx) = k {
            // (n/k)^k <= C(n, k)
            let lk = Interval::point(BigRational::from_integer(kx.clone().into()), d).log10(d);
            if let Ok(diff) = ln.sub_small(lk.hi(), d) {
                if diff.body.is_positive() || diff.height > 0 {
                    lowers.push(k.level().mul(&diff, d)?);
                }
            }
        }
        self.finish_log(combine(&lowers, &uppers, d)?)
    }

    fn binomial_exact(&self, n: &BigUint, k: &BigUint) -> Result<Magnitude> {
        if k > n {
            return Err(MagnitudeError::OrderViolation);
        }
        let nk = n - k;
        let k = if &nk < k { nk } else { k.clone() };
        if k.is_zero() {
            return Ok(Magnitude::one());
        }
        if k.bits() <= 63 && k.to_u64().unwrap().saturating_mul(n.bits()) <= self.exact_threshold_bits {
            return Ok(Magnitude::Exact(exact::binomial(n, &k)));
        }
        let l = log10_binomial(n, &k, self.digits());
        if l.hi() < &BigRational::one() || log10_2_bits_up(l.hi()) <= BigRational::from_integer(self.exact_threshold_bits.into()) {
            return Ok(Magnitude::Exact(exact::binomial(n, &k)));
        }
        self.finish_log(Level::new(0, l))
    }

    /// Enclosure of `log10` applied `depth` times.
    pub fn log10_enclosure(&self, a: &Magnitude, depth: u32) -> Result<Interval> {
        let d = self.digits();
        let undefined_at = |i: u32, iv: &Interval| -> Result<()> {
            if !iv.hi().is_positive() {
                Err(MagnitudeError::DepthExceedsValue(i))
            } else if !iv.lo().is_positive() {
                Err(MagnitudeError::IndeterminateOrder)
            } else {
                Ok(())
            }
        };
        let (mut iv, mut done) = match a {
            Magnitude::Exact(n) => {
                if n.is_zero() {
                    return Err(MagnitudeError::DepthExceedsValue(1));
                }
                (Interval::point(BigRational::from_integer(n.clone().into()), d), 0)
            }
            Magnitude::Tower { height, body } => {
                let mut iv = body.clone();
                let mut h = *height;
                while h > depth {
                    if iv.hi() > &BigRational::from_integer(1_000_000.into()) {
                        return Err(MagnitudeError::CapacityExceeded("enclosure at requested depth is not representable".into()));
                    }
                    iv = iv.exp10(d);
                    h -= 1;
                }
                (iv, h)
            }
        };
        while done < depth {
            undefined_at(done + 1, &iv)?;
            iv = iv.log10(d);
            done += 1;
        }
        Ok(iv)
    }
}

/// Intersection of lower and upper bound candidates, aligned to a common height.
fn combine(lowers: &[Level], uppers: &[Level], digits: u32) -> Result<Level> {
    let h = lowers.iter().chain(uppers).map(|l| l.height).max().unwrap_or(0);
    let lo = lowers.iter().filter_map(|l| l.raise_bounds(h, digits).0).max().ok_or(MagnitudeError::Imprecise)?;
    let hi = uppers.iter().filter_map(|l| l.raise_bounds(h, digits).1).min().ok_or(MagnitudeError::Imprecise)?;
    if lo > hi {
        return Err(MagnitudeError::Imprecise);
    }
    Ok(Level::new(h, Interval::new(lo, hi, digits)))
}

fn to_log10(x: &Fx) -> Fx {
    x.div(&fixed::ln10(x.prec))
}

/// Enclosure of `log10 C(n, k)` for `1 <= k <= n/2`.
pub(crate) fn log10_binomial(n: &BigUint, k: &BigUint, digits: u32) -> Interval {
    let base = fixed::prec_for_digits(digits);
    let (nb, kb) = (n.bits(), k.bits());
    let ln = if 2 * kb + (digits as u64) * 4 + 20 < nb {
        // k log(n - k + 1) - ln k! <= ln C(n, k) <= k log n - ln k!
        let prec = base + 2 * kb as u32 + 8;
        let lk = fixed::ln_factorial(k, prec);
        let kk = BigInt::from(k.clone());
        let up = fixed::ln_ratio(n, &BigUint::one(), prec).mul_int(&kk).sub(&lk);
        let low_arg = n - k + 1u32;
        let down = fixed::ln_ratio(&low_arg, &BigUint::one(), prec).mul_int(&kk).sub(&lk);
        Fx { lo: down.lo, hi: up.hi, prec }
    } else {
        let prec = base + nb as u32 + 8;
        fixed::ln_factorial(n, prec).sub(&fixed::ln_factorial(k, prec)).sub(&fixed::ln_factorial(&(n - k), prec))
    };
    Interval::from_fx(&to_log10(&ln), digits)
}

/// Operations with the default [`Context`].
pub fn binomial(n: &Magnitude, k: &Magnitude) -> Result<Magnitude> {
    Context::default().binomial(n, k)
}

pub fn factorial(n: &Magnitude) -> Result<Magnitude> {
    Context::default().factorial(n)
}

pub fn multiply(a: &Magnitude, b: &Magnitude) -> Result<Magnitude> {
    Context::default().multiply(a, b)
}

pub fn add(a: &Magnitude, b: &Magnitude) -> Result<Magnitude> {
    Context::default().add(a, b)
}

pub fn power(base: &Magnitude, exp: &Magnitude) -> Result<Magnitude> {
    Context::default().power(base, exp)
}

pub fn log10_enclosure(a: &Magnitude, depth: u32) -> Result<Interval> {
    Context::default().log10_enclosure(a, depth)
}

pub fn compare(a: &Magnitude, b: &Magnitude) -> Comparison {
    Context::default().compare(a, b)
}
