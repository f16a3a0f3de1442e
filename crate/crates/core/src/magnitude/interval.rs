//! Closed intervals with decimal-fraction endpoints.
//!
//! Endpoints are rationals whose denominators are powers of ten. After every
//! operation they are rounded outward to a fixed number of significant
//! digits, which keeps them short and platform independent.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::fixed::{self, Fx};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), e as usize)
}

fn digit_count(n: &BigInt) -> i64 {
    if n.is_zero() {
        1
    } else {
        n.abs().to_string().len() as i64
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Down,
    Up,
}

/// Round `x` to `digits` significant decimal digits in the given direction.
fn round_sig(x: &BigRational, digits: u32, dir: Dir) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    // floor(log10 |x|): the digit-count estimate is high by at most one
    let mut e = digit_count(x.numer()) - digit_count(x.denom());
    let (n, d) = (x.numer().abs(), x.denom().clone());
    let below = if e >= 0 { n < d * pow10(e as u32) } else { n * pow10((-e) as u32) < d };
    if below {
        e -= 1;
    }
    let shift = digits as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (x.numer() * pow10(shift as u32), x.denom().clone())
    } else {
        (x.numer().clone(), x.denom() * pow10((-shift) as u32))
    };
    let q = match dir {
        Dir::Down => num.div_floor(&den),
        Dir::Up => -((-num).div_floor(&den)),
    };
    if shift >= 0 {
        BigRational::new(q, pow10(shift as u32))
    } else {
        BigRational::from_integer(q * pow10((-shift) as u32))
    }
}

/// Round `x` upward to `digits` significant decimal digits.
pub fn round_sig_up(x: &BigRational, digits: u32) -> BigRational {
    round_sig(x, digits, Dir::Up)
}

/// Round `x` downward to `digits` significant decimal digits.
pub fn round_sig_down(x: &BigRational, digits: u32) -> BigRational {
    round_sig(x, digits, Dir::Down)
}

/// Exact decimal rendering of a rational with a power-of-ten denominator.
pub fn decimal_string(x: &BigRational) -> String {
    // a reduced fraction is a finite decimal iff its denominator is 2^a 5^b
    let mut den = x.denom().clone();
    let (two, five) = (BigInt::from(2u32), BigInt::from(5u32));
    let (mut a, mut b) = (0u32, 0u32);
    while den.is_even() {
        den /= &two;
        a += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        b += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    let scale = a.max(b);
    let num = x.numer() * pow10(scale) / x.denom();
    let neg = x.numer().sign() == Sign::Minus;
    let digits = num.abs().to_string();
    let body = if scale == 0 {
        digits
    } else {
        let s = scale as usize;
        let padded = if digits.len() <= s { format!("{}{}", "0".repeat(s + 1 - digits.len()), digits) } else { digits };
        let (int, frac) = padded.split_at(padded.len() - s);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Parse a decimal string such as `-12.5e3`, `42` or `7/4`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", if int.is_empty() { "0" } else { int }, frac).parse().ok()?;
    let scale = exp - frac.len() as i64;
    let mut v = if scale >= 0 {
        BigRational::from_integer(digits * pow10(scale as u32))
    } else {
        BigRational::new(digits, pow10((-scale) as u32))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

impl Interval {
    /// Interval with the given endpoints, rounded outward. Panics if `lo > hi`.
    pub fn new(lo: BigRational, hi: BigRational, digits: u32) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo: round_sig(&lo, digits, Dir::Down), hi: round_sig(&hi, digits, Dir::Up) }
    }

    /// Interval stored verbatim (no rounding).
    pub fn from_raw(lo: BigRational, hi: BigRational) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational, digits: u32) -> Interval {
        Interval::new(x.clone(), x, digits)
    }

    pub fn from_int(n: i64) -> Interval {
        let x = BigRational::from_integer(BigInt::from(n));
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_fx(fx: &Fx, digits: u32) -> Interval {
        let den = BigInt::one() << fx.prec as usize;
        Interval::new(
            BigRational::new(fx.lo.clone(), den.clone()),
            BigRational::new(fx.hi.clone(), den),
            digits,
        )
    }

    pub fn to_fx(&self, prec: u32) -> Fx {
        let lo = Fx::from_ratio(self.lo.numer(), self.lo.denom(), prec);
        let hi = Fx::from_ratio(self.hi.numer(), self.hi.denom(), prec);
        Fx { lo: lo.lo, hi: hi.hi, prec }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `self` contains all of `other`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, o: &Interval, digits: u32) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi, digits)
    }

    pub fn sub(&self, o: &Interval, digits: u32) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo, digits)
    }

    pub fn mul(&self, o: &Interval, digits: u32) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi, digits)
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: (&self.lo).max(&o.lo).clone(),
            hi: (&self.hi).max(&o.hi).clone(),
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: (&self.lo).min(&o.lo).clone(),
            hi: (&self.hi).max(&o.hi).clone(),
        }
    }

    /// Widen the upper endpoint by a nonnegative rational.
    pub fn bump_hi(&self, delta: &BigRational, digits: u32) -> Interval {
        Interval::new(self.lo.clone(), &self.hi + delta, digits)
    }

    /// Widen the lower endpoint downward by a nonnegative rational.
    pub fn bump_lo(&self, delta: &BigRational, digits: u32) -> Interval {
        Interval::new(&self.lo - delta, self.hi.clone(), digits)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Enclosure of `log10` over the interval; requires `lo > 0`.
    pub fn log10(&self, digits: u32) -> Interval {
        assert!(self.lo.is_positive(), "log10 of nonpositive interval");
        if self.lo == self.hi {
            if let Some(k) = power_of_ten(&self.lo) {
                return Interval::from_int(k);
            }
        }
        let prec = fixed::prec_for_digits(digits);
        let lo = log10_rational(&self.lo, prec);
        let hi = if self.hi == self.lo { lo.clone() } else { log10_rational(&self.hi, prec) };
        Interval::from_fx(&Fx { lo: lo.lo, hi: hi.hi, prec }, digits)
    }

    /// Enclosure of `10^x` over the interval.
    pub fn exp10(&self, digits: u32) -> Interval {
        let prec = fixed::prec_for_digits(digits) + exp_guard_bits(&self.hi);
        Interval::from_fx(&fixed::exp10(&self.to_fx(prec)), digits)
    }
}

/// `Some(k)` when `x = 10^k` for an integer `k` (checked for moderate sizes only).
fn power_of_ten(x: &BigRational) -> Option<i64> {
    let (n, d) = (x.numer(), x.denom());
    let m = if d.is_one() { n } else if n.is_one() { d } else { return None };
    if m.bits() > 1 << 16 {
        return None;
    }
    let s = m.to_string();
    if !s.starts_with('1') || !s[1..].bytes().all(|b| b == b'0') {
        return None;
    }
    let k = (s.len() - 1) as i64;
    Some(if d.is_one() { k } else { -k })
}

fn exp_guard_bits(hi: &BigRational) -> u32 {
    // 10^x for negative x needs extra fractional bits to stay nonzero
    if hi.is_negative() {
        let mag = (-hi).ceil().to_integer();
        let m: u32 = mag.try_into().unwrap_or(u32::MAX / 8);
        m.saturating_mul(4)
    } else {
        0
    }
}

fn log10_rational(x: &BigRational, prec: u32) -> Fx {
    let num: BigUint = x.numer().to_biguint().unwrap();
    let den: BigUint = x.denom().to_biguint().unwrap();
    fixed::log10_ratio(&num, &den, prec)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", decimal_string(&self.lo), decimal_string(&self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn rounding_is_outward() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let iv = Interval::new(third.clone(), third.clone(), 5);
        assert!(iv.lo() < &third && &third < iv.hi());
        assert_eq!(decimal_string(iv.lo()), "0.33333");
        assert_eq!(decimal_string(iv.hi()), "0.33334");
    }

    #[test]
    fn decimal_parse_render() {
        for s in ["0", "2", "-3.25", "0.001", "123456789.5"] {
            assert_eq!(decimal_string(&r(s)), s);
        }
        assert_eq!(r("1.5e3"), r("1500"));
        assert_eq!(r("7/4"), r("1.75"));
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn log10_of_powers_of_ten() {
        let iv = Interval::point(r("1000"), 30);
        let l = iv.log10(30);
        assert!(l.contains(&r("3")));
        assert!(l.width() < r("1e-25"));
    }

    #[test]
    fn exp10_inverts_log10() {
        let iv = Interval::point(r("2.5"), 30);
        let back = iv.exp10(30).log10(30);
        assert!(back.contains(&r("2.5")));
        let tiny = Interval::point(r("-50"), 30).exp10(30);
        assert!(tiny.contains(&r("1e-50")));
    }
}
