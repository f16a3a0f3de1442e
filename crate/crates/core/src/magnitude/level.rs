//! Arithmetic on iterated-logarithm enclosures.
//!
//! A [`Level`] of height `h` says `log10^h(v)` lies in `body`; at height zero
//! the body encloses `v` itself and may be any real interval (logarithms of
//! values below one are negative). All operations are monotone in their
//! inputs and round outward.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{round_sig_down, round_sig_up, Interval};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub height: u32,
    pub body: Interval,
}

/// An operation needed the logarithm of a quantity that may be nonpositive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Undefined;

/// Upper bound on `log10(e)`.
fn log10e_up() -> BigRational {
    BigRational::new(BigInt::from(4343), BigInt::from(10000))
}

/// Upper bound on `log10(2)`.
fn log10_2_up() -> BigRational {
    BigRational::new(BigInt::from(30103), BigInt::from(100000))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow10_rat(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

const POW_CAP: i64 = 60;

/// Lower bound on `10^x`, capped at `10^60`; `None` for very negative `x`.
fn exp10_lower(x: &BigRational) -> Option<BigRational> {
    if x >= &rat(POW_CAP) {
        return Some(pow10_rat(POW_CAP));
    }
    if x < &rat(-POW_CAP) {
        return None;
    }
    Some(Interval::from_raw(x.clone(), x.clone()).exp10(8).lo().clone())
}

/// Lower bounds on `log10^j(v)` for `j = 1 .. height-1` (at index `j-1`),
/// given `log10^height(v) >= base`.
fn chain_lower(base: &BigRational, height: u32) -> Option<Vec<BigRational>> {
    let n = height.saturating_sub(1) as usize;
    let mut ys = vec![BigRational::zero(); n];
    let mut above = base.clone();
    for j in (0..n).rev() {
        let y = exp10_lower(&above)?;
        ys[j] = y.clone();
        above = y;
    }
    Some(ys)
}

/// Bound on how far a shift of `delta` in `log10(v)` moves `log10^height(v)`,
/// given `log10^height(v) >= base`. `factor` is 1 for upward shifts and 2 for
/// downward shifts (which need `y - delta >= y/2`). `None` when the chain of
/// lower bounds is too weak to say anything.
pub fn propagate(delta: &BigRational, height: u32, base: &BigRational, factor: i64) -> Option<BigRational> {
    if height <= 1 {
        return Some(delta.clone());
    }
    let ys = chain_lower(base, height)?;
    let mut d = delta.clone();
    for y in &ys {
        if factor > 1 && &d * rat(2) > *y {
            return None;
        }
        d = round_sig_up(&(&d * rat(factor) * log10e_up() / y), 6);
    }
    Some(d)
}

/// Upper bound on `-log10(1 - c/x)` given `log10 x >= y1`; needs `c/x <= 1/2`.
fn sub_delta(c: &BigRational, y1: &BigRational) -> Option<BigRational> {
    let fl: i64 = y1.floor().to_integer().try_into().unwrap_or(i64::MAX);
    let c_digits = c.ceil().to_integer().to_string().len() as i64;
    if fl.saturating_sub(c_digits) > POW_CAP {
        return Some(pow10_rat(-POW_CAP));
    }
    // -log10(1 - r) <= 2 r log10(e) for r <= 1/2
    let r = c * pow10_rat(-fl);
    if r > BigRational::new(BigInt::one(), BigInt::from(2)) {
        return None;
    }
    Some(r * rat(2) * log10e_up())
}

/// Upper bound on `log10(1 + W/U)` at height one, given `log10^h U = big` and
/// `log10^h W <= small`.
fn add_delta(big: &BigRational, small: Option<&BigRational>, h: u32, digits: u32) -> Option<BigRational> {
    let Some(s) = small else {
        return Some(log10_2_up());
    };
    let mut gap = big - s;
    if gap <= BigRational::zero() {
        return Some(log10_2_up());
    }
    let ys = chain_lower(big, h)?;
    // u_j - w_j >= u_j (1 - 10^-(u_{j+1} - w_{j+1}))
    for y in ys.iter().rev() {
        let keep = if gap >= rat(1) {
            BigRational::new(BigInt::from(9), BigInt::from(10))
        } else {
            let t = Interval::from_raw(-gap.clone(), -gap.clone()).exp10(8);
            rat(1) - t.hi()
        };
        gap = round_sig_down(&(y * keep), 8);
        if gap <= BigRational::zero() {
            return Some(log10_2_up());
        }
    }
    Some(log1p_pow10(&(-gap), digits))
}

impl Level {
    pub fn new(height: u32, body: Interval) -> Level {
        Level { height, body }
    }

    pub fn exact(n: &num_bigint::BigUint) -> Level {
        let x = BigRational::from_integer(BigInt::from(n.clone()));
        Level { height: 0, body: Interval::from_raw(x.clone(), x) }
    }

    pub fn is_zero(&self) -> bool {
        self.height == 0 && self.body.lo().is_zero() && self.body.hi().is_zero()
    }

    pub fn log10(&self, digits: u32) -> Result<Level, Undefined> {
        if self.height > 0 {
            Ok(Level::new(self.height - 1, self.body.clone()))
        } else if self.body.is_positive() {
            Ok(Level::new(0, self.body.log10(digits)))
        } else {
            Err(Undefined)
        }
    }

    /// `10^v`.
    pub fn exp10(&self) -> Level {
        Level::new(self.height + 1, self.body.clone())
    }

    /// Bounds on `log10^height(v)` with `None` standing for minus infinity.
    pub fn raise_bounds(&self, height: u32, digits: u32) -> (Option<BigRational>, Option<BigRational>) {
        let mut lo = Some(self.body.lo().clone());
        let mut hi = Some(self.body.hi().clone());
        let log = |x: Option<BigRational>| -> Option<BigRational> {
            match x {
                Some(v) if v.is_positive() => {
                    Some(Interval::from_raw(v.clone(), v).log10(digits).lo().clone())
                }
                _ => None,
            }
        };
        let log_hi = |x: Option<BigRational>| -> Option<BigRational> {
            match x {
                Some(v) if v.is_positive() => {
                    Some(Interval::from_raw(v.clone(), v).log10(digits).hi().clone())
                }
                _ => None,
            }
        };
        for _ in self.height..height {
            lo = log(lo);
            hi = log_hi(hi);
        }
        (lo, hi)
    }

    /// Rewrite at a canonical height: lower while a height-2+ body dips below
    /// one, raise while the body exceeds `10^digits`.
    pub fn normalize(mut self, digits: u32) -> Level {
        while self.height >= 2 && self.body.lo() < &rat(1) {
            self = Level::new(self.height - 1, self.body.exp10(digits));
        }
        let cap = pow10_rat(digits as i64);
        while self.height >= 1 && self.body.lo() >= &cap {
            self = Level::new(self.height + 1, self.body.log10(digits));
        }
        self
    }

    /// Enclosure of `max(a, b)`.
    pub fn max(&self, other: &Level, digits: u32) -> Result<Level, Undefined> {
        let h = self.height.max(other.height);
        let (alo, ahi) = self.raise_bounds(h, digits);
        let (blo, bhi) = other.raise_bounds(h, digits);
        let lo = opt_max(alo, blo).ok_or(Undefined)?;
        let hi = opt_max(ahi, bhi).ok_or(Undefined)?;
        Ok(Level::new(h, Interval::from_raw(lo, hi)))
    }

    pub fn add(&self, other: &Level, digits: u32) -> Result<Level, Undefined> {
        if self.height == 0 && other.height == 0 {
            return Ok(Level::new(0, self.body.add(&other.body, digits)));
        }
        let h = self.height.max(other.height);
        let (alo, ahi) = self.raise_bounds(h, digits);
        let (blo, bhi) = other.raise_bounds(h, digits);
        // a + b >= max(a, b); at height one, log10(10^x + 10^y) is increasing
        // in both arguments so the lower endpoints give a lower bound
        let lo = match (&alo, &blo, h) {
            (Some(x), Some(y), 1) => {
                let (mx, mn) = if x >= y { (x, y) } else { (y, x) };
                mx + log1p_pow10_lower(&(mn - mx), digits)
            }
            _ => opt_max(alo, blo).ok_or(Undefined)?,
        };
        let (big, small) = match (ahi, bhi) {
            (Some(a), Some(b)) => {
                if a >= b {
                    (a, Some(b))
                } else {
                    (b, Some(a))
                }
            }
            (Some(a), None) => (a, None),
            (None, Some(b)) => (b, None),
            (None, None) => return Err(Undefined),
        };
        let hi = if h == 1 {
            match small {
                None => big.clone(),
                Some(s) => &big + log1p_pow10(&(&s - &big), digits),
            }
        } else {
            let d1 = add_delta(&big, small.as_ref(), h, digits).ok_or(Undefined)?;
            let d = propagate(&d1, h, &big, 1).ok_or(Undefined)?;
            &big + d
        };
        Ok(Level::new(h, Interval::new(lo, hi, digits)))
    }

    /// `v - c` for a nonnegative rational `c` that is tiny next to `v`.
    pub fn sub_small(&self, c: &BigRational, digits: u32) -> Result<Level, Undefined> {
        if c.is_zero() {
            return Ok(self.clone());
        }
        match self.height {
            0 => Ok(Level::new(0, self.body.sub(&Interval::from_raw(c.clone(), c.clone()), digits))),
            1 => {
                let delta = sub_delta(c, self.body.lo()).ok_or(Undefined)?;
                Ok(Level::new(1, self.body.bump_lo(&delta, digits)))
            }
            h => {
                let ys = chain_lower(self.body.lo(), h).ok_or(Undefined)?;
                let d1 = sub_delta(c, &ys[0]).ok_or(Undefined)?;
                let d = propagate(&d1, h, self.body.lo(), 2).ok_or(Undefined)?;
                Ok(Level::new(h, self.body.bump_lo(&d, digits)))
            }
        }
    }

    pub fn mul(&self, other: &Level, digits: u32) -> Result<Level, Undefined> {
        if self.is_zero() || other.is_zero() {
            return Ok(Level::new(0, Interval::from_int(0)));
        }
        if self.height == 0 && other.height == 0 {
            return Ok(Level::new(0, self.body.mul(&other.body, digits)));
        }
        let la = self.log10(digits)?;
        let lb = other.log10(digits)?;
        Ok(la.add(&lb, digits)?.exp10())
    }

}

fn opt_max(a: Option<BigRational>, b: Option<BigRational>) -> Option<BigRational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Lower bound on `log10(1 + 10^x)` for `x <= 0`.
fn log1p_pow10_lower(x: &BigRational, digits: u32) -> BigRational {
    let fl: i64 = x.floor().to_integer().try_into().unwrap_or(i64::MIN);
    if fl < -8 {
        return BigRational::zero();
    }
    let t = Interval::from_raw(x.clone(), x.clone()).exp10(digits);
    let one_plus = Interval::from_raw(t.lo() + rat(1), t.lo() + rat(1));
    one_plus.log10(digits).lo().clone()
}

/// Upper bound on `log10(1 + 10^x)` for `x <= 0`.
fn log1p_pow10(x: &BigRational, digits: u32) -> BigRational {
    let fl: i64 = x.floor().to_integer().try_into().unwrap_or(i64::MIN);
    if fl < -POW_CAP {
        return pow10_rat(-POW_CAP);
    }
    if fl < -8 {
        // log10(1 + t) <= t log10(e), t <= 10^(fl + 1)
        return pow10_rat(fl + 1) * log10e_up();
    }
    let t = Interval::from_raw(x.clone(), x.clone()).exp10(digits);
    let one_plus = Interval::from_raw(t.hi() + rat(1), t.hi() + rat(1));
    one_plus.log10(digits).hi().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnitude::interval::parse_decimal;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    fn lvl(h: u32, lo: &str, hi: &str) -> Level {
        Level::new(h, Interval::from_raw(r(lo), r(hi)))
    }

    #[test]
    fn add_height_one_is_tight_for_unequal_terms() {
        let a = lvl(1, "100", "100");
        let b = lvl(0, "6", "6");
        let s = a.add(&b, 30).unwrap();
        assert_eq!(s.height, 1);
        assert!(s.body.contains(&r("100")));
        assert!(s.body.width() < r("1e-25"));
    }

    #[test]
    fn add_equal_terms_doubles() {
        let a = lvl(1, "3", "3");
        let s = a.add(&a, 30).unwrap();
        // 2000 = 10^3.30103
        // log10(2000) = 3.301029995663981195213738894724...
        let truth = Interval::from_raw(r("3.301029995663981195213738894724"), r("3.301029995663981195213738894725"));
        assert!(s.body.overlaps(&truth) && s.body.width() < r("1e-25"));
    }

    #[test]
    fn propagate_shrinks_with_height() {
        let d = propagate(&r("0.30103"), 3, &r("2"), 1).unwrap();
        assert!(d < r("1e-50"));
        assert_eq!(propagate(&r("0.5"), 1, &r("2"), 1).unwrap(), r("0.5"));
    }

    #[test]
    fn mul_small_and_towers() {
        let six = Level::exact(&6u32.into());
        let seven = Level::exact(&7u32.into());
        let p = six.mul(&seven, 30).unwrap();
        assert!(p.body.contains(&r("42")));
        let big = lvl(1, "100", "100");
        let q = big.mul(&big, 30).unwrap();
        assert_eq!(q.height, 1);
        assert!(q.body.contains(&r("200")));
    }

    #[test]
    fn sub_small_keeps_upper() {
        let a = lvl(1, "50", "51");
        let s = a.sub_small(&r("1"), 30).unwrap();
        assert_eq!(s.body.hi(), &r("51"));
        assert!(s.body.lo() < &r("50"));
    }

    #[test]
    fn normalize_idempotent() {
        let a = lvl(2, "0.5", "0.6").normalize(30);
        assert_eq!(a.height, 1);
        assert_eq!(a.clone().normalize(30), a);
    }
}
