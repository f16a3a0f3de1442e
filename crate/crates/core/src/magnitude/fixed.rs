//! Fixed-point interval kernel.
//!
//! A [`Fx`] is a closed interval `[lo, hi] * 2^-prec` with arbitrary-precision
//! integer numerators. Every operation rounds `lo` toward minus infinity and
//! `hi` toward plus infinity, so the true real value never leaves the
//! enclosure. The transcendental routines (ln, exp, pi, Stirling) carry an
//! explicit bound on truncation and rounding error.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Interval of fixed-point numbers sharing the scale `2^-prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fx {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

fn shl(x: &BigInt, bits: u32) -> BigInt {
    x << bits as usize
}

/// `floor(a / b)` for `b > 0`.
fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// `ceil(a / b)` for `b > 0`.
fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `floor(a * 2^-bits)`.
fn shr_floor(a: &BigInt, bits: u32) -> BigInt {
    a >> bits as usize
}

/// `ceil(a * 2^-bits)`.
fn shr_ceil(a: &BigInt, bits: u32) -> BigInt {
    -((-a) >> bits as usize)
}

impl Fx {
    pub fn exact_int(n: &BigInt, prec: u32) -> Fx {
        let v = shl(n, prec);
        Fx { lo: v.clone(), hi: v, prec }
    }

    pub fn from_u64(n: u64, prec: u32) -> Fx {
        Fx::exact_int(&BigInt::from(n), prec)
    }

    pub fn zero(prec: u32) -> Fx {
        Fx { lo: BigInt::zero(), hi: BigInt::zero(), prec }
    }

    /// Enclosure of `num / den`, `den > 0`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Fx {
        let scaled = shl(num, prec);
        Fx { lo: div_floor(&scaled, den), hi: div_ceil(&scaled, den), prec }
    }

    pub fn add(&self, o: &Fx) -> Fx {
        debug_assert_eq!(self.prec, o.prec);
        Fx { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        debug_assert_eq!(self.prec, o.prec);
        Fx { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, prec: self.prec }
    }

    pub fn neg(&self) -> Fx {
        Fx { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    /// Widen by `ulps` units in the last place on both sides.
    pub fn widen(&self, ulps: u64) -> Fx {
        Fx { lo: &self.lo - ulps, hi: &self.hi + ulps, prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Fx {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.sign() == Sign::Minus {
            Fx { lo: b, hi: a, prec: self.prec }
        } else {
            Fx { lo: a, hi: b, prec: self.prec }
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: &BigInt) -> Fx {
        debug_assert!(k.is_positive());
        Fx { lo: div_floor(&self.lo, k), hi: div_ceil(&self.hi, k), prec: self.prec }
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        let p = self.prec;
        let cands = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mn = cands.iter().min().unwrap();
        let mx = cands.iter().max().unwrap();
        Fx { lo: shr_floor(mn, p), hi: shr_ceil(mx, p), prec: p }
    }

    /// Division by an interval that is certainly positive.
    pub fn div(&self, o: &Fx) -> Fx {
        debug_assert!(o.lo.is_positive());
        let p = self.prec;
        let num_lo = shl(&self.lo, p);
        let num_hi = shl(&self.hi, p);
        let cands_lo = [div_floor(&num_lo, &o.lo), div_floor(&num_lo, &o.hi)];
        let cands_hi = [div_ceil(&num_hi, &o.lo), div_ceil(&num_hi, &o.hi)];
        Fx {
            lo: cands_lo.into_iter().min().unwrap(),
            hi: cands_hi.into_iter().max().unwrap(),
            prec: p,
        }
    }

    pub fn hull(&self, o: &Fx) -> Fx {
        Fx {
            lo: (&self.lo).min(&o.lo).clone(),
            hi: (&self.hi).max(&o.hi).clone(),
            prec: self.prec,
        }
    }
}

/// `atanh(1/k)` for an integer `k >= 2`.
fn atanh_inv(k: u64, prec: u32) -> Fx {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let one = shl(&BigInt::one(), prec);
    let mut p_lo = div_floor(&one, &k);
    let mut p_hi = div_ceil(&one, &k);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut i: u64 = 0;
    while !p_lo.is_zero() {
        let d = BigInt::from(2 * i + 1);
        lo += div_floor(&p_lo, &d);
        hi += div_ceil(&p_hi, &d);
        p_lo = div_floor(&p_lo, &k2);
        p_hi = div_ceil(&p_hi, &k2);
        i += 1;
    }
    // remaining terms sum to at most p_hi / (1 - 1/k^2) <= 2 p_hi
    hi += &p_hi * 2 + 1;
    Fx { lo, hi, prec }
}

/// `atan(1/k)` via the alternating series.
fn atan_inv(k: u64, prec: u32) -> Fx {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let one = shl(&BigInt::one(), prec);
    let mut p_lo = div_floor(&one, &k);
    let mut p_hi = div_ceil(&one, &k);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut i: u64 = 0;
    while !p_lo.is_zero() {
        let d = BigInt::from(2 * i + 1);
        if i % 2 == 0 {
            lo += div_floor(&p_lo, &d);
            hi += div_ceil(&p_hi, &d);
        } else {
            lo -= div_ceil(&p_hi, &d);
            hi -= div_floor(&p_lo, &d);
        }
        p_lo = div_floor(&p_lo, &k2);
        p_hi = div_ceil(&p_hi, &k2);
        i += 1;
    }
    // alternating tail is bounded by the first omitted term
    lo -= &p_hi + 1;
    hi += &p_hi + 1;
    Fx { lo, hi, prec }
}

#[derive(Clone)]
struct Constants {
    ln2: Fx,
    ln10: Fx,
    half_ln_2pi: Fx,
}

fn constants(prec: u32) -> Constants {
    static CACHE: OnceLock<RwLock<HashMap<u32, Constants>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(c) = cache.read().unwrap().get(&prec) {
        return c.clone();
    }
    let ln2 = atanh_inv(3, prec).mul_int(&BigInt::from(2));
    let ln10 = ln2.mul_int(&BigInt::from(3)).add(&atanh_inv(9, prec).mul_int(&BigInt::from(2)));
    let pi = atan_inv(5, prec)
        .mul_int(&BigInt::from(16))
        .sub(&atan_inv(239, prec).mul_int(&BigInt::from(4)));
    let two_pi = pi.mul_int(&BigInt::from(2));
    let half_ln_2pi = ln_interval_with(&two_pi, &ln2).div_int(&BigInt::from(2));
    let c = Constants { ln2, ln10, half_ln_2pi };
    cache.write().unwrap().insert(prec, c.clone());
    c
}

pub fn ln2(prec: u32) -> Fx {
    constants(prec).ln2
}

pub fn ln10(prec: u32) -> Fx {
    constants(prec).ln10
}

/// `ln(y * 2^-prec)` for a fixed-point value `y` in `[2^(prec-1), 2^(prec+1)]`.
fn ln_reduced(y: &BigInt, prec: u32) -> Fx {
    let one = shl(&BigInt::one(), prec);
    let a = y - &one;
    let b = y + &one;
    let neg = a.is_negative();
    let a = a.abs();
    // z = a/b, |z| <= 1/3
    let mut t = div_floor(&shl(&a, prec), &b);
    let a2 = &a * &a;
    let b2 = &b * &b;
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !t.is_zero() {
        sum += div_floor(&t, &BigInt::from(2 * n + 1));
        t = div_floor(&(&t * &a2), &b2);
        n += 1;
    }
    // floor chains lose < 2.2 ulp per term; tail < 9/8 * (t_n + 2)
    let slack = BigInt::from(3 * n + 8);
    let lo = sum.clone();
    let hi = sum + slack;
    let s = Fx { lo: lo * 2, hi: hi * 2, prec };
    if neg {
        s.neg()
    } else {
        s
    }
}

/// Natural log of a positive rational `num/den`.
pub fn ln_ratio(num: &BigUint, den: &BigUint, prec: u32) -> Fx {
    ln_ratio_with(num, den, &ln2(prec), prec)
}

fn ln_ratio_with(num: &BigUint, den: &BigUint, ln2: &Fx, prec: u32) -> Fx {
    assert!(!num.is_zero() && !den.is_zero(), "ln of zero");
    let k = num.bits() as i64 - den.bits() as i64;
    // y = num / (den 2^k) in (1/2, 2)
    let num_i = BigInt::from(num.clone());
    let den_i = BigInt::from(den.clone());
    let (scaled_num, scaled_den) = if k >= 0 {
        (shl(&num_i, prec), &den_i << k as usize)
    } else {
        (shl(&num_i, prec) << (-k) as usize, den_i.clone())
    };
    let y_lo = div_floor(&scaled_num, &scaled_den);
    let y_hi = div_ceil(&scaled_num, &scaled_den);
    let l_lo = ln_reduced(&y_lo, prec);
    let l_hi = if y_hi == y_lo { l_lo.clone() } else { ln_reduced(&y_hi, prec) };
    let ln_y = Fx { lo: l_lo.lo, hi: l_hi.hi, prec };
    ln_y.add(&ln2.mul_int(&BigInt::from(k)))
}

fn ln_interval_with(x: &Fx, ln2: &Fx) -> Fx {
    assert!(x.lo.is_positive(), "ln of nonpositive interval");
    let den = BigUint::one() << x.prec as usize;
    let lo = ln_ratio_with(&x.lo.to_biguint().unwrap(), &den, ln2, x.prec);
    let hi = if x.hi == x.lo {
        lo.clone()
    } else {
        ln_ratio_with(&x.hi.to_biguint().unwrap(), &den, ln2, x.prec)
    };
    Fx { lo: lo.lo, hi: hi.hi, prec: x.prec }
}

/// Natural log of a certainly positive interval.
pub fn ln(x: &Fx) -> Fx {
    ln_interval_with(x, &ln2(x.prec))
}

pub fn log10_ratio(num: &BigUint, den: &BigUint, prec: u32) -> Fx {
    ln_ratio(num, den, prec).div(&ln10(prec))
}

pub fn log10(x: &Fx) -> Fx {
    ln(x).div(&ln10(x.prec))
}

/// `exp(x)` for a single fixed-point value `x * 2^-prec`.
fn exp_point(x: &BigInt, prec: u32) -> Fx {
    let l2 = ln2(prec);
    // k ~ x / ln2
    let k = div_floor(x, &l2.lo);
    let r = Fx::exact_int(&BigInt::zero(), prec)
        .add(&Fx { lo: x.clone(), hi: x.clone(), prec })
        .sub(&l2.mul_int(&k));
    // |r| <= ~ln2 plus rounding; evaluate e^r at both ends
    let e_lo = exp_small(&r.lo, prec);
    let e_hi = exp_small(&r.hi, prec);
    let e = Fx { lo: e_lo.lo, hi: e_hi.hi, prec };
    let k_i: i64 = k.try_into().expect("exponent shift out of range");
    if k_i >= 0 {
        Fx { lo: shl(&e.lo, k_i as u32), hi: shl(&e.hi, k_i as u32), prec }
    } else {
        Fx { lo: shr_floor(&e.lo, (-k_i) as u32), hi: shr_ceil(&e.hi, (-k_i) as u32), prec }
    }
}

/// Taylor series for `e^r`, `|r| <= 1`.
fn exp_small(r: &BigInt, prec: u32) -> Fx {
    let one = shl(&BigInt::one(), prec);
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut n: u64 = 1;
    loop {
        term = shr_floor(&(&term * r), prec);
        term = div_floor(&term, &BigInt::from(n));
        if term.is_zero() || (term.abs() == BigInt::one() && n > 4) {
            break;
        }
        sum += &term;
        n += 1;
    }
    // each step loses at most 2 ulp; the tail is dominated by 2|term|
    let slack = BigInt::from(4 * n + 8);
    Fx { lo: &sum - &slack, hi: &sum + &slack, prec }
}

/// `exp` of an interval.
pub fn exp(x: &Fx) -> Fx {
    let lo = exp_point(&x.lo, x.prec);
    let hi = if x.hi == x.lo { lo.clone() } else { exp_point(&x.hi, x.prec) };
    Fx { lo: lo.lo, hi: hi.hi, prec: x.prec }
}

/// `10^x` of an interval.
pub fn exp10(x: &Fx) -> Fx {
    exp(&x.mul(&ln10(x.prec)))
}

/// Bernoulli numbers B_2 .. B_22 as (numerator, denominator).
const BERNOULLI: [(i64, i64); 11] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
];

/// Below this argument `ln(n!)` is evaluated from the exact factorial.
pub const STIRLING_CUTOFF: u64 = 2000;

/// Enclosure of `ln(n!)`.
pub fn ln_factorial(n: &BigUint, prec: u32) -> Fx {
    if n < &BigUint::from(STIRLING_CUTOFF) {
        let n: u64 = n.try_into().unwrap();
        let f = crate::magnitude::exact::factorial_u64(n);
        return ln_ratio(&f, &BigUint::one(), prec);
    }
    let consts = constants(prec);
    let x = BigInt::from(n.clone());
    let ln_x = ln_ratio(n, &BigUint::one(), prec);
    // (x + 1/2) ln x - x + ln(2 pi)/2
    let two_x_plus_one = &x * 2 + 1;
    let mut acc = ln_x
        .mul_int(&two_x_plus_one)
        .div_int(&BigInt::from(2))
        .sub(&Fx::exact_int(&x, prec))
        .add(&consts.half_ln_2pi);
    // sum of B_2j / (2j (2j-1) x^(2j-1)), j = 1..10; remainder bounded by the
    // eleventh term in magnitude
    let x2 = &x * &x;
    let mut xpow = x.clone();
    for (j, &(bn, bd)) in BERNOULLI.iter().enumerate() {
        let j2 = 2 * (j as i64 + 1);
        let den = BigInt::from(bd) * BigInt::from(j2 * (j2 - 1)) * &xpow;
        let term = Fx::from_ratio(&BigInt::from(bn), &den, prec);
        if j + 1 < BERNOULLI.len() {
            acc = acc.add(&term);
        } else {
            let mag = term.lo.abs().max(term.hi.abs()) + 1;
            acc = Fx { lo: &acc.lo - &mag, hi: &acc.hi + &mag, prec };
        }
        xpow = &xpow * &x2;
    }
    acc
}

/// Largest `k` with `2^k <= 10^digits`, plus guard bits.
pub fn prec_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
}
