//! Exact big-integer factorials and binomials.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Product of a slice of integers with a balanced tree.
fn product_tree(items: &[BigUint]) -> BigUint {
    match items.len() {
        0 => BigUint::one(),
        1 => items[0].clone(),
        n => {
            let (a, b) = items.split_at(n / 2);
            product_tree(a) * product_tree(b)
        }
    }
}

fn product_range(lo: u64, hi: u64) -> BigUint {
    // product of lo..=hi
    if lo > hi {
        return BigUint::one();
    }
    if hi - lo < 16 {
        return (lo..=hi).fold(BigUint::one(), |acc, i| acc * i);
    }
    let mid = lo + (hi - lo) / 2;
    product_range(lo, mid) * product_range(mid + 1, hi)
}

pub fn factorial_u64(n: u64) -> BigUint {
    product_range(2, n)
}

fn sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is = vec![true; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if is[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
    }
    primes
}

/// Exponent of prime `p` in `n!` (Legendre).
fn legendre(mut n: u64, p: u64) -> u64 {
    let mut e = 0;
    while n > 0 {
        n /= p;
        e += n;
    }
    e
}

/// Arguments above this use the multiplicative recurrence instead of the sieve.
const SIEVE_LIMIT: u64 = 50_000_000;

/// Exact `C(n, k)`; returns 0 when `k > n`.
pub fn binomial(n: &BigUint, k: &BigUint) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let nk = n - k;
    let k = if &nk < k { nk } else { k.clone() };
    let Some(k) = k.to_u64() else {
        panic!("exact binomial with a lower index beyond 64 bits");
    };
    if k == 0 {
        return BigUint::one();
    }
    match n.to_u64() {
        Some(n) if k > 64 && n <= SIEVE_LIMIT => binomial_by_primes(n, k),
        _ => binomial_recurrence(n, k),
    }
}

fn binomial_recurrence(n: &BigUint, k: u64) -> BigUint {
    // numerator and denominator products, divided once at the end
    let nums: Vec<BigUint> = (0..k).map(|i| n - i).collect();
    let num = product_tree(&nums);
    num / factorial_u64(k)
}

fn binomial_by_primes(n: u64, k: u64) -> BigUint {
    let mut factors = Vec::new();
    for p in sieve(n) {
        let e = legendre(n, p) - legendre(k, p) - legendre(n - k, p);
        if e > 0 {
            factors.push(BigUint::from(p).pow(e as u32));
        }
    }
    product_tree(&factors)
}
