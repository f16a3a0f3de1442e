//! Seeded generation of small rational data for the property suites.

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::ParameterizedCurve;
use super::poly::{monomials, HomogeneousPolynomial};
use crate::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p / q` with `|p| <= bound` and `1 <= q <= bound`.
pub fn small_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let p = rng.gen_range(-bound..=bound);
    let q = rng.gen_range(1..=bound);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn small_integer<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    Rational::from_integer(BigInt::from(rng.gen_range(-bound..=bound)))
}

/// Dense form with independent small rational coefficients.
pub fn random_form<R: Rng>(rng: &mut R, vars: usize, degree: u32, bound: i64) -> HomogeneousPolynomial<Rational> {
    let terms = monomials(vars, degree).into_iter().map(|e| (e, small_rational(rng, bound))).collect();
    HomogeneousPolynomial::from_terms(vars, degree, terms).expect("monomials have the declared degree")
}

/// Curve in `P^dim` whose coordinates are polynomials of degree at most
/// `degree` in `t`, with small integer coefficients. The leading
/// coefficient of the first coordinate and the constant term of the second
/// are forced nonzero so the curve has exactly that degree and no
/// coordinate-wide common root at `t = 0`.
pub fn random_curve<R: Rng>(rng: &mut R, dim: usize, degree: u32, bound: i64) -> ParameterizedCurve<Rational> {
    let nonzero = |rng: &mut R| loop {
        let v = small_integer(rng, bound);
        if v != Rational::from_integer(0.into()) {
            return v;
        }
    };
    let coords = (0..=dim)
        .map(|i| {
            let mut c: Vec<Rational> = (0..=degree).map(|_| small_integer(rng, bound)).collect();
            if i == 0 {
                c[degree as usize] = nonzero(rng);
            }
            if i == 1 {
                c[0] = nonzero(rng);
            }
            c
        })
        .collect();
    ParameterizedCurve::new(coords).expect("nonzero coordinates by construction")
}
