//! Sparse (multi)homogeneous polynomials.
//!
//! Variables are numbered `0..vars`, grouped into consecutive blocks. A
//! plain homogeneous form has a single block. Monomials are listed in
//! graded lexicographic order: exponent vectors sorted descending, so for
//! `(x, y, z)` in degree 2 the order is `x^2, xy, xz, y^2, yz, z^2`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{parse_rational, ProjectivePoint};
use super::GeometryError;
use crate::scalar::{pow, Field, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial<S> {
    blocks: Vec<usize>,
    degrees: Vec<u32>,
    terms: BTreeMap<Vec<u32>, S>,
}

/// All exponent vectors of total degree `degree` in `vars` variables, in
/// graded lexicographic order.
pub fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn fill(vars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == vars {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            fill(vars, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars > 0 {
        fill(vars, degree, &mut Vec::with_capacity(vars), &mut out);
    }
    out
}

/// `prod x_i^{e_i}`.
pub fn eval_monomial<S: Scalar>(exp: &[u32], x: &[S]) -> S {
    exp.iter().zip(x).filter(|(e, _)| **e > 0).fold(S::one(), |acc, (e, v)| acc * &pow(v, *e))
}

impl<S: Scalar> HomogeneousPolynomial<S> {
    /// Zero form of the given degree in `vars` variables.
    pub fn zero(vars: usize, degree: u32) -> Self {
        Self::zero_multi(vec![vars], vec![degree])
    }

    /// Zero form with one degree per block of variables.
    pub fn zero_multi(blocks: Vec<usize>, degrees: Vec<u32>) -> Self {
        assert_eq!(blocks.len(), degrees.len(), "one degree per block");
        HomogeneousPolynomial { blocks, degrees, terms: BTreeMap::new() }
    }

    pub fn from_terms(vars: usize, degree: u32, terms: Vec<(Vec<u32>, S)>) -> Result<Self, GeometryError> {
        Self::from_terms_multi(vec![vars], vec![degree], terms)
    }

    pub fn from_terms_multi(
        blocks: Vec<usize>,
        degrees: Vec<u32>,
        terms: Vec<(Vec<u32>, S)>,
    ) -> Result<Self, GeometryError> {
        if blocks.len() != degrees.len() {
            return Err(GeometryError::ShapeMismatch("one degree per block".into()));
        }
        let mut p = Self::zero_multi(blocks, degrees);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// Single monomial with coefficient one.
    pub fn monomial(vars: usize, exp: Vec<u32>) -> Self {
        let degree = exp.iter().sum();
        let mut p = Self::zero(vars, degree);
        p.add_term(exp, S::one()).expect("degree matches by construction");
        p
    }

    pub fn vars(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn total_degree(&self) -> u32 {
        self.degrees.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u32]) -> S {
        self.terms.get(exp).cloned().unwrap_or_else(S::zero)
    }

    fn check_exponent(&self, exp: &[u32]) -> Result<(), GeometryError> {
        if exp.len() != self.vars() {
            return Err(GeometryError::ShapeMismatch(format!("exponent of length {} for {} variables", exp.len(), self.vars())));
        }
        let mut start = 0;
        for (&size, &deg) in self.blocks.iter().zip(&self.degrees) {
            let got: u32 = exp[start..start + size].iter().sum();
            if got != deg {
                return Err(GeometryError::ShapeMismatch(format!("block degree {got} where {deg} is declared")));
            }
            start += size;
        }
        Ok(())
    }

    /// Add `coeff * x^exp`; terms that cancel are dropped.
    pub fn add_term(&mut self, exp: Vec<u32>, coeff: S) -> Result<(), GeometryError> {
        self.check_exponent(&exp)?;
        if coeff.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.remove(&exp) {
            Some(c) => c + &coeff,
            None => coeff,
        };
        if !sum.is_zero() {
            self.terms.insert(exp, sum);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeometryError> {
        if self.blocks != other.blocks || self.degrees != other.degrees {
            return Err(GeometryError::ShapeMismatch("adding forms of different shape".into()));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &S) -> Self {
        let terms = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(e, c)| (e.clone(), c.clone() * factor)).collect()
        };
        HomogeneousPolynomial { blocks: self.blocks.clone(), degrees: self.degrees.clone(), terms }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GeometryError> {
        if self.blocks != other.blocks {
            return Err(GeometryError::ShapeMismatch("multiplying forms in different variables".into()));
        }
        let degrees = self.degrees.iter().zip(&other.degrees).map(|(a, b)| a + b).collect();
        let mut out = Self::zero_multi(self.blocks.clone(), degrees);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb)?;
            }
        }
        Ok(out)
    }

    /// `F(A x)` for a square matrix `A`; only single-block forms.
    pub fn linear_substitution(&self, a: &[Vec<S>]) -> Result<Self, GeometryError> {
        let n = self.vars();
        if self.blocks.len() != 1 || a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(GeometryError::ShapeMismatch("substitution matrix does not fit the form".into()));
        }
        let images: Vec<Self> = a
            .iter()
            .map(|row| {
                let terms = row
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let mut e = vec![0; n];
                        e[j] = 1;
                        (e, c.clone())
                    })
                    .collect();
                Self::from_terms(n, 1, terms)
            })
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(n, self.total_degree());
        for (e, c) in &self.terms {
            let mut acc = Self::from_terms(n, 0, vec![(vec![0; n], c.clone())])?;
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    acc = acc.mul(&images[i])?;
                }
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.vars(), "evaluation point has the wrong length");
        self.terms.iter().fold(S::zero(), |acc, (e, c)| acc + c.clone() * &eval_monomial(e, x))
    }
}

impl<S: Field> HomogeneousPolynomial<S> {
    pub fn eval_point(&self, p: &ProjectivePoint<S>) -> S {
        self.eval(p.coords())
    }

    /// Proportional to `other` by a nonzero factor.
    pub fn proportional(&self, other: &Self) -> bool {
        if self.blocks != other.blocks || self.degrees != other.degrees || self.len() != other.len() {
            return false;
        }
        let Some((e0, a0)) = self.terms.iter().next() else {
            return other.is_zero();
        };
        let Some(b0) = other.terms.get(e0) else {
            return false;
        };
        self.terms.iter().all(|(e, a)| other.terms.get(e).is_some_and(|b| a.clone() * b0 == b.clone() * a0))
    }
}

impl<S: fmt::Display + Scalar> fmt::Display for HomogeneousPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{v}")?,
                    _ => write!(f, "*x{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    blocks: Vec<usize>,
    degrees: Vec<u32>,
    terms: Vec<TermRepr>,
}

impl Serialize for HomogeneousPolynomial<BigRational> {
    fn serialize<Se: Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        PolyRepr {
            blocks: self.blocks.clone(),
            degrees: self.degrees.clone(),
            terms: self.terms.iter().map(|(e, c)| TermRepr { exp: e.clone(), coeff: c.to_string() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousPolynomial<BigRational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        let terms = r
            .terms
            .into_iter()
            .map(|t| parse_rational(&t.coeff).map(|c| (t.exp, c)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Self::from_terms_multi(r.blocks, r.degrees, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Polynomial, Rational};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn graded_lex_order() {
        let m = monomials(3, 2);
        assert_eq!(m, vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]]);
        assert_eq!(monomials(4, 3).len(), 20);
        assert_eq!(monomials(1, 5), vec![vec![5]]);
    }

    #[test]
    fn degree_is_enforced() {
        let mut p = Polynomial::zero(3, 2);
        assert!(p.add_term(vec![1, 0, 0], q(1)).is_err());
        assert!(p.add_term(vec![1, 1], q(1)).is_err());
        let mut b = Polynomial::zero_multi(vec![2, 2], vec![1, 1]);
        assert!(b.add_term(vec![2, 0, 0, 0], q(1)).is_err());
        assert!(b.add_term(vec![1, 0, 0, 1], q(1)).is_ok());
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let mut p = Polynomial::zero(2, 1);
        p.add_term(vec![1, 0], q(2)).unwrap();
        p.add_term(vec![1, 0], q(-2)).unwrap();
        p.add_term(vec![0, 1], q(0)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn evaluation_scales_with_degree() {
        // x^2 + y^2 - z^2
        let p = Polynomial::from_terms(3, 2, vec![(vec![2, 0, 0], q(1)), (vec![0, 2, 0], q(1)), (vec![0, 0, 2], q(-1))])
            .unwrap();
        let x = [q(3), q(4), q(5)];
        assert_eq!(p.eval(&x), q(0));
        let y = [q(1), q(2), q(3)];
        let y5: Vec<Rational> = y.iter().map(|v| v * q(5)).collect();
        assert_eq!(p.eval(&y5), p.eval(&y) * q(25));
    }

    #[test]
    fn product_and_substitution() {
        // (x + y)(x - y) = x^2 - y^2
        let a = Polynomial::from_terms(2, 1, vec![(vec![1, 0], q(1)), (vec![0, 1], q(1))]).unwrap();
        let b = Polynomial::from_terms(2, 1, vec![(vec![1, 0], q(1)), (vec![0, 1], q(-1))]).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p, Polynomial::from_terms(2, 2, vec![(vec![2, 0], q(1)), (vec![0, 2], q(-1))]).unwrap());
        // substituting x -> x + y, y -> x - y gives 4xy
        let m = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        assert_eq!(p.linear_substitution(&m).unwrap(), Polynomial::from_terms(2, 2, vec![(vec![1, 1], q(4))]).unwrap());
        let x = [q(3), q(-2)];
        let mx: Vec<Rational> = m.iter().map(|r| r[0].clone() * &x[0] + r[1].clone() * &x[1]).collect();
        assert_eq!(p.linear_substitution(&m).unwrap().eval(&x), p.eval(&mx));
    }

    #[test]
    fn proportionality() {
        let p = Polynomial::from_terms(2, 1, vec![(vec![1, 0], q(1)), (vec![0, 1], q(2))]).unwrap();
        assert!(p.proportional(&p.scale(&q(-3))));
        assert!(!p.proportional(&p.add(&Polynomial::monomial(2, vec![1, 0])).unwrap()));
    }

    #[test]
    fn serde_round_trip() {
        let p = Polynomial::from_terms(2, 2, vec![(vec![2, 0], Rational::new(1.into(), 3.into())), (vec![0, 2], q(-1))])
            .unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""coeff":"1/3""#));
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
