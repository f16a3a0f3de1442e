//! Points of projective space with exact coordinates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg::integer_row;
use super::GeometryError;
use crate::scalar::Field;

/// A point of `P^n`: `n + 1` coordinates, not all zero, compared up to a
/// nonzero scale.
#[derive(Clone, Debug)]
pub struct ProjectivePoint<S> {
    coords: Vec<S>,
}

impl<S: Field> ProjectivePoint<S> {
    pub fn new(coords: Vec<S>) -> Result<Self, GeometryError> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(GeometryError::ZeroVector);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    /// Dimension `n` of the ambient `P^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    fn leading(&self) -> usize {
        self.coords.iter().position(|c| !c.is_zero()).expect("nonzero by construction")
    }

    /// Representative whose first nonzero coordinate is 1.
    pub fn normalized(&self) -> Self {
        let lead = self.coords[self.leading()].clone();
        ProjectivePoint { coords: self.coords.iter().map(|c| c.clone() / &lead).collect() }
    }

    pub fn scaled(&self, factor: &S) -> Result<Self, GeometryError> {
        Self::new(self.coords.iter().map(|c| c.clone() * factor).collect())
    }
}

impl<S: Field> PartialEq for ProjectivePoint<S> {
    fn eq(&self, other: &Self) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        let p = self.leading();
        if other.coords[..p].iter().any(|c| !c.is_zero()) || other.coords[p].is_zero() {
            return false;
        }
        let (a, b) = (&self.coords[p], &other.coords[p]);
        self.coords.iter().zip(&other.coords).all(|(x, y)| x.clone() * b == y.clone() * a)
    }
}

impl ProjectivePoint<BigRational> {
    /// Representative with coprime integer coordinates and a positive
    /// leading coordinate.
    pub fn primitive(&self) -> Vec<BigInt> {
        let mut ints = integer_row(&self.coords);
        if ints[self.leading()] < BigInt::from(0) {
            ints.iter_mut().for_each(|x| *x = -x.clone());
        }
        ints
    }

    pub fn to_primitive(&self) -> Self {
        ProjectivePoint { coords: self.primitive().into_iter().map(BigRational::from_integer).collect() }
    }
}

impl<S: fmt::Display> fmt::Display for ProjectivePoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Parse a rational written as `n` or `n/d`.
pub fn parse_rational(s: &str) -> Result<BigRational, GeometryError> {
    let s = s.trim();
    let bad = || GeometryError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for ProjectivePoint<BigRational> {
    type Err = GeometryError;

    /// Accepts `[a, b, c]` or `a,b,c` with rational entries.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let coords = inner.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
        ProjectivePoint::new(coords)
    }
}

impl Serialize for ProjectivePoint<BigRational> {
    fn serialize<Se: Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        self.coords.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectivePoint<BigRational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let coords = raw.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        ProjectivePoint::new(coords).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point;

    fn pt(c: &[i64]) -> Point {
        Point::from_ints(c).unwrap()
    }

    #[test]
    fn equality_up_to_scale() {
        assert_eq!(pt(&[1, 2, 3]), pt(&[-2, -4, -6]));
        assert_ne!(pt(&[1, 2, 3]), pt(&[1, 2, 4]));
        assert_ne!(pt(&[0, 1]), pt(&[1, 1]));
        assert_ne!(pt(&[1, 0]), pt(&[1, 0, 0]));
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(Point::from_ints(&[0, 0]), Err(GeometryError::ZeroVector)));
    }

    #[test]
    fn normalization_is_idempotent() {
        let p = pt(&[0, 3, 6]).normalized();
        assert_eq!(p.to_string(), "[0, 1, 2]");
        assert_eq!(p.normalized().coords(), p.coords());
    }

    #[test]
    fn primitive_and_text_round_trip() {
        let p: Point = "[1/2, -3/4, 0]".parse().unwrap();
        assert_eq!(p.primitive(), vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/2","-3/4","0"]"#);
        let back: Point = serde_json::from_str(&json).unwrap();
        assert_eq!(back.coords(), p.coords());
    }
}
