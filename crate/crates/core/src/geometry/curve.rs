//! Rational curves given by polynomial parameterizations.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{parse_rational, ProjectivePoint};
use super::GeometryError;
use crate::scalar::Field;
use crate::Rational;

/// `t -> [p_0(t), ..., p_n(t)]`, each `p_i` stored by ascending powers of
/// `t`. The degree is the largest coordinate degree, which is the degree
/// of the image curve when the coordinates share no root and the map is
/// birational onto its image.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterizedCurve<S> {
    coords: Vec<Vec<S>>,
}

impl<S: Field> ParameterizedCurve<S> {
    pub fn new(mut coords: Vec<Vec<S>>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::ShapeMismatch("a curve needs an ambient space of dimension >= 1".into()));
        }
        for c in &mut coords {
            while c.last().is_some_and(|x| x.is_zero()) {
                c.pop();
            }
        }
        if coords.iter().all(Vec::is_empty) {
            return Err(GeometryError::ZeroVector);
        }
        Ok(ParameterizedCurve { coords })
    }

    pub fn from_ints(coords: &[&[i64]]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|c| c.iter().map(|&x| S::from_i64(x)).collect()).collect())
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn degree(&self) -> u32 {
        self.coords.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0) as u32
    }

    pub fn coords(&self) -> &[Vec<S>] {
        &self.coords
    }

    pub fn eval(&self, t: &S) -> Result<ProjectivePoint<S>, GeometryError> {
        let values = self
            .coords
            .iter()
            .map(|c| c.iter().rev().fold(S::zero(), |acc, a| acc * t + a))
            .collect();
        ProjectivePoint::new(values)
    }
}

/// Evaluations at the requested parameters, with index pairs whose points
/// coincide projectively.
#[derive(Clone, Debug)]
pub struct CurveSample<S> {
    pub points: Vec<ProjectivePoint<S>>,
    pub duplicates: Vec<(usize, usize)>,
}

pub fn sample_curve<S: Field>(c: &ParameterizedCurve<S>, ts: &[S]) -> Result<CurveSample<S>, GeometryError> {
    for (i, t) in ts.iter().enumerate() {
        if ts[..i].contains(t) {
            return Err(GeometryError::InvalidArgument(format!("parameter value {i} repeats an earlier one")));
        }
    }
    let points = ts.iter().map(|t| c.eval(t)).collect::<Result<Vec<_>, _>>()?;
    let mut duplicates = Vec::new();
    for i in 0..points.len() {
        for j in 0..i {
            if points[i] == points[j] {
                duplicates.push((j, i));
            }
        }
    }
    Ok(CurveSample { points, duplicates })
}

/// Parameter values of increasing height: `0, 1, -1, 2, -2, 1/2, -1/2, 3,
/// -3, 1/3, ...`. Small heights keep the exact arithmetic cheap.
pub fn parameter_values() -> impl Iterator<Item = Rational> {
    let zero = Rational::from_integer(0.into());
    std::iter::once(zero).chain((1i64..).flat_map(|h| {
        let wide = (1..=h).filter(move |d| h.gcd(d) == 1).map(move |d| (h, d));
        let narrow = (1..h).filter(move |n| n.gcd(&h) == 1).map(move |n| (n, h));
        wide.chain(narrow)
            .flat_map(|(n, d)| [(n, d), (-n, d)])
            .map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
    }))
}

/// Twisted cubic `[1, t, t^2, t^3]`.
pub fn twisted_cubic() -> ParameterizedCurve<Rational> {
    ParameterizedCurve::from_ints(&[&[1], &[0, 1], &[0, 0, 1], &[0, 0, 0, 1]]).expect("valid")
}

/// Line `[1, t, 0, 0]` in `P^3`.
pub fn line_in_p3() -> ParameterizedCurve<Rational> {
    ParameterizedCurve::from_ints(&[&[1], &[0, 1], &[], &[]]).expect("valid")
}

/// Conic `[1, t, t^2]` in the plane.
pub fn plane_conic() -> ParameterizedCurve<Rational> {
    ParameterizedCurve::from_ints(&[&[1], &[0, 1], &[0, 0, 1]]).expect("valid")
}

/// Curve by name: `twisted-cubic`, `line`, `conic`.
pub fn named_curve(name: &str) -> Option<ParameterizedCurve<Rational>> {
    match name {
        "twisted-cubic" => Some(twisted_cubic()),
        "line" => Some(line_in_p3()),
        "conic" => Some(plane_conic()),
        _ => None,
    }
}

impl Serialize for ParameterizedCurve<Rational> {
    fn serialize<Se: Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        let text: Vec<Vec<String>> = self.coords.iter().map(|c| c.iter().map(ToString::to_string).collect()).collect();
        text.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParameterizedCurve<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        let coords = text
            .iter()
            .map(|c| c.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        ParameterizedCurve::new(coords).map_err(D::Error::custom)
    }
}
