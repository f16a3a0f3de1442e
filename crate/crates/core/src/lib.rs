//! Certified evaluation of effective finiteness bounds for families of
//! curves over function fields, and a desk-scale exact projective geometry
//! engine that checks the constructive steps behind them.
//!
//! Numbers too large to write down are carried as [`Magnitude`]s: exact
//! integers below a size threshold, otherwise towers of base-10 logarithms
//! with certified interval bodies.

pub mod constants;
pub mod geometry;
pub mod magnitude;
pub mod parshin;
pub mod scalar;
pub mod trace;

pub use magnitude::{Comparison, Context, Magnitude, MagnitudeError};

/// Exact rationals used throughout the geometry engine.
pub type Rational = num_rational::BigRational;
pub type Point = geometry::ProjectivePoint<Rational>;
pub type Polynomial = geometry::HomogeneousPolynomial<Rational>;
pub type Curve = geometry::ParameterizedCurve<Rational>;
pub type Projection = geometry::LinearProjection<Rational>;
