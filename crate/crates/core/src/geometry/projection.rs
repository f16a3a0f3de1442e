//! Linear projections `P^M -> P^2` away from a codimension-three center.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::linalg::{rational_determinant, rational_rank};
use super::point::ProjectivePoint;
use super::GeometryError;
use crate::scalar::{pow, Field};
use crate::Rational;

/// Three rows of length `M + 1`. The light source is their common kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearProjection<S> {
    rows: [Vec<S>; 3],
    /// Vandermonde node when built by [`build_projections`].
    pub beta: Option<u64>,
    /// Coordinate chart when built by [`build_chart_projections`].
    pub chart: Option<usize>,
}

impl<S: Field> LinearProjection<S> {
    pub fn source_dim(&self) -> usize {
        self.rows[0].len() - 1
    }

    pub fn rows(&self) -> &[Vec<S>; 3] {
        &self.rows
    }
}

impl LinearProjection<Rational> {
    /// Projection from explicit rows; they must have equal length and rank 3.
    pub fn new(rows: [Vec<Rational>; 3]) -> Result<Self, GeometryError> {
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::ShapeMismatch("projection rows of unequal length".into()));
        }
        if rational_rank(&rows) != 3 {
            return Err(GeometryError::RankDeficient);
        }
        Ok(LinearProjection { rows, beta: None, chart: None })
    }
}

/// `[X_0, sum_{a=1}^{M} beta^a X_a, X_2]` for each of the first `count`
/// nodes. Any `M` of the middle rows form a matrix whose determinant is a
/// Vandermonde determinant times a product of the nodes, so distinct
/// positive nodes make every such minor nonzero.
pub fn build_projections(
    big_m: usize,
    count: usize,
    betas: &[u64],
) -> Result<Vec<LinearProjection<Rational>>, GeometryError> {
    if big_m < 3 {
        return Err(GeometryError::InvalidArgument(format!("source dimension {big_m} is below 3")));
    }
    if count > betas.len() {
        return Err(GeometryError::InvalidArgument(format!("{count} projections requested from {} nodes", betas.len())));
    }
    let mut seen = BTreeSet::new();
    if let Some(b) = betas.iter().find(|&&b| b == 0 || !seen.insert(b)) {
        return Err(GeometryError::InvalidBetas(format!("node {b} is repeated or zero")));
    }
    let unit = |i: usize| -> Vec<Rational> {
        (0..=big_m).map(|j| Rational::from_integer(BigInt::from((i == j) as u8))).collect()
    };
    Ok(betas[..count]
        .iter()
        .map(|&b| {
            let node = Rational::from_integer(BigInt::from(b));
            let middle = (0..=big_m).map(|a| if a == 0 { Rational::from_integer(0.into()) } else { pow(&node, a as u32) }).collect();
            LinearProjection { rows: [unit(0), middle, unit(2)], beta: Some(b), chart: None }
        })
        .collect())
}

/// Coordinates `Y = T X` of chart `r`. Chart 0 is the identity; chart
/// `r > 0` has rows `(x_i^0, ..., x_i^M)` at nodes `x_i = r(M+1) + i + 1`,
/// an invertible Vandermonde matrix.
pub fn chart_matrix(big_m: usize, r: usize) -> Vec<Vec<Rational>> {
    (0..=big_m)
        .map(|i| {
            (0..=big_m)
                .map(|j| {
                    if r == 0 {
                        Rational::from_integer(BigInt::from((i == j) as u8))
                    } else {
                        pow(&Rational::from_integer(BigInt::from(r * (big_m + 1) + i + 1)), j as u32)
                    }
                })
                .collect()
        })
        .collect()
}

/// The Vandermonde projections of [`build_projections`] written in each of
/// the first `charts` coordinate charts, ordered by chart and then node.
/// Chart `r` has its own hyperplane `{Y_0 = 0}` and its own `Y_2`, so two
/// curves lying in a common hyperplane `{X_2 = c X_0}`, which every
/// single-chart projection maps onto the same line, are still separated.
pub fn build_chart_projections(
    big_m: usize,
    charts: usize,
    betas: &[u64],
) -> Result<Vec<LinearProjection<Rational>>, GeometryError> {
    let base = build_projections(big_m, betas.len(), betas)?;
    let mut out = Vec::with_capacity(charts * base.len());
    for r in 0..charts {
        let t = chart_matrix(big_m, r);
        for p in &base {
            let rows = p.rows.clone().map(|row| {
                (0..=big_m)
                    .map(|j| row.iter().zip(&t).fold(Rational::from_integer(0.into()), |acc, (a, ti)| acc + a * &ti[j]))
                    .collect()
            });
            out.push(LinearProjection { rows, beta: p.beta, chart: Some(r) });
        }
    }
    Ok(out)
}

/// `det(a_{eta, alpha})` over `alpha = 1..M` for the selected projections.
pub fn nondegeneracy_determinant(projections: &[&LinearProjection<Rational>]) -> Result<Rational, GeometryError> {
    let big_m = projections.first().map_or(0, |p| p.source_dim());
    if projections.len() != big_m || projections.iter().any(|p| p.source_dim() != big_m) {
        return Err(GeometryError::ShapeMismatch(format!("need exactly {big_m} projections of source dimension {big_m}")));
    }
    let m: Vec<Vec<Rational>> = projections.iter().map(|p| p.rows[1][1..].to_vec()).collect();
    Ok(rational_determinant(&m))
}

/// Row dot products; fails on the light source.
pub fn apply_projection<S: Field>(
    pt: &ProjectivePoint<S>,
    pi: &LinearProjection<S>,
) -> Result<ProjectivePoint<S>, GeometryError> {
    if pt.coords().len() != pi.rows[0].len() {
        return Err(GeometryError::ShapeMismatch(format!(
            "point in P^{} projected from P^{}",
            pt.dim(),
            pi.source_dim()
        )));
    }
    let image = pi
        .rows
        .iter()
        .map(|r| r.iter().zip(pt.coords()).fold(S::zero(), |acc, (a, x)| acc + a.clone() * x))
        .collect();
    ProjectivePoint::new(image).map_err(|_| GeometryError::InLightSource)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point;

    #[test]
    fn vandermonde_minor_for_three_nodes() {
        let ps = build_projections(3, 3, &[1, 2, 3]).unwrap();
        let refs: Vec<&LinearProjection<Rational>> = ps.iter().collect();
        assert_eq!(nondegeneracy_determinant(&refs).unwrap(), Rational::from_integer(12.into()));
    }

    #[test]
    fn repeated_nodes_rejected() {
        assert!(matches!(build_projections(3, 3, &[1, 1, 2]), Err(GeometryError::InvalidBetas(_))));
        assert!(matches!(build_projections(2, 1, &[1]), Err(GeometryError::InvalidArgument(_))));
        assert!(matches!(build_projections(3, 4, &[1, 2, 3]), Err(GeometryError::InvalidArgument(_))));
    }

    #[test]
    fn outer_rows_are_coordinate_vectors() {
        for p in build_projections(5, 4, &[2, 3, 5, 7]).unwrap() {
            let nz = |r: &Vec<Rational>| r.iter().enumerate().filter(|(_, x)| **x != Rational::from_integer(0.into())).map(|(i, _)| i).collect::<Vec<_>>();
            assert_eq!(nz(&p.rows()[0]), vec![0]);
            assert_eq!(nz(&p.rows()[2]), vec![2]);
            assert_eq!(rational_rank(p.rows()), 3);
        }
    }

    #[test]
    fn charts_change_coordinates() {
        let ps = build_chart_projections(3, 2, &[1, 2, 3]).unwrap();
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[..3], build_projections(3, 3, &[1, 2, 3]).unwrap().into_iter().map(|p| LinearProjection { chart: Some(0), ..p }).collect::<Vec<_>>()[..]);
        assert_eq!(rational_determinant(&chart_matrix(3, 1)), Rational::from_integer(12.into()));
        // chart 1 first row is Y_0 = X_0 + 5 X_1 + 25 X_2 + 125 X_3
        let img = apply_projection(&Point::from_ints(&[1, 0, 0, 0]).unwrap(), &ps[3]).unwrap();
        assert_eq!(img.coords()[0], Rational::from_integer(1.into()));
        assert_eq!(img.coords()[2], Rational::from_integer(1.into()));
        assert!(ps.iter().all(|p| rational_rank(p.rows()) == 3));
    }

    #[test]
    fn projection_examples() {
        let pi = &build_projections(3, 1, &[1]).unwrap()[0];
        let img = apply_projection(&Point::from_ints(&[1, 2, 3, 4]).unwrap(), pi).unwrap();
        assert_eq!(img.coords(), Point::from_ints(&[1, 9, 3]).unwrap().coords());
        let scaled = apply_projection(&Point::from_ints(&[5, 10, 15, 20]).unwrap(), pi).unwrap();
        assert_eq!(scaled.normalized(), img.normalized());
        // X_0 = X_2 = 0 and X_1 + X_3 = 0
        let kernel = Point::from_ints(&[0, 1, 0, -1]).unwrap();
        assert!(matches!(apply_projection(&kernel, pi), Err(GeometryError::InLightSource)));
    }
}
