//! Plane curves through their coefficient tuples: recovery from points,
//! the signed-minor (Cramer) formula, and images of space curves under
//! Veronese maps followed by linear projections.

use serde::Serialize;

use super::curve::{parameter_values, ParameterizedCurve};
use super::linalg::{rational_determinant, rational_nullspace};
use super::point::ProjectivePoint;
use super::poly::{eval_monomial, monomials, HomogeneousPolynomial};
use super::projection::{apply_projection, LinearProjection};
use super::veronese::{apply_forms, veronese_forms};
use super::GeometryError;
use crate::Rational;

/// Degree-`d` plane curve as the tuple `(A_alpha)` of its coefficients in
/// graded lexicographic order of `(x, y, z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneChowPoint {
    pub degree: u32,
    pub coeffs: ProjectivePoint<Rational>,
}

impl PlaneChowPoint {
    pub fn new(degree: u32, coeffs: ProjectivePoint<Rational>) -> Result<Self, GeometryError> {
        if coeffs.coords().len() != monomials(3, degree).len() {
            return Err(GeometryError::ShapeMismatch(format!("{} coefficients for degree {degree}", coeffs.coords().len())));
        }
        Ok(PlaneChowPoint { degree, coeffs })
    }

    pub fn form(&self) -> HomogeneousPolynomial<Rational> {
        let terms = monomials(3, self.degree).into_iter().zip(self.coeffs.coords().iter().cloned()).collect();
        HomogeneousPolynomial::from_terms(3, self.degree, terms).expect("monomials have the declared degree")
    }

    pub fn contains(&self, pt: &ProjectivePoint<Rational>) -> bool {
        self.form().eval_point(pt) == Rational::from_integer(0.into())
    }
}

fn monomial_rows(points: &[ProjectivePoint<Rational>], d: u32) -> Vec<Vec<Rational>> {
    let mons = monomials(3, d);
    points
        .iter()
        .map(|p| {
            let x = p.to_primitive();
            mons.iter().map(|e| eval_monomial(e, x.coords())).collect()
        })
        .collect()
}

fn check_plane(points: &[ProjectivePoint<Rational>]) -> Result<(), GeometryError> {
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(GeometryError::ShapeMismatch(format!("{p} is not a point of the plane")));
    }
    Ok(())
}

/// Nullspace of the point-by-monomial evaluation matrix.
///
/// Eliminates the first `cols + 1` rows; when that leaves a single
/// candidate curve, the remaining rows only need to vanish on it. Any other
/// outcome falls back to eliminating every row.
pub fn curves_through(points: &[ProjectivePoint<Rational>], d: u32) -> Result<Vec<Vec<Rational>>, GeometryError> {
    check_plane(points)?;
    let rows = monomial_rows(points, d);
    let cols = monomials(3, d).len();
    if rows.len() > cols + 1 {
        let (head, tail) = rows.split_at(cols + 1);
        let ns = rational_nullspace(head, cols);
        if ns.is_empty() {
            return Ok(ns);
        }
        let zero = Rational::from_integer(0.into());
        let vanishes = |r: &Vec<Rational>| r.iter().zip(&ns[0]).fold(zero.clone(), |acc, (a, x)| acc + a * x) == zero;
        if ns.len() == 1 && tail.iter().all(vanishes) {
            return Ok(ns);
        }
    }
    Ok(rational_nullspace(&rows, cols))
}

/// The unique degree-`d` curve through the given distinct points.
pub fn recover_plane_curve(points: &[ProjectivePoint<Rational>], d: u32) -> Result<PlaneChowPoint, GeometryError> {
    for i in 0..points.len() {
        if points[..i].contains(&points[i]) {
            return Err(GeometryError::InvalidArgument(format!("point {} repeats an earlier one", points[i])));
        }
    }
    let mut ns = curves_through(points, d)?;
    match ns.len() {
        0 => Err(GeometryError::NoCurve),
        1 => PlaneChowPoint::new(d, ProjectivePoint::new(ns.remove(0))?.normalized()),
        n => Err(GeometryError::AmbiguousCurve { nullity: n }),
    }
}

/// `D_alpha(t0) = (-1)^(k_alpha - 1)` times the minor with column `alpha`
/// removed, for `C(d+2, 2) - 1` moving points. Proportional to the curve
/// through the points whenever that curve is unique.
pub fn chow_determinant_vector(
    moving: &[ParameterizedCurve<Rational>],
    d: u32,
    t0: &Rational,
) -> Result<Vec<Rational>, GeometryError> {
    let k = monomials(3, d).len();
    if moving.len() + 1 != k {
        return Err(GeometryError::ShapeMismatch(format!("{} moving points for degree {d}; need {}", moving.len(), k - 1)));
    }
    let points = moving.iter().map(|c| c.eval(t0)).collect::<Result<Vec<_>, _>>()?;
    check_plane(&points)?;
    let rows = monomial_rows(&points, d);
    let minors: Vec<Rational> = (0..k)
        .map(|skip| {
            let sub: Vec<Vec<Rational>> =
                rows.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, x)| x.clone()).collect()).collect();
            let det = rational_determinant(&sub);
            if skip % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect();
    if minors.iter().all(|m| *m == Rational::from_integer(0.into())) {
        return Err(GeometryError::DegenerateSubsystem);
    }
    Ok(minors)
}

/// Recovered image of a curve in the plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectedCurve {
    pub chow: PlaneChowPoint,
    /// `l * deg(C)` for the map that produced it.
    pub expected_degree: u32,
    pub recovered_degree: u32,
    /// `expected / recovered` when that is an integer.
    pub multiplicity: Option<u32>,
    pub distinct_samples: usize,
    /// Parameter values skipped because the map was undefined there.
    pub undefined_hits: usize,
}

enum Sampled {
    Points { points: Vec<ProjectivePoint<Rational>>, undefined: usize },
    Point(ProjectivePoint<Rational>),
    Empty,
}

/// Walk the parameter values collecting `needed` distinct image points.
fn collect_images(
    needed: usize,
    max_tries: usize,
    map: impl Fn(&Rational) -> Option<ProjectivePoint<Rational>>,
) -> Sampled {
    let mut points: Vec<ProjectivePoint<Rational>> = Vec::new();
    let mut undefined = 0;
    for t in parameter_values().take(max_tries) {
        match map(&t) {
            None => undefined += 1,
            Some(p) => {
                if !points.contains(&p) {
                    points.push(p);
                    if points.len() == needed {
                        break;
                    }
                }
            }
        }
    }
    match points.len() {
        0 => Sampled::Empty,
        1 => Sampled::Point(points.remove(0)),
        _ => Sampled::Points { points, undefined },
    }
}

/// Lowest degree with a unique curve through the points, searched up to
/// `max_degree`.
fn recover_lowest(points: &[ProjectivePoint<Rational>], max_degree: u32) -> Result<PlaneChowPoint, GeometryError> {
    match recover_plane_curve(points, max_degree) {
        Ok(c) => return Ok(c),
        Err(GeometryError::AmbiguousCurve { .. }) => {}
        Err(e) => return Err(e),
    }
    for d in 1..max_degree {
        match recover_plane_curve(points, d) {
            Err(GeometryError::NoCurve) => continue,
            other => return other,
        }
    }
    recover_plane_curve(points, max_degree)
}

fn recover_image(
    expected: u32,
    map: impl Fn(&Rational) -> Option<ProjectivePoint<Rational>>,
) -> Result<ProjectedCurve, GeometryError> {
    let needed = (expected * expected + 1) as usize;
    match collect_images(needed, 8 * needed + 64, map) {
        Sampled::Empty | Sampled::Point(_) => Err(GeometryError::ImageIsPoint),
        Sampled::Points { points, undefined } => {
            if points.len() < needed {
                return Err(GeometryError::InsufficientSamples { found: points.len(), needed });
            }
            let chow = recover_lowest(&points, expected)?;
            let recovered = chow.degree;
            Ok(ProjectedCurve {
                chow,
                expected_degree: expected,
                recovered_degree: recovered,
                multiplicity: (expected % recovered == 0).then_some(expected / recovered),
                distinct_samples: points.len(),
                undefined_hits: undefined,
            })
        }
    }
}

/// Image of `c` under the degree-`l` Veronese forms (or the supplied
/// perturbed forms) followed by `pi`, as a plane curve.
pub fn project_curve_to_plane_chow(
    c: &ParameterizedCurve<Rational>,
    l: u32,
    pi: &LinearProjection<Rational>,
    forms: Option<&[HomogeneousPolynomial<Rational>]>,
) -> Result<ProjectedCurve, GeometryError> {
    let exact;
    let forms = match forms {
        Some(f) => f,
        None => {
            exact = veronese_forms(c.dim() + 1, l);
            &exact
        }
    };
    if forms.len() != pi.source_dim() + 1 {
        return Err(GeometryError::ShapeMismatch(format!(
            "{} forms feed a projection from P^{}",
            forms.len(),
            pi.source_dim()
        )));
    }
    if forms.iter().any(|f| f.vars() != c.dim() + 1 || f.total_degree() != l) {
        return Err(GeometryError::ShapeMismatch(format!("forms must have degree {l} in {} variables", c.dim() + 1)));
    }
    recover_image(l * c.degree(), |t| {
        let p = c.eval(t).ok()?;
        let v = apply_forms(forms, &p).ok()?;
        apply_projection(&v, pi).ok()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MatchOutcome {
    Match,
    /// First projection (counted from 1) whose images differ.
    Distinguished(usize),
}

/// Compare the plane images of two curves under each projection in turn.
pub fn match_via_projections(
    c1: &ParameterizedCurve<Rational>,
    c2: &ParameterizedCurve<Rational>,
    pis: &[LinearProjection<Rational>],
    l: u32,
) -> Result<MatchOutcome, GeometryError> {
    for (nu, pi) in pis.iter().enumerate() {
        let a = project_curve_to_plane_chow(c1, l, pi, None)?;
        let b = project_curve_to_plane_chow(c2, l, pi, None)?;
        if a.chow != b.chow {
            return Ok(MatchOutcome::Distinguished(nu + 1));
        }
    }
    Ok(MatchOutcome::Match)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ImageDimension {
    Curve {
        recovered_degree: u32,
        expected_degree: u32,
        degree_matches: bool,
    },
    Point(ProjectivePoint<Rational>),
    /// Every sample hit the common zeros of the forms.
    Undefined,
}

/// Whether `[f0, f1, f2]` maps `c` onto a curve or collapses it to a point.
pub fn image_dimension_check(
    f: [&HomogeneousPolynomial<Rational>; 3],
    c: &ParameterizedCurve<Rational>,
    sample_count: usize,
) -> Result<ImageDimension, GeometryError> {
    let l = f[0].total_degree();
    if f.iter().any(|g| g.vars() != c.dim() + 1 || g.total_degree() != l) {
        return Err(GeometryError::ShapeMismatch(format!("forms must share one degree in {} variables", c.dim() + 1)));
    }
    let forms: Vec<HomogeneousPolynomial<Rational>> = f.iter().map(|g| (*g).clone()).collect();
    let map = |t: &Rational| {
        let p = c.eval(t).ok()?;
        apply_forms(&forms, &p).ok()
    };
    match collect_images(2, sample_count, map) {
        Sampled::Empty => Ok(ImageDimension::Undefined),
        Sampled::Point(p) => Ok(ImageDimension::Point(p.normalized())),
        Sampled::Points { .. } => {
            let expected = l * c.degree();
            let image = recover_image(expected, map)?;
            Ok(ImageDimension::Curve {
                recovered_degree: image.recovered_degree,
                expected_degree: expected,
                degree_matches: image.recovered_degree == expected,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::{line_in_p3, plane_conic, twisted_cubic};
    use crate::geometry::projection::build_projections;
    use crate::{Curve, Point, Polynomial};

    fn pt(c: &[i64]) -> Point {
        Point::from_ints(c).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn circle_points() -> Vec<Point> {
        let mut pts: Vec<Point> = [[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]].iter().map(|c| pt(c)).collect();
        pts.push("[3/5, 4/5, 1]".parse().unwrap());
        pts
    }

    #[test]
    fn line_through_two_points() {
        let c = recover_plane_curve(&[pt(&[1, 0, 1]), pt(&[0, 1, 1])], 1).unwrap();
        assert_eq!(c.coeffs, pt(&[1, 1, -1]));
    }

    #[test]
    fn circle_through_five_points() {
        let c = recover_plane_curve(&circle_points(), 2).unwrap();
        assert_eq!(c.coeffs, pt(&[1, 0, 0, 1, 0, -1]));
        assert!(c.contains(&"[-3/5, 4/5, 1]".parse().unwrap()));
    }

    #[test]
    fn collinear_points_are_ambiguous() {
        let pts: Vec<Point> = (1..=5).map(|i| pt(&[1, i, 0])).collect();
        assert_eq!(recover_plane_curve(&pts, 2), Err(GeometryError::AmbiguousCurve { nullity: 3 }));
    }

    #[test]
    fn points_off_every_line() {
        let pts = [pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])];
        assert_eq!(recover_plane_curve(&pts, 1), Err(GeometryError::NoCurve));
    }

    #[test]
    fn minors_for_moving_line_are_the_cross_product() {
        // p(t) = [1, t, 0], r(t) = [0, 1, t]; p x r = [t^2, -t, 1]
        let p = Curve::from_ints(&[&[1], &[0, 1], &[]]).unwrap();
        let r = Curve::from_ints(&[&[], &[1], &[0, 1]]).unwrap();
        let d = chow_determinant_vector(&[p, r], 1, &q(3)).unwrap();
        assert_eq!(d, vec![q(9), q(-3), q(1)]);
    }

    #[test]
    fn minors_match_recovered_circle() {
        let constant: Vec<Curve> = circle_points()
            .into_iter()
            .map(|p| Curve::new(p.into_coords().into_iter().map(|x| vec![x]).collect()).unwrap())
            .collect();
        let d = chow_determinant_vector(&constant, 2, &q(0)).unwrap();
        assert_eq!(Point::new(d).unwrap(), pt(&[1, 0, 0, 1, 0, -1]));
    }

    #[test]
    fn collinear_minors_are_degenerate() {
        let moving: Vec<Curve> = (1..=5).map(|i| Curve::from_ints(&[&[1], &[i, 1], &[]]).unwrap()).collect();
        assert_eq!(chow_determinant_vector(&moving, 2, &q(0)), Err(GeometryError::DegenerateSubsystem));
    }

    #[test]
    fn twisted_cubic_projects_to_a_cubic() {
        let pi = &build_projections(3, 1, &[2]).unwrap()[0];
        let img = project_curve_to_plane_chow(&twisted_cubic(), 1, pi, None).unwrap();
        assert_eq!(img.recovered_degree, 3);
        assert_eq!(img.distinct_samples, 10);
        assert_eq!(img.multiplicity, Some(1));
    }

    #[test]
    fn conic_under_identity_projection() {
        let id = LinearProjection::new([vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]]).unwrap();
        let img = project_curve_to_plane_chow(&plane_conic(), 1, &id, None).unwrap();
        // xz - y^2
        assert_eq!(img.chow.coeffs, pt(&[0, 0, 1, -1, 0, 0]));
    }

    #[test]
    fn projection_killing_a_line_gives_a_point() {
        // the line [1, t, 0, 0] spans X_2 = X_3 = 0; these rows vanish on it
        let pi = LinearProjection::new([
            vec![q(0), q(0), q(1), q(0)],
            vec![q(0), q(0), q(0), q(1)],
            vec![q(0), q(0), q(1), q(1)],
        ]);
        assert_eq!(pi, Err(GeometryError::RankDeficient));
        let pi = LinearProjection::new([
            vec![q(0), q(0), q(1), q(0)],
            vec![q(0), q(0), q(0), q(1)],
            vec![q(1), q(1), q(0), q(0)],
        ])
        .unwrap();
        assert_eq!(project_curve_to_plane_chow(&line_in_p3(), 1, &pi, None), Err(GeometryError::ImageIsPoint));
    }

    #[test]
    fn matching_examples() {
        let pis = build_projections(3, 4, &[1, 2, 3, 4]).unwrap();
        assert_eq!(match_via_projections(&twisted_cubic(), &twisted_cubic(), &pis, 1).unwrap(), MatchOutcome::Match);
        assert_eq!(
            match_via_projections(&twisted_cubic(), &line_in_p3(), &pis, 1).unwrap(),
            MatchOutcome::Distinguished(1)
        );
    }

    #[test]
    fn image_dimension_examples() {
        let c = Curve::from_ints(&[&[1], &[0, 1], &[]]).unwrap();
        let x = Polynomial::monomial(3, vec![1, 0, 0]);
        let y = Polynomial::monomial(3, vec![0, 1, 0]);
        let z = Polynomial::monomial(3, vec![0, 0, 1]);
        let got = image_dimension_check([&x, &y, &z], &c, 20).unwrap();
        assert_eq!(got, ImageDimension::Curve { recovered_degree: 1, expected_degree: 1, degree_matches: true });

        // f1 = 2 f0 and f2 = 3 f0 on C: everything lands on [1, 2, 3]
        let f1 = x.scale(&q(2));
        let f2 = x.scale(&q(3));
        assert_eq!(image_dimension_check([&x, &f1, &f2], &c, 20).unwrap(), ImageDimension::Point(pt(&[1, 2, 3])));

        // z vanishes on C
        assert_eq!(image_dimension_check([&z, &z, &z], &c, 20).unwrap(), ImageDimension::Undefined);
    }
}
