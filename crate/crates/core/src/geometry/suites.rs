//! Seeded property suites over the geometry engine. Each trial draws its
//! data from `seed + trial`, so any failure can be replayed alone.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::chow::{image_dimension_check, match_via_projections, project_curve_to_plane_chow, ImageDimension, MatchOutcome};
use super::curve::{plane_conic, ParameterizedCurve};
use super::linalg::rational_determinant;
use super::point::ProjectivePoint;
use super::poly::monomials;
use super::projection::{build_chart_projections, build_projections, nondegeneracy_determinant, LinearProjection};
use super::random::{random_curve, random_form, rng, small_integer, small_rational};
use super::segre::{segre_embed, segre_pushforward_equations};
use super::{recover_plane_curve, GeometryError};
use crate::constants::clemens_threshold;
use crate::{Curve, Point, Polynomial, Rational};

pub const SUITES: [&str; 6] = ["recovery", "matching", "nondegeneracy", "degree-law", "image-dimension", "segre"];

/// Charts and Vandermonde nodes of the projections used for matching curves
/// of degree at most 4 in `P^3`: `delta0 * M = 12` nodes per chart.
pub const MATCH_CHARTS: usize = 3;
pub const MATCH_NODES: u64 = 12;

/// The `(chart, node)` projections used by the matching suite.
pub fn matching_projections(big_m: usize) -> Result<Vec<LinearProjection<Rational>>, GeometryError> {
    build_chart_projections(big_m, MATCH_CHARTS, &(1..=MATCH_NODES).collect::<Vec<_>>())
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    /// Fraction of trials that must pass.
    pub required_rate: f64,
    /// One line per failed trial, starting with its seed.
    pub exceptions: Vec<String>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.trials > 0 && self.passed as f64 >= self.required_rate * self.trials as f64
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Fixed curve degree for the recovery suite; cycles through 1..=4 when unset.
    pub degree: Option<u32>,
}

pub fn default_trials(suite: &str) -> usize {
    match suite {
        "degree-law" => 200,
        "image-dimension" => 50,
        "nondegeneracy" => 20,
        _ => 100,
    }
}

pub fn run_suite(suite: &str, seed: u64, trials: usize, opts: &SuiteOptions) -> Result<SuiteReport, GeometryError> {
    let (trial, required_rate): (Box<dyn Fn(u64, usize) -> Result<(), String>>, f64) = match suite {
        "recovery" => {
            let fixed = opts.degree;
            (Box::new(move |s, i| recovery_trial(s, fixed.unwrap_or(1 + (i % 4) as u32))), 1.0)
        }
        "matching" => (Box::new(|s, i| matching_trial(s, i % 2 == 0)), 1.0),
        "nondegeneracy" => (Box::new(|s, _| nondegeneracy_trial(s)), 1.0),
        "degree-law" => (Box::new(|s, i| degree_law_trial(s, i)), 0.95),
        "image-dimension" => (Box::new(|s, _| image_dimension_trial(s)), 1.0),
        "segre" => (Box::new(|s, i| segre_trial(s, i % 2 == 0)), 1.0),
        other => return Err(GeometryError::InvalidArgument(format!("unknown suite {other:?}; known: {}", SUITES.join(", ")))),
    };
    let start = Instant::now();
    let mut passed = 0;
    let mut exceptions = Vec::new();
    for i in 0..trials {
        let s = seed.wrapping_add(i as u64);
        match trial(s, i) {
            Ok(()) => passed += 1,
            Err(why) => exceptions.push(format!("seed {s}: {why}")),
        }
    }
    Ok(SuiteReport {
        suite: suite.to_string(),
        seed,
        trials,
        passed,
        required_rate,
        exceptions,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Inverse of a 3x3 matrix by the adjugate.
fn inverse3(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let det = rational_determinant(m);
    if det.is_zero() {
        return None;
    }
    let minor = |r: usize, c: usize| {
        let sub: Vec<Vec<Rational>> = (0..3)
            .filter(|&i| i != r)
            .map(|i| (0..3).filter(|&j| j != c).map(|j| m[i][j].clone()).collect())
            .collect();
        rational_determinant(&sub)
    };
    Some(
        (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let cof = minor(j, i);
                        let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                        signed / &det
                    })
                    .collect()
            })
            .collect(),
    )
}

fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|r| r.iter().zip(v).fold(q(0), |acc, (a, x)| acc + a * x)).collect()
}

/// Random plane curve `z A(x, y) + B(x, y)` of degree `d` moved by a random
/// change of coordinates, with `d^2 + 1` exact points on it. Curves of this
/// shape have a `(d-1)`-fold point, so every line through it meets the curve
/// in one further rational point.
pub fn random_plane_curve_with_points<R: Rng>(r: &mut R, d: u32) -> Option<(Polynomial, Vec<Point>)> {
    let (a, b) = loop {
        let a = random_form(r, 2, d - 1, 9);
        let b = random_form(r, 2, d, 9);
        if !a.is_zero() && !b.is_zero() {
            break (a, b);
        }
    };
    let mut f = Polynomial::zero(3, d);
    for (e, c) in a.terms() {
        f.add_term(vec![e[0], e[1], 1], c.clone()).ok()?;
    }
    for (e, c) in b.terms() {
        f.add_term(vec![e[0], e[1], 0], c.clone()).ok()?;
    }
    let (m, inv) = loop {
        let m: Vec<Vec<Rational>> = (0..3).map(|_| (0..3).map(|_| small_integer(r, 3)).collect()).collect();
        if let Some(inv) = inverse3(&m) {
            break (m, inv);
        }
    };
    let moved = f.linear_substitution(&m).ok()?;

    let needed = (d * d + 1) as usize;
    let mut points: Vec<Point> = Vec::new();
    for _ in 0..needed * 20 {
        let t = small_rational(r, 12);
        let (x, y) = (q(1), t);
        let av = a.eval(&[x.clone(), y.clone()]);
        if av.is_zero() {
            continue;
        }
        let z = -b.eval(&[x.clone(), y.clone()]) / av;
        let p = Point::new(mat_vec(&inv, &[x, y, z])).ok()?;
        if !points.contains(&p) {
            points.push(p);
            if points.len() == needed {
                return Some((moved, points));
            }
        }
    }
    None
}

fn recovery_trial(seed: u64, d: u32) -> Result<(), String> {
    let mut r = rng(seed);
    let (f, points) = random_plane_curve_with_points(&mut r, d).ok_or("could not draw enough points")?;
    let want = Point::new(monomials(3, d).iter().map(|e| f.coefficient(e)).collect()).map_err(|e| e.to_string())?;
    let got = recover_plane_curve(&points, d).map_err(|e| format!("degree {d}: {e}"))?;
    if got.coeffs == want {
        Ok(())
    } else {
        Err(format!("degree {d}: recovered {} instead of {}", got.coeffs, want))
    }
}

/// `t -> lambda t`, which leaves the image curve unchanged.
fn rescale_parameter(c: &Curve, lambda: &Rational) -> Curve {
    let coords = c
        .coords()
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, a)| a * crate::scalar::pow(lambda, i as u32)).collect())
        .collect();
    ParameterizedCurve::new(coords).expect("rescaling keeps a nonzero coordinate")
}

fn matching_trial(seed: u64, one_coefficient: bool) -> Result<(), String> {
    let mut r = rng(seed);
    let pis = matching_projections(3).map_err(|e| e.to_string())?;
    let d1 = r.gen_range(1..=4);
    let c1 = random_curve(&mut r, 3, d1, 5);
    let c2 = if one_coefficient {
        let mut coords = c1.coords().to_vec();
        let i = r.gen_range(0..coords.len());
        let j = r.gen_range(0..=d1 as usize);
        coords[i].resize(d1 as usize + 1, q(0));
        coords[i][j] = coords[i][j].clone() + q(r.gen_range(1..=3));
        ParameterizedCurve::new(coords).map_err(|e| e.to_string())?
    } else {
        let d2 = r.gen_range(1..=4);
        random_curve(&mut r, 3, d2, 5)
    };
    if c1 == c2 {
        return Err("drew identical curves".into());
    }
    match match_via_projections(&c1, &c2, &pis, 1).map_err(|e| e.to_string())? {
        MatchOutcome::Distinguished(_) => {}
        MatchOutcome::Match => return Err("distinct curves matched under every projection".into()),
    }
    let same = rescale_parameter(&c1, &q(r.gen_range(2..=3)));
    match match_via_projections(&c1, &same, &pis, 1).map_err(|e| e.to_string())? {
        MatchOutcome::Match => Ok(()),
        MatchOutcome::Distinguished(nu) => Err(format!("reparameterized copy distinguished at {nu}")),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn nondegeneracy_trial(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let big_m = r.gen_range(3..=6usize);
    let mut pool: Vec<u64> = (1..=40).collect();
    pool.shuffle(&mut r);
    let betas = &pool[..big_m + 2];
    let pis = build_projections(big_m, betas.len(), betas).map_err(|e| e.to_string())?;
    for idx in combinations(pis.len(), big_m) {
        let chosen: Vec<&LinearProjection<Rational>> = idx.iter().map(|&i| &pis[i]).collect();
        let det = nondegeneracy_determinant(&chosen).map_err(|e| e.to_string())?;
        let nodes: Vec<i64> = idx.iter().map(|&i| betas[i] as i64).collect();
        let mut oracle = nodes.iter().fold(q(1), |acc, &b| acc * q(b));
        for j in 0..nodes.len() {
            for i in 0..j {
                oracle = oracle * q(nodes[j] - nodes[i]);
            }
        }
        if det.is_zero() || det != oracle {
            return Err(format!("M = {big_m}, nodes {nodes:?}: determinant {det}, expected {oracle}"));
        }
    }
    Ok(())
}

/// `(l, delta)` pair visited by trial `i`.
pub fn degree_law_case(i: usize) -> (u32, u32) {
    const CASES: [(u32, u32); 6] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)];
    CASES[i % CASES.len()]
}

fn degree_law_trial(seed: u64, i: usize) -> Result<(), String> {
    let (l, delta) = degree_law_case(i);
    let mut r = rng(seed);
    let m = r.gen_range(2..=3usize);
    let c = random_curve(&mut r, m, delta, 9);
    let big_m = monomials(m + 1, l).len() - 1;
    let beta = r.gen_range(1..=6u64);
    let pi = &build_projections(big_m, 1, &[beta]).map_err(|e| e.to_string())?[0];
    let img = project_curve_to_plane_chow(&c, l, pi, None).map_err(|e| format!("l = {l}, delta = {delta}: {e}"))?;
    if img.recovered_degree == l * delta {
        Ok(())
    } else {
        Err(format!(
            "l = {l}, delta = {delta}, P^{m}, node {beta}: recovered degree {} (multiplicity {:?})",
            img.recovered_degree, img.multiplicity
        ))
    }
}

fn image_dimension_trial(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let conic = plane_conic();
    let two = BigUint::from(2u32);
    let th = clemens_threshold(&two, &two, &BigUint::one()).map_err(|e| e.to_string())?;
    let lowest = th.threshold.ceil().to_integer().to_u32().unwrap_or(1).max(1);
    let l = r.gen_range(lowest..=lowest.max(3));
    let f: Vec<Polynomial> = (0..3).map(|_| random_form(&mut r, 3, l, 9)).collect();
    match image_dimension_check([&f[0], &f[1], &f[2]], &conic, 400).map_err(|e| e.to_string())? {
        ImageDimension::Curve { recovered_degree, .. } if recovered_degree == 2 * l => Ok(()),
        other => Err(format!("l = {l}: {other:?}")),
    }
}

/// Dense multihomogeneous form with small random coefficients.
fn random_multiform<R: Rng>(r: &mut R, k: usize, degrees: &[u32]) -> Polynomial {
    let mut exps: Vec<Vec<u32>> = vec![Vec::new()];
    for &d in degrees {
        let block = monomials(k + 1, d);
        exps = exps.iter().flat_map(|p| block.iter().map(move |b| [p.clone(), b.clone()].concat())).collect();
    }
    let terms = exps.into_iter().map(|e| (e, small_rational(r, 9))).collect();
    Polynomial::from_terms_multi(vec![k + 1; degrees.len()], degrees.to_vec(), terms).expect("exponents match the blocks")
}

fn nonzero_point<R: Rng>(r: &mut R, k: usize) -> Point {
    let coords = (0..=k)
        .map(|_| loop {
            let v = small_integer(r, 7);
            if !v.is_zero() {
                break v;
            }
        })
        .collect();
    ProjectivePoint::new(coords).expect("nonzero")
}

/// With `fixed`, the determinant form `X0 Y1 - X1 Y0` on `P^1 x P^1` with a
/// random zero pair; otherwise a random multidegree with `r <= 3`,
/// `d_i <= 3`, adjusted to vanish at a random tuple.
fn segre_trial(seed: u64, fixed: bool) -> Result<(), String> {
    let mut r = rng(seed);
    let (f, k, pts) = if fixed {
        let f = Polynomial::from_terms_multi(vec![2, 2], vec![1, 1], vec![(vec![1, 0, 0, 1], q(1)), (vec![0, 1, 1, 0], q(-1))])
            .map_err(|e| e.to_string())?;
        let p = nonzero_point(&mut r, 1);
        let lambda = loop {
            let v = small_rational(&mut r, 9);
            if !v.is_zero() {
                break v;
            }
        };
        let p2 = p.scaled(&lambda).map_err(|e| e.to_string())?;
        (f, 1, vec![p, p2])
    } else {
        let factors = r.gen_range(1..=3usize);
        let k = r.gen_range(1..=2usize);
        let mut degrees: Vec<u32> = (0..factors).map(|_| r.gen_range(0..=3)).collect();
        if degrees.iter().all(|&d| d == 0) {
            degrees[0] = 1;
        }
        let f = random_multiform(&mut r, k, &degrees);
        let pts: Vec<Point> = (0..factors).map(|_| nonzero_point(&mut r, k)).collect();
        let x: Vec<Rational> = pts.iter().flat_map(|p| p.coords().to_vec()).collect();
        let (e0, _) = f.terms().next().ok_or("empty form")?;
        let mono = Polynomial::from_terms_multi(f.blocks().to_vec(), f.degrees().to_vec(), vec![(e0.clone(), q(1))])
            .map_err(|e| e.to_string())?;
        let shift = f.eval(&x) / mono.eval(&x);
        let f = f.add(&mono.scale(&-shift)).map_err(|e| e.to_string())?;
        (f, k, pts)
    };
    let r_factors = pts.len();
    let x: Vec<Rational> = pts.iter().flat_map(|p| p.coords().to_vec()).collect();
    if !f.eval(&x).is_zero() {
        return Err("constructed tuple is not a zero".into());
    }
    let push = segre_pushforward_equations(&f, k, r_factors).map_err(|e| e.to_string())?;
    let bound = (r_factors as u32).max(f.total_degree());
    if push.max_degree() > bound || push.degree_bound != bound {
        return Err(format!("degree {} exceeds max(r, sum d) = {bound}", push.max_degree()));
    }
    if fixed && push.all().any(|g| g.total_degree() != 2) {
        return Err("bidegree (1, 1) form emitted an equation of degree other than 2".into());
    }
    let z = segre_embed(&pts);
    if let Some(g) = push.all().find(|g| !g.eval_point(&z).is_zero()) {
        return Err(format!("equation {g} does not vanish on the embedded zero"));
    }
    // a tuple off the zero set must violate some substituted equation
    let off: Vec<Point> = (0..r_factors).map(|_| nonzero_point(&mut r, k)).collect();
    let xo: Vec<Rational> = off.iter().flat_map(|p| p.coords().to_vec()).collect();
    if !f.eval(&xo).is_zero() {
        let zo = segre_embed(&off);
        if push.all().all(|g| g.eval_point(&zo).is_zero()) {
            return Err("every equation vanishes at an embedded non-zero".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![q(2), q(1), q(0)], vec![q(0), q(1), q(3)], vec![q(1), q(0), q(1)]];
        let inv = inverse3(&m).unwrap();
        let v = vec![q(5), q(-2), q(7)];
        assert_eq!(mat_vec(&m, &mat_vec(&inv, &v)), v);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn drawn_points_lie_on_the_drawn_curve() {
        let mut r = rng(3);
        let (f, pts) = random_plane_curve_with_points(&mut r, 3).unwrap();
        assert_eq!(pts.len(), 10);
        assert!(pts.iter().all(|p| f.eval_point(p).is_zero()));
    }

    #[test]
    fn curves_in_a_common_hyperplane_need_a_second_chart() {
        // both curves satisfy X_2 = 5 X_0
        let c1 = ParameterizedCurve::from_ints(&[&[1, 1], &[-2, 4], &[5, 5], &[0, 2]]).unwrap();
        let c2 = ParameterizedCurve::from_ints(&[&[1, 1], &[-2, 4], &[5, 5], &[0, 3]]).unwrap();
        let single = build_projections(3, 12, &(1..=12).collect::<Vec<_>>()).unwrap();
        assert_eq!(match_via_projections(&c1, &c2, &single, 1).unwrap(), MatchOutcome::Match);
        let charts = matching_projections(3).unwrap();
        assert_eq!(match_via_projections(&c1, &c2, &charts, 1).unwrap(), MatchOutcome::Distinguished(13));
    }

    #[test]
    fn every_suite_passes_a_few_trials() {
        for s in SUITES {
            let rep = run_suite(s, 11, 6, &SuiteOptions::default()).unwrap();
            assert!(rep.ok(), "{s}: {:?}", rep.exceptions);
        }
        assert!(run_suite("nope", 0, 1, &SuiteOptions::default()).is_err());
    }
}
