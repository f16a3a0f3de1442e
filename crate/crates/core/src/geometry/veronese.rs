//! Degree-`l` Veronese embedding and its seeded perturbations.

use num_traits::Zero;

use super::poly::{eval_monomial, monomials, HomogeneousPolynomial};
use super::point::ProjectivePoint;
use super::random::{random_form, rng, small_integer};
use super::GeometryError;
use crate::scalar::Field;
use crate::Rational;

/// All degree-`l` monomials of the coordinates, in graded lexicographic
/// order. `P^m` lands in `P^{C(l+m, m) - 1}`.
pub fn veronese_embed<S: Field>(pt: &ProjectivePoint<S>, l: u32) -> ProjectivePoint<S> {
    let coords = monomials(pt.coords().len(), l).iter().map(|e| eval_monomial(e, pt.coords())).collect();
    ProjectivePoint::new(coords).expect("x_i^l is nonzero for a nonzero coordinate")
}

/// The monomials `Z^mu` as forms.
pub fn veronese_forms<S: Field>(vars: usize, l: u32) -> Vec<HomogeneousPolynomial<S>> {
    monomials(vars, l).into_iter().map(|e| HomogeneousPolynomial::monomial(vars, e)).collect()
}

/// Image of a point under a tuple of forms of equal degree.
pub fn apply_forms<S: Field>(
    forms: &[HomogeneousPolynomial<S>],
    pt: &ProjectivePoint<S>,
) -> Result<ProjectivePoint<S>, GeometryError> {
    ProjectivePoint::new(forms.iter().map(|f| f.eval_point(pt)).collect())
}

const CHECK_SAMPLES: usize = 20;
const PERTURBATION_BOUND: i64 = 9;

/// Fixed sample points of `P^m` used for the a-posteriori checks.
pub fn check_samples(m: usize) -> Vec<ProjectivePoint<Rational>> {
    let mut r = rng(0x5eed_0000 + m as u64);
    let mut out: Vec<ProjectivePoint<Rational>> = Vec::new();
    while out.len() < CHECK_SAMPLES {
        let coords: Vec<Rational> = (0..=m).map(|_| small_integer(&mut r, 5)).collect();
        if let Ok(p) = ProjectivePoint::new(coords) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Reject a tuple of forms when two are proportional or when two of the
/// fixed sample points collide or hit a common zero.
pub fn check_perturbation(forms: &[HomogeneousPolynomial<Rational>], m: usize) -> Result<(), GeometryError> {
    for (i, f) in forms.iter().enumerate() {
        if f.is_zero() || forms[..i].iter().any(|g| g.proportional(f)) {
            return Err(GeometryError::PerturbationRejected(format!("form {i} is zero or proportional to an earlier one")));
        }
    }
    let mut images = Vec::new();
    for p in check_samples(m) {
        let img = apply_forms(forms, &p)
            .map_err(|_| GeometryError::PerturbationRejected(format!("all forms vanish at {p}")))?;
        if images.contains(&img) {
            return Err(GeometryError::PerturbationRejected(format!("two sample points map to {img}")));
        }
        images.push(img);
    }
    Ok(())
}

/// `Z^mu + eps * (random degree-l form)` for every monomial `mu` of
/// `P^m`, with coefficients drawn from `seed`. Injectivity is only
/// spot-checked; on rejection the caller retries with another seed.
pub fn perturb_veronese(
    l: u32,
    m: usize,
    seed: u64,
    eps: &Rational,
) -> Result<Vec<HomogeneousPolynomial<Rational>>, GeometryError> {
    let mut r = rng(seed);
    let forms: Vec<HomogeneousPolynomial<Rational>> = veronese_forms(m + 1, l)
        .into_iter()
        .map(|f: HomogeneousPolynomial<Rational>| {
            let noise = random_form(&mut r, m + 1, l, PERTURBATION_BOUND);
            if eps.is_zero() {
                f
            } else {
                f.add(&noise.scale(eps)).expect("same shape")
            }
        })
        .collect();
    check_perturbation(&forms, m)?;
    Ok(forms)
}

/// Identity forms `x_0, ..., x_m`.
pub fn identity_forms(m: usize) -> Vec<HomogeneousPolynomial<Rational>> {
    veronese_forms(m + 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point;

    fn pt(c: &[i64]) -> Point {
        Point::from_ints(c).unwrap()
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(veronese_embed(&pt(&[1, 1, 1]), 2), pt(&[1, 1, 1, 1, 1, 1]));
        assert_eq!(veronese_embed(&pt(&[1, 0]), 3), pt(&[1, 0, 0, 0]));
        assert_eq!(veronese_embed(&pt(&[1, 2]), 2).coords(), pt(&[1, 2, 4]).coords());
        assert_eq!(veronese_embed(&pt(&[1, 2, 3]), 2).dim(), 5);
    }

    #[test]
    fn embedding_commutes_with_scaling() {
        let p = pt(&[2, -1, 3]);
        let q = p.scaled(&Rational::from_integer(5.into())).unwrap();
        assert_eq!(veronese_embed(&p, 3), veronese_embed(&q, 3));
    }

    #[test]
    fn zero_perturbation_is_exact_veronese() {
        let forms = perturb_veronese(2, 2, 7, &Rational::zero()).unwrap();
        assert_eq!(forms, veronese_forms::<Rational>(3, 2));
    }

    #[test]
    fn small_perturbation_separates_samples() {
        let eps = Rational::new(1.into(), 1000.into());
        let forms = perturb_veronese(2, 2, 42, &eps).unwrap();
        assert_eq!(forms.len(), 6);
        let images: Vec<Point> = check_samples(2).iter().map(|p| apply_forms(&forms, p).unwrap()).collect();
        for i in 0..images.len() {
            for j in 0..i {
                assert_ne!(images[i], images[j]);
            }
        }
        // perturbed, not exact
        assert_ne!(forms, veronese_forms::<Rational>(3, 2));
    }

    #[test]
    fn repeated_form_is_rejected() {
        let mut forms = veronese_forms::<Rational>(3, 2);
        forms[5] = forms[0].clone();
        assert!(matches!(check_perturbation(&forms, 2), Err(GeometryError::PerturbationRejected(_))));
    }

    #[test]
    fn identity_forms_are_coordinates() {
        let forms = identity_forms(2);
        let p = pt(&[3, 4, 5]);
        assert_eq!(apply_forms(&forms, &p).unwrap().coords(), p.coords());
    }
}
