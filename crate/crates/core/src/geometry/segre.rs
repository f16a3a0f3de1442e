//! Segre embedding of products of projective spaces and the transfer of
//! multihomogeneous equations to its image.

use std::collections::BTreeSet;

use serde::Serialize;

use super::point::ProjectivePoint;
use super::poly::HomogeneousPolynomial;
use super::GeometryError;
use crate::scalar::Field;
use crate::Rational;

/// Multi-indices `(i_1, ..., i_r)` in row-major order (first index most
/// significant). Coordinate `Z_I` of the Segre image sits at position
/// `index_of(I)`.
pub fn segre_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

fn index_of(idx: &[usize], size: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * size + i)
}

/// `Z_{i_1..i_r} = X^(1)_{i_1} * ... * X^(r)_{i_r}` in row-major order.
pub fn segre_embed<S: Field>(pts: &[ProjectivePoint<S>]) -> ProjectivePoint<S> {
    let sizes: Vec<usize> = pts.iter().map(|p| p.coords().len()).collect();
    let coords = segre_indices(&sizes)
        .iter()
        .map(|idx| idx.iter().zip(pts).fold(S::one(), |acc, (&i, p)| acc * &p.coords()[i]))
        .collect();
    ProjectivePoint::new(coords).expect("a product of nonzero coordinates is nonzero")
}

/// Equations on `P^{(k+1)^r - 1}` cutting out the Segre image of the zero
/// set of a multihomogeneous form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegrePushforward {
    /// `F_I` for every multi-index `I`, of degree `d_1 + ... + d_r`.
    pub substituted: Vec<HomogeneousPolynomial<Rational>>,
    /// Quadrics `Z_I Z_J - Z_K Z_L` with `{I_j, J_j} = {K_j, L_j}` for
    /// every factor `j`.
    pub relations: Vec<HomogeneousPolynomial<Rational>>,
    /// `max{r, d_1 + ... + d_r}`.
    pub degree_bound: u32,
}

impl SegrePushforward {
    pub fn all(&self) -> impl Iterator<Item = &HomogeneousPolynomial<Rational>> {
        self.substituted.iter().chain(&self.relations)
    }

    pub fn max_degree(&self) -> u32 {
        self.all().map(HomogeneousPolynomial::total_degree).max().unwrap_or(0)
    }
}

/// `F_I` replaces `X^(j)_m` by `Z_{I with j-th entry set to m}`.
pub fn segre_pushforward_equations(
    f: &HomogeneousPolynomial<Rational>,
    k: usize,
    r: usize,
) -> Result<SegrePushforward, GeometryError> {
    if r == 0 || f.blocks() != vec![k + 1; r].as_slice() {
        return Err(GeometryError::ShapeMismatch(format!(
            "form has blocks {:?}; expected {r} blocks of {} variables",
            f.blocks(),
            k + 1
        )));
    }
    let size = k + 1;
    let indices = segre_indices(&vec![size; r]);
    let n = indices.len();
    let total = f.total_degree();

    let mut substituted = Vec::with_capacity(n);
    for base in &indices {
        let mut g = HomogeneousPolynomial::zero(n, total);
        for (exp, c) in f.terms() {
            let mut z = vec![0u32; n];
            for (j, block) in exp.chunks(size).enumerate() {
                for (m, &e) in block.iter().enumerate() {
                    if e > 0 {
                        let mut idx = base.clone();
                        idx[j] = m;
                        z[index_of(&idx, size)] += e;
                    }
                }
            }
            g.add_term(z, c.clone())?;
        }
        substituted.push(g);
    }

    let mut binomials = BTreeSet::new();
    for (a, ia) in indices.iter().enumerate() {
        for ib in &indices[a + 1..] {
            for mask in 1u32..(1 << r) {
                let (mut ic, mut id) = (ia.clone(), ib.clone());
                for j in 0..r {
                    if mask >> j & 1 == 1 {
                        std::mem::swap(&mut ic[j], &mut id[j]);
                    }
                }
                let lhs = sorted_pair(index_of(ia, size), index_of(ib, size));
                let rhs = sorted_pair(index_of(&ic, size), index_of(&id, size));
                if lhs != rhs {
                    binomials.insert(if lhs < rhs { (lhs, rhs) } else { (rhs, lhs) });
                }
            }
        }
    }
    let one = Rational::from_integer(1.into());
    let relations = binomials
        .into_iter()
        .map(|(lhs, rhs)| {
            let quad = |(a, b): (usize, usize)| {
                let mut e = vec![0u32; n];
                e[a] += 1;
                e[b] += 1;
                e
            };
            HomogeneousPolynomial::from_terms(n, 2, vec![(quad(lhs), one.clone()), (quad(rhs), -one.clone())])
                .expect("quadrics have degree 2")
        })
        .collect();

    let out = SegrePushforward { substituted, relations, degree_bound: (r as u32).max(total) };
    debug_assert!(out.max_degree() <= out.degree_bound);
    Ok(out)
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}
