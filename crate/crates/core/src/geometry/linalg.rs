//! Fraction-free (Bareiss) elimination, determinants and nullspaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{Field, Scalar};

/// Row echelon form with the column index of each pivot.
///
/// Every division is exact: entries stay equal to minors of the input, so
/// over the integers no fractions appear.
pub fn echelon<S: Scalar>(mut m: Vec<Vec<S>>) -> (Vec<Vec<S>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = S::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            let factor = m[i][c].clone();
            for j in c + 1..cols {
                let v = m[r][c].clone() * &m[i][j] - factor.clone() * &m[r][j];
                m[i][j] = v.exact_div(&prev);
            }
            m[i][c] = S::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank<S: Scalar>(m: Vec<Vec<S>>) -> usize {
    echelon(m).1.len()
}

/// Determinant of a square matrix.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut sign = S::one();
    let mut prev = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return S::zero();
        };
        if p != c {
            m.swap(c, p);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let v = m[c][c].clone() * &m[i][j] - m[i][c].clone() * &m[c][j];
                m[i][j] = v.exact_div(&prev);
            }
        }
        prev = m[c][c].clone();
    }
    sign * &prev
}

/// Basis of the right nullspace, one vector per free column.
pub fn nullspace<F: Field>(m: Vec<Vec<F>>, cols: usize) -> Vec<Vec<F>> {
    let (e, pivots) = echelon(m);
    back_substitute(&e, &pivots, cols)
}

fn back_substitute<F: Field>(e: &[Vec<F>], pivots: &[usize], cols: usize) -> Vec<Vec<F>> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); cols];
            x[f] = F::one();
            for (r, &p) in pivots.iter().enumerate().rev() {
                let mut acc = F::zero();
                for j in p + 1..cols {
                    if !x[j].is_zero() {
                        acc = acc + e[r][j].clone() * &x[j];
                    }
                }
                x[p] = -acc / &e[r][p];
            }
            x
        })
        .collect()
}

/// Scale a rational row to coprime integers.
pub fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Rational nullspace computed by integer elimination after clearing
/// denominators row by row.
pub fn rational_nullspace(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let ints: Vec<Vec<BigInt>> = m.iter().map(|r| integer_row(r)).collect();
    let (e, pivots) = echelon(ints);
    let e: Vec<Vec<BigRational>> =
        e.into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect();
    back_substitute(&e, &pivots, cols)
        .into_iter()
        .map(|v| integer_row(&v).into_iter().map(BigRational::from_integer).collect())
        .collect()
}

pub fn rational_rank(m: &[Vec<BigRational>]) -> usize {
    rank(m.iter().map(|r| integer_row(r)).collect())
}

pub fn rational_determinant(m: &[Vec<BigRational>]) -> BigRational {
    let lcms: Vec<BigInt> = m.iter().map(|r| r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))).collect();
    let ints: Vec<Vec<BigInt>> = m
        .iter()
        .zip(&lcms)
        .map(|(r, l)| r.iter().map(|x| x.numer() * (l / x.denom())).collect())
        .collect();
    let scale = lcms.iter().fold(BigInt::one(), |acc, l| acc * l);
    BigRational::new(determinant(ints), scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qm(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    fn apply(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
        m.iter().map(|r| r.iter().zip(v).fold(q(0), |a, (x, y)| a + x * y)).collect()
    }

    #[test]
    fn determinant_of_vandermonde() {
        // det of (b, b^2, b^3) for b = 1, 2, 3 is 1*2*3 * (2-1)(3-1)(3-2)
        let m: Vec<Vec<BigInt>> =
            (1..=3).map(|b: i64| (1..=3).map(|a| BigInt::from(b.pow(a))).collect()).collect();
        assert_eq!(determinant(m), BigInt::from(12));
    }

    #[test]
    fn determinant_with_pivoting_and_sign() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(determinant(m), -1.0);
        assert_eq!(rational_determinant(&qm(&[&[0, 2, 1], &[3, 1, 0], &[1, 1, 1]])), q(-4));
        let half = BigRational::new(1.into(), 2.into());
        let m = vec![vec![half.clone(), q(1)], vec![q(1), half]];
        assert_eq!(rational_determinant(&m), BigRational::new((-3).into(), 4.into()));
    }

    #[test]
    fn rank_deficient_nullspace() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = rational_nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(apply(&m, v).iter().all(Zero::is_zero));
        }
        assert_eq!(rational_rank(&m), 1);
    }

    #[test]
    fn skipped_column_stays_exact() {
        // second column has no pivot; later divisions must still be exact
        let m: Vec<Vec<BigInt>> = [[2, 4, 1, 3], [4, 8, 5, 1], [6, 12, 2, 7]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let (_, pivots) = echelon(m);
        assert_eq!(pivots, vec![0, 2, 3]);
    }

    #[test]
    fn generic_over_floats() {
        let ns = nullspace(vec![vec![1.0, 1.0, -1.0]], 3);
        assert_eq!(ns.len(), 2);
        assert_eq!(ns[0], vec![-1.0, 1.0, 0.0]);
    }
}
