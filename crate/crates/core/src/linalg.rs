//! Dense linear algebra over a [`Scalar`].
//!
//! Floating backends use row-pivoted Gaussian elimination with the largest
//! available pivot; the rational backend uses the same routines (where any
//! nonzero pivot is exact) plus Bareiss fraction-free elimination for ranks
//! and determinants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn max_abs<S: Scalar>(m: &[Vec<S>]) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .map(|v| v.to_f64_lossy().abs())
        .fold(0.0, f64::max)
}

fn pick_pivot<S: Scalar>(a: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (row, values) in a.iter().enumerate().skip(from) {
        let v = values[col].abs();
        if v.is_zero() {
            continue;
        }
        if S::EXACT {
            // Any nonzero pivot is exact; the first keeps numbers small.
            return Some(row);
        }
        match &best {
            Some((_, b)) if !(v > *b) => {}
            _ => best = Some((row, v)),
        }
    }
    best.map(|(row, _)| row)
}

/// Solves `a x = b` for square `a`.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::SingularSystem(format!("shape mismatch ({n} rows)")));
    }
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = pick_pivot(&m, col, col)
            .ok_or_else(|| Error::SingularSystem(format!("no pivot in column {col}")))?;
        m.swap(col, p);
        let pivot = m[col][col].clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone() / pivot.clone();
            for k in col..=n {
                let t = factor.clone() * m[col][k].clone();
                m[row][k] = m[row][k].clone() - t;
            }
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n].clone();
        for k in row + 1..n {
            acc = acc - m[row][k].clone() * x[k].clone();
        }
        x[row] = acc / m[row][row].clone();
    }
    if !S::EXACT && x.iter().any(|v| !v.to_f64_lossy().is_finite()) {
        return Err(Error::SingularSystem("non-finite solution".into()));
    }
    Ok(x)
}

/// Determinant by row-pivoted elimination.
pub fn det_by_elimination<S: Scalar>(a: &[Vec<S>]) -> S {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let Some(p) = pick_pivot(&m, col, col) else {
            return S::zero();
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        let pivot = m[col][col].clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone() / pivot.clone();
            for k in col..n {
                let t = factor.clone() * m[col][k].clone();
                m[row][k] = m[row][k].clone() - t;
            }
        }
        det = det * pivot;
    }
    det
}

/// Rank by elimination with complete pivoting; pivots below
/// `rel_tol * max|entry|` count as zero.
pub fn rank_by_elimination<S: Scalar>(a: &[Vec<S>], rel_tol: f64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let threshold = rel_tol * max_abs(a);
    let mut m = a.to_vec();
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0_f64);
        for (i, row) in m.iter().enumerate().skip(step) {
            for (j, v) in row.iter().enumerate().skip(step) {
                let mag = v.to_f64_lossy().abs();
                if mag > best.2 {
                    best = (i, j, mag);
                }
            }
        }
        if !(best.2 > threshold) || best.2 == 0.0 {
            break;
        }
        m.swap(step, best.0);
        for row in m.iter_mut() {
            row.swap(step, best.1);
        }
        let pivot = m[step][step].clone();
        for i in step + 1..rows {
            let factor = m[i][step].clone() / pivot.clone();
            for j in step..cols {
                let t = factor.clone() * m[step][j].clone();
                m[i][j] = m[i][j].clone() - t;
            }
        }
        rank += 1;
    }
    rank
}

/// Clears denominators row by row; returns the integer rows and the product
/// of the row multipliers.
fn integer_rows(a: &[Vec<BigRational>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = a
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            scale *= &lcm;
            row.iter().map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer()).collect()
        })
        .collect();
    (rows, scale)
}

/// Bareiss elimination in place. Returns the rank, the sign of the row/column
/// permutation and the last nonzero leading pivot.
fn bareiss(m: &mut [Vec<BigInt>]) -> (usize, bool, BigInt) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut prev = BigInt::one();
    let mut negate = false;
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let found = (step..cols).find_map(|j| (step..rows).find(|&i| !m[i][j].is_zero()).map(|i| (i, j)));
        let Some((pi, pj)) = found else { break };
        if pi != step {
            m.swap(step, pi);
            negate = !negate;
        }
        if pj != step {
            for row in m.iter_mut() {
                row.swap(step, pj);
            }
            negate = !negate;
        }
        for i in step + 1..rows {
            for j in step + 1..cols {
                let v = &m[step][step] * &m[i][j] - &m[i][step] * &m[step][j];
                m[i][j] = v / &prev;
            }
            m[i][step] = BigInt::zero();
        }
        prev = m[step][step].clone();
        rank += 1;
    }
    (rank, negate, prev)
}

/// Exact rank via fraction-free elimination.
pub fn bareiss_rank(a: &[Vec<BigRational>]) -> usize {
    let (mut m, _) = integer_rows(a);
    bareiss(&mut m).0
}

/// Exact determinant via fraction-free elimination.
pub fn bareiss_det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    if n == 0 {
        return BigRational::one();
    }
    let (mut m, scale) = integer_rows(a);
    let (rank, negate, last) = bareiss(&mut m);
    if rank < n {
        return BigRational::zero();
    }
    let det = BigRational::new(last, scale);
    if negate {
        -det
    } else {
        det
    }
}

/// Removes one row and one column.
pub fn minor<S: Clone>(a: &[Vec<S>], row: usize, col: usize) -> Vec<Vec<S>> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| v.clone()).collect())
        .collect()
}

pub fn transpose<S: Clone>(a: &[Vec<S>]) -> Vec<Vec<S>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Solves an upper-triangular system by back substitution.
pub fn solve_upper<S: Scalar>(u: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = b.len();
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        if u[i][i].is_zero() {
            return Err(Error::SingularTriangular(i));
        }
        let mut acc = b[i].clone();
        for k in i + 1..n {
            acc = acc - u[i][k].clone() * x[k].clone();
        }
        x[i] = acc / u[i][i].clone();
    }
    Ok(x)
}

/// Solves a lower-triangular system by forward substitution.
pub fn solve_lower<S: Scalar>(l: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = b.len();
    let mut x = vec![S::zero(); n];
    for i in 0..n {
        if l[i][i].is_zero() {
            return Err(Error::SingularTriangular(i));
        }
        let mut acc = b[i].clone();
        for k in 0..i {
            acc = acc - l[i][k].clone() * x[k].clone();
        }
        x[i] = acc / l[i][i].clone();
    }
    Ok(x)
}

/// Infinity norm (maximum absolute row sum).
pub fn norm_inf<S: Scalar>(a: &[Vec<S>]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|v| v.abs().to_f64_lossy()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn hilbert(n: usize) -> Vec<Vec<BigRational>> {
        (0..n).map(|i| (0..n).map(|j| ratio(1, (i + j + 1) as i64)).collect()).collect()
    }

    #[test]
    fn bareiss_matches_known_hilbert_determinant() {
        // det H_3 = 1/2160
        assert_eq!(bareiss_det(&hilbert(3)), ratio(1, 2160));
        assert_eq!(det_by_elimination(&hilbert(3)), ratio(1, 2160));
        assert_eq!(bareiss_rank(&hilbert(6)), 6);
    }

    #[test]
    fn rank_detects_duplicate_rows() {
        let mut m = hilbert(3);
        m[2] = m[1].clone();
        assert_eq!(bareiss_rank(&m), 2);
        assert_eq!(bareiss_det(&m), BigRational::zero());
        let f: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(f64::from_rational).collect()).collect();
        assert_eq!(rank_by_elimination(&f, 1e-10), 2);
    }

    #[test]
    fn permuted_determinant_sign() {
        let m = vec![vec![ratio(0, 1), ratio(1, 1)], vec![ratio(1, 1), ratio(0, 1)]];
        assert_eq!(bareiss_det(&m), ratio(-1, 1));
        assert_eq!(det_by_elimination(&m), ratio(-1, 1));
    }

    #[test]
    fn solves_exactly() {
        let a = hilbert(3);
        let x = vec![ratio(1, 1), ratio(-2, 1), ratio(3, 7)];
        let b: Vec<BigRational> =
            a.iter().map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
        assert_eq!(solve(&a, &b).unwrap(), x);
        assert!(solve(&[vec![ratio(0, 1)]], &[ratio(1, 1)]).is_err());
    }

    #[test]
    fn triangular_solvers() {
        let l = vec![vec![2.0, 0.0], vec![1.0, 4.0]];
        assert_eq!(solve_lower(&l, &[2.0, 9.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(solve_upper(&transpose(&l), &[4.0, 8.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(solve_lower(&[vec![0.0]], &[1.0]), Err(Error::SingularTriangular(0)));
    }
}
