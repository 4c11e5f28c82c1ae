//! The banded lower Hessenberg matrix `L_n` of the recurrence and its
//! eigenproblem.
//!
//! Row `k` of `L_n` (zero-based) holds `a_{k,j}` in column `k - j` and a one in
//! column `k + 1`, so that `L_n (P_0, .., P_{n-1})ᵀ = x (P_0, .., P_{n-1})ᵀ - P_n e_n`.
//! Its eigenvalues are the zeros of `P_n`; right eigenvectors are vectors of
//! `P_k` values and left eigenvectors are rows of `Q`-values.

use std::collections::HashMap;

use num_complex::{Complex, Complex64};
use num_traits::{Signed, Zero};
use serde_json::Value;

use crate::cdk::{first_nonzero, CDContext};
use crate::domain::{cnorm, to_c64, ComplexNode, NodeDomain, Point};
use crate::error::{Error, Result};
use crate::mop::{eval_recurrence_in, Initials, RecurrenceTable};
use crate::poly::Polynomial;
use crate::scalar::{DoubleDouble as DD, Scalar};

/// Relative eigen-equation residual bound.
pub const TAU_EIG: f64 = 1e-10;
/// Minimum node gap, relative to the spectral diameter.
pub const TAU_SEP: f64 = 1e-8;
/// Largest imaginary part, relative to the spectral diameter, of a node
/// still treated as real.
pub const TAU_IMAG: f64 = 1e-10;
/// Newton steps applied to each QR eigenvalue.
/// Zero threshold for determinants evaluated in double-double, relative to
/// their Hadamard bound.
pub const TAU_ZERO_DD: f64 = 1e-24;
pub const NEWTON_STEPS: usize = 5;
/// Deflation threshold of the QR iteration, a few units in the last place of
/// double-double.
const QR_EPS: f64 = 1e-30;

/// `L_n`, stored by its band rows (the first `n` rows of the recurrence table).
#[derive(Clone, Debug, PartialEq)]
pub struct HessenbergMatrix<S> {
    r: usize,
    rows: Vec<Vec<S>>,
}

/// `L_n` from rows `0..n-1` of the table.
pub fn build_hessenberg<S: Scalar>(table: &RecurrenceTable<S>, n: usize) -> Result<HessenbergMatrix<S>> {
    if n == 0 {
        return Err(Error::InvalidSystem("L_n needs n >= 1".into()));
    }
    table.require_rows(n)?;
    Ok(HessenbergMatrix { r: table.r(), rows: table.rows()[..n].to_vec() })
}

impl<S: Scalar> HessenbergMatrix<S> {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Entry `(i, j)`, zero-based.
    pub fn get(&self, i: usize, j: usize) -> S {
        if j == i + 1 {
            S::one()
        } else if j <= i && i - j < self.rows[i].len() {
            self.rows[i][i - j].clone()
        } else {
            S::zero()
        }
    }

    pub fn dense(&self) -> Vec<Vec<S>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let band: f64 = row.iter().map(|a| a.to_f64_lossy().abs()).sum();
                band + if i + 1 < self.n() { 1.0 } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    /// `L v` on a domain.
    pub fn apply_in<D: NodeDomain<S>>(&self, dom: &D, v: &[D::Elem]) -> Vec<D::Elem> {
        let n = self.n();
        (0..n)
            .map(|k| {
                let mut acc = if k + 1 < n { v[k + 1].clone() } else { dom.zero() };
                for (j, a) in self.rows[k].iter().enumerate() {
                    acc = dom.add(&acc, &dom.scale(&v[k - j], a));
                }
                acc
            })
            .collect()
    }

    /// `uᵀ L` on a domain.
    pub fn apply_left_in<D: NodeDomain<S>>(&self, dom: &D, u: &[D::Elem]) -> Vec<D::Elem> {
        let n = self.n();
        (0..n)
            .map(|c| {
                let mut acc = if c > 0 { u[c - 1].clone() } else { dom.zero() };
                for j in 0..=self.r {
                    if let Some(a) = self.rows.get(c + j).and_then(|row| row.get(j)) {
                        acc = dom.add(&acc, &dom.scale(&u[c + j], a));
                    }
                }
                acc
            })
            .collect()
    }

    /// `det(tI - L_n)` by cofactor expansion along the rows, memoized on the
    /// set of columns already used. The band keeps the number of states small,
    /// but this is meant as a check for modest `n` (at most 63).
    pub fn characteristic_polynomial(&self) -> Result<Polynomial<S>> {
        let n = self.n();
        if n > 63 {
            return Err(Error::InvalidSystem("cofactor expansion supports n <= 63".into()));
        }
        let mut memo = HashMap::new();
        Ok(self.cofactor(0, 0, &mut memo))
    }

    fn char_entry(&self, i: usize, j: usize) -> Polynomial<S> {
        let a = self.get(i, j);
        if i == j {
            Polynomial::new(vec![-a, S::one()])
        } else {
            Polynomial::constant(-a)
        }
    }

    fn cofactor(&self, row: usize, used: u64, memo: &mut HashMap<u64, Polynomial<S>>) -> Polynomial<S> {
        let n = self.n();
        if row == n {
            return Polynomial::one();
        }
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let lo = row.saturating_sub(self.r);
        let hi = (row + 1).min(n - 1);
        let mut total = Polynomial::zero();
        for col in lo..=hi {
            if used & (1 << col) != 0 {
                continue;
            }
            let entry = self.char_entry(row, col);
            if entry.is_zero() {
                continue;
            }
            let free_before = (0..col).filter(|c| used & (1 << c) == 0).count();
            let minor = self.cofactor(row + 1, used | (1 << col), memo);
            let term = &entry * &minor;
            total = if free_before % 2 == 0 { &total + &term } else { &total - &term };
        }
        memo.insert(used, total.clone());
        total
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.dense().iter().map(|row| Value::Array(row.iter().map(|a| a.to_json()).collect())).collect())
    }
}

/// Eigenvalues of `L_n`, sorted by real part, then imaginary part.
#[derive(Clone, Debug)]
pub struct EigenNodes<S> {
    /// Newton-polished values in the backend's arithmetic.
    pub values: Vec<Complex<S>>,
    /// The same eigenvalues as returned by the QR iteration.
    pub qr_values: Vec<Complex64>,
    /// Whether each node is separated from all others by more than `τ_sep`.
    pub simple: Vec<bool>,
    pub min_gap: f64,
    pub diameter: f64,
    /// All imaginary parts are negligible (and have been set to zero).
    pub real: bool,
}

impl<S: Scalar> EigenNodes<S> {
    pub fn all_simple(&self) -> bool {
        self.simple.iter().all(|&s| s)
    }

    pub fn as_c64(&self) -> Vec<Complex64> {
        self.values.iter().map(to_c64).collect()
    }

    /// Largest distance a node moved during polishing.
    pub fn polish_shift(&self) -> f64 {
        self.values.iter().zip(&self.qr_values).map(|(v, q)| (to_c64(v) - q).norm()).fold(0.0, f64::max)
    }
}

/// Zeros of `P_n` as eigenvalues of `L_n`: balancing, shifted QR on the
/// (upper Hessenberg) transpose, then at most [`NEWTON_STEPS`] Newton steps on
/// `P_n` using the recurrence in the backend's arithmetic.
pub fn eigen_nodes<S: Scalar>(l: &HessenbergMatrix<S>, table: &RecurrenceTable<S>) -> Result<EigenNodes<S>> {
    let n = l.n();
    let mut a: Vec<Vec<DD>> = (0..n).map(|i| (0..n).map(|j| l.get(j, i).to_dd()).collect()).collect();
    balance(&mut a);
    let qr_dd = hqr(a)?;
    let qr: Vec<Complex64> = qr_dd.iter().map(to_c64).collect();
    let mut values: Vec<Complex<S>> =
        qr_dd.iter().map(|z| polish(table, n, Complex::new(from_dd(z.re), from_dd(z.im)))).collect::<Result<_>>()?;

    let approx: Vec<Complex64> = values.iter().map(to_c64).collect();
    let mut diameter = 0.0_f64;
    for (i, x) in approx.iter().enumerate() {
        for y in &approx[i + 1..] {
            diameter = diameter.max((x - y).norm());
        }
    }
    let scale = if n == 1 { approx[0].norm() } else { diameter };
    let real = approx.iter().all(|z| z.im.abs() <= TAU_IMAG * scale);
    if real {
        for v in &mut values {
            v.im = S::zero();
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (x, y) = (to_c64(&values[i]), to_c64(&values[j]));
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    let values: Vec<Complex<S>> = order.iter().map(|&i| values[i].clone()).collect();
    let qr_values: Vec<Complex64> = order.iter().map(|&i| qr[i]).collect();

    let approx: Vec<Complex64> = values.iter().map(to_c64).collect();
    let mut min_gap = f64::INFINITY;
    let mut simple = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let gap = (approx[i] - approx[j]).norm();
                min_gap = min_gap.min(gap);
                if gap <= TAU_SEP * diameter {
                    simple[i] = false;
                }
            }
        }
    }
    Ok(EigenNodes { values, qr_values, simple, min_gap, diameter, real })
}

fn from_dd<S: Scalar>(x: DD) -> S {
    let part = |v: f64| S::from_f64(v).unwrap_or_else(S::zero);
    part(x.hi()) + part(x.lo())
}

/// Newton's method on `P_n`; stops as soon as a step fails to reduce `|P_n|`.
fn polish<S: Scalar>(table: &RecurrenceTable<S>, n: usize, x0: Complex<S>) -> Result<Complex<S>> {
    let eval = |x: &Complex<S>| -> Result<(Complex<S>, Complex<S>)> {
        let (p, dp) = eval_recurrence_in(table, n, &ComplexNode::new(x.clone(), 0.0))?;
        Ok((p[n].clone(), dp[n].clone()))
    };
    let mut x = x0;
    let (mut p, mut dp) = eval(&x)?;
    for _ in 0..NEWTON_STEPS {
        if cnorm(&p) == 0.0 || cnorm(&dp) == 0.0 {
            break;
        }
        let next = x.clone() - p.clone() / dp.clone();
        let (np, ndp) = eval(&next)?;
        if cnorm(&np) >= cnorm(&p) {
            break;
        }
        x = next;
        p = np;
        dp = ndp;
    }
    Ok(x)
}

/// Diagonal similarity by powers of two making row and column norms
/// comparable (Parlett–Reinsch). Exact in any binary arithmetic.
fn balance(a: &mut [Vec<DD>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    loop {
        let mut done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j][i].hi().abs();
                    r += a[i][j].hi().abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let (down, up) = (DD::from_f64(1.0 / f), DD::from_f64(f));
                for v in a[i].iter_mut() {
                    *v = *v * down;
                }
                for row in a.iter_mut() {
                    row[i] = row[i] * up;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn dd(x: f64) -> DD {
    DD::from_f64(x)
}

fn with_sign(v: DD, sign: DD) -> DD {
    if sign.is_negative() {
        -v.abs()
    } else {
        v.abs()
    }
}

/// Eigenvalues of a real upper Hessenberg matrix by the implicit double-shift
/// QR iteration (Francis), with exceptional shifts after 10 and 20 stalled
/// iterations. At most `40 n` iterations in total.
///
/// Runs in double-double: `L_n` is far from normal, and for the shipped
/// systems at `n = 30` double precision QR already misplaces nodes near the
/// ends of the support by more than their spacing.
fn hqr(mut a: Vec<Vec<DD>>) -> Result<Vec<Complex<DD>>> {
    let eps = dd(QR_EPS);
    let n = a.len();
    let max_sweeps = 40 * n;
    let zero = DD::zero();
    let mut w = vec![Complex::new(zero, zero); n];
    let mut anorm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + a[i][j].abs();
        }
    }
    let mut sweeps = 0;
    let mut nn = n as isize - 1;
    let mut t = zero;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s.is_zero() {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = zero;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                w[nu] = Complex::new(x + t, zero);
                nn -= 1;
            } else {
                let mut y = a[nu - 1][nu - 1];
                let mut ww = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nu - 1 {
                    let p = dd(0.5) * (y - x);
                    let q = p * p + ww;
                    let z = q.abs().sqrt();
                    x = x + t;
                    if !q.is_negative() {
                        let z = p + with_sign(z, p);
                        w[nu - 1] = Complex::new(x + z, zero);
                        w[nu] = Complex::new(if z.is_zero() { x + z } else { x - ww / z }, zero);
                    } else {
                        w[nu] = Complex::new(x + p, -z);
                        w[nu - 1] = w[nu].conj();
                    }
                    nn -= 2;
                } else {
                    sweeps += 1;
                    if sweeps > max_sweeps {
                        return Err(Error::QrNoConvergence { sweeps: max_sweeps });
                    }
                    if its == 10 || its == 20 {
                        t = t + x;
                        for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                            row[i] = row[i] - x;
                        }
                        let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = dd(0.75) * s;
                        y = x;
                        ww = dd(-0.4375) * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r);
                    let mut m = nu - 2;
                    loop {
                        let z = a[m][m];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - ww) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - rr - ss;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nu - 1 {
                        a[i + 2][i] = zero;
                        if i != m {
                            a[i + 2][i - 1] = zero;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = if k + 1 != nu { a[k + 2][k - 1] } else { zero };
                            x = p.abs() + q.abs() + r.abs();
                            if !x.is_zero() {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let s = with_sign((p * p + q * q + r * r).sqrt(), p);
                        if !s.is_zero() {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..nu + 1 {
                                let mut pp = a[k][j] + q * a[k + 1][j];
                                if k + 1 != nu {
                                    pp = pp + r * a[k + 2][j];
                                    a[k + 2][j] = a[k + 2][j] - pp * z;
                                }
                                a[k + 1][j] = a[k + 1][j] - pp * y;
                                a[k][j] = a[k][j] - pp * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for row in a.iter_mut().take(mmin + 1).skip(l) {
                                let mut pp = x * row[k] + y * row[k + 1];
                                if k + 1 != nu {
                                    pp = pp + z * row[k + 2];
                                    row[k + 2] = row[k + 2] - pp * r;
                                }
                                row[k + 1] = row[k + 1] - pp * q;
                                row[k] = row[k] - pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l as isize >= nn - 1 {
                break;
            }
        }
    }
    Ok(w)
}

/// `(P_0(x), .., P_{n-1}(x))` on a domain.
pub fn right_eigenvector_in<S: Scalar, D: NodeDomain<S>>(table: &RecurrenceTable<S>, n: usize, dom: &D) -> Result<Vec<D::Elem>> {
    let (mut p, _) = eval_recurrence_in(table, n, dom)?;
    p.truncate(n);
    Ok(p)
}

/// Right eigenvector at a node, with the eigen-equation residual checked.
pub fn right_eigenvector<S: Scalar>(table: &RecurrenceTable<S>, n: usize, x: &S) -> Result<Vec<S>> {
    let l = build_hessenberg(table, n)?;
    let dom = Point::new(x.clone());
    let v = right_eigenvector_in(table, n, &dom)?;
    let res = right_residual(&l, &dom, &v);
    let bound = TAU_EIG * l.norm_inf() * vector_norm(&dom, &v);
    if !within(res, bound, S::EXACT) {
        return Err(Error::ResidualTooLarge { residual: res, bound });
    }
    Ok(v)
}

pub(crate) fn vector_norm<S: Scalar, D: NodeDomain<S>>(dom: &D, v: &[D::Elem]) -> f64 {
    v.iter().map(|e| dom.magnitude(e)).fold(0.0, f64::max)
}

/// `‖L v - x v‖∞`; in exact domains any nonzero residue counts as at least
/// the smallest positive double.
fn right_residual<S: Scalar, D: NodeDomain<S>>(l: &HessenbergMatrix<S>, dom: &D, v: &[D::Elem]) -> f64 {
    let x = dom.variable();
    let lv = l.apply_in(dom, v);
    residual_norm(dom, lv.iter().zip(v).map(|(a, b)| dom.sub(a, &dom.mul(&x, b))))
}

fn left_residual<S: Scalar, D: NodeDomain<S>>(l: &HessenbergMatrix<S>, dom: &D, u: &[D::Elem]) -> f64 {
    let x = dom.variable();
    let ul = l.apply_left_in(dom, u);
    residual_norm(dom, ul.iter().zip(u).map(|(a, b)| dom.sub(a, &dom.mul(&x, b))))
}

fn residual_norm<S: Scalar, D: NodeDomain<S>>(dom: &D, entries: impl Iterator<Item = D::Elem>) -> f64 {
    entries
        .map(|e| {
            let m = dom.magnitude(&e);
            if S::EXACT && !dom.is_zero(&e, 0.0) {
                m.max(f64::MIN_POSITIVE)
            } else {
                m
            }
        })
        .fold(0.0, f64::max)
}

fn within(residual: f64, bound: f64, exact: bool) -> bool {
    if exact {
        residual == 0.0
    } else {
        residual <= bound
    }
}

/// How a left eigenvector was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeftRoute {
    /// From the `Q^{(i)}_{k,n}` determinants.
    Determinant,
    /// By back substitution in `uᵀ L = x uᵀ` from `u_n = 1`, used when the
    /// determinant route fails its residual check.
    Substitution,
}

/// Left and right eigenvectors for the points of one domain. On a residue
/// class one pair covers every root of its modulus.
#[derive(Clone, Debug)]
pub struct EigenPair<S: Scalar, D: NodeDomain<S>> {
    pub dom: D,
    /// `(P_0, .., P_{n-1})`.
    pub right: Vec<D::Elem>,
    /// Zero before position `k`, one at `k`.
    pub left: Vec<D::Elem>,
    /// One-based index of the first nonzero left component.
    pub k: usize,
    /// The Christoffel–Darboux index: smallest `i` with `P_{n-i} != 0`.
    pub i: usize,
    pub route: LeftRoute,
    pub right_residual: f64,
    pub left_residual: f64,
}

impl<S: Scalar, D: NodeDomain<S>> EigenPair<S, D> {
    pub fn value(&self) -> D::Elem {
        self.dom.variable()
    }

    /// `uᵀ v`.
    pub fn inner(&self) -> D::Elem {
        self.left.iter().zip(&self.right).fold(self.dom.zero(), |acc, (u, v)| self.dom.add(&acc, &self.dom.mul(u, v)))
    }
}

/// Eigenvector pairs at every point of `dom`, which must consist of zeros of
/// `P_n`. Left vectors come from `Q^{(i_ℓ)}_{k,n}` normalized at their first
/// nonzero entry; back substitution is the fallback when that vector fails
/// the residual bound `tol_eig · ‖L‖ · ‖u‖`.
pub fn eigen_pairs_in<S: Scalar, D: NodeDomain<S>>(
    ctx: &CDContext<S>,
    l: &HessenbergMatrix<S>,
    dom: &D,
    tol_eig: f64,
) -> Result<Vec<EigenPair<S, D>>> {
    let n = ctx.n();
    let norm_l = l.norm_inf();
    let values = ctx.values_in(dom)?;
    let right_all: Vec<D::Elem> = values.p[..n].to_vec();
    let mut pairs = Vec::new();
    for (sub, i) in values.cd_index_pieces() {
        let i = i.ok_or(Error::NoValidIndex)?;
        let q: Vec<D::Elem> = (1..=n).map(|k| sub.restrict(&values.q(i, k))).collect();
        let scales: Vec<f64> = (1..=n).map(|k| values.q_scale(i, k)).collect();
        for (piece, k) in first_nonzero(&sub, &q, &scales) {
            let right: Vec<D::Elem> = right_all.iter().map(|v| piece.restrict(v)).collect();
            let right_residual = right_residual(l, &piece, &right);
            let bound_r = tol_eig * norm_l * vector_norm(&piece, &right);
            if !within(right_residual, bound_r, S::EXACT) {
                return Err(Error::ResidualTooLarge { residual: right_residual, bound: bound_r });
            }
            let by_det = k.and_then(|k| {
                let u = normalize(&piece, &q, k)?;
                let res = left_residual(l, &piece, &u);
                within(res, tol_eig * norm_l * vector_norm(&piece, &u), S::EXACT).then_some((u, k, res))
            });
            match by_det {
                Some((left, k, left_residual)) => pairs.push(EigenPair {
                    dom: piece,
                    right,
                    left,
                    k: k + 1,
                    i,
                    route: LeftRoute::Determinant,
                    right_residual,
                    left_residual,
                }),
                None => {
                    log::debug!("left eigenvector by back substitution (n = {n})");
                    for (d, left, k, left_residual) in substitution_left(l, &piece, tol_eig)? {
                        let right = right.iter().map(|v| d.restrict(v)).collect();
                        pairs.push(EigenPair {
                            dom: d,
                            right,
                            left,
                            k,
                            i,
                            route: LeftRoute::Substitution,
                            right_residual,
                            left_residual,
                        });
                    }
                }
            }
        }
    }
    Ok(pairs)
}

/// `v / v[k]` with exact zeros before `k` and an exact one at `k`.
fn normalize<S: Scalar, D: NodeDomain<S>>(dom: &D, v: &[D::Elem], k: usize) -> Option<Vec<D::Elem>> {
    let inv = dom.inverse(&dom.restrict(&v[k]))?;
    Some(
        v.iter()
            .enumerate()
            .map(|(t, e)| match t.cmp(&k) {
                std::cmp::Ordering::Less => dom.zero(),
                std::cmp::Ordering::Equal => dom.one(),
                std::cmp::Ordering::Greater => dom.mul(&dom.restrict(e), &inv),
            })
            .collect(),
    )
}

/// Solves `uᵀ L = x uᵀ` column by column from the right, starting at
/// `u_n = 1`: `u_{c-1} = x u_c - Σ_j a_{c+j,j} u_{c+j}`.
fn substitution_left<S: Scalar, D: NodeDomain<S>>(
    l: &HessenbergMatrix<S>,
    dom: &D,
    tol_eig: f64,
) -> Result<Vec<(D, Vec<D::Elem>, usize, f64)>> {
    let n = l.n();
    let x = dom.variable();
    let mut u = vec![dom.zero(); n];
    u[n - 1] = dom.one();
    for c in (1..n).rev() {
        let mut acc = dom.mul(&x, &u[c]);
        for j in 0..=l.r() {
            if let Some(a) = l.rows.get(c + j).and_then(|row| row.get(j)) {
                acc = dom.sub(&acc, &dom.scale(&u[c + j], a));
            }
        }
        u[c - 1] = acc;
    }
    let size = vector_norm(dom, &u);
    let mut out = Vec::new();
    for (piece, k) in first_nonzero(dom, &u, &vec![size; n]) {
        let k = k.ok_or(Error::NoValidIndex)?;
        let v = normalize(&piece, &u, k).ok_or(Error::NoValidIndex)?;
        let res = left_residual(l, &piece, &v);
        let bound = tol_eig * l.norm_inf() * vector_norm(&piece, &v);
        if !within(res, bound, S::EXACT) {
            return Err(Error::ResidualTooLarge { residual: res, bound });
        }
        out.push((piece, v, k + 1, res));
    }
    Ok(out)
}

/// The left eigenvector at a single real node: `(u, k_ℓ, i_ℓ)`.
pub fn left_eigenvector<S: Scalar>(ctx: &CDContext<S>, x: &S) -> Result<(Vec<S>, usize, usize)> {
    let l = build_hessenberg(ctx.table(), ctx.n())?;
    let dom = Point::new(x.clone());
    let mut pairs = eigen_pairs_in(ctx, &l, &dom, TAU_EIG)?;
    let p = pairs.pop().ok_or(Error::NoValidIndex)?;
    Ok((p.left, p.k, p.i))
}

/// Largest `|u_aᵀ v_b| / (‖u_a‖ ‖v_b‖)` over pairs of distinct nodes. The
/// eigenvalues must be simple; the pairs are computed in double-double.
pub fn biorthogonality_gap(table: &RecurrenceTable<DD>, initials: &Initials<DD>, n: usize) -> Result<f64> {
    let ctx = CDContext::new(table.clone(), initials.clone(), n)?;
    let l = build_hessenberg(table, n)?;
    let nodes = eigen_nodes(&l, table)?;
    if !nodes.all_simple() {
        return Err(Error::NonSimpleZeros { n, gap: nodes.min_gap });
    }
    let mut pairs = Vec::with_capacity(n);
    for x in &nodes.values {
        let dom = ComplexNode::new(x.clone(), TAU_ZERO_DD);
        pairs.push(eigen_pairs_in(&ctx, &l, &dom, TAU_EIG)?.into_iter().next().ok_or(Error::NoValidIndex)?);
    }
    let mut worst = 0.0_f64;
    for (a, pa) in pairs.iter().enumerate() {
        let un = vector_norm(&pa.dom, &pa.left);
        for (b, pb) in pairs.iter().enumerate() {
            if a == b {
                continue;
            }
            let dot = pa.left.iter().zip(&pb.right).fold(Complex::new(DD::zero(), DD::zero()), |acc, (u, v)| acc + u.clone() * v.clone());
            worst = worst.max(cnorm(&dot) / (un * vector_norm(&pb.dom, &pb.right)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureSystem;
    use crate::mop::{recurrence_table, type2_polynomial, MopSequence};
    use crate::scalar::{ratio, DoubleDouble, Rational};
    use crate::domain::ResidueClass;

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    fn sys_a_table() -> RecurrenceTable<Rational> {
        MopSequence::<Rational>::longest(&MeasureSystem::sys_a(), 2).unwrap().0.table
    }

    #[test]
    fn sys_a_matrix_and_characteristic_polynomial() {
        let l = build_hessenberg(&sys_a_table(), 2).unwrap();
        assert_eq!(l.dense(), vec![vec![q(1, 2), q(1, 1)], vec![q(1, 12), q(1, 2)]]);
        assert_eq!(l.characteristic_polynomial().unwrap(), Polynomial::new(vec![q(1, 6), q(-1, 1), q(1, 1)]));
        let one = build_hessenberg(&sys_a_table(), 1).unwrap();
        assert_eq!(one.dense(), vec![vec![q(1, 2)]]);
    }

    #[test]
    fn characteristic_polynomial_matches_type_two() {
        for sys in [MeasureSystem::jacobi_pineiro(2), MeasureSystem::angelesco(3), MeasureSystem::monomial_family(1)] {
            let t = recurrence_table::<Rational>(&sys, 7).unwrap();
            for n in 1..=8 {
                let l = build_hessenberg(&t, n).unwrap();
                assert_eq!(l.characteristic_polynomial().unwrap(), type2_polynomial::<Rational>(&sys, n).unwrap());
            }
        }
    }

    #[test]
    fn sys_a_nodes() {
        let t = sys_a_table().map(f64::from_rational);
        let nodes = eigen_nodes(&build_hessenberg(&t, 2).unwrap(), &t).unwrap();
        let h = 0.5 / 3f64.sqrt();
        assert!(nodes.real && nodes.all_simple());
        let x = nodes.as_c64();
        assert!((x[0].re - (0.5 - h)).abs() < 1e-15 && (x[1].re - (0.5 + h)).abs() < 1e-15);
        let one = eigen_nodes(&build_hessenberg(&t, 1).unwrap(), &t).unwrap();
        assert_eq!(one.as_c64()[0].re, 0.5);
    }

    #[test]
    fn angelesco_nodes_straddle_zero() {
        let t = recurrence_table::<Rational>(&MeasureSystem::angelesco_pair(), 2).unwrap().map(f64::from_rational);
        let x = eigen_nodes(&build_hessenberg(&t, 2).unwrap(), &t).unwrap().as_c64();
        assert!(x[0].re > -1.0 && x[0].re < 0.0 && x[1].re > 0.0 && x[1].re < 1.0);
    }

    #[test]
    fn qr_and_newton_agree_on_larger_spectra() {
        for sys in [MeasureSystem::jacobi_pineiro(3), MeasureSystem::angelesco(2), MeasureSystem::monomial_family(1)] {
            let exact = recurrence_table::<Rational>(&sys, 30).unwrap();
            let t = exact.map(DoubleDouble::from_rational);
            for n in [5, 12, 20, 30] {
                let nodes = eigen_nodes(&build_hessenberg(&t, n).unwrap(), &t).unwrap();
                assert!(nodes.real && nodes.all_simple(), "n={n}");
                assert!(nodes.polish_shift() < 1e-8, "n={n} shift={:e}", nodes.polish_shift());
                let p = crate::mop::type2_from_recurrence(&exact, n).unwrap().pop().unwrap();
                let dp = p.derivative();
                for x in nodes.as_c64() {
                    let xr = crate::scalar::f64_to_rational(x.re).unwrap();
                    let (v, d) = (p.eval(&xr), dp.eval(&xr));
                    let step = crate::scalar::rational_to_f64(&(v / d)).abs();
                    assert!(step <= 4.0 * f64::EPSILON * x.re.abs().max(1.0), "n={n} x={x} newton step {step:e}");
                }
            }
        }
    }

    #[test]
    fn right_vectors_are_p_values() {
        let t = sys_a_table().map(f64::from_rational);
        let h = 0.5 / 3f64.sqrt();
        let v = right_eigenvector(&t, 2, &(0.5 - h)).unwrap();
        assert_eq!(v[0], 1.0);
        assert!((v[1] + h).abs() < 1e-15);
        assert!(right_eigenvector(&t, 2, &0.3).is_err());
    }

    #[test]
    fn exact_pairs_on_residue_class() {
        let sys = MeasureSystem::sys_a();
        let ctx = CDContext::<Rational>::from_system(&sys, 2).unwrap();
        let l = build_hessenberg(ctx.table(), 2).unwrap();
        let dom = ResidueClass::new(Polynomial::new(vec![q(1, 6), q(-1, 1), q(1, 1)]), vec![]);
        let pairs = eigen_pairs_in(&ctx, &l, &dom, TAU_EIG).unwrap();
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!((p.k, p.i, p.route), (1, 1, LeftRoute::Determinant));
        assert_eq!((p.left_residual, p.right_residual), (0.0, 0.0));
        // u = (1, u_2(x)) with u_2 = 12 (x - 1/2) / 1 solving uᵀL = x uᵀ
        assert_eq!(p.left[1], Polynomial::new(vec![q(-6, 1), q(12, 1)]));
    }

    #[test]
    fn float_pairs_are_biorthogonal() {
        let sys = MeasureSystem::jacobi_pineiro(3);
        let exact = recurrence_table::<Rational>(&sys, 14).unwrap();
        let init = crate::mop::type1_initials::<Rational>(&sys).unwrap();
        let t = exact.map(DoubleDouble::from_rational);
        let n = 12;
        let ctx = CDContext::new(t.clone(), init.map(DoubleDouble::from_rational), n).unwrap();
        let l = build_hessenberg(&t, n).unwrap();
        let nodes = eigen_nodes(&l, &t).unwrap();
        let pairs: Vec<_> = nodes
            .values
            .iter()
            .map(|x| eigen_pairs_in(&ctx, &l, &ComplexNode::new(x.clone(), TAU_ZERO_DD), TAU_EIG).unwrap().remove(0))
            .collect();
        for (a, pa) in pairs.iter().enumerate() {
            assert_eq!(pa.route, LeftRoute::Determinant);
            let un = vector_norm(&pa.dom, &pa.left);
            for (b, pb) in pairs.iter().enumerate() {
                let dot = pa.left.iter().zip(&pb.right).fold(Complex::new(DoubleDouble::from_f64(0.0), DoubleDouble::from_f64(0.0)), |acc, (u, v)| acc + u.clone() * v.clone());
                let rel = cnorm(&dot) / (un * vector_norm(&pb.dom, &pb.right));
                if a == b {
                    assert!(rel > 1e-10);
                } else {
                    assert!(rel < 1e-10, "{a} {b}: {rel:e}");
                }
            }
        }
    }
}
