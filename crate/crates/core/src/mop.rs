//! Type I and type II multiple orthogonal polynomials along the proper
//! multi-indices, and the recurrence coefficients they share.
//!
//! Conventions: measures are indexed from zero in code (`j = 0..r`), while the
//! polynomial index `n` is the usual degree index (`P_0 = 1`, `A_0 = 0`).
//! The recurrence of order `r + 1` reads
//!
//! ```text
//! x P_n(x)   = P_{n+1}(x) + Σ_{j=0}^{r} a_{n,j} P_{n-j}(x)
//! x A_n(x)   = A_{n-1}(x) + Σ_{j=0}^{r} a_{n+j-1,j} A_{n+j}(x)
//! ```


use crate::domain::{NodeDomain, Point};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{moment_matrix, require_normal, MeasureSystem, MultiIndex};
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::Scalar;

/// Relative threshold for "structurally zero" recurrence coefficients in
/// floating point.
pub const TAU_ZERO: f64 = 1e-12;

/// Normalizers of type I polynomials below this (relative) size trigger a warning.
pub const NORMALIZER_WARN: f64 = 1e-8;

/// Coefficients `a_{n,j}`, `0 <= j <= min(r, n)`, one row per `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTable<S> {
    r: usize,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> RecurrenceTable<S> {
    pub fn new(r: usize, rows: Vec<Vec<S>>) -> Result<Self> {
        for (n, row) in rows.iter().enumerate() {
            if row.len() != r.min(n) + 1 {
                return Err(Error::InvalidSystem(format!(
                    "recurrence row {n} has {} entries, expected {}",
                    row.len(),
                    r.min(n) + 1
                )));
            }
        }
        Ok(Self { r, rows })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of rows (`n = 0..len`).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> Option<&[S]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    /// `a_{n,j}` if stored.
    pub fn get(&self, n: usize, j: usize) -> Option<&S> {
        self.rows.get(n).and_then(|row| row.get(j))
    }

    /// `a_{n,j}` with the padding convention `a_{ℓ1,ℓ2} = 1` for
    /// `0 <= ℓ1 < ℓ2 <= r`.
    pub fn padded(&self, n: usize, j: usize) -> Result<S> {
        if n < j && j <= self.r {
            return Ok(S::one());
        }
        self.get(n, j).cloned().ok_or(Error::TableTooShort { needed: n, available: self.len() })
    }

    pub fn require_rows(&self, count: usize) -> Result<()> {
        if self.len() < count {
            return Err(Error::TableTooShort { needed: count.saturating_sub(1), available: self.len() });
        }
        Ok(())
    }

    /// First `count` rows.
    pub fn truncated(&self, count: usize) -> Self {
        Self { r: self.r, rows: self.rows.iter().take(count).cloned().collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RecurrenceTable<T> {
        RecurrenceTable { r: self.r, rows: self.rows.iter().map(|row| row.iter().map(&f).collect()).collect() }
    }

    /// Largest absolute coefficient among rows `0..count`.
    pub fn max_magnitude(&self, count: usize) -> f64 {
        self.rows
            .iter()
            .take(count)
            .flat_map(|row| row.iter())
            .map(|v| v.to_f64_lossy().abs())
            .fold(0.0, f64::max)
    }

    /// Checks `a_{k,r} != 0` for `r <= k < len`.
    pub fn check_remark_one(&self) -> Result<()> {
        for k in self.r..self.len() {
            self.check_band_entry(k)?;
        }
        Ok(())
    }

    fn check_band_entry(&self, k: usize) -> Result<()> {
        let row = &self.rows[k];
        let scale = row.iter().map(|v| v.to_f64_lossy().abs()).fold(0.0, f64::max);
        if row[self.r].negligible(scale, TAU_ZERO) {
            return Err(Error::ZeroPivot(format!("a_({k},{}) vanishes", self.r)));
        }
        Ok(())
    }
}

/// Moments `m_0..m_{count-1}` of each measure, cached. Providers with short
/// tables report [`Error::OutOfTable`] only when a missing entry is read.
#[derive(Clone, Debug)]
pub struct Moments<S> {
    values: Vec<Vec<S>>,
    limits: Vec<usize>,
}

impl<S: Scalar> Moments<S> {
    pub fn new(system: &MeasureSystem, count: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(system.r());
        let mut limits = Vec::with_capacity(system.r());
        for (j, provider) in system.providers().iter().enumerate() {
            let available = provider.max_degree().map_or(count, |d| count.min(d + 1));
            values.push((0..available).map(|l| system.moment(j, l)).collect::<Result<Vec<S>>>()?);
            limits.push(provider.max_degree().map_or(usize::MAX, |d| d + 1));
        }
        Ok(Self { values, limits })
    }

    pub fn get(&self, j: usize, ell: usize) -> Result<&S> {
        self.values[j]
            .get(ell)
            .ok_or(Error::OutOfTable { measure: j, index: ell, len: self.limits[j].min(self.values[j].len()) })
    }

    /// `∫ p dμ_j` as a moment sum.
    pub fn integrate(&self, p: &Polynomial<S>, j: usize) -> Result<S> {
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .try_fold(S::zero(), |acc, (k, c)| Ok(acc + c.clone() * self.get(j, k)?.clone()))
    }

    /// `∫ p Σ_j A_j dμ_j`.
    pub fn pairing(&self, p: &Polynomial<S>, a: &VectorPolynomial<S>) -> Result<S> {
        a.components
            .iter()
            .enumerate()
            .try_fold(S::zero(), |acc, (j, aj)| Ok(acc + self.integrate(&(p * aj), j)?))
    }
}

/// Number of moments needed to form every object up to index `n`.
pub fn moments_needed(n: usize, r: usize) -> usize {
    2 * n + r + 2
}

/// Monic type II polynomial `P_n`, from the `n × n` moment system.
pub fn type2_polynomial<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<Polynomial<S>> {
    if n == 0 {
        return Ok(Polynomial::one());
    }
    require_normal::<S>(system, n)?;
    type2_solve(system, n)
}

fn type2_solve<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<Polynomial<S>> {
    let mm = moment_matrix::<S>(system, n)?;
    let d = mm.stacked();
    let mut rhs = Vec::with_capacity(n);
    for (j, &width) in mm.index.components.iter().enumerate() {
        for k in 0..width {
            rhs.push(-system.moment::<S>(j, k + n)?);
        }
    }
    let mut c = linalg::solve(&d, &rhs)?;
    c.push(S::one());
    Ok(Polynomial::new(c))
}

/// Type I vector polynomial `A_n` with `∫ x^{n-1} Σ_j A_{n,j} dμ_j = 1`.
pub fn type1_polynomial<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<VectorPolynomial<S>> {
    let r = system.r();
    if n == 0 {
        return Ok(VectorPolynomial::zero(r));
    }
    require_normal::<S>(system, n - 1)?;
    require_normal::<S>(system, n)?;
    type1_solve(system, n)
}

fn type1_solve<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<VectorPolynomial<S>> {
    let mm = moment_matrix::<S>(system, n)?;
    let m = mm.side_by_side();
    let mut rhs = vec![S::zero(); n];
    rhs[n - 1] = S::one();
    let coeffs = linalg::solve(&m, &rhs)?;
    if !S::EXACT {
        // A unit-size null vector of the first n-1 conditions has normalizer 1/‖a‖.
        let size = coeffs.iter().map(|c| c.to_f64_lossy().abs()).fold(0.0, f64::max);
        if size > 1.0 / NORMALIZER_WARN {
            log::warn!("type I normalization for n = {n} is ill-conditioned (normalizer ~ {:e})", 1.0 / size);
        }
    }
    let mut components = Vec::with_capacity(system.r());
    let mut offset = 0;
    for &width in &mm.index.components {
        components.push(Polynomial::new(coeffs[offset..offset + width].to_vec()));
        offset += width;
    }
    Ok(VectorPolynomial { components })
}

/// Both polynomial families and the recurrence table built from them.
#[derive(Clone, Debug)]
pub struct MopSequence<S> {
    /// `P_0..P_{rows}`.
    pub type2: Vec<Polynomial<S>>,
    /// `A_0..A_{rows}`.
    pub type1: Vec<VectorPolynomial<S>>,
    pub table: RecurrenceTable<S>,
    /// Largest relative violation of the orthogonality conditions met while
    /// building (zero in exact arithmetic).
    pub recurrence_gap: f64,
}

impl<S: Scalar> MopSequence<S> {
    /// Builds rows `0..=n_max` through the integral representation
    /// `a_{n,j} = ∫ x P_n Σ_ℓ A_{n+1-j,ℓ} dμ_ℓ`.
    pub fn from_moments(system: &MeasureSystem, n_max: usize) -> Result<Self> {
        match Self::longest(system, n_max)? {
            (seq, None) => Ok(seq),
            (_, Some(stop)) => Err(stop),
        }
    }

    /// Like [`MopSequence::from_moments`], but stops quietly at the first
    /// index that is not normal (or needs a moment beyond a finite table) and
    /// returns the rows built so far together with the reason for stopping.
    ///
    /// Row `n` only needs `P_n` and `A_1..A_{n+1}`. `P_n` comes from the rows
    /// already built, `A_{n+1}` from the type I recurrence once `a_{n,r}` is
    /// known (the first `r` of them from their moment systems), so no large
    /// linear system is ever solved. Every new `P_{n+1}` and `A_{n+1}` is
    /// checked against its orthogonality conditions.
    pub fn longest(system: &MeasureSystem, n_max: usize) -> Result<(Self, Option<Error>)> {
        let r = system.r();
        let moments = Moments::<S>::new(system, moments_needed(n_max + 1, r))?;
        let mut seq = Self {
            type2: vec![Polynomial::one()],
            type1: vec![VectorPolynomial::zero(r)],
            table: RecurrenceTable { r, rows: Vec::with_capacity(n_max + 1) },
            recurrence_gap: 0.0,
        };
        let mut stop = None;
        for n in 0..=n_max {
            match seq.extend(system, &moments, n) {
                Ok(()) => {}
                Err(e @ (Error::NotNormal { .. } | Error::OutOfTable { .. })) => {
                    stop = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !S::EXACT && seq.recurrence_gap > 1e-8 {
            log::warn!("orthogonality holds only to relative accuracy {:e}", seq.recurrence_gap);
        }
        Ok((seq, stop))
    }

    /// Appends row `n`, `P_{n+1}` and `A_{n+1}`.
    fn extend(&mut self, system: &MeasureSystem, moments: &Moments<S>, n: usize) -> Result<()> {
        let r = system.r();
        check_next_normal(system, moments, &self.type2[n], n)?;
        let xp = self.type2[n].shift();
        let mut row = vec![S::zero(); r.min(n) + 1];
        for j in (1..row.len()).rev() {
            row[j] = moments.pairing(&xp, &self.type1[n + 1 - j])?;
        }
        let next_a = if n < r {
            type1_solve(system, n + 1)?
        } else {
            // A_{n+1} a_{n,r} = x A_{n+1-r} - A_{n-r} - Σ_{j<r} a_{n-r+j,j} A_{n+1-r+j}
            let pivot = &row[r];
            let scale = row.iter().map(|v| v.to_f64_lossy().abs()).fold(0.0, f64::max);
            if pivot.negligible(scale, TAU_ZERO) {
                return Err(Error::ZeroPivot(format!("a_({n},{r}) vanishes")));
            }
            let base = n + 1 - r;
            let mut acc = self.type1[base].shift().sub(&self.type1[base - 1]);
            for j in 0..r {
                acc = acc.sub(&self.type1[base + j].scale(&self.table.rows[base + j - 1][j]));
            }
            acc.scale(&(S::one() / pivot.clone()))
        };
        row[0] = moments.pairing(&xp, &next_a)?;
        let mut next_p = xp;
        for (j, a) in row.iter().enumerate() {
            next_p = &next_p - &self.type2[n - j].scale(a);
        }
        let gap = orthogonality_gap(moments, &next_p, &next_a, n + 1)?;
        if S::EXACT && gap != 0.0 {
            return Err(Error::FormulaMismatch(format!("P_{0} or A_{0} violates its orthogonality conditions", n + 1)));
        }
        self.recurrence_gap = self.recurrence_gap.max(gap);
        self.type2.push(next_p);
        self.type1.push(next_a);
        self.table.rows.push(row);
        Ok(())
    }
}

/// Given `ν_n` normal, `ν_{n+1} = ν_n + e_s` is normal iff the Schur complement
/// `∫ P_n x^{ν_n(s)} dμ_s` of `D_n` in `D_{n+1}` is nonzero. Floating backends
/// use the rank test with its threshold instead.
fn check_next_normal<S: Scalar>(system: &MeasureSystem, moments: &Moments<S>, p: &Polynomial<S>, n: usize) -> Result<()> {
    if !S::EXACT {
        return require_normal::<S>(system, n + 1);
    }
    let r = system.r();
    let s = n % r;
    let nu = MultiIndex::proper(n, r);
    let pivot = moments.integrate(&(p * &Polynomial::monomial(nu.components[s])), s)?;
    if pivot.is_zero() {
        let report = crate::measures::normality_check::<S>(system, n + 1)?;
        return Err(Error::NotNormal { n: n + 1, rank: report.rank });
    }
    Ok(())
}

/// Largest violation of the type II conditions of `p = P_n` and the type I
/// conditions (with normalization) of `a = A_n`, each relative to the size of
/// the terms in its moment sum. Exactly zero when both hold exactly.
fn orthogonality_gap<S: Scalar>(moments: &Moments<S>, p: &Polynomial<S>, a: &VectorPolynomial<S>, n: usize) -> Result<f64> {
    let r = a.r();
    let nu = MultiIndex::proper(n, r);
    let mut gap = 0.0_f64;
    let mut record = |value: S, size: f64| {
        if !value.is_zero() {
            gap = gap.max(value.to_f64_lossy().abs() / size.max(f64::MIN_POSITIVE));
        }
    };
    for (j, &width) in nu.components.iter().enumerate() {
        for ell in 0..width {
            let mut acc = S::zero();
            let mut size = 0.0;
            for (k, c) in p.coeffs().iter().enumerate() {
                let t = c.clone() * moments.get(j, k + ell)?.clone();
                size += t.to_f64_lossy().abs();
                acc = acc + t;
            }
            record(acc, size);
        }
    }
    for ell in 0..n {
        let target = if ell + 1 == n { S::one() } else { S::zero() };
        let mut acc = -target;
        let mut size = 1.0;
        for (j, comp) in a.components.iter().enumerate() {
            for (k, c) in comp.coeffs().iter().enumerate() {
                let t = c.clone() * moments.get(j, k + ell)?.clone();
                size += t.to_f64_lossy().abs();
                acc = acc + t;
            }
        }
        record(acc, size);
    }
    Ok(gap)
}

/// Recurrence coefficients `a_{n,j}` for `n = 0..=n_max`.
pub fn recurrence_table<S: Scalar>(system: &MeasureSystem, n_max: usize) -> Result<RecurrenceTable<S>> {
    MopSequence::from_moments(system, n_max).map(|s| s.table)
}

/// Values `P_0..P_n` and derivatives `P_0'..P_n'` on a domain, by the forward
/// recurrence. Needs rows `0..n`.
pub fn eval_recurrence_in<S: Scalar, D: NodeDomain<S>>(
    table: &RecurrenceTable<S>,
    n: usize,
    dom: &D,
) -> Result<(Vec<D::Elem>, Vec<D::Elem>)> {
    table.require_rows(n)?;
    let x = dom.variable();
    let mut values = vec![dom.one()];
    let mut derivs = vec![dom.zero()];
    for k in 0..n {
        let row = &table.rows[k];
        let shifted = dom.sub(&x, &dom.embed(&row[0]));
        let mut v = dom.mul(&shifted, &values[k]);
        let mut d = dom.add(&values[k], &dom.mul(&shifted, &derivs[k]));
        for (j, a) in row.iter().enumerate().skip(1) {
            v = dom.sub(&v, &dom.scale(&values[k - j], a));
            d = dom.sub(&d, &dom.scale(&derivs[k - j], a));
        }
        values.push(v);
        derivs.push(d);
    }
    Ok((values, derivs))
}

/// [`eval_recurrence_in`] at a scalar point.
pub fn eval_recurrence<S: Scalar>(table: &RecurrenceTable<S>, n: usize, x: &S) -> Result<(Vec<S>, Vec<S>)> {
    eval_recurrence_in(table, n, &Point::new(x.clone()))
}

/// `P_0..P_n` as coefficient vectors, generated by the recurrence.
pub fn type2_from_recurrence<S: Scalar>(table: &RecurrenceTable<S>, n: usize) -> Result<Vec<Polynomial<S>>> {
    table.require_rows(n)?;
    let mut polys = vec![Polynomial::one()];
    for k in 0..n {
        let row = &table.rows[k];
        let mut next = &polys[k].shift() - &polys[k].scale(&row[0]);
        for (j, a) in row.iter().enumerate().skip(1) {
            next = &next - &polys[k - j].scale(a);
        }
        polys.push(next);
    }
    Ok(polys)
}

/// Lower-triangular initial values `A_{i,j}` (`i, j = 1..r`, stored zero-based)
/// of the type I recurrence. Row `i` holds the constant components of `A_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Initials<S> {
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> Initials<S> {
    pub fn r(&self) -> usize {
        self.values.len()
    }

    /// `A_i` for `i = 1..=r` as a constant vector polynomial.
    pub fn vector(&self, i: usize) -> VectorPolynomial<S> {
        VectorPolynomial::constants(self.values[i - 1].clone())
    }

    pub fn diagonal_product(&self) -> S {
        (0..self.r()).fold(S::one(), |acc, j| acc * self.values[j][j].clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Initials<T> {
        Initials { values: self.values.iter().map(|row| row.iter().map(&f).collect()).collect() }
    }
}

/// `A_{i,j} = (-1)^{i+j} det D_i^{(j,i)} / det D_i` for `j <= i`, zero above the
/// diagonal; cross-checked against the moment-system solution of `A_1..A_r`.
pub fn type1_initials<S: Scalar>(system: &MeasureSystem) -> Result<Initials<S>> {
    let r = system.r();
    let mut values = vec![vec![S::zero(); r]; r];
    for i in 1..=r {
        require_normal::<S>(system, i)?;
        let d = moment_matrix::<S>(system, i)?.stacked();
        let det = S::determinant(&d);
        if det.is_zero() {
            return Err(Error::NotNormal { n: i, rank: S::rank(&d, crate::measures::TAU_RANK) });
        }
        for j in 1..=i {
            let cofactor = S::determinant(&linalg::minor(&d, j - 1, i - 1));
            let sign = if (i + j) % 2 == 0 { S::one() } else { -S::one() };
            values[i - 1][j - 1] = sign * cofactor / det.clone();
        }
        let direct = type1_solve::<S>(system, i)?;
        for j in 0..r {
            let expected = direct.components[j].coeff(0);
            let got = &values[i - 1][j];
            let scale = expected.to_f64_lossy().abs().max(1.0);
            if !(got.clone() - expected).negligible(scale, 1e-8) {
                return Err(Error::FormulaMismatch(format!("determinant formula for A_({i},{})", j + 1)));
            }
        }
    }
    let initials = Initials { values };
    for j in 0..r {
        if initials.values[j][j].is_zero() {
            return Err(Error::ZeroPivot(format!("A_({0},{0}) vanishes", j + 1)));
        }
    }
    Ok(initials)
}

/// `A_0..A_{n_max}` generated by the type I recurrence, solved forward for
/// `A_{n+r}` (division by `a_{n+r-1,r}`). Needs rows `0..n_max`.
pub fn type1_sequence<S: Scalar>(
    table: &RecurrenceTable<S>,
    initials: &Initials<S>,
    n_max: usize,
) -> Result<Vec<VectorPolynomial<S>>> {
    let r = table.r();
    if initials.r() != r {
        return Err(Error::InvalidSystem("initials do not match the table's r".into()));
    }
    let mut seq = vec![VectorPolynomial::zero(r)];
    for i in 1..=r.min(n_max) {
        seq.push(initials.vector(i));
    }
    for target in r + 1..=n_max {
        let n = target - r;
        table.require_rows(target)?;
        table.check_band_entry(target - 1)?;
        let mut acc = seq[n].shift().sub(&seq[n - 1]);
        for j in 0..r {
            let a = table.padded(n + j - 1, j)?;
            acc = acc.sub(&seq[n + j].scale(&a));
        }
        let pivot = table.padded(target - 1, r)?;
        seq.push(acc.scale(&(S::one() / pivot)));
    }
    Ok(seq)
}

/// Values of `A_0..A_{n_max}` on a domain by the same forward recurrence.
pub fn type1_values_in<S: Scalar, D: NodeDomain<S>>(
    table: &RecurrenceTable<S>,
    initials: &Initials<S>,
    n_max: usize,
    dom: &D,
) -> Result<Vec<Vec<D::Elem>>> {
    let r = table.r();
    let x = dom.variable();
    let mut seq: Vec<Vec<D::Elem>> = vec![vec![dom.zero(); r]];
    for i in 1..=r.min(n_max) {
        seq.push(initials.values[i - 1].iter().map(|v| dom.embed(v)).collect());
    }
    for target in r + 1..=n_max {
        let n = target - r;
        table.require_rows(target)?;
        table.check_band_entry(target - 1)?;
        let mut acc: Vec<D::Elem> = (0..r).map(|c| dom.sub(&dom.mul(&x, &seq[n][c]), &seq[n - 1][c])).collect();
        for j in 0..r {
            let a = table.padded(n + j - 1, j)?;
            for (c, slot) in acc.iter_mut().enumerate() {
                *slot = dom.sub(slot, &dom.scale(&seq[n + j][c], &a));
            }
        }
        let inv = S::one() / table.padded(target - 1, r)?;
        seq.push(acc.iter().map(|v| dom.scale(v, &inv)).collect());
    }
    Ok(seq)
}

/// The proper multi-index for `n` with this table's `r`.
pub fn multi_index<S: Scalar>(table: &RecurrenceTable<S>, n: usize) -> MultiIndex {
    MultiIndex::proper(n, table.r())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    fn poly(c: &[(i64, i64)]) -> Polynomial<Rational> {
        Polynomial::new(c.iter().map(|&(p, d)| q(p, d)).collect())
    }

    #[test]
    fn sys_a_type2_examples() {
        let sys = MeasureSystem::sys_a();
        assert_eq!(type2_polynomial::<Rational>(&sys, 0).unwrap(), Polynomial::one());
        assert_eq!(type2_polynomial::<Rational>(&sys, 1).unwrap(), poly(&[(-1, 2), (1, 1)]));
        assert_eq!(type2_polynomial::<Rational>(&sys, 2).unwrap(), poly(&[(1, 6), (-1, 1), (1, 1)]));
    }

    #[test]
    fn sys_a_type1_examples() {
        let sys = MeasureSystem::sys_a();
        assert!(type1_polynomial::<Rational>(&sys, 0).unwrap().is_zero());
        let a1 = type1_polynomial::<Rational>(&sys, 1).unwrap();
        assert_eq!(a1.components, vec![poly(&[(1, 1)]), Polynomial::zero()]);
        let a2 = type1_polynomial::<Rational>(&sys, 2).unwrap();
        assert_eq!(a2.components, vec![poly(&[(-6, 1)]), poly(&[(12, 1)])]);
    }

    #[test]
    fn duplicated_measures_are_not_normal() {
        let leb = crate::measures::MomentProvider::power_lebesgue(q(0, 1), q(1, 1), 0);
        let sys = MeasureSystem::new(vec![leb.clone(), leb]).unwrap();
        assert!(matches!(type2_polynomial::<Rational>(&sys, 2), Err(Error::NotNormal { n: 2, .. })));
    }

    #[test]
    fn sys_a_recurrence_rows() {
        let t = recurrence_table::<Rational>(&MeasureSystem::sys_a(), 1).unwrap();
        assert_eq!(t.get(0, 0), Some(&q(1, 2)));
        assert_eq!(t.get(1, 0), Some(&q(1, 2)));
        assert_eq!(t.get(1, 1), Some(&q(1, 12)));
        assert!(matches!(recurrence_table::<Rational>(&MeasureSystem::sys_a(), 2), Err(Error::NotNormal { n: 3, .. })));
        let jp = recurrence_table::<Rational>(&MeasureSystem::jacobi_pineiro(2), 4).unwrap();
        assert_eq!(jp.row(2).unwrap().len(), 3);
    }

    #[test]
    fn shifted_legendre_diagonal_is_one_half() {
        let t = recurrence_table::<Rational>(&MeasureSystem::monomial_family(1), 6).unwrap();
        for n in 0..=6 {
            assert_eq!(t.get(n, 0), Some(&q(1, 2)), "n = {n}");
        }
        // a_{n,1} = n^2 / (4 (4 n^2 - 1)) for shifted Legendre
        for n in 1..=6i64 {
            assert_eq!(t.get(n as usize, 1), Some(&q(n * n, 4 * (4 * n * n - 1))));
        }
    }

    #[test]
    fn recurrence_evaluation_examples() {
        // rows 0 and 1 are all P_2 needs
        let t = recurrence_table::<Rational>(&MeasureSystem::sys_a(), 1).unwrap();
        let (v, d) = eval_recurrence(&t, 2, &q(1, 2)).unwrap();
        assert_eq!(v[2], q(-1, 12));
        assert_eq!((v[0].clone(), d[0].clone()), (q(1, 1), q(0, 1)));
        // root of x^2 - x + 1/6 in floating point
        let tf = t.map(f64::from_rational);
        let root = 0.5 + 0.5 / 3f64.sqrt();
        let (vf, df) = eval_recurrence(&tf, 2, &root).unwrap();
        assert!(vf[2].abs() < 1e-15);
        assert!((df[2] - (2.0 * root - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn initials_match_type1_solutions() {
        let init = type1_initials::<Rational>(&MeasureSystem::sys_a()).unwrap();
        assert_eq!(init.values, vec![vec![q(1, 1), q(0, 1)], vec![q(-6, 1), q(12, 1)]]);
        let leb = type1_initials::<Rational>(&MeasureSystem::monomial_family(1)).unwrap();
        assert_eq!(leb.values, vec![vec![q(1, 1)]]);
        let four = type1_initials::<Rational>(&MeasureSystem::monomial_family(4)).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(four.values[i][j].is_zero());
            }
        }
    }

    #[test]
    fn type1_recurrence_route_matches_moment_route() {
        for sys in [MeasureSystem::jacobi_pineiro(2), MeasureSystem::jacobi_pineiro(3), MeasureSystem::angelesco_pair()] {
            let seq = MopSequence::<Rational>::from_moments(&sys, 8).unwrap();
            let init = type1_initials::<Rational>(&sys).unwrap();
            let via_rec = type1_sequence(&seq.table, &init, 9).unwrap();
            assert_eq!(via_rec, seq.type1);
            assert_eq!(type2_from_recurrence(&seq.table, 9).unwrap(), seq.type2);
            for n in 0..=9 {
                assert_eq!(type2_polynomial::<Rational>(&sys, n).unwrap(), seq.type2[n], "P_{n}");
                assert_eq!(type1_polynomial::<Rational>(&sys, n).unwrap(), seq.type1[n], "A_{n}");
            }
        }
    }

    #[test]
    fn lebesgue_type1_is_normalized_type2() {
        let sys = MeasureSystem::monomial_family(1);
        let seq = MopSequence::<Rational>::from_moments(&sys, 5).unwrap();
        let moments = Moments::<Rational>::new(&sys, 20).unwrap();
        for n in 1..=5 {
            let a = &seq.type1[n].components[0];
            // A_n is proportional to P_{n-1} with ∫ x^{n-1} A_n = 1
            let ratio_poly = a.monic();
            assert_eq!(ratio_poly, seq.type2[n - 1]);
            assert_eq!(moments.integrate(&(&Polynomial::monomial(n - 1) * a), 0).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn orthogonality_residuals_vanish() {
        let sys = MeasureSystem::jacobi_pineiro(3);
        let moments = Moments::<Rational>::new(&sys, 40).unwrap();
        for n in 1..=9 {
            let p = type2_polynomial::<Rational>(&sys, n).unwrap();
            let nu = MultiIndex::proper(n, 3);
            for (j, &width) in nu.components.iter().enumerate() {
                for ell in 0..width {
                    let v = moments.integrate(&(&p * &Polynomial::monomial(ell)), j).unwrap();
                    assert!(v.is_zero());
                }
            }
            let a = type1_polynomial::<Rational>(&sys, n).unwrap();
            for ell in 0..n.saturating_sub(1) {
                assert!(moments.pairing(&Polynomial::monomial(ell), &a).unwrap().is_zero());
            }
            assert_eq!(moments.pairing(&Polynomial::monomial(n - 1), &a).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn float_residuals_are_small() {
        let sys = MeasureSystem::angelesco_pair();
        let moments = Moments::<f64>::new(&sys, 20).unwrap();
        for n in 1..=6 {
            let p = type2_polynomial::<f64>(&sys, n).unwrap();
            let nu = MultiIndex::proper(n, 2);
            for (j, &width) in nu.components.iter().enumerate() {
                for ell in 0..width {
                    let v = moments.integrate(&(&p * &Polynomial::monomial(ell)), j).unwrap();
                    assert!(v.abs() <= 1e-10 * p.max_abs_coeff(), "n={n} j={j} ell={ell}: {v}");
                }
            }
        }
    }

    #[test]
    fn short_tables_report_out_of_table() {
        let sys = MeasureSystem::new(vec![crate::measures::MomentProvider::Table(vec![q(1, 1), q(1, 2), q(1, 3)])])
            .unwrap();
        assert!(matches!(recurrence_table::<Rational>(&sys, 3), Err(Error::OutOfTable { .. })));
        assert_eq!(recurrence_table::<Rational>(&sys, 0).unwrap().get(0, 0), Some(&q(1, 2)));
    }

    #[test]
    fn padding_convention() {
        let t = recurrence_table::<Rational>(&MeasureSystem::jacobi_pineiro(3), 1).unwrap();
        assert_eq!(t.padded(0, 2).unwrap(), q(1, 1));
        assert_eq!(t.padded(1, 3).unwrap(), q(1, 1));
        assert!(t.padded(5, 0).is_err());
    }
}
