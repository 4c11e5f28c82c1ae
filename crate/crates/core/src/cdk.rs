//! Christoffel–Darboux machinery: the vectors `B_n^{(i)}`, the polynomials
//! `Q^{(i)}_{k,n}`, the constant `γ_n` with `B_n = γ_n P_n`, and the
//! generalized Christoffel–Darboux identities
//!
//! ```text
//! (x - y) Σ_{k=1}^n P_{k-1}(x) Q^{(i)}_{k,n}(y) = γ_n (P_n(x) P_{n-i}(y) - P_n(y) P_{n-i}(x))
//!         Σ_{k=1}^n P_{k-1}(x) Q^{(i)}_{k,n}(x) = γ_n (P_n'(x) P_{n-i}(x) - P_n(x) P_{n-i}'(x))
//! ```

use num_integer::Integer;

use crate::domain::{NodeDomain, Point, ZeroSplit};
use crate::error::{Error, Result};
use crate::measures::{MeasureSystem, MultiIndex};
use crate::mop::{eval_recurrence_in, type1_initials, type1_values_in, Initials, MopSequence, RecurrenceTable};
use crate::scalar::{parse_rational, ratio, Rational, Scalar};

/// Relative tolerance for floating-point identity checks.
pub const TAU_CD: f64 = 1e-9;

/// Everything the identities at index `n` depend on.
#[derive(Clone, Debug)]
pub struct CDContext<S> {
    n: usize,
    table: RecurrenceTable<S>,
    initials: Initials<S>,
    gamma: S,
}

impl<S: Scalar> CDContext<S> {
    /// Needs rows `0..n-1`. Rows up to `n + r - 1` enable the second route for
    /// every `B_n^{(i)}`.
    pub fn new(table: RecurrenceTable<S>, initials: Initials<S>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("the Christoffel–Darboux identities need n >= 1".into()));
        }
        table.require_rows(n)?;
        let gamma = gamma_from(&table, &initials, n)?;
        Ok(Self { n, table, initials, gamma })
    }

    /// Builds the table as far as `n + r - 1` (or as far as normality allows,
    /// but at least to `n - 1`) and the initial values from the moments.
    pub fn from_system(system: &MeasureSystem, n: usize) -> Result<Self> {
        let (seq, stop) = MopSequence::<S>::longest(system, n + system.r() - 1)?;
        if seq.table.len() < n {
            return Err(stop.unwrap_or(Error::TableTooShort { needed: n - 1, available: seq.table.len() }));
        }
        Self::new(seq.table, type1_initials(system)?, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.table.r()
    }

    pub fn table(&self) -> &RecurrenceTable<S> {
        &self.table
    }

    pub fn initials(&self) -> &Initials<S> {
        &self.initials
    }

    pub fn gamma(&self) -> &S {
        &self.gamma
    }

    /// Whether the sum form of `B_n^{(i)}` is computable (rows through `n - i + r`).
    pub fn sum_route_available(&self, i: usize) -> bool {
        self.n + self.r() < self.table.len() + i
    }

    /// Evaluates all `P_k`, `A_k` and `B_n^{(i)}` on a domain.
    pub fn values_in<D: NodeDomain<S>>(&self, dom: &D) -> Result<CdValues<S, D>> {
        let n = self.n;
        let r = self.r();
        let (p, dp) = eval_recurrence_in(&self.table, n, dom)?;
        let a_max = self.table.len().max(r).min(n + r);
        let a = type1_values_in(&self.table, &self.initials, a_max, dom)?;
        let mut b = Vec::with_capacity(r);
        let mut b_gap = 0.0_f64;
        for i in 1..=r {
            let diff = self.difference_route(dom, &a, i)?;
            let sum = if self.sum_route_available(i) { Some(self.sum_route(dom, &a, i)?) } else { None };
            match (diff, sum) {
                (Some(d), Some(s)) => {
                    b_gap = b_gap.max(compare_routes(dom, &d, &s, i)?);
                    b.push(d.0);
                }
                (Some(d), None) => b.push(d.0),
                (None, Some(s)) => b.push(s.0),
                (None, None) => {
                    return Err(Error::TableTooShort { needed: n - i + r, available: self.table.len() });
                }
            }
        }
        Ok(CdValues { dom: dom.clone(), p, dp, a, b, b_gap, n, r })
    }

    /// `x A_{n-i+1} - A_{n-i} - Σ_{j<i} a_{n+j-i,j} A_{n-i+j+1}`; needs `n >= i`.
    fn difference_route<D: NodeDomain<S>>(&self, dom: &D, a: &[Vec<D::Elem>], i: usize) -> Result<Option<Terms<D::Elem>>> {
        if self.n < i {
            return Ok(None);
        }
        let n = self.n;
        let x = dom.variable();
        let mut terms = Terms::new(dom, self.r());
        terms.add(dom, &a[n - i + 1], |v| dom.mul(&x, v));
        terms.add(dom, &a[n - i], |v| dom.neg(v));
        for j in 0..i {
            let c = self.table.padded(n + j - i, j)?;
            terms.add(dom, &a[n - i + j + 1], |v| dom.neg(&dom.scale(v, &c)));
        }
        Ok(Some(terms))
    }

    /// `Σ_{j=i}^r a_{n-i+j,j} A_{n-i+j+1}` with `a_{l1,l2} = 1` for `l1 < l2`.
    fn sum_route<D: NodeDomain<S>>(&self, dom: &D, a: &[Vec<D::Elem>], i: usize) -> Result<Terms<D::Elem>> {
        let n = self.n;
        let mut terms = Terms::new(dom, self.r());
        for j in i..=self.r() {
            let c = self.table.padded(n + j - i, j)?;
            terms.add(dom, &a[n + j - i + 1], |v| dom.scale(v, &c));
        }
        Ok(terms)
    }
}

/// A vector accumulated term by term, with the size of the terms kept as the
/// scale for relative comparisons.
struct Terms<E>(Vec<E>, f64);

impl<E: Clone> Terms<E> {
    fn new<S: Scalar, D: NodeDomain<S, Elem = E>>(dom: &D, r: usize) -> Self {
        Terms(vec![dom.zero(); r], 0.0)
    }

    fn add<S: Scalar, D: NodeDomain<S, Elem = E>>(&mut self, dom: &D, v: &[E], f: impl Fn(&E) -> E) {
        for (slot, x) in self.0.iter_mut().zip(v) {
            let t = f(x);
            self.1 = self.1.max(dom.magnitude(&t));
            *slot = dom.add(slot, &t);
        }
    }
}

fn compare_routes<S: Scalar, D: NodeDomain<S>>(dom: &D, d: &Terms<D::Elem>, s: &Terms<D::Elem>, i: usize) -> Result<f64> {
    let scale = d.1.max(s.1);
    let mut gap = 0.0_f64;
    for (u, v) in d.0.iter().zip(&s.0) {
        let diff = dom.sub(u, v);
        if !dom.is_zero(&diff, scale * TAU_CD / dom.rel_tol().max(f64::MIN_POSITIVE)) {
            return Err(Error::FormulaMismatch(format!("the two expressions for B^({i}) differ")));
        }
        gap = gap.max(dom.magnitude(&diff) / scale.max(f64::MIN_POSITIVE));
    }
    Ok(gap)
}

/// `γ_n = Π A_{j,j} / Π_{ℓ=r}^{n-1} a_{ℓ,r} · (-1)^{⌊s/2⌋ + ⌊(r-s)/2⌋}`.
fn gamma_from<S: Scalar>(table: &RecurrenceTable<S>, initials: &Initials<S>, n: usize) -> Result<S> {
    let r = table.r();
    let mut g = initials.diagonal_product();
    if g.is_zero() {
        return Err(Error::ZeroPivot("a diagonal initial value A_(j,j) vanishes".into()));
    }
    for l in r..n {
        let a = table.padded(l, r)?;
        if a.is_zero() {
            return Err(Error::ZeroPivot(format!("a_({l},{r}) vanishes")));
        }
        g = g / a;
    }
    let (_, s) = MultiIndex::proper(n, r).split();
    if (s / 2 + (r - s) / 2).is_odd() {
        g = -g;
    }
    Ok(g)
}

/// Values at the points of one domain.
#[derive(Clone, Debug)]
pub struct CdValues<S: Scalar, D: NodeDomain<S>> {
    pub dom: D,
    /// `P_0..P_n` and their derivatives.
    pub p: Vec<D::Elem>,
    pub dp: Vec<D::Elem>,
    /// `A_0..A_{k}` for every `k` the table supports (components `0..r`).
    pub a: Vec<Vec<D::Elem>>,
    /// `B_n^{(1)}..B_n^{(r)}`.
    pub b: Vec<Vec<D::Elem>>,
    /// Largest relative difference between the two B-vector routes.
    pub b_gap: f64,
    n: usize,
    r: usize,
}

impl<S: Scalar, D: NodeDomain<S>> CdValues<S, D> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `B_n^{(i)}`, `1 <= i <= r`.
    pub fn b_vector(&self, i: usize) -> &[D::Elem] {
        &self.b[i - 1]
    }

    /// `Q^{(i)}_{k,n}`: the B-columns with column `i` replaced by `A_k`.
    pub fn q(&self, i: usize, k: usize) -> D::Elem {
        let m: Vec<Vec<D::Elem>> = (0..self.r)
            .map(|c| {
                (0..self.r)
                    .map(|col| if col + 1 == i { self.a[k][c].clone() } else { self.b[col][c].clone() })
                    .collect()
            })
            .collect();
        self.dom.det(&m)
    }

    /// `B_n = det(B^{(1)} .. B^{(r)})`.
    pub fn big_b(&self) -> D::Elem {
        let m: Vec<Vec<D::Elem>> =
            (0..self.r).map(|c| (0..self.r).map(|col| self.b[col][c].clone()).collect()).collect();
        self.dom.det(&m)
    }

    /// `(Q^{(i)}_{1,n}, .., Q^{(i)}_{n,n})`.
    pub fn q_row(&self, i: usize) -> Vec<D::Elem> {
        (1..=self.n).map(|k| self.q(i, k)).collect()
    }

    /// Splits the domain into pieces on which `i_ℓ`, the smallest `i` with
    /// `P_{n-i} != 0`, is constant. Pieces where every `P_{n-i}` vanishes get
    /// `None`.
    pub fn cd_index_pieces(&self) -> Vec<(D, Option<usize>)> {
        let candidates: Vec<D::Elem> = (1..=self.r.min(self.n)).map(|i| self.p[self.n - i].clone()).collect();
        let size = candidates.iter().map(|v| self.dom.magnitude(v)).fold(0.0, f64::max);
        first_nonzero(&self.dom, &candidates, &vec![size; candidates.len()])
            .into_iter()
            .map(|(d, t)| (d, t.map(|t| t + 1)))
            .collect()
    }

    /// Hadamard bound of the determinant defining `Q^{(i)}_{k,n}`: the size
    /// against which its rounding error is measured.
    pub fn q_scale(&self, i: usize, k: usize) -> f64 {
        (0..self.r)
            .map(|col| {
                let column = if col + 1 == i { &self.a[k] } else { &self.b[col] };
                column.iter().map(|v| self.dom.magnitude(v).powi(2)).sum::<f64>().sqrt()
            })
            .product()
    }
}

/// Partitions `dom` by the position of the first entry of `values` that does
/// not vanish there. Entry `t` counts as zero when it is negligible relative
/// to `scales[t]`.
pub fn first_nonzero<S: Scalar, D: NodeDomain<S>>(dom: &D, values: &[D::Elem], scales: &[f64]) -> Vec<(D, Option<usize>)> {
    let mut out = Vec::new();
    scan(dom.clone(), values, scales, 0, &mut out);
    out
}

fn scan<S: Scalar, D: NodeDomain<S>>(d: D, values: &[D::Elem], scales: &[f64], start: usize, out: &mut Vec<(D, Option<usize>)>) {
    for (t, v) in values.iter().enumerate().skip(start) {
        match d.split(&d.restrict(v), scales[t]) {
            ZeroSplit::Zero => continue,
            ZeroSplit::NonZero => {
                out.push((d, Some(t)));
                return;
            }
            ZeroSplit::Mixed { zero, nonzero } => {
                out.push((nonzero, Some(t)));
                scan(zero, values, scales, t + 1, out);
                return;
            }
        }
    }
    out.push((d, None));
}

/// Left and right sides of one Christoffel–Darboux identity.
#[derive(Clone, Debug, PartialEq)]
pub struct CdCheck<S> {
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> CdCheck<S> {
    pub fn residual(&self) -> S {
        (self.lhs.clone() - self.rhs.clone()).abs()
    }

    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
    pub fn relative(&self) -> f64 {
        let scale = self.lhs.to_f64_lossy().abs().max(self.rhs.to_f64_lossy().abs()).max(1.0);
        self.residual().to_f64_lossy() / scale
    }

    pub fn holds(&self, tol: f64) -> bool {
        if S::EXACT {
            self.lhs == self.rhs
        } else {
            self.relative() <= tol
        }
    }
}

/// Both sides of the identity at `(x, y)`; the confluent form when `x == y`.
pub fn cd_check<S: Scalar>(ctx: &CDContext<S>, i: usize, x: &S, y: &S) -> Result<CdCheck<S>> {
    let n = ctx.n();
    if i == 0 || i > ctx.r().min(n) {
        return Err(Error::InvalidSystem(format!("CD index i = {i} outside 1..={}", ctx.r().min(n))));
    }
    let vx = ctx.values_in(&Point::new(x.clone()))?;
    let g = ctx.gamma().clone();
    if x == y {
        let lhs = (1..=n).fold(S::zero(), |acc, k| acc + vx.p[k - 1].clone() * vx.q(i, k));
        let rhs = g * (vx.dp[n].clone() * vx.p[n - i].clone() - vx.p[n].clone() * vx.dp[n - i].clone());
        return Ok(CdCheck { lhs, rhs });
    }
    let vy = ctx.values_in(&Point::new(y.clone()))?;
    let sum = (1..=n).fold(S::zero(), |acc, k| acc + vx.p[k - 1].clone() * vy.q(i, k));
    let lhs = (x.clone() - y.clone()) * sum;
    let rhs = g * (vx.p[n].clone() * vy.p[n - i].clone() - vy.p[n].clone() * vx.p[n - i].clone());
    Ok(CdCheck { lhs, rhs })
}

/// `|LHS - RHS|` of the identity at `(x, y)`.
pub fn cd_residual<S: Scalar>(ctx: &CDContext<S>, i: usize, x: &S, y: &S) -> Result<S> {
    cd_check(ctx, i, x, y).map(|c| c.residual())
}

/// `B_n^{(i)}(x)`, after checking both expressions agree where both exist.
pub fn b_vector<S: Scalar>(ctx: &CDContext<S>, i: usize, x: &S) -> Result<Vec<S>> {
    if i == 0 || i > ctx.r() {
        return Err(Error::InvalidSystem(format!("B-vector index i = {i} outside 1..={}", ctx.r())));
    }
    Ok(ctx.values_in(&Point::new(x.clone()))?.b_vector(i).to_vec())
}

/// `Q^{(i)}_{k,n}(x)`.
pub fn q_polynomial<S: Scalar>(ctx: &CDContext<S>, i: usize, k: usize, x: &S) -> Result<S> {
    if i == 0 || i > ctx.r() || k == 0 || k > ctx.n() {
        return Err(Error::InvalidSystem(format!("Q index (i, k) = ({i}, {k}) out of range")));
    }
    Ok(ctx.values_in(&Point::new(x.clone()))?.q(i, k))
}

/// `B_n(x)`.
pub fn big_b<S: Scalar>(ctx: &CDContext<S>, x: &S) -> Result<S> {
    Ok(ctx.values_in(&Point::new(x.clone()))?.big_b())
}

/// `0, 1/2, -1/2, 1, -1`, then `p/q, -p/q` for `q = 3, 4, ..` and `0 < p < q`
/// coprime to `q`.
pub fn sample_ladder(count: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = [(0, 1), (1, 2), (-1, 2), (1, 1), (-1, 1)].iter().map(|&(p, q)| ratio(p, q)).collect();
    let mut q = 3i64;
    while out.len() < count {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(ratio(p, q));
                out.push(ratio(-p, q));
            }
        }
        q += 1;
    }
    out.truncate(count);
    out
}

/// Parses a comma-separated list of rationals, e.g. `"0,1/2,-1/2"`.
pub fn parse_ladder(text: &str) -> Result<Vec<Rational>> {
    let points: Vec<Rational> = text.split(',').map(|t| parse_rational(t.trim())).collect::<Result<_>>()?;
    let mut sorted = points.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != points.len() || points.is_empty() {
        return Err(Error::Parse("sample points must be distinct and non-empty".into()));
    }
    Ok(points)
}

/// Result of certifying `B_n = γ_n P_n` on sample points.
#[derive(Clone, Debug)]
pub struct LemmaOneReport {
    pub points: usize,
    pub max_relative: f64,
    pub holds: bool,
}

/// Compares `B_n(x)` and `γ_n P_n(x)` at `2n + 1` ladder points, enough to
/// certify the polynomial identity (both sides have degree at most `2n`).
pub fn certify_lemma_one<S: Scalar>(ctx: &CDContext<S>, ladder: &[Rational]) -> Result<LemmaOneReport> {
    let needed = 2 * ctx.n() + 1;
    if ladder.len() < needed {
        return Err(Error::InvalidSystem(format!("{needed} sample points needed, {} given", ladder.len())));
    }
    let mut report = LemmaOneReport { points: needed, max_relative: 0.0, holds: true };
    for x in &ladder[..needed] {
        let v = ctx.values_in(&Point::new(S::from_rational(x)))?;
        let check = CdCheck { lhs: v.big_b(), rhs: ctx.gamma().clone() * v.p[ctx.n()].clone() };
        report.max_relative = report.max_relative.max(check.relative());
        report.holds &= check.holds(TAU_CD);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mop::recurrence_table;
    use crate::scalar::{ratio, DoubleDouble};

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    fn sys_a_ctx() -> CDContext<Rational> {
        CDContext::from_system(&MeasureSystem::sys_a(), 2).unwrap()
    }

    #[test]
    fn gamma_two_on_sys_a() {
        let ctx = sys_a_ctx();
        assert_eq!(ctx.gamma(), &q(-12, 1));
        assert_eq!(big_b(&ctx, &q(0, 1)).unwrap(), q(-2, 1));
    }

    #[test]
    fn gamma_for_one_measure() {
        let sys = MeasureSystem::monomial_family(1);
        for n in 1..=5 {
            let ctx = CDContext::<Rational>::from_system(&sys, n).unwrap();
            let t = ctx.table();
            let expected = (1..n).fold(q(1, 1), |g, l| g / t.get(l, 1).unwrap().clone());
            assert_eq!(ctx.gamma(), &expected);
        }
    }

    #[test]
    fn b_vectors_agree_where_both_routes_exist() {
        for sys in [MeasureSystem::jacobi_pineiro(2), MeasureSystem::jacobi_pineiro(3), MeasureSystem::angelesco(3)] {
            for n in 1..=8 {
                let ctx = CDContext::<Rational>::from_system(&sys, n).unwrap();
                for i in 1..=ctx.r() {
                    assert!(ctx.sum_route_available(i));
                }
                for x in sample_ladder(5) {
                    // values_in fails with FormulaMismatch on any disagreement
                    let v = ctx.values_in(&Point::new(x)).unwrap();
                    assert_eq!(v.b_gap, 0.0);
                }
            }
        }
    }

    #[test]
    fn sys_a_b_vector_uses_difference_route() {
        // P_3 does not exist for SYS-A, so only the first form is available
        let ctx = sys_a_ctx();
        assert!(!ctx.sum_route_available(1));
        let b1 = b_vector(&ctx, 1, &q(0, 1)).unwrap();
        let b2 = b_vector(&ctx, 2, &q(1, 1)).unwrap();
        assert_eq!(b1.len(), 2);
        assert_eq!(b2.len(), 2);
    }

    #[test]
    fn q_nn_is_gamma_times_p() {
        let ctx = sys_a_ctx();
        for x in [q(0, 1), q(1, 2), q(1, 1)] {
            let v = ctx.values_in(&Point::new(x.clone())).unwrap();
            assert_eq!(v.q(1, 2), ctx.gamma() * &v.p[1]);
            assert_eq!(v.q(2, 2), ctx.gamma().clone());
        }
    }

    #[test]
    fn one_measure_q_is_a() {
        let ctx = CDContext::<Rational>::from_system(&MeasureSystem::monomial_family(1), 3).unwrap();
        let v = ctx.values_in(&Point::new(q(1, 3))).unwrap();
        for k in 1..=3 {
            assert_eq!(v.q(1, k), v.a[k][0]);
        }
    }

    #[test]
    fn classical_christoffel_darboux_for_shifted_legendre() {
        // r = 1, n = 2: Σ P_{k-1}(x) A_k(y) (x - y) = γ_2 (P_2(x) P_1(y) - P_2(y) P_1(x))
        let ctx = CDContext::<Rational>::from_system(&MeasureSystem::monomial_family(1), 2).unwrap();
        let check = cd_check(&ctx, 1, &q(1, 3), &q(2, 3)).unwrap();
        assert_eq!(check.lhs, check.rhs);
        // A_1 = 1, A_2 = 12 (x - 1/2): kernel P_0 A_1 + P_1(x) A_2(y) at x = 1/3, y = 2/3
        let kernel = q(1, 1) + (q(1, 3) - q(1, 2)) * q(12, 1) * (q(2, 3) - q(1, 2));
        assert_eq!(check.lhs, (q(1, 3) - q(2, 3)) * kernel);
    }

    #[test]
    fn identities_hold_exactly() {
        let ladder = sample_ladder(7);
        for sys in [MeasureSystem::sys_a(), MeasureSystem::jacobi_pineiro(2), MeasureSystem::angelesco(3)] {
            let n_max = if sys == MeasureSystem::sys_a() { 2 } else { 6 };
            for n in 1..=n_max {
                let ctx = CDContext::<Rational>::from_system(&sys, n).unwrap();
                for i in 1..=ctx.r().min(n) {
                    for x in &ladder {
                        for y in &ladder[..3] {
                            assert!(cd_residual(&ctx, i, x, y).unwrap() == q(0, 1), "n={n} i={i} x={x} y={y}");
                        }
                    }
                }
                assert!(certify_lemma_one(&ctx, &sample_ladder(2 * n + 1)).unwrap().holds);
            }
        }
    }

    #[test]
    fn float_identities_are_close() {
        let sys = MeasureSystem::jacobi_pineiro(3);
        let table = recurrence_table::<Rational>(&sys, 14).unwrap();
        let init = type1_initials::<Rational>(&sys).unwrap();
        let small = CDContext::new(table.map(f64::from_rational), init.map(f64::from_rational), 6).unwrap();
        let big = CDContext::new(table.map(DoubleDouble::from_rational), init.map(DoubleDouble::from_rational), 12).unwrap();
        for i in 1..=3 {
            for (x, y) in [(0.25, 0.75), (0.5, 0.5), (-0.5, 1.0)] {
                let c = cd_check(&small, i, &x, &y).unwrap();
                assert!(c.relative() < 1e-9, "i={i} ({x},{y}): {c:?}");
                let (x, y) = (DoubleDouble::from_f64(x), DoubleDouble::from_f64(y));
                let c = cd_check(&big, i, &x, &y).unwrap();
                assert!(c.relative() < 1e-9, "i={i} ({x},{y}): {c:?}");
            }
        }
    }

    #[test]
    fn ladder_shape() {
        let l = sample_ladder(9);
        assert_eq!(l, vec![q(0, 1), q(1, 2), q(-1, 2), q(1, 1), q(-1, 1), q(1, 3), q(-1, 3), q(2, 3), q(-2, 3)]);
        assert_eq!(parse_ladder("0, 1/2,-3").unwrap(), vec![q(0, 1), q(1, 2), q(-3, 1)]);
        assert!(parse_ladder("1,1").is_err());
    }
}
