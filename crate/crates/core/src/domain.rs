//! Evaluation domains.
//!
//! Everything evaluated "at a point" (recurrence values, B-vectors, Q-values,
//! eigenvectors, weights) is written against [`NodeDomain`]. A domain is a set
//! of points sharing one arithmetic:
//!
//! * [`Point`]: a single point in the backend scalar type.
//! * [`ComplexNode`]: a single, possibly complex, floating-point node.
//! * [`ResidueClass`]: all roots of a squarefree rational polynomial `f` at
//!   once. Values are residues modulo `f`, so every identity checked in this
//!   domain holds exactly at each root.
//!
//! Zero tests may be ambiguous on a residue class (a value can vanish at some
//! roots only); [`NodeDomain::split`] then factors the class.

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::Polynomial;
use crate::scalar::{rational_to_f64, Scalar};

/// Outcome of a zero test on a domain.
#[derive(Clone, Debug)]
pub enum ZeroSplit<D> {
    /// Vanishes on the whole domain.
    Zero,
    /// Vanishes nowhere on the domain.
    NonZero,
    /// Vanishes on `zero` and nowhere on `nonzero`.
    Mixed { zero: D, nonzero: D },
}

pub trait NodeDomain<S: Scalar>: Clone + Debug {
    type Elem: Clone + Debug;
    /// Sum of an element over all points of the domain.
    type Total: Clone + Debug;

    fn embed(&self, s: &S) -> Self::Elem;
    /// The coordinate function `x`.
    fn variable(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Inverse, or `None` if the element vanishes somewhere on the domain.
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Largest absolute value over the points (approximate for residues).
    fn magnitude(&self, a: &Self::Elem) -> f64;
    /// Relative zero threshold used by floating domains.
    fn rel_tol(&self) -> f64;
    fn split(&self, a: &Self::Elem, scale: f64) -> ZeroSplit<Self>;
    fn total(&self, a: &Self::Elem) -> Self::Total;
    fn point_count(&self) -> usize;
    /// Floating-point approximations of the points.
    fn points_c64(&self) -> Vec<Complex64>;
    /// Floating-point values of `a` at [`NodeDomain::points_c64`].
    fn values_c64(&self, a: &Self::Elem) -> Vec<Complex64>;

    /// Re-expresses an element of a parent domain on this (sub)domain.
    fn restrict(&self, a: &Self::Elem) -> Self::Elem {
        a.clone()
    }

    fn zero(&self) -> Self::Elem {
        self.embed(&S::zero())
    }

    fn one(&self) -> Self::Elem {
        self.embed(&S::one())
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    fn scale(&self, a: &Self::Elem, s: &S) -> Self::Elem {
        self.mul(a, &self.embed(s))
    }

    /// `true` if `a` vanishes on the whole domain.
    fn is_zero(&self, a: &Self::Elem, scale: f64) -> bool {
        matches!(self.split(a, scale), ZeroSplit::Zero)
    }

    fn eval_poly(&self, p: &Polynomial<S>) -> Self::Elem {
        let x = self.variable();
        p.coeffs()
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, &x), &self.embed(c)))
    }

    /// Determinant by signed permutation expansion; division free, so valid on
    /// residue rings.
    fn det(&self, m: &[Vec<Self::Elem>]) -> Self::Elem {
        leibniz_det(self, m)
    }
}

pub fn leibniz_det<S: Scalar, D: NodeDomain<S>>(dom: &D, m: &[Vec<D::Elem>]) -> D::Elem {
    let n = m.len();
    if n == 0 {
        return dom.one();
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = dom.zero();
    let mut c = vec![0usize; n];
    let mut sign_positive = true;
    let term = |perm: &[usize]| {
        perm.iter()
            .enumerate()
            .fold(dom.one(), |acc, (row, &col)| dom.mul(&acc, &m[row][col]))
    };
    total = dom.add(&total, &term(&perm));
    // Heap's algorithm; each swap flips the sign.
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign_positive = !sign_positive;
            let t = term(&perm);
            total = if sign_positive { dom.add(&total, &t) } else { dom.sub(&total, &t) };
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

/// A single point in the backend scalar type.
#[derive(Clone, Debug)]
pub struct Point<S> {
    pub x: S,
    pub rel_tol: f64,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S) -> Self {
        Self { x, rel_tol: 1e-12 }
    }
}

impl<S: Scalar> NodeDomain<S> for Point<S> {
    type Elem = S;
    type Total = S;

    fn embed(&self, s: &S) -> S {
        s.clone()
    }
    fn variable(&self) -> S {
        self.x.clone()
    }
    fn add(&self, a: &S, b: &S) -> S {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &S, b: &S) -> S {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &S, b: &S) -> S {
        a.clone() * b.clone()
    }
    fn inverse(&self, a: &S) -> Option<S> {
        (!a.is_zero()).then(|| S::one() / a.clone())
    }
    fn magnitude(&self, a: &S) -> f64 {
        a.to_f64_lossy().abs()
    }
    fn rel_tol(&self) -> f64 {
        self.rel_tol
    }
    fn split(&self, a: &S, scale: f64) -> ZeroSplit<Self> {
        if a.negligible(scale, self.rel_tol) {
            ZeroSplit::Zero
        } else {
            ZeroSplit::NonZero
        }
    }
    fn total(&self, a: &S) -> S {
        a.clone()
    }
    fn point_count(&self) -> usize {
        1
    }
    fn points_c64(&self) -> Vec<Complex64> {
        vec![Complex64::new(self.x.to_f64_lossy(), 0.0)]
    }
    fn values_c64(&self, a: &S) -> Vec<Complex64> {
        vec![Complex64::new(a.to_f64_lossy(), 0.0)]
    }
    fn det(&self, m: &[Vec<S>]) -> S {
        S::determinant(m)
    }
}

/// One node, possibly complex, in the arithmetic of a floating backend.
#[derive(Clone, Debug)]
pub struct ComplexNode<S = f64> {
    pub x: Complex<S>,
    pub rel_tol: f64,
}

impl<S: Scalar> ComplexNode<S> {
    pub fn new(x: Complex<S>, rel_tol: f64) -> Self {
        Self { x, rel_tol }
    }

    /// Embeds a double-precision node.
    pub fn from_c64(x: Complex64, rel_tol: f64) -> Self {
        Self::new(to_complex(x), rel_tol)
    }
}

/// Rounds a double-precision complex number into the backend.
pub fn to_complex<S: Scalar>(x: Complex64) -> Complex<S> {
    let conv = |v: f64| S::from_f64(v).unwrap_or_else(S::zero);
    Complex::new(conv(x.re), conv(x.im))
}

/// Lossy conversion to double precision.
pub fn to_c64<S: Scalar>(z: &Complex<S>) -> Complex64 {
    Complex64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// `|z|` in double precision.
pub fn cnorm<S: Scalar>(z: &Complex<S>) -> f64 {
    z.re.to_f64_lossy().hypot(z.im.to_f64_lossy())
}

impl<S: Scalar> NodeDomain<S> for ComplexNode<S> {
    type Elem = Complex<S>;
    type Total = Complex<S>;

    fn embed(&self, s: &S) -> Complex<S> {
        Complex::new(s.clone(), S::zero())
    }
    fn variable(&self) -> Complex<S> {
        self.x.clone()
    }
    fn add(&self, a: &Complex<S>, b: &Complex<S>) -> Complex<S> {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &Complex<S>, b: &Complex<S>) -> Complex<S> {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &Complex<S>, b: &Complex<S>) -> Complex<S> {
        a.clone() * b.clone()
    }
    fn scale(&self, a: &Complex<S>, s: &S) -> Complex<S> {
        Complex::new(a.re.clone() * s.clone(), a.im.clone() * s.clone())
    }
    fn inverse(&self, a: &Complex<S>) -> Option<Complex<S>> {
        (!a.is_zero()).then(|| Complex::new(S::one(), S::zero()) / a.clone())
    }
    fn magnitude(&self, a: &Complex<S>) -> f64 {
        cnorm(a)
    }
    fn rel_tol(&self) -> f64 {
        self.rel_tol
    }
    fn split(&self, a: &Complex<S>, scale: f64) -> ZeroSplit<Self> {
        if cnorm(a) <= self.rel_tol * scale {
            ZeroSplit::Zero
        } else {
            ZeroSplit::NonZero
        }
    }
    fn total(&self, a: &Complex<S>) -> Complex<S> {
        a.clone()
    }
    fn point_count(&self) -> usize {
        1
    }
    fn points_c64(&self) -> Vec<Complex64> {
        vec![to_c64(&self.x)]
    }
    fn values_c64(&self, a: &Complex<S>) -> Vec<Complex64> {
        vec![to_c64(a)]
    }
    fn det(&self, m: &[Vec<Complex<S>>]) -> Complex<S> {
        complex_det(m)
    }
}

/// Determinant of a small complex matrix by partial pivoting.
pub fn complex_det<S: Scalar>(m: &[Vec<Complex<S>>]) -> Complex<S> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Complex::new(S::one(), S::zero());
    for col in 0..n {
        let (p, mag) = (col..n)
            .map(|i| (i, cnorm(&a[i][col])))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag == 0.0 {
            return Complex::new(S::zero(), S::zero());
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det = det * pivot.clone();
        for i in col + 1..n {
            let f = a[i][col].clone() / pivot.clone();
            for k in col..n {
                let t = f.clone() * a[col][k].clone();
                a[i][k] = a[i][k].clone() - t;
            }
        }
    }
    det
}

#[derive(Debug)]
struct ClassData {
    modulus: Polynomial<BigRational>,
    /// Power sums `Σ x_i^k` over the roots, `k < deg`.
    power_sums: Vec<BigRational>,
    approx: Vec<Complex64>,
}

/// All roots of a monic squarefree rational polynomial, handled symbolically.
#[derive(Clone, Debug)]
pub struct ResidueClass {
    data: Arc<ClassData>,
}

impl ResidueClass {
    /// `modulus` must be squarefree; `approx` are floating approximations of its
    /// roots (used for reporting only).
    pub fn new(modulus: Polynomial<BigRational>, approx: Vec<Complex64>) -> Self {
        let modulus = modulus.monic();
        let power_sums = newton_power_sums(&modulus);
        Self { data: Arc::new(ClassData { modulus, power_sums, approx }) }
    }

    pub fn modulus(&self) -> &Polynomial<BigRational> {
        &self.data.modulus
    }

    fn reduce(&self, p: Polynomial<BigRational>) -> Polynomial<BigRational> {
        if p.degree() >= self.data.modulus.degree() {
            p.rem(&self.data.modulus)
        } else {
            p
        }
    }

    fn child(&self, modulus: Polynomial<BigRational>, approx: Vec<Complex64>) -> Self {
        Self::new(modulus, approx)
    }

    /// Distributes the parent's approximate roots between the factors `g` and
    /// `h = f / g`, giving `g` the `deg g` roots where it is relatively smallest.
    fn distribute(&self, g: &Polynomial<BigRational>, h: &Polynomial<BigRational>) -> (Vec<Complex64>, Vec<Complex64>) {
        let gf = g.map(|c: &BigRational| rational_to_f64(c));
        let hf = h.map(|c: &BigRational| rational_to_f64(c));
        let mut scored: Vec<(f64, Complex64)> = self
            .data
            .approx
            .iter()
            .map(|&x| (relative_value(&gf, x) / relative_value(&hf, x).max(f64::MIN_POSITIVE), x))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = g.degree().unwrap_or(0).min(scored.len());
        let (left, right) = scored.split_at(k);
        (left.iter().map(|p| p.1).collect(), right.iter().map(|p| p.1).collect())
    }
}

fn relative_value(p: &Polynomial<f64>, x: Complex64) -> f64 {
    let mut v = Complex64::zero();
    let mut s = 0.0;
    for c in p.coeffs().iter().rev() {
        v = v * x + c;
        s = s * x.norm() + c.abs();
    }
    v.norm() / s.max(f64::MIN_POSITIVE)
}

/// Newton's identities for a monic polynomial: power sums `p_0..p_{d-1}`.
fn newton_power_sums(f: &Polynomial<BigRational>) -> Vec<BigRational> {
    let d = f.degree().unwrap_or(0);
    // f = x^d + c_{d-1} x^{d-1} + ... + c_0, e_k = (-1)^k c_{d-k}
    let c = |k: usize| f.coeff(d - k);
    let mut p = vec![BigRational::from_integer(d.into())];
    for k in 1..d {
        let mut acc = c(k) * BigRational::from_integer(k.into());
        for i in 1..k {
            acc += c(i) * &p[k - i];
        }
        p.push(-acc);
    }
    p
}

impl NodeDomain<BigRational> for ResidueClass {
    type Elem = Polynomial<BigRational>;
    type Total = BigRational;

    fn embed(&self, s: &BigRational) -> Self::Elem {
        Polynomial::constant(s.clone())
    }
    fn variable(&self) -> Self::Elem {
        self.reduce(Polynomial::monomial(1))
    }
    fn restrict(&self, a: &Self::Elem) -> Self::Elem {
        self.reduce(a.clone())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a + b
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a - b
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.reduce(a * b)
    }
    fn scale(&self, a: &Self::Elem, s: &BigRational) -> Self::Elem {
        a.scale(s)
    }
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let (g, s, _) = a.extended_gcd(&self.data.modulus);
        (g.degree() == Some(0)).then(|| self.reduce(s))
    }
    fn magnitude(&self, a: &Self::Elem) -> f64 {
        self.values_c64(a).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
    fn rel_tol(&self) -> f64 {
        0.0
    }
    fn split(&self, a: &Self::Elem, _scale: f64) -> ZeroSplit<Self> {
        if a.is_zero() {
            return ZeroSplit::Zero;
        }
        let g = a.gcd(&self.data.modulus);
        match g.degree() {
            Some(0) => ZeroSplit::NonZero,
            d if d == self.data.modulus.degree() => ZeroSplit::Zero,
            _ => {
                let h = self.data.modulus.div_rem(&g).0;
                let (ga, ha) = self.distribute(&g, &h);
                ZeroSplit::Mixed { zero: self.child(g, ga), nonzero: self.child(h, ha) }
            }
        }
    }
    fn total(&self, a: &Self::Elem) -> BigRational {
        a.coeffs()
            .iter()
            .zip(&self.data.power_sums)
            .fold(BigRational::zero(), |acc, (c, p)| acc + c * p)
    }
    fn point_count(&self) -> usize {
        self.data.modulus.degree().unwrap_or(0)
    }
    fn points_c64(&self) -> Vec<Complex64> {
        self.data.approx.clone()
    }
    fn values_c64(&self, a: &Self::Elem) -> Vec<Complex64> {
        let af = a.map(|c: &BigRational| rational_to_f64(c));
        self.data
            .approx
            .iter()
            .map(|&x| af.coeffs().iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn q(p: i64, d: i64) -> BigRational {
        ratio(p, d)
    }

    #[test]
    fn leibniz_matches_elimination() {
        let m = vec![
            vec![q(2, 1), q(-1, 3), q(5, 1)],
            vec![q(1, 2), q(4, 1), q(0, 1)],
            vec![q(-3, 1), q(1, 1), q(1, 7)],
        ];
        let dom = Point::new(q(0, 1));
        assert_eq!(leibniz_det(&dom, &m), BigRational::determinant(&m));
        let m4: Vec<Vec<BigRational>> =
            (0..4).map(|i| (0..4).map(|j| q(((i * 7 + j * 3) % 5) as i64 - 2, (j + 1) as i64)).collect()).collect();
        assert_eq!(leibniz_det(&dom, &m4), crate::linalg::det_by_elimination(&m4));
    }

    #[test]
    fn residue_class_trace_and_inverse() {
        // x^2 - x + 1/6, roots 1/2 ± 1/(2√3)
        let f = Polynomial::new(vec![q(1, 6), q(-1, 1), q(1, 1)]);
        let dom = ResidueClass::new(f, vec![]);
        let x = dom.variable();
        // Σ x_i = 1, Σ x_i^2 = 1 - 1/3 = 2/3
        assert_eq!(dom.total(&x), q(1, 1));
        assert_eq!(dom.total(&dom.mul(&x, &x)), q(2, 3));
        assert_eq!(dom.total(&dom.one()), q(2, 1));
        let inv = dom.inverse(&x).unwrap();
        assert_eq!(dom.mul(&inv, &x), dom.one());
    }

    #[test]
    fn residue_class_splits_on_partial_zero() {
        // (x - 1)(x - 2)(x - 3)
        let f = &(&Polynomial::linear(q(1, 1)) * &Polynomial::linear(q(2, 1))) * &Polynomial::linear(q(3, 1));
        let approx = vec![1.0, 2.0, 3.0].into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let dom = ResidueClass::new(f, approx);
        let a = dom.eval_poly(&Polynomial::linear(q(2, 1)));
        match dom.split(&a, 1.0) {
            ZeroSplit::Mixed { zero, nonzero } => {
                assert_eq!(zero.modulus(), &Polynomial::linear(q(2, 1)));
                assert_eq!(nonzero.point_count(), 2);
                assert_eq!(zero.points_c64(), vec![Complex64::new(2.0, 0.0)]);
                assert!(dom.inverse(&a).is_none());
            }
            other => panic!("expected a split, got {other:?}"),
        }
    }
}
