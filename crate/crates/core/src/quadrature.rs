//! Multiple Gaussian quadrature: `n` nodes at the zeros of `P_n` shared by `r`
//! weight vectors, one per measure.
//!
//! Weights come from the eigenvectors of `L_n` (the canonical route) and are
//! checked against integrals of the Lagrange basis. The rational backend runs
//! the whole pipeline on residue classes modulo `P_n`, so its weights are exact
//! polynomials in the node.

use num_complex::{Complex, Complex64};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::cdk::CDContext;
use crate::domain::{cnorm, to_c64, ComplexNode, NodeDomain, ResidueClass};
use crate::error::{Error, Result};
use crate::linalg::{solve_lower, solve_upper};
use crate::measures::{BackendTag, MeasureSystem, MomentProvider, MultiIndex};
use crate::mop::{moments_needed, type1_initials, type2_from_recurrence, Initials, MopSequence, Moments, RecurrenceTable, TAU_ZERO};
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::{f64_to_rational, rational_to_f64, DoubleDouble as DD, Rational, Scalar};
use crate::spectral::{build_hessenberg, eigen_nodes, eigen_pairs_in, EigenPair, LeftRoute, TAU_EIG, TAU_ZERO_DD};

/// Relative tolerance between the two weight routes.
pub const TAU_W: f64 = 1e-9;
/// Monomial exactness: `|Σ w x^d - m_d| <= TAU_EX_REL |m_d| + TAU_EX_ABS`.
pub const TAU_EX_REL: f64 = 1e-9;
pub const TAU_EX_ABS: f64 = 1e-12;
/// Degrees scanned past the guaranteed order.
pub const EXTRA_DEGREES: usize = 2;

/// `C_{j,k} = ∫ P_{k-1} dμ_j` for `1 <= k <= j <= r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CConstants<S> {
    /// `values[j-1][k-1]`, row `j` of length `j`.
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> CConstants<S> {
    pub fn r(&self) -> usize {
        self.values.len()
    }

    /// `C_{j,k}`, one-based; zero above the diagonal.
    pub fn get(&self, j: usize, k: usize) -> S {
        if k > j {
            S::zero()
        } else {
            self.values[j - 1][k - 1].clone()
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CConstants<T> {
        CConstants { values: self.values.iter().map(|row| row.iter().map(&f).collect()).collect() }
    }
}

/// `C_{j,k}` as moment sums over the coefficients of `P_{k-1}`, cross-checked
/// against `Σ_i (-1)^{k+i} m^{(j)}_{i-1} det D_k^{(k,i)} / det D_{k-1}`.
pub fn c_constants<S: Scalar>(system: &MeasureSystem, table: &RecurrenceTable<S>) -> Result<CConstants<S>> {
    let r = system.r();
    let polys = type2_from_recurrence(table, r - 1)?;
    let moments = Moments::<S>::new(system, r)?;
    let m = |j: usize, l: usize| moments.get(j, l).cloned();
    let mut values = Vec::with_capacity(r);
    for j in 1..=r {
        let row = (1..=j).map(|k| moments.integrate(&polys[k - 1], j - 1)).collect::<Result<Vec<S>>>()?;
        values.push(row);
    }
    for k in 1..=r {
        // rows 1..k-1 of D_k: measures 1..k-1, moments 0..k-1
        let upper: Vec<Vec<S>> = (0..k - 1).map(|j| (0..k).map(|l| m(j, l)).collect()).collect::<Result<_>>()?;
        let prev: Vec<Vec<S>> = upper.iter().map(|row| row[..k - 1].to_vec()).collect();
        let det_prev = if k == 1 { S::one() } else { S::determinant(&prev) };
        if det_prev.is_zero() {
            return Err(Error::NotNormal { n: k - 1, rank: S::rank(&prev, crate::measures::TAU_RANK) });
        }
        let cofactors: Vec<S> = (1..=k)
            .map(|i| {
                let minor: Vec<Vec<S>> =
                    upper.iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c + 1 != i).map(|(_, v)| v.clone()).collect()).collect();
                let d = if k == 1 { S::one() } else { S::determinant(&minor) };
                if (k + i) % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect();
        for j in k..=r {
            let mut acc = S::zero();
            let mut size = 0.0;
            for (i, cof) in cofactors.iter().enumerate() {
                let t = m(j - 1, i)? * cof.clone();
                size += t.to_f64_lossy().abs();
                acc = acc + t;
            }
            let by_det = acc / det_prev.clone();
            let by_sum = &values[j - 1][k - 1];
            let scale = by_sum.to_f64_lossy().abs().max(size / det_prev.to_f64_lossy().abs());
            if !(by_det - by_sum.clone()).negligible(scale, 1e-9) {
                return Err(Error::FormulaMismatch(format!("C_({j},{k}) by moment sums and by determinants")));
            }
        }
    }
    for j in 0..r {
        if values[j][j].is_zero() {
            return Err(Error::ZeroPivot(format!("C_({0},{0}) vanishes", j + 1)));
        }
    }
    Ok(CConstants { values })
}

/// `C` from the type I initial values: for each `i`, the lower-triangular
/// system `Σ_{j=i}^{m} A_{m,j} C_{j,i} = δ_{m,i}`, `m = i..r`.
pub fn c_from_a<S: Scalar>(initials: &Initials<S>) -> Result<CConstants<S>> {
    let r = initials.r();
    let a = |m: usize, j: usize| initials.values[m - 1][j - 1].clone();
    let mut values: Vec<Vec<S>> = (1..=r).map(|j| vec![S::zero(); j]).collect();
    for i in 1..=r {
        let lower: Vec<Vec<S>> = (i..=r).map(|m| (i..=r).map(|j| if j <= m { a(m, j) } else { S::zero() }).collect()).collect();
        let mut rhs = vec![S::zero(); r - i + 1];
        rhs[0] = S::one();
        let col = solve_lower(&lower, &rhs).map_err(|_| Error::SingularTriangular(i))?;
        for (t, c) in col.into_iter().enumerate() {
            values[i + t - 1][i - 1] = c;
        }
    }
    Ok(CConstants { values })
}

/// The type I initial values from `C`: for each `i`, the upper-triangular
/// system `Σ_{j=k}^{i} C_{j,k} A_{i,j} = δ_{k,i}`, `k = 1..i`.
pub fn a_from_c<S: Scalar>(c: &CConstants<S>) -> Result<Initials<S>> {
    let r = c.r();
    let mut values = vec![vec![S::zero(); r]; r];
    for i in 1..=r {
        let upper: Vec<Vec<S>> = (1..=i).map(|k| (1..=i).map(|j| c.get(j, k)).collect()).collect();
        let mut rhs = vec![S::zero(); i];
        rhs[i - 1] = S::one();
        let row = solve_upper(&upper, &rhs).map_err(|_| Error::SingularTriangular(i))?;
        for (j, v) in row.into_iter().enumerate() {
            values[i - 1][j] = v;
        }
    }
    Ok(Initials { values })
}

/// `w^{(j)} = ∫ ω(t) / ((t - x) ω'(x)) dμ_j` at the points `x` of `dom`, which
/// must be simple zeros of `ω`. `moments[j]` needs entries `0..deg ω`.
pub fn weights_interpolatory_in<S: Scalar, D: NodeDomain<S>>(
    dom: &D,
    omega: &Polynomial<S>,
    moments: &[Vec<S>],
) -> Result<Vec<D::Elem>> {
    let n = omega.degree().ok_or(Error::DuplicateNodes)?;
    let x = dom.variable();
    // ω(t) / (t - x) by synthetic division
    let c = omega.coeffs();
    let mut q = vec![dom.zero(); n];
    if n > 0 {
        q[n - 1] = dom.embed(&c[n]);
        for k in (1..n).rev() {
            q[k - 1] = dom.add(&dom.embed(&c[k]), &dom.mul(&x, &q[k]));
        }
    }
    let inv = dom.inverse(&dom.eval_poly(&omega.derivative())).ok_or(Error::DuplicateNodes)?;
    moments
        .iter()
        .map(|m| {
            if m.len() < n {
                return Err(Error::OutOfTable { measure: 0, index: n - 1, len: m.len() });
            }
            let acc = q.iter().zip(m).fold(dom.zero(), |acc, (qk, mk)| dom.add(&acc, &dom.scale(qk, mk)));
            Ok(dom.mul(&acc, &inv))
        })
        .collect()
}

/// Interpolatory weights `weights[j][ℓ]` for real nodes, computed exactly for
/// the binary values of the nodes and rounded once.
pub fn weights_interpolatory(system: &MeasureSystem, nodes: &[f64]) -> Result<Vec<Vec<f64>>> {
    let exact: Vec<Rational> = nodes.iter().map(|&x| f64_to_rational(x)).collect::<Result<_>>()?;
    let w = weights_interpolatory_exact(system, &exact)?;
    Ok(w.iter().map(|row| row.iter().map(rational_to_f64).collect()).collect())
}

/// Exact interpolatory weights at distinct rational nodes.
///
/// The nodes are put over a common denominator `D`, so that with `s = D t`
/// everything except the moments is an integer polynomial in `s` and the
/// rational gcds happen once per weight.
pub fn weights_interpolatory_exact(system: &MeasureSystem, nodes: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    for (a, x) in nodes.iter().enumerate() {
        if nodes[a + 1..].contains(x) {
            return Err(Error::DuplicateNodes);
        }
    }
    let n = nodes.len();
    let moments = system.moment_table::<Rational>(n)?;
    let d = nodes.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = nodes.iter().map(|x| x.numer() * (&d / x.denom())).collect();
    // ω_s(s) = Π (s - N_a), ascending coefficients
    let mut omega = vec![BigInt::one()];
    for na in &scaled {
        let mut next = vec![BigInt::zero(); omega.len() + 1];
        for (k, c) in omega.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * na;
        }
        omega = next;
    }
    // ∫ s^k dμ_j = D^k m_k over one denominator per measure
    let scaled_moments: Vec<(Vec<BigInt>, BigInt)> = moments
        .iter()
        .map(|m| {
            let denom = m[..n].iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let mut dk = BigInt::one();
            let numers = m[..n]
                .iter()
                .map(|v| {
                    let c = &dk * v.numer() * (&denom / v.denom());
                    dk *= &d;
                    c
                })
                .collect();
            (numers, denom)
        })
        .collect();
    let mut out = vec![Vec::with_capacity(n); system.r()];
    for (l, x) in scaled.iter().enumerate() {
        // ω_s(s) / (s - N_ℓ) by synthetic division
        let mut q = vec![BigInt::zero(); n];
        q[n - 1] = omega[n].clone();
        for k in (1..n).rev() {
            q[k - 1] = &omega[k] + x * &q[k];
        }
        let deriv = scaled.iter().enumerate().filter(|&(m, _)| m != l).fold(BigInt::one(), |acc, (_, y)| acc * (x - y));
        for (j, (numers, denom)) in scaled_moments.iter().enumerate() {
            let acc = q.iter().zip(numers).fold(BigInt::zero(), |acc, (qk, ck)| acc + qk * ck);
            out[j].push(Rational::new(acc, denom * &deriv));
        }
    }
    Ok(out)
}

/// `w^{(j)} = Σ_{k<=min(j,n)} C_{j,k} u(k) / (uᵀv)` for one eigenvector pair,
/// `j = 1..r`.
pub fn weights_spectral_in<S: Scalar, D: NodeDomain<S>>(pair: &EigenPair<S, D>, c: &CConstants<S>) -> Result<Vec<D::Elem>> {
    let dom = &pair.dom;
    let n = pair.right.len();
    let inner = pair.inner();
    // Σ |u_k v_k| is the smallest ‖D⁻¹u‖‖Dv‖ over diagonal scalings D, so the
    // test ignores the scaling of the monic basis
    let size: f64 = pair.left.iter().zip(&pair.right).map(|(u, v)| dom.magnitude(u) * dom.magnitude(v)).sum();
    if !S::EXACT && dom.magnitude(&inner) < TAU_ZERO * size {
        return Err(Error::DegenerateInnerProduct);
    }
    let inv = dom.inverse(&inner).ok_or(Error::DegenerateInnerProduct)?;
    let mut out = Vec::with_capacity(c.r());
    for j in 1..=c.r() {
        let acc = (1..=j.min(n)).fold(dom.zero(), |acc, k| dom.add(&acc, &dom.scale(&pair.left[k - 1], &c.get(j, k))));
        let w = dom.mul(&acc, &inv);
        // weights of the measures before k_ℓ vanish identically
        if j < pair.k && !dom.is_zero(&w, 0.0) {
            return Err(Error::FormulaMismatch(format!("w^({j}) should vanish below k = {}", pair.k)));
        }
        out.push(w);
    }
    Ok(out)
}

/// Spectral weights for a list of pairs: `[pair][j]`.
pub fn weights_spectral<S: Scalar, D: NodeDomain<S>>(pairs: &[EigenPair<S, D>], c: &CConstants<S>) -> Result<Vec<Vec<D::Elem>>> {
    pairs.iter().map(|p| weights_spectral_in(p, c)).collect()
}

/// Tolerances of the rule pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleOptions {
    pub tol_eig: f64,
    pub tol_w: f64,
}

impl Default for RuleOptions {
    fn default() -> Self {
        Self { tol_eig: TAU_EIG, tol_w: TAU_W }
    }
}

/// Exact weights on one factor of `P_n`: polynomials in the node, valid at
/// every root of `class.modulus()`.
#[derive(Clone, Debug)]
pub struct ExactPiece {
    pub class: ResidueClass,
    /// `weights[j]`, reduced modulo the factor.
    pub weights: Vec<Polynomial<Rational>>,
    pub k: usize,
    pub i: usize,
    pub route: LeftRoute,
    /// Positions of the roots of this factor in [`QuadratureRule::nodes`].
    pub nodes: Vec<usize>,
}

/// The exact content of a rational rule.
#[derive(Clone, Debug)]
pub struct ExactRule {
    /// `P_n`; the nodes are its roots.
    pub node_polynomial: Polynomial<Rational>,
    pub pieces: Vec<ExactPiece>,
}

/// Monomial exactness of a rule, one row per measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessCertificate {
    /// `n - 1 + ν_n(j)`.
    pub guaranteed: Vec<usize>,
    /// Largest `d` with every degree up to `d` passing, within the scanned range.
    pub observed: Vec<usize>,
    /// `residuals[j][d] = |Σ_ℓ w^{(j)}_ℓ x_ℓ^d - m^{(j)}_d|`.
    pub residuals: Vec<Vec<f64>>,
    pub passes: Vec<Vec<bool>>,
    /// `∫ P_n Σ_j A_{n+1,j} dμ_j - Σ_ℓ P_n(x_ℓ) Σ_j A_{n+1,j}(x_ℓ) w^{(j)}_ℓ`,
    /// which is 1 for a rule of exactly the guaranteed vector order. `None`
    /// when `ν_{n+1}` is not normal.
    pub witness_gap: Option<f64>,
    /// Residuals and witness computed in exact arithmetic.
    pub exact: bool,
    /// Every degree up to the guaranteed order passes.
    pub holds: bool,
}

impl ExactnessCertificate {
    /// Degrees beyond the guaranteed order that still pass.
    pub fn beyond_guaranteed(&self, j: usize) -> Vec<usize> {
        (self.guaranteed[j] + 1..self.passes[j].len()).filter(|&d| self.passes[j][d]).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vector_order": self.guaranteed,
            "observed_order": self.observed,
            "holds": self.holds,
            "exact": self.exact,
            "witness_gap": self.witness_gap,
            "residuals": self.residuals.iter().enumerate().map(|(j, row)| {
                (format!("measure_{}", j + 1), json!(row))
            }).collect::<serde_json::Map<String, Value>>(),
        })
    }
}

/// A multiple Gaussian quadrature rule in double precision, with the exact
/// rule attached for the rational backend.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub n: usize,
    pub r: usize,
    pub backend: BackendTag,
    /// Sorted by real part, then imaginary part.
    pub nodes: Vec<Complex64>,
    /// All nodes real (imaginary parts are then exactly zero).
    pub real: bool,
    /// `weights[j][ℓ]`.
    pub weights: Vec<Vec<Complex64>>,
    pub weight_sums: Vec<Complex64>,
    /// Low parts of the double-double nodes and weights, so that
    /// `nodes + nodes_lo` carries about 32 digits. Zero for rational rules.
    pub nodes_lo: Vec<Complex64>,
    pub weights_lo: Vec<Vec<Complex64>>,
    /// Per node: first nonzero left eigenvector component and CD index.
    pub k: Vec<usize>,
    pub i: Vec<usize>,
    pub routes: Vec<LeftRoute>,
    /// Largest relative difference between spectral and interpolatory weights.
    pub route_gap: f64,
    pub min_gap: f64,
    pub exact: Option<ExactRule>,
    pub certificate: ExactnessCertificate,
}

impl QuadratureRule {
    pub fn real_nodes(&self) -> Vec<f64> {
        self.nodes.iter().map(|z| z.re).collect()
    }

    pub fn real_weights(&self) -> Vec<Vec<f64>> {
        self.weights.iter().map(|w| w.iter().map(|z| z.re).collect()).collect()
    }

    /// `Σ_ℓ w^{(j)}_ℓ f(x_ℓ)`.
    pub fn apply(&self, j: usize, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights[j]).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn to_json(&self) -> Value {
        let num = |z: &Complex64| if self.real { json!(z.re) } else { json!([z.re, z.im]) };
        let mut v = json!({
            "n": self.n,
            "r": self.r,
            "backend": self.backend.name(),
            "real": self.real,
            "nodes": self.nodes.iter().map(num).collect::<Vec<_>>(),
            "weights": self.weights.iter().map(|w| w.iter().map(num).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "weight_sums": self.weight_sums.iter().map(num).collect::<Vec<_>>(),
            "k": self.k,
            "i": self.i,
            "route_gap": self.route_gap,
            "certificate": self.certificate.to_json(),
        });
        if let Some(exact) = &self.exact {
            let poly = |p: &Polynomial<Rational>| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
            v["exact"] = json!({
                "node_polynomial": poly(&exact.node_polynomial),
                "pieces": exact.pieces.iter().map(|p| json!({
                    "modulus": poly(p.class.modulus()),
                    "weights": p.weights.iter().map(poly).collect::<Vec<_>>(),
                    "k": p.k,
                    "i": p.i,
                    "nodes": p.nodes,
                })).collect::<Vec<_>>(),
            });
        }
        v
    }

    /// One CSV row per node: `node, w1, .., wr` (real part and imaginary part
    /// columns for complex rules).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let fmt = |x: f64| format!("{x:.16e}");
        if self.real {
            out.push_str("node");
            for j in 1..=self.r {
                out.push_str(&format!(",w{j}"));
            }
            out.push('\n');
            for (l, x) in self.nodes.iter().enumerate() {
                out.push_str(&fmt(x.re));
                for w in &self.weights {
                    out.push(',');
                    out.push_str(&fmt(w[l].re));
                }
                out.push('\n');
            }
        } else {
            out.push_str("node_re,node_im");
            for j in 1..=self.r {
                out.push_str(&format!(",w{j}_re,w{j}_im"));
            }
            out.push('\n');
            for (l, x) in self.nodes.iter().enumerate() {
                out.push_str(&format!("{},{}", fmt(x.re), fmt(x.im)));
                for w in &self.weights {
                    out.push_str(&format!(",{},{}", fmt(w[l].re), fmt(w[l].im)));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Everything that does not depend on the backend: the exact polynomial
/// sequences, initial values, `C` and the moments. One builder serves every
/// `n` up to the size it was built for.
#[derive(Clone, Debug)]
pub struct RuleBuilder {
    system: MeasureSystem,
    seq: MopSequence<Rational>,
    stop: Option<Error>,
    initials: Initials<Rational>,
    c: CConstants<Rational>,
    moments: Moments<Rational>,
}

impl RuleBuilder {
    /// Builds the recurrence exactly up to row `n_max + r - 1`, or as far as
    /// normality allows.
    pub fn new(system: &MeasureSystem, n_max: usize) -> Result<Self> {
        let r = system.r();
        let (seq, stop) = MopSequence::<Rational>::longest(system, n_max + r - 1)?;
        if let Some(e) = &stop {
            log::info!("recurrence stops after {} rows: {e}", seq.table.len());
        }
        let initials = type1_initials::<Rational>(system)?;
        let c = c_constants(system, &seq.table)?;
        if a_from_c(&c)? != initials {
            return Err(Error::FormulaMismatch("C and the type I initial values violate the triangular relations".into()));
        }
        let moments = Moments::new(system, moments_needed(n_max, r))?;
        Ok(Self { system: system.clone(), seq, stop, initials, c, moments })
    }

    pub fn system(&self) -> &MeasureSystem {
        &self.system
    }

    pub fn table(&self) -> &RecurrenceTable<Rational> {
        &self.seq.table
    }

    pub fn sequence(&self) -> &MopSequence<Rational> {
        &self.seq
    }

    pub fn initials(&self) -> &Initials<Rational> {
        &self.initials
    }

    pub fn c_constants(&self) -> &CConstants<Rational> {
        &self.c
    }

    /// The largest `n` whose rule can be built.
    pub fn max_n(&self) -> usize {
        self.seq.table.len()
    }

    fn require(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidSystem("a rule needs n >= 1".into()));
        }
        if self.seq.table.len() < n {
            return Err(self.stop.clone().unwrap_or(Error::TableTooShort { needed: n - 1, available: self.seq.table.len() }));
        }
        Ok(())
    }

    pub fn rule(&self, n: usize, backend: BackendTag, opts: RuleOptions) -> Result<QuadratureRule> {
        self.require(n)?;
        let mut rule = match backend {
            BackendTag::Rational => self.rational_rule(n, opts)?,
            BackendTag::Float64 => self.float_rule(n, opts)?,
        };
        rule.certificate = self.certificate(&rule)?;
        Ok(rule)
    }

    fn float_rule(&self, n: usize, opts: RuleOptions) -> Result<QuadratureRule> {
        let r = self.system.r();
        let table = self.seq.table.map(DD::from_rational);
        let l = build_hessenberg(&table, n)?;
        let nodes = eigen_nodes(&l, &table)?;
        if !nodes.all_simple() {
            return Err(Error::NonSimpleZeros { n, gap: nodes.min_gap });
        }
        let ctx = CDContext::new(table, self.initials.map(DD::from_rational), n)?;
        let c = self.c.map(DD::from_rational);
        let mut spectral = vec![Vec::with_capacity(n); r];
        let (mut ks, mut is, mut routes) = (Vec::new(), Vec::new(), Vec::new());
        for x in &nodes.values {
            let dom = ComplexNode::new(x.clone(), TAU_ZERO_DD);
            let pair = eigen_pairs_in(&ctx, &l, &dom, opts.tol_eig)?.into_iter().next().ok_or(Error::NoValidIndex)?;
            for (j, w) in weights_spectral_in(&pair, &c)?.into_iter().enumerate() {
                spectral[j].push(w);
            }
            ks.push(pair.k);
            is.push(pair.i);
            routes.push(pair.route);
        }

        let interpolatory: Vec<Vec<Complex<DD>>> = if nodes.real {
            let exact: Vec<Rational> = nodes.values.iter().map(|z| dyadic(z.re)).collect::<Result<_>>()?;
            let w = weights_interpolatory_exact(&self.system, &exact)?;
            w.iter().map(|row| row.iter().map(|v| Complex::new(DD::from_rational(v), DD::zero())).collect()).collect()
        } else {
            let omega = self.seq.type2[n].map(DD::from_rational);
            let moments: Vec<Vec<DD>> = (0..r)
                .map(|j| (0..n).map(|d| self.moments.get(j, d).map(DD::from_rational)).collect())
                .collect::<Result<_>>()?;
            let mut out = vec![Vec::with_capacity(n); r];
            for x in &nodes.values {
                let w = weights_interpolatory_in(&ComplexNode::new(x.clone(), TAU_ZERO), &omega, &moments)?;
                for (j, v) in w.into_iter().enumerate() {
                    out[j].push(v);
                }
            }
            out
        };
        let size = spectral.iter().flatten().map(cnorm).fold(0.0, f64::max);
        let route_gap = spectral
            .iter()
            .flatten()
            .zip(interpolatory.iter().flatten())
            .map(|(a, b)| cnorm(&(a.clone() - b.clone())))
            .fold(0.0, f64::max)
            / size.max(f64::MIN_POSITIVE);
        if !(route_gap <= opts.tol_w) {
            return Err(Error::WeightMismatch { gap: route_gap, tol: opts.tol_w });
        }
        let weight_sums = spectral.iter().map(|w| to_c64(&w.iter().fold(czero(), |acc, v| acc + v.clone()))).collect();
        let mut weights: Vec<Vec<Complex64>> = spectral.iter().map(|w| w.iter().map(to_c64).collect()).collect();
        let node_values: Vec<Complex64> = nodes.as_c64();
        let mut weights_lo: Vec<Vec<Complex64>> = spectral.iter().map(|w| w.iter().map(low_part).collect()).collect();
        let nodes_lo: Vec<Complex64> = nodes.values.iter().map(low_part).collect();
        if nodes.real {
            for w in weights.iter_mut().chain(weights_lo.iter_mut()).flatten() {
                w.im = 0.0;
            }
        }
        Ok(QuadratureRule {
            n,
            r,
            backend: BackendTag::Float64,
            nodes: node_values,
            real: nodes.real,
            weights,
            weight_sums,
            nodes_lo,
            weights_lo,
            k: ks,
            i: is,
            routes,
            route_gap,
            min_gap: nodes.min_gap,
            exact: None,
            certificate: empty_certificate(),
        })
    }

    fn rational_rule(&self, n: usize, opts: RuleOptions) -> Result<QuadratureRule> {
        let r = self.system.r();
        let p_n = self.seq.type2[n].clone();
        if p_n.gcd(&p_n.derivative()).degree() != Some(0) {
            return Err(Error::NonSimpleZeros { n, gap: 0.0 });
        }
        // floating nodes, to label the roots of each factor
        let table_dd = self.seq.table.map(DD::from_rational);
        let approx = eigen_nodes(&build_hessenberg(&table_dd, n)?, &table_dd)?;
        let node_values = approx.as_c64();
        let class = ResidueClass::new(p_n.clone(), node_values.clone());
        let ctx = CDContext::new(self.seq.table.clone(), self.initials.clone(), n)?;
        let l = build_hessenberg(&self.seq.table, n)?;
        let pairs = eigen_pairs_in(&ctx, &l, &class, opts.tol_eig)?;
        let moments: Vec<Vec<Rational>> =
            (0..r).map(|j| (0..n).map(|d| self.moments.get(j, d).cloned()).collect()).collect::<Result<_>>()?;
        let interpolatory = weights_interpolatory_in(&class, &p_n, &moments)?;

        let mut pieces = Vec::new();
        let mut owner = vec![None; n];
        for pair in &pairs {
            let w = weights_spectral_in(pair, &self.c)?;
            for (j, wj) in w.iter().enumerate() {
                let diff = pair.dom.sub(&pair.dom.restrict(&interpolatory[j]), wj);
                if !diff.is_zero() {
                    let gap = pair.dom.magnitude(&diff).max(f64::MIN_POSITIVE);
                    return Err(Error::WeightMismatch { gap, tol: 0.0 });
                }
            }
            let mut positions = Vec::new();
            for z in pair.dom.points_c64() {
                let pos = node_values
                    .iter()
                    .enumerate()
                    .position(|(t, v)| v.re.to_bits() == z.re.to_bits() && v.im.to_bits() == z.im.to_bits() && owner[t].is_none())
                    .ok_or_else(|| Error::FormulaMismatch("a factor of P_n lost track of its roots".into()))?;
                owner[pos] = Some(pieces.len());
                positions.push(pos);
            }
            pieces.push(ExactPiece { class: pair.dom.clone(), weights: w, k: pair.k, i: pair.i, route: pair.route, nodes: positions });
        }
        if owner.iter().any(Option::is_none) {
            return Err(Error::FormulaMismatch("the factors of P_n do not cover every node".into()));
        }

        let mut weights = vec![vec![Complex64::new(0.0, 0.0); n]; r];
        let mut weights_lo = weights.clone();
        let (mut ks, mut is, mut routes) = (vec![0; n], vec![0; n], vec![LeftRoute::Determinant; n]);
        for piece in &pieces {
            for &pos in &piece.nodes {
                let x = &approx.values[pos];
                for (j, w) in piece.weights.iter().enumerate() {
                    let value = eval_complex(w, x);
                    let (mut v, mut lo) = (to_c64(&value), low_part(&value));
                    if approx.real {
                        v.im = 0.0;
                        lo.im = 0.0;
                    }
                    weights[j][pos] = v;
                    weights_lo[j][pos] = lo;
                }
                ks[pos] = piece.k;
                is[pos] = piece.i;
                routes[pos] = piece.route;
            }
        }
        let weight_sums = (0..r)
            .map(|j| {
                let total = pieces.iter().fold(Rational::zero(), |acc, p| acc + p.class.total(&p.weights[j]));
                Complex64::new(rational_to_f64(&total), 0.0)
            })
            .collect();
        Ok(QuadratureRule {
            n,
            r,
            backend: BackendTag::Rational,
            nodes: node_values,
            real: approx.real,
            weights,
            weight_sums,
            nodes_lo: approx.values.iter().map(low_part).collect(),
            weights_lo,
            k: ks,
            i: is,
            routes,
            route_gap: 0.0,
            min_gap: approx.min_gap,
            exact: Some(ExactRule { node_polynomial: p_n, pieces }),
            certificate: empty_certificate(),
        })
    }

    /// Monomial exactness up to two degrees past `n - 1 + ν_n(j)`, and the
    /// witness functional built from `P_n` and `A_{n+1}`.
    pub fn certificate(&self, rule: &QuadratureRule) -> Result<ExactnessCertificate> {
        let (n, r) = (rule.n, rule.r);
        self.require(n)?;
        let nu = MultiIndex::proper(n, r);
        let guaranteed: Vec<usize> = nu.components.iter().map(|c| n - 1 + c).collect();
        let p_n = &self.seq.type2[n];
        let a_next = self.seq.type1.get(n + 1);
        let mut residuals = vec![Vec::new(); r];
        let mut passes = vec![Vec::new(); r];
        let witness_gap;
        match &rule.exact {
            Some(exact) => {
                for j in 0..r {
                    for d in 0..=guaranteed[j] + EXTRA_DEGREES {
                        let m = match self.moments.get(j, d) {
                            Ok(m) => m.clone(),
                            Err(e) if d <= guaranteed[j] => return Err(e),
                            Err(_) => break,
                        };
                        let quad = exact.pieces.iter().fold(Rational::zero(), |acc, p| {
                            let xd = power(&p.class, d);
                            acc + p.class.total(&p.class.mul(&p.weights[j], &xd))
                        });
                        let res = quad - m;
                        residuals[j].push(if res.is_zero() { 0.0 } else { rational_to_f64(&res).abs().max(f64::MIN_POSITIVE) });
                        passes[j].push(res.is_zero());
                    }
                }
                witness_gap = match a_next {
                    Some(a) => {
                        let integral = self.moments.pairing(p_n, a)?;
                        let quad = exact.pieces.iter().fold(Rational::zero(), |acc, p| {
                            let f = p.class.eval_poly(p_n);
                            let combo = (0..r).fold(p.class.zero(), |acc, j| {
                                let aj = p.class.eval_poly(&a.components[j]);
                                p.class.add(&acc, &p.class.mul(&aj, &p.weights[j]))
                            });
                            acc + p.class.total(&p.class.mul(&f, &combo))
                        });
                        Some(rational_to_f64(&(integral - quad)))
                    }
                    None => None,
                };
            }
            None => {
                let xs: Vec<Complex<DD>> = rule.nodes.iter().map(|z| Complex::new(DD::from_f64(z.re), DD::from_f64(z.im))).collect();
                for j in 0..r {
                    let ws: Vec<Complex<DD>> =
                        rule.weights[j].iter().map(|z| Complex::new(DD::from_f64(z.re), DD::from_f64(z.im))).collect();
                    let mut powers: Vec<Complex<DD>> = vec![Complex::new(DD::one(), DD::zero()); rule.n];
                    for d in 0..=guaranteed[j] + EXTRA_DEGREES {
                        let m = match self.moments.get(j, d) {
                            Ok(m) => DD::from_rational(m),
                            Err(e) if d <= guaranteed[j] => return Err(e),
                            Err(_) => break,
                        };
                        let quad = ws.iter().zip(&powers).fold(czero(), |acc, (w, p)| acc + w.clone() * p.clone());
                        let res = cnorm(&(quad - Complex::new(m, DD::zero())));
                        residuals[j].push(res);
                        passes[j].push(res <= TAU_EX_REL * m.to_f64_lossy().abs() + TAU_EX_ABS);
                        for (p, x) in powers.iter_mut().zip(&xs) {
                            *p = p.clone() * x.clone();
                        }
                    }
                }
                witness_gap = match a_next {
                    Some(a) => {
                        let integral = DD::from_rational(&self.moments.pairing(p_n, a)?);
                        let p_dd = p_n.map(DD::from_rational);
                        let a_dd: VectorPolynomial<DD> = a.map(DD::from_rational);
                        let mut quad = czero();
                        for (l, x) in xs.iter().enumerate() {
                            let combo = (0..r).fold(czero(), |acc, j| {
                                let w = &rule.weights[j][l];
                                acc + eval_complex_dd(&a_dd.components[j], x) * Complex::new(DD::from_f64(w.re), DD::from_f64(w.im))
                            });
                            quad = quad + eval_complex_dd(&p_dd, x) * combo;
                        }
                        Some(to_c64(&(Complex::new(integral, DD::zero()) - quad)).re)
                    }
                    None => None,
                };
            }
        }
        let observed = passes.iter().map(|row| row.iter().take_while(|&&p| p).count().saturating_sub(1)).collect::<Vec<_>>();
        let holds = passes.iter().zip(&guaranteed).all(|(row, &g)| row.iter().take(g + 1).all(|&p| p));
        Ok(ExactnessCertificate { guaranteed, observed, residuals, passes, witness_gap, exact: rule.exact.is_some(), holds })
    }

    /// The discrete system `μ_{j,n} = Σ_ℓ w^{(j)}_ℓ δ_{x_ℓ}` of a rule. Rational
    /// rules give exact moment tables (the nodes are algebraic); floating
    /// rules give point masses at the binary values of nodes and weights.
    pub fn discrete_reconstruction(&self, rule: &QuadratureRule) -> Result<MeasureSystem> {
        discrete_reconstruction(rule)
    }
}

/// See [`RuleBuilder::discrete_reconstruction`].
pub fn discrete_reconstruction(rule: &QuadratureRule) -> Result<MeasureSystem> {
    let providers = match &rule.exact {
        Some(exact) => {
            let count = moments_needed(rule.n, rule.r);
            (0..rule.r)
                .map(|j| {
                    let table = (0..count)
                        .map(|d| {
                            exact.pieces.iter().fold(Rational::zero(), |acc, p| {
                                acc + p.class.total(&p.class.mul(&p.weights[j], &power(&p.class, d)))
                            })
                        })
                        .collect();
                    MomentProvider::Table(table)
                })
                .collect()
        }
        None => {
            if !rule.real {
                return Err(Error::ComplexNodes);
            }
            let points: Vec<Rational> = rule.nodes.iter().map(|z| f64_to_rational(z.re)).collect::<Result<_>>()?;
            rule.weights
                .iter()
                .map(|w| {
                    let masses = w.iter().map(|z| f64_to_rational(z.re)).collect::<Result<_>>()?;
                    MomentProvider::discrete(points.clone(), masses)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(MeasureSystem::new(providers)?.with_backend(rule.backend))
}

/// Recurrence rows `0..rows-1` of the discrete system `μ_m = Σ_ℓ masses[m][ℓ] δ_{points[ℓ]}`
/// by a discretized Stieltjes procedure: `P_k` and `A_k` are carried as values
/// at the points and every `a_{k,j} = ∫ x P_k Σ_m A_{k+1-j,m} dμ_m` is a finite
/// sum. No moments are formed.
pub fn discrete_recurrence<S: Scalar>(points: &[S], masses: &[Vec<S>], rows: usize) -> Result<RecurrenceTable<S>> {
    let r = masses.len();
    let len = points.len();
    let pair = |f: &[S], g: &[Vec<S>]| -> S {
        (0..r).fold(S::zero(), |acc, m| {
            (0..len).fold(acc, |acc, l| acc + masses[m][l].clone() * f[l].clone() * g[m][l].clone())
        })
    };
    let times_x = |f: &[S]| -> Vec<S> { f.iter().zip(points).map(|(v, x)| v.clone() * x.clone()).collect() };
    // A_1..A_r are constants fixed by Σ_m A_{i,m} m^{(m)}_ℓ = δ_{ℓ,i-1}, ℓ < i
    let moment = |m: usize, d: usize| -> S {
        (0..len).fold(S::zero(), |acc, l| acc + masses[m][l].clone() * num_traits::pow(points[l].clone(), d))
    };
    let mut a_vals: Vec<Vec<Vec<S>>> = vec![vec![vec![S::zero(); len]; r]];
    for i in 1..=r.min(rows) {
        let system: Vec<Vec<S>> = (0..i).map(|ell| (0..i).map(|m| moment(m, ell)).collect()).collect();
        let mut rhs = vec![S::zero(); i];
        rhs[i - 1] = S::one();
        let coeffs = crate::linalg::solve(&system, &rhs)?;
        a_vals.push((0..r).map(|m| vec![if m < i { coeffs[m].clone() } else { S::zero() }; len]).collect());
    }
    let mut p_vals: Vec<Vec<S>> = vec![vec![S::one(); len]];
    let mut table: Vec<Vec<S>> = Vec::with_capacity(rows);
    for k in 0..rows {
        let xp = times_x(&p_vals[k]);
        let mut row = vec![S::zero(); r.min(k) + 1];
        for j in 1..row.len() {
            row[j] = pair(&xp, &a_vals[k + 1 - j]);
        }
        if k + 1 > r {
            let pivot = row[r].clone();
            if pivot.is_zero() {
                return Err(Error::ZeroPivot(format!("a_({k},{r}) of the discrete system vanishes")));
            }
            let base = k + 1 - r;
            let next: Vec<Vec<S>> = (0..r)
                .map(|m| {
                    (0..len)
                        .map(|l| {
                            let mut acc = points[l].clone() * a_vals[base][m][l].clone() - a_vals[base - 1][m][l].clone();
                            for j in 0..r {
                                acc = acc - table[base + j - 1][j].clone() * a_vals[base + j][m][l].clone();
                            }
                            acc / pivot.clone()
                        })
                        .collect()
                })
                .collect();
            a_vals.push(next);
        }
        row[0] = pair(&xp, &a_vals[k + 1]);
        let next_p: Vec<S> = (0..len)
            .map(|l| row.iter().enumerate().fold(xp[l].clone(), |acc, (j, a)| acc - a.clone() * p_vals[k - j][l].clone()))
            .collect();
        p_vals.push(next_p);
        table.push(row);
    }
    RecurrenceTable::new(r, table)
}

/// Largest relative difference between rows `0..n-1` of the recurrence of the
/// reconstructed discrete system and `table`. Zero means an exact round trip.
/// Rational rules rebuild the recurrence exactly from the moments of the
/// discrete system; floating rules use [`discrete_recurrence`] in
/// double-double.
pub fn reconstruction_gap(rule: &QuadratureRule, table: &RecurrenceTable<Rational>) -> Result<f64> {
    table.require_rows(rule.n)?;
    let rebuilt: Vec<Vec<f64>> = if rule.exact.is_some() {
        let discrete = discrete_reconstruction(rule)?;
        let rebuilt = MopSequence::<Rational>::from_moments(&discrete, rule.n - 1)?.table;
        let mut gap = 0.0_f64;
        for (a, b) in rebuilt.rows().iter().zip(&table.rows()[..rule.n]) {
            for (x, y) in a.iter().zip(b) {
                let diff = x - y;
                if !diff.is_zero() {
                    let d = rational_to_f64(&diff).abs();
                    let s = rational_to_f64(y).abs();
                    gap = gap.max(if s > 0.0 { d / s } else { d.max(f64::MIN_POSITIVE) });
                }
            }
        }
        return Ok(gap);
    } else {
        if !rule.real {
            return Err(Error::ComplexNodes);
        }
        let join = |hi: &Complex64, lo: &Complex64| DD::from_parts(hi.re, lo.re);
        let points: Vec<DD> = rule.nodes.iter().zip(&rule.nodes_lo).map(|(h, l)| join(h, l)).collect();
        let masses: Vec<Vec<DD>> = rule
            .weights
            .iter()
            .zip(&rule.weights_lo)
            .map(|(w, lo)| w.iter().zip(lo).map(|(h, l)| join(h, l)).collect())
            .collect();
        discrete_recurrence(&points, &masses, rule.n)?.rows().iter().map(|row| row.iter().map(|v| v.to_f64_lossy()).collect()).collect()
    };
    let mut gap = 0.0_f64;
    for (a, b) in rebuilt.iter().zip(&table.rows()[..rule.n]) {
        for (x, y) in a.iter().zip(b) {
            let y = rational_to_f64(y);
            let d = (x - y).abs();
            gap = gap.max(if y != 0.0 { d / y.abs() } else { d });
        }
    }
    Ok(gap)
}

/// The rule for `system` at `n` in the backend named by the system.
pub fn build_rule(system: &MeasureSystem, n: usize) -> Result<QuadratureRule> {
    RuleBuilder::new(system, n)?.rule(n, system.backend, RuleOptions::default())
}

/// Recomputes the exactness certificate of `rule` against `system`.
pub fn verify_vector_order(rule: &QuadratureRule, system: &MeasureSystem) -> Result<ExactnessCertificate> {
    RuleBuilder::new(system, rule.n)?.certificate(rule)
}

/// `z - to_c64(z)`, the part of a double-double value below `f64` precision.
fn low_part(z: &Complex<DD>) -> Complex64 {
    let hi = to_c64(z);
    Complex64::new((z.re - DD::from_f64(hi.re)).to_f64_lossy(), (z.im - DD::from_f64(hi.im)).to_f64_lossy())
}

fn empty_certificate() -> ExactnessCertificate {
    ExactnessCertificate {
        guaranteed: Vec::new(),
        observed: Vec::new(),
        residuals: Vec::new(),
        passes: Vec::new(),
        witness_gap: None,
        exact: false,
        holds: false,
    }
}

fn czero() -> Complex<DD> {
    Complex::new(DD::zero(), DD::zero())
}

/// `hi + lo` as an exact rational.
fn dyadic(x: DD) -> Result<Rational> {
    Ok(f64_to_rational(x.hi())? + f64_to_rational(x.lo())?)
}

fn power(class: &ResidueClass, d: usize) -> Polynomial<Rational> {
    let x = class.variable();
    (0..d).fold(class.one(), |acc, _| class.mul(&acc, &x))
}

fn eval_complex(p: &Polynomial<Rational>, x: &Complex<DD>) -> Complex<DD> {
    eval_complex_dd(&p.map(DD::from_rational), x)
}

fn eval_complex_dd(p: &Polynomial<DD>, x: &Complex<DD>) -> Complex<DD> {
    p.coeffs().iter().rev().fold(czero(), |acc, c| acc * x.clone() + Complex::new(*c, DD::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    #[test]
    fn sys_a_c_constants() {
        let sys = MeasureSystem::sys_a();
        let b = RuleBuilder::new(&sys, 2).unwrap();
        assert_eq!(b.c_constants().values, vec![vec![q(1, 1)], vec![q(1, 2), q(1, 12)]]);
        let c = c_from_a(b.initials()).unwrap();
        assert_eq!(&c, b.c_constants());
        assert_eq!(a_from_c(&c).unwrap().values, vec![vec![q(1, 1), q(0, 1)], vec![q(-6, 1), q(12, 1)]]);
    }

    #[test]
    fn one_measure_c_is_the_mass() {
        let sys = MeasureSystem::jacobi_pineiro(1);
        let b = RuleBuilder::new(&sys, 1).unwrap();
        assert_eq!(b.c_constants().values, vec![vec![q(1, 1)]]);
        assert_eq!(c_from_a(b.initials()).unwrap().values[0][0], q(1, 1) / b.initials().values[0][0].clone());
    }

    #[test]
    fn singular_triangle_is_reported() {
        let c = CConstants { values: vec![vec![q(1, 1)], vec![q(1, 2), q(0, 1)]] };
        assert_eq!(a_from_c(&c), Err(Error::SingularTriangular(2)));
    }

    #[test]
    fn sys_a_interpolatory_weights() {
        let h = 0.5 / 3f64.sqrt();
        let w = weights_interpolatory(&MeasureSystem::sys_a(), &[0.5 - h, 0.5 + h]).unwrap();
        let s = 3f64.sqrt() / 12.0;
        assert!((w[0][0] - 0.5).abs() < 1e-15 && (w[0][1] - 0.5).abs() < 1e-15);
        assert!((w[1][0] - (0.25 - s)).abs() < 1e-15 && (w[1][1] - (0.25 + s)).abs() < 1e-15);
        let one = weights_interpolatory(&MeasureSystem::sys_a(), &[0.3]).unwrap();
        assert_eq!((one[0][0], one[1][0]), (1.0, 0.5));
        assert_eq!(weights_interpolatory(&MeasureSystem::sys_a(), &[0.3, 0.3]), Err(Error::DuplicateNodes));
    }

    #[test]
    fn sys_a_rule_in_both_backends() {
        let sys = MeasureSystem::sys_a();
        let b = RuleBuilder::new(&sys, 2).unwrap();
        let h = 0.5 / 3f64.sqrt();
        let s = 3f64.sqrt() / 12.0;
        for backend in [BackendTag::Float64, BackendTag::Rational] {
            let rule = b.rule(2, backend, RuleOptions::default()).unwrap();
            assert!(rule.real);
            let x = rule.real_nodes();
            let w = rule.real_weights();
            assert!((x[0] - (0.5 - h)).abs() < 1e-15 && (x[1] - (0.5 + h)).abs() < 1e-15);
            assert!((w[0][0] - 0.5).abs() < 1e-15 && (w[0][1] - 0.5).abs() < 1e-15);
            assert!((w[1][0] - (0.25 - s)).abs() < 1e-15 && (w[1][1] - (0.25 + s)).abs() < 1e-15);
            let cert = &rule.certificate;
            assert!(cert.holds);
            assert_eq!(cert.guaranteed, vec![2, 2]);
            // j = 1 stays exact at degree 3 by coincidence; j = 2 does not
            assert_eq!(cert.beyond_guaranteed(0), vec![3]);
            assert!(!cert.passes[1][3]);
        }
        let exact = b.rule(2, BackendTag::Rational, RuleOptions::default()).unwrap().exact.unwrap();
        assert_eq!(exact.pieces.len(), 1);
        assert_eq!(exact.pieces[0].weights, vec![Polynomial::constant(q(1, 2)), Polynomial::new(vec![q(0, 1), q(1, 2)])]);
    }

    #[test]
    fn sys_a_degree_three_quadrature_value() {
        let rule = build_rule(&MeasureSystem::sys_a(), 2).unwrap();
        let v = rule.apply(1, |x| x * x * x).re;
        assert!((v - 0.194_444_444_444_444_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn one_point_rule() {
        let sys = MeasureSystem::angelesco_pair();
        let rule = build_rule(&sys, 1).unwrap();
        assert_eq!(rule.nodes.len(), 1);
        assert_eq!(rule.weight_sums[0].re, 1.0);
        assert_eq!(rule.weight_sums[1].re, 1.0);
    }

    #[test]
    fn sys_a_discrete_reconstruction() {
        let sys = MeasureSystem::sys_a().with_backend(BackendTag::Rational);
        let b = RuleBuilder::new(&sys, 2).unwrap();
        let rule = b.rule(2, BackendTag::Rational, RuleOptions::default()).unwrap();
        assert_eq!(reconstruction_gap(&rule, b.table()).unwrap(), 0.0);
        let float = b.rule(2, BackendTag::Float64, RuleOptions::default()).unwrap();
        assert!(reconstruction_gap(&float, b.table()).unwrap() < 1e-14);
    }

    #[test]
    fn witness_gap_is_one_for_angelesco() {
        let sys = MeasureSystem::angelesco_pair();
        let b = RuleBuilder::new(&sys, 4).unwrap();
        for n in 2..=4 {
            let exact = b.rule(n, BackendTag::Rational, RuleOptions::default()).unwrap();
            assert_eq!(exact.certificate.witness_gap, Some(1.0));
            assert!(exact.certificate.holds);
            let float = b.rule(n, BackendTag::Float64, RuleOptions::default()).unwrap();
            assert!((float.certificate.witness_gap.unwrap() - 1.0).abs() < 1e-9);
            assert!(float.certificate.holds);
        }
    }

    #[test]
    fn non_normal_index_is_refused() {
        let b = RuleBuilder::new(&MeasureSystem::sys_a(), 4).unwrap();
        assert!(matches!(b.rule(3, BackendTag::Float64, RuleOptions::default()), Err(Error::NotNormal { n: 3, .. })));
    }
}
