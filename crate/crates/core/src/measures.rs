//! Measure systems described by their moments.
//!
//! Every moment is produced exactly, as a rational number: by closed form,
//! from a table, or as a finite sum over point masses. Backends round the
//! exact value on demand.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{f64_to_rational, parse_rational, ratio, rational_pow, Scalar};

/// Default relative pivot threshold for floating-point rank decisions.
pub const TAU_RANK: f64 = 1e-10;

/// The proper multi-index `ν_n`: `n = m r + s` with `0 < s <= r`, the first
/// `s` components equal `m + 1` and the remaining `r - s` equal `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex {
    pub components: Vec<usize>,
    pub n: usize,
}

impl MultiIndex {
    pub fn proper(n: usize, r: usize) -> Self {
        assert!(r >= 1, "at least one measure is required");
        if n == 0 {
            return Self { components: vec![0; r], n };
        }
        let m = (n - 1) / r;
        let s = n - m * r;
        let components = (0..r).map(|j| if j < s { m + 1 } else { m }).collect();
        Self { components, n }
    }

    pub fn r(&self) -> usize {
        self.components.len()
    }

    /// `(m, s)` with `n = m r + s`, `0 < s <= r` (`(0, 0)` for `n = 0`).
    pub fn split(&self) -> (usize, usize) {
        if self.n == 0 {
            return (0, 0);
        }
        let r = self.r();
        let m = (self.n - 1) / r;
        (m, self.n - m * r)
    }

    pub fn max_component(&self) -> usize {
        self.components.iter().copied().max().unwrap_or(0)
    }
}

/// Closed-form moment generators.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticFormula {
    /// `x^power dx` on `[a, b]`.
    PowerLebesgue { a: BigRational, b: BigRational, power: usize },
    /// `x^alpha dx` on `[0, 1]`, `alpha > -1` rational. Exponents whose pairwise
    /// differences are not integers give an AT system (Jacobi–Piñeiro).
    JacobiPineiro { alpha: BigRational },
}

impl AnalyticFormula {
    pub fn from_name(name: &str, params: &BTreeMap<String, Value>) -> Result<Self> {
        match name {
            "lebesgue" | "monomial" | "monomial-lebesgue" => {
                let a = rational_param(params, "a")?.unwrap_or_else(BigRational::zero);
                let b = rational_param(params, "b")?.unwrap_or_else(BigRational::one);
                let power = match params.get("power") {
                    None => 0,
                    Some(v) => v
                        .as_u64()
                        .ok_or_else(|| Error::Parse(format!("power must be a non-negative integer, got {v}")))?
                        as usize,
                };
                if a >= b {
                    return Err(Error::InvalidSystem(format!("empty interval [{a}, {b}]")));
                }
                Ok(Self::PowerLebesgue { a, b, power })
            }
            "jacobi-pineiro" | "power" => {
                let alpha = rational_param(params, "alpha")?.unwrap_or_else(BigRational::zero);
                if alpha <= -BigRational::one() {
                    return Err(Error::InvalidSystem(format!("x^{alpha} is not integrable on [0, 1]")));
                }
                Ok(Self::JacobiPineiro { alpha })
            }
            other => Err(Error::UnknownFormula(other.to_string())),
        }
    }

    pub fn moment(&self, ell: usize) -> BigRational {
        match self {
            Self::PowerLebesgue { a, b, power } => {
                let k = ell + power + 1;
                (rational_pow(b, k) - rational_pow(a, k)) / ratio(k as i64, 1)
            }
            Self::JacobiPineiro { alpha } => (alpha + ratio(ell as i64 + 1, 1)).recip(),
        }
    }
}

fn rational_param(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<BigRational>> {
    params.get(key).map(json_to_rational).transpose()
}

/// Reads a JSON number (exact value of its `f64`) or a `"p/q"` string.
pub fn json_to_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(ratio(i, 1));
            }
            // Decimal literals are read exactly rather than through f64.
            parse_rational(&n.to_string()).or_else(|_| {
                f64_to_rational(n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}")))?)
            })
        }
        other => Err(Error::Parse(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

/// Source of the moments `m_ℓ = ∫ x^ℓ dμ` of one measure.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentProvider {
    Analytic(AnalyticFormula),
    Table(Vec<BigRational>),
    Discrete { points: Vec<BigRational>, masses: Vec<BigRational> },
    /// `Σ c_i μ_i`, used to mix measures of a system.
    Combination(Vec<(BigRational, MomentProvider)>),
}

impl MomentProvider {
    pub fn power_lebesgue(a: BigRational, b: BigRational, power: usize) -> Self {
        Self::Analytic(AnalyticFormula::PowerLebesgue { a, b, power })
    }

    pub fn jacobi_pineiro(alpha: BigRational) -> Self {
        Self::Analytic(AnalyticFormula::JacobiPineiro { alpha })
    }

    pub fn discrete(points: Vec<BigRational>, masses: Vec<BigRational>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::InvalidSystem(format!(
                "{} points but {} masses",
                points.len(),
                masses.len()
            )));
        }
        Ok(Self::Discrete { points, masses })
    }

    /// Exact moment of degree `ell`. `measure` only labels errors.
    pub fn moment(&self, measure: usize, ell: usize) -> Result<BigRational> {
        match self {
            Self::Analytic(f) => Ok(f.moment(ell)),
            Self::Table(t) => t
                .get(ell)
                .cloned()
                .ok_or(Error::OutOfTable { measure, index: ell, len: t.len() }),
            Self::Discrete { points, masses } => Ok(points
                .iter()
                .zip(masses)
                .map(|(x, w)| w * rational_pow(x, ell))
                .fold(BigRational::zero(), |acc, t| acc + t)),
            Self::Combination(terms) => terms.iter().try_fold(BigRational::zero(), |acc, (c, p)| {
                Ok(acc + c * p.moment(measure, ell)?)
            }),
        }
    }

    /// Largest available moment degree, if bounded.
    pub fn max_degree(&self) -> Option<usize> {
        match self {
            Self::Table(t) => t.len().checked_sub(1),
            Self::Combination(terms) => terms.iter().filter_map(|(_, p)| p.max_degree()).min(),
            _ => None,
        }
    }
}

/// Which scalar backend a configuration asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BackendTag {
    Rational,
    #[default]
    Float64,
}

impl BackendTag {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Self::Rational),
            "float64" | "float" | "f64" => Ok(Self::Float64),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Rational => "rational",
            Self::Float64 => "float64",
        }
    }
}

/// `r` measures given by their moment providers.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSystem {
    providers: Vec<MomentProvider>,
    pub backend: BackendTag,
}

#[derive(Deserialize)]
struct SystemConfig {
    r: usize,
    #[serde(default)]
    backend: Option<String>,
    measures: Vec<MeasureConfig>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MeasureConfig {
    Analytic {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, Value>,
    },
    Table {
        moments: Vec<Value>,
    },
    Discrete {
        points: Vec<Value>,
        masses: Vec<Value>,
    },
}

impl MeasureSystem {
    pub fn new(providers: Vec<MomentProvider>) -> Result<Self> {
        if providers.is_empty() {
            return Err(Error::InvalidSystem("at least one measure is required".into()));
        }
        Ok(Self { providers, backend: BackendTag::default() })
    }

    pub fn with_backend(mut self, backend: BackendTag) -> Self {
        self.backend = backend;
        self
    }

    /// `μ_j = x^(j-1) dx` on `[0, 1]`, `j = 1..r`.
    ///
    /// For `r >= 2` the moments satisfy `m^{(j+1)}_ℓ = m^{(j)}_{ℓ+1}`, so `ν_n`
    /// stops being normal at `n = r + 1`. Only the first `r` indices are usable.
    pub fn monomial_family(r: usize) -> Self {
        let providers = (0..r)
            .map(|j| MomentProvider::power_lebesgue(BigRational::zero(), BigRational::one(), j))
            .collect();
        Self::new(providers).expect("r >= 1")
    }

    /// `dx` and `x dx` on `[0, 1]`.
    pub fn sys_a() -> Self {
        Self::monomial_family(2)
    }

    /// Lebesgue measure on `[-1, 0]` and on `[0, 1]`.
    pub fn angelesco_pair() -> Self {
        Self::angelesco(2)
    }

    /// Lebesgue measures on the adjacent intervals `[j - r/2, j + 1 - r/2]`,
    /// with the half-integer shift for odd `r`.
    pub fn angelesco(r: usize) -> Self {
        let left = ratio(-(r as i64), 2);
        let providers = (0..r)
            .map(|j| {
                let a = &left + ratio(j as i64, 1);
                let b = &a + BigRational::one();
                MomentProvider::power_lebesgue(a, b, 0)
            })
            .collect();
        Self::new(providers).expect("r >= 1")
    }

    /// `x^{j/r} dx` on `[0, 1]`, `j = 0..r`: a Jacobi–Piñeiro AT system.
    pub fn jacobi_pineiro(r: usize) -> Self {
        let providers = (0..r).map(|j| MomentProvider::jacobi_pineiro(ratio(j as i64, r as i64))).collect();
        Self::new(providers).expect("r >= 1")
    }

    /// Replaces the measures by `ν_i = Σ_{j<=i} alpha[i][j] μ_j`.
    pub fn mixed(&self, alpha: &[Vec<BigRational>]) -> Result<Self> {
        if alpha.len() != self.r() {
            return Err(Error::InvalidSystem("mixing matrix must be r x r".into()));
        }
        let providers = alpha
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let terms = row
                    .iter()
                    .take(i + 1)
                    .zip(&self.providers)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, p)| (c.clone(), p.clone()))
                    .collect();
                MomentProvider::Combination(terms)
            })
            .collect();
        Ok(Self { providers, backend: self.backend })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: SystemConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if cfg.r != cfg.measures.len() {
            return Err(Error::InvalidSystem(format!(
                "r = {} but {} measures were given",
                cfg.r,
                cfg.measures.len()
            )));
        }
        let providers = cfg
            .measures
            .iter()
            .map(|m| match m {
                MeasureConfig::Analytic { name, params } => {
                    Ok(MomentProvider::Analytic(AnalyticFormula::from_name(name, params)?))
                }
                MeasureConfig::Table { moments } => {
                    Ok(MomentProvider::Table(moments.iter().map(json_to_rational).collect::<Result<_>>()?))
                }
                MeasureConfig::Discrete { points, masses } => MomentProvider::discrete(
                    points.iter().map(json_to_rational).collect::<Result<_>>()?,
                    masses.iter().map(json_to_rational).collect::<Result<_>>()?,
                ),
            })
            .collect::<Result<Vec<_>>>()?;
        let backend = cfg.backend.as_deref().map(BackendTag::parse).transpose()?.unwrap_or_default();
        Ok(Self::new(providers)?.with_backend(backend))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Serializes back into the configuration format, with rationals as `"p/q"`.
    /// Combination providers are expanded into moment tables of length `table_len`.
    pub fn to_json(&self, table_len: usize) -> Result<Value> {
        let q = |v: &BigRational| Value::String(v.to_string());
        let measures = self
            .providers
            .iter()
            .enumerate()
            .map(|(j, p)| {
                Ok(match p {
                    MomentProvider::Analytic(AnalyticFormula::PowerLebesgue { a, b, power }) => serde_json::json!({
                        "kind": "analytic",
                        "name": "lebesgue",
                        "params": { "a": q(a), "b": q(b), "power": power },
                    }),
                    MomentProvider::Analytic(AnalyticFormula::JacobiPineiro { alpha }) => serde_json::json!({
                        "kind": "analytic",
                        "name": "jacobi-pineiro",
                        "params": { "alpha": q(alpha) },
                    }),
                    MomentProvider::Table(t) => {
                        serde_json::json!({ "kind": "table", "moments": t.iter().map(q).collect::<Vec<_>>() })
                    }
                    MomentProvider::Discrete { points, masses } => serde_json::json!({
                        "kind": "discrete",
                        "points": points.iter().map(q).collect::<Vec<_>>(),
                        "masses": masses.iter().map(q).collect::<Vec<_>>(),
                    }),
                    MomentProvider::Combination(_) => {
                        let moments = (0..table_len).map(|l| p.moment(j, l).map(|v| q(&v))).collect::<Result<Vec<_>>>()?;
                        serde_json::json!({ "kind": "table", "moments": moments })
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::json!({ "r": self.r(), "backend": self.backend.name(), "measures": measures }))
    }

    pub fn r(&self) -> usize {
        self.providers.len()
    }

    pub fn providers(&self) -> &[MomentProvider] {
        &self.providers
    }

    /// Exact moment `m_ℓ^{(j)}`; `j` is zero-based.
    pub fn moment_exact(&self, j: usize, ell: usize) -> Result<BigRational> {
        let provider = self
            .providers
            .get(j)
            .ok_or_else(|| Error::InvalidSystem(format!("measure index {j} out of range (r = {})", self.r())))?;
        provider.moment(j, ell)
    }

    /// Moment `m_ℓ^{(j)}` in the backend `S`.
    pub fn moment<S: Scalar>(&self, j: usize, ell: usize) -> Result<S> {
        self.moment_exact(j, ell).map(|q| S::from_rational(&q))
    }

    /// Moments `m_0..m_{count-1}` of every measure.
    pub fn moment_table<S: Scalar>(&self, count: usize) -> Result<Vec<Vec<S>>> {
        (0..self.r()).map(|j| (0..count).map(|l| self.moment(j, l)).collect()).collect()
    }

    /// Largest moment degree every provider can supply.
    pub fn max_degree(&self) -> Option<usize> {
        self.providers.iter().filter_map(MomentProvider::max_degree).min()
    }
}

/// The moment matrix of `ν_n`, stored as `r` column blocks.
///
/// Block `j` is the `n × ν_n(j)` Hankel block with entry `(i, k) = m^{(j)}_{i+k}`.
/// Side by side the blocks form an `n × n` matrix whose transpose is the
/// coefficient matrix of the type II orthogonality conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix<S> {
    pub n: usize,
    pub index: MultiIndex,
    pub blocks: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> MomentMatrix<S> {
    pub fn columns(&self) -> usize {
        self.index.components.iter().sum()
    }

    /// The blocks side by side (`n` rows, block columns left to right). This is
    /// the matrix of the type I conditions.
    pub fn side_by_side(&self) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|i| self.blocks.iter().flat_map(|b| b[i].iter().cloned()).collect())
            .collect()
    }

    /// The stacked transpose `D_n`: row `(j, k)` holds `m^{(j)}_{k+i}`, `i = 0..n`.
    pub fn stacked(&self) -> Vec<Vec<S>> {
        crate::linalg::transpose(&self.side_by_side())
    }
}

/// Builds the moment matrix of the proper multi-index `ν_n`.
pub fn moment_matrix<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<MomentMatrix<S>> {
    let index = MultiIndex::proper(n, system.r());
    let blocks = index
        .components
        .iter()
        .enumerate()
        .map(|(j, &width)| {
            (0..n)
                .map(|i| (0..width).map(|k| system.moment(j, i + k)).collect::<Result<Vec<S>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentMatrix { n, index, blocks })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityReport {
    pub n: usize,
    pub rank: usize,
    pub is_normal: bool,
}

/// `ν_n` is normal iff `D_n` has rank `n`. Exact for rationals; floats use the
/// pivot threshold [`TAU_RANK`] relative to the largest entry.
pub fn normality_check<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<NormalityReport> {
    normality_check_with::<S>(system, n, TAU_RANK)
}

pub fn normality_check_with<S: Scalar>(system: &MeasureSystem, n: usize, tau_rank: f64) -> Result<NormalityReport> {
    if n == 0 {
        return Ok(NormalityReport { n, rank: 0, is_normal: true });
    }
    let d = moment_matrix::<S>(system, n)?.stacked();
    let rank = S::rank(&d, tau_rank);
    Ok(NormalityReport { n, rank, is_normal: rank == n })
}

/// Fails with [`Error::NotNormal`] unless `ν_n` is normal.
pub fn require_normal<S: Scalar>(system: &MeasureSystem, n: usize) -> Result<()> {
    let report = normality_check::<S>(system, n)?;
    if report.is_normal {
        Ok(())
    } else {
        Err(Error::NotNormal { n, rank: report.rank })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn proper_multi_indices() {
        assert_eq!(MultiIndex::proper(0, 2).components, vec![0, 0]);
        assert_eq!(MultiIndex::proper(1, 2).components, vec![1, 0]);
        assert_eq!(MultiIndex::proper(2, 2).components, vec![1, 1]);
        assert_eq!(MultiIndex::proper(5, 2).components, vec![3, 2]);
        assert_eq!(MultiIndex::proper(7, 3).components, vec![3, 2, 2]);
        assert_eq!(MultiIndex::proper(6, 3).split(), (1, 3));
        for r in 1..=4 {
            for n in 0..=30 {
                let nu = MultiIndex::proper(n, r);
                assert_eq!(nu.components.iter().sum::<usize>(), n);
                assert!(nu.max_component() - nu.components.iter().min().unwrap() <= 1);
            }
        }
    }

    #[test]
    fn lebesgue_moments() {
        let sys = MeasureSystem::monomial_family(1);
        assert_eq!(sys.moment_exact(0, 0).unwrap(), ratio(1, 1));
        assert_eq!(sys.moment_exact(0, 3).unwrap(), ratio(1, 4));
        // x dx on [0, 1]
        assert_eq!(MeasureSystem::sys_a().moment_exact(1, 2).unwrap(), ratio(1, 4));
        let ang = MeasureSystem::angelesco_pair();
        assert_eq!(ang.moment_exact(0, 1).unwrap(), ratio(-1, 2));
        assert_eq!(ang.moment_exact(0, 2).unwrap(), ratio(1, 3));
    }

    #[test]
    fn table_bounds_and_unknown_formula() {
        let sys = MeasureSystem::new(vec![MomentProvider::Table(vec![ratio(1, 1), ratio(1, 2)])]).unwrap();
        assert_eq!(sys.moment_exact(0, 1).unwrap(), ratio(1, 2));
        assert_eq!(sys.moment_exact(0, 2), Err(Error::OutOfTable { measure: 0, index: 2, len: 2 }));
        let err = MeasureSystem::from_json_str(r#"{"r":1,"measures":[{"kind":"analytic","name":"hermite"}]}"#);
        assert_eq!(err, Err(Error::UnknownFormula("hermite".into())));
    }

    #[test]
    fn discrete_moments_match_direct_sum() {
        let points = vec![ratio(-1, 3), ratio(1, 2), ratio(2, 1)];
        let masses = vec![ratio(1, 5), ratio(3, 7), ratio(1, 11)];
        let p = MomentProvider::discrete(points.clone(), masses.clone()).unwrap();
        for ell in 0..8 {
            let mut direct = Rational::zero();
            for (x, w) in points.iter().zip(&masses) {
                let mut pw = Rational::one();
                for _ in 0..ell {
                    pw *= x;
                }
                direct += w * pw;
            }
            assert_eq!(p.moment(0, ell).unwrap(), direct);
            let f: f64 = f64::from_rational(&p.moment(0, ell).unwrap());
            assert!((f - f64::from_rational(&direct)).abs() <= 1e-14 * f.abs());
        }
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"r":2,"backend":"rational","measures":[
            {"kind":"analytic","name":"lebesgue","params":{"a":"-1","b":0}},
            {"kind":"table","moments":["1","1/2",0.25]}]}"#;
        let sys = MeasureSystem::from_json_str(text).unwrap();
        assert_eq!(sys.backend, BackendTag::Rational);
        assert_eq!(sys.moment_exact(1, 2).unwrap(), ratio(1, 4));
        let again = MeasureSystem::from_json_str(&sys.to_json(4).unwrap().to_string()).unwrap();
        assert_eq!(again, sys);
        assert!(matches!(
            MeasureSystem::from_json_str(r#"{"r":2,"measures":[]}"#),
            Err(Error::InvalidSystem(_))
        ));
    }

    #[test]
    fn moment_matrix_layouts() {
        let one = moment_matrix::<Rational>(&MeasureSystem::monomial_family(1), 1).unwrap();
        assert_eq!(one.stacked(), vec![vec![ratio(1, 1)]]);
        let m = moment_matrix::<Rational>(&MeasureSystem::sys_a(), 2).unwrap();
        assert_eq!(m.blocks[0], vec![vec![ratio(1, 1)], vec![ratio(1, 2)]]);
        assert_eq!(m.blocks[1], vec![vec![ratio(1, 2)], vec![ratio(1, 3)]]);
        let h = moment_matrix::<Rational>(&MeasureSystem::monomial_family(1), 3).unwrap().stacked();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(h[i][k], ratio(1, (i + k + 1) as i64));
            }
        }
        for r in 1..=4 {
            let sys = MeasureSystem::monomial_family(r);
            for n in 1..=30 {
                let mm = moment_matrix::<f64>(&sys, n).unwrap();
                assert_eq!(mm.columns(), n);
                assert_eq!(mm.stacked().len(), n);
            }
        }
    }

    #[test]
    fn normality_examples() {
        let sys_a = MeasureSystem::sys_a();
        for n in 1..=2 {
            assert!(normality_check::<Rational>(&sys_a, n).unwrap().is_normal, "n = {n}");
        }
        // m^{(2)}_k = m^{(1)}_{k+1}: the rows of D_n are the moment rows of
        // x^0..x^{ν_1-1} and x^1..x^{ν_2}, which overlap from n = 3 on
        for n in 3..=8 {
            let nu = MultiIndex::proper(n, 2).components;
            let report = normality_check::<Rational>(&sys_a, n).unwrap();
            assert_eq!((report.rank, report.is_normal), (nu[0].max(nu[1] + 1), false), "n = {n}");
        }
        for sys in [MeasureSystem::jacobi_pineiro(3), MeasureSystem::angelesco(3)] {
            for n in 1..=9 {
                assert!(normality_check::<Rational>(&sys, n).unwrap().is_normal, "n = {n}");
            }
        }
        let dup = MeasureSystem::new(vec![
            MomentProvider::power_lebesgue(Rational::zero(), Rational::one(), 0),
            MomentProvider::power_lebesgue(Rational::zero(), Rational::one(), 0),
        ])
        .unwrap();
        let report = normality_check::<Rational>(&dup, 2).unwrap();
        assert!(!report.is_normal);
        assert_eq!(report.rank, 1);
        let leb = normality_check::<Rational>(&MeasureSystem::monomial_family(1), 4).unwrap();
        assert_eq!((leb.rank, leb.is_normal), (4, true));
    }
}
