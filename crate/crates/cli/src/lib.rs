//! Batch front end for the `multiquad` library.
//!
//! Every command returns a [`Outcome`]: the text to write and an exit code.
//! Exit codes are a stable contract: 0 success, 1 input error, 2 a failed
//! verification.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{json, Value};

use multiquad::cdk::{cd_check, certify_lemma_one, parse_ladder, sample_ladder, CDContext, TAU_CD};
use multiquad::measures::{require_normal, MomentProvider};
use multiquad::quadrature::{reconstruction_gap, QuadratureRule, RuleBuilder, RuleOptions};
use multiquad::scalar::{rational_to_f64, DoubleDouble};
use multiquad::spectral::biorthogonality_gap;
use multiquad::{BackendTag, Error, MeasureSystem, Rational, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Size of the per-measure Gauss rules that serve as reference values in
/// [`cmd_compare`].
pub const REFERENCE_N: usize = 40;
/// Biorthogonality tolerance for left and right eigenvectors.
pub const TAU_BIORTH: f64 = 1e-10;
/// Tolerance of the float reconstruction round trip.
pub const TAU_RECON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Rule,
    Verify,
    Compare,
    Moments,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse(format!("unknown output format {other:?}"))),
        }
    }
}

/// Built-in integrands of `compare`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrand {
    Monomial(u32),
    Exp,
    /// `1 / (1 + x²)`.
    Runge,
}

impl Integrand {
    pub fn eval(self, x: Complex64) -> Complex64 {
        match self {
            Self::Monomial(k) => x.powu(k),
            Self::Exp => x.exp(),
            Self::Runge => (Complex64::new(1.0, 0.0) + x * x).inv(),
        }
    }

    pub fn name(self) -> String {
        match self {
            Self::Monomial(k) => format!("x^{k}"),
            Self::Exp => "exp".into(),
            Self::Runge => "1/(1+x^2)".into(),
        }
    }
}

impl FromStr for Integrand {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.replace(' ', "");
        match t.as_str() {
            "exp" => return Ok(Self::Exp),
            "runge" | "1/(1+x^2)" | "1/(1+x2)" => return Ok(Self::Runge),
            "1" => return Ok(Self::Monomial(0)),
            "x" => return Ok(Self::Monomial(1)),
            _ => {}
        }
        t.strip_prefix("x^")
            .and_then(|k| k.parse().ok())
            .map(Self::Monomial)
            .ok_or_else(|| Error::Parse(format!("unknown integrand {s:?} (use x^k, exp or runge)")))
    }
}

/// One run of the tool.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub subcommand: Subcommand,
    pub n: usize,
    /// Overrides the backend named in the input file.
    pub backend: Option<BackendTag>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub tol_eig: Option<f64>,
    pub tol_w: Option<f64>,
    /// Comma-separated rationals replacing the default sample ladder.
    pub seed_ladder: Option<String>,
    pub integrand: Integrand,
    pub verbosity: u8,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, subcommand: Subcommand, n: usize) -> Self {
        Self {
            input: input.into(),
            subcommand,
            n,
            backend: None,
            format: Format::Json,
            output: None,
            tol_eig: None,
            tol_w: None,
            seed_ladder: None,
            integrand: Integrand::Exp,
            verbosity: 0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n == 0 {
            return Err(Error::Parse("n must be at least 1".into()));
        }
        for (name, tol) in [("--tol-eig", self.tol_eig), ("--tol-w", self.tol_w)] {
            if let Some(t) = tol {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Parse(format!("{name} must be a positive number, got {t}")));
                }
            }
        }
        Ok(())
    }

    fn options(&self) -> RuleOptions {
        let d = RuleOptions::default();
        RuleOptions { tol_eig: self.tol_eig.unwrap_or(d.tol_eig), tol_w: self.tol_w.unwrap_or(d.tol_w) }
    }

    fn ladder(&self, count: usize) -> Result<Vec<Rational>, Error> {
        match &self.seed_ladder {
            Some(text) => parse_ladder(text),
            None => Ok(sample_ladder(count)),
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

impl Outcome {
    fn new(code: i32, body: String) -> Self {
        Self { code, body }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_VERIFY
    }
}

pub fn error_outcome(e: &Error) -> Outcome {
    Outcome::new(exit_code(e), format!("error: {e}\n"))
}

pub fn run(config: &RunConfig) -> Outcome {
    if let Err(e) = config.validate() {
        return error_outcome(&e);
    }
    let system = match MeasureSystem::from_path(&config.input) {
        Ok(s) => s,
        Err(e) => return error_outcome(&e),
    };
    let result = match config.subcommand {
        Subcommand::Rule => cmd_rule(config, &system),
        Subcommand::Verify => cmd_verify(config, &system),
        Subcommand::Compare => cmd_compare(config, &system),
        Subcommand::Moments => cmd_moments(config, &system),
    };
    result.unwrap_or_else(|e| error_outcome(&e))
}

/// JSON with every non-integer number written with 17 significant digits.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&fixed_digits(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

fn fixed_digits(v: &Value) -> Value {
    match v {
        Value::Number(x) if x.is_f64() => {
            let f = x.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_str(&format!("{f:.16e}")).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.iter().map(fixed_digits).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, x)| (k.clone(), fixed_digits(x))).collect()),
        other => other.clone(),
    }
}

fn backend(config: &RunConfig, system: &MeasureSystem) -> BackendTag {
    config.backend.unwrap_or(system.backend)
}

pub fn cmd_rule(config: &RunConfig, system: &MeasureSystem) -> Result<Outcome, Error> {
    let builder = RuleBuilder::new(system, config.n)?;
    let rule = builder.rule(config.n, backend(config, system), config.options())?;
    let body = match config.format {
        Format::Json => to_json_string(&rule.to_json()),
        Format::Csv => rule.to_csv(),
    };
    let code = if rule.certificate.holds { EXIT_OK } else { EXIT_VERIFY };
    Ok(Outcome::new(code, body))
}

/// One line of the `verify` report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Runs the invariant suites at `config.n`: normality, CD identities, Lemma 1,
/// biorthogonality, both weight routes, the exactness certificate and the
/// reconstruction round trip. Degrees past the guaranteed order are scanned
/// and reported, but do not count as failures.
pub fn verify_checks(config: &RunConfig, system: &MeasureSystem) -> Result<Vec<Check>, Error> {
    let n = config.n;
    let exact = backend(config, system) == BackendTag::Rational;
    let mut checks = Vec::new();
    if let Err(e) = require_normal::<Rational>(system, n) {
        if e.is_input_error() {
            return Err(e);
        }
        checks.push(Check::new("normality", false, e.to_string()));
        return Ok(checks);
    }
    checks.push(Check::new("normality", true, format!("multi-indices up to n = {n} are normal")));

    let builder = RuleBuilder::new(system, n)?;
    let seq = builder.sequence();
    let ladder = config.ladder(2 * n + 1)?;

    let cd = if exact {
        cd_suite(&CDContext::new(seq.table.clone(), builder.initials().clone(), n)?, &ladder)
    } else {
        let table = seq.table.map(DoubleDouble::from_rational);
        let initials = builder.initials().map(DoubleDouble::from_rational);
        cd_suite(&CDContext::new(table, initials, n)?, &ladder)
    };
    checks.extend(cd?);

    let bio = biorthogonality_gap(
        &seq.table.map(DoubleDouble::from_rational),
        &builder.initials().map(DoubleDouble::from_rational),
        n,
    );
    checks.push(match bio {
        Ok(g) => Check::new("biorthogonality", g <= TAU_BIORTH, format!("max |u_a·v_b| relative {g:.3e} (tol {TAU_BIORTH:e})")),
        Err(e) => Check::new("biorthogonality", false, e.to_string()),
    });

    let rule = match builder.rule(n, backend(config, system), config.options()) {
        Ok(rule) => rule,
        Err(e) if !e.is_input_error() => {
            checks.push(Check::new("weight routes", false, e.to_string()));
            return Ok(checks);
        }
        Err(e) => return Err(e),
    };
    checks.push(Check::new(
        "weight routes",
        true,
        if exact { "spectral = interpolatory exactly".to_string() } else { format!("relative gap {:.3e}", rule.route_gap) },
    ));
    checks.extend(certificate_checks(&rule));
    checks.push(match reconstruction_gap(&rule, &seq.table) {
        Ok(g) => {
            let passed = if exact { g == 0.0 } else { g <= TAU_RECON };
            Check::new("reconstruction", passed, format!("recurrence rows 0..{} relative gap {g:.3e}", n - 1))
        }
        Err(e) => Check::new("reconstruction", false, e.to_string()),
    });
    Ok(checks)
}

fn cd_suite<S: Scalar>(ctx: &CDContext<S>, ladder: &[Rational]) -> Result<Vec<Check>, Error> {
    let n = ctx.n();
    let points: Vec<S> = ladder.iter().take(6).map(S::from_rational).collect();
    let mut out = Vec::new();
    for i in 1..=ctx.r().min(n) {
        let mut worst = 0.0_f64;
        let mut holds = true;
        for x in &points {
            for y in &points {
                let c = cd_check(ctx, i, x, y)?;
                worst = worst.max(c.relative());
                holds &= c.holds(TAU_CD);
            }
        }
        let detail = if S::EXACT {
            format!("{} point pairs, exact", points.len() * points.len())
        } else {
            format!("{} point pairs, max relative residual {worst:.3e}", points.len() * points.len())
        };
        out.push(Check::new(format!("CD identity i={i}"), holds, detail));
    }
    let lemma = certify_lemma_one(ctx, ladder)?;
    let detail = if S::EXACT {
        format!("B_n = gamma_n P_n at {} points, gamma_n = {}", lemma.points, ctx.gamma())
    } else {
        format!("B_n = gamma_n P_n at {} points, max relative {:.3e}", lemma.points, lemma.max_relative)
    };
    out.push(Check::new("Lemma 1", lemma.holds, detail));
    Ok(out)
}

fn certificate_checks(rule: &QuadratureRule) -> Vec<Check> {
    let cert = &rule.certificate;
    let mut out = Vec::new();
    for j in 0..rule.r {
        let g = cert.guaranteed[j];
        let worst = cert.residuals[j][..=g].iter().cloned().fold(0.0, f64::max);
        let ok = cert.passes[j][..=g].iter().all(|&p| p);
        out.push(Check::new(
            format!("exactness j={}", j + 1),
            ok,
            format!("degrees 0..={g}, max residual {worst:.3e}"),
        ));
        let scan: Vec<String> = (g + 1..cert.passes[j].len())
            .map(|d| if cert.passes[j][d] { format!("{d}:pass") } else { format!("{d}:fail({:.3e})", cert.residuals[j][d]) })
            .collect();
        if !scan.is_empty() {
            // informational: beyond the guaranteed order nothing is promised
            out.push(Check::new(format!("degree scan j={}", j + 1), true, scan.join(" ")));
        }
    }
    if let Some(w) = cert.witness_gap {
        let ok = if cert.exact { w == 1.0 } else { (w - 1.0).abs() <= 1e-6 };
        out.push(Check::new("order witness", ok, format!("gap {w} (expected 1)")));
    }
    out
}

pub fn cmd_verify(config: &RunConfig, system: &MeasureSystem) -> Result<Outcome, Error> {
    let checks = verify_checks(config, system)?;
    let all = checks.iter().all(|c| c.passed);
    let body = match config.format {
        Format::Json => to_json_string(&json!({
            "n": config.n,
            "backend": backend(config, system).name(),
            "passed": all,
            "checks": checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("check,result,detail\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},\"{}\"", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail.replace('"', "'"));
            }
            s
        }
    };
    Ok(Outcome::new(if all { EXIT_OK } else { EXIT_VERIFY }, body))
}

/// Shared-node rule against separate classical rules, for one measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub measure: usize,
    pub reference: f64,
    pub shared: f64,
    pub separate: f64,
    pub shared_error: f64,
    pub separate_error: f64,
}

/// Integrates `f` against each measure with the shared-node rule (`n`
/// evaluations in total) and with `r` separate Gauss rules (`r n`
/// evaluations), both measured against an `n = 40` Gauss rule per measure.
pub fn compare(system: &MeasureSystem, n: usize, f: Integrand, opts: RuleOptions) -> Result<Vec<Comparison>, Error> {
    let shared = RuleBuilder::new(system, n)?.rule(n, BackendTag::Float64, opts)?;
    let mut out = Vec::new();
    for (j, provider) in system.providers().iter().enumerate() {
        let single = MeasureSystem::new(vec![provider.clone()])?;
        let separate = RuleBuilder::new(&single, n)?.rule(n, BackendTag::Float64, opts)?;
        let reference = reference_integral(provider, &single, f, opts)?;
        let s = shared.apply(j, |x| f.eval(x)).re;
        let g = separate.apply(0, |x| f.eval(x)).re;
        out.push(Comparison {
            measure: j + 1,
            reference,
            shared: s,
            separate: g,
            shared_error: (s - reference).abs(),
            separate_error: (g - reference).abs(),
        });
    }
    Ok(out)
}

fn reference_integral(provider: &MomentProvider, single: &MeasureSystem, f: Integrand, opts: RuleOptions) -> Result<f64, Error> {
    // a discrete measure is its own exact rule
    if let MomentProvider::Discrete { points, masses } = provider {
        return Ok(points
            .iter()
            .zip(masses)
            .map(|(x, m)| rational_to_f64(m) * f.eval(Complex64::new(rational_to_f64(x), 0.0)).re)
            .sum());
    }
    let rule = RuleBuilder::new(single, REFERENCE_N)?.rule(REFERENCE_N, BackendTag::Float64, opts)?;
    Ok(rule.apply(0, |x| f.eval(x)).re)
}

pub fn cmd_compare(config: &RunConfig, system: &MeasureSystem) -> Result<Outcome, Error> {
    let n = config.n;
    let r = system.r();
    let rows = compare(system, n, config.integrand, config.options())?;
    let body = match config.format {
        Format::Json => to_json_string(&json!({
            "integrand": config.integrand.name(),
            "n": n,
            "r": r,
            "evaluations": { "shared": n, "separate": r * n },
            "reference_n": REFERENCE_N,
            "measures": rows.iter().map(|c| json!({
                "measure": c.measure,
                "reference": c.reference,
                "shared": c.shared,
                "separate": c.separate,
                "shared_error": c.shared_error,
                "separate_error": c.separate_error,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("measure,reference,shared,separate,shared_error,separate_error,shared_evals,separate_evals\n");
            for c in &rows {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                    c.measure, c.reference, c.shared, c.separate, c.shared_error, c.separate_error, n, r * n
                );
            }
            s
        }
    };
    Ok(Outcome::new(EXIT_OK, body))
}

/// Moments `0..n` of every measure, exact and rounded.
pub fn cmd_moments(config: &RunConfig, system: &MeasureSystem) -> Result<Outcome, Error> {
    let count = config.n;
    let table: Vec<Vec<Rational>> = (0..system.r())
        .map(|j| (0..count).map(|l| system.moment_exact(j, l)).collect())
        .collect::<Result<_, _>>()?;
    let body = match config.format {
        Format::Json => to_json_string(&json!({
            "r": system.r(),
            "count": count,
            "exact": table.iter().map(|row| row.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "float": table.iter().map(|row| row.iter().map(rational_to_f64).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("measure,degree,exact,float\n");
            for (j, row) in table.iter().enumerate() {
                for (l, q) in row.iter().enumerate() {
                    let _ = writeln!(s, "{},{l},{q},{:.16e}", j + 1, rational_to_f64(q));
                }
            }
            s
        }
    };
    Ok(Outcome::new(EXIT_OK, body))
}
