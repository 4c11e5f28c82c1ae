//! Multiple orthogonal polynomials, their Christoffel–Darboux kernels and
//! multiple Gaussian quadrature rules, computed from moment data.
//!
//! Every algorithm is generic over a [`Scalar`]: `f32`, `f64` or the exact
//! [`Rational`] backend.

pub mod cdk;
pub mod dd;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod mop;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use measures::{BackendTag, MeasureSystem, MomentProvider, MultiIndex};
pub use mop::{Initials, MopSequence, RecurrenceTable};
pub use poly::{Polynomial, VectorPolynomial};
pub use scalar::{Rational, Scalar};

pub type MopSequenceF64 = MopSequence<f64>;
pub type MopSequenceF32 = MopSequence<f32>;
pub type MopSequenceQ = MopSequence<Rational>;
pub type RecurrenceTableF64 = RecurrenceTable<f64>;
pub type RecurrenceTableQ = RecurrenceTable<Rational>;
pub type PolynomialF64 = Polynomial<f64>;
pub type PolynomialQ = Polynomial<Rational>;
pub type CDContextF64 = cdk::CDContext<f64>;
pub type CDContextQ = cdk::CDContext<Rational>;
pub type HessenbergF64 = spectral::HessenbergMatrix<f64>;
pub type HessenbergQ = spectral::HessenbergMatrix<Rational>;
