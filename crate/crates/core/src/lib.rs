//! Translation-invariant star products on momentum space.
//!
//! A product is fixed by a generator `alpha(p, q)`:
//! `(f * g)~(P) = sum_q f~(q) g~(P - q) exp(alpha(P, q))`.
//! The crate checks the algebraic conditions on generators, splits them into
//! harmonic and coboundary parts, evaluates products of band-limited fields on
//! finite lattices, decides equivalence of products, and assembles
//! non-commutative Feynman amplitudes.

pub mod cochain;
pub mod equivalence;
pub mod error;
pub mod exec;
pub mod generators;
pub mod hodge;
pub mod lattice;
pub mod momentum;
pub mod qft;
pub mod report;
pub mod sampling;
pub mod star;
pub mod suite;

pub use cochain::{coboundary1, coboundary2, Generator, OneCochain, PolynomialOneCochain};
pub use error::{Error, ErrorCategory, Result};
pub use exec::ExecMode;
pub use lattice::{BandlimitedField, GridSpec};
pub use momentum::Momentum;
pub use report::PredicateReport;
pub use sampling::SampleSet;
