//! Cochains on momentum space, their coboundaries and structural predicates.
//!
//! Level-1 cochains vanish at the origin, level-2 cochains (generators)
//! vanish on `(p, 0)` and `(p, p)`. The coboundary uses alternating signs:
//! `d beta(p, q) = beta(q) - beta(p) + beta(p - q)` and
//! `d alpha(p0, p1, p2) = alpha(p1, p2) - alpha(p0, p2) + alpha(p0, p1) - alpha(p0 - p2, p1 - p2)`.

mod generator;
mod one;
mod predicates;

pub use generator::{coboundary1, coboundary2, Generator, GeneratorNode, PairFn, TripleCoboundary};
pub use one::{multi_indices, CochainKind, CochainNode, LatticeTable, OneCochain, PolynomialOneCochain, ScalarFn};
pub use predicates::{cochain_membership, is_cocycle, is_commutative, is_involutive, is_unital, CochainRef};
