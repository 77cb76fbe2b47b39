//! Sample-based structural predicates on cochains.
//!
//! Every residual is divided by `1 + magnitude` of the terms being compared.

use num_complex::Complex64;

use super::generator::{coboundary2, Generator};
use super::one::OneCochain;
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::momentum::Momentum;
use crate::report::{sample_report, scaled, PredicateReport};
use crate::sampling::SampleSet;

fn max_norm(terms: &[Complex64]) -> f64 {
    terms.iter().fold(0.0, |acc, t| acc.max(t.norm()))
}

/// Cyclic (associativity) condition: `coboundary2(alpha)` vanishes on every triple.
pub fn is_cocycle(alpha: &Generator, samples: &SampleSet, tol: f64) -> Result<PredicateReport> {
    let d = coboundary2(alpha);
    sample_report("cocycle", samples, 3, tol, ExecMode::default(), |t| {
        let terms = d.terms(&t[0], &t[1], &t[2]);
        let sum: Complex64 = terms.iter().sum();
        scaled(sum.norm(), max_norm(&terms))
    })
}

/// `alpha(p, p) = alpha(p, 0) = 0`.
pub fn is_unital(alpha: &Generator, samples: &SampleSet, tol: f64) -> Result<PredicateReport> {
    sample_report("unital", samples, 1, tol, ExecMode::default(), |t| {
        let p = &t[0];
        let diag = alpha.eval(p, p).norm();
        let edge = alpha.eval(p, &Momentum::zero(p.dim())).norm();
        scaled(diag.max(edge), alpha.eval(p, &t[1]).norm())
    })
}

/// `alpha(p, q) = alpha(p, p - q)`, equivalent to commutativity of the product.
pub fn is_commutative(alpha: &Generator, samples: &SampleSet, tol: f64) -> Result<PredicateReport> {
    sample_report("commutative", samples, 2, tol, ExecMode::default(), |t| {
        let (p, q) = (&t[0], &t[1]);
        let a = alpha.eval(p, q);
        let b = alpha.eval(p, &(p - q));
        scaled((a - b).norm(), a.norm().max(b.norm()))
    })
}

/// `conj(alpha(p, q)) = alpha(-p, q - p)`, the condition for `(f*g)^* = g^* * f^*`.
pub fn is_involutive(alpha: &Generator, samples: &SampleSet, tol: f64) -> Result<PredicateReport> {
    sample_report("involutive", samples, 2, tol, ExecMode::default(), |t| {
        let (p, q) = (&t[0], &t[1]);
        let a = alpha.eval(p, q).conj();
        let b = alpha.eval(&-p, &(q - p));
        scaled((a - b).norm(), a.norm().max(b.norm()))
    })
}

/// A cochain of level 1 or 2.
#[derive(Clone, Copy)]
pub enum CochainRef<'a> {
    One(&'a OneCochain),
    Two(&'a Generator),
}

impl CochainRef<'_> {
    fn level(&self) -> u8 {
        match self {
            CochainRef::One(_) => 1,
            CochainRef::Two(_) => 2,
        }
    }
}

/// Membership in the cochain space of level `n`: vanishing at `0` for
/// `n = 1`, at `(p, 0)` and `(p, p)` for `n = 2`. With `starred`, also the
/// conjugation relation `conj f(p) = f(-p)` resp. `conj f(p, q) = f(-p, q - p)`.
pub fn cochain_membership(
    f: CochainRef<'_>,
    n: u8,
    samples: &SampleSet,
    tol: f64,
    starred: bool,
) -> Result<PredicateReport> {
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedLevel(n));
    }
    if f.level() != n {
        return Err(Error::UnsupportedLevel(n));
    }
    let name = if starred { format!("cochain*{n}") } else { format!("cochain{n}") };
    match f {
        CochainRef::One(beta) => sample_report(&name, samples, 1, tol, ExecMode::default(), |t| {
            let p = &t[0];
            let origin = beta.eval(&Momentum::zero(p.dim())).norm();
            let star = if starred {
                let a = beta.eval(p).conj();
                let b = beta.eval(&-p);
                scaled((a - b).norm(), a.norm().max(b.norm()))
            } else {
                0.0
            };
            origin.max(star)
        }),
        CochainRef::Two(alpha) => {
            let unital = is_unital(alpha, samples, tol)?;
            if !starred {
                return Ok(PredicateReport { name, ..unital });
            }
            let inv = is_involutive(alpha, samples, tol)?;
            Ok(PredicateReport::combine(name, tol, &[unital, inv]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::generator::coboundary1;
    use crate::cochain::one::PolynomialOneCochain;
    use crate::generators::{make_moyal, make_wick_voros};
    use nalgebra::DMatrix;

    fn samples(dim: usize) -> SampleSet {
        SampleSet::random(dim, 300, 11, 3.0)
    }

    fn theta() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0])
    }

    fn not_a_cocycle() -> Generator {
        Generator::custom(1, "q2pq2", |p, q| {
            let (p, q) = (p.components()[0], q.components()[0]);
            Complex64::new(q * q * (p - q) * (p - q), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn moyal_is_cocycle_noncommutative_involutive() {
        let a = make_moyal(&theta()).unwrap();
        let s = samples(2);
        assert!(is_cocycle(&a, &s, 1e-12).unwrap().pass);
        assert!(is_unital(&a, &s, 1e-12).unwrap().pass);
        assert!(is_involutive(&a, &s, 1e-12).unwrap().pass);
        let c = is_commutative(&a, &s, 1e-9).unwrap();
        assert!(!c.pass);
        assert!(c.max_residual > 1e-2);
    }

    #[test]
    fn zero_passes_with_zero_residual() {
        let s = samples(2);
        let r = is_cocycle(&Generator::zero(2), &s, 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);
        assert!(is_commutative(&Generator::zero(2), &s, 0.0).unwrap().pass);
    }

    #[test]
    fn broken_generator_fails_cocycle() {
        let r = is_cocycle(&not_a_cocycle(), &samples(1), 1e-9).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_point.len(), 3);
    }

    #[test]
    fn coboundaries_are_commutative() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let beta = OneCochain::polynomial(PolynomialOneCochain::random(2, 3, 0.5, false, &mut rng));
        assert!(is_commutative(&coboundary1(&beta), &samples(2), 1e-12).unwrap().pass);
    }

    #[test]
    fn real_bilinear_is_not_involutive() {
        // q^T theta p without the factor i
        let a = Generator::custom(2, "real-bilinear", |p, q| {
            let (p, q) = (p.components(), q.components());
            Complex64::new(0.7 * (q[0] * p[1] - q[1] * p[0]), 0.0)
        })
        .unwrap();
        let r = is_involutive(&a, &samples(2), 1e-9).unwrap();
        assert!(!r.pass);
        let wv = make_wick_voros(&theta(), &DMatrix::identity(2, 2)).unwrap();
        assert!(is_involutive(&wv, &samples(2), 1e-12).unwrap().pass);
    }

    #[test]
    fn membership() {
        let s = samples(1);
        let sq =
            OneCochain::polynomial(PolynomialOneCochain::new(1, vec![(vec![2], Complex64::new(1.0, 0.0))]).unwrap());
        assert!(cochain_membership(CochainRef::One(&sq), 1, &s, 1e-12, false).unwrap().pass);
        // p^2 is real and even, so it is also starred
        assert!(cochain_membership(CochainRef::One(&sq), 1, &s, 1e-12, true).unwrap().pass);

        let one = Generator::custom_unchecked(1, "one", |_, _| Complex64::new(1.0, 0.0));
        assert!(!cochain_membership(CochainRef::Two(&one), 2, &s, 1e-9, false).unwrap().pass);

        let s2 = samples(2);
        let gm = make_moyal(&theta()).unwrap();
        assert!(cochain_membership(CochainRef::Two(&gm), 2, &s2, 1e-12, true).unwrap().pass);

        assert_eq!(
            cochain_membership(CochainRef::Two(&gm), 3, &s2, 1e-12, true).unwrap_err(),
            Error::UnsupportedLevel(3)
        );
    }

    #[test]
    fn empty_samples_error() {
        let s = SampleSet::from_tuples(2, vec![]);
        let g = Generator::zero(2);
        for r in
            [is_cocycle(&g, &s, 1.0), is_commutative(&g, &s, 1.0), is_involutive(&g, &s, 1.0), is_unital(&g, &s, 1.0)]
        {
            assert_eq!(r.unwrap_err(), Error::EmptySampleSet);
        }
    }
}
