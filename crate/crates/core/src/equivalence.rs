//! Equivalence of translation-invariant products.
//!
//! Two products are isomorphic exactly when their generators differ by a
//! coboundary, i.e. when their harmonic parts agree. The isomorphism is
//! `T_beta f~(p) = exp(beta(p)) f~(p)` with `alpha1 + d beta = alpha2`.

use num_complex::Complex64;

use crate::cochain::{coboundary1, is_cocycle, Generator, OneCochain};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::hodge::{harmonic_form, recover_witness, Witness, WitnessOptions};
use crate::lattice::{BandlimitedField, GridSpec};
use crate::momentum::Momentum;
use crate::report::{sample_report, scaled, PredicateReport};
use crate::sampling::SampleSet;
use crate::star::guarded_exp;

/// Cocycle residual above which inputs are rejected.
pub const COCYCLE_TOL: f64 = 1e-9;

/// `T_beta`: multiplies each coefficient by `exp(beta(p))`.
///
/// `T_beta(f *1 g) = T_beta f *2 T_beta g` when `alpha1 = alpha2 + d beta`.
pub fn apply_t(beta: &OneCochain, f: &BandlimitedField) -> Result<BandlimitedField> {
    let grid = *f.grid();
    if beta.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, found: beta.dim() });
    }
    let mut out = f.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        if *c != Complex64::new(0.0, 0.0) {
            *c *= guarded_exp(beta.eval(&grid.momentum(i)))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// `beta` with `alpha1 + d beta = alpha2`, present when equivalent.
    pub witness: Option<Witness>,
    /// Scaled `max |H(alpha1) - H(alpha2)|` on the samples.
    pub harmonic_gap: f64,
    pub evidence: Vec<PredicateReport>,
}

/// Decides whether `alpha1` and `alpha2` generate isomorphic products and,
/// if so, recovers the witness on `grid`.
pub fn decide_equivalence(
    alpha1: &Generator,
    alpha2: &Generator,
    samples: &SampleSet,
    grid: &GridSpec,
    tol: f64,
) -> Result<EquivalenceVerdict> {
    if alpha1.dim() != alpha2.dim() {
        return Err(Error::DimensionMismatch { expected: alpha1.dim(), found: alpha2.dim() });
    }
    let mut evidence = Vec::new();
    for (name, a) in [("cocycle[1]", alpha1), ("cocycle[2]", alpha2)] {
        let r = is_cocycle(a, samples, COCYCLE_TOL)?;
        if !r.pass {
            return Err(Error::NotACocycle { residual: r.max_residual });
        }
        evidence.push(PredicateReport { name: name.into(), ..r });
    }
    let (h1, h2) = (harmonic_form(alpha1), harmonic_form(alpha2));
    let gap = sample_report("harmonic-gap", samples, 2, tol, ExecMode::default(), |t| {
        let (a, b) = (h1.eval(&t[0], &t[1]), h2.eval(&t[0], &t[1]));
        scaled((a - b).norm(), a.norm().max(b.norm()))
    })?;
    let equivalent = gap.pass;
    let harmonic_gap = gap.max_residual;
    evidence.push(gap);
    let witness = if equivalent {
        let diff = alpha2.sub(alpha1)?;
        let opts = WitnessOptions { tol: tol.max(1e-8), ..WitnessOptions::default() };
        let w = recover_witness(&diff, grid, &opts)?;
        let d = coboundary1(&w.beta);
        let pairs = SampleSet::on_lattice(grid, samples.len().max(1), samples.seed, grid.half() / 2);
        let check = sample_report("witness", &pairs, 2, opts.tol, ExecMode::default(), |t| {
            let (p, q) = (&t[0], &t[1]);
            let lhs = alpha1.eval(p, q) + d.eval(p, q);
            let rhs = alpha2.eval(p, q);
            scaled((lhs - rhs).norm(), rhs.norm())
        })?;
        evidence.push(check);
        Some(w)
    } else {
        None
    };
    Ok(EquivalenceVerdict { equivalent, witness, harmonic_gap, evidence })
}

/// `2 sinh(omega(p, q) / 2)`, the harmonic factor of the mode commutator,
/// computed from the generator values without forming the harmonic part.
pub fn commutator_factor(alpha: &Generator, p: &Momentum, q: &Momentum) -> Complex64 {
    let s = p + q;
    let w = alpha.eval(&s, p) - alpha.eval(&s, q);
    (w * 0.5).sinh() * 2.0
}

/// Compares the harmonic mode-commutator factors of two generators; passes
/// exactly when the products are equivalent.
pub fn mode_commutator_criterion(
    alpha1: &Generator,
    alpha2: &Generator,
    samples: &SampleSet,
    tol: f64,
) -> Result<PredicateReport> {
    if alpha1.dim() != alpha2.dim() {
        return Err(Error::DimensionMismatch { expected: alpha1.dim(), found: alpha2.dim() });
    }
    sample_report("mode-commutator", samples, 2, tol, ExecMode::default(), |t| {
        let a = commutator_factor(alpha1, &t[0], &t[1]);
        let b = commutator_factor(alpha2, &t[0], &t[1]);
        scaled((a - b).norm(), a.norm().max(b.norm()))
    })
}

/// Residuals of the one-, two- and three-field identities implied by
/// `alpha1 + d beta = alpha2`.
#[derive(Debug, Clone)]
pub struct QuantumIdentities {
    /// `beta(0) = 0`.
    pub origin: PredicateReport,
    /// `alpha1(0,p) + beta(-p) + beta(p) = alpha2(0,p)`.
    pub two_point: PredicateReport,
    /// `alpha1(0,-p-q) + alpha1(p+q,p) + beta(p) + beta(q) + beta(-p-q)
    ///  = alpha2(0,-p-q) + alpha2(p+q,p)`.
    pub three_point: PredicateReport,
}

impl QuantumIdentities {
    pub fn pass(&self) -> bool {
        self.origin.pass && self.two_point.pass && self.three_point.pass
    }

    pub fn reports(&self) -> [&PredicateReport; 3] {
        [&self.origin, &self.two_point, &self.three_point]
    }

    pub fn combined(&self, tol: f64) -> PredicateReport {
        PredicateReport::combine(
            "quantum-identities",
            tol,
            &[self.origin.clone(), self.two_point.clone(), self.three_point.clone()],
        )
    }
}

pub fn quantum_identities(
    alpha1: &Generator,
    alpha2: &Generator,
    beta: &OneCochain,
    samples: &SampleSet,
    tol: f64,
) -> Result<QuantumIdentities> {
    let dim = alpha1.dim();
    if alpha2.dim() != dim || beta.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: alpha2.dim().min(beta.dim()) });
    }
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let z = Momentum::zero(dim);
    let origin =
        PredicateReport::from_residuals("origin", tol, std::iter::once((beta.eval(&z).norm(), vec![z.clone()])));
    let two_point = sample_report("two-point", samples, 1, tol, ExecMode::default(), |t| {
        let p = &t[0];
        let terms = [alpha1.eval(&z, p), beta.eval(&-p), beta.eval(p), -alpha2.eval(&z, p)];
        residual(&terms)
    })?;
    let three_point = sample_report("three-point", samples, 2, tol, ExecMode::default(), |t| {
        let (p, q) = (&t[0], &t[1]);
        let s = p + q;
        let ns = -&s;
        let terms = [
            alpha1.eval(&z, &ns),
            alpha1.eval(&s, p),
            beta.eval(p),
            beta.eval(q),
            beta.eval(&ns),
            -alpha2.eval(&z, &ns),
            -alpha2.eval(&s, p),
        ];
        residual(&terms)
    })?;
    Ok(QuantumIdentities { origin, two_point, three_point })
}

fn residual(terms: &[Complex64]) -> f64 {
    let sum: Complex64 = terms.iter().sum();
    scaled(sum.norm(), terms.iter().fold(0.0, |m, z| m.max(z.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::PolynomialOneCochain;
    use crate::generators::{make_moyal, make_wick_voros, wick_voros_witness};
    use crate::star::star;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn theta() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 0.6, -0.6, 0.0])
    }

    fn ts() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 0.3])
    }

    fn grid() -> GridSpec {
        GridSpec::new(2, 11, 0.5).unwrap()
    }

    fn samples() -> SampleSet {
        SampleSet::on_lattice(&grid(), 300, 3, 3)
    }

    #[test]
    fn apply_t_basics() {
        let g = grid();
        let f = BandlimitedField::random(g, 2, 1).unwrap();
        assert_eq!(apply_t(&OneCochain::zero(2), &f).unwrap(), f);
        let beta = wick_voros_witness(&ts()).unwrap();
        let one = BandlimitedField::unit(g);
        assert_eq!(apply_t(&beta, &one).unwrap(), one);
        let k = c(0.3, -2.0);
        let lhs = apply_t(&beta, &f.scale(k)).unwrap();
        let rhs = apply_t(&beta, &f).unwrap().scale(k);
        assert!(lhs.max_diff(&rhs).unwrap().0 < 1e-15);
    }

    #[test]
    fn apply_t_intertwines() {
        // T_beta(f *_wv g) = T_beta f *_gm T_beta g with wv = gm + d beta
        let g = grid();
        let wv = make_wick_voros(&theta(), &ts()).unwrap();
        let gm = make_moyal(&theta()).unwrap();
        let beta = wick_voros_witness(&ts()).unwrap();
        let f = BandlimitedField::random(g, 2, 4).unwrap();
        let h = BandlimitedField::random(g, 2, 5).unwrap();
        let lhs = apply_t(&beta, &star(&f, &h, &wv).unwrap()).unwrap();
        let rhs = star(&apply_t(&beta, &f).unwrap(), &apply_t(&beta, &h).unwrap(), &gm).unwrap();
        assert!(lhs.max_diff(&rhs).unwrap().0 < 1e-12 * lhs.max_abs());
    }

    #[test]
    fn moyal_and_wick_voros_are_equivalent() {
        let gm = make_moyal(&theta()).unwrap();
        let wv = make_wick_voros(&theta(), &ts()).unwrap();
        let v = decide_equivalence(&gm, &wv, &samples(), &grid(), 1e-8).unwrap();
        assert!(v.equivalent);
        assert!(v.evidence.iter().all(|r| r.pass));
        let d = coboundary1(&v.witness.unwrap().beta);
        for t in SampleSet::on_lattice(&grid(), 200, 9, 2).triples() {
            let (p, q) = (&t[0], &t[1]);
            let (pc, qc, s) = (p.components(), q.components(), ts());
            let mut want = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    want += qc[i] * s[(i, j)] * (pc[j] - qc[j]);
                }
            }
            assert!((d.eval(p, q) - c(want, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn scaled_moyal_is_not_equivalent() {
        let gm = make_moyal(&theta()).unwrap();
        let gm2 = make_moyal(&(theta() * 2.0)).unwrap();
        let v = decide_equivalence(&gm, &gm2, &samples(), &grid(), 1e-8).unwrap();
        assert!(!v.equivalent);
        assert!(v.witness.is_none());
        assert!(v.harmonic_gap > 1e-3);
        assert!(!mode_commutator_criterion(&gm, &gm2, &samples(), 1e-8).unwrap().pass);
    }

    #[test]
    fn self_equivalence_and_rejection() {
        let wv = make_wick_voros(&theta(), &ts()).unwrap();
        let v = decide_equivalence(&wv, &wv, &samples(), &grid(), 1e-8).unwrap();
        assert!(v.equivalent);
        assert!(v.witness.unwrap().table.values.iter().all(|z| z.norm() < 1e-15));
        let broken = Generator::custom(2, "broken", |p, q| c(q.norm_sq() * (p - q).norm_sq(), 0.0)).unwrap();
        assert!(matches!(decide_equivalence(&wv, &broken, &samples(), &grid(), 1e-8), Err(Error::NotACocycle { .. })));
    }

    #[test]
    fn criterion_examples() {
        let gm = make_moyal(&theta()).unwrap();
        let wv = make_wick_voros(&theta(), &ts()).unwrap();
        let s = samples();
        assert!(mode_commutator_criterion(&gm, &wv, &s, 1e-8).unwrap().pass);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b1 = OneCochain::polynomial(PolynomialOneCochain::random(2, 3, 0.2, false, &mut rng));
        let b2 = OneCochain::polynomial(PolynomialOneCochain::random(2, 3, 0.2, false, &mut rng));
        let r = mode_commutator_criterion(&coboundary1(&b1), &coboundary1(&b2), &s, 1e-8).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn identities_for_moyal_and_wick_voros() {
        let gm = make_moyal(&theta()).unwrap();
        let wv = make_wick_voros(&theta(), &ts()).unwrap();
        let beta = wick_voros_witness(&ts()).unwrap();
        let s = SampleSet::random(2, 200, 6, 3.0);
        let ok = quantum_identities(&gm, &wv, &beta, &s, 1e-12).unwrap();
        assert!(ok.pass(), "{:?}", ok);
        let flipped = quantum_identities(&gm, &wv, &beta.neg(), &s, 1e-8).unwrap();
        assert!(!flipped.two_point.pass);
        let trivial = quantum_identities(&gm, &gm, &OneCochain::zero(2), &s, 0.0).unwrap();
        assert!(trivial.pass());
    }

    #[test]
    fn conjugate_class_duality() {
        let wv = make_wick_voros(&theta(), &ts()).unwrap();
        let s = SampleSet::random(2, 200, 8, 3.0);
        let h = harmonic_form(&wv);
        let hc = harmonic_form(&wv.conjugate());
        for t in s.triples() {
            assert!((h.eval(&t[0], &t[1]) + hc.eval(&t[0], &t[1])).norm() < 1e-12);
        }
    }
}
