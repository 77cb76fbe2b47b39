//! Harmonic forms, coboundary witnesses and derived invariants.
//!
//! For a cocycle `alpha`, `alpha_H(p, q) = (alpha(p+q, q) - alpha(p+q, p)) / 2`
//! is the unique harmonic representative of its class, and
//! `alpha - alpha_H = d beta` for a 1-cochain `beta` recovered on a lattice.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cochain::{coboundary1, is_cocycle, Generator, GeneratorNode, LatticeTable, OneCochain};
use crate::error::{Error, Result};
use crate::exec::{map_range, ExecMode};
use crate::generators::QuadraticGenerator;
use crate::lattice::GridSpec;
use crate::momentum::Momentum;
use crate::report::{sample_report, scaled, PredicateReport};
use crate::sampling::SampleSet;

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

/// `alpha'(p, q) = (alpha(p, q) + alpha(-p, -q)) / 2`.
pub fn symmetrize(alpha: &Generator) -> Generator {
    let a = alpha.clone();
    Generator::custom_unchecked(alpha.dim(), "symmetrized", move |p, q| half() * (a.eval(p, q) + a.eval(&-p, &-q)))
}

/// `alpha_-(p, q) = (alpha(p, q) - alpha(-p, q - p)) / 2`.
pub fn minus_part(alpha: &Generator) -> Generator {
    match alpha.node() {
        GeneratorNode::Quadratic(q) => quadratic_only_a(q),
        _ => {
            let a = alpha.clone();
            Generator::custom_unchecked(alpha.dim(), "minus-part", move |p, q| {
                half() * (a.eval(p, q) - a.eval(&-p, &(q - p)))
            })
        }
    }
}

/// `alpha_+ = alpha - alpha_-`.
pub fn plus_part(alpha: &Generator) -> Generator {
    match alpha.node() {
        GeneratorNode::Quadratic(q) => Generator::quadratic(
            QuadraticGenerator::new(DMatrix::zeros(q.dim(), q.dim()), q.symmetric().clone())
                .expect("symmetric part stays symmetric"),
        ),
        _ => {
            let a = alpha.clone();
            Generator::custom_unchecked(alpha.dim(), "plus-part", move |p, q| {
                half() * (a.eval(p, q) + a.eval(&-p, &(q - p)))
            })
        }
    }
}

fn quadratic_only_a(q: &QuadraticGenerator) -> Generator {
    Generator::quadratic(
        QuadraticGenerator::new(q.antisymmetric().clone(), DMatrix::zeros(q.dim(), q.dim()))
            .expect("antisymmetric part stays antisymmetric"),
    )
}

/// Harmonic representative, without checking the cocycle condition.
///
/// Structured generators are reduced symbolically: coboundaries vanish and
/// quadratic generators keep their antisymmetric part.
pub fn harmonic_form(alpha: &Generator) -> Generator {
    let dim = alpha.dim();
    match alpha.node() {
        GeneratorNode::Zero | GeneratorNode::Coboundary(_) => Generator::zero(dim),
        GeneratorNode::Quadratic(q) => quadratic_only_a(q),
        GeneratorNode::Sum(parts) => {
            let mut acc = harmonic_form(&parts[0]);
            for g in &parts[1..] {
                acc = acc.add(&harmonic_form(g)).expect("summands share a dimension");
            }
            acc
        }
        GeneratorNode::Scaled(c, g) => harmonic_form(g).scale(*c),
        GeneratorNode::Custom { .. } => numeric_harmonic(alpha),
    }
}

/// The harmonic formula evaluated pointwise, bypassing symbolic reduction.
pub fn numeric_harmonic(alpha: &Generator) -> Generator {
    let a = alpha.clone();
    Generator::custom_unchecked(alpha.dim(), "harmonic", move |p, q| {
        let s = p + q;
        half() * (a.eval(&s, q) - a.eval(&s, p))
    })
}

/// Harmonic part of a cocycle; fails if the cocycle residual on `samples`
/// exceeds `tol`.
pub fn harmonic_part(alpha: &Generator, samples: &SampleSet, tol: f64) -> Result<Generator> {
    let r = is_cocycle(alpha, samples, tol)?;
    if !r.pass {
        return Err(Error::NotACocycle { residual: r.max_residual });
    }
    Ok(harmonic_form(alpha))
}

/// Laplace-Beltrami operator applied to a 2-cochain:
/// `alpha(0,q) - alpha(0,p) + alpha(0,p-q) + alpha(p,q) + alpha(p,p-q)`.
#[derive(Debug, Clone)]
pub struct LaplaceBeltrami {
    alpha: Generator,
}

impl LaplaceBeltrami {
    pub fn terms(&self, p: &Momentum, q: &Momentum) -> [Complex64; 5] {
        let a = &self.alpha;
        let z = Momentum::zero(p.dim());
        let pq = p - q;
        [a.eval(&z, q), -a.eval(&z, p), a.eval(&z, &pq), a.eval(p, q), a.eval(p, &pq)]
    }

    pub fn eval(&self, p: &Momentum, q: &Momentum) -> Complex64 {
        self.terms(p, q).iter().sum()
    }
}

pub fn laplace_beltrami(alpha: &Generator) -> LaplaceBeltrami {
    LaplaceBeltrami { alpha: alpha.clone() }
}

/// Harmonicity test: the Laplace-Beltrami residual vanishes on `samples`.
pub fn is_harmonic(alpha: &Generator, samples: &SampleSet, tol: f64) -> Result<PredicateReport> {
    let lb = laplace_beltrami(alpha);
    sample_report("harmonic", samples, 2, tol, ExecMode::default(), |t| {
        let terms = lb.terms(&t[0], &t[1]);
        let sum: Complex64 = terms.iter().sum();
        scaled(sum.norm(), terms.iter().fold(0.0, |m, z| m.max(z.norm())))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    /// Bound on the harmonic and path-consistency residuals.
    pub tol: f64,
    /// Random monotone paths used to test path independence.
    pub paths: usize,
    /// Lattice pairs on which the harmonic part must vanish.
    pub probes: usize,
    pub seed: u64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { tol: 1e-8, paths: 100, probes: 200, seed: 0x77 }
    }
}

/// A 1-cochain `beta` on a lattice with `alpha = d beta`, gauge-fixed by
/// `beta(dp e_mu) = 0`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub beta: OneCochain,
    pub table: LatticeTable,
    /// Values pinned on the unit steps `dp e_mu` (all zero).
    pub gauge: Vec<Complex64>,
    pub harmonic_residual: f64,
    pub path_residual: f64,
    /// `max |conj beta(p) - beta(-p)|`, reported but not enforced.
    pub involution_residual: f64,
}

fn step(alpha: &Generator, grid: &GridSpec, from: &[i64], axis: usize, sign: i64) -> Complex64 {
    let e = Momentum::axis(grid.dim, axis, grid.dp);
    if sign > 0 {
        // beta(y + e) = beta(y) - alpha(y + e, e)
        let mut to = from.to_vec();
        to[axis] += 1;
        -alpha.eval(&grid.momentum_of(&to), &e)
    } else {
        // beta(y - e) = beta(y) + alpha(y, e)
        alpha.eval(&grid.momentum_of(from), &e)
    }
}

/// Recovers `beta` with `d beta = alpha` on every lattice point of `grid`.
pub fn recover_witness(alpha: &Generator, grid: &GridSpec, opts: &WitnessOptions) -> Result<Witness> {
    if alpha.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, found: alpha.dim() });
    }
    let probes = SampleSet::on_lattice(grid, opts.probes.max(1), opts.seed, grid.half());
    let harm = numeric_harmonic(alpha);
    let hr = sample_report("harmonic-gap", &probes, 2, opts.tol, ExecMode::default(), |t| {
        scaled(harm.eval(&t[0], &t[1]).norm(), alpha.eval(&t[0], &t[1]).norm())
    })?;
    if !hr.pass {
        return Err(Error::NotACoboundary { residual: hr.max_residual });
    }

    // Predecessor of x: one step toward 0 along the last nonzero axis.
    let pred = |c: &[i64]| -> Option<(Vec<i64>, usize, i64)> {
        let axis = (0..c.len()).rev().find(|&a| c[a] != 0)?;
        let sign = c[axis].signum();
        let mut from = c.to_vec();
        from[axis] -= sign;
        Some((from, axis, sign))
    };
    let increments = map_range(ExecMode::default(), grid.len(), |i| {
        pred(&grid.coords(i)).map(|(from, axis, sign)| step(alpha, grid, &from, axis, sign))
    });
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by_key(|&i| grid.coords(i).iter().map(|k| k.abs()).sum::<i64>());
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for &i in &order {
        if let (Some(inc), Some((from, _, _))) = (increments[i], pred(&grid.coords(i))) {
            let j = grid.index_of(&from).expect("predecessor lies in the box");
            values[i] = values[j] + inc;
        }
    }
    if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(format!("witness at {}", grid.momentum(i))));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9);
    let h = grid.half();
    let mut path_residual = 0.0f64;
    for _ in 0..opts.paths {
        let target: Vec<i64> = (0..grid.dim).map(|_| rng.gen_range(-h..=h)).collect();
        let mut cur = vec![0i64; grid.dim];
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            let open: Vec<usize> = (0..grid.dim).filter(|&a| cur[a] != target[a]).collect();
            if open.is_empty() {
                break;
            }
            let axis = open[rng.gen_range(0..open.len())];
            let sign = target[axis].signum();
            acc += step(alpha, grid, &cur, axis, sign);
            cur[axis] += sign;
        }
        let table = values[grid.index_of(&target).expect("target in box")];
        let r = scaled((acc - table).norm(), table.norm());
        path_residual = if r.is_nan() { f64::INFINITY } else { path_residual.max(r) };
    }
    if path_residual > opts.tol {
        return Err(Error::InconsistentCoboundary { residual: path_residual });
    }

    let involution_residual = (0..grid.len()).fold(0.0f64, |m, i| {
        let neg: Vec<i64> = grid.coords(i).iter().map(|k| -k).collect();
        let j = grid.index_of(&neg).expect("box is symmetric");
        m.max((values[i].conj() - values[j]).norm())
    });
    let table = LatticeTable { grid: *grid, values };
    Ok(Witness {
        beta: OneCochain::tabulated(table.clone())?,
        table,
        gauge: vec![Complex64::new(0.0, 0.0); grid.dim],
        harmonic_residual: hr.max_residual,
        path_residual,
        involution_residual,
    })
}

/// `alpha = harmonic + d witness`.
#[derive(Debug, Clone)]
pub struct HodgeDecomposition {
    pub harmonic: Generator,
    pub witness: OneCochain,
    pub gauge: Vec<Complex64>,
    /// `max |alpha - harmonic - d witness|` (scaled) on lattice pairs.
    pub residual: f64,
}

/// Splits a cocycle into its harmonic part and a coboundary on `grid`.
pub fn decompose(
    alpha: &Generator,
    samples: &SampleSet,
    grid: &GridSpec,
    opts: &WitnessOptions,
) -> Result<HodgeDecomposition> {
    let harmonic = harmonic_part(alpha, samples, 1e-9)?;
    let rest = alpha.sub(&harmonic)?;
    let w = recover_witness(&rest, grid, opts)?;
    let d = coboundary1(&w.beta);
    // p, q within half the box keep p - q on the lattice
    let pairs = SampleSet::on_lattice(grid, opts.probes.max(1), opts.seed + 1, grid.half() / 2);
    let r = sample_report("decomposition", &pairs, 2, opts.tol, ExecMode::default(), |t| {
        let (p, q) = (&t[0], &t[1]);
        let a = alpha.eval(p, q);
        let b = harmonic.eval(p, q) + d.eval(p, q);
        scaled((a - b).norm(), a.norm())
    })?;
    Ok(HodgeDecomposition { harmonic, witness: w.beta, gauge: w.gauge, residual: r.max_residual })
}

/// `omega(p, q) = alpha(p+q, p) - alpha(p+q, q)`.
#[derive(Debug, Clone)]
pub struct Omega {
    alpha: Generator,
}

impl Omega {
    pub fn eval(&self, p: &Momentum, q: &Momentum) -> Complex64 {
        let s = p + q;
        self.alpha.eval(&s, p) - self.alpha.eval(&s, q)
    }
}

pub fn omega(alpha: &Generator) -> Omega {
    Omega { alpha: alpha.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorOptions {
    /// Finite-difference step.
    pub step: f64,
    /// Use closed forms for structured generators when available.
    pub exact: bool,
}

impl Default for CommutatorOptions {
    fn default() -> Self {
        CommutatorOptions { step: 1e-4, exact: true }
    }
}

/// Space-time commutator matrix with the default options.
pub fn commutator_matrix(alpha: &Generator) -> Result<DMatrix<Complex64>> {
    commutator_matrix_with(alpha, &CommutatorOptions::default())
}

/// `Theta[mu][nu] = d2 alpha / dp_mu dq_nu - d2 alpha / dp_nu dq_mu` at the
/// origin, the coefficient in `[x^mu, x^nu] = Theta[mu][nu]` for the product
/// generated by `alpha`. Quadratic generators give `-2i A`; coboundaries
/// and symmetric parts drop out.
pub fn commutator_matrix_with(alpha: &Generator, opts: &CommutatorOptions) -> Result<DMatrix<Complex64>> {
    let m = alpha.dim();
    if opts.exact {
        match alpha.node() {
            GeneratorNode::Zero | GeneratorNode::Coboundary(_) => return Ok(DMatrix::zeros(m, m)),
            GeneratorNode::Quadratic(q) => return Ok(q.antisymmetric().map(|x| Complex64::new(0.0, -2.0 * x))),
            GeneratorNode::Sum(parts) => {
                let mut acc = DMatrix::zeros(m, m);
                for g in parts {
                    acc += commutator_matrix_with(g, opts)?;
                }
                return Ok(acc);
            }
            GeneratorNode::Scaled(c, g) => return Ok(commutator_matrix_with(g, opts)? * *c),
            GeneratorNode::Custom { .. } => {}
        }
    }
    if !(opts.step.is_finite() && opts.step > 0.0) {
        return Err(Error::Config(format!("finite-difference step {}", opts.step)));
    }
    let mixed = |mu: usize, nu: usize, h: f64| -> Complex64 {
        let p = |s: f64| Momentum::axis(m, mu, s * h);
        let q = |s: f64| Momentum::axis(m, nu, s * h);
        (alpha.eval(&p(1.0), &q(1.0)) - alpha.eval(&p(1.0), &q(-1.0)) - alpha.eval(&p(-1.0), &q(1.0))
            + alpha.eval(&p(-1.0), &q(-1.0)))
            / (4.0 * h * h)
    };
    let richardson = |mu, nu| {
        let coarse = mixed(mu, nu, opts.step);
        let fine = mixed(mu, nu, opts.step / 2.0);
        (fine * 4.0 - coarse) / 3.0
    };
    let d = DMatrix::from_fn(m, m, richardson);
    let theta = DMatrix::from_fn(m, m, |mu, nu| d[(mu, nu)] - d[(nu, mu)]);
    if theta.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("commutator matrix derivative".into()));
    }
    Ok(theta)
}
