use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::one::OneCochain;
use crate::error::{Error, Result};
use crate::generators::QuadraticGenerator;
use crate::momentum::Momentum;

pub type PairFn = Arc<dyn Fn(&Momentum, &Momentum) -> Complex64 + Send + Sync>;

/// Tolerance of the unitality probe run when wrapping a custom function.
pub const UNITAL_TOL: f64 = 1e-12;

pub enum GeneratorNode {
    Zero,
    Quadratic(QuadraticGenerator),
    /// The coboundary `beta(q) - beta(p) + beta(p - q)`.
    Coboundary(OneCochain),
    Sum(Vec<Generator>),
    Scaled(Complex64, Generator),
    Custom {
        label: String,
        func: PairFn,
    },
}

/// A complex 2-cochain `alpha(p, q)` weighting the twisted convolution.
///
/// The first argument is the total momentum of a product, the second the
/// momentum carried by the left factor.
#[derive(Clone)]
pub struct Generator {
    dim: usize,
    node: Arc<GeneratorNode>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({}, dim={})", self.kind(), self.dim)
    }
}

impl Generator {
    fn from_node(dim: usize, node: GeneratorNode) -> Self {
        Generator { dim, node: Arc::new(node) }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_node(dim, GeneratorNode::Zero)
    }

    pub fn quadratic(q: QuadraticGenerator) -> Self {
        Self::from_node(q.dim(), GeneratorNode::Quadratic(q))
    }

    /// Coboundary of a 1-cochain: `(p, q) -> beta(q) - beta(p) + beta(p - q)`.
    pub fn coboundary(beta: &OneCochain) -> Self {
        Self::from_node(beta.dim(), GeneratorNode::Coboundary(beta.clone()))
    }

    /// Wraps an arbitrary function after probing unitality at a few points.
    pub fn custom<F>(dim: usize, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&Momentum, &Momentum) -> Complex64 + Send + Sync + 'static,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let zero = Momentum::zero(dim);
        let mut worst = 0.0f64;
        for _ in 0..16 {
            let p = Momentum::from_fn(dim, |_| rng.gen_range(-2.0..2.0));
            let q = Momentum::from_fn(dim, |_| rng.gen_range(-2.0..2.0));
            let scale = 1.0 + f(&p, &q).norm();
            let r = f(&p, &p).norm().max(f(&p, &zero).norm()) / scale;
            worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
        }
        if worst > UNITAL_TOL {
            return Err(Error::NotUnital { residual: worst });
        }
        Ok(Self::custom_unchecked(dim, label, f))
    }

    /// Wraps a function known to be unital by construction.
    pub(crate) fn custom_unchecked<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Momentum, &Momentum) -> Complex64 + Send + Sync + 'static,
    {
        Self::from_node(dim, GeneratorNode::Custom { label: label.into(), func: Arc::new(f) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &GeneratorNode {
        &self.node
    }

    pub fn kind(&self) -> String {
        match &*self.node {
            GeneratorNode::Zero => "zero".into(),
            GeneratorNode::Quadratic(_) => "quadratic".into(),
            GeneratorNode::Coboundary(_) => "coboundary".into(),
            GeneratorNode::Sum(_) => "sum".into(),
            GeneratorNode::Scaled(..) => "scaled".into(),
            GeneratorNode::Custom { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, p: &Momentum, q: &Momentum) -> Complex64 {
        debug_assert_eq!(p.dim(), self.dim);
        debug_assert_eq!(q.dim(), self.dim);
        match &*self.node {
            GeneratorNode::Zero => Complex64::new(0.0, 0.0),
            GeneratorNode::Quadratic(g) => g.eval(p, q),
            GeneratorNode::Coboundary(beta) => beta.eval(q) - beta.eval(p) + beta.eval(&(p - q)),
            GeneratorNode::Sum(parts) => parts.iter().map(|g| g.eval(p, q)).sum(),
            GeneratorNode::Scaled(c, g) => c * g.eval(p, q),
            GeneratorNode::Custom { func, .. } => func(p, q),
        }
    }

    /// Pointwise sum; fails on dimension mismatch.
    pub fn add(&self, other: &Generator) -> Result<Generator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Self::from_node(self.dim, GeneratorNode::Sum(vec![self.clone(), other.clone()])))
    }

    pub fn scale(&self, c: Complex64) -> Generator {
        Self::from_node(self.dim, GeneratorNode::Scaled(c, self.clone()))
    }

    pub fn neg(&self) -> Generator {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn sub(&self, other: &Generator) -> Result<Generator> {
        self.add(&other.neg())
    }

    /// Pointwise complex conjugate `conj(alpha(p, q))`.
    pub fn conjugate(&self) -> Generator {
        let g = self.clone();
        Self::custom_unchecked(self.dim, "conjugate", move |p, q| g.eval(p, q).conj())
    }

    /// Same values with the structure hidden, forcing numeric code paths.
    pub fn opaque(&self) -> Generator {
        let g = self.clone();
        Self::custom_unchecked(self.dim, "opaque", move |p, q| g.eval(p, q))
    }
}

/// Coboundary of a 2-cochain, evaluated on triples:
/// `alpha(p1,p2) - alpha(p0,p2) + alpha(p0,p1) - alpha(p0-p2, p1-p2)`.
#[derive(Clone, Debug)]
pub struct TripleCoboundary {
    alpha: Generator,
}

impl TripleCoboundary {
    pub fn eval(&self, p0: &Momentum, p1: &Momentum, p2: &Momentum) -> Complex64 {
        self.terms(p0, p1, p2).iter().sum()
    }

    /// The four signed terms of the sum, for residual scaling.
    pub fn terms(&self, p0: &Momentum, p1: &Momentum, p2: &Momentum) -> [Complex64; 4] {
        let a = &self.alpha;
        [a.eval(p1, p2), -a.eval(p0, p2), a.eval(p0, p1), -a.eval(&(p0 - p2), &(p1 - p2))]
    }
}

/// The coboundary of a 1-cochain as a generator.
pub fn coboundary1(beta: &OneCochain) -> Generator {
    Generator::coboundary(beta)
}

/// The coboundary of a 2-cochain, which vanishes exactly on 2-cocycles.
pub fn coboundary2(alpha: &Generator) -> TripleCoboundary {
    TripleCoboundary { alpha: alpha.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::one::PolynomialOneCochain;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn p1(x: f64) -> Momentum {
        Momentum::from([x])
    }

    fn square() -> OneCochain {
        OneCochain::polynomial(PolynomialOneCochain::new(1, vec![(vec![2], re(1.0))]).unwrap())
    }

    #[test]
    fn coboundary_of_zero_is_zero() {
        let a = coboundary1(&OneCochain::zero(2));
        assert_eq!(a.eval(&Momentum::from([1.0, 2.0]), &Momentum::from([-0.5, 3.0])), re(0.0));
    }

    #[test]
    fn coboundary_of_square_by_hand() {
        // beta(1) - beta(2) + beta(1) = 1 - 4 + 1
        let a = coboundary1(&square());
        assert_eq!(a.eval(&p1(2.0), &p1(1.0)), re(-2.0));
    }

    #[test]
    fn coboundary_is_unital() {
        let a = coboundary1(&square());
        for x in [-1.5, 0.3, 2.0] {
            assert_eq!(a.eval(&p1(x), &p1(x)), re(0.0));
            assert_eq!(a.eval(&p1(x), &p1(0.0)), re(0.0));
        }
    }

    #[test]
    fn non_cocycle_by_hand() {
        // alpha(p,q) = q^2 (p-q)^2 is unital but not a cocycle.
        let a = Generator::custom(1, "q2pq2", |p, q| {
            let (p, q) = (p.components()[0], q.components()[0]);
            re(q * q * (p - q) * (p - q))
        })
        .unwrap();
        let d = coboundary2(&a);
        // alpha(1,2) - alpha(4,2) + alpha(4,1) - alpha(2,-1) = 4 - 16 + 9 - 9
        assert_eq!(d.eval(&p1(4.0), &p1(1.0), &p1(2.0)), re(-12.0));
        // (3,2,1) happens to cancel: 1 - 4 + 4 - 1
        assert_eq!(d.eval(&p1(3.0), &p1(2.0), &p1(1.0)), re(0.0));
    }

    #[test]
    fn custom_rejects_non_unital() {
        let r = Generator::custom(1, "bad", |_, q| re(q.components()[0] + 1.0));
        assert!(matches!(r, Err(Error::NotUnital { .. })));
    }

    #[test]
    fn sum_dim_mismatch() {
        let r = Generator::zero(1).add(&Generator::zero(2));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
