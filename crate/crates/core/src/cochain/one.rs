use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::GridSpec;
use crate::momentum::Momentum;

/// Tolerance for `beta(0) = 0` at construction.
pub const ORIGIN_TOL: f64 = 1e-12;

pub type ScalarFn = Arc<dyn Fn(&Momentum) -> Complex64 + Send + Sync>;

/// Polynomial in the momentum components with zero constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialOneCochain {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl PolynomialOneCochain {
    /// Builds a polynomial from `(multi-index, coefficient)` pairs; repeated
    /// multi-indices are summed.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, c) in terms {
            if idx.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: idx.len() });
            }
            *map.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        if let Some(c) = map.get(&vec![0u32; dim]) {
            if c.norm() > ORIGIN_TOL {
                return Err(Error::NonzeroAtOrigin { value: c.norm() });
            }
        }
        map.retain(|idx, c| idx.iter().any(|&k| k > 0) && *c != Complex64::new(0.0, 0.0));
        Ok(PolynomialOneCochain { dim, terms: map })
    }

    /// Random polynomial with every monomial of degree `1..=max_degree`,
    /// coefficients uniform in `[-scale, scale]` (complex unless `real`).
    pub fn random<R: Rng>(dim: usize, max_degree: u32, scale: f64, real: bool, rng: &mut R) -> Self {
        let terms = multi_indices(dim, max_degree)
            .into_iter()
            .map(|idx| {
                let re = rng.gen_range(-scale..=scale);
                let im = if real { 0.0 } else { rng.gen_range(-scale..=scale) };
                (idx, Complex64::new(re, im))
            })
            .collect::<Vec<_>>();
        PolynomialOneCochain::new(dim, terms).expect("monomials have positive degree")
    }

    /// Random polynomial compatible with conjugation, `conj(beta(p)) = beta(-p)`:
    /// real coefficients on even degrees and imaginary ones on odd degrees.
    pub fn random_starred<R: Rng>(dim: usize, max_degree: u32, scale: f64, rng: &mut R) -> Self {
        let terms = multi_indices(dim, max_degree)
            .into_iter()
            .map(|idx| {
                let v = rng.gen_range(-scale..=scale);
                let deg: u32 = idx.iter().sum();
                let c = if deg.is_multiple_of(2) { Complex64::new(v, 0.0) } else { Complex64::new(0.0, v) };
                (idx, c)
            })
            .collect::<Vec<_>>();
        PolynomialOneCochain::new(dim, terms).expect("monomials have positive degree")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn eval(&self, p: &Momentum) -> Complex64 {
        let x = p.components();
        self.terms
            .iter()
            .map(|(idx, c)| {
                let mono: f64 = idx.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product();
                c * mono
            })
            .sum()
    }
}

/// All multi-indices of length `dim` with total degree in `1..=max_degree`.
pub fn multi_indices(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == dim {
            if cur.iter().any(|&k| k > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max_degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Values of a 1-cochain on every point of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTable {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl LatticeTable {
    /// Value at a lattice momentum; NaN off the lattice.
    pub fn eval(&self, p: &Momentum) -> Complex64 {
        match self.grid.lattice_index(p) {
            Some(i) => self.values[i],
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CochainKind {
    PolynomialCoefficients,
    QuadraticForm,
    Tabulated,
    Composite,
}

impl CochainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CochainKind::PolynomialCoefficients => "polynomial-coefficients",
            CochainKind::QuadraticForm => "quadratic-form",
            CochainKind::Tabulated => "tabulated",
            CochainKind::Composite => "composite",
        }
    }
}

pub enum CochainNode {
    Zero,
    Polynomial(PolynomialOneCochain),
    /// `scale * p^T M p`
    QuadraticForm {
        matrix: DMatrix<f64>,
        scale: Complex64,
    },
    Tabulated(LatticeTable),
    Sum(Vec<OneCochain>),
    Scaled(Complex64, OneCochain),
    Custom {
        label: String,
        func: ScalarFn,
    },
}

/// A complex function of one momentum vanishing at the origin.
#[derive(Clone)]
pub struct OneCochain {
    dim: usize,
    node: Arc<CochainNode>,
}

impl fmt::Debug for OneCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneCochain({}, dim={})", self.kind().as_str(), self.dim)
    }
}

impl OneCochain {
    fn from_node(dim: usize, node: CochainNode) -> Self {
        OneCochain { dim, node: Arc::new(node) }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_node(dim, CochainNode::Zero)
    }

    pub fn polynomial(poly: PolynomialOneCochain) -> Self {
        Self::from_node(poly.dim, CochainNode::Polynomial(poly))
    }

    /// `beta(p) = scale * p^T M p`.
    pub fn quadratic_form(matrix: DMatrix<f64>, scale: Complex64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NonSquareMatrix { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        Ok(Self::from_node(matrix.nrows(), CochainNode::QuadraticForm { matrix, scale }))
    }

    pub fn tabulated(table: LatticeTable) -> Result<Self> {
        let origin = table.eval(&Momentum::zero(table.grid.dim));
        if origin.norm().is_nan() || origin.norm() > ORIGIN_TOL {
            return Err(Error::NonzeroAtOrigin { value: origin.norm() });
        }
        Ok(Self::from_node(table.grid.dim, CochainNode::Tabulated(table)))
    }

    /// Wraps an arbitrary function, checking `f(0) = 0`.
    pub fn custom<F>(dim: usize, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&Momentum) -> Complex64 + Send + Sync + 'static,
    {
        let origin = f(&Momentum::zero(dim));
        if origin.norm().is_nan() || origin.norm() > ORIGIN_TOL {
            return Err(Error::NonzeroAtOrigin { value: origin.norm() });
        }
        Ok(Self::from_node(dim, CochainNode::Custom { label: label.into(), func: Arc::new(f) }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &CochainNode {
        &self.node
    }

    pub fn kind(&self) -> CochainKind {
        match &*self.node {
            CochainNode::Zero | CochainNode::Polynomial(_) => CochainKind::PolynomialCoefficients,
            CochainNode::QuadraticForm { .. } => CochainKind::QuadraticForm,
            CochainNode::Tabulated(_) => CochainKind::Tabulated,
            _ => CochainKind::Composite,
        }
    }

    pub fn eval(&self, p: &Momentum) -> Complex64 {
        debug_assert_eq!(p.dim(), self.dim);
        match &*self.node {
            CochainNode::Zero => Complex64::new(0.0, 0.0),
            CochainNode::Polynomial(poly) => poly.eval(p),
            CochainNode::QuadraticForm { matrix, scale } => {
                let x = p.components();
                let mut acc = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        acc += x[i] * matrix[(i, j)] * x[j];
                    }
                }
                scale * acc
            }
            CochainNode::Tabulated(t) => t.eval(p),
            CochainNode::Sum(parts) => parts.iter().map(|b| b.eval(p)).sum(),
            CochainNode::Scaled(c, b) => c * b.eval(p),
            CochainNode::Custom { func, .. } => func(p),
        }
    }

    pub fn add(&self, other: &OneCochain) -> Result<OneCochain> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Self::from_node(self.dim, CochainNode::Sum(vec![self.clone(), other.clone()])))
    }

    pub fn scale(&self, c: Complex64) -> OneCochain {
        Self::from_node(self.dim, CochainNode::Scaled(c, self.clone()))
    }

    pub fn neg(&self) -> OneCochain {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn sub(&self, other: &OneCochain) -> Result<OneCochain> {
        self.add(&other.neg())
    }

    pub fn as_polynomial(&self) -> Option<&PolynomialOneCochain> {
        match &*self.node {
            CochainNode::Polynomial(p) => Some(p),
            _ => None,
        }
    }
}
