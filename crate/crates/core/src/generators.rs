//! Concrete generator families and their config form.
//!
//! The quadratic family `alpha(p, q) = i q^T A p + q^T S (p - q)` with `A`
//! antisymmetric and `S` symmetric covers Groenewold-Moyal (`S = 0`) and
//! Wick-Voros. Everything else enters as the coboundary of a polynomial.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cochain::{Generator, GeneratorNode, OneCochain, PolynomialOneCochain};
use crate::error::{Error, Result};
use crate::momentum::Momentum;

/// Symmetry tolerance for `A` and `S`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// `alpha(p, q) = i q^T A p + q^T S (p - q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGenerator {
    a: DMatrix<f64>,
    s: DMatrix<f64>,
}

impl QuadraticGenerator {
    pub fn new(a: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        check_square(&a)?;
        check_square(&s)?;
        if a.nrows() != s.nrows() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: s.nrows() });
        }
        let anti = (&a + a.transpose()).amax();
        if anti > SYMMETRY_TOL {
            return Err(Error::NotAntisymmetric { residual: anti });
        }
        let sym = (&s - s.transpose()).amax();
        if sym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { residual: sym });
        }
        Ok(QuadraticGenerator { a, s })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn antisymmetric(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn symmetric(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn eval(&self, p: &Momentum, q: &Momentum) -> Complex64 {
        let (p, q) = (p.components(), q.components());
        let n = self.dim();
        let mut im = 0.0;
        let mut re = 0.0;
        for i in 0..n {
            for j in 0..n {
                im += q[i] * self.a[(i, j)] * p[j];
                re += q[i] * self.s[(i, j)] * (p[j] - q[j]);
            }
        }
        Complex64::new(re, im)
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquareMatrix { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

/// Groenewold-Moyal generator `i q^T theta_A p`.
pub fn make_moyal(theta_a: &DMatrix<f64>) -> Result<Generator> {
    check_square(theta_a)?;
    let n = theta_a.nrows();
    Ok(Generator::quadratic(QuadraticGenerator::new(theta_a.clone(), DMatrix::zeros(n, n))?))
}

/// Wick-Voros generator: Moyal plus `q^T theta_S (p - q)`.
pub fn make_wick_voros(theta_a: &DMatrix<f64>, theta_s: &DMatrix<f64>) -> Result<Generator> {
    Ok(Generator::quadratic(QuadraticGenerator::new(theta_a.clone(), theta_s.clone())?))
}

/// The 1-cochain `-1/2 p^T theta_S p` whose coboundary is `q^T theta_S (p - q)`.
pub fn wick_voros_witness(theta_s: &DMatrix<f64>) -> Result<OneCochain> {
    OneCochain::quadratic_form(theta_s.clone(), Complex64::new(-0.5, 0.0))
}

pub fn make_sum(g1: &Generator, g2: &Generator) -> Result<Generator> {
    g1.add(g2)
}

/// Random antisymmetric matrix with entries uniform in `[-scale, scale]`.
pub fn random_antisymmetric<R: rand::Rng>(dim: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = rng.gen_range(-scale..=scale);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    m
}

/// Random symmetric matrix with entries uniform in `[-scale, scale]`.
pub fn random_symmetric<R: rand::Rng>(dim: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-scale..=scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Moyal,
    WickVoros,
    Coboundary,
    Quadratic,
    Sum,
}

/// One polynomial term `[multi-index, re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaTerm(pub Vec<u32>, pub f64, pub f64);

pub const SPEC_VERSION: u32 = 1;

fn spec_version() -> u32 {
    SPEC_VERSION
}

/// Config form of a generator.
///
/// `quadratic` accepts any of `theta_A`, `theta_S` and `beta` and sums
/// them; `sum` adds the generators listed in `terms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default = "spec_version")]
    pub version: u32,
    pub kind: GeneratorKind,
    pub dim: usize,
    #[serde(rename = "theta_A", default, skip_serializing_if = "Option::is_none")]
    pub theta_a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "theta_S", default, skip_serializing_if = "Option::is_none")]
    pub theta_s: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<BetaTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<GeneratorSpec>,
}

impl GeneratorSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    fn empty(kind: GeneratorKind, dim: usize) -> Self {
        GeneratorSpec {
            version: SPEC_VERSION,
            kind,
            dim,
            theta_a: None,
            theta_s: None,
            beta: Vec::new(),
            terms: Vec::new(),
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], dim: usize, name: &str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config(format!("{name}: ragged rows")));
    }
    if rows.len() != ncols {
        return Err(Error::NonSquareMatrix { rows: rows.len(), cols: ncols });
    }
    if rows.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: rows.len() });
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn beta_from_terms(dim: usize, terms: &[BetaTerm]) -> Result<OneCochain> {
    let poly = PolynomialOneCochain::new(dim, terms.iter().map(|t| (t.0.clone(), Complex64::new(t.1, t.2))))?;
    Ok(OneCochain::polynomial(poly))
}

/// Builds a generator from its config form.
pub fn parse_generator(spec: &GeneratorSpec) -> Result<Generator> {
    if spec.version != SPEC_VERSION {
        return Err(Error::Config(format!("unsupported spec version {}", spec.version)));
    }
    let dim = spec.dim;
    if dim == 0 {
        return Err(Error::Config("dim must be at least 1".into()));
    }
    let need = |m: &Option<Vec<Vec<f64>>>, name: &str| -> Result<DMatrix<f64>> {
        match m {
            Some(rows) => matrix_from_rows(rows, dim, name),
            None => Err(Error::Config(format!("{:?} generator requires {name}", spec.kind))),
        }
    };
    let opt = |m: &Option<Vec<Vec<f64>>>, name: &str| -> Result<DMatrix<f64>> {
        match m {
            Some(rows) => matrix_from_rows(rows, dim, name),
            None => Ok(DMatrix::zeros(dim, dim)),
        }
    };
    match spec.kind {
        GeneratorKind::Moyal => make_moyal(&need(&spec.theta_a, "theta_A")?),
        GeneratorKind::WickVoros => make_wick_voros(&need(&spec.theta_a, "theta_A")?, &need(&spec.theta_s, "theta_S")?),
        GeneratorKind::Coboundary => Ok(Generator::coboundary(&beta_from_terms(dim, &spec.beta)?)),
        GeneratorKind::Quadratic => {
            let q = Generator::quadratic(QuadraticGenerator::new(
                opt(&spec.theta_a, "theta_A")?,
                opt(&spec.theta_s, "theta_S")?,
            )?);
            if spec.beta.is_empty() {
                Ok(q)
            } else {
                q.add(&Generator::coboundary(&beta_from_terms(dim, &spec.beta)?))
            }
        }
        GeneratorKind::Sum => {
            let mut parts = spec.terms.iter();
            let first = parts.next().ok_or_else(|| Error::Config("sum generator requires terms".into()))?;
            let mut acc = parse_generator(first)?;
            for t in parts {
                acc = acc.add(&parse_generator(t)?)?;
            }
            if acc.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: acc.dim() });
            }
            Ok(acc)
        }
    }
}

/// Config form of a structured generator; `None` for custom functions or
/// coboundaries of non-polynomial cochains.
pub fn spec_of(g: &Generator) -> Option<GeneratorSpec> {
    let dim = g.dim();
    match g.node() {
        GeneratorNode::Zero => Some(GeneratorSpec::empty(GeneratorKind::Quadratic, dim)),
        GeneratorNode::Quadratic(q) => Some(GeneratorSpec {
            theta_a: Some(rows_from_matrix(q.antisymmetric())),
            theta_s: Some(rows_from_matrix(q.symmetric())),
            ..GeneratorSpec::empty(GeneratorKind::Quadratic, dim)
        }),
        GeneratorNode::Coboundary(beta) => {
            let poly = beta.as_polynomial()?;
            Some(GeneratorSpec {
                beta: poly.terms().map(|(k, c)| BetaTerm(k.clone(), c.re, c.im)).collect(),
                ..GeneratorSpec::empty(GeneratorKind::Coboundary, dim)
            })
        }
        GeneratorNode::Sum(parts) => Some(GeneratorSpec {
            terms: parts.iter().map(spec_of).collect::<Option<Vec<_>>>()?,
            ..GeneratorSpec::empty(GeneratorKind::Sum, dim)
        }),
        GeneratorNode::Scaled(..) | GeneratorNode::Custom { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{coboundary1, is_cocycle, is_commutative, is_unital};
    use crate::sampling::SampleSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_theta() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moyal_by_hand() {
        let a = make_moyal(&unit_theta()).unwrap();
        // i (q1 p2 - q2 p1) with p = (1,0), q = (0,1)
        let v = a.eval(&Momentum::from([1.0, 0.0]), &Momentum::from([0.0, 1.0]));
        assert_eq!(v, c(0.0, -1.0));
    }

    #[test]
    fn moyal_zero_theta_and_unitality() {
        let a = make_moyal(&DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(a.eval(&Momentum::from([1.0, 2.0]), &Momentum::from([3.0, -1.0])), c(0.0, 0.0));
        let a = make_moyal(&unit_theta()).unwrap();
        assert_eq!(a.eval(&Momentum::from([1.3, 2.0]), &Momentum::zero(2)), c(0.0, 0.0));
    }

    #[test]
    fn wick_voros_by_hand() {
        let a = make_wick_voros(&unit_theta(), &DMatrix::identity(2, 2)).unwrap();
        let v = a.eval(&Momentum::from([1.0, 0.0]), &Momentum::from([0.0, 1.0]));
        assert_eq!(v, c(-1.0, -1.0));
        let s = make_wick_voros(&unit_theta(), &DMatrix::zeros(2, 2)).unwrap();
        let m = make_moyal(&unit_theta()).unwrap();
        let (p, q) = (Momentum::from([0.4, -2.0]), Momentum::from([1.5, 0.25]));
        assert_eq!(s.eval(&p, &q), m.eval(&p, &q));
        assert_eq!(a.eval(&p, &p), c(0.0, 0.0));
    }

    #[test]
    fn symmetry_violations_rejected() {
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(make_moyal(&bad), Err(Error::NotAntisymmetric { .. })));
        assert!(matches!(make_wick_voros(&unit_theta(), &unit_theta()), Err(Error::NotSymmetric { .. })));
        let rect = DMatrix::zeros(2, 3);
        assert!(matches!(make_moyal(&rect), Err(Error::NonSquareMatrix { .. })));
    }

    #[test]
    fn wick_voros_witness_matches_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ta = random_antisymmetric(3, 1.0, &mut rng);
        let ts = random_symmetric(3, 1.0, &mut rng);
        let wv = make_wick_voros(&ta, &ts).unwrap();
        let gm = make_moyal(&ta).unwrap();
        let d = coboundary1(&wick_voros_witness(&ts).unwrap());
        let s = SampleSet::random(3, 100, 2, 2.0);
        for t in s.triples() {
            let lhs = wv.eval(&t[0], &t[1]) - gm.eval(&t[0], &t[1]);
            assert!((lhs - d.eval(&t[0], &t[1])).norm() < 1e-13);
        }
        let diff = wv.sub(&gm).unwrap();
        assert!(is_commutative(&diff, &s, 1e-12).unwrap().pass);
    }

    #[test]
    fn families_are_unital_cocycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = SampleSet::random(2, 500, 4, 3.0);
        let beta = OneCochain::polynomial(PolynomialOneCochain::random(2, 3, 0.3, false, &mut rng));
        let ta = random_antisymmetric(2, 1.0, &mut rng);
        let ts = random_symmetric(2, 1.0, &mut rng);
        let family = [
            make_moyal(&ta).unwrap(),
            make_wick_voros(&ta, &ts).unwrap(),
            coboundary1(&beta),
            make_sum(&make_moyal(&ta).unwrap(), &coboundary1(&beta)).unwrap(),
        ];
        for g in &family {
            assert!(is_cocycle(g, &s, 1e-9).unwrap().pass, "{g:?}");
            assert!(is_unital(g, &s, 1e-9).unwrap().pass, "{g:?}");
        }
    }

    #[test]
    fn sum_evaluates_pointwise() {
        let gm = make_moyal(&unit_theta()).unwrap();
        let beta = OneCochain::polynomial(
            PolynomialOneCochain::new(2, vec![(vec![1, 1], c(0.5, 0.0)), (vec![3, 0], c(0.0, 1.0))]).unwrap(),
        );
        let cb = coboundary1(&beta);
        let sum = make_sum(&gm, &cb).unwrap();
        let (p, q) = (Momentum::from([0.7, -1.2]), Momentum::from([2.0, 0.3]));
        assert_eq!(sum.eval(&p, &q), gm.eval(&p, &q) + cb.eval(&p, &q));
    }

    #[test]
    fn spec_round_trip() {
        let spec = GeneratorSpec::from_json(r#"{"kind":"moyal","dim":2,"theta_A":[[0,0.37],[-0.37,0]]}"#).unwrap();
        let g = parse_generator(&spec).unwrap();
        let again = GeneratorSpec::from_json(&spec_of(&g).unwrap().to_json()).unwrap();
        let h = parse_generator(&again).unwrap();
        let s = SampleSet::random(2, 50, 3, 3.0);
        for t in s.triples() {
            assert!((g.eval(&t[0], &t[1]) - h.eval(&t[0], &t[1])).norm() <= 1e-15);
        }
    }

    #[test]
    fn spec_with_beta_and_sum() {
        let text = r#"{
            "kind": "sum", "dim": 1,
            "terms": [
                {"kind": "coboundary", "dim": 1, "beta": [[[2], 1.0, 0.0]]},
                {"kind": "quadratic", "dim": 1, "theta_S": [[0.5]]}
            ]
        }"#;
        let g = parse_generator(&GeneratorSpec::from_json(text).unwrap()).unwrap();
        // d(p^2)(2,1) = -2 and q S (p - q) = 0.5
        assert_eq!(g.eval(&Momentum::from([2.0]), &Momentum::from([1.0])), c(-1.5, 0.0));
    }

    #[test]
    fn malformed_specs() {
        let e = parse_generator(
            &GeneratorSpec::from_json(r#"{"kind":"moyal","dim":2,"theta_A":[[0,1,2],[-1,0,3]]}"#).unwrap(),
        );
        assert!(matches!(e, Err(Error::NonSquareMatrix { .. })));
        let e = parse_generator(&GeneratorSpec::from_json(r#"{"kind":"moyal","dim":2}"#).unwrap());
        assert!(matches!(e, Err(Error::Config(_))));
        assert!(GeneratorSpec::from_json(r#"{"kind":"lie","dim":2}"#).is_err());
        let e = parse_generator(
            &GeneratorSpec::from_json(r#"{"kind":"coboundary","dim":1,"beta":[[[0],1.0,0.0]]}"#).unwrap(),
        );
        assert!(matches!(e, Err(Error::NonzeroAtOrigin { .. })));
    }
}
