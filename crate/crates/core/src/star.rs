//! Twisted convolution of band-limited fields.
//!
//! `(f * g)~(P) = sum_q f~(q) g~(P - q) exp(alpha(P, q))`, summed directly
//! since the kernel depends jointly on `P` and `q`. Products never wrap
//! around: the combined support must fit inside the lattice box.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cochain::Generator;
use crate::error::{Error, Result};
use crate::exec::{try_map_range, ExecMode};
use crate::lattice::{BandlimitedField, GridSpec};
use crate::momentum::Momentum;
use crate::report::{scaled, PredicateReport};

/// Largest `|Re|` of an exponent before `exp` is refused.
pub const EXPONENT_GUARD: f64 = 700.0;

/// `exp(z)` with the overflow guard applied.
pub fn guarded_exp(z: Complex64) -> Result<Complex64> {
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::NonFinite(format!("exponent {z}")));
    }
    if z.re.abs() > EXPONENT_GUARD {
        return Err(Error::ExponentOverflow { value: z.re });
    }
    Ok(z.exp())
}

/// Support budget for a `k`-fold product: the supports must add up to at
/// most the lattice half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductBudget {
    pub max_factors: usize,
    pub required: usize,
    pub available: usize,
}

impl ProductBudget {
    pub fn for_fields(fields: &[&BandlimitedField]) -> Result<Self> {
        let grid = match fields.first() {
            Some(f) => *f.grid(),
            None => return Err(Error::Config("empty field list".into())),
        };
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let required = fields.iter().map(|f| f.support_radius() as usize).sum();
        Ok(ProductBudget { max_factors: fields.len(), required, available: grid.half() as usize })
    }

    pub fn check(&self) -> Result<()> {
        if self.required > self.available {
            return Err(Error::SupportOverflow { required: self.required, available: self.available });
        }
        Ok(())
    }
}

struct Support {
    coords: Vec<Vec<i64>>,
    values: Vec<Complex64>,
}

fn support_of(f: &BandlimitedField) -> Support {
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (i, &c) in f.coeffs().iter().enumerate() {
        if c != Complex64::new(0.0, 0.0) {
            coords.push(f.grid().coords(i));
            values.push(c);
        }
    }
    Support { coords, values }
}

/// Star product with the default execution mode.
pub fn star(f: &BandlimitedField, g: &BandlimitedField, alpha: &Generator) -> Result<BandlimitedField> {
    star_with(ExecMode::default(), f, g, alpha)
}

/// Star product; output modes are independent and summed in index order of `q`.
pub fn star_with(
    mode: ExecMode,
    f: &BandlimitedField,
    g: &BandlimitedField,
    alpha: &Generator,
) -> Result<BandlimitedField> {
    let grid = *f.grid();
    if *g.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if alpha.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, found: alpha.dim() });
    }
    let budget = ProductBudget::for_fields(&[f, g])?;
    budget.check()?;
    let reach = budget.required as i64;
    let sf = support_of(f);
    let dim = grid.dim;
    let coeffs = try_map_range(mode, grid.len(), |idx| -> Result<Complex64> {
        let pc = grid.coords(idx);
        if pc.iter().any(|k| k.abs() > reach) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let total = grid.momentum_of(&pc);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut rest = vec![0i64; dim];
        for (qc, &fq) in sf.coords.iter().zip(&sf.values) {
            for a in 0..dim {
                rest[a] = pc[a] - qc[a];
            }
            let gv = g.get(&rest);
            if gv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = guarded_exp(alpha.eval(&total, &grid.momentum_of(qc)))?;
            acc += fq * gv * w;
        }
        Ok(acc)
    })?;
    BandlimitedField::from_coeffs(grid, coeffs)
}

/// Volume factor relating the zero mode to the integral.
pub fn volume(grid: &GridSpec) -> f64 {
    (2.0 * PI / grid.dp).powi(grid.dim as i32)
}

/// Integral over space: zero-mode coefficient times `(2 pi / dp)^m`.
pub fn integrate(f: &BandlimitedField) -> Complex64 {
    f.get(&vec![0; f.grid().dim]) * volume(f.grid())
}

/// `integral f1 * f2 * ... * fk`, left-associated.
pub fn integrated_star(fields: &[&BandlimitedField], alpha: &Generator) -> Result<Complex64> {
    integrated_star_with(ExecMode::default(), fields, alpha)
}

pub fn integrated_star_with(mode: ExecMode, fields: &[&BandlimitedField], alpha: &Generator) -> Result<Complex64> {
    ProductBudget::for_fields(fields)?.check()?;
    let mut acc = fields[0].clone();
    for f in &fields[1..] {
        acc = star_with(mode, &acc, f, alpha)?;
    }
    Ok(integrate(&acc))
}

/// Translation by `a`: `f~(k) -> exp(i k.a) f~(k)`.
pub fn translate(f: &BandlimitedField, a: &Momentum) -> Result<BandlimitedField> {
    let grid = *f.grid();
    if a.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, found: a.dim() });
    }
    Ok(f.map_coeffs(|i, c| c * Complex64::new(0.0, grid.momentum(i).dot(a)).exp()))
}

/// Compares `(f * g)^*` with `g^* * f^*` coefficientwise.
pub fn involution_check(
    f: &BandlimitedField,
    g: &BandlimitedField,
    alpha: &Generator,
    tol: f64,
) -> Result<PredicateReport> {
    let lhs = star(f, g, alpha)?.conj_field();
    let rhs = star(&g.conj_field(), &f.conj_field(), alpha)?;
    let scale = lhs.max_abs().max(rhs.max_abs());
    let grid = *f.grid();
    Ok(PredicateReport::from_residuals(
        "involution",
        tol,
        lhs.coeffs()
            .iter()
            .zip(rhs.coeffs())
            .enumerate()
            .map(|(i, (a, b))| (scaled((a - b).norm(), scale), vec![grid.momentum(i)])),
    ))
}

/// Coefficient of `[e_p, e_q]` at mode `p + q`: `exp(alpha(p+q, p)) - exp(alpha(p+q, q))`.
pub fn mode_commutator(p: &Momentum, q: &Momentum, alpha: &Generator, grid: &GridSpec) -> Result<Complex64> {
    for k in [p, q] {
        if grid.snap(k).is_none() {
            return Err(Error::OffLattice(k.to_string()));
        }
    }
    let total = p + q;
    Ok(guarded_exp(alpha.eval(&total, p))? - guarded_exp(alpha.eval(&total, q))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{coboundary1, OneCochain, PolynomialOneCochain};
    use crate::generators::{make_moyal, make_wick_voros};
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> GridSpec {
        GridSpec::new(2, 9, 0.5).unwrap()
    }

    fn theta() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    fn square() -> OneCochain {
        OneCochain::polynomial(
            PolynomialOneCochain::new(2, vec![(vec![2, 0], c(1.0, 0.0)), (vec![0, 2], c(1.0, 0.0))]).unwrap(),
        )
    }

    #[test]
    fn zero_generator_is_plain_convolution() {
        let g = grid();
        let f = BandlimitedField::random(g, 2, 1).unwrap();
        let h = BandlimitedField::random(g, 2, 2).unwrap();
        let out = star(&f, &h, &Generator::zero(2)).unwrap();
        let mut expect = BandlimitedField::zeros(g);
        for i in 0..g.len() {
            for j in 0..g.len() {
                let (a, b) = (g.coords(i), g.coords(j));
                let s: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                if let Some(k) = g.index_of(&s) {
                    expect.coeffs_mut()[k] += f.coeffs()[i] * h.coeffs()[j];
                }
            }
        }
        assert!(out.max_diff(&expect).unwrap().0 < 1e-14);
    }

    #[test]
    fn unit_is_neutral() {
        let g = grid();
        let f = BandlimitedField::random(g, 3, 4).unwrap();
        let one = BandlimitedField::unit(g);
        let a = make_wick_voros(&theta(), &DMatrix::identity(2, 2)).unwrap();
        assert!(star(&one, &f, &a).unwrap().max_diff(&f).unwrap().0 < 1e-15);
        assert!(star(&f, &one, &a).unwrap().max_diff(&f).unwrap().0 < 1e-15);
    }

    #[test]
    fn single_modes() {
        let g = grid();
        let a = make_moyal(&theta()).unwrap();
        let dp = BandlimitedField::mode(g, &[1, 0], c(1.0, 0.0)).unwrap();
        let dq = BandlimitedField::mode(g, &[0, 2], c(1.0, 0.0)).unwrap();
        let out = star(&dp, &dq, &a).unwrap();
        let (p, q) = (Momentum::from([0.5, 0.0]), Momentum::from([0.0, 1.0]));
        let w = a.eval(&(&p + &q), &p).exp();
        assert!((out.get(&[1, 2]) - w).norm() < 1e-15);
        assert_eq!(out.coeffs().iter().filter(|z| z.norm() > 0.0).count(), 1);
        let back = star(&dq, &dp, &a).unwrap();
        let comm = out.get(&[1, 2]) - back.get(&[1, 2]);
        assert!((comm - mode_commutator(&p, &q, &a, &g).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn mode_commutator_unit_theta() {
        let g = GridSpec::new(2, 5, 1.0).unwrap();
        let a = make_moyal(&theta()).unwrap();
        let v = mode_commutator(&Momentum::from([1.0, 0.0]), &Momentum::from([0.0, 1.0]), &a, &g).unwrap();
        // alpha(p+q, p) = -alpha(p+q, q) = i
        assert!((v - c(0.0, 2.0 * 1f64.sin())).norm() < 1e-15);
        let e = mode_commutator(&Momentum::from([0.5, 0.0]), &Momentum::from([0.0, 1.0]), &a, &g);
        assert!(matches!(e, Err(Error::OffLattice(_))));
        let cb = coboundary1(&square());
        let v = mode_commutator(&Momentum::from([1.0, 0.0]), &Momentum::from([0.0, 1.0]), &cb, &g);
        assert_eq!(v.unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn budget_and_grid_errors() {
        let g = grid();
        let f = BandlimitedField::random(g, 3, 1).unwrap();
        let a = Generator::zero(2);
        assert_eq!(star(&f, &f, &a).unwrap_err(), Error::SupportOverflow { required: 6, available: 4 });
        let other = BandlimitedField::unit(GridSpec::new(2, 9, 0.25).unwrap());
        assert_eq!(star(&f, &other, &a).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn overflow_guard() {
        let g = grid();
        let f = BandlimitedField::random(g, 2, 1).unwrap();
        let big = coboundary1(&square().scale(c(1e4, 0.0)));
        assert!(matches!(star(&f, &f, &big), Err(Error::ExponentOverflow { .. })));
    }

    #[test]
    fn integrals() {
        let g = grid();
        assert!((integrate(&BandlimitedField::unit(g)) - c(volume(&g), 0.0)).norm() < 1e-12);
        let f = BandlimitedField::random(g, 2, 5).unwrap();
        let h = BandlimitedField::random(g, 2, 6).unwrap();
        let a = make_moyal(&theta()).unwrap();
        let lhs = integrated_star(&[&f, &h], &a).unwrap();
        let rhs = integrated_star(&[&f, &h], &Generator::zero(2)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        // a non-harmonic coboundary weights each pair (q, -q) by exp(beta(q) + beta(-q))
        let cb = coboundary1(&square().scale(c(0.1, 0.0)));
        let lhs = integrated_star(&[&f, &h], &cb).unwrap();
        let mut expect = c(0.0, 0.0);
        for i in 0..g.len() {
            let k = g.coords(i);
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            let q = g.momentum(i);
            expect += f.coeffs()[i] * h.get(&neg) * c(0.2 * q.norm_sq(), 0.0).exp();
        }
        expect *= volume(&g);
        assert!((lhs - expect).norm() < 1e-10 * expect.norm());
        assert!((lhs - rhs).norm() > 1e-3);
        assert_eq!(integrated_star(&[&f], &a).unwrap(), integrate(&f));
    }

    #[test]
    fn translation_phase() {
        let g = grid();
        let f = BandlimitedField::mode(g, &[2, -1], c(1.0, 0.0)).unwrap();
        let a = Momentum::from([0.3, 0.7]);
        let t = translate(&f, &a).unwrap();
        let k = Momentum::from([1.0, -0.5]);
        assert!((t.get(&[2, -1]) - c(0.0, k.dot(&a)).exp()).norm() < 1e-15);
        assert_eq!(translate(&f, &Momentum::zero(2)).unwrap(), f);
    }

    #[test]
    fn involution_for_broken_generator_fails() {
        let g = grid();
        let f = BandlimitedField::random(g, 2, 8).unwrap();
        let h = BandlimitedField::random(g, 2, 9).unwrap();
        let real = Generator::custom(2, "real-bilinear", |p, q| {
            let (p, q) = (p.components(), q.components());
            c(q[0] * p[1] - q[1] * p[0], 0.0)
        })
        .unwrap();
        assert!(!involution_check(&f, &h, &real, 1e-10).unwrap().pass);
        assert!(involution_check(&f, &h, &Generator::zero(2), 1e-10).unwrap().pass);
        assert!(involution_check(&f, &h, &make_moyal(&theta()).unwrap(), 1e-10).unwrap().pass);
    }

    #[test]
    fn sequential_matches_parallel() {
        let g = grid();
        let f = BandlimitedField::random(g, 2, 10).unwrap();
        let h = BandlimitedField::random(g, 2, 11).unwrap();
        let a = make_wick_voros(&theta(), &DMatrix::identity(2, 2)).unwrap();
        let s = star_with(ExecMode::Sequential, &f, &h, &a).unwrap();
        let p = star_with(ExecMode::Parallel, &f, &h, &a).unwrap();
        assert_eq!(s, p);
    }
}
