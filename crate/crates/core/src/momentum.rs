use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// A point of momentum space `R^m`.
///
/// Stored inline for `m <= 4`, which covers every desk-scale use.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Momentum(SmallVec<[f64; 4]>);

impl Momentum {
    pub fn new(components: &[f64]) -> Self {
        Momentum(SmallVec::from_slice(components))
    }

    pub fn zero(dim: usize) -> Self {
        Momentum(SmallVec::from_elem(0.0, dim))
    }

    /// Unit vector along `axis` scaled by `step`.
    pub fn axis(dim: usize, axis: usize, step: f64) -> Self {
        let mut m = Self::zero(dim);
        m.0[axis] = step;
        m
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Momentum((0..dim).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Momentum) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Momentum {
        Momentum(self.0.iter().map(|x| x * s).collect())
    }
}

impl fmt::Debug for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Momentum {
    type Output = Momentum;
    fn add(self, rhs: &Momentum) -> Momentum {
        debug_assert_eq!(self.dim(), rhs.dim());
        Momentum(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Momentum {
    type Output = Momentum;
    fn sub(self, rhs: &Momentum) -> Momentum {
        debug_assert_eq!(self.dim(), rhs.dim());
        Momentum(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Momentum {
    type Output = Momentum;
    fn neg(self) -> Momentum {
        Momentum(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<f64> for &Momentum {
    type Output = Momentum;
    fn mul(self, rhs: f64) -> Momentum {
        self.scale(rhs)
    }
}

impl Add for Momentum {
    type Output = Momentum;
    fn add(self, rhs: Momentum) -> Momentum {
        &self + &rhs
    }
}

impl Sub for Momentum {
    type Output = Momentum;
    fn sub(self, rhs: Momentum) -> Momentum {
        &self - &rhs
    }
}

impl Neg for Momentum {
    type Output = Momentum;
    fn neg(self) -> Momentum {
        -&self
    }
}

impl From<Vec<f64>> for Momentum {
    fn from(v: Vec<f64>) -> Self {
        Momentum(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[f64; N]> for Momentum {
    fn from(v: [f64; N]) -> Self {
        Momentum::new(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = Momentum::from([1.0, 2.0]);
        let q = Momentum::from([0.5, -1.0]);
        assert_eq!((&p + &q).components(), &[1.5, 1.0]);
        assert_eq!((&p - &q).components(), &[0.5, 3.0]);
        assert_eq!((-&p).components(), &[-1.0, -2.0]);
        assert_eq!(p.dot(&q), -1.5);
        assert_eq!(p.norm_sq(), 5.0);
        assert_eq!(format!("{p}"), "(1, 2)");
    }

    #[test]
    fn serde_is_a_plain_list() {
        let p = Momentum::from([1.0, -0.25]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.0,-0.25]");
        let back: Momentum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
