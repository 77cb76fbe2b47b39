//! Finite momentum lattices and band-limited fields on them.
//!
//! Lattice momenta are `k * dp` with integer `k` in `[-h, h]^m`, `h = (N-1)/2`,
//! stored row-major with axis 0 slowest. A field is a coefficient per
//! lattice momentum; the unit field is the single zero-mode coefficient 1.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::momentum::Momentum;

/// Distance, in lattice steps, within which a momentum counts as a lattice point.
pub const LATTICE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub dp: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, dp: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("points per axis must be odd and >= 3, got {n}")));
        }
        if !(dp.is_finite() && dp > 0.0) {
            return Err(Error::InvalidGrid(format!("momentum step must be positive, got {dp}")));
        }
        if (n as f64).powi(dim as i32) > 1e9 {
            return Err(Error::InvalidGrid(format!("{n}^{dim} lattice points is too many")));
        }
        Ok(GridSpec { dim, n, dp })
    }

    /// Parses `m,N,dp`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let bad = || Error::InvalidGrid(format!("expected m,N,dp, got {text:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let dim = parts[0].parse().map_err(|_| bad())?;
        let n = parts[1].parse().map_err(|_| bad())?;
        let dp = parts[2].parse().map_err(|_| bad())?;
        Self::new(dim, n, dp)
    }

    /// Half-width `(N-1)/2` in lattice steps.
    pub fn half(&self) -> i64 {
        (self.n as i64 - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Integer coordinates of a flat index.
    pub fn coords(&self, mut index: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.dim];
        for axis in (0..self.dim).rev() {
            c[axis] = (index % self.n) as i64 - self.half();
            index /= self.n;
        }
        c
    }

    /// Flat index of integer coordinates, `None` outside the box.
    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        debug_assert_eq!(coords.len(), self.dim);
        let h = self.half();
        let mut idx = 0usize;
        for &c in coords {
            if c < -h || c > h {
                return None;
            }
            idx = idx * self.n + (c + h) as usize;
        }
        Some(idx)
    }

    pub fn momentum_of(&self, coords: &[i64]) -> Momentum {
        Momentum::from_fn(self.dim, |i| coords[i] as f64 * self.dp)
    }

    pub fn momentum(&self, index: usize) -> Momentum {
        self.momentum_of(&self.coords(index))
    }

    /// Integer coordinates of a momentum within [`LATTICE_SNAP`] of a lattice
    /// point (not necessarily inside the box).
    pub fn snap(&self, p: &Momentum) -> Option<Vec<i64>> {
        if p.dim() != self.dim {
            return None;
        }
        p.components()
            .iter()
            .map(|&x| {
                let k = x / self.dp;
                let r = k.round();
                (r.is_finite() && (k - r).abs() <= LATTICE_SNAP).then_some(r as i64)
            })
            .collect()
    }

    /// Flat index of a lattice momentum inside the box.
    pub fn lattice_index(&self, p: &Momentum) -> Option<usize> {
        self.snap(p).and_then(|c| self.index_of(&c))
    }
}

/// Complex Fourier coefficients on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl BandlimitedField {
    pub fn zeros(grid: GridSpec) -> Self {
        BandlimitedField { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: coeffs.len() });
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite(format!("coefficient {i}")));
        }
        Ok(BandlimitedField { grid, coeffs })
    }

    /// The unit of every unital product.
    pub fn unit(grid: GridSpec) -> Self {
        let mut f = Self::zeros(grid);
        let origin = grid.index_of(&vec![0; grid.dim]).expect("origin is on the lattice");
        f.coeffs[origin] = Complex64::new(1.0, 0.0);
        f
    }

    /// A single Fourier mode with coefficient `value` at integer coordinates `k`.
    pub fn mode(grid: GridSpec, k: &[i64], value: Complex64) -> Result<Self> {
        if k.len() != grid.dim {
            return Err(Error::DimensionMismatch { expected: grid.dim, found: k.len() });
        }
        let idx = grid.index_of(k).ok_or_else(|| Error::OffLattice(format!("{k:?}")))?;
        let mut f = Self::zeros(grid);
        f.coeffs[idx] = value;
        Ok(f)
    }

    /// Coefficients uniform in the unit square on `|k|_inf <= radius`, zero elsewhere.
    pub fn random(grid: GridSpec, radius: i64, seed: u64) -> Result<Self> {
        if radius < 0 || radius > grid.half() {
            return Err(Error::SupportOverflow { required: radius.max(0) as usize, available: grid.half() as usize });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Self::zeros(grid);
        for (i, c) in f.coeffs.iter_mut().enumerate() {
            if grid.coords(i).iter().all(|k| k.abs() <= radius) {
                *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        Ok(f)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: &[i64]) -> Complex64 {
        self.grid.index_of(k).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Largest `|k|_inf` carrying a nonzero coefficient; 0 for the zero field.
    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(i, _)| self.grid.coords(i).iter().map(|k| k.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Fourier side of pointwise conjugation: `k -> conj f(-k)`.
    pub fn conj_field(&self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|i| {
                let neg: Vec<i64> = self.grid.coords(i).iter().map(|k| -k).collect();
                self.get(&neg).conj()
            })
            .collect();
        BandlimitedField { grid: self.grid, coeffs }
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        BandlimitedField { grid: self.grid, coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest coefficientwise difference, with its flat index.
    pub fn max_diff(&self, other: &Self) -> Result<(f64, usize)> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut worst = (0.0, 0);
        for (i, (a, b)) in self.coeffs.iter().zip(&other.coeffs).enumerate() {
            let d = (a - b).norm();
            let d = if d.is_nan() { f64::INFINITY } else { d };
            if d > worst.0 {
                worst = (d, i);
            }
        }
        Ok(worst)
    }

    /// Binary layout: `TISP1`, `m` u32, `N` u32, `dp` f64, then `N^m` pairs
    /// of f64 `(re, im)`, all little-endian, row-major.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(FIELD_MAGIC)?;
        w.write_all(&(self.grid.dim as u32).to_le_bytes())?;
        w.write_all(&(self.grid.n as u32).to_le_bytes())?;
        w.write_all(&self.grid.dp.to_le_bytes())?;
        for c in &self.coeffs {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Config(format!("field file: {e}"));
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != FIELD_MAGIC {
            return Err(Error::Config("field file: bad magic".into()));
        }
        let mut u = [0u8; 4];
        r.read_exact(&mut u).map_err(io)?;
        let dim = u32::from_le_bytes(u) as usize;
        r.read_exact(&mut u).map_err(io)?;
        let n = u32::from_le_bytes(u) as usize;
        let mut d = [0u8; 8];
        r.read_exact(&mut d).map_err(io)?;
        let grid = GridSpec::new(dim, n, f64::from_le_bytes(d))?;
        let mut coeffs = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut d).map_err(io)?;
            let re = f64::from_le_bytes(d);
            r.read_exact(&mut d).map_err(io)?;
            coeffs.push(Complex64::new(re, f64::from_le_bytes(d)));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest).map_err(io)?;
        if !rest.is_empty() {
            return Err(Error::Config(format!("field file: {} trailing bytes", rest.len())));
        }
        Self::from_coeffs(grid, coeffs)
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            m: self.grid.dim,
            n: self.grid.n,
            dp: self.grid.dp,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_json(j: &FieldJson) -> Result<Self> {
        let grid = GridSpec::new(j.m, j.n, j.dp)?;
        Self::from_coeffs(grid, j.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect())
    }
}

pub const FIELD_MAGIC: &[u8; 5] = b"TISP1";

/// JSON form of a field: grid header plus `[re, im]` pairs in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub m: usize,
    pub n: usize,
    pub dp: f64,
    pub coeffs: Vec<[f64; 2]>,
}
