//! Non-commutative Feynman factors for scalar fields.
//!
//! A `k`-valent vertex with incoming momenta `p1..pk` (in field order)
//! carries `exp(sum_{i=2..k} alpha(S_i, S_{i-1}))`, `S_i = p1 + ... + pi`;
//! each propagator carries `exp(-alpha(0, p)) / Xi(p)` with the Euclidean
//! kinetic symbol `Xi(p) = p^2 + m^2`. Loop momenta run over a full lattice
//! box; all products are accumulated as logarithms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cochain::{Generator, OneCochain};
use crate::error::{Error, Result};
use crate::exec::{try_map_range, ExecMode};
use crate::hodge::omega;
use crate::lattice::GridSpec;
use crate::momentum::Momentum;
use crate::report::{scaled, PredicateReport};
use crate::star::EXPONENT_GUARD;

/// A complex number stored as `log|z|` and `arg z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub log_abs: f64,
    pub phase: f64,
}

fn wrap_phase(x: f64) -> f64 {
    let y = x.sin().atan2(x.cos());
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

impl Amplitude {
    /// `exp(z)`.
    pub fn from_log(z: Complex64) -> Self {
        Amplitude { log_abs: z.re, phase: if z.re == f64::NEG_INFINITY { 0.0 } else { wrap_phase(z.im) } }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            return Amplitude { log_abs: f64::NEG_INFINITY, phase: 0.0 };
        }
        Amplitude { log_abs: z.norm().ln(), phase: z.arg() }
    }

    pub fn ln(self) -> Complex64 {
        Complex64::new(self.log_abs, self.phase)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.log_abs.exp(), self.phase)
    }

    pub fn is_zero(self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }
}

impl std::ops::Div for Amplitude {
    type Output = Amplitude;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, other: Amplitude) -> Amplitude {
        Amplitude::from_log(self.ln() - other.ln())
    }
}

impl std::ops::Mul for Amplitude {
    type Output = Amplitude;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: Amplitude) -> Amplitude {
        Amplitude::from_log(self.ln() + other.ln())
    }
}

/// `|exp(log(a/b) - expected) - 1|`: relative mismatch of the ratio `a/b`
/// against `exp(expected)`.
pub fn ratio_mismatch(a: Amplitude, b: Amplitude, expected: Complex64) -> f64 {
    if a.is_zero() || b.is_zero() {
        return if a.is_zero() && b.is_zero() { 0.0 } else { f64::INFINITY };
    }
    let d = a.ln() - b.ln() - expected;
    let d = Complex64::new(d.re, wrap_phase(d.im));
    let r = (d.exp() - 1.0).norm();
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// Euclidean kinetic symbol `p^2 + m^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticSymbol {
    pub mass2: f64,
}

impl KineticSymbol {
    pub fn eval(&self, p: &Momentum) -> Complex64 {
        Complex64::new(p.norm_sq() + self.mass2, 0.0)
    }

    fn log_eval(&self, p: &Momentum) -> Result<Complex64> {
        let x = self.eval(p);
        if x.norm() == 0.0 {
            return Err(Error::PoleOnLattice);
        }
        Ok(x.ln())
    }
}

pub const DEFAULT_LOOP_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopConfig {
    pub grid: GridSpec,
    pub kinetic: KineticSymbol,
    /// Largest number of loop-lattice points summed for one amplitude.
    pub max_points: u64,
    pub mode: ExecMode,
}

impl LoopConfig {
    pub fn new(grid: GridSpec, mass2: f64) -> Result<Self> {
        if !(mass2.is_finite() && mass2 > 0.0) {
            return Err(Error::Config(format!("mass squared must be positive, got {mass2}")));
        }
        Ok(LoopConfig {
            grid,
            kinetic: KineticSymbol { mass2 },
            max_points: DEFAULT_LOOP_BUDGET,
            mode: ExecMode::default(),
        })
    }

    pub fn with_mode(self, mode: ExecMode) -> Self {
        LoopConfig { mode, ..self }
    }

    pub fn with_budget(self, max_points: u64) -> Self {
        LoopConfig { max_points, ..self }
    }

    /// `log (dp / 2 pi)^m`, the measure of one loop momentum.
    fn log_measure(&self) -> f64 {
        self.grid.dim as f64 * (self.grid.dp / (2.0 * PI)).ln()
    }
}

/// Exponent of the vertex factor for incoming momenta in field order.
pub fn vertex_exponent(alpha: &Generator, momenta: &[Momentum]) -> Result<Complex64> {
    if momenta.len() < 2 {
        return Err(Error::InvalidGraph(format!("vertex of valence {}", momenta.len())));
    }
    let mut prev = momenta[0].clone();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &momenta[1..] {
        let next = &prev + p;
        acc += alpha.eval(&next, &prev);
        prev = next;
    }
    Ok(acc)
}

pub fn vertex_factor(alpha: &Generator, momenta: &[Momentum]) -> Result<Amplitude> {
    let z = vertex_exponent(alpha, momenta)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("vertex exponent".into()));
    }
    if z.re.abs() > EXPONENT_GUARD {
        return Err(Error::ExponentOverflow { value: z.re });
    }
    Ok(Amplitude::from_log(z))
}

/// `exp(-alpha(0, p))`.
pub fn propagator_factor(alpha: &Generator, p: &Momentum) -> Result<Complex64> {
    crate::star::guarded_exp(-alpha.eval(&Momentum::zero(p.dim()), p))
}

/// Checks `sum_{i=2..k} d beta(S_i, S_{i-1}) = sum_i beta(p_i) - beta(S_k)`
/// on random momenta, and the conserved case `S_k = 0`.
pub fn coboundary_factorization_check(
    beta: &OneCochain,
    k: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<PredicateReport> {
    if k < 2 {
        return Err(Error::InvalidGraph(format!("vertex of valence {k}")));
    }
    if trials == 0 {
        return Err(Error::EmptySampleSet);
    }
    let dim = beta.dim();
    let d = crate::cochain::coboundary1(beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * trials);
    for t in 0..2 * trials {
        let mut ps: Vec<Momentum> = (0..k).map(|_| Momentum::from_fn(dim, |_| rng.gen_range(-2.0..2.0))).collect();
        if t % 2 == 1 {
            let head: Momentum = ps[..k - 1].iter().fold(Momentum::zero(dim), |a, p| &a + p);
            ps[k - 1] = -head;
        }
        let lhs = vertex_exponent(&d, &ps)?;
        let total = ps.iter().fold(Momentum::zero(dim), |a, p| &a + p);
        let singles: Complex64 = ps.iter().map(|p| beta.eval(p)).sum();
        let rhs = singles - beta.eval(&total);
        rows.push((scaled((lhs - rhs).norm(), lhs.norm().max(rhs.norm())), ps));
    }
    Ok(PredicateReport::from_residuals("coboundary-factorization", tol, rows))
}

const BLOCK: usize = 2048;

/// `log sum_{i<n} exp(f(i))` in fixed blocks reduced in block order, so the
/// result does not depend on the thread count.
fn log_sum_exp<F>(mode: ExecMode, n: usize, f: F) -> Result<Complex64>
where
    F: Fn(usize) -> Result<Complex64> + Sync + Send,
{
    let blocks = n.div_ceil(BLOCK);
    let partial = try_map_range(mode, blocks, |b| -> Result<(f64, Complex64)> {
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(n);
        let zs = (lo..hi).map(&f).collect::<Result<Vec<_>>>()?;
        let m = zs.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
        if m == f64::NEG_INFINITY {
            return Ok((m, Complex64::new(0.0, 0.0)));
        }
        Ok((m, zs.iter().map(|z| (z - m).exp()).sum()))
    })?;
    let m = partial.iter().fold(f64::NEG_INFINITY, |m, (bm, _)| m.max(*bm));
    if m == f64::NEG_INFINITY {
        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
    }
    let s: Complex64 = partial.iter().filter(|(bm, _)| *bm > f64::NEG_INFINITY).map(|(bm, s)| s * (bm - m).exp()).sum();
    let out = s.ln() + m;
    if out.re.is_nan() || out.im.is_nan() {
        return Err(Error::NonFinite("loop sum".into()));
    }
    Ok(out)
}

/// Euclidean non-planar one-loop self-energy
/// `sum_q exp(-alpha(0,p) + omega(p,q)) / ((p^2+m^2)^2 (q^2+m^2)) (dp/2pi)^m`.
pub fn nonplanar_selfenergy(alpha: &Generator, p: &Momentum, cfg: &LoopConfig) -> Result<Amplitude> {
    let grid = cfg.grid;
    if p.dim() != grid.dim || alpha.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, found: p.dim() });
    }
    let points = grid.len() as u64;
    if points > cfg.max_points {
        return Err(Error::LoopBudget { points, budget: cfg.max_points });
    }
    let w = omega(alpha);
    let outer = -alpha.eval(&Momentum::zero(grid.dim), p) - cfg.kinetic.log_eval(p)? * 2.0 + cfg.log_measure();
    let inner = log_sum_exp(cfg.mode, grid.len(), |i| {
        let q = grid.momentum(i);
        Ok(w.eval(p, &q) - cfg.kinetic.log_eval(&q)?)
    })?;
    Ok(Amplitude::from_log(outer + inner))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Line {
    /// Summed momentum; incoming `+k` at its first listed slot, `-k` at its second.
    Internal,
    /// Fixed incoming momentum.
    External { momentum: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    /// Incident line ids in field order.
    pub lines: Vec<usize>,
}

/// A scalar Feynman graph. Each internal line is listed twice among the
/// vertices (twice at one vertex for a self-loop), each external line once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeynmanGraph {
    #[serde(default)]
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<Vertex>,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone)]
struct LineMomentum {
    base: Momentum,
    loops: Vec<i64>,
}

impl LineMomentum {
    fn at(&self, ks: &[Momentum]) -> Momentum {
        let mut m = self.base.clone();
        for (c, k) in self.loops.iter().zip(ks) {
            if *c != 0 {
                m = &m + &k.scale(*c as f64);
            }
        }
        m
    }

    fn combine(&mut self, other: &LineMomentum, sign: i64) {
        self.base = &self.base + &other.base.scale(sign as f64);
        for (a, b) in self.loops.iter_mut().zip(&other.loops) {
            *a += sign * b;
        }
    }
}

/// Momentum routing of a validated graph.
#[derive(Debug, Clone)]
pub struct Routing {
    pub loop_count: usize,
    lines: Vec<LineMomentum>,
    /// `(line, sign)` for every vertex slot.
    slots: Vec<Vec<(usize, i64)>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl FeynmanGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn externals(&self) -> Vec<Momentum> {
        self.lines
            .iter()
            .filter_map(|l| match l {
                Line::External { momentum } => Some(Momentum::new(momentum)),
                Line::Internal => None,
            })
            .collect()
    }

    /// Validates the graph and solves momentum conservation.
    pub fn route(&self) -> Result<Routing> {
        let bad = |m: String| Error::InvalidGraph(m);
        if self.dim == 0 {
            return Err(bad("dimension must be at least 1".into()));
        }
        if self.vertices.is_empty() {
            return Err(bad("no vertices".into()));
        }
        let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.lines.len()];
        for (v, vx) in self.vertices.iter().enumerate() {
            if vx.lines.len() < 2 {
                return Err(bad(format!("vertex {v} has valence {}", vx.lines.len())));
            }
            for (s, &l) in vx.lines.iter().enumerate() {
                if l >= self.lines.len() {
                    return Err(bad(format!("vertex {v} references unknown line {l}")));
                }
                occurrences[l].push((v, s));
            }
        }
        let zero = LineMomentum { base: Momentum::zero(self.dim), loops: Vec::new() };
        let mut slots: Vec<Vec<(usize, i64)>> = self.vertices.iter().map(|v| vec![(0, 0); v.lines.len()]).collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        let mut loop_lines = Vec::new();
        let mut tree_lines = Vec::new();
        let mut total = Momentum::zero(self.dim);
        let mut scale = 0.0f64;
        for (l, line) in self.lines.iter().enumerate() {
            let occ = &occurrences[l];
            match line {
                Line::External { momentum } => {
                    if occ.len() != 1 {
                        return Err(bad(format!("external line {l} is attached {} times", occ.len())));
                    }
                    if momentum.len() != self.dim {
                        return Err(Error::DimensionMismatch { expected: self.dim, found: momentum.len() });
                    }
                    let p = Momentum::new(momentum);
                    if !p.is_finite() {
                        return Err(Error::NonFinite(format!("external momentum on line {l}")));
                    }
                    scale = scale.max(p.max_abs());
                    total = &total + &p;
                    slots[occ[0].0][occ[0].1] = (l, 1);
                }
                Line::Internal => {
                    if occ.len() != 2 {
                        return Err(bad(format!("internal line {l} is attached {} times", occ.len())));
                    }
                    slots[occ[0].0][occ[0].1] = (l, 1);
                    slots[occ[1].0][occ[1].1] = (l, -1);
                    let (a, b) = (find(&mut parent, occ[0].0), find(&mut parent, occ[1].0));
                    if a == b {
                        loop_lines.push(l);
                    } else {
                        parent[a] = b;
                        tree_lines.push(l);
                    }
                }
            }
        }
        let root = find(&mut parent, 0);
        if (0..self.vertices.len()).any(|v| find(&mut parent, v) != root) {
            return Err(bad("graph is not connected".into()));
        }
        let residual = total.max_abs();
        if residual > 1e-9 * (1.0 + scale) {
            return Err(Error::UnconservedMomentum { residual });
        }

        let loop_count = loop_lines.len();
        let mut lines: Vec<Option<LineMomentum>> = vec![None; self.lines.len()];
        for (l, line) in self.lines.iter().enumerate() {
            if let Line::External { momentum } = line {
                lines[l] = Some(LineMomentum { base: Momentum::new(momentum), loops: vec![0; loop_count] });
            }
        }
        for (j, &l) in loop_lines.iter().enumerate() {
            let mut loops = vec![0; loop_count];
            loops[j] = 1;
            lines[l] = Some(LineMomentum { base: Momentum::zero(self.dim), loops });
        }
        let mut pending = tree_lines.len();
        while pending > 0 {
            let mut progress = false;
            for slot in &slots {
                let unknown: Vec<usize> = (0..slot.len()).filter(|&s| lines[slot[s].0].is_none()).collect();
                if unknown.len() != 1 {
                    continue;
                }
                let (target, sign) = slot[unknown[0]];
                // sign * k_target + sum(known) = 0
                let mut acc = LineMomentum { base: Momentum::zero(self.dim), loops: vec![0; loop_count] };
                for (s, &(l, sg)) in slot.iter().enumerate() {
                    if s != unknown[0] {
                        acc.combine(lines[l].as_ref().expect("known line"), -sign * sg);
                    }
                }
                lines[target] = Some(acc);
                pending -= 1;
                progress = true;
            }
            if !progress {
                return Err(bad("momentum routing did not close".into()));
            }
        }
        let lines = lines.into_iter().map(|l| l.unwrap_or_else(|| zero.clone())).collect();
        Ok(Routing { loop_count, lines, slots })
    }
}

/// Connected amplitude with external legs: loop sum of all vertex factors,
/// internal propagators and external-leg propagators.
pub fn graph_amplitude(graph: &FeynmanGraph, alpha: &Generator, cfg: &LoopConfig) -> Result<Amplitude> {
    if graph.dim != alpha.dim() || graph.dim != cfg.grid.dim {
        return Err(Error::DimensionMismatch { expected: graph.dim, found: alpha.dim() });
    }
    let routing = graph.route()?;
    let grid = cfg.grid;
    let n = grid.len() as u64;
    let points = (0..routing.loop_count).try_fold(1u64, |acc, _| acc.checked_mul(n));
    let points = match points {
        Some(p) if p <= cfg.max_points => p,
        Some(p) => return Err(Error::LoopBudget { points: p, budget: cfg.max_points }),
        None => return Err(Error::LoopBudget { points: u64::MAX, budget: cfg.max_points }),
    };
    let zero = Momentum::zero(graph.dim);
    let propagator = |k: &Momentum| -> Result<Complex64> { Ok(-alpha.eval(&zero, k) - cfg.kinetic.log_eval(k)?) };
    let mut fixed = Complex64::new(routing.loop_count as f64 * cfg.log_measure(), 0.0);
    for (l, line) in graph.lines.iter().enumerate() {
        if let Line::External { .. } = line {
            fixed += propagator(&routing.lines[l].base)?;
        }
    }
    let internal: Vec<usize> =
        graph.lines.iter().enumerate().filter(|(_, l)| matches!(l, Line::Internal)).map(|(i, _)| i).collect();
    let sum = log_sum_exp(cfg.mode, points as usize, |t| {
        let mut rest = t;
        let ks: Vec<Momentum> = (0..routing.loop_count)
            .map(|_| {
                let i = rest % grid.len();
                rest /= grid.len();
                grid.momentum(i)
            })
            .collect();
        let moms: Vec<Momentum> = routing.lines.iter().map(|lm| lm.at(&ks)).collect();
        let mut z = Complex64::new(0.0, 0.0);
        for &l in &internal {
            z += propagator(&moms[l])?;
        }
        for slot in &routing.slots {
            let incoming: Vec<Momentum> =
                slot.iter().map(|&(l, s)| if s > 0 { moms[l].clone() } else { -&moms[l] }).collect();
            z += vertex_exponent(alpha, &incoming)?;
        }
        Ok(z)
    })?;
    Ok(Amplitude::from_log(fixed + sum))
}

/// `log(amplitude(alpha + d beta) / amplitude(alpha)) = -sum_ext beta(-p_in)`.
pub fn external_leg_exponent(graph: &FeynmanGraph, beta: &OneCochain) -> Complex64 {
    graph.externals().iter().map(|p| -beta.eval(&-p)).sum()
}

/// Graphs used by the equivalence checks.
pub mod graphs {
    use super::*;

    fn ext(p: &Momentum) -> Line {
        Line::External { momentum: p.components().to_vec() }
    }

    fn total(ps: &[&Momentum]) -> Momentum {
        ps.iter().fold(Momentum::zero(ps[0].dim()), |a, p| &a + *p)
    }

    /// One cubic vertex with incoming `p1, p2, -p1-p2`.
    pub fn tree_3pt(p1: &Momentum, p2: &Momentum) -> FeynmanGraph {
        let p3 = -total(&[p1, p2]);
        FeynmanGraph {
            name: "tree-3pt".into(),
            dim: p1.dim(),
            vertices: vec![Vertex { lines: vec![0, 1, 2] }],
            lines: vec![ext(p1), ext(p2), ext(&p3)],
        }
    }

    /// One quartic vertex with incoming `p1, p2, p3, -p1-p2-p3`.
    pub fn tree_4pt(p1: &Momentum, p2: &Momentum, p3: &Momentum) -> FeynmanGraph {
        let p4 = -total(&[p1, p2, p3]);
        FeynmanGraph {
            name: "tree-4pt".into(),
            dim: p1.dim(),
            vertices: vec![Vertex { lines: vec![0, 1, 2, 3] }],
            lines: vec![ext(p1), ext(p2), ext(p3), ext(&p4)],
        }
    }

    /// Two cubic vertices joined by one propagator.
    pub fn tree_4pt_exchange(p1: &Momentum, p2: &Momentum, p3: &Momentum) -> FeynmanGraph {
        let p4 = -total(&[p1, p2, p3]);
        FeynmanGraph {
            name: "tree-4pt-exchange".into(),
            dim: p1.dim(),
            vertices: vec![Vertex { lines: vec![0, 1, 4] }, Vertex { lines: vec![4, 2, 3] }],
            lines: vec![ext(p1), ext(p2), ext(p3), ext(&p4), Line::Internal],
        }
    }

    /// Non-planar tadpole: one quartic vertex with field order `p, k, -p, -k`.
    pub fn one_loop_2pt(p: &Momentum) -> FeynmanGraph {
        FeynmanGraph {
            name: "one-loop-2pt".into(),
            dim: p.dim(),
            vertices: vec![Vertex { lines: vec![0, 2, 1, 2] }],
            lines: vec![ext(p), ext(&-p), Line::Internal],
        }
    }

    /// Bubble: two quartic vertices joined by two propagators.
    pub fn one_loop_4pt(p1: &Momentum, p2: &Momentum, p3: &Momentum) -> FeynmanGraph {
        let p4 = -total(&[p1, p2, p3]);
        FeynmanGraph {
            name: "one-loop-4pt".into(),
            dim: p1.dim(),
            vertices: vec![Vertex { lines: vec![0, 4, 1, 5] }, Vertex { lines: vec![4, 2, 5, 3] }],
            lines: vec![ext(p1), ext(p2), ext(p3), ext(&p4), Line::Internal, Line::Internal],
        }
    }
}
