use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::lattice::GridSpec;
use crate::momentum::Momentum;

/// A reproducible set of momentum triples.
///
/// Predicates on pairs use the first two entries of each triple.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSet {
    pub dim: usize,
    pub seed: u64,
    pub box_radius: f64,
    #[serde(skip)]
    tuples: Vec<[Momentum; 3]>,
}

impl SampleSet {
    /// `count` triples drawn uniformly from the box `[-box_radius, box_radius]^dim`.
    pub fn random(dim: usize, count: usize, seed: u64, box_radius: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Momentum::from_fn(dim, |_| rng.gen_range(-box_radius..=box_radius));
        let tuples = (0..count).map(|_| [draw(), draw(), draw()]).collect();
        SampleSet { dim, seed, box_radius, tuples }
    }

    /// `count` triples of lattice momenta with integer coordinates in
    /// `[-radius_steps, radius_steps]`, scaled by the grid step.
    pub fn on_lattice(grid: &GridSpec, count: usize, seed: u64, radius_steps: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dp = grid.dp;
        let dim = grid.dim;
        let mut draw = || Momentum::from_fn(dim, |_| rng.gen_range(-radius_steps..=radius_steps) as f64 * dp);
        let tuples = (0..count).map(|_| [draw(), draw(), draw()]).collect();
        SampleSet { dim, seed, box_radius: radius_steps as f64 * dp, tuples }
    }

    pub fn from_tuples(dim: usize, tuples: Vec<[Momentum; 3]>) -> Self {
        let box_radius = tuples.iter().flat_map(|t| t.iter()).fold(0.0f64, |acc, m| acc.max(m.max_abs()));
        SampleSet { dim, seed: 0, box_radius, tuples }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn triples(&self) -> &[[Momentum; 3]] {
        &self.tuples
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_bounded() {
        let a = SampleSet::random(3, 50, 7, 2.0);
        let b = SampleSet::random(3, 50, 7, 2.0);
        let c = SampleSet::random(3, 50, 8, 2.0);
        assert_eq!(a.triples(), b.triples());
        assert_ne!(a.triples(), c.triples());
        for t in a.triples() {
            for m in t {
                assert_eq!(m.dim(), 3);
                assert!(m.max_abs() <= 2.0);
            }
        }
    }

    #[test]
    fn lattice_points_are_on_lattice() {
        let grid = GridSpec::new(2, 9, 0.5).unwrap();
        let s = SampleSet::on_lattice(&grid, 40, 1, 3);
        for t in s.triples() {
            for m in t {
                assert!(grid.lattice_index(m).is_some());
                assert!(m.max_abs() <= 1.5);
            }
        }
    }
}
