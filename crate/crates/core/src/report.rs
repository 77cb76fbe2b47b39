use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_slice, ExecMode};
use crate::momentum::Momentum;
use crate::sampling::SampleSet;

/// Default absolute tolerance on scaled residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Outcome of a sample-based check.
///
/// `pass` holds exactly when `max_residual <= tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct PredicateReport {
    pub name: String,
    pub max_residual: f64,
    pub worst_point: Vec<Momentum>,
    pub pass: bool,
    pub tolerance: f64,
    pub samples: usize,
}

impl PredicateReport {
    pub fn from_residuals(
        name: impl Into<String>,
        tolerance: f64,
        residuals: impl IntoIterator<Item = (f64, Vec<Momentum>)>,
    ) -> Self {
        let mut max_residual = 0.0f64;
        let mut worst_point = Vec::new();
        let mut samples = 0;
        for (r, point) in residuals {
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if samples == 0 || r > max_residual {
                max_residual = r;
                worst_point = point;
            }
            samples += 1;
        }
        PredicateReport {
            name: name.into(),
            max_residual,
            worst_point,
            pass: max_residual <= tolerance,
            tolerance,
            samples,
        }
    }

    /// Combines several reports into one whose residual is the worst of them.
    pub fn combine(name: impl Into<String>, tolerance: f64, parts: &[PredicateReport]) -> Self {
        Self::from_residuals(name, tolerance, parts.iter().map(|p| (p.max_residual, p.worst_point.clone())))
    }
}

/// Residual of `diff` relative to the magnitude `scale` of the terms involved.
pub fn scaled(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

/// Evaluates `residual` on every triple of `samples` and reduces in index
/// order, so the reported worst point is reproducible.
///
/// `arity` selects how many entries of each triple are reported.
pub fn sample_report<F>(
    name: &str,
    samples: &SampleSet,
    arity: usize,
    tol: f64,
    mode: ExecMode,
    residual: F,
) -> Result<PredicateReport>
where
    F: Fn(&[Momentum; 3]) -> f64 + Sync + Send,
{
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let values = map_slice(mode, samples.triples(), |t| residual(t));
    Ok(PredicateReport::from_residuals(
        name,
        tol,
        values.into_iter().zip(samples.triples()).map(|(r, t)| (r, t[..arity].to_vec())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_point_is_first_maximum() {
        let p = |x: f64| vec![Momentum::from([x])];
        let r =
            PredicateReport::from_residuals("t", 0.5, vec![(0.1, p(1.0)), (0.7, p(2.0)), (0.7, p(3.0)), (0.2, p(4.0))]);
        assert_eq!(r.max_residual, 0.7);
        assert_eq!(r.worst_point, p(2.0));
        assert!(!r.pass);
        assert_eq!(r.samples, 4);
    }

    #[test]
    fn nan_counts_as_failure() {
        let r = PredicateReport::from_residuals("t", 1.0, vec![(f64::NAN, vec![])]);
        assert!(r.max_residual.is_infinite());
        assert!(!r.pass);
    }

    #[test]
    fn empty_samples_rejected() {
        let s = SampleSet::from_tuples(1, vec![]);
        let r = sample_report("x", &s, 2, 1.0, ExecMode::Sequential, |_| 0.0);
        assert_eq!(r.unwrap_err(), Error::EmptySampleSet);
    }
}
