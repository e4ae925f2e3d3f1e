//! Derivative-free maximisation: multi-start simplex search, a scalar
//! grid-plus-golden-section search, and brute-force overlap oracles.

pub mod oracle;
pub mod scalar;
pub mod simplex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BoundsError, Result};
use crate::scalar::Real;

pub use oracle::{oracle_config, oracle_min_overlap_cow2pa, oracle_min_overlap_cowm2};
pub use scalar::{maximize_scalar, ScalarResult, ScalarSearch};
pub use simplex::{nelder_mead_max, LocalResult, SimplexSettings};

#[derive(Debug, Clone, Serialize)]
pub struct OptConfig {
    pub n_starts: usize,
    pub seed: u64,
    /// Evaluation budget per start.
    pub max_evals: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    /// Random starts are drawn uniformly from this box in every coordinate.
    pub start_box: (f64, f64),
    pub initial_step: f64,
    pub max_restarts: usize,
    /// Use the all-zeros point as start 0.
    pub include_origin: bool,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            n_starts: 16,
            seed: 0,
            max_evals: 20_000,
            f_tol: 1e-9,
            x_tol: 1e-7,
            start_box: (0.0, std::f64::consts::TAU),
            initial_step: 0.5,
            max_restarts: 4,
            include_origin: true,
        }
    }
}

impl OptConfig {
    /// Default start count by problem dimension.
    pub fn for_dim(dim: usize) -> Self {
        let n_starts = match dim {
            0..=3 => 8,
            4..=8 => 16,
            _ => 32,
        };
        Self {
            n_starts,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 || self.max_evals == 0 {
            return Err(BoundsError::InvalidConfig(
                "n_starts and max_evals must be positive".into(),
            ));
        }
        if !(self.f_tol > 0.0 && self.x_tol > 0.0 && self.initial_step > 0.0) {
            return Err(BoundsError::InvalidConfig(
                "tolerances and step must be positive".into(),
            ));
        }
        if !(self.start_box.0 < self.start_box.1) {
            return Err(BoundsError::InvalidConfig("empty start box".into()));
        }
        Ok(())
    }

    fn simplex(&self) -> SimplexSettings {
        SimplexSettings {
            max_evals: self.max_evals,
            f_tol: self.f_tol,
            x_tol: self.x_tol,
            initial_step: self.initial_step,
            max_restarts: self.max_restarts,
        }
    }

    /// Start `index`, reproducible independently of scheduling.
    pub fn start_point<T: Real>(&self, index: usize, dim: usize) -> Vec<T> {
        if self.include_origin && index == 0 {
            return vec![T::zero(); dim];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let (lo, hi) = self.start_box;
        (0..dim).map(|_| T::c(rng.gen_range(lo..hi))).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptResult<T> {
    pub best_x: Vec<T>,
    pub best_f: T,
    pub n_evals: usize,
    pub converged: bool,
    pub start_index: usize,
}

/// Multi-start maximisation of `objective` over `R^dim`.
///
/// Starts run in parallel; the merge keeps the largest value and breaks ties
/// by the lower start index, so the outcome does not depend on scheduling.
pub fn maximize<T: Real>(
    objective: impl Fn(&[T]) -> T + Sync,
    dim: usize,
    config: &OptConfig,
) -> Result<OptResult<T>> {
    let starts: Vec<Vec<T>> = (0..config.n_starts)
        .map(|i| config.start_point(i, dim))
        .collect();
    maximize_from(objective, &starts, config)
}

/// Like [`maximize`] with explicitly supplied start points.
pub fn maximize_from<T: Real>(
    objective: impl Fn(&[T]) -> T + Sync,
    starts: &[Vec<T>],
    config: &OptConfig,
) -> Result<OptResult<T>> {
    config.validate()?;
    if starts.is_empty() || starts[0].is_empty() {
        return Err(BoundsError::InvalidConfig("no start points".into()));
    }
    let settings = config.simplex();
    let locals: Vec<LocalResult<T>> = starts
        .par_iter()
        .map(|x0| nelder_mead_max(&objective, x0, &settings))
        .collect();

    let n_evals = locals.iter().map(|r| r.n_evals).sum();
    let converged = locals.iter().any(|r| r.converged);
    let (start_index, best) = locals
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.f > a.1.f { b } else { a })
        .expect("at least one start");
    Ok(OptResult {
        best_x: best.x,
        best_f: best.f,
        n_evals,
        converged,
        start_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_norm_peaks_at_origin() {
        let cfg = OptConfig {
            n_starts: 4,
            x_tol: 1e-8,
            f_tol: 1e-14,
            ..OptConfig::default()
        };
        let r = maximize(|x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>(), 3, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.best_f > -1e-12);
        assert!(r.best_x.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn sine_cosine_peak() {
        let cfg = OptConfig {
            include_origin: false,
            ..OptConfig::for_dim(2)
        };
        let r = maximize(|x: &[f64]| x[0].sin() * x[1].cos(), 2, &cfg).unwrap();
        assert!((r.best_f - 1.0).abs() < 1e-6);
        let again = (r.best_x[0].sin() * r.best_x[1].cos() - r.best_f).abs();
        assert!(again < 1e-12);
    }

    #[test]
    fn deterministic_across_runs_and_threads() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() + (2.0 * x[1]).cos() - 0.1 * x[2] * x[2];
        let cfg = OptConfig::for_dim(3).with_seed(42);
        let a = maximize(f, 3, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| maximize(f, 3, &cfg).unwrap());
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
        assert_eq!(a.start_index, b.start_index);
    }

    #[test]
    fn never_below_best_start() {
        let f = |x: &[f64]| -(x[0] - 1.0).abs() - (x[1] + 2.0).abs();
        let cfg = OptConfig::for_dim(2).with_seed(5);
        let r = maximize(f, 2, &cfg).unwrap();
        let start_best = (0..cfg.n_starts)
            .map(|i| f(&cfg.start_point::<f64>(i, 2)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(r.best_f >= start_best);
    }

    #[test]
    fn starts_depend_on_seed_and_index_only() {
        let cfg = OptConfig::default().with_seed(9);
        let a: Vec<f64> = cfg.start_point(3, 5);
        let b: Vec<f64> = cfg.start_point(3, 5);
        let c: Vec<f64> = cfg.start_point(4, 5);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(cfg.start_point::<f64>(0, 2), vec![0.0, 0.0]);
    }

    #[test]
    fn invalid_config() {
        let cfg = OptConfig {
            n_starts: 0,
            ..OptConfig::default()
        };
        assert!(maximize(|x: &[f64]| x[0], 1, &cfg).is_err());
    }
}
