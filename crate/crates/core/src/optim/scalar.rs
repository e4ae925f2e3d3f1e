//! One-dimensional maximisation: grid scan followed by golden-section refinement.

use serde::Serialize;

use crate::error::{BoundsError, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalarSearch {
    pub grid_points: usize,
    /// Log-spaced grid (requires `lo > 0`); otherwise linear.
    pub log_spaced: bool,
    pub tol: f64,
}

impl Default for ScalarSearch {
    fn default() -> Self {
        Self {
            grid_points: 200,
            log_spaced: true,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalarResult {
    pub x: f64,
    pub f: f64,
    /// The maximum sits on the upper end of the interval.
    pub saturated: bool,
    pub n_evals: usize,
}

/// Maximises `f` over `[lo, hi]`.
///
/// The best grid point brackets the search; golden-section then narrows the
/// bracket below `tol`. When the best grid point is `hi` the objective is
/// treated as increasing and `hi` is returned with `saturated` set.
pub fn maximize_scalar(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    search: &ScalarSearch,
) -> Result<ScalarResult> {
    if !(lo < hi) || search.grid_points < 3 || !(search.tol > 0.0) {
        return Err(BoundsError::InvalidConfig(format!(
            "scalar search on [{lo}, {hi}] with {} points",
            search.grid_points
        )));
    }
    if search.log_spaced && !(lo > 0.0) {
        return Err(BoundsError::InvalidConfig(
            "log-spaced grid needs a positive lower end".into(),
        ));
    }
    let n = search.grid_points;
    let grid: Vec<f64> = (0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            if search.log_spaced {
                (lo.ln() + s * (hi.ln() - lo.ln())).exp()
            } else {
                lo + s * (hi - lo)
            }
        })
        .collect();
    let mut evals = 0;
    let mut eval = |x: f64| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let values: Vec<f64> = grid.iter().map(|&x| eval(x)).collect();
    let k = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });

    if k == n - 1 {
        return Ok(ScalarResult {
            x: hi,
            f: values[k],
            saturated: true,
            n_evals: evals,
        });
    }
    let mut a = grid[k.saturating_sub(1)];
    let mut b = grid[k + 1];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while (b - a) > search.tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    let (mut x, mut fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    if values[k] > fx {
        x = grid[k];
        fx = values[k];
    }
    Ok(ScalarResult {
        x,
        f: fx,
        saturated: false,
        n_evals: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let s = ScalarSearch {
            tol: 1e-7,
            ..ScalarSearch::default()
        };
        let r = maximize_scalar(|x| -(x - 0.4583) * (x - 0.4583), 1e-3, 5.0, &s).unwrap();
        assert!((r.x - 0.4583).abs() < 1e-6);
        assert!(!r.saturated);
    }

    #[test]
    fn increasing_objective_saturates() {
        let r = maximize_scalar(|x| x, 1e-3, 5.0, &ScalarSearch::default()).unwrap();
        assert!(r.saturated);
        assert_eq!(r.x, 5.0);
    }

    #[test]
    fn result_stays_in_bracket() {
        let s = ScalarSearch {
            grid_points: 5,
            log_spaced: false,
            tol: 1e-9,
        };
        let r = maximize_scalar(|x| -x, 0.0, 1.0, &s).unwrap();
        assert!((0.0..=1.0).contains(&r.x));
        assert!(r.x < 1e-8);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(maximize_scalar(|x| x, 1.0, 1.0, &ScalarSearch::default()).is_err());
        assert!(maximize_scalar(|x| x, 0.0, 1.0, &ScalarSearch::default()).is_err());
    }
}
