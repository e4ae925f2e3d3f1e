//! Nelder–Mead local search with dimension-adaptive coefficients.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct LocalResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub n_evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexSettings {
    pub max_evals: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
    /// Fresh simplices built around the incumbent after convergence.
    pub max_restarts: usize,
}

/// Maximises `f` starting from `x0`.
///
/// After each convergence the simplex is rebuilt around the best vertex;
/// the search stops once a restart fails to improve by more than `f_tol`.
pub fn nelder_mead_max<T: Real>(
    f: &impl Fn(&[T]) -> T,
    x0: &[T],
    s: &SimplexSettings,
) -> LocalResult<T> {
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &[T]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            T::neg_infinity()
        } else {
            v
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0);
    let mut converged = false;
    let mut step = T::c(s.initial_step);

    for restart in 0..=s.max_restarts {
        let budget = s.max_evals.saturating_sub(evals.get());
        if budget == 0 {
            break;
        }
        let (x, fx, ok) = run(&mut eval, &best_x, best_f, step, s, budget);
        let gain = fx - best_f;
        if fx > best_f {
            best_x = x;
            best_f = fx;
        }
        converged = ok;
        if evals.get() >= s.max_evals || !ok || (restart > 0 && gain <= T::c(s.f_tol)) {
            break;
        }
        step = (step * T::half()).max(T::c(s.x_tol * 100.0));
    }

    LocalResult {
        x: best_x,
        f: best_f,
        n_evals: evals.get(),
        converged,
    }
}

fn run<T: Real>(
    eval: &mut impl FnMut(&[T]) -> T,
    x0: &[T],
    f0: T,
    step: T,
    s: &SimplexSettings,
    budget: usize,
) -> (Vec<T>, T, bool) {
    let n = x0.len();
    let nf = T::from_usize(n).unwrap();
    let alpha = T::one();
    let gamma = T::one() + T::two() / nf;
    let rho = T::c(0.75) - T::half() / nf;
    let sigma = T::one() - T::one() / nf.max(T::two());

    let mut used = 0usize;
    let mut pts: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<T> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    vals.push(f0);
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] = p[i] + step;
        vals.push(eval(&p));
        used += 1;
        pts.push(p);
    }

    let f_tol = T::c(s.f_tol);
    let x_tol = T::c(s.x_tol);
    let mut order: Vec<usize> = (0..=n).collect();

    loop {
        // Descending by value: order[0] is the best vertex.
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second = order[n.saturating_sub(1)];

        let spread = vals[best] - vals[worst];
        let size = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[best])
                    .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
            })
            .fold(T::zero(), |m, d| m.max(d));
        if spread.abs() <= f_tol && size <= x_tol {
            return (pts[best].clone(), vals[best], true);
        }
        if size <= x_tol * T::c(1e-3) {
            return (pts[best].clone(), vals[best], true);
        }
        if used >= budget {
            // Out of budget: the value has still settled if the vertices agree.
            return (pts[best].clone(), vals[best], spread.abs() <= f_tol);
        }

        let mut centroid = vec![T::zero(); n];
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[k]) {
                *c = *c + *x;
            }
        }
        for c in centroid.iter_mut() {
            *c = *c / nf;
        }
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&pts[worst])
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        used += 1;
        if fr > vals[best] {
            let xe = along(alpha * gamma);
            let fe = eval(&xe);
            used += 1;
            if fe > fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr > vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr > vals[worst] {
            let xc = along(alpha * rho);
            let fc = eval(&xc);
            (xc, fc, fc >= fr)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc, fc > vals[worst])
        };
        used += 1;
        if accept {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for &k in &order[1..] {
            let p: Vec<T> = anchor
                .iter()
                .zip(&pts[k])
                .map(|(a, x)| *a + sigma * (*x - *a))
                .collect();
            vals[k] = eval(&p);
            pts[k] = p;
            used += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> SimplexSettings {
        SimplexSettings {
            max_evals: 20_000,
            f_tol: 1e-14,
            x_tol: 1e-8,
            initial_step: 0.5,
            max_restarts: 3,
        }
    }

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| -x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum::<f64>();
        let r = nelder_mead_max(&f, &[2.0, -1.0, 0.5], &settings());
        assert!(r.converged);
        assert!(r.x.iter().all(|v| (v - 0.3).abs() < 1e-6));
        assert!(r.f > -1e-12);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let r = nelder_mead_max(&f, &[-1.2, 1.0], &settings());
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn budget_is_respected() {
        let f = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();
        let s = SimplexSettings {
            max_evals: 30,
            ..settings()
        };
        let r = nelder_mead_max(&f, &[1.0; 6], &s);
        assert!(!r.converged);
        assert!(r.n_evals <= 30 + 7);
    }
}
