//! Numerical minimisation of Eve's one-photon overlaps over the full attack
//! families, used to check the closed forms.

use super::{maximize, OptConfig, OptResult};
use crate::cow::{CowM2Attack, CowTwoPulseAttack};
use crate::error::Result;
use crate::scalar::Real;

/// Random starts only, 5 coordinates.
pub fn oracle_config(seed: u64) -> OptConfig {
    OptConfig {
        n_starts: 32,
        seed,
        max_evals: 20_000,
        f_tol: 1e-14,
        x_tol: 1e-9,
        include_origin: false,
        ..OptConfig::default()
    }
}

/// `min |<p01_0mu|p10_mu0>|` over `lambda in [V, 1/V]` and four angles.
pub fn oracle_min_overlap_cow2pa<T: Real>(mu: T, v: T, config: &OptConfig) -> Result<OptResult<T>> {
    CowTwoPulseAttack::optimal(mu, v)?;
    let mut r = maximize(
        |x: &[T]| {
            CowTwoPulseAttack::from_search_params(mu, v, x)
                .map(|a| -a.overlap())
                .unwrap_or(T::neg_infinity())
        },
        5,
        config,
    )?;
    r.best_f = -r.best_f;
    Ok(r)
}

/// `min |<v_0|p_mu>|` over `(theta, phi)`.
pub fn oracle_min_overlap_cowm2<T: Real>(mu: T, v: T, config: &OptConfig) -> Result<OptResult<T>> {
    CowM2Attack::new(mu, v, T::zero(), T::zero())?;
    let mut r = maximize(
        |x: &[T]| {
            CowM2Attack::new(mu, v, x[0], x[1])
                .map(|a| -a.overlap())
                .unwrap_or(T::neg_infinity())
        },
        2,
        config,
    )?;
    r.best_f = -r.best_f;
    Ok(r)
}
