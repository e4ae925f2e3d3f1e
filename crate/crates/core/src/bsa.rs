//! Collective beam-splitting attack: Eve keeps the fraction `1 - t` of every
//! pulse and forwards the rest over a lossless line.

use serde::Serialize;

use crate::channel::{detection_probability, sifting_factor, PairingBy, Protocol};
use crate::error::{BoundsError, Result};
use crate::optim::{maximize_scalar, ScalarSearch};
use crate::quantum::h_clamped;
use crate::scalar::Real;

/// Upper end of every mean-photon-number search.
pub const MU_MAX: f64 = 5.0;
/// Lower end of the log-spaced mean-photon-number grid.
pub const MU_MIN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BsaPoint<T> {
    pub mu: T,
    pub t: T,
    pub gamma_e: T,
    pub chi: T,
    pub rate: T,
}

/// Overlap `exp(-mu (1 - t))` between Eve's coherent states.
pub fn gamma_e<T: Real>(mu: T, t: T) -> T {
    (-mu * (T::one() - t)).exp()
}

fn check<T: Real>(mu: T, t: T) -> Result<()> {
    if !(mu > T::zero()) || !(t > T::zero() && t <= T::one()) {
        return Err(BoundsError::Domain(format!("mu = {mu}, t = {t}")));
    }
    Ok(())
}

fn chi_cow_unchecked<T: Real>(mu: T, t: T) -> T {
    h_clamped((T::one() - gamma_e(mu, t)) * T::half())
}

fn chi_dps_unchecked<T: Real>(mu: T, t: T) -> T {
    let g = gamma_e(mu, t);
    let g2 = g * g;
    let v = T::two() * h_clamped((T::one() - g2) * T::half())
        - h_clamped((T::one() - g2 * g2) * T::half());
    v.max(T::zero()).min(T::one())
}

pub fn chi_bsa_cow<T: Real>(mu: T, t: T) -> Result<T> {
    check(mu, t)?;
    Ok(chi_cow_unchecked(mu, t))
}

pub fn chi_bsa_dps<T: Real>(mu: T, t: T) -> Result<T> {
    check(mu, t)?;
    Ok(chi_dps_unchecked(mu, t))
}

/// Eve's information in the `t -> 0` limit.
pub fn chi_bsa_limit<T: Real>(protocol: Protocol, mu: T) -> Result<T> {
    if !(mu > T::zero()) {
        return Err(BoundsError::Domain(format!("mu = {mu}")));
    }
    match protocol {
        Protocol::Cow => Ok(chi_cow_unchecked(mu, T::zero())),
        Protocol::Dps => Ok(chi_dps_unchecked(mu, T::zero())),
        other => Err(BoundsError::InvalidConfig(format!(
            "beam-splitting analysis covers COW and DPS, not {other}"
        ))),
    }
}

pub fn bsa_point<T: Real>(protocol: Protocol, mu: T, t: T, eta: T) -> Result<BsaPoint<T>> {
    let chi = match protocol {
        Protocol::Cow => chi_bsa_cow(mu, t)?,
        Protocol::Dps => chi_bsa_dps(mu, t)?,
        other => {
            return Err(BoundsError::InvalidConfig(format!(
                "beam-splitting analysis covers COW and DPS, not {other}"
            )))
        }
    };
    let k = sifting_factor::<T>(protocol, PairingBy::Alice);
    Ok(BsaPoint {
        mu,
        t,
        gamma_e: gamma_e(mu, t),
        chi,
        rate: k * detection_probability(mu, t, eta) * (T::one() - chi),
    })
}

pub fn rate_bsa<T: Real>(protocol: Protocol, mu: T, t: T, eta: T) -> Result<T> {
    Ok(bsa_point(protocol, mu, t, eta)?.rate)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BsaOptimum<T> {
    pub point: BsaPoint<T>,
    /// The rate still increases at `MU_MAX`.
    pub saturated: bool,
    pub n_evals: usize,
}

pub fn default_mu_search() -> ScalarSearch {
    ScalarSearch {
        grid_points: 200,
        log_spaced: true,
        tol: 1e-6,
    }
}

/// Mean photon number maximising the beam-splitting rate at transmission `t`.
pub fn optimize_bsa<T: Real>(
    protocol: Protocol,
    t: T,
    eta: T,
    search: &ScalarSearch,
) -> Result<BsaOptimum<T>> {
    bsa_point(protocol, T::one(), t, eta)?;
    let r = maximize_scalar(
        |mu| {
            rate_bsa(protocol, T::c(mu), t, eta)
                .map(|v| v.as_f64())
                .unwrap_or(f64::NEG_INFINITY)
        },
        MU_MIN,
        MU_MAX,
        search,
    )?;
    Ok(BsaOptimum {
        point: bsa_point(protocol, T::c(r.x), t, eta)?,
        saturated: r.saturated,
        n_evals: r.n_evals,
    })
}

/// `(mu_opt, r0)` of the long-distance rate `r ~ r0 t eta`.
pub fn bsa_asymptote(protocol: Protocol, search: &ScalarSearch) -> Result<(f64, f64)> {
    chi_bsa_limit::<f64>(protocol, 1.0)?;
    let k: f64 = sifting_factor(protocol, PairingBy::Alice);
    let r = maximize_scalar(
        |mu| k * mu * (1.0 - chi_bsa_limit(protocol, mu).unwrap_or(1.0)),
        MU_MIN,
        MU_MAX,
        search,
    )?;
    Ok((r.x, r.f))
}
