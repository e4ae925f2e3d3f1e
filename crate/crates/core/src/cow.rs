//! Long-distance attacks on the COW family.
//!
//! All quantities are in the `mu t << 1` limit, where Eve's probe states are
//! normalised and the rate is `r0 t eta`. States that never enter a
//! constraint (a photon in the wrong slot) are taken orthogonal to everything
//! else; they contribute the additive `Q` in Eve's information and are never
//! materialised.

use num_complex::Complex;
use serde::Serialize;

use crate::channel::{sifting_factor, PairingBy, Protocol};
use crate::error::{BoundsError, Result};
use crate::linalg::{inner, real_vec, Amplitudes};
use crate::optim::{maximize_from, OptConfig, OptResult};
use crate::quantum::{h_clamped, holevo_ensembles, DensityMatrix, Ensemble, ProductSum};
use crate::scalar::Real;

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn check_mu_v<T: Real>(mu: T, v: T) -> Result<()> {
    if !(mu > T::zero() && mu.is_finite()) {
        return Err(BoundsError::Domain(format!("mu = {mu}")));
    }
    if !(v >= T::zero() && v <= T::one()) {
        return Err(BoundsError::Domain(format!("V = {v}")));
    }
    Ok(())
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(BoundsError::Domain(format!("Q = {q}")));
    }
    Ok(())
}

/// `Q + (1 - Q) chi_pair`: every error slot leaks the bit completely.
fn with_error_leak<T: Real>(q: T, chi: T) -> T {
    q + (T::one() - q) * chi
}

/// `k mu (1 - h(Q) - chi)` with `k` the sifting coefficient.
pub fn rate0<T: Real>(protocol: Protocol, pairing: PairingBy, mu: T, q: T, chi: T) -> T {
    sifting_factor::<T>(protocol, pairing) * mu * (T::one() - h_clamped(q) - chi)
}

/// Components `(a, b)` of the pair `(a, b)`, `(a, -b)` with overlap `gamma`.
fn pair_components<T: Real>(gamma: T) -> (T, T) {
    (
        ((T::one() + gamma) * T::half()).sqrt(),
        ((T::one() - gamma) * T::half()).sqrt(),
    )
}

// ---------------------------------------------------------------------------
// Original COW, two-pulse attack
// ---------------------------------------------------------------------------

/// Secret key is possible against the two-pulse attack only here.
pub fn cow2pa_feasible<T: Real>(mu: T, v: T) -> bool {
    let gamma = (-mu).exp();
    v > T::half() && gamma > T::two() * (v * (T::one() - v)).sqrt()
}

/// Smallest `|<p01_0mu|p10_mu0>|` compatible with visibility `v`.
pub fn cow2pa_min_overlap<T: Real>(mu: T, v: T) -> Result<T> {
    check_mu_v(mu, v)?;
    if !cow2pa_feasible(mu, v) {
        return Ok(T::zero());
    }
    let gamma = (-mu).exp();
    let value = (T::two() * v - T::one()) * gamma
        - T::two() * (v * (T::one() - v)).sqrt() * (T::one() - gamma * gamma).sqrt();
    Ok(value.max(T::zero()))
}

/// Eve's information (equal for Alice's and Bob's bit).
pub fn cow2pa_chi<T: Real>(mu: T, q: T, v: T) -> Result<T> {
    check_q(q)?;
    let c = cow2pa_min_overlap(mu, v)?;
    Ok(with_error_leak(q, h_clamped((T::one() + c) * T::half())))
}

pub fn cow2pa_rate0<T: Real>(mu: T, q: T, v: T) -> Result<T> {
    let chi = cow2pa_chi(mu, q, v)?;
    Ok(rate0(Protocol::Cow, PairingBy::Alice, mu, q, chi))
}

/// General two-pulse attack on the pair `(mu, 0)`, `(0, mu)`.
///
/// Eve's one-photon states are
/// `p10 = sqrt(l V) v_mu0 - sqrt(1 - l V) cos(th0) e^{i ph0} v_mu0^perp + sqrt(1 - l V) sin(th0) w0`
/// and the mirror image for `p01` with `V / l`, `th1`, `ph1`, `w1`; `w0`,
/// `w1` are orthogonal to the vacuum states. Realised in four dimensions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CowTwoPulseAttack<T> {
    pub mu: T,
    pub v: T,
    pub gamma: T,
    pub lambda: T,
    pub theta0: T,
    pub theta1: T,
    pub phi0: T,
    pub phi1: T,
}

impl<T: Real> CowTwoPulseAttack<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(mu: T, v: T, lambda: T, theta0: T, theta1: T, phi0: T, phi1: T) -> Result<Self> {
        check_mu_v(mu, v)?;
        let slack = T::c(T::PROB_SLACK);
        if v > T::zero() && !(lambda >= v - slack && lambda * v <= T::one() + slack) {
            return Err(BoundsError::Domain(format!(
                "lambda = {lambda} outside [V, 1/V] for V = {v}"
            )));
        }
        Ok(Self {
            mu,
            v,
            gamma: (-mu).exp(),
            lambda,
            theta0,
            theta1,
            phi0,
            phi1,
        })
    }

    /// Unconstrained search coordinates: `lambda = V^(-sin x0)`, then the four angles.
    pub fn from_search_params(mu: T, v: T, x: &[T]) -> Result<Self> {
        if x.len() != 5 {
            return Err(BoundsError::DimensionMismatch {
                expected: 5,
                found: x.len(),
            });
        }
        let lambda = if v > T::zero() { v.powf(-x[0].sin()) } else { T::one() };
        Self::new(mu, v, lambda, x[1], x[2], x[3], x[4])
    }

    /// Closed-form optimum inside the feasible region.
    pub fn optimal(mu: T, v: T) -> Result<Self> {
        Self::new(mu, v, T::one(), T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Parameters making the two one-photon states orthogonal outside the
    /// feasible region: `lambda = 1`, `th1 = ph0 = ph1 = 0` and
    /// `cos th0 = (V g - s) / ((1 - V) g + s)` with `s = sqrt(V(1-V)) sqrt(1-g^2)`.
    pub fn full_information(mu: T, v: T) -> Result<Self> {
        check_mu_v(mu, v)?;
        if cow2pa_feasible(mu, v) {
            return Err(BoundsError::Infeasible(format!(
                "(mu = {mu}, V = {v}) admits a secret key; Eve cannot reach orthogonality"
            )));
        }
        let g = (-mu).exp();
        let s = (v * (T::one() - v)).sqrt() * (T::one() - g * g).sqrt();
        let cos0 = ((v * g - s) / ((T::one() - v) * g + s))
            .max(-T::one())
            .min(T::one());
        Self::new(mu, v, T::one(), cos0.acos(), T::zero(), T::zero(), T::zero())
    }

    /// `(v_mu0, v_0mu, v_mu0^perp, v_0mu^perp)` in four dimensions.
    pub fn vacuum_states(&self) -> [Amplitudes<T>; 4] {
        let (a, b) = pair_components(self.gamma);
        let z = T::zero();
        [
            real_vec(&[a, b, z, z]),
            real_vec(&[a, -b, z, z]),
            real_vec(&[b, -a, z, z]),
            real_vec(&[b, a, z, z]),
        ]
    }

    /// `(p10_mu0, p01_0mu)`.
    pub fn photon_states(&self) -> (Amplitudes<T>, Amplitudes<T>) {
        let [v_mu0, v_0mu, perp_mu0, perp_0mu] = self.vacuum_states();
        let build = |vac: &Amplitudes<T>, perp: &Amplitudes<T>, k: T, theta: T, phi: T, w: usize| {
            let kk = k.max(T::zero()).min(T::one());
            let x = (T::one() - kk).sqrt();
            let mut out: Amplitudes<T> = vac
                .iter()
                .zip(perp)
                .map(|(a, b)| *a * kk.sqrt() - *b * Complex::from_polar(x * theta.cos(), phi))
                .collect();
            out[w] = out[w] + re(x * theta.sin());
            out
        };
        let v = self.v;
        (
            build(&v_mu0, &perp_mu0, self.lambda * v, self.theta0, self.phi0, 2),
            build(&v_0mu, &perp_0mu, v / self.lambda, self.theta1, self.phi1, 3),
        )
    }

    pub fn overlap(&self) -> T {
        let (p10, p01) = self.photon_states();
        inner(&p01, &p10).norm()
    }

    /// `Re[<v_0mu|p01><p10|v_mu0>]`, the cross-pair visibility.
    pub fn cross_visibility(&self) -> T {
        let [v_mu0, v_0mu, _, _] = self.vacuum_states();
        let (p10, p01) = self.photon_states();
        (inner(&v_0mu, &p01) * inner(&p10, &v_mu0)).re
    }
}

/// Decoy-pair states completing the optimal two-pulse attack in three dimensions.
#[derive(Debug, Clone)]
pub struct DecoyCompletion<T> {
    pub v_mu0: Amplitudes<T>,
    pub v_0mu: Amplitudes<T>,
    pub p10_mu0: Amplitudes<T>,
    pub p01_0mu: Amplitudes<T>,
    pub v_mumu: Amplitudes<T>,
    pub p10_mumu: Amplitudes<T>,
    pub p01_mumu: Amplitudes<T>,
}

pub fn cow2pa_decoy_completion<T: Real>(mu: T, v: T) -> Result<DecoyCompletion<T>> {
    check_mu_v(mu, v)?;
    if !cow2pa_feasible(mu, v) {
        return Err(BoundsError::Infeasible(format!(
            "decoy completion is defined on the key region, not at (mu = {mu}, V = {v})"
        )));
    }
    let g = (-mu).exp();
    let one = T::one();
    let z = T::zero();
    let (a, b) = pair_components(g);
    let big_a = (T::two() * g / (one + g)).sqrt();
    let big_b = ((one - g) / (one + g)).sqrt();
    let x = (T::two() * v / (one + v)).sqrt();
    let y = ((one - v) / (one + v)).sqrt();
    let c = x * big_a + y * big_b;
    let s = x * big_b - y * big_a;
    let plus = ((one + v) * T::half()).sqrt();
    let minus = ((one - v) * T::half()).sqrt();
    let sv = v.sqrt();
    let sw = (one - v).sqrt();
    Ok(DecoyCompletion {
        v_mu0: real_vec(&[a, b, z]),
        v_0mu: real_vec(&[a, -b, z]),
        p10_mu0: real_vec(&[sv * a - sw * b, sv * b + sw * a, z]),
        p01_0mu: real_vec(&[sv * a - sw * b, -(sv * b + sw * a), z]),
        v_mumu: real_vec(&[big_a, z, big_b]),
        p10_mumu: real_vec(&[plus * c, minus, plus * s]),
        p01_mumu: real_vec(&[plus * c, -minus, plus * s]),
    })
}

impl<T: Real> DecoyCompletion<T> {
    /// Largest violation of unitarity, norm and visibility constraints.
    pub fn max_residual(&self, mu: T, v: T) -> T {
        let g = (-mu).exp();
        let sg = (-mu * T::half()).exp();
        let mut worst = T::zero();
        let mut check = |got: Complex<T>, want: T| {
            worst = worst.max((got - re(want)).norm());
        };
        for s in [
            &self.v_mu0,
            &self.v_0mu,
            &self.p10_mu0,
            &self.p01_0mu,
            &self.v_mumu,
            &self.p10_mumu,
            &self.p01_mumu,
        ] {
            check(inner(s, s), T::one());
        }
        check(inner(&self.v_0mu, &self.v_mu0), g);
        check(inner(&self.v_mumu, &self.v_mu0), sg);
        check(inner(&self.v_mumu, &self.v_0mu), sg);
        for value in self.visibilities() {
            check(re(value), v);
        }
        worst
    }

    /// The decoy visibility and the four cross-pair visibilities.
    pub fn visibilities(&self) -> [T; 5] {
        let cross = |vx: &Amplitudes<T>, px: &Amplitudes<T>, py: &Amplitudes<T>, vy: &Amplitudes<T>| {
            (inner(vx, px) * inner(py, vy)).re
        };
        [
            inner(&self.p01_mumu, &self.p10_mumu).re,
            cross(&self.v_0mu, &self.p01_0mu, &self.p10_mu0, &self.v_mu0),
            cross(&self.v_mumu, &self.p01_mumu, &self.p10_mu0, &self.v_mu0),
            cross(&self.v_0mu, &self.p01_0mu, &self.p10_mumu, &self.v_mumu),
            cross(&self.v_mumu, &self.p01_mumu, &self.p10_mumu, &self.v_mumu),
        ]
    }
}

// ---------------------------------------------------------------------------
// COWm1, two-pulse attack
// ---------------------------------------------------------------------------

/// Three-parameter attack family on COWm1, realised in four dimensions.
#[derive(Debug, Clone)]
pub struct CowM1Attack<T> {
    pub mu: T,
    pub v: T,
    pub gamma: T,
    pub theta0: T,
    pub theta1: T,
    pub phi: T,
    pub states: CowM1States<T>,
}

#[derive(Debug, Clone)]
pub struct CowM1States<T> {
    pub v_mu0: Amplitudes<T>,
    pub v_0mu: Amplitudes<T>,
    pub v_00: Amplitudes<T>,
    pub v_mumu: Amplitudes<T>,
    pub p10_mu0: Amplitudes<T>,
    pub p01_0mu: Amplitudes<T>,
    pub p10_mumu: Amplitudes<T>,
    pub p01_mumu: Amplitudes<T>,
}

pub fn cowm1_build_states<T: Real>(mu: T, v: T, theta0: T, theta1: T, phi: T) -> Result<CowM1Attack<T>> {
    check_mu_v(mu, v)?;
    let g = (-mu).exp();
    let one = T::one();
    let z = T::zero();
    let (a, b) = pair_components(g);
    let big_a = (T::two() * g / (one + g)).sqrt();
    let big_b = ((one - g) / (one + g)).sqrt();

    let v_mu0 = [a, b, z, z];
    let v_0mu = [a, -b, z, z];
    let v_00 = [big_a, z, big_b, z];
    let v_mumu = [big_a, z, -g * big_b, one - g];
    let perp_mu0 = [b, -a, z, z];
    let perp_0mu = [b, a, z, z];
    let perp1 = [z, z, (one - g * g).sqrt(), g];
    let perp2 = [big_b, z, g * big_a, -(T::two() * g).sqrt() * (one - g).sqrt()];
    let w2 = [z, one, z, z];
    let w3 = [z, z, one, z];
    let w4 = [z, z, z, one];

    let comb = |terms: &[(T, &[T; 4])]| -> [T; 4] {
        let mut out = [z; 4];
        for (k, vec) in terms {
            for i in 0..4 {
                out[i] = out[i] + *k * vec[i];
            }
        }
        out
    };
    let (s0, c0) = theta0.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let r = T::half().sqrt();
    let w_mu0 = comb(&[(c0, &perp_mu0), (s0 * c1, &w3), (s0 * s1, &w4)]);
    let w_0mu = comb(&[(c0, &perp_0mu), (s0 * c1, &w3), (s0 * s1, &w4)]);
    let w10 = comb(&[(r * cp, &perp1), (r * sp, &perp2), (-r, &w2)]);
    let w01 = comb(&[(r * cp, &perp1), (r * sp, &perp2), (r, &w2)]);

    let sv = v.sqrt();
    let sw = (one - v).sqrt();
    let p = |vac: &[T; 4], w: &[T; 4]| real_vec(&comb(&[(sv, vac), (-sw, w)]));
    let states = CowM1States {
        p10_mu0: p(&v_mu0, &w_mu0),
        p01_0mu: p(&v_0mu, &w_0mu),
        p10_mumu: p(&v_mumu, &w10),
        p01_mumu: p(&v_mumu, &w01),
        v_mu0: real_vec(&v_mu0),
        v_0mu: real_vec(&v_0mu),
        v_00: real_vec(&v_00),
        v_mumu: real_vec(&v_mumu),
    };
    Ok(CowM1Attack {
        mu,
        v,
        gamma: g,
        theta0,
        theta1,
        phi,
        states,
    })
}

impl<T: Real> CowM1Attack<T> {
    /// Largest violation among unitarity, norm and the strengthened
    /// visibility relations.
    pub fn max_residual(&self) -> T {
        let s = &self.states;
        let g = self.gamma;
        let sg = (-self.mu * T::half()).exp();
        let sv = self.v.sqrt();
        let mut worst = T::zero();
        let mut check = |got: Complex<T>, want: T| {
            worst = worst.max((got - re(want)).norm());
        };
        for x in [
            &s.v_mu0, &s.v_0mu, &s.v_00, &s.v_mumu, &s.p10_mu0, &s.p01_0mu, &s.p10_mumu,
            &s.p01_mumu,
        ] {
            check(inner(x, x), T::one());
        }
        check(inner(&s.v_0mu, &s.v_mu0), g);
        check(inner(&s.v_mumu, &s.v_mu0), sg);
        check(inner(&s.v_mumu, &s.v_0mu), sg);
        check(inner(&s.v_00, &s.v_mumu), g);
        check(inner(&s.v_00, &s.v_mu0), sg);
        check(inner(&s.v_00, &s.v_0mu), sg);
        check(inner(&s.p01_mumu, &s.p10_mumu), self.v);
        check(inner(&s.v_0mu, &s.p01_0mu), sv);
        check(inner(&s.v_mumu, &s.p01_mumu), sv);
        check(inner(&s.p10_mu0, &s.v_mu0), sv);
        check(inner(&s.p10_mumu, &s.v_mumu), sv);
        worst
    }

    /// Four-pulse ensembles `(rho^{0,0}, rho^{1,1})`, each four product
    /// states with weight 1/4.
    pub fn four_pulse_ensembles(&self) -> (Ensemble<T>, Ensemble<T>) {
        let s = &self.states;
        let w = T::c(0.25);
        let one = re(T::one());
        let mut e0 = Ensemble::new();
        for p in [&s.p01_0mu, &s.p01_mumu] {
            for vv in [&s.v_00, &s.v_0mu] {
                e0.push(w, ProductSum::new().with(one, p, vv));
            }
        }
        let mut e1 = Ensemble::new();
        for vv in [&s.v_00, &s.v_mu0] {
            for p in [&s.p10_mu0, &s.p10_mumu] {
                e1.push(w, ProductSum::new().with(one, vv, p));
            }
        }
        (e0, e1)
    }

    /// Dense 16-dimensional `(rho^{0,0}, rho^{1,1})`.
    pub fn four_pulse_states(&self) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
        let (e0, e1) = self.four_pulse_ensembles();
        Ok((e0.density_matrix()?, e1.density_matrix()?))
    }

    pub fn two_pulse_overlap(&self) -> T {
        inner(&self.states.p10_mu0, &self.states.p01_0mu).norm()
    }

    pub fn four_pulse_chi(&self) -> Result<T> {
        let (e0, e1) = self.four_pulse_ensembles();
        holevo_ensembles(&e0, &e1)
    }

    /// `Q`-independent part: `(h((1 + |<p10|p01>|)/2) + chi(rho00, rho11)) / 2`.
    pub fn pair_chi(&self) -> Result<T> {
        let two = h_clamped((T::one() + self.two_pulse_overlap()) * T::half());
        Ok(T::half() * (two + self.four_pulse_chi()?))
    }
}

pub fn cowm1_chi<T: Real>(mu: T, q: T, v: T, params: [T; 3]) -> Result<T> {
    check_q(q)?;
    let attack = cowm1_build_states(mu, v, params[0], params[1], params[2])?;
    Ok(with_error_leak(q, attack.pair_chi()?))
}

#[derive(Debug, Clone, Serialize)]
pub struct CowM1Optimum<T> {
    pub chi: T,
    pub params: [T; 3],
    pub r0: T,
    pub search: OptResult<T>,
}

/// 24 random starts plus the origin, as the default search for COWm1.
pub fn cowm1_default_config(seed: u64) -> OptConfig {
    OptConfig {
        n_starts: 25,
        seed,
        max_evals: 4_000,
        f_tol: 1e-11,
        x_tol: 1e-7,
        ..OptConfig::default()
    }
}

pub fn cowm1_optimize<T: Real>(mu: T, q: T, v: T, config: &OptConfig) -> Result<CowM1Optimum<T>> {
    let starts: Vec<Vec<T>> = (0..config.n_starts)
        .map(|i| config.start_point(i, 3))
        .collect();
    cowm1_optimize_from(mu, q, v, &starts, config)
}

/// Like [`cowm1_optimize`] from explicit start points.
pub fn cowm1_optimize_from<T: Real>(
    mu: T,
    q: T,
    v: T,
    starts: &[Vec<T>],
    config: &OptConfig,
) -> Result<CowM1Optimum<T>> {
    check_mu_v(mu, v)?;
    check_q(q)?;
    let objective = |x: &[T]| {
        cowm1_build_states(mu, v, x[0], x[1], x[2])
            .and_then(|a| a.pair_chi())
            .unwrap_or(T::neg_infinity())
    };
    let search = maximize_from(objective, starts, config)?;
    let params = [search.best_x[0], search.best_x[1], search.best_x[2]];
    let chi = with_error_leak(q, search.best_f);
    Ok(CowM1Optimum {
        chi,
        params,
        r0: rate0(Protocol::CowM1, PairingBy::Alice, mu, q, chi),
        search,
    })
}

// ---------------------------------------------------------------------------
// COWm2, one-pulse attack
// ---------------------------------------------------------------------------

pub fn cowm2_feasible<T: Real>(mu: T, v: T) -> bool {
    (-mu).exp() > T::one() - v
}

/// Smallest `|<v_0|p_mu>|` compatible with visibility `v`.
pub fn cowm2_min_overlap<T: Real>(mu: T, v: T) -> Result<T> {
    check_mu_v(mu, v)?;
    if !cowm2_feasible(mu, v) {
        return Ok(T::zero());
    }
    let value = (-mu * T::half()).exp() * v.sqrt()
        - (-(-mu).exp_m1()).sqrt() * (T::one() - v).sqrt();
    Ok(value.max(T::zero()))
}

/// Eve's information; the overlap enters squared.
pub fn cowm2_chi<T: Real>(mu: T, q: T, v: T) -> Result<T> {
    check_q(q)?;
    let c = cowm2_min_overlap(mu, v)?;
    Ok(with_error_leak(q, h_clamped((T::one() + c * c) * T::half())))
}

pub fn cowm2_rate0<T: Real>(mu: T, q: T, v: T) -> Result<T> {
    let chi = cowm2_chi(mu, q, v)?;
    Ok(rate0(Protocol::CowM2, PairingBy::Alice, mu, q, chi))
}

/// One-pulse attack with `v_mu = e1`, `v_0 = (e^{-mu/2}, sqrt(1-e^{-mu}), 0)`
/// and `p_mu = (sqrt V, -sqrt(1-V) cos(th) e^{i ph}, sqrt(1-V) sin(th))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CowM2Attack<T> {
    pub mu: T,
    pub v: T,
    pub theta: T,
    pub phi: T,
}

impl<T: Real> CowM2Attack<T> {
    pub fn new(mu: T, v: T, theta: T, phi: T) -> Result<Self> {
        check_mu_v(mu, v)?;
        Ok(Self { mu, v, theta, phi })
    }

    /// Parameters reaching orthogonality when `e^{-mu} <= 1 - V`.
    pub fn full_information(mu: T, v: T) -> Result<Self> {
        check_mu_v(mu, v)?;
        if cowm2_feasible(mu, v) {
            return Err(BoundsError::Infeasible(format!(
                "(mu = {mu}, V = {v}) admits a secret key; Eve cannot reach orthogonality"
            )));
        }
        let g = (-mu).exp();
        let cos = if v < T::one() {
            (g / (T::one() - g) * v / (T::one() - v)).sqrt().min(T::one())
        } else {
            T::one()
        };
        Self::new(mu, v, cos.acos(), T::zero())
    }

    pub fn states(&self) -> [Amplitudes<T>; 3] {
        let z = T::zero();
        let g = (-self.mu).exp();
        let sw = (T::one() - self.v).sqrt();
        let v_mu = real_vec(&[T::one(), z, z]);
        let v_0 = real_vec(&[(-self.mu * T::half()).exp(), (T::one() - g).sqrt(), z]);
        let p_mu = vec![
            re(self.v.sqrt()),
            -Complex::from_polar(sw * self.theta.cos(), self.phi),
            re(sw * self.theta.sin()),
        ];
        [v_mu, v_0, p_mu]
    }

    pub fn overlap(&self) -> T {
        let [_, v_0, p_mu] = self.states();
        inner(&v_0, &p_mu).norm()
    }
}
