//! Long-distance attacks on DPS: one-pulse attacks on single pulses and
//! two-pulse attacks on consecutive pairs.
//!
//! The two-pulse family keeps Eve's vacuum states fixed and writes each
//! one-photon state as `sqrt(V) v - sqrt(1 - V) w` with a real orthonormal
//! 2-frame `(w01, w10)` orthogonal to its own vacuum state. Complex frames
//! are not searched, so the 2PA bound is an upper bound on Eve's best
//! attack only within this family.

use num_complex::Complex;
use serde::Serialize;

use crate::channel::{sifting_factor, PairingBy, Protocol};
use crate::error::{BoundsError, Result};
use crate::linalg::{inner, real_vec, Amplitudes};
use crate::optim::{maximize_from, OptConfig, OptResult};
use crate::quantum::{h_clamped, holevo_ensembles, DensityMatrix, Ensemble, ProductSum};
use crate::scalar::Real;

const SIGNS: [i8; 2] = [1, -1];

fn sgn<T: Real>(s: i8) -> T {
    if s > 0 {
        T::one()
    } else {
        -T::one()
    }
}

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

/// Eve's information on Alice's and Bob's bit, with the two-pulse (`chi2`)
/// and four-pulse (`chi4`) contributions. One-pulse attacks have a single
/// case and report it in both slots.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DpsChiPair<T> {
    pub chi_ae: T,
    pub chi_be: T,
    pub chi2_ae: T,
    pub chi2_be: T,
    pub chi4_ae: T,
    pub chi4_be: T,
}

impl<T: Real> DpsChiPair<T> {
    pub fn from_cases(chi2_ae: T, chi2_be: T, chi4_ae: T, chi4_be: T) -> Self {
        Self {
            chi_ae: T::half() * (chi2_ae + chi4_ae),
            chi_be: T::half() * (chi2_be + chi4_be),
            chi2_ae,
            chi2_be,
            chi4_ae,
            chi4_be,
        }
    }

    pub fn single(chi_ae: T, chi_be: T) -> Self {
        Self::from_cases(chi_ae, chi_be, chi_ae, chi_be)
    }

    pub fn min(&self) -> T {
        self.chi_ae.min(self.chi_be)
    }
}

/// `mu (1 - h((1 - V)/2) - min(chi_AE, chi_BE))`.
pub fn dps_rate0<T: Real>(mu: T, v: T, chi: &DpsChiPair<T>) -> T {
    let q = (T::one() - v) * T::half();
    sifting_factor::<T>(Protocol::Dps, PairingBy::Alice) * mu * (T::one() - h_clamped(q) - chi.min())
}

// ---------------------------------------------------------------------------
// One-pulse attack
// ---------------------------------------------------------------------------

/// `[theta_plus, theta_minus, theta, phi_plus, phi_minus, phi]`.
pub type Dps1paParams<T> = [T; 6];

#[derive(Debug, Clone)]
pub struct Dps1paAttack<T> {
    pub mu: T,
    pub v: T,
    pub gamma: T,
    pub params: Dps1paParams<T>,
    /// `[v_+, v_-]`
    pub v_states: [Amplitudes<T>; 2],
    /// `[p_+, p_-]`
    pub p_states: [Amplitudes<T>; 2],
}

impl<T: Real> Dps1paAttack<T> {
    pub fn new(mu: T, v: T, params: Dps1paParams<T>) -> Result<Self> {
        check_mu_v(mu, v)?;
        let one = T::one();
        let z = T::zero();
        let gamma = (-T::two() * mu).exp();
        let a = ((one + gamma) * T::half()).sqrt();
        let b = ((one - gamma) * T::half()).sqrt();
        let [th_p, th_m, th, ph_p, ph_m, ph] = params;
        let (sh, ch) = (th * T::half()).sin_cos();
        let w_prime = |s: T| -> Amplitudes<T> {
            vec![
                re(z),
                re(z),
                Complex::from_polar(ch, s * ph * T::half()),
                Complex::from_polar(s * sh, s * ph * T::half()),
            ]
        };
        let sv = v.sqrt();
        let sw = (one - v).sqrt();
        let build = |s: T, theta: T, phi: T| -> (Amplitudes<T>, Amplitudes<T>) {
            let vac = real_vec(&[a, s * b, z, z]);
            let perp = real_vec(&[b, -s * a, z, z]);
            let wp = w_prime(s);
            let rot = Complex::from_polar(sw * theta.cos(), phi);
            let p = (0..4)
                .map(|i| vac[i] * sv - perp[i] * rot - wp[i] * (sw * theta.sin()))
                .collect();
            (vac, p)
        };
        let (v_p, p_p) = build(one, th_p, ph_p);
        let (v_m, p_m) = build(-one, th_m, ph_m);
        Ok(Self {
            mu,
            v,
            gamma,
            params,
            v_states: [v_p, v_m],
            p_states: [p_p, p_m],
        })
    }

    /// Reduced family: real coefficients and `theta_minus = -theta_plus`.
    pub fn reduced(mu: T, v: T, theta_pm: T, theta: T) -> Result<Self> {
        let z = T::zero();
        Self::new(mu, v, [theta_pm, -theta_pm, theta, z, z, z])
    }

    pub fn max_residual(&self) -> T {
        let [vp, vm] = &self.v_states;
        let mut worst = (inner(vp, vm) - re(self.gamma)).norm();
        for (vs, ps) in self.v_states.iter().zip(&self.p_states) {
            worst = worst.max((inner(vs, vs) - re(T::one())).norm());
            worst = worst.max((inner(ps, ps) - re(T::one())).norm());
            worst = worst.max((inner(vs, ps) - re(self.v.sqrt())).norm());
        }
        worst
    }

    fn psi(&self, s: usize, w: usize, b: usize) -> ProductSum<T> {
        let sign_b = if b == 0 { T::one() } else { -T::one() };
        ProductSum::new()
            .with(re(sgn(SIGNS[s])), &self.p_states[s], &self.v_states[w])
            .with(re(sign_b * sgn(SIGNS[w])), &self.v_states[s], &self.p_states[w])
    }

    /// Unnormalised `rho^{a,b}`: `1/8 sum_sigma |psi_{sigma, (-1)^a sigma, b}>`.
    pub fn joint_ensemble(&self, a: usize, b: usize) -> Ensemble<T> {
        let mut e = Ensemble::new();
        for s in 0..2 {
            e.push(T::c(0.125), self.psi(s, s ^ a, b));
        }
        e
    }

    /// `(rho^{A=0}, rho^{A=1}, rho^{B=0}, rho^{B=1})` as ensembles.
    pub fn conditioned_ensembles(&self) -> [Ensemble<T>; 4] {
        let mut out: [Ensemble<T>; 4] = Default::default();
        for a in 0..2 {
            for b in 0..2 {
                for s in 0..2 {
                    out[a].push(T::c(0.125), self.psi(s, s ^ a, b));
                    out[2 + b].push(T::c(0.125), self.psi(s, s ^ a, b));
                }
            }
        }
        out
    }

    /// Dense 16-dimensional conditioned states, same order as the ensembles.
    pub fn conditioned_states(&self) -> Result<Vec<DensityMatrix<T>>> {
        self.conditioned_ensembles()
            .iter()
            .map(|e| e.density_matrix())
            .collect()
    }

    pub fn chi(&self) -> Result<DpsChiPair<T>> {
        let [a0, a1, b0, b1] = self.conditioned_ensembles();
        Ok(DpsChiPair::single(
            holevo_ensembles(&a0, &a1)?,
            holevo_ensembles(&b0, &b1)?,
        ))
    }
}

pub fn dps1pa_chi<T: Real>(mu: T, v: T, params: Dps1paParams<T>) -> Result<DpsChiPair<T>> {
    let attack = Dps1paAttack::new(mu, v, params)?;
    let residual = attack.max_residual();
    if residual > T::c(1e-10).max(T::c(T::TRACE_TOL)) {
        return Err(BoundsError::InvalidState(format!(
            "1PA constraints violated by {residual}"
        )));
    }
    attack.chi()
}

#[derive(Debug, Clone, Serialize)]
pub struct Dps1paOptimum<T> {
    pub chi: DpsChiPair<T>,
    pub params: Dps1paParams<T>,
    pub r0: T,
    /// Best `min(chi_AE, chi_BE)` over the reduced two-parameter family.
    pub reduced_min_chi: T,
    /// Best `min(chi_AE, chi_BE)` over all six parameters.
    pub full_min_chi: T,
    pub n_evals: usize,
    pub converged: bool,
}

pub fn dps1pa_default_config(seed: u64) -> OptConfig {
    OptConfig {
        n_starts: 8,
        seed,
        max_evals: 6_000,
        f_tol: 1e-12,
        x_tol: 1e-8,
        ..OptConfig::default()
    }
}

/// Largest gap tolerated between the full and the reduced 1PA search.
pub const DPS1PA_AGREEMENT_TOL: f64 = 1e-5;

/// Best `min(chi_AE, chi_BE)` over the reduced family `(theta_pm, theta)`.
pub fn dps1pa_optimize_reduced<T: Real>(
    mu: T,
    v: T,
    starts: &[Vec<T>],
    config: &OptConfig,
) -> Result<OptResult<T>> {
    check_mu_v(mu, v)?;
    let objective = |x: &[T]| {
        Dps1paAttack::reduced(mu, v, x[0], x[1])
            .and_then(|a| a.chi())
            .map(|c| c.min())
            .unwrap_or(T::neg_infinity())
    };
    maximize_from(objective, starts, config)
}

/// Maximises `min(chi_AE, chi_BE)` over the full six-parameter family and
/// over the reduced family, and requires the two to agree.
pub fn dps1pa_optimize<T: Real>(mu: T, v: T, config: &OptConfig) -> Result<Dps1paOptimum<T>> {
    check_mu_v(mu, v)?;
    let objective_full = |x: &[T]| {
        Dps1paAttack::new(mu, v, [x[0], x[1], x[2], x[3], x[4], x[5]])
            .and_then(|a| a.chi())
            .map(|c| c.min())
            .unwrap_or(T::neg_infinity())
    };
    let reduced_starts: Vec<Vec<T>> = (0..config.n_starts)
        .map(|i| config.start_point(i, 2))
        .collect();
    let reduced = dps1pa_optimize_reduced(mu, v, &reduced_starts, config)?;
    // Seed the full search with the reduced optimum as well.
    let mut starts: Vec<Vec<T>> = (0..config.n_starts)
        .map(|i| config.start_point(i, 6))
        .collect();
    let z = T::zero();
    starts.push(vec![
        reduced.best_x[0],
        -reduced.best_x[0],
        reduced.best_x[1],
        z,
        z,
        z,
    ]);
    let full = maximize_from(objective_full, &starts, config)?;

    let gap = (full.best_f - reduced.best_f).abs().as_f64();
    if gap > DPS1PA_AGREEMENT_TOL {
        return Err(BoundsError::SearchDisagreement {
            gap,
            tol: DPS1PA_AGREEMENT_TOL,
        });
    }
    let x = &full.best_x;
    let params = [x[0], x[1], x[2], x[3], x[4], x[5]];
    let chi = dps1pa_chi(mu, v, params)?;
    Ok(Dps1paOptimum {
        r0: dps_rate0(mu, v, &chi),
        chi,
        params,
        reduced_min_chi: reduced.best_f,
        full_min_chi: full.best_f,
        n_evals: full.n_evals + reduced.n_evals,
        converged: full.converged && reduced.converged,
    })
}

// ---------------------------------------------------------------------------
// Two-pulse attack
// ---------------------------------------------------------------------------

/// Ambient dimension of Eve's two-pulse probe.
pub const DPS2PA_DIM: usize = 10;

/// Where the frame vectors `w01`, `w10` of each pair may point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FrameSpace {
    /// Anywhere in the real ambient space, orthogonal to the pair's own
    /// vacuum state only.
    #[default]
    FullAmbient,
    /// Inside the six-dimensional complement of all four vacuum states.
    OrthogonalComplement,
}

impl FrameSpace {
    /// Coordinates spanned by the raw frame vectors.
    pub fn raw_dim(self) -> usize {
        match self {
            FrameSpace::FullAmbient => DPS2PA_DIM,
            FrameSpace::OrthogonalComplement => DPS2PA_DIM - 4,
        }
    }

    /// Unconstrained search dimension: two raw vectors per pair.
    pub fn n_params(self) -> usize {
        8 * self.raw_dim()
    }
}

/// Index of the pair `(sigma, omega)`: `++, +-, -+, --`.
fn pair_index(s: usize, w: usize) -> usize {
    2 * s + w
}

#[derive(Debug, Clone)]
pub struct Dps2paAttack<T> {
    pub mu: T,
    pub v: T,
    pub gamma: T,
    pub frame_space: FrameSpace,
    /// `v_{sigma omega}` in `pair_index` order, padded to the ambient dimension.
    pub v_states: [Amplitudes<T>; 4],
    /// `(w01, w10)` per pair.
    pub w_frames: [[Amplitudes<T>; 2]; 4],
    /// `(p01, p10)` per pair.
    pub p_states: [[Amplitudes<T>; 2]; 4],
}

fn dps2pa_vacuum<T: Real>(gamma: T) -> [Amplitudes<T>; 4] {
    let one = T::one();
    let c = ((one - gamma * gamma) * T::half()).sqrt();
    let a = (one + gamma) * T::half();
    let b = (one - gamma) * T::half();
    let mut out: [Amplitudes<T>; 4] = Default::default();
    for s in 0..2 {
        for w in 0..2 {
            let sw = sgn::<T>(SIGNS[s] * SIGNS[w]);
            let mut x = vec![T::zero(); DPS2PA_DIM];
            x[0] = a;
            x[1] = sw * b;
            let slot = if SIGNS[s] == SIGNS[w] { 2 } else { 3 };
            x[slot] = sgn::<T>(SIGNS[s]) * c;
            out[pair_index(s, w)] = real_vec(&x);
        }
    }
    out
}

/// Orthonormalises `raw` against `basis` (assumed orthonormal). `None` if
/// what remains is shorter than `1e-8`.
fn orthonormalize<T: Real>(raw: &[T], basis: &[&[T]]) -> Option<Vec<T>> {
    let mut x = raw.to_vec();
    for b in basis {
        let d: T = x.iter().zip(b.iter()).map(|(p, q)| *p * *q).sum();
        for (xi, bi) in x.iter_mut().zip(b.iter()) {
            *xi = *xi - d * *bi;
        }
    }
    let n = x.iter().map(|p| *p * *p).sum::<T>().sqrt();
    if n < T::c(1e-8) {
        return None;
    }
    Some(x.into_iter().map(|p| p / n).collect())
}

impl<T: Real> Dps2paAttack<T> {
    /// Builds the attack from `FrameSpace::n_params` raw coordinates: two raw
    /// vectors per pair, orthonormalised in sequence against the vacuum state.
    pub fn from_raw(mu: T, v: T, frame_space: FrameSpace, raw: &[T]) -> Result<Self> {
        check_mu_v(mu, v)?;
        let n = frame_space.n_params();
        if raw.len() != n {
            return Err(BoundsError::DimensionMismatch {
                expected: n,
                found: raw.len(),
            });
        }
        let gamma = (-T::two() * mu).exp();
        let v_states = dps2pa_vacuum(gamma);
        let rd = frame_space.raw_dim();
        let offset = DPS2PA_DIM - rd;
        let sv = v.sqrt();
        let sw = (T::one() - v).sqrt();

        let mut w_frames: [[Amplitudes<T>; 2]; 4] = Default::default();
        let mut p_states: [[Amplitudes<T>; 2]; 4] = Default::default();
        for k in 0..4 {
            let vac: Vec<T> = v_states[k].iter().map(|z| z.re).collect();
            let embed = |chunk: &[T]| {
                let mut x = vec![T::zero(); DPS2PA_DIM];
                x[offset..].copy_from_slice(chunk);
                x
            };
            let r1 = embed(&raw[(2 * k) * rd..(2 * k + 1) * rd]);
            let r2 = embed(&raw[(2 * k + 1) * rd..(2 * k + 2) * rd]);
            let degenerate = || BoundsError::InvalidState(format!("degenerate frame for pair {k}"));
            let w1 = orthonormalize(&r1, &[&vac]).ok_or_else(degenerate)?;
            let w2 = orthonormalize(&r2, &[&vac, &w1]).ok_or_else(degenerate)?;
            for (slot, w) in [w1, w2].into_iter().enumerate() {
                let p: Vec<T> = vac.iter().zip(&w).map(|(a, b)| sv * *a - sw * *b).collect();
                p_states[k][slot] = real_vec(&p);
                w_frames[k][slot] = real_vec(&w);
            }
        }
        Ok(Self {
            mu,
            v,
            gamma,
            frame_space,
            v_states,
            w_frames,
            p_states,
        })
    }

    pub fn p01(&self, s: usize, w: usize) -> &Amplitudes<T> {
        &self.p_states[pair_index(s, w)][0]
    }

    pub fn p10(&self, s: usize, w: usize) -> &Amplitudes<T> {
        &self.p_states[pair_index(s, w)][1]
    }

    pub fn vac(&self, s: usize, w: usize) -> &Amplitudes<T> {
        &self.v_states[pair_index(s, w)]
    }

    pub fn max_residual(&self) -> T {
        let g = self.gamma;
        let sv = self.v.sqrt();
        let mut worst = T::zero();
        let mut check = |got: Complex<T>, want: T| {
            worst = worst.max((got - re(want)).norm());
        };
        for s in 0..2 {
            for w in 0..2 {
                let v0 = self.vac(s, w);
                check(inner(v0, v0), T::one());
                check(inner(v0, self.vac(1 - s, w)), g);
                check(inner(v0, self.vac(s, 1 - w)), g);
                check(inner(v0, self.vac(1 - s, 1 - w)), g * g);
                check(inner(self.p01(s, w), self.p10(s, w)), self.v);
                check(inner(v0, self.p01(s, w)), sv);
                check(inner(v0, self.p10(s, w)), sv);
                let [w01, w10] = &self.w_frames[pair_index(s, w)];
                check(inner(w01, w10), T::zero());
                check(inner(w01, w01), T::one());
                check(inner(w10, w10), T::one());
                if self.frame_space == FrameSpace::OrthogonalComplement {
                    for vv in &self.v_states {
                        check(inner(vv, w01), T::zero());
                        check(inner(vv, w10), T::zero());
                    }
                }
            }
        }
        worst
    }

    /// Largest deviation of all sixteen cross-pair visibilities from `V`.
    pub fn max_visibility_defect(&self) -> T {
        let mut worst = T::zero();
        for k in 0..4 {
            for l in 0..4 {
                let x = (inner(&self.v_states[k], &self.p_states[k][0])
                    * inner(&self.p_states[l][1], &self.v_states[l]))
                .re;
                worst = worst.max((x - self.v).abs());
            }
        }
        worst
    }

    fn psi2(&self, s: usize, w: usize, b: usize) -> ProductSum<T> {
        let sign_b = if b == 0 { T::one() } else { -T::one() };
        let one = [re(T::one())];
        ProductSum::new()
            .with(re(sgn(SIGNS[s])), self.p10(s, w), &one)
            .with(re(sign_b * sgn(SIGNS[w])), self.p01(s, w), &one)
    }

    #[allow(clippy::too_many_arguments)]
    fn psi4(&self, s: usize, w: usize, s2: usize, w2: usize, b: usize) -> ProductSum<T> {
        let sign_b = if b == 0 { T::one() } else { -T::one() };
        ProductSum::new()
            .with(re(sgn(SIGNS[w])), self.p01(s, w), self.vac(s2, w2))
            .with(re(sign_b * sgn(SIGNS[s2])), self.vac(s, w), self.p10(s2, w2))
    }

    /// Two-pulse case: `(A=0, A=1, B=0, B=1)`, 10-dimensional.
    pub fn two_pulse_ensembles(&self) -> [Ensemble<T>; 4] {
        let mut out: [Ensemble<T>; 4] = Default::default();
        let wt = T::c(0.125);
        for s in 0..2 {
            for w in 0..2 {
                for b in 0..2 {
                    let psi = self.psi2(s, w, b);
                    // Alice's bit is the phase difference of the two pulses.
                    let a = usize::from(s != w);
                    out[a].push(wt, psi.clone());
                    out[2 + b].push(wt, psi);
                }
            }
        }
        out
    }

    /// Four-pulse case: `(A=0, A=1, B=0, B=1)`, 100-dimensional.
    pub fn four_pulse_ensembles(&self) -> [Ensemble<T>; 4] {
        let mut out: [Ensemble<T>; 4] = Default::default();
        let wt = T::c(1.0 / 32.0);
        for s in 0..2 {
            for w in 0..2 {
                for s2 in 0..2 {
                    for w2 in 0..2 {
                        for b in 0..2 {
                            let psi = self.psi4(s, w, s2, w2, b);
                            let a = usize::from(w != s2);
                            out[a].push(wt, psi.clone());
                            out[2 + b].push(wt, psi);
                        }
                    }
                }
            }
        }
        out
    }

    /// Dense conditioned states: two-pulse `(A0, A1, B0, B1)` then four-pulse.
    pub fn conditioned_states(&self) -> Result<Vec<DensityMatrix<T>>> {
        self.two_pulse_ensembles()
            .iter()
            .chain(self.four_pulse_ensembles().iter())
            .map(|e| e.density_matrix())
            .collect()
    }

    pub fn chi(&self) -> Result<DpsChiPair<T>> {
        let [a0, a1, b0, b1] = self.two_pulse_ensembles();
        let [c0, c1, d0, d1] = self.four_pulse_ensembles();
        Ok(DpsChiPair::from_cases(
            holevo_ensembles(&a0, &a1)?,
            holevo_ensembles(&b0, &b1)?,
            holevo_ensembles(&c0, &c1)?,
            holevo_ensembles(&d0, &d1)?,
        ))
    }
}

pub fn dps2pa_chi<T: Real>(attack: &Dps2paAttack<T>) -> Result<DpsChiPair<T>> {
    let residual = attack.max_residual();
    if residual > T::c(1e-10).max(T::c(T::TRACE_TOL)) {
        return Err(BoundsError::InvalidState(format!(
            "2PA constraints violated by {residual}"
        )));
    }
    attack.chi()
}

#[derive(Debug, Clone, Serialize)]
pub struct Dps2paSearch {
    pub frame_space: FrameSpace,
    pub config: OptConfig,
    /// Extra start points, typically the optimum at a neighbouring `mu`.
    pub warm_starts: Vec<Vec<f64>>,
}

impl Dps2paSearch {
    pub fn new(config: OptConfig) -> Self {
        Self {
            frame_space: FrameSpace::default(),
            config,
            warm_starts: Vec::new(),
        }
    }
}

/// 16 random starts in `[-1, 1]` per raw coordinate.
pub fn dps2pa_default_config(seed: u64) -> OptConfig {
    OptConfig {
        n_starts: 16,
        seed,
        max_evals: 6_000,
        f_tol: 1e-7,
        x_tol: 1e-6,
        start_box: (-1.0, 1.0),
        initial_step: 0.3,
        max_restarts: 6,
        include_origin: false,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Dps2paOptimum<T> {
    pub chi: DpsChiPair<T>,
    pub raw: Vec<T>,
    pub r0: T,
    pub n_evals: usize,
    pub converged: bool,
    pub start_index: usize,
}

impl<T: Real> Dps2paOptimum<T> {
    pub fn attack(&self, mu: T, v: T, frame_space: FrameSpace) -> Result<Dps2paAttack<T>> {
        Dps2paAttack::from_raw(mu, v, frame_space, &self.raw)
    }
}

/// Maximises `min(chi_AE, chi_BE)` over the frame family.
///
/// At `V = 1` the frames carry no weight and one evaluation suffices.
pub fn dps2pa_optimize<T: Real>(mu: T, v: T, search: &Dps2paSearch) -> Result<Dps2paOptimum<T>> {
    check_mu_v(mu, v)?;
    let config = &search.config;
    config.validate()?;
    let dim = search.frame_space.n_params();
    for w in &search.warm_starts {
        if w.len() != dim {
            return Err(BoundsError::DimensionMismatch {
                expected: dim,
                found: w.len(),
            });
        }
    }
    let valid = |x: &[T]| Dps2paAttack::from_raw(mu, v, search.frame_space, x).is_ok();
    // A start whose raw vectors collapse under projection is redrawn from a
    // later stream.
    let mut starts: Vec<Vec<T>> = Vec::with_capacity(config.n_starts + search.warm_starts.len());
    let mut stream = 0usize;
    while starts.len() < config.n_starts {
        let x = config.start_point::<T>(stream, dim);
        stream += 1;
        if valid(&x) {
            starts.push(x);
        }
        if stream > 1000 * config.n_starts {
            return Err(BoundsError::InvalidConfig("cannot draw valid frame starts".into()));
        }
    }
    starts.extend(
        search
            .warm_starts
            .iter()
            .map(|w| w.iter().map(|&x| T::c(x)).collect::<Vec<T>>())
            .filter(|x| valid(x)),
    );

    if v == T::one() {
        let attack = Dps2paAttack::from_raw(mu, v, search.frame_space, &starts[0])?;
        let chi = dps2pa_chi(&attack)?;
        return Ok(Dps2paOptimum {
            r0: dps_rate0(mu, v, &chi),
            chi,
            raw: starts.swap_remove(0),
            n_evals: 1,
            converged: true,
            start_index: 0,
        });
    }

    let objective = |x: &[T]| {
        Dps2paAttack::from_raw(mu, v, search.frame_space, x)
            .and_then(|a| a.chi())
            .map(|c| c.min())
            .unwrap_or(T::neg_infinity())
    };
    let best: OptResult<T> = maximize_from(objective, &starts, config)?;
    let attack = Dps2paAttack::from_raw(mu, v, search.frame_space, &best.best_x)?;
    let chi = dps2pa_chi(&attack)?;
    Ok(Dps2paOptimum {
        r0: dps_rate0(mu, v, &chi),
        chi,
        raw: best.best_x,
        n_evals: best.n_evals,
        converged: best.converged,
        start_index: best.start_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsa::chi_bsa_limit;
    use crate::quantum::holevo_binary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_raw(rng: &mut ChaCha8Rng, fs: FrameSpace) -> Vec<f64> {
        (0..fs.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn one_pulse_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let params: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
            let mu = rng.gen_range(0.01..2.0);
            let v = rng.gen_range(0.5..1.0);
            let a = Dps1paAttack::new(mu, v, params).unwrap();
            assert!(a.max_residual() < 1e-10);
        }
    }

    #[test]
    fn one_pulse_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let params: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
            let v = rng.gen_range(0.5..1.0);
            let a = Dps1paAttack::new(0.3, v, params).unwrap();
            for x in 0..2 {
                for b in 0..2 {
                    let want = if x == b { (1.0 + v) / 2.0 } else { (1.0 - v) / 2.0 };
                    assert!((a.joint_ensemble(x, b).trace() - want).abs() < 1e-12);
                }
            }
            for rho in a.conditioned_states().unwrap() {
                assert!((rho.trace() - 1.0).abs() < 1e-10);
                assert!(rho.min_eigenvalue() > -1e-9);
            }
        }
    }

    #[test]
    fn one_pulse_reduces_to_bsa() {
        for mu in [0.1f64, 0.2808, 0.5] {
            let want = chi_bsa_limit(Protocol::Dps, mu).unwrap();
            let c = dps1pa_chi(mu, 1.0, [0.0; 6]).unwrap();
            assert!((c.chi_ae - want).abs() < 1e-10 && (c.chi_be - want).abs() < 1e-10);
            let a = Dps1paAttack::new(mu, 1.0, [0.0; 6]).unwrap();
            let rho = a.conditioned_states().unwrap();
            let dense = holevo_binary(&rho[0], &rho[1]).unwrap();
            assert!((dense - want).abs() < 1e-8);
        }
    }

    #[test]
    fn one_pulse_optimum() {
        let opt = dps1pa_optimize(0.2808f64, 0.95, &dps1pa_default_config(0)).unwrap();
        assert!((opt.full_min_chi - opt.reduced_min_chi).abs() < 1e-5);
        assert!((opt.chi.min() - 0.6813047).abs() < 1e-5, "{}", opt.chi.min());
        assert!(opt.chi.chi_ae <= opt.chi.chi_be + 1e-6);
        let at_one = dps1pa_optimize(0.2808f64, 1.0, &dps1pa_default_config(0)).unwrap();
        assert!((at_one.r0 - 0.1182).abs() < 1e-4);
    }

    #[test]
    fn rate_examples() {
        let chi = DpsChiPair::single(0.5791f64, 0.5791);
        assert!((dps_rate0(0.2808, 1.0, &chi) - 0.1182).abs() < 1e-4);
        assert!(dps_rate0(0.2808, 0.99, &DpsChiPair::single(1.0f64, 1.0)) < 0.0);
        let pair = DpsChiPair::from_cases(0.3f64, 0.4, 0.5, 0.7);
        assert!((pair.chi_ae - 0.4).abs() < 1e-12 && (pair.chi_be - 0.55).abs() < 1e-12);
    }

    #[test]
    fn two_pulse_constraints_and_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for fs in [FrameSpace::FullAmbient, FrameSpace::OrthogonalComplement] {
            for _ in 0..5 {
                let mu = rng.gen_range(0.05..1.0);
                let v = rng.gen_range(0.8..1.0);
                let a = Dps2paAttack::from_raw(mu, v, fs, &random_raw(&mut rng, fs)).unwrap();
                assert!(a.max_residual() < 1e-10);
                assert!(a.max_visibility_defect() < 1e-10);
                for e in a.two_pulse_ensembles().iter().chain(a.four_pulse_ensembles().iter()) {
                    assert!((e.trace() - 1.0).abs() < 1e-10);
                }
            }
        }
        let a = Dps2paAttack::from_raw(0.3, 0.9, FrameSpace::FullAmbient, &random_raw(&mut rng, FrameSpace::FullAmbient)).unwrap();
        let rho = a.conditioned_states().unwrap();
        assert_eq!(rho[4].dim(), 100);
        for r in &rho {
            assert!((r.trace() - 1.0).abs() < 1e-8 && r.min_eigenvalue() > -1e-9);
        }
        let c = a.chi().unwrap();
        let dense = holevo_binary(&rho[4], &rho[5]).unwrap();
        assert!((dense - c.chi4_ae).abs() < 1e-8);
    }

    #[test]
    fn two_pulse_degenerate_frame_rejected() {
        let raw = vec![0.0; FrameSpace::FullAmbient.n_params()];
        assert!(Dps2paAttack::from_raw(0.3f64, 0.9, FrameSpace::FullAmbient, &raw).is_err());
    }

    #[test]
    fn two_pulse_reduces_to_bsa() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for mu in [0.1f64, 0.2808, 0.5] {
            let want = chi_bsa_limit(Protocol::Dps, mu).unwrap();
            let raw = random_raw(&mut rng, FrameSpace::FullAmbient);
            let a = Dps2paAttack::from_raw(mu, 1.0, FrameSpace::FullAmbient, &raw).unwrap();
            let c = dps2pa_chi(&a).unwrap();
            assert!((c.min() - want).abs() < 1e-6, "mu={mu}: {} vs {want}", c.min());
        }
        let opt = dps2pa_optimize(0.2808f64, 1.0, &Dps2paSearch::new(dps2pa_default_config(0))).unwrap();
        assert!((opt.r0 - 0.1182).abs() < 1e-4);
    }
}
