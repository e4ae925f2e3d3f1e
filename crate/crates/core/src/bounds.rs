//! Asymptotic key-rate coefficient `r0` for every (protocol, attack) pair,
//! and its maximisation over the mean photon number.
//!
//! Attacks with a closed form are evaluated directly. Attacks that need a
//! numerical search over Eve's states run a cheap warm-started search at
//! every `mu` visited by the scalar search and the full multi-start search
//! at the final `mu`.

use serde::Serialize;

use crate::bsa::{chi_bsa_limit, MU_MAX, MU_MIN};
use crate::channel::{Attack, PairingBy, Protocol, ProtocolConfig};
use crate::cow::{
    cow2pa_chi, cow2pa_feasible, cowm1_default_config, cowm1_optimize_from, cowm2_chi,
    cowm2_feasible, rate0,
};
use crate::dps::{
    dps1pa_default_config, dps1pa_optimize, dps1pa_optimize_reduced, dps2pa_default_config,
    dps2pa_optimize, dps_rate0, DpsChiPair, Dps2paSearch, FrameSpace,
};
use crate::error::{BoundsError, Result};
use crate::optim::{maximize_scalar, OptConfig, ScalarSearch};

/// Eve's information and the resulting `r0` at one `(mu, Q, V)`.
#[derive(Debug, Clone, Serialize)]
pub struct AttackEvaluation {
    pub protocol: Protocol,
    pub attack: Attack,
    pub mu: f64,
    pub q: f64,
    pub v: f64,
    pub chi_ae: f64,
    pub chi_be: f64,
    /// Signed coefficient of `t eta` in the long-distance rate.
    pub r0_raw: f64,
    /// `(mu, V)` lies in the region where the closed-form bound leaves a key;
    /// for numerical attacks, `r0_raw > 0`.
    pub feasible: bool,
    pub converged: bool,
    pub n_evals: usize,
    /// Eve's best parameters, when found numerically.
    pub params: Vec<f64>,
}

impl AttackEvaluation {
    /// `r0` clamped at zero, as reported.
    pub fn r0(&self) -> f64 {
        self.r0_raw.max(0.0)
    }

    pub fn chi_min(&self) -> f64 {
        self.chi_ae.min(self.chi_be)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackOptions {
    pub pairing_by: PairingBy,
    /// Scalar search over `mu` for closed-form attacks.
    pub mu_search: ScalarSearch,
    /// Scalar search over `mu` when each point needs a numerical search.
    pub numeric_mu_search: ScalarSearch,
    pub cowm1: OptConfig,
    pub dps1pa: OptConfig,
    pub dps2pa: OptConfig,
    pub frame_space: FrameSpace,
    /// Random starts added to the warm start at intermediate `mu` values.
    pub scan_starts: usize,
    /// Evaluation budget per start at intermediate `mu` values.
    pub scan_evals: usize,
}

impl AttackOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            pairing_by: PairingBy::Alice,
            mu_search: ScalarSearch::default(),
            numeric_mu_search: ScalarSearch {
                grid_points: 16,
                log_spaced: true,
                tol: 1e-3,
            },
            cowm1: cowm1_default_config(seed),
            dps1pa: dps1pa_default_config(seed),
            dps2pa: dps2pa_default_config(seed),
            frame_space: FrameSpace::default(),
            scan_starts: 2,
            scan_evals: 2_000,
        }
    }

    pub fn seed(&self) -> u64 {
        self.cowm1.seed
    }

    pub fn validate(&self) -> Result<()> {
        self.cowm1.validate()?;
        self.dps1pa.validate()?;
        self.dps2pa.validate()?;
        if self.scan_evals == 0 {
            return Err(BoundsError::InvalidConfig("scan_evals must be positive".into()));
        }
        Ok(())
    }
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

/// Checks the pair is analysed and returns the configuration it runs under.
pub fn check_combination(protocol: Protocol, attack: Attack) -> Result<()> {
    let ok = matches!(
        (protocol, attack),
        (Protocol::Cow, Attack::Bsa | Attack::TwoPulse)
            | (Protocol::CowM1, Attack::TwoPulse)
            | (Protocol::CowM2, Attack::OnePulse)
            | (Protocol::Dps, Attack::Bsa | Attack::OnePulse | Attack::TwoPulse)
    );
    if ok {
        Ok(())
    } else {
        Err(BoundsError::InvalidConfig(format!(
            "no {attack} analysis for {protocol}"
        )))
    }
}

/// Protocol configuration at `mu`; DPS ignores `q` and uses `(1 - V)/2`.
pub fn protocol_config(
    protocol: Protocol,
    mu: f64,
    q: f64,
    v: f64,
    pairing_by: PairingBy,
) -> Result<ProtocolConfig<f64>> {
    let cfg = match protocol {
        Protocol::Dps => ProtocolConfig::dps(mu, v)?,
        p => ProtocolConfig::cow(p, mu, q, v)?,
    };
    Ok(cfg.with_pairing(pairing_by))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Effort {
    Scan,
    Full,
}

fn config_for_scan(base: &OptConfig, opts: &AttackOptions) -> OptConfig {
    OptConfig {
        n_starts: opts.scan_starts.max(1),
        max_evals: opts.scan_evals,
        ..base.clone()
    }
}

fn starts_with_warm(cfg: &OptConfig, dim: usize, warm: &Option<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut starts: Vec<Vec<f64>> = (0..cfg.n_starts).map(|i| cfg.start_point(i, dim)).collect();
    if let Some(w) = warm {
        if w.len() == dim {
            starts.push(w.clone());
        }
    }
    starts
}

fn evaluate(
    cfg: &ProtocolConfig<f64>,
    attack: Attack,
    opts: &AttackOptions,
    effort: Effort,
    warm: &mut Option<Vec<f64>>,
) -> Result<AttackEvaluation> {
    cfg.validate()?;
    check_combination(cfg.protocol, attack)?;
    let (mu, q, v) = (cfg.mu, cfg.q, cfg.v);
    let pairing = cfg.pairing_by;
    let base = |chi_ae: f64, chi_be: f64, r0_raw: f64, feasible: bool| AttackEvaluation {
        protocol: cfg.protocol,
        attack,
        mu,
        q,
        v,
        chi_ae,
        chi_be,
        r0_raw,
        feasible,
        converged: true,
        n_evals: 0,
        params: Vec::new(),
    };

    let dps_eval = |chi: &DpsChiPair<f64>, feasible_hint: Option<bool>| {
        let r0 = dps_rate0(mu, v, chi);
        base(chi.chi_ae, chi.chi_be, r0, feasible_hint.unwrap_or(r0 > 0.0))
    };

    match (cfg.protocol, attack) {
        (p, Attack::Bsa) => {
            if q != 0.0 || v != 1.0 {
                return Err(BoundsError::InvalidConfig(
                    "the beam-splitting attack introduces no errors: use Q = 0, V = 1".into(),
                ));
            }
            let chi = chi_bsa_limit(p, mu)?;
            let r0 = rate0(p, pairing, mu, q, chi);
            Ok(base(chi, chi, r0, true))
        }
        (Protocol::Cow, _) => {
            let chi = cow2pa_chi(mu, q, v)?;
            let r0 = rate0(Protocol::Cow, pairing, mu, q, chi);
            Ok(base(chi, chi, r0, cow2pa_feasible(mu, v)))
        }
        (Protocol::CowM2, _) => {
            let chi = cowm2_chi(mu, q, v)?;
            let r0 = rate0(Protocol::CowM2, pairing, mu, q, chi);
            Ok(base(chi, chi, r0, cowm2_feasible(mu, v)))
        }
        (Protocol::CowM1, _) => {
            let oc = match effort {
                Effort::Full => opts.cowm1.clone(),
                Effort::Scan => config_for_scan(&opts.cowm1, opts),
            };
            let starts = starts_with_warm(&oc, 3, warm);
            let opt = cowm1_optimize_from(mu, q, v, &starts, &oc)?;
            let params = opt.params.to_vec();
            *warm = Some(params.clone());
            let r0 = rate0(Protocol::CowM1, pairing, mu, q, opt.chi);
            Ok(AttackEvaluation {
                converged: opt.search.converged,
                n_evals: opt.search.n_evals,
                params,
                ..base(opt.chi, opt.chi, r0, r0 > 0.0)
            })
        }
        (Protocol::Dps, Attack::OnePulse) => match effort {
            Effort::Full => {
                let opt = dps1pa_optimize(mu, v, &opts.dps1pa)?;
                *warm = Some(vec![opt.params[0], opt.params[2]]);
                Ok(AttackEvaluation {
                    converged: opt.converged,
                    n_evals: opt.n_evals,
                    params: opt.params.to_vec(),
                    ..dps_eval(&opt.chi, None)
                })
            }
            Effort::Scan => {
                let oc = config_for_scan(&opts.dps1pa, opts);
                let starts = starts_with_warm(&oc, 2, warm);
                let r = dps1pa_optimize_reduced(mu, v, &starts, &oc)?;
                let chi = crate::dps::Dps1paAttack::reduced(mu, v, r.best_x[0], r.best_x[1])?.chi()?;
                *warm = Some(r.best_x.clone());
                Ok(AttackEvaluation {
                    converged: r.converged,
                    n_evals: r.n_evals,
                    params: r.best_x,
                    ..dps_eval(&chi, None)
                })
            }
        },
        (Protocol::Dps, _) => {
            let mut search = Dps2paSearch::new(match effort {
                Effort::Full => opts.dps2pa.clone(),
                Effort::Scan => config_for_scan(&opts.dps2pa, opts),
            });
            search.frame_space = opts.frame_space;
            if let Some(w) = warm.as_ref() {
                if w.len() == opts.frame_space.n_params() {
                    search.warm_starts.push(w.clone());
                }
            }
            let opt = dps2pa_optimize(mu, v, &search)?;
            *warm = Some(opt.raw.clone());
            Ok(AttackEvaluation {
                converged: opt.converged,
                n_evals: opt.n_evals,
                params: opt.raw.clone(),
                ..dps_eval(&opt.chi, None)
            })
        }
    }
}

/// Full evaluation of `attack` at the configuration's `mu`.
pub fn evaluate_attack(
    cfg: &ProtocolConfig<f64>,
    attack: Attack,
    opts: &AttackOptions,
) -> Result<AttackEvaluation> {
    evaluate(cfg, attack, opts, Effort::Full, &mut None)
}

/// Result of maximising `r0` over the mean photon number.
#[derive(Debug, Clone, Serialize)]
pub struct KeyRateResult {
    pub mu_opt: f64,
    pub evaluation: AttackEvaluation,
    /// `r0` still increased at the upper end of the `mu` range.
    pub saturated: bool,
    /// Objective evaluations summed over the scalar search and the final point.
    pub n_evals: usize,
}

impl KeyRateResult {
    pub fn r0(&self) -> f64 {
        self.evaluation.r0()
    }

    pub fn r0_raw(&self) -> f64 {
        self.evaluation.r0_raw
    }
}

/// Maximises `r0` over `mu in [MU_MIN, MU_MAX]`.
pub fn optimize_mu(
    protocol: Protocol,
    attack: Attack,
    q: f64,
    v: f64,
    opts: &AttackOptions,
) -> Result<KeyRateResult> {
    opts.validate()?;
    check_combination(protocol, attack)?;
    protocol_config(protocol, 1.0, q, v, opts.pairing_by)?;
    let numeric = matches!(
        (protocol, attack),
        (Protocol::CowM1, _) | (Protocol::Dps, Attack::OnePulse | Attack::TwoPulse)
    );
    // At V = 1 the DPS frames carry no weight: the closed-form path suffices.
    let numeric = numeric && !(protocol == Protocol::Dps && v == 1.0 && attack == Attack::TwoPulse);
    let (search, effort) = if numeric {
        (opts.numeric_mu_search, Effort::Scan)
    } else {
        (opts.mu_search, Effort::Full)
    };

    let mut warm: Option<Vec<f64>> = None;
    let mut inner_evals = 0usize;
    let mut failure: Option<BoundsError> = None;
    let r = maximize_scalar(
        |mu| {
            let cfg = match protocol_config(protocol, mu, q, v, opts.pairing_by) {
                Ok(c) => c,
                Err(e) => {
                    failure.get_or_insert(e);
                    return f64::NEG_INFINITY;
                }
            };
            match evaluate(&cfg, attack, opts, effort, &mut warm) {
                Ok(e) => {
                    inner_evals += e.n_evals;
                    e.r0_raw
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        MU_MIN,
        MU_MAX,
        &search,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let cfg = protocol_config(protocol, r.x, q, v, opts.pairing_by)?;
    let evaluation = if numeric {
        evaluate(&cfg, attack, opts, Effort::Full, &mut warm)?
    } else {
        evaluate(&cfg, attack, opts, Effort::Full, &mut None)?
    };
    let n_evals = inner_evals + evaluation.n_evals + r.n_evals;
    Ok(KeyRateResult {
        mu_opt: r.x,
        evaluation,
        saturated: r.saturated,
        n_evals,
    })
}

/// `min(chi_AE, chi_BE)` at `V = 1` for the DPS attacks equals the
/// beam-splitting value; exposed for diagnostics.
pub fn dps_bsa_chi(mu: f64) -> Result<f64> {
    chi_bsa_limit(Protocol::Dps, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations() {
        assert!(check_combination(Protocol::Cow, Attack::TwoPulse).is_ok());
        assert!(check_combination(Protocol::Cow, Attack::OnePulse).is_err());
        assert!(check_combination(Protocol::CowM2, Attack::TwoPulse).is_err());
        assert!(check_combination(Protocol::Dps, Attack::OnePulse).is_ok());
    }

    #[test]
    fn closed_form_coincidence_at_unit_visibility() {
        let opts = AttackOptions::default();
        for (p, a) in [
            (Protocol::Cow, Attack::TwoPulse),
            (Protocol::CowM2, Attack::OnePulse),
            (Protocol::Cow, Attack::Bsa),
        ] {
            let r = optimize_mu(p, a, 0.0, 1.0, &opts).unwrap();
            assert!((r.r0() - 0.0714).abs() < 1e-4, "{p} {a}: {}", r.r0());
            assert!((r.mu_opt - 0.4583).abs() < 2e-3);
        }
        let r = optimize_mu(Protocol::Dps, Attack::TwoPulse, 0.0, 1.0, &opts).unwrap();
        assert!((r.r0() - 0.1182).abs() < 1e-4 && (r.mu_opt - 0.2808).abs() < 2e-3);
    }

    #[test]
    fn bsa_needs_error_free_channel() {
        let cfg = protocol_config(Protocol::Cow, 0.4, 0.01, 1.0, PairingBy::Alice).unwrap();
        assert!(evaluate_attack(&cfg, Attack::Bsa, &AttackOptions::default()).is_err());
    }

    #[test]
    fn bob_pairing_halves_cowm2() {
        let mut opts = AttackOptions::default();
        let a = optimize_mu(Protocol::CowM2, Attack::OnePulse, 0.0, 0.98, &opts).unwrap();
        opts.pairing_by = PairingBy::Bob;
        let b = optimize_mu(Protocol::CowM2, Attack::OnePulse, 0.0, 0.98, &opts).unwrap();
        assert!((a.r0() - 2.0 * b.r0()).abs() < 1e-9);
    }

    #[test]
    fn infeasible_rows_clamp() {
        let cfg = protocol_config(Protocol::Cow, 1.5, 0.0, 0.8, PairingBy::Alice).unwrap();
        let e = evaluate_attack(&cfg, Attack::TwoPulse, &AttackOptions::default()).unwrap();
        assert!(!e.feasible && e.r0_raw <= 0.0 && e.r0() == 0.0);
    }
}
