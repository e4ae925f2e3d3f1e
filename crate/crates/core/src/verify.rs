//! Self-checks: closed forms against brute-force searches, threshold
//! behaviour, state normalisation and the reference constants.
//!
//! A failing check is recorded in the report, never returned as an error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::AttackOptions;
use crate::bsa::{chi_bsa_limit, optimize_bsa, MU_MAX};
use crate::channel::{Attack, ChannelModel, Protocol};
use crate::cow::{
    cow2pa_chi, cow2pa_decoy_completion, cow2pa_feasible, cow2pa_min_overlap, cow2pa_rate0,
    cowm1_build_states, cowm1_chi, cowm2_feasible, cowm2_min_overlap, cowm2_rate0, CowM2Attack,
    CowTwoPulseAttack,
};
use crate::dps::{dps1pa_chi, dps2pa_chi, Dps1paAttack, Dps2paAttack, FrameSpace};
use crate::error::Result;
use crate::optim::{oracle_config, oracle_min_overlap_cow2pa, oracle_min_overlap_cowm2, OptConfig, ScalarSearch};
use crate::quantum::DensityMatrix;
use crate::sweep::{run_rate_vs_distance, write_rate_vs_distance, OutputFormat, Range, RateVsDistanceRequest};
use crate::variants::{optimize_z_channel, z_channel_rate};

pub const COW_BSA_MU: f64 = 0.4583;
pub const COW_BSA_R0: f64 = 0.0714;
pub const DPS_BSA_MU: f64 = 0.2808;
pub const DPS_BSA_R0: f64 = 0.1182;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRequest {
    pub seed: u64,
    /// Points per axis of the `(mu, V)` oracle grids.
    pub grid: usize,
    /// Random parameter points per normalisation suite.
    pub trace_points: usize,
    pub oracle: OptConfig,
}

impl Default for VerifyRequest {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

impl VerifyRequest {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            grid: 20,
            trace_points: 50,
            oracle: OptConfig {
                n_starts: 16,
                ..oracle_config(seed)
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Largest discrepancy found; compared against `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {:<28} measured={:.3e} tol={:.1e} ({:.1}s) {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.seconds,
                c.detail
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }
}

/// Measured discrepancy plus a human-readable location of the worst case.
type Outcome = Result<(f64, String)>;

fn run_check(name: &str, tolerance: f64, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (measured, passed, detail) = match f() {
        Ok((m, d)) => (m, m <= tolerance, d),
        Err(e) => (f64::NAN, false, format!("error: {e}")),
    };
    Check {
        name: name.to_string(),
        measured,
        tolerance,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Keeps the largest value and where it occurred.
fn worst(items: impl IntoIterator<Item = Result<(f64, String)>>) -> Outcome {
    let mut best = (f64::NEG_INFINITY, String::from("no points"));
    for item in items {
        let (m, d) = item?;
        if m.is_nan() {
            return Ok((f64::NAN, d));
        }
        if m > best.0 {
            best = (m, d);
        }
    }
    Ok(best)
}

pub fn run_verify(req: &VerifyRequest) -> VerifyReport {
    let checks = vec![
        run_check("bsa_cow_mu_opt", 2e-3, || bsa_check(Protocol::Cow, true)),
        run_check("bsa_cow_r0", 7e-4, || bsa_check(Protocol::Cow, false)),
        run_check("bsa_dps_mu_opt", 2e-3, || bsa_check(Protocol::Dps, true)),
        run_check("bsa_dps_r0", 1.2e-3, || bsa_check(Protocol::Dps, false)),
        run_check("oracle_cow_two_pulse", 1e-6, || oracle_cow2pa_grid(req)),
        run_check("oracle_cowm2_one_pulse", 1e-6, || oracle_cowm2_grid(req)),
        run_check("threshold_cow_overlap", 1e-9, || threshold_cow2pa(req.grid, false)),
        run_check("threshold_cow_rate", 0.0, || threshold_cow2pa(req.grid, true)),
        run_check("threshold_cowm2_overlap", 1e-9, || threshold_cowm2(req.grid, false)),
        run_check("threshold_cowm2_rate", 0.0, || threshold_cowm2(req.grid, true)),
        run_check("decoy_completion", 1e-10, || decoy_residuals(req.grid)),
        run_check("cowm1_unit_visibility", 1e-10, cowm1_unit_visibility),
        run_check("dps_unit_visibility", 1e-6, || dps_unit_visibility(req.seed)),
        run_check("trace_cowm1", 1e-8, || trace_suite(req, Suite::CowM1, false)),
        run_check("psd_cowm1", 1e-9, || trace_suite(req, Suite::CowM1, true)),
        run_check("trace_dps_one_pulse", 1e-8, || trace_suite(req, Suite::Dps1pa, false)),
        run_check("psd_dps_one_pulse", 1e-9, || trace_suite(req, Suite::Dps1pa, true)),
        run_check("trace_dps_two_pulse", 1e-8, || trace_suite(req, Suite::Dps2pa, false)),
        run_check("psd_dps_two_pulse", 1e-9, || trace_suite(req, Suite::Dps2pa, true)),
        run_check("z_channel_slope", 0.01, z_channel_slope_check),
        run_check("z_channel_argmax", 1e-3, z_channel_argmax_check),
        run_check("rate_linearity", 1e-12, linearity_check),
    ];
    VerifyReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: req.seed,
        checks,
    }
}

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

/// Small-transmission optimum against the reference constants.
pub fn bsa_check(protocol: Protocol, mu_part: bool) -> Outcome {
    let (mu_ref, r0_ref) = match protocol {
        Protocol::Dps => (DPS_BSA_MU, DPS_BSA_R0),
        _ => (COW_BSA_MU, COW_BSA_R0),
    };
    let (t, eta) = (1e-4, 0.1);
    let opt = optimize_bsa(protocol, t, eta, &ScalarSearch::default())?;
    let r0 = opt.point.rate / (t * eta);
    Ok(if mu_part {
        ((opt.point.mu - mu_ref).abs(), format!("mu_opt={:.5}", opt.point.mu))
    } else {
        ((r0 - r0_ref).abs(), format!("r0={r0:.5}"))
    })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Smallest `V` leaving a key against the two-pulse attack on COW.
pub fn cow2pa_visibility_threshold(mu: f64) -> f64 {
    let g = (-mu).exp();
    (1.0 + (1.0 - g * g).sqrt()) / 2.0
}

/// Smallest `V` leaving a key against the one-pulse attack on COWm2.
pub fn cowm2_visibility_threshold(mu: f64) -> f64 {
    1.0 - (-mu).exp()
}

/// `n x n` points strictly above the threshold, up to and including `V = 1`.
fn feasible_grid(n: usize, threshold: fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n * n);
    for mu in log_grid(0.02, 2.0, n) {
        let vth = threshold(mu);
        for j in 0..n {
            pts.push((mu, vth + (1.0 - vth) * (j + 1) as f64 / n as f64));
        }
    }
    pts
}

/// `n x n` points from `V = 0` up to just below the threshold.
fn infeasible_grid(n: usize, threshold: fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n * n);
    for mu in log_grid(0.02, 4.0, n) {
        let vth = threshold(mu);
        for j in 0..n {
            pts.push((mu, vth * j as f64 / n as f64));
        }
    }
    pts
}

fn oracle_cow2pa_grid(req: &VerifyRequest) -> Outcome {
    let pts = feasible_grid(req.grid, cow2pa_visibility_threshold);
    let results: Vec<_> = pts
        .par_iter()
        .map(|&(mu, v)| {
            let numeric = oracle_min_overlap_cow2pa(mu, v, &req.oracle)?.best_f;
            let closed = cow2pa_min_overlap(mu, v)?;
            Ok(((numeric - closed).abs(), format!("mu={mu:.4} V={v:.6}")))
        })
        .collect();
    worst(results)
}

fn oracle_cowm2_grid(req: &VerifyRequest) -> Outcome {
    let pts = feasible_grid(req.grid, cowm2_visibility_threshold);
    let results: Vec<_> = pts
        .par_iter()
        .map(|&(mu, v)| {
            let numeric = oracle_min_overlap_cowm2(mu, v, &req.oracle)?.best_f;
            let closed = cowm2_min_overlap(mu, v)?;
            Ok(((numeric - closed).abs(), format!("mu={mu:.4} V={v:.6}")))
        })
        .collect();
    worst(results)
}

/// With `rate = true` the measured value is the largest `r0`, else the
/// largest overlap reached by the full-information parameters.
fn threshold_cow2pa(n: usize, rate: bool) -> Outcome {
    worst(infeasible_grid(n, cow2pa_visibility_threshold).into_iter().map(|(mu, v)| {
        debug_assert!(!cow2pa_feasible(mu, v));
        let m = if rate {
            cow2pa_rate0(mu, 0.0, v)?
        } else {
            CowTwoPulseAttack::full_information(mu, v)?.overlap()
        };
        Ok((m, format!("mu={mu:.4} V={v:.6}")))
    }))
}

fn threshold_cowm2(n: usize, rate: bool) -> Outcome {
    worst(infeasible_grid(n, cowm2_visibility_threshold).into_iter().map(|(mu, v)| {
        debug_assert!(!cowm2_feasible(mu, v));
        let m = if rate {
            cowm2_rate0(mu, 0.0, v)?
        } else {
            CowM2Attack::full_information(mu, v)?.overlap()
        };
        Ok((m, format!("mu={mu:.4} V={v:.6}")))
    }))
}

fn decoy_residuals(n: usize) -> Outcome {
    worst(feasible_grid(n, cow2pa_visibility_threshold).into_iter().map(|(mu, v)| {
        let d = cow2pa_decoy_completion(mu, v)?;
        Ok((d.max_residual(mu, v), format!("mu={mu:.4} V={v:.6}")))
    }))
}

/// At `V = 1` every COWm1 attack gives the COW two-pulse value.
fn cowm1_unit_visibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    worst((0..20).map(|_| {
        let mu = rng.gen_range(0.02..2.0);
        let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
        let got = cowm1_chi(mu, 0.0, 1.0, p)?;
        let want = cow2pa_chi(mu, 0.0, 1.0)?;
        Ok(((got - want).abs(), format!("mu={mu:.4}")))
    }))
}

/// At `V = 1` both DPS attacks give the beam-splitting value for any parameters.
fn dps_unit_visibility(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd95);
    let fs = FrameSpace::FullAmbient;
    worst((0..10).map(|_| {
        let mu = rng.gen_range(0.02..2.0);
        let want = chi_bsa_limit(Protocol::Dps, mu)?;
        let p: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
        let one = dps1pa_chi(mu, 1.0, p)?.min();
        let raw: Vec<f64> = (0..fs.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let two = dps2pa_chi(&Dps2paAttack::from_raw(mu, 1.0, fs, &raw)?)?.min();
        Ok(((one - want).abs().max((two - want).abs()), format!("mu={mu:.4}")))
    }))
}

#[derive(Clone, Copy)]
enum Suite {
    CowM1,
    Dps1pa,
    Dps2pa,
}

fn random_states(suite: Suite, rng: &mut ChaCha8Rng) -> Result<(String, Vec<DensityMatrix<f64>>)> {
    let mu = rng.gen_range(0.02..MU_MAX.min(2.0));
    let v = rng.gen_range(0.5..=1.0);
    let label = format!("mu={mu:.4} V={v:.4}");
    let states = match suite {
        Suite::CowM1 => {
            let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
            let (r0, r1) = cowm1_build_states(mu, v, p[0], p[1], p[2])?.four_pulse_states()?;
            vec![r0, r1]
        }
        Suite::Dps1pa => {
            let p: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
            Dps1paAttack::new(mu, v, p)?.conditioned_states()?
        }
        Suite::Dps2pa => {
            let fs = FrameSpace::FullAmbient;
            let raw: Vec<f64> = (0..fs.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Dps2paAttack::from_raw(mu, v, fs, &raw)?.conditioned_states()?
        }
    };
    Ok((label, states))
}

/// Trace defect (`psd = false`) or negative-eigenvalue magnitude (`psd = true`)
/// over random attacks; each point has its own RNG stream.
fn trace_suite(req: &VerifyRequest, suite: Suite, psd: bool) -> Outcome {
    let results: Vec<_> = (0..req.trace_points)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            rng.set_stream(i as u64 + 1);
            let (label, states) = random_states(suite, &mut rng)?;
            let m = states
                .iter()
                .map(|rho| {
                    if psd {
                        (-rho.min_eigenvalue()).max(0.0)
                    } else {
                        (rho.trace() - 1.0).abs()
                    }
                })
                .fold(0.0, f64::max);
            Ok((m, label))
        })
        .collect();
    worst(results)
}

fn z_channel_slope_check() -> Outcome {
    let x = 1e-4;
    let r = z_channel_rate((-1.0f64).exp(), x, 1.0, 1.0)?;
    let ratio = r.rate / x;
    Ok(((ratio - 0.5307).abs(), format!("rate/(mu t eta)={ratio:.5}")))
}

fn z_channel_argmax_check() -> Outcome {
    let search = ScalarSearch {
        grid_points: 200,
        log_spaced: false,
        tol: 1e-9,
    };
    let opt = optimize_z_channel(1e-4, 1.0, 1.0, &search)?;
    Ok(((opt.q - (-1.0f64).exp()).abs(), format!("q_opt={:.6}", opt.q)))
}

/// Writes a rate-vs-distance CSV, reads it back and checks `rate / (t eta)`
/// is constant along every attack series.
fn linearity_check() -> Outcome {
    let channel = ChannelModel::default();
    let req = RateVsDistanceRequest {
        targets: vec![(Protocol::Cow, Attack::TwoPulse), (Protocol::CowM2, Attack::OnePulse)],
        q: 0.0,
        v: 0.98,
        distances_km: Range::new(0.0, 12.5, 200.0)?,
        channel,
        options: AttackOptions::default(),
        include_bsa: false,
    };
    let rows = run_rate_vs_distance(&req)?;
    let mut buf = Vec::new();
    write_rate_vs_distance(&mut buf, &req, &rows, OutputFormat::Csv)?;
    linearity_of_csv(&buf, &channel)
}

/// Largest relative spread of `rate / (t eta)` within each attack series of a
/// rate-vs-distance CSV.
pub fn linearity_of_csv(csv_bytes: &[u8], channel: &ChannelModel<f64>) -> Outcome {
    #[derive(Deserialize)]
    struct Row {
        t: f64,
        protocol: String,
        attack: String,
        rate: f64,
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv_bytes);
    let mut first: HashMap<(String, String), f64> = HashMap::new();
    let mut spread = (0.0f64, String::from("no attack rows"));
    for row in reader.deserialize() {
        let row: Row = row?;
        if row.attack == Attack::Bsa.name() || row.t <= 0.0 {
            continue;
        }
        let (t_eff, eta_eff) = channel.effective(row.t);
        let r0 = row.rate / (t_eff * eta_eff);
        let key = (row.protocol.clone(), row.attack.clone());
        let reference = *first.entry(key).or_insert(r0);
        let rel = if reference == 0.0 {
            r0.abs()
        } else {
            ((r0 - reference) / reference).abs()
        };
        if rel > spread.0 || spread.1 == "no attack rows" {
            spread = (rel, format!("{} {} t={:.3e}", row.protocol, row.attack, row.t));
        }
    }
    Ok(spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_are_boundaries() {
        for mu in [0.05, 0.5, 2.0] {
            let v = cow2pa_visibility_threshold(mu);
            assert!(cow2pa_feasible(mu, v + 1e-9) && !cow2pa_feasible(mu, v - 1e-9));
            let v = cowm2_visibility_threshold(mu);
            assert!(cowm2_feasible(mu, v + 1e-9) && !cowm2_feasible(mu, v - 1e-9));
        }
    }

    #[test]
    fn fast_checks_pass() {
        let req = VerifyRequest {
            grid: 4,
            trace_points: 4,
            ..VerifyRequest::default()
        };
        for c in [
            run_check("a", 2e-3, || bsa_check(Protocol::Cow, true)),
            run_check("b", 1e-6, || oracle_cowm2_grid(&req)),
            run_check("c", 1e-9, || threshold_cow2pa(req.grid, false)),
            run_check("d", 0.0, || threshold_cowm2(req.grid, true)),
            run_check("e", 1e-8, || trace_suite(&req, Suite::Dps1pa, false)),
            run_check("f", 1e-12, linearity_check),
        ] {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn failures_are_reported_not_thrown() {
        let c = run_check("x", 1.0, || Err(crate::error::BoundsError::Domain("boom".into())));
        assert!(!c.passed && c.detail.contains("boom"));
        let report = VerifyReport {
            version: "0".into(),
            seed: 0,
            checks: vec![c],
        };
        assert!(!report.passed());
        assert!(report.to_text().contains("FAIL x"));
    }

    #[test]
    fn nonlinear_csv_detected() {
        let channel = ChannelModel::default();
        let csv = "# c\ndistance_km,t,protocol,attack,rate\n0,1,COW,2PA,0.01\n10,0.5,COW,2PA,0.004\n";
        let (m, _) = linearity_of_csv(csv.as_bytes(), &channel).unwrap();
        assert!(m > 0.1);
    }
}
