//! Parameter sweeps and their CSV/JSON serialisation.
//!
//! Every output starts with `#` comment lines holding the full request, so a
//! file can be regenerated byte for byte. Rows come out in a fixed order
//! regardless of how the points were scheduled.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{check_combination, optimize_mu, AttackOptions, KeyRateResult};
use crate::bsa::{bsa_asymptote, optimize_bsa};
use crate::channel::{transmission, Attack, ChannelModel, Protocol};
use crate::error::{BoundsError, Result};
use crate::optim::ScalarSearch;
use crate::variants::{variant_ideal_rate, variant_sifting_rate, VariantId, VariantSpec};

/// Inclusive arithmetic range `lo:step:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub step: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, step: f64, hi: f64) -> Result<Self> {
        let r = Self { lo, step, hi };
        r.validate()?;
        Ok(r)
    }

    pub fn single(x: f64) -> Self {
        Self {
            lo: x,
            step: 1.0,
            hi: x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step > 0.0 && self.step.is_finite()) {
            return Err(BoundsError::InvalidConfig(format!(
                "range {}:{}:{} needs finite ends and a positive step",
                self.lo, self.step, self.hi
            )));
        }
        if self.lo > self.hi {
            return Err(BoundsError::InvalidConfig(format!(
                "empty range {}:{}:{}",
                self.lo, self.step, self.hi
            )));
        }
        Ok(())
    }

    /// Grid points `lo + k step`, computed by multiplication so that the
    /// endpoints are hit exactly when `(hi - lo)/step` is an integer.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| {
                let x = self.lo + k as f64 * self.step;
                // Round away binary noise from decimal steps.
                let scale = 1e12;
                (x * scale).round() / scale
            })
            .map(|x| x.min(self.hi))
            .collect()
    }
}

impl FromStr for Range {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| BoundsError::InvalidConfig(format!("bad number {x:?} in range {s:?}")))
        };
        match parts.as_slice() {
            [x] => Ok(Self::single(parse(x)?)),
            [lo, step, hi] => Self::new(parse(lo)?, parse(step)?, parse(hi)?),
            _ => Err(BoundsError::InvalidConfig(format!(
                "range {s:?} is not lo:step:hi"
            ))),
        }
    }
}

fn write_header<W: Write>(out: &mut W, kind: &str, config: &impl Serialize) -> Result<()> {
    writeln!(out, "# dpr-bounds {} {}", env!("CARGO_PKG_VERSION"), kind)?;
    writeln!(out, "# config {}", serde_json::to_string(config)?)?;
    Ok(())
}

fn write_rows<W: Write, R: Serialize>(out: &mut W, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(BoundsError::InvalidConfig(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Serialize)]
struct JsonDocument<'a, C: Serialize, R: Serialize, M: Serialize> {
    kind: &'a str,
    version: &'a str,
    config: &'a C,
    metadata: &'a M,
    notes: &'a [&'a str],
    rows: &'a [R],
}

fn write_json<W: Write, C: Serialize, R: Serialize, M: Serialize>(
    out: &mut W,
    kind: &str,
    config: &C,
    metadata: &M,
    notes: &[&str],
    rows: &[R],
) -> Result<()> {
    let doc = JsonDocument {
        kind,
        version: env!("CARGO_PKG_VERSION"),
        config,
        metadata,
        notes,
        rows,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Beam-splitting attack versus distance
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BsaScanRequest {
    pub protocols: Vec<Protocol>,
    pub distances_km: Range,
    pub channel: ChannelModel<f64>,
    pub mu_search: ScalarSearch,
}

#[derive(Debug, Clone, Serialize)]
pub struct BsaScanRow {
    pub distance_km: f64,
    pub t: f64,
    pub protocol: Protocol,
    pub mu_opt: f64,
    pub rate: f64,
    pub chi: f64,
    pub saturated: bool,
}

/// Long-distance limit of one protocol: `r ~ r0 t eta` at `mu_opt`.
#[derive(Debug, Clone, Serialize)]
pub struct Asymptote {
    pub protocol: Protocol,
    pub mu_opt: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BsaScan {
    pub rows: Vec<BsaScanRow>,
    pub asymptotes: Vec<Asymptote>,
}

pub fn run_bsa_scan(req: &BsaScanRequest) -> Result<BsaScan> {
    req.distances_km.validate()?;
    for p in &req.protocols {
        check_combination(*p, Attack::Bsa)?;
    }
    let distances = req.distances_km.values();
    let tasks: Vec<(Protocol, f64)> = req
        .protocols
        .iter()
        .flat_map(|p| distances.iter().map(move |d| (*p, *d)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(protocol, d)| {
            let t = transmission(d, &req.channel)?;
            let (t_eff, eta_eff) = req.channel.effective(t);
            let opt = optimize_bsa(protocol, t_eff, eta_eff, &req.mu_search)?;
            Ok(BsaScanRow {
                distance_km: d,
                t,
                protocol,
                mu_opt: opt.point.mu,
                rate: opt.point.rate,
                chi: opt.point.chi,
                saturated: opt.saturated,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let asymptotes = req
        .protocols
        .iter()
        .map(|&p| {
            let (mu_opt, r0) = bsa_asymptote(p, &req.mu_search)?;
            Ok(Asymptote {
                protocol: p,
                mu_opt,
                r0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BsaScan { rows, asymptotes })
}

pub fn write_bsa_scan<W: Write>(
    out: &mut W,
    req: &BsaScanRequest,
    scan: &BsaScan,
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            write_header(out, "bsa-scan", req)?;
            for a in &scan.asymptotes {
                writeln!(
                    out,
                    "# asymptote protocol={} mu_opt={} r0={}",
                    a.protocol, a.mu_opt, a.r0
                )?;
            }
            write_rows(out, &scan.rows)
        }
        OutputFormat::Json => write_json(out, "bsa-scan", req, &scan.asymptotes, &[], &scan.rows),
    }
}

// ---------------------------------------------------------------------------
// Attacks versus visibility
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct AttackScanRequest {
    pub targets: Vec<(Protocol, Attack)>,
    pub qbers: Vec<f64>,
    pub visibilities: Range,
    pub options: AttackOptions,
}

impl AttackScanRequest {
    /// `(protocol, attack, Q, V)` in output order. DPS has one point per `V`
    /// because its error rate is fixed by the visibility.
    pub fn points(&self) -> Vec<(Protocol, Attack, f64, f64)> {
        let vs = self.visibilities.values();
        let mut out = Vec::new();
        for &(p, a) in &self.targets {
            if p == Protocol::Dps {
                out.extend(vs.iter().map(|&v| (p, a, (1.0 - v) / 2.0, v)));
            } else {
                for &q in &self.qbers {
                    out.extend(vs.iter().map(|&v| (p, a, q, v)));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackScanRow {
    pub protocol: Protocol,
    pub attack: Attack,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub mu_opt: f64,
    pub r0: f64,
    pub r0_raw: f64,
    #[serde(rename = "chi_AE")]
    pub chi_ae: f64,
    #[serde(rename = "chi_BE")]
    pub chi_be: f64,
    pub feasible: bool,
    pub converged: bool,
    pub n_evals: usize,
}

impl AttackScanRow {
    fn from_result(p: Protocol, a: Attack, q: f64, v: f64, r: &KeyRateResult) -> Self {
        Self {
            protocol: p,
            attack: a,
            q,
            v,
            mu_opt: r.mu_opt,
            r0: r.r0(),
            r0_raw: r.r0_raw(),
            chi_ae: r.evaluation.chi_ae,
            chi_be: r.evaluation.chi_be,
            feasible: r.evaluation.feasible,
            converged: r.evaluation.converged,
            n_evals: r.n_evals,
        }
    }
}

pub fn run_attack_scan(req: &AttackScanRequest) -> Result<Vec<AttackScanRow>> {
    req.visibilities.validate()?;
    for &(p, a) in &req.targets {
        check_combination(p, a)?;
    }
    req.points()
        .par_iter()
        .map(|&(p, a, q, v)| {
            let r = optimize_mu(p, a, q, v, &req.options)?;
            Ok(AttackScanRow::from_result(p, a, q, v, &r))
        })
        .collect()
}

pub fn write_attack_scan<W: Write>(
    out: &mut W,
    req: &AttackScanRequest,
    rows: &[AttackScanRow],
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            write_header(out, "attack-scan", req)?;
            writeln!(out, "# r0 is the coefficient of t*eta in the long-distance rate; r0 = max(r0_raw, 0)")?;
            write_rows(out, rows)
        }
        OutputFormat::Json => write_json(out, "attack-scan", req, &(), &[], rows),
    }
}

// ---------------------------------------------------------------------------
// Rates versus distance
// ---------------------------------------------------------------------------

pub const LINEAR_REGIME_NOTE: &str =
    "attack rates are r0*t*eta: valid only in the limit of large distances";

#[derive(Debug, Clone, Serialize)]
pub struct RateVsDistanceRequest {
    pub targets: Vec<(Protocol, Attack)>,
    pub q: f64,
    pub v: f64,
    pub distances_km: Range,
    pub channel: ChannelModel<f64>,
    pub options: AttackOptions,
    /// Also emit the full beam-splitting rate for COW and DPS at `V = 1`.
    pub include_bsa: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub distance_km: f64,
    pub t: f64,
    pub protocol: Protocol,
    pub attack: Attack,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub mu: f64,
    pub rate: f64,
    /// `rate / (t eta)` with the effective transmission and efficiency.
    pub rate_over_t_eta: f64,
}

pub fn run_rate_vs_distance(req: &RateVsDistanceRequest) -> Result<Vec<RateRow>> {
    req.distances_km.validate()?;
    for &(p, a) in &req.targets {
        check_combination(p, a)?;
    }
    let distances = req.distances_km.values();
    let optima: Vec<(Protocol, Attack, f64, KeyRateResult)> = req
        .targets
        .par_iter()
        .map(|&(p, a)| {
            let q = if p == Protocol::Dps { (1.0 - req.v) / 2.0 } else { req.q };
            Ok((p, a, q, optimize_mu(p, a, q, req.v, &req.options)?))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (p, a, q, r) in &optima {
        for &d in &distances {
            let t = transmission(d, &req.channel)?;
            let (t_eff, eta_eff) = req.channel.effective(t);
            let r0 = r.r0();
            rows.push(RateRow {
                distance_km: d,
                t,
                protocol: *p,
                attack: *a,
                q: *q,
                v: req.v,
                mu: r.mu_opt,
                rate: r0 * t_eff * eta_eff,
                rate_over_t_eta: r0,
            });
        }
    }
    if req.include_bsa {
        for p in [Protocol::Cow, Protocol::Dps] {
            let bsa_rows = distances
                .par_iter()
                .map(|&d| {
                    let t = transmission(d, &req.channel)?;
                    let (t_eff, eta_eff) = req.channel.effective(t);
                    let opt = optimize_bsa(p, t_eff, eta_eff, &req.options.mu_search)?;
                    Ok(RateRow {
                        distance_km: d,
                        t,
                        protocol: p,
                        attack: Attack::Bsa,
                        q: 0.0,
                        v: 1.0,
                        mu: opt.point.mu,
                        rate: opt.point.rate,
                        rate_over_t_eta: opt.point.rate / (t_eff * eta_eff),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.extend(bsa_rows);
        }
    }
    Ok(rows)
}

pub fn write_rate_vs_distance<W: Write>(
    out: &mut W,
    req: &RateVsDistanceRequest,
    rows: &[RateRow],
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            write_header(out, "rate-vs-distance", req)?;
            writeln!(out, "# {LINEAR_REGIME_NOTE}")?;
            if req.include_bsa {
                writeln!(out, "# BSA rows are the full beam-splitting rate at V=1, Q=0")?;
            }
            write_rows(out, rows)
        }
        OutputFormat::Json => write_json(
            out,
            "rate-vs-distance",
            req,
            &(),
            &[LINEAR_REGIME_NOTE],
            rows,
        ),
    }
}

// ---------------------------------------------------------------------------
// Ideal rates of encoding variants
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct VariantsRequest {
    pub mu: f64,
    /// Non-empty fraction for the Z-channel coding.
    pub z_q: f64,
    pub distances_km: Range,
    pub channel: ChannelModel<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantRow {
    pub distance_km: f64,
    pub t: f64,
    pub variant: VariantId,
    pub mu: f64,
    pub sifting_rate: f64,
    pub ideal_rate: f64,
    /// `ideal_rate / (mu t eta)`.
    pub rate_over_mu_t_eta: f64,
}

pub fn run_variants(req: &VariantsRequest) -> Result<Vec<VariantRow>> {
    req.distances_km.validate()?;
    let mut rows = Vec::new();
    for id in VariantId::ALL {
        let spec = if id == VariantId::ZChannel {
            VariantSpec::z_channel(req.z_q)
        } else {
            VariantSpec::new(id)
        };
        spec.validate()?;
        for d in req.distances_km.values() {
            let t = transmission(d, &req.channel)?;
            let (t_eff, eta_eff) = req.channel.effective(t);
            let ideal = variant_ideal_rate(&spec, req.mu, t_eff, eta_eff)?;
            rows.push(VariantRow {
                distance_km: d,
                t,
                variant: id,
                mu: req.mu,
                sifting_rate: variant_sifting_rate(&spec, req.mu, t_eff, eta_eff)?,
                ideal_rate: ideal,
                rate_over_mu_t_eta: ideal / (req.mu * t_eff * eta_eff),
            });
        }
    }
    Ok(rows)
}

pub fn write_variants<W: Write>(
    out: &mut W,
    req: &VariantsRequest,
    rows: &[VariantRow],
    format: OutputFormat,
) -> Result<()> {
    let note = "ideal estimates without eavesdropper or dark counts";
    match format {
        OutputFormat::Csv => {
            write_header(out, "variants", req)?;
            writeln!(out, "# {note}")?;
            write_rows(out, rows)
        }
        OutputFormat::Json => write_json(out, "variants", req, &(), &[note], rows),
    }
}
