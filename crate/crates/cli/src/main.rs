use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpr_bounds::bsa::default_mu_search;
use dpr_bounds::sweep::{
    run_attack_scan, run_bsa_scan, run_rate_vs_distance, run_variants, write_attack_scan,
    write_bsa_scan, write_rate_vs_distance, write_variants, AttackScanRequest, BsaScanRequest,
    OutputFormat, Range, RateVsDistanceRequest, VariantsRequest,
};
use dpr_bounds::{
    run_verify, Attack, AttackOptions, BoundsError, ChannelModel, Protocol, VerifyRequest,
};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

/// Upper bounds on COW and DPS secret key rates.
#[derive(Parser, Debug)]
#[command(name = "dpr-bounds", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Beam-splitting attack: optimal mu and rate versus distance.
    BsaScan(BsaScanArgs),
    /// Long-distance coefficient r0 versus visibility.
    AttackScan(AttackScanArgs),
    /// r0 t eta versus distance, with the full beam-splitting rate.
    RateVsDistance(RateArgs),
    /// Run the oracle and invariant suites.
    Verify(VerifyArgs),
    /// Ideal rates of encodings built from the COW hardware.
    Variants(VariantsArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Channel {
    /// Detector efficiency.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long = "loss-db-km", default_value_t = 0.25)]
    loss_db_km: f64,
    /// Let Eve control the detector efficiency (t -> t eta, eta -> 1).
    #[arg(long = "untrusted-device")]
    untrusted_device: bool,
}

impl Channel {
    fn model(&self) -> Result<ChannelModel<f64>, BoundsError> {
        ChannelModel::new(self.loss_db_km, self.eta, !self.untrusted_device)
    }
}

#[derive(Args, Debug)]
struct BsaScanArgs {
    /// Repeatable; defaults to COW and DPS.
    #[arg(long, value_parser = parse_protocol)]
    protocol: Vec<Protocol>,
    #[arg(long = "d-range", default_value = "0:1:250", value_parser = parse_range)]
    d_range: Range,
    #[command(flatten)]
    channel: Channel,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct AttackScanArgs {
    /// Repeatable; defaults to COW, COWm1, COWm2 and DPS.
    #[arg(long, value_parser = parse_protocol)]
    protocol: Vec<Protocol>,
    /// Applies to every protocol; defaults to each protocol's strongest attack.
    #[arg(long, value_parser = parse_attack)]
    attack: Option<Attack>,
    /// QBER values, repeatable or comma-separated. Ignored for DPS.
    #[arg(long = "Q", value_delimiter = ',', default_values_t = [0.0, 0.01, 0.03, 0.05])]
    q: Vec<f64>,
    /// Single visibility; overrides --V-range.
    #[arg(long = "V")]
    v: Option<f64>,
    #[arg(long = "V-range", default_value = "0.80:0.005:1.00", value_parser = parse_range)]
    v_range: Range,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[arg(long, value_parser = parse_protocol)]
    protocol: Vec<Protocol>,
    #[arg(long, value_parser = parse_attack)]
    attack: Option<Attack>,
    #[arg(long = "Q", default_value_t = 0.0)]
    q: f64,
    #[arg(long = "V", default_value_t = 0.98)]
    v: f64,
    #[arg(long = "d-range", default_value = "0:5:250", value_parser = parse_range)]
    d_range: Range,
    /// Leave out the beam-splitting comparison rows.
    #[arg(long = "no-bsa")]
    no_bsa: bool,
    #[command(flatten)]
    channel: Channel,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Points per axis of the oracle grids.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    /// Random attacks per normalisation suite.
    #[arg(long = "trace-points", default_value_t = 50)]
    trace_points: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VariantsArgs {
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Fraction of non-empty pulses for the Z-channel encoding.
    #[arg(long = "z-q", default_value_t = std::f64::consts::E.recip())]
    z_q: f64,
    #[arg(long = "d-range", default_value = "0:5:250", value_parser = parse_range)]
    d_range: Range,
    #[command(flatten)]
    channel: Channel,
    #[command(flatten)]
    output: Output,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: BoundsError| e.to_string())
}

fn parse_attack(s: &str) -> Result<Attack, String> {
    s.parse().map_err(|e: BoundsError| e.to_string())
}

fn parse_range(s: &str) -> Result<Range, String> {
    s.parse().map_err(|e: BoundsError| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: BoundsError| e.to_string())
}

enum Failure {
    Usage(String),
    Verify,
    NonConvergence(String),
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::NonConvergence { .. } | BoundsError::SearchDisagreement { .. } => {
                Failure::NonConvergence(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn targets(protocols: &[Protocol], attack: Option<Attack>) -> Vec<(Protocol, Attack)> {
    let ps: Vec<Protocol> = if protocols.is_empty() {
        vec![Protocol::Cow, Protocol::CowM1, Protocol::CowM2, Protocol::Dps]
    } else {
        protocols.to_vec()
    };
    ps.into_iter()
        .map(|p| (p, attack.unwrap_or_else(|| p.default_attack())))
        .collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::BsaScan(a) => {
            let protocols = if a.protocol.is_empty() {
                vec![Protocol::Cow, Protocol::Dps]
            } else {
                a.protocol
            };
            let req = BsaScanRequest {
                protocols,
                distances_km: a.d_range,
                channel: a.channel.model()?,
                mu_search: default_mu_search(),
            };
            let scan = run_bsa_scan(&req)?;
            let mut w = open_output(&a.output.out)?;
            write_bsa_scan(&mut w, &req, &scan, a.output.format)?;
            w.flush()?;
        }
        Command::AttackScan(a) => {
            let visibilities = match a.v {
                Some(v) => Range::single(v),
                None => a.v_range,
            };
            let req = AttackScanRequest {
                targets: targets(&a.protocol, a.attack),
                qbers: a.q,
                visibilities,
                options: AttackOptions::with_seed(a.output.seed),
            };
            let rows = run_attack_scan(&req)?;
            let mut w = open_output(&a.output.out)?;
            write_attack_scan(&mut w, &req, &rows, a.output.format)?;
            w.flush()?;
            let stuck = rows.iter().filter(|r| !r.converged).count();
            if stuck > 0 {
                return Err(Failure::NonConvergence(format!(
                    "{stuck} of {} points did not meet the optimizer tolerance",
                    rows.len()
                )));
            }
        }
        Command::RateVsDistance(a) => {
            let req = RateVsDistanceRequest {
                targets: targets(&a.protocol, a.attack),
                q: a.q,
                v: a.v,
                distances_km: a.d_range,
                channel: a.channel.model()?,
                options: AttackOptions::with_seed(a.output.seed),
                include_bsa: !a.no_bsa,
            };
            let rows = run_rate_vs_distance(&req)?;
            let mut w = open_output(&a.output.out)?;
            write_rate_vs_distance(&mut w, &req, &rows, a.output.format)?;
            w.flush()?;
        }
        Command::Verify(a) => {
            if a.grid == 0 || a.trace_points == 0 {
                return Err(Failure::Usage("--grid and --trace-points must be positive".into()));
            }
            let req = VerifyRequest {
                grid: a.grid,
                trace_points: a.trace_points,
                ..VerifyRequest::with_seed(a.output.seed)
            };
            let report = run_verify(&req);
            let json = serde_json::to_string_pretty(&report).map_err(BoundsError::from)?;
            match (&a.output.out, a.output.format) {
                (Some(path), _) => {
                    std::fs::write(path, json + "\n")?;
                    print!("{}", report.to_text());
                }
                (None, OutputFormat::Json) => println!("{json}"),
                (None, OutputFormat::Csv) => print!("{}", report.to_text()),
            }
            if !report.passed() {
                return Err(Failure::Verify);
            }
        }
        Command::Variants(a) => {
            let req = VariantsRequest {
                mu: a.mu,
                z_q: a.z_q,
                distances_km: a.d_range,
                channel: a.channel.model()?,
            };
            let rows = run_variants(&req)?;
            let mut w = open_output(&a.output.out)?;
            write_variants(&mut w, &req, &rows, a.output.format)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("DPR_BOUNDS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("DPR_BOUNDS_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NONCONVERGENCE)
        }
    }
}
