//! `seqcap` command-line interface.
//!
//! Exit codes: 0 success, 1 parse error, 2 validation failure, 3 domain
//! error, 4 demo assertion failure.

mod demo;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use seqcap::capacity::{continuity_capacity_bound, CapacityBoundParams};
use seqcap::channels::Channel;
use seqcap::io::{channel_to_json, parse_channel, parse_channel_unchecked, parse_code};
use seqcap::network::{
    analyze_sequence, entanglement_horizon, sweep, EpsilonChoice, NodeSpec, SweepConfig, SweepModel,
    SWEEP_CSV_HEADER,
};
use seqcap::noise::{amplitude_damping, bosonic_ad_kraus, pure_loss_kraus, FockTruncation};
use seqcap::numerics::Matrix;
use seqcap::qec::{chernoff_tail_bound, cly_code, cly_errors, cly_noise, cly_p_formula, tail_error_bound, Code};
use seqcap::random::DEFAULT_SEED;
use seqcap::transfer::{spectral_report, transfer_matrix};
use seqcap::Error;

use output::{csv_document, csv_float, csv_opt, emit, json_document, Format};

#[derive(Parser)]
#[command(name = "seqcap", version, about = "Capacity and error bounds for sequences of noisy quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format (each command has its own default).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Seed for every sampled quantity.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check a channel file for trace preservation.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a built-in noise model as a channel file.
    Model {
        /// identity, ad, bosonic-ad, pure-loss, depolarizing or dephasing.
        name: String,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
        /// Dimension for identity, depolarizing and dephasing.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Canonical form, mu, R_n and the Gelfand trace of a qubit channel.
    Spectral {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        nmax: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Continuity capacity bound over n = 0..=nmax.
    Capacity {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 512)]
        nmax: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
        /// Print only the largest n with a positive bound.
        #[arg(long)]
        find_horizon: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tail error bound of a noise model or channel file.
    Errbound {
        /// ad or bosonic-ad.
        #[arg(long, conflicts_with = "channel")]
        model: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        /// Two-mode CLY setting (bosonic-ad only).
        #[arg(long)]
        cly: bool,
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Number of corrected (leading) Kraus operators.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact pure-loss tail and its Chernoff estimates.
    Pureloss {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        cutoff: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a node D∘N∘E and analyze its powers.
    Node {
        /// Noise channel file on the physical space.
        #[arg(long, required_unless_present = "cly")]
        noise: Option<PathBuf>,
        /// Code file; defaults to the trivial code.
        #[arg(long)]
        code: Option<PathBuf>,
        /// Use the CLY code under two-mode bosonic damping.
        #[arg(long, conflicts_with_all = ["noise", "code"])]
        cly: bool,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        /// Leading Kraus operators of the noise treated as corrected.
        #[arg(long)]
        k: Option<usize>,
        /// Fixed epsilon instead of a computed one.
        #[arg(long)]
        epsilon: Option<f64>,
        /// diamond or tail.
        #[arg(long, conflicts_with = "epsilon")]
        epsilon_source: Option<String>,
        #[arg(long, default_value_t = 64)]
        nmax: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid sweep over a model parameter and n.
    Sweep {
        /// ad, bosonic-ad or pure-loss.
        #[arg(long)]
        model: String,
        /// Parameter grid: `start:stop:step`, a comma list, or one value.
        #[arg(long)]
        params: String,
        /// n grid: `start:stop[:step]`, a comma list, or one value.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reproduce the amplitude-damping worked example and check every number.
    PaperDemo {
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::ShapeMismatch(_) => 1,
            Error::InvalidChannel { .. } | Error::NonOrthonormalWords { .. } | Error::KlViolated { .. } => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(1, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

fn emit_json(body: Value, out: &OutputArgs) -> Result<(), Failure> {
    Ok(emit(&json_document(body), out.output.as_deref())?)
}

fn format_or(out: &OutputArgs, default: Format) -> Format {
    out.format.unwrap_or(default)
}

fn configure_threads() {
    if let Some(n) = std::env::var("SEQCAP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // a second initialization attempt is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Validate { file, out } => cmd_validate(&file, &out),
        Command::Model {
            name,
            gamma,
            eta,
            cutoff,
            dim,
            out,
        } => cmd_model(&name, gamma, eta, cutoff, dim, &out),
        Command::Spectral { file, nmax, out } => cmd_spectral(&file, nmax, &out),
        Command::Capacity {
            epsilon,
            nmax,
            db,
            find_horizon,
            out,
        } => cmd_capacity(epsilon, nmax, db, find_horizon, &out),
        Command::Errbound {
            model,
            gamma,
            cly,
            channel,
            k,
            cutoff,
            out,
        } => cmd_errbound(model.as_deref(), gamma, cly, channel.as_deref(), k, cutoff, &out),
        Command::Pureloss { eta, cutoff, k, out } => cmd_pureloss(eta, cutoff, k, &out),
        Command::Node {
            noise,
            code,
            cly,
            gamma,
            k,
            epsilon,
            epsilon_source,
            nmax,
            out,
        } => cmd_node(
            noise.as_deref(),
            code.as_deref(),
            cly,
            gamma,
            k,
            epsilon,
            epsilon_source.as_deref(),
            nmax,
            &out,
        ),
        Command::Sweep {
            model,
            params,
            n,
            cutoff,
            k,
            out,
        } => cmd_sweep(&model, &params, &n, cutoff, k, &out),
        Command::PaperDemo { gamma, out } => cmd_demo(gamma, &out),
    }
}

fn cmd_validate(file: &Path, out: &OutputArgs) -> CmdResult {
    let c: Channel<f64> = parse_channel_unchecked(&read(file)?)?;
    let report = c.validate()?;
    emit_json(
        json!({
            "dim_in": c.dim_in(),
            "dim_out": c.dim_out(),
            "kraus_count": c.kraus().len(),
            "defect": report.defect,
            "passed": report.passed,
        }),
        out,
    )?;
    Ok(if report.passed { 0 } else { 2 })
}

fn cmd_model(name: &str, gamma: f64, eta: f64, cutoff: usize, dim: usize, out: &OutputArgs) -> CmdResult {
    let trunc = FockTruncation::single(cutoff);
    let c: Channel<f64> = match name {
        "identity" => Channel::identity(dim),
        "ad" => amplitude_damping(gamma)?,
        "bosonic-ad" => bosonic_ad_kraus(gamma, trunc)?,
        "pure-loss" => pure_loss_kraus(eta, trunc)?,
        "depolarizing" => Channel::completely_depolarizing(dim),
        "dephasing" => Channel::completely_dephasing(dim),
        other => return Err(Failure::new(1, format!("unknown model {other:?}"))),
    };
    let mut text = channel_to_json(&c);
    text.push('\n');
    emit(&text, out.output.as_deref())?;
    Ok(0)
}

fn cmd_spectral(file: &Path, nmax: usize, out: &OutputArgs) -> CmdResult {
    let c: Channel<f64> = parse_channel(&read(file)?)?;
    let tm = transfer_matrix(&c)?;
    let rep = spectral_report(&tm, nmax)?;
    match format_or(out, Format::Json) {
        Format::Json => {
            let rows: Vec<Value> = rep
                .gelfand_trace
                .iter()
                .map(|s| -> Result<Value, Failure> {
                    Ok(json!({"n": s.n, "R_n": rep.radius(s.n)?, "delta_norm": s.norm, "gelfand_root": s.root}))
                })
                .collect::<Result<_, _>>()?;
            emit_json(
                json!({
                    "t_matrix": tm.entries(),
                    "t": rep.t,
                    "lambda": rep.lambda,
                    "mu": rep.mu,
                    "limit_transfer": rep.limit_transfer.entries(),
                    "n0": rep.n0,
                    "k_envelope": rep.k_envelope,
                    "rows": rows,
                }),
                out,
            )?;
        }
        Format::Csv => {
            let rows = rep
                .gelfand_trace
                .iter()
                .map(|s| -> Result<String, Failure> {
                    Ok(format!(
                        "{},{},{},{}",
                        s.n,
                        csv_float(rep.radius(s.n)?),
                        csv_float(s.norm),
                        csv_float(s.root)
                    ))
                })
                .collect::<Result<Vec<_>, _>>()?;
            emit(&csv_document("n,R_n,delta_norm,gelfand_root", rows), out.output.as_deref())?;
        }
    }
    Ok(0)
}

fn cmd_capacity(epsilon: f64, nmax: usize, db: usize, find_horizon: bool, out: &OutputArgs) -> CmdResult {
    if find_horizon {
        let h = entanglement_horizon(epsilon, db)?;
        match format_or(out, Format::Csv) {
            Format::Json => emit_json(json!({"epsilon": epsilon, "d_B": db, "horizon": h}), out)?,
            Format::Csv => emit(&format!("{h}\n"), out.output.as_deref())?,
        }
        return Ok(0);
    }
    let mut rows = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let v = continuity_capacity_bound(&CapacityBoundParams::new(epsilon, n, db)?)?;
        rows.push((n, v, n as f64 * epsilon));
    }
    match format_or(out, Format::Csv) {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|&(n, v, d)| json!({"n": n, "capacity_lower": v, "distance_upper": d, "feasible": v > 0.0}))
                .collect();
            emit_json(json!({"epsilon": epsilon, "d_B": db, "rows": rows}), out)?;
        }
        Format::Csv => {
            let body = rows
                .iter()
                .map(|&(n, v, d)| format!("{n},{},{},{}", csv_float(v), csv_float(d), v > 0.0));
            emit(
                &csv_document("n,capacity_lower,distance_upper,feasible", body),
                out.output.as_deref(),
            )?;
        }
    }
    Ok(0)
}

fn cmd_errbound(
    model: Option<&str>,
    gamma: f64,
    cly: bool,
    channel: Option<&Path>,
    k: Option<usize>,
    cutoff: usize,
    out: &OutputArgs,
) -> CmdResult {
    // (label, exact tail, k, optional 49γ² column, optional scalar maximum)
    let (label, exact, k, bound, p_max) = if let Some(path) = channel {
        let c: Channel<f64> = parse_channel(&read(path)?)?;
        let k = k.unwrap_or(1);
        ("channel".to_string(), tail_error_bound(c.kraus(), k)?, k, None, None)
    } else {
        match (model.unwrap_or("ad"), cly) {
            ("bosonic-ad", true) => {
                let noise = cly_noise(gamma, cutoff)?;
                let k = k.unwrap_or(3);
                let p_max = (0..=2 * cutoff).map(|p| cly_p_formula(gamma, p)).fold(f64::MIN, f64::max);
                (
                    "bosonic-ad-cly".to_string(),
                    tail_error_bound(noise.kraus(), k)?,
                    k,
                    Some(49.0 * gamma * gamma),
                    if k == 3 { Some(p_max) } else { None },
                )
            }
            ("bosonic-ad", false) => {
                let c = bosonic_ad_kraus(gamma, FockTruncation::single(cutoff))?;
                let k = k.unwrap_or(1);
                ("bosonic-ad".to_string(), tail_error_bound(c.kraus(), k)?, k, None, None)
            }
            ("ad", _) => {
                let c = amplitude_damping(gamma)?;
                let k = k.unwrap_or(1);
                ("ad".to_string(), tail_error_bound(c.kraus(), k)?, k, None, None)
            }
            (other, _) => return Err(Failure::new(1, format!("unknown model {other:?}"))),
        }
    };
    match format_or(out, Format::Csv) {
        Format::Json => emit_json(
            json!({"model": label, "gamma": gamma, "k": k, "exact_norm": exact, "p_formula_max": p_max, "bound_49g2": bound}),
            out,
        )?,
        Format::Csv => emit(
            &csv_document(
                "model,gamma,k,exact_norm,p_formula_max,bound_49g2",
                [format!(
                    "{label},{},{k},{},{},{}",
                    csv_float(gamma),
                    csv_float(exact),
                    csv_opt(p_max),
                    csv_opt(bound)
                )],
            ),
            out.output.as_deref(),
        )?,
    }
    Ok(0)
}

fn cmd_pureloss(eta: f64, cutoff: usize, k: usize, out: &OutputArgs) -> CmdResult {
    let rep = chernoff_tail_bound(eta, k, cutoff)?;
    match format_or(out, Format::Csv) {
        Format::Json => emit_json(serde_json::to_value(&rep).expect("report serializes"), out)?,
        Format::Csv => {
            let mut body = vec![format!(
                "max,{},{},{},,",
                csv_float(rep.exact_norm),
                csv_opt(rep.chernoff),
                rep.chernoff_valid
            )];
            body.extend(rep.rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    r.m,
                    csv_float(r.exact),
                    csv_float(r.primary),
                    r.primary_valid,
                    csv_float(r.literal),
                    r.literal_regime
                )
            }));
            emit(
                &csv_document("m,exact,chernoff,chernoff_valid,chernoff_literal,literal_regime", body),
                out.output.as_deref(),
            )?;
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_node(
    noise: Option<&Path>,
    code: Option<&Path>,
    cly: bool,
    gamma: f64,
    k: Option<usize>,
    epsilon: Option<f64>,
    epsilon_source: Option<&str>,
    nmax: usize,
    out: &OutputArgs,
) -> CmdResult {
    let spec = if cly {
        let mut corrected = cly_errors(gamma, 4)?;
        let noise = cly_noise(gamma, 4)?;
        if let Some(k) = k {
            corrected = noise.kraus().iter().take(k).cloned().collect();
        }
        NodeSpec::new(noise, cly_code(4)?, corrected)
    } else {
        let noise: Channel<f64> = parse_channel(&read(noise.expect("clap enforces --noise"))?)?;
        let code: Code<f64> = match code {
            Some(p) => parse_code(&read(p)?)?,
            None => Code::trivial(noise.dim_in()),
        };
        let corrected: Vec<Matrix<f64>> = match k {
            Some(k) => noise.kraus().iter().take(k).cloned().collect(),
            None => vec![Matrix::identity(code.physical_dim())],
        };
        NodeSpec::new(noise, code, corrected)
    };
    let choice = match (epsilon, epsilon_source) {
        (Some(e), _) => EpsilonChoice::Given(e),
        (None, Some("diamond")) => EpsilonChoice::DiamondUpper,
        (None, Some("tail")) => EpsilonChoice::TailBound,
        (None, Some(other)) => return Err(Failure::new(1, format!("unknown epsilon source {other:?}"))),
        (None, None) => EpsilonChoice::Auto,
    };
    let rep = analyze_sequence(&spec.with_epsilon(choice), nmax)?;
    match format_or(out, Format::Json) {
        Format::Json => emit_json(serde_json::to_value(&rep).expect("report serializes"), out)?,
        Format::Csv => {
            let body = rep.rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.n,
                    csv_float(r.capacity_lower),
                    csv_float(r.distance_upper),
                    csv_opt(r.r_n),
                    r.feasible
                )
            });
            emit(
                &csv_document("n,capacity_lower,distance_upper,R_n,feasible", body),
                out.output.as_deref(),
            )?;
        }
    }
    Ok(0)
}

fn parse_float_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |what: &str| Failure::new(3, format!("invalid grid: {what}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(t));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(bad(s));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            (0..=count).map(|i| a + step * i as f64).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad(s)),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad(s));
    }
    Ok(values)
}

fn parse_n_grid(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = |what: &str| Failure::new(3, format!("invalid grid: {what}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(t));
    let parts: Vec<&str> = s.split(':').collect();
    let values: Vec<usize> = match parts.as_slice() {
        [a, b] => (num(a)?..=num(b)?).collect(),
        [a, b, step] => {
            let step = num(step)?;
            if step == 0 {
                return Err(bad(s));
            }
            (num(a)?..=num(b)?).step_by(step).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad(s)),
    };
    if values.is_empty() {
        return Err(bad(s));
    }
    Ok(values)
}

fn cmd_sweep(model: &str, params: &str, n: &str, cutoff: usize, k: usize, out: &OutputArgs) -> CmdResult {
    let model: SweepModel = model.parse()?;
    let mut config = SweepConfig::new(model, parse_float_grid(params)?, parse_n_grid(n)?);
    config.cutoff = cutoff;
    config.k = k;
    let rows = sweep(&config)?;
    match format_or(out, Format::Csv) {
        Format::Json => emit_json(json!({"rows": serde_json::to_value(&rows).expect("rows serialize")}), out)?,
        Format::Csv => emit(
            &csv_document(SWEEP_CSV_HEADER, rows.iter().map(|r| r.to_csv())),
            out.output.as_deref(),
        )?,
    }
    Ok(0)
}

fn cmd_demo(gamma: f64, out: &OutputArgs) -> CmdResult {
    // 49γ² must be a valid distance bound
    if !(gamma > 0.0 && 49.0 * gamma * gamma <= 1.0) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            expected: "(0, 1/7]",
        }
        .into());
    }
    let checks = demo::run(gamma, out.seed);
    match format_or(out, Format::Csv) {
        Format::Json => emit_json(demo::to_json(&checks, gamma, out.seed), out)?,
        Format::Csv => emit(&demo::to_text(&checks), out.output.as_deref())?,
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c.outcome.is_err())
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("failed: {}", failed.join("; "));
        Ok(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_grids() {
        assert_eq!(parse_float_grid("0.1:0.5:0.1").ok().unwrap().len(), 5);
        assert_eq!(parse_float_grid("0.1,0.2").ok().unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_float_grid("0.3").ok().unwrap(), vec![0.3]);
        assert!(parse_float_grid("0.5:0.1:0.1").is_err());
        assert!(parse_float_grid("x").is_err());
    }

    #[test]
    fn n_grids() {
        assert_eq!(parse_n_grid("1:50").ok().unwrap().len(), 50);
        assert_eq!(parse_n_grid("0:10:5").ok().unwrap(), vec![0, 5, 10]);
        assert_eq!(parse_n_grid("3,7").ok().unwrap(), vec![3, 7]);
        assert!(parse_n_grid("5:1").is_err());
    }
}
