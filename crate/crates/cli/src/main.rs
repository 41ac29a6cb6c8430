//! Command-line driver: generate datasets, learn transforms, verify the
//! DFT/DCT optimality claims, and sweep uncoded BER.
//!
//! Every command is reproducible: outputs depend only on the resolved
//! arguments and seeds, and every output embeds the resolved config and
//! a format version. Exit codes: 0 success (or claim passed), 1 claim
//! failed, 2 usage error, 3 runtime error.

mod config;
mod parse;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde_json::{json, Value};

use beamsparse_core::analysis::{scan_dct, verify_dft_ca, verify_dft_msp, DftMspMode};
use beamsparse_core::learn::{ca_run, msp_run, CaConfig, MspConfig, SweepOrder};
use beamsparse_core::matkit::{write_cmatrix, UnitaryMatrix};
use beamsparse_core::models::{
    sample_multipath_seeded, sample_sinusoid_seeded, synth_scene_channels, MultipathModel,
    MuMimoScene, SampleSet, SinusoidModel,
};
use beamsparse_core::objective::{ObjectiveSpec, StochasticModel};
use beamsparse_core::simulate::{ber_sweep, BerCurve, Constellation, DetectorKind, UplinkConfig};
use beamsparse_core::Complex64;

use config::{pick, pick_required, pick_string, pick_string_opt, FileConfig};

const SCHEMA: &str = "beamsparse/1";

#[derive(Parser)]
#[command(name = "beamsparse", version, about = "Learn and verify unitary sparsifying transforms")]
struct Cli {
    /// key=value defaults file; explicit flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cap the worker-thread count (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples from a generative model into a cmx1 file
    Gen(GenArgs),
    /// Learn a unitary transform by MSP or coordinate ascent
    Learn(LearnArgs),
    /// Numerically verify a transform-optimality claim
    Verify(VerifyArgs),
    /// Monte-Carlo uncoded BER over an SNR grid
    Ber(BerArgs),
}

#[derive(Args)]
struct GenArgs {
    /// multipath | sinusoid
    #[arg(long)]
    model: Option<String>,
    /// Vector dimension B
    #[arg(long)]
    b: Option<usize>,
    /// Multipath path count L (gains default to all-ones)
    #[arg(long)]
    l: Option<usize>,
    /// Path gains as re±imj tokens, comma separated
    #[arg(long)]
    gains: Option<String>,
    /// Sample count
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (binary cmx1; a .meta.json sidecar records the config)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    /// msp | ca
    #[arg(long)]
    alg: Option<String>,
    /// dft | dct | identity | random | file
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    init_seed: Option<u64>,
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Dataset objective: path to a cmx1 sample set
    #[arg(long)]
    data: Option<PathBuf>,
    /// Exact single-path objective (requires --b)
    #[arg(long, action = clap::ArgAction::SetTrue)]
    model_l1: Option<bool>,
    /// Monte-Carlo objective: multipath | sinusoid
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    gains: Option<String>,
    /// Gain magnitude for --model-l1
    #[arg(long)]
    c_mag: Option<f64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    mc_seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    step_tol: Option<f64>,
    #[arg(long)]
    obj_tol: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    inner_tol: Option<f64>,
    #[arg(long)]
    improvement_tol: Option<f64>,
    /// lexicographic | random:SEED
    #[arg(long)]
    sweep_order: Option<String>,
    /// Learned transform output (cmx1)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace output (JSON)
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// dft-msp | dft-ca | dct-scan
    claim: String,
    /// Dimensions: N, A..B, or comma list
    #[arg(long)]
    b: Option<String>,
    /// Path count for dft-msp
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    gains: Option<String>,
    /// analytic | mc (dft-msp only)
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report output (JSON)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BerArgs {
    /// lmmse | le
    #[arg(long)]
    det: Option<String>,
    /// Beamspace row fraction kept by the le detector
    #[arg(long)]
    density: Option<f64>,
    /// dft | dct | identity | random:SEED | file:PATH
    #[arg(long)]
    transform: Option<String>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    u: Option<usize>,
    /// qpsk | 16qam
    #[arg(long)]
    constellation: Option<String>,
    /// dB grid: comma list or LO..HI:STEP
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// scene:NSCENES | file:PATH (B×(U·S) column blocks)
    #[arg(long)]
    channels: Option<String>,
    /// Paths per user for scene synthesis
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    channel_seed: Option<u64>,
    /// Output base path; writes BASE.csv and BASE.json
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    ClaimFailed,
    Runtime(String),
}

impl From<beamsparse_core::Error> for CliError {
    fn from(e: beamsparse_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    let cfg = match FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args, cfg),
        Command::Learn(args) => cmd_learn(args, cfg),
        Command::Verify(args) => cmd_verify(args, cfg),
        Command::Ber(args) => cmd_ber(args, cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ClaimFailed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Resolved gains: explicit list, else all-ones of length `l`.
fn resolve_gains(
    gains: Option<String>,
    cfg: &mut FileConfig,
    l: usize,
) -> Result<Vec<Complex64>, CliError> {
    match pick_string_opt(gains, cfg, "gains") {
        Some(text) => {
            let parsed = parse::parse_gains(&text).map_err(usage)?;
            if parsed.len() != l {
                return Err(usage(format!(
                    "--gains lists {} paths but --l is {l}",
                    parsed.len()
                )));
            }
            Ok(parsed)
        }
        None => Ok(vec![Complex::ONE; l]),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    std::fs::write(path, serde_json::to_string_pretty(value).expect("json")).map_err(Into::into)
}

fn cmd_gen(args: GenArgs, mut cfg: FileConfig) -> Result<(), CliError> {
    let model = pick_string(args.model, &mut cfg, "model", "multipath");
    let b = pick_required::<usize>(args.b, &mut cfg, "b").map_err(usage)?;
    let n = pick_required::<usize>(args.n, &mut cfg, "n").map_err(usage)?;
    let seed = pick(args.seed, &mut cfg, "seed", 0u64).map_err(usage)?;
    let out = pick_required::<PathBuf>(args.out, &mut cfg, "out").map_err(usage)?;

    let (set, model_json) = match model.as_str() {
        "multipath" => {
            let l = pick(args.l, &mut cfg, "l", 1usize).map_err(usage)?;
            let gains = resolve_gains(args.gains, &mut cfg, l)?;
            cfg.ensure_empty().map_err(usage)?;
            let gains_text: Vec<String> = gains
                .iter()
                .map(|g| beamsparse_core::matkit::format_complex(*g))
                .collect();
            let m = MultipathModel::new(b, gains, seed).map_err(|e| usage(e.to_string()))?;
            (
                sample_multipath_seeded(&m, n, seed)?,
                json!({"kind": "multipath", "l": l, "gains": gains_text}),
            )
        }
        "sinusoid" => {
            cfg.ensure_empty().map_err(usage)?;
            let m = SinusoidModel::new(b, seed).map_err(|e| usage(e.to_string()))?;
            (
                sample_sinusoid_seeded(&m, n, seed)?,
                json!({"kind": "sinusoid"}),
            )
        }
        other => return Err(usage(format!("unknown model {other:?}"))),
    };

    set.save(&out)?;
    let meta = json!({
        "schema": SCHEMA,
        "command": "gen",
        "config": {"model": model_json, "b": b, "n": n, "seed": seed,
                    "out": out.display().to_string()},
        "summary": {"dim": set.dim(), "count": set.len()},
    });
    write_json(&sidecar_path(&out), &meta)?;
    println!(
        "wrote {} (dim={}, count={}, seed={seed})",
        out.display(),
        set.dim(),
        set.len()
    );
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Objective resolved from --data / --model-l1 / --model flags.
fn resolve_objective(
    args: &mut LearnArgs,
    cfg: &mut FileConfig,
) -> Result<(ObjectiveSpec, Value), CliError> {
    let data = pick_string_opt(args.data.take().map(|p| p.display().to_string()), cfg, "data");
    let model_l1 = args.model_l1.take().unwrap_or(false)
        || pick(None::<bool>, cfg, "model-l1", false).map_err(usage)?;
    let model = pick_string_opt(args.model.take(), cfg, "model");

    let sources = data.is_some() as u8 + model_l1 as u8 + model.is_some() as u8;
    if sources != 1 {
        return Err(usage(
            "choose exactly one objective source: --data, --model-l1, or --model",
        ));
    }

    if let Some(path) = data {
        let set = SampleSet::load(&path)?;
        let j = json!({"source": "dataset", "path": path, "dim": set.dim(), "count": set.len()});
        return Ok((ObjectiveSpec::Dataset(set), j));
    }

    let b = pick_required::<usize>(args.b.take(), cfg, "b").map_err(usage)?;
    if model_l1 {
        let c_mag = pick(args.c_mag.take(), cfg, "c-mag", 1.0).map_err(usage)?;
        let j = json!({"source": "analytic-l1", "b": b, "c_mag": c_mag});
        return Ok((ObjectiveSpec::AnalyticL1 { dim: b, gain_mag: c_mag }, j));
    }

    let kind = model.unwrap();
    let samples = pick(args.mc_samples.take(), cfg, "mc-samples", 100_000).map_err(usage)?;
    let mc_seed = pick(args.mc_seed.take(), cfg, "mc-seed", 0u64).map_err(usage)?;
    let stochastic = match kind.as_str() {
        "multipath" => {
            let l = pick(args.l.take(), cfg, "l", 1usize).map_err(usage)?;
            let gains = resolve_gains(args.gains.take(), cfg, l)?;
            StochasticModel::Multipath(
                MultipathModel::new(b, gains, mc_seed).map_err(|e| usage(e.to_string()))?,
            )
        }
        "sinusoid" => StochasticModel::Sinusoid(
            SinusoidModel::new(b, mc_seed).map_err(|e| usage(e.to_string()))?,
        ),
        other => return Err(usage(format!("unknown model {other:?}"))),
    };
    let j = json!({"source": "monte-carlo", "model": kind, "b": b,
                   "samples": samples, "seed": mc_seed});
    Ok((
        ObjectiveSpec::MonteCarlo {
            model: stochastic,
            samples,
            seed: mc_seed,
        },
        j,
    ))
}

fn resolve_init(
    kind: &str,
    dim: usize,
    init_seed: u64,
    init_file: Option<&Path>,
) -> Result<UnitaryMatrix, CliError> {
    match kind {
        "dft" => Ok(beamsparse_core::matkit::dft_matrix(dim)?),
        "dct" => Ok(beamsparse_core::matkit::dct2_matrix(dim)?),
        "identity" => Ok(UnitaryMatrix::new(
            beamsparse_core::matkit::CMatrix::identity(dim),
        )?),
        "random" => Ok(beamsparse_core::matkit::random_unitary(dim, init_seed)?),
        "file" => {
            let path = init_file.ok_or_else(|| usage("--init file requires --init-file"))?;
            let m = beamsparse_core::matkit::read_cmatrix(path)?;
            UnitaryMatrix::new(m).map_err(|e| usage(format!("init file is not unitary: {e}")))
        }
        other => Err(usage(format!("unknown init {other:?}"))),
    }
}

fn cmd_learn(mut args: LearnArgs, mut cfg: FileConfig) -> Result<(), CliError> {
    let alg = pick_string(args.alg.take(), &mut cfg, "alg", "msp");
    let init_kind = pick_string(args.init.take(), &mut cfg, "init", "dft");
    let init_seed = pick(args.init_seed.take(), &mut cfg, "init-seed", 0u64).map_err(usage)?;
    let init_file = pick_string_opt(
        args.init_file.take().map(|p| p.display().to_string()),
        &mut cfg,
        "init-file",
    );
    let out = pick_string_opt(
        args.out.take().map(|p| p.display().to_string()),
        &mut cfg,
        "out",
    );
    let trace_path = pick_string_opt(
        args.trace.take().map(|p| p.display().to_string()),
        &mut cfg,
        "trace",
    );

    let max_iters = pick(args.max_iters.take(), &mut cfg, "max-iters", 500).map_err(usage)?;
    let step_tol = pick(args.step_tol.take(), &mut cfg, "step-tol", 1e-10).map_err(usage)?;
    let obj_tol = pick(args.obj_tol.take(), &mut cfg, "obj-tol", 1e-12).map_err(usage)?;
    let max_sweeps = pick(args.max_sweeps.take(), &mut cfg, "max-sweeps", 30).map_err(usage)?;
    let inner_tol = pick(args.inner_tol.take(), &mut cfg, "inner-tol", 1e-10).map_err(usage)?;
    let improvement_tol =
        pick(args.improvement_tol.take(), &mut cfg, "improvement-tol", 1e-9).map_err(usage)?;
    let sweep_order_text =
        pick_string(args.sweep_order.take(), &mut cfg, "sweep-order", "lexicographic");

    let (spec, objective_json) = resolve_objective(&mut args, &mut cfg)?;
    cfg.ensure_empty().map_err(usage)?;

    let dim = spec.dim();
    let init = resolve_init(&init_kind, dim, init_seed, init_file.as_deref().map(Path::new))?;

    let sweep_order = match sweep_order_text.as_str() {
        "lexicographic" => SweepOrder::Lexicographic,
        other => match other.strip_prefix("random:") {
            Some(seed) => SweepOrder::SeededRandom(
                seed.parse().map_err(|_| usage("bad sweep-order seed"))?,
            ),
            None => return Err(usage(format!("unknown sweep order {other:?}"))),
        },
    };

    let (learned, trace) = match alg.as_str() {
        "msp" => {
            let mut c = MspConfig::new(init);
            c.max_iters = max_iters;
            c.step_tol = step_tol;
            c.obj_tol = obj_tol;
            msp_run(&c, &spec)?
        }
        "ca" => {
            let mut c = CaConfig::new(init);
            c.max_sweeps = max_sweeps;
            c.inner_tol = inner_tol;
            c.improvement_tol = improvement_tol;
            c.sweep_order = sweep_order;
            ca_run(&c, &spec)?
        }
        other => return Err(usage(format!("unknown algorithm {other:?}"))),
    };

    let config_json = json!({
        "alg": alg, "init": init_kind, "init_seed": init_seed, "init_file": init_file,
        "objective": objective_json,
        "max_iters": max_iters, "step_tol": step_tol, "obj_tol": obj_tol,
        "max_sweeps": max_sweeps, "inner_tol": inner_tol,
        "improvement_tol": improvement_tol, "sweep_order": sweep_order_text,
    });

    if let Some(out) = &out {
        write_cmatrix(learned.matrix(), out)?;
        let meta = json!({
            "schema": SCHEMA, "command": "learn", "config": config_json,
            "summary": {"dim": dim, "defect": learned.defect()},
        });
        write_json(&sidecar_path(Path::new(out)), &meta)?;
    }
    if let Some(path) = &trace_path {
        let body: Value = serde_json::from_str(&trace.to_json()).expect("trace json");
        let doc = json!({
            "schema": SCHEMA, "command": "learn", "config": config_json,
            "trace": body,
        });
        write_json(Path::new(path), &doc)?;
    }
    println!(
        "learn: alg={alg} dim={dim} iterations={} objective {:.6} -> {:.6} ({:?})",
        trace.iterations(),
        trace.objective.first().unwrap(),
        trace.objective.last().unwrap(),
        trace.terminated_by,
    );
    Ok(())
}

fn cmd_verify(args: VerifyArgs, mut cfg: FileConfig) -> Result<(), CliError> {
    let b_text = pick_string(args.b, &mut cfg, "b", "");
    let out = pick_string_opt(args.out.map(|p| p.display().to_string()), &mut cfg, "out");

    let report = match args.claim.as_str() {
        "dft-msp" => {
            let b_list =
                parse::parse_dim_list(if b_text.is_empty() { "2,4,8,16,32" } else { &b_text })
                    .map_err(usage)?;
            let l = pick(args.l, &mut cfg, "l", 1usize).map_err(usage)?;
            let gains = resolve_gains(args.gains, &mut cfg, l)?;
            let mode_text = pick_string(args.mode, &mut cfg, "mode", "analytic");
            let mode = match mode_text.as_str() {
                "analytic" => DftMspMode::Analytic,
                "mc" => DftMspMode::MonteCarlo {
                    samples: pick(args.mc_samples, &mut cfg, "mc-samples", 1_000_000)
                        .map_err(usage)?,
                    seed: pick(args.seed, &mut cfg, "seed", 0u64).map_err(usage)?,
                },
                other => return Err(usage(format!("unknown mode {other:?}"))),
            };
            cfg.ensure_empty().map_err(usage)?;
            verify_dft_msp(&b_list, &gains, mode)?
        }
        "dft-ca" => {
            let b_list =
                parse::parse_dim_list(if b_text.is_empty() { "2..32" } else { &b_text })
                    .map_err(usage)?;
            if b_list.iter().any(|&b| b < 2) {
                return Err(usage("dft-ca requires B ≥ 2"));
            }
            cfg.ensure_empty().map_err(usage)?;
            verify_dft_ca(&b_list)?
        }
        "dct-scan" => {
            let b_list =
                parse::parse_dim_list(if b_text.is_empty() { "3..32" } else { &b_text })
                    .map_err(usage)?;
            if b_list.iter().any(|&b| b < 3) {
                return Err(usage("the DCT scan starts at B = 3"));
            }
            cfg.ensure_empty().map_err(usage)?;
            scan_dct(&b_list)?
        }
        other => return Err(usage(format!("unknown claim {other:?}"))),
    };

    print!("{}", report.render_table());
    if let Some(path) = out {
        let doc = json!({
            "schema": SCHEMA, "command": "verify",
            "config": {"claim": args.claim, "b": report.b_range},
            "report": serde_json::from_str::<Value>(&report.to_json()).expect("report json"),
        });
        write_json(Path::new(&path), &doc)?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::ClaimFailed)
    }
}

fn cmd_ber(args: BerArgs, mut cfg: FileConfig) -> Result<(), CliError> {
    let det = pick_string(args.det, &mut cfg, "det", "lmmse");
    let density = pick(args.density, &mut cfg, "density", 0.125).map_err(usage)?;
    let transform_text = pick_string(args.transform, &mut cfg, "transform", "dft");
    let b = pick_required::<usize>(args.b, &mut cfg, "b").map_err(usage)?;
    let u = pick_required::<usize>(args.u, &mut cfg, "u").map_err(usage)?;
    let constellation_text = pick_string(args.constellation, &mut cfg, "constellation", "qpsk");
    let snr_text = pick_string(args.snr, &mut cfg, "snr", "0..20:5");
    let trials = pick(args.trials, &mut cfg, "trials", 10_000usize).map_err(usage)?;
    let seed = pick(args.seed, &mut cfg, "seed", 0u64).map_err(usage)?;
    let channels_text = pick_string(args.channels, &mut cfg, "channels", "scene:16");
    let paths = pick(args.paths, &mut cfg, "paths", 1usize).map_err(usage)?;
    let channel_seed = pick(args.channel_seed, &mut cfg, "channel-seed", 1u64).map_err(usage)?;
    let out = pick_string_opt(args.out.map(|p| p.display().to_string()), &mut cfg, "out");
    cfg.ensure_empty().map_err(usage)?;

    let constellation = match constellation_text.as_str() {
        "qpsk" => Constellation::Qpsk,
        "16qam" => Constellation::Qam16,
        other => return Err(usage(format!("unknown constellation {other:?}"))),
    };
    let snr_db_grid = parse::parse_snr_grid(&snr_text).map_err(usage)?;

    let channels = if let Some(n) = channels_text.strip_prefix("scene:") {
        let n: usize = n.parse().map_err(|_| usage("bad scene count"))?;
        let scene =
            MuMimoScene::with_defaults(b, u, paths, channel_seed).map_err(|e| usage(e.to_string()))?;
        synth_scene_channels(&scene, n)?
    } else if let Some(path) = channels_text.strip_prefix("file:") {
        let m = beamsparse_core::matkit::read_cmatrix(path)?;
        if m.rows() != b || m.cols() % u != 0 {
            return Err(usage(format!(
                "channel file is {}x{}, expected {b} rows and a multiple of {u} columns",
                m.rows(),
                m.cols()
            )));
        }
        (0..m.cols() / u)
            .map(|s| {
                beamsparse_core::matkit::CMatrix::from_fn(b, u, |i, k| m[(i, s * u + k)])
            })
            .collect()
    } else {
        return Err(usage(format!(
            "unknown channel source {channels_text:?} (scene:N | file:PATH)"
        )));
    };

    let detector = match det.as_str() {
        "lmmse" => DetectorKind::LmmseAntenna,
        "le" => DetectorKind::LeBeamspace {
            density,
            transform: parse::parse_transform(&transform_text, b).map_err(usage)?,
        },
        other => return Err(usage(format!("unknown detector {other:?}"))),
    };

    let cfg_run = UplinkConfig {
        b,
        u,
        constellation,
        snr_db_grid,
        trials_per_point: trials,
        seed,
    };
    let curve: BerCurve = ber_sweep(&cfg_run, &detector, &channels)?;

    for i in 0..curve.snr_db.len() {
        println!(
            "snr {:>6.2} dB  ber {:.3e}  ({} bits)",
            curve.snr_db[i], curve.ber[i], curve.bit_count[i]
        );
    }

    if let Some(base) = out {
        let config_json = json!({
            "det": det, "density": density, "transform": transform_text,
            "b": b, "u": u, "constellation": constellation_text,
            "snr": snr_text, "trials": trials, "seed": seed,
            "channels": channels_text, "paths": paths, "channel_seed": channel_seed,
        });
        let base = Path::new(&base);
        let csv_path = base.with_extension("csv");
        let json_path = base.with_extension("json");
        std::fs::write(&csv_path, curve.to_csv())?;
        let doc = json!({
            "schema": SCHEMA, "command": "ber", "config": config_json,
            "curve": {"snr_db": curve.snr_db, "ber": curve.ber, "bits": curve.bit_count},
        });
        write_json(&json_path, &doc)?;
        println!("wrote {} and {}", csv_path.display(), json_path.display());
    }
    Ok(())
}
