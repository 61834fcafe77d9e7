//! Command-line surface: `gen`, `run`, `norm`, `exp`, `report`.
//!
//! Exit codes: 0 success/pass, 1 usage or runtime error, 2 experiment fail,
//! 3 experiment inconclusive. `SQGLAB_THREADS` caps the worker pool.

use crate::config::{self, DatumKind, RunConfig};
use crate::construction::{make_background, make_glued, make_perturbation};
use crate::error::{Error, Result};
use crate::experiments::{self, Verdict};
use crate::field::ScalarField;
use crate::norms;
use crate::snapshot;
use crate::solver::{run, SolverConfig, VelocityMode};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "sqglab",
    about = "Pseudo-spectral laboratory for the 2D surface quasi-geostrophic equation",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an initial datum and its metadata.
    Gen(GenArgs),
    /// Time-integrate a configured run, writing diagnostics and snapshots.
    Run(RunArgs),
    /// Evaluate a norm of a stored snapshot.
    Norm(NormArgs),
    /// Run a scripted experiment.
    Exp(ExpArgs),
    /// Summarize experiment reports in a directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Config file; may be omitted when --preset is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (small | medium) used when no config is given.
    #[arg(long)]
    preset: Option<String>,
    /// Datum kind for preset-only generation.
    #[arg(long, default_value = "background")]
    datum: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    /// Snapshot base path (without extension).
    snapshot: PathBuf,
    /// Norm kind: l2 | linf | lp | hs | hs-hom | ss | ck | ck-alpha.
    #[arg(long, default_value = "l2")]
    kind: String,
    /// Order beta (hs / hs-hom / ss) or p (lp).
    #[arg(long)]
    order: Option<f64>,
    /// Derivative count k for ck / ck-alpha.
    #[arg(long)]
    k: Option<usize>,
    /// Hoelder exponent alpha for ck-alpha.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct ExpArgs {
    /// Experiment name; see `exp --help` output or pass an invalid name to list.
    name: String,
    #[arg(long, default_value = "small")]
    preset: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value = "out")]
    dir: PathBuf,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { 1 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("SQGLAB_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Norm(args) => cmd_norm(args),
        Command::Exp(args) => cmd_exp(args),
        Command::Report(args) => cmd_report(args),
    }
}

/// Build the configured datum and its metadata record.
pub fn build_datum(cfg: &RunConfig) -> Result<(ScalarField, serde_json::Value)> {
    match cfg.datum {
        DatumKind::Background => {
            let field = make_background(&cfg.background, &cfg.cutoff, cfg.grid)?;
            let meta = serde_json::json!({
                "datum": "background",
                "background": cfg.background,
                "annulus": cfg.background.annulus(),
                "support_band": cfg.background.support_band(),
                "cutoff": cfg.cutoff.name(),
            });
            Ok((field, meta))
        }
        DatumKind::Perturbed => {
            let pert = cfg
                .perturbation
                .as_ref()
                .ok_or_else(|| Error::Config("perturbed datum lacks parameters".into()))?;
            let mut field = make_background(&cfg.background, &cfg.cutoff, cfg.grid)?;
            field.axpy(
                1.0,
                &make_perturbation(&cfg.background, pert, &cfg.cutoff, cfg.grid)?,
            );
            let meta = serde_json::json!({
                "datum": "perturbed",
                "background": cfg.background,
                "perturbation": pert,
                "annulus": cfg.background.annulus(),
                "cutoff": cfg.cutoff.name(),
            });
            Ok((field, meta))
        }
        DatumKind::Glued => {
            let schedule = cfg
                .gluing
                .as_ref()
                .ok_or_else(|| Error::Config("glued datum lacks a schedule".into()))?;
            let (field, meta) = make_glued(schedule, &cfg.cutoff, cfg.grid, &|_| None)?;
            Ok((
                field,
                serde_json::json!({
                    "datum": "glued",
                    "schedule": schedule,
                    "pieces": meta.pieces,
                    "strict_violations": meta.strict_violations,
                    "cutoff": cfg.cutoff.name(),
                }),
            ))
        }
    }
}

fn config_from_gen_args(args: &GenArgs) -> Result<RunConfig> {
    match (&args.config, &args.preset) {
        (Some(path), _) => config::parse_config(&std::fs::read_to_string(path)?),
        (None, Some(preset)) => config::parse_config(&format!(
            "[construction]\npreset = \"{preset}\"\ndatum = \"{}\"\n",
            args.datum
        )),
        (None, None) => Err(Error::Config(
            "gen needs --config or --preset".into(),
        )),
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let cfg = config_from_gen_args(&args)?;
    let (field, meta) = build_datum(&cfg)?;
    std::fs::create_dir_all(&args.out)?;
    let base = args.out.join(&cfg.snapshot_prefix);
    snapshot::write_snapshot(&field, &base, 0.0, &cfg.snapshot_prefix)?;
    std::fs::write(
        args.out.join("metadata.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "preset": cfg.preset_name,
            "seed": cfg.seed,
            "grid": { "n": cfg.grid.n(), "domain_length": cfg.grid.domain_length() },
            "riesz_sign": crate::spectral::riesz_sign(),
            "datum": meta,
        }))?,
    )?;
    println!(
        "wrote {} and metadata.json (n={}, sup={:.3e})",
        base.with_extension("bin").display(),
        cfg.grid.n(),
        field.max_abs()
    );
    Ok(0)
}

fn cmd_run(args: RunArgs) -> Result<i32> {
    let cfg = config::parse_config(&std::fs::read_to_string(&args.config)?)?;
    let out_dir = args
        .out
        .unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    std::fs::create_dir_all(&out_dir)?;
    let (theta0, meta) = build_datum(&cfg)?;
    let dt = match cfg.dt {
        Some(dt) => dt,
        None => crate::experiments::auto_dt_from_state(&theta0, cfg.t_end, 0.45, 8)?,
    };
    let mut solver_cfg = SolverConfig::new(dt, cfg.t_end, VelocityMode::Sqg);
    solver_cfg.dealias = cfg.dealias;
    solver_cfg.snapshot_every = cfg.snapshot_every;
    solver_cfg.diagnostics_every = cfg.diagnostics_every.max(1);
    if cfg.filter {
        solver_cfg.filter = Some(Default::default());
    }
    let out = run(&theta0, &solver_cfg)?;

    // diagnostics CSV
    let mut csv = String::new();
    writeln!(csv, "# sqglab run diagnostics v1").ok();
    writeln!(
        csv,
        "# preset={} seed={} dt={dt} riesz_sign={:+} filtered={}",
        cfg.preset_name,
        cfg.seed,
        crate::spectral::riesz_sign(),
        out.filtered
    )
    .ok();
    writeln!(csv, "# t in simulation units; norms in field units").ok();
    writeln!(
        csv,
        "t,l2,linf,mean,hm12,h1,h2,isometry_residual,supp_rmin,supp_rmax,cfl,spectral_radius"
    )
    .ok();
    for d in &out.diagnostics {
        writeln!(
            csv,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            d.t, d.l2, d.linf, d.mean, d.hm12, d.h1, d.h2, d.isometry_residual,
            d.supp_rmin, d.supp_rmax, d.cfl, d.spectral_radius
        )
        .ok();
    }
    std::fs::write(out_dir.join("diagnostics.csv"), csv)?;
    for (i, (t, snap)) in out.snapshots.iter().enumerate() {
        let base = out_dir.join(format!("{}_{i:04}", cfg.snapshot_prefix));
        snapshot::write_snapshot(snap, &base, *t, &cfg.snapshot_prefix)?;
    }
    std::fs::write(
        out_dir.join("metadata.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;
    if let Some(reason) = &out.halted {
        eprintln!("run halted early at t={:.4}: {reason}", out.t);
        return Ok(1);
    }
    println!(
        "run finished at t={:.4} ({} diagnostic rows, {} snapshots) -> {}",
        out.t,
        out.diagnostics.len(),
        out.snapshots.len(),
        out_dir.display()
    );
    Ok(0)
}

fn cmd_norm(args: NormArgs) -> Result<i32> {
    let (field, sidecar) = snapshot::read_snapshot(&args.snapshot)?;
    let order = args.order;
    let (value, method, error_bar): (f64, &str, Option<f64>) = match args.kind.as_str() {
        "l2" => (field.l2_norm(), "quadrature", None),
        "linf" => (field.max_abs(), "grid sup", None),
        "lp" => {
            let p = order.ok_or_else(|| Error::Config("lp needs --order".into()))?;
            (norms::lp_norm(&field, p)?, "quadrature", None)
        }
        "hs" => {
            let beta = order.ok_or_else(|| Error::Config("hs needs --order".into()))?;
            (
                norms::sobolev_norm(&field, beta, false)?,
                "fourier multiplier (inhomogeneous)",
                None,
            )
        }
        "hs-hom" => {
            let beta = order.ok_or_else(|| Error::Config("hs-hom needs --order".into()))?;
            (
                norms::sobolev_norm(&field, beta, true)?,
                "fourier multiplier (homogeneous)",
                None,
            )
        }
        "ss" => {
            let s = order.ok_or_else(|| Error::Config("ss needs --order".into()))?;
            (
                norms::ss_norm(&field, s)?,
                "slobodeckij autocorrelation, gaussian-calibrated",
                Some(0.0),
            )
        }
        "ck" => {
            let k = args.k.ok_or_else(|| Error::Config("ck needs --k".into()))?;
            (norms::holder_norm(&field, k, 0.0)?, "spectral derivatives", None)
        }
        "ck-alpha" => {
            let k = args.k.ok_or_else(|| Error::Config("ck-alpha needs --k".into()))?;
            let alpha = args
                .alpha
                .ok_or_else(|| Error::Config("ck-alpha needs --alpha".into()))?;
            (
                norms::holder_norm(&field, k, alpha)?,
                "spectral derivatives + quotient sup",
                None,
            )
        }
        other => {
            return Err(Error::Config(format!(
                "unknown norm kind '{other}'"
            )))
        }
    };
    let json = serde_json::json!({
        "value": value,
        "method": method,
        "error_bar": error_bar,
        "snapshot": { "name": sidecar.name, "n": sidecar.n, "time": sidecar.time },
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(0)
}

fn cmd_exp(args: ExpArgs) -> Result<i32> {
    let preset = config::preset_by_name(&args.preset)?;
    let report = experiments::run_experiment(&args.name, &preset)?;
    let dir = args.out.join(format!("{}_{}", report.name, report.preset));
    report.write(&dir)?;
    println!("{}", report.summary());
    for note in &report.notes {
        println!("  note: {note}");
    }
    println!("  report: {}", dir.join("report.json").display());
    Ok(match report.verdict {
        Verdict::Pass | Verdict::Informational => 0,
        Verdict::Fail => 2,
        Verdict::Inconclusive => 3,
    })
}

fn cmd_report(args: ReportArgs) -> Result<i32> {
    let mut worst = 0i32;
    let mut found = 0;
    let mut entries: Vec<PathBuf> = Vec::new();
    collect_reports(&args.dir, &mut entries)?;
    entries.sort();
    for path in entries {
        let text = std::fs::read_to_string(&path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let name = value["name"].as_str().unwrap_or("?");
        let preset = value["preset"].as_str().unwrap_or("?");
        let verdict = value["verdict"].as_str().unwrap_or("?");
        let checks = value["checks"].as_array().map(|a| a.len()).unwrap_or(0);
        println!("{name:<18} {preset:<8} {verdict:<14} {checks} checks  ({})", path.display());
        found += 1;
        let code = match verdict {
            "pass" | "informational" => 0,
            "inconclusive" => 3,
            _ => 2,
        };
        worst = worst.max(code);
    }
    if found == 0 {
        eprintln!("no report.json files under {}", args.dir.display());
        return Ok(1);
    }
    Ok(worst)
}

fn collect_reports(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if !dir.is_dir() {
        return Ok(());
    }
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_reports(&path, out)?;
        } else if path.file_name().map(|n| n == "report.json").unwrap_or(false) {
            out.push(path);
        }
    }
    Ok(())
}
