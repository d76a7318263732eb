//! Command-line front end: run either solver on a preset or config file,
//! compare them, run convergence and quadrature studies, and emit data files
//! plus a plotting script.
//!
//! Exit codes: 0 ok, 2 config error, 3 runtime instability (NaN detected),
//! 4 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use twoscale_pic::analysis::BeamMoments;
use twoscale_pic::config::{parse_config, serialize_config, H1Kind, Ratio, ScenarioConfig};
use twoscale_pic::driver::{run_reference, run_two_scale, RunOutput};
use twoscale_pic::error::Error;
use twoscale_pic::field::{solve_field, DensityTable, RadialGrid};
use twoscale_pic::output::{plot_script, write_run_files};
use twoscale_pic::quadrature::PeriodicQuadrature;
use twoscale_pic::resonance::{classify_resonance, ResonanceClass};
use twoscale_pic::scenarios::{preset, PRESET_NAMES};
use twoscale_pic::twoscale::h1_mean_drift;
use twoscale_pic::{density_discrepancy, moments};

#[derive(Parser)]
#[command(
    name = "tspic",
    about = "Two-scale PIC solver for a beam in a rapidly oscillating focusing channel",
    version
)]
struct Cli {
    /// Cap worker parallelism (0 = one thread per core). Results are
    /// identical for any value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the slow profile with the two-scale pusher
    TwoScale(RunArgs),
    /// Integrate the stiff system with the conventional fine-step pusher
    Reference(RunArgs),
    /// Run both solvers on one scenario and compare reconstructed beams
    Compare {
        #[command(flatten)]
        args: RunArgs,
        /// Require at least this wall-clock speedup of the two-scale run
        /// (soft local benchmark, not meant for CI)
        #[arg(long)]
        assert_speedup: Option<f64>,
    },
    /// Time-order sweep on linear-resonant-n2 and grid-order sweep on the
    /// field solver
    Convergence,
    /// Minimal exact quadrature node counts for the resonant mean drifts
    QuadratureCheck,
    /// Write a named preset as an editable config file
    EmitPreset {
        /// One of the named presets
        name: String,
        /// Output path (defaults to <name>.cfg)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Named preset
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a flat key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set t_end=3.0 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory for snapshot and moments CSV files
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also emit a self-contained matplotlib scatter script
    #[arg(long)]
    plot_script: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<(String, ScenarioConfig), Error> {
        let (name, base) = match (&self.preset, &self.config) {
            (Some(name), None) => (name.clone(), preset(name)?.config),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)?;
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "custom".to_string());
                (stem, parse_config(&text)?)
            }
            _ => {
                return Err(Error::config(
                    "exactly one of --preset or --config is required",
                ))
            }
        };
        if self.set.is_empty() {
            return Ok((name, base));
        }
        let mut text = serialize_config(&base);
        for kv in &self.set {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            text.push_str(&format!("{} = {}\n", key.trim(), value.trim()));
        }
        Ok((name, parse_config(&text)?))
    }
}

fn moments_json(m: &BeamMoments) -> serde_json::Value {
    json!({
        "mean_r": m.mean_r,
        "mean_v": m.mean_v,
        "r2": m.r2,
        "v2": m.v2,
        "rv": m.rv,
        "emittance": m.emittance,
        "second_moment_sum": m.second_moment_sum,
        "weight_sum": m.weight_sum,
    })
}

fn run_summary(scenario: &str, out: &RunOutput) -> serde_json::Value {
    let final_moments = out
        .moments
        .last()
        .map(|(_, m)| moments_json(m))
        .unwrap_or(serde_json::Value::Null);
    json!({
        "scenario": scenario,
        "solver": out.solver.as_str(),
        "steps": out.steps,
        "wall_s": out.wall_seconds,
        "final_moments": final_moments,
        "overflow": out.overflow_count,
    })
}

fn emit_plot_script(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("plot_snapshots.py"), plot_script())?;
    Ok(())
}

fn cmd_run(args: &RunArgs, two_scale: bool) -> Result<(), Error> {
    let (scenario, config) = args.resolve()?;
    let out = if two_scale {
        run_two_scale(&config)?
    } else {
        run_reference(&config)?
    };
    write_run_files(&args.out_dir, &scenario, &out)?;
    if args.plot_script {
        emit_plot_script(&args.out_dir)?;
    }
    println!("{}", run_summary(&scenario, &out));
    Ok(())
}

fn cmd_compare(args: &RunArgs, assert_speedup: Option<f64>) -> Result<(), Error> {
    let (scenario, config) = args.resolve()?;
    let ts = run_two_scale(&config)?;
    let rf = run_reference(&config)?;
    write_run_files(&args.out_dir, &scenario, &ts)?;
    write_run_files(&args.out_dir, &scenario, &rf)?;
    if args.plot_script {
        emit_plot_script(&args.out_dir)?;
    }

    let grid = RadialGrid::new(config.grid_nodes, config.grid_extent)?;
    let mut rows = String::from("t,discrepancy,rms_r_two_scale,rms_r_reference,d_r2,d_v2\n");
    let mut max_discrepancy: f64 = 0.0;
    assert_eq!(
        ts.snapshots.len(),
        rf.snapshots.len(),
        "both solvers snapshot the same breakpoints"
    );
    for (a, b) in ts.snapshots.iter().zip(&rf.snapshots) {
        debug_assert!((a.t - b.t).abs() <= 1e-12);
        let d = density_discrepancy(&b.ensemble, &a.ensemble, &grid)?;
        max_discrepancy = max_discrepancy.max(d);
        let ma = moments(&a.ensemble);
        let mb = moments(&b.ensemble);
        rows.push_str(&format!(
            "{},{},{},{},{},{}\n",
            a.t,
            d,
            ma.r2.sqrt(),
            mb.r2.sqrt(),
            (ma.r2 - mb.r2).abs(),
            (ma.v2 - mb.v2).abs(),
        ));
    }
    fs::create_dir_all(&args.out_dir)?;
    fs::write(args.out_dir.join(format!("{scenario}_compare.csv")), rows)?;

    let speedup = rf.wall_seconds / ts.wall_seconds.max(1e-12);
    let mut summary = run_summary(&scenario, &ts);
    summary["solver"] = json!("compare");
    summary["max_discrepancy"] = json!(max_discrepancy);
    summary["reference_steps"] = json!(rf.steps);
    summary["reference_wall_s"] = json!(rf.wall_seconds);
    summary["speedup"] = json!(speedup);
    println!("{summary}");

    if let Some(required) = assert_speedup {
        if speedup < required {
            eprintln!("speedup {speedup:.2} below required {required:.2}");
            std::process::exit(1);
        }
    }
    Ok(())
}

/// Least-squares slope of log(err) against log(h).
fn fitted_order(hs: &[f64], errs: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Max deviation of the two-scale run from the resonant rotation
/// Q(t) = Q0 cos(t/4) - U0 sin(t/4) at t_end, for one dt.
fn resonant_error(dt: f64) -> Result<f64, Error> {
    let mut config = preset("linear-resonant-n2")?.config;
    config.dt = dt;
    config.n_particles = 64;
    let initial =
        twoscale_pic::sample_initial(&config, &mut twoscale_pic::sampling_rng(config.seed))?;
    let out = run_two_scale(&config)?;
    let t = config.t_end;
    let (sin_t, cos_t) = (t / 4.0).sin_cos();
    let mut err: f64 = 0.0;
    for k in 0..initial.len() {
        let (q0, u0) = (initial.pos[k], initial.vel[k]);
        let want_q = q0 * cos_t - u0 * sin_t;
        let want_u = q0 * sin_t + u0 * cos_t;
        err = err
            .max((out.final_ensemble.pos[k] - want_q).abs())
            .max((out.final_ensemble.vel[k] - want_u).abs());
    }
    Ok(err)
}

/// Max field error for the smooth source 1 - (q/a)^2 on one grid level.
fn field_error(nodes: usize) -> Result<f64, Error> {
    let a = 0.7f64;
    let grid = RadialGrid::new(nodes, 3.0)?;
    let values: Vec<f64> = grid
        .nodes()
        .map(|q| {
            let s = q.abs();
            if s <= a {
                s * (1.0 - (s / a).powi(2)) / 2.0
            } else {
                0.0
            }
        })
        .collect();
    let density = DensityTable {
        grid,
        values,
        overflow_count: 0,
        overflow_weight: 0.0,
    };
    let field = solve_field(&density);
    let exact = |q: f64| {
        let s = q.abs();
        let e = if s <= a {
            s / 2.0 - s.powi(3) / (4.0 * a * a)
        } else {
            a * a / (4.0 * s.max(1e-300))
        };
        if q < 0.0 {
            -e
        } else {
            e
        }
    };
    let mut err: f64 = 0.0;
    for (i, &e) in field.values.iter().enumerate() {
        let q = grid.node(i);
        if q != 0.0 {
            err = err.max((e - exact(q)).abs());
        }
    }
    Ok(err)
}

fn cmd_convergence() -> Result<(), Error> {
    let dts = [0.4, 0.2, 0.1, 0.05];
    let mut errs = Vec::new();
    for &dt in &dts {
        let err = resonant_error(dt)?;
        println!("dt = {dt}: trajectory error = {err:.3e}");
        errs.push(err);
    }
    let time_order = fitted_order(&dts, &errs);
    println!("fitted time order = {time_order:.2}");

    let levels = [33usize, 65, 129, 257];
    let mut field_errs = Vec::new();
    let mut hs = Vec::new();
    for &nodes in &levels {
        let err = field_error(nodes)?;
        let h = 6.0 / (nodes - 1) as f64;
        println!("grid nodes = {nodes}: field error = {err:.3e}");
        field_errs.push(err);
        hs.push(h);
    }
    let grid_order = fitted_order(&hs, &field_errs);
    println!("fitted grid order = {grid_order:.2}");

    println!(
        "{}",
        json!({"time_order": time_order, "grid_order": grid_order})
    );
    Ok(())
}

/// Smallest p such that the mean drift is exact (<= 1e-12 against a dense
/// rule) for every node count from p upward.
fn minimal_stable_p(h1: &H1Kind, sweep_to: usize) -> Result<usize, Error> {
    let res = classify_resonance(h1)?;
    let period = match res {
        ResonanceClass::Resonant {
            effective_period, ..
        } => effective_period,
        ResonanceClass::NonResonant => {
            return Err(Error::config("quadrature check needs a resonant field"))
        }
    };
    let dense = PeriodicQuadrature::build(2048, period)?;
    let probes = [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8)];
    let exact_at = |p: usize| -> Result<bool, Error> {
        let quad = PeriodicQuadrature::build(p, period)?;
        for &(q, u) in &probes {
            let got = h1_mean_drift(h1, q, u, &quad, &res);
            let want = h1_mean_drift(h1, q, u, &dense, &res);
            if (got.0 - want.0).abs() > 1e-12 || (got.1 - want.1).abs() > 1e-12 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut minimal = sweep_to;
    for p in (1..=sweep_to).rev() {
        if exact_at(p)? {
            minimal = p;
        } else {
            break;
        }
    }
    Ok(minimal)
}

fn cmd_quadrature_check() -> Result<(), Error> {
    let mut report = serde_json::Map::new();
    for n in [2u32, 7] {
        let h1 = H1Kind::CosSquared(Ratio::new(n, 1)?);
        let p = minimal_stable_p(&h1, 64)?;
        println!("H1 = cos^2({n} sigma): minimal exact p = {p}");
        report.insert(format!("cos2_{n}"), json!(p));
    }
    println!("{}", serde_json::Value::Object(report));
    Ok(())
}

fn cmd_emit_preset(name: &str, out: Option<&Path>) -> Result<(), Error> {
    let p = preset(name)?;
    let default_path = PathBuf::from(format!("{name}.cfg"));
    let path = out.unwrap_or(&default_path);
    let mut text = format!("# preset: {name}\n");
    text.push_str(&serialize_config(&p.config));
    fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::TwoScale(args) => cmd_run(args, true),
        Command::Reference(args) => cmd_run(args, false),
        Command::Compare {
            args,
            assert_speedup,
        } => cmd_compare(args, *assert_speedup),
        Command::Convergence => cmd_convergence(),
        Command::QuadratureCheck => cmd_quadrature_check(),
        Command::EmitPreset { name, out } => cmd_emit_preset(name, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("thread pool setup failed: {e}");
            return ExitCode::from(2);
        }
    }

    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            eprintln!("presets: {}", PRESET_NAMES.join(", "));
            ExitCode::from(2)
        }
        Err(e @ Error::Instability { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e @ Error::Io(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}
