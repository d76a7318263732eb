//! End-to-end checks of the command-line interface: exit codes, JSON
//! summaries, file outputs and byte-level reproducibility.

#![cfg(feature = "cli")]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use twoscale_pic::config::parse_config;
use twoscale_pic::scenarios::preset;

fn tspic(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tspic"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tspic-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn emit_preset_round_trips() {
    let dir = temp_dir("emit");
    let out = tspic(&["emit-preset", "semi-gaussian-eps001"], &dir);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.join("semi-gaussian-eps001.cfg")).unwrap();
    let config = parse_config(&text).unwrap();
    assert_eq!(config, preset("semi-gaussian-eps001").unwrap().config);
}

#[test]
fn unknown_preset_exits_with_config_code() {
    let dir = temp_dir("badpreset");
    let out = tspic(&["two-scale", "--preset", "nope"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_file_exits_with_config_code() {
    let dir = temp_dir("badcfg");
    fs::write(dir.join("bad.cfg"), "epsilon = 0.1\nbogus_key = 1\n").unwrap();
    let out = tspic(&["two-scale", "--config", "bad.cfg"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus_key"), "stderr: {err}");
}

#[test]
fn missing_config_file_exits_with_io_code() {
    let dir = temp_dir("noio");
    let out = tspic(&["two-scale", "--config", "absent.cfg"], &dir);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn runaway_scenario_exits_with_instability_code() {
    let dir = temp_dir("nan");
    let out = tspic(
        &[
            "two-scale",
            "--preset",
            "defocusing-cos2t",
            "--set",
            "self_field=false",
            "--set",
            "n_particles=4",
            "--set",
            "t_end=4000",
            "--set",
            "dt=0.5",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("instability"), "stderr: {err}");
}

#[test]
fn two_scale_run_writes_files_and_json_summary() {
    let dir = temp_dir("run");
    let out = tspic(
        &[
            "two-scale",
            "--preset",
            "linear-nonresonant",
            "--set",
            "n_particles=200",
            "--out-dir",
            "out",
            "--plot-script",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is one JSON object");
    assert_eq!(summary["scenario"], "linear-nonresonant");
    assert_eq!(summary["solver"], "two-scale");
    assert_eq!(summary["overflow"], 0);
    assert!(summary["steps"].as_u64().unwrap() > 0);
    assert!(summary["wall_s"].as_f64().unwrap() >= 0.0);
    assert!(summary["final_moments"]["r2"].as_f64().unwrap() > 0.0);

    let out_dir = dir.join("out");
    assert!(out_dir
        .join("linear-nonresonant_two-scale_moments.csv")
        .exists());
    assert!(out_dir
        .join("linear-nonresonant_two-scale_snapshot_t6.28.csv")
        .exists());
    assert!(out_dir.join("plot_snapshots.py").exists());

    let snapshot =
        fs::read_to_string(out_dir.join("linear-nonresonant_two-scale_snapshot_t6.28.csv"))
            .unwrap();
    let mut lines = snapshot.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# t = 6.28, tau = "));
    assert!(header.contains("representation = physical"));
    assert_eq!(lines.next().unwrap(), "coord,vel,weight");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let mut cols = l.split(',');
            (
                cols.next().unwrap().parse().unwrap(),
                cols.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 200);

    // the slow profile is stationary here, so the written beam must be the
    // initial one rotated by t / epsilon
    let mut config = preset("linear-nonresonant").unwrap().config;
    config.n_particles = 200;
    let initial =
        twoscale_pic::sample_initial(&config, &mut twoscale_pic::sampling_rng(config.seed))
            .unwrap();
    let rotated = twoscale_pic::reconstruct(&initial, config.t_end / config.epsilon);
    for (k, &(r, v)) in rows.iter().enumerate() {
        assert!((r - rotated.pos[k]).abs() <= 1e-12);
        assert!((v - rotated.vel[k]).abs() <= 1e-12);
    }
}

#[test]
fn identical_invocations_produce_byte_identical_files() {
    let dir = temp_dir("repro");
    for sub in ["a", "b"] {
        let out = tspic(
            &[
                "two-scale",
                "--preset",
                "linear-resonant-n2",
                "--set",
                "n_particles=100",
                "--set",
                "t_end=0.5",
                "--out-dir",
                sub,
            ],
            &dir,
        );
        assert!(out.status.success());
    }
    for name in [
        "linear-resonant-n2_two-scale_moments.csv",
        "linear-resonant-n2_two-scale_snapshot_t0.5.csv",
    ] {
        let a = fs::read(dir.join("a").join(name)).unwrap();
        let b = fs::read(dir.join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn threads_flag_does_not_change_results() {
    let dir = temp_dir("threads");
    let run = |threads: &str, sub: &str| {
        let out = tspic(
            &[
                "--threads",
                threads,
                "two-scale",
                "--preset",
                "semi-gaussian-eps001",
                "--set",
                "n_particles=512",
                "--set",
                "t_end=0.2",
                "--out-dir",
                sub,
            ],
            &dir,
        );
        assert!(out.status.success());
    };
    run("1", "t1");
    run("4", "t4");
    let name = "semi-gaussian-eps001_two-scale_snapshot_t0.2.csv";
    let a = fs::read(dir.join("t1").join(name)).unwrap();
    let b = fs::read(dir.join("t4").join(name)).unwrap();
    assert_eq!(a, b, "thread count changed the output bytes");
}

#[test]
fn compare_reports_discrepancy() {
    let dir = temp_dir("compare");
    let out = tspic(
        &[
            "compare",
            "--preset",
            "semi-gaussian-eps001",
            "--set",
            "n_particles=2000",
            "--set",
            "t_end=0.5",
            "--out-dir",
            "out",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["solver"], "compare");
    let d = summary["max_discrepancy"].as_f64().unwrap();
    assert!((0.0..0.5).contains(&d), "max_discrepancy = {d}");
    assert!(summary["speedup"].as_f64().unwrap() > 0.0);
    assert!(dir.join("out/semi-gaussian-eps001_compare.csv").exists());
}

#[test]
fn quadrature_check_reports_minimal_node_counts() {
    let dir = temp_dir("quad");
    let out = tspic(&["quadrature-check"], &dir);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("cos^2(2 sigma): minimal exact p = 7"),
        "{text}"
    );
    assert!(
        text.contains("cos^2(7 sigma): minimal exact p = 17"),
        "{text}"
    );
}

#[test]
fn convergence_reports_fourth_order_in_time_and_second_in_space() {
    let dir = temp_dir("conv");
    let out = tspic(&["convergence"], &dir);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let json_line = text.lines().last().unwrap();
    let report: serde_json::Value = serde_json::from_str(json_line).unwrap();
    let time_order = report["time_order"].as_f64().unwrap();
    let grid_order = report["grid_order"].as_f64().unwrap();
    assert!(
        (3.8..=4.2).contains(&time_order),
        "time order = {time_order}"
    );
    assert!(grid_order >= 1.9, "grid order = {grid_order}");
}
