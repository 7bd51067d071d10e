//! End-to-end tests of the `zkb` binary: exit codes, file formats and
//! manifest integrity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;
use zkb_harness::series::{read_series, COLUMNS};
use zkb_harness::Manifest;

fn zkb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkb"))
        .args(args)
        .output()
        .expect("spawn zkb")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Short clean decay run on a moderate box.
fn small_config() -> Value {
    json!({
        "schema": 1,
        "geometry": { "B": "pi", "Lx": 40, "Nx": 240, "Ny": 8, "b": "auto" },
        "solver": { "dt": 0.01, "t_end": 12, "output_every": 20, "dissipation": "per_step" },
        "initial": { "kind": "gaussian_mode", "norm": 0.16875, "s": 2 }
    })
}

fn write_config(dir: &Path, name: &str, doc: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path
}

fn simulate(dir: &Path, doc: &Value, run: &str) -> (Output, PathBuf) {
    let cfg = write_config(dir, &format!("{run}.json"), doc);
    let out = dir.join(run);
    let o = zkb(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (o, out)
}

fn is_sci17(field: &str) -> bool {
    let (mantissa, exp) = match field.split_once('e') {
        Some(p) => p,
        None => return false,
    };
    let digits = mantissa.trim_start_matches('-');
    let (int, frac) = match digits.split_once('.') {
        Some(p) => p,
        None => return false,
    };
    int.len() == 1
        && frac.len() == 16
        && int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        && exp.parse::<i32>().is_ok()
}

#[test]
fn constants_json_and_errors() {
    let o = zkb(&["constants", "--B", "pi"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (key, expect) in [
        ("b_star", 0.1),
        ("chi", 0.025),
        ("reg_threshold", 0.375),
        ("weak_threshold", 0.1875),
    ] {
        assert!((v[key].as_f64().unwrap() - expect).abs() < 1e-14, "{key}");
    }
    let o = zkb(&["constants", "--B", "pi/2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["b_star"].as_f64().unwrap() - 0.289898).abs() < 1e-6);
    let o = zkb(&["constants", "--B", "-1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("domain error"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&zkb(&[])), 1);
    assert_eq!(code(&zkb(&["frobnicate"])), 1);
    assert_eq!(code(&zkb(&["simulate", "--config", "/nonexistent.json", "--out", "/tmp/x"])), 1);
    let o = zkb(&["verify", "--suite", "gn", "--samples", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("samples must be ≥ 1"), "{}", stderr(&o));
    assert_eq!(code(&zkb(&["verify", "--suite", "poincare", "--samples", "1"])), 1);
    assert_eq!(code(&zkb(&["cdep", "--eps", "-1", "--out", "/tmp/x"])), 1);
}

#[test]
fn unknown_key_named_in_error() {
    let dir = TempDir::new().unwrap();
    let mut doc = small_config();
    doc["geometry"]["Nz"] = json!(8);
    let (o, out) = simulate(dir.path(), &doc, "bad");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown key: Nz"), "{}", stderr(&o));
    assert!(!out.exists());
    let mut doc = small_config();
    doc["solver"]["dt"] = json!("tiny");
    let (o, _) = simulate(dir.path(), &doc, "bad2");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("solver.dt"), "{}", stderr(&o));
}

#[test]
fn unwritable_output_exits_one() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_config());
    let o = zkb(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.join("run").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn clean_run_files_and_fit() {
    let dir = TempDir::new().unwrap();
    let (o, run) = simulate(dir.path(), &small_config(), "run");
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // CSV: fixed header, 17 significant digits, strictly decreasing w_l2.
    let text = fs::read_to_string(run.join("series.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
    for line in lines {
        assert!(line.split(',').all(is_sci17), "{line}");
    }
    let samples = read_series(&run.join("series.csv")).unwrap();
    assert_eq!(samples.len(), 61);
    assert!(samples.windows(2).all(|w| w[1].w_l2 < w[0].w_l2));

    // Manifest: config copy, resolved weight, checksums that validate.
    let m = Manifest::read_verified(&run).unwrap();
    assert_eq!(m.status, "clean");
    assert_eq!(m.command, "simulate");
    assert!((m.resolved["b"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert_eq!(m.resolved["b_auto"], json!(true));
    let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["config.json", "series.csv"]);
    assert!(m.energy_residual.unwrap() < 1e-4);
    assert!(m.started <= m.finished);

    let o = zkb(&["fit-decay", "--out", run.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("PASS"));
    let o = zkb(&["fit-decay", "--run", run.to_str().unwrap(), "--norm", "w_h1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = zkb(&["fit-decay", "--out", run.to_str().unwrap(), "--t0", "8", "--t1", "2"]);
    assert_eq!(code(&o), 1);
    let o = zkb(&["fit-decay", "--out", run.to_str().unwrap(), "--norm", "h7"]);
    assert_eq!(code(&o), 1);

    // Tampering is detected on re-read.
    let csv = run.join("series.csv");
    let mut text = fs::read_to_string(&csv).unwrap();
    text.push_str(&text.lines().last().unwrap().to_string());
    text.push('\n');
    fs::write(&csv, text).unwrap();
    assert!(Manifest::read_verified(&run).is_err());
    let o = zkb(&["fit-decay", "--out", run.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));
}

#[test]
fn stored_config_reproduces_run_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let (o, first) = simulate(dir.path(), &small_config(), "first");
    assert_eq!(code(&o), 0);
    let second = dir.path().join("second");
    let o = zkb(&[
        "simulate",
        "--config",
        first.join("config.json").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(first.join("series.csv")).unwrap(),
        fs::read(second.join("series.csv")).unwrap()
    );
    assert_eq!(
        fs::read(first.join("config.json")).unwrap(),
        fs::read(second.join("config.json")).unwrap()
    );
}

#[test]
fn zero_amplitude_gives_zeros() {
    let dir = TempDir::new().unwrap();
    let mut doc = small_config();
    doc["initial"] = json!({ "kind": "gaussian_mode", "amplitude": 0, "s": 2 });
    doc["solver"]["t_end"] = json!(1);
    let (o, run) = simulate(dir.path(), &doc, "zero");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for s in read_series(&run.join("series.csv")).unwrap() {
        assert_eq!([s.l2, s.diss_cum, s.w_l2, s.w_h1, s.sup_w, s.tail], [0.0; 6]);
    }
}

#[test]
fn stiff_step_blows_up_with_exit_three() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "schema": 1,
        "geometry": { "B": "pi", "Lx": 15, "Nx": 128, "Ny": 8 },
        "solver": { "dt": 1, "t_end": 20 },
        "initial": { "kind": "gaussian_mode", "norm": 30, "s": 2 }
    });
    let (o, run) = simulate(dir.path(), &doc, "stiff");
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    let m = Manifest::read_verified(&run).unwrap();
    assert_eq!(m.status, "blow-up");
    assert!(m.blow_up_time.unwrap() > 0.0);
    assert!(m.energy_residual.is_none());
    assert!(!m.warnings.is_empty());
    assert_eq!(code(&zkb(&["fit-decay", "--out", run.to_str().unwrap()])), 3);
}

#[test]
fn periodic_data_is_flagged_contaminated() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "schema": 1,
        "geometry": { "B": "pi", "Lx": 10, "Nx": 64, "Ny": 4 },
        "solver": { "dt": 0.01, "t_end": 1, "output_every": 10 },
        "initial": { "kind": "single_mode", "amplitude": 0.1, "k": std::f64::consts::PI / 10.0 }
    });
    let (o, run) = simulate(dir.path(), &doc, "periodic");
    assert_eq!(code(&o), 2);
    let m = Manifest::read_verified(&run).unwrap();
    assert_eq!(m.status, "contaminated");
    assert_eq!(m.contamination_time, Some(0.0));
    assert_eq!(code(&zkb(&["fit-decay", "--out", run.to_str().unwrap()])), 2);
}

#[test]
fn snapshots_are_listed_in_manifest() {
    let dir = TempDir::new().unwrap();
    let mut doc = small_config();
    doc["solver"]["t_end"] = json!(0.4);
    doc["solver"]["snapshots"] = json!(true);
    let (o, run) = simulate(dir.path(), &doc, "snap");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = Manifest::read_verified(&run).unwrap();
    let snaps: Vec<_> = m.files.iter().filter(|f| f.name.starts_with("snapshots/")).collect();
    assert_eq!(snaps.len(), 3);
    assert_eq!(m.report["snapshot_times"].as_array().unwrap().len(), 3);
    let text = fs::read_to_string(run.join(&snaps[0].name)).unwrap();
    assert!(text.starts_with("x,y,u\n"));
    assert_eq!(text.lines().count(), 1 + 240 * 8);
}

#[test]
fn inequality_suites_report_worst_margin() {
    for suite in ["steklov", "gn", "sup"] {
        let o = zkb(&["verify", "--suite", suite, "--samples", "100", "--seed", "7"]);
        assert_eq!(code(&o), 0, "{suite}: {}", stdout(&o));
        let out = stdout(&o);
        let json_end = out.rfind('}').unwrap();
        let v: Value = serde_json::from_str(&out[..=json_end]).unwrap();
        assert_eq!(v["failures"], json!(0));
        assert!(v["worst"]["margin"].as_f64().unwrap() >= 0.0, "{suite}");
        assert!(out.contains(&format!("PASS {suite}")));
    }
}

#[test]
fn energy_suite_on_small_config() {
    let dir = TempDir::new().unwrap();
    let mut doc = small_config();
    doc["solver"]["dt"] = json!(0.002);
    doc["solver"]["t_end"] = json!(2);
    doc["solver"]["output_every"] = json!(50);
    let cfg = write_config(dir.path(), "e.json", &doc);
    let runs = dir.path().join("energy");
    let o = zkb(&[
        "verify",
        "--suite",
        "energy",
        "--samples",
        "2",
        "--seed",
        "0",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        runs.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    for n in 0..2 {
        let m = Manifest::read_verified(&runs.join(format!("run_{n:03}"))).unwrap();
        assert!(m.energy_residual.unwrap() < 1e-6);
    }
}

#[test]
fn sweep_summary_and_scope() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "t.json", &small_config());
    let out = dir.path().join("sweep");
    let o = zkb(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--B",
        "pi,2*pi",
        "--amplitudes",
        "0.5,2.5",
        "--workers",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let mut reader = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let factor: f64 = row[col("amplitude_factor")].parse().unwrap();
        if factor > 2.0 {
            assert_eq!(&row[col("scope")], "outside theorem scope");
            assert_eq!(&row[col("verdict")], "informational");
        } else {
            assert_eq!(&row[col("scope")], "in_scope");
            assert_eq!(&row[col("verdict")], "pass");
        }
        assert!(is_sci17(&row[col("fitted_rate")]));
    }
    let m = Manifest::read_verified(&out).unwrap();
    assert_eq!(m.files.len(), 2 + rows.len());
    for row in &rows {
        Manifest::read_verified(&out.join(&row[col("dir")])).unwrap();
    }

    // The single reference cell agrees with fit-decay on the same run.
    let ref_dir = out.join("cell_000");
    let fit = zkb(&["fit-decay", "--out", ref_dir.to_str().unwrap()]);
    assert_eq!(code(&fit), 0);
    let rate_line = stdout(&fit);
    let v: Value = serde_json::from_str(&rate_line[..=rate_line.rfind('}').unwrap()]).unwrap();
    let summary_rate: f64 = rows[0][col("fitted_rate")].parse().unwrap();
    assert_eq!(v["rate"].as_f64().unwrap(), summary_rate);

    // Worker count does not change results.
    let serial = dir.path().join("serial");
    let o = zkb(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--B", "pi,2*pi", "--amplitudes", "0.5,2.5",
        "--workers", "1", "--out", serial.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(out.join("summary.csv")).unwrap(),
        fs::read(serial.join("summary.csv")).unwrap()
    );
}

#[test]
fn sweep_rejects_empty_lists() {
    let o = zkb(&["sweep", "--B", ",", "--out", "/tmp/never"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn cdep_small_and_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_config());
    let out = dir.path().join("cdep");
    let o = zkb(&["cdep", "--config", cfg.to_str().unwrap(), "--eps", "1e-3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("verdict: pass"));
    let m = Manifest::read_verified(&out).unwrap();
    assert_eq!(m.command, "cdep");
    let ratio = m.report["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() <= 0.1);
    assert!(out.join("cdep.csv").exists());
    // The base run doubles as an ordinary run directory.
    assert_eq!(code(&zkb(&["fit-decay", "--out", out.to_str().unwrap()])), 0);

    let o = zkb(&["cdep", "--config", cfg.to_str().unwrap(), "--eps", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("identical"));
}
