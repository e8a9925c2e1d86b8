use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_dfourier");

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, body).unwrap();
    p
}

fn dfourier(command: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(BIN)
        .arg(command)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("dfourier runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

const SECH2: &str = "potential.kind = sech2\npotential.params = 2, 1\ngrid.x_min = -20\ngrid.x_max = 20\ngrid.n = 401\n";

#[test]
fn boundstates_writes_one_family_for_sech2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SECH2);
    let out = tmp.path().join("out");
    let o = dfourier("boundstates", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("bound_states.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,lambda,x,e_k"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 401);
    assert!(rows.iter().all(|r| r[0] == "1"));
    assert!((rows[0][1].parse::<f64>().unwrap() + 1.0).abs() < 1e-3);
    assert_eq!(report(&out)["counts"]["bound_states"], 1);
}

#[test]
fn every_subcommand_writes_its_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SECH2}xi.max = 16\nxi.n = 1024\n"));
    for (command, file) in [
        ("eigenfunctions", "eigenfunctions.csv"),
        ("scattering", "scattering.csv"),
        ("transform", "transform.csv"),
        ("kernel", "kernel.bin"),
        ("apply", "applied.csv"),
    ] {
        let out = tmp.path().join(command);
        let o = dfourier(command, &cfg, &out, &[]);
        assert!(o.status.success(), "{command}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(file).exists(), "{command} wrote no {file}");
        let r = report(&out);
        assert_eq!(r["command"], command);
        for key in ["plancherel", "roundtrip_ffstar", "roundtrip_fstarf", "intertwining", "kernel_vs_oracle"] {
            assert!(r["defects"].get(key).is_some(), "{command} report lacks {key}");
        }
    }
    let r = report(&tmp.path().join("apply"));
    assert!(r["defects"]["route_equivalence"].as_f64().unwrap() < 1e-8);
    assert!(r["defects"]["kernel_vs_oracle"].as_f64().unwrap() < 1e-2);
    assert!(report(&tmp.path().join("transform"))["defects"]["plancherel"].as_f64().unwrap() < 1e-3);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SECH2}xi.max = 16\nxi.n = 1024\n"));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(dfourier("apply", &cfg, &a, &["--threads", "1"]).status.success());
    assert!(dfourier("apply", &cfg, &b, &["--threads", "0"]).status.success());
    for f in ["applied.csv", "report.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn free_validate_passes_at_tight_tolerance() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "potential.kind = zero\ngrid.x_min = -40\ngrid.x_max = 40\ngrid.n = 2000\nxi.max = 8\nxi.n = 256\n",
    );
    let out = tmp.path().join("out");
    let o = dfourier("validate", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    for key in ["plancherel", "roundtrip_ffstar", "roundtrip_fstarf", "intertwining"] {
        assert!(r["defects"][key].as_f64().unwrap() < 1e-6, "{key}");
    }
}

#[test]
fn tolerance_failure_exits_one() {
    // A coarse step spoils the finite-difference Laplacian and the oracle spectrum.
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "potential.kind = zero\ngrid.x_min = -40\ngrid.x_max = 40\ngrid.n = 201\n",
    );
    let out = tmp.path().join("out");
    let o = dfourier("validate", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn masked_band_support_exits_three() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!("{SECH2}multiplier.kind = tent\nmultiplier.center = 0.01\nmultiplier.radius = 0.0099\n"),
    );
    let o = dfourier("kernel", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluded band"));
}

#[test]
fn narrow_window_exits_three() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &SECH2.replace("-20", "-3").replace("= 20", "= 3"));
    let o = dfourier("boundstates", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = dfourier("validate", &tmp.path().join("missing.cfg"), &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(tmp.path(), &format!("{SECH2}grid.spacing = 0.1\n"));
    assert_eq!(dfourier("validate", &cfg, &out, &[]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), &SECH2.replace("sech2", "morse"));
    assert_eq!(dfourier("validate", &cfg, &out, &[]).status.code(), Some(2));
    assert_eq!(dfourier("frobnicate", &cfg, &out, &[]).status.code(), Some(2));
}
