use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use slabdft::tf::dirac_closed_form;
use slabdft::{make_grid, tf_constant, ChargeComponent};
use slabdft_cli::{load_config, Model};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_slabdft"));
    cmd.env_remove("SLABDFT_OUT").env("RUST_LOG", "warn");
    cmd
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn named_case_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"case":"case1"}"#).unwrap();
    let c = load_config(&path).unwrap();
    assert_eq!(c.model, Model::Both);
    assert_eq!((c.grid.a, c.grid.n), (15.0, 5001));
    assert_eq!(
        c.charge_profile().components,
        vec![ChargeComponent::Box {
            lo: -2.0,
            hi: 2.0,
            height: 1.0
        }]
    );
}

#[test]
fn missing_config_names_the_path() {
    let err = load_config(Path::new("/nonexistent/run.json")).unwrap_err();
    assert!(format!("{err:#}").contains("/nonexistent/run.json"));
}

#[test]
fn even_node_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"grid":{"n":5000}}"#).unwrap();
    let msg = format!("{:#}", load_config(&path).unwrap_err());
    assert!(msg.contains("grid") && msg.contains("odd"), "{msg}");
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(
        &path,
        "{\n  \"model\": \"tf\",\n  \"grid\": {\"a\": \"wide\"}\n}",
    )
    .unwrap();
    let msg = format!("{:#}", load_config(&path).unwrap_err());
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn both_models_write_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args([
            "--case", "case1", "--grid-a", "10", "--grid-n", "801", "--svg", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let r = read_json(&out.join("results.json"));
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "model",
        "grid",
        "profile",
        "tf",
        "rhf",
        "comparison",
        "checks",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(r["unconverged"], false);
    assert_eq!(r["checks"]["energy_ordering"], true);
    assert_eq!(r["checks"]["lieb_thirring_all_iterates"], true);
    let weights = r["rhf"]["weights"].as_array().unwrap();
    assert!(weights[0].as_f64().unwrap() > 1.0);

    let (header, rows) = read_csv(&out.join("density.csv"));
    assert_eq!(
        header,
        ["x", "mu", "rho_tf", "rho_rhf", "phi_tf", "phi_rhf"]
    );
    assert_eq!(rows.len(), 801);
    let nodes = make_grid(10.0, 801).unwrap().nodes();
    for (row, x) in rows.iter().zip(&nodes) {
        assert_eq!(row[0], *x);
    }
    let (header, rows) = read_csv(&out.join("diff.csv"));
    assert_eq!(header, ["x", "drho", "dphi"]);
    assert_eq!(rows.len(), 801);
    assert!(out.join("plot_density.svg").exists());
    assert!(out.join("plot_diff.svg").exists());
}

#[test]
fn single_model_omits_other_columns() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--case", "case3", "--model", "rhf", "--grid-a", "10", "--grid-n", "401",
        ])
        .env("SLABDFT_OUT", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let (header, _) = read_csv(&dir.path().join("density.csv"));
    assert_eq!(header, ["x", "mu", "rho_rhf", "phi_rhf"]);
    assert!(!dir.path().join("diff.csv").exists());
    let r = read_json(&dir.path().join("results.json"));
    assert!(r["tf"].is_null() && r["comparison"].is_null());
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"case":"case2","model":"both","grid":{"a":10,"n":401}}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let status = bin()
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            fs::read(out.join("results.json")).unwrap(),
            fs::read(out.join("density.csv")).unwrap(),
        ));
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn non_convergence_exits_nonzero_and_flags_results() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--case",
            "case1",
            "--grid-a",
            "8",
            "--grid-n",
            "201",
            "--max-iter",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let r = read_json(&dir.path().join("results.json"));
    assert_eq!(r["unconverged"], true);
    assert_eq!(r["tf"]["unconverged"], true);
}

#[test]
fn invalid_flags_fail_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["--grid-n", "100", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("grid"));
    assert!(!dir.path().join("results.json").exists());
}

#[test]
fn dirac_density_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--case", "dirac", "--model", "tf", "--grid-n", "2501", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = read_csv(&dir.path().join("density.csv"));
    assert_eq!(header[2], "rho_tf");
    let grid = make_grid(15.0, 2501).unwrap();
    let exact = dirac_closed_form(1.0, &grid, tf_constant(3));
    let mut err = vec![0.0; grid.len()];
    let mut mass = vec![0.0; grid.len()];
    for (i, row) in rows.iter().enumerate() {
        if row[0].abs() >= 1.0 {
            err[i] = (row[2] - exact.at(i)).abs();
            mass[i] = exact.at(i);
        }
    }
    let rel = grid.integrate_values(&err) / grid.integrate_values(&mass);
    assert!(rel <= 0.02, "relative L1 error {rel}");
}
