use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_unsharp-lab");

fn lab(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN)
        .args(args)
        .env("UNSHARP_OUT_DIR", dir)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

/// CSV data lines, skipping the version comment and the column header.
fn csv_rows(dir: &Path, name: &str) -> Vec<String> {
    fs::read_to_string(dir.join(name))
        .unwrap()
        .lines()
        .skip(2)
        .map(str::to_owned)
        .collect()
}

#[test]
fn chsh_scan_row_count_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["chsh-scan", "--eta-min", "0", "--eta-max", "1", "--steps", "21", "--seed", "7"];
    let (code, _, err) = lab(dir.path(), &args);
    assert_eq!(code, 0, "{err}");
    assert_eq!(csv_rows(dir.path(), "chsh-scan.csv").len(), 21);
    let text = fs::read_to_string(dir.path().join("chsh-scan.csv")).unwrap();
    assert!(text.starts_with(&format!("# unsharp-lab {} chsh-scan\neta,s_max\n", env!("CARGO_PKG_VERSION"))));

    let j = json(dir.path(), "chsh-scan.json");
    assert_eq!(j["command"], "chsh-scan");
    assert_eq!(j["seed"], 7);
    assert_eq!(j["parameters"]["steps"], 21);
    assert!(j["tool_version"].as_str().unwrap().contains(env!("CARGO_PKG_VERSION")));
    let t = j["metrics"]["violation_threshold"].as_f64().unwrap();
    assert!((t - 2f64.powf(-0.25)).abs() < 1e-3);
}

#[test]
fn epr_robustness_matches_library_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "epr-robustness", "--dim", "2", "--eps-grid", "1e-4,1e-3,1e-2,1e-1", "--trials", "1000", "--seed", "3",
    ];
    let (code, _, err) = lab(dir.path(), &args);
    assert_eq!(code, 0, "{err}");
    let j = json(dir.path(), "epr-robustness.json");
    let rows = unsharp::channels::epr_robustness_sweep(2, &[1e-4, 1e-3, 1e-2, 1e-1], 1000, 3).unwrap();
    let max = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    assert_eq!(j["metrics"]["max_distance_over_sqrt_eps"].as_f64().unwrap(), max);
    assert_eq!(csv_rows(dir.path(), "epr-robustness.csv").len(), 4);
}

#[test]
fn track_schema_and_byte_identical_replay() {
    let args = [
        "track", "--alpha0", "2", "--dynamics", "harmonic", "--omega", "1", "--dt", "0.1", "--steps", "100", "--seed", "11",
    ];
    let bodies: Vec<String> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let (code, _, err) = lab(dir.path(), &args);
            assert_eq!(code, 0, "{err}");
            fs::read_to_string(dir.path().join("track.csv")).unwrap()
        })
        .collect();
    assert_eq!(bodies[0], bodies[1]);
    let header = bodies[0].lines().nth(1).unwrap();
    assert_eq!(header, "t,q,p,norm_deficit,disturbance");
    for line in bodies[0].lines().skip(2) {
        let fields: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(fields[1].abs() <= 6.0 && fields[2].abs() <= 6.0);
    }
}

#[test]
fn flag_overrides_environment_for_out_dir() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    let (code, _, _) = lab(env_dir.path(), &["--out-dir", flag, "freq-operator", "--p", "0.5", "--n-max", "4"]);
    assert_eq!(code, 0);
    assert!(flag_dir.path().join("freq-operator.csv").exists());
    assert!(!env_dir.path().join("freq-operator.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(lab(d, &["degree", "--state", "bloch:0,0,1", "--effect", "pauli:0.5,0,0,0.5"]).0, 0);
    // malformed or out-of-range requests
    assert_eq!(lab(d, &["no-such-command"]).0, 1);
    assert_eq!(lab(d, &["degree", "--state", "bloch:0,0,2", "--effect", "pauli:0.5,0,0,0.5"]).0, 1);
    assert_eq!(lab(d, &["degree", "--state", "bloch:0,0", "--effect", "pauli:0.5,0,0,0.5"]).0, 1);
    assert_eq!(lab(d, &["freq-operator", "--p", "0.5", "--n-max", "13", "--mode", "tensor"]).0, 1);
    // an operator outside [0, I] is a numerical failure
    let (code, _, err) = lab(d, &["degree", "--state", "bloch:0,0,1", "--effect", "pauli:0.5,0,0,0.9"]);
    assert_eq!(code, 2, "{err}");
    // grid too coarse for the Fock truncation
    assert_eq!(lab(d, &["track", "--n-fock", "6", "--cells", "2", "--steps", "1"]).0, 2);
    assert_eq!(lab(d, &["--help"]).0, 0);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases: &[&[&str]] = &[
        &["degree", "--state", "mixed:2", "--effect", "diag:1,0"],
        &["classify", "--state", "bloch:0,0,1", "--effect", "pauli:0.5,0,0,0.45", "--eps", "0.1"],
        &["decompose", "--effect", "pauli:0.5,0.1,0,0.2", "--r", "1,0,0"],
        &["smear"],
        &["joint-qubit", "--a", "0,0,0.7", "--b", "0.7,0,0"],
        &["luders", "--state", "bloch:1,0,0", "--effect", "diag:0.9,0.1"],
        &["epr-robustness", "--trials", "50"],
        &["mb-sample", "--effects", "5", "--samples", "1000"],
        &["ray-geometry", "--pairs", "100"],
        &["chsh-scan", "--steps", "3"],
        &["freq-operator", "--p", "0.3"],
        &["premeasure", "--state", "bloch:1,0,0"],
        &["track", "--steps", "3"],
    ];
    for args in cases {
        let (code, stdout, err) = lab(d, args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let _: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        let j = json(d, &format!("{}.json", args[0]));
        assert_eq!(j["command"], args[0]);
        assert!(j.get("seed").is_some() && j.get("parameters").is_some());
    }
    let beta = json(d, "decompose.json")["metrics"]["beta"].as_f64().unwrap();
    assert!((beta - 0.5).abs() < 1e-12);
    let p = &json(d, "premeasure.json")["metrics"]["pointer_probabilities"];
    assert!((p[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn operator_json_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let state = d.join("rho.json");
    fs::write(&state, r#"{"dim":2,"matrix":[[[0.5,0],[0,-0.5]],[[0,0.5],[0.5,0]]]}"#).unwrap();
    let effect = d.join("e.json");
    fs::write(&effect, r#"{"dim":2,"matrix":[[[0.5,0],[0,-0.5]],[[0,0.5],[0.5,0]]]}"#).unwrap();
    let (code, stdout, err) = lab(d, &["degree", "--state", state.to_str().unwrap(), "--effect", effect.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    // |+i><+i| against itself
    assert!((v["degree"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let measure = d.join("mu.json");
    fs::write(
        &measure,
        r#"{"atoms":[{"weight":0.5,"state_vector":[[0.7071067811865476,0],[0.7071067811865476,0]]},
                     {"weight":0.5,"state_vector":[[0.7071067811865476,0],[-0.7071067811865476,0]]}]}"#,
    )
    .unwrap();
    let (code, _, err) = lab(d, &["mb-sample", "--effects", "10", "--samples", "2000", "--measure", measure.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(json(d, "mb-sample.json")["metrics"]["max_exact_gap"].as_f64().unwrap() < 1e-12);
}
