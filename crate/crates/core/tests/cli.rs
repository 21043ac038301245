//! Integration tests of the command layer: the exit-code contract, the
//! shipped scenario files, and the emitted file formats.

use std::path::Path;
use taxisim::catalog;
use taxisim::cli::{cmd_certify, cmd_convergence, cmd_run, cmd_validate_model, dispatch};
use taxisim::config::parse_config;

fn write_config(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// A quick scenario that completes with a holding certificate.
fn quick_ok_config(dir: &Path, out_dir: &Path) -> std::path::PathBuf {
    let mut cfg = catalog::consumption_1d_baseline();
    cfg.stepper.t_end = 0.02;
    cfg.probes.snapshot_times = vec![0.012, 0.016, 0.02];
    cfg.probes.record_every = 1;
    cfg.output.directory = out_dir.to_string_lossy().into_owned();
    write_config(dir, "quick.ini", &cfg.to_ini_string())
}

#[test]
fn shipped_configs_match_catalog() {
    for name in catalog::SCENARIOS {
        let path = format!("{}/configs/{name}.ini", env!("CARGO_MANIFEST_DIR"));
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing shipped config {path}: {e}"));
        let parsed = parse_config(&text).unwrap_or_else(|e| panic!("{path}:\n{e}"));
        assert_eq!(parsed, catalog::by_name(name).unwrap(), "{name}");
    }
}

#[test]
fn run_success_writes_outputs_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("results");
    let cfg_path = quick_ok_config(tmp.path(), &out);
    assert_eq!(cmd_run(&cfg_path), 0);

    let prefix = "consumption_1d_baseline";
    let csv = std::fs::read_to_string(out.join(format!("{prefix}_probes.csv"))).unwrap();
    assert!(
        csv.starts_with("t,min_u,max_u,sup_v,sup_grad_v,sup_lap_v,mass_u,mass_v,deadcore_cells\n")
    );
    assert!(!csv.contains('\r'));

    let snap = std::fs::read_to_string(out.join(format!("{prefix}_snapshot_000.dat"))).unwrap();
    let header = snap.lines().next().unwrap();
    assert!(
        header.starts_with("# t=") && header.contains("nx=64"),
        "{header}"
    );
    let values: Vec<f64> = snap
        .lines()
        .skip(1)
        .flat_map(|l| l.split_whitespace())
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 64);

    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join(format!("{prefix}_certificate.json"))).unwrap(),
    )
    .unwrap();
    for key in [
        "A",
        "B",
        "delta_u",
        "K2",
        "C_S",
        "M_u",
        "T",
        "min_margin",
        "holds",
        "tolerance",
        "C1",
        "lambda1",
        "gradient_bound_holds",
        "K_u0",
        "K_v0",
    ] {
        assert!(json.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(json["holds"], serde_json::Value::Bool(true));
}

#[test]
fn snapshot_header_carries_both_extents_in_2d() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("results");
    let mut cfg = catalog::consumption_2d_baseline();
    cfg.stepper.t_end = 0.01;
    cfg.probes.snapshot_times = vec![0.006, 0.008, 0.01];
    cfg.output.directory = out.to_string_lossy().into_owned();
    let path = write_config(tmp.path(), "quick2d.ini", &cfg.to_ini_string());
    assert_eq!(cmd_run(&path), 0);
    let snap =
        std::fs::read_to_string(out.join("consumption_2d_baseline_snapshot_000.dat")).unwrap();
    let header = snap.lines().next().unwrap();
    assert!(
        header.contains("nx=32") && header.contains("ny=32"),
        "{header}"
    );
    assert_eq!(snap.lines().count(), 1 + 32);
}

#[test]
fn shipped_baseline_runs_to_exit_zero() {
    // the full 1-D baseline through its shipped file, with only the
    // output directory redirected
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let shipped = format!(
        "{}/configs/consumption_1d_baseline.ini",
        env!("CARGO_MANIFEST_DIR")
    );
    let text = std::fs::read_to_string(shipped).unwrap();
    let redirected = text.replace(
        "directory = \"out/consumption_1d_baseline\"",
        &format!("directory = \"{}\"", out.display()),
    );
    assert_ne!(text, redirected, "output directory line not found");
    let path = write_config(tmp.path(), "baseline.ini", &redirected);
    assert_eq!(cmd_run(&path), 0);
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("consumption_1d_baseline_certificate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["holds"], serde_json::Value::Bool(true));
}

#[test]
fn malformed_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "bad.ini", "[grid]\nwhat is this\n");
    assert_eq!(cmd_run(&path), 1);
    assert_eq!(cmd_certify(&path), 1);
    assert_eq!(cmd_convergence(&path, 3), 1);
    assert_eq!(cmd_validate_model(&path), 1);
    assert_eq!(cmd_run(Path::new("/nonexistent/nope.ini")), 1);
}

#[test]
fn blowup_threshold_already_exceeded_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = catalog::consumption_1d_baseline();
    cfg.stepper.blowup_threshold = 1.0; // initial max is 1.5
    cfg.output.directory = tmp.path().join("out").to_string_lossy().into_owned();
    let path = write_config(tmp.path(), "blowup.ini", &cfg.to_ini_string());
    assert_eq!(cmd_run(&path), 3);
}

#[test]
fn deadcore_halt_exits_four() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = catalog::consumption_1d_baseline();
    // the initial floor of 0.5 sits below this detection threshold
    cfg.stepper.deadcore_epsilon = 0.6;
    cfg.output.directory = tmp.path().join("out").to_string_lossy().into_owned();
    let path = write_config(tmp.path(), "deadcore.ini", &cfg.to_ini_string());
    assert_eq!(cmd_run(&path), 4);
}

#[test]
fn exit_code_mapping_is_exhaustive() {
    use taxisim::cli::{execute, exit_code};
    use taxisim::stepper::ExitReason;
    let mut cfg = catalog::consumption_1d_baseline();
    cfg.stepper.t_end = 0.02;
    cfg.probes.snapshot_times = vec![0.012, 0.016, 0.02];
    let mut exec = execute(&cfg).unwrap();
    assert_eq!(exit_code(&exec), 0);

    // completed run whose comparison failed
    if let Some(Ok(cert)) = exec.certificate.as_mut() {
        cert.holds = false;
        cert.min_margin = -1.0;
    } else {
        panic!("certificate expected");
    }
    assert_eq!(exit_code(&exec), 2);

    exec.output.exit = ExitReason::BlowUp { step: 7, t: 0.01 };
    assert_eq!(exit_code(&exec), 3);
    exec.output.exit = ExitReason::DeadCore { step: 7, t: 0.01 };
    assert_eq!(exit_code(&exec), 4);
    for failure in [
        ExitReason::CflViolation { step: 7 },
        ExitReason::SolverFailure { step: 7 },
        ExitReason::NonFinite { step: 7 },
    ] {
        exec.output.exit = failure;
        assert_eq!(exit_code(&exec), 5);
    }
}

#[test]
fn convergence_needs_reference_and_levels() {
    let tmp = tempfile::tempdir().unwrap();
    // baseline has drift: no analytic reference
    let mut cfg = catalog::consumption_1d_baseline();
    cfg.output.directory = tmp.path().join("out").to_string_lossy().into_owned();
    let no_ref = write_config(tmp.path(), "noref.ini", &cfg.to_ini_string());
    assert_eq!(cmd_convergence(&no_ref, 3), 1);

    let heat = write_config(tmp.path(), "heat.ini", &catalog::heat_mms().to_ini_string());
    assert_eq!(cmd_convergence(&heat, 1), 1); // too few levels
    assert_eq!(cmd_convergence(&heat, 2), 0);
}

#[test]
fn validate_model_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = write_config(
        tmp.path(),
        "good.ini",
        &catalog::consumption_1d_baseline().to_ini_string(),
    );
    assert_eq!(cmd_validate_model(&good), 0);

    // a dipping custom table fails the monotonicity hypothesis
    let base = catalog::consumption_1d_baseline().to_ini_string();
    let broken = base.replace(
        "diffusion = \"porous_medium\"\nm = 2",
        "diffusion = \"custom\"\ntable = \"0:0, 0.25:0.5, 0.5:0.2, 1:1\"",
    );
    let bad = write_config(tmp.path(), "broken.ini", &broken);
    assert_eq!(cmd_validate_model(&bad), 2);

    // linear diffusion with p = 1.5 is admissible
    let linear = base
        .replace(
            "diffusion = \"porous_medium\"\nm = 2",
            "diffusion = \"linear\"\nd = 1",
        )
        .replace("p = 2", "p = 1.5");
    let lin = write_config(tmp.path(), "linear.ini", &linear);
    assert_eq!(cmd_validate_model(&lin), 0);
}

#[test]
fn dispatch_usage_errors() {
    let s = |v: &[&str]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
    assert_eq!(dispatch(&s(&[])), 1);
    assert_eq!(dispatch(&s(&["frobnicate"])), 1);
    assert_eq!(dispatch(&s(&["run"])), 1);
    assert_eq!(
        dispatch(&s(&["convergence", "x.ini", "--levels", "NaN"])),
        1
    );
}

#[test]
fn binary_end_to_end() {
    // the actual process: validate-model on a shipped scenario, then a
    // certificate-only run, checking the process exit codes
    let sim = env!("CARGO_BIN_EXE_sim");
    let shipped = format!(
        "{}/configs/consumption_1d_baseline.ini",
        env!("CARGO_MANIFEST_DIR")
    );
    let output = std::process::Command::new(sim)
        .args(["validate-model", &shipped])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(String::from_utf8_lossy(&output.stdout).contains("admissible = true"));

    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("results");
    let cfg_path = quick_ok_config(tmp.path(), &out);
    let output = std::process::Command::new(sim)
        .arg("certify")
        .arg(&cfg_path)
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let json: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("certify prints JSON");
    assert_eq!(json["holds"], serde_json::Value::Bool(true));
    // certify writes nothing
    assert!(!out.exists());

    let output = std::process::Command::new(sim)
        .args(["run", "/nonexistent.ini"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn midrun_blowup_shrinks_certificate_window() {
    // genuine aggregation dynamics: produced signal plus strong
    // sensitivity raise the density maximum until it crosses a threshold
    // set just above the initial sup; the certificate window must then
    // end at the reached time, not at t_end.
    use taxisim::cli::{execute, exit_code};
    use taxisim::model::{Diffusion, ModelSpec, Sensitivity, SignalMode, Source};
    use taxisim::stepper::ExitReason;

    let mut cfg = catalog::kellersegel_1d();
    // weak linear diffusion against strong sensitivity: the steady
    // balance scales like exp(chi v / d), so the maximum must climb
    cfg.model = ModelSpec::new(
        Diffusion::Linear { d: 0.1 },
        Sensitivity::Constant { chi: 1.5 },
        Source::Zero,
        SignalMode::KellerSegel,
        1.0,
        2.0,
    )
    .unwrap();
    cfg.stepper.t_end = 2.0;
    cfg.stepper.blowup_threshold = 2.5; // initial max u is 1.5; the climb crosses mid-run
    cfg.probes.record_every = 1;
    cfg.probes.snapshot_times = (1..=100).map(|k| k as f64 * 0.02).collect();

    let exec = execute(&cfg).expect("run starts");
    let ExitReason::BlowUp { step, t } = exec.output.exit else {
        panic!("expected a threshold crossing, got {:?}", exec.output.exit);
    };
    assert!(step > 0, "crossing should happen mid-run");
    assert!(t > 0.0 && t < 2.0);
    assert_eq!(exec.t_final, t);
    assert_eq!(exit_code(&exec), 3);
    // with enough records and snapshots before the crossing, the
    // certificate is evaluated on the shrunken window
    let cert = exec
        .certificate
        .as_ref()
        .expect("positive floor admits a certificate")
        .as_ref()
        .expect("window has records and snapshots");
    assert_eq!(cert.t_final, t);
    assert!(cert.delta_u > 0.0);
}
