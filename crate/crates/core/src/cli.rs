//! Command pipeline behind the `sim` binary: single runs with full
//! outputs, certificate-only runs, refinement studies against the
//! closed-form references, and hypothesis validation.
//!
//! Exit codes:
//!   0  run completed and the certificate holds (or no certificate
//!      applies because the initial floor is zero)
//!   1  usage, configuration or I/O error
//!   2  run completed but the certificate is violated
//!   3  blow-up threshold crossed
//!   4  dead core detected
//!   5  numerical failure (CFL violation, solver stall, nonfinite values)
//!
//! All emitted numbers use shortest round-trip decimal formatting, so
//! repeated runs of the same configuration produce byte-identical files.

use crate::bounds::{
    check_gradient_bound, default_tolerance, lambda1, subsolution_certificate, w1inf_norm,
    BoundCertificate, BoundsError, GradientBoundReport, DEFAULT_C1,
};
use crate::config::{parse_config, Profile, RunConfig};
use crate::grid::{Field, GridSpec};
use crate::model::{Diffusion, Sensitivity, Source};
use crate::reference::{error_l1, error_linf, heat_cosine_solution, Barenblatt};
use crate::stepper::{run, ExitReason, RunOutput};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const USAGE: &str = "usage:
  sim run <config>                 execute a scenario, write CSV/snapshots/JSON
  sim certify <config>             execute and print the certificate JSON only
  sim convergence <config> --levels <N>
                                   refinement study against the analytic reference
  sim validate-model <config>      check the structural hypotheses on D
";

/// Entry point for the binary: parse arguments, dispatch, return the
/// process exit code.
pub fn dispatch(args: &[String]) -> i32 {
    let mut it = args.iter();
    let Some(cmd) = it.next() else {
        eprint!("{USAGE}");
        return 1;
    };
    match cmd.as_str() {
        "run" => match it.next() {
            Some(path) if it.next().is_none() => cmd_run(Path::new(path)),
            _ => usage_error(),
        },
        "certify" => match it.next() {
            Some(path) if it.next().is_none() => cmd_certify(Path::new(path)),
            _ => usage_error(),
        },
        "convergence" => {
            let Some(path) = it.next() else {
                return usage_error();
            };
            let mut levels = 3usize;
            match (it.next().map(String::as_str), it.next()) {
                (None, _) => {}
                (Some("--levels"), Some(n)) => match n.parse() {
                    Ok(n) => levels = n,
                    Err(_) => return usage_error(),
                },
                _ => return usage_error(),
            }
            if it.next().is_some() {
                return usage_error();
            }
            cmd_convergence(Path::new(path), levels)
        }
        "validate-model" => match it.next() {
            Some(path) if it.next().is_none() => cmd_validate_model(Path::new(path)),
            _ => usage_error(),
        },
        _ => usage_error(),
    }
}

fn usage_error() -> i32 {
    eprint!("{USAGE}");
    1
}

fn load_config(path: &Path) -> Result<RunConfig, i32> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return Err(1);
        }
    };
    match parse_config(&text) {
        Ok(cfg) => Ok(cfg),
        Err(diags) => {
            eprint!("{}: configuration errors\n{diags}", path.display());
            Err(1)
        }
    }
}

/// Everything a finished run produces, before serialization.
pub struct Execution {
    pub output: RunOutput,
    pub certificate: Option<Result<BoundCertificate, BoundsError>>,
    pub gradient: GradientBoundReport,
    pub k_u0: f64,
    pub k_v0: f64,
    pub t_final: f64,
    pub tolerance: f64,
}

/// Run a configuration and evaluate both certificates. When the run
/// stops early the certificate window shrinks to the reached time. A
/// zero initial floor (compactly supported reference data) admits no
/// subsolution certificate and yields `None`.
pub fn execute(cfg: &RunConfig) -> Result<Execution, String> {
    let (u0, v0) = cfg.build_initial();
    let k_u0 = w1inf_norm(&u0, &cfg.grid);
    let k_v0 = w1inf_norm(&v0, &cfg.grid);
    let u0_sup = u0.max();

    let output =
        run(u0, v0, &cfg.model, &cfg.grid, &cfg.stepper, &cfg.probes).map_err(|e| e.to_string())?;

    let t_final = output.final_state.t;
    let tolerance = default_tolerance(cfg.grid.min_spacing(), output.series.max_dt, u0_sup);
    let delta0 = cfg.delta0();
    let certificate = if delta0 > 0.0 && t_final > 0.0 {
        Some(subsolution_certificate(
            &output.series,
            &output.trajectory.snapshots,
            &cfg.model,
            t_final,
            delta0,
            tolerance,
        ))
    } else {
        None
    };
    let gradient = check_gradient_bound(&output.series, DEFAULT_C1, lambda1(&cfg.grid), k_v0);

    Ok(Execution {
        output,
        certificate,
        gradient,
        k_u0,
        k_v0,
        t_final,
        tolerance,
    })
}

#[derive(Serialize)]
struct CertificateSummary {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    delta_u: f64,
    #[serde(rename = "K2")]
    k2: f64,
    #[serde(rename = "C_S")]
    c_s: f64,
    #[serde(rename = "M_u")]
    m_u: f64,
    #[serde(rename = "T")]
    t: f64,
    min_margin: f64,
    holds: bool,
    tolerance: f64,
    #[serde(rename = "C1")]
    c1: f64,
    lambda1: f64,
    gradient_bound_holds: bool,
    #[serde(rename = "K_u0")]
    k_u0: f64,
    #[serde(rename = "K_v0")]
    k_v0: f64,
    gradient_bound: f64,
    sup_grad_measured: f64,
}

/// The certificate JSON emitted by `run` and `certify`.
pub fn certificate_json(exec: &Execution, cert: &BoundCertificate) -> String {
    let summary = CertificateSummary {
        a: cert.a,
        b: cert.b,
        delta_u: cert.delta_u,
        k2: cert.k2,
        c_s: cert.c_s,
        m_u: cert.m_u,
        t: cert.t_final,
        min_margin: cert.min_margin,
        holds: cert.holds,
        tolerance: cert.tolerance,
        c1: exec.gradient.c1,
        lambda1: exec.gradient.lambda1,
        gradient_bound_holds: exec.gradient.holds,
        k_u0: exec.k_u0,
        k_v0: exec.k_v0,
        gradient_bound: exec.gradient.bound,
        sup_grad_measured: exec.gradient.measured_sup,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("serializable summary");
    json.push('\n');
    json
}

/// Plain-text snapshot: a `# t=.. nx=.. [ny=..]` header line, then
/// row-major values, one grid row per line.
pub fn snapshot_text(t: f64, field: &Field, grid: &GridSpec) -> String {
    let mut s = String::new();
    if grid.dim() == 2 {
        let _ = writeln!(s, "# t={t} nx={} ny={}", grid.nx(), grid.ny());
    } else {
        let _ = writeln!(s, "# t={t} nx={}", grid.nx());
    }
    for j in 0..grid.ny() {
        let row: Vec<String> = (0..grid.nx())
            .map(|i| format!("{}", field[(i, j)]))
            .collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    match std::env::var("SIM_OUTPUT_DIR") {
        Ok(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(&cfg.output.directory),
    }
}

/// Map a finished execution to the documented process exit code.
pub fn exit_code(exec: &Execution) -> i32 {
    match &exec.output.exit {
        ExitReason::Completed => match &exec.certificate {
            Some(Ok(cert)) if cert.holds => 0,
            Some(Ok(_)) => 2,
            Some(Err(e)) => {
                eprintln!("certificate not evaluable: {e}");
                1
            }
            None => 0,
        },
        ExitReason::BlowUp { .. } => 3,
        ExitReason::DeadCore { .. } => 4,
        ExitReason::CflViolation { .. }
        | ExitReason::SolverFailure { .. }
        | ExitReason::NonFinite { .. } => 5,
    }
}

fn describe_exit(exit: &ExitReason) -> String {
    match exit {
        ExitReason::Completed => "completed".to_string(),
        ExitReason::BlowUp { step, t } => {
            format!("blow-up threshold crossed at step {step}, t={t} (numerical T_max proxy)")
        }
        ExitReason::DeadCore { step, t } => format!("dead core detected at step {step}, t={t}"),
        ExitReason::CflViolation { step } => format!("CFL violation at step {step}"),
        ExitReason::SolverFailure { step } => format!("signal solver failed at step {step}"),
        ExitReason::NonFinite { step } => format!("nonfinite values at step {step}"),
    }
}

/// Execute a scenario and write the probes CSV, one snapshot file per
/// stored time, and the certificate JSON.
pub fn cmd_run(path: &Path) -> i32 {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let exec = match execute(&cfg) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("{msg}");
            return 1;
        }
    };

    let dir = output_dir(&cfg);
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("cannot create {}: {e}", dir.display());
        return 1;
    }
    let prefix = &cfg.output.prefix;
    let write = |name: String, contents: &str| -> Result<(), String> {
        let p = dir.join(name);
        std::fs::write(&p, contents).map_err(|e| format!("cannot write {}: {e}", p.display()))
    };

    let mut result = write(format!("{prefix}_probes.csv"), &exec.output.series.to_csv());
    for (idx, (t, field)) in exec.output.trajectory.snapshots.iter().enumerate() {
        if result.is_err() {
            break;
        }
        result = write(
            format!("{prefix}_snapshot_{idx:03}.dat"),
            &snapshot_text(*t, field, &cfg.grid),
        );
    }
    if let (Ok(()), Some(Ok(cert))) = (&result, &exec.certificate) {
        result = write(
            format!("{prefix}_certificate.json"),
            &certificate_json(&exec, cert),
        );
    }
    if let Err(msg) = result {
        eprintln!("{msg}");
        return 1;
    }

    println!(
        "run {}: {}",
        path.display(),
        describe_exit(&exec.output.exit)
    );
    match &exec.certificate {
        Some(Ok(cert)) => println!(
            "certificate: holds={} delta_u={} min_margin={} (calibrated gradient bound holds={})",
            cert.holds, cert.delta_u, cert.min_margin, exec.gradient.holds
        ),
        Some(Err(e)) => println!("certificate: not evaluable ({e})"),
        None => println!("certificate: skipped (initial floor is zero)"),
    }
    exit_code(&exec)
}

/// Execute a scenario and print the certificate JSON to stdout, writing
/// no files.
pub fn cmd_certify(path: &Path) -> i32 {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let exec = match execute(&cfg) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("{msg}");
            return 1;
        }
    };
    match &exec.certificate {
        Some(Ok(cert)) => print!("{}", certificate_json(&exec, cert)),
        Some(Err(e)) => eprintln!("certificate not evaluable: {e}"),
        None => eprintln!("certificate skipped: initial floor is zero"),
    }
    exit_code(&exec)
}

/// What a convergence study compares against.
enum Reference {
    Heat {
        offset: f64,
        amplitude: f64,
        diffusivity: f64,
    },
    Barenblatt(Barenblatt, f64),
}

fn classify_reference(cfg: &RunConfig) -> Option<Reference> {
    let driftless = match &cfg.model.sensitivity {
        Sensitivity::Constant { chi } => *chi == 0.0,
        Sensitivity::Saturating { chi, .. } => *chi == 0.0,
    };
    if !driftless || !matches!(cfg.model.source, Source::Zero) {
        return None;
    }
    match (&cfg.model.diffusion, &cfg.u0) {
        (Diffusion::Linear { d }, Profile::CosineBump { offset, amplitude }) => {
            Some(Reference::Heat {
                offset: *offset,
                amplitude: *amplitude,
                diffusivity: *d,
            })
        }
        (Diffusion::PorousMedium { m }, Profile::Barenblatt { c, t0 }) => {
            Some(Reference::Barenblatt(Barenblatt { m: *m, c: *c }, *t0))
        }
        _ => None,
    }
}

/// One row of a refinement study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub h: f64,
    pub linf: f64,
    pub l1: f64,
}

/// Run a scenario at `levels` dyadic refinements against its closed-form
/// reference. Errors are measured at the final time.
pub fn convergence_study(cfg: &RunConfig, levels: usize) -> Result<Vec<ConvergenceRow>, String> {
    if levels < 2 {
        return Err(format!(
            "a refinement study needs at least 2 levels, got {levels}"
        ));
    }
    let reference = classify_reference(cfg).ok_or_else(|| {
        "scenario has no analytic reference; convergence needs driftless, source-free \
         linear diffusion with a cosine profile or porous-medium diffusion with a \
         barenblatt profile"
            .to_string()
    })?;
    let mut rows = Vec::new();
    for level in 0..levels {
        let grid = cfg.grid.refined(1 << level);
        let (u0, v0) = cfg.build_initial_on(&grid);
        let out =
            run(u0, v0, &cfg.model, &grid, &cfg.stepper, &cfg.probes).map_err(|e| e.to_string())?;
        if out.exit != ExitReason::Completed {
            return Err(format!(
                "level {level} did not complete: {}",
                describe_exit(&out.exit)
            ));
        }
        let exact = match &reference {
            Reference::Heat {
                offset,
                amplitude,
                diffusivity,
            } => heat_cosine_solution(&grid, *offset, *amplitude, *diffusivity, out.final_state.t),
            Reference::Barenblatt(bb, t0) => bb.sample(&grid, t0 + out.final_state.t),
        };
        rows.push(ConvergenceRow {
            cells: grid.nx(),
            h: grid.hx(),
            linf: error_linf(&out.final_state.u, &exact),
            l1: error_l1(&out.final_state.u, &exact, &grid),
        });
    }
    Ok(rows)
}

/// Pairwise observed orders; empty for the first row.
pub fn order_table(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("level,cells,h,linf_error,l1_error,linf_order,l1_order\n");
    for (k, row) in rows.iter().enumerate() {
        let (o_inf, o_l1) = if k == 0 {
            (String::new(), String::new())
        } else {
            let prev = &rows[k - 1];
            (
                format!("{}", (prev.linf / row.linf).log2()),
                format!("{}", (prev.l1 / row.l1).log2()),
            )
        };
        let _ = writeln!(
            s,
            "{k},{},{},{},{},{o_inf},{o_l1}",
            row.cells, row.h, row.linf, row.l1
        );
    }
    s
}

/// Refinement study printed as a CSV order table.
pub fn cmd_convergence(path: &Path, levels: usize) -> i32 {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match convergence_study(&cfg, levels) {
        Ok(rows) => {
            print!("{}", order_table(&rows));
            0
        }
        Err(msg) => {
            eprintln!("{msg}");
            1
        }
    }
}

/// Sample count used by `validate-model`.
pub const HYPOTHESIS_SAMPLES: usize = 1000;

/// Print the hypothesis report; exit 0 iff admissible.
pub fn cmd_validate_model(path: &Path) -> i32 {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let report = match cfg.model.validate_hypotheses(HYPOTHESIS_SAMPLES) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    println!(
        "hypothesis report ({HYPOTHESIS_SAMPLES} geometric samples on (0, {}])",
        cfg.model.s0
    );
    println!("  cd_min = {}", report.cd_min);
    println!("  cd_max = {}", report.cd_max);
    println!("  admissible = {}", report.admissible);
    if report.violations.is_empty() {
        println!("  violations: none");
    } else {
        println!("  violations:");
        for v in &report.violations {
            println!("    s={} violates {}", v.s, v.condition);
        }
    }
    if report.admissible {
        0
    } else {
        2
    }
}
