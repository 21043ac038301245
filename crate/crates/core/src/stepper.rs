//! Time integration of the coupled system.
//!
//! The cell density advances explicitly in flux form: the diffusive face
//! flux is the difference of Kirchhoff transforms `[Phi(u_R) - Phi(u_L)]/h`
//! (not an averaged mobility), which is the exact discrete counterpart of
//! rewriting the equation as `u_t = lap Phi(u) + div(a u) + b` and stays
//! correct at the degeneracy. The taxis flux is first-order upwind, so
//! under the CFL bound the update is a convex combination of nonnegative
//! values and the sign of u is preserved unconditionally.
//!
//! The signal advances implicitly with the reaction coefficient frozen at
//! the current density. The system matrix `I - dt*lap + dt*diag(u)` is a
//! symmetric M-matrix for any dt, which makes nonnegativity of v and the
//! sup-norm decay in consumption mode structural properties of the scheme
//! rather than step-size accidents.

use crate::grid::{Field, GridSpec};
use crate::model::{ModelSpec, SignalMode};
use crate::probes::{ProbeRecord, ProbeSeries};
use thiserror::Error;

/// Recording cadence and snapshot schedule for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Record a probe sample every this many steps (>= 1).
    pub record_every: u64,
    /// Times at which to store a full density snapshot; each time is
    /// realized by the first state reaching it.
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid stepper configuration: {0}")]
    BadConfig(String),
}

/// Errors surfaced by individual steps; `run` maps them to exit reasons.
#[derive(Debug, Error)]
pub enum StepError {
    #[error("state contains nonfinite values")]
    NonFinite,
    #[error("cell {index} went negative ({value}); CFL precondition violated")]
    NegativeDensity { index: usize, value: f64 },
    #[error("signal solver did not reach tolerance within {0} iterations")]
    SolverStalled(usize),
}

/// Simulation state: density, signal, time, step counter.
#[derive(Debug, Clone)]
pub struct SimState {
    pub u: Field,
    pub v: Field,
    pub t: f64,
    pub step: u64,
}

/// Step-size control, termination thresholds and solver tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    /// Safety factor in (0, 1] on the positivity-preserving step bound.
    pub cfl_safety: f64,
    pub dt_max: f64,
    /// Sup-norm threshold standing in for blow-up.
    pub blowup_threshold: f64,
    /// A cell at or below this value counts as dead core.
    pub deadcore_epsilon: f64,
    pub t_end: f64,
    /// Relative residual target of the implicit signal solve.
    pub solver_rtol: f64,
    /// Stop the run when a dead core appears. Disabled for reference
    /// solutions whose exact profile has compact support.
    pub halt_on_deadcore: bool,
}

impl StepperConfig {
    pub fn new(t_end: f64) -> Self {
        StepperConfig {
            cfl_safety: 0.4,
            dt_max: t_end,
            blowup_threshold: 1e6,
            deadcore_epsilon: 1e-12,
            t_end,
            solver_rtol: 1e-12,
            halt_on_deadcore: true,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let pos = [
            ("dt_max", self.dt_max),
            ("blowup_threshold", self.blowup_threshold),
            ("deadcore_epsilon", self.deadcore_epsilon),
            ("t_end", self.t_end),
            ("solver_rtol", self.solver_rtol),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::BadConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(SimError::BadConfig(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        Ok(())
    }
}

/// How a run ended. Numerical failures carry the offending step index.
#[derive(Debug, Clone, PartialEq)]
pub enum ExitReason {
    Completed,
    BlowUp { step: u64, t: f64 },
    DeadCore { step: u64, t: f64 },
    CflViolation { step: u64 },
    SolverFailure { step: u64 },
    NonFinite { step: u64 },
}

/// Density snapshots stored at configured times.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, Field)>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub series: ProbeSeries,
    pub exit: ExitReason,
    pub final_state: SimState,
}

/// Positivity-preserving step bound: `safety * h^2 / (2 dim (D_max + h a_max))`
/// with `D_max` the largest diffusion coefficient over the current density
/// range and `a_max` the largest upwind face drift `|S(u_up) dv/h|`,
/// capped by `dt_max` and the time remaining to `t_end`.
pub fn compute_dt(
    state: &SimState,
    spec: &ModelSpec,
    grid: &GridSpec,
    cfg: &StepperConfig,
) -> Result<f64, StepError> {
    if !state.u.all_finite() || !state.v.all_finite() {
        return Err(StepError::NonFinite);
    }
    let d_max = state
        .u
        .interior()
        .map(|u| spec.eval_d(u).expect("density nonnegative"))
        .fold(0.0f64, f64::max);

    let mut a_max = 0.0f64;
    let u = &state.u;
    let v = &state.v;
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut face_drift = |u_l: f64, u_r: f64, dv_over_h: f64| {
        let u_up = if dv_over_h > 0.0 { u_l } else { u_r };
        let s = spec.eval_s(u_up).expect("density nonnegative");
        a_max = a_max.max((s * dv_over_h).abs());
    };
    let inv_hx = 1.0 / grid.hx();
    for j in 0..ny as isize {
        for i in 1..nx as isize {
            face_drift(
                u.get(i - 1, j),
                u.get(i, j),
                (v.get(i, j) - v.get(i - 1, j)) * inv_hx,
            );
        }
    }
    if grid.dim() == 2 {
        let inv_hy = 1.0 / grid.hy();
        for j in 1..ny as isize {
            for i in 0..nx as isize {
                face_drift(
                    u.get(i, j - 1),
                    u.get(i, j),
                    (v.get(i, j) - v.get(i, j - 1)) * inv_hy,
                );
            }
        }
    }

    let h = grid.min_spacing();
    let denom = 2.0 * grid.dim() as f64 * (d_max + h * a_max);
    let dt_cfl = if denom > 0.0 {
        cfg.cfl_safety * h * h / denom
    } else {
        f64::INFINITY
    };
    let remaining = cfg.t_end - state.t;
    Ok(dt_cfl.min(cfg.dt_max).min(remaining))
}

/// One explicit flux-form update of the density. Ghosts of `u` and `v`
/// must be applied. The face flux is
/// `F = [Phi(u_R) - Phi(u_L)]/h - u_up S(u_up) (v_R - v_L)/h`
/// with the upwind cell chosen by the sign of `v_R - v_L` (drift points
/// toward higher signal), and each cell receives
/// `(dt/h) (F_right - F_left)` per axis plus `dt f(u, v)`. Boundary
/// faces carry zero total flux.
pub fn step_u(
    state: &SimState,
    spec: &ModelSpec,
    grid: &GridSpec,
    dt: f64,
) -> Result<Field, StepError> {
    let u = &state.u;
    let v = &state.v;
    let (nx, ny) = (grid.nx(), grid.ny());

    let phi = |s: f64| -> f64 { spec.eval_phi(s).expect("density nonnegative") };
    let sens = |s: f64| -> f64 { spec.eval_s(s).expect("density nonnegative") };

    let face_flux = |u_l: f64, u_r: f64, v_l: f64, v_r: f64, inv_h: f64| -> f64 {
        let diffusive = (phi(u_r) - phi(u_l)) * inv_h;
        let dv = v_r - v_l;
        let u_up = if dv > 0.0 { u_l } else { u_r };
        diffusive - u_up * sens(u_up) * dv * inv_h
    };

    let inv_hx = 1.0 / grid.hx();
    // x-faces, row-major, (nx + 1) per row; boundary faces exactly zero
    let mut flux_x = vec![0.0; (nx + 1) * ny];
    for j in 0..ny {
        for i in 1..nx {
            let (is, js) = (i as isize, j as isize);
            flux_x[j * (nx + 1) + i] = face_flux(
                u.get(is - 1, js),
                u.get(is, js),
                v.get(is - 1, js),
                v.get(is, js),
                inv_hx,
            );
        }
    }
    let flux_y = if grid.dim() == 2 {
        let inv_hy = 1.0 / grid.hy();
        let mut fy = vec![0.0; nx * (ny + 1)];
        for j in 1..ny {
            for i in 0..nx {
                let (is, js) = (i as isize, j as isize);
                fy[j * nx + i] = face_flux(
                    u.get(is, js - 1),
                    u.get(is, js),
                    v.get(is, js - 1),
                    v.get(is, js),
                    inv_hy,
                );
            }
        }
        Some(fy)
    } else {
        None
    };

    let mut out = Field::zeros(grid);
    for j in 0..ny {
        for i in 0..nx {
            let mut val =
                u[(i, j)] + dt * inv_hx * (flux_x[j * (nx + 1) + i + 1] - flux_x[j * (nx + 1) + i]);
            if let Some(fy) = &flux_y {
                let inv_hy = 1.0 / grid.hy();
                val += dt * inv_hy * (fy[(j + 1) * nx + i] - fy[j * nx + i]);
            }
            val += dt
                * spec
                    .eval_f(u[(i, j)], v[(i, j)])
                    .expect("state nonnegative");
            if val < 0.0 {
                return Err(StepError::NegativeDensity {
                    index: j * nx + i,
                    value: val,
                });
            }
            out[(i, j)] = val;
        }
    }
    Ok(out)
}

/// One implicit step of the signal equation with the reaction frozen at
/// the current density:
/// `(I - dt lap + dt diag(u)) v' = v` in consumption mode,
/// `(I - dt lap + dt I) v' = v + dt u` in Keller-Segel mode.
/// Solved by conjugate gradients warm-started at the current signal.
pub fn step_v(
    state: &SimState,
    spec: &ModelSpec,
    grid: &GridSpec,
    dt: f64,
    rtol: f64,
) -> Result<Field, StepError> {
    let n = grid.cell_count();
    let u_int = state.u.interior_to_vec();
    let v_int = state.v.interior_to_vec();

    let (coeff, rhs): (Vec<f64>, Vec<f64>) = match spec.signal_mode {
        SignalMode::Consumption => (u_int, v_int),
        SignalMode::KellerSegel => {
            let rhs = v_int
                .iter()
                .zip(u_int.iter())
                .map(|(v, u)| v + dt * u)
                .collect();
            (vec![1.0; n], rhs)
        }
    };

    let mut scratch = Field::zeros(grid);
    let inv_hx2 = 1.0 / (grid.hx() * grid.hx());
    let inv_hy2 = 1.0 / (grid.hy() * grid.hy());
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut apply = |x: &[f64], out: &mut [f64]| {
        scratch.set_interior(x);
        scratch.apply_neumann_ghosts();
        for j in 0..ny {
            for i in 0..nx {
                let (is, js) = (i as isize, j as isize);
                let c = scratch.get(is, js);
                let lap = (scratch.get(is - 1, js) - 2.0 * c + scratch.get(is + 1, js)) * inv_hx2
                    + (scratch.get(is, js - 1) - 2.0 * c + scratch.get(is, js + 1)) * inv_hy2;
                let k = j * nx + i;
                out[k] = c - dt * lap + dt * coeff[k] * c;
            }
        }
    };

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let b_norm2 = dot(&rhs, &rhs);
    let mut x = state.v.interior_to_vec();
    if b_norm2 == 0.0 {
        let mut out = Field::zeros(grid);
        out.apply_neumann_ghosts();
        return Ok(out);
    }
    let target = rtol * rtol * b_norm2;

    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let max_iter = 10 * n;
    let mut converged = rs <= target;
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if converged {
            break;
        }
        apply(&p, &mut ap);
        let denom = dot(&p, &ap);
        if denom <= 0.0 {
            break;
        }
        let alpha = rs / denom;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rs_new = dot(&r, &r);
        if rs_new <= target {
            converged = true;
            break;
        }
        let beta = rs_new / rs;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        rs = rs_new;
    }
    if !converged {
        return Err(StepError::SolverStalled(max_iter));
    }

    let mut out = Field::zeros(grid);
    out.set_interior(&x);
    Ok(out)
}

/// Advance the coupled system from `(u0, v0)` until `t_end`, a blow-up
/// threshold crossing, a dead-core detection or a numerical failure,
/// recording probes at the configured cadence and density snapshots at
/// the configured times.
pub fn run(
    u0: Field,
    v0: Field,
    spec: &ModelSpec,
    grid: &GridSpec,
    cfg: &StepperConfig,
    probes: &ProbeConfig,
) -> Result<RunOutput, SimError> {
    cfg.validate()?;
    if probes.record_every == 0 {
        return Err(SimError::BadConfig("record_every must be >= 1".into()));
    }
    if u0.nx() != grid.nx() || u0.ny() != grid.ny() || v0.nx() != grid.nx() || v0.ny() != grid.ny()
    {
        return Err(SimError::Precondition(
            "field shapes do not match grid".into(),
        ));
    }
    if !u0.all_finite() || !v0.all_finite() {
        return Err(SimError::Precondition("initial data must be finite".into()));
    }
    if cfg.halt_on_deadcore {
        if !(u0.min() > 0.0) {
            return Err(SimError::Precondition(
                "initial density must be strictly positive".into(),
            ));
        }
    } else if u0.min() < 0.0 {
        return Err(SimError::Precondition(
            "initial density must be nonnegative".into(),
        ));
    }
    if v0.min() < 0.0 {
        return Err(SimError::Precondition(
            "initial signal must be nonnegative".into(),
        ));
    }
    if !(v0.max() > 0.0) {
        return Err(SimError::Precondition(
            "initial signal must not vanish identically".into(),
        ));
    }

    let mut state = SimState {
        u: u0,
        v: v0,
        t: 0.0,
        step: 0,
    };
    state.u.apply_neumann_ghosts();
    state.v.apply_neumann_ghosts();

    let mut snapshot_times = probes.snapshot_times.clone();
    snapshot_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut next_snapshot = 0usize;

    let mut series = ProbeSeries::default();
    let mut trajectory = Trajectory::default();

    let record = |state: &SimState, series: &mut ProbeSeries| {
        if series.records.last().is_none_or(|r| r.t < state.t) {
            series.records.push(ProbeRecord::measure(
                state.t,
                &state.u,
                &state.v,
                grid,
                cfg.deadcore_epsilon,
            ));
        }
    };
    let snapshot = |state: &SimState, next: &mut usize, trajectory: &mut Trajectory| {
        while *next < snapshot_times.len() && snapshot_times[*next] <= state.t + 1e-12 {
            trajectory.snapshots.push((state.t, state.u.clone()));
            *next += 1;
        }
    };
    let check_exit = |state: &SimState| -> Option<ExitReason> {
        if !state.u.all_finite() || !state.v.all_finite() {
            return Some(ExitReason::NonFinite { step: state.step });
        }
        if state.u.max() > cfg.blowup_threshold {
            return Some(ExitReason::BlowUp {
                step: state.step,
                t: state.t,
            });
        }
        if cfg.halt_on_deadcore && state.u.min() <= cfg.deadcore_epsilon {
            return Some(ExitReason::DeadCore {
                step: state.step,
                t: state.t,
            });
        }
        None
    };

    record(&state, &mut series);
    snapshot(&state, &mut next_snapshot, &mut trajectory);

    let exit = loop {
        if let Some(exit) = check_exit(&state) {
            break exit;
        }
        if state.t >= cfg.t_end - 1e-14 * cfg.t_end {
            break ExitReason::Completed;
        }
        let dt = match compute_dt(&state, spec, grid, cfg) {
            Ok(dt) => dt,
            Err(_) => break ExitReason::NonFinite { step: state.step },
        };
        let u_next = match step_u(&state, spec, grid, dt) {
            Ok(u) => u,
            Err(StepError::NegativeDensity { .. }) => {
                break ExitReason::CflViolation { step: state.step }
            }
            Err(_) => break ExitReason::NonFinite { step: state.step },
        };
        let v_next = match step_v(&state, spec, grid, dt, cfg.solver_rtol) {
            Ok(v) => v,
            Err(StepError::SolverStalled(_)) => {
                break ExitReason::SolverFailure { step: state.step }
            }
            Err(_) => break ExitReason::NonFinite { step: state.step },
        };
        state.u = u_next;
        state.v = v_next;
        state.u.apply_neumann_ghosts();
        state.v.apply_neumann_ghosts();
        state.t += dt;
        state.step += 1;
        series.max_dt = series.max_dt.max(dt);

        if state.step.is_multiple_of(probes.record_every) {
            record(&state, &mut series);
        }
        snapshot(&state, &mut next_snapshot, &mut trajectory);
    };

    record(&state, &mut series);
    Ok(RunOutput {
        trajectory,
        series,
        exit,
        final_state: state,
    })
}
