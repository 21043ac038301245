//! Named scenario catalog. Six configurations spanning the behaviors the
//! solver and certificate machinery are built for: consumption baselines
//! in both ranks, a near-dead-core stress case, the Keller-Segel signal
//! mode, and two scenarios with closed-form references for convergence
//! studies.

use crate::config::{OutputConfig, Profile, RunConfig};
use crate::grid::GridSpec;
use crate::model::{Diffusion, ModelSpec, Sensitivity, SignalMode, Source};
use crate::stepper::{ProbeConfig, StepperConfig};

pub const SCENARIOS: [&str; 6] = [
    "consumption_1d_baseline",
    "consumption_2d_baseline",
    "near_deadcore_1d",
    "kellersegel_1d",
    "heat_mms",
    "barenblatt_pm2",
];

pub fn by_name(name: &str) -> Option<RunConfig> {
    match name {
        "consumption_1d_baseline" => Some(consumption_1d_baseline()),
        "consumption_2d_baseline" => Some(consumption_2d_baseline()),
        "near_deadcore_1d" => Some(near_deadcore_1d()),
        "kellersegel_1d" => Some(kellersegel_1d()),
        "heat_mms" => Some(heat_mms()),
        "barenblatt_pm2" => Some(barenblatt_pm2()),
        _ => None,
    }
}

fn pm_model(m: f64, sensitivity: Sensitivity, mode: SignalMode) -> ModelSpec {
    ModelSpec::new(
        Diffusion::PorousMedium { m },
        sensitivity,
        Source::Zero,
        mode,
        1.0,
        m,
    )
    .expect("catalog model is valid")
}

fn output(name: &str) -> OutputConfig {
    OutputConfig {
        directory: format!("out/{name}"),
        prefix: name.to_string(),
    }
}

/// Porous-medium diffusion with moderate constant sensitivity on the
/// unit interval; the reference consumption run behind most checks.
pub fn consumption_1d_baseline() -> RunConfig {
    RunConfig {
        grid: GridSpec::new_1d(1.0, 64).expect("valid grid"),
        model: pm_model(
            2.0,
            Sensitivity::Constant { chi: 0.5 },
            SignalMode::Consumption,
        ),
        stepper: StepperConfig::new(0.5),
        u0: Profile::CosineBump {
            offset: 1.0,
            amplitude: 0.5,
        },
        v0: Profile::CosineBump {
            offset: 0.6,
            amplitude: 0.4,
        },
        probes: ProbeConfig {
            record_every: 10,
            snapshot_times: vec![0.05, 0.1, 0.15, 0.2, 0.26, 0.3, 0.34, 0.38, 0.42, 0.46, 0.5],
        },
        output: output("consumption_1d_baseline"),
    }
}

/// Two-dimensional analogue of the baseline on the unit square.
pub fn consumption_2d_baseline() -> RunConfig {
    RunConfig {
        grid: GridSpec::new_2d(1.0, 1.0, 32, 32).expect("valid grid"),
        model: pm_model(
            2.0,
            Sensitivity::Constant { chi: 0.5 },
            SignalMode::Consumption,
        ),
        stepper: StepperConfig::new(0.5),
        u0: Profile::CosineBump {
            offset: 1.0,
            amplitude: 0.5,
        },
        v0: Profile::CosineBump {
            offset: 0.6,
            amplitude: 0.4,
        },
        probes: ProbeConfig {
            record_every: 10,
            snapshot_times: vec![0.05, 0.1, 0.15, 0.2, 0.26, 0.3, 0.34, 0.38, 0.42, 0.46, 0.5],
        },
        output: output("consumption_2d_baseline"),
    }
}

/// Deep Gaussian dip in the density under strong sensitivity: the
/// density floor starts two decades below the baseline and the
/// certificate has to work for its margin. The horizon leaves the dip
/// fully relaxed before the comparison window opens, so the margin is
/// grid-consistent.
pub fn near_deadcore_1d() -> RunConfig {
    RunConfig {
        grid: GridSpec::new_1d(1.0, 64).expect("valid grid"),
        model: pm_model(
            2.0,
            Sensitivity::Constant { chi: 2.0 },
            SignalMode::Consumption,
        ),
        stepper: StepperConfig::new(0.8),
        u0: Profile::GaussianDip {
            base: 1.0,
            floor: 0.05,
            depth: 1.0,
            width: 0.1,
        },
        v0: Profile::CosineBump {
            offset: 0.6,
            amplitude: 0.4,
        },
        probes: ProbeConfig {
            record_every: 10,
            snapshot_times: vec![
                0.1, 0.2, 0.3, 0.4, 0.42, 0.46, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8,
            ],
        },
        output: output("near_deadcore_1d"),
    }
}

/// Signal produced by the cells instead of consumed: `v_t = lap v - v + u`,
/// with saturating sensitivity.
pub fn kellersegel_1d() -> RunConfig {
    RunConfig {
        grid: GridSpec::new_1d(1.0, 64).expect("valid grid"),
        model: pm_model(
            2.0,
            Sensitivity::Saturating {
                chi: 1.0,
                kappa: 1.0,
            },
            SignalMode::KellerSegel,
        ),
        stepper: StepperConfig::new(0.25),
        u0: Profile::CosineBump {
            offset: 1.0,
            amplitude: 0.5,
        },
        v0: Profile::CosineBump {
            offset: 0.5,
            amplitude: 0.3,
        },
        probes: ProbeConfig {
            record_every: 10,
            snapshot_times: vec![0.05, 0.1, 0.14, 0.17, 0.2, 0.22, 0.25],
        },
        output: output("kellersegel_1d"),
    }
}

/// Driftless constant-coefficient diffusion with the exact cosine-mode
/// solution; the manufactured reference for the convergence command.
pub fn heat_mms() -> RunConfig {
    RunConfig {
        grid: GridSpec::new_1d(1.0, 32).expect("valid grid"),
        model: ModelSpec::new(
            Diffusion::Linear { d: 1.0 },
            Sensitivity::Constant { chi: 0.0 },
            Source::Zero,
            SignalMode::Consumption,
            1.0,
            2.0,
        )
        .expect("valid model"),
        stepper: StepperConfig::new(0.1),
        u0: Profile::CosineBump {
            offset: 1.0,
            amplitude: 0.5,
        },
        v0: Profile::Constant { value: 0.01 },
        probes: ProbeConfig {
            record_every: 20,
            snapshot_times: vec![0.06, 0.08, 0.1],
        },
        output: output("heat_mms"),
    }
}

/// Degenerate diffusion against the self-similar source solution,
/// integrated from absolute time 0.5 to 0.75 so the support never
/// touches the boundary. The exact profile has compact support, so
/// dead-core halting is off and no certificate applies.
pub fn barenblatt_pm2() -> RunConfig {
    let mut stepper = StepperConfig::new(0.25);
    stepper.halt_on_deadcore = false;
    RunConfig {
        grid: GridSpec::new_1d(2.0, 64).expect("valid grid"),
        model: pm_model(
            2.0,
            Sensitivity::Constant { chi: 0.0 },
            SignalMode::Consumption,
        ),
        stepper,
        u0: Profile::Barenblatt { c: 0.08, t0: 0.5 },
        v0: Profile::Constant { value: 0.01 },
        probes: ProbeConfig {
            record_every: 20,
            snapshot_times: vec![0.125, 0.25],
        },
        output: output("barenblatt_pm2"),
    }
}
