//! Structural checks on diffusion laws: the porous-medium family across
//! its exponent range, the constant-coefficient case, and a deliberately
//! broken table with a dip.

use taxisim::model::{Diffusion, ModelSpec, MonotoneTable, Sensitivity, SignalMode, Source};

fn spec(diffusion: Diffusion, s0: f64, p: f64) -> ModelSpec {
    ModelSpec::new(
        diffusion,
        Sensitivity::Constant { chi: 1.0 },
        Source::Zero,
        SignalMode::Consumption,
        s0,
        p,
    )
    .expect("valid model")
}

fn report(label: &str, spec: &ModelSpec) {
    let r = spec.validate_hypotheses(1000).expect("enough samples");
    println!(
        "{label}: cd_min = {:.6}, cd_max = {:.6}, admissible = {}",
        r.cd_min, r.cd_max, r.admissible
    );
    for v in r.violations.iter().take(3) {
        println!("    violation at s = {}: {}", v.s, v.condition);
    }
    if r.violations.len() > 3 {
        println!("    ... and {} more", r.violations.len() - 3);
    }
}

fn main() {
    for m in [1.25, 1.5, 2.0, 2.5, 3.0] {
        report(
            &format!("porous_medium m = {m}, p = m"),
            &spec(Diffusion::PorousMedium { m }, 1.0, m),
        );
    }
    report(
        "linear d = 1, p = 1.5",
        &spec(Diffusion::Linear { d: 1.0 }, 1.0, 1.5),
    );

    // porous medium with a p far below the exponent: the lower
    // inequality collapses near the origin
    report(
        "porous_medium m = 2, p = 1.2",
        &spec(Diffusion::PorousMedium { m: 2.0 }, 1.0, 1.2),
    );

    // a table with a dip violates D' >= 0
    let dip = MonotoneTable::new(&[(0.0, 0.0), (0.25, 0.5), (0.5, 0.2), (1.0, 1.0)])
        .expect("structurally valid table");
    report(
        "custom table with a dip",
        &spec(Diffusion::Custom(dip), 1.0, 2.0),
    );
}
