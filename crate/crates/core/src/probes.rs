//! Measured quantities consumed by the certificate machinery: sup norms,
//! discrete gradient/Laplacian norms of the signal, parabolic Hölder
//! seminorm estimates and dead-core detection.

use crate::grid::{grad_component, integrate, laplacian, Axis, Field, GridSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("series covers ({0}, {1}) with only {2} records; need at least {3}")]
    Coverage(f64, f64, usize, usize),
    #[error("need at least {0} snapshots, got {1}")]
    TooFewSnapshots(usize, usize),
    #[error("theta must lie in (0, 1), got {0}")]
    BadTheta(f64),
}

/// One recorded probe sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub t: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub sup_v: f64,
    pub sup_grad_v: f64,
    pub sup_lap_v: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    pub deadcore_cells: usize,
}

impl ProbeRecord {
    /// Measure a state. Both fields must have their ghosts applied.
    pub fn measure(t: f64, u: &Field, v: &Field, grid: &GridSpec, deadcore_epsilon: f64) -> Self {
        ProbeRecord {
            t,
            min_u: u.min(),
            max_u: u.max(),
            sup_v: v.max(),
            sup_grad_v: sup_grad(v, grid),
            sup_lap_v: sup_laplacian(v, grid),
            mass_u: integrate(u, grid),
            mass_v: integrate(v, grid),
            deadcore_cells: detect_dead_core(u, deadcore_epsilon).len(),
        }
    }
}

/// Per-run time series of probe records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbeSeries {
    pub records: Vec<ProbeRecord>,
    /// Largest time step the producing run took; bookkeeping for the
    /// certificate tolerance, not part of the CSV.
    pub max_dt: f64,
}

impl ProbeSeries {
    /// CSV with LF line endings and the fixed column order
    /// `t,min_u,max_u,sup_v,sup_grad_v,sup_lap_v,mass_u,mass_v,deadcore_cells`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("t,min_u,max_u,sup_v,sup_grad_v,sup_lap_v,mass_u,mass_v,deadcore_cells\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.t,
                r.min_u,
                r.max_u,
                r.sup_v,
                r.sup_grad_v,
                r.sup_lap_v,
                r.mass_u,
                r.mass_v,
                r.deadcore_cells
            ));
        }
        out
    }
}

/// Sup of the discrete gradient magnitude: face difference quotients per
/// axis, averaged to cell centers, combined as a Euclidean norm there.
/// Ghosts must be applied.
pub fn sup_grad(v: &Field, grid: &GridSpec) -> f64 {
    let gx = grad_component(v, grid, Axis::X);
    let nx = v.nx();
    let ny = v.ny();
    let gy = if grid.dim() == 2 {
        Some(grad_component(v, grid, Axis::Y))
    } else {
        None
    };
    let mut sup: f64 = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let cx = 0.5 * (gx[j * (nx + 1) + i] + gx[j * (nx + 1) + i + 1]);
            let cy = match &gy {
                Some(gy) => 0.5 * (gy[j * nx + i] + gy[(j + 1) * nx + i]),
                None => 0.0,
            };
            sup = sup.max((cx * cx + cy * cy).sqrt());
        }
    }
    sup
}

/// Sup over interior cells of the discrete Laplacian magnitude. Ghosts
/// must be applied.
pub fn sup_laplacian(v: &Field, grid: &GridSpec) -> f64 {
    laplacian(v, grid)
        .interior()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Minimum number of records past T/2 for a usable K2 measurement.
pub const K2_MIN_RECORDS: usize = 10;

/// Sup of the recorded Laplacian norm of the signal over the second half
/// interval (T/2, T); the measured stand-in for the Schauder constant.
pub fn measure_k2(series: &ProbeSeries, t_final: f64) -> Result<f64, ProbeError> {
    let half = t_final / 2.0;
    let tail: Vec<&ProbeRecord> = series.records.iter().filter(|r| r.t > half).collect();
    if tail.len() < K2_MIN_RECORDS {
        return Err(ProbeError::Coverage(
            half,
            t_final,
            tail.len(),
            K2_MIN_RECORDS,
        ));
    }
    Ok(tail.iter().fold(0.0f64, |acc, r| acc.max(r.sup_lap_v)))
}

/// Diagnostic lower estimate of a parabolic Hölder seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    pub theta: f64,
    pub seminorm: f64,
    pub pair_count: usize,
}

/// Number of random space-time point pairs sampled by
/// [`holder_seminorm`]; exhaustive pairing would be quadratic in the
/// space-time point count.
pub const HOLDER_PAIR_SAMPLES: usize = 100_000;

const HOLDER_SEED: u64 = 0x7a_b1e5;

/// Randomized lower estimate of the `C^{theta, theta/2}` seminorm of a
/// snapshot stack: the maximum of
/// `|u(x,t) - u(y,s)| / (|x-y|^2 + |t-s|)^(theta/2)` over a seeded
/// sample of point pairs. The distance is the parabolic one, squared in
/// space and linear in time.
pub fn holder_seminorm(
    snapshots: &[(f64, Field)],
    grid: &GridSpec,
    theta: f64,
) -> Result<HolderEstimate, ProbeError> {
    if snapshots.len() < 3 {
        return Err(ProbeError::TooFewSnapshots(3, snapshots.len()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(ProbeError::BadTheta(theta));
    }
    let nx = grid.nx();
    let ny = grid.ny();
    let mut rng = ChaCha8Rng::seed_from_u64(HOLDER_SEED);
    let mut seminorm: f64 = 0.0;
    let mut pair_count = 0;
    for _ in 0..HOLDER_PAIR_SAMPLES {
        let a = rng.random_range(0..snapshots.len());
        let b = rng.random_range(0..snapshots.len());
        let (ia, ja) = (rng.random_range(0..nx), rng.random_range(0..ny));
        let (ib, jb) = (rng.random_range(0..nx), rng.random_range(0..ny));
        if a == b && ia == ib && ja == jb {
            continue;
        }
        let (ta, ua) = (&snapshots[a].0, &snapshots[a].1);
        let (tb, ub) = (&snapshots[b].0, &snapshots[b].1);
        let dx = grid.x_center(ia) - grid.x_center(ib);
        let dy = grid.y_center(ja) - grid.y_center(jb);
        let d2 = dx * dx + dy * dy + (ta - tb).abs();
        if d2 == 0.0 {
            continue;
        }
        let diff = (ua[(ia, ja)] - ub[(ib, jb)]).abs();
        seminorm = seminorm.max(diff / d2.powf(theta / 2.0));
        pair_count += 1;
    }
    Ok(HolderEstimate {
        theta,
        seminorm,
        pair_count,
    })
}

/// Row-major indices of interior cells at or below the dead-core
/// threshold.
pub fn detect_dead_core(u: &Field, epsilon: f64) -> Vec<usize> {
    u.interior()
        .enumerate()
        .filter(|(_, v)| *v <= epsilon)
        .map(|(k, _)| k)
        .collect()
}
