//! Refit the Neumann heat-semigroup smoothing constant behind the
//! gradient-bound monitor.
//!
//! Pure heat flow from `v0(x) = cos(pi x / L)` is stepped on the
//! canonical calibration setup and the smallest constant `C1` with
//! `sup|grad v(t)| <= C1 (1 + t^{-1/2}) e^{-lambda1 t} sup|v0|` on every
//! sampled time is printed. The crate ships the fitted value as
//! `bounds::DEFAULT_C1`; the monitor is calibrated, not certified.

use taxisim::bounds::{
    calibrate_c1, C1_CALIBRATION_CELLS, C1_CALIBRATION_DT, C1_CALIBRATION_HORIZON, DEFAULT_C1,
};
use taxisim::grid::GridSpec;

fn main() {
    let grid = GridSpec::new_1d(1.0, C1_CALIBRATION_CELLS).expect("valid grid");
    println!(
        "calibrating on {} cells, dt = {}, horizon = {}",
        C1_CALIBRATION_CELLS, C1_CALIBRATION_DT, C1_CALIBRATION_HORIZON
    );
    let fitted = calibrate_c1(&grid, C1_CALIBRATION_DT, C1_CALIBRATION_HORIZON);
    println!("fitted C1 = {fitted}");
    println!("shipped DEFAULT_C1 = {DEFAULT_C1}");

    // a coarser, shorter refit for comparison
    let coarse = GridSpec::new_1d(1.0, 64).expect("valid grid");
    let quick = calibrate_c1(&coarse, 1e-3, 1.0);
    println!("quick refit (64 cells, dt = 1e-3, horizon 1) = {quick}");
}
