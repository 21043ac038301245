//! The near-dead-core stress case: a density dipping to 0.05 under
//! strong sensitivity, run at two resolutions. Prints the certified
//! floor and the comparison margin at each resolution; the margin should
//! improve (or hold) under refinement.

use taxisim::catalog;
use taxisim::cli::execute;

fn main() {
    let base = catalog::near_deadcore_1d();
    for cells in [64usize, 128] {
        let mut cfg = base.clone();
        cfg.grid =
            taxisim::grid::GridSpec::new_1d(base.grid.length_x(), cells).expect("valid grid");
        let exec = execute(&cfg).expect("scenario runs");
        println!("cells = {cells}");
        println!("  exit: {:?}", exec.output.exit);
        let min_u = exec
            .output
            .series
            .records
            .iter()
            .fold(f64::INFINITY, |a, r| a.min(r.min_u));
        let deadcore: usize = exec
            .output
            .series
            .records
            .iter()
            .map(|r| r.deadcore_cells)
            .sum();
        println!("  min u over run = {min_u}, dead-core cells recorded = {deadcore}");
        match &exec.certificate {
            Some(Ok(cert)) => {
                println!(
                    "  A = {}, B = {}, delta_u = {}",
                    cert.a, cert.b, cert.delta_u
                );
                println!(
                    "  min margin = {} (tolerance {}), holds = {}",
                    cert.min_margin, cert.tolerance, cert.holds
                );
            }
            Some(Err(e)) => println!("  certificate not evaluable: {e}"),
            None => println!("  certificate skipped"),
        }
    }
}
