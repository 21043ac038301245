//! Manufactured-solution refinement study: driftless constant-coefficient
//! diffusion against the exact decaying cosine mode, three dyadic levels.

use taxisim::catalog;
use taxisim::cli::{convergence_study, order_table};

fn main() {
    let cfg = catalog::heat_mms();
    let rows = convergence_study(&cfg, 3).expect("study runs");
    print!("{}", order_table(&rows));
}
