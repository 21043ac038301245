//! Degenerate-diffusion order study: the porous-medium flux against the
//! self-similar source solution, integrated before its support reaches
//! the boundary.

use taxisim::catalog;
use taxisim::cli::{convergence_study, order_table};

fn main() {
    let cfg = catalog::barenblatt_pm2();
    let rows = convergence_study(&cfg, 3).expect("study runs");
    print!("{}", order_table(&rows));
}
