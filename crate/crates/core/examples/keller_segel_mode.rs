//! The produced-signal variant `v_t = lap v - v + u` with saturating
//! sensitivity. The signal sup no longer decays monotonically (cells
//! produce it), but the positivity certificate machinery applies
//! unchanged.

use taxisim::catalog;
use taxisim::cli::execute;

fn main() {
    let cfg = catalog::kellersegel_1d();
    let exec = execute(&cfg).expect("scenario runs");
    println!("exit: {:?}", exec.output.exit);
    let series = &exec.output.series;
    let sup_v0 = series.records.first().unwrap().sup_v;
    let sup_v = series.records.iter().fold(0.0f64, |a, r| a.max(r.sup_v));
    let min_u = series
        .records
        .iter()
        .fold(f64::INFINITY, |a, r| a.min(r.min_u));
    println!("sup v over run = {sup_v} (initial {sup_v0})");
    println!("min u over run = {min_u}");
    match &exec.certificate {
        Some(Ok(cert)) => println!(
            "certificate: delta_u = {}, min margin = {}, holds = {}",
            cert.delta_u, cert.min_margin, cert.holds
        ),
        Some(Err(e)) => println!("certificate not evaluable: {e}"),
        None => println!("certificate skipped"),
    }
}
