//! Run the one-dimensional consumption baseline end to end and print the
//! measured series extremes plus the certificate verdict.

use taxisim::catalog;
use taxisim::cli::execute;
use taxisim::probes::holder_seminorm;

fn main() {
    let cfg = catalog::consumption_1d_baseline();
    let exec = execute(&cfg).expect("baseline scenario runs");

    println!("exit: {:?}", exec.output.exit);
    let series = &exec.output.series;
    let first = series.records.first().unwrap();
    let last = series.records.last().unwrap();
    println!(
        "records: {} over t in [{}, {}], max dt {}",
        series.records.len(),
        first.t,
        last.t,
        series.max_dt
    );
    let min_u = series
        .records
        .iter()
        .fold(f64::INFINITY, |a, r| a.min(r.min_u));
    let max_u = series.records.iter().fold(0.0f64, |a, r| a.max(r.max_u));
    let sup_v = series.records.iter().fold(0.0f64, |a, r| a.max(r.sup_v));
    println!("min u over run = {min_u}");
    println!("max u over run = {max_u}");
    println!("sup v over run = {sup_v} (initial {})", first.sup_v);
    println!(
        "mass drift = {:e}",
        (last.mass_u - first.mass_u).abs() / first.mass_u
    );

    match &exec.certificate {
        Some(Ok(cert)) => {
            println!("certificate:");
            println!("  A = {}", cert.a);
            println!("  K2 = {}", cert.k2);
            println!("  C_S = {}", cert.c_s);
            println!("  B = C_S K2 = {}", cert.b);
            println!("  delta_u = A e^(-B T) = {}", cert.delta_u);
            println!(
                "  min margin = {} (tolerance {})",
                cert.min_margin, cert.tolerance
            );
            println!("  holds = {}", cert.holds);
        }
        Some(Err(e)) => println!("certificate not evaluable: {e}"),
        None => println!("certificate skipped"),
    }
    println!(
        "gradient bound (calibrated): measured {} <= bound {} -> holds = {}",
        exec.gradient.measured_sup, exec.gradient.bound, exec.gradient.holds
    );

    // randomized lower estimate of the space-time regularity of the
    // stored density snapshots
    for theta in [0.25, 0.5, 0.75] {
        let est = holder_seminorm(&exec.output.trajectory.snapshots, &cfg.grid, theta)
            .expect("snapshots available");
        println!(
            "parabolic Holder estimate: theta = {theta} -> seminorm {} ({} pairs)",
            est.seminorm, est.pair_count
        );
    }
}
