//! Exponential decay of the partial kernel near an imposed vanishing point.
//!
//! Sections forced to vanish to order ceil(eps * k) at y0 have almost no
//! mass left near y0: the sup of the partial kernel diagonal over a probe
//! disk around y0 decays exponentially in k. The fitted log-slope is the
//! decay rate.

use num_complex::Complex64;

use christoffel::{forbidden_scan, DiscreteMeasure, MetricWeight, ProbeGrid};

fn main() {
    let mu = DiscreteMeasure::circle(64, 1.0);
    let phi = MetricWeight::zero();
    let y0 = Complex64::new(0.0, 0.0);
    let eps = 0.25;
    let ks = [8usize, 16, 24, 32, 40, 48];
    let probe = ProbeGrid::new(0.2);

    let scan = forbidden_scan(&mu, &phi, y0, eps, &ks, &probe).expect("scan");

    println!("circle(64), y0 = 0, eps = {eps}, probe radius 0.2");
    println!("{:>4} {:>6} {:>14} {:>10}", "k", "order", "sup_diag", "trace");
    for row in &scan.rows {
        println!(
            "{:>4} {:>6} {:>14.6e} {:>10.4}",
            row.k, row.order, row.sup_diag, row.trace
        );
    }

    let slope = scan.slope.expect("six rows give a slope");
    println!("log-slope of sup_diag in k: {slope:.4}");
    assert!(slope < -0.1, "the probe disk sits inside the forbidden region");
}
