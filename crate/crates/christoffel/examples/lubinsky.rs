//! Kernel comparison under nodewise domination, and the truncation chain.
//!
//! When every weight of mu1 is at most the matching weight of mu2, the two
//! kernels differ by at most the diagonal gap:
//!
//!   integral over mu1 of |B1(x, .) - B2(x, .)|^2  <=  B1(x, x) - B2(x, x)
//!
//! and the right side is itself nonnegative. Dropping far-away nodes through
//! a bump profile is a special case: the truncated kernel stays close to the
//! full one wherever the diagonal gap stays small.

use num_complex::Complex64;

use christoffel::{
    lubinsky_check, truncation_error, BumpProfile, DiscreteMeasure, IntervalRule, MetricWeight,
};

fn main() -> christoffel::Result<()> {
    let phi = MetricWeight::zero();
    let mu2 = DiscreteMeasure::interval(128, IntervalRule::Chebyshev);

    // Shrink the weights by a node-dependent factor in (0, 1].
    let weights: Vec<f64> = mu2
        .weights()
        .iter()
        .zip(mu2.nodes())
        .map(|(&w, z)| w * (0.4 + 0.3 * (1.0 + z.re)))
        .collect();
    let mu1 = DiscreteMeasure::new(mu2.nodes().to_vec(), weights)?;

    println!("chebyshev(128) against a nodewise-shrunk copy, k = 24");
    println!("{:>22} {:>14} {:>14} {:>12}", "x", "lhs", "rhs", "margin");
    for x in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(0.3, 0.2),
        Complex64::new(-0.9, 0.0),
    ] {
        let report = lubinsky_check(&mu1, &mu2, &phi, 24, x)?;
        println!(
            "{:>22} {:>14.6e} {:>14.6e} {:>12.3e}",
            format!("{:.2}{:+.2}i", x.re, x.im),
            report.lhs,
            report.rhs,
            report.rhs - report.lhs
        );
        assert!(report.lhs <= report.rhs + 1e-9);
        assert!(report.rhs >= -1e-10);
    }

    // Truncation: keep a neighborhood of the origin, fade out the rest.
    let bump = BumpProfile::new(Complex64::new(0.0, 0.0), 0.5, 0.8);
    println!("\ntruncation by a bump fading over [0.5, 0.8] around 0");
    println!("{:>4} {:>16} {:>14}", "k", "kernel_l2_diff", "diag_gap");
    for k in [8usize, 16, 24] {
        let report = truncation_error(&mu2, &bump, &phi, k)?;
        println!(
            "{:>4} {:>16.6e} {:>14.6e}",
            k, report.kernel_l2_diff, report.diag_gap
        );
        assert!(report.kernel_l2_diff <= report.diag_gap + 1e-8);
    }
    Ok(())
}
