//! Peak sections: the unit-norm section with the largest modulus at a point.
//!
//! Among sections s with ||s|| = 1, the modulus |s(x)| is maximized by the
//! normalized kernel column B(., x) / sqrt(B(x, x)), achieving exactly
//! sqrt(B(x, x)). The same quantity controls the reproducing identity
//! sum_j w_j |B(x, z_j)|^2 = B(x, x), checked here at off-node points.

use num_complex::Complex64;

use christoffel::{orthonormal_basis, DiscreteMeasure, KernelEvaluator, MetricWeight};

fn main() -> christoffel::Result<()> {
    let mu = DiscreteMeasure::circle(64, 1.0);
    let phi = MetricWeight::gaussian(0.05);
    let basis = orthonormal_basis(&mu, &phi, 16)?;
    let kernel = KernelEvaluator::new(&basis);

    println!("circle(64) with a gaussian weight, k = 16");
    println!("{:>22} {:>12} {:>14} {:>12}", "x", "peak", "sqrt(B(x,x))", "reproduce");

    for x in [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 0.5),
        Complex64::new(0.0, 0.9),
        Complex64::new(-0.3, 0.1),
    ] {
        let peak = kernel.peak_section(x)?;
        let bxx = kernel.diagonal(&[x])[0];

        // Coefficients are unit-norm by construction.
        let norm: f64 = peak.coefficients.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        // The reproducing identity, evaluated by brute force over the nodes.
        let reproduce: f64 = mu
            .nodes()
            .iter()
            .zip(mu.weights())
            .map(|(&z, &w)| w * kernel.value(x, z).norm_sqr())
            .sum();

        println!(
            "{:>22} {:>12.6} {:>14.6} {:>12.3e}",
            format!("{:.2}{:+.2}i", x.re, x.im),
            peak.value,
            bxx.sqrt(),
            (reproduce - bxx).abs() / bxx
        );
        assert!((peak.value - bxx.sqrt()).abs() <= 1e-10 * (1.0 + bxx.sqrt()));
        assert!((reproduce - bxx).abs() <= 1e-10 * bxx);
    }
    Ok(())
}
