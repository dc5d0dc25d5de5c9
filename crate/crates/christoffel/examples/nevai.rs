//! Anchor-point localization measures.
//!
//! Fixing an anchor x, the masses w_j |B(x, z_j)|^2 / B(x, x) form a
//! probability measure that concentrates at x as k grows. Its volume factor
//! B(x, x) / k tracks the local density of sections.

use num_complex::Complex64;

use christoffel::{orthonormal_basis, DiscreteMeasure, IntervalRule, KernelEvaluator, MetricWeight};

fn main() {
    let mu = DiscreteMeasure::interval(256, IntervalRule::Chebyshev);
    let phi = MetricWeight::zero();
    let anchor = Complex64::new(0.1, 0.0);
    let r = 0.25;

    println!("chebyshev(256), anchor {anchor}, radius {r}");
    println!("{:>4} {:>12} {:>16} {:>10}", "k", "vol", "mass_outside", "total");

    let mut previous = f64::INFINITY;
    for k in [8usize, 16, 32, 64, 128] {
        let basis = orthonormal_basis(&mu, &phi, k).expect("basis");
        let kernel = KernelEvaluator::new(&basis);
        let nevai = kernel.nevai_measure(anchor).expect("anchor is not a base point");

        let outside = nevai.mass_outside(r);
        println!(
            "{:>4} {:>12.6} {:>16.6e} {:>10.6}",
            k,
            nevai.vol,
            outside,
            nevai.total()
        );

        assert!((nevai.total() - 1.0).abs() < 1e-10, "masses are a probability");
        previous = previous.min(outside);
    }

    println!("far mass at k = 128 is down to {previous:.3e}");
}
