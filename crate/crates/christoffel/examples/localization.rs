//! Off-diagonal kernel mass on a Chebyshev grid, shrinking with the degree.
//!
//! The weighted kernel concentrates near the diagonal as k grows: the mass
//! carried by node pairs farther apart than a fixed delta decays. This run
//! prints the normalized off-diagonal mass for a doubling ladder of degrees
//! together with the exactly-known total mass and trace.

use christoffel::{orthonormal_basis, DiscreteMeasure, IntervalRule, KernelEvaluator, MetricWeight};

fn main() -> christoffel::Result<()> {
    let mu = DiscreteMeasure::interval(256, IntervalRule::Chebyshev);
    let phi = MetricWeight::zero();
    let delta = 0.5;

    println!("chebyshev(256), delta = {delta}");
    println!("{:>4} {:>14} {:>14} {:>12}", "k", "offdiag_mass", "total_mass", "trace");

    let mut first = None;
    for k in [8usize, 16, 32, 64] {
        let basis = orthonormal_basis(&mu, &phi, k)?;
        let kernel = KernelEvaluator::new(&basis);
        let mass = kernel.offdiag_mass(delta);
        println!(
            "{:>4} {:>14.6e} {:>14.6e} {:>12.6}",
            k,
            mass,
            kernel.total_mass(),
            kernel.trace()
        );
        first.get_or_insert(mass);
    }

    let basis = orthonormal_basis(&mu, &phi, 64)?;
    let last = KernelEvaluator::new(&basis).offdiag_mass(delta);
    let ratio = last / first.unwrap();
    println!("mass(64) / mass(8) = {ratio:.4}");
    assert!(ratio < 1.0, "off-diagonal mass should shrink with k");
    Ok(())
}
