//! Rank collapse of the off-space commutator S = (I - P) M_f P.
//!
//! Multiplying a degree-below-k section by a symbol of degree at most k0
//! leaks at most k0 dimensions out of the section space, so S has rank at
//! most min(k0, k) no matter how many nodes carry the measure. The squared
//! Hilbert-Schmidt norm also equals a kernel oscillation sum
//! (1/2) sum w_a w_b |B(z_a, z_b)|^2 |f(z_a) - f(z_b)|^2, reported here as
//! kernel_l2.

use num_complex::Complex64;

use christoffel::{
    orthonormal_basis, s_operator, DiscreteMeasure, IntervalRule, MetricWeight, RationalSymbol,
};

fn main() -> christoffel::Result<()> {
    let phi = MetricWeight::zero();
    let f = RationalSymbol::coordinate();

    println!("f = z, degree budget k0 = 1");
    println!(
        "{:>20} {:>4} {:>13} {:>13} {:>5} {:>6}",
        "measure", "k", "hs_norm_sq", "kernel_l2", "rank", "bound"
    );

    let cases: Vec<(&str, DiscreteMeasure)> = vec![
        ("circle(128)", DiscreteMeasure::circle(128, 1.0)),
        ("uniform(64)", DiscreteMeasure::interval(64, IntervalRule::Uniform)),
        ("chebyshev(96)", DiscreteMeasure::interval(96, IntervalRule::Chebyshev)),
    ];

    for (label, mu) in &cases {
        for k in [8usize, 24, 48] {
            let basis = orthonormal_basis(mu, &phi, k)?;
            let s = s_operator(&basis, &f, 1)?;
            println!(
                "{:>20} {:>4} {:>13.6e} {:>13.6e} {:>5} {:>6}",
                label, k, s.hs_norm_sq, s.kernel_l2, s.numerical_rank, s.rank_bound
            );
            assert!(s.numerical_rank <= s.rank_bound);
        }
    }

    // A true rational symbol: z / (z + 2), pole well away from the supports.
    let g = RationalSymbol::new(
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)],
    );
    let mu = DiscreteMeasure::circle(128, 1.0);
    let basis = orthonormal_basis(&mu, &phi, 32)?;
    let s = s_operator(&basis, &g, 1)?;
    println!(
        "\nf = z/(z+2) on circle(128), k = 32: rank {} (bound {}), hs {:.6e}",
        s.numerical_rank, s.rank_bound, s.hs_norm_sq
    );
    assert!(s.numerical_rank <= s.rank_bound);
    Ok(())
}
