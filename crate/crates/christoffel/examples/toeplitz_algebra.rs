//! Toeplitz compressions turning multiplicative in the degree limit.
//!
//! For the symbol f = Re z on the unit circle the compression T(f) is the
//! free Jacobi tridiagonal, and the normalized Schatten-1 defect
//! ||T(f)^2 - T(f^2)||_1 / k is exactly 1 / (2k). The same run checks the
//! trace identity (1/k) Tr T(f) = integral of f against the normalized
//! kernel diagonal, which holds to roundoff at every k, and the second
//! spectral moment gap.

use christoffel::{
    algebra_defect, hermitian_toeplitz, moment_gap, orthonormal_basis, spectral_measure,
    szego_identity, DiscreteMeasure, MetricWeight, SymbolFunction,
};

fn main() -> christoffel::Result<()> {
    let mu = DiscreteMeasure::circle(256, 1.0);
    let phi = MetricWeight::zero();
    let f = SymbolFunction::re_z();

    println!("circle(256), f = Re z");
    println!(
        "{:>4} {:>13} {:>10} {:>13} {:>13} {:>10}",
        "k", "defect_p1", "1/(2k)", "szego_resid", "moment_gap2", "mean"
    );

    for k in [8usize, 16, 32, 64] {
        let basis = orthonormal_basis(&mu, &phi, k)?;
        let defect = algebra_defect(&basis, &f, &f, 1.0)?;
        let szego = szego_identity(&basis, &f);
        let gap = moment_gap(&basis, &f, 2);

        let op = hermitian_toeplitz(&basis, &f)?;
        let spec = spectral_measure(&op)?;

        println!(
            "{:>4} {:>13.6e} {:>10.6} {:>13.2e} {:>13.6e} {:>10.2e}",
            k,
            defect,
            1.0 / (2.0 * k as f64),
            szego.residual(),
            gap,
            spec.mean()
        );

        assert!((defect - 1.0 / (2.0 * k as f64)).abs() < 1e-10);
        assert!(szego.residual() < 1e-12);
    }

    println!("defect and moment gap vanish like 1/k; the trace identity is exact");
    Ok(())
}
