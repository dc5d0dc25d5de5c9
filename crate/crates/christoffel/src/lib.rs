//! Numerical laboratory for weighted Christoffel-Darboux kernels over
//! discrete measures on the complex plane.
//!
//! Given a finite measure mu = sum_j w_j delta_{z_j} and a metric weight
//! phi, the crate builds weighted orthonormal polynomial sections, assembles
//! the associated Bergman-style kernels (full, and partial ones vanishing to
//! prescribed order at a point), and probes the operator theory that hangs
//! off them: localization of the kernel mass near the diagonal, exponential
//! smallness in forbidden regions, Lubinsky-style comparison between
//! dominated measures, Toeplitz operators with their Szego averages and
//! algebra defects, and the Hankel-type commutator pieces whose
//! Hilbert-Schmidt mass measures symbol oscillation against the kernel.
//!
//! Start from the `examples/` directory; each file there exercises one
//! capability end to end and prints what it checks. The `christoffel`
//! binary drives the same experiments from config files and writes CSV.
//!
//! Everything is deterministic: dense linear algebra is done in-crate with
//! Jacobi-type iterations, randomized trials draw from a fixed SplitMix64
//! stream, and CSV output carries 17 significant digits so repeated runs
//! are byte-identical.

pub mod basis;
pub mod config;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod measure;
pub mod rng;
pub mod runner;
pub mod toeplitz;

pub use basis::{orthonormal_basis, vanishing_basis, OrthonormalBasis};
pub use error::{Error, Result};
pub use kernel::{
    forbidden_scan, lubinsky_check, truncation_error, DiagonalMeasure, ForbiddenScan,
    KernelEvaluator, LubinskyReport, NevaiMeasure, ProbeGrid, TruncationReport,
};
pub use linalg::{hermitian_eig, qr, singular_values, ComplexMatrix, HermitianOperator};
pub use measure::{
    load_measure, save_measure, BumpProfile, DiscreteMeasure, IntervalRule, MetricWeight,
};
pub use rng::SplitMix64;
pub use toeplitz::{
    algebra_defect, hermitian_toeplitz, moment_gap, s_operator, schatten, spectral_measure,
    szego_identity, toeplitz, RationalSymbol, SOperator, SpectralMeasure, SymbolFunction,
    SzegoIdentity,
};
