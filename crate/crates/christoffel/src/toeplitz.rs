//! Toeplitz operators compressed to the section space, their spectral
//! measures and Szego averages, and the off-space commutator piece that
//! measures symbol oscillation.
//!
//! For a bounded symbol f, the Toeplitz matrix in the orthonormal basis is
//! T(f)_{ij} = <f W_j, W_i>. Multiplication followed by projection loses
//! exactly the part (I - P) M_f P; its Hilbert-Schmidt mass has a closed
//! form in terms of the kernel, which `s_operator` verifies on every call.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::kernel::KernelEvaluator;
use crate::linalg::{hermitian_eig, singular_values, ComplexMatrix, HermitianOperator};

/// Numerical rank threshold: singular values above this multiple of the
/// largest one count toward the rank.
const RANK_THRESHOLD: f64 = 1e-8;
/// A denominator value at or below this at a node is treated as a pole.
const DENOMINATOR_TOL: f64 = 1e-12;

/// Bounded symbol on the plane, tagged with whether it is real-valued
/// (real symbols give Hermitian Toeplitz matrices).
#[derive(Clone)]
pub struct SymbolFunction {
    eval: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    real_valued: bool,
    name: String,
}

impl SymbolFunction {
    pub fn constant(c: Complex64) -> Self {
        SymbolFunction {
            eval: Arc::new(move |_| c),
            real_valued: c.im == 0.0,
            name: format!("const({c})"),
        }
    }

    /// f(z) = Re z.
    pub fn re_z() -> Self {
        SymbolFunction {
            eval: Arc::new(|z| Complex64::new(z.re, 0.0)),
            real_valued: true,
            name: "re_z".to_string(),
        }
    }

    /// f(z) = |z|^2.
    pub fn abs_sqr() -> Self {
        SymbolFunction {
            eval: Arc::new(|z| Complex64::new(z.norm_sqr(), 0.0)),
            real_valued: true,
            name: "abs_sqr".to_string(),
        }
    }

    /// f(z) = z, the coordinate itself.
    pub fn coordinate() -> Self {
        SymbolFunction {
            eval: Arc::new(|z| z),
            real_valued: false,
            name: "z".to_string(),
        }
    }

    pub fn from_fn(
        name: impl Into<String>,
        real_valued: bool,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        SymbolFunction {
            eval: Arc::new(f),
            real_valued,
            name: name.into(),
        }
    }

    /// Pointwise product of two symbols.
    pub fn product(f: &SymbolFunction, g: &SymbolFunction) -> SymbolFunction {
        let fe = f.eval.clone();
        let ge = g.eval.clone();
        SymbolFunction {
            eval: Arc::new(move |z| fe(z) * ge(z)),
            real_valued: f.real_valued && g.real_valued,
            name: format!("({})*({})", f.name, g.name),
        }
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn is_real(&self) -> bool {
        self.real_valued
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl std::fmt::Debug for SymbolFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SymbolFunction({})", self.name)
    }
}

/// Ratio of two polynomials s1 / s2 with coefficients in ascending order.
/// Degree bounds of such symbols control the rank of the off-space
/// commutator piece.
#[derive(Clone, Debug)]
pub struct RationalSymbol {
    numerator: Vec<Complex64>,
    denominator: Vec<Complex64>,
}

impl RationalSymbol {
    pub fn new(numerator: Vec<Complex64>, denominator: Vec<Complex64>) -> Self {
        let numerator = trim(numerator);
        let denominator = trim(denominator);
        assert!(
            !denominator.is_empty(),
            "denominator must be a nonzero polynomial"
        );
        RationalSymbol {
            numerator,
            denominator,
        }
    }

    /// f(z) = z.
    pub fn coordinate() -> Self {
        RationalSymbol::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        )
    }

    /// Largest of the two polynomial degrees; the natural degree budget k0.
    pub fn degree(&self) -> usize {
        let dn = self.numerator.len().saturating_sub(1);
        let dd = self.denominator.len().saturating_sub(1);
        dn.max(dd)
    }

    pub fn numerator_at(&self, z: Complex64) -> Complex64 {
        horner(&self.numerator, z)
    }

    pub fn denominator_at(&self, z: Complex64) -> Complex64 {
        horner(&self.denominator, z)
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        self.numerator_at(z) / self.denominator_at(z)
    }

    pub fn to_symbol(&self) -> SymbolFunction {
        let me = self.clone();
        SymbolFunction::from_fn(format!("rational(deg {})", self.degree()), false, move |z| {
            me.value(z)
        })
    }
}

fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
        coeffs.pop();
    }
    if coeffs == vec![Complex64::new(0.0, 0.0)] {
        coeffs.clear();
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Toeplitz matrix T(f)_{ij} = <f W_j, W_i> in the orthonormal basis.
pub fn toeplitz(basis: &OrthonormalBasis, f: &SymbolFunction) -> ComplexMatrix {
    let mu = basis.measure();
    let v = basis.node_values();
    let n = basis.dim();
    let fw: Vec<Complex64> = mu
        .nodes()
        .iter()
        .zip(mu.weights())
        .map(|(&z, &w)| f.value(z) * w)
        .collect();
    let mut t = ComplexMatrix::zeros(n, n);
    for a in 0..mu.len() {
        let fa = fw[a];
        if fa == Complex64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..n {
            let left = v[(a, i)].conj() * fa;
            for j in 0..n {
                t[(i, j)] += left * v[(a, j)];
            }
        }
    }
    t
}

/// Toeplitz matrix of a real symbol, wrapped as a Hermitian operator.
pub fn hermitian_toeplitz(
    basis: &OrthonormalBasis,
    f: &SymbolFunction,
) -> Result<HermitianOperator> {
    assert!(f.is_real(), "Hermitian Toeplitz needs a real symbol");
    HermitianOperator::new(toeplitz(basis, f))
}

/// Normalized Schatten p-norm ((1/n) sum sigma_i^p)^{1/p} for p >= 1.
pub fn schatten(a: &ComplexMatrix, p: f64) -> Result<f64> {
    assert!(p >= 1.0, "Schatten norms need p >= 1");
    let sigma = singular_values(a)?;
    let n = sigma.len() as f64;
    Ok((sigma.iter().map(|s| s.powf(p)).sum::<f64>() / n).powf(1.0 / p))
}

/// Normalized Schatten p-norm of T(f) T(g) - T(fg): how far the compression
/// is from being multiplicative.
pub fn algebra_defect(
    basis: &OrthonormalBasis,
    f: &SymbolFunction,
    g: &SymbolFunction,
    p: f64,
) -> Result<f64> {
    let tf = toeplitz(basis, f);
    let tg = toeplitz(basis, g);
    let tfg = toeplitz(basis, &SymbolFunction::product(f, g));
    schatten(&tf.mul(&tg).sub(&tfg), p)
}

/// Empirical eigenvalue distribution of a Hermitian Toeplitz matrix: each
/// eigenvalue carries weight 1/n.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    pub eigenvalues: Vec<f64>,
}

impl SpectralMeasure {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.eigenvalues.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// (1/n) sum lambda_i^m.
    pub fn moment(&self, m: u32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(m as i32)).sum::<f64>() * self.weight()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

pub fn spectral_measure(op: &HermitianOperator) -> Result<SpectralMeasure> {
    let (eigenvalues, _) = hermitian_eig(op)?;
    Ok(SpectralMeasure { eigenvalues })
}

/// The two sides of the Szego average identity: the normalized trace of
/// T(f) and the integral of f against the diagonal measure. They are the
/// same finite sum read in two orders, so the residual is pure roundoff.
#[derive(Clone, Copy, Debug)]
pub struct SzegoIdentity {
    pub trace_avg: f64,
    pub diag_integral: f64,
}

impl SzegoIdentity {
    pub fn residual(&self) -> f64 {
        (self.trace_avg - self.diag_integral).abs()
    }
}

pub fn szego_identity(basis: &OrthonormalBasis, f: &SymbolFunction) -> SzegoIdentity {
    assert!(f.is_real(), "Szego average needs a real symbol");
    let n = basis.dim() as f64;
    let t = toeplitz(basis, f);
    let trace_avg = (0..basis.dim()).map(|i| t[(i, i)].re).sum::<f64>() / n;
    let ke = KernelEvaluator::new(basis);
    let diag_integral = ke.diag_measure().integrate(|z| f.value(z).re);
    SzegoIdentity {
        trace_avg,
        diag_integral,
    }
}

/// Gap between (1/n) Tr T(f)^m and the integral of f^m against the diagonal
/// measure. Zero at m = 1 by the Szego identity; for m >= 2 it measures how
/// far the compression is from a multiplication operator.
pub fn moment_gap(basis: &OrthonormalBasis, f: &SymbolFunction, m: u32) -> f64 {
    assert!(m >= 1);
    let n = basis.dim();
    let t = toeplitz(basis, f);
    let mut power = t.clone();
    for _ in 1..m {
        power = power.mul(&t);
    }
    let trace_avg = (0..n).map(|i| power[(i, i)].re).sum::<f64>() / n as f64;
    let ke = KernelEvaluator::new(basis);
    let diag = ke.diag_measure().integrate(|z| f.value(z).re.powi(m as i32));
    (trace_avg - diag).abs()
}

/// The part of multiplication by f that leaves the section space:
/// S = (I - P) M_f P. Restricted to the space it maps the n sections into
/// the weighted node coordinates of L^2(mu), giving an (node count) x n
/// matrix. Its compression back to the section space is identically zero,
/// so the interesting data are the Hilbert-Schmidt mass, the singular
/// values, and the rank.
#[derive(Clone, Debug)]
pub struct SOperator {
    /// Matrix of S restricted to the section space, in weighted node
    /// coordinates: rows index nodes, columns index sections.
    pub matrix: ComplexMatrix,
    /// Squared Hilbert-Schmidt norm, the squared Frobenius norm of `matrix`.
    pub hs_norm_sq: f64,
    /// The same mass computed from the kernel oscillation formula
    /// (1/2) double-sum w_a w_b |B(z_a, z_b)|^2 |f(z_a) - f(z_b)|^2.
    pub kernel_l2: f64,
    /// Singular values of `matrix`, descending.
    pub singular: Vec<f64>,
    /// Count of singular values above 1e-8 times the largest, or 0 when
    /// even the largest sits at the roundoff floor of the input data.
    pub numerical_rank: usize,
    /// Dimension bound min(k0, n) forced by the degree budget k0: symbols
    /// of degree at most k0 cannot push more than k0 dimensions out of the
    /// section space.
    pub rank_bound: usize,
}

pub fn s_operator(
    basis: &OrthonormalBasis,
    f: &RationalSymbol,
    k0: usize,
) -> Result<SOperator> {
    assert!(
        basis.vanishing().is_none(),
        "off-space commutator needs the full basis"
    );
    assert!(f.degree() <= k0, "symbol degree exceeds the budget k0");
    let mu = basis.measure();
    let m = mu.len();
    let n = basis.dim();

    let mut fv = Vec::with_capacity(m);
    for (index, &z) in mu.nodes().iter().enumerate() {
        let den = f.denominator_at(z);
        if den.norm() <= DENOMINATOR_TOL {
            return Err(Error::DenominatorVanishes { index });
        }
        fv.push(f.numerator_at(z) / den);
    }

    let symbol = SymbolFunction::from_fn("rational", false, {
        let fv_nodes: Vec<(Complex64, Complex64)> = mu
            .nodes()
            .iter()
            .copied()
            .zip(fv.iter().copied())
            .collect();
        let fr = f.clone();
        move |z| {
            // Reuse exact node values where possible to keep T and M built
            // from identical symbol samples.
            for &(node, val) in &fv_nodes {
                if node == z {
                    return val;
                }
            }
            fr.value(z)
        }
    });
    let t = toeplitz(basis, &symbol);

    let v = basis.node_values();
    let vt = v.mul(&t);
    let matrix = ComplexMatrix::from_fn(m, n, |a, j| {
        mu.weight(a).sqrt() * (fv[a] * v[(a, j)] - vt[(a, j)])
    });
    let hs_norm_sq = {
        let fro = matrix.frobenius_norm();
        fro * fro
    };

    let ke = KernelEvaluator::new(basis);
    let kmat = ke.node_kernel();
    let mut kernel_l2 = 0.0;
    for a in 0..m {
        for b in 0..m {
            kernel_l2 += 0.5
                * mu.weight(a)
                * mu.weight(b)
                * kmat[(a, b)].norm_sqr()
                * (fv[a] - fv[b]).norm_sqr();
        }
    }
    assert!(
        (hs_norm_sq - kernel_l2).abs() <= 1e-8 * (1.0 + kernel_l2),
        "Hilbert-Schmidt identity violated: {hs_norm_sq} vs {kernel_l2}"
    );

    let singular = singular_values(&matrix)?;
    let top = singular.first().copied().unwrap_or(0.0);
    // Rank counting is relative to sigma_max, but only once sigma_max
    // itself rises above roundoff; the yardstick for "roundoff" is the
    // Hilbert-Schmidt norm of the whole multiplication data M_f P, of which
    // S is the outgoing part.
    let mfp_scale = mu
        .weights()
        .iter()
        .enumerate()
        .map(|(a, &w)| {
            w * fv[a].norm_sqr() * (0..n).map(|j| v[(a, j)].norm_sqr()).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt();
    let numerical_rank = if top > 1e-12 * mfp_scale {
        singular.iter().filter(|&&s| s > RANK_THRESHOLD * top).count()
    } else {
        0
    };
    Ok(SOperator {
        matrix,
        hs_norm_sq,
        kernel_l2,
        singular,
        numerical_rank,
        rank_bound: k0.min(n),
    })
}
