//! Weighted orthonormal polynomial sections by Vandermonde-with-Arnoldi.
//!
//! For a measure mu = sum_j w_j delta_{z_j} and metric weight phi, the inner
//! product on degree-bounded polynomials is
//!
//!   <f, g> = sum_j w_j f(z_j) conj(g(z_j)) e^{-2 k phi(z_j)}.
//!
//! Orthonormalizing the monomials directly through their Gram matrix is
//! hopeless beyond small degree (the Vandermonde basis is exponentially
//! ill-conditioned), so the basis is grown Arnoldi style: each candidate is
//! the previous orthonormal section multiplied by z, orthogonalized against
//! everything so far with doubly reiterated classical Gram-Schmidt. All
//! bookkeeping happens on weighted node vectors scaled by sqrt(w_j), which
//! makes the node map an isometry onto its image.
//!
//! The same machinery produces partial bases vanishing to order m at a
//! point y0: the seed section carries the prefactor (z - y0)^m and the
//! Arnoldi growth never disturbs it.
//!
//! Weighted evaluations W_i(x) = p_i(x) e^{-k phi(x)} stay representable
//! for k phi(x) up to roughly 700 before e^{-k phi} underflows; in practice
//! the usable ceiling is k of order 100 with the Gaussian weights used here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measure::{DiscreteMeasure, MetricWeight, NODE_MERGE_TOL};

/// Relative pivot floor: an Arnoldi step whose residual norm falls below
/// this fraction of the candidate norm means the measure cannot tell the
/// next degree apart from the span so far.
const RANK_TOL: f64 = 1e-12;

/// Orthonormal family of weighted polynomial sections over a fixed measure
/// and metric weight. Holds the weighted values at the nodes and the
/// recurrence table needed to evaluate anywhere else.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    k: usize,
    dim: usize,
    vanishing: Option<(Complex64, usize)>,
    measure: DiscreteMeasure,
    phi: MetricWeight,
    /// m x dim; entry (j, i) is W_i(z_j) = p_i(z_j) e^{-k phi(z_j)}.
    node_values: ComplexMatrix,
    /// dim x dim upper triangular: column i holds the projection
    /// coefficients of z * p_{i-1} on p_0..p_{i-1} above the residual norm
    /// at (i, i); entry (0, 0) is the norm of the seed section.
    recurrence: ComplexMatrix,
}

/// Basis of all sections of degree below k: p_0, ..., p_{k-1}.
pub fn orthonormal_basis(
    measure: &DiscreteMeasure,
    phi: &MetricWeight,
    k: usize,
) -> Result<OrthonormalBasis> {
    build(measure, phi, k, None)
}

/// Basis of the sections of degree below k vanishing to order m at y0,
/// spanned by (z - y0)^m q(z) with deg q < k - m. Requires m < k.
pub fn vanishing_basis(
    measure: &DiscreteMeasure,
    phi: &MetricWeight,
    k: usize,
    y0: Complex64,
    order: usize,
) -> Result<OrthonormalBasis> {
    if order >= k {
        return Err(Error::OrderTooLarge { order, k });
    }
    build(measure, phi, k, Some((y0, order)))
}

fn build(
    measure: &DiscreteMeasure,
    phi: &MetricWeight,
    k: usize,
    vanishing: Option<(Complex64, usize)>,
) -> Result<OrthonormalBasis> {
    assert!(k >= 1, "need at least one section");
    let order = vanishing.map(|(_, m)| m).unwrap_or(0);
    let dim = k - order;
    let m = measure.len();
    let nodes = measure.nodes();

    // Nodes sitting on the vanishing point contribute nothing to a basis
    // whose every member vanishes there.
    let support = match vanishing {
        Some((y0, _)) => nodes.iter().filter(|&&z| (z - y0).norm() >= NODE_MERGE_TOL).count(),
        None => m,
    };
    if support < dim {
        return Err(Error::RankDeficient {
            index: support,
            ratio: 0.0,
            dim,
        });
    }

    let kf = k as f64;
    let sqrtw: Vec<f64> = measure.weights().iter().map(|w| w.sqrt()).collect();
    let seed: Vec<Complex64> = nodes
        .iter()
        .enumerate()
        .map(|(j, &z)| {
            let p = phi.value(z);
            assert!(p.is_finite(), "metric weight must be finite at node {j}");
            let factor = (-kf * p).exp();
            let pre = match vanishing {
                Some((y0, ord)) => (z - y0).powu(ord as u32),
                None => Complex64::new(1.0, 0.0),
            };
            sqrtw[j] * pre * factor
        })
        .collect();

    let mut recurrence = ComplexMatrix::zeros(dim, dim);
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(dim);

    let r0 = vec_norm(&seed);
    if r0 <= f64::MIN_POSITIVE {
        return Err(Error::RankDeficient {
            index: 0,
            ratio: 0.0,
            dim,
        });
    }
    recurrence[(0, 0)] = Complex64::new(r0, 0.0);
    q.push(seed.iter().map(|&x| x / r0).collect());

    for i in 1..dim {
        let mut v: Vec<Complex64> = (0..m).map(|j| nodes[j] * q[i - 1][j]).collect();
        let init_norm = vec_norm(&v);
        let mut coefs = vec![Complex64::new(0.0, 0.0); i];
        // Classical Gram-Schmidt, run twice: the second pass removes the
        // O(eps * kappa) residue the first leaves behind.
        for _pass in 0..2 {
            for (a, qa) in q.iter().enumerate() {
                let h = vec_dot(qa, &v);
                coefs[a] += h;
                for (vj, qj) in v.iter_mut().zip(qa) {
                    *vj -= h * qj;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm.is_nan() || norm <= RANK_TOL * init_norm {
            let ratio = if init_norm > 0.0 { norm / init_norm } else { 0.0 };
            return Err(Error::RankDeficient { index: i, ratio, dim });
        }
        for (a, &h) in coefs.iter().enumerate() {
            recurrence[(a, i)] = h;
        }
        recurrence[(i, i)] = Complex64::new(norm, 0.0);
        q.push(v.iter().map(|&x| x / norm).collect());
    }

    let node_values = ComplexMatrix::from_fn(m, dim, |j, i| q[i][j] / sqrtw[j]);
    Ok(OrthonormalBasis {
        k,
        dim,
        vanishing,
        measure: measure.clone(),
        phi: phi.clone(),
        node_values,
        recurrence,
    })
}

impl OrthonormalBasis {
    /// Degree bound: sections are (prefactor times) polynomials of degree
    /// below k.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of sections: k, minus the vanishing order if any.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vanishing point and order for a partial basis, None for the full one.
    pub fn vanishing(&self) -> Option<(Complex64, usize)> {
        self.vanishing
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn phi(&self) -> &MetricWeight {
        &self.phi
    }

    /// Weighted section values at the measure's own nodes, shape
    /// (node count) x dim.
    pub fn node_values(&self) -> &ComplexMatrix {
        &self.node_values
    }

    /// Weighted section values W_i(x) at arbitrary points, one row per
    /// point, computed by running the stored recurrence.
    pub fn evaluate(&self, points: &[Complex64]) -> ComplexMatrix {
        assert!(!points.is_empty(), "need at least one evaluation point");
        let kf = self.k as f64;
        let mut out = ComplexMatrix::zeros(points.len(), self.dim);
        let mut w = vec![Complex64::new(0.0, 0.0); self.dim];
        for (row, &x) in points.iter().enumerate() {
            let pre = match self.vanishing {
                Some((y0, ord)) => (x - y0).powu(ord as u32),
                None => Complex64::new(1.0, 0.0),
            };
            let factor = (-kf * self.phi.value(x)).exp();
            w[0] = pre * factor / self.recurrence[(0, 0)];
            for i in 1..self.dim {
                let mut acc = x * w[i - 1];
                for (a, &wa) in w.iter().enumerate().take(i) {
                    acc -= self.recurrence[(a, i)] * wa;
                }
                w[i] = acc / self.recurrence[(i, i)];
            }
            for (i, &wi) in w.iter().enumerate() {
                out[(row, i)] = wi;
            }
        }
        out
    }

    /// Frobenius distance of the weighted Gram matrix from the identity;
    /// a direct audit of orthonormality.
    pub fn gram_residual(&self) -> f64 {
        let mut resid = 0.0f64;
        let v = &self.node_values;
        let w = self.measure.weights();
        for i in 0..self.dim {
            for l in 0..self.dim {
                let mut g = Complex64::new(0.0, 0.0);
                for j in 0..self.measure.len() {
                    g += w[j] * v[(j, i)] * v[(j, l)].conj();
                }
                let target = if i == l { 1.0 } else { 0.0 };
                resid += (g - Complex64::new(target, 0.0)).norm_sqr();
            }
        }
        resid.sqrt()
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// <a, b> with the conjugate on the first argument.
fn vec_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
