//! Dense complex linear algebra: QR, Hermitian eigendecomposition, singular
//! values.
//!
//! Matrices here are a few hundred rows at most, so every routine favours
//! unconditional numerical robustness over speed: Householder reflections
//! with freshly computed column norms for QR, and cyclic Jacobi sweeps for
//! both the Hermitian eigenproblem and the singular values. Jacobi is slower
//! than tridiagonalization but delivers small relative errors even for tiny
//! eigenvalues, which the rank tests downstream depend on.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on Jacobi sweeps; hitting it is reported as `NoConvergence`.
const MAX_SWEEPS: usize = 60;
/// A Jacobi iteration stops once the off-diagonal mass falls below this
/// multiple of the input Frobenius norm.
const JACOBI_TOL: f64 = 1e-13;
/// Acceptable Hermitian asymmetry, relative to 1 + max entry modulus.
const HERMITIAN_TOL: f64 = 1e-10;

/// Dense row-major complex matrix. Dimensions are always positive and
/// entries stay finite; constructors assert both.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        debug_assert!(m.is_finite(), "matrix entries must be finite");
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, " {:>11.4e}{:+.4e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Square matrix known to be Hermitian. Construction checks the asymmetry
/// against `HERMITIAN_TOL` and stores the symmetrized part, so downstream
/// code can rely on exact conjugate symmetry.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        assert_eq!(matrix.rows(), matrix.cols(), "operator must be square");
        assert!(matrix.is_finite(), "operator entries must be finite");
        let n = matrix.rows();
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if deviation > HERMITIAN_TOL * (1.0 + matrix.max_abs()) {
            return Err(Error::NotHermitian { deviation });
        }
        let sym = ComplexMatrix::from_fn(n, n, |i, j| {
            (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5
        });
        Ok(HermitianOperator { matrix: sym })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Thin Householder QR of an m x n matrix with m >= n: returns (Q, R) with
/// Q of shape m x n having orthonormal columns, R upper triangular n x n
/// with real nonnegative diagonal, and A = Q R to roundoff.
pub fn qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "qr requires rows >= cols");
    let mut work = a.clone();
    // Reflector j is stored as (v, ||v||^2) acting on rows j..m.
    let mut reflectors: Vec<Option<(Vec<Complex64>, f64)>> = Vec::with_capacity(n);

    for j in 0..n {
        // Column norm is recomputed from the current entries, never updated
        // incrementally, to avoid drift on graded columns.
        let norm = (j..m).map(|i| work[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::MIN_POSITIVE {
            // Exactly dependent column: R_jj = 0, no reflection needed.
            for i in j..m {
                work[(i, j)] = Complex64::new(0.0, 0.0);
            }
            reflectors.push(None);
            continue;
        }
        let x0 = work[(j, j)];
        let phase = if x0 == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // alpha = -phase * norm keeps v_0 = x_0 - alpha away from cancellation.
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (j..m).map(|i| work[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        for col in j..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * work[(j + i, col)])
                .sum();
            let fac = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                let entry = &mut work[(j + i, col)];
                *entry -= fac * vi;
            }
        }
        // The transformed column j is alpha * e_1 exactly; write it as such.
        work[(j, j)] = alpha;
        for i in j + 1..m {
            work[(i, j)] = Complex64::new(0.0, 0.0);
        }
        reflectors.push(Some((v, vnorm2)));
    }

    // Accumulate the thin Q by applying the reflectors, last to first, to the
    // first n columns of the identity.
    let mut q = ComplexMatrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = Complex64::new(1.0, 0.0);
    }
    for j in (0..n).rev() {
        if let Some((v, vnorm2)) = &reflectors[j] {
            for col in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| vi.conj() * q[(j + i, col)])
                    .sum();
                let fac = dot * (2.0 / *vnorm2);
                for (i, vi) in v.iter().enumerate() {
                    let entry = &mut q[(j + i, col)];
                    *entry -= fac * vi;
                }
            }
        }
    }

    // Rotate each row of R to make the diagonal real nonnegative, absorbing
    // the phase into the matching column of Q.
    let mut r = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r[(i, j)] = work[(i, j)];
        }
    }
    for i in 0..n {
        let d = r[(i, i)];
        if d == Complex64::new(0.0, 0.0) {
            continue;
        }
        let u = d / d.norm();
        for j in i..n {
            r[(i, j)] *= u.conj();
        }
        for row in 0..m {
            q[(row, i)] *= u;
        }
    }
    (q, r)
}

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a
/// Hermitian operator, by cyclic complex Jacobi rotations. Converges when
/// the off-diagonal Frobenius mass drops below `JACOBI_TOL` times the input
/// norm; more than `MAX_SWEEPS` sweeps is an error.
pub fn hermitian_eig(op: &HermitianOperator) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = op.dim();
    let mut a = op.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a[(i, j)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        if off <= JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= f64::MIN_POSITIVE {
                    continue;
                }
                let omega = b / babs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let (c, s, t) = jacobi_rotation(app, aqq, babs);

                // Columns p and q of A transform by the 2x2 unitary; rows
                // follow by conjugate symmetry, which we enforce exactly.
                let omc = omega.conj();
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    let new_p = aip * c + aiq * (omc * s);
                    let new_q = aiq * (omc * c) - aip * s;
                    a[(i, p)] = new_p;
                    a[(i, q)] = new_q;
                    a[(p, i)] = new_p.conj();
                    a[(q, i)] = new_q.conj();
                }
                a[(p, p)] = Complex64::new(app + t * babs, 0.0);
                a[(q, q)] = Complex64::new(aqq - t * babs, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * (omc * s);
                    v[(i, q)] = viq * (omc * c) - vip * s;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            op: "hermitian_eig",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((eigenvalues, vectors))
}

/// Rotation parameters (c, s, t) diagonalizing the real symmetric 2x2 block
/// [[app, babs], [babs, aqq]] with babs > 0: the updated diagonal entries
/// are app + t * babs and aqq - t * babs.
fn jacobi_rotation(app: f64, aqq: f64, babs: f64) -> (f64, f64, f64) {
    let tau = (aqq - app) / (2.0 * babs);
    let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
    let t = -sgn / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, t)
}

/// Singular values of an arbitrary complex matrix, descending: square roots
/// of the eigenvalues of the smaller Gram matrix, clamped at zero. Jacobi's
/// relative accuracy on the Gram spectrum keeps trailing singular values
/// orders of magnitude below the 1e-8 * sigma_max rank threshold used
/// downstream.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = if a.rows() >= a.cols() {
        a.adjoint().mul(a)
    } else {
        a.mul(&a.adjoint())
    };
    let op = HermitianOperator::new(gram).expect("Gram matrices are Hermitian by construction");
    let (vals, _) = hermitian_eig(&op)?;
    let mut sigma: Vec<f64> = vals.iter().map(|l| l.max(0.0).sqrt()).collect();
    sigma.reverse();
    Ok(sigma)
}
