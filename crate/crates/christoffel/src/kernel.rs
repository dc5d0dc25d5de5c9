//! Christoffel-Darboux kernels and the measures and inequalities built from
//! them.
//!
//! With an orthonormal family W_0..W_{n-1} in hand, the kernel is
//! B(x, y) = sum_i W_i(x) conj(W_i(y)). Everything in this module is a
//! finite-sum identity on top of it: the normalized off-diagonal mass used
//! for localization curves, the diagonal probability measure, Lubinsky's
//! comparison inequality for nodewise dominated measures, the truncation
//! error chain, the forbidden-region decay of partial kernels, and the peak
//! sections with their Nevai localization measures.

use std::cell::OnceCell;

use num_complex::Complex64;

use crate::basis::{orthonormal_basis, vanishing_basis, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measure::{BumpProfile, DiscreteMeasure, MetricWeight};

/// Kernel diagonals at or below this are treated as a base locus point
/// where no section can peak.
const BASE_LOCUS_TOL: f64 = 1e-280;

/// Kernel attached to one orthonormal basis. Caches the node-by-node kernel
/// matrix, which every integral against the underlying measure reuses.
pub struct KernelEvaluator<'a> {
    basis: &'a OrthonormalBasis,
    node_kernel: OnceCell<ComplexMatrix>,
}

impl<'a> KernelEvaluator<'a> {
    pub fn new(basis: &'a OrthonormalBasis) -> Self {
        KernelEvaluator {
            basis,
            node_kernel: OnceCell::new(),
        }
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        self.basis
    }

    fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// B(x, y) at arbitrary points.
    pub fn value(&self, x: Complex64, y: Complex64) -> Complex64 {
        let vals = self.basis.evaluate(&[x, y]);
        (0..self.dim()).map(|i| vals[(0, i)] * vals[(1, i)].conj()).sum()
    }

    /// Kernel diagonal B(x, x) at each requested point.
    pub fn diagonal(&self, points: &[Complex64]) -> Vec<f64> {
        let vals = self.basis.evaluate(points);
        (0..points.len())
            .map(|row| (0..self.dim()).map(|i| vals[(row, i)].norm_sqr()).sum())
            .collect()
    }

    /// Kernel matrix on the measure's own nodes: entry (a, b) is
    /// B(z_a, z_b). Computed once and cached.
    pub fn node_kernel(&self) -> &ComplexMatrix {
        self.node_kernel.get_or_init(|| {
            let v = self.basis.node_values();
            let m = v.rows();
            let n = v.cols();
            ComplexMatrix::from_fn(m, m, |a, b| {
                (0..n).map(|i| v[(a, i)] * v[(b, i)].conj()).sum()
            })
        })
    }

    /// Trace of the kernel against the measure: sum_a w_a B(z_a, z_a).
    /// Equals the basis dimension up to roundoff.
    pub fn trace(&self) -> f64 {
        let k = self.node_kernel();
        self.basis
            .measure()
            .weights()
            .iter()
            .enumerate()
            .map(|(a, &w)| w * k[(a, a)].re)
            .sum()
    }

    /// Unnormalized kernel mass over pairs at distance at least delta:
    /// the double integral of |B(x, y)|^2 over |x - y| >= delta.
    pub fn offdiag_integral(&self, delta: f64) -> f64 {
        assert!(delta >= 0.0);
        let mu = self.basis.measure();
        let k = self.node_kernel();
        let mut total = 0.0;
        for a in 0..mu.len() {
            for b in 0..mu.len() {
                if (mu.node(a) - mu.node(b)).norm() >= delta {
                    total += mu.weight(a) * mu.weight(b) * k[(a, b)].norm_sqr();
                }
            }
        }
        total
    }

    /// Mass the normalized kernel measure (1/n) |B(x, y)|^2 dmu dmu puts at
    /// distance delta or more from the diagonal.
    pub fn offdiag_mass(&self, delta: f64) -> f64 {
        self.offdiag_integral(delta) / self.dim() as f64
    }

    /// Total mass of the normalized kernel measure; exactly 1 in exact
    /// arithmetic since the double integral of |B|^2 is the dimension.
    pub fn total_mass(&self) -> f64 {
        self.offdiag_integral(0.0) / self.dim() as f64
    }

    /// Diagonal probability measure (1/n) B(x, x) dmu.
    pub fn diag_measure(&self) -> DiagonalMeasure {
        let mu = self.basis.measure();
        let k = self.node_kernel();
        let n = self.dim() as f64;
        DiagonalMeasure {
            nodes: mu.nodes().to_vec(),
            masses: (0..mu.len())
                .map(|a| mu.weight(a) * k[(a, a)].re / n)
                .collect(),
        }
    }

    /// Coefficients of the unit-norm section with the largest modulus at x,
    /// namely c_i = conj(W_i(x)) / sqrt(B(x, x)), and that modulus.
    pub fn peak_section(&self, x: Complex64) -> Result<PeakSection> {
        let vals = self.basis.evaluate(&[x]);
        let bxx: f64 = (0..self.dim()).map(|i| vals[(0, i)].norm_sqr()).sum();
        if bxx <= BASE_LOCUS_TOL {
            return Err(Error::BaseLocus { point: x });
        }
        let root = bxx.sqrt();
        Ok(PeakSection {
            coefficients: (0..self.dim()).map(|i| vals[(0, i)].conj() / root).collect(),
            value: root,
        })
    }

    /// Localization measures attached to the peak section at x: the
    /// probability measure with node masses w_j |B(x, z_j)|^2 / B(x, x),
    /// and its rescaling by vol = B(x, x) / n.
    pub fn nevai_measure(&self, x: Complex64) -> Result<NevaiMeasure> {
        let mu = self.basis.measure();
        let vals = self.basis.evaluate(&[x]);
        let bxx: f64 = (0..self.dim()).map(|i| vals[(0, i)].norm_sqr()).sum();
        if bxx <= BASE_LOCUS_TOL {
            return Err(Error::BaseLocus { point: x });
        }
        let v = self.basis.node_values();
        let masses: Vec<f64> = (0..mu.len())
            .map(|j| {
                let bxj: Complex64 =
                    (0..self.dim()).map(|i| vals[(0, i)] * v[(j, i)].conj()).sum();
                mu.weight(j) * bxj.norm_sqr() / bxx
            })
            .collect();
        Ok(NevaiMeasure {
            anchor: x,
            nodes: mu.nodes().to_vec(),
            masses,
            vol: bxx / self.dim() as f64,
        })
    }
}

/// Probability measure on the nodes given by the normalized kernel diagonal.
#[derive(Clone, Debug)]
pub struct DiagonalMeasure {
    pub nodes: Vec<Complex64>,
    pub masses: Vec<f64>,
}

impl DiagonalMeasure {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass carried by nodes within distance r of the center.
    pub fn mass_within(&self, center: Complex64, r: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.masses)
            .filter(|(&z, _)| (z - center).norm() <= r)
            .map(|(_, &m)| m)
            .sum()
    }

    /// Integral of a function against the measure.
    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.masses).map(|(&z, &m)| m * f(z)).sum()
    }
}

/// Unit-norm section maximizing the modulus at a point.
#[derive(Clone, Debug)]
pub struct PeakSection {
    /// Coefficients in the orthonormal basis; Euclidean norm 1.
    pub coefficients: Vec<Complex64>,
    /// The achieved modulus sqrt(B(x, x)).
    pub value: f64,
}

/// Nevai localization measure of an anchor point: probability masses
/// proportional to w_j |B(x, z_j)|^2, plus the volume factor B(x, x) / n
/// that rescales it to the section-counting normalization.
#[derive(Clone, Debug)]
pub struct NevaiMeasure {
    pub anchor: Complex64,
    pub nodes: Vec<Complex64>,
    pub masses: Vec<f64>,
    pub vol: f64,
}

impl NevaiMeasure {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass at distance strictly greater than r from the anchor.
    pub fn mass_outside(&self, r: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.masses)
            .filter(|(&z, _)| (z - self.anchor).norm() > r)
            .map(|(_, &m)| m)
            .sum()
    }
}

/// Both sides of the comparison inequality for nodewise dominated measures:
/// lhs = integral over mu1 of |B_1(x, .) - B_2(x, .)|^2, rhs = B_1(x, x) -
/// B_2(x, x). Requires mu1 <= mu2 nodewise and both sides supporting k
/// sections; then lhs <= rhs and rhs >= 0 up to roundoff.
#[derive(Clone, Copy, Debug)]
pub struct LubinskyReport {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn lubinsky_check(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    phi: &MetricWeight,
    k: usize,
    x: Complex64,
) -> Result<LubinskyReport> {
    if !mu1.is_dominated_by(mu2) {
        return Err(Error::DominationViolated);
    }
    let b1 = orthonormal_basis(mu1, phi, k)?;
    let b2 = orthonormal_basis(mu2, phi, k)?;

    let at_x1 = b1.evaluate(&[x]);
    let at_x2 = b2.evaluate(&[x]);
    let diag1: f64 = (0..k).map(|i| at_x1[(0, i)].norm_sqr()).sum();
    let diag2: f64 = (0..k).map(|i| at_x2[(0, i)].norm_sqr()).sum();

    let v1 = b1.node_values();
    let v2 = b2.evaluate(mu1.nodes());
    let mut lhs = 0.0;
    for (j, &w) in mu1.weights().iter().enumerate() {
        let k1: Complex64 = (0..k).map(|i| at_x1[(0, i)] * v1[(j, i)].conj()).sum();
        let k2: Complex64 = (0..k).map(|i| at_x2[(0, i)] * v2[(j, i)].conj()).sum();
        lhs += w * (k1 - k2).norm_sqr();
    }
    Ok(LubinskyReport {
        lhs,
        rhs: diag1 - diag2,
    })
}

/// Error made by truncating a measure with a bump profile, integrated
/// against the truncated measure nu: kernel_l2_diff is the double integral
/// of |B_nu - B_mu|^2 over nu x nu, diag_gap the integral of the diagonal
/// difference over nu. The comparison inequality gives kernel_l2_diff <=
/// diag_gap up to roundoff.
#[derive(Clone, Copy, Debug)]
pub struct TruncationReport {
    pub kernel_l2_diff: f64,
    pub diag_gap: f64,
}

pub fn truncation_error(
    mu: &DiscreteMeasure,
    bump: &BumpProfile,
    phi: &MetricWeight,
    k: usize,
) -> Result<TruncationReport> {
    let nu = mu.truncate(bump)?;
    let basis_mu = orthonormal_basis(mu, phi, k)?;
    let basis_nu = orthonormal_basis(&nu, phi, k)?;

    // Nodes of nu are a subset of mu's nodes with the same coordinates, so
    // the full-measure basis can be read off its node table directly.
    let rows: Vec<usize> = nu
        .nodes()
        .iter()
        .map(|&z| mu.find_node(z).expect("truncated node vanished from parent"))
        .collect();
    let vmu = basis_mu.node_values();
    let vnu = basis_nu.node_values();
    let mn = nu.len();

    let mut kernel_l2_diff = 0.0;
    let mut diag_gap = 0.0;
    for a in 0..mn {
        for b in 0..mn {
            let mut knu = Complex64::new(0.0, 0.0);
            let mut kmu = Complex64::new(0.0, 0.0);
            for i in 0..k {
                knu += vnu[(a, i)] * vnu[(b, i)].conj();
                kmu += vmu[(rows[a], i)] * vmu[(rows[b], i)].conj();
            }
            let w = nu.weight(a) * nu.weight(b);
            kernel_l2_diff += w * (knu - kmu).norm_sqr();
            if a == b {
                diag_gap += nu.weight(a) * (knu.re - kmu.re);
            }
        }
    }
    Ok(TruncationReport {
        kernel_l2_diff,
        diag_gap,
    })
}

/// Probe grid for forbidden-region scans: concentric circles around the
/// vanishing point.
#[derive(Clone, Copy, Debug)]
pub struct ProbeGrid {
    pub radius: f64,
    pub circles: usize,
    pub angles: usize,
}

impl ProbeGrid {
    /// Grid with the default resolution of 8 circles and 16 angles.
    pub fn new(radius: f64) -> Self {
        assert!(radius > 0.0);
        ProbeGrid {
            radius,
            circles: 8,
            angles: 16,
        }
    }

    pub fn points(&self, center: Complex64) -> Vec<Complex64> {
        let mut pts = vec![center];
        for ci in 1..=self.circles {
            let r = self.radius * ci as f64 / self.circles as f64;
            for ai in 0..self.angles {
                let theta = 2.0 * std::f64::consts::PI * ai as f64 / self.angles as f64;
                pts.push(center + Complex64::from_polar(r, theta));
            }
        }
        pts
    }
}

/// One k of a forbidden-region scan.
#[derive(Clone, Copy, Debug)]
pub struct ForbiddenRow {
    pub k: usize,
    /// Imposed vanishing order ceil(eps * k).
    pub order: usize,
    /// Sup of the partial kernel diagonal over the probe grid.
    pub sup_diag: f64,
    /// Trace of the partial kernel; equals k - order up to roundoff.
    pub trace: f64,
}

/// Forbidden-region decay summary: per-k rows plus the least-squares slope
/// of log sup_diag against k once at least four rows exist. Exponential
/// decay shows up as a decisively negative slope.
#[derive(Clone, Debug)]
pub struct ForbiddenScan {
    pub rows: Vec<ForbiddenRow>,
    pub slope: Option<f64>,
}

pub fn forbidden_scan(
    mu: &DiscreteMeasure,
    phi: &MetricWeight,
    y0: Complex64,
    eps: f64,
    ks: &[usize],
    probe: &ProbeGrid,
) -> Result<ForbiddenScan> {
    assert!(eps > 0.0 && eps < 1.0, "need a vanishing fraction in (0, 1)");
    let points = probe.points(y0);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let order = vanishing_order(eps, k);
        let basis = vanishing_basis(mu, phi, k, y0, order)?;
        let ke = KernelEvaluator::new(&basis);
        let sup_diag = ke.diagonal(&points).into_iter().fold(0.0f64, f64::max);
        rows.push(ForbiddenRow {
            k,
            order,
            sup_diag,
            trace: ke.trace(),
        });
    }
    let slope = if rows.len() >= 4 {
        let xs: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.sup_diag.max(1e-300).ln()).collect();
        Some(ols_slope(&xs, &ys))
    } else {
        None
    };
    Ok(ForbiddenScan { rows, slope })
}

/// ceil(eps * k), with a guard so that products landing within 1e-9 of an
/// integer are not pushed up a whole step by roundoff.
pub fn vanishing_order(eps: f64, k: usize) -> usize {
    let raw = eps * k as f64;
    let rounded = raw.round();
    if (raw - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        raw.ceil() as usize
    }
}

/// Least-squares slope of y against x.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    num / den
}
