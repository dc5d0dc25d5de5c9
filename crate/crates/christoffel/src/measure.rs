//! Discrete measures on the complex plane, metric weights, and the bump
//! profiles used to truncate a measure near a point.
//!
//! A measure is a finite list of distinct nodes with strictly positive
//! weights. Generators cover the standard test families (roots of unity,
//! Chebyshev and uniform interval rules), and measures round-trip through a
//! four-column CSV file `re,im,weight,phi` that also carries samples of the
//! metric weight.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes closer than this are treated as the same point and merged.
pub const NODE_MERGE_TOL: f64 = 1e-12;
/// Weights at or below this floor are dropped during truncation.
const TRUNCATE_FLOOR: f64 = 1e-300;

/// Finite positive measure sum_j w_j delta_{z_j} with distinct nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from raw node and weight lists. Nodes within
    /// `NODE_MERGE_TOL` of an earlier node are merged into it, summing the
    /// weights. Weights must be strictly positive and nodes finite.
    pub fn new(nodes: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        assert_eq!(nodes.len(), weights.len(), "node and weight counts differ");
        if nodes.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut merged_nodes: Vec<Complex64> = Vec::with_capacity(nodes.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(nodes.len());
        for (index, (&z, &w)) in nodes.iter().zip(&weights).enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonfiniteNode { index });
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonpositiveWeight { index, value: w });
            }
            match merged_nodes.iter().position(|&p| (p - z).norm() < NODE_MERGE_TOL) {
                Some(hit) => merged_weights[hit] += w,
                None => {
                    merged_nodes.push(z);
                    merged_weights.push(w);
                }
            }
        }
        Ok(DiscreteMeasure {
            nodes: merged_nodes,
            weights: merged_weights,
        })
    }

    /// m equally weighted nodes on the circle of the given radius, at the
    /// scaled m-th roots of unity.
    pub fn circle(m: usize, radius: f64) -> Self {
        assert!(m >= 1, "need at least one node");
        assert!(radius > 0.0 && radius.is_finite(), "radius must be positive");
        let w = 1.0 / m as f64;
        let nodes = (0..m)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                Complex64::from_polar(radius, theta)
            })
            .collect();
        DiscreteMeasure {
            nodes,
            weights: vec![w; m],
        }
    }

    /// m equally weighted nodes in [-1, 1] under the given quadrature rule.
    pub fn interval(m: usize, rule: IntervalRule) -> Self {
        assert!(m >= 1, "need at least one node");
        let w = 1.0 / m as f64;
        let nodes = (0..m)
            .map(|j| {
                let x = match rule {
                    // Chebyshev points of the first kind.
                    IntervalRule::Chebyshev => {
                        ((2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * m as f64)).cos()
                    }
                    // Midpoints of m equal subintervals, so m = 1 gives 0.
                    IntervalRule::Uniform => -1.0 + (2.0 * j as f64 + 1.0) / m as f64,
                };
                Complex64::new(x, 0.0)
            })
            .collect();
        DiscreteMeasure {
            nodes,
            weights: vec![w; m],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, j: usize) -> Complex64 {
        self.nodes[j]
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Index of the node within `NODE_MERGE_TOL` of z, if any.
    pub fn find_node(&self, z: Complex64) -> Option<usize> {
        self.nodes.iter().position(|&p| (p - z).norm() < NODE_MERGE_TOL)
    }

    /// Largest pairwise node distance; 0 for a single atom.
    pub fn support_diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                d = d.max((self.nodes[i] - self.nodes[j]).norm());
            }
        }
        d
    }

    /// Returns this measure with extra atoms added. An atom on top of an
    /// existing node adds to its weight; atoms with zero mass are ignored,
    /// negative mass is an error.
    pub fn add_atoms(&self, atoms: &[(Complex64, f64)]) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        let mut weights = self.weights.clone();
        for (index, &(z, w)) in atoms.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonpositiveWeight { index, value: w });
            }
            nodes.push(z);
            weights.push(w);
        }
        DiscreteMeasure::new(nodes, weights)
    }

    /// Multiplies each weight by the bump profile and drops nodes whose new
    /// weight falls below an underflow floor. The result is nodewise
    /// dominated by the original measure.
    pub fn truncate(&self, bump: &BumpProfile) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            let scaled = w * bump.value(z);
            if scaled > TRUNCATE_FLOOR {
                nodes.push(z);
                weights.push(scaled);
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(DiscreteMeasure { nodes, weights })
    }

    /// Nodewise domination: every node of `self` appears in `other` (within
    /// the merge tolerance) with at least the weight it has here.
    pub fn is_dominated_by(&self, other: &DiscreteMeasure) -> bool {
        self.nodes.iter().zip(&self.weights).all(|(&z, &w)| {
            other
                .find_node(z)
                .map(|j| other.weights[j] >= w * (1.0 - 1e-12))
                .unwrap_or(false)
        })
    }
}

/// Node placement rule for `DiscreteMeasure::interval`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalRule {
    Chebyshev,
    Uniform,
}

/// Metric weight phi: the scale factor e^{-k phi(z)} multiplies every
/// section evaluation at z. Must be finite at every node it is paired with.
#[derive(Clone)]
pub struct MetricWeight {
    eval: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
    description: String,
}

impl MetricWeight {
    /// phi = 0: the unweighted setting.
    pub fn zero() -> Self {
        MetricWeight {
            eval: Arc::new(|_| 0.0),
            description: "zero".to_string(),
        }
    }

    /// phi(z) = c |z|^2.
    pub fn gaussian(c: f64) -> Self {
        assert!(c.is_finite());
        MetricWeight {
            eval: Arc::new(move |z| c * z.norm_sqr()),
            description: format!("gaussian({c})"),
        }
    }

    pub fn from_fn(
        description: impl Into<String>,
        f: impl Fn(Complex64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MetricWeight {
            eval: Arc::new(f),
            description: description.into(),
        }
    }

    /// Weight given by samples at fixed sites, extended off the sites by
    /// nearest-neighbour lookup. This is how file-loaded phi columns become
    /// a usable weight.
    pub fn nearest(sites: Vec<Complex64>, samples: Vec<f64>) -> Self {
        assert_eq!(sites.len(), samples.len());
        assert!(!sites.is_empty(), "need at least one sample");
        assert!(samples.iter().all(|v| v.is_finite()), "samples must be finite");
        MetricWeight {
            eval: Arc::new(move |z| {
                let mut best = 0usize;
                let mut dist = f64::INFINITY;
                for (i, &s) in sites.iter().enumerate() {
                    let d = (s - z).norm_sqr();
                    if d < dist {
                        dist = d;
                        best = i;
                    }
                }
                samples[best]
            }),
            description: "sampled".to_string(),
        }
    }

    pub fn value(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for MetricWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricWeight({})", self.description)
    }
}

/// Radial cutoff profile around a center: 1 inside radius `r_in`, 0 outside
/// `r_out`, with a smooth cubic ramp between. Values lie in [0, 1].
#[derive(Clone, Debug)]
pub struct BumpProfile {
    pub center: Complex64,
    pub r_in: f64,
    pub r_out: f64,
}

impl BumpProfile {
    pub fn new(center: Complex64, r_in: f64, r_out: f64) -> Self {
        assert!(r_in > 0.0 && r_out > r_in, "need 0 < r_in < r_out");
        BumpProfile { center, r_in, r_out }
    }

    pub fn value(&self, z: Complex64) -> f64 {
        let d = (z - self.center).norm();
        if d <= self.r_in {
            1.0
        } else if d >= self.r_out {
            0.0
        } else {
            // Smoothstep ramp, monotone from 1 down to 0.
            let t = (d - self.r_in) / (self.r_out - self.r_in);
            1.0 - t * t * (3.0 - 2.0 * t)
        }
    }
}

/// Formats an f64 with 17 significant digits, enough for exact round-trips.
pub(crate) fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a measure, with samples of the metric weight at its nodes, as CSV
/// rows `re,im,weight,phi`. `phi` must align with `measure.nodes()`.
pub fn save_measure(path: &Path, measure: &DiscreteMeasure, phi: &[f64]) -> Result<()> {
    assert_eq!(measure.len(), phi.len(), "phi samples must align with nodes");
    let mut out = String::new();
    out.push_str("# re,im,weight,phi\n");
    for (j, (&z, &w)) in measure.nodes().iter().zip(measure.weights()).enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_f64(z.re),
            format_f64(z.im),
            format_f64(w),
            format_f64(phi[j])
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a measure saved by `save_measure`: four comma-separated columns
/// `re,im,weight,phi` per line, `#` starting a comment, blank lines skipped.
/// Returns the measure and the phi samples aligned with its (deduplicated)
/// nodes; when nodes merge, the first phi sample wins.
pub fn load_measure(path: &Path) -> Result<(DiscreteMeasure, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut phis = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                message: format!("expected 4 fields re,im,weight,phi, found {}", fields.len()),
            });
        }
        let mut vals = [0.0f64; 4];
        for (slot, field) in vals.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|e| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                message: format!("bad number {field:?}: {e}"),
            })?;
        }
        nodes.push(Complex64::new(vals[0], vals[1]));
        weights.push(vals[2]);
        phis.push(vals[3]);
    }
    let raw_nodes = nodes.clone();
    let measure = DiscreteMeasure::new(nodes, weights)?;
    // Align phi with the deduplicated node list: first occurrence wins.
    let mut phi_out = vec![f64::NAN; measure.len()];
    for (raw_idx, &z) in raw_nodes.iter().enumerate() {
        if let Some(slot) = measure.find_node(z) {
            if phi_out[slot].is_nan() {
                phi_out[slot] = phis[raw_idx];
            }
        }
    }
    for (slot, v) in phi_out.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Parse {
                path: display,
                line: 0,
                message: format!("phi sample at node {slot} is not finite"),
            });
        }
    }
    Ok((measure, phi_out))
}
