//! Experiment drivers behind the command-line interface. Each one consumes
//! a config, runs a sweep over the configured k values, and renders a CSV
//! string: a `# config_hash = <sha256>` comment, a header row, then one row
//! per record with every float at 17 significant digits. Identical config
//! and seed always reproduce the file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::basis::orthonormal_basis;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::kernel::{
    forbidden_scan, lubinsky_check, ols_slope, vanishing_order, KernelEvaluator, ProbeGrid,
};
use crate::measure::{format_f64, DiscreteMeasure};
use crate::rng::SplitMix64;
use crate::toeplitz::{algebra_defect, moment_gap, s_operator, szego_identity};

/// The experiments the driver knows how to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Localization,
    Forbidden,
    Toeplitz,
    Lubinsky,
    Skop,
    Nevai,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Localization => "localization",
            Experiment::Forbidden => "forbidden",
            Experiment::Toeplitz => "toeplitz",
            Experiment::Lubinsky => "lubinsky",
            Experiment::Skop => "skop",
            Experiment::Nevai => "nevai",
        }
    }
}

/// Runs one experiment and returns the CSV text.
pub fn run_experiment(which: Experiment, cfg: &ExperimentConfig) -> Result<String> {
    match which {
        Experiment::Localization => run_localization(cfg),
        Experiment::Forbidden => run_forbidden(cfg),
        Experiment::Toeplitz => run_toeplitz(cfg),
        Experiment::Lubinsky => run_lubinsky(cfg),
        Experiment::Skop => run_skop(cfg),
        Experiment::Nevai => run_nevai(cfg),
    }
}

/// Runs one experiment and writes `<out_dir>/<name>.csv`, creating the
/// directory if needed. Returns the written path.
pub fn run_and_write(which: Experiment, cfg: &ExperimentConfig) -> Result<PathBuf> {
    let csv = run_experiment(which, cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(format!("{}.csv", which.name()));
    fs::write(&path, csv)?;
    Ok(path)
}

fn preamble(cfg: &ExperimentConfig, header: &str) -> String {
    format!("# config_hash = {}\n{header}\n", cfg.hash())
}

/// Off-diagonal kernel mass at the configured distance, per k. The mass of
/// the normalized kernel measure away from the diagonal decaying to zero is
/// the localization statement in curve form.
pub fn run_localization(cfg: &ExperimentConfig) -> Result<String> {
    let (mu, phi) = cfg.build_measure()?;
    let delta = cfg.delta.unwrap_or_else(|| 0.25 * mu.support_diameter());
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Config("support has zero diameter; set delta".to_string()));
    }
    let mut out = preamble(cfg, "k,delta,offdiag_mass,total_mass,trace_residual");
    for &k in &cfg.k_list {
        let basis = orthonormal_basis(&mu, &phi, k)?;
        let ke = KernelEvaluator::new(&basis);
        let _ = writeln!(
            out,
            "{k},{},{},{},{}",
            format_f64(delta),
            format_f64(ke.offdiag_mass(delta)),
            format_f64(ke.total_mass()),
            format_f64((ke.trace() - k as f64).abs())
        );
    }
    Ok(out)
}

/// Partial-kernel supremum on a probe grid near the vanishing point, per k,
/// with the running fitted slope of log sup against k once four rows exist.
pub fn run_forbidden(cfg: &ExperimentConfig) -> Result<String> {
    let (mu, phi) = cfg.build_measure()?;
    for &k in &cfg.k_list {
        if vanishing_order(cfg.eps, k) >= k {
            return Err(Error::Config(format!(
                "eps = {} leaves no sections at k = {k}",
                cfg.eps
            )));
        }
    }
    let probe = ProbeGrid {
        radius: cfg.probe_radius,
        circles: cfg.probe_circles,
        angles: cfg.probe_angles,
    };
    let scan = forbidden_scan(&mu, &phi, cfg.y0, cfg.eps, &cfg.k_list, &probe)?;
    let mut out = preamble(cfg, "k,order,sup_partial_diag,partial_trace,slope_so_far");
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for row in &scan.rows {
        xs.push(row.k as f64);
        ys.push(row.sup_diag.max(1e-300).ln());
        let slope = if xs.len() >= 4 {
            format_f64(ols_slope(&xs, &ys))
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{slope}",
            row.k,
            row.order,
            format_f64(row.sup_diag),
            format_f64(row.trace)
        );
    }
    Ok(out)
}

/// Toeplitz algebra defect per (k, p), with the Szego identity residual and
/// the moment gaps up to the configured order along each row.
pub fn run_toeplitz(cfg: &ExperimentConfig) -> Result<String> {
    let (mu, phi) = cfg.build_measure()?;
    let f = cfg.f.to_symbol();
    let g = cfg.g.to_symbol();
    if !f.is_real() {
        return Err(Error::Config(
            "toeplitz driver needs a real symbol f for the Szego and moment columns".to_string(),
        ));
    }
    let mut header = "k,p,algebra_defect,szego_residual".to_string();
    for m in 2..=cfg.moment {
        let _ = write!(header, ",moment_gap_{m}");
    }
    let mut out = preamble(cfg, &header);
    for &k in &cfg.k_list {
        let basis = orthonormal_basis(&mu, &phi, k)?;
        let szego = szego_identity(&basis, &f).residual();
        let gaps: Vec<f64> = (2..=cfg.moment).map(|m| moment_gap(&basis, &f, m)).collect();
        for &p in &cfg.p_list {
            let defect = algebra_defect(&basis, &f, &g, p)?;
            let _ = write!(
                out,
                "{k},{},{},{}",
                format_f64(p),
                format_f64(defect),
                format_f64(szego)
            );
            for gap in &gaps {
                let _ = write!(out, ",{}", format_f64(*gap));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Randomized comparison trials: each trial thins the configured measure
/// nodewise, picks a probe point, and records both sides of the comparison
/// inequality. The margin column rhs - lhs stays nonnegative up to roundoff.
pub fn run_lubinsky(cfg: &ExperimentConfig) -> Result<String> {
    let (mu2, phi) = cfg.build_measure()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let diameter = mu2.support_diameter().max(1e-6);
    let centroid = {
        let total = mu2.total_mass();
        mu2.nodes()
            .iter()
            .zip(mu2.weights())
            .map(|(&z, &w)| z * (w / total))
            .sum::<Complex64>()
    };
    let mut out = preamble(cfg, "trial,k,x_re,x_im,lhs,rhs,margin");
    for trial in 0..cfg.trials {
        let k = cfg.k_list[rng.index(cfg.k_list.len())];
        let weights: Vec<f64> = mu2.weights().iter().map(|&w| w * rng.range(0.25, 1.0)).collect();
        let mu1 = DiscreteMeasure::new(mu2.nodes().to_vec(), weights)
            .expect("thinned weights stay positive");
        let x = if rng.next_f64() < 0.5 {
            mu2.node(rng.index(mu2.len()))
        } else {
            centroid
                + Complex64::new(
                    rng.range(-0.6, 0.6) * diameter,
                    rng.range(-0.6, 0.6) * diameter,
                )
        };
        let rep = lubinsky_check(&mu1, &mu2, &phi, k, x)?;
        let _ = writeln!(
            out,
            "{trial},{k},{},{},{},{},{}",
            format_f64(x.re),
            format_f64(x.im),
            format_f64(rep.lhs),
            format_f64(rep.rhs),
            format_f64(rep.rhs - rep.lhs)
        );
    }
    Ok(out)
}

/// Off-space commutator survey for the configured rational symbol: mass,
/// kernel-formula cross-check, and rank against the degree budget, per k.
pub fn run_skop(cfg: &ExperimentConfig) -> Result<String> {
    let (mu, phi) = cfg.build_measure()?;
    let f = cfg.f.to_rational().ok_or_else(|| {
        Error::Config("skop needs a rational symbol: z, const:<c>, or rational:...".to_string())
    })?;
    if f.degree() > cfg.k0 {
        return Err(Error::Config(format!(
            "symbol degree {} exceeds budget k0 = {}",
            f.degree(),
            cfg.k0
        )));
    }
    let mut out = preamble(
        cfg,
        "k,hs_norm_sq,kernel_l2,rel_gap,numerical_rank,rank_bound",
    );
    for &k in &cfg.k_list {
        let basis = orthonormal_basis(&mu, &phi, k)?;
        let s = s_operator(&basis, &f, cfg.k0)?;
        let rel_gap = (s.hs_norm_sq - s.kernel_l2).abs() / (1.0 + s.kernel_l2);
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{}",
            format_f64(s.hs_norm_sq),
            format_f64(s.kernel_l2),
            format_f64(rel_gap),
            s.numerical_rank,
            s.rank_bound
        );
    }
    Ok(out)
}

/// Nevai localization at the configured anchor: the peak-section measure's
/// mass outside the anchor radius, its volume factor, and the averaged
/// volume identity residual, per k.
pub fn run_nevai(cfg: &ExperimentConfig) -> Result<String> {
    let (mu, phi) = cfg.build_measure()?;
    let mut out = preamble(cfg, "k,vol,mass_outside,avg_vol_residual");
    for &k in &cfg.k_list {
        let basis = orthonormal_basis(&mu, &phi, k)?;
        let ke = KernelEvaluator::new(&basis);
        let nm = ke.nevai_measure(cfg.anchor)?;
        let avg_residual = (ke.trace() / k as f64 - 1.0).abs();
        let _ = writeln!(
            out,
            "{k},{},{},{}",
            format_f64(nm.vol),
            format_f64(nm.mass_outside(cfg.anchor_radius)),
            format_f64(avg_residual)
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn load(text: &str) -> (tempfile::TempDir, ExperimentConfig) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, text).unwrap();
        let cfg = ExperimentConfig::load(&path).unwrap();
        (dir, cfg)
    }

    #[test]
    fn localization_on_circle_reports_exact_values() {
        let (_dir, cfg) = load("[measure]\nkind = circle\nm = 8\n[run]\nk = 8\ndelta = 0.1\n");
        let csv = run_localization(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# config_hash = "));
        assert_eq!(lines[1], "k,delta,offdiag_mass,total_mass,trace_residual");
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields[0], "8");
        let offdiag: f64 = fields[2].parse().unwrap();
        let total: f64 = fields[3].parse().unwrap();
        assert!(offdiag.abs() < 1e-12);
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forbidden_slope_column_fills_in_after_four_rows() {
        let (_dir, cfg) = load(
            "[measure]\nkind = circle\nm = 64\n[run]\nk = 8,16,24,32\neps = 0.25\ny0 = 0\n",
        );
        let csv = run_forbidden(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        for row in &lines[2..5] {
            assert!(row.ends_with(','), "premature slope in {row}");
        }
        let last: Vec<&str> = lines[5].split(',').collect();
        let slope: f64 = last[4].parse().unwrap();
        assert!(slope < -0.1, "slope {slope}");
    }

    #[test]
    fn forbidden_rejects_eps_that_empties_a_basis() {
        let (_dir, cfg) =
            load("[measure]\nkind = circle\nm = 64\n[run]\nk = 1,2,4\neps = 0.9\n");
        match run_forbidden(&cfg) {
            Err(Error::Config(msg)) => assert!(msg.contains("k = 1"), "{msg}"),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn toeplitz_defect_of_constants_is_tiny() {
        let (_dir, cfg) = load(
            "[measure]\nkind = circle\nm = 32\n[run]\nk = 4,8\nf = const:3\ng = const:3\np = 1\n",
        );
        let csv = run_toeplitz(&cfg).unwrap();
        for line in csv.lines().skip(2) {
            let fields: Vec<&str> = line.split(',').collect();
            let defect: f64 = fields[2].parse().unwrap();
            assert!(defect < 1e-12, "{line}");
        }
    }

    #[test]
    fn lubinsky_margins_stay_nonnegative() {
        let (_dir, cfg) = load(
            "[measure]\nkind = circle\nm = 16\n[run]\nk = 4,6\ntrials = 20\nseed = 3\n",
        );
        let csv = run_lubinsky(&cfg).unwrap();
        let rows: Vec<&str> = csv.lines().skip(2).collect();
        assert_eq!(rows.len(), 20);
        for row in rows {
            let fields: Vec<&str> = row.split(',').collect();
            let margin: f64 = fields[6].parse().unwrap();
            assert!(margin >= -1e-9, "{row}");
        }
    }

    #[test]
    fn skop_rank_never_exceeds_budget() {
        let (_dir, cfg) =
            load("[measure]\nkind = chebyshev\nm = 64\n[run]\nk = 4,8,16\nf = z\nk0 = 1\n");
        let csv = run_skop(&cfg).unwrap();
        for line in csv.lines().skip(2) {
            let fields: Vec<&str> = line.split(',').collect();
            let rank: usize = fields[4].parse().unwrap();
            let bound: usize = fields[5].parse().unwrap();
            assert!(rank <= bound, "{line}");
        }
    }

    #[test]
    fn skop_rejects_sampled_symbols() {
        let (_dir, cfg) = load("[measure]\nkind = circle\nm = 16\n[run]\nk = 4\nf = re_z\n");
        assert!(matches!(run_skop(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn nevai_at_node_of_full_basis_has_no_outside_mass() {
        let (_dir, cfg) = load(
            "[measure]\nkind = circle\nm = 8\n[run]\nk = 8\nanchor = 1\nanchor_radius = 0.2\n",
        );
        let csv = run_nevai(&cfg).unwrap();
        let fields: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
        let outside: f64 = fields[2].parse().unwrap();
        assert!(outside < 1e-12);
    }

    #[test]
    fn identical_configs_render_identical_bytes() {
        let text = "[measure]\nkind = circle\nm = 16\n[run]\nk = 4,8\ntrials = 10\nseed = 9\n";
        let (_d1, cfg1) = load(text);
        let (_d2, cfg2) = load(text);
        for which in [
            Experiment::Localization,
            Experiment::Lubinsky,
            Experiment::Nevai,
        ] {
            let a = run_experiment(which, &cfg1).unwrap();
            let b = run_experiment(which, &cfg2).unwrap();
            assert_eq!(a, b, "{}", which.name());
        }
    }

    #[test]
    fn run_and_write_places_file_in_out_dir() {
        let dir = tempfile::tempdir().unwrap();
        let cfgtext = format!(
            "[measure]\nkind = circle\nm = 8\n[run]\nk = 4\nout = {}\n",
            dir.path().join("results").display()
        );
        let cfgpath = dir.path().join("cfg");
        std::fs::write(&cfgpath, cfgtext).unwrap();
        let cfg = ExperimentConfig::load(&cfgpath).unwrap();
        let path = run_and_write(Experiment::Localization, &cfg).unwrap();
        assert!(Path::new(&path).exists());
        assert!(path.ends_with("localization.csv"));
    }
}
