//! Acceptance suite: ten end-to-end checks covering exact kernel identities,
//! localization and comparison inequalities, Toeplitz asymptotics, rank
//! collapse, independent orthonormalization oracles, and CLI determinism.
//! Each check prints exactly one pass/fail line; tolerances are pinned here.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::process::Command;

use num_complex::Complex64;

use christoffel::kernel::vanishing_order;
use christoffel::{
    algebra_defect, forbidden_scan, hermitian_toeplitz, lubinsky_check, moment_gap,
    orthonormal_basis, s_operator, spectral_measure, szego_identity, truncation_error,
    vanishing_basis, BumpProfile, ComplexMatrix, DiscreteMeasure, IntervalRule, KernelEvaluator,
    MetricWeight, ProbeGrid, RationalSymbol, SplitMix64, SymbolFunction,
};

fn report(number: u32, label: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {number:02} {label}: {status} ({detail})");
    assert!(pass, "acceptance {number:02} {label}: {detail}");
}

/// The shared family of test measures: circles of several sizes, both
/// interval rules, and a circle with two genuinely planar atoms.
fn test_measures() -> Vec<(&'static str, DiscreteMeasure)> {
    let with_atoms = DiscreteMeasure::circle(64, 1.0)
        .add_atoms(&[
            (Complex64::new(0.3, 0.4), 0.05),
            (Complex64::new(-0.2, -0.6), 0.02),
        ])
        .expect("atoms are off the circle");
    vec![
        ("circle(8)", DiscreteMeasure::circle(8, 1.0)),
        ("circle(32)", DiscreteMeasure::circle(32, 1.0)),
        ("circle(256)", DiscreteMeasure::circle(256, 1.0)),
        (
            "chebyshev(64)",
            DiscreteMeasure::interval(64, IntervalRule::Chebyshev),
        ),
        (
            "chebyshev(256)",
            DiscreteMeasure::interval(256, IntervalRule::Chebyshev),
        ),
        (
            "uniform(128)",
            DiscreteMeasure::interval(128, IntervalRule::Uniform),
        ),
        ("circle(64)+atoms", with_atoms),
    ]
}

#[test]
fn exact_identities_hold_on_every_test_measure() {
    let phi = MetricWeight::zero();
    let f = SymbolFunction::re_z();
    let coord = RationalSymbol::coordinate();
    let y0 = Complex64::new(0.0, 0.0);
    let eps = 0.25;

    let mut worst_mass: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut worst_partial: f64 = 0.0;
    let mut worst_szego: f64 = 0.0;
    let mut worst_hs: f64 = 0.0;
    let mut combos = 0usize;

    for (_, mu) in &test_measures() {
        for k in [4usize, 8, 16, 32] {
            if k > mu.len() {
                continue;
            }
            combos += 1;
            let basis = orthonormal_basis(mu, &phi, k).expect("full basis");
            let kernel = KernelEvaluator::new(&basis);

            worst_mass = worst_mass.max((kernel.total_mass() - 1.0).abs());
            worst_trace = worst_trace.max((kernel.trace() - k as f64).abs());

            let order = vanishing_order(eps, k);
            let partial = vanishing_basis(mu, &phi, k, y0, order).expect("partial basis");
            let expected = (k - order) as f64;
            worst_partial = worst_partial
                .max((KernelEvaluator::new(&partial).trace() - expected).abs());

            // Trace average = diagonal-measure integral = eigenvalue mean.
            let szego = szego_identity(&basis, &f);
            let op = hermitian_toeplitz(&basis, &f).expect("real symbol");
            let mean = spectral_measure(&op).expect("eig").mean();
            worst_szego = worst_szego
                .max(szego.residual())
                .max((mean - szego.trace_avg).abs());

            let s = s_operator(&basis, &coord, 1).expect("commutator");
            worst_hs =
                worst_hs.max((s.hs_norm_sq - s.kernel_l2).abs() / (1.0 + s.kernel_l2));
        }
    }

    let pass = worst_mass <= 1e-10
        && worst_trace <= 1e-8
        && worst_partial <= 1e-8
        && worst_szego <= 1e-10
        && worst_hs <= 1e-8;
    report(
        1,
        "exact identities",
        pass,
        &format!(
            "{combos} combos, mass {worst_mass:.1e}, trace {worst_trace:.1e}, \
             partial {worst_partial:.1e}, szego {worst_szego:.1e}, hs {worst_hs:.1e}"
        ),
    );
}

#[test]
fn off_diagonal_mass_decays_fourfold_from_k8_to_k64() {
    let phi = MetricWeight::zero();
    let delta = 0.5;
    let mut details = Vec::new();
    let mut pass = true;

    for (label, mu) in [
        (
            "chebyshev(256)",
            DiscreteMeasure::interval(256, IntervalRule::Chebyshev),
        ),
        ("circle(256)", DiscreteMeasure::circle(256, 1.0)),
    ] {
        let mass = |k: usize| {
            let basis = orthonormal_basis(&mu, &phi, k).expect("basis");
            KernelEvaluator::new(&basis).offdiag_mass(delta)
        };
        let ratio = mass(64) / mass(8);
        pass &= ratio <= 0.25;
        details.push(format!("{label} ratio {ratio:.4}"));
    }

    report(2, "localization decay", pass, &details.join(", "));
}

#[test]
fn off_diagonal_integral_stays_bounded_to_k80() {
    // Chebyshev bulk plus two planar atoms; the unnormalized off-diagonal
    // kernel energy must not drift upward once past the transient regime.
    let mu = DiscreteMeasure::interval(512, IntervalRule::Chebyshev)
        .add_atoms(&[
            (Complex64::new(0.3, 0.4), 0.05),
            (Complex64::new(-0.2, -0.6), 0.02),
        ])
        .expect("atoms");
    let phi = MetricWeight::zero();
    let delta = 0.5;

    let mut running_max: f64 = 0.0;
    let mut worst_jump: f64 = 0.0;
    let mut last = 0.0;
    for k in (8..=80).step_by(4) {
        let basis = orthonormal_basis(&mu, &phi, k).expect("basis");
        let value = KernelEvaluator::new(&basis).offdiag_integral(delta);
        if k > 24 {
            worst_jump = worst_jump.max(value / running_max);
        }
        running_max = running_max.max(value);
        last = value;
    }

    report(
        3,
        "uniform boundedness",
        worst_jump <= 1.05,
        &format!(
            "worst jump {worst_jump:.4}, max {running_max:.4}, value at k=80 {last:.4}"
        ),
    );
}

#[test]
fn dominated_pairs_satisfy_the_comparison_inequality() {
    let mut rng = SplitMix64::new(42);
    let pool = [
        DiscreteMeasure::circle(32, 1.0),
        DiscreteMeasure::interval(64, IntervalRule::Chebyshev),
        DiscreteMeasure::interval(128, IntervalRule::Uniform),
        DiscreteMeasure::circle(16, 1.0)
            .add_atoms(&[
                (Complex64::new(0.2, 0.3), 0.04),
                (Complex64::new(-0.5, 0.1), 0.01),
            ])
            .expect("atoms"),
    ];
    let ks = [4usize, 8, 16];

    let mut worst_excess = f64::NEG_INFINITY;
    let mut min_rhs = f64::INFINITY;
    for _ in 0..100 {
        let mu2 = &pool[rng.index(pool.len())];
        let k = ks[rng.index(ks.len())];
        let phi = if rng.next_f64() < 0.5 {
            MetricWeight::zero()
        } else {
            MetricWeight::gaussian(0.1)
        };

        // Shrink every weight by an independent factor in [0.25, 1).
        let weights: Vec<f64> = mu2
            .weights()
            .iter()
            .map(|&w| w * (0.25 + 0.75 * rng.next_f64()))
            .collect();
        let mu1 = DiscreteMeasure::new(mu2.nodes().to_vec(), weights).expect("scaled");

        // Probe at a node or at a random planar point near the support.
        let x = if rng.next_f64() < 0.5 {
            mu2.node(rng.index(mu2.len()))
        } else {
            let center: Complex64 =
                mu2.nodes().iter().sum::<Complex64>() / mu2.len() as f64;
            let spread = 0.6 * mu2.support_diameter();
            center
                + Complex64::new(
                    spread * (rng.next_f64() - 0.5),
                    spread * (rng.next_f64() - 0.5),
                )
        };

        let rep = lubinsky_check(&mu1, mu2, &phi, k, x).expect("dominated by construction");
        worst_excess = worst_excess.max(rep.lhs - rep.rhs);
        min_rhs = min_rhs.min(rep.rhs);
    }

    let pass = worst_excess <= 1e-9 && min_rhs >= -1e-10;
    report(
        4,
        "dominated-pair comparison",
        pass,
        &format!("100 trials, worst lhs-rhs {worst_excess:.2e}, min rhs {min_rhs:.2e}"),
    );
}

#[test]
fn truncation_error_is_controlled_by_the_diagonal_gap() {
    let mut rng = SplitMix64::new(2024);
    let pool = [
        DiscreteMeasure::interval(128, IntervalRule::Chebyshev),
        DiscreteMeasure::interval(128, IntervalRule::Uniform),
        DiscreteMeasure::circle(64, 1.0),
    ];
    let ks = [4usize, 8, 16];

    let mut worst_slack = f64::NEG_INFINITY;
    for _ in 0..50 {
        let mu = &pool[rng.index(pool.len())];
        let k = ks[rng.index(ks.len())];
        let phi = if rng.next_f64() < 0.5 {
            MetricWeight::zero()
        } else {
            MetricWeight::gaussian(0.1)
        };

        let center = mu.node(rng.index(mu.len()));
        let r_in = 0.3 + 0.3 * rng.next_f64();
        let mut r_out = r_in + 0.3 + 0.3 * rng.next_f64();

        // Grow the bump until enough nodes survive to span k sections.
        loop {
            let surviving = mu
                .nodes()
                .iter()
                .filter(|&&z| (z - center).norm() < r_out)
                .count();
            if surviving >= k {
                break;
            }
            r_out += 0.25;
        }

        let bump = BumpProfile::new(center, r_in, r_out);
        let rep = truncation_error(mu, &bump, &phi, k).expect("truncated basis spans");
        worst_slack = worst_slack.max(rep.kernel_l2_diff - rep.diag_gap - 1e-8 * k as f64);
    }

    report(
        5,
        "truncation chain",
        worst_slack <= 0.0,
        &format!("50 configs, worst slack {worst_slack:.2e}"),
    );
}

#[test]
fn partial_kernel_decays_exponentially_in_the_forbidden_disk() {
    let mu = DiscreteMeasure::circle(64, 1.0);
    let phi = MetricWeight::zero();
    let scan = forbidden_scan(
        &mu,
        &phi,
        Complex64::new(0.0, 0.0),
        0.25,
        &[8, 16, 24, 32],
        &ProbeGrid::new(0.2),
    )
    .expect("scan");

    let slope = scan.slope.expect("four rows fitted");
    report(
        6,
        "forbidden-region decay",
        slope <= -0.1,
        &format!("log-slope {slope:.4}"),
    );
}

#[test]
fn commutator_rank_never_exceeds_the_degree_budget() {
    let phi = MetricWeight::zero();
    let f = RationalSymbol::coordinate();

    let mut max_rank = 0usize;
    let mut combos = 0usize;
    for (_, mu) in &test_measures() {
        for k in 1..=48usize.min(mu.len()) {
            combos += 1;
            let basis = orthonormal_basis(mu, &phi, k).expect("basis");
            let s = s_operator(&basis, &f, 1).expect("commutator");
            max_rank = max_rank.max(s.numerical_rank);
        }
    }

    report(
        7,
        "rank bound",
        max_rank <= 1,
        &format!("{combos} combos, max numerical rank {max_rank}"),
    );
}

#[test]
fn toeplitz_defect_and_moment_gap_shrink_fourfold() {
    let mu = DiscreteMeasure::circle(256, 1.0);
    let phi = MetricWeight::zero();
    let f = SymbolFunction::re_z();

    let at = |k: usize| {
        let basis = orthonormal_basis(&mu, &phi, k).expect("basis");
        let defect = algebra_defect(&basis, &f, &f, 1.0).expect("schatten");
        let gap = moment_gap(&basis, &f, 2);
        (defect, gap)
    };
    let (d8, g8) = at(8);
    let (d64, g64) = at(64);

    let pass = d64 <= 0.25 * d8 && g64 <= 0.25 * g8;
    report(
        8,
        "algebra defect decay",
        pass,
        &format!("defect ratio {:.4}, moment-gap ratio {:.4}", d64 / d8, g64 / g8),
    );
}

/// Lower-triangular complex Cholesky factor of a Hermitian positive-definite
/// matrix, used as an independent orthonormalization oracle.
fn cholesky(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[(i, j)];
            for p in 0..j {
                sum -= l[(i, p)] * l[(j, p)].conj();
            }
            if i == j {
                assert!(sum.re > 0.0, "oracle Gram matrix must be positive definite");
                l[(i, j)] = Complex64::new(sum.re.sqrt(), 0.0);
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    l
}

/// Columns of m orthonormalized by the Cholesky factor of its Gram matrix:
/// the classic normal-equations route the recurrence-based builder avoids.
fn cholesky_orthonormal(m: &ComplexMatrix) -> ComplexMatrix {
    let l = cholesky(&m.adjoint().mul(m));
    let (rows, cols) = (m.rows(), m.cols());
    let mut c = ComplexMatrix::zeros(rows, cols);
    for i in 0..cols {
        for r in 0..rows {
            let mut v = m[(r, i)];
            for p in 0..i {
                // (L*)[p][i] = conj(L[i][p])
                v -= c[(r, p)] * l[(i, p)].conj();
            }
            c[(r, i)] = v / l[(i, i)];
        }
    }
    c
}

fn projection_residual(a: &ComplexMatrix, c: &ComplexMatrix) -> f64 {
    let pa = c.mul(&c.adjoint().mul(a));
    a.sub(&pa).frobenius_norm()
}

#[test]
fn bases_agree_with_independent_oracles() {
    let mut worst_span: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;

    // Span agreement with monomial-Gram Cholesky for small k.
    let oracle_measures = vec![
        DiscreteMeasure::circle(16, 1.0),
        DiscreteMeasure::interval(64, IntervalRule::Chebyshev),
        DiscreteMeasure::interval(128, IntervalRule::Uniform),
        DiscreteMeasure::circle(32, 1.0)
            .add_atoms(&[(Complex64::new(0.3, 0.4), 0.05)])
            .expect("atom"),
    ];
    for mu in &oracle_measures {
        for phi in [MetricWeight::zero(), MetricWeight::gaussian(0.1)] {
            for k in [2usize, 5, 8] {
                let basis = orthonormal_basis(mu, &phi, k).expect("basis");
                let values = basis.evaluate(mu.nodes());

                let scale = |j: usize| mu.weight(j).sqrt();
                let a = ComplexMatrix::from_fn(mu.len(), k, |j, i| scale(j) * values[(j, i)]);
                let monomials = ComplexMatrix::from_fn(mu.len(), k, |j, i| {
                    let damp = (-(k as f64) * phi.value(mu.node(j))).exp();
                    scale(j) * mu.node(j).powu(i as u32) * damp
                });
                let c = cholesky_orthonormal(&monomials);

                worst_span = worst_span
                    .max(projection_residual(&a, &c))
                    .max(projection_residual(&c, &a));
            }
        }
    }

    // Closed forms: roots-of-unity monomials stay monomials.
    let circle = DiscreteMeasure::circle(16, 1.0);
    let basis = orthonormal_basis(&circle, &MetricWeight::zero(), 8).expect("basis");
    let values = basis.evaluate(circle.nodes());
    for j in 0..circle.len() {
        for i in 0..8 {
            let expect = circle.node(j).powu(i as u32);
            worst_closed = worst_closed.max((values[(j, i)] - expect).norm());
        }
    }

    // Closed forms: the first Chebyshev polynomials under the arccos grid.
    let cheb = DiscreteMeasure::interval(64, IntervalRule::Chebyshev);
    let basis = orthonormal_basis(&cheb, &MetricWeight::zero(), 3).expect("basis");
    let values = basis.evaluate(cheb.nodes());
    let sqrt2 = 2.0f64.sqrt();
    for j in 0..cheb.len() {
        let x = cheb.node(j).re;
        for (i, expect) in [1.0, sqrt2 * x, sqrt2 * (2.0 * x * x - 1.0)]
            .into_iter()
            .enumerate()
        {
            worst_closed = worst_closed.max((values[(j, i)].re - expect).abs());
            worst_closed = worst_closed.max(values[(j, i)].im.abs());
        }
    }

    // Closed forms: Re z compresses to the free Jacobi matrix on the circle,
    // with eigenvalues cos(j pi / (k + 1)).
    let circle = DiscreteMeasure::circle(64, 1.0);
    let k = 16usize;
    let basis = orthonormal_basis(&circle, &MetricWeight::zero(), k).expect("basis");
    let op = hermitian_toeplitz(&basis, &SymbolFunction::re_z()).expect("real");
    let spec = spectral_measure(&op).expect("eig");
    let mut expected: Vec<f64> = (1..=k)
        .map(|j| (j as f64 * std::f64::consts::PI / (k as f64 + 1.0)).cos())
        .collect();
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (got, want) in spec.eigenvalues.iter().zip(&expected) {
        worst_closed = worst_closed.max((got - want).abs());
    }

    let pass = worst_span <= 1e-8 && worst_closed <= 1e-10;
    report(
        9,
        "oracle equivalence",
        pass,
        &format!("span residual {worst_span:.2e}, closed-form error {worst_closed:.2e}"),
    );
}

#[test]
fn seeded_cli_runs_are_byte_identical() {
    let dir = tempfile::tempdir().expect("tempdir");

    let general = dir.path().join("general.toml");
    std::fs::write(
        &general,
        "[measure]\n\
         kind = circle\n\
         m = 64\n\
         radius = 1.0\n\
         \n\
         [run]\n\
         k = 4,8,16\n\
         eps = 0.25\n\
         f = re_z\n\
         g = re_z\n\
         p = 1\n\
         moment = 2\n\
         trials = 20\n\
         anchor = 0.1\n\
         anchor_radius = 0.25\n\
         seed = 7\n",
    )
    .expect("write config");

    let rational = dir.path().join("rational.toml");
    std::fs::write(
        &rational,
        "[measure]\n\
         kind = chebyshev\n\
         m = 64\n\
         \n\
         [run]\n\
         k = 4,8,16\n\
         f = z\n\
         k0 = 1\n\
         seed = 7\n",
    )
    .expect("write config");

    let mut all_match = true;
    let mut details = Vec::new();
    for sub in ["localization", "forbidden", "toeplitz", "lubinsky", "skop", "nevai"] {
        let config = if sub == "skop" { &rational } else { &general };
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{sub}_{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_christoffel"))
                .args([
                    sub,
                    "--config",
                    config.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                    "--seed",
                    "7",
                ])
                .stdout(std::process::Stdio::null())
                .status()
                .expect("spawn CLI");
            assert!(status.success(), "{sub} run {run} exited nonzero");
            outputs.push(std::fs::read(out.join(format!("{sub}.csv"))).expect("csv"));
        }
        let same = outputs[0] == outputs[1];
        all_match &= same;
        if !same {
            details.push(format!("{sub} differs"));
        }
    }

    if details.is_empty() {
        details.push("6 subcommands byte-identical across reruns".to_string());
    }
    report(10, "seeded determinism", all_match, &details.join(", "));
}
