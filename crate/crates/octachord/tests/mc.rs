//! The Monte Carlo estimators against the closed forms they know nothing
//! about, plus the determinism contract.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use octachord::quadrature::{edges_within, integrate};
use octachord::{
    gamma0, gamma1, gamma2_edge, gamma2_parallel, gamma2_vertex, interior_moments, iur_chords,
    make_octahedron, mc_pair_density, stick_gamma, Error, McConfig, McHistogram, PairTag,
    QuadratureConfig,
};
use std::f64::consts::SQRT_2;

fn cfg(samples: u64, bins: usize) -> McConfig {
    McConfig { seed: 42, samples, bins, r_max: SQRT_2 }
}

#[test]
fn config_validation() {
    let geom = make_octahedron(1.0).unwrap();
    let bad = McConfig { samples: 0, ..cfg(1, 10) };
    assert!(matches!(stick_gamma(0.5, &bad, &geom), Err(Error::BadMcConfig(_))));
    let bad = McConfig { bins: 0, ..cfg(1, 10) };
    assert!(matches!(iur_chords(&bad, &geom), Err(Error::BadMcConfig(_))));
    let bad = McConfig { r_max: 0.0, ..cfg(1, 10) };
    assert!(matches!(iur_chords(&bad, &geom), Err(Error::BadMcConfig(_))));
}

#[test]
fn stick_end_cases() {
    let geom = make_octahedron(1.0).unwrap();
    let c = cfg(1 << 14, 10);
    // Zero-length sticks always land back inside; sticks longer than the
    // diameter never do.
    let (p0, se0) = stick_gamma(0.0, &c, &geom).unwrap();
    assert_eq!(p0, 1.0);
    assert_eq!(se0, 0.0);
    let (p2, _) = stick_gamma(SQRT_2 + 1e-9, &c, &geom).unwrap();
    assert_eq!(p2, 0.0);
    assert!(matches!(stick_gamma(-0.5, &c, &geom), Err(Error::OutOfRange { .. })));
}

#[test]
fn stick_matches_gamma_within_sampling_error() {
    let geom = make_octahedron(1.0).unwrap();
    let qcfg = QuadratureConfig::default();
    let c = cfg(1 << 21, 10);
    for r in [0.2, 0.5, 0.9] {
        let (est, se) = stick_gamma(r, &c, &geom).unwrap();
        let truth = gamma0(r, &qcfg).unwrap();
        let z = (est - truth) / se;
        assert!(z.abs() < 4.0, "r={r}: est {est:.6} truth {truth:.6} z {z:.2}");
    }
}

#[test]
fn stick_standard_error_halves_when_samples_quadruple() {
    let geom = make_octahedron(1.0).unwrap();
    let (_, se1) = stick_gamma(0.5, &cfg(1 << 18, 10), &geom).unwrap();
    let (_, se4) = stick_gamma(0.5, &cfg(1 << 20, 10), &geom).unwrap();
    let ratio = se4 / se1;
    assert!((0.4..0.6).contains(&ratio), "SE ratio {ratio:.3}");
}

#[test]
fn stick_is_deterministic() {
    let geom = make_octahedron(1.0).unwrap();
    let c = cfg(1 << 18, 10);
    let a = stick_gamma(0.7, &c, &geom).unwrap();
    let b = stick_gamma(0.7, &c, &geom).unwrap();
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert_eq!(a.1.to_bits(), b.1.to_bits());
    // And independent of the thread count: same blocks, same merge order.
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let r1 = pool1.install(|| stick_gamma(0.7, &c, &geom).unwrap());
    let r4 = pool4.install(|| stick_gamma(0.7, &c, &geom).unwrap());
    assert_eq!(r1.0.to_bits(), r4.0.to_bits());
    assert_eq!(r1.1.to_bits(), r4.1.to_bits());
}

fn assert_histograms_identical(a: &McHistogram, b: &McHistogram) {
    assert_eq!(a.bin_edges.len(), b.bin_edges.len());
    for (x, y) in a.density.iter().zip(&b.density) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    for (x, y) in a.std_err.iter().zip(&b.std_err) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    assert_eq!(a.total_weight.to_bits(), b.total_weight.to_bits());
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
}

#[test]
fn chord_histogram_is_deterministic_across_thread_counts() {
    let geom = make_octahedron(1.0).unwrap();
    let c = cfg(1 << 19, 60);
    let base = iur_chords(&c, &geom).unwrap();
    let again = iur_chords(&c, &geom).unwrap();
    assert_histograms_identical(&base, &again);
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool3 = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let h1 = pool1.install(|| iur_chords(&c, &geom).unwrap());
    let h3 = pool3.install(|| iur_chords(&c, &geom).unwrap());
    assert_histograms_identical(&h1, &h3);
    assert_histograms_identical(&base, &h1);
}

#[test]
fn chord_histogram_normalizes_and_matches_clpd() {
    let geom = make_octahedron(1.0).unwrap();
    let qcfg = QuadratureConfig::default();
    let c = cfg(1 << 21, 50);
    let hist = iur_chords(&c, &geom).unwrap();
    // Unit weights conditioned on hits integrate to exactly 1.
    let mass: f64 = hist
        .density
        .iter()
        .enumerate()
        .map(|(i, d)| d * (hist.bin_edges[i + 1] - hist.bin_edges[i]))
        .sum();
    assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
    // Support never exceeds the diameter.
    assert_eq!(*hist.bin_edges.last().unwrap(), SQRT_2);
    // Mean chord matches 4V/S.
    let z = (hist.mean - 0.544_331_053_951_817_4) / hist.mean_std_err;
    assert!(z.abs() < 4.0, "mean {} z {z:.2}", hist.mean);
    // Per-bin comparison against the exact bin average of eta, which is
    // mean_chord * (gamma'(hi) - gamma'(lo)) / width.  Bins expecting fewer
    // than 25 hits are left to the integral-level checks; their standard
    // errors are too granular for a z-test.
    let mean_chord = 0.544_331_053_951_817_4;
    let hits = hist.total_weight;
    let mut tested = 0;
    for i in 0..hist.density.len() {
        let (lo, hi) = (hist.bin_edges[i], hist.bin_edges[i + 1]);
        let avg = mean_chord * (gamma1(hi, &qcfg).unwrap() - gamma1(lo, &qcfg).unwrap())
            / (hi - lo);
        if avg * (hi - lo) * hits < 25.0 {
            continue;
        }
        let z = (hist.density[i] - avg) / hist.std_err[i];
        assert!(z.abs() < 5.0, "bin {i} [{lo:.4},{hi:.4}]: mc {} vs {avg} z {z:.2}", hist.density[i]);
        tested += 1;
    }
    assert!(tested >= 40, "only {tested} bins had enough mass to test");
}

#[test]
fn pair_densities_match_closed_forms() {
    let geom = make_octahedron(1.0).unwrap();
    let qcfg = QuadratureConfig::default();
    let c = cfg(1 << 21, 25);
    type Exact = fn(f64) -> octachord::Result<f64>;
    let classes: [(PairTag, Exact); 3] = [
        (PairTag::Edge, gamma2_edge),
        (PairTag::Vertex, gamma2_vertex),
        (PairTag::Parallel, gamma2_parallel),
    ];
    for (tag, exact) in classes {
        let hist = mc_pair_density(tag, &c, &geom).unwrap();
        let n = c.samples as f64;
        let mut worst = 0.0f64;
        let mut tested = 0;
        for i in 0..hist.density.len() {
            let (lo, hi) = (hist.bin_edges[i], hist.bin_edges[i + 1]);
            let avg = integrate(
                exact,
                &edges_within(&qcfg.panel_breakpoints, lo, hi),
                qcfg.nodes_per_panel,
            )
            .unwrap()
                / (hi - lo);
            // Deposit weights are O(A1/V); below ~50 expected deposits the
            // empirical standard error is unusable, so leave those bins to
            // the integral check.
            if avg * (hi - lo) * n < 25.0 {
                continue;
            }
            worst = worst.max(((hist.density[i] - avg) / hist.std_err[i]).abs());
            tested += 1;
        }
        assert!(worst < 5.0, "{tag}: worst |z| {worst:.2}");
        assert!(tested >= 8, "{tag}: only {tested} bins had enough mass");
        // Integral-level agreement, much tighter than any single bin.
        let total: f64 = hist
            .density
            .iter()
            .enumerate()
            .map(|(i, d)| d * (hist.bin_edges[i + 1] - hist.bin_edges[i]))
            .sum();
        let exact_total =
            integrate(exact, &qcfg.panel_breakpoints, qcfg.nodes_per_panel).unwrap();
        assert_relative_eq!(total, exact_total, max_relative = 2e-2);
    }
}

#[test]
fn parallel_class_is_empty_below_the_gap() {
    let geom = make_octahedron(1.0).unwrap();
    let c = cfg(1 << 20, 40);
    let hist = mc_pair_density(PairTag::Parallel, &c, &geom).unwrap();
    let h = geom.parallel_distance;
    for i in 0..hist.density.len() {
        if hist.bin_edges[i + 1] <= h + 1e-12 {
            assert_eq!(hist.density[i], 0.0, "bin {i} below h is populated");
        }
    }
}

#[test]
fn pair_density_is_deterministic() {
    let geom = make_octahedron(1.0).unwrap();
    let c = cfg(1 << 19, 30);
    let a = mc_pair_density(PairTag::Vertex, &c, &geom).unwrap();
    let pool2 = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    let b = pool2.install(|| mc_pair_density(PairTag::Vertex, &c, &geom).unwrap());
    assert_histograms_identical(&a, &b);
}

#[test]
fn interior_moments_pin_volume_and_gyration() {
    let geom = make_octahedron(1.0).unwrap();
    let c = cfg(1 << 22, 10);
    let (vol, m2) = interior_moments(&c, &geom).unwrap();
    let zv = (vol.value - SQRT_2 / 3.0) / vol.std_err;
    assert!(zv.abs() < 4.0, "volume {} z {zv:.2}", vol.value);
    let z2 = (m2.value - 0.15) / m2.std_err;
    assert!(z2.abs() < 4.0, "second moment {} z {z2:.2}", m2.value);
    // Quadratic scaling of the second moment with edge length; fresh seed so
    // the two estimates are statistically independent.
    let geom2 = make_octahedron(2.0).unwrap();
    let c2 = McConfig { seed: 43, ..c };
    let (_, m2_scaled) = interior_moments(&c2, &geom2).unwrap();
    let z = (m2_scaled.value - 4.0 * m2.value)
        / (16.0 * m2.std_err * m2.std_err + m2_scaled.std_err * m2_scaled.std_err).sqrt();
    assert!(z.abs() < 4.0, "scaled m2 {} vs 4x {}", m2_scaled.value, 4.0 * m2.value);
}

#[test]
fn degenerate_sampling_is_reported() {
    // With a single sample, some seed quickly produces a first draw outside
    // the solid (acceptance rate is pi/... ~ 1/3), which must surface as the
    // degenerate-sampling error rather than a NaN.
    let geom = make_octahedron(1.0).unwrap();
    let mut saw_degenerate = false;
    for seed in 0..12 {
        let c = McConfig { seed, samples: 1, bins: 4, r_max: SQRT_2 };
        match stick_gamma(0.5, &c, &geom) {
            Err(Error::DegenerateSampling) => {
                saw_degenerate = true;
                break;
            }
            Ok(_) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(saw_degenerate);
}
