use an_wiretap::analytic::{
    cdf_snr_bob, cdf_snr_eve, connection_outage, connection_outage_quadrature, evaluate, evaluate_asymptotic,
    inv_snr_bob, inv_snr_eve, pco_asym, pdf_snr_bob, pdf_snr_eve, perfect_secrecy_alpha, secrecy_outage,
    snr_bob, snr_eve, TxDesign,
};
use an_wiretap::channel::{sample_gain, RngSpec, SystemParams};
use an_wiretap::quad::{integrate, QuadOptions};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

prop_compose! {
    fn arb_params()(pa in -10.0..30.0f64, pb in -10.0..30.0f64, sa in -30.0..10.0f64,
                    sb in -30.0..10.0f64, se in -30.0..10.0f64,
                    gab in 0.2..5.0f64, gae in 0.2..5.0f64) -> SystemParams {
        SystemParams::new(db(pa), db(pb), db(sa), db(sb), db(se)).with_gains(gab, gae)
    }
}

prop_compose! {
    fn arb_design()(alpha in 0.01..=1.0f64, r_s in 0.05..4.0f64, gap in 0.0..4.0f64) -> TxDesign {
        TxDesign::new(alpha, r_s + gap, r_s).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bob_map_round_trips(p in arb_params(), d in arb_design(), g in 1e-4..50.0f64) {
        let gamma = snr_bob(g, &p, &d).unwrap();
        let back = inv_snr_bob(gamma, &p, &d).unwrap();
        prop_assert!((back - g).abs() <= 1e-9 * g.max(1.0), "{g} -> {gamma} -> {back}");
    }

    #[test]
    fn eve_map_round_trips(p in arb_params(), d in arb_design(), g in 1e-4..50.0f64) {
        let gamma = snr_eve(g, &p, &d).unwrap();
        let back = inv_snr_eve(gamma, &p, &d).unwrap();
        // Near the SNR ceiling the inverse is ill-conditioned.
        let margin = d.alpha - (1.0 - d.alpha) * gamma;
        prop_assume!(margin > 1e-6 * d.alpha);
        prop_assert!((back - g).abs() <= 1e-8 * g.max(1.0), "{g} -> {gamma} -> {back}");
    }

    #[test]
    fn connection_outage_routes_agree(p in arb_params(), d in arb_design()) {
        let closed = connection_outage(&p, &d).unwrap();
        let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 10_000 };
        let integral = connection_outage_quadrature(&p, &d, &opts).unwrap();
        prop_assert!((closed - integral).abs() < 1e-8, "closed {closed}, quadrature {integral}");
    }

    #[test]
    fn bob_cdf_derivative_matches_pdf(p in arb_params(), d in arb_design(), g in 0.05..5.0f64) {
        let gamma = snr_bob(g * p.gbar_ab, &p, &d).unwrap();
        let h = 1e-5 * gamma;
        let slope = (cdf_snr_bob(gamma + h, &p, &d).unwrap() - cdf_snr_bob(gamma - h, &p, &d).unwrap()) / (2.0 * h);
        let pdf = pdf_snr_bob(gamma, &p, &d).unwrap();
        prop_assert!((slope - pdf).abs() <= 1e-5 * pdf.max(1e-3 / gamma), "slope {slope} pdf {pdf}");
    }

    #[test]
    fn eve_cdf_derivative_matches_pdf(p in arb_params(), d in arb_design(), frac in 0.01..0.9f64) {
        prop_assume!(d.alpha < 1.0);
        let gamma = frac * d.alpha / (1.0 - d.alpha);
        let h = 1e-6 * gamma;
        let slope = (cdf_snr_eve(gamma + h, &p, &d).unwrap() - cdf_snr_eve(gamma - h, &p, &d).unwrap()) / (2.0 * h);
        let pdf = pdf_snr_eve(gamma, &p, &d).unwrap();
        prop_assert!((slope - pdf).abs() <= 1e-5 * pdf.max(1e-3 / gamma), "slope {slope} pdf {pdf}");
    }

    #[test]
    fn more_signal_power_trades_secrecy_for_reliability(p in arb_params(), r_s in 0.1..3.0f64,
                                                        gap in 0.0..3.0f64, a in 0.01..0.99f64) {
        let lo = TxDesign::new(a, r_s + gap, r_s).unwrap();
        let hi = TxDesign::new((a + 0.01).min(1.0), r_s + gap, r_s).unwrap();
        prop_assert!(secrecy_outage(&p, &hi).unwrap() >= secrecy_outage(&p, &lo).unwrap());
        prop_assert!(connection_outage(&p, &hi).unwrap() <= connection_outage(&p, &lo).unwrap());
    }

    #[test]
    fn perfect_secrecy_boundary(pa in 0.0..30.0f64, se in -30.0..0.0f64, r_s in 0.1..3.0f64, gap in 0.05..3.0f64) {
        let p = SystemParams::new(db(pa), 1.0, 0.1, 0.1, db(se));
        let floor = perfect_secrecy_alpha(r_s + gap, r_s);
        for a in [floor, 0.5 * floor, floor * (1.0 - 1e-12)] {
            let d = TxDesign::new(a, r_s + gap, r_s).unwrap();
            prop_assert_eq!(secrecy_outage(&p, &d).unwrap(), 0.0);
        }
        let above = (floor + 0.05).min(1.0);
        let d = TxDesign::new(above, r_s + gap, r_s).unwrap();
        prop_assert!(secrecy_outage(&p, &d).unwrap() > 0.0);
    }

    #[test]
    fn outages_are_probabilities(p in arb_params(), d in arb_design()) {
        let r = evaluate(&p, &d).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_so));
        prop_assert!((0.0..=1.0).contains(&r.p_co));
        prop_assert!(r.eta >= 0.0 && r.eta <= d.r_s / 2.0);
    }
}

#[test]
fn asymptotic_connection_outage_is_the_noiseless_limit() {
    let d = TxDesign::new(0.6, 2.0, 1.0).unwrap();
    let base = SystemParams::new(10.0, 10.0, 0.0, 0.1, 0.1);
    let limit = pco_asym(&base, &d).unwrap();
    let mut prev = f64::INFINITY;
    for sa in [1e-1, 1e-2, 1e-3, 1e-5, 1e-8] {
        let mut p = base;
        p.sigma2_a = sa;
        let gap = (connection_outage(&p, &d).unwrap() - limit).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-8);
    assert_eq!(evaluate(&base, &d).unwrap().p_co, evaluate_asymptotic(&base, &d).unwrap().p_co);
}

#[test]
fn pdfs_integrate_to_one() {
    let p = SystemParams::new(10.0, 5.0, 0.3, 0.1, 0.2);
    let d = TxDesign::new(0.7, 2.0, 1.0).unwrap();
    let o = QuadOptions::default();
    let bob = an_wiretap::quad::integrate_to_infinity(|g| pdf_snr_bob(g, &p, &d).unwrap(), 0.0, &o).unwrap();
    assert!((bob.value - 1.0).abs() < 1e-7, "{}", bob.value);
    let ceiling = d.alpha / (1.0 - d.alpha);
    let eve = integrate(|g| pdf_snr_eve(g, &p, &d).unwrap(), 0.0, ceiling, &o).unwrap();
    assert!((eve.value - 1.0).abs() < 1e-7, "{}", eve.value);
}

// Sampled SNRs against expected counts from integrating the densities over
// fixed bins.
fn chi_square_against_pdf(samples: &[f64], edges: &[f64], pdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = samples.len() as f64;
    let k = edges.len() - 1;
    let mut counts = vec![0u64; k + 1];
    for &s in samples {
        let i = edges.partition_point(|&e| e <= s);
        counts[(i.max(1) - 1).min(k)] += 1;
    }
    let o = QuadOptions::default();
    let mut chi2 = 0.0;
    let mut covered = 0.0;
    for i in 0..k {
        let prob = integrate(&pdf, edges[i], edges[i + 1], &o).unwrap().value;
        covered += prob;
        let e = n * prob;
        chi2 += (counts[i] as f64 - e).powi(2) / e;
    }
    // Tail beyond the last edge.
    let e = n * (1.0 - covered);
    chi2 += (counts[k] as f64 - e).powi(2) / e;
    (chi2, ChiSquared::new(k as f64).unwrap().inverse_cdf(0.999))
}

#[test]
fn sampled_bob_snr_matches_density() {
    let p = SystemParams::new(10.0, 5.0, 0.3, 0.1, 0.2);
    let d = TxDesign::new(0.7, 2.0, 1.0).unwrap();
    let mut rng = RngSpec::new(5, 1).unwrap().stream(0);
    let samples: Vec<f64> = (0..200_000)
        .map(|_| snr_bob(sample_gain(p.gbar_ab, &mut rng).unwrap(), &p, &d).unwrap())
        .collect();
    let edges: Vec<f64> = (0..=30).map(|i| i as f64 * 2.0).collect();
    let (chi2, crit) = chi_square_against_pdf(&samples, &edges, |g| pdf_snr_bob(g, &p, &d).unwrap());
    assert!(chi2 < crit, "chi2 {chi2} vs {crit}");
}

#[test]
fn sampled_eve_snr_matches_density() {
    let p = SystemParams::new(10.0, 5.0, 0.3, 0.1, 0.2).with_gains(1.0, 0.5);
    let d = TxDesign::new(0.7, 2.0, 1.0).unwrap();
    let mut rng = RngSpec::new(6, 1).unwrap().stream(0);
    let samples: Vec<f64> = (0..200_000)
        .map(|_| snr_eve(sample_gain(p.gbar_ae, &mut rng).unwrap(), &p, &d).unwrap())
        .collect();
    let ceiling = d.alpha / (1.0 - d.alpha);
    let edges: Vec<f64> = (0..=30).map(|i| ceiling * i as f64 / 31.0).collect();
    let (chi2, crit) = chi_square_against_pdf(&samples, &edges, |g| pdf_snr_eve(g, &p, &d).unwrap());
    assert!(chi2 < crit, "chi2 {chi2} vs {crit}");
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(TxDesign::new(0.0, 2.0, 1.0).is_err());
    assert!(TxDesign::new(1.1, 2.0, 1.0).is_err());
    assert!(TxDesign::new(0.5, 0.5, 1.0).is_err());
    let d = TxDesign::new(0.5, 2.0, 1.0).unwrap();
    let mut p = SystemParams::new(1.0, 1.0, 0.1, 0.1, 0.1);
    p.p_a = -1.0;
    assert!(secrecy_outage(&p, &d).is_err());
    assert!(cdf_snr_bob(-1.0, &SystemParams::new(1.0, 1.0, 0.1, 0.1, 0.1), &d).unwrap() == 0.0);
}
