use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use pcboot::detect::{
    default_grid, frequency_scan, infer_period, stationarity_diagnostic, ScanConfig, StationarityVerdict,
};
use pcboot::sim::{gen_iid, gen_par1, Par1Spec};

fn par1(n: usize, seed: u64) -> Vec<f64> {
    gen_par1(&Par1Spec {
        n,
        seed,
        ..Default::default()
    })
    .unwrap()
    .into_inner()
}

fn near_zero_or_two_thirds(l: f64) -> bool {
    l <= 0.15 || (l - TAU / 3.0).abs() <= 0.15
}

#[test]
fn iid_pointwise_rejection_fraction() {
    // 100-seed oracle: mean 0.2345, max 0.307.
    for s in 0..10u64 {
        let x = gen_iid(300, 1.0, 60_000 + s).unwrap().into_inner();
        let r = frequency_scan(&x, &ScanConfig::new(1, 30, 500, s)).unwrap();
        let nonzero = &r.points[1..];
        let frac = nonzero.iter().filter(|p| p.reject).count() as f64 / nonzero.len() as f64;
        assert!(frac <= 0.32, "seed {s}: {frac}");
    }
}

#[test]
fn par1_significant_frequencies_stay_in_windows() {
    for s in 0..10u64 {
        let r = frequency_scan(&par1(300, 70_000 + s), &ScanConfig::new(1, 30, 500, s)).unwrap();
        let sig = r.significant_lambdas();
        assert!(sig.iter().all(|&l| near_zero_or_two_thirds(l)), "seed {s}: {sig:?}");
    }
}

#[test]
fn long_par1_series_reveals_period_three() {
    for s in 0..3u64 {
        let r = frequency_scan(&par1(3000, 80_000 + s), &ScanConfig::new(1, 100, 500, s)).unwrap();
        let sig = r.significant_lambdas();
        assert!(sig.iter().any(|&l| (l - TAU / 3.0).abs() <= 0.15), "seed {s}: {sig:?}");
        assert!(sig.iter().all(|&l| near_zero_or_two_thirds(l)), "seed {s}: {sig:?}");
        assert_eq!(infer_period(&sig, 0.05, 12).unwrap(), Some(3));
    }
}

#[test]
fn long_par1_stationarity_verdict_flags_two_thirds() {
    let x = par1(3000, 81_000);
    let v = stationarity_diagnostic(&x, &[1], &ScanConfig::new(0, 100, 500, 1)).unwrap();
    let StationarityVerdict::SignificantFrequencies { by_tau } = v else {
        panic!("expected significant frequencies");
    };
    assert!(by_tau[&1].iter().any(|&l| (l - TAU / 3.0).abs() <= 0.15), "{by_tau:?}");
}

#[test]
fn iid_stationarity_verdict() {
    let quiet = (1..=10u64)
        .filter(|&s| {
            let x = gen_iid(600, 1.0, 1000 + s).unwrap().into_inner();
            stationarity_diagnostic(&x, &[0, 1, 2], &ScanConfig::new(0, 30, 500, s)).unwrap()
                == StationarityVerdict::NoEvidenceOfCyclostationarity
        })
        .count();
    assert!(quiet >= 8, "{quiet}/10");
}

#[test]
fn degenerate_inputs_have_no_evidence() {
    let zeros = vec![0.0; 300];
    let r = frequency_scan(&zeros, &ScanConfig::new(1, 30, 100, 0)).unwrap();
    assert!(r.rejected_lambdas().is_empty());
    assert_eq!(
        stationarity_diagnostic(&zeros, &[0, 1], &ScanConfig::new(0, 30, 100, 0)).unwrap(),
        StationarityVerdict::NoEvidenceOfCyclostationarity
    );
    let ones = vec![1.0; 300];
    let r = frequency_scan(&ones, &ScanConfig::new(1, 30, 100, 0)).unwrap();
    assert!(r.significant_lambdas().is_empty());
}

#[test]
fn parallel_scan_matches_single_thread() {
    let x = par1(300, 4);
    let config = ScanConfig::new(1, 30, 200, 9);
    let parallel = frequency_scan(&x, &config).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| frequency_scan(&x, &config).unwrap());
    assert_eq!(parallel, serial);
}

#[test]
fn wider_bands_reject_a_subset() {
    let x = par1(300, 6);
    let narrow = frequency_scan(&x, &ScanConfig::new(1, 30, 500, 2)).unwrap();
    let wide = frequency_scan(
        &x,
        &ScanConfig {
            alpha_lo: 0.025,
            alpha_hi: 0.975,
            ..ScanConfig::new(1, 30, 500, 2)
        },
    )
    .unwrap();
    for (n, w) in narrow.points.iter().zip(&wide.points) {
        assert!(!w.reject || n.reject, "λ={}", n.lambda);
    }
}

#[test]
fn full_circle_is_conjugate_mirror() {
    let r = frequency_scan(&par1(300, 2), &ScanConfig::new(1, 30, 50, 0)).unwrap();
    let circle = r.full_circle();
    assert_eq!(circle.len(), 2 * r.points.len() - 2);
    for p in &r.points {
        if p.lambda > 0.0 && p.lambda < PI {
            let mirror = TAU - p.lambda;
            let (_, z) = circle
                .iter()
                .find(|(l, _)| (l - mirror).abs() < 1e-12)
                .expect("mirror point present");
            assert!((z - p.estimate.conj()).norm() < 1e-10);
            let direct = pcboot::cyclic::cyclic_estimator(&par1(300, 2), mirror, 1).unwrap().value;
            assert!((direct - *z).norm() < 1e-10);
        }
    }
}

#[test]
fn tsv_has_header_and_one_row_per_point() {
    let r = frequency_scan(&par1(300, 1), &ScanConfig::new(1, 30, 50, 0)).unwrap();
    let mut buf = Vec::new();
    r.write_tsv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda\tre\tre_lo\tre_hi\tim\tim_lo\tim_hi\treject"
    );
    assert_eq!(lines.count(), r.points.len());
}

#[test]
fn default_grid_has_step_pi_over_150() {
    let g = default_grid(151).unwrap();
    assert_eq!(g[0], 0.0);
    assert_eq!(g[150], PI);
    assert!((g[1] - PI / 150.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn infer_period_ignores_order(
        ks in prop::collection::vec(0u32..6, 1..6),
        period in 1u32..8,
        jitter in prop::collection::vec(-0.01..0.01f64, 6),
        rot in 0usize..6,
    ) {
        let mut ls: Vec<f64> = ks
            .iter()
            .zip(&jitter)
            .map(|(&k, j)| (TAU * f64::from(k % period) / f64::from(period) + j).rem_euclid(TAU))
            .collect();
        let before = infer_period(&ls, 0.05, 12).unwrap();
        prop_assert!(before.is_some_and(|t| t <= period));
        let len = ls.len();
        ls.rotate_left(rot % len);
        ls.reverse();
        prop_assert_eq!(infer_period(&ls, 0.05, 12).unwrap(), before);
    }
}
