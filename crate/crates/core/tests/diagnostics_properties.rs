use proptest::prelude::*;
use qhmc_core::diagnostics::{autocorrelation, iat, iat_with, summarize, IatOptions, K_MAX};
use qhmc_core::sampler::ChainOutput;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let innovation = (1.0 - rho * rho).sqrt();
    let mut y = Vec::with_capacity(n);
    let mut prev: f64 = StandardNormal.sample(&mut rng);
    for _ in 0..n {
        y.push(prev);
        let e: f64 = StandardNormal.sample(&mut rng);
        prev = rho * prev + innovation * e;
    }
    y
}

fn chain_from(series: &[f64]) -> ChainOutput {
    let n = series.len();
    ChainOutput {
        dim: 1,
        samples: series.iter().map(|v| vec![*v]).collect(),
        accepted: vec![true; n],
        diverged: vec![false; n],
        h_init_trace: vec![0.0; n],
        h_final_trace: vec![0.0; n],
        log_jacobian_trace: vec![0.0; n],
        potential_trace: vec![0.0; n],
        burn_in: 0,
        wall_time: 1.0,
        final_dt: 0.1,
    }
}

#[test]
fn ar1_iat_oracle() {
    for (k, rho) in [0.3, 0.5, 0.9].into_iter().enumerate() {
        let y = ar1(rho, 1_000_000, 20 + k as u64);
        let tau = iat(&autocorrelation(&y, K_MAX).unwrap());
        let exact = (1.0 + rho) / (1.0 - rho);
        assert!((tau - exact).abs() / exact <= 0.1, "rho={rho}: {tau} vs {exact}");
    }
}

#[test]
fn iid_iat_is_near_one() {
    let opts = IatOptions { truncate_at_first_negative: true, ..IatOptions::default() };
    for seed in 0..10 {
        let y = ar1(0.0, 100_000, seed);
        let tau = iat_with(&autocorrelation(&y, K_MAX).unwrap(), &opts);
        assert!((0.8..=1.2).contains(&tau), "{tau}");
    }
}

#[test]
fn iid_iat_full_window_spread_matches_its_standard_error() {
    // the untruncated 500-lag sum has standard deviation ~ 2 sqrt(500 / N)
    let sd = 2.0 * (K_MAX as f64 / 100_000.0).sqrt();
    for seed in 0..10 {
        let y = ar1(0.0, 100_000, seed);
        let tau = iat(&autocorrelation(&y, K_MAX).unwrap());
        assert!((tau - 1.0).abs() <= 4.0 * sd, "{tau}");
    }
}

#[test]
fn ess_times_iat_is_n() {
    let y = ar1(0.7, 20_000, 5);
    let report = summarize(&chain_from(&y), 0, 2.0, 0).unwrap();
    assert!(report.valid);
    let (ess, tau) = (report.ess.unwrap(), report.iat.unwrap());
    assert!((ess * tau - 20_000.0).abs() <= 1e-9 * 20_000.0);
    assert_eq!(report.ess_per_second.unwrap(), ess / 2.0);
}

#[test]
fn positively_correlated_iat_is_at_least_one() {
    let y = ar1(0.6, 50_000, 8);
    let acf = autocorrelation(&y, K_MAX).unwrap();
    if acf.iter().all(|r| *r >= 0.0) {
        assert!(iat(&acf) >= 1.0 - 2.0 * K_MAX as f64 * f64::EPSILON);
    }
    assert!(iat(&acf) >= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn acf_is_shift_and_scale_invariant(seed in 0u64..1000, a in prop_oneof![-50.0..-0.01f64, 0.01..50.0f64], b in -100.0..100.0f64) {
        let y = ar1(0.5, 2_000, seed);
        let z: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let r1 = autocorrelation(&y, 50).unwrap();
        let r2 = autocorrelation(&z, 50).unwrap();
        for (u, v) in r1.iter().zip(&r2) {
            prop_assert!((u - v).abs() <= 1e-12, "{} vs {}", u, v);
        }
    }
}
