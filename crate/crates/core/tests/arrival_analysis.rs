use ciot_core::arrival::{
    erlang_cdf, falpha_system_curve, ks_distance, lambda_beta, ConditionalAlphaCdf, KsReport,
};
use ciot_core::traffic::{generate_requests, HazardGrid, SourcePopulation, TrafficParams};
use statrs::distribution::{ContinuousCDF, Erlang};

#[test]
fn erlang_cdf_matches_statrs() {
    for z in [1u32, 2, 5, 20, 100] {
        let dist = Erlang::new(z as u64, 3.5).unwrap();
        for i in 0..200 {
            let tau = i as f64 * 0.1;
            let ours = erlang_cdf(z, 3.5, tau);
            assert!((ours - dist.cdf(tau)).abs() < 1e-12, "z={z} tau={tau}");
        }
    }
}

#[test]
fn few_groups_fit_worse_than_many() {
    let params = TrafficParams::new(10.0, 1e-4).unwrap();
    let ks_for = |groups: usize| {
        let pop = SourcePopulation::uniform(50, groups, 10.0, 3).unwrap();
        let lambda = lambda_beta(pop.total_sources(), 10.0, params.tx_probability());
        let horizon = (4e4 / lambda).max(10.0);
        let s = generate_requests(&pop, &params, horizon, 3).unwrap();
        ks_distance(&s.gaps(), |x| -(-lambda * x).exp_m1()).unwrap()
    };
    let one = ks_for(1);
    let ten = ks_for(10);
    assert!(one > ten, "1 group {one:.4} vs 10 groups {ten:.4}");
}

#[test]
fn deterministic_stream_is_rejected() {
    let gaps: Vec<f64> = vec![0.1; 1_000];
    let r = KsReport::new(&gaps, |x| -(-10.0 * x).exp_m1()).unwrap();
    assert!(!r.pass_1pct());
    assert!(r.significant);
}

#[test]
fn first_alarm_cdf_against_generated_sources() {
    // Empirical first-alarm lag after a reference slot, across independent
    // single-group runs, against the exact discrete CDF.
    let params = TrafficParams::new(1.0, 1e-3).unwrap().with_tx_probability(1.0).unwrap();
    let grid = HazardGrid::beta(&params).unwrap();
    let pop = SourcePopulation::new(4, vec![0.0, 0.25], 1.0).unwrap();
    let reference = 300u64;
    let curve = falpha_system_curve(1_000, reference, &pop, &params, &grid).unwrap();
    let cond = ConditionalAlphaCdf::system(reference, 1_000, &pop, &params, &grid).unwrap();
    assert_eq!(cond.values, curve);

    let runs = 4_000;
    let mut lags = Vec::with_capacity(runs);
    for seed in 0..runs as u64 {
        let s = generate_requests(&pop, &params, 3.0, seed).unwrap();
        // periods after the first are stationary; look from slot 300 of period 1
        let t0 = 1.0 + reference as f64 * 1e-3;
        let first = s.timestamps().find(|&t| t > t0 + 1e-9);
        if let Some(first) = first {
            lags.push(first - t0);
        }
    }
    let d = ks_distance(&lags, |tau| cond.at_time(tau)).unwrap();
    assert!(d < 1.63 / (lags.len() as f64).sqrt(), "KS {d:.4} over {}", lags.len());
}
