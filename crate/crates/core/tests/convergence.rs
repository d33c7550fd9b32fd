use chordstat_core::harness::{run_trials, SamplerKind, Statistic, TrialPlan};

fn entry(plan: &TrialPlan, name: &str) -> (f64, f64) {
    let report = run_trials(plan).unwrap();
    let e = report.entries.iter().find(|e| e.statistic == name).unwrap();
    (e.estimate, e.std_error)
}

#[test]
fn standard_errors_shrink_like_inverse_root_t() {
    let se: Vec<f64> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&t| {
            let plan = TrialPlan::new(200, t, 77).statistics(&[Statistic::MeanLength]);
            entry(&plan, "mean_length").1
        })
        .collect();
    let expected = 10f64.sqrt();
    for w in se.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio / expected - 1.0).abs() < 0.2, "se {se:?}");
    }
}

#[test]
fn first_match_ks_rate_stays_bounded() {
    for n in [100usize, 1_000, 10_000] {
        let plan = TrialPlan::new(n, 5_000, 91)
            .sampler(SamplerKind::Insertion)
            .statistics(&[Statistic::FirstMatchKs]);
        let (ks, _) = entry(&plan, "first_match_ks");
        let scaled = (n as f64).sqrt() * ks;
        assert!(scaled <= 10.0, "n = {n}: sqrt(n) * ks = {scaled:.3}");
    }
}
