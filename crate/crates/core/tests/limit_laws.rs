use chordstat_core::harness::{ks_distance_2d, parallel_map, variance_with_error};
use chordstat_core::limits::{block_rate, joint_cdf_2, sigma_entry};
use chordstat_core::pagraph::{build_graph, degrees};
use chordstat_core::sampler::sample_chord_diagram;
use chordstat_core::urn::urn_simulate;
use chordstat_core::RngStream;

#[test]
fn first_two_degrees_follow_joint_limit() {
    let n = 10_000usize;
    let root = 2.0 * (n as f64).sqrt();
    let pts = parallel_map(20_000, None, |t| {
        let mut rng = RngStream::new(404, t as u64).rng();
        let g = build_graph(&sample_chord_diagram(n, &mut rng).unwrap());
        let d = degrees(&g);
        (d[0] as f64 / root, d[1] as f64 / root)
    })
    .unwrap();
    let ks = ks_distance_2d(&pts, joint_cdf_2).unwrap();
    assert!(ks <= 0.02, "2-d ks = {ks:.4}");
}

#[test]
fn urn_fluctuation_variances() {
    let n = 10_000u64;
    let root = (n as f64).sqrt();
    let runs = parallel_map(50_000, None, |t| {
        let mut rng = RngStream::new(505, t as u64).rng();
        let s = urn_simulate(n, &mut rng);
        (1..=3)
            .map(|i| (s.count(i) as f64 - block_rate(i as u64) * n as f64) / root)
            .collect::<Vec<_>>()
    })
    .unwrap();
    for i in 1..=3usize {
        let xs: Vec<f64> = runs.iter().map(|r| r[i - 1]).collect();
        let (var, _) = variance_with_error(&xs).unwrap();
        let target = sigma_entry(i as u64, i as u64);
        assert!((var - target).abs() <= 0.03, "i = {i}: {var:.4} vs {target:.4}");
    }
}
