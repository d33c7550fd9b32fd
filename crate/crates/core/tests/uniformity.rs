use std::collections::HashMap;

use chordstat_core::sampler::{
    deal_from_chords, enumerate_standard_deals, sample_chord_diagram, sample_deal_insertion,
    sample_deal_shuffle, standardize,
};
use chordstat_core::{Deal, RngStream};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DRAWS: usize = 1_000_000;
const ALPHA: f64 = 1e-3;

fn chi_square_uniform(n: usize, mut draw: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Deal, seed: u64) {
    let classes: Vec<Deal> = enumerate_standard_deals(n).unwrap().collect();
    let mut counts: HashMap<Deal, u64> = classes.iter().cloned().map(|d| (d, 0)).collect();
    let mut rng = RngStream::new(seed, n as u64).rng();
    for _ in 0..DRAWS {
        let d = draw(&mut rng);
        *counts.get_mut(&d).expect("non-standard deal") += 1;
    }
    let expected = DRAWS as f64 / classes.len() as f64;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let df = (classes.len() - 1) as f64;
    if df == 0.0 {
        assert_eq!(stat, 0.0);
        return;
    }
    let p = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    assert!(p > ALPHA, "n = {n}: chi2 = {stat:.2} on {df} df, p = {p:.2e}");
}

#[test]
fn shuffle_is_uniform_on_standard_deals() {
    for n in 1..=5 {
        chi_square_uniform(n, |rng| standardize(&sample_deal_shuffle(n, rng).unwrap()), 101);
    }
}

#[test]
fn insertion_is_uniform_on_standard_deals() {
    for n in 1..=5 {
        chi_square_uniform(n, |rng| sample_deal_insertion(n, rng).unwrap().0, 202);
    }
}

#[test]
fn random_matching_is_uniform_on_standard_deals() {
    for n in 1..=5 {
        chi_square_uniform(n, |rng| deal_from_chords(&sample_chord_diagram(n, rng).unwrap()), 303);
    }
}
