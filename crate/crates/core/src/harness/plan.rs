//! Trial plans, per-trial records and reports.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{
    chunked_moments, empirical_cov, empirical_cov_errors, empirical_pmf, ks_distance,
    ks_distance_2d, tv_distance, variance_with_error,
};
use crate::error::{Error, Result};
use crate::game::play;
use crate::limits::{
    block_rate, joint_cdf_2, named_constants, normal_cdf, poisson_ln2_pmf, sigma_entry,
    weibull2_cdf,
};
use crate::rng::RngStream;
use crate::sampler::{blocks, sample_deal_shuffle, InsertionProcess};
use crate::types::BlockProfile;

/// Environment variable overriding [`DEFAULT_MAX_WORK`].
pub const MAX_WORK_ENV: &str = "CHORDSTAT_MAX_WORK";

/// Default cap on `n * trials` for a single plan.
pub const DEFAULT_MAX_WORK: u128 = 2_000_000_000;

/// The active work budget, honoring [`MAX_WORK_ENV`].
pub fn work_budget() -> u128 {
    std::env::var(MAX_WORK_ENV)
        .ok()
        .and_then(|v| v.trim().replace('_', "").parse().ok())
        .unwrap_or(DEFAULT_MAX_WORK)
}

/// How each trial's deal is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Uniform shuffle of the `2n` cards.
    #[default]
    Shuffle,
    /// Sequential insertion; the card row is only built when a game is played.
    Insertion,
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffle" => Ok(Self::Shuffle),
            "insertion" => Ok(Self::Insertion),
            other => Err(Error::OutOfRange(format!("unknown sampler '{other}'"))),
        }
    }
}

/// A statistic the harness can estimate, with its limiting target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Mean of `G_n / n`.
    MeanLength,
    /// Variance of `(G_n - (3 - 2 ln 2) n) / sqrt(n)`.
    LengthVariance,
    /// KS distance of the self-standardized, dithered `G_n` to N(0, 1).
    LengthNormality,
    /// Mean of `D_{n,1} / (2 sqrt n)`.
    FirstMatchMean,
    /// KS distance of `D_{n,1} / (2 sqrt n)` to the Weibull(2) law.
    FirstMatchKs,
    /// 2-D KS distance of `(D_{n,1}, D_{n,2}) / (2 sqrt n)` to its joint limit.
    JointFirstKs,
    /// Mean of `L_n`.
    LuckyMean,
    /// Total variation distance of `L_n` to Poisson(ln 2).
    LuckyTv,
    /// Covariances of `(B_{n,i} - 4n/(i+2)_3) / sqrt(n)`.
    BlockCovariance,
    /// Mean of `B_{n,i} / n`.
    BlockFractions,
    /// Mean of `Y_n / n`.
    EvenBlockMean,
    /// Mean of `s / n`.
    GoodIntervalMean,
}

impl Statistic {
    pub const ALL: [Statistic; 12] = [
        Self::MeanLength,
        Self::LengthVariance,
        Self::LengthNormality,
        Self::FirstMatchMean,
        Self::FirstMatchKs,
        Self::JointFirstKs,
        Self::LuckyMean,
        Self::LuckyTv,
        Self::BlockCovariance,
        Self::BlockFractions,
        Self::EvenBlockMean,
        Self::GoodIntervalMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::MeanLength => "mean_length",
            Self::LengthVariance => "length_variance",
            Self::LengthNormality => "length_normality",
            Self::FirstMatchMean => "first_match_mean",
            Self::FirstMatchKs => "first_match_ks",
            Self::JointFirstKs => "joint_first_ks",
            Self::LuckyMean => "lucky_mean",
            Self::LuckyTv => "lucky_tv",
            Self::BlockCovariance => "block_covariance",
            Self::BlockFractions => "block_fractions",
            Self::EvenBlockMean => "even_block_mean",
            Self::GoodIntervalMean => "good_interval_mean",
        }
    }

    /// Acceptance tolerance for the statistic.
    pub fn tolerance(self) -> f64 {
        match self {
            Self::MeanLength | Self::LuckyMean | Self::GoodIntervalMean => 0.01,
            Self::BlockFractions | Self::EvenBlockMean => 0.01,
            Self::BlockCovariance => 0.03,
            _ => 0.02,
        }
    }

    fn needs_game(self) -> bool {
        matches!(
            self,
            Self::MeanLength
                | Self::LengthVariance
                | Self::LengthNormality
                | Self::LuckyMean
                | Self::LuckyTv
        )
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown statistic '{s}'")))
    }
}

/// A Monte Carlo experiment: `trials` independent deals of `n` pairs, trial
/// `t` driven by `RngStream::new(seed, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub statistics: Vec<Statistic>,
    /// Largest block length tracked by the block statistics.
    pub block_types: usize,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl TrialPlan {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            trials,
            seed,
            sampler: SamplerKind::Shuffle,
            statistics: vec![Statistic::MeanLength],
            block_types: 4,
            threads: None,
        }
    }

    pub fn sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn statistics(mut self, statistics: &[Statistic]) -> Self {
        self.statistics = statistics.to_vec();
        self
    }

    pub fn threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn block_types(mut self, block_types: usize) -> Self {
        self.block_types = block_types;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyDeal);
        }
        if self.trials == 0 {
            return Err(Error::OutOfRange("a plan needs at least one trial".into()));
        }
        let requested = self.n as u128 * self.trials as u128;
        let budget = work_budget();
        if requested > budget {
            return Err(Error::Budget { requested, budget });
        }
        Ok(())
    }
}

/// What one trial contributes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    /// `G_n`, when a game was played.
    pub length: Option<usize>,
    /// `L_n`, when a game was played.
    pub lucky: Option<usize>,
    pub first_match: usize,
    pub second_block: usize,
    pub even_blocks: u64,
    pub good: u64,
    /// `B_{n,i}` for `i = 1..=block_types`.
    pub block_counts: Vec<u64>,
    /// Uniform on `(-1/2, 1/2)`, drawn after the deal.
    pub dither: f64,
}

fn run_one(plan: &TrialPlan, trial: usize, needs_game: bool) -> TrialRecord {
    let mut rng = RngStream::new(plan.seed, trial as u64).rng();
    let n = plan.n;
    let (profile, good, game) = match plan.sampler {
        SamplerKind::Shuffle => {
            let deal = sample_deal_shuffle(n, &mut rng).expect("n >= 1 checked");
            let profile = blocks(&deal);
            let good = profile.good_intervals();
            (profile, good, needs_game.then(|| play(&deal)))
        }
        SamplerKind::Insertion => {
            let mut process = InsertionProcess::new(n, needs_game);
            for _ in 0..n {
                process.step(&mut rng);
            }
            let game = needs_game.then(|| play(&process.deal().expect("materialized row")));
            let profile = BlockProfile::from_lengths(process.block_lengths().to_vec());
            (profile, process.good_count(), game)
        }
    };
    TrialRecord {
        length: game.map(|g| g.length),
        lucky: game.map(|g| g.lucky),
        first_match: profile.lengths[0],
        second_block: profile.lengths.get(1).copied().unwrap_or(0),
        even_blocks: profile.even_blocks(),
        good,
        block_counts: (1..=plan.block_types).map(|i| profile.count(i)).collect(),
        dither: rng.gen::<f64>() - 0.5,
    }
}

/// Maps `f` over `0..count` on `threads` workers, keeping index order.
pub fn parallel_map<T: Send>(
    count: usize,
    threads: Option<usize>,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Result<Vec<T>> {
    let run = || (0..count).into_par_iter().map(&f).collect();
    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Runs every trial of the plan and returns the records in trial order.
pub fn run_records(plan: &TrialPlan) -> Result<Vec<TrialRecord>> {
    plan.validate()?;
    let needs_game = plan.statistics.iter().any(|s| s.needs_game());
    parallel_map(plan.trials, plan.threads, |t| run_one(plan, t, needs_game))
}

/// One estimated quantity against its target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub statistic: String,
    pub estimate: f64,
    /// Standard error of the estimate; for distances, the sampling scale
    /// `1/sqrt(T)`.
    pub std_error: f64,
    pub target: f64,
    pub tolerance: f64,
    /// Three standard errors.
    pub sampling_allowance: f64,
    /// What the tolerance leaves for finite-`n` bias.
    pub bias_allowance: f64,
    pub pass: bool,
}

impl ReportEntry {
    pub fn new(statistic: impl Into<String>, estimate: f64, std_error: f64, target: f64, tolerance: f64) -> Self {
        let sampling_allowance = 3.0 * std_error;
        Self {
            statistic: statistic.into(),
            estimate,
            std_error,
            target,
            tolerance,
            sampling_allowance,
            bias_allowance: tolerance - sampling_allowance,
            pass: (estimate - target).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub entries: Vec<ReportEntry>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "statistic,estimate,std_error,target,tolerance,sampling_allowance,bias_allowance,pass\n",
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                e.statistic,
                e.estimate,
                e.std_error,
                e.target,
                e.tolerance,
                e.sampling_allowance,
                e.bias_allowance,
                e.pass
            );
        }
        out
    }
}

fn mean_entry(name: &str, values: impl Iterator<Item = f64>, target: f64, tol: f64) -> ReportEntry {
    let m = chunked_moments(values);
    ReportEntry::new(name, m.mean, m.std_error(), target, tol)
}

/// Aggregates records into a report; depends only on the records' order.
pub fn summarize(plan: &TrialPlan, records: &[TrialRecord]) -> Result<Report> {
    let c = named_constants();
    let n = plan.n as f64;
    let root = n.sqrt();
    let t = records.len();
    let scale = 1.0 / (t as f64).sqrt();
    let mut entries = Vec::new();
    let lengths = || records.iter().filter_map(|r| r.length.map(|g| g as f64));
    for &st in &plan.statistics {
        let tol = st.tolerance();
        match st {
            Statistic::MeanLength => {
                entries.push(mean_entry(st.name(), lengths().map(|g| g / n), c.game_length_rate, tol));
            }
            Statistic::LengthVariance => {
                let xs: Vec<f64> = lengths().map(|g| (g - c.game_length_rate * n) / root).collect();
                let (var, se) = variance_with_error(&xs)?;
                entries.push(ReportEntry::new(st.name(), var, se, c.game_length_variance, tol));
            }
            Statistic::LengthNormality => {
                let xs: Vec<f64> = records
                    .iter()
                    .filter_map(|r| r.length.map(|g| g as f64 + r.dither))
                    .collect();
                let m = chunked_moments(xs.iter().copied());
                let sd = m.variance().sqrt();
                let z: Vec<f64> = xs.iter().map(|x| (x - m.mean) / sd).collect();
                let ks = ks_distance(&z, normal_cdf)?;
                entries.push(ReportEntry::new(st.name(), ks, scale, 0.0, tol));
            }
            Statistic::FirstMatchMean => {
                let xs = records.iter().map(|r| r.first_match as f64 / (2.0 * root));
                entries.push(mean_entry(st.name(), xs, c.first_match_mean, tol));
            }
            Statistic::FirstMatchKs => {
                let xs: Vec<f64> = records.iter().map(|r| r.first_match as f64 / (2.0 * root)).collect();
                let ks = ks_distance(&xs, weibull2_cdf)?;
                entries.push(ReportEntry::new(st.name(), ks, scale, 0.0, tol));
            }
            Statistic::JointFirstKs => {
                let pts: Vec<(f64, f64)> = records
                    .iter()
                    .map(|r| (r.first_match as f64 / (2.0 * root), r.second_block as f64 / (2.0 * root)))
                    .collect();
                let ks = ks_distance_2d(&pts, joint_cdf_2)?;
                entries.push(ReportEntry::new(st.name(), ks, scale, 0.0, tol));
            }
            Statistic::LuckyMean => {
                let xs = records.iter().filter_map(|r| r.lucky.map(|l| l as f64));
                entries.push(mean_entry(st.name(), xs, c.lucky_mean, tol));
            }
            Statistic::LuckyTv => {
                let ls: Vec<usize> = records.iter().filter_map(|r| r.lucky).collect();
                let p = empirical_pmf(&ls);
                let q: Vec<f64> = (0..p.len() as u64 + 20).map(poisson_ln2_pmf).collect();
                entries.push(ReportEntry::new(st.name(), tv_distance(&p, &q), scale, 0.0, tol));
            }
            Statistic::BlockCovariance => {
                let k = plan.block_types;
                let xs: Vec<Vec<f64>> = records
                    .iter()
                    .map(|r| {
                        (1..=k)
                            .map(|i| (r.block_counts[i - 1] as f64 - block_rate(i as u64) * n) / root)
                            .collect()
                    })
                    .collect();
                let cov = empirical_cov(&xs)?;
                let se = empirical_cov_errors(&xs)?;
                for i in 0..k {
                    for j in i..k {
                        entries.push(ReportEntry::new(
                            format!("block_cov_{}_{}", i + 1, j + 1),
                            cov[i][j],
                            se[i][j],
                            sigma_entry(i as u64 + 1, j as u64 + 1),
                            tol,
                        ));
                    }
                }
            }
            Statistic::BlockFractions => {
                for i in 1..=plan.block_types {
                    let xs = records.iter().map(|r| r.block_counts[i - 1] as f64 / n);
                    entries.push(mean_entry(&format!("block_fraction_{i}"), xs, block_rate(i as u64), tol));
                }
            }
            Statistic::EvenBlockMean => {
                let xs = records.iter().map(|r| r.even_blocks as f64 / n);
                entries.push(mean_entry(st.name(), xs, c.even_block_mean_rate, tol));
            }
            Statistic::GoodIntervalMean => {
                let xs = records.iter().map(|r| r.good as f64 / n);
                entries.push(mean_entry(st.name(), xs, c.good_interval_rate, tol));
            }
        }
    }
    Ok(Report {
        n: plan.n,
        trials: plan.trials,
        seed: plan.seed,
        sampler: plan.sampler,
        entries,
    })
}

/// Runs the plan and summarizes it.
pub fn run_trials(plan: &TrialPlan) -> Result<Report> {
    let records = run_records(plan)?;
    summarize(plan, &records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair_games() {
        let plan = TrialPlan::new(1, 10, 7).statistics(&[Statistic::MeanLength, Statistic::LuckyMean]);
        let records = run_records(&plan).unwrap();
        assert!(records.iter().all(|r| r.length == Some(1) && r.lucky == Some(1)));
        let report = summarize(&plan, &records).unwrap();
        assert_eq!(report.entries[0].estimate, 1.0);
        assert_eq!(report.entries[1].estimate, 1.0);
    }

    #[test]
    fn identical_plans_give_identical_json() {
        let plan = TrialPlan::new(50, 300, 99).statistics(&Statistic::ALL);
        let a = run_trials(&plan).unwrap().to_json();
        let b = run_trials(&plan).unwrap().to_json();
        assert_eq!(a, b);
        let serial = run_trials(&plan.clone().threads(Some(1))).unwrap().to_json();
        assert_eq!(a, serial);
    }

    #[test]
    fn insertion_and_shuffle_plans_run() {
        for sampler in [SamplerKind::Shuffle, SamplerKind::Insertion] {
            let plan = TrialPlan::new(30, 50, 1).sampler(sampler).statistics(&Statistic::ALL);
            let r = run_trials(&plan).unwrap();
            assert_eq!(r.sampler, sampler);
            assert!(r.entries.len() >= Statistic::ALL.len());
            let csv = r.to_csv();
            assert_eq!(csv.lines().count(), r.entries.len() + 1);
        }
    }

    #[test]
    fn trace_only_insertion_skips_games() {
        let plan = TrialPlan::new(40, 5, 3)
            .sampler(SamplerKind::Insertion)
            .statistics(&[Statistic::GoodIntervalMean]);
        let records = run_records(&plan).unwrap();
        assert!(records.iter().all(|r| r.length.is_none()));
    }

    #[test]
    fn budget_is_enforced() {
        let plan = TrialPlan::new(1_000_000, 1_000_000, 0);
        assert!(matches!(run_trials(&plan), Err(Error::Budget { .. })));
        assert!(run_trials(&TrialPlan::new(0, 5, 0)).is_err());
        assert!(run_trials(&TrialPlan::new(5, 0, 0)).is_err());
    }

    #[test]
    fn entry_pass_rule() {
        let e = ReportEntry::new("x", 1.04, 0.001, 1.0, 0.05);
        assert!(e.pass);
        assert!(!ReportEntry::new("x", 1.06, 0.001, 1.0, 0.05).pass);
        assert!((e.bias_allowance - 0.047).abs() < 1e-12);
    }

    #[test]
    fn statistic_names_round_trip() {
        for st in Statistic::ALL {
            assert_eq!(st.name().parse::<Statistic>().unwrap(), st);
        }
        assert!("nope".parse::<Statistic>().is_err());
        assert_eq!("insertion".parse::<SamplerKind>().unwrap(), SamplerKind::Insertion);
    }
}
