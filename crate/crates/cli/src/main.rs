//! `chordstat`: simulation, exact tables and the acceptance suite from the
//! command line.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chordstat_core::exact::{
    a_table, factorial_moment_d1, mean_b_exact, p_first_match, ExactValue,
};
use chordstat_core::game::play;
use chordstat_core::harness::acceptance::{run_criterion, CriterionOutcome, CRITERIA};
use chordstat_core::harness::{
    chunked_moments, parallel_map, run_trials, variance_with_error, SamplerKind, Statistic,
    TrialPlan,
};
use chordstat_core::limits::{block_rate, named_constants, sigma_entry_exact, sigma_matrix};
use chordstat_core::pagraph::{build_graph, degree_histogram};
use chordstat_core::sampler::{
    blocks, enumerate_standard_deals, sample_chord_diagram, InsertionProcess,
};
use chordstat_core::urn::{urn_simulate, UrnState};
use chordstat_core::{BlockProfile, RngStream};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "chordstat",
    version,
    about = "Memory game, chord diagram and urn statistics"
)]
struct Cli {
    /// Number of card pairs (chords, urn draws).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of independent trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo estimates against their limits.
    Simulate {
        #[arg(long, default_value = "shuffle")]
        sampler: SamplerKind,
        /// Comma-separated statistics; `all` selects every one.
        #[arg(
            long,
            default_value = "mean_length,first_match_mean,lucky_mean,good_interval_mean"
        )]
        stats: String,
        /// Largest block length for the block statistics.
        #[arg(long, default_value_t = 4)]
        block_types: usize,
    },
    /// Exact finite-n laws as fractions.
    Exact {
        #[arg(long, value_enum, default_value_t = Law::FirstMatch)]
        law: Law,
    },
    /// Every standard deal with its game statistics (n <= 8).
    Enumerate,
    /// The urn with immigration.
    Urn {
        #[arg(long, value_enum, default_value_t = UrnReport::Counts)]
        report: UrnReport,
        /// Ball types reported.
        #[arg(long, default_value_t = 4)]
        types: usize,
    },
    /// A random preferential attachment graph.
    Graph {
        /// Also write the degree histogram as CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Runs the acceptance suite; exits nonzero if any criterion fails.
    Verify {
        /// Comma-separated criterion numbers; all by default.
        #[arg(long)]
        criteria: Option<String>,
    },
    /// Named limit constants and the block covariance matrix.
    Constants {
        /// Size of the leading block of the covariance matrix.
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Law {
    /// `P(D_{n,1} = t)`.
    FirstMatch,
    /// `E[(D_{n,1})_r]` for `r = 1..=n`.
    FactorialMoments,
    /// `E[B_{n,i}]` for `i = 1..=2n`.
    Blocks,
    /// Row `n` of the first-match count table `a(n, j)`.
    Counts,
}

impl Law {
    fn name(self) -> &'static str {
        match self {
            Self::FirstMatch => "first_match",
            Self::FactorialMoments => "factorial_moments",
            Self::Blocks => "blocks",
            Self::Counts => "counts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UrnReport {
    /// Final ball counts of every run.
    Counts,
    /// Mean and variance of `(count_i - rate_i n)/sqrt(n)` against the limit.
    Fluctuations,
    /// Urn replayed along insertion traces, compared with block counts.
    Coupling,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let (body, code) = match &cli.command {
        Command::Simulate {
            sampler,
            stats,
            block_types,
        } => (
            simulate(cli, *sampler, stats, *block_types)?,
            ExitCode::SUCCESS,
        ),
        Command::Exact { law } => (exact(cli, *law)?, ExitCode::SUCCESS),
        Command::Enumerate => (enumerate(cli)?, ExitCode::SUCCESS),
        Command::Urn { report, types } => (urn(cli, *report, *types)?, ExitCode::SUCCESS),
        Command::Graph { histogram } => (graph(cli, histogram.as_ref())?, ExitCode::SUCCESS),
        Command::Verify { criteria } => verify(cli, criteria.as_deref())?,
        Command::Constants { k } => (constants(*k)?, ExitCode::SUCCESS),
    };
    emit(cli, &body)?;
    Ok(code)
}

fn emit(cli: &Cli, body: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn simulate(cli: &Cli, sampler: SamplerKind, stats: &str, block_types: usize) -> Result<String> {
    let statistics: Vec<Statistic> = if stats == "all" {
        Statistic::ALL.to_vec()
    } else {
        stats
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<std::result::Result<_, _>>()?
    };
    let plan = TrialPlan::new(cli.n.unwrap_or(1000), cli.trials.unwrap_or(1000), cli.seed)
        .sampler(sampler)
        .statistics(&statistics)
        .block_types(block_types)
        .threads(cli.threads);
    let report = run_trials(&plan)?;
    Ok(match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    })
}

#[derive(Serialize)]
struct ExactOutput {
    n: u64,
    law: &'static str,
    values: Vec<ExactValue>,
}

fn exact(cli: &Cli, law: Law) -> Result<String> {
    let n = cli.n.unwrap_or(10) as u64;
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let values: Vec<ExactValue> = match law {
        Law::FirstMatch => (2..=n + 1)
            .map(|t| ExactValue::new(t, &p_first_match(n, t)))
            .collect(),
        Law::FactorialMoments => (1..=n)
            .map(|r| ExactValue::new(r, &factorial_moment_d1(n, r)))
            .collect(),
        Law::Blocks => (1..=2 * n)
            .map(|i| ExactValue::new(i, &mean_b_exact(n, i)))
            .collect(),
        Law::Counts => {
            let table = a_table(n as usize)?;
            table
                .row(n as usize)
                .map(|(j, v)| ExactValue {
                    index: j as u64,
                    numerator: v.to_string(),
                    denominator: "1".into(),
                })
                .collect()
        }
    };
    match cli.format {
        Format::Json => to_json(&ExactOutput {
            n,
            law: law.name(),
            values,
        }),
        Format::Csv => {
            let mut out = String::from("index,numerator,denominator\n");
            for v in values {
                writeln!(out, "{},{},{}", v.index, v.numerator, v.denominator)?;
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct EnumeratedDeal {
    labels: Vec<u32>,
    length: usize,
    lucky: usize,
    first_match: usize,
    blocks: Vec<usize>,
}

fn enumerate(cli: &Cli) -> Result<String> {
    let n = cli.n.unwrap_or(3);
    let rows: Vec<EnumeratedDeal> = enumerate_standard_deals(n)?
        .map(|d| {
            let g = play(&d);
            EnumeratedDeal {
                blocks: blocks(&d).lengths,
                labels: d.into_labels(),
                length: g.length,
                lucky: g.lucky,
                first_match: g.first_match,
            }
        })
        .collect();
    match cli.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("labels,length,lucky,first_match,blocks\n");
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    join(&r.labels, " "),
                    r.length,
                    r.lucky,
                    r.first_match,
                    join(&r.blocks, " ")
                )?;
            }
            Ok(out)
        }
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Serialize)]
struct Fluctuation {
    ball_type: usize,
    rate: f64,
    mean: f64,
    variance: f64,
    variance_std_error: f64,
    limit_variance: f64,
}

#[derive(Serialize)]
struct CouplingOutput {
    n: usize,
    trials: usize,
    prefixes_checked: u64,
    mismatches: u64,
}

fn urn(cli: &Cli, report: UrnReport, types: usize) -> Result<String> {
    let n = cli.n.unwrap_or(1000);
    let trials = cli.trials.unwrap_or(100);
    let seed = cli.seed;
    if n == 0 || trials == 0 || types == 0 {
        bail!("--n, --trials and --types must be positive");
    }
    match report {
        UrnReport::Counts => {
            let counts = parallel_map(trials, cli.threads, |t| {
                let s = urn_simulate(n as u64, &mut RngStream::new(seed, t as u64).rng());
                (0..=types).map(|i| s.count(i)).collect::<Vec<_>>()
            })?;
            match cli.format {
                Format::Json => to_json(&counts),
                Format::Csv => {
                    let mut out = String::from("trial");
                    for i in 0..=types {
                        write!(out, ",type_{i}")?;
                    }
                    out.push('\n');
                    for (t, row) in counts.iter().enumerate() {
                        writeln!(out, "{t},{}", join(row, ","))?;
                    }
                    Ok(out)
                }
            }
        }
        UrnReport::Fluctuations => {
            let root = (n as f64).sqrt();
            let runs = parallel_map(trials, cli.threads, |t| {
                let s = urn_simulate(n as u64, &mut RngStream::new(seed, t as u64).rng());
                (1..=types)
                    .map(|i| (s.count(i) as f64 - block_rate(i as u64) * n as f64) / root)
                    .collect::<Vec<_>>()
            })?;
            let sigma = sigma_matrix(types);
            let rows = (1..=types)
                .map(|i| {
                    let xs: Vec<f64> = runs.iter().map(|r| r[i - 1]).collect();
                    let mean = chunked_moments(xs.iter().copied()).mean;
                    let (variance, variance_std_error) = variance_with_error(&xs)?;
                    Ok(Fluctuation {
                        ball_type: i,
                        rate: block_rate(i as u64),
                        mean,
                        variance,
                        variance_std_error,
                        limit_variance: sigma[i - 1][i - 1],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match cli.format {
                Format::Json => to_json(&rows),
                Format::Csv => {
                    let mut out = String::from(
                        "ball_type,rate,mean,variance,variance_std_error,limit_variance\n",
                    );
                    for r in rows {
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            r.ball_type,
                            r.rate,
                            r.mean,
                            r.variance,
                            r.variance_std_error,
                            r.limit_variance
                        )?;
                    }
                    Ok(out)
                }
            }
        }
        UrnReport::Coupling => {
            let results = parallel_map(trials, cli.threads, |t| {
                let mut rng = RngStream::new(seed, t as u64).rng();
                let mut p = InsertionProcess::new(n, false);
                let mut state = UrnState::new();
                let mut bad = 0u64;
                for _ in 0..n {
                    state.apply(p.step(&mut rng));
                    let profile = BlockProfile::from_lengths(p.block_lengths().to_vec());
                    let top = profile.counts.len().max(state.counts().len());
                    if (1..top).any(|i| state.count(i) != profile.count(i)) {
                        bad += 1;
                    }
                }
                (n as u64, bad)
            })?;
            let mut out = CouplingOutput {
                n,
                trials,
                prefixes_checked: 0,
                mismatches: 0,
            };
            for (c, b) in results {
                out.prefixes_checked += c;
                out.mismatches += b;
            }
            match cli.format {
                Format::Json => to_json(&out),
                Format::Csv => Ok(format!(
                    "n,trials,prefixes_checked,mismatches\n{},{},{},{}\n",
                    out.n, out.trials, out.prefixes_checked, out.mismatches
                )),
            }
        }
    }
}

fn graph(cli: &Cli, histogram: Option<&PathBuf>) -> Result<String> {
    let n = cli.n.unwrap_or(20);
    let cd = sample_chord_diagram(n, &mut RngStream::new(cli.seed, 0).rng())?;
    let g = build_graph(&cd);
    if let Some(path) = histogram {
        let mut csv = String::from("degree,vertices\n");
        for (d, c) in degree_histogram(&g) {
            writeln!(csv, "{d},{c}")?;
        }
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    match cli.format {
        Format::Json => to_json(&serde_json::json!({
            "degrees": g.degrees,
            "edges": g.edges,
        })),
        Format::Csv => {
            let mut out = String::from("u,v\n");
            for (u, v) in &g.edges {
                writeln!(out, "{u},{v}")?;
            }
            Ok(out)
        }
    }
}

fn verify(cli: &Cli, criteria: Option<&str>) -> Result<(String, ExitCode)> {
    let ids: Vec<u8> = match criteria {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u8>()
                    .with_context(|| format!("bad criterion '{s}'"))
            })
            .collect::<Result<_>>()?,
        None => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let run = || {
        ids.iter()
            .map(|&id| run_criterion(id))
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes: Vec<CriterionOutcome> = match cli.threads {
        Some(k) => parallel_map(1, Some(k), |_| run())?.remove(0)?,
        None => run()?,
    };
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    let body = match cli.format {
        Format::Json => to_json(&outcomes)?,
        Format::Csv => {
            let mut out = String::from("criterion,pass,title,summary\n");
            for o in &outcomes {
                writeln!(
                    out,
                    "{},{},{},\"{}\"",
                    o.id,
                    o.pass,
                    o.title,
                    o.summary.replace('"', "'")
                )?;
            }
            out
        }
    };
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    eprintln!(
        "{} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    let code = if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    };
    Ok((body, code))
}

#[derive(Serialize)]
struct ConstantsOutput {
    constants: chordstat_core::limits::NamedConstants,
    sigma: Vec<Vec<f64>>,
    sigma_exact: Vec<Vec<String>>,
}

fn constants(k: usize) -> Result<String> {
    if k == 0 {
        bail!("--k must be positive");
    }
    let sigma_exact = (1..=k as u64)
        .map(|i| {
            (1..=k as u64)
                .map(|j| sigma_entry_exact(i, j).to_string())
                .collect()
        })
        .collect();
    to_json(&ConstantsOutput {
        constants: named_constants(),
        sigma: sigma_matrix(k),
        sigma_exact,
    })
}
