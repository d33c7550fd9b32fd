//! Estimators and distributional distances.

use serde::Serialize;

use crate::error::{Error, Result};

/// Streaming mean and variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two accumulators as if their samples had been pushed in order.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Self {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Accumulates values in fixed-size chunks merged left to right, so the
/// result depends only on the order of the input.
pub fn chunked_moments(values: impl IntoIterator<Item = f64>) -> Moments {
    const CHUNK: usize = 1024;
    let mut total = Moments::default();
    let mut chunk = Moments::default();
    let mut filled = 0;
    for x in values {
        chunk.push(x);
        filled += 1;
        if filled == CHUNK {
            total = total.merge(&chunk);
            chunk = Moments::default();
            filled = 0;
        }
    }
    total.merge(&chunk)
}

/// Sample variance with the standard error of the variance estimate,
/// `sqrt((m4 - s^4) / T)`.
pub fn variance_with_error(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: values.len(),
        });
    }
    let m = chunked_moments(values.iter().copied());
    let var = m.variance();
    let m4 = chunked_moments(values.iter().map(|&x| (x - m.mean).powi(4))).mean;
    let se = ((m4 - var * var).max(0.0) / values.len() as f64).sqrt();
    Ok((var, se))
}

/// `sup_i |F_T(x_i) - F(x_i)|` over the sample points, with the
/// right-continuous empirical distribution function `F_T`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let t = xs.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let ecdf = (j + 1) as f64 / t;
        worst = worst.max((ecdf - cdf(xs[i])).abs());
        i = j + 1;
    }
    Ok(worst)
}

/// Two-dimensional analogue of [`ks_distance`]: the largest
/// `|F_T(x_i, y_i) - F(x_i, y_i)|` over the sample points, where
/// `F_T(x, y)` is the fraction of samples with both coordinates at most
/// `(x, y)`. Runs in `O(T log T)`.
pub fn ks_distance_2d(samples: &[(f64, f64)], cdf: impl Fn(f64, f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let t = samples.len();
    let mut ys: Vec<f64> = samples.iter().map(|p| p.1).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let rank = |y: f64| ys.partition_point(|&v| v < y);

    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| samples[a].0.total_cmp(&samples[b].0));

    let mut tree = vec![0u64; ys.len() + 1];
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < t {
        let x = samples[order[i]].0;
        let mut j = i;
        while j < t && samples[order[j]].0 == x {
            let mut k = rank(samples[order[j]].1) + 1;
            while k < tree.len() {
                tree[k] += 1;
                k += k & k.wrapping_neg();
            }
            j += 1;
        }
        for &idx in &order[i..j] {
            let y = samples[idx].1;
            let mut k = rank(y) + 1;
            let mut below = 0;
            while k > 0 {
                below += tree[k];
                k &= k - 1;
            }
            let ecdf = below as f64 / t as f64;
            worst = worst.max((ecdf - cdf(x, y)).abs());
        }
        i = j;
    }
    Ok(worst)
}

/// Empirical probability mass function of nonnegative integer samples.
pub fn empirical_pmf(values: &[usize]) -> Vec<f64> {
    let max = values.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for &v in values {
        counts[v] += 1;
    }
    let t = values.len().max(1) as f64;
    counts.into_iter().map(|c| c as f64 / t).collect()
}

/// `(1/2) sum_k |p_k - q_k|`, treating missing entries as zero mass.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|k| (at(p, k) - at(q, k)).abs()).sum::<f64>()
}

/// Unbiased sample covariance matrix of vector samples of equal length.
pub fn empirical_cov(samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let d = samples[0].len();
    if samples.iter().any(|s| s.len() != d) {
        return Err(Error::OutOfRange("samples differ in dimension".into()));
    }
    let t = samples.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|k| samples.iter().map(|s| s[k]).sum::<f64>() / t)
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for s in samples {
        for a in 0..d {
            let da = s[a] - mean[a];
            for b in a..d {
                cov[a][b] += da * (s[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            cov[a][b] /= t - 1.0;
            cov[b][a] = cov[a][b];
        }
    }
    Ok(cov)
}

/// Standard errors of the entries of [`empirical_cov`], estimated from the
/// spread of the centered cross products.
pub fn empirical_cov_errors(samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let cov = empirical_cov(samples)?;
    let d = cov.len();
    let t = samples.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|k| samples.iter().map(|s| s[k]).sum::<f64>() / t)
        .collect();
    let mut se = vec![vec![0.0; d]; d];
    for a in 0..d {
        for b in a..d {
            let spread = samples
                .iter()
                .map(|s| ((s[a] - mean[a]) * (s[b] - mean[b]) - cov[a][b]).powi(2))
                .sum::<f64>()
                / (t - 1.0);
            se[a][b] = (spread / t).sqrt();
            se[b][a] = se[a][b];
        }
    }
    Ok(se)
}
