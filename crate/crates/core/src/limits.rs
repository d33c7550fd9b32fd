//! Limit laws, the block covariance matrix and the named constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::erf::erf;

use crate::combinatorics::{binomial, factorial, falling_factorial};

const LN2: f64 = std::f64::consts::LN_2;

/// Truncation index for the series checks.
pub const SERIES_TERMS: u64 = 2000;

/// Density `2x e^{-x^2}` of the Weibull law with shape 2.
pub fn weibull2_pdf(x: f64) -> f64 {
    if x > 0.0 {
        2.0 * x * (-x * x).exp()
    } else {
        0.0
    }
}

/// Distribution function `1 - e^{-x^2}`.
pub fn weibull2_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x * x).exp_m1()
    } else {
        0.0
    }
}

/// Joint density of the first `k` scaled block lengths,
/// `2^k x_1 (x_1+x_2) ... (x_1+...+x_k) e^{-(x_1+...+x_k)^2}` on the
/// nonnegative orthant.
pub fn joint_density_k(xs: &[f64]) -> f64 {
    if xs.is_empty() || xs.iter().any(|&x| x < 0.0) {
        return 0.0;
    }
    let mut partial = 0.0;
    let mut product = 1.0;
    for &x in xs {
        partial += x;
        product *= 2.0 * partial;
    }
    product * (-partial * partial).exp()
}

/// Joint distribution function of `(X_1, X_2)`:
/// `1 - e^{-a^2} - e^{-b^2} + e^{-(a+b)^2} + b sqrt(pi) (erf(a+b) - erf(b))`.
pub fn joint_cdf_2(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let s = a + b;
    let value = 1.0 - (-a * a).exp() - (-b * b).exp()
        + (-s * s).exp()
        + b * std::f64::consts::PI.sqrt() * (erf(s) - erf(b));
    value.clamp(0.0, 1.0)
}

/// `(x)_m` as a float.
fn fall(x: f64, m: u32) -> f64 {
    (0..m).map(|j| x - j as f64).product()
}

/// Entry of the limiting covariance of `(B_{n,i} - 4n/(i+2)_3)/sqrt(n)`;
/// zero if either index is 0.
pub fn sigma_entry(i: u64, j: u64) -> f64 {
    if i == 0 || j == 0 {
        return 0.0;
    }
    let (fi, fj) = (i as f64, j as f64);
    let ri = fall(fi + 2.0, 3);
    let rj = fall(fj + 2.0, 3);
    if i == j {
        4.0 / rj + 16.0 / (rj * rj) - 24.0 / fall(2.0 * fj + 2.0, 4)
    } else {
        16.0 / (ri * rj) - 24.0 / fall(fi + fj + 2.0, 4)
    }
}

/// [`sigma_entry`] in exact rationals.
pub fn sigma_entry_exact(i: u64, j: u64) -> BigRational {
    if i == 0 || j == 0 {
        return BigRational::zero();
    }
    let ri = falling_factorial(i as i64 + 2, 3);
    let rj = falling_factorial(j as i64 + 2, 3);
    let q = |num: i64, den: BigInt| BigRational::new(BigInt::from(num), den);
    if i == j {
        q(4, rj.clone()) + q(16, &rj * &rj) - q(24, falling_factorial(2 * j as i64 + 2, 4))
    } else {
        q(16, ri * rj) - q(24, falling_factorial((i + j) as i64 + 2, 4))
    }
}

/// The alternating double sum
/// `2 sum_{k<i} sum_{l<j} (-1)^{k+l}/(k+l+4) C(i-1,k) C(j-1,l)
/// (2(k+l+4)!/((k+3)!(l+3)!) - 1 - (k+1)(l+1)/((k+3)(l+3)))`
/// evaluated exactly.
pub fn sigma_entry_doublesum_exact(i: u64, j: u64) -> BigRational {
    if i == 0 || j == 0 {
        return BigRational::zero();
    }
    let mut acc = BigRational::zero();
    for k in 0..i {
        for l in 0..j {
            let inner = BigRational::new(
                factorial(k + l + 4) * 2,
                factorial(k + 3) * factorial(l + 3),
            ) - BigRational::from_integer(BigInt::from(1))
                - BigRational::new(
                    BigInt::from((k + 1) * (l + 1)),
                    BigInt::from((k + 3) * (l + 3)),
                );
            let weight = BigRational::new(
                binomial(i as i64 - 1, k as i64) * binomial(j as i64 - 1, l as i64),
                BigInt::from(k + l + 4),
            );
            let term = weight * inner;
            if (k + l) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    acc * BigInt::from(2)
}

/// Double-sum form of the covariance entry, rounded to `f64`.
pub fn sigma_entry_doublesum(i: u64, j: u64) -> f64 {
    sigma_entry_doublesum_exact(i, j).to_f64().unwrap_or(f64::NAN)
}

/// Leading `k x k` block of the covariance matrix, indices `1..=k`.
pub fn sigma_matrix(k: usize) -> Vec<Vec<f64>> {
    (1..=k as u64)
        .map(|i| (1..=k as u64).map(|j| sigma_entry(i, j)).collect())
        .collect()
}

/// The even-block variance constant as stated, `(4 ln 2)^2 + 8 ln 2 - 13`.
pub fn sigma_sq_even() -> f64 {
    (4.0 * LN2).powi(2) + 8.0 * LN2 - 13.0
}

/// `var(sum_i W_{2i})` implied by the covariance matrix,
/// `16 ln^2 2 - 8 ln 2 - 2`.
pub fn sigma_sq_even_from_covariance() -> f64 {
    16.0 * LN2 * LN2 - 8.0 * LN2 - 2.0
}

/// `4 sum 1/(2i+2)_3 + 16 sum sum 1/((2i+2)_3 (2j+2)_3) - 24 sum sum 1/(2i+2j+4)_4`,
/// truncated at `i, j <= terms`.
pub fn sigma_sq_even_series(terms: u64) -> f64 {
    let single: f64 = (1..=terms).map(|i| 1.0 / fall(2.0 * i as f64 + 2.0, 3)).sum();
    let mut cross = 0.0;
    for i in 1..=terms {
        for j in 1..=terms {
            cross += 1.0 / fall(2.0 * (i + j) as f64 + 4.0, 4);
        }
    }
    4.0 * single + 16.0 * single * single - 24.0 * cross
}

/// `sum_{i,j <= terms} sigma_{2i,2j}`.
pub fn sigma_sq_even_covariance_series(terms: u64) -> f64 {
    let mut acc = 0.0;
    for i in 1..=terms {
        for j in 1..=terms {
            acc += sigma_entry(2 * i, 2 * j);
        }
    }
    acc
}

/// `P(L = k)` for `L ~ Poisson(ln 2)`, i.e. `(ln 2)^k / (2 k!)`.
pub fn poisson_ln2_pmf(k: u64) -> f64 {
    (1..=k).fold(0.5, |acc, j| acc * LN2 / j as f64)
}

/// Limiting fraction of blocks of length `i`, `4/(i+2)_3`.
pub fn block_rate(i: u64) -> f64 {
    if i == 0 {
        return 0.0;
    }
    4.0 / fall(i as f64 + 2.0, 3)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// The named constants of the limit theorems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedConstants {
    /// `E[Y_n]/n -> 3 - 4 ln 2`.
    pub even_block_mean_rate: f64,
    /// `E[G_n]/n -> 3 - 2 ln 2`.
    pub game_length_rate: f64,
    /// `E[s]/n -> 2 ln 2`.
    pub good_interval_rate: f64,
    /// Mean of the lucky-move limit, `ln 2`.
    pub lucky_mean: f64,
    /// Mean of the first-match limit, `sqrt(pi)/2`.
    pub first_match_mean: f64,
    /// `(4 ln 2)^2 + 8 ln 2 - 13`.
    pub sigma_sq_even: f64,
    /// `16 ln^2 2 - 8 ln 2 - 2`.
    pub sigma_sq_even_from_covariance: f64,
    /// `sigma_sq_even / 4`.
    pub game_length_variance: f64,
    /// `block_rate(i)` for `i = 1..=10`.
    pub block_rates: Vec<f64>,
}

pub fn named_constants() -> NamedConstants {
    NamedConstants {
        even_block_mean_rate: 3.0 - 4.0 * LN2,
        game_length_rate: 3.0 - 2.0 * LN2,
        good_interval_rate: 2.0 * LN2,
        lucky_mean: LN2,
        first_match_mean: std::f64::consts::PI.sqrt() / 2.0,
        sigma_sq_even: sigma_sq_even(),
        sigma_sq_even_from_covariance: sigma_sq_even_from_covariance(),
        game_length_variance: sigma_sq_even() / 4.0,
        block_rates: (1..=10).map(block_rate).collect(),
    }
}

/// The limit laws, with their parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitLaw {
    /// `D_{n,1} / (2 sqrt n)`.
    Weibull2,
    /// `(D_{n,1}, ..., D_{n,k}) / (2 sqrt n)`.
    JointK { k: usize },
    /// `(B_{n,i} - 4n/(i+2)_3)/sqrt(n)` for `i = 1..=size`.
    GaussianBlocks { size: usize },
    /// `(G_n - (3 - 2 ln 2) n)/sqrt(n)`.
    GameLengthNormal,
    /// `L_n`.
    PoissonLn2,
}

impl LimitLaw {
    /// Density at `x` for the continuous laws with a closed-form density.
    pub fn density(&self, x: &[f64]) -> Option<f64> {
        match self {
            Self::Weibull2 => x.first().map(|&v| weibull2_pdf(v)),
            Self::JointK { k } => (x.len() == *k).then(|| joint_density_k(x)),
            Self::GameLengthNormal => x.first().map(|&v| {
                let var = self.variance();
                (-v * v / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
            }),
            Self::GaussianBlocks { .. } | Self::PoissonLn2 => None,
        }
    }

    /// Probability mass at `k` for the discrete law.
    pub fn pmf(&self, k: u64) -> Option<f64> {
        matches!(self, Self::PoissonLn2).then(|| poisson_ln2_pmf(k))
    }

    /// Mean of a one-dimensional law, or of each coordinate.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::Weibull2 => vec![std::f64::consts::PI.sqrt() / 2.0],
            Self::JointK { k } => joint_means(*k),
            Self::GaussianBlocks { size } => vec![0.0; *size],
            Self::GameLengthNormal => vec![0.0],
            Self::PoissonLn2 => vec![LN2],
        }
    }

    /// Variance of a one-dimensional law (first coordinate otherwise).
    pub fn variance(&self) -> f64 {
        match self {
            Self::Weibull2 | Self::JointK { .. } => 1.0 - std::f64::consts::PI / 4.0,
            Self::GaussianBlocks { .. } => sigma_entry(1, 1),
            Self::GameLengthNormal => sigma_sq_even() / 4.0,
            Self::PoissonLn2 => LN2,
        }
    }

    /// Covariance matrix of the Gaussian block law.
    pub fn covariance(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Self::GaussianBlocks { size } => Some(sigma_matrix(*size)),
            _ => None,
        }
    }
}

/// `E[X_k]` as a difference of `E[S_k] = Gamma(k + 1/2) / (k-1)!`, where
/// `S_k = X_1 + ... + X_k` has density `2 s^{2k-1} e^{-s^2} / (k-1)!`.
fn joint_means(k: usize) -> Vec<f64> {
    use statrs::function::gamma::ln_gamma;
    let partial = |m: usize| (ln_gamma(m as f64 + 0.5) - ln_gamma(m as f64)).exp();
    (1..=k)
        .map(|m| partial(m) - if m > 1 { partial(m - 1) } else { 0.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::ratio;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
        let h = (b - a) / steps as f64;
        let mut acc = f(a) + f(b);
        for s in 1..steps {
            let w = if s % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + s as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn weibull_values() {
        assert_eq!(weibull2_cdf(0.0), 0.0);
        assert_eq!(weibull2_cdf(-1.0), 0.0);
        assert!((weibull2_pdf(1.0) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert_eq!(weibull2_pdf(-0.5), 0.0);
        let total = simpson(weibull2_pdf, 0.0, 10.0, 4000);
        assert!((total - 1.0).abs() < 1e-6);
        let mean = simpson(|x| x * weibull2_pdf(x), 0.0, 10.0, 4000);
        assert!((mean - 0.886_226_925_452_758).abs() < 1e-6, "{mean}");
        assert!((weibull2_cdf(1.3) - simpson(weibull2_pdf, 0.0, 1.3, 2000)).abs() < 1e-9);
    }

    #[test]
    fn joint_density_basics() {
        for x in [0.1, 0.7, 2.3] {
            assert_eq!(joint_density_k(&[x]), weibull2_pdf(x));
        }
        assert_eq!(joint_density_k(&[0.0, 1.2]), 0.0);
        assert_eq!(joint_density_k(&[-0.1, 1.2]), 0.0);
        let total = simpson(|x| simpson(|y| joint_density_k(&[x, y]), 0.0, 6.0, 600), 0.0, 6.0, 600);
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }

    #[test]
    fn joint_density_three_integrates_to_one() {
        let f = |x: f64| {
            simpson(
                |y| simpson(|z| joint_density_k(&[x, y, z]), 0.0, 6.0 - x - y, 160),
                0.0,
                6.0 - x,
                160,
            )
        };
        let total = simpson(f, 0.0, 6.0, 200);
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn joint_cdf_matches_quadrature() {
        for &(a, b) in &[(0.3, 0.4), (1.0, 0.5), (0.8, 2.0), (3.0, 3.0)] {
            let quad = simpson(|x| simpson(|y| joint_density_k(&[x, y]), 0.0, b, 400), 0.0, a, 400);
            assert!((joint_cdf_2(a, b) - quad).abs() < 1e-8, "({a},{b})");
        }
        assert_eq!(joint_cdf_2(0.0, 1.0), 0.0);
        let marginal = joint_cdf_2(1.1, 40.0);
        assert!((marginal - weibull2_cdf(1.1)).abs() < 1e-12);
    }

    #[test]
    fn sigma_spot_values() {
        assert_eq!(sigma_entry_exact(1, 1), ratio(1, 9));
        assert_eq!(sigma_entry_exact(1, 2), ratio(-4, 45));
        assert_eq!(sigma_entry_exact(2, 2), ratio(23, 180));
        assert!((sigma_entry(1, 1) - 1.0 / 9.0).abs() < 1e-15);
        assert!((sigma_entry(1, 2) + 4.0 / 45.0).abs() < 1e-15);
        assert!((sigma_entry(2, 2) - 23.0 / 180.0).abs() < 1e-15);
        assert_eq!(sigma_entry(0, 3), 0.0);
        assert_eq!(sigma_entry(3, 0), 0.0);
    }

    #[test]
    fn sigma_forms_agree() {
        for i in 1..=15 {
            for j in 1..=15 {
                let exact = sigma_entry_doublesum_exact(i, j);
                assert_eq!(exact, sigma_entry_exact(i, j), "({i},{j})");
                let (a, b) = (sigma_entry(i, j), sigma_entry_doublesum(i, j));
                assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "({i},{j})");
                assert_eq!(sigma_entry(i, j), sigma_entry(j, i));
            }
        }
    }

    #[test]
    fn sigma_constants() {
        assert!((sigma_sq_even() - 0.2324).abs() < 5e-5, "{}", sigma_sq_even());
        assert!((sigma_sq_even() / 4.0 - 0.0581).abs() < 5e-5);
        assert!((sigma_sq_even_series(SERIES_TERMS) - sigma_sq_even()).abs() < 1e-4);
        let from_cov = sigma_sq_even_covariance_series(SERIES_TERMS);
        assert!((from_cov - sigma_sq_even_from_covariance()).abs() < 1e-4, "{from_cov}");
        // the two constants differ by 16 ln 2 - 11
        assert!((sigma_sq_even() - sigma_sq_even_from_covariance()).abs() > 0.09);
    }

    #[test]
    fn poisson_values() {
        assert!((poisson_ln2_pmf(0) - 0.5).abs() < 1e-15);
        assert!((poisson_ln2_pmf(1) - LN2 / 2.0).abs() < 1e-15);
        let mass: f64 = (0..40).map(poisson_ln2_pmf).sum();
        let mean: f64 = (0..40).map(|k| k as f64 * poisson_ln2_pmf(k)).sum();
        assert!((mass - 1.0).abs() < 1e-14);
        assert!((mean - LN2).abs() < 1e-14);
    }

    #[test]
    fn constants_and_block_rates() {
        let c = named_constants();
        assert!((c.even_block_mean_rate - 0.2274).abs() < 1e-4);
        assert!((c.game_length_rate - 1.6137).abs() < 1e-4);
        assert!((c.good_interval_rate - 1.3863).abs() < 1e-4);
        assert!((block_rate(1) - 2.0 / 3.0).abs() < 1e-15);
        let total: f64 = (1..=100_000u64).map(block_rate).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let even: f64 = (1..=100_000u64).map(|i| block_rate(2 * i)).sum();
        assert!((even - c.even_block_mean_rate).abs() < 1e-8);
        let length = 1.5 + c.even_block_mean_rate / 2.0;
        assert!((length - c.game_length_rate).abs() < 1e-15);
    }

    #[test]
    fn covariance_is_psd_on_leading_minors() {
        use nalgebra::DMatrix;
        for k in 1..=10 {
            let s = sigma_matrix(k);
            let m = DMatrix::from_fn(k, k, |r, c| s[r][c]);
            assert_eq!(m, m.transpose());
            let eig = m.symmetric_eigen();
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-10, "k = {k}, min eigenvalue {min}");
        }
    }

    #[test]
    fn limit_law_surface() {
        assert_eq!(LimitLaw::Weibull2.density(&[1.0]), Some(weibull2_pdf(1.0)));
        assert_eq!(LimitLaw::JointK { k: 2 }.density(&[1.0]), None);
        assert_eq!(LimitLaw::PoissonLn2.pmf(0), Some(0.5));
        assert_eq!(LimitLaw::Weibull2.pmf(0), None);
        let means = LimitLaw::JointK { k: 3 }.mean();
        for (k, m) in means.iter().enumerate() {
            let quad = simpson(
                |x| simpson(|y| [x, y][k.min(1)] * joint_density_k(&[x, y]), 0.0, 7.0, 400),
                0.0,
                7.0,
                400,
            );
            if k < 2 {
                assert!((m - quad).abs() < 1e-6, "k={k}: {m} vs {quad}");
            }
        }
        assert!((means[0] - 0.886_226_925_452_758).abs() < 1e-12);
        let cov = LimitLaw::GaussianBlocks { size: 2 }.covariance().unwrap();
        assert_eq!(cov[0][1], sigma_entry(1, 2));
        let v = LimitLaw::GameLengthNormal;
        let total = simpson(|x| v.density(&[x]).unwrap(), -3.0, 3.0, 2000);
        assert!((total - 1.0).abs() < 1e-6);
    }
}
