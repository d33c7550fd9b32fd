//! Exact laws and moments of the block structure for finite `n`.
//!
//! Everything here is evaluated in big rationals and serves as the ground
//! truth for the Monte Carlo suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::combinatorics::{binomial, factorial, falling_factorial, odd_double_factorial, ratio};
use crate::error::{Error, Result};

/// Largest `n` accepted by [`a_table`].
pub const A_TABLE_CAP: usize = 2000;

/// `a(n, j)`: number of standard deals of size `n` whose first red card sits
/// at position `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ATable {
    // rows[n - 1][j] for j in 0..=n+1; entries with j < 2 are zero
    rows: Vec<Vec<BigInt>>,
}

impl ATable {
    pub fn n_max(&self) -> usize {
        self.rows.len()
    }

    /// `a(n, j)`, zero outside `2 <= j <= n+1` or beyond the table.
    pub fn get(&self, n: usize, j: usize) -> BigInt {
        if n == 0 {
            return BigInt::zero();
        }
        self.rows
            .get(n - 1)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Row `n` as `(j, a(n, j))` for `2 <= j <= n+1`.
    pub fn row(&self, n: usize) -> impl Iterator<Item = (usize, &BigInt)> {
        self.rows[n - 1].iter().enumerate().skip(2)
    }

    /// `A_n(1) = sum_j a(n, j)`.
    pub fn row_sum(&self, n: usize) -> BigInt {
        self.row(n).map(|(_, v)| v).sum()
    }
}

/// Builds `a(n, j)` for `1 <= n <= n_max` from
/// `a(n,j) = (2n-1-j) a(n-1,j) + (j-1) a(n-1,j-1)`, `a(1,2) = 1`.
pub fn a_table(n_max: usize) -> Result<ATable> {
    if n_max == 0 || n_max > A_TABLE_CAP {
        return Err(Error::OutOfRange(format!(
            "a-table size must be in 1..={A_TABLE_CAP}, got {n_max}"
        )));
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max);
    rows.push(vec![BigInt::zero(), BigInt::zero(), BigInt::one()]);
    for n in 2..=n_max {
        let prev = &rows[n - 2];
        let at = |j: usize| prev.get(j).cloned().unwrap_or_else(BigInt::zero);
        let mut row = vec![BigInt::zero(); n + 2];
        for (j, slot) in row.iter_mut().enumerate().skip(2) {
            // 2n-1-j >= n-2 >= 0 on the support
            *slot = at(j) * (2 * n - 1 - j) + at(j - 1) * (j - 1);
        }
        rows.push(row);
    }
    Ok(ATable { rows })
}

/// `2^m (n)_m / (2n)_m`.
fn halving_ratio(n: u64, m: u64) -> BigRational {
    BigRational::new(
        falling_factorial(n as i64, m) << m as usize,
        falling_factorial(2 * n as i64, m),
    )
}

/// `P(D_{n,1} = t) = (t-1)/(2n-t+1) * 2^{t-1} (n)_{t-1} / (2n)_{t-1}` for
/// `2 <= t <= n+1`, zero otherwise.
pub fn p_first_match(n: u64, t: u64) -> BigRational {
    if n == 0 || t < 2 || t > n + 1 {
        return BigRational::zero();
    }
    ratio(t - 1, 2 * n - t + 1) * halving_ratio(n, t - 1)
}

/// `P(D_{n,1} = t_1, ..., D_{n,k} = t_k)`.
///
/// With `t = t_1 + ... + t_k` this is
/// `2^{t-k} (n)_{t-k} / (2n)_{t-k} * prod_i (t_1+...+t_i - 2i + 1) / (2n-t+k)_k`;
/// infeasible vectors get probability zero.
pub fn joint_first_k(n: u64, lengths: &[u64]) -> BigRational {
    let k = lengths.len() as u64;
    if n == 0 || k == 0 || k > n || lengths.iter().any(|&t| t == 0) {
        return BigRational::zero();
    }
    let mut total = 0u64;
    let mut positions = BigInt::one();
    for (idx, &t) in lengths.iter().enumerate() {
        total += t;
        // blue partner of the i-th red card: cum - 2i + 1 free slots
        let slots = total as i64 - 2 * (idx as i64 + 1) + 1;
        if slots <= 0 {
            return BigRational::zero();
        }
        positions *= slots;
    }
    if total > 2 * n {
        return BigRational::zero();
    }
    let head = halving_ratio(n, total - k);
    let tail = falling_factorial((2 * n - total + k) as i64, k);
    if tail.is_zero() {
        return BigRational::zero();
    }
    head * BigRational::new(positions, tail)
}

/// `E[D_{n,1}] = 4^n / C(2n, n)`.
pub fn mean_d1(n: u64) -> BigRational {
    BigRational::new(BigInt::one() << (2 * n) as usize, binomial(2 * n as i64, n as i64))
}

/// `E[(D_{n,1})_r]` from the recurrence
/// `E_n[r] = (2n-1+r)/(2n-1) E_{n-1}[r] + r(r-1)/(2n-1) E_{n-1}[r-1]`
/// started at `D_{1,1} = 2`.
pub fn factorial_moment_d1(n: u64, r: u64) -> BigRational {
    assert!(n >= 1, "factorial moments need n >= 1");
    let r = r as usize;
    let mut moments: Vec<BigRational> = (0..=r)
        .map(|q| BigRational::from_integer(falling_factorial(2, q as u64)))
        .collect();
    for m in 2..=n {
        let denom = BigInt::from(2 * m - 1);
        for q in (1..=r).rev() {
            let grow = BigRational::new(BigInt::from(2 * m - 1 + q as u64), denom.clone());
            let feed = BigRational::new(BigInt::from((q * (q - 1)) as u64), denom.clone());
            moments[q] = &moments[q] * grow + &moments[q - 1] * feed;
        }
    }
    moments.swap_remove(r)
}

/// Closed form `E[(D_{n,1})_2] = 2(2n+1) - (2n+1)/(n+1) * 2^{2n+2} / C(2n+2, n+1)`.
pub fn factorial_moment_d1_r2_closed(n: u64) -> BigRational {
    let n_big = n as i64;
    BigRational::from_integer(BigInt::from(2 * (2 * n + 1)))
        - ratio(2 * n + 1, n + 1)
            * BigRational::new(
                BigInt::one() << (2 * n + 2) as usize,
                binomial(2 * n_big + 2, n_big + 1),
            )
}

/// Closed form of `E[(D_{n,1})_3]`:
/// `6 ( sqrt(pi) (n+2) n! / Gamma(n+1/2) - 4n - 2 )`, with
/// `Gamma(n+1/2) = sqrt(pi) (2n-1)!! / 2^n` so the value is rational.
pub fn factorial_moment_d1_r3_closed(n: u64) -> BigRational {
    let gamma_free = BigRational::new(
        (factorial(n) * (n + 2)) << n as usize,
        odd_double_factorial(n),
    );
    (gamma_free - BigRational::from_integer(BigInt::from(4 * n + 2))) * BigInt::from(6)
}

/// `var(D_{n,1}) = E[(D)_2] + E[D] - E[D]^2`.
pub fn var_d1(n: u64) -> BigRational {
    let mean = mean_d1(n);
    factorial_moment_d1(n, 2) + &mean - &mean * &mean
}

/// Floating-point `var(D_{n,1})` through log-gamma, for large `n`.
pub fn var_d1_f64(n: u64) -> f64 {
    let nf = n as f64;
    // 4^n / C(2n, n)
    let ln_central = |m: f64| ln_gamma(2.0 * m + 1.0) - 2.0 * ln_gamma(m + 1.0);
    let mean = (nf * 4f64.ln() - ln_central(nf)).exp();
    let shifted = ((nf + 1.0) * 4f64.ln() - ln_central(nf + 1.0)).exp();
    let second = 2.0 * (2.0 * nf + 1.0) - (2.0 * nf + 1.0) / (nf + 1.0) * shifted;
    second + mean - mean * mean
}

/// `n (n-1) E_1`: both blue partners precede the first of the two reds,
/// `E_1 = 2^{i+2} / (i+2)_3 * (n-2)_{i-1} / (2n)_i`.
pub fn pair_term_e1(n: u64, i: u64) -> BigRational {
    if i == 0 || n < 2 {
        return BigRational::zero();
    }
    let e1 = BigRational::new(
        falling_factorial(n as i64 - 2, i - 1) << (i + 2) as usize,
        falling_factorial(i as i64 + 2, 3) * falling_factorial(2 * n as i64, i),
    );
    e1 * BigInt::from(n * (n - 1))
}

/// `n (n-1) E_2` for `i >= 2`, zero for `i = 1`:
/// `E_2 = 2^i / i * (n-2)_{i-2} / (2n)_i`.
pub fn pair_term_e2(n: u64, i: u64) -> BigRational {
    if i < 2 || n < 2 {
        return BigRational::zero();
    }
    let e2 = BigRational::new(
        falling_factorial(n as i64 - 2, i - 2) << i as usize,
        falling_factorial(2 * n as i64, i) * BigInt::from(i),
    );
    e2 * BigInt::from(n * (n - 1))
}

/// Exact `E[B_{n,i}] = P(D_{n,1} = i) + n(n-1)(E_1 + E_2)`, with `E_2`
/// present only for `i >= 2`.
pub fn mean_b_exact(n: u64, i: u64) -> BigRational {
    if n == 0 || i == 0 || i > n + 1 {
        return BigRational::zero();
    }
    p_first_match(n, i) + pair_term_e1(n, i) + pair_term_e2(n, i)
}

/// Leading-order `E[B_{n,i}] ~ 4n / (i+2)_3`.
pub fn mean_b_asymptotic(n: u64, i: u64) -> f64 {
    4.0 * n as f64 / rising3(i)
}

/// Upper bound `E[B_{n,i}] <= P(D_{n,1} = i) + 4 e^{1/2} n / (i+2)_3`.
pub fn upper_bound_b(n: u64, i: u64) -> f64 {
    let xi = p_first_match(n, i).to_f64().unwrap_or(0.0);
    xi + 4.0 * 0.5f64.exp() * n as f64 / rising3(i)
}

fn rising3(i: u64) -> f64 {
    let i = i as f64;
    i * (i + 1.0) * (i + 2.0)
}

/// A probability or moment table entry in exact form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactValue {
    pub index: u64,
    pub numerator: String,
    pub denominator: String,
}

impl ExactValue {
    pub fn new(index: u64, value: &BigRational) -> Self {
        Self {
            index,
            numerator: value.numer().to_string(),
            denominator: value.denom().to_string(),
        }
    }
}
