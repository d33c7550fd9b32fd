//! Exact combinatorial primitives on arbitrary-precision integers.
//!
//! Binomials follow the free-range summation convention: `C(n, k)` is zero
//! whenever `k < 0`, `k > n` or `n < 0`, so sums over `k` can run past the
//! support without special-casing the boundary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 1..=k {
        acc *= n - k + t;
        acc /= t;
    }
    acc
}

/// Falling factorial `(n)_m = n (n-1) ... (n-m+1)`, with `(n)_0 = 1`.
///
/// `n` may be any integer; the product hits zero once a factor does.
pub fn falling_factorial(n: i64, m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..m as i64 {
        let factor = n - j;
        if factor == 0 {
            return BigInt::zero();
        }
        acc *= factor;
    }
    acc
}

/// `n!` for `n >= 0`.
pub fn factorial(n: u64) -> BigInt {
    falling_factorial(n as i64, n)
}

/// `(2n - 1)!! = 1 * 3 * ... * (2n - 1)`, the number of perfect matchings of
/// `2n` points; `1` for `n = 0`.
pub fn odd_double_factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for j in 1..=n {
        acc *= 2 * j - 1;
    }
    acc
}

/// Shorthand for building a reduced rational from two big integers.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Comparison of `(n)_m` against its exponential approximation
/// `n^m exp(-C(m,2)/n)`.
///
/// Everything is kept in log space because `(n)_m` overflows `f64` long before
/// the interesting range of `m` is reached.
#[derive(Debug, Clone, PartialEq)]
pub struct FallfactApprox {
    pub n: u64,
    pub m: u64,
    /// `ln(n^m exp(-C(m,2)/n))`.
    pub log_approx: f64,
    /// `ln((n)_m)`, summed term by term.
    pub log_exact: f64,
    /// `|approx / exact - 1|`.
    pub relative_error: f64,
    /// The error scale `m^3 / n^2`.
    pub error_scale: f64,
}

impl FallfactApprox {
    pub fn approx(&self) -> f64 {
        let nf = self.n as f64;
        let direct = nf.powi(self.m as i32) * (-(self.m as f64) * (self.m as f64 - 1.0) / (2.0 * nf)).exp();
        if direct.is_finite() && self.m > 0 {
            direct
        } else {
            self.log_approx.exp()
        }
    }

    pub fn exact(&self) -> f64 {
        self.log_exact.exp()
    }

    /// The exact falling factorial as a big integer, for cross-checks.
    pub fn exact_big(&self) -> BigInt {
        falling_factorial(self.n as i64, self.m)
    }
}

/// Approximates `(n)_m` by `n^m exp(-C(m,2)/n)` and reports the relative
/// error; the error is of order `m^3 / n^2` when `m = o(n^{2/3})`.
pub fn fallfact_ratio_approx(n: u64, m: u64) -> Result<FallfactApprox> {
    if m > n {
        return Err(Error::OutOfRange(format!(
            "falling factorial approximation needs m <= n, got m = {m}, n = {n}"
        )));
    }
    let nf = n as f64;
    let mf = m as f64;
    let pairs = mf * (mf - 1.0) / 2.0;
    let log_approx = if m == 0 { 0.0 } else { mf * nf.ln() - pairs / nf };
    let log_exact: f64 = (0..m).map(|j| ((n - j) as f64).ln()).sum();
    let relative_error = (log_approx - log_exact).exp_m1().abs();
    let error_scale = if n == 0 { 0.0 } else { mf.powi(3) / (nf * nf) };
    Ok(FallfactApprox {
        n,
        m,
        log_approx,
        log_exact,
        relative_error,
        error_scale,
    })
}

/// Closed form of `sum_k C(N-k, i) C(k, j) = C(N+1, i+j+1)`.
pub fn sum_identity_single(big_n: u64, i: u64, j: u64) -> BigInt {
    binomial(big_n as i64 + 1, (i + j + 1) as i64)
}

/// Left-hand side of [`sum_identity_single`], summed term by term.
pub fn sum_identity_single_by_terms(big_n: u64, i: u64, j: u64) -> BigInt {
    let big_n = big_n as i64;
    (0..=big_n)
        .map(|k| binomial(big_n - k, i as i64) * binomial(k, j as i64))
        .sum()
}

/// Closed form of
/// `sum_k C(k, l) C(N-k, i) C(N-k-i, j) = C(i+j, i) C(N+1, i+j+l+1)`.
pub fn sum_identity_double(big_n: u64, i: u64, j: u64, l: u64) -> BigInt {
    binomial((i + j) as i64, i as i64) * binomial(big_n as i64 + 1, (i + j + l + 1) as i64)
}

/// Left-hand side of [`sum_identity_double`], summed term by term.
pub fn sum_identity_double_by_terms(big_n: u64, i: u64, j: u64, l: u64) -> BigInt {
    let (big_n, i, j, l) = (big_n as i64, i as i64, j as i64, l as i64);
    (0..=big_n)
        .map(|k| binomial(k, l) * binomial(big_n - k, i) * binomial(big_n - k - i, j))
        .sum()
}

/// `f_xy = 6 C(x+y-1, y) + 3 C(x+y, y+1) + C(x+y+1, y+2)`.
pub fn f_xy(x: u64, y: u64) -> BigInt {
    let (x, y) = (x as i64, y as i64);
    binomial(x + y - 1, y) * 6 + binomial(x + y, y + 1) * 3 + binomial(x + y + 1, y + 2)
}

/// `(i+j+4)! / ((i+2)! (j+2)!)`, the value of `f_ij + f_ji` for `(i, j) != (0, 0)`.
pub fn f_xy_symmetric_sum(i: u64, j: u64) -> BigInt {
    factorial(i + j + 4) / (factorial(i + 2) * factorial(j + 2))
}
