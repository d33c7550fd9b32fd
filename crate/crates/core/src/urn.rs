//! Pólya urn with one immigration ball.
//!
//! A ball of type `i >= 1` has activity `i`; the single type-0 ball has
//! activity 1. Drawing type `i` replaces the ball by one of type 1 and one
//! of type `i+1`; drawing type 0 returns it together with a new type-2 ball.
//! Ball counts by type evolve exactly like block counts under sequential
//! insertion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;

/// Default truncation level for matrix work.
pub const DEFAULT_TRUNCATION: usize = 30;

#[derive(Debug, Clone, Serialize)]
pub struct UrnState {
    counts: Vec<u64>,
    draws: u64,
    #[serde(skip)]
    weights: Fenwick,
}

impl Default for UrnState {
    fn default() -> Self {
        Self::new()
    }
}

impl UrnState {
    /// The urn holding only the immigration ball.
    pub fn new() -> Self {
        let mut weights = Fenwick::with_capacity(16);
        weights.set(0, 1);
        Self {
            counts: vec![1],
            draws: 0,
            weights,
        }
    }

    /// `counts()[i]` is the number of type-`i` balls; index 0 is always 1.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Total activity `1 + sum_i i * counts[i]`, which equals `2 draws + 1`.
    pub fn total_weight(&self) -> u64 {
        self.weights.total()
    }

    /// Probability that the next draw is of type `i`.
    pub fn draw_probability(&self, i: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.weights.weight(i)),
            BigInt::from(self.total_weight()),
        )
    }

    fn bump(&mut self, i: usize, delta: i64) {
        if i >= self.counts.len() {
            self.counts.resize(i + 1, 0);
        }
        self.counts[i] = self.counts[i]
            .checked_add_signed(delta)
            .expect("urn count underflow");
        if i > 0 {
            self.weights.add(i, delta * i as i64);
        }
    }

    /// Applies the replacement rule for a draw of type `drawn`.
    ///
    /// Panics if no ball of that type is present.
    pub fn apply(&mut self, drawn: usize) {
        if drawn == 0 {
            self.bump(2, 1);
        } else {
            assert!(self.count(drawn) > 0, "no ball of type {drawn} to draw");
            self.bump(drawn, -1);
            self.bump(1, 1);
            self.bump(drawn + 1, 1);
        }
        self.draws += 1;
    }
}

/// Draws one ball with probability proportional to activity, applies the
/// replacement rule and returns the drawn type.
pub fn urn_step<R: Rng + ?Sized>(state: &mut UrnState, rng: &mut R) -> usize {
    let target = rng.gen_range(0..state.total_weight());
    let (drawn, _) = state.weights.find(target);
    state.apply(drawn);
    drawn
}

/// Runs `n` draws from the initial urn.
pub fn urn_simulate<R: Rng + ?Sized>(n: u64, rng: &mut R) -> UrnState {
    let mut state = UrnState::new();
    for _ in 0..n {
        urn_step(&mut state, rng);
    }
    state
}

/// Replays a sequence of drawn types, returning the state after each draw.
pub fn urn_replay(types: &[usize]) -> Vec<UrnState> {
    let mut state = UrnState::new();
    types
        .iter()
        .map(|&t| {
            state.apply(t);
            state.clone()
        })
        .collect()
}

/// The truncated replacement matrix `A_0` of size `(M+1) x (M+1)`.
///
/// Column `j` is the change in activity held by each type when a type-`j`
/// ball is drawn: `2 e_2` for `j = 0`, `e_1 - j e_j + (j+1) e_{j+1}` for
/// `1 <= j < M`, and `e_1 + e_M` for `j = M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplacementMatrix {
    pub m: usize,
    /// Row-major entries.
    pub entries: Vec<Vec<i64>>,
}

impl ReplacementMatrix {
    pub fn size(&self) -> usize {
        self.m + 1
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.entries.iter().map(|row| row[j]).collect()
    }

    pub fn column_sums(&self) -> Vec<i64> {
        (0..self.size()).map(|j| self.column(j).iter().sum()).collect()
    }

    /// `A_0` with its first row and column removed.
    pub fn without_immigration(&self) -> Vec<Vec<i64>> {
        self.entries[1..].iter().map(|row| row[1..].to_vec()).collect()
    }
}

pub fn replacement_matrix(m: usize) -> Result<ReplacementMatrix> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("truncation level must be >= 2, got {m}")));
    }
    let mut a = vec![vec![0i64; m + 1]; m + 1];
    a[2][0] = 2;
    for j in 1..m {
        a[1][j] += 1;
        a[j][j] -= j as i64;
        a[j + 1][j] += j as i64 + 1;
    }
    a[1][m] += 1;
    a[m][m] += 1;
    Ok(ReplacementMatrix { m, entries: a })
}

/// Polynomial with integer coefficients in ascending powers of `lambda`.
pub type Poly = Vec<BigInt>;

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Poly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn linear(root_shift: i64) -> Poly {
    vec![BigInt::from(root_shift), BigInt::one()]
}

/// `det(A - lambda I)` for a square integer matrix, via the division-free
/// Berkowitz recursion.
pub fn det_char_poly(a: &[Vec<i64>]) -> Poly {
    let n = a.len();
    let big: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    // descending coefficients of det(lambda I - A_r) for the leading r x r block
    let mut v: Vec<BigInt> = vec![BigInt::one()];
    for r in 0..n {
        let row: Vec<&BigInt> = (0..r).map(|c| &big[r][c]).collect();
        let mut col: Vec<BigInt> = (0..r).map(|i| big[i][r].clone()).collect();
        let mut t = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(-big[r][r].clone());
        for _ in 0..r {
            let dot: BigInt = row.iter().zip(&col).map(|(x, y)| *x * y).sum();
            t.push(-dot);
            col = (0..r)
                .map(|i| (0..r).map(|k| &big[i][k] * &col[k]).sum())
                .collect();
        }
        v = (0..r + 2)
            .map(|i| {
                (0..=i.min(r))
                    .map(|j| &t[i - j] * &v[j])
                    .sum::<BigInt>()
            })
            .collect();
    }
    v.reverse();
    if n % 2 == 1 {
        v.iter_mut().for_each(|c| *c = -c.clone());
    }
    v
}

/// `det(A_0 - lambda I)` for the truncation level `m`.
pub fn char_poly(m: usize) -> Result<Poly> {
    Ok(det_char_poly(&replacement_matrix(m)?.entries))
}

fn signed_product(m: usize, from: i64) -> Poly {
    let mut p = poly_mul(&[BigInt::zero(), BigInt::one()], &linear(-2));
    for j in from..m as i64 {
        p = poly_mul(&p, &linear(j));
    }
    if m % 2 == 0 {
        p.iter_mut().for_each(|c| *c = -c.clone());
    }
    p
}

/// `(-1)^{M-1} lambda (lambda - 2) prod_{j=0}^{M-1} (lambda + j)` as written.
pub fn closed_form_char_poly(m: usize) -> Poly {
    signed_product(m, 0)
}

/// `(-1)^{M-1} lambda (lambda - 2) prod_{j=1}^{M-1} (lambda + j)`, the
/// characteristic polynomial of the `(M+1) x (M+1)` matrix.
pub fn closed_form_char_poly_corrected(m: usize) -> Poly {
    signed_product(m, 1)
}

/// Eigenvalues of `A_0` without the immigration row and column:
/// `2, -1, ..., -(M-1)`.
pub fn eigenvalues_without_immigration(m: usize) -> Vec<i64> {
    std::iter::once(2).chain((1..m as i64).map(|j| -j)).collect()
}

/// Evaluates an integer polynomial at an integer point.
pub fn poly_eval(p: &[BigInt], x: i64) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Right eigenvector of `A_0` for the eigenvalue 2, normalized to sum 1:
/// `v_0 = 0`, `v_j = 2/((j+1)(j+2))` for `1 <= j < M`, `v_M = 2/(M+1)`.
pub fn top_eigenvector(m: usize) -> Result<Vec<BigRational>> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("truncation level must be >= 2, got {m}")));
    }
    let q = |a: u64, b: u64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let mut v = vec![BigRational::zero()];
    v.extend((1..m as u64).map(|j| q(2, (j + 1) * (j + 2))));
    v.push(q(2, m as u64 + 1));
    Ok(v)
}

/// `(A_0 - 2I) v` in exact arithmetic.
pub fn eigen_residual(a: &ReplacementMatrix, v: &[BigRational]) -> Vec<BigRational> {
    a.entries
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let av: BigRational = row
                .iter()
                .zip(v)
                .map(|(&x, y)| y * BigInt::from(x))
                .sum();
            av - &v[r] * BigInt::from(2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::ratio;
    use crate::limits::block_rate;
    use crate::rng::RngStream;
    use crate::sampler::InsertionProcess;
    use crate::types::BlockProfile;

    fn ints(xs: &[i64]) -> Poly {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn first_draw_is_forced() {
        let mut rng = RngStream::new(1, 0).rng();
        let mut s = UrnState::new();
        assert_eq!(urn_step(&mut s, &mut rng), 0);
        assert_eq!(s.counts(), &[1, 0, 1]);
        assert_eq!(s.draw_probability(2), ratio(2, 3));
        assert_eq!(s.draw_probability(0), ratio(1, 3));
        assert_eq!(urn_simulate(1, &mut rng).counts(), &[1, 0, 1]);
    }

    #[test]
    fn draw_frequencies_after_one_step() {
        let mut hits = 0u32;
        let trials = 30_000;
        for t in 0..trials {
            let mut rng = RngStream::new(5, t).rng();
            let mut s = UrnState::new();
            s.apply(0);
            if urn_step(&mut s, &mut rng) == 2 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!((freq - 2.0 / 3.0).abs() < 0.01, "{freq}");
    }

    #[test]
    fn ball_bookkeeping() {
        let mut rng = RngStream::new(2, 0).rng();
        let mut s = UrnState::new();
        for n in 1..=2000u64 {
            urn_step(&mut s, &mut rng);
            assert_eq!(s.count(0), 1);
            assert_eq!(s.counts()[1..].iter().sum::<u64>(), n);
            assert_eq!(s.total_weight(), 2 * n + 1);
        }
    }

    #[test]
    fn coupling_with_insertion() {
        for trial in 0..200 {
            let mut rng = RngStream::new(11, trial).rng();
            let mut p = InsertionProcess::new(120, false);
            let mut urn = UrnState::new();
            for _ in 0..120 {
                let drawn = p.step(&mut rng);
                urn.apply(drawn);
                let profile = BlockProfile::from_lengths(p.block_lengths().to_vec());
                let top = profile.counts.len().max(urn.counts().len());
                for i in 1..top {
                    assert_eq!(urn.count(i), profile.count(i), "trial {trial}, type {i}");
                }
            }
        }
    }

    #[test]
    fn replacement_matrix_small() {
        let a = replacement_matrix(2).unwrap();
        assert_eq!(a.entries, vec![vec![0, 0, 0], vec![0, 0, 1], vec![2, 2, 1]]);
        assert_eq!(a.column(2), vec![0, 1, 1]);
        let a4 = replacement_matrix(4).unwrap();
        assert_eq!(a4.column(0), vec![0, 0, 2, 0, 0]);
        assert_eq!(a4.column(2), vec![0, 1, -2, 3, 0]);
        assert_eq!(a4.column(4), vec![0, 1, 0, 0, 1]);
        assert!(replacement_matrix(1).is_err());
    }

    #[test]
    fn column_sums_are_two() {
        for m in 2..=30 {
            assert!(replacement_matrix(m).unwrap().column_sums().iter().all(|&s| s == 2));
        }
    }

    #[test]
    fn char_poly_small() {
        // -lambda (lambda - 2)(lambda + 1) = -lambda^3 + lambda^2 + 2 lambda
        assert_eq!(char_poly(2).unwrap(), ints(&[0, 2, 1, -1]));
        assert_eq!(closed_form_char_poly_corrected(2), ints(&[0, 2, 1, -1]));
        // the product from j = 0 carries an extra factor lambda
        assert_eq!(closed_form_char_poly(2), ints(&[0, 0, 2, 1, -1]));
        for m in 2..=30 {
            assert_eq!(char_poly(m).unwrap()[0], BigInt::zero());
        }
    }

    fn cofactor_det(a: &[Vec<BigInt>]) -> BigInt {
        let n = a.len();
        if n == 1 {
            return a[0][0].clone();
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<BigInt>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != c)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &a[0][c] * cofactor_det(&minor);
                if c % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }

    #[test]
    fn char_poly_matches_cofactor_values() {
        // det(A_0 - x I) at integer points, by cofactor expansion
        for m in 2..=6 {
            let a = replacement_matrix(m).unwrap();
            let p = char_poly(m).unwrap();
            assert_eq!(p.len(), m + 2);
            for x in -4..=4i64 {
                let shifted: Vec<Vec<BigInt>> = a
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(r, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(c, &v)| BigInt::from(v - if r == c { x } else { 0 }))
                            .collect()
                    })
                    .collect();
                assert_eq!(poly_eval(&p, x), cofactor_det(&shifted), "m={m}, x={x}");
            }
        }
    }

    #[test]
    fn char_poly_matches_corrected_closed_form() {
        for m in 2..=30 {
            assert_eq!(char_poly(m).unwrap(), closed_form_char_poly_corrected(m), "m = {m}");
            assert_ne!(char_poly(m).unwrap(), closed_form_char_poly(m));
        }
    }

    #[test]
    fn spectrum_without_immigration() {
        for m in 2..=12 {
            let a = replacement_matrix(m).unwrap().without_immigration();
            let p = det_char_poly(&a);
            assert_eq!(p.len(), m + 1);
            for ev in eigenvalues_without_immigration(m) {
                assert_eq!(poly_eval(&p, ev), BigInt::zero(), "m={m}, ev={ev}");
            }
            assert_ne!(poly_eval(&p, -(m as i64)), BigInt::zero());
        }
    }

    #[test]
    fn spectrum_numerically() {
        use nalgebra::DMatrix;
        let m = 8;
        let a = replacement_matrix(m).unwrap().without_immigration();
        let mat = DMatrix::from_fn(m, m, |r, c| a[r][c] as f64);
        let mut ev: Vec<f64> = mat.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let mut expect: Vec<f64> = eigenvalues_without_immigration(m).iter().map(|&x| x as f64).collect();
        expect.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-6, "{ev:?}");
        }
    }

    #[test]
    fn top_eigenvector_values() {
        let v = top_eigenvector(3).unwrap();
        assert_eq!(v, vec![ratio(0, 1), ratio(1, 3), ratio(1, 6), ratio(1, 2)]);
        for m in 2..=50 {
            let a = replacement_matrix(m).unwrap();
            let v = top_eigenvector(m).unwrap();
            assert!(eigen_residual(&a, &v).iter().all(|r| r.is_zero()), "m = {m}");
            assert_eq!(v.iter().sum::<BigRational>(), BigRational::one());
            for (j, vj) in v.iter().enumerate().take(m).skip(1) {
                let stationary = j as f64 * block_rate(j as u64) / 2.0;
                let got = num_traits::ToPrimitive::to_f64(vj).unwrap();
                assert!((got - stationary).abs() < 1e-15);
            }
        }
        assert!(top_eigenvector(1).is_err());
    }
}
