//! Random deals and chord diagrams, standardization, block decomposition and
//! exhaustive enumeration of standard deals.
//!
//! Three independent routes produce uniform objects:
//!
//! * [`sample_deal_shuffle`] shuffles the multiset `{1,1,...,n,n}`;
//! * [`sample_deal_insertion`] inserts pair `k` by dropping its blue card into
//!   one of the `2k-1` gaps and appending its red card;
//! * [`sample_chord_diagram`] pairs the smallest unmatched point with a
//!   uniformly chosen unmatched partner.
//!
//! Standard deals and chord diagrams are in bijection through
//! [`deal_from_chords`] / [`chords_from_deal`].

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::types::{BlockProfile, ChordDiagram, Deal};

/// Default largest `n` accepted by [`enumerate_standard_deals`];
/// `(2*8-1)!! = 2_027_025` deals.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// A uniformly random deal, produced by shuffling the card multiset.
pub fn sample_deal_shuffle<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Deal> {
    if n == 0 {
        return Err(Error::EmptyDeal);
    }
    let mut labels: Vec<u32> = (1..=n as u32).flat_map(|l| [l, l]).collect();
    labels.shuffle(rng);
    Ok(Deal::from_trusted(labels))
}

/// Record of a sequential-insertion run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InsertionTrace {
    /// `drawn_types[k-1]` is the length of the block whose gap received the
    /// blue card of pair `k`, or 0 for the final gap.
    pub drawn_types: Vec<usize>,
    /// `good_counts[k-1]` is the number of good intervals after `k` pairs.
    pub good_counts: Vec<u64>,
}

/// Incremental state of the sequential-insertion sampler.
///
/// Gap `g` (the gap just left of card `g`) belongs to the block containing
/// card `g`, so a block of length `i` owns `i` gaps; the gap after the last
/// card is the type-0 gap. Block weights live in a Fenwick tree so a uniform
/// gap is located in `O(log n)`.
#[derive(Debug, Clone)]
pub struct InsertionProcess {
    pairs: usize,
    lengths: Vec<usize>,
    weights: Fenwick,
    cards: Option<Vec<Vec<u32>>>,
    good: u64,
}

impl InsertionProcess {
    /// An empty row. With `materialize` the card sequence is kept so that
    /// [`InsertionProcess::deal`] can be called.
    pub fn new(capacity: usize, materialize: bool) -> Self {
        Self {
            pairs: 0,
            lengths: Vec::with_capacity(capacity),
            weights: Fenwick::with_capacity(capacity),
            cards: materialize.then(|| Vec::with_capacity(capacity)),
            good: 1,
        }
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    /// Good-interval count of the current row.
    pub fn good_count(&self) -> u64 {
        self.good
    }

    pub fn block_lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Inserts the next pair through gap `gap` (`0..2k-1` for pair `k`) and
    /// returns the drawn type.
    pub fn insert_at(&mut self, gap: u64) -> usize {
        let k = self.pairs as u64 + 1;
        assert!(gap < 2 * k - 1, "gap {gap} out of range for pair {k}");
        let label = k as u32;
        let drawn = if gap == 2 * k - 2 {
            if let Some(cards) = &mut self.cards {
                cards.push(vec![label, label]);
            }
            self.push_block(2);
            self.good += 1;
            0
        } else {
            let (block, offset) = self.weights.find(gap);
            let len = self.lengths[block];
            self.lengths[block] = len + 1;
            self.weights.add(block, 1);
            if let Some(cards) = &mut self.cards {
                cards[block].insert(offset as usize, label);
                cards.push(vec![label]);
            }
            self.push_block(1);
            // the grown block gains a good gap iff its old length was even
            self.good += 1 + u64::from(len % 2 == 0);
            len
        };
        self.pairs += 1;
        drawn
    }

    /// Inserts the next pair through a uniformly chosen gap.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let k = self.pairs as u64 + 1;
        let gap = rng.gen_range(0..2 * k - 1);
        self.insert_at(gap)
    }

    fn push_block(&mut self, len: usize) {
        let idx = self.lengths.len();
        self.lengths.push(len);
        self.weights.add(idx, len as i64);
    }

    /// The current row as a (standard) deal; `None` when not materialized or
    /// still empty.
    pub fn deal(&self) -> Option<Deal> {
        let cards = self.cards.as_ref()?;
        if self.pairs == 0 {
            return None;
        }
        Some(Deal::from_trusted(cards.concat()))
    }
}

/// Runs the sequential-insertion sampler for `n` pairs. The resulting deal is
/// standard and uniform over standard deals.
pub fn sample_deal_insertion<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(Deal, InsertionTrace)> {
    if n == 0 {
        return Err(Error::EmptyDeal);
    }
    let mut process = InsertionProcess::new(n, true);
    let trace = run_insertion(&mut process, n, rng);
    let deal = process.deal().expect("materialized process with n >= 1 pairs");
    Ok((deal, trace))
}

/// Same law as [`sample_deal_insertion`] without building the card row.
pub fn sample_insertion_trace<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<InsertionTrace> {
    if n == 0 {
        return Err(Error::EmptyDeal);
    }
    let mut process = InsertionProcess::new(n, false);
    Ok(run_insertion(&mut process, n, rng))
}

fn run_insertion<R: Rng + ?Sized>(
    process: &mut InsertionProcess,
    n: usize,
    rng: &mut R,
) -> InsertionTrace {
    let mut trace = InsertionTrace {
        drawn_types: Vec::with_capacity(n),
        good_counts: Vec::with_capacity(n),
    };
    for _ in 0..n {
        trace.drawn_types.push(process.step(rng));
        trace.good_counts.push(process.good_count());
    }
    trace
}

/// A uniform perfect matching on `1..=2n`: repeatedly pair the smallest
/// unmatched point with a uniformly chosen unmatched partner.
pub fn sample_chord_diagram<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ChordDiagram> {
    if n == 0 {
        return Err(Error::EmptyDeal);
    }
    let points = 2 * n;
    // `pool` holds the unmatched points, `slot[p]` is p's index in `pool`
    let mut pool: Vec<u32> = (1..=points as u32).collect();
    let mut slot: Vec<usize> = (0..=points).map(|p| p.saturating_sub(1)).collect();
    let mut matched = vec![false; points + 1];
    let mut pairs = Vec::with_capacity(n);

    let remove = |pool: &mut Vec<u32>, slot: &mut Vec<usize>, p: u32| {
        let at = slot[p as usize];
        let last = *pool.last().expect("non-empty pool");
        pool.swap_remove(at);
        if last != p {
            slot[last as usize] = at;
        }
    };

    for left in 1..=points as u32 {
        if matched[left as usize] {
            continue;
        }
        remove(&mut pool, &mut slot, left);
        let right = pool[rng.gen_range(0..pool.len())];
        remove(&mut pool, &mut slot, right);
        matched[left as usize] = true;
        matched[right as usize] = true;
        pairs.push((left, right));
    }
    Ok(ChordDiagram::from_sorted_trusted(pairs))
}

/// Relabels pairs so that red cards appear in increasing label order.
pub fn standardize(deal: &Deal) -> Deal {
    let n = deal.n();
    let mut seen = vec![false; n + 1];
    let mut rename = vec![0u32; n + 1];
    let mut next = 1;
    for &l in deal.labels() {
        if seen[l as usize] {
            rename[l as usize] = next;
            next += 1;
        } else {
            seen[l as usize] = true;
        }
    }
    Deal::from_trusted(deal.labels().iter().map(|&l| rename[l as usize]).collect())
}

/// Splits a deal into its `n` blocks, each ending at a red card.
pub fn blocks(deal: &Deal) -> BlockProfile {
    let mut lengths = Vec::with_capacity(deal.n());
    let mut start = 0;
    for (pos, red) in deal.red_mask().into_iter().enumerate() {
        if red {
            lengths.push(pos + 1 - start);
            start = pos + 1;
        }
    }
    BlockProfile::from_lengths(lengths)
}

/// Standard deal of a chord diagram: chords are labelled by increasing right
/// endpoint and both endpoints receive the chord's label.
pub fn deal_from_chords(cd: &ChordDiagram) -> Deal {
    let mut by_right: Vec<(u32, u32)> = cd.pairs().to_vec();
    by_right.sort_unstable_by_key(|&(_, r)| r);
    let mut labels = vec![0u32; 2 * cd.n()];
    for (k, &(l, r)) in by_right.iter().enumerate() {
        labels[l as usize - 1] = k as u32 + 1;
        labels[r as usize - 1] = k as u32 + 1;
    }
    Deal::from_trusted(labels)
}

/// Chord diagram joining the two positions of every label.
pub fn chords_from_deal(deal: &Deal) -> ChordDiagram {
    let mut first = vec![0u32; deal.n() + 1];
    let mut pairs = Vec::with_capacity(deal.n());
    for (pos, &l) in deal.labels().iter().enumerate() {
        let p = pos as u32 + 1;
        match first[l as usize] {
            0 => first[l as usize] = p,
            left => pairs.push((left, p)),
        }
    }
    pairs.sort_unstable();
    ChordDiagram::from_sorted_trusted(pairs)
}

/// Iterator over all `(2n-1)!!` standard deals of size `n`.
///
/// Deals are produced by inserting pair `k` into each of its `2k-1` gaps in
/// turn; the gap choices `(c_1, ..., c_n)` run through mixed-radix
/// lexicographic order with `c_n` varying fastest.
#[derive(Debug, Clone)]
pub struct StandardDeals {
    choices: Vec<u32>,
    done: bool,
}

impl StandardDeals {
    fn build(&self) -> Deal {
        let n = self.choices.len();
        let mut row = Vec::with_capacity(2 * n);
        for (k, &gap) in self.choices.iter().enumerate() {
            let label = k as u32 + 1;
            row.insert(gap as usize, label);
            row.push(label);
        }
        Deal::from_trusted(row)
    }

    fn advance(&mut self) {
        for k in (0..self.choices.len()).rev() {
            let radix = 2 * k as u32 + 1;
            self.choices[k] += 1;
            if self.choices[k] < radix {
                return;
            }
            self.choices[k] = 0;
        }
        self.done = true;
    }
}

impl Iterator for StandardDeals {
    type Item = Deal;

    fn next(&mut self) -> Option<Deal> {
        if self.done {
            return None;
        }
        let deal = self.build();
        self.advance();
        Some(deal)
    }
}

/// All standard deals of size `n`, with the default cap.
pub fn enumerate_standard_deals(n: usize) -> Result<StandardDeals> {
    enumerate_standard_deals_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_standard_deals_with_cap(n: usize, cap: usize) -> Result<StandardDeals> {
    if n == 0 {
        return Err(Error::EmptyDeal);
    }
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(StandardDeals {
        choices: vec![0; n],
        done: false,
    })
}
