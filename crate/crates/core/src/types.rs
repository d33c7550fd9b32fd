//! Shared domain types: deals, chord diagrams, block profiles and game outcomes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deal of `2n` cards in which every label `1..=n` occurs exactly twice.
///
/// Only labels are stored. The first occurrence of a label is its blue card
/// and the second its red card; colors are always derived from position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Deal {
    labels: Vec<u32>,
}

impl Deal {
    /// Validates and wraps a label sequence.
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDeal);
        }
        if labels.len() % 2 != 0 {
            return Err(Error::MalformedDeal(format!(
                "odd number of cards ({})",
                labels.len()
            )));
        }
        let n = labels.len() / 2;
        let mut seen = vec![0u8; n + 1];
        for &label in &labels {
            let l = label as usize;
            if l == 0 || l > n {
                return Err(Error::MalformedDeal(format!(
                    "label {label} outside 1..={n}"
                )));
            }
            seen[l] += 1;
            if seen[l] > 2 {
                return Err(Error::MalformedDeal(format!(
                    "label {label} occurs more than twice"
                )));
            }
        }
        Ok(Self { labels })
    }

    /// Wraps labels produced by an internal generator without re-validating.
    pub(crate) fn from_trusted(labels: Vec<u32>) -> Self {
        debug_assert!(Self::new(labels.clone()).is_ok());
        Self { labels }
    }

    /// Number of pairs.
    pub fn n(&self) -> usize {
        self.labels.len() / 2
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u32> {
        self.labels
    }

    /// `true` at the positions holding a red (second-occurrence) card.
    pub fn red_mask(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n() + 1];
        self.labels
            .iter()
            .map(|&l| {
                let red = seen[l as usize];
                seen[l as usize] = true;
                red
            })
            .collect()
    }

    /// A deal is standard when its red cards appear in increasing label order.
    pub fn is_standard(&self) -> bool {
        let mut seen = vec![false; self.n() + 1];
        let mut next_red = 1u32;
        for &l in &self.labels {
            if seen[l as usize] {
                if l != next_red {
                    return false;
                }
                next_red += 1;
            } else {
                seen[l as usize] = true;
            }
        }
        true
    }
}

impl TryFrom<Vec<u32>> for Deal {
    type Error = Error;

    fn try_from(labels: Vec<u32>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<Deal> for Vec<u32> {
    fn from(deal: Deal) -> Self {
        deal.labels
    }
}

/// A perfect matching on the points `1..=2n`, each chord stored as
/// `(left, right)` with `left < right`, sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, u32)>", into = "Vec<(u32, u32)>")]
pub struct ChordDiagram {
    pairs: Vec<(u32, u32)>,
}

impl ChordDiagram {
    /// Validates a list of chords; endpoints of each chord may be given in
    /// either order.
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyDeal);
        }
        let points = 2 * pairs.len();
        let mut used = vec![false; points + 1];
        let mut normalized = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (l, r) = (a.min(b), a.max(b));
            if l == r {
                return Err(Error::MalformedChords(format!("degenerate chord ({a},{b})")));
            }
            for p in [l, r] {
                if p == 0 || p as usize > points {
                    return Err(Error::MalformedChords(format!(
                        "endpoint {p} outside 1..={points}"
                    )));
                }
                if used[p as usize] {
                    return Err(Error::MalformedChords(format!("endpoint {p} used twice")));
                }
                used[p as usize] = true;
            }
            normalized.push((l, r));
        }
        normalized.sort_unstable();
        Ok(Self { pairs: normalized })
    }

    pub(crate) fn from_sorted_trusted(pairs: Vec<(u32, u32)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Self { pairs }
    }

    /// Number of chords.
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }
}

impl TryFrom<Vec<(u32, u32)>> for ChordDiagram {
    type Error = Error;

    fn try_from(pairs: Vec<(u32, u32)>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<ChordDiagram> for Vec<(u32, u32)> {
    fn from(cd: ChordDiagram) -> Self {
        cd.pairs
    }
}

/// Block decomposition of a deal: the `k`-th block ends at the `k`-th red card.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    /// Block lengths `D_{n,1}, ..., D_{n,n}` in deal order.
    pub lengths: Vec<usize>,
    /// `counts[i]` is the number of blocks of length `i`; index 0 is unused.
    pub counts: Vec<u64>,
}

impl BlockProfile {
    pub fn from_lengths(lengths: Vec<usize>) -> Self {
        let max = lengths.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0u64; max + 1];
        for &len in &lengths {
            counts[len] += 1;
        }
        Self { lengths, counts }
    }

    /// `B_{n,i}`, zero past the longest block.
    pub fn count(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    /// Number of even-length blocks, `Y_n`.
    pub fn even_blocks(&self) -> u64 {
        self.counts.iter().step_by(2).skip(1).sum()
    }

    /// `1 + n + sum_{i>=1} sum_{j>=2i+1} B_{n,j}`, the number of good
    /// insertion intervals of the deal.
    pub fn good_intervals(&self) -> u64 {
        let n = self.lengths.len() as u64;
        let extra: u64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(j, &b)| b * ((j as u64).saturating_sub(1) / 2))
            .sum();
        1 + n + extra
    }
}

/// Outcome of optimal perfect-memory play on one deal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameStats {
    /// Number of rounds `G_n`.
    pub length: usize,
    /// Number of lucky moves `L_n`.
    pub lucky: usize,
    /// Position (1-based) of the first red card, `D_{n,1}`.
    pub first_match: usize,
}
