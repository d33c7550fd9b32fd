//! Optimal perfect-memory play.
//!
//! Cards are flipped left to right. Before a round, if the player knows both
//! positions of a label (one seen last round, one earlier) that pair is
//! removed and the round ends. Otherwise the first unflipped card is turned;
//! if its partner was seen before, the partner is turned as well and the
//! pair removed; if not, the next unflipped card is turned. A lucky move is a
//! round whose two fresh cards match.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Deal, GameStats};

/// One round of play. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub round: usize,
    pub flipped: Vec<usize>,
    pub removed: Option<u32>,
    pub lucky: bool,
}

const UNSEEN: usize = usize::MAX;

fn simulate(deal: &Deal, mut trace: Option<&mut Vec<Move>>) -> GameStats {
    let labels = deal.labels();
    let n = deal.n();
    // first_seen[label] is the 0-based position of the first flipped copy
    let mut first_seen = vec![UNSEEN; n + 1];
    let mut next = 0;
    // (label, earlier position, position flipped last round)
    let mut known_pair: Option<(u32, usize, usize)> = None;
    let mut removed = 0;
    let mut rounds = 0;
    let mut lucky = 0;
    let mut first_match = 0;

    let note_second = |pos: usize, first_match: &mut usize| {
        if *first_match == 0 {
            *first_match = pos + 1;
        }
    };

    while removed < n {
        rounds += 1;
        if let Some((label, a, b)) = known_pair.take() {
            removed += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push(Move {
                    round: rounds,
                    flipped: vec![a + 1, b + 1],
                    removed: Some(label),
                    lucky: false,
                });
            }
            continue;
        }

        let first = next;
        next += 1;
        let label = labels[first];
        let earlier = first_seen[label as usize];
        if earlier != UNSEEN {
            note_second(first, &mut first_match);
            removed += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push(Move {
                    round: rounds,
                    flipped: vec![first + 1, earlier + 1],
                    removed: Some(label),
                    lucky: false,
                });
            }
            continue;
        }
        first_seen[label as usize] = first;

        let second = next;
        next += 1;
        let other = labels[second];
        let mut mv = Move {
            round: rounds,
            flipped: vec![first + 1, second + 1],
            removed: None,
            lucky: false,
        };
        if other == label {
            note_second(second, &mut first_match);
            lucky += 1;
            removed += 1;
            mv.removed = Some(label);
            mv.lucky = true;
        } else if first_seen[other as usize] != UNSEEN {
            note_second(second, &mut first_match);
            known_pair = Some((other, first_seen[other as usize], second));
        } else {
            first_seen[other as usize] = second;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(mv);
        }
    }

    GameStats {
        length: rounds,
        lucky,
        first_match,
    }
}

/// Plays the optimal strategy and returns `G_n`, `L_n` and `D_{n,1}`.
pub fn play(deal: &Deal) -> GameStats {
    simulate(deal, None)
}

/// Like [`play`], also returning the per-round trace.
pub fn play_traced(deal: &Deal) -> (GameStats, Vec<Move>) {
    let mut trace = Vec::with_capacity(2 * deal.n());
    let stats = simulate(deal, Some(&mut trace));
    (stats, trace)
}

/// Plays a raw label sequence, rejecting malformed deals.
pub fn play_labels(labels: &[u32]) -> Result<GameStats> {
    let deal = Deal::new(labels.to_vec()).map_err(|e| match e {
        Error::EmptyDeal => Error::MalformedDeal("empty deal".into()),
        other => other,
    })?;
    Ok(play(&deal))
}

/// Checks `2 G_n = 3n + Y_n - 2 L_n` exactly, where `Y_n` counts even blocks.
pub fn verify_length_identity(deal: &Deal) -> bool {
    let stats = play(deal);
    let y = crate::sampler::blocks(deal).even_blocks() as i64;
    2 * stats.length as i64 == 3 * deal.n() as i64 + y - 2 * stats.lucky as i64
}
