//! Preferential attachment multigraphs from linearized chord diagrams.
//!
//! Scanning the points left to right, each maximal run of points ending at a
//! right endpoint is merged into one vertex; every chord becomes an edge.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sampler::{chords_from_deal, sample_deal_insertion};
use crate::types::ChordDiagram;

/// Loopy multigraph with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAGraph {
    pub vertices: usize,
    /// Edges `[u, v]` with `u <= v`, one per chord in left-endpoint order.
    pub edges: Vec<(usize, usize)>,
    /// Degree of each vertex, loops counting 2.
    pub degrees: Vec<usize>,
}

impl PAGraph {
    /// Number of loops at each vertex.
    pub fn loops(&self) -> Vec<usize> {
        let mut loops = vec![0; self.vertices];
        for &(u, v) in &self.edges {
            if u == v {
                loops[u - 1] += 1;
            }
        }
        loops
    }
}

pub fn build_graph(cd: &ChordDiagram) -> PAGraph {
    let points = 2 * cd.n();
    let mut is_right = vec![false; points + 1];
    for &(_, r) in cd.pairs() {
        is_right[r as usize] = true;
    }
    // owner[p]: 1-based vertex of point p
    let mut owner = vec![0usize; points + 1];
    let mut vertex = 1;
    for p in 1..=points {
        owner[p] = vertex;
        if is_right[p] {
            vertex += 1;
        }
    }
    let vertices = cd.n();
    let mut degrees = vec![0; vertices];
    let edges = cd
        .pairs()
        .iter()
        .map(|&(l, r)| {
            let (u, v) = (owner[l as usize], owner[r as usize]);
            degrees[u - 1] += 1;
            degrees[v - 1] += 1;
            (u.min(v), u.max(v))
        })
        .collect();
    PAGraph {
        vertices,
        edges,
        degrees,
    }
}

/// Degree sequence of `g`, loops counting 2.
pub fn degrees(g: &PAGraph) -> Vec<usize> {
    g.degrees.clone()
}

/// Degrees recounted from the edge list alone.
pub fn degrees_from_edges(g: &PAGraph) -> Vec<usize> {
    let mut d = vec![0; g.vertices];
    for &(u, v) in &g.edges {
        d[u - 1] += 1;
        d[v - 1] += 1;
    }
    d
}

/// `PAG(n)` grown one chord at a time through the insertion sampler.
pub fn grow_graph<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PAGraph> {
    let (deal, _) = sample_deal_insertion(n, rng)?;
    Ok(build_graph(&chords_from_deal(&deal)))
}

/// `(degree, number of vertices)` pairs in increasing degree order.
pub fn degree_histogram(g: &PAGraph) -> Vec<(usize, usize)> {
    let max = g.degrees.iter().copied().max().unwrap_or(0);
    let mut h = vec![0; max + 1];
    for &d in &g.degrees {
        h[d] += 1;
    }
    h.into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect()
}
