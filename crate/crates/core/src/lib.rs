//! Memory-game statistics: exact block laws, uniform samplers for deals and
//! chord diagrams, the urn with immigration, preferential attachment graphs
//! and a reproducible Monte Carlo harness.

pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod fenwick;
pub mod game;
pub mod harness;
pub mod limits;
pub mod pagraph;
pub mod rng;
pub mod sampler;
pub mod types;
pub mod urn;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use rng::RngStream;
pub use types::{BlockProfile, ChordDiagram, Deal, GameStats};
