//! Minimum Manhattan networks: exact oracles, the k-planes approximation and
//! the recursive grid algorithm, with verifiers and instance generators.

pub mod cli;
pub mod connectivity;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod hanan;
pub mod instances;
pub mod kplanes;
pub mod mmn2d;
pub mod oracle;
pub mod piercing;
pub mod steiner;

pub use error::{Error, Result};
pub use geometry::{Coord, Network, Point, Segment};
