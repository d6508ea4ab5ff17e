//! Finite metric test-spaces and their embeddings.
//!
//! The crate builds binary trees, diamond graphs, weighted diamonds,
//! series-parallel graphs, balls in the infinite dihedral group and glued
//! chains of spaces; turns them into exact finite metrics; embeds weighted
//! diamonds into Euclidean space with bounded distortion; and verifies the
//! combinatorial facts about diamonds (separated sets, exits, generations)
//! by exhaustive computation.

pub mod analysis;
pub mod embed;
pub mod error;
pub mod graphs;
pub mod metric;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
