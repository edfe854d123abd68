//! Finite simplicial models for homotopy fixed points of Galois actions.
//!
//! Groups are multiplication tables, profinite groups are finite towers of
//! surjections, and spaces are simplicial sets stored up to a truncation
//! dimension. Zero-dimensional schemes enter as finite Galois G-sets.

pub mod catalog;
pub mod classifying;
pub mod cohomology;
pub mod error;
pub mod etale;
pub mod group;
pub mod maps;
pub mod pipeline;
pub mod postnikov;
pub mod sections;
pub mod simplicial;
pub mod workspace;

pub use error::{Error, Result};
