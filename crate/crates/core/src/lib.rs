//! Part-of-speech feature analysis for two-group text corpora.
//!
//! The pipeline runs raw or pre-tagged posts through a PTB tagger, turns
//! each post into a 22-dimensional frequency vector, compares the groups
//! with Welch t-tests and G² keyness, fits a class-weighted random forest
//! and attributes its predictions with exact tree Shapley values.

pub mod corpus;
pub mod error;
pub mod explain;
pub mod features;
pub mod model;
pub mod stats;
pub mod synth;
pub mod tagger;

pub use error::{Error, Result};
