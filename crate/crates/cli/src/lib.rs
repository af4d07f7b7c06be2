//! Command-line pipeline: synthesize or load corpora, tag them, compare the
//! groups, train and evaluate a forest and explain its predictions. Every
//! command writes plain CSV/JSON files plus a manifest of content hashes.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;

pub use args::RunConfig;
pub use commands::{
    cmd_analyze, cmd_explain, cmd_synth, cmd_tag, cmd_train_eval, cmd_train_tagger, run,
};
pub use error::{CliError, CliResult};
