//! Driver for orbit decompositions, surveys, single-orbit artifacts and golden
//! checks. The binary in `main.rs` is a thin clap front end over [`commands`].

pub mod commands;
pub mod config;
pub mod store;

pub use commands::{CmdResult, Failure};
pub use config::Config;
pub use store::{StoredRecord, SurveyStore};
