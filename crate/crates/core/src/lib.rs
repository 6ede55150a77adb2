//! Tooling for measuring and improving the quality of synthetic
//! grammatical error correction data.

pub mod align;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod corrupt;
pub mod error;
pub mod metrics;
pub mod report;
pub mod resources;
pub mod text;
pub mod typing;

pub use error::{Error, Result};
