//! Experiments, file formats and the command-line front end for
//! [`tridac_core`].

pub mod audits;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod output;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
