//! File formats, the seeded Monte Carlo harness and the command-line front end
//! for [`surfmatch_core`].

pub mod cli;
pub mod error;
pub mod formats;
pub mod montecarlo;

pub use error::{CliError, Result};
