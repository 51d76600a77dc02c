//! Synthetic data, file formats and experiment drivers.

mod experiment;
mod generate;
pub mod io;

pub use experiment::*;
pub use generate::{generate, AdversaryStrategy};
