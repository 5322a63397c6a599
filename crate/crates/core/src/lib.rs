pub mod error;
pub mod lattice;

pub use error::{Error, Rank2Failure, Result};
pub mod seed;
pub mod laurent;
pub mod pullback;
pub mod explorer;
pub mod toric;
pub mod cli;
