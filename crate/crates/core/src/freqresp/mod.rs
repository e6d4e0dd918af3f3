//! Frequency sweeps, S-parameter conversion, response comparison and
//! export.

mod compare;
mod export;
mod grid;
mod response;
mod sparams;

pub use compare::*;
pub use export::*;
pub use grid::*;
pub use response::*;
pub use sparams::*;
