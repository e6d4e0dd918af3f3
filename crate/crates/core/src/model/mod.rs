mod manifest;
mod mna;
mod mtx;
mod netlist;
mod system;

pub use manifest::*;
pub use mna::*;
pub use mtx::*;
pub use netlist::*;
pub use system::*;
