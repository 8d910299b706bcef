//! File formats, OpenQASM export, the experiment runner and the `teleclone`
//! command line, on top of `teleclone-core`.

mod error;
pub mod experiment;
pub mod formats;
pub mod qasm;

pub use error::{Error, Result};
