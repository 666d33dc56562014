pub mod born_inversion;
pub mod cli;
pub mod error;
pub mod io;
pub mod numerics;
pub mod potentials;
pub mod radial;
pub mod random;
pub mod piecewise_inversion;
pub mod special;
pub mod suites;
pub mod zero_lines;

pub use error::{Error, Result, Side};
