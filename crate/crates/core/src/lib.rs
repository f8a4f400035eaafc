pub mod cli;
pub mod complex;
pub mod error;
pub mod euler;
pub mod exactla;
pub mod hecke;
pub mod io;
pub mod pathalg;
pub mod perverse;
pub mod sheaf;
pub mod strat;
pub mod toric;

pub use error::{Error, Result};
