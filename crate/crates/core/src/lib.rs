pub mod dirac;
pub mod error;
pub mod khomology;
pub mod ktheory;
pub mod ncalgebra;
pub mod qpoly;
pub mod repspace;

pub use error::{Error, Result};
