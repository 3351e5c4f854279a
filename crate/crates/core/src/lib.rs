pub mod asymptotics;
pub mod counting;
pub mod domains;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod linalg;
pub mod numberfield;
pub mod scalar;
pub mod spectral;
pub mod splitter;
pub mod subspace;
pub mod svg;

pub use error::{Error, Result};
