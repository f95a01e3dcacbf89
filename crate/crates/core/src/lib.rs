//! Pseudospectral tools for Q-type function spaces on the periodic box.

pub mod cli;
pub mod embed;
pub mod error;
pub mod field;
pub mod gen;
pub mod io;
pub mod kernel;
pub mod norms;
pub mod ns;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{Grid, ScalarField, SpectralField, VectorField};
