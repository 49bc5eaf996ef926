pub mod bubble;
pub mod cli;
pub mod error;
pub mod energy;
pub mod fit;
pub mod fraclap;
pub mod integrals;
pub mod lattice;
pub mod mc;
pub mod params;
pub mod pohozaev;
pub mod potential;
pub mod quadrature;
pub mod residual;
pub mod special;

pub use error::{Error, Result};
