pub mod angle;
pub mod biortho;
pub mod config;
pub mod error;
pub mod experiment;
pub mod gauge;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod operator;
pub mod oracle;
pub mod params;
pub mod pump;
pub mod spectral;
pub mod verify;
pub mod walk1d;
pub mod walk2d;

pub use error::{Error, Result};
