//! Continuous shearlet transform on sampled 2D fields.

pub mod analysis;
pub mod coeffspace;
pub mod distributions;
pub mod error;
pub mod field;
pub mod generator;
pub mod group;
pub mod jet;
pub mod lizorkin;
pub mod oracle;
pub mod quadrature;
pub mod synthesis;

pub use error::{Result, ShearError};
