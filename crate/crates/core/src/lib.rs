//! Kobayashi metric estimates, quasi-geodesics and Gromov-hyperbolicity witnesses
//! for model domains in `C^n`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hyperbolicity;
pub mod metrics;
pub mod paths;
pub mod quadrature;

pub use error::{Error, Result};
