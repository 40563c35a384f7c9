//! Curves, length functionals, lattice upper bounds and quasi-geodesic verification.

mod curve;
mod length;
mod mesh;
mod qg;

pub use curve::{constant, log_radial_curve, radial_geodesic_punctured, segment, tent_curve, Curve, JOIN_TOL, U_MAX};
pub use length::{length_upper, segment_length_upper};
pub use mesh::{distance_upper_mesh, MeshResult, MeshSpec};
pub use qg::{estimate_qg_constants, verify_quasi_geodesic, PairTable, QGReport, QgScan, SampleGrid};

#[cfg(test)]
mod tests;
