//! Thin-triangle evaluation for quasi-geodesic triangles and the four-point statistic.

mod fourpoint;
mod thin;

pub use fourpoint::{delta_fourpoint, delta_from_table, delta_over_quadruples, fourpoint_defect};
pub use thin::{point_to_side_lower, side_lower_from_fn, QGTriangle, SideLower, ThinnessReport, TRIANGLE_JOIN_TOL};

#[cfg(test)]
mod tests;
