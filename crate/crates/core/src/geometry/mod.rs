//! Model domains in `C^n` and the boundary quantities the estimates consume.

mod domain;
mod point;

pub use domain::{ConvexityClass, DirDistance, DirMethod, DomainKind, DomainOracle, Phi, ANGULAR_GRID, BISECTION_REL_TOL, HYPERPLANE_REJECT_TOL};
pub use point::{CDirection, CPoint, Hyperplane};


#[cfg(test)]
mod tests;
