//! Kobayashi metric and distance: exact model formulas, class-wide estimates and the dispatcher.

mod bound;
mod dispatch;
mod estimates;
mod model;

pub use bound::{distance_product, BoundValue, Source};
pub use dispatch::{exact_distance, kobayashi_distance, metric_upper, Dispatcher, Strategy};
pub use estimates::{
    boundary_point_log_bound, distance_lower_bound_cconvex, distance_lower_bound_halfspace, distance_lower_bound_wlc,
    metric_lower_bound_cconvex, metric_upper_bound, validate_boundary_point, BOUNDARY_PROBE, LINE_TOL,
};
pub use model::{
    distance_ball, distance_disc, distance_disc_depth, distance_halfplane, distance_punctured_disc, distance_punctured_disc_log,
    localization_multiplier, lower_bound_punctured_log, lower_bound_punctured_log_from_ln, metric_ball, metric_disc,
    metric_punctured_disc, normalize_angle, LogPolar,
};
