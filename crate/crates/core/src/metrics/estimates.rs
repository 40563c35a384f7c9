//! Estimates valid on whole convexity classes, driven by boundary distances.

use crate::error::{Error, Result};
use crate::geometry::{CDirection, CPoint, DomainOracle};

/// Tolerance for `zeta` lying on the complex line through `p` and `q`.
pub const LINE_TOL: f64 = 1e-9;
/// Step used to confirm that `zeta` is approached from inside the domain.
pub const BOUNDARY_PROBE: f64 = 1e-9;

fn check_inside(domain: &DomainOracle, z: &CPoint) -> Result<()> {
    if domain.contains(z)? {
        Ok(())
    } else {
        Err(Error::OutsideDomain)
    }
}

/// `‖v‖ / dist(z; v)`: an upper bound for the Kobayashi metric on any domain.
pub fn metric_upper_bound(domain: &DomainOracle, z: &CPoint, v: &CPoint) -> Result<f64> {
    v.check_dim(domain.dim())?;
    check_inside(domain, z)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    let d = domain.dir_boundary_dist(z, &CDirection::new(v.clone())?)?;
    Ok(if d.is_infinite() { 0.0 } else { v.norm() / d })
}

/// `‖v‖ / (4 dist(z; v))` on C-convex domains.
pub fn metric_lower_bound_cconvex(domain: &DomainOracle, z: &CPoint, v: &CPoint) -> Result<f64> {
    if !domain.convexity().is_c_convex() {
        return Err(Error::ConvexityClass("C-convex"));
    }
    Ok(metric_upper_bound(domain, z, v)? / 4.0)
}

/// `¼ log(1 + ‖p - q‖ / min(dist(p; q - p), dist(q; p - q)))` on C-convex domains.
pub fn distance_lower_bound_cconvex(domain: &DomainOracle, p: &CPoint, q: &CPoint) -> Result<f64> {
    if !domain.convexity().is_c_convex() {
        return Err(Error::ConvexityClass("C-convex"));
    }
    p.check_dim(domain.dim())?;
    q.check_dim(domain.dim())?;
    check_inside(domain, p)?;
    check_inside(domain, q)?;
    if p == q {
        return Ok(0.0);
    }
    let dp = domain.dir_boundary_dist(p, &CDirection::new(q - p)?)?;
    let dq = domain.dir_boundary_dist(q, &CDirection::new(p - q)?)?;
    let m = dp.min(dq);
    if m.is_infinite() {
        return Ok(0.0);
    }
    Ok(0.25 * (p.dist(q) / m).ln_1p())
}

/// Checks that `zeta` is a boundary point on the complex line through `p` and `q`.
pub fn validate_boundary_point(domain: &DomainOracle, p: &CPoint, q: &CPoint, zeta: &CPoint) -> Result<()> {
    zeta.check_dim(domain.dim())?;
    let x = q - p;
    let y = zeta - p;
    // distance from zeta to the line p + C x
    let t = y.hermitian(&x) / x.norm_sqr();
    let off = (&y - &x.scale(t)).norm();
    if off > LINE_TOL * (1.0 + y.norm()) {
        return Err(Error::InvalidBoundaryPoint(format!("off the line by {off:e}")));
    }
    if domain.contains(zeta)? {
        return Err(Error::InvalidBoundaryPoint("point lies inside the domain".into()));
    }
    for anchor in [p, q] {
        let d = anchor - zeta;
        if d.norm() == 0.0 {
            return Err(Error::InvalidBoundaryPoint("coincides with an endpoint".into()));
        }
        let probe = zeta.axpy((BOUNDARY_PROBE / d.norm()).into(), &d);
        if !domain.contains(&probe)? {
            return Err(Error::InvalidBoundaryPoint("not approached from inside along the line".into()));
        }
    }
    Ok(())
}

/// `½ |log(log(‖p-ζ‖/d) / log(‖q-ζ‖/d))|` from the logarithms of the two distances to `zeta`.
pub fn boundary_point_log_bound(ln_dist_p: f64, ln_dist_q: f64, diameter: f64) -> Result<f64> {
    let ln_d = diameter.ln();
    let a = ln_dist_p - ln_d;
    let b = ln_dist_q - ln_d;
    if !(a < 0.0 && b < 0.0) {
        return Err(Error::InvalidArgument("distances to zeta must be below the diameter".into()));
    }
    Ok(0.5 * (a / b).ln().abs())
}

/// Lower bound through a boundary point `zeta` on the line through `p, q`, weakly linearly convex domains.
pub fn distance_lower_bound_wlc(domain: &DomainOracle, p: &CPoint, q: &CPoint, zeta: &CPoint) -> Result<f64> {
    if !domain.convexity().is_weakly_linearly_convex() {
        return Err(Error::ConvexityClass("weakly linearly convex"));
    }
    p.check_dim(domain.dim())?;
    q.check_dim(domain.dim())?;
    check_inside(domain, p)?;
    check_inside(domain, q)?;
    if p == q {
        return Ok(0.0);
    }
    validate_boundary_point(domain, p, q, zeta)?;
    let d = domain.diameter()?;
    boundary_point_log_bound(p.dist(zeta).ln(), q.dist(zeta).ln(), d)
}

/// `½ |log(dist_H(p) / dist_H(q))|` for a domain inside the real half-space
/// `{x : Re <x - support, normal> > 0}`.
pub fn distance_lower_bound_halfspace(support: &CPoint, inward_normal: &CPoint, p: &CPoint, q: &CPoint) -> Result<f64> {
    let n = support.dim();
    for z in [inward_normal, p, q] {
        z.check_dim(n)?;
    }
    if inward_normal.is_zero() {
        return Err(Error::InvalidArgument("zero normal".into()));
    }
    let h = |z: &CPoint| (z - support).real_dot(inward_normal) / inward_normal.norm();
    let (hp, hq) = (h(p), h(q));
    if hp <= 0.0 || hq <= 0.0 {
        return Err(Error::OutsideDomain);
    }
    Ok(0.5 * (hp / hq).ln().abs())
}
