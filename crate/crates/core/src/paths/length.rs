use num_complex::Complex64;

use super::curve::{segment, Curve, U_MAX};
use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainOracle};
use crate::metrics::metric_upper_bound;
use crate::quadrature::{integrate, QuadOptions};

/// `∫ ‖γ'‖ / dist(γ; γ') du` over `[a, b]`: an upper bound for the distance between the endpoints.
pub fn length_upper(domain: &DomainOracle, curve: &Curve, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    let (lo, hi) = curve.truncated(U_MAX);
    let b = if b.is_finite() { b } else { hi };
    if a < lo - 1e-12 || b > hi + 1e-12 {
        return Err(Error::InvalidArgument(format!("[{a}, {b}] not inside the curve interval")));
    }
    integrate(
        |u| {
            let z = curve.point_at(u)?;
            if !domain.contains(&z)? {
                return Err(Error::CurveExitsDomain(u));
            }
            metric_upper_bound(domain, &z, &curve.derivative_at(u)?)
        },
        a,
        b,
        opts,
    )
}

/// `length_upper` of the straight segment from `p` to `q`.
pub fn segment_length_upper(domain: &DomainOracle, p: &CPoint, q: &CPoint, opts: QuadOptions) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    length_upper(domain, &segment(p, q)?, 0.0, 1.0, opts)
}

/// `∫ metric(p + t (q - p); q - p) dt` by a single 15-point Kronrod rule.
pub(crate) fn edge_length<F>(metric: &F, p: &CPoint, dir: &CPoint) -> Result<f64>
where
    F: Fn(&CPoint, &CPoint) -> Result<f64>,
{
    crate::quadrature::kronrod15(|t| metric(&p.axpy(Complex64::new(t, 0.0), dir), dir), 0.0, 1.0)
}
