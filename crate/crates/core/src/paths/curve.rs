use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainOracle};

/// Default truncation of infinite parameter intervals.
pub const U_MAX: f64 = 6.0;
/// Tolerance for matching endpoints when concatenating.
pub const JOIN_TOL: f64 = 1e-12;

type PointFn = Arc<dyn Fn(f64) -> CPoint + Send + Sync>;

/// A piecewise C¹ curve `[a, b] -> C^n`; `b` may be infinite.
#[derive(Clone)]
pub struct Curve {
    a: f64,
    b: f64,
    dim: usize,
    point: PointFn,
    derivative: Option<PointFn>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve").field("interval", &(self.a, self.b)).field("dim", &self.dim).finish()
    }
}

impl Curve {
    pub fn new<F>(a: f64, b: f64, point: F) -> Result<Self>
    where
        F: Fn(f64) -> CPoint + Send + Sync + 'static,
    {
        if !(a.is_finite() && a <= b) || b.is_nan() {
            return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
        }
        let dim = point(a).dim();
        Ok(Curve { a, b, dim, point: Arc::new(point), derivative: None })
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> CPoint + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// The interval with an infinite end replaced by `u_max`.
    pub fn truncated(&self, u_max: f64) -> (f64, f64) {
        (self.a, if self.b.is_finite() { self.b } else { u_max.max(self.a) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    fn check_param(&self, u: f64) -> Result<()> {
        if u < self.a - JOIN_TOL || u > self.b + JOIN_TOL || u.is_nan() {
            return Err(Error::InvalidArgument(format!("parameter {u} outside [{}, {}]", self.a, self.b)));
        }
        Ok(())
    }

    pub fn point_at(&self, u: f64) -> Result<CPoint> {
        self.check_param(u)?;
        Ok((self.point)(u.clamp(self.a, self.b)))
    }

    /// Analytic when available, else a central difference with step `1e-6 (1 + |u|)`,
    /// one-sided at the ends of the interval.
    pub fn derivative_at(&self, u: f64) -> Result<CPoint> {
        self.check_param(u)?;
        let u = u.clamp(self.a, self.b);
        if let Some(d) = &self.derivative {
            return Ok(d(u));
        }
        let h = 1e-6 * (1.0 + u.abs());
        let lo = (u - h).max(self.a);
        let hi = (u + h).min(self.b);
        if hi <= lo {
            return Ok(CPoint::origin(self.dim));
        }
        let diff = &(self.point)(hi) - &(self.point)(lo);
        Ok(diff.scale_real(1.0 / (hi - lo)))
    }

    /// Checks `n` evenly spaced samples of the (truncated) interval against the domain.
    pub fn check_inside(&self, domain: &DomainOracle, samples: usize) -> Result<()> {
        let (a, b) = self.truncated(U_MAX);
        let n = samples.max(2);
        for i in 0..n {
            let u = a + (b - a) * i as f64 / (n - 1) as f64;
            if !domain.contains(&self.point_at(u)?)? {
                return Err(Error::CurveExitsDomain(u));
            }
        }
        Ok(())
    }

    /// `u -> self(scale * u + shift)` on the preimage interval; `scale > 0`.
    pub fn reparam(&self, scale: f64, shift: f64) -> Result<Curve> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("reparametrization scale must be positive".into()));
        }
        let a = (self.a - shift) / scale;
        let b = (self.b - shift) / scale;
        let p = self.point.clone();
        let mut c = Curve { a, b, dim: self.dim, point: Arc::new(move |u| p(scale * u + shift)), derivative: None };
        if let Some(d) = self.derivative.clone() {
            c.derivative = Some(Arc::new(move |u| d(scale * u + shift).scale_real(scale)));
        }
        Ok(c)
    }

    /// The same curve restricted to a subinterval.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Curve> {
        self.check_param(a)?;
        self.check_param(b)?;
        if a > b {
            return Err(Error::InvalidArgument("empty restriction".into()));
        }
        Ok(Curve { a, b, ..self.clone() })
    }

    /// `u -> self(a + b - u)`; the interval must be finite.
    pub fn reverse(&self) -> Result<Curve> {
        if !self.b.is_finite() {
            return Err(Error::InvalidArgument("cannot reverse an infinite curve".into()));
        }
        let (s, p) = (self.a + self.b, self.point.clone());
        let mut c = Curve { point: Arc::new(move |u| p(s - u)), derivative: None, ..self.clone() };
        if let Some(d) = self.derivative.clone() {
            c.derivative = Some(Arc::new(move |u| d(s - u).scale_real(-1.0)));
        }
        Ok(c)
    }

    /// Runs `self` on `[0, len]` then `other`; the pieces are shifted to start at `0` and at `len`.
    pub fn concat(pieces: &[Curve]) -> Result<Curve> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidArgument("nothing to concatenate".into()));
        };
        let mut starts = Vec::with_capacity(pieces.len());
        let mut t = 0.0;
        for (i, c) in pieces.iter().enumerate() {
            if c.dim != first.dim {
                return Err(Error::DimensionMismatch { expected: first.dim, got: c.dim });
            }
            if !c.b.is_finite() && i + 1 < pieces.len() {
                return Err(Error::InvalidArgument("only the last piece may be infinite".into()));
            }
            if i > 0 {
                let prev = &pieces[i - 1];
                let gap = (prev.point)(prev.b).dist(&(c.point)(c.a));
                if gap > JOIN_TOL {
                    return Err(Error::EndpointMismatch(gap));
                }
            }
            starts.push(t);
            t += c.b - c.a;
        }
        let total = t;
        let pieces: Arc<Vec<Curve>> = Arc::new(pieces.to_vec());
        let starts = Arc::new(starts);
        let locate = {
            let starts = starts.clone();
            move |u: f64| starts.partition_point(|s| *s <= u).saturating_sub(1)
        };
        let (ps, loc) = (pieces.clone(), locate.clone());
        let st = starts.clone();
        let point = move |u: f64| {
            let i = loc(u);
            let c = &ps[i];
            (c.point)((c.a + u - st[i]).min(c.b))
        };
        let (ps, loc, st) = (pieces.clone(), locate, starts.clone());
        let deriv = move |u: f64| {
            let i = loc(u);
            let c = &ps[i];
            c.derivative_at((c.a + u - st[i]).min(c.b)).unwrap()
        };
        Ok(Curve { a: 0.0, b: total, dim: first.dim, point: Arc::new(point), derivative: Some(Arc::new(deriv)) })
    }

    /// Parameters where the pieces of a concatenation meet, for quadrature splitting.
    pub fn segment_points(pieces: &[Curve]) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = vec![0.0];
        for c in pieces {
            t += c.b - c.a;
            out.push(t);
        }
        out
    }
}

/// `u -> zeta + e^{-2u} (p - zeta)` on `[0, inf)`.
pub fn tent_curve(zeta: &CPoint, p: &CPoint) -> Result<Curve> {
    p.check_dim(zeta.dim())?;
    let d = p - zeta;
    if d.is_zero() {
        return Err(Error::InvalidArgument("tent curve needs p != zeta".into()));
    }
    let (z, d2) = (zeta.clone(), d.clone());
    Ok(Curve::new(0.0, f64::INFINITY, move |u| z.axpy(Complex64::new((-2.0 * u).exp(), 0.0), &d))?
        .with_derivative(move |u| d2.scale_real(-2.0 * (-2.0 * u).exp())))
}

/// `u -> e^{1 - e^{2u}} p` on `[0, inf)`.
pub fn log_radial_curve(p: &CPoint) -> Result<Curve> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("log-radial curve needs p != 0".into()));
    }
    let (p1, p2) = (p.clone(), p.clone());
    Ok(Curve::new(0.0, f64::INFINITY, move |u| p1.scale_real((1.0 - (2.0 * u).exp()).exp()))?
        .with_derivative(move |u| p2.scale_real(-2.0 * (2.0 * u).exp() * (1.0 - (2.0 * u).exp()).exp())))
}

/// `u -> e^{-e^{2u}}` in the punctured unit disc, on `[0, inf)`.
pub fn radial_geodesic_punctured() -> Curve {
    Curve::new(0.0, f64::INFINITY, |u| CPoint::real(&[(-(2.0 * u).exp()).exp()]).unwrap())
        .unwrap()
        .with_derivative(|u| CPoint::real(&[-2.0 * (2.0 * u).exp() * (-(2.0 * u).exp()).exp()]).unwrap())
}

/// `u -> p + u (q - p)` on `[0, 1]`.
pub fn segment(p: &CPoint, q: &CPoint) -> Result<Curve> {
    q.check_dim(p.dim())?;
    let d = q - p;
    let (p1, d1) = (p.clone(), d.clone());
    Ok(Curve::new(0.0, 1.0, move |u| p1.axpy(Complex64::new(u, 0.0), &d1))?.with_derivative(move |_| d.clone()))
}

pub fn constant(p: &CPoint, a: f64, b: f64) -> Result<Curve> {
    let (p1, n) = (p.clone(), p.dim());
    Ok(Curve::new(a, b, move |_| p1.clone())?.with_derivative(move |_| CPoint::origin(n)))
}
