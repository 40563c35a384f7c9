//! Exact Kobayashi metric and distance on the model domains.
//!
//! Normalization: the disc distance is `artanh` of the Möbius quotient, so the
//! metric at the center of the unit disc is `|v|` and the half-plane metric is
//! `|v| / (2 Im z)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::CPoint;

/// `artanh(x)` for `x = D / S` given `1 - x^2 = one_minus_x2`, accurate at both ends.
fn artanh_stable(x: f64, one_minus_x2: f64) -> f64 {
    if x < 0.5 {
        x.atanh()
    } else {
        (1.0 + x).ln() - 0.5 * one_minus_x2.ln()
    }
}

pub fn metric_disc(z: Complex64, v: Complex64, r: f64) -> Result<f64> {
    if z.norm() >= r {
        return Err(Error::OutsideDomain);
    }
    Ok(r * v.norm() / (r * r - z.norm_sqr()))
}

pub fn distance_disc(z: Complex64, w: Complex64, r: f64) -> Result<f64> {
    if z.norm() >= r || w.norm() >= r {
        return Err(Error::OutsideDomain);
    }
    let a = z / r;
    let b = w / r;
    let den = (Complex64::new(1.0, 0.0) - a.conj() * b).norm();
    let x = ((a - b).norm() / den).min(1.0);
    let one_minus = (1.0 - a.norm()) * (1.0 + a.norm()) * (1.0 - b.norm()) * (1.0 + b.norm()) / (den * den);
    Ok(artanh_stable(x, one_minus))
}

pub fn distance_halfplane(u: Complex64, v: Complex64) -> Result<f64> {
    if u.im <= 0.0 || v.im <= 0.0 {
        return Err(Error::OutsideDomain);
    }
    let d = (u - v).norm();
    let s = (u - v.conj()).norm();
    let x = (d / s).min(1.0);
    if x < 0.5 {
        Ok(x.atanh())
    } else {
        Ok((s + d).ln() - 0.5 * (4.0 * u.im * v.im).ln())
    }
}

pub fn metric_punctured_disc(z: Complex64, v: Complex64, r: f64) -> Result<f64> {
    let m = z.norm();
    if m == 0.0 || m >= r {
        return Err(Error::OutsideDomain);
    }
    Ok(v.norm() / (2.0 * m * (r / m).ln()))
}

/// A nonzero complex number stored as `(ln |z|, arg z)`, for points far below `f64` range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogPolar {
    pub ln_abs: f64,
    pub arg: f64,
}

impl LogPolar {
    pub fn new(ln_abs: f64, arg: f64) -> Self {
        LogPolar { ln_abs, arg }
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if z.norm() == 0.0 {
            return Err(Error::InvalidArgument("zero has no logarithm".into()));
        }
        Ok(LogPolar { ln_abs: z.norm().ln(), arg: z.arg() })
    }

    /// The value as `f64`, flushed to zero when it underflows.
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.ln_abs.exp(), self.arg)
    }
}

/// Angle normalized into `[-pi, pi)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let t = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Exact distance on `D(r)_*` through the covering `u -> r e^{iu}` of the upper half-plane.
///
/// The deck-transform infimum is attained at the lift with the angle normalized into
/// `[-pi, pi)`; the neighbouring lifts are checked in debug builds.
pub fn distance_punctured_disc_log(z: LogPolar, w: LogPolar, r: f64) -> Result<f64> {
    let ln_r = r.ln();
    if !(z.ln_abs < ln_r && w.ln_abs < ln_r) || z.ln_abs.is_infinite() || w.ln_abs.is_infinite() {
        return Err(Error::OutsideDomain);
    }
    let phi = normalize_angle(w.arg - z.arg);
    let u = Complex64::new(0.0, ln_r - z.ln_abs);
    let v = Complex64::new(phi, ln_r - w.ln_abs);
    let k0 = distance_halfplane(u, v)?;
    debug_assert!({
        let kp = distance_halfplane(u, v + 2.0 * PI)?;
        let km = distance_halfplane(u, v - 2.0 * PI)?;
        kp >= k0 - 1e-12 && km >= k0 - 1e-12
    });
    Ok(k0)
}

pub fn distance_punctured_disc(z: Complex64, w: Complex64, r: f64) -> Result<f64> {
    if z.norm() == 0.0 || w.norm() == 0.0 {
        return Err(Error::OutsideDomain);
    }
    distance_punctured_disc_log(LogPolar::from_complex(z)?, LogPolar::from_complex(w)?, r)
}

/// `½ |log(log|w| / log|z|)|`, which never exceeds the punctured-disc distance.
pub fn lower_bound_punctured_log(z: Complex64, w: Complex64) -> Result<f64> {
    let (a, b) = (z.norm(), w.norm());
    if a == 0.0 || b == 0.0 || a >= 1.0 || b >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    Ok(0.5 * (b.ln() / a.ln()).ln().abs())
}

/// `½ |log(ln_w / ln_z)|` from the logarithms of the moduli.
pub fn lower_bound_punctured_log_from_ln(ln_z: f64, ln_w: f64) -> Result<f64> {
    if !(ln_z < 0.0 && ln_w < 0.0) {
        return Err(Error::OutsideDomain);
    }
    Ok(0.5 * (ln_w / ln_z).ln().abs())
}

/// Distance in the unit disc between the real points `1 - e^{ln_a}` and `1 - e^{ln_b}`.
///
/// Stays accurate when both points sit far closer to `1` than `f64` resolves.
pub fn distance_disc_depth(ln_a: f64, ln_b: f64) -> Result<f64> {
    let ln2 = std::f64::consts::LN_2;
    if !(ln_a < ln2 && ln_b < ln2) || ln_a.is_infinite() || ln_b.is_infinite() {
        return Err(Error::OutsideDomain);
    }
    let depth = |l: f64| 0.5 * ((-0.5 * l.exp()).ln_1p() + ln2 - l);
    Ok((depth(ln_a) - depth(ln_b)).abs())
}

fn unit_ball_coords(z: &CPoint, center: &CPoint, radius: f64) -> CPoint {
    (z - center).scale_real(1.0 / radius)
}

/// Exact Kobayashi metric of the ball `B(center, radius)`.
pub fn metric_ball(center: &CPoint, radius: f64, z: &CPoint, v: &CPoint) -> Result<f64> {
    let a = unit_ball_coords(z, center, radius);
    let vv = v.scale_real(1.0 / radius);
    let s = 1.0 - a.norm_sqr();
    if s <= 0.0 {
        return Err(Error::OutsideDomain);
    }
    Ok((vv.norm_sqr() / s + vv.hermitian(&a).norm_sqr() / (s * s)).sqrt())
}

/// Exact Kobayashi distance of the ball `B(center, radius)`.
pub fn distance_ball(center: &CPoint, radius: f64, z: &CPoint, w: &CPoint) -> Result<f64> {
    let a = unit_ball_coords(z, center, radius);
    let b = unit_ball_coords(w, center, radius);
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na >= 1.0 || nb >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    let den = (Complex64::new(1.0, 0.0) - a.hermitian(&b)).norm_sqr();
    // |a|^2 |b|^2 - |<a,b>|^2 through the Lagrange identity
    let n = a.dim();
    let mut wedge = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            wedge += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    let x2 = (((&a - &b).norm_sqr() - wedge) / den).clamp(0.0, 1.0);
    let one_minus = (1.0 - na) * (1.0 - nb) / den;
    Ok(artanh_stable(x2.sqrt(), one_minus))
}

/// `coth k`: the factor converting a global metric bound into a local one.
pub fn localization_multiplier(k_lower_to_complement: f64) -> Result<f64> {
    if !(k_lower_to_complement > 0.0) {
        return Err(Error::InvalidArgument("localization needs a positive distance to the complement".into()));
    }
    Ok(1.0 / k_lower_to_complement.tanh())
}
