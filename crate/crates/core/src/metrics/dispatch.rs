//! Bound selection: combines every applicable estimate for a domain into one interval.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bound::{distance_product, Accumulator, BoundValue, Source};
use super::estimates::{distance_lower_bound_cconvex, distance_lower_bound_wlc, metric_upper_bound};
use super::model::*;
use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainKind, DomainOracle, Hyperplane};
use crate::paths::{distance_upper_mesh, segment_length_upper, MeshSpec};
use crate::quadrature::QuadOptions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Strategy {
    pub use_mesh: bool,
    pub mesh: MeshSpec,
    /// Boundary point on the line through the two arguments, for the boundary-point bound.
    pub zeta: Option<CPoint>,
    pub chord: bool,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy { use_mesh: false, mesh: MeshSpec::default(), zeta: None, chord: true }
    }
}

impl Strategy {
    pub fn with_mesh() -> Self {
        Strategy { use_mesh: true, ..Strategy::default() }
    }
}

/// Distance dispatcher with a memo for mesh results.
#[derive(Debug, Default)]
pub struct Dispatcher {
    strategy: Strategy,
    mesh_cache: Mutex<HashMap<String, f64>>,
}

impl Dispatcher {
    pub fn new(strategy: Strategy) -> Self {
        Dispatcher { strategy, mesh_cache: Mutex::new(HashMap::new()) }
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn distance(&self, domain: &DomainOracle, p: &CPoint, q: &CPoint) -> Result<BoundValue> {
        p.check_dim(domain.dim())?;
        q.check_dim(domain.dim())?;
        if !domain.contains(p)? || !domain.contains(q)? {
            return Err(Error::OutsideDomain);
        }
        if p == q {
            return Ok(BoundValue::exact(0.0));
        }
        if let Some(v) = exact_distance(domain, p, q)? {
            return Ok(v);
        }
        let mut acc = Accumulator::new();
        self.collect(domain, p, q, &mut acc)?;
        if let Some(zeta) = &self.strategy.zeta {
            if domain.convexity().is_weakly_linearly_convex() {
                acc.lower(distance_lower_bound_wlc(domain, p, q, zeta)?, Source::BoundaryPointLog);
            }
        }
        let marching = matches!(domain.kind(), DomainKind::Hartogs { .. });
        if self.strategy.chord && !marching && chord_inside(domain, p, q) {
            acc.upper(segment_length_upper(domain, p, q, QuadOptions::default())?, Source::ChordLength);
        }
        if self.strategy.use_mesh {
            acc.upper(self.mesh(domain, p, q)?, Source::Mesh);
        }
        acc.finish()
    }

    fn mesh(&self, domain: &DomainOracle, p: &CPoint, q: &CPoint) -> Result<f64> {
        let key = format!("{domain:?}|{p:?}|{q:?}|{:?}", self.strategy.mesh);
        if let Some(v) = self.mesh_cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = distance_upper_mesh(domain, p, q, &self.strategy.mesh)?.value;
        self.mesh_cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    fn collect(&self, domain: &DomainOracle, p: &CPoint, q: &CPoint, acc: &mut Accumulator) -> Result<()> {
        match domain.kind() {
            DomainKind::CoordinateDiscHull { radii } => {
                acc.lower(distance_lower_bound_cconvex(domain, p, q)?, Source::ChordDistance);
                let outer = DomainOracle::polydisc(radii.clone())?;
                acc.lower(exact_distance(&outer, p, q)?.unwrap().lower, Source::Inclusion);
                let rho = 1.0 / radii.iter().map(|r| r.powi(-2)).sum::<f64>().sqrt();
                let o = CPoint::origin(radii.len());
                if p.norm() < rho && q.norm() < rho {
                    acc.upper(distance_ball(&o, rho, p, q)?, Source::Inclusion);
                }
            }
            DomainKind::MinusHyperplanes { base, removed } => {
                let b = self.distance(base, p, q)?;
                acc.lower(b.lower, Source::Inclusion);
                for h in removed {
                    if let Some(v) = projection_lower(base, h, p, q)? {
                        acc.lower(v, Source::HyperplaneProjection);
                    }
                }
                if let Some(v) = slice_upper(base, removed, p, q)? {
                    acc.upper(v, Source::SliceModel);
                }
            }
            DomainKind::LocalizedRemoval { base, line, .. } => {
                let b = self.distance(base, p, q)?;
                acc.lower(b.lower, Source::Inclusion);
                let inner = DomainOracle::minus_hyperplanes((**base).clone(), vec![line.clone()])?;
                if inner.contains(p)? && inner.contains(q)? {
                    let v = self.distance(&inner, p, q)?;
                    acc.upper(v.upper, Source::Inclusion);
                }
            }
            DomainKind::Hartogs { base, .. } => {
                let (r_in, r_out) = domain.hartogs_radii().unwrap();
                let outer = DomainOracle::product(vec![(**base).clone(), DomainOracle::punctured_disc(r_out)?])?;
                acc.lower(self.distance(&outer, p, q)?.lower, Source::Inclusion);
                let inner = DomainOracle::product(vec![(**base).clone(), DomainOracle::punctured_disc(r_in)?])?;
                if inner.contains(p)? && inner.contains(q)? {
                    acc.upper(self.distance(&inner, p, q)?.upper, Source::Inclusion);
                }
            }
            DomainKind::Product(fs) => {
                let mut parts = Vec::with_capacity(fs.len());
                let mut off = 0;
                for f in fs {
                    let k = f.dim();
                    parts.push(self.distance(f, &p.slice(off, off + k), &q.slice(off, off + k))?);
                    off += k;
                }
                let v = distance_product(&parts)?;
                acc.lower(v.lower, v.lower_source);
                acc.upper(v.upper, v.upper_source);
            }
            _ => unreachable!("model domains are handled exactly"),
        }
        Ok(())
    }
}

/// Convenience wrapper without memoization across calls.
pub fn kobayashi_distance(domain: &DomainOracle, p: &CPoint, q: &CPoint, strategy: &Strategy) -> Result<BoundValue> {
    Dispatcher::new(strategy.clone()).distance(domain, p, q)
}

/// Closed-form distance on the model domains, `None` elsewhere.
pub fn exact_distance(domain: &DomainOracle, p: &CPoint, q: &CPoint) -> Result<Option<BoundValue>> {
    let v = match domain.kind() {
        DomainKind::Disc { radius } => distance_disc(p[0], q[0], *radius)?,
        DomainKind::PuncturedDisc { radius } => distance_punctured_disc(p[0], q[0], *radius)?,
        DomainKind::HalfPlane => distance_halfplane(p[0], q[0])?,
        DomainKind::Ball { center, radius } => distance_ball(center, *radius, p, q)?,
        DomainKind::Polydisc { radii } => {
            let mut m: f64 = 0.0;
            for (j, r) in radii.iter().enumerate() {
                m = m.max(distance_disc(p[j], q[j], *r)?);
            }
            m
        }
        DomainKind::Product(fs) => {
            let mut m: f64 = 0.0;
            let mut off = 0;
            for f in fs {
                let k = f.dim();
                match exact_distance(f, &p.slice(off, off + k), &q.slice(off, off + k))? {
                    Some(b) => m = m.max(b.lower),
                    None => return Ok(None),
                }
                off += k;
            }
            m
        }
        _ => return Ok(None),
    };
    Ok(Some(BoundValue::exact(v)))
}

/// `sup |<a,z> - b|` over the domain, for domains where it is explicit.
fn functional_radius(base: &DomainOracle, h: &Hyperplane) -> Option<f64> {
    let a = h.normal();
    let b = h.offset();
    match base.kind() {
        DomainKind::Ball { center, radius } => Some(h.residual(center).norm() + radius * a.norm()),
        DomainKind::Disc { radius } => Some(b.norm() + radius * a[0].norm()),
        DomainKind::Polydisc { radii } => Some(b.norm() + a.coords().iter().zip(radii).map(|(x, r)| x.norm() * r).sum::<f64>()),
        DomainKind::CoordinateDiscHull { radii } => {
            Some(b.norm() + a.coords().iter().zip(radii).map(|(x, r)| x.norm() * r).fold(0.0, f64::max))
        }
        _ => None,
    }
}

/// Pushes forward by `z -> <a,z> - b` into a punctured disc.
fn projection_lower(base: &DomainOracle, h: &Hyperplane, p: &CPoint, q: &CPoint) -> Result<Option<f64>> {
    let Some(rho) = functional_radius(base, h) else { return Ok(None) };
    let (fp, fq) = (h.residual(p), h.residual(q));
    Ok(distance_punctured_disc(fp, fq, rho).ok())
}

/// Affine slice of a ball: `p + lambda x` lies in the ball iff `|lambda - center| < radius`.
pub(crate) fn ball_slice(center: &CPoint, radius: f64, p: &CPoint, x: &CPoint) -> Option<(Complex64, f64)> {
    let y = p - center;
    let nx = x.norm_sqr();
    let t = y.hermitian(x);
    let lam0 = -t / nx;
    let r2 = (radius * radius - y.norm_sqr() + t.norm_sqr() / nx) / nx;
    (r2 > 0.0).then(|| (lam0, r2.sqrt()))
}

/// Punctures of the slice `p + lambda x`, in normalized slice coordinates.
fn slice_punctures(removed: &[Hyperplane], p: &CPoint, x: &CPoint, lam0: Complex64, rho: f64) -> Vec<Complex64> {
    removed
        .iter()
        .filter_map(|h| h.line_hit(p, x))
        .map(|l| (l - lam0) / rho)
        .filter(|m| m.norm() < 1.0 - 1e-9)
        .collect()
}

fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Exact distance of the complex-line slice when it is a disc with at most one puncture.
fn slice_upper(base: &DomainOracle, removed: &[Hyperplane], p: &CPoint, q: &CPoint) -> Result<Option<f64>> {
    let DomainKind::Ball { center, radius } = base.kind() else { return Ok(None) };
    let x = q - p;
    let Some((lam0, rho)) = ball_slice(center, *radius, p, &x) else { return Ok(None) };
    let mp = -lam0 / rho;
    let mq = (Complex64::new(1.0, 0.0) - lam0) / rho;
    let holes = slice_punctures(removed, p, &x, lam0, rho);
    match holes.as_slice() {
        [] => Ok(Some(distance_disc(mp, mq, 1.0)?)),
        [h] => Ok(Some(distance_punctured_disc(mobius(*h, mp), mobius(*h, mq), 1.0)?)),
        _ => Ok(None),
    }
}

/// Whether the straight segment `[p, q]` stays inside the domain.
pub(crate) fn chord_inside(domain: &DomainOracle, p: &CPoint, q: &CPoint) -> bool {
    let x = q - p;
    let hits = |hs: &[Hyperplane]| {
        hs.iter().any(|h| match h.line_hit(p, &x) {
            Some(l) => l.im.abs() < 1e-12 && (0.0..=1.0).contains(&l.re),
            None => false,
        })
    };
    match domain.kind() {
        DomainKind::Disc { .. } | DomainKind::HalfPlane | DomainKind::Ball { .. } | DomainKind::Polydisc { .. } => true,
        DomainKind::CoordinateDiscHull { .. } => true,
        DomainKind::PuncturedDisc { .. } => {
            let t = -(p[0] * x[0].conj()).re / x[0].norm_sqr();
            !(0.0..=1.0).contains(&t) || (p[0] + x[0] * t).norm() > 0.0
        }
        DomainKind::MinusHyperplanes { base, removed } => chord_inside(base, p, q) && !hits(removed),
        DomainKind::LocalizedRemoval { base, line, .. } => {
            chord_inside(base, p, q) && !(hits(std::slice::from_ref(line)) && !sample_segment(domain, p, q))
        }
        DomainKind::Product(fs) => {
            let mut off = 0;
            fs.iter().all(|f| {
                let k = f.dim();
                let r = chord_inside(f, &p.slice(off, off + k), &q.slice(off, off + k));
                off += k;
                r
            })
        }
        DomainKind::Hartogs { .. } => sample_segment(domain, p, q),
    }
}

fn sample_segment(domain: &DomainOracle, p: &CPoint, q: &CPoint) -> bool {
    let x = q - p;
    (0..=512).all(|i| domain.contains(&p.axpy(Complex64::new(i as f64 / 512.0, 0.0), &x)).unwrap_or(false))
}

/// The tightest available upper bound for the Kobayashi metric at `z` in direction `v`.
pub fn metric_upper(domain: &DomainOracle, z: &CPoint, v: &CPoint) -> Result<(f64, Source)> {
    if v.is_zero() {
        return Ok((0.0, Source::Trivial));
    }
    let exact = match domain.kind() {
        DomainKind::Disc { radius } => Some(metric_disc(z[0], v[0], *radius)?),
        DomainKind::PuncturedDisc { radius } => Some(metric_punctured_disc(z[0], v[0], *radius)?),
        DomainKind::HalfPlane => {
            if z[0].im <= 0.0 {
                return Err(Error::OutsideDomain);
            }
            Some(v[0].norm() / (2.0 * z[0].im))
        }
        DomainKind::Ball { center, radius } => Some(metric_ball(center, *radius, z, v)?),
        DomainKind::Polydisc { radii } => {
            let mut m: f64 = 0.0;
            for (j, r) in radii.iter().enumerate() {
                m = m.max(metric_disc(z[j], v[j], *r)?);
            }
            Some(m)
        }
        _ => None,
    };
    if let Some(m) = exact {
        return Ok((m, Source::ExactModel));
    }
    let mut best = (metric_upper_bound(domain, z, v)?, Source::BoundaryDistance);
    let mut consider = |m: f64, s: Source| {
        if m < best.0 {
            best = (m, s);
        }
    };
    match domain.kind() {
        DomainKind::Product(fs) => {
            let mut m: f64 = 0.0;
            let mut off = 0;
            for f in fs {
                let k = f.dim();
                let vs = v.slice(off, off + k);
                if !vs.is_zero() {
                    m = m.max(metric_upper(f, &z.slice(off, off + k), &vs)?.0);
                }
                off += k;
            }
            consider(m, Source::ProductMax);
        }
        DomainKind::CoordinateDiscHull { radii } => {
            let rho = 1.0 / radii.iter().map(|r| r.powi(-2)).sum::<f64>().sqrt();
            if z.norm() < rho {
                consider(metric_ball(&CPoint::origin(radii.len()), rho, z, v)?, Source::Inclusion);
            }
        }
        DomainKind::MinusHyperplanes { base, removed } => {
            if let DomainKind::Ball { center, radius } = base.kind() {
                if let Some((lam0, rho)) = ball_slice(center, *radius, z, v) {
                    let mz = -lam0 / rho;
                    let dm = Complex64::new(1.0 / rho, 0.0);
                    match slice_punctures(removed, z, v, lam0, rho).as_slice() {
                        [] => consider(metric_disc(mz, dm, 1.0)?, Source::SliceModel),
                        [h] => {
                            let one = Complex64::new(1.0, 0.0);
                            let d = (one - h.norm_sqr()) / (one - h.conj() * mz).powi(2);
                            consider(metric_punctured_disc(mobius(*h, mz), d * dm, 1.0)?, Source::SliceModel);
                        }
                        _ => {}
                    }
                }
            }
        }
        DomainKind::LocalizedRemoval { base, line, .. } => {
            let inner = DomainOracle::minus_hyperplanes((**base).clone(), vec![line.clone()])?;
            if inner.contains(z)? {
                consider(metric_upper(&inner, z, v)?.0, Source::Inclusion);
            }
        }
        DomainKind::Hartogs { base, .. } => {
            let (r_in, _) = domain.hartogs_radii().unwrap();
            let inner = DomainOracle::product(vec![(**base).clone(), DomainOracle::punctured_disc(r_in)?])?;
            if inner.contains(z)? {
                consider(metric_upper(&inner, z, v)?.0, Source::Inclusion);
            }
        }
        _ => {}
    }
    Ok(best)
}
