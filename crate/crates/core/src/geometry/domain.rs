use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::point::{CDirection, CPoint, Hyperplane};
use crate::error::{Error, Result};

/// Number of angular directions used by the grid-based directional distance.
pub const ANGULAR_GRID: usize = 256;
/// Relative bisection tolerance for ray exits.
pub const BISECTION_REL_TOL: f64 = 1e-12;
/// Points this close to a removed hyperplane are treated as boundary points.
pub const HYPERPLANE_REJECT_TOL: f64 = 1e-14;

/// Convexity class declared per model kind; never inferred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexityClass {
    CConvex,
    WeaklyLinearlyConvex,
    Unclassified,
}

impl ConvexityClass {
    pub fn is_c_convex(self) -> bool {
        self == ConvexityClass::CConvex
    }

    pub fn is_weakly_linearly_convex(self) -> bool {
        matches!(self, ConvexityClass::CConvex | ConvexityClass::WeaklyLinearlyConvex)
    }
}

/// Bounded fiber-exponent function of a Hartogs domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    /// `phi = value`.
    Const { value: f64 },
    /// `phi(z) = max(0, peak - slope * |z|)`.
    Cone { peak: f64, slope: f64 },
    /// Upper semicontinuous step: `height` on the closed ball of `radius`, 0 outside.
    Step { height: f64, radius: f64 },
}

impl Phi {
    pub fn eval(&self, z: &CPoint) -> f64 {
        match *self {
            Phi::Const { value } => value,
            Phi::Cone { peak, slope } => (peak - slope * z.norm()).max(0.0),
            Phi::Step { height, radius } => {
                if z.norm() <= radius {
                    height
                } else {
                    0.0
                }
            }
        }
    }

    /// A lower bound for `inf phi` valid on all of `C^n`.
    pub fn inf(&self) -> f64 {
        match *self {
            Phi::Const { value } => value,
            Phi::Cone { .. } => 0.0,
            Phi::Step { height, .. } => height.min(0.0),
        }
    }

    /// An upper bound for `sup phi` valid on all of `C^n`.
    pub fn sup(&self) -> f64 {
        match *self {
            Phi::Const { value } => value,
            Phi::Cone { peak, .. } => peak.max(0.0),
            Phi::Step { height, .. } => height.max(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Phi::Const { value } => value.is_finite(),
            Phi::Cone { peak, slope } => peak.is_finite() && slope.is_finite() && slope >= 0.0,
            Phi::Step { height, radius } => height.is_finite() && radius.is_finite() && radius >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("phi must be bounded with finite parameters".into()))
        }
    }
}

/// The model domains, possibly composed.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    Disc { radius: f64 },
    PuncturedDisc { radius: f64 },
    /// Upper half-plane `Im z > 0`.
    HalfPlane,
    Ball { center: CPoint, radius: f64 },
    Polydisc { radii: Vec<f64> },
    /// `{z : sum_j |z_j| / r_j < 1}`, the convex hull of the coordinate discs.
    CoordinateDiscHull { radii: Vec<f64> },
    Product(Vec<DomainOracle>),
    MinusHyperplanes { base: Box<DomainOracle>, removed: Vec<Hyperplane> },
    /// Base minus `line ∩ closed window ∩ base`.
    LocalizedRemoval { base: Box<DomainOracle>, line: Hyperplane, window_center: CPoint, window_radius: f64 },
    /// `{(z, w) : z ∈ base, 0 < |w| < exp(-phi(z))}`.
    Hartogs { base: Box<DomainOracle>, phi: Phi },
}

/// How a directional boundary distance was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DirMethod {
    Analytic,
    /// Minimum over an angular grid of ray exits; a certified upper bound.
    AngularGrid { directions: usize, rel_tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirDistance {
    /// Euclidean distance along the complex line; `INFINITY` when the line never meets the boundary.
    pub value: f64,
    pub method: DirMethod,
}

/// A domain presented through membership and boundary-distance queries.
///
/// Oracles are immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainOracle {
    kind: DomainKind,
    dim: usize,
    diameter: Option<f64>,
}

fn positive(name: &str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {r}")))
    }
}

impl DomainOracle {
    fn build(kind: DomainKind, dim: usize) -> Self {
        let mut d = DomainOracle { kind, dim, diameter: None };
        d.diameter = d.compute_diameter().ok();
        d
    }

    pub fn disc(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self::build(DomainKind::Disc { radius }, 1))
    }

    pub fn punctured_disc(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self::build(DomainKind::PuncturedDisc { radius }, 1))
    }

    pub fn half_plane() -> Self {
        Self::build(DomainKind::HalfPlane, 1)
    }

    pub fn ball(center: CPoint, radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        let n = center.dim();
        Ok(Self::build(DomainKind::Ball { center, radius }, n))
    }

    /// The unit ball `B_n`.
    pub fn unit_ball(n: usize) -> Self {
        Self::ball(CPoint::origin(n), 1.0).expect("unit ball is valid")
    }

    pub fn polydisc(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("polydisc needs at least one radius".into()));
        }
        for &r in &radii {
            positive("radius", r)?;
        }
        let n = radii.len();
        Ok(Self::build(DomainKind::Polydisc { radii }, n))
    }

    pub fn coordinate_disc_hull(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("hull needs at least one radius".into()));
        }
        for &r in &radii {
            positive("radius", r)?;
        }
        let n = radii.len();
        Ok(Self::build(DomainKind::CoordinateDiscHull { radii }, n))
    }

    pub fn product(factors: Vec<DomainOracle>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product needs at least one factor".into()));
        }
        let n = factors.iter().map(|f| f.dim).sum();
        Ok(Self::build(DomainKind::Product(factors), n))
    }

    pub fn minus_hyperplanes(base: DomainOracle, removed: Vec<Hyperplane>) -> Result<Self> {
        for h in &removed {
            h.normal().check_dim(base.dim)?;
            if !base.meets_hyperplane(h) {
                return Err(Error::InvalidArgument("removed hyperplane does not meet the base domain".into()));
            }
        }
        let n = base.dim;
        Ok(Self::build(DomainKind::MinusHyperplanes { base: Box::new(base), removed }, n))
    }

    pub fn localized_removal(base: DomainOracle, line: Hyperplane, window_center: CPoint, window_radius: f64) -> Result<Self> {
        positive("window radius", window_radius)?;
        line.normal().check_dim(base.dim)?;
        window_center.check_dim(base.dim)?;
        if !base.meets_hyperplane(&line) {
            return Err(Error::InvalidArgument("removed line does not meet the base domain".into()));
        }
        let n = base.dim;
        Ok(Self::build(
            DomainKind::LocalizedRemoval { base: Box::new(base), line, window_center, window_radius },
            n,
        ))
    }

    pub fn hartogs(base: DomainOracle, phi: Phi) -> Result<Self> {
        phi.validate()?;
        if phi.inf() > phi.sup() {
            return Err(Error::InvalidArgument("phi must satisfy inf <= sup".into()));
        }
        let n = base.dim + 1;
        Ok(Self::build(DomainKind::Hartogs { base: Box::new(base), phi }, n))
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn convexity(&self) -> ConvexityClass {
        use ConvexityClass::*;
        match &self.kind {
            DomainKind::Disc { .. }
            | DomainKind::HalfPlane
            | DomainKind::Ball { .. }
            | DomainKind::Polydisc { .. }
            | DomainKind::CoordinateDiscHull { .. } => CConvex,
            DomainKind::PuncturedDisc { .. } => WeaklyLinearlyConvex,
            DomainKind::Product(fs) => {
                if fs.iter().all(|f| f.convexity().is_weakly_linearly_convex()) {
                    WeaklyLinearlyConvex
                } else {
                    Unclassified
                }
            }
            DomainKind::MinusHyperplanes { base, .. } => {
                if base.convexity().is_weakly_linearly_convex() {
                    WeaklyLinearlyConvex
                } else {
                    Unclassified
                }
            }
            DomainKind::LocalizedRemoval { .. } | DomainKind::Hartogs { .. } => Unclassified,
        }
    }

    /// Radii `r = exp(-sup phi)` and `R = exp(-inf phi)` of the product sandwich of a Hartogs domain.
    pub fn hartogs_radii(&self) -> Option<(f64, f64)> {
        match &self.kind {
            DomainKind::Hartogs { phi, .. } => Some(((-phi.sup()).exp(), (-phi.inf()).exp())),
            _ => None,
        }
    }

    /// True iff `z` lies in the open set.
    pub fn contains(&self, z: &CPoint) -> Result<bool> {
        z.check_dim(self.dim)?;
        Ok(self.contains_unchecked(z))
    }

    fn contains_unchecked(&self, z: &CPoint) -> bool {
        match &self.kind {
            DomainKind::Disc { radius } => z[0].norm() < *radius,
            DomainKind::PuncturedDisc { radius } => {
                let m = z[0].norm();
                m > 0.0 && m < *radius
            }
            DomainKind::HalfPlane => z[0].im > 0.0,
            DomainKind::Ball { center, radius } => z.dist(center) < *radius,
            DomainKind::Polydisc { radii } => z.coords().iter().zip(radii).all(|(c, r)| c.norm() < *r),
            DomainKind::CoordinateDiscHull { radii } => hull_gauge(radii, z) < 1.0,
            DomainKind::Product(fs) => {
                let mut off = 0;
                fs.iter().all(|f| {
                    let part = z.slice(off, off + f.dim);
                    off += f.dim;
                    f.contains_unchecked(&part)
                })
            }
            DomainKind::MinusHyperplanes { base, removed } => {
                base.contains_unchecked(z) && removed.iter().all(|h| h.distance(z) > HYPERPLANE_REJECT_TOL)
            }
            DomainKind::LocalizedRemoval { base, line, window_center, window_radius } => {
                base.contains_unchecked(z)
                    && !(line.distance(z) <= HYPERPLANE_REJECT_TOL && z.dist(window_center) <= *window_radius)
            }
            DomainKind::Hartogs { base, phi } => {
                let n = base.dim;
                let head = z.slice(0, n);
                let w = z[n].norm();
                base.contains_unchecked(&head) && w > 0.0 && w < (-phi.eval(&head)).exp()
            }
        }
    }

    fn require_inside(&self, z: &CPoint) -> Result<()> {
        if self.contains(z)? {
            Ok(())
        } else {
            Err(Error::OutsideDomain)
        }
    }

    /// Euclidean distance to the boundary.
    ///
    /// Exact for the models except the coordinate-disc hull (certified lower bound,
    /// exact at the origin) and Hartogs domains (the conservative fiber value).
    pub fn boundary_dist(&self, z: &CPoint) -> Result<f64> {
        self.require_inside(z)?;
        Ok(self.boundary_dist_unchecked(z))
    }

    fn boundary_dist_unchecked(&self, z: &CPoint) -> f64 {
        match &self.kind {
            DomainKind::Disc { radius } => radius - z[0].norm(),
            DomainKind::PuncturedDisc { radius } => (radius - z[0].norm()).min(z[0].norm()),
            DomainKind::HalfPlane => z[0].im,
            DomainKind::Ball { center, radius } => radius - z.dist(center),
            DomainKind::Polydisc { radii } => z
                .coords()
                .iter()
                .zip(radii)
                .map(|(c, r)| r - c.norm())
                .fold(f64::INFINITY, f64::min),
            DomainKind::CoordinateDiscHull { radii } => {
                let lip = radii.iter().map(|r| r.powi(-2)).sum::<f64>().sqrt();
                (1.0 - hull_gauge(radii, z)) / lip
            }
            DomainKind::Product(fs) => {
                let mut off = 0;
                fs.iter()
                    .map(|f| {
                        let part = z.slice(off, off + f.dim);
                        off += f.dim;
                        f.boundary_dist_unchecked(&part)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            DomainKind::MinusHyperplanes { base, removed } => removed
                .iter()
                .map(|h| h.distance(z))
                .fold(base.boundary_dist_unchecked(z), f64::min),
            DomainKind::LocalizedRemoval { base, line, window_center, window_radius } => base
                .boundary_dist_unchecked(z)
                .min(dist_to_windowed_hyperplane(line, window_center, *window_radius, z)),
            DomainKind::Hartogs { base, phi } => {
                let n = base.dim;
                let head = z.slice(0, n);
                let w = z[n].norm();
                let r = (-phi.sup()).exp();
                base.boundary_dist_unchecked(&head).min(w).min((r - w).max(0.0))
            }
        }
    }

    /// Distance from `z` to the boundary inside the complex line `z + C X`.
    pub fn dir_boundary_dist(&self, z: &CPoint, x: &CDirection) -> Result<f64> {
        Ok(self.dir_boundary_dist_detail(z, x)?.value)
    }

    pub fn dir_boundary_dist_detail(&self, z: &CPoint, x: &CDirection) -> Result<DirDistance> {
        x.vector().check_dim(self.dim)?;
        self.require_inside(z)?;
        Ok(self.dir_unchecked(z, x.vector()))
    }

    fn dir_unchecked(&self, z: &CPoint, x: &CPoint) -> DirDistance {
        let analytic = |value| DirDistance { value, method: DirMethod::Analytic };
        let xn = x.norm();
        match &self.kind {
            DomainKind::Disc { radius } => analytic(radius - z[0].norm()),
            DomainKind::PuncturedDisc { radius } => analytic((radius - z[0].norm()).min(z[0].norm())),
            DomainKind::HalfPlane => analytic(z[0].im),
            DomainKind::Ball { center, radius } => {
                let w = z - center;
                let a = x.norm_sqr();
                let h = w.hermitian(x);
                let rho2 = (radius * radius - w.norm_sqr() + h.norm_sqr() / a) / a;
                let lam = rho2.max(0.0).sqrt() - (h / a).norm();
                analytic(lam.max(0.0) * xn)
            }
            DomainKind::Polydisc { radii } => {
                let lam = z
                    .coords()
                    .iter()
                    .zip(x.coords())
                    .zip(radii)
                    .filter(|((_, xj), _)| xj.norm() > 0.0)
                    .map(|((zj, xj), r)| (r - zj.norm()) / xj.norm())
                    .fold(f64::INFINITY, f64::min);
                analytic(lam * xn)
            }
            DomainKind::CoordinateDiscHull { radii } => {
                let unit = x.scale_real(1.0 / xn);
                let f = |t: f64, rot: Complex64| hull_gauge(radii, &z.axpy(rot * t, &unit)) < 1.0;
                let tmax = self.diameter.unwrap_or(1.0) * 2.0 + 1.0;
                DirDistance {
                    value: angular_grid_exit(&f, tmax),
                    method: DirMethod::AngularGrid { directions: ANGULAR_GRID, rel_tol: BISECTION_REL_TOL },
                }
            }
            DomainKind::Product(fs) => {
                let mut off = 0;
                let mut best = f64::INFINITY;
                let mut method = DirMethod::Analytic;
                for f in fs {
                    let zp = z.slice(off, off + f.dim);
                    let xp = x.slice(off, off + f.dim);
                    off += f.dim;
                    let xpn = xp.norm();
                    if xpn == 0.0 {
                        continue;
                    }
                    let d = f.dir_unchecked(&zp, &xp);
                    if let DirMethod::AngularGrid { .. } = d.method {
                        method = d.method;
                    }
                    best = best.min(d.value * xn / xpn);
                }
                DirDistance { value: best, method }
            }
            DomainKind::MinusHyperplanes { base, removed } => {
                let mut d = base.dir_unchecked(z, x);
                for h in removed {
                    if let Some(lam) = h.line_hit(z, x) {
                        d.value = d.value.min(lam.norm() * xn);
                    }
                }
                d
            }
            DomainKind::LocalizedRemoval { base, line, window_center, window_radius } => {
                let mut d = base.dir_unchecked(z, x);
                if let Some(lam) = line.line_hit(z, x) {
                    let hit = z.axpy(lam, x);
                    if hit.dist(window_center) <= *window_radius {
                        d.value = d.value.min(lam.norm() * xn);
                    }
                }
                d
            }
            DomainKind::Hartogs { .. } => {
                let unit = x.scale_real(1.0 / xn);
                let f = |t: f64, rot: Complex64| self.contains_unchecked(&z.axpy(rot * t, &unit));
                let tmax = self.diameter.unwrap_or(1.0) * 2.0 + 1.0;
                let step = self.diameter.unwrap_or(1.0) / 4096.0;
                let n = self.dim - 1;
                // the puncture of each fiber is invisible to ray marching
                let hole = if x[n].norm() > 0.0 { (z[n] / x[n]).norm() * xn } else { f64::INFINITY };
                DirDistance {
                    value: angular_grid_exit_marching(&f, tmax, step).min(hole),
                    method: DirMethod::AngularGrid { directions: ANGULAR_GRID, rel_tol: BISECTION_REL_TOL },
                }
            }
        }
    }

    /// Euclidean diameter; exact for the models, an upper bound for Hartogs domains.
    pub fn diameter(&self) -> Result<f64> {
        self.diameter.ok_or(Error::Unbounded)
    }

    fn compute_diameter(&self) -> Result<f64> {
        match &self.kind {
            DomainKind::Disc { radius } | DomainKind::PuncturedDisc { radius } => Ok(2.0 * radius),
            DomainKind::Ball { radius, .. } => Ok(2.0 * radius),
            DomainKind::HalfPlane => Err(Error::Unbounded),
            DomainKind::Polydisc { radii } => Ok(2.0 * radii.iter().map(|r| r * r).sum::<f64>().sqrt()),
            DomainKind::CoordinateDiscHull { radii } => Ok(2.0 * radii.iter().cloned().fold(0.0, f64::max)),
            DomainKind::Product(fs) => {
                let mut s = 0.0;
                for f in fs {
                    let d = f.diameter()?;
                    s += d * d;
                }
                Ok(s.sqrt())
            }
            DomainKind::MinusHyperplanes { base, .. } | DomainKind::LocalizedRemoval { base, .. } => base.diameter(),
            DomainKind::Hartogs { base, phi } => {
                let big_r = (-phi.inf()).exp();
                let d = base.diameter()?;
                Ok((d * d + 4.0 * big_r * big_r).sqrt())
            }
        }
    }

    /// An interior reference point used for validation checks.
    fn anchor(&self) -> CPoint {
        match &self.kind {
            DomainKind::Ball { center, .. } => center.clone(),
            DomainKind::HalfPlane => CPoint::new(vec![Complex64::new(0.0, 1.0)]).unwrap(),
            DomainKind::PuncturedDisc { radius } => CPoint::real(&[radius / 2.0]).unwrap(),
            DomainKind::Product(fs) => fs.iter().map(|f| f.anchor()).reduce(|a, b| a.concat(&b)).unwrap(),
            DomainKind::MinusHyperplanes { base, .. } | DomainKind::LocalizedRemoval { base, .. } => base.anchor(),
            DomainKind::Hartogs { base, phi } => {
                let a = base.anchor();
                let w = (-phi.eval(&a)).exp() / 2.0;
                a.concat(&CPoint::real(&[w]).unwrap())
            }
            _ => CPoint::origin(self.dim),
        }
    }

    /// Whether the hyperplane meets the domain: analytic for the ball, else by
    /// projecting the anchor and then seeded sampling on the hyperplane.
    pub fn meets_hyperplane(&self, h: &Hyperplane) -> bool {
        if let DomainKind::Ball { center, radius } = &self.kind {
            return h.distance(center) < *radius;
        }
        let anchor = self.anchor();
        let proj = h.project(&anchor);
        if self.contains_unchecked(&proj) {
            return true;
        }
        let scale = self.diameter.unwrap_or(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..4000 {
            let offset: Vec<Complex64> = (0..self.dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
                .collect();
            let p = h.project(&(&proj + &CPoint::new(offset).unwrap()));
            if self.contains_unchecked(&p) {
                return true;
            }
        }
        false
    }
}

/// `sum_j |z_j| / r_j`.
pub(crate) fn hull_gauge(radii: &[f64], z: &CPoint) -> f64 {
    z.coords().iter().zip(radii).map(|(c, r)| c.norm() / r).sum()
}

/// Distance from `z` to `H ∩ closed ball(center, radius)`.
pub(crate) fn dist_to_windowed_hyperplane(h: &Hyperplane, center: &CPoint, radius: f64, z: &CPoint) -> f64 {
    let c_s = h.project(center);
    let rho2 = radius * radius - center.dist(&c_s).powi(2);
    if rho2 < 0.0 {
        return f64::INFINITY;
    }
    let z_s = h.project(z);
    let perp = z.dist(&z_s);
    let along = (z_s.dist(&c_s) - rho2.sqrt()).max(0.0);
    perp.hypot(along)
}

/// Minimum over `ANGULAR_GRID` complex rotations of the first exit along the ray,
/// for a membership predicate whose slice is convex.
fn angular_grid_exit(inside: &dyn Fn(f64, Complex64) -> bool, tmax: f64) -> f64 {
    (0..ANGULAR_GRID)
        .map(|k| {
            let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / ANGULAR_GRID as f64);
            let mut hi = tmax;
            while inside(hi, rot) {
                hi *= 2.0;
            }
            bisect_exit(inside, rot, 0.0, hi)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Like [`angular_grid_exit`] but marches outward first, for non-convex slices.
fn angular_grid_exit_marching(inside: &dyn Fn(f64, Complex64) -> bool, tmax: f64, step: f64) -> f64 {
    (0..ANGULAR_GRID)
        .map(|k| {
            let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / ANGULAR_GRID as f64);
            let mut lo = 0.0;
            let mut hi = step;
            while inside(hi, rot) {
                lo = hi;
                hi += step;
                if hi > tmax {
                    return f64::INFINITY;
                }
            }
            bisect_exit(inside, rot, lo, hi)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Returns the outer end of the final bracket, so the result never undershoots the exit.
fn bisect_exit(inside: &dyn Fn(f64, Complex64) -> bool, rot: Complex64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if inside(mid, rot) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
