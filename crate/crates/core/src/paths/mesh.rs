use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::length::edge_length;
use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainKind, DomainOracle};
use crate::metrics::metric_upper;
use crate::quadrature::{integrate, QuadOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    /// Lattice points per unit length per real dimension at the first level.
    pub points_per_unit: usize,
    pub max_points_per_unit: usize,
    /// Refinement stops once successive levels differ by less than this fraction.
    pub rel_change: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec { points_per_unit: 64, max_points_per_unit: 256, rel_change: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshResult {
    pub value: f64,
    pub points_per_unit: usize,
    pub nodes: usize,
    pub converged: bool,
}

const STENCIL: [(i64, i64); 16] = [
    (1, 0), (-1, 0), (0, 1), (0, -1),
    (1, 1), (1, -1), (-1, 1), (-1, -1),
    (1, 2), (2, 1), (-1, 2), (-2, 1),
    (1, -2), (2, -1), (-1, -2), (-2, -1),
];

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

/// Shortest path over a square lattice in the complex line through `p` and `q`.
///
/// Edge weights integrate the tightest available metric upper bound along each straight edge.
/// On products the factor paths run simultaneously at constant speed, so the product path
/// has the largest factor length.
pub fn distance_upper_mesh(domain: &DomainOracle, p: &CPoint, q: &CPoint, spec: &MeshSpec) -> Result<MeshResult> {
    p.check_dim(domain.dim())?;
    q.check_dim(domain.dim())?;
    if !domain.contains(p)? || !domain.contains(q)? {
        return Err(Error::OutsideDomain);
    }
    if spec.points_per_unit == 0 || spec.max_points_per_unit < spec.points_per_unit {
        return Err(Error::InvalidArgument("bad mesh resolution".into()));
    }
    if let Some(factors) = factors(domain)? {
        let mut out = MeshResult { value: 0.0, points_per_unit: spec.points_per_unit, nodes: 0, converged: true };
        let mut off = 0;
        for f in factors {
            let k = f.dim();
            let (a, b) = (p.slice(off, off + k), q.slice(off, off + k));
            off += k;
            if a == b {
                continue;
            }
            let r = distance_upper_mesh(&f, &a, &b, spec)?;
            out.value = out.value.max(r.value);
            out.points_per_unit = out.points_per_unit.max(r.points_per_unit);
            out.nodes += r.nodes;
            out.converged &= r.converged;
        }
        return Ok(out);
    }
    let diam = domain.diameter()?;
    if p == q {
        return Ok(MeshResult { value: 0.0, points_per_unit: spec.points_per_unit, nodes: 2, converged: true });
    }
    let line = Line::new(p, q);
    let (lo, hi) = slice_box(domain, &line, diam)?;
    let mut ppu = spec.points_per_unit;
    let mut prev: Option<MeshResult> = None;
    loop {
        let r = solve(domain, &line, lo, hi, ppu);
        let r = match (r, &prev) {
            (Ok(r), _) => r,
            (Err(e), None) if ppu * 2 > spec.max_points_per_unit => return Err(e),
            (Err(_), None) => {
                ppu *= 2;
                continue;
            }
            (Err(_), Some(p)) => return Ok(p.clone()),
        };
        if let Some(p) = &prev {
            if (p.value - r.value).abs() <= spec.rel_change * r.value {
                return Ok(MeshResult { converged: true, ..r });
            }
        }
        if ppu * 2 > spec.max_points_per_unit {
            return Ok(r);
        }
        prev = Some(r);
        ppu *= 2;
    }
}

fn factors(domain: &DomainOracle) -> Result<Option<Vec<DomainOracle>>> {
    Ok(match domain.kind() {
        DomainKind::Polydisc { radii } if radii.len() > 1 => {
            Some(radii.iter().map(|&r| DomainOracle::disc(r)).collect::<Result<_>>()?)
        }
        DomainKind::Product(fs) if fs.len() > 1 => Some(fs.clone()),
        _ => None,
    })
}

/// `p + lambda * unit(q - p)`: Euclidean coordinates on the complex line.
struct Line {
    p: CPoint,
    unit: CPoint,
    len: f64,
}

impl Line {
    fn new(p: &CPoint, q: &CPoint) -> Self {
        let x = q - p;
        let len = x.norm();
        Line { p: p.clone(), unit: x.scale_real(1.0 / len), len }
    }

    fn at(&self, l: Complex64) -> CPoint {
        self.p.axpy(l, &self.unit)
    }
}

/// Bounding box of the slice, from ray exits at 64 angles.
fn slice_box(domain: &DomainOracle, line: &Line, diam: f64) -> Result<(Complex64, Complex64)> {
    let mut lo = Complex64::new(0.0f64.min(line.len), 0.0);
    let mut hi = Complex64::new(line.len, 0.0);
    for k in 0..64 {
        let e = Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 64.0);
        // the slice may be non-convex; march before bisecting
        let mut t = 0.0;
        let step = diam / 256.0;
        while t < diam && domain.contains(&line.at(e * (t + step)))? {
            t += step;
        }
        let end = e * (t + step);
        lo = Complex64::new(lo.re.min(end.re), lo.im.min(end.im));
        hi = Complex64::new(hi.re.max(end.re), hi.im.max(end.im));
    }
    Ok((lo, hi))
}

fn solve(domain: &DomainOracle, line: &Line, lo: Complex64, hi: Complex64, ppu: usize) -> Result<MeshResult> {
    let h = 1.0 / ppu as f64;
    // lattice anchored at lambda = 0 so that p sits on a node
    let i0 = (lo.re / h).floor() as i64;
    let j0 = (lo.im / h).floor() as i64;
    let nx = ((hi.re / h).ceil() as i64 - i0 + 1) as usize;
    let ny = ((hi.im / h).ceil() as i64 - j0 + 1) as usize;
    let coord = |k: usize| Complex64::new((i0 + (k % nx) as i64) as f64 * h, (j0 + (k / nx) as i64) as f64 * h);
    let inside: Vec<bool> = (0..nx * ny).into_par_iter().map(|k| domain.contains(&line.at(coord(k))).unwrap_or(false)).collect();
    let metric = |z: &CPoint, v: &CPoint| metric_upper(domain, z, v).map(|m| m.0);
    let weight = |a: Complex64, b: Complex64| -> Option<f64> {
        let w = edge_length(&metric, &line.at(a), &line.unit.scale(b - a)).ok()?;
        w.is_finite().then_some(w)
    };
    let src = nx * ny;
    let dst = src + 1;
    let pos = |k: usize| -> Complex64 {
        match k {
            k if k == src => Complex64::new(0.0, 0.0),
            k if k == dst => Complex64::new(line.len, 0.0),
            k => coord(k),
        }
    };
    // straight connectors from p and q to nearby lattice nodes
    let near = |l: Complex64| -> Vec<usize> {
        let ci = (l.re / h).round() as i64 - i0;
        let cj = (l.im / h).round() as i64 - j0;
        let mut out = Vec::new();
        for di in -2..=2 {
            for dj in -2..=2 {
                let (i, j) = (ci + di, cj + dj);
                if i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny {
                    let k = j as usize * nx + i as usize;
                    if inside[k] {
                        out.push(k);
                    }
                }
            }
        }
        out
    };
    let q_links = near(pos(dst));
    let p_links = near(pos(src));
    let mut dist = vec![f64::INFINITY; nx * ny + 2];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Item(0.0, src));
    // direct edge, integrated adaptively so the chord is never beaten by its own quadrature
    let direct = integrate(
        |t| metric(&line.at(Complex64::new(t * line.len, 0.0)), &line.unit.scale_real(line.len)),
        0.0,
        1.0,
        QuadOptions::default(),
    );
    if let Ok(w) = direct {
        dist[dst] = w;
        heap.push(Item(w, dst));
    }
    while let Some(Item(d, k)) = heap.pop() {
        if d > dist[k] {
            continue;
        }
        if k == dst {
            let nodes = inside.iter().filter(|b| **b).count() + 2;
            return Ok(MeshResult { value: d, points_per_unit: ppu, nodes, converged: false });
        }
        let mut relax = |j: usize, heap: &mut BinaryHeap<Item>| {
            if let Some(w) = weight(pos(k), pos(j)) {
                if d + w < dist[j] {
                    dist[j] = d + w;
                    heap.push(Item(d + w, j));
                }
            }
        };
        if k == src {
            for &j in &p_links {
                relax(j, &mut heap);
            }
            continue;
        }
        let (i, j) = ((k % nx) as i64, (k / nx) as i64);
        for (di, dj) in STENCIL {
            let (a, b) = (i + di, j + dj);
            if a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < ny {
                let n = b as usize * nx + a as usize;
                if inside[n] {
                    relax(n, &mut heap);
                }
            }
        }
        if q_links.contains(&k) {
            relax(dst, &mut heap);
        }
    }
    Err(Error::MeshDisconnected(format!("no lattice path at {ppu} points per unit")))
}
