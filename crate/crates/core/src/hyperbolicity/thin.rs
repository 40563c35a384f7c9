use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CPoint;
use crate::metrics::BoundValue;
use crate::paths::{Curve, QGReport, SampleGrid, U_MAX};

pub const TRIANGLE_JOIN_TOL: f64 = 1e-9;

/// Certified lower bound for the distance from a point to a sampled side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideLower {
    /// `raw_min - margin`, clamped at zero.
    pub value: f64,
    pub raw_min: f64,
    pub margin: f64,
    pub argmin: f64,
    pub monotone: bool,
    pub samples: usize,
}

/// Minimum of `f` over the grid, less a sampling margin.
///
/// The margin is the steepest slope next to the minimizing sample times half the grid
/// step; it is dropped when the samples are monotone, since the minimum then sits at an
/// end of the side.
pub fn side_lower_from_fn<F>(grid: &SampleGrid, f: F) -> Result<SideLower>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let us = grid.params();
    let vals = us.par_iter().map(|&u| f(u)).collect::<Result<Vec<f64>>>()?;
    Ok(summarize(&us, &vals))
}

fn summarize(us: &[f64], vals: &[f64]) -> SideLower {
    let (mut k, mut m) = (0, f64::INFINITY);
    for (i, v) in vals.iter().enumerate() {
        if *v < m {
            k = i;
            m = *v;
        }
    }
    let inc = vals.windows(2).all(|w| w[1] >= w[0]);
    let dec = vals.windows(2).all(|w| w[1] <= w[0]);
    let monotone = inc || dec;
    let margin = if monotone || vals.len() < 2 {
        0.0
    } else {
        let slope = |a: usize, b: usize| ((vals[b] - vals[a]) / (us[b] - us[a])).abs();
        let mut s: f64 = 0.0;
        if k > 0 {
            s = s.max(slope(k - 1, k));
        }
        if k + 1 < vals.len() {
            s = s.max(slope(k, k + 1));
        }
        let h = (us[us.len() - 1] - us[0]) / (us.len() - 1) as f64;
        s * h / 2.0
    };
    SideLower { value: (m - margin).max(0.0), raw_min: m, margin, argmin: us[k], monotone, samples: vals.len() }
}

/// Lower bound for the distance from `x` to the side, sampled on `grid`.
pub fn point_to_side_lower<F>(x: &CPoint, side: &Curve, grid: &SampleGrid, oracle: F) -> Result<SideLower>
where
    F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
{
    let (a, b) = side.truncated(U_MAX);
    if grid.start < a - 1e-12 || grid.end > b + 1e-12 {
        return Err(Error::InvalidArgument("grid runs past the side's truncation window".into()));
    }
    side_lower_from_fn(grid, |u| {
        let y = side.point_at(u)?;
        if &y == x {
            return Ok(0.0);
        }
        Ok(oracle(x, &y)?.lower)
    })
}

/// Three quasi-geodesic sides, each ending where the next begins.
#[derive(Clone, Debug)]
pub struct QGTriangle {
    sides: [Curve; 3],
    qg: [QGReport; 3],
}

impl QGTriangle {
    pub fn new(sides: [Curve; 3], qg: [QGReport; 3]) -> Result<Self> {
        for i in 0..3 {
            let (_, b) = sides[i].truncated(U_MAX);
            let (a, _) = sides[(i + 1) % 3].interval();
            let gap = sides[i].point_at(b)?.dist(&sides[(i + 1) % 3].point_at(a)?);
            if gap > TRIANGLE_JOIN_TOL {
                return Err(Error::EndpointMismatch(gap));
            }
            if !qg[i].pass {
                return Err(Error::Construction(format!("side {i} is not a certified quasi-geodesic")));
            }
        }
        Ok(QGTriangle { sides, qg })
    }

    pub fn sides(&self) -> &[Curve; 3] {
        &self.sides
    }

    pub fn reports(&self) -> &[QGReport; 3] {
        &self.qg
    }

    /// Non-thinness at samples of side `on`, measured against the other two sides.
    pub fn thinness<F>(&self, on: usize, test_params: &[f64], side_samples: usize, oracle: F) -> Result<Vec<ThinnessReport>>
    where
        F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
    {
        if on > 2 {
            return Err(Error::InvalidArgument("side index out of range".into()));
        }
        let others = [(on + 1) % 3, (on + 2) % 3];
        test_params
            .iter()
            .map(|&t| {
                let x = self.sides[on].point_at(t)?;
                let mut lowers = Vec::with_capacity(2);
                for &j in &others {
                    let (a, b) = self.sides[j].truncated(U_MAX);
                    let grid = SampleGrid::new(a, b, side_samples)?;
                    lowers.push(point_to_side_lower(&x, &self.sides[j], &grid, &oracle)?);
                }
                Ok(ThinnessReport::new(t, x, lowers))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinnessReport {
    pub test_param: f64,
    pub test_point: CPoint,
    pub side_lowers: Vec<SideLower>,
    /// Largest `M` excluded by the lower bounds: the minimum over the opposite sides.
    pub certified_not_thin_for_m: f64,
}

impl ThinnessReport {
    pub fn new(test_param: f64, test_point: CPoint, side_lowers: Vec<SideLower>) -> Self {
        let m = side_lowers.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        ThinnessReport { test_param, test_point, side_lowers, certified_not_thin_for_m: if m.is_finite() { m } else { 0.0 } }
    }
}
