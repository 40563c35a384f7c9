use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{Curve, U_MAX};
use crate::error::{Error, Result};
use crate::geometry::CPoint;
use crate::metrics::BoundValue;

/// Uniform parameter samples; all pairs `i < j` are checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl SampleGrid {
    pub fn new(start: f64, end: f64, samples: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start <= end) || samples == 0 {
            return Err(Error::InvalidArgument(format!("bad grid [{start}, {end}] x {samples}")));
        }
        Ok(SampleGrid { start, end, samples })
    }

    /// The default 40-point grid over the curve's truncated interval.
    pub fn for_curve(curve: &Curve) -> Self {
        let (a, b) = curve.truncated(U_MAX);
        SampleGrid { start: a, end: b, samples: 40 }
    }

    pub fn params(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.start];
        }
        (0..self.samples).map(|i| self.start + (self.end - self.start) * i as f64 / (self.samples - 1) as f64).collect()
    }
}

/// Distance bounds for every grid pair, computed once and reused across `(A, B)` checks.
#[derive(Clone, Debug)]
pub struct PairTable {
    grid: SampleGrid,
    pairs: Vec<(f64, f64, BoundValue)>,
}

impl PairTable {
    pub fn build<F>(grid: &SampleGrid, oracle: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<BoundValue> + Sync,
    {
        let ps = grid.params();
        let idx: Vec<(usize, usize)> = (0..ps.len()).flat_map(|i| ((i + 1)..ps.len()).map(move |j| (i, j))).collect();
        let pairs = idx
            .par_iter()
            .map(|&(i, j)| oracle(ps[i], ps[j]).map(|b| (ps[i], ps[j], b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PairTable { grid: grid.clone(), pairs })
    }

    /// Pairs along a curve, with the oracle acting on points.
    pub fn for_curve<F>(curve: &Curve, grid: &SampleGrid, oracle: F) -> Result<Self>
    where
        F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
    {
        let (a, b) = curve.truncated(U_MAX);
        if grid.start < a || grid.end > b {
            return Err(Error::InvalidArgument("grid outside the curve interval".into()));
        }
        PairTable::build(grid, |s, t| oracle(&curve.point_at(s)?, &curve.point_at(t)?))
    }

    pub fn pairs(&self) -> &[(f64, f64, BoundValue)] {
        &self.pairs
    }

    pub fn verify(&self, a: f64, b: f64) -> Result<QGReport> {
        if !(a >= 1.0) || !(b >= 0.0) {
            return Err(Error::InvalidArgument(format!("need A >= 1 and B >= 0, got ({a}, {b})")));
        }
        let mut up = (f64::INFINITY, (self.grid.start, self.grid.start));
        let mut low = (f64::INFINITY, (self.grid.start, self.grid.start));
        let mut inconclusive = false;
        for &(s, t, v) in &self.pairs {
            let d = (s - t).abs();
            if v.upper.is_infinite() {
                inconclusive = true;
            }
            let mu = a * d + b - v.upper;
            let ml = v.lower - (d / a - b);
            if mu < up.0 {
                up = (mu, (s, t));
            }
            if ml < low.0 {
                low = (ml, (s, t));
            }
        }
        Ok(QGReport {
            a,
            b,
            pass: !inconclusive && up.0 >= 0.0 && low.0 >= 0.0,
            inconclusive,
            worst_upper_margin: up.0,
            worst_lower_margin: low.0,
            upper_witness: up.1,
            lower_witness: low.1,
            grid: self.grid.clone(),
        })
    }

    /// Smallest `B` (on the scan step) making `(A, B)` pass, or `None` if an upper bound is infinite.
    fn min_b(&self, a: f64, step: f64) -> Option<f64> {
        let mut need: f64 = 0.0;
        for &(s, t, v) in &self.pairs {
            let d = (s - t).abs();
            if v.upper.is_infinite() {
                return None;
            }
            need = need.max(v.upper - a * d).max(d / a - v.lower);
        }
        Some((need / step).ceil() * step)
    }

    /// Lexicographically smallest `(A, B)` on the scan with `B <= scan.b_cap`, re-verified.
    pub fn estimate(&self, scan: &QgScan) -> Result<(f64, f64, QGReport)> {
        let steps = ((scan.a_max - 1.0) / scan.step).round() as usize;
        for k in 0..=steps {
            let a = 1.0 + k as f64 * scan.step;
            let Some(mut b) = self.min_b(a, scan.step) else {
                return Err(Error::NoFeasibleConstants("an upper bound is infinite".into()));
            };
            if b > scan.b_cap {
                continue;
            }
            // absorb rounding in the re-verification
            for _ in 0..3 {
                let rep = self.verify(a, b)?;
                if rep.pass {
                    return Ok((a, b, rep));
                }
                b += scan.step;
            }
        }
        let rep = self.verify(scan.a_max, scan.b_cap)?;
        Err(Error::NoFeasibleConstants(format!(
            "A <= {}, B <= {}: worst upper pair {:?}, worst lower pair {:?}",
            scan.a_max, scan.b_cap, rep.upper_witness, rep.lower_witness
        )))
    }
}

/// Scan range for quasi-geodesic constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QgScan {
    pub step: f64,
    pub a_max: f64,
    /// Largest additive constant accepted before moving to the next `A`.
    pub b_cap: f64,
}

impl Default for QgScan {
    fn default() -> Self {
        QgScan { step: 0.01, a_max: 50.0, b_cap: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub pass: bool,
    pub inconclusive: bool,
    pub worst_upper_margin: f64,
    pub worst_lower_margin: f64,
    pub upper_witness: (f64, f64),
    pub lower_witness: (f64, f64),
    pub grid: SampleGrid,
}

/// Checks `|s-t|/A - B <= lower` and `upper <= A|s-t| + B` on every grid pair.
pub fn verify_quasi_geodesic<F>(curve: &Curve, a: f64, b: f64, grid: &SampleGrid, oracle: F) -> Result<QGReport>
where
    F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
{
    PairTable::for_curve(curve, grid, oracle)?.verify(a, b)
}

pub fn estimate_qg_constants<F>(curve: &Curve, grid: &SampleGrid, scan: &QgScan, oracle: F) -> Result<(f64, f64)>
where
    F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
{
    let (a, b, _) = PairTable::for_curve(curve, grid, oracle)?.estimate(scan)?;
    Ok((a, b))
}
