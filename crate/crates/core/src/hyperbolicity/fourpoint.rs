use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::CPoint;
use crate::metrics::BoundValue;

/// `(S1 - S2) / 2` for the largest two of the three pair sums of a 4x4 distance table.
pub fn fourpoint_defect(d: &[[f64; 4]; 4]) -> f64 {
    let mut s = [d[0][1] + d[2][3], d[0][2] + d[1][3], d[0][3] + d[1][2]];
    s.sort_by(|a, b| b.total_cmp(a));
    (s[0] - s[1]) / 2.0
}

fn point_value(b: BoundValue) -> Result<f64> {
    b.midpoint().ok_or(Error::Unbounded)
}

/// Maximum four-point defect over the given quadruples of points.
pub fn delta_over_quadruples<F>(quads: &[[CPoint; 4]], dist: F) -> Result<f64>
where
    F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
{
    let ds = quads
        .par_iter()
        .map(|q| {
            let mut d = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let v = if q[i] == q[j] { 0.0 } else { point_value(dist(&q[i], &q[j])?)? };
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
            Ok(fourpoint_defect(&d))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ds.into_iter().fold(0.0, f64::max))
}

/// Maximum four-point defect over all 4-subsets of `points`.
pub fn delta_fourpoint<F>(points: &[CPoint], dist: F) -> Result<f64>
where
    F: Fn(&CPoint, &CPoint) -> Result<BoundValue> + Sync,
{
    let n = points.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 points, got {n}")));
    }
    let mut table = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = if points[i] == points[j] { 0.0 } else { point_value(dist(&points[i], &points[j])?)? };
            table[i][j] = v;
            table[j][i] = v;
        }
    }
    Ok(delta_from_table(&table))
}

/// Maximum four-point defect over all 4-subsets of a symmetric distance table.
pub fn delta_from_table(table: &[Vec<f64>]) -> f64 {
    let n = table.len();
    let mut best: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for e in (c + 1)..n {
                    let idx = [a, b, c, e];
                    let mut d = [[0.0; 4]; 4];
                    for i in 0..4 {
                        for j in 0..4 {
                            d[i][j] = table[idx[i]][idx[j]];
                        }
                    }
                    best = best.max(fourpoint_defect(&d));
                }
            }
        }
    }
    best
}
