//! Drivers that assemble the witness constructions and emit growth tables.

mod compact;
mod control;
mod family;
mod localized;
mod triangles;
mod witness;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use compact::{run_not_finitely_compact, CompactRow, NotFinitelyCompactConfig, NotFinitelyCompactRun};
pub use control::{run_positive_control_disc, ControlRun, PositiveControlConfig};
pub use family::{FamilyModel, FamilyOptions, TentFamily, SIDE_ALPHA, SIDE_BETA, SIDE_GAMMA};
pub use localized::{run_strict_convex_localized, sphere_epsilon, sampled_epsilon, LocalizedConfig};
pub use triangles::{
    run_ball_minus_hyperplane, run_hartogs, run_multi_hyperplanes, BallMinusHyperplaneConfig, HartogsConfig,
    MultiHyperplanesConfig,
};
pub use witness::{certify, counts_for, SideQg, Verdict, WitnessRow, WitnessRun, MARGIN_FRACTION};

use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainOracle};
use crate::metrics::{kobayashi_distance, Strategy};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// `start:end:step`, inclusive of `end` when it lies on the grid.
/// An evenly spaced grid; written `"start:end:step"` or as a table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "String")]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Text(String),
    Table { start: f64, end: f64, step: f64 },
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        match r {
            GridRepr::Text(s) => s.parse(),
            GridRepr::Table { start, end, step } => {
                let g = GridSpec { start, end, step };
                g.values()?;
                Ok(g)
            }
        }
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        witness::parse_grid(self.start, self.end, self.step)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad grid '{s}'")));
        let g = match parts.as_slice() {
            [a, b, c] => GridSpec { start: num(a)?, end: num(b)?, step: num(c)? },
            [a] => {
                let v = num(a)?;
                GridSpec { start: v, end: v, step: 1.0 }
            }
            _ => return Err(Error::Config(format!("grid must look like start:end:step, got '{s}'"))),
        };
        g.values()?;
        Ok(g)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

fn random_ball_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CPoint {
    loop {
        let c: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let p = CPoint::new(c).expect("nonempty");
        if p.norm() < 1.0 {
            return p.scale_real(radius);
        }
    }
}

fn random_fiber(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    loop {
        let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let m = w.norm();
        if m > 1e-3 && m < 1.0 {
            return w * radius;
        }
    }
}

/// Lower and upper bounds on random pairs of a Hartogs domain; half the pairs lie in `Omega_r`.
pub(crate) fn hartogs_sandwich(domain: &DomainOracle, pairs: usize, seed: u64) -> Result<serde_json::Value> {
    let (r, _) = domain.hartogs_radii().ok_or_else(|| Error::Construction("not a Hartogs domain".into()))?;
    let phi = match domain.kind() {
        crate::geometry::DomainKind::Hartogs { phi, .. } => phi.clone(),
        _ => unreachable!(),
    };
    let n = domain.dim() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(2 * pairs);
    for k in 0..2 * pairs {
        let z = random_ball_point(&mut rng, n, 0.999);
        let cap = if k % 4 < 2 { r } else { (-phi.eval(&z)).exp() };
        let w = random_fiber(&mut rng, cap * 0.999);
        pts.push(z.concat(&CPoint::new(vec![w])?));
    }
    let strategy = Strategy::default();
    let results = (0..pairs)
        .into_par_iter()
        .map(|i| kobayashi_distance(domain, &pts[2 * i], &pts[2 * i + 1], &strategy))
        .collect::<Result<Vec<_>>>()?;
    let violations = results.iter().filter(|b| b.lower > b.upper).count();
    let finite = results.iter().filter(|b| b.upper.is_finite()).count();
    let worst = results.iter().filter(|b| b.upper.is_finite()).map(|b| b.upper - b.lower).fold(f64::INFINITY, f64::min);
    Ok(json!({ "pairs": pairs, "finite_upper": finite, "violations": violations, "min_gap": worst }))
}

#[cfg(test)]
mod tests;
