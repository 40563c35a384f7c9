//! Unit polydisc minus `S' = {z_1 = 0} \ B(0, hole)`: Kobayashi balls that reach the boundary.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainOracle};
use crate::metrics::{boundary_point_log_bound, distance_disc, exact_distance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NotFinitelyCompactConfig {
    pub n: usize,
    pub r: f64,
    /// Radius of the ball around `0` kept out of `S'`.
    pub hole: f64,
    pub samples: usize,
    pub seed: u64,
    /// `z_1 = e^{-ell}` along the contrast approach sequence.
    pub approach: Vec<f64>,
}

impl Default for NotFinitelyCompactConfig {
    fn default() -> Self {
        NotFinitelyCompactConfig {
            n: 2,
            r: 0.4,
            hole: 0.1,
            samples: 1000,
            seed: super::DEFAULT_SEED,
            approach: vec![3.0, 10.0, 100.0, 1e3, 1e4, 1e5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactRow {
    pub z1_zero: bool,
    pub z: CPoint,
    pub legs: Vec<f64>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NotFinitelyCompactRun {
    pub parameters: NotFinitelyCompactConfig,
    pub w: CPoint,
    pub rows: Vec<CompactRow>,
    /// Draws that landed in `S'`.
    pub skipped: usize,
    pub max_nonzero: f64,
    pub max_zero: f64,
    /// `(ell, lower bound)` for `k_{Omega \ S}(w, (e^{-ell}, 0'))`.
    pub contrast: Vec<(f64, f64)>,
}

fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    loop {
        let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if c.norm() <= 1.0 {
            return c * radius;
        }
    }
}

/// Three-leg upper bounds from `w in dD(r)^n` to samples of `D(r)^n \ S'`.
pub fn run_not_finitely_compact(cfg: &NotFinitelyCompactConfig) -> Result<NotFinitelyCompactRun> {
    let n = cfg.n;
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2".into()));
    }
    if !(cfg.r > 0.0 && 2.0 * cfg.r < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < 2r < 1, got r = {}", cfg.r)));
    }
    if !(cfg.hole > 0.0 && cfg.hole < cfg.r) {
        return Err(Error::InvalidArgument("hole radius must lie in (0, r)".into()));
    }
    let fiber = DomainOracle::polydisc(vec![1.0; n - 1])?;
    let k_fiber = |a: &CPoint, b: &CPoint| -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        Ok(exact_distance(&fiber, a, b)?.map(|v| v.upper).unwrap_or(f64::INFINITY))
    };
    let k_disc = |a: Complex64, b: Complex64| if a == b { Ok(0.0) } else { distance_disc(a, b, 1.0) };

    let w = CPoint::new(vec![Complex64::new(cfg.r, 0.0); n])?;
    let (w1, wt) = (w[0], w.slice(1, n));
    let zero = CPoint::origin(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.samples);
    let mut skipped = 0;
    while rows.len() < cfg.samples {
        let z1_zero = rows.len() % 2 == 1;
        let tail: Vec<Complex64> =
            (1..n).map(|_| disc_point(&mut rng, if z1_zero { 1.5 * cfg.hole } else { cfg.r })).collect();
        let zt = CPoint::new(tail)?;
        let row = if z1_zero {
            if zt.norm() >= cfg.hole {
                skipped += 1;
                continue;
            }
            // (w_1, w') -> (w_1, z') inside {z_1 = w_1}, then (w_1, z') -> (0, z') inside D x {z'}
            let legs = vec![k_fiber(&wt, &zt)?, k_disc(w1, Complex64::new(0.0, 0.0))?];
            let z = CPoint::new(vec![Complex64::new(0.0, 0.0)])?.concat(&zt);
            CompactRow { z1_zero, z, total: legs.iter().sum(), legs }
        } else {
            let z1 = disc_point(&mut rng, cfg.r);
            if z1.norm() == 0.0 {
                continue;
            }
            let legs = vec![k_fiber(&wt, &zero)?, k_disc(w1, z1)?, k_fiber(&zero, &zt)?];
            let z = CPoint::new(vec![z1])?.concat(&zt);
            CompactRow { z1_zero, z, total: legs.iter().sum(), legs }
        };
        rows.push(row);
    }
    let max_of = |zero: bool| rows.iter().filter(|r| r.z1_zero == zero).map(|r| r.total).fold(0.0, f64::max);

    // Omega \ S: the line through w and z meets S at zeta with ||z - zeta|| = |z_1| ||w - z|| / |w_1 - z_1|
    let diameter = 2.0 * (n as f64).sqrt();
    let contrast = cfg
        .approach
        .iter()
        .map(|&ell| {
            let z1 = (-ell).exp();
            let z = CPoint::new(vec![Complex64::new(z1, 0.0)])?.concat(&zero);
            let wz = (&w - &z).norm();
            let lam = (w1 - Complex64::new(z1, 0.0)).norm();
            let mu = -Complex64::new(z1, 0.0) / (w1 - Complex64::new(z1, 0.0));
            let zeta = z.axpy(mu, &(&w - &z));
            if zeta.coords().iter().any(|c| c.norm() >= 1.0) {
                return Err(Error::InvalidArgument(format!("approach point at ell = {ell} sees S outside the polydisc")));
            }
            let ln_q = -ell + wz.ln() - lam.ln();
            let ln_p = (wz * cfg.r / lam).ln();
            Ok((ell, boundary_point_log_bound(ln_p, ln_q, diameter)?))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(NotFinitelyCompactRun {
        parameters: cfg.clone(),
        w,
        max_nonzero: max_of(false),
        max_zero: max_of(true),
        rows,
        skipped,
        contrast,
    })
}
