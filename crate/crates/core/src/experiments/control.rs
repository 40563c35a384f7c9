//! Positive controls: model spaces that are Gromov hyperbolic, and the punctured-disc ray family.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hyperbolicity::{delta_from_table, fourpoint_defect};
use crate::metrics::{distance_disc, distance_halfplane, distance_punctured_disc_log, LogPolar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositiveControlConfig {
    pub samples: usize,
    pub seed: u64,
    /// Largest `u` of the ray family; radii `e^{-e^{2u}}` for `u = 1, ..., ray_u_max`.
    pub ray_u_max: usize,
    pub triangle_radii: Vec<f64>,
    pub triangle_samples: usize,
}

impl Default for PositiveControlConfig {
    fn default() -> Self {
        PositiveControlConfig {
            samples: 10_000,
            seed: super::DEFAULT_SEED,
            ray_u_max: 5,
            triangle_radii: vec![0.5, 0.9, 0.99, 0.999],
            triangle_samples: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlRun {
    pub parameters: PositiveControlConfig,
    pub disc_max: f64,
    pub disc_max_doubled: f64,
    pub doubling_ratio: f64,
    /// Maximum over the first tenth of the quadruples.
    pub disc_first_decile: f64,
    pub halfplane_max: f64,
    /// `(vertex radius, thinness)` for the disc triangle with vertices `rho e^{2 pi i k / 3}`.
    pub triangle_thinness: Vec<(f64, f64)>,
    /// `(u, statistic)` over the ray points up to `u`.
    pub ray_family: Vec<(f64, f64)>,
    pub ray_exceeds_tenfold: bool,
}

fn defect_of<F: Fn(Complex64, Complex64) -> Result<f64>>(q: &[Complex64; 4], dist: F) -> Result<f64> {
    let mut d = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = if q[i] == q[j] { 0.0 } else { dist(q[i], q[j])? };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(fourpoint_defect(&d))
}

fn running_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Point on the disc geodesic from `a` to `b` at fraction `t` of the way, via the Mobius map moving `a` to `0`.
fn disc_geodesic(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    let m = |z: Complex64, c: Complex64| (z - c) / (Complex64::new(1.0, 0.0) - c.conj() * z);
    let w = m(b, a);
    let r = w.norm();
    let target = if r == 0.0 { Complex64::new(0.0, 0.0) } else { w / r * (t * r.atanh()).tanh() };
    m(target, -a)
}

fn triangle_thinness(rho: f64, samples: usize) -> Result<f64> {
    let v: Vec<Complex64> =
        (0..3).map(|k| Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / 3.0)).collect();
    let side = |i: usize| -> Vec<Complex64> {
        (0..samples).map(|k| disc_geodesic(v[i], v[(i + 1) % 3], k as f64 / (samples - 1) as f64)).collect()
    };
    let sides = [side(0), side(1), side(2)];
    let dist = |a: Complex64, b: Complex64| if a == b { Ok(0.0) } else { distance_disc(a, b, 1.0) };
    let worst = sides[0]
        .par_iter()
        .map(|&x| {
            let mut m = f64::INFINITY;
            for s in &sides[1..] {
                for &y in s {
                    m = m.min(dist(x, y)?);
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(running_max(&worst))
}

pub fn run_positive_control_disc(cfg: &PositiveControlConfig) -> Result<ControlRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut disc_pt = || loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 1.0 {
            return z;
        }
    };
    let quads: Vec<[Complex64; 4]> = (0..2 * cfg.samples).map(|_| [disc_pt(), disc_pt(), disc_pt(), disc_pt()]).collect();
    let disc = |a, b| distance_disc(a, b, 1.0);
    let defects = quads.par_iter().map(|q| defect_of(q, disc)).collect::<Result<Vec<f64>>>()?;
    let disc_max = running_max(&defects[..cfg.samples]);
    let disc_max_doubled = running_max(&defects);
    let disc_first_decile = running_max(&defects[..(cfg.samples / 10).max(1)]);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
    let hp: Vec<[Complex64; 4]> = (0..cfg.samples)
        .map(|_| [(); 4].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(1e-3..1.0))))
        .collect();
    let hp_max = running_max(&hp.par_iter().map(|q| defect_of(q, distance_halfplane)).collect::<Result<Vec<f64>>>()?);

    let triangle_thinness = cfg
        .triangle_radii
        .iter()
        .map(|&rho| Ok((rho, triangle_thinness(rho, cfg.triangle_samples)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut ray_family = Vec::new();
    for top in 1..=cfg.ray_u_max {
        let pts: Vec<LogPolar> = (1..=top)
            .flat_map(|u| {
                let l = -(2.0 * u as f64).exp();
                [LogPolar::new(l, 0.0), LogPolar::new(l, std::f64::consts::PI)]
            })
            .collect();
        let m = pts.len();
        if m < 4 {
            ray_family.push((top as f64, 0.0));
            continue;
        }
        let mut table = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in (i + 1)..m {
                let d = distance_punctured_disc_log(pts[i], pts[j], 1.0)?;
                table[i][j] = d;
                table[j][i] = d;
            }
        }
        ray_family.push((top as f64, delta_from_table(&table)));
    }
    let ray_exceeds_tenfold = ray_family.iter().any(|&(_, d)| d > 10.0 * disc_max);

    Ok(ControlRun {
        parameters: cfg.clone(),
        disc_max,
        disc_max_doubled,
        doubling_ratio: if disc_max > 0.0 { disc_max_doubled / disc_max } else { f64::INFINITY },
        disc_first_decile,
        halfplane_max: hp_max,
        triangle_thinness,
        ray_family,
        ray_exceeds_tenfold,
    })
}
