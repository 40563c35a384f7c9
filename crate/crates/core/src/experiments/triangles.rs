use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::family::{run_family, FamilyModel, FamilyOptions, TentFamily};
use super::witness::WitnessRun;
use super::GridSpec;
use crate::error::{Error, Result};
use crate::geometry::{CPoint, Hyperplane, Phi};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallMinusHyperplaneConfig {
    pub n: usize,
    pub s: f64,
    pub t_grid: GridSpec,
    pub m_targets: Vec<f64>,
    pub options: FamilyOptions,
}

impl Default for BallMinusHyperplaneConfig {
    fn default() -> Self {
        BallMinusHyperplaneConfig {
            n: 2,
            s: 0.5,
            t_grid: GridSpec { start: 0.0, end: 8.0, step: 0.5 },
            m_targets: vec![1.0, 2.0],
            options: FamilyOptions::default(),
        }
    }
}

fn sort_rows(run: &mut WitnessRun) {
    run.rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.t0.total_cmp(&b.t0)));
}

/// The unit ball in `C^n` minus `{z_n = 0}`, `p = s e_n`, `zeta = e_1`.
pub fn run_ball_minus_hyperplane(cfg: &BallMinusHyperplaneConfig) -> Result<WitnessRun> {
    if cfg.n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {}", cfg.n)));
    }
    let family = TentFamily::new(FamilyModel::Ball, cfg.s)?;
    let grid = cfg.t_grid.values()?;
    let (rows, verdicts, qg) = run_family(&family, "ball-minus-hyperplane", &grid, &cfg.m_targets, &cfg.options)?;
    let mut run = WitnessRun {
        experiment: "ball-minus-hyperplane".into(),
        parameters: json!({ "n": cfg.n, "s": cfg.s, "zeta": "e_1", "T_grid": grid, "M_targets": cfg.m_targets }),
        rows,
        verdicts,
        quasi_geodesics: qg,
        summary: json!({}),
    };
    sort_rows(&mut run);
    run.summary = json!({ "monotone_in_T": run.monotone_in_t() });
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiHyperplanesConfig {
    #[serde(flatten)]
    pub base: BallMinusHyperplaneConfig,
    /// Extra removed hyperplanes `sum_j a_j z_j = b`, as `(a re/im pairs, b re/im)`.
    pub extra: Vec<Hyperplane>,
    /// Radius of the neighbourhood `B(r) x D(r)` the extra hyperplanes must miss.
    pub neighbourhood: f64,
}

impl Default for MultiHyperplanesConfig {
    fn default() -> Self {
        MultiHyperplanesConfig { base: BallMinusHyperplaneConfig::default(), extra: Vec::new(), neighbourhood: 0.7 }
    }
}

/// Whether `h` misses the slice of the unit ball through `z` in direction `x`.
fn misses_slice(h: &Hyperplane, z: &CPoint, x: &CPoint) -> bool {
    match h.line_hit(z, x) {
        Some(l) => z.axpy(l, x).norm() >= 1.0,
        None => h.residual(z).norm() > 0.0,
    }
}

/// The ball witness with further hyperplanes removed away from the construction.
///
/// Lower bounds carry over from the single-hyperplane complement by inclusion, and the upper
/// bounds come from slices that the extra hyperplanes are checked to miss; `zeta` is picked
/// among `+-e_j`, `j < n`, to make that possible.
pub fn run_multi_hyperplanes(cfg: &MultiHyperplanesConfig) -> Result<WitnessRun> {
    let n = cfg.base.n;
    let r = cfg.neighbourhood;
    if !(r > 0.0 && 2.0 * r * r <= 1.0) {
        return Err(Error::InvalidArgument(format!("neighbourhood radius must lie in (0, 1/sqrt 2], got {r}")));
    }
    if !(cfg.base.s < r) {
        return Err(Error::InvalidArgument("s must lie inside the neighbourhood".into()));
    }
    for h in &cfg.extra {
        h.normal().check_dim(n)?;
        let a = h.normal();
        let tail: f64 = a.coords()[..n - 1].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if h.offset().norm() <= r * (tail + a[n - 1].norm()) {
            return Err(Error::Construction(format!("hyperplane {h:?} meets the neighbourhood B({r}) x D({r})")));
        }
    }
    let grid = cfg.base.t_grid.values()?;
    let p = {
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[n - 1] = Complex64::new(cfg.base.s, 0.0);
        CPoint::new(c)?
    };
    let en = CPoint::basis(n, n - 1);
    let fits = |zeta: &CPoint| {
        cfg.extra.iter().all(|h| {
            misses_slice(h, &p, &(zeta - &p))
                && misses_slice(h, &p, &en)
                && grid.iter().all(|&t| {
                    let c = (cfg.base.s.ln() + TentFamily::ln_eps(t)).exp();
                    misses_slice(h, &en.scale_real(c), zeta)
                })
        })
    };
    let zeta = (0..n - 1)
        .flat_map(|j| [1.0, -1.0].map(|sgn| (j, sgn)))
        .find(|&(j, sgn)| fits(&CPoint::basis(n, j).scale_real(sgn)))
        .ok_or_else(|| Error::Construction("every candidate zeta has a slice meeting an extra hyperplane".into()))?;
    let mut run = run_ball_minus_hyperplane(&cfg.base)?;
    run.experiment = "multi-hyperplanes".into();
    for row in &mut run.rows {
        row.experiment = run.experiment.clone();
    }
    run.parameters["extra"] = serde_json::to_value(&cfg.extra).map_err(|e| Error::Config(e.to_string()))?;
    run.parameters["zeta"] = json!(format!("{}e_{}", if zeta.1 < 0.0 { "-" } else { "" }, zeta.0 + 1));
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HartogsConfig {
    /// Dimension of the base ball.
    pub n: usize,
    pub phi: Phi,
    /// Fiber coordinate of `p`, as a fraction of `r = e^{-sup phi}`.
    pub p_fraction: f64,
    pub t_grid: GridSpec,
    pub m_targets: Vec<f64>,
    pub sandwich_pairs: usize,
    pub seed: u64,
    pub options: FamilyOptions,
}

impl Default for HartogsConfig {
    fn default() -> Self {
        HartogsConfig {
            n: 1,
            phi: Phi::Cone { peak: 1.0, slope: 2.0 },
            p_fraction: 0.5,
            t_grid: GridSpec { start: 0.0, end: 8.0, step: 0.5 },
            m_targets: vec![1.0],
            sandwich_pairs: 1000,
            seed: super::DEFAULT_SEED,
            options: FamilyOptions::default(),
        }
    }
}

/// The triangle family inside `Omega_r = B x D(r)_*`, certified in `Omega_phi`.
pub fn run_hartogs(cfg: &HartogsConfig) -> Result<WitnessRun> {
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("base dimension must be positive".into()));
    }
    let domain = crate::geometry::DomainOracle::hartogs(crate::geometry::DomainOracle::unit_ball(cfg.n), cfg.phi.clone())?;
    let (r, big_r) = domain.hartogs_radii().ok_or_else(|| Error::Construction("not a Hartogs domain".into()))?;
    if !(cfg.p_fraction > 0.0 && cfg.p_fraction < 1.0) {
        return Err(Error::InvalidArgument("p_fraction must lie in (0, 1)".into()));
    }
    let family = TentFamily::new(FamilyModel::Hartogs { r, big_r }, cfg.p_fraction * r)?;
    let grid = cfg.t_grid.values()?;
    let (rows, verdicts, qg) = run_family(&family, "hartogs", &grid, &cfg.m_targets, &cfg.options)?;
    let sandwich = super::hartogs_sandwich(&domain, cfg.sandwich_pairs, cfg.seed)?;
    let mut run = WitnessRun {
        experiment: "hartogs".into(),
        parameters: json!({
            "n": cfg.n, "phi": cfg.phi, "r": r, "R": big_r, "p_fiber": family.s(),
            "T_grid": grid, "M_targets": cfg.m_targets, "seed": cfg.seed,
        }),
        rows,
        verdicts,
        quasi_geodesics: qg,
        summary: json!({}),
    };
    sort_rows(&mut run);
    run.summary = json!({ "monotone_in_T": run.monotone_in_t(), "sandwich": sandwich });
    Ok(run)
}
