//! Unit ball in `C^2` minus the piece `S' = {z_2 = 0} ∩ closed B(zeta, R_window)` near `zeta = e_1`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::witness::{certify, verdict_label, SideQg, Verdict, WitnessRow, WitnessRun};
use super::GridSpec;
use crate::error::{Error, Result};
use crate::geometry::{CPoint, DomainOracle, Hyperplane};
use crate::hyperbolicity::{side_lower_from_fn, SideLower};
use crate::metrics::{
    distance_ball, distance_halfplane, distance_punctured_disc, localization_multiplier, BoundValue,
};
use crate::paths::{segment, tent_curve, Curve, PairTable, QgScan, SampleGrid, U_MAX};

pub const SIDE_ZETA: &str = "pu-zetau";
pub const SIDE_ETA: &str = "pu-etau";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizedConfig {
    pub r_window: f64,
    pub r_small: f64,
    /// Offsets `s` at which the separation constant is computed and cross-checked.
    pub s_grid: Vec<f64>,
    pub u_grid: GridSpec,
    pub v_grid: Vec<f64>,
    /// `||eta - eta'|| = ||zeta - zeta'||` for the concatenated curve.
    pub chord_offset: f64,
    /// Inner radius of the two-case bound; must stay below `loc_outer^2 / 2`.
    pub loc_inner: f64,
    /// Localization radius; at most `r_window`.
    pub loc_outer: f64,
    pub m_targets: Vec<f64>,
    pub qg_samples: usize,
    pub side_samples: usize,
    pub scan: QgScan,
}

impl Default for LocalizedConfig {
    fn default() -> Self {
        LocalizedConfig {
            r_window: 0.3,
            r_small: 0.05,
            s_grid: vec![0.1, 0.05, 0.02, 0.01],
            u_grid: GridSpec { start: 2.5, end: 6.0, step: 0.5 },
            v_grid: vec![2.0, 3.0],
            chord_offset: 0.0125,
            loc_inner: 0.01,
            loc_outer: 0.3,
            m_targets: vec![1.0],
            qg_samples: 40,
            side_samples: 2001,
            scan: QgScan::default(),
        }
    }
}

/// `inf { 1 - Re z_1 : z in dB(e_1, s) ∩ B }` on the unit sphere, which is `s^2 / 2`.
pub fn sphere_epsilon(s: f64) -> f64 {
    0.5 * s * s
}

/// The same infimum by direct search: angular scan of `w_1 = a e^{i theta}` with the
/// feasibility boundary in `a` found by bisection on domain membership.
pub fn sampled_epsilon(s: f64, angles: usize) -> Result<f64> {
    let ball = DomainOracle::unit_ball(2);
    let feasible = |a: f64, th: f64| -> Result<bool> {
        let w1 = Complex64::from_polar(a, th);
        let w2 = Complex64::new((1.0 - a * a).max(0.0).sqrt(), 0.0);
        let z = CPoint::new(vec![Complex64::new(1.0, 0.0) + w1 * s, w2 * s])?;
        ball.contains(&z)
    };
    let value = |th: f64| -> Result<Option<f64>> {
        if !feasible(1.0, th)? {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid, th)? {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-17 {
                break;
            }
        }
        Ok(Some(-s * hi * th.cos()))
    };
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..angles {
        let th = 2.0 * std::f64::consts::PI * k as f64 / angles as f64;
        if let Some(v) = value(th)? {
            if v < best.0 {
                best = (v, th);
            }
        }
    }
    // golden-section refinement around the best angle
    let h = 2.0 * std::f64::consts::PI / angles as f64;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| value(t).map(|v| v.unwrap_or(f64::INFINITY));
    for _ in 0..100 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c)? < f(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(best.0.min(f(0.5 * (a + b))?))
}

struct Setup {
    zeta: CPoint,
    p: CPoint,
    eta: CPoint,
    eps_inner: f64,
    multiplier: f64,
    cfg: LocalizedConfig,
}

fn pt(a: Complex64, b: Complex64) -> CPoint {
    CPoint::new(vec![a, b]).expect("two coordinates")
}

impl Setup {
    fn new(cfg: &LocalizedConfig) -> Result<Self> {
        let r = cfg.r_small;
        if !(r > 0.0 && r < cfg.r_window && cfg.r_window < 1.0) {
            return Err(Error::InvalidArgument("need 0 < r_small < R_window < 1".into()));
        }
        if !(cfg.loc_outer > 0.0 && cfg.loc_outer <= cfg.r_window) {
            return Err(Error::InvalidArgument("loc_outer must lie in (0, R_window]".into()));
        }
        let k = 0.5 * (sphere_epsilon(cfg.loc_outer) / cfg.loc_inner).ln();
        if !(cfg.loc_inner > 0.0 && k > 0.0) {
            return Err(Error::InvalidArgument("need 0 < loc_inner < loc_outer^2 / 2".into()));
        }
        if !(cfg.chord_offset > 0.0 && 2.0 * cfg.chord_offset < r) {
            return Err(Error::InvalidArgument("chord_offset must lie in (0, r_small / 2)".into()));
        }
        let zeta = pt(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let p = pt(Complex64::new(1.0 - r / 2.0, 0.0), Complex64::new(r * 3f64.sqrt() / 2.0, 0.0));
        let eta = pt(Complex64::new(1.0 - r * r / 2.0, 0.0), Complex64::new(0.0, r * (1.0 - r * r / 4.0).sqrt()));
        Ok(Setup {
            zeta,
            p,
            eta,
            eps_inner: sphere_epsilon(cfg.loc_inner),
            multiplier: localization_multiplier(k)?,
            cfg: cfg.clone(),
        })
    }

    fn domain(&self) -> Result<DomainOracle> {
        DomainOracle::localized_removal(
            DomainOracle::unit_ball(2),
            Hyperplane::coordinate(2, 1),
            self.zeta.clone(),
            self.cfg.r_window,
        )
    }

    fn chord(&self, t: f64) -> CPoint {
        self.zeta.axpy(Complex64::new(t, 0.0), &(&self.eta - &self.zeta))
    }

    fn depth(z: &CPoint) -> f64 {
        1.0 - z[0].re
    }

    /// Exact distance of the supporting half-space `{Re z_1 < 1}`.
    fn halfspace(x: &CPoint, z: &CPoint) -> Result<f64> {
        let i = Complex64::new(0.0, 1.0);
        distance_halfplane(i * (Complex64::new(1.0, 0.0) - x[0]), i * (Complex64::new(1.0, 0.0) - z[0]))
    }

    fn two_case(&self, x: &CPoint, z: &CPoint) -> Result<f64> {
        let inner = self.cfg.loc_inner;
        let exit = |w: &CPoint| 0.5 * (self.eps_inner / Self::depth(w)).ln().max(0.0);
        let (xin, zin) = ((x - &self.zeta).norm() < inner, (z - &self.zeta).norm() < inner);
        Ok(match (xin, zin) {
            (true, true) => {
                let leave = exit(x) + exit(z);
                let stay = if x[1] == z[1] {
                    0.0
                } else {
                    distance_punctured_disc(x[1], z[1], self.cfg.loc_outer)? / self.multiplier
                };
                leave.min(stay)
            }
            (true, false) => exit(x),
            (false, true) => exit(z),
            (false, false) => 0.0,
        })
    }

    /// Best available lower bound for `k_{Omega \ S'}(x, z)`.
    fn lower(&self, x: &CPoint, z: &CPoint) -> Result<f64> {
        if x == z {
            return Ok(0.0);
        }
        let ball = distance_ball(&CPoint::origin(2), 1.0, x, z)?;
        Ok(ball.max(Self::halfspace(x, z)?).max(self.two_case(x, z)?))
    }

    fn gamma(&self) -> Result<(Curve, Vec<Curve>)> {
        let t = self.cfg.chord_offset / self.cfg.r_small;
        let (eta1, zeta1) = (self.chord(1.0 - t), self.chord(t));
        let a_eta = tent_curve(&self.eta, &eta1)?.restrict(0.0, U_MAX)?.reverse()?;
        let len = distance_ball(&CPoint::origin(2), 1.0, &eta1, &zeta1)?;
        let mid = segment(&eta1, &zeta1)?.reparam(1.0 / len, 0.0)?;
        let a_zeta = tent_curve(&self.zeta, &zeta1)?.restrict(0.0, U_MAX)?;
        let pieces = vec![a_eta, mid, a_zeta];
        Ok((Curve::concat(&pieces)?, pieces))
    }

    fn side_lower(&self, x: &CPoint, a: &CPoint, b: &CPoint) -> Result<SideLower> {
        let grid = SampleGrid::new(0.0, 1.0, self.cfg.side_samples)?;
        let d = b - a;
        side_lower_from_fn(&grid, |t| self.lower(x, &a.axpy(Complex64::new(t, 0.0), &d)))
    }

    /// Upper bound for the distance from `x` to the segment `[a, b]` through the side point
    /// sharing `x`'s first coordinate: both lie in the slice `{z_1 = x_1}`, a punctured disc.
    fn side_upper(&self, x: &CPoint, a: &CPoint, b: &CPoint) -> Result<Option<f64>> {
        let (a1, b1, x1) = (a[0].re, b[0].re, x[0].re);
        if b1 == a1 || x[0].im != 0.0 || a[0].im != 0.0 || b[0].im != 0.0 {
            return Ok(None);
        }
        let tau = (x1 - a1) / (b1 - a1);
        if !(0.0..=1.0).contains(&tau) {
            return Ok(None);
        }
        let z = a.axpy(Complex64::new(tau, 0.0), &(b - a));
        let rho = (1.0 - x1 * x1).sqrt();
        if (1.0 - x1).hypot(rho) > self.cfg.r_window || z[1].norm() >= rho || z[1].norm() == 0.0 {
            return Ok(None);
        }
        Ok(Some(distance_punctured_disc(x[1], z[1], rho)?))
    }

    fn side_halfspace(&self, x: &CPoint, a: &CPoint, b: &CPoint) -> Result<f64> {
        let d = b - a;
        let ps = SampleGrid::new(0.0, 1.0, self.cfg.side_samples)?.params();
        let vals = ps.par_iter().map(|&t| Self::halfspace(x, &a.axpy(Complex64::new(t, 0.0), &d))).collect::<Result<Vec<_>>>()?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Thinness table for the triangles `[p^u, zeta^u, eta^u]` at test points `zeta^v`.
pub fn run_strict_convex_localized(cfg: &LocalizedConfig) -> Result<WitnessRun> {
    let st = Setup::new(cfg)?;
    let domain = st.domain()?;

    let eps_rows = cfg
        .s_grid
        .iter()
        .map(|&s| Ok(json!({ "s": s, "analytic": sphere_epsilon(s), "sampled": sampled_epsilon(s, 720)? })))
        .collect::<Result<Vec<_>>>()?;

    let (gamma, pieces) = st.gamma()?;
    gamma.check_inside(&domain, 400)?;
    let exact = |x: &CPoint, y: &CPoint| -> Result<BoundValue> {
        // the complex line through eta and zeta meets {z_2 = 0} only at zeta
        Ok(BoundValue::exact(distance_ball(&CPoint::origin(2), 1.0, x, y)?))
    };
    let (_, end) = gamma.interval();
    let grid = SampleGrid::new(0.0, end, cfg.qg_samples)?;
    let table = PairTable::for_curve(&gamma, &grid, exact)?;
    let (_, _, report) = table
        .estimate(&cfg.scan)
        .map_err(|e| Error::NoFeasibleConstants(format!("concatenated curve: {e}")))?;
    let qg = vec![SideQg { side: "gamma".into(), t: 0.0, report }];

    // dist_H(gamma(t)) >= c ||gamma(t) - zeta|| along the tail toward zeta
    let tail = &pieces[2];
    let c_const = SampleGrid::new(0.0, U_MAX, 200)?
        .params()
        .iter()
        .map(|&u| {
            let z = tail.point_at(u)?;
            Ok(Setup::depth(&z) / (&z - &st.zeta).norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !(c_const > 0.0) {
        return Err(Error::Construction("strong-convexity constant not established on the grid".into()));
    }

    let us = cfg.u_grid.values()?;
    let cells: Vec<(f64, f64)> =
        cfg.v_grid.iter().flat_map(|&v| us.iter().filter(move |&&u| u > v).map(move |&u| (v, u))).collect();
    let results = cells
        .par_iter()
        .map(|&(v, u)| {
            let e = (-2.0 * u).exp();
            let pu = st.p.axpy(Complex64::new(e, 0.0), &(&st.eta - &st.p));
            let zu = st.chord(e);
            let hu = st.chord(1.0 - e);
            let x = st.chord((-2.0 * v).exp());
            let sz = st.side_lower(&x, &pu, &zu)?;
            let se = st.side_lower(&x, &pu, &hu)?;
            let h_eta = st.side_halfspace(&x, &pu, &hu)?;
            let up = st.side_upper(&x, &pu, &zu)?;
            Ok((v, u, sz, se, h_eta, up))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut ineq = Vec::new();
    let mut uppers = Vec::new();
    for (v, u, sz, se, h_eta, up) in results {
        uppers.push(json!({ "v": v, "u": u, "upper_to_pu_zetau": up }));
        let z = certify(0.0, Some(&sz));
        let e = certify(0.0, Some(&se));
        let (level, margin) = if z.2 <= e.2 { (z.2, z.1) } else { (e.2, e.1) };
        let mk = |side: &str, (lower, margin, cert): (f64, f64, f64), verdict: String| WitnessRow {
            experiment: "strict-convex-localized".into(),
            t: u,
            t0: v,
            side: side.into(),
            lower_bound: lower,
            margin,
            certified_m: cert,
            verdict,
        };
        rows.push(mk(SIDE_ZETA, z, String::new()));
        rows.push(mk(SIDE_ETA, e, String::new()));
        rows.push(mk("triangle", (level, margin, level), verdict_label(level, margin, &cfg.m_targets)));
        ineq.push(json!({ "v": v, "u": u, "inf_lower": se.raw_min, "inf_halfspace": h_eta, "holds": se.raw_min >= h_eta - 1e-12 }));
    }
    rows.sort_by(|a, b| a.t0.total_cmp(&b.t0).then(a.t.total_cmp(&b.t)));

    let monotone = cfg.v_grid.iter().all(|&v| {
        let seq: Vec<f64> = rows.iter().filter(|r| r.t0 == v && r.side == SIDE_ZETA).map(|r| r.certified_m).collect();
        seq.windows(2).all(|w| w[1] >= w[0])
    });
    let verdicts = cfg
        .m_targets
        .iter()
        .map(|&m| {
            let hit = rows.iter().find(|r| r.side == "triangle" && super::witness::counts_for(r.certified_m, r.margin, m));
            Verdict { m, reached: hit.is_some(), t0: hit.map(|r| r.t0), t: hit.map(|r| r.t) }
        })
        .collect();

    Ok(WitnessRun {
        experiment: "strict-convex-localized".into(),
        parameters: json!({
            "R_window": cfg.r_window, "r_small": cfg.r_small, "chord_offset": cfg.chord_offset,
            "loc_inner": cfg.loc_inner, "loc_outer": cfg.loc_outer, "u_grid": us, "v_grid": cfg.v_grid,
            "zeta": [1.0, 0.0], "p": st.p, "eta": st.eta,
        }),
        rows,
        verdicts,
        quasi_geodesics: qg,
        summary: json!({
            "epsilon": eps_rows,
            "strong_convexity_c": c_const,
            "localization_multiplier": st.multiplier,
            "halfspace_inequality": ineq,
            "side_upper": uppers,
            "monotone_in_u": monotone,
            "unimplemented": "removed pieces not contained in a single complex line",
        }),
    })
}
