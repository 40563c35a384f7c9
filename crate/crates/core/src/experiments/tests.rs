use num_complex::Complex64;

use super::*;
use crate::geometry::{CPoint, DomainOracle, Hyperplane, Phi};
use crate::metrics::{distance_ball, distance_punctured_disc, kobayashi_distance, Strategy};

fn ball_point(z1: f64, z2: f64) -> CPoint {
    CPoint::real(&[z1, z2]).unwrap()
}

fn ball() -> TentFamily {
    TentFamily::new(FamilyModel::Ball, 0.5).unwrap()
}

fn alpha(s: f64, u: f64) -> CPoint {
    let d = (-2.0 * u).exp();
    ball_point(1.0 - d, s * d)
}

fn beta(s: f64, u: f64) -> CPoint {
    ball_point(0.0, s * TentFamily::ln_eps(u).exp())
}

#[test]
fn grid_spec_parsing() {
    let g: GridSpec = "0:8:0.5".parse().unwrap();
    assert_eq!(g.values().unwrap().len(), 17);
    assert_eq!(g.values().unwrap()[3], 1.5);
    assert!("0:8".parse::<GridSpec>().is_err());
    assert!("1:0:0.5".parse::<GridSpec>().is_err());
    assert_eq!("2".parse::<GridSpec>().unwrap().values().unwrap(), vec![2.0]);
    let t: GridSpec = serde_json::from_str(r#"{"start":0,"end":8,"step":0.5}"#).unwrap();
    let s: GridSpec = serde_json::from_str(r#""0:8:0.5""#).unwrap();
    assert_eq!((t, s), (g, g));
    assert_eq!(serde_json::to_string(&g).unwrap(), r#""0:8:0.5""#);
    assert!(serde_json::from_str::<GridSpec>(r#""8:0:1""#).is_err());
}

#[test]
fn tent_distances_match_the_ball_formula() {
    let f = ball();
    let o = CPoint::origin(2);
    for (u, w) in [(0.0, 0.5), (0.3, 2.0), (1.0, 4.0)] {
        let exact = distance_ball(&o, 1.0, &alpha(0.5, u), &alpha(0.5, w)).unwrap();
        assert!((f.alpha_pair(u, w).unwrap().lower - exact).abs() < 1e-8 * (1.0 + exact));
    }
}

#[test]
fn log_radial_distances_match_the_punctured_disc() {
    let f = ball();
    for (u, w) in [(0.0, 0.5), (0.2, 1.0)] {
        let exact = distance_punctured_disc(beta(0.5, u)[1], beta(0.5, w)[1], 1.0).unwrap();
        let b = f.beta_pair(u, w).unwrap();
        assert!(b.is_exact() && (b.lower - exact).abs() < 1e-10);
    }
}

#[test]
fn triangle_sides_share_endpoints() {
    let f = ball();
    let t: f64 = 0.5;
    let c = 0.5 * TentFamily::ln_eps(t).exp();
    let rho = (1.0 - c * c).sqrt();
    let gamma = |v: f64| ball_point(rho * (1.0 - (-2.0 * v).exp()), c);
    assert!(beta(0.5, 0.0).dist(&ball_point(0.0, 0.5)) < 1e-15);
    assert!(alpha(0.5, 0.0).dist(&ball_point(0.0, 0.5)) < 1e-15);
    assert!(gamma(0.0).dist(&beta(0.5, t)) < 1e-12);
    assert!(gamma(f.v_end(t)).dist(&alpha(0.5, TentFamily::u_of(t))) < 1e-9);
    // T = 0: eta^0 is p itself
    assert_eq!(TentFamily::u_of(0.0), 0.0);
}

#[test]
fn gamma_distances_match_the_ball_formula() {
    let f = ball();
    let t: f64 = 0.5;
    let c = 0.5 * TentFamily::ln_eps(t).exp();
    let rho = (1.0 - c * c).sqrt();
    let g = |v: f64| ball_point(rho * (1.0 - (-2.0 * v).exp()), c);
    let exact = distance_ball(&CPoint::origin(2), 1.0, &g(0.2), &g(1.3)).unwrap();
    assert!((f.gamma_pair(0.2, 1.3).unwrap().lower - exact).abs() < 1e-9);
}

#[test]
fn cross_lower_bounds_stay_below_dispatcher_uppers() {
    let f = ball();
    let dom = DomainOracle::minus_hyperplanes(DomainOracle::unit_ball(2), vec![Hyperplane::coordinate(2, 1)]).unwrap();
    let strategy = Strategy::default();
    let u0 = TentFamily::u_of(0.5);
    let x = alpha(0.5, u0);
    for u in [0.0, 0.2, 0.4] {
        let up = kobayashi_distance(&dom, &x, &beta(0.5, u), &strategy).unwrap().upper;
        assert!(f.lower_to_beta(u0, u).unwrap() <= up + 1e-9);
    }
}

#[test]
fn witness_example_level_exceeds_one() {
    let f = ball();
    let rows = f.thinness_rows("t", 2.0, 4.0, &[1.0], &FamilyOptions::default()).unwrap();
    let tri = rows.iter().find(|r| r.side == "triangle").unwrap();
    assert!(tri.certified_m > 1.0 && tri.margin == 0.0);
    assert!(f.thinness_rows("t", 2.0, 2.0, &[1.0], &FamilyOptions::default()).is_err());
}

#[test]
fn ball_run_is_monotone_and_reaches_targets() {
    let cfg = BallMinusHyperplaneConfig { t_grid: "0:4:0.5".parse().unwrap(), ..Default::default() };
    let run = run_ball_minus_hyperplane(&cfg).unwrap();
    assert!(run.monotone_in_t());
    assert!(run.quasi_geodesics.iter().all(|q| q.report.pass));
    assert!(run.verdict(1.0).unwrap().reached && run.verdict(2.0).unwrap().reached);
    assert!(run.rows.windows(2).all(|w| w[0].t <= w[1].t));
}

#[test]
fn extra_hyperplanes_far_away_leave_the_table_unchanged() {
    let base = BallMinusHyperplaneConfig { t_grid: "0:3:0.5".parse().unwrap(), ..Default::default() };
    let reference = run_ball_minus_hyperplane(&base).unwrap();
    let empty = run_multi_hyperplanes(&MultiHyperplanesConfig { base: base.clone(), ..Default::default() }).unwrap();
    let far = Hyperplane::new(CPoint::real(&[1.0, 1.0]).unwrap(), Complex64::new(1.41, 0.0)).unwrap();
    let with = run_multi_hyperplanes(&MultiHyperplanesConfig { base: base.clone(), extra: vec![far], ..Default::default() })
        .unwrap();
    for run in [&empty, &with] {
        assert_eq!(run.rows.len(), reference.rows.len());
        for (a, b) in run.rows.iter().zip(&reference.rows) {
            assert_eq!((a.t, a.t0, a.certified_m), (b.t, b.t0, b.certified_m));
        }
        assert_eq!(run.verdict(1.0).unwrap().reached, reference.verdict(1.0).unwrap().reached);
    }
    assert_eq!(empty.parameters["zeta"], "e_1");
    assert_eq!(with.parameters["zeta"], "e_1");
    let blocking = Hyperplane::coordinate_at(2, 0, Complex64::new(0.9, 0.0));
    let cfg = MultiHyperplanesConfig { base, extra: vec![blocking], ..Default::default() };
    assert!(matches!(run_multi_hyperplanes(&cfg), Err(crate::Error::Construction(_))));
}

#[test]
fn extra_hyperplane_inside_the_neighbourhood_is_rejected() {
    let near = Hyperplane::coordinate_at(2, 0, Complex64::new(0.3, 0.0));
    let cfg = MultiHyperplanesConfig { extra: vec![near], ..Default::default() };
    assert!(matches!(run_multi_hyperplanes(&cfg), Err(crate::Error::Construction(_))));
}

#[test]
fn hartogs_with_constant_phi_collapses_the_sandwich() {
    let f = TentFamily::new(FamilyModel::Hartogs { r: 1.0, big_r: 1.0 }, 0.5).unwrap();
    assert!(f.alpha_pair(0.1, 0.9).unwrap().is_exact());
    assert!(f.beta_pair(0.1, 0.9).unwrap().is_exact());
    let g = TentFamily::new(FamilyModel::Hartogs { r: (-1f64).exp(), big_r: 1.0 }, 0.18).unwrap();
    let b = g.beta_pair(0.1, 0.9).unwrap();
    assert!(b.lower < b.upper);
}

#[test]
fn hartogs_run_reaches_m_one() {
    let cfg = HartogsConfig { sandwich_pairs: 50, t_grid: "0:3:0.5".parse().unwrap(), ..Default::default() };
    let run = run_hartogs(&cfg).unwrap();
    assert!(run.monotone_in_t() && run.verdict(1.0).unwrap().reached);
    assert_eq!(run.summary["sandwich"]["violations"], 0);
    let flat = HartogsConfig { phi: Phi::Const { value: 0.0 }, ..cfg };
    let run = run_hartogs(&flat).unwrap();
    assert_eq!(run.parameters["r"], 1.0);
}

#[test]
fn sphere_separation_constant() {
    for s in [0.1, 0.03, 0.01] {
        assert!((sampled_epsilon(s, 360).unwrap() - sphere_epsilon(s)).abs() < 1e-12);
    }
}

#[test]
fn localized_run_builds_a_quasi_geodesic() {
    let cfg = LocalizedConfig { u_grid: "3:4:0.5".parse().unwrap(), v_grid: vec![2.0], side_samples: 201, ..Default::default() };
    let run = run_strict_convex_localized(&cfg).unwrap();
    assert!(run.quasi_geodesics[0].report.pass);
    assert!(run.summary["strong_convexity_c"].as_f64().unwrap() > 0.0);
    for r in run.summary["halfspace_inequality"].as_array().unwrap() {
        assert_eq!(r["holds"], true);
    }
    let bad = LocalizedConfig { loc_inner: 0.1, ..Default::default() };
    assert!(run_strict_convex_localized(&bad).is_err());
}

#[test]
fn three_leg_bounds_and_contrast() {
    let cfg = NotFinitelyCompactConfig { samples: 200, ..Default::default() };
    let run = run_not_finitely_compact(&cfg).unwrap();
    assert!(run.max_nonzero <= 2.0 * 3f64.ln());
    assert!(run.max_zero <= 3.0 * 3f64.ln());
    assert!(run.skipped > 0);
    assert!(run.contrast.windows(2).all(|w| w[1].1 > w[0].1));
    assert!(run.rows.iter().filter(|r| r.z1_zero).all(|r| r.z[0] == Complex64::new(0.0, 0.0) && r.legs.len() == 2));
}

#[test]
fn control_is_reproducible() {
    let cfg = PositiveControlConfig { samples: 500, triangle_radii: vec![0.9], triangle_samples: 50, ray_u_max: 3, ..Default::default() };
    let a = run_positive_control_disc(&cfg).unwrap();
    let b = run_positive_control_disc(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.disc_max <= 2f64.ln() / 2.0 + 1e-9);
    assert!(a.disc_max_doubled >= a.disc_max);
}
