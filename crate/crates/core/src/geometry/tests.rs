use super::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ball_minus_z2() -> DomainOracle {
    DomainOracle::minus_hyperplanes(DomainOracle::unit_ball(2), vec![Hyperplane::coordinate(2, 1)]).unwrap()
}

/// Membership-only ray search: first exit along `z + t e^{iθ} X/|X|`, minimized over a fine angle grid.
fn brute_dir_dist(d: &DomainOracle, z: &CPoint, x: &CPoint, angles: usize) -> f64 {
    let unit = x.scale_real(1.0 / x.norm());
    let mut best = f64::INFINITY;
    for k in 0..angles {
        let rot = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / angles as f64);
        let mut t = 0.0;
        let step = 1e-3;
        while d.contains(&z.axpy(rot * (t + step), &unit)).unwrap() {
            t += step;
        }
        let (mut lo, mut hi) = (t, t + step);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if d.contains(&z.axpy(rot * mid, &unit)).unwrap() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(hi);
    }
    best
}

#[test]
fn contains_examples() {
    let b = DomainOracle::unit_ball(2);
    assert!(b.contains(&CPoint::origin(2)).unwrap());
    assert!(!ball_minus_z2().contains(&CPoint::real(&[0.3, 0.0]).unwrap()).unwrap());
    let hull = DomainOracle::coordinate_disc_hull(vec![1.0, 1.0]).unwrap();
    assert!(hull.contains(&CPoint::real(&[0.5, 0.49]).unwrap()).unwrap());
    assert!(!hull.contains(&CPoint::real(&[0.5, 0.51]).unwrap()).unwrap());
}

#[test]
fn contains_rejects_dimension_mismatch() {
    let b = DomainOracle::unit_ball(2);
    assert!(matches!(b.contains(&CPoint::origin(3)), Err(crate::Error::DimensionMismatch { .. })));
}

#[test]
fn boundary_dist_examples() {
    let b = DomainOracle::unit_ball(2);
    assert_eq!(b.boundary_dist(&CPoint::origin(2)).unwrap(), 1.0);
    let pd = DomainOracle::polydisc(vec![1.0, 1.0]).unwrap();
    assert_eq!(pd.boundary_dist(&CPoint::real(&[0.5, 0.0]).unwrap()).unwrap(), 0.5);
    assert!(matches!(b.boundary_dist(&CPoint::real(&[1.5, 0.0]).unwrap()), Err(crate::Error::OutsideDomain)));
}

#[test]
fn boundary_dist_minus_hyperplane_matches_sampled_boundary() {
    let z = CPoint::real(&[0.0, 0.25]).unwrap();
    let got = ball_minus_z2().boundary_dist(&z).unwrap();
    // oracle: sample the sphere and the removed hyperplane inside the ball
    let mut best = f64::INFINITY;
    let m = 60;
    for i in 0..m {
        for j in 0..m {
            let th = PI * i as f64 / (m - 1) as f64;
            let ph = 2.0 * PI * j as f64 / m as f64;
            let p = CPoint::new(vec![c(th.cos(), 0.0), Complex64::from_polar(th.sin(), ph)]).unwrap();
            best = best.min(z.dist(&p));
        }
    }
    for i in 0..201 {
        let w = CPoint::new(vec![c(-1.0 + 2.0 * i as f64 / 200.0, 0.0), c(0.0, 0.0)]).unwrap();
        best = best.min(z.dist(&w));
    }
    assert!((best - 0.25).abs() < 1e-9);
    assert!((got - 0.25).abs() < 1e-15);
}

#[test]
fn dir_boundary_dist_examples() {
    let b = DomainOracle::unit_ball(2);
    let e1 = CDirection::new(CPoint::basis(2, 0)).unwrap();
    let e2 = CDirection::new(CPoint::basis(2, 1)).unwrap();
    assert!((b.dir_boundary_dist(&CPoint::origin(2), &e1).unwrap() - 1.0).abs() < 1e-15);

    let s = 0.25;
    let z = CPoint::real(&[0.0, s]).unwrap();
    let d = ball_minus_z2();
    let got = d.dir_boundary_dist(&z, &e2).unwrap();
    let oracle = brute_dir_dist(&d, &z, e2.vector(), 64);
    assert!((got - 0.25).abs() < 1e-15);
    assert!((oracle - (s as f64).min(1.0 - s)).abs() < 1e-9);

    let pd = DomainOracle::polydisc(vec![1.0, 2.0]).unwrap();
    assert_eq!(pd.dir_boundary_dist(&CPoint::origin(2), &e1).unwrap(), 1.0);
}

#[test]
fn ball_dir_dist_matches_ray_search_off_center() {
    let b = DomainOracle::unit_ball(2);
    let z = CPoint::new(vec![c(0.3, -0.2), c(0.1, 0.4)]).unwrap();
    let x = CPoint::new(vec![c(0.7, 0.1), c(-0.2, 0.5)]).unwrap();
    let got = b.dir_boundary_dist(&z, &CDirection::new(x.clone()).unwrap()).unwrap();
    let oracle = brute_dir_dist(&b, &z, &x, 720);
    assert!(got <= oracle + 1e-12);
    assert!(oracle - got < 1e-4, "{got} vs {oracle}");
}

#[test]
fn hull_dir_dist_is_certified_upper_bound() {
    let h = DomainOracle::coordinate_disc_hull(vec![1.0, 0.5]).unwrap();
    let z = CPoint::new(vec![c(0.2, 0.1), c(0.05, -0.1)]).unwrap();
    let x = CDirection::from_coords(vec![c(1.0, 0.3), c(0.2, 0.0)]).unwrap();
    let det = h.dir_boundary_dist_detail(&z, &x).unwrap();
    assert!(matches!(det.method, DirMethod::AngularGrid { directions: 256, .. }));
    let fine = brute_dir_dist(&h, &z, x.vector(), 2048);
    assert!(det.value >= fine - 1e-9);
    assert!(det.value - fine < 1e-3);
}

#[test]
fn half_plane_line_distance() {
    let hp = DomainOracle::half_plane();
    let z = CPoint::new(vec![c(3.0, 0.5)]).unwrap();
    assert_eq!(hp.dir_boundary_dist(&z, &CDirection::from_coords(vec![c(1.0, 0.0)]).unwrap()).unwrap(), 0.5);
    assert!(matches!(hp.diameter(), Err(crate::Error::Unbounded)));
}

#[test]
fn diameter_examples() {
    assert_eq!(DomainOracle::unit_ball(2).diameter().unwrap(), 2.0);
    assert_eq!(ball_minus_z2().diameter().unwrap(), 2.0);
    let pd = DomainOracle::polydisc(vec![1.0, 1.0]).unwrap();
    // oracle: farthest pair among boundary-torus samples
    let m = 16;
    let mut pts = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let a = 2.0 * PI * i as f64 / m as f64;
            let b = 2.0 * PI * j as f64 / m as f64;
            pts.push(CPoint::new(vec![Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)]).unwrap());
        }
    }
    let brute = pts.iter().flat_map(|p| pts.iter().map(move |q| p.dist(q))).fold(0.0, f64::max);
    assert!((brute - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!((pd.diameter().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn hyperplane_must_meet_base() {
    let far = Hyperplane::coordinate_at(2, 1, c(2.0, 0.0));
    assert!(DomainOracle::minus_hyperplanes(DomainOracle::unit_ball(2), vec![far.clone()]).is_err());
    let pd = DomainOracle::polydisc(vec![1.0, 1.0]).unwrap();
    assert!(DomainOracle::minus_hyperplanes(pd.clone(), vec![far]).is_err());
    let tilted = Hyperplane::new(CPoint::real(&[1.0, 1.0]).unwrap(), c(1.5, 0.0)).unwrap();
    assert!(DomainOracle::minus_hyperplanes(pd, vec![tilted]).is_ok());
}

#[test]
fn near_hyperplane_points_are_rejected() {
    let d = ball_minus_z2();
    assert!(!d.contains(&CPoint::real(&[0.2, 1e-15]).unwrap()).unwrap());
    assert!(d.contains(&CPoint::real(&[0.2, 1e-13]).unwrap()).unwrap());
}

#[test]
fn localized_removal_only_removes_window() {
    let zeta = CPoint::real(&[1.0, 0.0]).unwrap();
    let d = DomainOracle::localized_removal(DomainOracle::unit_ball(2), Hyperplane::coordinate(2, 1), zeta, 0.3).unwrap();
    assert!(!d.contains(&CPoint::real(&[0.9, 0.0]).unwrap()).unwrap());
    assert!(d.contains(&CPoint::real(&[0.2, 0.0]).unwrap()).unwrap());
    let z = CPoint::real(&[0.5, 0.0]).unwrap();
    // nearest removed point is (0.7, 0)
    assert!((d.boundary_dist(&z).unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(d.convexity(), ConvexityClass::Unclassified);
}

#[test]
fn hartogs_membership_and_radii() {
    let d = DomainOracle::hartogs(DomainOracle::unit_ball(1), Phi::Cone { peak: 1.0, slope: 2.0 }).unwrap();
    let (r, big_r) = d.hartogs_radii().unwrap();
    assert!((r - (-1f64).exp()).abs() < 1e-15 && big_r == 1.0);
    assert!(d.contains(&CPoint::real(&[0.0, 0.3]).unwrap()).unwrap());
    assert!(!d.contains(&CPoint::real(&[0.0, 0.4]).unwrap()).unwrap());
    assert!(d.contains(&CPoint::real(&[0.8, 0.9]).unwrap()).unwrap());
    assert!(!d.contains(&CPoint::real(&[0.8, 0.0]).unwrap()).unwrap());
    let z = CPoint::real(&[0.0, 0.3]).unwrap();
    assert!((d.boundary_dist(&z).unwrap() - (r - 0.3)).abs() < 1e-15);
    let e2 = CDirection::new(CPoint::basis(2, 1)).unwrap();
    let dd = d.dir_boundary_dist(&z, &e2).unwrap();
    assert!(dd >= r - 0.3 - 1e-12 && dd <= 0.3 + 1e-9);
    assert!(DomainOracle::hartogs(DomainOracle::unit_ball(1), Phi::Const { value: f64::NAN }).is_err());
}

#[test]
fn convexity_flags() {
    assert!(DomainOracle::disc(1.0).unwrap().convexity().is_c_convex());
    assert_eq!(ball_minus_z2().convexity(), ConvexityClass::WeaklyLinearlyConvex);
    let prod = DomainOracle::product(vec![DomainOracle::unit_ball(1), DomainOracle::punctured_disc(1.0).unwrap()]).unwrap();
    assert!(prod.convexity().is_weakly_linearly_convex());
}

fn arb_point(n: usize, scale: f64) -> impl Strategy<Value = CPoint> {
    proptest::collection::vec((-scale..scale, -scale..scale), n)
        .prop_map(|v| CPoint::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn models() -> Vec<DomainOracle> {
    vec![
        DomainOracle::disc(1.0).unwrap(),
        DomainOracle::punctured_disc(1.0).unwrap(),
        DomainOracle::unit_ball(2),
        DomainOracle::polydisc(vec![1.0, 0.7]).unwrap(),
        DomainOracle::coordinate_disc_hull(vec![1.0, 1.0]).unwrap(),
        ball_minus_z2(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn line_distance_dominates_full_distance(z in arb_point(2, 0.7), x in arb_point(2, 1.0), which in 0usize..6) {
        let d = &models()[which];
        let z = z.slice(0, d.dim());
        let x = x.slice(0, d.dim());
        prop_assume!(!x.is_zero() && d.contains(&z).unwrap());
        let bd = d.boundary_dist(&z).unwrap();
        let dd = d.dir_boundary_dist(&z, &CDirection::new(x).unwrap()).unwrap();
        prop_assert!(bd <= dd + 1e-12, "{} > {}", bd, dd);
    }

    #[test]
    fn hull_of_coordinate_discs_lies_in_ball(z in arb_point(3, 1.0)) {
        let hull = DomainOracle::coordinate_disc_hull(vec![1.0; 3]).unwrap();
        if hull.contains(&z).unwrap() {
            prop_assert!(DomainOracle::unit_ball(3).contains(&z).unwrap());
        }
    }

    #[test]
    fn product_membership_is_conjunction(z in arb_point(3, 1.2)) {
        let a = DomainOracle::unit_ball(2);
        let b = DomainOracle::punctured_disc(0.8).unwrap();
        let p = DomainOracle::product(vec![a.clone(), b.clone()]).unwrap();
        let expect = a.contains(&z.slice(0, 2)).unwrap() && b.contains(&z.slice(2, 3)).unwrap();
        prop_assert_eq!(p.contains(&z).unwrap(), expect);
    }

    #[test]
    fn removed_hyperplane_points_never_contained(z in arb_point(2, 0.7), a in arb_point(2, 1.0)) {
        prop_assume!(a.norm() > 0.1);
        let h = Hyperplane::new(a, Complex64::new(0.1, -0.05)).unwrap();
        let base = DomainOracle::unit_ball(2);
        prop_assume!(base.meets_hyperplane(&h));
        let d = DomainOracle::minus_hyperplanes(base, vec![h.clone()]).unwrap();
        let on = h.project(&z);
        prop_assert!(!d.contains(&on).unwrap());
    }
}
