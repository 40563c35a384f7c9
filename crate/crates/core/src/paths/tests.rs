use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::geometry::{CPoint, DomainOracle};
use crate::metrics::{distance_disc, distance_punctured_disc, lower_bound_punctured_log, BoundValue};
use crate::quadrature::QuadOptions;
use crate::Error;

fn r1(x: f64) -> CPoint {
    CPoint::real(&[x]).unwrap()
}

fn punctured_oracle(a: &CPoint, b: &CPoint) -> crate::Result<BoundValue> {
    Ok(BoundValue::exact(distance_punctured_disc(a[0], b[0], 1.0)?))
}

#[test]
fn segment_length_in_disc() {
    let d = DomainOracle::disc(1.0).unwrap();
    let v = length_upper(&d, &segment(&r1(0.0), &r1(0.5)).unwrap(), 0.0, 1.0, QuadOptions::default()).unwrap();
    assert!((v - 2f64.ln()).abs() < 1e-10);
    assert!(v >= 0.5f64.atanh());
    let c = constant(&r1(0.3), 0.0, 2.0).unwrap();
    assert_eq!(length_upper(&d, &c, 0.0, 2.0, QuadOptions::default()).unwrap(), 0.0);
}

#[test]
fn radial_curve_length_in_punctured_disc() {
    let d = DomainOracle::punctured_disc(1.0).unwrap();
    let v = length_upper(&d, &radial_geodesic_punctured(), 0.0, 1.0, QuadOptions::default()).unwrap();
    // the ray to the puncture is the nearest boundary, so the integrand is |z'| / |z| = 2 e^{2u}
    assert!((v - (2f64.exp() - 1.0)).abs() < 1e-8);
    assert!(v >= 1.0);
}

#[test]
fn curve_leaving_domain_is_reported() {
    let d = DomainOracle::disc(1.0).unwrap();
    let c = segment(&r1(0.0), &r1(1.5)).unwrap();
    assert!(matches!(length_upper(&d, &c, 0.0, 1.0, QuadOptions::default()), Err(Error::CurveExitsDomain(_))));
    assert!(matches!(c.check_inside(&d, 50), Err(Error::CurveExitsDomain(_))));
}

#[test]
fn radial_geodesic_is_isometric() {
    let g = radial_geodesic_punctured();
    assert!((g.point_at(0.0).unwrap()[0].re - (-1f64).exp()).abs() < 1e-16);
    for s in 0..=3i32 {
        for t in 0..=3 {
            let (a, b) = (g.point_at(s as f64).unwrap(), g.point_at(t as f64).unwrap());
            let d = distance_punctured_disc(a[0], b[0], 1.0).unwrap();
            assert!((d - (s as f64 - t as f64).abs()).abs() < 1e-9);
            assert!((lower_bound_punctured_log(a[0], b[0]).unwrap() - d).abs() < 1e-9);
        }
    }
}

#[test]
fn tent_curve_decay() {
    let zeta = CPoint::basis(2, 0);
    let p = CPoint::real(&[0.0, 0.5]).unwrap();
    let c = tent_curve(&zeta, &p).unwrap();
    assert_eq!(c.point_at(0.0).unwrap(), p);
    let u = 2f64.ln() / 2.0;
    assert!((c.point_at(u).unwrap().dist(&zeta) - p.dist(&zeta) / 2.0).abs() < 1e-15);
    assert!(tent_curve(&p, &p).is_err());
    // analytic derivative against the finite-difference fallback
    let fd = Curve::new(0.0, f64::INFINITY, move |u| c.point_at(u).unwrap()).unwrap();
    let c = tent_curve(&zeta, &p).unwrap();
    for u in [0.0, 0.3, 2.0] {
        assert!(c.derivative_at(u).unwrap().dist(&fd.derivative_at(u).unwrap()) < 1e-5);
    }
}

#[test]
fn log_radial_slice_is_quasi_isometric() {
    let p = CPoint::real(&[0.0, 0.5]).unwrap();
    let b = log_radial_curve(&p).unwrap();
    assert_eq!(b.point_at(0.0).unwrap(), p);
    for i in 0..=12 {
        for j in 0..=12 {
            let (s, t) = (i as f64 * 0.25, j as f64 * 0.25);
            let (x, y) = (b.point_at(s).unwrap(), b.point_at(t).unwrap());
            assert!((x[1].norm() - 0.5 * (1.0 - (2.0 * s).exp()).exp()).abs() < 1e-15);
            let d = distance_punctured_disc(x[1], y[1], 1.0).unwrap();
            assert!((d - (s - t).abs()).abs() <= 1.0);
        }
    }
    assert!(log_radial_curve(&CPoint::origin(2)).is_err());
}

#[test]
fn concat_keeps_values_and_lengths() {
    let d = DomainOracle::disc(1.0).unwrap();
    let a = segment(&r1(0.0), &r1(0.3)).unwrap();
    let tail = constant(&r1(0.3), 0.0, 1.0).unwrap();
    let b = segment(&r1(0.3), &r1(-0.2)).unwrap();
    let whole = Curve::concat(&[a.clone(), tail, b.clone()]).unwrap();
    assert_eq!(whole.interval(), (0.0, 3.0));
    for u in [0.0, 0.25, 0.7, 1.0] {
        assert!(whole.point_at(u).unwrap().dist(&a.point_at(u).unwrap()) < 1e-15);
    }
    let q = QuadOptions::default();
    let total = length_upper(&d, &whole, 0.0, 1.0, q).unwrap()
        + length_upper(&d, &whole, 1.0, 2.0, q).unwrap()
        + length_upper(&d, &whole, 2.0, 3.0, q).unwrap();
    let parts = length_upper(&d, &a, 0.0, 1.0, q).unwrap() + length_upper(&d, &b, 0.0, 1.0, q).unwrap();
    assert!((total - parts).abs() < 1e-9);
    let gap = segment(&r1(0.5), &r1(0.6)).unwrap();
    assert!(matches!(Curve::concat(&[a, gap]), Err(Error::EndpointMismatch(_))));
}

#[test]
fn radial_geodesic_verifies_with_unit_constants() {
    let g = radial_geodesic_punctured();
    let grid = SampleGrid::new(0.0, 3.0, 31).unwrap();
    let rep = verify_quasi_geodesic(&g, 1.0, 1e-9, &grid, punctured_oracle).unwrap();
    assert!(rep.pass, "{rep:?}");
    let big = verify_quasi_geodesic(&g.restrict(0.0, 0.5).unwrap(), 1.0, 20.0, &SampleGrid::new(0.0, 0.5, 10).unwrap(), punctured_oracle).unwrap();
    assert!(big.pass && big.worst_upper_margin > 0.0);
}

#[test]
fn half_speed_geodesic_needs_a_two() {
    let g = radial_geodesic_punctured().reparam(0.5, 0.0).unwrap();
    let grid = SampleGrid::new(0.0, 6.0, 25).unwrap();
    let scan = QgScan { b_cap: 0.0, ..QgScan::default() };
    let (a, b) = estimate_qg_constants(&g, &grid, &scan, punctured_oracle).unwrap();
    assert!((a - 2.0).abs() <= 0.011 && b == 0.0, "({a}, {b})");
    let (a, b) = estimate_qg_constants(&radial_geodesic_punctured(), &SampleGrid::new(0.0, 3.0, 25).unwrap(), &QgScan::default(), punctured_oracle).unwrap();
    assert!(a <= 1.0 + 1e-12 && b <= 0.01, "({a}, {b})");
}

#[test]
fn infinite_upper_is_inconclusive() {
    let g = radial_geodesic_punctured();
    let grid = SampleGrid::new(0.0, 1.0, 4).unwrap();
    let rep = verify_quasi_geodesic(&g, 1.0, 0.0, &grid, |_, _| BoundValue::new(0.0, f64::INFINITY, crate::metrics::Source::Trivial, crate::metrics::Source::Trivial)).unwrap();
    assert!(rep.inconclusive && !rep.pass);
}

#[test]
fn mesh_upper_bounds() {
    let spec = MeshSpec::default();
    let d = DomainOracle::disc(1.0).unwrap();
    let v = distance_upper_mesh(&d, &r1(0.0), &r1(0.5), &spec).unwrap().value;
    assert!(v >= 0.5f64.atanh() - 1e-12 && v <= 0.5f64.atanh() + 0.1, "{v}");
    assert_eq!(distance_upper_mesh(&d, &r1(0.2), &r1(0.2), &spec).unwrap().value, 0.0);
    let pd = DomainOracle::polydisc(vec![1.0, 1.0]).unwrap();
    let v = distance_upper_mesh(&pd, &CPoint::origin(2), &CPoint::real(&[0.5, 0.5]).unwrap(), &spec).unwrap().value;
    assert!((v - 0.5f64.atanh()).abs() < 0.1, "{v}");
    let hp = DomainOracle::half_plane();
    let i = CPoint::new(vec![Complex64::new(0.0, 1.0)]).unwrap();
    assert!(matches!(distance_upper_mesh(&hp, &i, &i, &spec), Err(Error::Unbounded)));
}

#[test]
fn polydisc_mesh_follows_each_factor() {
    let pd = DomainOracle::polydisc(vec![1.0, 1.0]).unwrap();
    let c = |re, im| Complex64::new(re, im);
    let p = CPoint::new(vec![c(0.5, 0.0), c(0.0, -0.3)]).unwrap();
    let q = CPoint::new(vec![c(-0.2, 0.6), c(0.7, 0.0)]).unwrap();
    let exact = distance_disc(p[0], q[0], 1.0).unwrap().max(distance_disc(p[1], q[1], 1.0).unwrap());
    let v = distance_upper_mesh(&pd, &p, &q, &MeshSpec::default()).unwrap().value;
    assert!(v >= exact - 1e-12 && v <= 1.1 * exact, "{v} vs {exact}");
}

#[test]
fn mesh_never_beats_the_exact_distance_by_much_on_punctured_disc() {
    let d = DomainOracle::punctured_disc(1.0).unwrap();
    let a = r1(0.3);
    let b = CPoint::new(vec![Complex64::from_polar(0.3, 2.5)]).unwrap();
    let v = distance_upper_mesh(&d, &a, &b, &MeshSpec::default()).unwrap().value;
    let exact = distance_punctured_disc(a[0], b[0], 1.0).unwrap();
    assert!(v >= exact - 1e-3 && v <= 1.1 * exact, "{v} vs {exact}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn qg_pass_is_monotone(da in 0.0f64..2.0, db in 0.0f64..2.0) {
        let g = radial_geodesic_punctured().reparam(0.7, 0.0).unwrap();
        let grid = SampleGrid::new(0.0, 4.0, 12).unwrap();
        let t = PairTable::for_curve(&g, &grid, punctured_oracle).unwrap();
        for (a, b) in [(1.0, 0.5), (1.5, 0.0), (1.43, 0.1)] {
            if t.verify(a, b).unwrap().pass {
                prop_assert!(t.verify(a + da, b + db).unwrap().pass);
            }
        }
    }
}
