use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::geometry::CPoint;
use crate::metrics::{distance_disc, BoundValue};
use crate::paths::{segment, QgScan, SampleGrid};

fn c(x: f64, y: f64) -> CPoint {
    CPoint::new(vec![Complex64::new(x, y)]).unwrap()
}

fn disc(p: &CPoint, q: &CPoint) -> crate::Result<BoundValue> {
    Ok(BoundValue::exact(distance_disc(p[0], q[0], 1.0)?))
}

#[test]
fn defect_of_a_tree_metric_is_zero() {
    // star with four unit leaves
    let d = [[0.0, 2.0, 2.0, 2.0], [2.0, 0.0, 2.0, 2.0], [2.0, 2.0, 0.0, 2.0], [2.0, 2.0, 2.0, 0.0]];
    assert_eq!(fourpoint_defect(&d), 0.0);
}

#[test]
fn defect_of_a_euclidean_square() {
    let s = 2f64.sqrt();
    let d = [[0.0, 1.0, s, 1.0], [1.0, 0.0, 1.0, s], [s, 1.0, 0.0, 1.0], [1.0, s, 1.0, 0.0]];
    assert!((fourpoint_defect(&d) - (s - 1.0)).abs() < 1e-15);
}

#[test]
fn disc_square_approaches_half_log_two() {
    let bound = 2f64.ln() / 2.0;
    let mut last = 0.0;
    for rho in [0.5, 0.9, 0.99, 0.999999] {
        let pts: Vec<CPoint> = (0..4)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 * k as f64;
                c(rho * t.cos(), rho * t.sin())
            })
            .collect();
        let d = delta_fourpoint(&pts, disc).unwrap();
        assert!(d <= bound + 1e-9 && d >= last);
        last = d;
    }
    assert!((last - bound).abs() < 1e-3);
}

#[test]
fn too_few_points() {
    let pts = vec![c(0.0, 0.0), c(0.1, 0.0), c(0.2, 0.0)];
    assert!(delta_fourpoint(&pts, disc).is_err());
}

#[test]
fn sampled_minimum_is_lowered_by_the_margin() {
    let g = SampleGrid::new(0.0, 1.0, 11).unwrap();
    let s = side_lower_from_fn(&g, |u| Ok((u - 0.33).abs() + 1.0)).unwrap();
    assert!(!s.monotone);
    assert!((s.raw_min - 1.03).abs() < 1e-12);
    assert!((s.margin - 0.05).abs() < 1e-12);
    assert!(s.value <= 1.0);
}

#[test]
fn monotone_samples_need_no_margin() {
    let g = SampleGrid::new(0.0, 2.0, 9).unwrap();
    let s = side_lower_from_fn(&g, |u| Ok(u * u)).unwrap();
    assert!(s.monotone && s.margin == 0.0 && s.value == 0.0 && s.argmin == 0.0);
}

#[test]
fn distance_from_origin_to_radial_segment() {
    let side = segment(&c(0.5, 0.0), &c(0.9, 0.0)).unwrap();
    let g = SampleGrid::new(0.0, 1.0, 41).unwrap();
    let s = point_to_side_lower(&c(0.0, 0.0), &side, &g, disc).unwrap();
    assert!(s.monotone);
    assert!((s.value - 0.5f64.atanh()).abs() < 1e-12);
}

#[test]
fn triangle_requires_closed_sides() {
    let (a, b, d) = (c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.5));
    let sides = [segment(&a, &b).unwrap(), segment(&b, &d).unwrap(), segment(&d, &a).unwrap()];
    let reports = sides.clone().map(|s| {
        let g = SampleGrid::new(0.0, 1.0, 11).unwrap();
        let t = crate::paths::PairTable::for_curve(&s, &g, disc).unwrap();
        t.estimate(&QgScan::default()).unwrap().2
    });
    let tri = QGTriangle::new(sides.clone(), reports.clone()).unwrap();
    let rows = tri.thinness(0, &[0.5], 41, disc).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].certified_not_thin_for_m > 0.0 && rows[0].certified_not_thin_for_m < 0.5);

    let broken = [sides[0].clone(), segment(&b, &c(0.0, 0.4)).unwrap(), sides[2].clone()];
    assert!(matches!(QGTriangle::new(broken, reports), Err(crate::Error::EndpointMismatch(_))));
}

proptest! {
    #[test]
    fn defect_is_invariant_under_relabelling(xs in proptest::collection::vec(-0.9f64..0.9, 8), perm in 0usize..24) {
        let pts: Vec<CPoint> = xs.chunks(2).map(|v| c(v[0] * 0.7, v[1] * 0.7)).collect();
        let mut idx = [0, 1, 2, 3];
        let mut k = perm;
        for i in (1..4).rev() {
            idx.swap(i, k % (i + 1));
            k /= i + 1;
        }
        let q = [pts[0].clone(), pts[1].clone(), pts[2].clone(), pts[3].clone()];
        let r = idx.map(|i| pts[i].clone());
        let a = delta_over_quadruples(&[q], disc).unwrap();
        let b = delta_over_quadruples(&[r], disc).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a <= 2f64.ln() / 2.0 + 1e-9);
    }
}
