//! Acceptance criteria. Each test prints one PASS/FAIL line, then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use kobayashi::experiments::{
    run_ball_minus_hyperplane, run_hartogs, run_not_finitely_compact, run_positive_control_disc,
    run_strict_convex_localized, BallMinusHyperplaneConfig, HartogsConfig, LocalizedConfig, NotFinitelyCompactConfig,
    PositiveControlConfig,
};
use kobayashi::geometry::{CPoint, DomainOracle, Hyperplane};
use kobayashi::metrics::{
    distance_ball, distance_punctured_disc, kobayashi_distance, lower_bound_punctured_log, metric_disc,
    metric_lower_bound_cconvex, metric_upper_bound, exact_distance, Strategy,
};
use kobayashi::paths::{distance_upper_mesh, MeshSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let line = format!(
        "\ncriterion {n} {}: {name} [{:.2} s] {detail}\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    // bypasses the test harness capture so the line always shows
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 1.0 && z.norm() > 1e-6 {
            return z * radius;
        }
    }
}

fn ball_point(rng: &mut ChaCha8Rng, radius: f64) -> CPoint {
    loop {
        let c = vec![disc_point(rng, 1.0), disc_point(rng, 1.0)];
        let p = CPoint::new(c).unwrap();
        if p.norm() < 1.0 {
            return p.scale_real(radius);
        }
    }
}

#[test]
fn criterion_1_radial_geodesic() {
    let start = Instant::now();
    let grid: Vec<f64> = (0..30).map(|i| 3.0 * i as f64 / 29.0).collect();
    let mut worst: f64 = 0.0;
    for &s in &grid {
        for &t in &grid {
            let a = Complex64::new((-(2.0 * s).exp()).exp(), 0.0);
            let b = Complex64::new((-(2.0 * t).exp()).exp(), 0.0);
            let d = distance_punctured_disc(a, b, 1.0).unwrap();
            worst = worst.max((d - (s - t).abs()).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-9 && elapsed < Duration::from_secs(1);
    report(1, "radial geodesic in the punctured disc", pass, elapsed, &format!("max |d - |s-t|| = {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_2_log_bound_and_equality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut below = f64::INFINITY;
    for _ in 0..10_000 {
        let (a, b) = (disc_point(&mut rng, 1.0), disc_point(&mut rng, 1.0));
        let exact = distance_punctured_disc(a, b, 1.0).unwrap();
        below = below.min(exact - lower_bound_punctured_log(a, b).unwrap());
    }
    let mut equal_gap: f64 = 0.0;
    for _ in 0..1_000 {
        let a = disc_point(&mut rng, 1.0);
        let b = a / a.norm() * rng.gen_range(1e-6..0.999);
        let exact = distance_punctured_disc(a, b, 1.0).unwrap();
        equal_gap = equal_gap.max((exact - lower_bound_punctured_log(a, b).unwrap()).abs());
    }
    let mut strict = f64::INFINITY;
    for _ in 0..1_000 {
        let a = disc_point(&mut rng, 1.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let theta = sign * rng.gen_range(0.01..std::f64::consts::PI - 0.01);
        let b = a * Complex64::from_polar(1.0, theta);
        strict = strict.min(distance_punctured_disc(a, b, 1.0).unwrap() - lower_bound_punctured_log(a, b).unwrap());
    }
    let elapsed = start.elapsed();
    let pass = below >= -1e-12 && equal_gap < 1e-9 && strict > 0.0 && elapsed < Duration::from_secs(5);
    let detail = format!("min(exact - bound) = {below:.2e}, real-ratio gap = {equal_gap:.2e}, equal-moduli min gap = {strict:.2e}");
    report(2, "log bound in the punctured disc, with equality", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_3_metric_sandwich() {
    let start = Instant::now();
    let disc = DomainOracle::disc(1.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut ordered = true;
    for k in 0..10 {
        let r = k as f64 / 10.0;
        for angle in [0.0, 1.0, 2.5, 4.0] {
            let z = Complex64::from_polar(r, angle);
            let v = Complex64::from_polar(1.0, 0.3 * angle + 0.7);
            let zp = CPoint::new(vec![z]).unwrap();
            let vp = CPoint::new(vec![v]).unwrap();
            let lower = metric_lower_bound_cconvex(&disc, &zp, &vp).unwrap();
            let exact = metric_disc(z, v, 1.0).unwrap();
            let upper = metric_upper_bound(&disc, &zp, &vp).unwrap();
            worst = worst
                .max((lower - 1.0 / (4.0 * (1.0 - r))).abs())
                .max((exact - 1.0 / (1.0 - r * r)).abs())
                .max((upper - 1.0 / (1.0 - r)).abs());
            ordered &= lower <= exact + 1e-12 && exact <= upper + 1e-12;
        }
    }

    let ball = DomainOracle::unit_ball(2);
    let spec = MeshSpec::default();
    let h = 0.01;
    let mut ball_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for r in [0.0, 0.3, 0.6, 0.8] {
        for dir in [[1.0, 0.0], [0.0, 1.0], [-0.6, 0.8]] {
            let z = CPoint::real(&[r, 0.0]).unwrap();
            let v = CPoint::real(&dir).unwrap();
            let q = z.axpy(Complex64::new(h, 0.0), &v);
            let mesh = distance_upper_mesh(&ball, &z, &q, &spec).unwrap().value;
            let diff = mesh / h;
            let lower = metric_lower_bound_cconvex(&ball, &z, &v).unwrap();
            let upper = metric_upper_bound(&ball, &z, &v).unwrap();
            let exact = distance_ball(&CPoint::origin(2), 1.0, &z, &q).unwrap();
            ball_ok &= lower <= diff && diff <= upper * (1.0 + 2.0 * h) && mesh >= exact - 1e-12;
            worst_ratio = worst_ratio.max(diff / upper);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-12 && ordered && ball_ok && elapsed < Duration::from_secs(5);
    let detail = format!("disc formula error {worst:.2e}, ordered {ordered}, ball slices consistent {ball_ok} (max mesh/upper {worst_ratio:.4})");
    report(3, "metric sandwich on the disc and ball slices", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_4_dispatcher_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let strategy = Strategy::default();
    let one = |z: Complex64| CPoint::new(vec![z]).unwrap();
    let slit = DomainOracle::minus_hyperplanes(DomainOracle::unit_ball(2), vec![Hyperplane::coordinate(2, 1)]).unwrap();
    let domains: Vec<(&str, DomainOracle)> = vec![
        ("disc", DomainOracle::disc(1.0).unwrap()),
        ("punctured disc", DomainOracle::punctured_disc(1.0).unwrap()),
        ("polydisc", DomainOracle::polydisc(vec![1.0, 1.0]).unwrap()),
        ("ball", DomainOracle::unit_ball(2)),
        ("ball minus hyperplane", slit),
    ];
    let mut failures = Vec::new();
    for (name, dom) in &domains {
        let mut bad = 0;
        for _ in 0..10_000 {
            let (p, q) = match dom.dim() {
                1 => (one(disc_point(&mut rng, 0.999)), one(disc_point(&mut rng, 0.999))),
                _ if *name == "polydisc" => (
                    CPoint::new(vec![disc_point(&mut rng, 0.999), disc_point(&mut rng, 0.999)]).unwrap(),
                    CPoint::new(vec![disc_point(&mut rng, 0.999), disc_point(&mut rng, 0.999)]).unwrap(),
                ),
                _ => (ball_point(&mut rng, 0.999), ball_point(&mut rng, 0.999)),
            };
            match kobayashi_distance(dom, &p, &q, &strategy) {
                Ok(b) if b.lower <= b.upper => {}
                _ => bad += 1,
            }
        }
        if bad > 0 {
            failures.push(format!("{name}: {bad}"));
        }
    }

    let spec = MeshSpec::default();
    let mut worst_mesh: f64 = 0.0;
    for dom in [&domains[0].1, &domains[2].1] {
        for _ in 0..5 {
            let (p, q) = if dom.dim() == 1 {
                (one(disc_point(&mut rng, 0.9)), one(disc_point(&mut rng, 0.9)))
            } else {
                (
                    CPoint::new(vec![disc_point(&mut rng, 0.9), disc_point(&mut rng, 0.9)]).unwrap(),
                    CPoint::new(vec![disc_point(&mut rng, 0.9), disc_point(&mut rng, 0.9)]).unwrap(),
                )
            };
            let exact = exact_distance(dom, &p, &q).unwrap().unwrap().upper;
            let mesh = distance_upper_mesh(dom, &p, &q, &spec).unwrap().value;
            worst_mesh = worst_mesh.max((mesh - exact).abs() / exact);
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && worst_mesh < 0.1 && elapsed < Duration::from_secs(120);
    let detail = format!("pairs failing lower <= upper: {failures:?}, worst mesh relative error {worst_mesh:.4}");
    report(4, "dispatcher consistency", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_5_ball_minus_hyperplane_growth() {
    let start = Instant::now();
    let cfg = BallMinusHyperplaneConfig { n: 2, s: 0.5, t_grid: "0:8:0.5".parse().unwrap(), ..Default::default() };
    let run = run_ball_minus_hyperplane(&cfg).unwrap();
    let qg = run.quasi_geodesics.iter().all(|q| q.report.pass);
    let monotone = run.monotone_in_t();
    let reached = [1.0, 2.0].iter().all(|&m| run.verdict(m).is_some_and(|v| v.reached));
    let elapsed = start.elapsed();
    let pass = qg && monotone && reached && elapsed < Duration::from_secs(300);
    let worst_b = run.quasi_geodesics.iter().map(|q| q.report.b).fold(0.0, f64::max);
    let detail = format!("sides pass {qg} (max B {worst_b:.2}), monotone {monotone}, M=1 and M=2 reached {reached}");
    report(5, "ball minus hyperplane witness growth", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_6_not_finitely_compact_bounds() {
    let start = Instant::now();
    let cfg = NotFinitelyCompactConfig { r: 0.4, samples: 1000, ..Default::default() };
    let run = run_not_finitely_compact(&cfg).unwrap();
    let ln3 = 3f64.ln();
    let nonzero_ok = run.rows.iter().filter(|r| !r.z1_zero).all(|r| r.total <= 2.0 * ln3 + 0.02);
    let zero_ok = run.rows.iter().filter(|r| r.z1_zero).all(|r| r.total <= 3.0 * ln3 + 0.02);
    let contrast = run.contrast.last().map_or(0.0, |c| c.1);
    let elapsed = start.elapsed();
    let pass = nonzero_ok && zero_ok && contrast > 5.0 && elapsed < Duration::from_secs(60);
    let detail = format!(
        "max z1 != 0: {:.3} (cap {:.3}), max z1 = 0: {:.3} (cap {:.3}), contrast reaches {contrast:.2}",
        run.max_nonzero,
        2.0 * ln3 + 0.02,
        run.max_zero,
        3.0 * ln3 + 0.02
    );
    report(6, "three-leg bounds and contrast", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_7_hartogs_sandwich_and_growth() {
    let start = Instant::now();
    let run = run_hartogs(&HartogsConfig::default()).unwrap();
    let sandwich = &run.summary["sandwich"];
    let sandwich_ok = sandwich["pairs"] == 1000 && sandwich["violations"] == 0;
    let monotone = run.monotone_in_t();
    let reached = run.verdict(1.0).is_some_and(|v| v.reached);
    let elapsed = start.elapsed();
    let pass = sandwich_ok && monotone && reached && elapsed < Duration::from_secs(300);
    let detail = format!("sandwich {sandwich}, monotone {monotone}, M=1 reached {reached}");
    report(7, "Hartogs sandwich and witness growth", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_8_localized_removal() {
    let start = Instant::now();
    let cfg = LocalizedConfig { r_window: 0.3, r_small: 0.05, ..Default::default() };
    let run = run_strict_convex_localized(&cfg).unwrap();
    let eps_err = run.summary["epsilon"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["analytic"].as_f64().unwrap() - e["sampled"].as_f64().unwrap()).abs())
        .fold(0.0, f64::max);
    let qg = run.quasi_geodesics.iter().all(|q| q.report.pass);
    let monotone = run.summary["monotone_in_u"] == true;
    let levels: Vec<String> = cfg
        .v_grid
        .iter()
        .map(|&v| {
            let seq: Vec<String> = run
                .rows
                .iter()
                .filter(|r| r.t0 == v && r.side == "pu-zetau")
                .map(|r| format!("{:.3}", r.certified_m))
                .collect();
            format!("v={v}: [{}]", seq.join(", "))
        })
        .collect();
    let elapsed = start.elapsed();
    let pass = eps_err < 1e-9 && qg && monotone && elapsed < Duration::from_secs(300);
    let detail = format!("epsilon error {eps_err:.2e}, gamma passes {qg}, monotone in u {monotone}; {}", levels.join("; "));
    report(8, "localized removal in the unit ball", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn criterion_9_positive_control() {
    let start = Instant::now();
    let run = run_positive_control_disc(&PositiveControlConfig::default()).unwrap();
    let stable = run.disc_max_doubled <= 1.2 * run.disc_max && run.disc_max_doubled >= 0.8 * run.disc_max;
    let ray = run.ray_family.iter().filter(|(u, _)| *u <= 5.0).map(|r| r.1).fold(0.0, f64::max);
    let tenfold = ray > 10.0 * run.disc_max;
    let elapsed = start.elapsed();
    let pass = stable && tenfold && elapsed < Duration::from_secs(60);
    let detail = format!(
        "disc max {:.4}, doubled {:.4}, ray family max by u = 5: {ray:.4} (needs > {:.4})",
        run.disc_max,
        run.disc_max_doubled,
        10.0 * run.disc_max
    );
    report(9, "positive control", pass, elapsed, &detail);
    assert!(pass);
}
