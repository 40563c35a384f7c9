//! Adaptive Gauss–Kronrod (7/15) quadrature used by the length functionals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 1e-13, max_intervals: 4000 }
    }
}

/// One 15-point Kronrod panel: (integral, error estimate).
fn kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    Ok((resk * h, ((resk - resg) * h).abs()))
}

/// Integrates `f` over `[a, b]` by bisecting the panel with the largest error.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v, e) = kronrod(&mut f, lo, hi)?;
    let mut panels = vec![(lo, hi, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { estimate: total, error: err });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(sign * total);
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: total, error: err });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = kronrod(&mut f, pa, mid)?;
        let (v2, e2) = kronrod(&mut f, mid, pb)?;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

/// Fixed 15-point Kronrod rule on one panel, for cheap short-edge weights.
pub fn kronrod15<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64) -> Result<f64> {
    Ok(kronrod(&mut f, a, b)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_log_singular_integrals() {
        let v = integrate(|x| Ok(x * x * x), 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
        let v = integrate(|t| Ok(1.0 / (1.0 - t)), 0.0, 0.5, QuadOptions::default()).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
        // near-singular endpoint: int_0^{1-1e-8} dt/(1-t) = 8 ln 10
        let v = integrate(|t| Ok(1.0 / (1.0 - t)), 0.0, 1.0 - 1e-8, QuadOptions::default()).unwrap();
        assert!((v - 8.0 * 10f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(|x| Ok(x.cos()), 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((v + 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = QuadOptions { max_intervals: 4, ..Default::default() };
        let r = integrate(|x| Ok((1.0 / x).sin()), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
