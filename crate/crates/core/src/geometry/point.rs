use std::fmt;
use std::ops::{Add, Index, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `C^n`, `n >= 1`, with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point must have at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("point coordinates must be finite".into()));
        }
        Ok(CPoint(coords))
    }

    /// Builds a point from real coordinates (imaginary parts zero).
    pub fn real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(n: usize) -> Self {
        CPoint(vec![Complex64::new(0.0, 0.0); n.max(1)])
    }

    /// The `k`-th standard basis vector `e_k` (zero-based).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); n.max(1)];
        v[k] = Complex64::new(1.0, 0.0);
        CPoint(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> CPoint {
        CPoint(self.0.iter().map(|c| c * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> CPoint {
        CPoint(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    /// Hermitian product `sum_j self_j * conj(other_j)`.
    pub fn hermitian(&self, other: &CPoint) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }

    /// Real Euclidean inner product on `R^{2n}`.
    pub fn real_dot(&self, other: &CPoint) -> f64 {
        self.hermitian(other).re
    }

    pub fn dist(&self, other: &CPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Coordinates `[start, end)` as a new point.
    pub fn slice(&self, start: usize, end: usize) -> CPoint {
        CPoint(self.0[start..end].to_vec())
    }

    pub fn concat(&self, other: &CPoint) -> CPoint {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        CPoint(v)
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.dim() });
        }
        Ok(())
    }
}

impl Index<usize> for CPoint {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Sub for &CPoint {
    type Output = CPoint;
    fn sub(self, rhs: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for &CPoint {
    type Output = CPoint;
    fn add(self, rhs: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<[f64; 2]>> for CPoint {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        CPoint::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<CPoint> for Vec<[f64; 2]> {
    fn from(p: CPoint) -> Self {
        p.0.into_iter().map(|c| [c.re, c.im]).collect()
    }
}

/// A nonzero tangent vector in `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CDirection(CPoint);

impl CDirection {
    pub fn new(v: CPoint) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::InvalidArgument("direction must be nonzero".into()));
        }
        Ok(CDirection(v))
    }

    pub fn from_coords(coords: Vec<Complex64>) -> Result<Self> {
        Self::new(CPoint::new(coords)?)
    }

    pub fn vector(&self) -> &CPoint {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Complex affine hyperplane `{z : sum_j a_j z_j = b}` (bilinear pairing).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    normal: CPoint,
    offset: [f64; 2],
}

impl Hyperplane {
    pub fn new(normal: CPoint, offset: Complex64) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::InvalidArgument("hyperplane normal must be nonzero".into()));
        }
        Ok(Hyperplane { normal, offset: [offset.re, offset.im] })
    }

    /// The coordinate hyperplane `{z_k = 0}` in `C^n` (zero-based `k`).
    pub fn coordinate(n: usize, k: usize) -> Self {
        Hyperplane { normal: CPoint::basis(n, k), offset: [0.0, 0.0] }
    }

    /// The coordinate hyperplane `{z_k = c}`.
    pub fn coordinate_at(n: usize, k: usize, c: Complex64) -> Self {
        Hyperplane { normal: CPoint::basis(n, k), offset: [c.re, c.im] }
    }

    pub fn normal(&self) -> &CPoint {
        &self.normal
    }

    pub fn offset(&self) -> Complex64 {
        Complex64::new(self.offset[0], self.offset[1])
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// `<a, z>` with the bilinear pairing.
    pub fn pair(&self, z: &CPoint) -> Complex64 {
        self.normal.coords().iter().zip(z.coords()).map(|(a, x)| a * x).sum()
    }

    /// `<a, z> - b`.
    pub fn residual(&self, z: &CPoint) -> Complex64 {
        self.pair(z) - self.offset()
    }

    pub fn distance(&self, z: &CPoint) -> f64 {
        self.residual(z).norm() / self.normal.norm()
    }

    /// Orthogonal projection onto the hyperplane.
    pub fn project(&self, z: &CPoint) -> CPoint {
        let t = self.residual(z) / self.normal.norm_sqr();
        let conj_a = CPoint(self.normal.coords().iter().map(|a| a.conj()).collect());
        z.axpy(-t, &conj_a)
    }

    /// Parameter `lambda` with `z + lambda X` on the hyperplane, if the line is transverse.
    pub fn line_hit(&self, z: &CPoint, x: &CPoint) -> Option<Complex64> {
        let ax = self.pair(x);
        if ax.norm() <= f64::EPSILON * self.normal.norm() * x.norm() {
            return None;
        }
        Some(-self.residual(z) / ax)
    }
}
