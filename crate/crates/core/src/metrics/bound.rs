use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which estimate produced one side of a [`BoundValue`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ExactModel,
    Inclusion,
    ChordDistance,
    BoundaryPointLog,
    HalfSpace,
    HyperplaneProjection,
    ProductMax,
    ChordLength,
    BoundaryDistance,
    SliceModel,
    Mesh,
    Trivial,
}

impl Source {
    pub fn tag(self) -> &'static str {
        match self {
            Source::ExactModel => "exact-model",
            Source::Inclusion => "inclusion",
            Source::ChordDistance => "chord-distance",
            Source::BoundaryPointLog => "boundary-point-log",
            Source::HalfSpace => "half-space",
            Source::HyperplaneProjection => "hyperplane-projection",
            Source::ProductMax => "product-max",
            Source::ChordLength => "chord-length",
            Source::BoundaryDistance => "boundary-distance",
            Source::SliceModel => "slice-model",
            Source::Mesh => "mesh",
            Source::Trivial => "trivial",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A certified interval `[lower, upper]` for a distance. `upper` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub lower: f64,
    pub upper: f64,
    pub lower_source: Source,
    pub upper_source: Source,
}

impl BoundValue {
    /// Crossings at rounding level are resolved by lowering `lower` to `upper`.
    pub fn new(lower: f64, upper: f64, lower_source: Source, upper_source: Source) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower < 0.0 {
            return Err(Error::InvalidArgument(format!("bad bound pair [{lower}, {upper}]")));
        }
        if lower > upper + 1e-9 * (1.0 + upper) {
            return Err(Error::InvalidArgument(format!(
                "lower bound {lower} ({lower_source}) exceeds upper bound {upper} ({upper_source})"
            )));
        }
        Ok(BoundValue { lower: lower.min(upper), upper, lower_source, upper_source })
    }

    pub fn exact(value: f64) -> Self {
        BoundValue { lower: value, upper: value, lower_source: Source::ExactModel, upper_source: Source::ExactModel }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> Option<f64> {
        self.upper.is_finite().then_some(0.5 * (self.lower + self.upper))
    }
}

/// Running best of several lower and upper estimates.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Accumulator {
    lower: (f64, Source),
    upper: (f64, Source),
}

impl Accumulator {
    pub fn new() -> Self {
        Accumulator { lower: (0.0, Source::Trivial), upper: (f64::INFINITY, Source::Trivial) }
    }

    pub fn lower(&mut self, v: f64, s: Source) {
        if v > self.lower.0 {
            self.lower = (v, s);
        }
    }

    pub fn upper(&mut self, v: f64, s: Source) {
        if v < self.upper.0 {
            self.upper = (v, s);
        }
    }

    pub fn finish(self) -> Result<BoundValue> {
        BoundValue::new(self.lower.0, self.upper.0, self.lower.1, self.upper.1)
    }
}

/// Distance on a product: the maximum of the factor distances, side by side.
pub fn distance_product(factors: &[BoundValue]) -> Result<BoundValue> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("empty product".into()));
    }
    let lower = factors.iter().map(|b| b.lower).fold(0.0, f64::max);
    let upper = factors.iter().map(|b| b.upper).fold(0.0, f64::max);
    let src = |exact: bool| if exact { Source::ExactModel } else { Source::ProductMax };
    let all_exact = factors.iter().all(BoundValue::is_exact);
    BoundValue::new(lower, upper, src(all_exact), src(all_exact))
}
