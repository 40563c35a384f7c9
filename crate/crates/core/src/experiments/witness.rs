use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolicity::SideLower;
use crate::paths::{PairTable, QGReport, QgScan, SampleGrid};
use crate::metrics::BoundValue;

/// A verdict row only counts when its sampling margin is below this fraction of its level.
pub const MARGIN_FRACTION: f64 = 0.1;

/// One side's contribution to a thinness row, or the triangle summary when `side == "triangle"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub experiment: String,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub side: String,
    pub lower_bound: f64,
    pub margin: f64,
    #[serde(rename = "certified_M")]
    pub certified_m: f64,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "M")]
    pub m: f64,
    pub reached: bool,
    #[serde(rename = "T0")]
    pub t0: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideQg {
    pub side: String,
    #[serde(rename = "T")]
    pub t: f64,
    pub report: QGReport,
}

/// Output of one experiment driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRun {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub rows: Vec<WitnessRow>,
    pub verdicts: Vec<Verdict>,
    pub quasi_geodesics: Vec<SideQg>,
    /// Experiment-specific checks and constants.
    pub summary: serde_json::Value,
}

impl WitnessRun {
    /// Triangle rows, optionally restricted to one `T0`.
    pub fn triangle_rows(&self, t0: Option<f64>) -> Vec<&WitnessRow> {
        self.rows.iter().filter(|r| r.side == "triangle" && t0.is_none_or(|v| r.t0 == v)).collect()
    }

    /// Whether the triangle level is nondecreasing in `T` for every `T0` present.
    pub fn monotone_in_t(&self) -> bool {
        let mut t0s: Vec<f64> = self.triangle_rows(None).iter().map(|r| r.t0).collect();
        t0s.dedup();
        t0s.iter().all(|&t0| self.triangle_rows(Some(t0)).windows(2).all(|w| w[1].certified_m >= w[0].certified_m))
    }

    pub fn verdict(&self, m: f64) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.m == m)
    }
}

/// Whether a row's level clears `m` with an acceptable margin.
pub fn counts_for(level: f64, margin: f64, m: f64) -> bool {
    level > m && margin < MARGIN_FRACTION * level
}

/// The better of a bound valid on the whole side and a sampled one: `(lower, margin, certified)`.
pub fn certify(uniform: f64, sampled: Option<&SideLower>) -> (f64, f64, f64) {
    match sampled {
        Some(s) if s.value > uniform => (s.raw_min, s.margin, s.value),
        _ => (uniform, 0.0, uniform),
    }
}

/// Scans `(A, B)` for a side from its pair oracle; a failure aborts the experiment.
pub fn certify_side<F>(side: &str, t: f64, grid: &SampleGrid, scan: &QgScan, oracle: F) -> Result<SideQg>
where
    F: Fn(f64, f64) -> Result<BoundValue> + Sync,
{
    let table = PairTable::build(grid, oracle)?;
    match table.estimate(scan) {
        Ok((_, _, report)) => Ok(SideQg { side: side.to_string(), t, report }),
        Err(Error::NoFeasibleConstants(msg)) => {
            Err(Error::NoFeasibleConstants(format!("side {side} at T = {t}: {msg}")))
        }
        Err(e) => Err(e),
    }
}

/// Grid `start, start + step, ..., <= end`, snapped to avoid drift.
pub fn parse_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(start <= end) || !start.is_finite() || !end.is_finite() {
        return Err(Error::InvalidArgument(format!("bad grid {start}:{end}:{step}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9).collect())
}

pub fn verdict_label(level: f64, margin: f64, targets: &[f64]) -> String {
    let hit: Vec<String> = targets.iter().filter(|&&m| counts_for(level, margin, m)).map(|m| format!("M={m}")).collect();
    if hit.is_empty() {
        "-".into()
    } else {
        format!("reached:{}", hit.join(";"))
    }
}
