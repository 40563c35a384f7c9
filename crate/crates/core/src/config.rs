//! Configuration documents for the command-line front end.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{
    BallMinusHyperplaneConfig, HartogsConfig, LocalizedConfig, MultiHyperplanesConfig, NotFinitelyCompactConfig,
    PositiveControlConfig,
};
use crate::geometry::{CPoint, DomainOracle, Hyperplane, Phi};
use crate::metrics::Strategy;
use crate::paths::{log_radial_curve, radial_geodesic_punctured, segment, tent_curve, Curve, QgScan, U_MAX};

fn one() -> f64 {
    1.0
}

fn default_phi() -> Phi {
    Phi::Cone { peak: 1.0, slope: 2.0 }
}

fn default_samples() -> usize {
    40
}

/// A domain, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc {
        #[serde(default = "one")]
        radius: f64,
    },
    PuncturedDisc {
        #[serde(default = "one")]
        radius: f64,
    },
    HalfPlane {},
    Ball {
        n: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        center: Option<CPoint>,
    },
    Polydisc {
        radii: Vec<f64>,
    },
    CoordinateDiscHull {
        radii: Vec<f64>,
    },
    Product {
        factors: Vec<DomainSpec>,
    },
    MinusHyperplanes {
        base: Box<DomainSpec>,
        removed: Vec<Hyperplane>,
    },
    LocalizedRemoval {
        base: Box<DomainSpec>,
        line: Hyperplane,
        window_center: CPoint,
        window_radius: f64,
    },
    Hartogs {
        n: usize,
        #[serde(default = "default_phi")]
        phi: Phi,
    },
}

impl DomainSpec {
    pub fn build(&self) -> Result<DomainOracle> {
        Ok(match self {
            DomainSpec::Disc { radius } => DomainOracle::disc(*radius)?,
            DomainSpec::PuncturedDisc { radius } => DomainOracle::punctured_disc(*radius)?,
            DomainSpec::HalfPlane {} => DomainOracle::half_plane(),
            DomainSpec::Ball { n, radius, center } => {
                let c = center.clone().unwrap_or_else(|| CPoint::origin((*n).max(1)));
                if c.dim() != *n {
                    return Err(Error::Config(format!("ball center has dimension {}, expected {n}", c.dim())));
                }
                DomainOracle::ball(c, *radius)?
            }
            DomainSpec::Polydisc { radii } => DomainOracle::polydisc(radii.clone())?,
            DomainSpec::CoordinateDiscHull { radii } => DomainOracle::coordinate_disc_hull(radii.clone())?,
            DomainSpec::Product { factors } => {
                DomainOracle::product(factors.iter().map(DomainSpec::build).collect::<Result<_>>()?)?
            }
            DomainSpec::MinusHyperplanes { base, removed } => DomainOracle::minus_hyperplanes(base.build()?, removed.clone())?,
            DomainSpec::LocalizedRemoval { base, line, window_center, window_radius } => {
                DomainOracle::localized_removal(base.build()?, line.clone(), window_center.clone(), *window_radius)?
            }
            DomainSpec::Hartogs { n, phi } => DomainOracle::hartogs(DomainOracle::unit_ball(*n), phi.clone())?,
        })
    }

    /// The shorthand names accepted by `--domain`.
    pub fn named(name: &str, n: Option<usize>, radius: Option<f64>) -> Result<DomainSpec> {
        let r = radius.unwrap_or(1.0);
        let n = n.unwrap_or(2);
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        Ok(match name {
            "disc" => DomainSpec::Disc { radius: r },
            "punctured-disc" => DomainSpec::PuncturedDisc { radius: r },
            "half-plane" => DomainSpec::HalfPlane {},
            "ball" => DomainSpec::Ball { n, radius: r, center: None },
            "polydisc" => DomainSpec::Polydisc { radii: vec![r; n] },
            "ball-minus-hyperplane" => DomainSpec::MinusHyperplanes {
                base: Box::new(DomainSpec::Ball { n, radius: r, center: None }),
                removed: vec![Hyperplane::coordinate(n, n - 1)],
            },
            "hartogs" => DomainSpec::Hartogs { n: n.saturating_sub(1).max(1), phi: default_phi() },
            _ => return Err(Error::Config(format!("unknown domain '{name}'"))),
        })
    }
}

/// A curve, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    /// `zeta + e^{-2u} (p - zeta)`.
    Tent { zeta: CPoint, p: CPoint },
    /// `e^{1 - e^{2u}} p`.
    LogRadial { p: CPoint },
    /// `e^{-e^{2u}}` in the punctured unit disc.
    RadialPunctured {},
    Segment { p: CPoint, q: CPoint },
}

impl CurveSpec {
    /// `e^{-e^{2u}}` leaves the normal doubles just past `u = 3.28`.
    pub fn default_u_max(&self) -> f64 {
        match self {
            CurveSpec::RadialPunctured {} => 3.0,
            _ => U_MAX,
        }
    }

    pub fn build(&self) -> Result<Curve> {
        match self {
            CurveSpec::Tent { zeta, p } => tent_curve(zeta, p),
            CurveSpec::LogRadial { p } => log_radial_curve(p),
            CurveSpec::RadialPunctured {} => Ok(radial_geodesic_punctured()),
            CurveSpec::Segment { p, q } => segment(p, q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricCmd {
    pub domain: DomainSpec,
    pub z: CPoint,
    pub v: CPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceCmd {
    pub domain: DomainSpec,
    pub p: CPoint,
    pub q: CPoint,
    #[serde(default)]
    pub strategy: Strategy,
}

/// Verifies a curve against `(A, B)`, or scans for constants when they are absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QgVerifyCmd {
    pub domain: DomainSpec,
    pub curve: CurveSpec,
    #[serde(default, rename = "A")]
    pub a: Option<f64>,
    #[serde(default, rename = "B")]
    pub b: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Truncation of an infinite curve; defaults per curve kind.
    #[serde(default)]
    pub u_max: Option<f64>,
    #[serde(default)]
    pub scan: QgScan,
    #[serde(default)]
    pub strategy: Strategy,
}

/// Certified lower bound for the distance from `x` to a side; fails when it does not exceed `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCmd {
    pub domain: DomainSpec,
    pub x: CPoint,
    pub side: CurveSpec,
    #[serde(default, rename = "M")]
    pub m: Option<f64>,
    #[serde(default = "default_side_samples")]
    pub samples: usize,
    /// Truncation of an infinite curve; defaults per curve kind.
    #[serde(default)]
    pub u_max: Option<f64>,
    #[serde(default)]
    pub strategy: Strategy,
}

fn default_side_samples() -> usize {
    2001
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaCmd {
    pub domain: DomainSpec,
    pub points: Vec<CPoint>,
    #[serde(default)]
    pub strategy: Strategy,
}

/// An experiment driver and its parameters, tagged by `name`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ExperimentCmd {
    BallMinusHyperplane(BallMinusHyperplaneConfig),
    MultiHyperplanes(MultiHyperplanesConfig),
    Hartogs(HartogsConfig),
    StrictConvexLocalized(LocalizedConfig),
    NotFinitelyCompact(NotFinitelyCompactConfig),
    PositiveControl(PositiveControlConfig),
}

impl ExperimentCmd {
    pub const NAMES: [&'static str; 6] = [
        "ball-minus-hyperplane",
        "multi-hyperplanes",
        "hartogs",
        "strict-convex-localized",
        "not-finitely-compact",
        "positive-control",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentCmd::BallMinusHyperplane(_) => Self::NAMES[0],
            ExperimentCmd::MultiHyperplanes(_) => Self::NAMES[1],
            ExperimentCmd::Hartogs(_) => Self::NAMES[2],
            ExperimentCmd::StrictConvexLocalized(_) => Self::NAMES[3],
            ExperimentCmd::NotFinitelyCompact(_) => Self::NAMES[4],
            ExperimentCmd::PositiveControl(_) => Self::NAMES[5],
        }
    }

    fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentCmd::Hartogs(c) => c.seed = seed,
            ExperimentCmd::NotFinitelyCompact(c) => c.seed = seed,
            ExperimentCmd::PositiveControl(c) => c.seed = seed,
            _ => {}
        }
    }

    fn scans(&self) -> Vec<&QgScan> {
        match self {
            ExperimentCmd::BallMinusHyperplane(c) => vec![&c.options.scan],
            ExperimentCmd::MultiHyperplanes(c) => vec![&c.base.options.scan],
            ExperimentCmd::Hartogs(c) => vec![&c.options.scan],
            ExperimentCmd::StrictConvexLocalized(c) => vec![&c.scan],
            _ => vec![],
        }
    }
}

/// One invocation: exactly one command section plus output settings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub out: Option<PathBuf>,
    pub plot_data: bool,
    pub seed: Option<u64>,
    pub metric: Option<MetricCmd>,
    pub distance: Option<DistanceCmd>,
    pub qg_verify: Option<QgVerifyCmd>,
    pub witness: Option<WitnessCmd>,
    pub delta: Option<DeltaCmd>,
    pub experiment: Option<ExperimentCmd>,
}

/// The selected command section.
#[derive(Clone, Copy, Debug)]
pub enum Command<'a> {
    Metric(&'a MetricCmd),
    Distance(&'a DistanceCmd),
    QgVerify(&'a QgVerifyCmd),
    Witness(&'a WitnessCmd),
    Delta(&'a DeltaCmd),
    Experiment(&'a ExperimentCmd),
}

impl Command<'_> {
    /// Stem of the output file names.
    pub fn id(&self) -> &'static str {
        match self {
            Command::Metric(_) => "metric",
            Command::Distance(_) => "distance",
            Command::QgVerify(_) => "qg-verify",
            Command::Witness(_) => "witness",
            Command::Delta(_) => "delta",
            Command::Experiment(e) => e.name(),
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Config(e.to_string())
}

impl CliConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(config_err)
    }

    pub fn from_value(v: Value) -> Result<Self> {
        serde_json::from_value(v).map_err(config_err)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn command(&self) -> Result<Command<'_>> {
        let mut found = Vec::new();
        if let Some(c) = &self.metric {
            found.push(Command::Metric(c));
        }
        if let Some(c) = &self.distance {
            found.push(Command::Distance(c));
        }
        if let Some(c) = &self.qg_verify {
            found.push(Command::QgVerify(c));
        }
        if let Some(c) = &self.witness {
            found.push(Command::Witness(c));
        }
        if let Some(c) = &self.delta {
            found.push(Command::Delta(c));
        }
        if let Some(c) = &self.experiment {
            found.push(Command::Experiment(c));
        }
        match found.as_slice() {
            [c] => Ok(*c),
            [] => Err(Error::Config("no command section".into())),
            _ => Err(Error::Config("more than one command section".into())),
        }
    }

    /// Applies the top-level seed, then checks the command and every tolerance.
    pub fn resolve(mut self) -> Result<Self> {
        if let (Some(seed), Some(e)) = (self.seed, &mut self.experiment) {
            e.set_seed(seed);
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        let check_scan = |s: &QgScan| -> Result<()> {
            positive("scan.step", s.step)?;
            positive("scan.a_max", s.a_max)?;
            positive("scan.b_cap", s.b_cap)
        };
        let check_strategy = |s: &Strategy| positive("strategy.mesh.rel_change", s.mesh.rel_change);
        match self.command()? {
            Command::Metric(_) => {}
            Command::Distance(c) => check_strategy(&c.strategy)?,
            Command::QgVerify(c) => {
                check_scan(&c.scan)?;
                check_strategy(&c.strategy)?;
                if let Some(u) = c.u_max {
                    positive("u_max", u)?;
                }
                if let Some(a) = c.a {
                    positive("A", a)?;
                }
                if let Some(b) = c.b {
                    positive("B", b)?;
                }
                if c.a.is_some() != c.b.is_some() {
                    return Err(Error::Config("give both A and B, or neither".into()));
                }
            }
            Command::Witness(c) => {
                check_strategy(&c.strategy)?;
                if let Some(u) = c.u_max {
                    positive("u_max", u)?;
                }
            }
            Command::Delta(c) => check_strategy(&c.strategy)?,
            Command::Experiment(e) => e.scans().into_iter().try_for_each(check_scan)?,
        }
        Ok(())
    }

    /// First 12 hex digits of the SHA-256 of the canonical JSON form, output settings excluded.
    pub fn hash(&self) -> Result<String> {
        let v = serde_json::to_value(CliConfig { out: None, plot_data: false, ..self.clone() }).map_err(config_err)?;
        let digest = Sha256::digest(v.to_string().as_bytes());
        Ok(hex::encode(digest)[..12].to_string())
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("bad complex number '{s}'"));
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(k, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
        .map(|(k, _)| k)
        .last();
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(x),
    };
    match split {
        Some(k) => Ok(Complex64::new(num(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Parses comma-separated coordinates.
pub fn parse_point(s: &str) -> Result<CPoint> {
    let coords = s.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    CPoint::new(coords).map_err(config_err)
}
