//! Command-line front end: flag parsing, dispatch and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{parse_point, CliConfig, Command, DomainSpec, ExperimentCmd};
use crate::error::{Error, Result};
use crate::experiments::{
    run_ball_minus_hyperplane, run_hartogs, run_multi_hyperplanes, run_not_finitely_compact, run_positive_control_disc,
    run_strict_convex_localized, WitnessRun,
};
use crate::geometry::{CPoint, DomainOracle};
use crate::hyperbolicity::{delta_fourpoint, side_lower_from_fn};
use crate::metrics::{metric_lower_bound_cconvex, metric_upper, Dispatcher};
use crate::paths::{Curve, PairTable, SampleGrid};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "KOBAYASHI_THREADS";

#[derive(Debug, Parser)]
#[command(name = "kobayashi", version, about = "Kobayashi-metric estimates and hyperbolicity witnesses")]
pub struct Cli {
    /// TOML or JSON configuration document; replaces the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving the output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write per-sample CSV data.
    #[arg(long, global = true)]
    pub plot_data: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Sub>,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// disc, punctured-disc, half-plane, ball, polydisc, ball-minus-hyperplane or hartogs.
    #[arg(long)]
    pub domain: String,
    /// Complex dimension for ball-like domains.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// tent, log-radial, radial-punctured or segment.
    #[arg(long)]
    pub curve: String,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Bounds for the infinitesimal metric at `z` in direction `v`.
    Metric {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Certified distance interval between `p` and `q`.
    Distance {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Also run the mesh shortest-path upper bound.
        #[arg(long)]
        mesh: bool,
    },
    /// Quasi-geodesic check of a curve, scanning for constants unless both are given.
    QgVerify {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "A")]
        a: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        u_max: Option<f64>,
    },
    /// Certified lower bound for the distance from `x` to a curve.
    Witness {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "M")]
        m: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        u_max: Option<f64>,
    },
    /// Four-point statistic of a point set; distances must be exact.
    Delta {
        #[command(flatten)]
        domain: DomainArgs,
        /// One point per flag, coordinates separated by commas.
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Runs a named experiment driver.
    Experiment {
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        /// Parameter grid `start:end:step`.
        #[arg(long = "T")]
        t: Option<String>,
        /// Comma-separated thresholds.
        #[arg(long = "M", value_delimiter = ',')]
        m: Vec<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Any other parameter as `key=value`; dotted keys reach nested tables.
        #[arg(long = "set")]
        set: Vec<String>,
    },
}

fn point_value(s: &str) -> Result<Value> {
    serde_json::to_value(parse_point(s)?).map_err(|e| Error::Config(e.to_string()))
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    serde_json::to_value(t).map_err(|e| Error::Config(e.to_string()))
}

fn domain_value(d: &DomainArgs) -> Result<Value> {
    to_value(&DomainSpec::named(&d.domain, d.n, d.radius)?)
}

fn curve_value(c: &CurveArgs) -> Result<Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!(c.curve));
    for (k, v) in [("zeta", &c.zeta), ("p", &c.p), ("q", &c.q)] {
        if let Some(s) = v {
            m.insert(k.into(), point_value(s)?);
        }
    }
    Ok(Value::Object(m))
}

fn insert_opt<T: Serialize>(m: &mut Map<String, Value>, key: &str, v: &Option<T>) -> Result<()> {
    if let Some(v) = v {
        m.insert(key.into(), to_value(v)?);
    }
    Ok(())
}

fn set_path(m: &mut Map<String, Value>, assignment: &str) -> Result<()> {
    let (key, raw) =
        assignment.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got '{assignment}'")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| Error::Config(format!("empty key in '{key}'")))?;
    let mut cur = m;
    for p in parts {
        let slot = cur.entry(p.to_string()).or_insert_with(|| Value::Object(Map::new()));
        cur = slot.as_object_mut().ok_or_else(|| Error::Config(format!("'{p}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn sub_value(sub: &Sub) -> Result<(&'static str, Value)> {
    let mut m = Map::new();
    let key = match sub {
        Sub::Metric { domain, z, v } => {
            m.insert("domain".into(), domain_value(domain)?);
            m.insert("z".into(), point_value(z)?);
            m.insert("v".into(), point_value(v)?);
            "metric"
        }
        Sub::Distance { domain, p, q, mesh } => {
            m.insert("domain".into(), domain_value(domain)?);
            m.insert("p".into(), point_value(p)?);
            m.insert("q".into(), point_value(q)?);
            if *mesh {
                m.insert("strategy".into(), json!({ "use_mesh": true }));
            }
            "distance"
        }
        Sub::QgVerify { domain, curve, a, b, samples, u_max } => {
            m.insert("domain".into(), domain_value(domain)?);
            m.insert("curve".into(), curve_value(curve)?);
            insert_opt(&mut m, "A", a)?;
            insert_opt(&mut m, "B", b)?;
            insert_opt(&mut m, "samples", samples)?;
            insert_opt(&mut m, "u_max", u_max)?;
            "qg_verify"
        }
        Sub::Witness { domain, x, curve, m: level, samples, u_max } => {
            m.insert("domain".into(), domain_value(domain)?);
            m.insert("x".into(), point_value(x)?);
            m.insert("side".into(), curve_value(curve)?);
            insert_opt(&mut m, "M", level)?;
            insert_opt(&mut m, "samples", samples)?;
            insert_opt(&mut m, "u_max", u_max)?;
            "witness"
        }
        Sub::Delta { domain, points } => {
            m.insert("domain".into(), domain_value(domain)?);
            m.insert("points".into(), Value::Array(points.iter().map(|p| point_value(p)).collect::<Result<_>>()?));
            "delta"
        }
        Sub::Experiment { name, n, s, r, t, m: targets, samples, set } => {
            if !ExperimentCmd::NAMES.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown experiment '{name}'")));
            }
            m.insert("name".into(), json!(name));
            insert_opt(&mut m, "n", n)?;
            insert_opt(&mut m, "s", s)?;
            insert_opt(&mut m, "r", r)?;
            insert_opt(&mut m, "samples", samples)?;
            if let Some(t) = t {
                let key = if name == "strict-convex-localized" { "u_grid" } else { "t_grid" };
                m.insert(key.into(), json!(t));
            }
            if !targets.is_empty() {
                m.insert("m_targets".into(), to_value(targets)?);
            }
            for a in set {
                set_path(&mut m, a)?;
            }
            "experiment"
        }
    };
    Ok((key, Value::Object(m)))
}

impl Cli {
    /// The configuration document this invocation describes.
    pub fn to_config(&self) -> Result<CliConfig> {
        let mut cfg = match (&self.config, &self.command) {
            (Some(path), None) => CliConfig::from_path(path)?,
            (None, Some(sub)) => {
                let (key, v) = sub_value(sub)?;
                CliConfig::from_value(json!({ key: v }))?
            }
            (Some(_), Some(_)) => return Err(Error::Config("give either --config or a subcommand, not both".into())),
            (None, None) => return Err(Error::Config("nothing to do: give --config or a subcommand".into())),
        };
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.plot_data |= self.plot_data;
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        cfg.resolve()
    }
}

/// What one command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: String,
    pub summary: Value,
    pub table: Option<String>,
    pub plot: Option<String>,
    /// False when a certification the command attempted did not go through.
    pub certified: bool,
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_records(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn witness_outcome(run: WitnessRun, plot_data: bool) -> Result<Outcome> {
    let certified = run.verdicts.iter().all(|v| v.reached) && run.quasi_geodesics.iter().all(|q| q.report.pass);
    let table = Some(csv_of(&run.rows)?);
    let plot = if plot_data {
        let rows = run
            .quasi_geodesics
            .iter()
            .map(|q| {
                let r = &q.report;
                vec![
                    run.experiment.clone(),
                    q.t.to_string(),
                    q.side.clone(),
                    r.a.to_string(),
                    r.b.to_string(),
                    r.pass.to_string(),
                    r.worst_upper_margin.to_string(),
                    r.worst_lower_margin.to_string(),
                ]
            })
            .collect();
        Some(csv_records(
            &["experiment", "T", "side", "A", "B", "pass", "worst_upper_margin", "worst_lower_margin"],
            rows,
        )?)
    } else {
        None
    };
    let qg: Vec<Value> = run
        .quasi_geodesics
        .iter()
        .map(|q| json!({ "side": q.side, "T": q.t, "A": q.report.a, "B": q.report.b, "pass": q.report.pass }))
        .collect();
    let summary = json!({
        "experiment": run.experiment,
        "parameters": run.parameters,
        "verdicts": run.verdicts,
        "monotone_in_T": run.monotone_in_t(),
        "quasi_geodesics": qg,
        "checks": run.summary,
    });
    Ok(Outcome { id: run.experiment, summary, table, plot, certified })
}

fn experiment_outcome(e: &ExperimentCmd, plot_data: bool) -> Result<Outcome> {
    let name = e.name().to_string();
    match e {
        ExperimentCmd::BallMinusHyperplane(c) => witness_outcome(run_ball_minus_hyperplane(c)?, plot_data),
        ExperimentCmd::MultiHyperplanes(c) => witness_outcome(run_multi_hyperplanes(c)?, plot_data),
        ExperimentCmd::Hartogs(c) => witness_outcome(run_hartogs(c)?, plot_data),
        ExperimentCmd::StrictConvexLocalized(c) => witness_outcome(run_strict_convex_localized(c)?, plot_data),
        ExperimentCmd::NotFinitelyCompact(c) => {
            let run = run_not_finitely_compact(c)?;
            let legs = run.rows.iter().map(|r| r.legs.len()).max().unwrap_or(0);
            let mut header = vec!["experiment".to_string(), "index".into(), "z1_zero".into(), "z".into()];
            header.extend((1..=legs).map(|k| format!("leg_{k}")));
            header.push("total".into());
            let rows = run
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut v = vec![name.clone(), i.to_string(), r.z1_zero.to_string(), r.z.to_string()];
                    v.extend((0..legs).map(|k| r.legs.get(k).map_or(String::new(), f64::to_string)));
                    v.push(r.total.to_string());
                    v
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let table = Some(csv_records(&header, rows)?);
            let plot = if plot_data {
                let rows = run.contrast.iter().map(|(l, b)| vec![name.clone(), l.to_string(), b.to_string()]).collect();
                Some(csv_records(&["experiment", "ell", "lower_bound"], rows)?)
            } else {
                None
            };
            let summary = json!({
                "experiment": name,
                "parameters": run.parameters,
                "w": run.w,
                "samples_kept": run.rows.len(),
                "skipped": run.skipped,
                "max_nonzero": run.max_nonzero,
                "max_zero": run.max_zero,
                "contrast": run.contrast,
            });
            Ok(Outcome { id: name, summary, table, plot, certified: true })
        }
        ExperimentCmd::PositiveControl(c) => {
            let run = run_positive_control_disc(c)?;
            let mut rows: Vec<Vec<String>> = run
                .ray_family
                .iter()
                .map(|(u, d)| vec![name.clone(), "ray".into(), u.to_string(), d.to_string()])
                .collect();
            rows.extend(
                run.triangle_thinness.iter().map(|(r, d)| vec![name.clone(), "triangle".into(), r.to_string(), d.to_string()]),
            );
            let table = Some(csv_records(&["experiment", "family", "parameter", "statistic"], rows)?);
            let summary = json!({ "experiment": name, "run": run });
            Ok(Outcome { id: name, summary, table, plot: None, certified: true })
        }
    }
}

fn side_grid(dom: &DomainOracle, curve: &Curve, u_max: f64, samples: usize) -> Result<SampleGrid> {
    let (a, b) = curve.truncated(u_max);
    let grid = SampleGrid::new(a, b, samples)?;
    for u in grid.params() {
        if !dom.contains(&curve.point_at(u)?)? {
            return Err(Error::CurveExitsDomain(u));
        }
    }
    Ok(grid)
}

/// Runs the selected command; nothing is written to disk.
pub fn dispatch(cfg: &CliConfig) -> Result<Outcome> {
    let command = cfg.command()?;
    let id = command.id().to_string();
    let plain = |summary: Value, certified: bool| Outcome { id: id.clone(), summary, table: None, plot: None, certified };
    match command {
        Command::Metric(c) => {
            let dom = c.domain.build()?;
            let (upper, source) = metric_upper(&dom, &c.z, &c.v)?;
            let lower = match metric_lower_bound_cconvex(&dom, &c.z, &c.v) {
                Ok(l) => Some(l),
                Err(Error::ConvexityClass(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(plain(json!({ "command": id, "z": c.z, "v": c.v, "lower": lower, "upper": upper, "upper_source": source }), true))
        }
        Command::Distance(c) => {
            let dom = c.domain.build()?;
            let b = Dispatcher::new(c.strategy.clone()).distance(&dom, &c.p, &c.q)?;
            Ok(plain(json!({ "command": id, "p": c.p, "q": c.q, "bound": [b.lower, b.upper], "detail": b }), true))
        }
        Command::QgVerify(c) => {
            let dom = c.domain.build()?;
            let curve = c.curve.build()?;
            let grid = side_grid(&dom, &curve, c.u_max.unwrap_or_else(|| c.curve.default_u_max()), c.samples)?;
            let disp = Dispatcher::new(c.strategy.clone());
            let table = PairTable::for_curve(&curve, &grid, |x: &CPoint, y: &CPoint| disp.distance(&dom, x, y))?;
            let report = match (c.a, c.b) {
                (Some(a), Some(b)) => table.verify(a, b)?,
                _ => table.estimate(&c.scan)?.2,
            };
            let plot = if cfg.plot_data {
                let rows = table
                    .pairs()
                    .iter()
                    .map(|(s, t, b)| vec![s.to_string(), t.to_string(), b.lower.to_string(), b.upper.to_string()])
                    .collect();
                Some(csv_records(&["s", "t", "lower", "upper"], rows)?)
            } else {
                None
            };
            let pass = report.pass;
            Ok(Outcome { plot, ..plain(json!({ "command": id, "curve": c.curve, "report": report }), pass) })
        }
        Command::Witness(c) => {
            let dom = c.domain.build()?;
            let side = c.side.build()?;
            let grid = side_grid(&dom, &side, c.u_max.unwrap_or_else(|| c.side.default_u_max()), c.samples)?;
            let disp = Dispatcher::new(c.strategy.clone());
            let lower_at = |u: f64| -> Result<f64> {
                let y = side.point_at(u)?;
                Ok(if y == c.x { 0.0 } else { disp.distance(&dom, &c.x, &y)?.lower })
            };
            let lower = side_lower_from_fn(&grid, lower_at)?;
            let certified = c.m.is_none_or(|m| lower.value > m);
            let plot = if cfg.plot_data {
                let rows = grid.params().into_iter().map(|u| Ok(vec![u.to_string(), lower_at(u)?.to_string()])).collect::<Result<_>>()?;
                Some(csv_records(&["u", "lower_bound"], rows)?)
            } else {
                None
            };
            let summary = json!({ "command": id, "x": c.x, "side": c.side, "M": c.m, "lower": lower, "exceeds_M": c.m.map(|_| certified) });
            Ok(Outcome { plot, ..plain(summary, certified) })
        }
        Command::Delta(c) => {
            let dom = c.domain.build()?;
            let disp = Dispatcher::new(c.strategy.clone());
            let delta = delta_fourpoint(&c.points, |x: &CPoint, y: &CPoint| disp.distance(&dom, x, y))?;
            Ok(plain(json!({ "command": id, "points": c.points.len(), "delta": delta }), true))
        }
        Command::Experiment(e) => experiment_outcome(e, cfg.plot_data),
    }
}

/// File names `<id>-<hash>.json`, `.csv` and `-plot.csv`, paired with their contents.
pub fn artifacts(outcome: &Outcome, hash: &str) -> Result<Vec<(String, String)>> {
    let stem = format!("{}-{hash}", outcome.id);
    let mut summary = serde_json::to_string_pretty(&outcome.summary).map_err(|e| Error::Io(e.to_string()))?;
    summary.push('\n');
    let mut files = vec![(format!("{stem}.json"), summary)];
    if let Some(t) = &outcome.table {
        files.push((format!("{stem}.csv"), t.clone()));
    }
    if let Some(p) = &outcome.plot {
        files.push((format!("{stem}-plot.csv"), p.clone()));
    }
    Ok(files)
}

/// Writes every file to a temporary name first, then renames them into place.
pub fn write_atomically(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let pid = std::process::id();
    let mut staged = Vec::with_capacity(files.len());
    for (name, body) in files {
        let tmp = dir.join(format!(".{name}.{pid}.tmp"));
        if let Err(e) = fs::write(&tmp, body) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dest) in &staged {
        fs::rename(tmp, dest)?;
    }
    Ok(staged.into_iter().map(|(_, d)| d).collect())
}

/// 2 for configuration and input errors, 1 for failed certifications and numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. }
        | Error::OutsideDomain
        | Error::Construction(_)
        | Error::InvalidBoundaryPoint(_)
        | Error::ConvexityClass(_)
        | Error::Unbounded
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) => "config",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::OutsideDomain => "outside-domain",
        Error::Construction(_) => "construction",
        Error::InvalidBoundaryPoint(_) => "invalid-boundary-point",
        Error::ConvexityClass(_) => "convexity-class",
        Error::Unbounded => "unbounded",
        Error::Io(_) => "io",
        Error::LineMissesBoundary => "line-misses-boundary",
        Error::Quadrature { .. } => "quadrature",
        Error::CurveExitsDomain(_) => "curve-exits-domain",
        Error::MeshDisconnected(_) => "mesh-disconnected",
        Error::EndpointMismatch(_) => "endpoint-mismatch",
        Error::NoFeasibleConstants(_) => "no-feasible-constants",
    }
}

/// One-line machine-readable error record.
pub fn error_record(e: &Error) -> String {
    json!({ "error": error_kind(e), "message": e.to_string(), "exit_code": exit_code(e) }).to_string()
}

/// Sets the global worker count from the environment, if present.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))
}

/// Full run: configuration, computation, then output. Returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = (|| {
        configure_threads()?;
        let cfg = cli.to_config()?;
        let hash = cfg.hash()?;
        let outcome = dispatch(&cfg)?;
        if let Some(dir) = &cfg.out {
            write_atomically(dir, &artifacts(&outcome, &hash)?)?;
        }
        Ok::<_, Error>(outcome)
    })();
    match result {
        Ok(o) => {
            println!("{}", o.summary);
            if o.certified {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{}", error_record(&e));
            exit_code(&e)
        }
    }
}
