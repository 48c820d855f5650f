//! Experiment configs, execution on either engine, and CSV/JSON reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baseline::run_reference;
use crate::error::{Error, Result};
use crate::fastprep::{run_exact_scaled_with, run_fast_with, FastMethod, ScaleRule};
use crate::oracle::{value_limit, OracleTable};
use crate::report::{Exactness, Iterations, Method, RunPlan, RunReport};
use crate::simcore::ExecPolicy;
use crate::structsim::reduced_run_with;

/// Maximum per-column deviation tolerated between the two engines.
pub const ENGINE_TOLERANCE: f64 = 1e-9;

pub const CSV_COLUMNS: [&str; 11] = [
    "method",
    "n",
    "m",
    "q",
    "seed",
    "iteration",
    "queries_cumulative",
    "p_success",
    "overlap_omega",
    "fidelity",
    "wall_ms",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Dense,
    Structured,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleSource {
    File(PathBuf),
    Values(Vec<i64>),
    Random { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: Method,
    #[serde(default)]
    pub exactness: Exactness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Phase-register width for the kickback route; defaults to `m + 4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    pub oracle_source: OracleSource,
    #[serde(default)]
    pub iterations: Iterations,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Command-line overrides shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub engine: Option<Engine>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

/// Config with its oracle loaded and its run plan fixed.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub table: OracleTable,
    pub plan: RunPlan,
    pub engine: Engine,
    pub seed: Option<u64>,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("config: {e}"))
}

/// Uniform values in `[−(2^(m−1)−1), 2^(m−1)−1]`, redrawn while all zero.
pub fn random_oracle(n: usize, m: usize, seed: u64) -> Result<OracleTable> {
    if n < 1 {
        return Err(Error::Config("n: random oracles need n >= 1".into()));
    }
    if !(2..=62).contains(&m) {
        return Err(Error::Config(format!("m: must be in 2..=62, got {m}")));
    }
    let limit = value_limit(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let values: Vec<i64> = (0..1usize << n).map(|_| rng.gen_range(-limit..=limit)).collect();
        if values.iter().any(|&v| v != 0) {
            return OracleTable::new(n, m, values);
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(content: &str) -> Result<Self> {
        serde_json::from_str(content).map_err(config_error)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        serde_json::from_value(value).map_err(config_error)
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<()> {
        if let Some(engine) = overrides.engine {
            self.engine = engine;
        }
        if let Some(seed) = overrides.seed {
            match &mut self.oracle_source {
                OracleSource::Random { seed: s } => *s = seed,
                _ => {
                    return Err(Error::Config(
                        "seed: --seed needs a random oracle_source".into(),
                    ))
                }
            }
        }
        if overrides.out.is_some() {
            self.output.clone_from(&overrides.out);
        }
        Ok(())
    }

    pub fn load_table(&self) -> Result<(OracleTable, Option<u64>)> {
        let (table, seed) = match &self.oracle_source {
            OracleSource::File(path) => (OracleTable::load(path, self.m)?, None),
            OracleSource::Values(values) => {
                let text: String = values.iter().map(|v| format!("{v}\n")).collect();
                (OracleTable::parse(&text, self.m)?, None)
            }
            OracleSource::Random { seed } => {
                let n = self.n.ok_or_else(|| Error::Config("n: required for a random oracle".into()))?;
                let m = self.m.ok_or_else(|| Error::Config("m: required for a random oracle".into()))?;
                (random_oracle(n, m, *seed)?, Some(*seed))
            }
        };
        if let Some(n) = self.n {
            if n != table.index_width() {
                return Err(Error::Config(format!(
                    "n: config says {n}, oracle has {} index bits",
                    table.index_width()
                )));
            }
        }
        Ok((table, seed))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let (table, seed) = self.load_table()?;
        let q = match self.method {
            Method::FastKickback => self.q.unwrap_or(table.value_width() + 4),
            _ => 0,
        };
        let plan = RunPlan::new(self.method)
            .with_exactness(self.exactness)
            .with_phase_width(q)
            .with_iterations(self.iterations);
        plan.validate()?;
        Ok(Resolved {
            table,
            plan,
            engine: self.engine,
            seed,
        })
    }
}

fn fast_method(plan: &RunPlan) -> FastMethod {
    match plan.method {
        Method::FastKickback => FastMethod::kickback(plan.phase_width),
        _ => FastMethod::rz(),
    }
}

/// Runs `plan` on the dense engine.
pub fn run_dense(table: &OracleTable, plan: &RunPlan, policy: ExecPolicy) -> Result<RunReport> {
    plan.validate()?;
    let outcome = match (plan.method, plan.exactness) {
        (Method::Baseline, exactness) => {
            run_reference(table, plan.iterations, exactness == Exactness::Prakash, policy)?
        }
        (_, Exactness::Scaled) => {
            run_exact_scaled_with(table, &fast_method(plan), ScaleRule::Bisection, plan.iterations, policy)?
        }
        _ => run_fast_with(table, &fast_method(plan), plan.iterations, 1.0, policy)?,
    };
    Ok(outcome.report)
}

/// Largest absolute difference between two traces, with its column name.
pub fn trace_deviation(a: &RunReport, b: &RunReport) -> Option<(&'static str, f64)> {
    if a.records.len() != b.records.len() {
        return Some(("iteration", f64::INFINITY));
    }
    let mut worst: Option<(&'static str, f64)> = None;
    for (x, y) in a.records.iter().zip(&b.records) {
        let columns = [
            ("queries_cumulative", (x.queries_cumulative as f64 - y.queries_cumulative as f64).abs()),
            ("p_success", (x.p_success - y.p_success).abs()),
            ("overlap_omega", (x.overlap_omega - y.overlap_omega).abs()),
            ("fidelity", (x.fidelity - y.fidelity).abs()),
        ];
        for (name, d) in columns {
            if worst.is_none_or(|(_, w)| d > w) {
                worst = Some((name, d));
            }
        }
    }
    worst
}

/// Executes a resolved config on its engine(s). With `Engine::Both` the
/// dense report is returned after checking the structured one against it.
pub fn execute(resolved: &Resolved, policy: ExecPolicy, timing: bool) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = match resolved.engine {
        Engine::Dense => run_dense(&resolved.table, &resolved.plan, policy)?,
        Engine::Structured => reduced_run_with(&resolved.table, &resolved.plan, policy)?,
        Engine::Both => {
            let dense = run_dense(&resolved.table, &resolved.plan, policy)?;
            let reduced = reduced_run_with(&resolved.table, &resolved.plan, policy)?;
            if let Some((column, deviation)) = trace_deviation(&dense, &reduced) {
                if !(deviation <= ENGINE_TOLERANCE) {
                    return Err(Error::EngineMismatch {
                        column: column.to_string(),
                        deviation,
                    });
                }
            }
            dense
        }
    };
    if timing {
        report.summary.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// `%.12g`-style rendering.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One finished run with the seed it was drawn from.
#[derive(Clone, Debug, Serialize)]
pub struct Experiment {
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub report: RunReport,
}

impl Experiment {
    fn row(&self, record: &crate::report::IterationRecord) -> Vec<String> {
        let r = &self.report;
        vec![
            r.method.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.q.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            record.iteration.to_string(),
            record.queries_cumulative.to_string(),
            format_float(record.p_success),
            format_float(record.overlap_omega),
            format_float(record.fidelity),
            r.summary.wall_ms.map(format_float).unwrap_or_default(),
        ]
    }
}

/// CSV and JSON renderings of one command's results.
#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub csv: String,
    pub json: String,
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn run_one(config: &ExperimentConfig, policy: ExecPolicy, timing: bool) -> Result<Experiment> {
    let resolved = config.resolve()?;
    let report = execute(&resolved, policy, timing)?;
    Ok(Experiment {
        config: config.clone(),
        seed: resolved.seed,
        report,
    })
}

/// Per-iteration trace of a single config.
pub fn cli_run(config: &ExperimentConfig, timing: bool) -> Result<Rendered> {
    let exp = run_one(config, ExecPolicy::default(), timing)?;
    let csv = write_csv(&CSV_COLUMNS, exp.report.records.iter().map(|r| exp.row(r)))?;
    Ok(Rendered {
        csv,
        json: to_json(&exp)?,
    })
}

pub const COMPARE_COLUMNS: [&str; 13] = [
    "method",
    "exactness",
    "n",
    "m",
    "q",
    "seed",
    "iterations",
    "total_queries",
    "queries_per_iteration",
    "p_success",
    "fidelity",
    "baseline_ratio",
    "wall_ms",
];

/// Compare input: a list of configs, or one config expanded to every method.
pub fn compare_configs(value: Value) -> Result<Vec<ExperimentConfig>> {
    match value {
        Value::Array(items) => items.into_iter().map(ExperimentConfig::from_value).collect(),
        single => {
            let base = ExperimentConfig::from_value(single)?;
            Ok(Method::ALL
                .into_iter()
                .map(|method| ExperimentConfig {
                    method,
                    exactness: Exactness::None,
                    ..base.clone()
                })
                .collect())
        }
    }
}

/// Queries charged between the first two trace rows, if there are two.
fn measured_per_iteration(report: &RunReport) -> Option<u64> {
    match report.records.as_slice() {
        [a, b, ..] => Some(b.queries_cumulative - a.queries_cumulative),
        _ => None,
    }
}

/// Side-by-side totals for configs that share one oracle.
pub fn cli_compare(configs: &[ExperimentConfig], timing: bool) -> Result<Rendered> {
    if configs.is_empty() {
        return Err(Error::Config("compare: no configs given".into()));
    }
    let mut experiments = Vec::with_capacity(configs.len());
    let mut oracle: Option<OracleTable> = None;
    for config in configs {
        let (table, _) = config.load_table()?;
        match &oracle {
            Some(t) if *t != table => {
                return Err(Error::Config(
                    "oracle_source: compared configs use different oracles".into(),
                ))
            }
            Some(_) => {}
            None => oracle = Some(table),
        }
        experiments.push(run_one(config, ExecPolicy::default(), timing)?);
    }
    let baseline_total = experiments
        .iter()
        .find(|e| e.report.method == Method::Baseline)
        .map(|e| e.report.summary.total_queries);
    let rows = experiments.iter().map(|e| {
        let r = &e.report;
        vec![
            r.method.to_string(),
            r.exactness.as_str().to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.q.to_string(),
            e.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.summary.iterations.to_string(),
            r.summary.total_queries.to_string(),
            measured_per_iteration(r).map(|q| q.to_string()).unwrap_or_default(),
            format_float(r.summary.p_success),
            format_float(r.summary.fidelity),
            baseline_total
                .map(|b| format_float(b as f64 / r.summary.total_queries as f64))
                .unwrap_or_default(),
            r.summary.wall_ms.map(format_float).unwrap_or_default(),
        ]
    });
    Ok(Rendered {
        csv: write_csv(&COMPARE_COLUMNS, rows)?,
        json: to_json(&experiments)?,
    })
}

/// Swept quantity; both ranges are inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepAxis {
    Iterations([u64; 2]),
    N([usize; 2]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub axis: SweepAxis,
    /// Oracle seeds; defaults to the base config's own source.
    pub seeds: Option<Vec<u64>>,
    pub workers: Option<usize>,
}

impl SweepConfig {
    /// Reads a base config carrying extra `sweep`, `seeds` and `workers` keys.
    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(mut map) = value else {
            return Err(Error::Config("config: sweep config must be a JSON object".into()));
        };
        let axis = map
            .remove("sweep")
            .ok_or_else(|| Error::Config("sweep: missing field".into()))?;
        let axis: SweepAxis =
            serde_json::from_value(axis).map_err(|e| Error::Config(format!("sweep: {e}")))?;
        let seeds = map
            .remove("seeds")
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| Error::Config(format!("seeds: {e}")))?;
        let workers = map
            .remove("workers")
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| Error::Config(format!("workers: {e}")))?;
        if workers == Some(0) {
            return Err(Error::Config("workers: must be at least 1".into()));
        }
        Ok(Self {
            base: ExperimentConfig::from_value(Value::Object(map))?,
            axis,
            seeds,
            workers,
        })
    }

    /// Every point as `(key, config)`, in sweep order.
    pub fn points(&self) -> Result<Vec<(u64, ExperimentConfig)>> {
        let seeds: Vec<Option<u64>> = match &self.seeds {
            Some(list) => {
                if !matches!(self.base.oracle_source, OracleSource::Random { .. }) {
                    return Err(Error::Config("seeds: need a random oracle_source".into()));
                }
                list.iter().copied().map(Some).collect()
            }
            None => vec![None],
        };
        let with_seed = |mut c: ExperimentConfig, seed: Option<u64>| {
            if let (Some(s), OracleSource::Random { seed }) = (seed, &mut c.oracle_source) {
                *seed = s;
            }
            c
        };
        let mut points = Vec::new();
        match self.axis {
            SweepAxis::Iterations([from, to]) => {
                for k in from..=to {
                    for &seed in &seeds {
                        let c = ExperimentConfig {
                            iterations: Iterations::Fixed(k),
                            ..self.base.clone()
                        };
                        points.push((k, with_seed(c, seed)));
                    }
                }
            }
            SweepAxis::N([from, to]) => {
                if !matches!(self.base.oracle_source, OracleSource::Random { .. }) {
                    return Err(Error::Config("sweep: n needs a random oracle_source".into()));
                }
                for n in from..=to {
                    for &seed in &seeds {
                        let c = ExperimentConfig {
                            n: Some(n),
                            ..self.base.clone()
                        };
                        points.push((n as u64, with_seed(c, seed)));
                    }
                }
            }
        }
        Ok(points)
    }
}

#[cfg(feature = "parallel")]
fn run_points(points: &[(u64, ExperimentConfig)], workers: Option<usize>, timing: bool) -> Result<Vec<Experiment>> {
    use rayon::prelude::*;
    let job = || {
        points
            .par_iter()
            .map(|(_, c)| run_one(c, ExecPolicy::Sequential, timing))
            .collect::<Result<Vec<_>>>()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("workers: {e}")))?
            .install(job),
        None => job(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_points(points: &[(u64, ExperimentConfig)], _workers: Option<usize>, timing: bool) -> Result<Vec<Experiment>> {
    points
        .iter()
        .map(|(_, c)| run_one(c, ExecPolicy::Sequential, timing))
        .collect()
}

/// One row per sweep point (the final record of its run), sorted by
/// `(key, seed)`.
pub fn cli_sweep(sweep: &SweepConfig, timing: bool) -> Result<Rendered> {
    let points = sweep.points()?;
    let experiments = run_points(&points, sweep.workers, timing)?;
    let mut keyed: Vec<(u64, Experiment)> = points.iter().map(|(k, _)| *k).zip(experiments).collect();
    keyed.sort_by_key(|(k, e)| (*k, e.seed));
    let rows = keyed.iter().filter_map(|(_, e)| e.report.final_record().map(|r| e.row(r)));
    let csv = write_csv(&CSV_COLUMNS, rows)?;
    let experiments: Vec<&Experiment> = keyed.iter().map(|(_, e)| e).collect();
    Ok(Rendered {
        csv,
        json: to_json(&experiments)?,
    })
}

/// JSON sibling of a CSV output path.
pub fn json_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the CSV to `path` and the JSON next to it.
pub fn write_rendered(rendered: &Rendered, path: &Path) -> Result<()> {
    std::fs::write(path, &rendered.csv)?;
    std::fs::write(json_path(path), &rendered.json)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(0.999999999999999), "1");
        assert_eq!(format_float(1.5e-7), "1.5e-07");
        assert_eq!(format_float(123456.5), "123456.5");
        assert_eq!(format_float(-2.5e13), "-2.5e+13");
    }

    #[test]
    fn config_fields() {
        let c = config(r#"{"method": "fast-kickback", "m": 3, "oracle_source": {"values": [3, 0, 0, 0]}, "q": 12}"#);
        let r = c.resolve().unwrap();
        assert_eq!(r.plan.phase_width, 12);
        assert_eq!(r.table.index_width(), 2);
        assert_eq!(r.plan.iterations, Iterations::Auto);

        let c = config(r#"{"method": "fast-kickback", "oracle_source": {"random": {"seed": 1}}, "n": 2, "m": 3}"#);
        assert_eq!(c.resolve().unwrap().plan.phase_width, 7);

        let err = ExperimentConfig::from_json(r#"{"method": "fast-rz", "oracle_source": {"values": [1]}, "colour": 1}"#)
            .unwrap_err();
        assert!(err.to_string().contains("colour"));
        let err = ExperimentConfig::from_json(r#"{"oracle_source": {"values": [1]}}"#).unwrap_err();
        assert!(err.to_string().contains("method"));
        let err = config(r#"{"method": "baseline", "oracle_source": {"random": {"seed": 1}}, "m": 3}"#)
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("n:"));
        let err = config(r#"{"method": "fast-rz", "exactness": "prakash", "oracle_source": {"values": [1, 0]}}"#)
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("exactness"));
    }

    #[test]
    fn random_oracle_examples() {
        assert_eq!(random_oracle(3, 4, 11).unwrap(), random_oracle(3, 4, 11).unwrap());
        let tables: Vec<_> = (0..8).map(|s| random_oracle(3, 4, s).unwrap()).collect();
        assert!(tables.windows(2).any(|w| w[0] != w[1]));
        for seed in 0..32 {
            let t = random_oracle(1, 2, seed).unwrap();
            assert!(t.values().iter().all(|v| (-1..=1).contains(v)));
            assert!(t.values().iter().any(|&v| v != 0));
        }
        assert!(random_oracle(0, 3, 1).is_err());
        assert!(random_oracle(2, 1, 1).is_err());
    }

    #[test]
    fn run_examples() {
        let c = config(r#"{"method": "baseline", "m": 3, "oracle_source": {"values": [3, 0, 0, 0]}}"#);
        let exp = run_one(&c, ExecPolicy::default(), false).unwrap();
        assert_eq!(exp.report.summary.total_queries, 6);
        assert!((exp.report.summary.fidelity - 1.0).abs() < 1e-9);

        let c = config(r#"{"method": "fast-kickback", "m": 3, "q": 12, "oracle_source": {"values": [3, 0, 0, 0]}}"#);
        assert_eq!(run_one(&c, ExecPolicy::default(), false).unwrap().report.summary.total_queries, 2);
    }

    #[test]
    fn run_csv_shape_and_determinism() {
        let c = config(r#"{"method": "fast-rz", "n": 3, "m": 4, "oracle_source": {"random": {"seed": 5}}, "iterations": 2}"#);
        let a = cli_run(&c, false).unwrap();
        assert_eq!(a, cli_run(&c, false).unwrap());
        let mut lines = a.csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].starts_with("fast-rz,3,4,0,5,0,2,"));
        assert!(rows.iter().all(|r| r.ends_with(',')));
        let timed = cli_run(&c, true).unwrap();
        assert!(!timed.csv.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn engine_both_agrees() {
        for method in ["baseline", "fast-rz", "fast-kickback"] {
            let c = config(&format!(
                r#"{{"method": "{method}", "n": 3, "m": 4, "oracle_source": {{"random": {{"seed": 2}}}}, "engine": "both"}}"#
            ));
            run_one(&c, ExecPolicy::default(), false).unwrap();
        }
        let c = config(r#"{"method": "fast-rz", "exactness": "scaled", "n": 3, "m": 4, "oracle_source": {"random": {"seed": 2}}, "engine": "both"}"#);
        run_one(&c, ExecPolicy::default(), false).unwrap();
    }

    #[test]
    fn engine_both_respects_dense_cap() {
        let c = config(r#"{"method": "fast-rz", "n": 24, "m": 4, "oracle_source": {"random": {"seed": 2}}, "engine": "both", "iterations": 0}"#);
        let err = run_one(&c, ExecPolicy::default(), false).unwrap_err();
        assert!(matches!(err, Error::WidthOverflow { .. }));
    }

    #[test]
    fn compare_examples() {
        let value: Value = serde_json::from_str(
            r#"{"method": "baseline", "m": 3, "oracle_source": {"values": [3, 0, 0, 0]}, "q": 7}"#,
        )
        .unwrap();
        let configs = compare_configs(value).unwrap();
        let out = cli_compare(&configs, false).unwrap();
        let rows: Vec<Vec<&str>> = out.csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        let totals: Vec<&str> = rows.iter().map(|r| r[7]).collect();
        assert_eq!(totals, ["6", "4", "2"]);
        let per_iter: Vec<&str> = rows.iter().map(|r| r[8]).collect();
        assert_eq!(per_iter, ["4", "2", "1"]);
        let ratios: Vec<&str> = rows.iter().map(|r| r[11]).collect();
        assert_eq!(ratios, ["1", "1.5", "3"]);

        let mismatched = vec![
            config(r#"{"method": "baseline", "m": 3, "oracle_source": {"values": [3, 0, 0, 0]}}"#),
            config(r#"{"method": "fast-rz", "m": 3, "oracle_source": {"values": [3, 0, 1, 0]}}"#),
        ];
        assert!(matches!(cli_compare(&mismatched, false), Err(Error::Config(_))));
    }

    fn sweep(json: &str) -> SweepConfig {
        SweepConfig::from_value(serde_json::from_str(json).unwrap()).unwrap()
    }

    #[test]
    fn sweep_iterations_follow_rotation_law() {
        let s = sweep(r#"{"method": "baseline", "m": 3, "oracle_source": {"values": [3, 0, 0, 0]}, "sweep": {"iterations": [0, 4]}}"#);
        let out = cli_sweep(&s, false).unwrap();
        let exps: Vec<Value> = serde_json::from_str(&out.json).unwrap();
        let expected = [0.25, 1.0, 0.25, 0.25, 1.0];
        assert_eq!(exps.len(), 5);
        for (e, want) in exps.iter().zip(expected) {
            let p = e["report"]["summary"]["p_success"].as_f64().unwrap();
            assert!((p - want).abs() <= 1e-9);
        }
        assert_eq!(out.csv.lines().count(), 6);
    }

    #[test]
    fn sweep_seeds_and_empty_range() {
        let s = sweep(
            r#"{"method": "fast-rz", "n": 4, "m": 5, "oracle_source": {"random": {"seed": 0}},
                "sweep": {"n": [4, 4]}, "seeds": [9, 8, 7, 6, 5, 4, 3, 2, 1, 0], "workers": 3}"#,
        );
        let out = cli_sweep(&s, false).unwrap();
        let rows: Vec<Vec<String>> = out
            .csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(String::from).collect())
            .collect();
        assert_eq!(rows.len(), 10);
        let seeds: Vec<u64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
        assert_eq!(seeds, (0..10).collect::<Vec<_>>());
        assert!(rows.iter().all(|r| r[9].parse::<f64>().unwrap() >= 1.0 - 1e-9));
        assert_eq!(out, cli_sweep(&s, false).unwrap());

        let s = sweep(r#"{"method": "fast-rz", "m": 3, "oracle_source": {"values": [1, 2]}, "sweep": {"iterations": [3, 1]}}"#);
        assert_eq!(cli_sweep(&s, false).unwrap().csv, format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn sweep_rejects_bad_keys() {
        let v: Value = serde_json::from_str(
            r#"{"method": "fast-rz", "oracle_source": {"values": [1, 2]}, "sweep": {"k": [0, 1]}}"#,
        )
        .unwrap();
        assert!(SweepConfig::from_value(v).unwrap_err().to_string().contains("sweep"));
    }
}
