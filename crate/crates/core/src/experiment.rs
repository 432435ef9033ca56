//! Seeded weight-sweep experiments over a shared roadmap.
//!
//! One roadmap is built per experiment. Each run draws one valid start/goal
//! pair from its own substream and solves it under every weight, so weights
//! are compared on identical queries. Records come back sorted by run, then
//! ascending weight, regardless of how many threads did the work.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::Config;
use crate::planner::{build_roadmap, connect_query, solve, PathSolution, Roadmap, RoadmapParams};
use crate::privacy::{violated_unchecked, CostProfile};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scene::{builtin_scenario, BuiltinScenario, QuerySampler, ScenarioBundle, Scene};
use crate::validity::ValidityChecker;

pub const RECORD_HEADER: [&str; 8] = [
    "scenario",
    "run",
    "seed",
    "weight",
    "success",
    "violation_fraction",
    "path_length",
    "solve_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: String,
    pub runs: usize,
    pub weights: Vec<f64>,
    pub roadmap_n: usize,
    pub conn_radius: f64,
    pub resolution: f64,
    pub privacy_resolution: f64,
    pub master_seed: u64,
    /// Wall-clock solve times make output nondeterministic; off by default.
    pub record_timing: bool,
}

impl ExperimentSpec {
    /// Spec using a scenario's bundled defaults.
    pub fn from_bundle(bundle: &ScenarioBundle, master_seed: u64) -> Self {
        let d = &bundle.defaults;
        Self {
            scenario: bundle.scene.name.clone(),
            runs: d.runs,
            weights: d.weights.clone(),
            roadmap_n: d.roadmap_n,
            conn_radius: d.conn_radius,
            resolution: d.resolution,
            privacy_resolution: d.privacy_resolution,
            master_seed,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidExperiment("runs must be ≥ 1".into()));
        }
        if self.weights.is_empty() {
            return Err(Error::InvalidExperiment("weights must be nonempty".into()));
        }
        for &w in &self.weights {
            CostProfile::new(w)?;
        }
        if !self.weights.contains(&1.0) {
            return Err(Error::InvalidExperiment(
                "weights must include the agnostic baseline 1".into(),
            ));
        }
        Ok(())
    }

    pub fn roadmap_params(&self) -> RoadmapParams {
        RoadmapParams {
            samples: self.roadmap_n,
            connection_radius: self.conn_radius,
            resolution: self.resolution,
            privacy_resolution: self.privacy_resolution,
            seed: self.master_seed,
        }
    }

    /// Seed of run `run`'s start/goal substream.
    pub fn run_seed(&self, run: usize) -> u64 {
        derive_seed(self.master_seed, run as u64)
    }

    /// Distinct weights in canonical (ascending) order.
    fn sorted_weights(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.sort_by(f64::total_cmp);
        w.dedup();
        w
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub scenario: String,
    pub run: usize,
    pub seed: u64,
    pub weight: f64,
    pub success: bool,
    pub violation_fraction: Option<f64>,
    pub path_length: Option<f64>,
    pub solve_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub roadmap: Roadmap,
    /// The (start, goal) pair of each run, shared by all of its weights.
    pub queries: Vec<(Config, Config)>,
    pub records: Vec<RunRecord>,
}

/// Draws a uniformly random valid configuration by rejection.
pub fn sample_valid_config(
    scene: &Scene,
    checker: &ValidityChecker<'_>,
    sampler: &QuerySampler,
    rng: &mut crate::rng::PlannerRng,
) -> Result<Config> {
    let QuerySampler::UniformValid { max_attempts } = *sampler;
    for _ in 0..max_attempts {
        let q = scene.robot.sample_config(rng);
        if checker.valid_unchecked(&q) {
            return Ok(q);
        }
    }
    Err(Error::Infeasible(format!(
        "no valid configuration in {max_attempts} attempts"
    )))
}

/// The start/goal pair of one run.
pub fn sample_query(scene: &Scene, sampler: &QuerySampler, resolution: f64, seed: u64) -> Result<(Config, Config)> {
    let checker = ValidityChecker::new(scene, resolution)?;
    let mut rng = rng_from_seed(seed);
    let start = sample_valid_config(scene, &checker, sampler, &mut rng)?;
    let goal = sample_valid_config(scene, &checker, sampler, &mut rng)?;
    Ok((start, goal))
}

/// Runs a bundled scenario by name.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    let which: BuiltinScenario = spec.scenario.parse()?;
    let bundle = builtin_scenario(which);
    Ok(run_experiment_on(&bundle.scene, &bundle.query_sampler, spec, None)?.records)
}

/// Runs an experiment on an explicit scene, optionally reusing a roadmap.
pub fn run_experiment_on(
    scene: &Scene,
    sampler: &QuerySampler,
    spec: &ExperimentSpec,
    roadmap: Option<Roadmap>,
) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let roadmap = match roadmap {
        Some(r) => r,
        None => build_roadmap(scene, &spec.roadmap_params())?,
    };
    if roadmap.dof() != scene.robot.dof() {
        return Err(Error::ConfigDimension {
            expected: scene.robot.dof(),
            got: roadmap.dof(),
        });
    }
    let weights = spec.sorted_weights();
    let profiles: Vec<CostProfile> = weights.iter().map(|&w| CostProfile::new(w)).collect::<Result<_>>()?;

    type RunOutput = ((Config, Config), Vec<RunRecord>);
    let per_run: Vec<Result<RunOutput>> = (0..spec.runs)
        .into_par_iter()
        .map(|run| {
            let seed = spec.run_seed(run);
            let (start, goal) = sample_query(scene, sampler, roadmap.params().resolution, seed)?;
            let mut records = Vec::with_capacity(profiles.len());
            let clock = Instant::now();
            let graph = connect_query(scene, &roadmap, &start, &goal)?;
            let connect_ms = clock.elapsed().as_secs_f64() * 1e3;
            for profile in &profiles {
                let clock = Instant::now();
                let outcome = solve(scene, &roadmap, &graph, profile);
                let ms = connect_ms + clock.elapsed().as_secs_f64() * 1e3;
                let (success, fraction, length) = match outcome {
                    Ok(sol) => (true, Some(sol.violation_fraction), Some(sol.length)),
                    Err(Error::NoPath) => (false, None, None),
                    Err(e) => return Err(e),
                };
                records.push(RunRecord {
                    scenario: spec.scenario.clone(),
                    run,
                    seed,
                    weight: profile.weight(),
                    success,
                    violation_fraction: fraction,
                    path_length: length,
                    solve_ms: spec.record_timing.then_some(ms),
                });
            }
            Ok(((start, goal), records))
        })
        .collect();

    let mut queries = Vec::with_capacity(spec.runs);
    let mut records = Vec::with_capacity(spec.runs * profiles.len());
    for r in per_run {
        let (q, recs) = r?;
        queries.push(q);
        records.extend(recs);
    }
    Ok(ExperimentOutcome {
        roadmap,
        queries,
        records,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let mid = v.len() / 2;
        let median = if v.len() % 2 == 1 {
            v[mid]
        } else {
            0.5 * (v[mid - 1] + v[mid])
        };
        Some(Stats {
            mean,
            median,
            min: v[0],
            max: v[v.len() - 1],
            std: var.sqrt(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSummary {
    pub weight: f64,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful runs only; `None` when every run failed.
    pub violation_fraction: Option<Stats>,
    pub path_length: Option<Stats>,
}

/// One aggregate row per distinct weight, ascending.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<WeightSummary>> {
    if records.is_empty() {
        return Err(Error::Empty("no records to summarize"));
    }
    let mut weights: Vec<f64> = records.iter().map(|r| r.weight).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup();
    Ok(weights
        .into_iter()
        .map(|w| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.weight == w).collect();
            let ok: Vec<&&RunRecord> = rows.iter().filter(|r| r.success).collect();
            let fractions: Vec<f64> = ok.iter().filter_map(|r| r.violation_fraction).collect();
            let lengths: Vec<f64> = ok.iter().filter_map(|r| r.path_length).collect();
            WeightSummary {
                weight: w,
                runs: rows.len(),
                successes: ok.len(),
                success_rate: ok.len() as f64 / rows.len() as f64,
                violation_fraction: Stats::of(&fractions),
                path_length: Stats::of(&lengths),
            }
        })
        .collect())
}

/// `%.9g`-style formatting: nine significant digits, trailing zeros trimmed.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

/// CSV with LF line endings; failed runs leave metric fields empty, and
/// `solve_ms` is empty unless timing was recorded.
pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.scenario.clone(),
            r.run.to_string(),
            r.seed.to_string(),
            format_sig9(r.weight),
            (r.success as u8).to_string(),
            opt(r.violation_fraction),
            opt(r.path_length),
            opt(r.solve_ms),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(RECORD_HEADER.iter().copied()) {
        return Err(Error::validation(
            "header",
            format!("expected {}", RECORD_HEADER.join(",")),
        ));
    }
    let num = |s: &str, field: &str, line: usize| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::validation(format!("line {line}: {field}"), format!("not a number: {s:?}")))
    };
    let mut out = Vec::new();
    for (k, row) in rd.records().enumerate() {
        let row = row?;
        let line = k + 2;
        let optional = |i: usize, f: &str| -> Result<Option<f64>> {
            let s = &row[i];
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, f, line).map(Some)
            }
        };
        out.push(RunRecord {
            scenario: row[0].to_string(),
            run: row[1]
                .parse()
                .map_err(|_| Error::validation(format!("line {line}: run"), "not an integer"))?,
            seed: row[2]
                .parse()
                .map_err(|_| Error::validation(format!("line {line}: seed"), "not an integer"))?,
            weight: num(&row[3], "weight", line)?,
            success: match &row[4] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(Error::validation(
                        format!("line {line}: success"),
                        format!("expected 0 or 1, got {other:?}"),
                    ))
                }
            },
            violation_fraction: optional(5, "violation_fraction")?,
            path_length: optional(6, "path_length")?,
            solve_ms: optional(7, "solve_ms")?,
        });
    }
    Ok(out)
}

/// Header of a trace file for a `dof`-dimensional robot.
pub fn trace_header(dof: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..dof).map(|i| format!("q{i}")));
    h.extend(["apex_x", "apex_y", "apex_z", "axis_x", "axis_y", "axis_z", "violating"].map(String::from));
    h
}

/// One row per subdivision point along the solution: each edge of length `L`
/// contributes `⌈L/δ_p⌉` points after the shared start row.
pub fn export_trace<W: Write>(scene: &Scene, solution: &PathSolution, resolution: f64, out: W) -> Result<()> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidResolution(resolution));
    }
    let robot = &scene.robot;
    let first = solution.waypoints.first().ok_or(Error::PathTooShort(0))?;
    robot.check_dim(first)?;

    let mut points: Vec<(f64, Config)> = vec![(0.0, first.clone())];
    let mut travelled = 0.0;
    for w in solution.waypoints.windows(2) {
        robot.check_dim(&w[1])?;
        let len = robot.distance_unchecked(&w[0], &w[1]);
        if len == 0.0 {
            continue;
        }
        let m = (len / resolution).ceil().max(1.0) as usize;
        for k in 1..=m {
            let f = k as f64 / m as f64;
            points.push((travelled + len * f, crate::kinematics::lerp(&w[0], &w[1], f)));
        }
        travelled += len;
    }

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(trace_header(robot.dof()))?;
    for (s, q) in &points {
        let t = if travelled > 0.0 { s / travelled } else { 0.0 };
        let cone = robot.cone_unchecked(q);
        let mut row = vec![format_sig9(t)];
        row.extend(q.iter().map(|v| format_sig9(*v)));
        row.extend(cone.apex().iter().map(|v| format_sig9(*v)));
        row.extend(cone.axis().iter().map(|v| format_sig9(*v)));
        row.push((violated_unchecked(scene, q) as u8).to_string());
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(w: f64, success: bool, v: f64, l: f64) -> RunRecord {
        RunRecord {
            scenario: "s".into(),
            run: 0,
            seed: 1,
            weight: w,
            success,
            violation_fraction: success.then_some(v),
            path_length: success.then_some(l),
            solve_ms: None,
        }
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.5), "0.5");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(-10.0), "-10");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(123456789.4), "123456789");
        assert_eq!(format_sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(format_sig9(1.5e-7), "1.5e-07");
        assert_eq!(format_sig9(0.0001), "0.0001");
        assert_eq!(format_sig9(9.9999999999), "10");
        assert_eq!(format_sig9(2.0f64.sqrt()), "1.41421356");
    }

    #[test]
    fn summary_examples() {
        let s = summarize(&[rec(1.0, true, 0.5, 4.0)]).unwrap();
        let v = s[0].violation_fraction.unwrap();
        let l = s[0].path_length.unwrap();
        assert_eq!((v.mean, v.median, l.mean, l.median), (0.5, 0.5, 4.0, 4.0));

        let s = summarize(&[rec(2.0, true, 0.0, 1.0), rec(2.0, true, 1.0, 3.0)]).unwrap();
        let v = s[0].violation_fraction.unwrap();
        assert_eq!((v.mean, v.min, v.max), (0.5, 0.0, 1.0));

        let s = summarize(&[rec(-2.0, false, 0.0, 0.0), rec(1.0, true, 0.2, 2.0)]).unwrap();
        assert_eq!(s[0].weight, -2.0);
        assert_eq!(s[0].success_rate, 0.0);
        assert!(s[0].violation_fraction.is_none() && s[0].path_length.is_none());
        assert_eq!(s[1].success_rate, 1.0);

        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn constant_column_aggregates_to_constant() {
        let rows: Vec<RunRecord> = (0..7).map(|_| rec(5.0, true, 0.125, 3.25)).collect();
        let s = summarize(&rows).unwrap()[0].clone();
        let v = s.violation_fraction.unwrap();
        assert_eq!(
            (v.mean, v.median, v.min, v.max, v.std),
            (0.125, 0.125, 0.125, 0.125, 0.0)
        );
    }

    #[test]
    fn csv_round_trip() {
        let mut rows = vec![rec(1.0, true, 0.123456789012, 4.5), rec(-2.0, false, 0.0, 0.0)];
        rows[1].run = 1;
        rows[0].solve_ms = Some(1.25);
        let mut buf = Vec::new();
        write_records(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("scenario,run,seed,weight,success,violation_fraction,path_length,solve_ms\n"));
        assert!(!text.contains('\r'));
        let back = read_records(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1], rows[1]);
        assert!((back[0].violation_fraction.unwrap() - 0.123456789).abs() < 1e-15);
        // Re-writing the parsed records reproduces the bytes.
        let mut again = Vec::new();
        write_records(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn spec_validation() {
        let bundle = builtin_scenario(BuiltinScenario::Manip1);
        let mut spec = ExperimentSpec::from_bundle(&bundle, 1);
        assert!(spec.validate().is_ok());
        spec.weights = vec![0.5, 1.0];
        assert!(spec
            .validate()
            .unwrap_err()
            .to_string()
            .contains("weight magnitude must be ≥ 1"));
        spec.weights = vec![2.0];
        assert!(spec.validate().is_err());
        spec.weights = vec![1.0];
        spec.runs = 0;
        assert!(spec.validate().is_err());
    }
}
