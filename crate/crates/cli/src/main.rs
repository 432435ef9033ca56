//! `privplan`: build roadmaps, plan single queries, run weight sweeps and
//! export camera traces.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (no path, infeasible
//! or malformed scene), 3 I/O error. Diagnostics go to standard error; data
//! goes to `--out` or standard output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use privplan::experiment::{
    export_trace, run_experiment_on, sample_query, summarize, write_records, ExperimentSpec, WeightSummary,
};
use privplan::scene::{bundle_to_json, load_scene_file};
use privplan::{
    build_roadmap, builtin_scenario, load_roadmap, query, save_roadmap, BuiltinScenario, Config, CostProfile, Error,
    PathSolution, Roadmap, RoadmapParams, ScenarioBundle,
};

#[derive(Parser, Debug)]
#[command(
    name = "privplan",
    version,
    about = "Privacy-aware motion planning and weight-sweep benchmarks"
)]
struct Cli {
    /// Worker threads (default: all cores). Never changes output content.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a roadmap and save it to a file.
    BuildRoadmap {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        roadmap: RoadmapArgs,
        /// Master seed for roadmap sampling.
        #[arg(long)]
        seed: u64,
        /// Output roadmap file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Solve one start/goal query under one privacy weight.
    Plan {
        #[command(flatten)]
        query: QueryArgs,
        /// Where to write the solution JSON (default: standard output).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run a seeded weight sweep and write one CSV row per (run, weight).
    Bench {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        roadmap: RoadmapArgs,
        /// Number of runs (default: the scenario's default).
        #[arg(long)]
        runs: Option<usize>,
        /// Comma-separated signed weights, each with |w| ≥ 1; must include 1.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true, value_parser = parse_weights)]
        weights: Option<WeightList>,
        /// Master seed; required so every sweep is reproducible.
        #[arg(long)]
        seed: u64,
        /// Record wall-clock solve times in the solve_ms column (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
        /// Output CSV (default: standard output).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Solve one query and write the camera trace along the path as CSV.
    ExportTrace {
        #[command(flatten)]
        query: QueryArgs,
        /// Trace sample spacing in C-space (default: the privacy resolution).
        #[arg(long, value_name = "DELTA")]
        trace_resolution: Option<f64>,
        /// Output CSV (default: standard output).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Load and validate a scene, and check that it admits a valid configuration.
    ValidateScene {
        #[command(flatten)]
        scene: SceneArgs,
        /// Seed for the feasibility sampling check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the scene back out in canonical form.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SceneArgs {
    /// Bundled scenario: manip_1, manip_3 or nav_9.
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
    /// Scene file (JSON).
    #[arg(long, value_name = "PATH")]
    scene: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RoadmapArgs {
    /// Number of roadmap samples.
    #[arg(long, value_name = "N")]
    roadmap_n: Option<usize>,
    /// Connection radius in C-space units.
    #[arg(long, value_name = "R")]
    conn_radius: Option<f64>,
    /// Collision-check spacing along motions.
    #[arg(long, value_name = "DELTA")]
    resolution: Option<f64>,
    /// Privacy classification spacing along motions.
    #[arg(long, value_name = "DELTA")]
    privacy_resolution: Option<f64>,
    /// Roadmap file: loaded when it exists, otherwise built and saved there.
    #[arg(long, value_name = "PATH")]
    roadmap_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    roadmap: RoadmapArgs,
    /// Privacy weight, |w| ≥ 1.
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = parse_weight)]
    weight: f64,
    /// Seed for roadmap sampling and for any start/goal not given explicitly.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start configuration as comma-separated values (default: sampled).
    #[arg(long, value_name = "CSV", allow_hyphen_values = true, value_parser = parse_config)]
    start: Option<Config>,
    /// Goal configuration as comma-separated values (default: sampled).
    #[arg(long, value_name = "CSV", allow_hyphen_values = true, value_parser = parse_config)]
    goal: Option<Config>,
}

#[derive(Clone, Debug)]
struct WeightList(Vec<f64>);

fn parse_weight(s: &str) -> Result<f64, String> {
    let w: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    CostProfile::new(w).map_err(|e| e.to_string())?;
    Ok(w)
}

fn parse_weights(s: &str) -> Result<WeightList, String> {
    let w = s.split(',').map(parse_weight).collect::<Result<Vec<_>, _>>()?;
    if w.is_empty() {
        return Err("empty weight list".into());
    }
    Ok(WeightList(w))
}

fn parse_config(s: &str) -> Result<Config, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("not a number: {v:?}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Config)
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => 3,
            Error::InvalidWeight(_)
            | Error::InvalidExperiment(_)
            | Error::UnknownScenario(_)
            | Error::InvalidResolution(_)
            | Error::ConfigDimension { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Error::io(path, e).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.threads {
        Some(0) => Err(usage("--threads must be ≥ 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(cli.command)),
            Err(e) => Err(usage(format!("cannot start thread pool: {e}"))),
        },
        None => run(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::BuildRoadmap {
            scene,
            roadmap,
            seed,
            out,
        } => {
            let bundle = load(&scene)?;
            let params = roadmap_params(&bundle, &roadmap, seed);
            let r = build_roadmap(&bundle.scene, &params)?;
            save_roadmap(&r, &out)?;
            eprintln!(
                "roadmap: {} nodes, {} edges -> {}",
                r.len(),
                r.edges().len(),
                out.display()
            );
            Ok(())
        }
        Command::Plan { query: q, out } => {
            let (_, solution) = plan(&q)?;
            let json = solution_json(&solution);
            write_output(out.as_deref(), |w| writeln!(w, "{json}"))
        }
        Command::ExportTrace {
            query: q,
            trace_resolution,
            out,
        } => {
            let (bundle, solution) = plan(&q)?;
            let delta =
                trace_resolution.unwrap_or_else(|| roadmap_params(&bundle, &q.roadmap, q.seed).privacy_resolution);
            let mut buf = Vec::new();
            export_trace(&bundle.scene, &solution, delta, &mut buf)?;
            write_output(out.as_deref(), |w| w.write_all(&buf))
        }
        Command::Bench {
            scene,
            roadmap,
            runs,
            weights,
            seed,
            timing,
            out,
        } => {
            let bundle = load(&scene)?;
            let mut spec = ExperimentSpec::from_bundle(&bundle, seed);
            let params = roadmap_params(&bundle, &roadmap, seed);
            spec.roadmap_n = params.samples;
            spec.conn_radius = params.connection_radius;
            spec.resolution = params.resolution;
            spec.privacy_resolution = params.privacy_resolution;
            spec.record_timing = timing;
            if let Some(n) = runs {
                spec.runs = n;
            }
            if let Some(WeightList(w)) = weights {
                spec.weights = w;
            }
            spec.validate().map_err(|e| usage(e.to_string()))?;
            let existing = obtain_roadmap(&bundle, &roadmap, &params, false)?;
            let outcome = run_experiment_on(&bundle.scene, &bundle.query_sampler, &spec, existing)?;
            if roadmap.roadmap_file.as_ref().is_some_and(|p| !p.exists()) {
                let path = roadmap.roadmap_file.as_ref().expect("checked above");
                save_roadmap(&outcome.roadmap, path)?;
            }
            let mut buf = Vec::new();
            write_records(&outcome.records, &mut buf)?;
            write_output(out.as_deref(), |w| w.write_all(&buf))?;
            report_summary(&summarize(&outcome.records)?);
            Ok(())
        }
        Command::ValidateScene { scene, seed, out } => {
            let bundle = load(&scene)?;
            let s = &bundle.scene;
            sample_query(s, &bundle.query_sampler, bundle.defaults.resolution, seed)?;
            if let Some(path) = out {
                std::fs::write(&path, bundle_to_json(&bundle)).map_err(|e| io_failure(&path, e))?;
            }
            println!(
                "ok: {} (dof {}, {} obstacles, {} privacy regions)",
                s.name,
                s.robot.dof(),
                s.obstacles.len(),
                s.privacy_regions.len()
            );
            Ok(())
        }
    }
}

fn load(args: &SceneArgs) -> Result<ScenarioBundle, Failure> {
    match (&args.scenario, &args.scene) {
        (Some(name), None) => {
            let which: BuiltinScenario = name.parse().map_err(|e: Error| usage(e.to_string()))?;
            Ok(builtin_scenario(which))
        }
        (None, Some(path)) => Ok(load_scene_file(path)?),
        _ => Err(usage("give exactly one of --scenario or --scene")),
    }
}

fn roadmap_params(bundle: &ScenarioBundle, args: &RoadmapArgs, seed: u64) -> RoadmapParams {
    let d = &bundle.defaults;
    RoadmapParams {
        samples: args.roadmap_n.unwrap_or(d.roadmap_n),
        connection_radius: args.conn_radius.unwrap_or(d.conn_radius),
        resolution: args.resolution.unwrap_or(d.resolution),
        privacy_resolution: args.privacy_resolution.unwrap_or(d.privacy_resolution),
        seed,
    }
}

/// Loads `--roadmap-file` when it exists; builds (and saves, if asked) when
/// `build` is set; otherwise leaves building to the caller.
fn obtain_roadmap(
    bundle: &ScenarioBundle,
    args: &RoadmapArgs,
    params: &RoadmapParams,
    build: bool,
) -> Result<Option<Roadmap>, Failure> {
    if let Some(path) = args.roadmap_file.as_ref().filter(|p| p.exists()) {
        let r = load_roadmap(path)?;
        if r.dof() != bundle.scene.robot.dof() {
            return Err(Error::ConfigDimension {
                expected: bundle.scene.robot.dof(),
                got: r.dof(),
            }
            .into());
        }
        return Ok(Some(r));
    }
    if !build {
        return Ok(None);
    }
    let r = build_roadmap(&bundle.scene, params)?;
    if let Some(path) = &args.roadmap_file {
        save_roadmap(&r, path)?;
    }
    Ok(Some(r))
}

fn plan(q: &QueryArgs) -> Result<(ScenarioBundle, PathSolution), Failure> {
    let bundle = load(&q.scene)?;
    let params = roadmap_params(&bundle, &q.roadmap, q.seed);
    let scene = &bundle.scene;
    let (start, goal) = match (&q.start, &q.goal) {
        (Some(s), Some(g)) => (s.clone(), g.clone()),
        (s, g) => {
            let (ss, gg) = sample_query(scene, &bundle.query_sampler, params.resolution, q.seed)?;
            (s.clone().unwrap_or(ss), g.clone().unwrap_or(gg))
        }
    };
    for (name, c) in [("--start", &start), ("--goal", &goal)] {
        if c.dim() != scene.robot.dof() {
            return Err(usage(format!(
                "{name} has {} values, robot has {} DOF",
                c.dim(),
                scene.robot.dof()
            )));
        }
    }
    // Trivial queries need no roadmap.
    if start == goal {
        let empty = Roadmap::from_parts(
            RoadmapParams { samples: 0, ..params },
            scene.robot.dof(),
            Vec::new(),
            Vec::new(),
        )?;
        let profile = CostProfile::new(q.weight)?;
        let solution = query(scene, &empty, &start, &goal, &profile)?;
        return Ok((bundle, solution));
    }
    let roadmap = obtain_roadmap(&bundle, &q.roadmap, &params, true)?.expect("built on demand");
    let profile = CostProfile::new(q.weight)?;
    let solution = query(&bundle.scene, &roadmap, &start, &goal, &profile)?;
    Ok((bundle, solution))
}

fn solution_json(s: &PathSolution) -> String {
    let list = |q: &Config| q.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
    let waypoints = s
        .waypoints
        .iter()
        .map(|q| format!("[{}]", list(q)))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{{\"weight\":{:?},\"cost\":{:?},\"length\":{:?},\"violation_fraction\":{:?},\"waypoints\":[{}]}}",
        s.profile.weight(),
        s.cost,
        s.length,
        s.violation_fraction,
        waypoints
    )
}

fn write_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_failure(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(p, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
                .and_then(|_| lock.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn report_summary(rows: &[WeightSummary]) {
    eprintln!(
        "{:>7} {:>8} {:>10} {:>10} {:>10}",
        "weight", "success", "viol_mean", "viol_med", "len_mean"
    );
    for r in rows {
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        eprintln!(
            "{:>7} {:>8.2} {:>10} {:>10} {:>10}",
            r.weight,
            r.success_rate,
            f(r.violation_fraction.map(|s| s.mean)),
            f(r.violation_fraction.map(|s| s.median)),
            f(r.path_length.map(|s| s.mean)),
        );
    }
}
