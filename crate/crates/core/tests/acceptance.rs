//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use privplan::experiment::{
    run_experiment_on, sample_query, summarize, write_records, ExperimentOutcome, ExperimentSpec,
};
use privplan::planner::RoadmapParams;
use privplan::rng::{derive_seed, rng_from_seed, PlannerRng};
use privplan::scene::{bundle_to_json, load_bundle};
use privplan::{
    build_roadmap, builtin_scenario, cone_sphere_intersect, connect_query, load_roadmap, load_scene, privacy_cost,
    save_roadmap, scene_to_json, solve, BuiltinScenario, Cone, Config, CostProfile, Edge, Error, Roadmap,
    SegmentClassification, Subsegment, Vec3,
};
use rand::Rng;

const MASTER_SEED: u64 = 7;
const SWEEP: [f64; 5] = [10.0, 2.0, 1.0, -2.0, -10.0];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Duration, limit_s: f64) -> bool {
    t.as_secs_f64() < limit_s
}

// Cost oracle written from the profile definition, independent of CostProfile.
fn oracle_factors(w: f64) -> (f64, f64) {
    if w.abs() == 1.0 {
        (1.0, 1.0)
    } else if w > 1.0 {
        (w, 1.0 / w)
    } else {
        (-1.0 / w, -w)
    }
}

fn random_classification(rng: &mut PlannerRng) -> SegmentClassification {
    let m = rng.random_range(1..=20);
    SegmentClassification {
        segments: (0..m)
            .map(|_| Subsegment {
                length: rng.random_range(0.0..2.0),
                violating: rng.random_bool(0.5),
            })
            .collect(),
    }
}

fn criterion_1() -> Verdict {
    let clock = Instant::now();
    let mut rng = rng_from_seed(101);
    let agnostic = CostProfile::new(1.0).unwrap();
    let preserving = CostProfile::new(2.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let c = random_classification(&mut rng);
        let total: f64 = c.segments.iter().map(|s| s.length).fold(0.0, |a, b| a + b);
        worst = worst.max((privacy_cost(&c, &agnostic) - total).abs());

        let mut all_v = c.clone();
        all_v.segments.iter_mut().for_each(|s| s.violating = true);
        worst = worst.max((privacy_cost(&all_v, &preserving) - 2.0 * total).abs());

        let mut all_c = c;
        all_c.segments.iter_mut().for_each(|s| s.violating = false);
        worst = worst.max((privacy_cost(&all_c, &preserving) - total / 2.0).abs());
    }
    let mixed = SegmentClassification {
        segments: vec![
            Subsegment {
                length: 2.0,
                violating: true,
            },
            Subsegment {
                length: 2.0,
                violating: false,
            },
        ],
    };
    let mixed_cost = privacy_cost(&mixed, &CostProfile::new(-5.0).unwrap());
    let t = clock.elapsed();
    let pass = worst <= 1e-9 && (mixed_cost - 10.4).abs() <= 1e-9 && within(t, 1.0);
    verdict(
        pass,
        format!(
            "max identity error {worst:.3e}, mixed(2,2)@w=-5 = {mixed_cost}, {:.3} s",
            t.as_secs_f64()
        ),
    )
}

fn simple_path_min(
    adj: &[Vec<(usize, f64, f64)>],
    v: usize,
    target: usize,
    w: f64,
    seen: &mut Vec<bool>,
) -> Option<f64> {
    if v == target {
        return Some(0.0);
    }
    seen[v] = true;
    let (fv, fc) = oracle_factors(w);
    let mut best: Option<f64> = None;
    for &(u, base, violating) in &adj[v] {
        if seen[u] {
            continue;
        }
        if let Some(rest) = simple_path_min(adj, u, target, w, seen) {
            let c = fv * violating + fc * (base - violating) + rest;
            best = Some(best.map_or(c, |b: f64| b.min(c)));
        }
    }
    seen[v] = false;
    best
}

fn criterion_2() -> Verdict {
    let clock = Instant::now();
    let mut rng = rng_from_seed(202);
    let weights = [1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0];
    let (mut checks, mut mismatches, mut unreachable) = (0, 0, 0);
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let p = rng.random_range(0.2..0.7);
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if !rng.random_bool(p) {
                    continue;
                }
                let base: f64 = rng.random_range(0.1..3.0);
                let violating = match rng.random_range(0..3) {
                    0 => 0.0,
                    1 => base,
                    _ => base * rng.random_range(0.0..1.0),
                };
                edges.push(Edge::new(i, j, base, violating));
                adj[i].push((j, base, violating));
                adj[j].push((i, base, violating));
            }
        }
        let nodes = (0..n).map(|k| Config(vec![k as f64])).collect();
        let roadmap = Roadmap::from_parts(RoadmapParams::new(n, 1.0, 0), 1, nodes, edges).unwrap();
        let (s, g) = (rng.random_range(0..n), rng.random_range(0..n));
        for &w in &weights {
            checks += 1;
            let got = roadmap
                .shortest_path(s, g, &CostProfile::new(w).unwrap())
                .map(|(_, c)| c);
            let want = simple_path_min(&adj, s, g, w, &mut vec![false; n]);
            let ok = match (got, want) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * (1.0 + b),
                (None, None) => {
                    unreachable += 1;
                    true
                }
                _ => false,
            };
            if !ok {
                mismatches += 1;
            }
        }
    }
    let t = clock.elapsed();
    verdict(
        mismatches == 0 && within(t, 30.0),
        format!(
            "{checks} (graph, weight) queries, {mismatches} mismatches, {unreachable} unreachable agreed, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

/// Solid-cone membership, written from the definition.
fn in_cone(apex: &Vec3, axis: &Vec3, tan_a: f64, range: f64, x: &Vec3) -> bool {
    let d = x - apex;
    let h = d.dot(axis);
    h >= 0.0 && h <= range && (d - axis * h).norm() <= h * tan_a
}

/// Approximate distance from `c` to the cone using only membership tests:
/// a uniform pass over the cone, then shrinking boxes around the best point.
/// Uses 10⁶ candidate points in total.
fn mc_cone_distance(cone: &Cone, c: &Vec3, rng: &mut PlannerRng) -> f64 {
    let (apex, axis, range) = (cone.apex(), cone.axis(), cone.range());
    let tan_a = cone.half_angle().tan();
    if in_cone(&apex, &axis, tan_a, range, c) {
        return 0.0;
    }
    let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = axis.cross(&helper).normalize();
    let v = axis.cross(&u);
    let mut best = apex;
    let mut best_d = (apex - c).norm();
    const COARSE: usize = 200_000;
    for _ in 0..COARSE {
        let h = range * rng.random::<f64>().cbrt();
        let rho = h * tan_a * rng.random::<f64>().sqrt();
        let th = std::f64::consts::TAU * rng.random::<f64>();
        let x = apex + axis * h + (u * th.cos() + v * th.sin()) * rho;
        let d = (x - c).norm();
        if d < best_d {
            best = x;
            best_d = d;
        }
    }
    let volume = std::f64::consts::PI * (range * tan_a).powi(2) * range / 3.0;
    let mut s = 4.0 * (volume / COARSE as f64).cbrt();
    for _ in 0..8 {
        let centre = best;
        for _ in 0..100_000 {
            let x = centre
                + Vec3::new(
                    rng.random_range(-s..=s),
                    rng.random_range(-s..=s),
                    rng.random_range(-s..=s),
                );
            if !in_cone(&apex, &axis, tan_a, range, &x) {
                continue;
            }
            let d = (x - c).norm();
            if d < best_d {
                best = x;
                best_d = d;
            }
        }
        s *= 0.5;
    }
    best_d
}

fn criterion_3() -> Verdict {
    let clock = Instant::now();
    let mut rng = rng_from_seed(303);
    let (mut checked, mut skipped, mut hits, mut disagreements) = (0, 0, 0, 0);
    for _ in 0..1000 {
        let axis = loop {
            let a = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = a.norm();
            if n > 0.1 && n <= 1.0 {
                break a / n;
            }
        };
        let apex = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let half_angle = rng.random_range(5f64..60.0).to_radians();
        let range = rng.random_range(0.5..3.0);
        let cone = Cone::new(apex, axis, half_angle, range).unwrap();
        let along = range * rng.random_range(-0.3..1.4);
        let side = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let side = side - axis * side.dot(&axis);
        let spread = (along.abs() * half_angle.tan()).max(0.2) * rng.random_range(0.0..2.0);
        let centre = apex + axis * along + side.normalize() * spread;
        let radius = rng.random_range(0.05..0.8);

        let d = mc_cone_distance(&cone, &centre, &mut rng);
        if (d - radius).abs() <= 1e-3 {
            skipped += 1;
            continue;
        }
        checked += 1;
        let oracle = d <= radius;
        hits += oracle as usize;
        if cone_sphere_intersect(&cone, &centre, radius) != oracle {
            disagreements += 1;
        }
    }
    let t = clock.elapsed();
    verdict(
        disagreements == 0 && within(t, 120.0),
        format!(
            "{checked} pairs checked ({hits} intersecting), {skipped} within 1e-3 of grazing skipped, {disagreements} disagreements, {:.1} s",
            t.as_secs_f64()
        ),
    )
}

struct Sweep {
    scenario: BuiltinScenario,
    outcome: ExperimentOutcome,
    viol: BTreeMap<i64, f64>,
    len: BTreeMap<i64, f64>,
    success: BTreeMap<i64, f64>,
    elapsed: Duration,
}

fn key(w: f64) -> i64 {
    (w * 1000.0).round() as i64
}

fn sweep(which: BuiltinScenario) -> Result<Sweep, Error> {
    let bundle = builtin_scenario(which);
    let spec = ExperimentSpec::from_bundle(&bundle, MASTER_SEED);
    let clock = Instant::now();
    let outcome = run_experiment_on(&bundle.scene, &bundle.query_sampler, &spec, None)?;
    let elapsed = clock.elapsed();
    let mut s = Sweep {
        scenario: which,
        outcome,
        viol: BTreeMap::new(),
        len: BTreeMap::new(),
        success: BTreeMap::new(),
        elapsed,
    };
    for row in summarize(&s.outcome.records)? {
        s.success.insert(key(row.weight), row.success_rate);
        if let (Some(v), Some(l)) = (row.violation_fraction, row.path_length) {
            s.viol.insert(key(row.weight), v.mean);
            s.len.insert(key(row.weight), l.mean);
        }
    }
    Ok(s)
}

fn criterion_4(sweeps: &[Sweep]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let means: Option<Vec<f64>> = SWEEP.iter().map(|&w| s.viol.get(&key(w)).copied()).collect();
        let Some(m) = means else {
            pass = false;
            parts.push(format!("{}: missing weight means", s.scenario.name()));
            continue;
        };
        let monotone = m.windows(2).all(|p| p[0] <= p[1]);
        let doubled = m[3] >= 2.0 * m[2];
        let fast = within(s.elapsed, 300.0);
        pass &= monotone && doubled && fast;
        parts.push(format!(
            "{}: [+10,+2,1,-2,-10] = [{}] monotone={monotone} -2/1 = {:.2} agnostic success {:.0}% {:.1} s",
            s.scenario.name(),
            m.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", "),
            m[3] / m[2],
            100.0 * s.success.get(&key(1.0)).copied().unwrap_or(0.0),
            s.elapsed.as_secs_f64()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_5(sweeps: &[Sweep]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let m = s.viol.get(&key(10.0)).copied();
        pass &= m.is_some_and(|m| m < 0.05);
        parts.push(format!(
            "{}: mean(+10) = {}",
            s.scenario.name(),
            m.map_or("n/a".into(), |m| format!("{:.4} ({:.2}%)", m, 100.0 * m))
        ));
    }
    verdict(
        pass,
        format!("{} (threshold 0.05; reference value 0.25%)", parts.join("; ")),
    )
}

fn criterion_6(sweeps: &[Sweep]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let (l1, l2, l10) = (s.len.get(&key(1.0)), s.len.get(&key(-2.0)), s.len.get(&key(-10.0)));
        match (l1, l2, l10) {
            (Some(&l1), Some(&l2), Some(&l10)) => {
                pass &= l10 >= l1;
                parts.push(format!(
                    "{}: L(1) = {l1:.3}, L(-10) = {l10:.3}, L(-2)/L(1) = {:.3}",
                    s.scenario.name(),
                    l2 / l1
                ));
            }
            _ => {
                pass = false;
                parts.push(format!("{}: missing length means", s.scenario.name()));
            }
        }
    }
    verdict(pass, format!("{} (reference: L(-2)/L(1) below 1.4)", parts.join("; ")))
}

fn criterion_7() -> Result<Verdict, Error> {
    let clock = Instant::now();
    let bundle = builtin_scenario(BuiltinScenario::Manip3);
    let scene = &bundle.scene;
    let d = &bundle.defaults;
    let params = |n| RoadmapParams {
        samples: n,
        connection_radius: d.conn_radius,
        resolution: d.resolution,
        privacy_resolution: d.privacy_resolution,
        seed: MASTER_SEED,
    };
    let small = build_roadmap(scene, &params(500))?;
    let large = build_roadmap(scene, &params(1000))?;
    let prefix = small.nodes() == &large.nodes()[..500];
    let profile = CostProfile::agnostic();
    let (mut both, mut improved, mut increased) = (0, 0, 0);
    for i in 0..50 {
        let (start, goal) = sample_query(scene, &bundle.query_sampler, d.resolution, derive_seed(MASTER_SEED, i))?;
        let a = solve(scene, &small, &connect_query(scene, &small, &start, &goal)?, &profile);
        let b = solve(scene, &large, &connect_query(scene, &large, &start, &goal)?, &profile);
        if let (Ok(a), Ok(b)) = (a, b) {
            both += 1;
            if b.cost > a.cost {
                increased += 1;
            } else if b.cost < a.cost {
                improved += 1;
            }
        }
    }
    let t = clock.elapsed();
    Ok(verdict(
        prefix && increased == 0 && within(t, 120.0),
        format!(
            "n=500 nodes are a prefix of n=1000: {prefix}; {both}/50 pairs solved by both, {improved} cheaper, {increased} costlier, {:.1} s",
            t.as_secs_f64()
        ),
    ))
}

fn criterion_8() -> Result<Verdict, Error> {
    let clock = Instant::now();
    let bundle = builtin_scenario(BuiltinScenario::Manip3);
    let spec = ExperimentSpec::from_bundle(&bundle, MASTER_SEED);
    let csv_with = |threads: usize| -> Result<Vec<u8>, Error> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let outcome = pool.install(|| run_experiment_on(&bundle.scene, &bundle.query_sampler, &spec, None))?;
        let mut buf = Vec::new();
        write_records(&outcome.records, &mut buf)?;
        Ok(buf)
    };
    let one = csv_with(1)?;
    let four = csv_with(4)?;
    let t = clock.elapsed();
    Ok(verdict(
        one == four && within(t, 600.0),
        format!(
            "manip_3, {} runs: 1 thread vs 4 threads CSV byte-identical: {} ({} bytes), {:.1} s",
            spec.runs,
            one == four,
            one.len(),
            t.as_secs_f64()
        ),
    ))
}

fn criterion_9(sweeps: &[Sweep]) -> Result<Verdict, Error> {
    let dir = tempfile::tempdir().map_err(|e| Error::io("<tempdir>", e))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let bundle = builtin_scenario(s.scenario);
        let scene_ok = load_scene(&scene_to_json(&bundle.scene))? == bundle.scene;
        let bundle_ok = load_bundle(&bundle_to_json(&bundle))? == bundle;
        let path = dir.path().join(format!("{}.roadmap", s.scenario.name()));
        save_roadmap(&s.outcome.roadmap, &path)?;
        let roadmap_ok = load_roadmap(&path)? == s.outcome.roadmap;
        pass &= scene_ok && bundle_ok && roadmap_ok;
        parts.push(format!(
            "{}: scene {scene_ok}, scene+defaults {bundle_ok}, roadmap ({} nodes, {} edges) {roadmap_ok}",
            s.scenario.name(),
            s.outcome.roadmap.len(),
            s.outcome.roadmap.edges().len()
        ));
    }
    Ok(verdict(pass, parts.join("; ")))
}

fn report(results: &mut Vec<bool>, id: u32, name: &str, v: Result<Verdict, Error>) {
    let v = v.unwrap_or_else(|e| verdict(false, format!("error: {e}")));
    println!("{} [{id}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    results.push(v.pass);
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--list`; nothing to list here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut results = Vec::new();
    report(&mut results, 1, "cost-function identities", Ok(criterion_1()));
    report(&mut results, 2, "search vs simple-path enumeration", Ok(criterion_2()));
    report(
        &mut results,
        3,
        "cone/sphere vs Monte Carlo membership",
        Ok(criterion_3()),
    );

    let sweeps: Result<Vec<Sweep>, Error> = BuiltinScenario::ALL.into_iter().map(sweep).collect();
    match &sweeps {
        Ok(sweeps) => {
            report(&mut results, 4, "weight-sweep ordering", Ok(criterion_4(sweeps)));
            report(&mut results, 5, "preserving suppression", Ok(criterion_5(sweeps)));
            report(&mut results, 6, "violating length trade-off", Ok(criterion_6(sweeps)));
        }
        Err(e) => {
            for (id, name) in [
                (4, "weight-sweep ordering"),
                (5, "preserving suppression"),
                (6, "violating length trade-off"),
            ] {
                report(&mut results, id, name, Err(Error::Infeasible(e.to_string())));
            }
        }
    }
    report(&mut results, 7, "nested-roadmap monotonicity", criterion_7());
    report(&mut results, 8, "thread-count determinism", criterion_8());
    match &sweeps {
        Ok(sweeps) => report(&mut results, 9, "scene and roadmap round trips", criterion_9(sweeps)),
        Err(e) => report(
            &mut results,
            9,
            "scene and roadmap round trips",
            Err(Error::Infeasible(e.to_string())),
        ),
    }

    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
