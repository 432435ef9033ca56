//! Radius-connected probabilistic roadmap with cached privacy annotations.
//!
//! Every edge stores how much of its arc length is violating. Changing the
//! cost profile only re-weights edges (O(E) arithmetic); the graph itself is
//! built once and reused across weights and queries.

mod io;
pub mod search;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::Config;
use crate::privacy::{classify_path, edge_partition, violation_fraction, CostProfile};
use crate::rng::rng_from_seed;
use crate::scene::Scene;
use crate::validity::ValidityChecker;

pub use io::{load_roadmap, read_roadmap, save_roadmap, write_roadmap, ROADMAP_FORMAT_VERSION};
pub use search::{shortest_path, Adjacency};

/// Rejected samples allowed per requested node before giving up.
pub const REJECTION_BUDGET_PER_NODE: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoadmapParams {
    pub samples: usize,
    pub connection_radius: f64,
    /// Motion-check spacing δ.
    pub resolution: f64,
    /// Privacy classification spacing δ_p.
    pub privacy_resolution: f64,
    pub seed: u64,
}

impl RoadmapParams {
    pub fn new(samples: usize, connection_radius: f64, seed: u64) -> Self {
        Self {
            samples,
            connection_radius,
            resolution: crate::validity::DEFAULT_RESOLUTION,
            privacy_resolution: crate::validity::DEFAULT_RESOLUTION,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.connection_radius <= 0.0 || self.connection_radius.is_nan() {
            return Err(Error::validation(
                "connection_radius",
                format!("must be positive, got {}", self.connection_radius),
            ));
        }
        for r in [self.resolution, self.privacy_resolution] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidResolution(r));
            }
        }
        Ok(())
    }
}

/// Undirected roadmap edge between nodes `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub base_length: f64,
    pub violating_length: f64,
    pub clean_length: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, base_length: f64, violating_length: f64) -> Self {
        Self {
            i,
            j,
            base_length,
            violating_length,
            clean_length: base_length - violating_length,
        }
    }
}

/// Weight of an edge under `profile`, from its cached partition.
pub fn edge_weight(edge: &Edge, profile: &CostProfile) -> f64 {
    profile.weigh(edge.violating_length, edge.clean_length)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Roadmap {
    params: RoadmapParams,
    dof: usize,
    nodes: Vec<Config>,
    edges: Vec<Edge>,
    // (neighbor, edge index)
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Roadmap {
    /// Assembles a roadmap from stored parts, checking the structural invariants.
    pub fn from_parts(params: RoadmapParams, dof: usize, nodes: Vec<Config>, edges: Vec<Edge>) -> Result<Self> {
        if let Some(k) = nodes.iter().position(|q| q.dim() != dof) {
            return Err(Error::validation(
                format!("nodes[{k}]"),
                format!("expected {dof} values, got {}", nodes[k].dim()),
            ));
        }
        let n = nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            let field = format!("edges[{k}]");
            if e.i >= n || e.j >= n {
                return Err(Error::validation(field, "node index out of range"));
            }
            if e.i == e.j {
                return Err(Error::validation(field, "self-loop"));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::validation(field, "duplicate edge"));
            }
            let ok = e.base_length.is_finite()
                && e.base_length >= 0.0
                && e.violating_length >= 0.0
                && e.violating_length <= e.base_length
                && (e.violating_length + e.clean_length - e.base_length).abs() <= 1e-9;
            if !ok {
                return Err(Error::validation(field, "inconsistent edge lengths"));
            }
            adjacency[e.i].push((e.j, k));
            adjacency[e.j].push((e.i, k));
        }
        Ok(Self {
            params,
            dof,
            nodes,
            edges,
            adjacency,
        })
    }

    pub fn params(&self) -> &RoadmapParams {
        &self.params
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn nodes(&self) -> &[Config] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(neighbor, edge index)` pairs of node `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    /// The roadmap re-weighted under `profile`, with `extra` empty node slots appended.
    pub fn weighted_adjacency(&self, profile: &CostProfile, extra: usize) -> Adjacency {
        let mut adj: Adjacency = self
            .adjacency
            .iter()
            .map(|nbrs| {
                nbrs.iter()
                    .map(|&(u, e)| (u, edge_weight(&self.edges[e], profile)))
                    .collect()
            })
            .collect();
        adj.resize_with(self.nodes.len() + extra, Vec::new);
        adj
    }

    /// Optimal node path between two roadmap nodes under `profile`.
    pub fn shortest_path(&self, source: usize, target: usize, profile: &CostProfile) -> Option<(Vec<usize>, f64)> {
        shortest_path(&self.weighted_adjacency(profile, 0), source, target)
    }
}

/// Samples `params.samples` valid configurations and connects every pair
/// within the connection radius whose straight motion is valid.
///
/// Candidates are validated in parallel but committed in sampling order, so
/// the result depends only on the seed.
pub fn build_roadmap(scene: &Scene, params: &RoadmapParams) -> Result<Roadmap> {
    params.validate()?;
    let checker = ValidityChecker::new(scene, params.resolution)?;
    let robot = &scene.robot;
    let n = params.samples;
    let mut rng = rng_from_seed(params.seed);
    let budget = REJECTION_BUDGET_PER_NODE * n.max(1);
    let mut nodes: Vec<Config> = Vec::with_capacity(n);
    let mut rejected = 0usize;
    const CHUNK: usize = 256;
    while nodes.len() < n {
        let batch: Vec<Config> = (0..CHUNK).map(|_| robot.sample_config(&mut rng)).collect();
        let verdicts: Vec<bool> = batch.par_iter().map(|q| checker.valid_unchecked(q)).collect();
        for (q, ok) in batch.into_iter().zip(verdicts) {
            if nodes.len() == n {
                break;
            }
            if ok {
                nodes.push(q);
            } else {
                rejected += 1;
                if rejected > budget {
                    return Err(Error::Infeasible(format!(
                        "{rejected} rejected samples while collecting {n} valid configurations"
                    )));
                }
            }
        }
    }

    let r = params.connection_radius;
    let candidates: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let nodes = &nodes;
            (i + 1..n)
                .filter(move |&j| robot.distance_unchecked(&nodes[i], &nodes[j]) <= r)
                .map(move |j| (i, j))
        })
        .collect();

    let edges: Vec<Edge> = candidates
        .par_iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (&nodes[i], &nodes[j]);
            if !checker.motion_valid_unchecked(a, b, false) {
                return None;
            }
            let (violating, base) = edge_partition(scene, a, b, params.privacy_resolution);
            Some(Edge::new(i, j, base, violating))
        })
        .collect();

    Roadmap::from_parts(*params, robot.dof(), nodes, edges)
}

/// A connection from a query endpoint to a roadmap node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub node: usize,
    pub base_length: f64,
    pub violating_length: f64,
}

impl Link {
    fn weight(&self, profile: &CostProfile) -> f64 {
        profile.weigh(self.violating_length, self.base_length - self.violating_length)
    }
}

/// Start and goal inserted into a roadmap as nodes `n` and `n + 1`.
#[derive(Clone, Debug)]
pub struct QueryGraph {
    pub start: Config,
    pub goal: Config,
    pub start_links: Vec<Link>,
    pub goal_links: Vec<Link>,
    /// Direct start–goal motion, when within radius and valid.
    pub direct: Option<Link>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSolution {
    pub waypoints: Vec<Config>,
    /// Node indices in the query graph (`n` = start, `n + 1` = goal).
    pub node_path: Vec<usize>,
    pub cost: f64,
    pub length: f64,
    pub violation_fraction: f64,
    pub profile: CostProfile,
}

fn links_to_roadmap(scene: &Scene, roadmap: &Roadmap, checker: &ValidityChecker<'_>, q: &Config) -> Vec<Link> {
    let robot = &scene.robot;
    let r = roadmap.params.connection_radius;
    let dp = roadmap.params.privacy_resolution;
    roadmap
        .nodes
        .par_iter()
        .enumerate()
        .filter_map(|(k, node)| {
            if robot.distance_unchecked(q, node) > r || !checker.motion_valid_unchecked(q, node, false) {
                return None;
            }
            let (violating, base) = edge_partition(scene, q, node, dp);
            Some(Link {
                node: k,
                base_length: base,
                violating_length: violating,
            })
        })
        .collect()
}

/// Validates the endpoints and connects them to the roadmap.
pub fn connect_query(scene: &Scene, roadmap: &Roadmap, start: &Config, goal: &Config) -> Result<QueryGraph> {
    let robot = &scene.robot;
    robot.check_dim(start)?;
    robot.check_dim(goal)?;
    let checker = ValidityChecker::new(scene, roadmap.params.resolution)?;
    for (name, q) in [("start", start), ("goal", goal)] {
        if !checker.valid_unchecked(q) {
            return Err(Error::validation(
                name,
                "configuration is outside joint limits or in collision",
            ));
        }
    }
    let start_links = links_to_roadmap(scene, roadmap, &checker, start);
    let goal_links = links_to_roadmap(scene, roadmap, &checker, goal);
    let direct = (start != goal
        && robot.distance_unchecked(start, goal) <= roadmap.params.connection_radius
        && checker.motion_valid_unchecked(start, goal, false))
    .then(|| {
        let (violating, base) = edge_partition(scene, start, goal, roadmap.params.privacy_resolution);
        Link {
            node: roadmap.len() + 1,
            base_length: base,
            violating_length: violating,
        }
    });
    Ok(QueryGraph {
        start: start.clone(),
        goal: goal.clone(),
        start_links,
        goal_links,
        direct,
    })
}

/// Cost-optimal path through a connected query graph under `profile`.
pub fn solve(scene: &Scene, roadmap: &Roadmap, graph: &QueryGraph, profile: &CostProfile) -> Result<PathSolution> {
    let n = roadmap.len();
    let (s, g) = (n, n + 1);
    if graph.start == graph.goal {
        return Ok(PathSolution {
            waypoints: vec![graph.start.clone(), graph.goal.clone()],
            node_path: vec![s, g],
            cost: 0.0,
            length: 0.0,
            violation_fraction: 0.0,
            profile: *profile,
        });
    }
    let mut adj = roadmap.weighted_adjacency(profile, 2);
    for (end, links) in [(s, &graph.start_links), (g, &graph.goal_links)] {
        for l in links.iter() {
            let w = l.weight(profile);
            adj[end].push((l.node, w));
            adj[l.node].push((end, w));
        }
    }
    if let Some(d) = &graph.direct {
        let w = d.weight(profile);
        adj[s].push((g, w));
        adj[g].push((s, w));
    }
    let (node_path, cost) = shortest_path(&adj, s, g).ok_or(Error::NoPath)?;
    let waypoints: Vec<Config> = node_path
        .iter()
        .map(|&k| match k {
            k if k == s => graph.start.clone(),
            k if k == g => graph.goal.clone(),
            k => roadmap.nodes[k].clone(),
        })
        .collect();
    let classification = classify_path(scene, &waypoints, roadmap.params.privacy_resolution)?;
    Ok(PathSolution {
        length: classification.total_length(),
        violation_fraction: violation_fraction(&classification),
        waypoints,
        node_path,
        cost,
        profile: *profile,
    })
}

/// Connects `start` and `goal` to the roadmap and returns the optimal path.
pub fn query(
    scene: &Scene,
    roadmap: &Roadmap,
    start: &Config,
    goal: &Config,
    profile: &CostProfile,
) -> Result<PathSolution> {
    let graph = connect_query(scene, roadmap, start, goal)?;
    solve(scene, roadmap, &graph, profile)
}
