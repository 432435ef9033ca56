//! Uniform-cost search over a nonnegatively weighted undirected graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Adjacency list: `adj[v]` holds `(neighbor, weight)` pairs.
pub type Adjacency = Vec<Vec<(usize, f64)>>;

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cost-to-go to `target` from every node, plus the settling predecessor.
fn cost_to_go(adj: &Adjacency, target: usize) -> (Vec<f64>, Vec<usize>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut next = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[target] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        node: target,
    });
    while let Some(Entry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(u, w) in &adj[node] {
            let c = w + cost;
            if c < dist[u] {
                dist[u] = c;
                next[u] = node;
                heap.push(Entry { cost: c, node: u });
            }
        }
    }
    (dist, next)
}

/// Minimum-cost path from `source` to `target`.
///
/// Ties between equal-cost paths resolve to the lexicographically smallest
/// node-index sequence: after computing exact cost-to-go values, the path is
/// walked forward taking the smallest-index neighbor that stays optimal.
/// Equality is exact floating-point equality of `w(v,u) + d(u)` and `d(v)`.
///
/// The returned cost is the search's own cost-to-go at `source`, so adding
/// edges to a graph can never make it larger.
pub fn shortest_path(adj: &Adjacency, source: usize, target: usize) -> Option<(Vec<usize>, f64)> {
    let (dist, next) = cost_to_go(adj, target);
    if !dist[source].is_finite() {
        return None;
    }
    let mut path = vec![source];
    let mut v = source;
    while v != target {
        let dv = dist[v];
        let step = adj[v]
            .iter()
            .filter(|&&(u, w)| dist[u] < dv && w + dist[u] == dv)
            .min_by_key(|&&(u, _)| u)
            .copied()
            .or_else(|| adj[v].iter().find(|&&(u, _)| u == next[v]).copied())?;
        v = step.0;
        path.push(v);
        if path.len() > adj.len() {
            return None;
        }
    }
    Some((path, dist[source]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> Adjacency {
        let mut adj = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        adj
    }

    #[test]
    fn picks_cheaper_route() {
        let g = graph(4, &[(0, 1, 1.0), (1, 3, 1.0), (0, 2, 0.5), (2, 3, 0.6)]);
        let (p, c) = shortest_path(&g, 0, 3).unwrap();
        assert_eq!(p, vec![0, 2, 3]);
        assert!((c - 1.1).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_smaller_indices() {
        let g = graph(4, &[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(shortest_path(&g, 0, 3).unwrap().0, vec![0, 1, 3]);
    }

    #[test]
    fn disconnected_is_none() {
        let g = graph(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert!(shortest_path(&g, 0, 3).is_none());
        assert_eq!(shortest_path(&g, 2, 2).unwrap(), (vec![2], 0.0));
    }
}
