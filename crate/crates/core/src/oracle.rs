//! Independent ground truth for desk-scale verification.
//!
//! Deliberately different algorithm families from the production code:
//! Kruskal instead of Prim, Bellman-Ford instead of Dijkstra, and direct
//! tuple enumeration of the message update instead of the amortized scheme,
//! so shared bugs cannot confirm themselves.

use crate::graph::{energy, DepthMode, Instance, SolutionTree};
use crate::scalar::{is_neg_inf, neg_inf, sat_add, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for enumeration: {0} vertices, {1} edges")]
    OverBudget(usize, usize),
    #[error("oracle requires symmetric edge weights")]
    AsymmetricWeights,
    #[error("instance has no root")]
    NoRoot,
    #[error("neighborhood too large for exhaustive update: degree {0}, depth {1}")]
    NeighborhoodOverBudget(usize, i32),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Kruskal forest restricted to the component of `root`: returns its cost and
/// the chosen undirected edges.
pub fn kruskal_component<T: Scalar>(
    n: usize,
    edges: &[(usize, usize, T)],
    root: usize,
) -> (T, Vec<(usize, usize)>) {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        edges[a]
            .2
            .partial_cmp(&edges[b].2)
            .unwrap()
            .then(edges[a].0.cmp(&edges[b].0))
            .then(edges[a].1.cmp(&edges[b].1))
    });
    let mut uf = UnionFind::new(n);
    let mut forest = Vec::new();
    for idx in order {
        let (u, v, _) = edges[idx];
        if uf.union(u, v) {
            forest.push(idx);
        }
    }
    let root_comp = uf.find(root);
    let mut cost = T::zero();
    let mut chosen = Vec::new();
    for idx in forest {
        let (u, v, w) = edges[idx];
        if uf.find(u) == root_comp {
            cost = cost + w;
            chosen.push((u, v));
        }
    }
    (cost, chosen)
}

/// Undirected edge list of a symmetric-weight instance.
pub fn symmetric_edges<T: Scalar>(
    inst: &Instance<T>,
) -> Result<Vec<(usize, usize, T)>, OracleError> {
    if !inst.is_symmetric() {
        return Err(OracleError::AsymmetricWeights);
    }
    Ok((0..inst.num_edges())
        .map(|e| {
            let (lo, hi) = inst.ends(2 * e);
            (lo, hi, inst.weight(2 * e))
        })
        .collect())
}

/// Bellman-Ford distances from `source` over directed arcs `(tail, head, cost)`.
pub fn bellman_ford<T: Scalar>(
    n: usize,
    arcs: &[(usize, usize, T)],
    source: usize,
) -> Vec<Option<T>> {
    let mut dist: Vec<Option<T>> = vec![None; n];
    dist[source] = Some(T::zero());
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, c) in arcs {
            if let Some(du) = dist[u] {
                let cand = du + c;
                if dist[v].map_or(true, |dv| cand < dv) {
                    dist[v] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn orient_edges<T: Scalar>(
    inst: &Instance<T>,
    root: usize,
    undirected: &[(usize, usize)],
) -> Option<SolutionTree> {
    let n = inst.num_vertices();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in undirected {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut reached_edges = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u as u32);
                reached_edges += 1;
                queue.push_back(v);
            }
        }
    }
    if reached_edges != undirected.len() {
        return None; // not a single tree hanging off the root
    }
    SolutionTree::new(inst, root, parent).ok()
}

/// Exact optimum by exhaustive enumeration. Budget: `|V| <= 14` (vertex-subset
/// route) or `|E| <= 20` (edge-subset route); requires symmetric weights.
/// Ties are broken toward the lexicographically smallest edge set.
pub fn brute_force_optimum<T: Scalar>(
    inst: &Instance<T>,
) -> Result<(SolutionTree, T), OracleError> {
    let root = inst.root().ok_or(OracleError::NoRoot)?;
    let n = inst.num_vertices();
    let m = inst.num_edges();
    let edges = symmetric_edges(inst)?;
    let mut best: Option<(SolutionTree, T, Vec<(usize, usize)>)> = None;
    let consider = |tree: SolutionTree,
                    best: &mut Option<(SolutionTree, T, Vec<(usize, usize)>)>| {
        let cost = energy(inst, &tree);
        let mut key: Vec<(usize, usize)> =
            tree.edges().map(|(c, p)| (c.min(p), c.max(p))).collect();
        key.sort_unstable();
        let better = match best {
            None => true,
            Some((_, bc, bk)) => cost < *bc || (cost == *bc && key < *bk),
        };
        if better {
            *best = Some((tree, cost, key));
        }
    };

    if n <= 14 {
        let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        for mask in 0u32..(1 << others.len()) {
            let mut in_set = vec![false; n];
            in_set[root] = true;
            for (b, &v) in others.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    in_set[v] = true;
                }
            }
            let induced: Vec<(usize, usize, T)> = edges
                .iter()
                .copied()
                .filter(|&(u, v, _)| in_set[u] && in_set[v])
                .collect();
            let (_, chosen) = kruskal_component(n, &induced, root);
            let wanted = in_set.iter().filter(|&&b| b).count() - 1;
            if chosen.len() != wanted {
                continue; // vertex subset is disconnected
            }
            if let Some(tree) = orient_edges(inst, root, &chosen) {
                consider(tree, &mut best);
            }
        }
    } else if m <= 20 {
        for mask in 0u32..(1 << m) {
            let mut chosen = Vec::new();
            let mut uf = UnionFind::new(n);
            let mut acyclic = true;
            for (e, &(u, v, _)) in edges.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    if !uf.union(u, v) {
                        acyclic = false;
                        break;
                    }
                    chosen.push((u, v));
                }
            }
            if !acyclic {
                continue;
            }
            let root_comp = uf.find(root);
            if chosen.iter().any(|&(u, _)| uf.find(u) != root_comp) {
                continue;
            }
            if let Some(tree) = orient_edges(inst, root, &chosen) {
                consider(tree, &mut best);
            }
        }
    } else {
        return Err(OracleError::OverBudget(n, m));
    }
    let (tree, cost, _) = best.expect("the singleton root tree is always enumerated");
    Ok((tree, cost))
}

/// Compatibility of one vertex's incoming depth vector, straight from the
/// definition (normal rule, optional flat extension, root rule).
fn psi_ok<T: Scalar>(
    inst: &Instance<T>,
    v: usize,
    incoming: &[i32],
    bound: i32,
    mode: DepthMode,
) -> bool {
    if Some(v) == inst.root() {
        return incoming.iter().all(|&d| d == 0 || d == 1);
    }
    if incoming.iter().all(|&d| d == 0) {
        return true;
    }
    for d in 1..=bound {
        for k in 0..incoming.len() {
            if incoming[k] != -d {
                continue;
            }
            if incoming
                .iter()
                .enumerate()
                .all(|(l, &dl)| l == k || dl == 0 || dl == d + 1)
            {
                return true;
            }
        }
    }
    if mode == DepthMode::Flat && inst.prize(v) == T::zero() {
        for d in 1..=bound {
            for k in 0..incoming.len() {
                if incoming[k] != -d {
                    continue;
                }
                for l in 0..incoming.len() {
                    if l == k || incoming[l] != d {
                        continue;
                    }
                    if incoming
                        .iter()
                        .enumerate()
                        .all(|(s, &ds)| s == k || s == l || ds == 0)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Direct maximization of the message update for every outgoing edge of `v`:
/// enumerates all `(2D+1)^(deg-1)` neighbor tuples filtered by the
/// compatibility function. Returns unnormalized rows `(neighbor, values)` in
/// adjacency order. Budget: degree <= 4, `D <= 3`.
pub fn exhaustive_update<T: Scalar>(
    inst: &Instance<T>,
    weights: &[T],
    msg: &dyn Fn(usize, i32) -> T,
    bound: i32,
    v: usize,
    mode: DepthMode,
) -> Result<Vec<(usize, Vec<T>)>, OracleError> {
    let deg = inst.degree(v);
    if deg > 4 || bound > 3 {
        return Err(OracleError::NeighborhoodOverBudget(deg, bound));
    }
    let width = (2 * bound + 1) as usize;
    let nbrs = inst.neighbors(v).to_vec();
    let mut rows = Vec::with_capacity(deg);
    for (j_slot, &(j, _)) in nbrs.iter().enumerate() {
        let mut row = vec![neg_inf::<T>(); width];
        let free: Vec<usize> = (0..deg).filter(|&s| s != j_slot).collect();
        let tuples = (width as u64).pow(free.len() as u32);
        for dv in -bound..=bound {
            let mut best = neg_inf::<T>();
            let mut incoming = vec![0i32; deg];
            incoming[j_slot] = -dv;
            for code in 0..tuples {
                let mut c = code;
                for &s in &free {
                    incoming[s] = (c % width as u64) as i32 - bound;
                    c /= width as u64;
                }
                if !psi_ok(inst, v, &incoming, bound, mode) {
                    continue;
                }
                let mut value = T::zero();
                // the root never pays a prize: it is in the tree by definition
                if Some(v) != inst.root() && incoming.iter().all(|&d| d == 0) {
                    value = value - inst.prize(v);
                }
                for (s, &(_, oid)) in nbrs.iter().enumerate() {
                    // d_vk = -incoming[s] > 0 means k is v's parent: pay w_vk
                    if -incoming[s] > 0 {
                        value = value - weights[oid as usize];
                    }
                    if s != j_slot {
                        let in_oid = inst.reverse(oid as usize);
                        value = sat_add(value, msg(in_oid, incoming[s]));
                    }
                }
                if is_neg_inf(best) || value > best {
                    best = value;
                }
            }
            row[(dv + bound) as usize] = best;
        }
        rows.push((j as usize, row));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kruskal_triangle() {
        let edges = vec![(0usize, 1usize, 1.0f64), (1, 2, 2.0), (0, 2, 3.0)];
        let (cost, chosen) = kruskal_component(3, &edges, 0);
        assert_eq!(cost, 3.0);
        assert_eq!(chosen.len(), 2);
    }

    #[test]
    fn bellman_ford_path_prefix_sums() {
        let arcs = vec![(0usize, 1usize, 1.5f64), (1, 2, 2.0), (2, 3, 0.5)];
        let dist = bellman_ford(4, &arcs, 0);
        assert_eq!(dist, vec![Some(0.0), Some(1.5), Some(3.5), Some(4.0)]);
    }

    #[test]
    fn brute_force_takes_cheap_edge() {
        let inst: Instance<f64> = Instance::builder(2)
            .edge(0, 1, 3.0)
            .prize(1, 5.0)
            .root(0)
            .build()
            .unwrap();
        let (tree, cost) = brute_force_optimum(&inst).unwrap();
        assert_eq!(cost, 3.0);
        assert!(tree.contains(1));
    }

    #[test]
    fn brute_force_triangle_terminals() {
        let inst: Instance<f64> = Instance::builder(3)
            .edge(0, 1, 1.0)
            .edge(1, 2, 1.0)
            .edge(0, 2, 1.0)
            .terminal(1)
            .terminal(2)
            .root(0)
            .build()
            .unwrap();
        let (tree, cost) = brute_force_optimum(&inst).unwrap();
        assert_eq!(cost, 2.0);
        assert_eq!(tree.member_count(), 3);
    }

    #[test]
    fn brute_force_path_matches_hand_enumeration() {
        let inst: Instance<f64> = Instance::builder(3)
            .edge(0, 1, 1.0)
            .edge(1, 2, 2.0)
            .prize(2, 10.0)
            .root(0)
            .build()
            .unwrap();
        let (_, cost) = brute_force_optimum(&inst).unwrap();
        assert_eq!(cost, 3.0);
    }

    #[test]
    fn budget_is_enforced() {
        let mut b = Instance::<f64>::builder(40);
        for v in 1..40 {
            b.edge(v - 1, v, 1.0);
        }
        let inst = b.root(0).build().unwrap();
        assert_eq!(
            brute_force_optimum(&inst).unwrap_err(),
            OracleError::OverBudget(40, 39)
        );
    }

    #[test]
    fn edge_subset_route_agrees_with_vertex_route() {
        // 15 vertices selects the edge-subset route; dropping the spare
        // isolated vertex selects the vertex route on the same graph
        let ws = [
            0.0, 1.3, 0.4, 2.2, 0.9, 1.7, 0.6, 1.1, 2.8, 0.3, 1.9, 0.8, 1.2, 2.1,
        ];
        let build = |n: usize| -> Instance<f64> {
            let mut b = Instance::<f64>::builder(n);
            for v in 1..14 {
                b.edge(v - 1, v, ws[v]);
            }
            b.edge(0, 7, 0.35);
            b.prize(5, 3.0).prize(13, 4.0).root(0);
            b.build().unwrap()
        };
        let (_, c15) = brute_force_optimum(&build(15)).unwrap();
        let (_, c14) = brute_force_optimum(&build(14)).unwrap();
        assert_eq!(c15, c14);
    }
}
