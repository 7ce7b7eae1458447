//! Anytime feasible-tree extraction from a field snapshot.
//!
//! The fields steer classic greedy constructions: edge reweighting turns the
//! local fields into nonnegative costs that vanish exactly on decisional
//! edges, node reweighting penalizes edges leaving the predicted vertex set,
//! and the Goemans-Williamson growth runs on field-modified prizes. Every
//! spanning extractor ends with the same leaf-pruning rule on original
//! weights and prizes, so extraction is energy-safe and, at convergence,
//! reproduces the decisional tree.

mod gw;

pub use gw::{extract_gw, goemans_williamson};

use crate::engine::FieldSnapshot;
use crate::graph::{Instance, SolutionTree};
use crate::scalar::{is_neg_inf, neg_inf, Scalar};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Field-derived edge costs plus the set of vertices the fields force into
/// the tree. `penalty` is the large constant dominating any feasible energy
/// difference.
#[derive(Debug, Clone)]
pub struct ReweightedView<T> {
    cost: Vec<T>,
    forced: Vec<bool>,
    penalty: T,
}

impl<T: Scalar> ReweightedView<T> {
    /// Cost of attaching the tail of this oriented edge through its head.
    pub fn cost(&self, oriented: usize) -> T {
        self.cost[oriented]
    }

    pub fn forced(&self, v: usize) -> bool {
        self.forced[v]
    }

    pub fn penalty(&self) -> T {
        self.penalty
    }

    /// Plain view over the original weights (the non-reweighting baseline).
    pub fn original(inst: &Instance<T>) -> Self {
        ReweightedView {
            cost: inst.weights().to_vec(),
            forced: vec![false; inst.num_vertices()],
            penalty: inst.big_cost(),
        }
    }
}

/// Edge reweighting: cost `-max_{d != 0} H_ij(d)`, which is zero exactly when
/// the decisional variable is nonzero and strictly positive otherwise. Edges
/// forbidden away from depth zero get the penalty cost.
pub fn reweight_edges<T: Scalar>(inst: &Instance<T>, snap: &FieldSnapshot<T>) -> ReweightedView<T> {
    let penalty = inst.big_cost();
    let bound = snap.depth();
    let cost = (0..inst.num_oriented())
        .map(|oid| {
            let mut best = neg_inf::<T>();
            for d in (-bound..=bound).filter(|&d| d != 0) {
                let v = snap.local(oid, d);
                if is_neg_inf(best) || v > best {
                    best = v;
                }
            }
            if is_neg_inf(best) {
                penalty
            } else {
                -best
            }
        })
        .collect();
    ReweightedView {
        cost,
        forced: vec![false; inst.num_vertices()],
        penalty,
    }
}

/// Node reweighting: vertices whose presence fields favor a positive depth
/// are forced (the root always is); edges with an endpoint outside the forced
/// set pay the penalty on top of their original weight.
pub fn reweight_nodes<T: Scalar>(inst: &Instance<T>, snap: &FieldSnapshot<T>) -> ReweightedView<T> {
    let penalty = inst.big_cost();
    let fields = snap.node_fields(inst);
    let forced: Vec<bool> = (0..inst.num_vertices())
        .map(|v| {
            if Some(v) == inst.root() {
                return true;
            }
            let best_pos = fields[v][1..]
                .iter()
                .cloned()
                .fold(neg_inf::<T>(), |a, x| if x > a { x } else { a });
            best_pos > fields[v][0]
        })
        .collect();
    let cost = (0..inst.num_oriented())
        .map(|oid| {
            let (i, j) = inst.ends(oid);
            if forced[i] && forced[j] {
                inst.weight(oid)
            } else {
                inst.weight(oid) + penalty
            }
        })
        .collect();
    ReweightedView {
        cost,
        forced,
        penalty,
    }
}

struct HeapEntry<T> {
    key: T,
    child: u32,
    via: u32,
}

impl<T: Scalar> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for HeapEntry<T> {}
impl<T: Scalar> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for HeapEntry<T> {
    // reversed: BinaryHeap pops the smallest (key, child, via) first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .partial_cmp(&self.key)
            .expect("costs are never NaN")
            .then(other.child.cmp(&self.child))
            .then(other.via.cmp(&self.via))
    }
}

/// Prim spanning tree of the root's component under view costs; ties break
/// deterministically by vertex id.
pub fn prim_spanning<T: Scalar>(
    inst: &Instance<T>,
    view: &ReweightedView<T>,
    root: usize,
) -> Vec<Option<u32>> {
    let n = inst.num_vertices();
    let mut parent = vec![None; n];
    let mut visited = vec![false; n];
    visited[root] = true;
    let mut heap = BinaryHeap::new();
    let push_frontier = |from: usize, visited: &[bool], heap: &mut BinaryHeap<HeapEntry<T>>| {
        for &(nb, oid) in inst.neighbors(from) {
            if !visited[nb as usize] {
                // attaching nb through `from` uses the (nb -> from) cost
                heap.push(HeapEntry {
                    key: view.cost(inst.reverse(oid as usize)),
                    child: nb,
                    via: from as u32,
                });
            }
        }
    };
    push_frontier(root, &visited, &mut heap);
    while let Some(HeapEntry { child, via, .. }) = heap.pop() {
        if visited[child as usize] {
            continue;
        }
        visited[child as usize] = true;
        parent[child as usize] = Some(via);
        push_frontier(child as usize, &visited, &mut heap);
    }
    parent
}

/// Dijkstra shortest-path tree of the root's component under view costs.
pub fn dijkstra_tree<T: Scalar>(
    inst: &Instance<T>,
    view: &ReweightedView<T>,
    root: usize,
) -> Vec<Option<u32>> {
    let n = inst.num_vertices();
    let mut parent = vec![None; n];
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = Some(T::zero());
    heap.push(HeapEntry {
        key: T::zero(),
        child: root as u32,
        via: root as u32,
    });
    while let Some(HeapEntry { key, child, via }) = heap.pop() {
        let v = child as usize;
        if settled[v] || dist[v] != Some(key) {
            continue;
        }
        settled[v] = true;
        if v != root {
            parent[v] = Some(via);
        }
        for &(nb, oid) in inst.neighbors(v) {
            let u = nb as usize;
            if settled[u] {
                continue;
            }
            let cand = key + view.cost(inst.reverse(oid as usize));
            if dist[u].map_or(true, |d| cand < d) {
                dist[u] = Some(cand);
                heap.push(HeapEntry {
                    key: cand,
                    child: nb,
                    via: v as u32,
                });
            }
        }
    }
    parent
}

/// Recursive leaf pruning on original weights and prizes: drop any leaf whose
/// parent edge costs more than its prize. Each removal strictly decreases the
/// tree energy.
fn prune_leaves<T: Scalar>(inst: &Instance<T>, parent: &mut [Option<u32>], root: usize) {
    let n = inst.num_vertices();
    let mut children = vec![0usize; n];
    for v in 0..n {
        if let Some(p) = parent[v] {
            children[p as usize] += 1;
        }
    }
    let mut queue: std::collections::BTreeSet<usize> = (0..n)
        .filter(|&v| v != root && parent[v].is_some() && children[v] == 0)
        .collect();
    while let Some(&v) = queue.iter().next() {
        queue.remove(&v);
        let p = parent[v].expect("queued leaves have parents") as usize;
        let w = inst.weight(inst.oriented_id(v, p).expect("parent edge exists"));
        if w > inst.prize(v) {
            parent[v] = None;
            children[p] -= 1;
            if p != root && children[p] == 0 {
                queue.insert(p);
            }
        }
    }
}

/// Pruned minimum spanning tree under view costs.
pub fn extract_mst<T: Scalar>(inst: &Instance<T>, view: &ReweightedView<T>) -> SolutionTree {
    let root = inst.root().expect("extraction needs a rooted instance");
    let mut parent = prim_spanning(inst, view, root);
    prune_leaves(inst, &mut parent, root);
    SolutionTree::new(inst, root, parent).expect("pruned spanning tree is valid")
}

/// Pruned shortest-path tree under view costs.
pub fn extract_spt<T: Scalar>(inst: &Instance<T>, view: &ReweightedView<T>) -> SolutionTree {
    let root = inst.root().expect("extraction needs a rooted instance");
    let mut parent = dijkstra_tree(inst, view, root);
    prune_leaves(inst, &mut parent, root);
    SolutionTree::new(inst, root, parent).expect("pruned shortest-path tree is valid")
}

/// Running primal bound over `(tree, energy)` offers; infeasible (infinite)
/// energies are ignored.
#[derive(Debug, Clone)]
pub struct BestTree<T> {
    best: Option<(SolutionTree, T)>,
}

impl<T: Scalar> Default for BestTree<T> {
    fn default() -> Self {
        BestTree { best: None }
    }
}

impl<T: Scalar> BestTree<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when the offer became the new best.
    pub fn offer(&mut self, tree: &SolutionTree, energy: T) -> bool {
        if !energy.is_finite() {
            return false;
        }
        let better = match &self.best {
            None => true,
            Some((_, e)) => energy < *e,
        };
        if better {
            self.best = Some((tree.clone(), energy));
        }
        better
    }

    pub fn energy(&self) -> Option<T> {
        self.best.as_ref().map(|(_, e)| *e)
    }

    pub fn tree(&self) -> Option<&SolutionTree> {
        self.best.as_ref().map(|(t, _)| t)
    }

    pub fn into_best(self) -> Option<(SolutionTree, T)> {
        self.best
    }
}

/// Minimum-energy feasible tree of a finished trace; `None` when every
/// extraction was infeasible.
pub fn best_of<T: Scalar>(
    items: impl IntoIterator<Item = (SolutionTree, T)>,
) -> Option<(SolutionTree, T)> {
    let mut best = BestTree::new();
    for (tree, energy) in items {
        best.offer(&tree, energy);
    }
    best.into_best()
}

#[cfg(test)]
mod tests;
