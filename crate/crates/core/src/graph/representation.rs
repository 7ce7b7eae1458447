//! Depth representations of rooted trees.
//!
//! A representation assigns an antisymmetric integer depth `d_ij` in
//! `{-D..D}` to every oriented edge: `d_ij > 0` means the edge points toward
//! the root with `i` at hop-depth `d_ij`, and `d_ij = 0` means the edge is
//! unused. Local compatibility rules make a depth vector encode a valid tree;
//! the flat rule additionally permits constant-depth chains through prize-0
//! vertices of tree-degree two, which caps the needed bound at the number of
//! profitable vertices.

use super::instance::Instance;
use super::tree::SolutionTree;
use crate::scalar::Scalar;
use thiserror::Error;

/// Which compatibility rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthMode {
    Normal,
    Flat,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReprError {
    #[error("tree needs depth {needed} but the bound is {bound}")]
    BoundExceeded { needed: i32, bound: i32 },
    #[error("instance has no root")]
    NoRoot,
    #[error("depth vector is not a valid representation under any rule")]
    Invalid,
}

/// Antisymmetric per-edge depth vector with bound `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    /// Depth of the canonical orientation (lo -> hi) per undirected edge.
    depth: Vec<i32>,
    bound: i32,
}

impl Representation {
    pub fn zero<T: Scalar>(inst: &Instance<T>, bound: i32) -> Self {
        assert!(bound >= 1);
        Representation {
            depth: vec![0; inst.num_edges()],
            bound,
        }
    }

    pub fn bound(&self) -> i32 {
        self.bound
    }

    /// Depth of an oriented edge id.
    pub fn depth_oriented(&self, oriented: usize) -> i32 {
        let d = self.depth[oriented / 2];
        if oriented % 2 == 0 {
            d
        } else {
            -d
        }
    }

    /// Depth `d_ij` for an existing edge `(i, j)`.
    pub fn depth_of<T: Scalar>(&self, inst: &Instance<T>, i: usize, j: usize) -> i32 {
        self.depth_oriented(inst.oriented_id(i, j).expect("edge must exist"))
    }

    pub fn set_oriented(&mut self, oriented: usize, d: i32) {
        assert!(d.abs() <= self.bound);
        self.depth[oriented / 2] = if oriented % 2 == 0 { d } else { -d };
    }

    pub fn is_all_zero(&self) -> bool {
        self.depth.iter().all(|&d| d == 0)
    }
}

/// The compatibility check for a single vertex given its incoming depths
/// `d_ki` (one per adjacency slot, in slot order).
fn vertex_ok<T: Scalar>(
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
    // normal rule: one parent slot k with d_ki = -p, every other slot 0 or p+1
    let parents: Vec<i32> = incoming.iter().copied().filter(|&d| d < 0).collect();
    if parents.len() == 1 {
        let p = -parents[0];
        if p >= 1
            && p <= bound
            && incoming
                .iter()
                .all(|&d| d <= 0 || d == p + 1)
        {
            return true;
        }
    }
    if mode == DepthMode::Flat && inst.prize(v) == T::zero() {
        // flat rule: exactly one parent at -p and one same-depth child at +p
        let nonzero: Vec<i32> = incoming.iter().copied().filter(|&d| d != 0).collect();
        if nonzero.len() == 2 {
            let p = nonzero[0].abs();
            if p >= 1 && p <= bound && nonzero[0] == -nonzero[1] {
                return true;
            }
        }
    }
    false
}

/// True iff the depth vector satisfies every local compatibility rule in the
/// given mode (antisymmetry holds by construction of [`Representation`]).
pub fn validate_representation<T: Scalar>(
    inst: &Instance<T>,
    rep: &Representation,
    mode: DepthMode,
) -> bool {
    if inst.root().is_none() {
        return false;
    }
    let mut incoming = Vec::new();
    (0..inst.num_vertices()).all(|v| {
        incoming.clear();
        incoming.extend(
            inst.neighbors(v)
                .iter()
                .map(|&(_, oid)| -rep.depth_oriented(oid as usize)),
        );
        vertex_ok(inst, v, &incoming, rep.bound(), mode)
    })
}

/// Encodes a tree as a depth vector.
///
/// `Normal` assigns each tree edge the hop distance of its child endpoint
/// from the root. `Flat` assigns the most compact depths: the depth increases
/// from a vertex to its children only at the root, at profitable vertices and
/// at branching vertices.
pub fn tree_to_representation<T: Scalar>(
    inst: &Instance<T>,
    tree: &SolutionTree,
    mode: DepthMode,
    bound: i32,
) -> Result<Representation, ReprError> {
    if inst.root() != Some(tree.root()) {
        return Err(ReprError::NoRoot);
    }
    let n = inst.num_vertices();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, p) in tree.edges() {
        children[p].push(c);
    }
    let mut rep = Representation::zero(inst, bound);
    // depth of the edge (v -> parent(v)) per vertex
    let mut edge_depth = vec![0i32; n];
    let mut stack: Vec<usize> = children[tree.root()].clone();
    for &c in &stack {
        edge_depth[c] = 1;
    }
    while let Some(v) = stack.pop() {
        let d = edge_depth[v];
        if d > bound {
            return Err(ReprError::BoundExceeded {
                needed: d,
                bound,
            });
        }
        let oid = tree.parent_edge(v).expect("non-root member has a parent");
        rep.set_oriented(oid, d);
        let tree_degree = children[v].len() + 1;
        let flat_here = mode == DepthMode::Flat
            && inst.prize(v) == T::zero()
            && tree_degree == 2;
        for &c in &children[v] {
            edge_depth[c] = if flat_here { d } else { d + 1 };
            stack.push(c);
        }
    }
    Ok(rep)
}

/// Decodes a depth vector: the connected component of the root becomes the
/// tree; under the flat rule, leftover constant-depth cycles are returned as
/// an edge set (always empty under the normal rule).
#[allow(clippy::type_complexity)]
pub fn representation_to_subgraph<T: Scalar>(
    inst: &Instance<T>,
    rep: &Representation,
) -> Result<(SolutionTree, Vec<(usize, usize)>), ReprError> {
    if !validate_representation(inst, rep, DepthMode::Normal)
        && !validate_representation(inst, rep, DepthMode::Flat)
    {
        return Err(ReprError::Invalid);
    }
    let root = inst.root().ok_or(ReprError::NoRoot)?;
    let n = inst.num_vertices();
    let mut parent = vec![None; n];
    let mut in_root_component = vec![false; n];
    in_root_component[root] = true;
    let mut queue = vec![root];
    while let Some(v) = queue.pop() {
        for &(nb, oid) in inst.neighbors(v) {
            let nb = nb as usize;
            if rep.depth_oriented(oid as usize) != 0 && !in_root_component[nb] {
                in_root_component[nb] = true;
                queue.push(nb);
            }
        }
    }
    for v in 0..n {
        if v == root || !in_root_component[v] {
            continue;
        }
        for &(nb, oid) in inst.neighbors(v) {
            if rep.depth_oriented(oid as usize) > 0 {
                parent[v] = Some(nb);
            }
        }
    }
    let tree = SolutionTree::new(inst, root, parent).map_err(|_| ReprError::Invalid)?;
    let mut cycles = Vec::new();
    for e in 0..inst.num_edges() {
        if rep.depth_oriented(2 * e) != 0 {
            let (lo, hi) = inst.ends(2 * e);
            if !in_root_component[lo] {
                cycles.push((lo, hi));
            }
        }
    }
    cycles.sort_unstable();
    Ok((tree, cycles))
}

/// Energy of a depth vector: infinite when invalid in the given mode,
/// otherwise included-edge weights plus prizes of vertices with all-zero
/// neighborhoods (the root never pays a prize).
pub fn representation_energy<T: Scalar>(
    inst: &Instance<T>,
    rep: &Representation,
    mode: DepthMode,
) -> T {
    if !validate_representation(inst, rep, mode) {
        return T::infinity();
    }
    let root = inst.root().expect("validated representation has a root");
    let mut cost = T::zero();
    for e in 0..inst.num_edges() {
        let d = rep.depth_oriented(2 * e);
        if d > 0 {
            cost = cost + inst.weight(2 * e);
        } else if d < 0 {
            cost = cost + inst.weight(2 * e + 1);
        }
    }
    for v in 0..inst.num_vertices() {
        if v == root {
            continue;
        }
        let out = inst
            .neighbors(v)
            .iter()
            .all(|&(_, oid)| rep.depth_oriented(oid as usize) == 0);
        if out {
            cost = cost + inst.prize(v);
        }
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tree::energy;

    /// Path r(0) - a(1) - b(2).
    fn path3() -> Instance<f64> {
        Instance::builder(3)
            .edge(0, 1, 1.0)
            .edge(1, 2, 2.0)
            .root(0)
            .build()
            .unwrap()
    }

    /// Ten-node example: chain 2-3-4-5 branching at 5 into leaves 0 and 1,
    /// a triangle {6,7,8} and a spare vertex 9; root 2, terminals {0,1,3}.
    fn ten_node() -> Instance<f64> {
        Instance::builder(10)
            .edge(2, 3, 1.0)
            .edge(3, 4, 1.0)
            .edge(4, 5, 1.0)
            .edge(5, 0, 1.0)
            .edge(5, 1, 1.0)
            .edge(6, 7, 1.0)
            .edge(7, 8, 1.0)
            .edge(8, 6, 1.0)
            .edge(2, 9, 1.0)
            .edge(5, 6, 1.0)
            .terminal(0)
            .terminal(1)
            .terminal(3)
            .root(2)
            .build()
            .unwrap()
    }

    fn ten_node_tree(inst: &Instance<f64>) -> SolutionTree {
        let mut parent = vec![None; 10];
        parent[3] = Some(2);
        parent[4] = Some(3);
        parent[5] = Some(4);
        parent[0] = Some(5);
        parent[1] = Some(5);
        SolutionTree::new(inst, 2, parent).unwrap()
    }

    #[test]
    fn normal_hop_counting_on_path() {
        let inst = path3();
        let tree = SolutionTree::new(&inst, 0, vec![None, Some(0), Some(1)]).unwrap();
        let rep = tree_to_representation(&inst, &tree, DepthMode::Normal, 4).unwrap();
        assert_eq!(rep.depth_of(&inst, 1, 0), 1);
        assert_eq!(rep.depth_of(&inst, 2, 1), 2);
        assert_eq!(rep.depth_of(&inst, 0, 1), -1);
        assert!(validate_representation(&inst, &rep, DepthMode::Normal));
    }

    #[test]
    fn ten_node_normal_depths() {
        let inst = ten_node();
        let tree = ten_node_tree(&inst);
        let rep = tree_to_representation(&inst, &tree, DepthMode::Normal, 4).unwrap();
        assert_eq!(rep.depth_of(&inst, 3, 2), 1);
        assert_eq!(rep.depth_of(&inst, 4, 3), 2);
        assert_eq!(rep.depth_of(&inst, 5, 4), 3);
        assert_eq!(rep.depth_of(&inst, 0, 5), 4);
        assert_eq!(rep.depth_of(&inst, 1, 5), 4);
        assert_eq!(rep.depth_of(&inst, 6, 5), 0);
        let (back, cycles) = representation_to_subgraph(&inst, &rep).unwrap();
        assert_eq!(back, tree);
        assert!(cycles.is_empty());
        // the tree is too tall for D = 3
        assert_eq!(
            tree_to_representation(&inst, &tree, DepthMode::Normal, 3).unwrap_err(),
            ReprError::BoundExceeded { needed: 4, bound: 3 }
        );
    }

    #[test]
    fn ten_node_flat_depths() {
        let inst = ten_node();
        let tree = ten_node_tree(&inst);
        let rep = tree_to_representation(&inst, &tree, DepthMode::Flat, 3).unwrap();
        // terminal 3 forces an increase, vertex 4 keeps depth 2, branching 5
        // forces another increase
        assert_eq!(rep.depth_of(&inst, 3, 2), 1);
        assert_eq!(rep.depth_of(&inst, 4, 3), 2);
        assert_eq!(rep.depth_of(&inst, 5, 4), 2);
        assert_eq!(rep.depth_of(&inst, 0, 5), 3);
        assert_eq!(rep.depth_of(&inst, 1, 5), 3);
        assert!(validate_representation(&inst, &rep, DepthMode::Flat));
        assert!(!validate_representation(&inst, &rep, DepthMode::Normal));
    }

    #[test]
    fn flat_cycle_is_reported_and_excluded() {
        let inst = ten_node();
        let tree = ten_node_tree(&inst);
        let mut rep = tree_to_representation(&inst, &tree, DepthMode::Flat, 3).unwrap();
        // constant-depth directed cycle 6 -> 7 -> 8 -> 6 at depth 2
        rep.set_oriented(inst.oriented_id(6, 7).unwrap(), 2);
        rep.set_oriented(inst.oriented_id(7, 8).unwrap(), 2);
        rep.set_oriented(inst.oriented_id(8, 6).unwrap(), 2);
        assert!(validate_representation(&inst, &rep, DepthMode::Flat));
        let (back, cycles) = representation_to_subgraph(&inst, &rep).unwrap();
        assert_eq!(back, tree);
        assert_eq!(cycles, vec![(6, 7), (6, 8), (7, 8)]);
    }

    #[test]
    fn all_zero_is_the_lone_root() {
        let inst = path3();
        let rep = Representation::zero(&inst, 3);
        assert!(validate_representation(&inst, &rep, DepthMode::Normal));
        assert!(validate_representation(&inst, &rep, DepthMode::Flat));
        let (tree, cycles) = representation_to_subgraph(&inst, &rep).unwrap();
        assert_eq!(tree.member_count(), 1);
        assert!(tree.contains(0));
        assert!(cycles.is_empty());
    }

    #[test]
    fn two_parents_are_rejected() {
        // star: center 1 with neighbors 0 (root), 2, 3
        let inst: Instance<f64> = Instance::builder(4)
            .edge(0, 1, 1.0)
            .edge(1, 2, 1.0)
            .edge(1, 3, 1.0)
            .root(0)
            .build()
            .unwrap();
        let mut rep = Representation::zero(&inst, 3);
        // vertex 1 claims two positive outgoing depths: two parents
        rep.set_oriented(inst.oriented_id(1, 0).unwrap(), 1);
        rep.set_oriented(inst.oriented_id(1, 2).unwrap(), 1);
        assert!(!validate_representation(&inst, &rep, DepthMode::Normal));
        assert!(!validate_representation(&inst, &rep, DepthMode::Flat));
        assert!(representation_to_subgraph(&inst, &rep).is_err());
    }

    #[test]
    fn flat_chain_requires_zero_prize() {
        // path r(0) - m(1) - t(2): constant depth through m
        let build = |prize_m: f64| -> Instance<f64> {
            let mut b = Instance::builder(3);
            b.edge(0, 1, 1.0).edge(1, 2, 1.0).root(0);
            if prize_m > 0.0 {
                b.prize(1, prize_m);
            }
            b.prize(2, 3.0);
            b.build().unwrap()
        };
        for (prize_m, expect) in [(0.0, true), (2.0, false)] {
            let inst = build(prize_m);
            let mut rep = Representation::zero(&inst, 2);
            rep.set_oriented(inst.oriented_id(1, 0).unwrap(), 1);
            rep.set_oriented(inst.oriented_id(2, 1).unwrap(), 1);
            assert_eq!(
                validate_representation(&inst, &rep, DepthMode::Flat),
                expect,
                "prize {prize_m}"
            );
            assert!(!validate_representation(&inst, &rep, DepthMode::Normal));
        }
    }

    #[test]
    fn flat_compacts_long_chains() {
        // r(0) - t(1) - v(2) - w(3) - t'(4), terminals t and t'
        let inst: Instance<f64> = Instance::builder(5)
            .edge(0, 1, 1.0)
            .edge(1, 2, 1.0)
            .edge(2, 3, 1.0)
            .edge(3, 4, 1.0)
            .terminal(1)
            .terminal(4)
            .root(0)
            .build()
            .unwrap();
        let mut parent = vec![None; 5];
        parent[1] = Some(0);
        parent[2] = Some(1);
        parent[3] = Some(2);
        parent[4] = Some(3);
        let tree = SolutionTree::new(&inst, 0, parent).unwrap();
        // |K| = 2, so the compact depths must fit in D = 2
        let rep = tree_to_representation(&inst, &tree, DepthMode::Flat, 2).unwrap();
        assert_eq!(rep.depth_of(&inst, 1, 0), 1);
        assert_eq!(rep.depth_of(&inst, 2, 1), 2);
        assert_eq!(rep.depth_of(&inst, 3, 2), 2);
        assert_eq!(rep.depth_of(&inst, 4, 3), 2);
        assert!(validate_representation(&inst, &rep, DepthMode::Flat));
        let (back, cycles) = representation_to_subgraph(&inst, &rep).unwrap();
        assert_eq!(back, tree);
        assert!(cycles.is_empty());
    }

    #[test]
    fn representation_energy_matches_tree_energy() {
        let inst = ten_node();
        let tree = ten_node_tree(&inst);
        let rep = tree_to_representation(&inst, &tree, DepthMode::Normal, 5).unwrap();
        assert_eq!(
            representation_energy(&inst, &rep, DepthMode::Normal),
            energy(&inst, &tree)
        );
        let bad = {
            let mut r = Representation::zero(&inst, 5);
            r.set_oriented(inst.oriented_id(3, 2).unwrap(), 2);
            r
        };
        assert!(representation_energy(&inst, &bad, DepthMode::Normal).is_infinite());
    }
}
