//! Rooted solution trees and the energy functional.

use super::instance::Instance;
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("parent edge ({0},{1}) does not exist in the instance")]
    UnknownEdge(usize, usize),
    #[error("vertex {0} does not reach the root by parent pointers")]
    NotReachingRoot(usize),
    #[error("root {0} must not have a parent")]
    RootHasParent(usize),
}

/// A tree rooted at `root`: every member except the root stores the parent
/// edge pointing toward the root.
#[derive(Debug, Clone)]
pub struct SolutionTree {
    root: usize,
    parent: Vec<Option<u32>>,
    /// Oriented edge id (member -> parent), resolved at construction.
    parent_edge: Vec<Option<u32>>,
    members: Vec<bool>,
    member_count: usize,
}

impl PartialEq for SolutionTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.parent == other.parent
    }
}

impl SolutionTree {
    /// Builds and validates a tree from parent pointers. Members are the root
    /// plus every vertex with a parent; parent chains must reach the root
    /// through existing edges.
    pub fn new<T: Scalar>(
        inst: &Instance<T>,
        root: usize,
        parent: Vec<Option<u32>>,
    ) -> Result<Self, TreeError> {
        assert_eq!(parent.len(), inst.num_vertices());
        if parent[root].is_some() {
            return Err(TreeError::RootHasParent(root));
        }
        let n = inst.num_vertices();
        let mut parent_edge = vec![None; n];
        let mut members = vec![false; n];
        members[root] = true;
        let mut member_count = 1;
        for v in 0..n {
            if let Some(p) = parent[v] {
                let oid = inst
                    .oriented_id(v, p as usize)
                    .ok_or(TreeError::UnknownEdge(v, p as usize))?;
                parent_edge[v] = Some(oid as u32);
                if !members[v] {
                    members[v] = true;
                    member_count += 1;
                }
            }
        }
        // acyclicity and reachability: walk up with a step budget
        for v in 0..n {
            if parent[v].is_none() {
                continue;
            }
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                cur = p as usize;
                steps += 1;
                if steps > n {
                    return Err(TreeError::NotReachingRoot(v));
                }
            }
            if cur != root {
                return Err(TreeError::NotReachingRoot(v));
            }
        }
        Ok(SolutionTree {
            root,
            parent,
            parent_edge,
            members,
            member_count,
        })
    }

    /// The single-vertex tree `{root}`.
    pub fn singleton<T: Scalar>(inst: &Instance<T>, root: usize) -> Self {
        Self::new(inst, root, vec![None; inst.num_vertices()]).unwrap()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|p| p as usize)
    }

    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v].map(|e| e as usize)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn member_count(&self) -> usize {
        self.member_count
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| v)
    }

    /// Tree edges as `(child, parent)` pairs, ordered by child id.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p as usize)))
    }

    /// Hop distance from `v` to the root along the tree.
    pub fn depth_of(&self, v: usize) -> Option<usize> {
        if !self.members[v] {
            return None;
        }
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            cur = p as usize;
            d += 1;
        }
        Some(d)
    }

    pub fn height(&self) -> usize {
        self.members()
            .filter_map(|v| self.depth_of(v))
            .max()
            .unwrap_or(0)
    }

    /// All terminals of the instance contained in the tree?
    pub fn is_feasible<T: Scalar>(&self, inst: &Instance<T>) -> bool {
        (0..inst.num_vertices()).all(|v| !inst.is_terminal(v) || self.members[v])
    }
}

/// Tree cost: included edges pay their weight, excluded vertices pay their
/// prize. The root never pays a prize. Excluding a classic terminal yields
/// positive infinity.
pub fn energy<T: Scalar>(inst: &Instance<T>, tree: &SolutionTree) -> T {
    let mut cost = T::zero();
    for v in 0..inst.num_vertices() {
        if let Some(e) = tree.parent_edge(v) {
            cost = cost + inst.weight(e);
        } else if v != tree.root() && !tree.contains(v) {
            if inst.is_terminal(v) {
                return T::infinity();
            }
            cost = cost + inst.prize(v);
        }
    }
    cost
}

#[derive(Debug, Error, PartialEq)]
#[error("gap undefined for zero reference energy")]
pub struct GapError;

/// Percentage gap `(x - y) / y * 100`; negative means `x` beats `y`.
pub fn gap<T: Scalar>(x: T, y: T) -> Result<T, GapError> {
    if y == T::zero() {
        return Err(GapError);
    }
    Ok((x - y) / y * T::from_f64(100.0).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> Instance<f64> {
        Instance::builder(2)
            .edge(0, 1, 3.0)
            .prize(1, 5.0)
            .root(0)
            .build()
            .unwrap()
    }

    #[test]
    fn empty_tree_pays_all_prizes() {
        let inst = two_node();
        let t = SolutionTree::singleton(&inst, 0);
        assert_eq!(energy(&inst, &t), 5.0);
    }

    #[test]
    fn full_tree_pays_all_weights() {
        let inst = two_node();
        let t = SolutionTree::new(&inst, 0, vec![None, Some(0)]).unwrap();
        assert_eq!(energy(&inst, &t), 3.0);
    }

    #[test]
    fn path_energies_match_enumeration() {
        // r - a - b with w_ar = 1, w_ba = 2, c_a = 0, c_b = 10
        let inst: Instance<f64> = Instance::builder(3)
            .edge(0, 1, 1.0)
            .edge(1, 2, 2.0)
            .prize(2, 10.0)
            .root(0)
            .build()
            .unwrap();
        let full = SolutionTree::new(&inst, 0, vec![None, Some(0), Some(1)]).unwrap();
        let mid = SolutionTree::new(&inst, 0, vec![None, Some(0), None]).unwrap();
        let alone = SolutionTree::singleton(&inst, 0);
        assert_eq!(energy(&inst, &full), 3.0);
        assert_eq!(energy(&inst, &mid), 11.0);
        assert_eq!(energy(&inst, &alone), 10.0);
        let min = [&full, &mid, &alone]
            .iter()
            .map(|t| energy(&inst, t))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 3.0);
    }

    #[test]
    fn excluded_terminal_is_infinite() {
        let inst: Instance<f64> = Instance::builder(2)
            .edge(0, 1, 3.0)
            .terminal(1)
            .root(0)
            .build()
            .unwrap();
        let alone = SolutionTree::singleton(&inst, 0);
        assert!(energy(&inst, &alone).is_infinite());
        assert!(!alone.is_feasible(&inst));
    }

    #[test]
    fn rejects_broken_parent_maps() {
        let inst = two_node();
        assert_eq!(
            SolutionTree::new(&inst, 0, vec![Some(1), Some(0)]).unwrap_err(),
            TreeError::RootHasParent(0)
        );
        let inst3: Instance<f64> = Instance::builder(3)
            .edge(0, 1, 1.0)
            .edge(1, 2, 1.0)
            .build()
            .unwrap();
        assert_eq!(
            SolutionTree::new(&inst3, 0, vec![None, None, Some(0)]).unwrap_err(),
            TreeError::UnknownEdge(2, 0)
        );
        // 1 and 2 point at each other: cycle never reaches the root
        assert_eq!(
            SolutionTree::new(&inst3, 0, vec![None, Some(2), Some(1)]).unwrap_err(),
            TreeError::NotReachingRoot(1)
        );
    }

    #[test]
    fn gap_examples() {
        assert_eq!(format!("{:.2}", gap(121056.0, 121091.0).unwrap()), "-0.03");
        assert_eq!(gap(42.0, 42.0).unwrap(), 0.0);
        assert_eq!(gap(11.0, 10.0).unwrap(), 10.0);
        assert_eq!(gap(1.0, 0.0).unwrap_err(), GapError);
    }
}
