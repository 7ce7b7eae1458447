//! Immutable problem instances.
//!
//! An instance is an undirected graph with one weight per *oriented* edge
//! (`w_ij` may differ from `w_ji`), a non-negative prize per vertex, an
//! optional root and a problem kind. Classic-Steiner terminals are encoded by
//! a prize sentinel strictly greater than the sum of all weights and all
//! finite prizes, so that excluding a terminal is always suboptimal and a
//! single energy function covers every variant.

use crate::scalar::Scalar;
use std::collections::HashMap;
use thiserror::Error;

/// Problem flavor of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Classic Steiner problem on graphs: mandatory terminals, no root in the
    /// input.
    Spg,
    /// Prize-collecting variant: optional profitable vertices.
    Pcspg,
    /// Rooted variant: the root is part of the input.
    Rstp,
}

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("vertex {0} out of range (instance has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("non-positive weight {w} on edge ({i},{j})")]
    NonPositiveWeight { i: usize, j: usize, w: f64 },
    #[error("negative prize {p} on vertex {i}")]
    NegativePrize { i: usize, p: f64 },
    #[error("self loop on vertex {0}")]
    SelfLoop(usize),
}

/// Immutable weighted graph with prizes; safe for concurrent reads.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    n: usize,
    adj_off: Vec<u32>,
    /// `(neighbor, oriented edge id)` per adjacency slot.
    adj: Vec<(u32, u32)>,
    /// Endpoints `(tail, head)` per oriented edge id. Undirected edge `e`
    /// owns the oriented ids `2e` (lo -> hi) and `2e + 1` (hi -> lo).
    ends: Vec<(u32, u32)>,
    weights: Vec<T>,
    prizes: Vec<T>,
    terminal: Vec<bool>,
    root: Option<u32>,
    kind: Kind,
    external: Vec<u64>,
    sentinel: T,
    total_weight: T,
    total_finite_prize: T,
}

impl<T: Scalar> Instance<T> {
    pub fn builder(n: usize) -> InstanceBuilder<T> {
        InstanceBuilder::new(n)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.ends.len() / 2
    }

    pub fn num_oriented(&self) -> usize {
        self.ends.len()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn root(&self) -> Option<usize> {
        self.root.map(|r| r as usize)
    }

    /// Adjacency of `v` as `(neighbor, oriented id v -> neighbor)` slots.
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_off[v] as usize..self.adj_off[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.adj_off[v + 1] - self.adj_off[v]) as usize
    }

    /// Endpoints `(tail, head)` of an oriented edge.
    pub fn ends(&self, oriented: usize) -> (usize, usize) {
        let (a, b) = self.ends[oriented];
        (a as usize, b as usize)
    }

    pub fn reverse(&self, oriented: usize) -> usize {
        oriented ^ 1
    }

    /// Oriented id for the pair `(i, j)`, if the edge exists.
    pub fn oriented_id(&self, i: usize, j: usize) -> Option<usize> {
        self.neighbors(i)
            .iter()
            .find(|&&(nb, _)| nb as usize == j)
            .map(|&(_, oid)| oid as usize)
    }

    pub fn weight(&self, oriented: usize) -> T {
        self.weights[oriented]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn prize(&self, v: usize) -> T {
        self.prizes[v]
    }

    pub fn prizes(&self) -> &[T] {
        &self.prizes
    }

    /// True for vertices carrying the classic-terminal prize sentinel.
    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminal[v]
    }

    /// Profitable vertices: prize > 0 (terminals included), root excluded.
    pub fn profitable(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| self.prizes[v] > T::zero() && Some(v) != self.root())
            .collect()
    }

    pub fn terminals(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.terminal[v]).collect()
    }

    /// The terminal prize sentinel of this instance.
    pub fn prize_sentinel(&self) -> T {
        self.sentinel
    }

    /// Sum of all oriented edge weights (as declared, excluding blocked
    /// reverse slots of one-sided arcs).
    pub fn total_weight(&self) -> T {
        self.total_weight
    }

    pub fn total_finite_prize(&self) -> T {
        self.total_finite_prize
    }

    /// Large constant strictly dominating any feasible energy difference:
    /// sum of weights + sum of finite prizes + 1.
    pub fn big_cost(&self) -> T {
        self.total_weight + self.total_finite_prize + T::one()
    }

    pub fn external_id(&self, v: usize) -> u64 {
        self.external[v]
    }

    /// Internal vertex for an external id, if any.
    pub fn internal_id(&self, external: u64) -> Option<usize> {
        self.external.iter().position(|&e| e == external)
    }

    /// Copy of this instance with the root replaced.
    pub fn with_root(&self, root: usize) -> Self {
        let mut out = self.clone();
        out.root = Some(root as u32);
        out
    }

    /// Copy with new prizes (and recomputed sentinel); terminal flags are
    /// cleared.
    pub fn with_prizes(&self, prizes: Vec<T>) -> Self {
        assert_eq!(prizes.len(), self.n);
        let mut out = self.clone();
        out.terminal = vec![false; self.n];
        out.total_finite_prize = prizes.iter().fold(T::zero(), |a, &p| a + p);
        out.sentinel = out.total_weight + out.total_finite_prize + T::from_f64(2.0).unwrap();
        out.prizes = prizes;
        out
    }

    /// Copy with the given vertices turned into sentinel-prize terminals.
    pub fn with_terminals(&self, terminals: &[usize]) -> Self {
        let mut out = self.clone();
        for &t in terminals {
            out.terminal[t] = true;
            out.prizes[t] = out.sentinel;
        }
        out
    }

    pub fn with_kind(&self, kind: Kind) -> Self {
        let mut out = self.clone();
        out.kind = kind;
        out
    }

    /// Whether `w_ij == w_ji` for every edge.
    pub fn is_symmetric(&self) -> bool {
        (0..self.num_edges()).all(|e| self.weights[2 * e] == self.weights[2 * e + 1])
    }
}

/// Single-writer construction for [`Instance`].
pub struct InstanceBuilder<T> {
    n: usize,
    // per undirected edge: lo, hi, weight lo->hi, weight hi->lo
    edges: Vec<(u32, u32, Option<T>, Option<T>)>,
    slot: HashMap<(u32, u32), usize>,
    prizes: Vec<T>,
    terminals: Vec<bool>,
    root: Option<u32>,
    kind: Kind,
    external: Option<Vec<u64>>,
    error: Option<BuildError>,
}

impl<T: Scalar> InstanceBuilder<T> {
    pub fn new(n: usize) -> Self {
        InstanceBuilder {
            n,
            edges: Vec::new(),
            slot: HashMap::new(),
            prizes: vec![T::zero(); n],
            terminals: vec![false; n],
            root: None,
            kind: Kind::Pcspg,
            external: None,
            error: None,
        }
    }

    fn fail(&mut self, e: BuildError) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    fn check_vertex(&mut self, v: usize) -> bool {
        if v >= self.n {
            self.fail(BuildError::VertexOutOfRange(v, self.n));
            false
        } else {
            true
        }
    }

    /// Undirected edge: both orientations get weight `w`.
    pub fn edge(&mut self, i: usize, j: usize, w: T) -> &mut Self {
        self.arc_inner(i, j, w, true)
    }

    /// Directed arc `i -> j`. A missing reverse arc is blocked at build time
    /// with a prohibitively large weight so the adjacency stays symmetric.
    pub fn arc(&mut self, i: usize, j: usize, w: T) -> &mut Self {
        self.arc_inner(i, j, w, false)
    }

    fn arc_inner(&mut self, i: usize, j: usize, w: T, both: bool) -> &mut Self {
        if !self.check_vertex(i) || !self.check_vertex(j) {
            return self;
        }
        if i == j {
            self.fail(BuildError::SelfLoop(i));
            return self;
        }
        if !(w > T::zero()) {
            self.fail(BuildError::NonPositiveWeight {
                i,
                j,
                w: w.to_f64().unwrap_or(f64::NAN),
            });
            return self;
        }
        let (lo, hi) = (i.min(j) as u32, i.max(j) as u32);
        let idx = *self.slot.entry((lo, hi)).or_insert_with(|| {
            self.edges.push((lo, hi, None, None));
            self.edges.len() - 1
        });
        let forward = i as u32 == lo;
        let slots = &mut self.edges[idx];
        let set = |opt: &mut Option<T>, dup: &mut bool| {
            if opt.is_some() {
                *dup = true;
            } else {
                *opt = Some(w);
            }
        };
        let mut dup = false;
        if both || forward {
            set(&mut slots.2, &mut dup);
        }
        if both || !forward {
            set(&mut slots.3, &mut dup);
        }
        if dup {
            self.fail(BuildError::DuplicateEdge(i, j));
        }
        self
    }

    pub fn prize(&mut self, v: usize, p: T) -> &mut Self {
        if self.check_vertex(v) {
            if p < T::zero() {
                self.fail(BuildError::NegativePrize {
                    i: v,
                    p: p.to_f64().unwrap_or(f64::NAN),
                });
            } else {
                self.prizes[v] = p;
            }
        }
        self
    }

    /// Classic terminal; receives the prize sentinel at build time.
    pub fn terminal(&mut self, v: usize) -> &mut Self {
        if self.check_vertex(v) {
            self.terminals[v] = true;
        }
        self
    }

    pub fn root(&mut self, v: usize) -> &mut Self {
        if self.check_vertex(v) {
            self.root = Some(v as u32);
        }
        self
    }

    pub fn kind(&mut self, kind: Kind) -> &mut Self {
        self.kind = kind;
        self
    }

    pub fn external_ids(&mut self, ids: Vec<u64>) -> &mut Self {
        self.external = Some(ids);
        self
    }

    pub fn build(&mut self) -> Result<Instance<T>, BuildError> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        let n = self.n;
        let mut total_weight = T::zero();
        for &(_, _, a, b) in &self.edges {
            if let Some(w) = a {
                total_weight = total_weight + w;
            }
            if let Some(w) = b {
                total_weight = total_weight + w;
            }
        }
        let total_finite_prize = self
            .prizes
            .iter()
            .zip(&self.terminals)
            .filter(|(_, &t)| !t)
            .fold(T::zero(), |a, (&p, _)| a + p);
        let blocked = total_weight + total_finite_prize + T::one();
        let sentinel = total_weight + total_finite_prize + T::from_f64(2.0).unwrap();

        let mut ends = Vec::with_capacity(self.edges.len() * 2);
        let mut weights = Vec::with_capacity(self.edges.len() * 2);
        for &(lo, hi, wf, wb) in &self.edges {
            ends.push((lo, hi));
            weights.push(wf.unwrap_or(blocked));
            ends.push((hi, lo));
            weights.push(wb.unwrap_or(blocked));
        }

        let mut deg = vec![0u32; n];
        for &(t, _) in &ends {
            deg[t as usize] += 1;
        }
        let mut adj_off = vec![0u32; n + 1];
        for v in 0..n {
            adj_off[v + 1] = adj_off[v] + deg[v];
        }
        let mut cursor = adj_off.clone();
        let mut adj = vec![(0u32, 0u32); ends.len()];
        for (oid, &(t, h)) in ends.iter().enumerate() {
            let c = cursor[t as usize] as usize;
            adj[c] = (h, oid as u32);
            cursor[t as usize] += 1;
        }

        let mut prizes = self.prizes.clone();
        for (v, &t) in self.terminals.iter().enumerate() {
            if t {
                prizes[v] = sentinel;
            }
        }

        Ok(Instance {
            n,
            adj_off,
            adj,
            ends,
            weights,
            prizes,
            terminal: self.terminals.clone(),
            root: self.root,
            kind: self.kind,
            external: self
                .external
                .clone()
                .unwrap_or_else(|| (1..=n as u64).collect()),
            sentinel,
            total_weight,
            total_finite_prize,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_symmetric_adjacency() {
        let inst: Instance<f64> = Instance::builder(3)
            .edge(0, 1, 1.0)
            .edge(1, 2, 2.5)
            .prize(2, 4.0)
            .build()
            .unwrap();
        assert_eq!(inst.num_vertices(), 3);
        assert_eq!(inst.num_edges(), 2);
        for v in 0..3 {
            for &(nb, oid) in inst.neighbors(v) {
                assert!(inst
                    .neighbors(nb as usize)
                    .iter()
                    .any(|&(b, _)| b as usize == v));
                assert_eq!(inst.ends(oid as usize).0, v);
                assert_eq!(inst.ends(oid as usize).1, nb as usize);
            }
        }
        let oid = inst.oriented_id(2, 1).unwrap();
        assert_eq!(inst.weight(oid), 2.5);
        assert_eq!(inst.weight(inst.reverse(oid)), 2.5);
    }

    #[test]
    fn asymmetric_arcs() {
        let inst: Instance<f64> = Instance::builder(2)
            .arc(0, 1, 1.0)
            .arc(1, 0, 3.0)
            .build()
            .unwrap();
        let up = inst.oriented_id(0, 1).unwrap();
        assert_eq!(inst.weight(up), 1.0);
        assert_eq!(inst.weight(inst.reverse(up)), 3.0);
        assert!(!inst.is_symmetric());
    }

    #[test]
    fn one_sided_arc_blocks_reverse() {
        let inst: Instance<f64> = Instance::builder(2).arc(0, 1, 1.0).build().unwrap();
        let up = inst.oriented_id(0, 1).unwrap();
        assert_eq!(inst.weight(up), 1.0);
        assert!(inst.weight(inst.reverse(up)) > inst.total_weight());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Instance::<f64>::builder(2)
                .edge(0, 1, 1.0)
                .edge(1, 0, 2.0)
                .build()
                .unwrap_err(),
            BuildError::DuplicateEdge(1, 0)
        );
        assert!(matches!(
            Instance::<f64>::builder(2).edge(0, 1, 0.0).build(),
            Err(BuildError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Instance::<f64>::builder(2).edge(0, 2, 1.0).build(),
            Err(BuildError::VertexOutOfRange(2, 2))
        ));
    }

    #[test]
    fn sentinel_dominates_everything() {
        let inst: Instance<f64> = Instance::builder(3)
            .edge(0, 1, 10.0)
            .edge(1, 2, 20.0)
            .prize(1, 7.0)
            .terminal(2)
            .build()
            .unwrap();
        assert!(inst.is_terminal(2));
        assert!(inst.prize(2) > inst.total_weight() + inst.total_finite_prize() + 1.0);
        assert_eq!(inst.total_finite_prize(), 7.0);
        assert_eq!(inst.profitable(), vec![1, 2]);
    }
}
