//! Reinforced Max-Sum iteration over per-edge depth variables.
//!
//! Per oriented edge `(i, j)` the state holds a cavity field `h_ij` over
//! depths `{-D..D}` and a reinforced local-field accumulator `H_ij`. One
//! iteration is a sweep (recompute every cavity field, normal or flat model)
//! followed by the reinforcement step
//! `H'_ij(d) = h'_ij(d) + h'_ji(-d) + gamma_t * H_ij(d)` with
//! `gamma_t = gamma1 * t`; the `gamma_t * H` term also enters the next sweep
//! additively on each incoming edge, which bootstraps the fields toward a
//! consistent configuration.

mod update;

use crate::graph::{DepthMode, Instance, Representation};
use crate::scalar::{is_neg_inf, neg_inf, sat_add, sat_scale, sat_sub, Scalar};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use update::Scratch;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("depth bound must be at least 1, got {0}")]
    BadDepth(i32),
    #[error("the engine needs a rooted instance")]
    NoRoot,
}

/// Message schedule. `Sequential` updates vertices in place in fixed order
/// (the reference schedule); `Synchronous` computes every message from the
/// previous iteration's snapshot. Both share fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepSchedule {
    #[default]
    Sequential,
    Synchronous,
}

#[derive(Debug, Clone)]
pub struct EngineConfig<T> {
    pub depth: i32,
    pub mode: DepthMode,
    /// Reinforcement slope; `gamma_t = gamma1 * t`.
    pub gamma1: T,
    pub seed: u64,
    pub schedule: SweepSchedule,
}

impl<T: Scalar> EngineConfig<T> {
    pub fn new(depth: i32, mode: DepthMode, gamma1: T, seed: u64) -> Self {
        EngineConfig {
            depth,
            mode,
            gamma1,
            seed,
            schedule: SweepSchedule::Sequential,
        }
    }
}

/// Mutable Max-Sum state: single-writer during sweeps; take a
/// [`FieldSnapshot`] between sweeps to hand fields to another context.
pub struct EngineState<T> {
    depth: i32,
    width: usize,
    mode: DepthMode,
    gamma1: T,
    schedule: SweepSchedule,
    t: usize,
    /// Noised oriented weights (original + uniform `[0, 1e-9 * w_max]`).
    w: Vec<T>,
    /// Cavity fields, row per oriented edge, width `2D + 1`, max entry 0.
    h: Vec<T>,
    /// Double buffer for the synchronous schedule.
    h_back: Vec<T>,
    /// Reinforced local fields, same layout.
    hl: Vec<T>,
    ops: u64,
    scratch: Scratch<T>,
}

impl<T: Scalar> EngineState<T> {
    /// Fresh state: zero (hence normalized) messages, zero accumulators,
    /// per-edge weight noise drawn from the seed.
    pub fn new(inst: &Instance<T>, cfg: EngineConfig<T>) -> Result<Self, EngineError> {
        if cfg.depth < 1 {
            return Err(EngineError::BadDepth(cfg.depth));
        }
        if inst.root().is_none() {
            return Err(EngineError::NoRoot);
        }
        let width = (2 * cfg.depth + 1) as usize;
        let rows = inst.num_oriented();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let w_max = inst
            .weights()
            .iter()
            .fold(T::zero(), |a, &w| if w > a { w } else { a });
        let eps = T::from_f64(1e-9).unwrap() * w_max;
        let w = inst
            .weights()
            .iter()
            .map(|&w| w + T::from_f64(rng.gen::<f64>()).unwrap() * eps)
            .collect();
        Ok(EngineState {
            depth: cfg.depth,
            width,
            mode: cfg.mode,
            gamma1: cfg.gamma1,
            schedule: cfg.schedule,
            t: 0,
            w,
            h: vec![T::zero(); rows * width],
            h_back: Vec::new(),
            hl: vec![T::zero(); rows * width],
            ops: 0,
            scratch: Scratch::new(),
        })
    }

    pub fn depth(&self) -> i32 {
        self.depth
    }

    pub fn mode(&self) -> DepthMode {
        self.mode
    }

    pub fn iteration(&self) -> usize {
        self.t
    }

    /// `gamma_t = gamma1 * t` for the current iteration counter.
    pub fn gamma_t(&self) -> T {
        self.gamma1 * T::from_usize(self.t).unwrap()
    }

    /// Elementary update operations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn noised_weights(&self) -> &[T] {
        &self.w
    }

    pub fn message_row(&self, oriented: usize) -> &[T] {
        &self.h[oriented * self.width..(oriented + 1) * self.width]
    }

    pub fn local_row(&self, oriented: usize) -> &[T] {
        &self.hl[oriented * self.width..(oriented + 1) * self.width]
    }

    /// Message value `h_ij(d)` by oriented edge id.
    pub fn message(&self, oriented: usize, d: i32) -> T {
        self.message_row(oriented)[(d + self.depth) as usize]
    }

    pub fn local(&self, oriented: usize, d: i32) -> T {
        self.local_row(oriented)[(d + self.depth) as usize]
    }

    /// Overwrites one message row (testing and experimentation hook).
    pub fn set_message_row(&mut self, oriented: usize, values: &[T]) {
        assert_eq!(values.len(), self.width);
        self.h[oriented * self.width..(oriented + 1) * self.width].copy_from_slice(values);
    }

    pub fn set_local_row(&mut self, oriented: usize, values: &[T]) {
        assert_eq!(values.len(), self.width);
        self.hl[oriented * self.width..(oriented + 1) * self.width].copy_from_slice(values);
    }

    /// Forces the iteration counter (testing and experimentation hook).
    pub fn set_iteration(&mut self, t: usize) {
        self.t = t;
    }

    fn commit_rows(&mut self, inst: &Instance<T>, v: usize) {
        let width = self.width;
        for (s, &(_, oid)) in inst.neighbors(v).iter().enumerate() {
            let src = &self.scratch.out[s * width..(s + 1) * width];
            let mut max = neg_inf::<T>();
            for &x in src {
                if is_neg_inf(max) || x > max {
                    max = x;
                }
            }
            debug_assert!(!is_neg_inf(max), "message row must keep a finite entry");
            let dst = &mut self.h[oid as usize * width..(oid as usize + 1) * width];
            for (d, &x) in dst.iter_mut().zip(src) {
                *d = sat_sub(x, max);
            }
        }
    }

    /// Recomputes all outgoing messages of one vertex from the current state
    /// (the sequential schedule's elementary step).
    pub fn recompute_vertex(&mut self, inst: &Instance<T>, v: usize) {
        let gamma = self.gamma_t();
        self.ops += update::compute_vertex_rows(
            inst,
            v,
            self.depth,
            self.mode,
            &self.w,
            gamma,
            &self.hl,
            &self.h,
            &mut self.scratch,
        );
        self.commit_rows(inst, v);
    }

    /// One full message sweep over all vertices.
    pub fn sweep(&mut self, inst: &Instance<T>) {
        match self.schedule {
            SweepSchedule::Sequential => {
                for v in 0..inst.num_vertices() {
                    self.recompute_vertex(inst, v);
                }
            }
            SweepSchedule::Synchronous => {
                self.h_back.clear();
                self.h_back.extend_from_slice(&self.h);
                let gamma = self.gamma_t();
                for v in 0..inst.num_vertices() {
                    self.ops += update::compute_vertex_rows(
                        inst,
                        v,
                        self.depth,
                        self.mode,
                        &self.w,
                        gamma,
                        &self.hl,
                        &self.h_back,
                        &mut self.scratch,
                    );
                    self.commit_rows(inst, v);
                }
            }
        }
    }

    /// Reinforcement step: fold fresh messages into the local-field
    /// accumulators and advance the iteration counter.
    pub fn reinforce(&mut self, inst: &Instance<T>) {
        let gamma = self.gamma_t();
        let width = self.width;
        let mut row = vec![neg_inf::<T>(); width];
        for oid in 0..inst.num_oriented() {
            let rev = inst.reverse(oid);
            let mut max = neg_inf::<T>();
            for (k, slot) in row.iter_mut().enumerate() {
                // h_ji(-d) sits at the mirrored index of the reverse row
                let mirrored = self.h[rev * width + (width - 1 - k)];
                let mut val = sat_add(self.h[oid * width + k], mirrored);
                if !gamma.is_zero() {
                    val = sat_add(val, sat_scale(gamma, self.hl[oid * width + k]));
                }
                *slot = val;
                if is_neg_inf(max) || val > max {
                    max = val;
                }
            }
            debug_assert!(!is_neg_inf(max));
            for (k, &val) in row.iter().enumerate() {
                self.hl[oid * width + k] = sat_sub(val, max);
            }
        }
        self.ops += (inst.num_oriented() * width) as u64;
        self.t += 1;
    }

    /// Sweep plus reinforcement.
    pub fn iterate(&mut self, inst: &Instance<T>) {
        self.sweep(inst);
        self.reinforce(inst);
    }

    /// Per-edge argmax of the local fields. Ties prefer depth 0, then the
    /// smaller magnitude, then the negative sign; the result is antisymmetric
    /// by construction but need not satisfy the compatibility rules before
    /// convergence.
    pub fn decisional(&self, inst: &Instance<T>) -> Representation {
        decisional_from(inst, &self.hl, self.depth)
    }

    /// Per-vertex presence fields `h_v(d)` for `d` in `0..=D`.
    pub fn node_fields(&self, inst: &Instance<T>) -> Vec<Vec<T>> {
        node_fields_from(inst, &self.h, self.depth)
    }

    /// Read-only copy of messages and local fields, the hand-off point to
    /// extraction heuristics.
    pub fn snapshot(&self) -> FieldSnapshot<T> {
        FieldSnapshot {
            depth: self.depth,
            width: self.width,
            h: self.h.clone(),
            hl: self.hl.clone(),
        }
    }
}

fn decisional_from<T: Scalar>(inst: &Instance<T>, local: &[T], bound: i32) -> Representation {
    let width = (2 * bound + 1) as usize;
    let mut rep = Representation::zero(inst, bound);
    for e in 0..inst.num_edges() {
        let row = &local[2 * e * width..(2 * e + 1) * width];
        let idx = |d: i32| (d + bound) as usize;
        let mut best_d = 0i32;
        let mut best = row[idx(0)];
        for m in 1..=bound {
            for d in [-m, m] {
                if row[idx(d)] > best {
                    best = row[idx(d)];
                    best_d = d;
                }
            }
        }
        rep.set_oriented(2 * e, best_d);
    }
    rep
}

fn node_fields_from<T: Scalar>(inst: &Instance<T>, msgs: &[T], bound: i32) -> Vec<Vec<T>> {
    let width = (2 * bound + 1) as usize;
    let get = |oid: usize, d: i32| -> T {
        if d.abs() > bound {
            neg_inf()
        } else {
            msgs[oid * width + (d + bound) as usize]
        }
    };
    let mut out = Vec::with_capacity(inst.num_vertices());
    for v in 0..inst.num_vertices() {
        let mut fields = vec![neg_inf::<T>(); bound as usize + 1];
        let nbrs = inst.neighbors(v);
        let mut zero = -inst.prize(v);
        for &(_, oid) in nbrs {
            zero = zero + get(inst.reverse(oid as usize), 0);
        }
        fields[0] = zero;
        for d in 1..=bound {
            // shared children-or-absent sum, then swap one neighbor into the
            // parent role
            let mut sum = T::zero();
            for &(_, oid) in nbrs {
                let rev = inst.reverse(oid as usize);
                sum = sum + get(rev, d + 1).max(get(rev, 0));
            }
            let mut best = neg_inf::<T>();
            for &(_, oid) in nbrs {
                let rev = inst.reverse(oid as usize);
                let swap = sat_add(sat_sub(get(rev, -d), get(rev, d + 1).max(get(rev, 0))), sum);
                if is_neg_inf(best) || swap > best {
                    best = swap;
                }
            }
            fields[d as usize] = best;
        }
        out.push(fields);
    }
    out
}

/// Immutable copy of the field state taken between sweeps.
#[derive(Debug, Clone)]
pub struct FieldSnapshot<T> {
    depth: i32,
    width: usize,
    h: Vec<T>,
    hl: Vec<T>,
}

impl<T: Scalar> FieldSnapshot<T> {
    pub fn depth(&self) -> i32 {
        self.depth
    }

    pub fn message(&self, oriented: usize, d: i32) -> T {
        self.h[oriented * self.width + (d + self.depth) as usize]
    }

    pub fn local(&self, oriented: usize, d: i32) -> T {
        self.hl[oriented * self.width + (d + self.depth) as usize]
    }

    pub fn local_row(&self, oriented: usize) -> &[T] {
        &self.hl[oriented * self.width..(oriented + 1) * self.width]
    }

    pub fn decisional(&self, inst: &Instance<T>) -> Representation {
        decisional_from(inst, &self.hl, self.depth)
    }

    pub fn node_fields(&self, inst: &Instance<T>) -> Vec<Vec<T>> {
        node_fields_from(inst, &self.h, self.depth)
    }
}

/// Convergence detector: fires when the decisional variables repeat for a
/// whole window of consecutive iterations.
#[derive(Debug, Clone)]
pub struct StabilityMonitor {
    window: usize,
    last: Option<Representation>,
    streak: usize,
}

impl Default for StabilityMonitor {
    fn default() -> Self {
        StabilityMonitor::new(50)
    }
}

impl StabilityMonitor {
    pub fn new(window: usize) -> Self {
        assert!(window >= 1);
        StabilityMonitor {
            window,
            last: None,
            streak: 0,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Feed the current decisional variables; true once they have stayed
    /// unchanged for the whole window.
    pub fn observe(&mut self, rep: &Representation) -> bool {
        match &self.last {
            Some(prev) if prev == rep => self.streak += 1,
            _ => {
                self.last = Some(rep.clone());
                self.streak = 1;
            }
        }
        self.streak >= self.window
    }

    pub fn streak(&self) -> usize {
        self.streak
    }
}
