//! Amortized single-vertex message updates for the normal and flat depth
//! models.
//!
//! Recomputing all outgoing messages of a vertex costs `O(D * deg)`:
//! per-depth neighborhood sums are shared across targets and the restricted
//! maxima over "one distinguished neighbor" terms use the best two (or, for
//! the flat zero-depth case, best three) candidates so that excluding the
//! target neighbor never forces a rescan.

use crate::graph::{DepthMode, Instance};
use crate::scalar::{is_neg_inf, neg_inf, sat_add, sat_sub, sat_scale, Scalar};

pub(crate) struct Scratch<T> {
    /// Effective incoming fields, `deg x width`.
    eff: Vec<T>,
    /// Staged outgoing rows, `deg x width`.
    pub out: Vec<T>,
    /// Noised weight of the oriented edge (v -> neighbor) per slot.
    w_out: Vec<T>,
    s_pos: Vec<T>,
    s_neg: Vec<T>,
    a1: Vec<T>,
    a2: Vec<T>,
    a1k: Vec<usize>,
    child3: Vec<[(T, usize); 3]>,
    parent3: Vec<[(T, usize); 3]>,
}

impl<T: Scalar> Scratch<T> {
    pub fn new() -> Self {
        Scratch {
            eff: Vec::new(),
            out: Vec::new(),
            w_out: Vec::new(),
            s_pos: Vec::new(),
            s_neg: Vec::new(),
            a1: Vec::new(),
            a2: Vec::new(),
            a1k: Vec::new(),
            child3: Vec::new(),
            parent3: Vec::new(),
        }
    }

    fn reset(&mut self, deg: usize, width: usize, bound: usize) {
        let ninf = neg_inf::<T>();
        self.eff.clear();
        self.eff.resize(deg * width, T::zero());
        self.out.clear();
        self.out.resize(deg * width, ninf);
        self.w_out.clear();
        self.w_out.resize(deg, T::zero());
        self.s_pos.clear();
        self.s_pos.resize(bound + 1, T::zero());
        self.s_neg.clear();
        self.s_neg.resize(bound + 2, T::zero());
        self.a1.clear();
        self.a1.resize(bound + 2, ninf);
        self.a2.clear();
        self.a2.resize(bound + 2, ninf);
        self.a1k.clear();
        self.a1k.resize(bound + 2, usize::MAX);
        self.child3.clear();
        self.child3.resize(bound + 1, [(ninf, usize::MAX); 3]);
        self.parent3.clear();
        self.parent3.resize(bound + 1, [(ninf, usize::MAX); 3]);
    }
}

fn top3_offer<T: Scalar>(arr: &mut [(T, usize); 3], val: T, slot: usize) {
    if val > arr[0].0 {
        arr[2] = arr[1];
        arr[1] = arr[0];
        arr[0] = (val, slot);
    } else if val > arr[1].0 {
        arr[2] = arr[1];
        arr[1] = (val, slot);
    } else if val > arr[2].0 {
        arr[2] = (val, slot);
    }
}

fn top3_best_excluding<T: Scalar>(arr: &[(T, usize); 3], skip: usize) -> T {
    for &(v, s) in arr {
        if s != skip && s != usize::MAX {
            return v;
        }
    }
    neg_inf()
}

/// Best `child + parent` pair with distinct slots, both different from
/// `skip`. Some optimal pair always survives within the top three of each
/// role.
fn pair_best<T: Scalar>(child: &[(T, usize); 3], parent: &[(T, usize); 3], skip: usize) -> T {
    let mut best = neg_inf::<T>();
    for &(cv, cs) in child {
        if cs == skip || cs == usize::MAX {
            continue;
        }
        for &(pv, ps) in parent {
            if ps == skip || ps == usize::MAX || ps == cs {
                continue;
            }
            let v = sat_add(cv, pv);
            if is_neg_inf(best) || v > best {
                best = v;
            }
        }
    }
    best
}

/// Recomputes all outgoing rows of `v` into `scratch.out` (unnormalized).
/// Inputs are read from `msgs`; with `gamma > 0` each incoming message is
/// boosted by `gamma * local` on its edge. Returns an elementary-operation
/// count proportional to the work done.
#[allow(clippy::too_many_arguments)]
pub(crate) fn compute_vertex_rows<T: Scalar>(
    inst: &Instance<T>,
    v: usize,
    bound: i32,
    mode: DepthMode,
    weights: &[T],
    gamma: T,
    local: &[T],
    msgs: &[T],
    scratch: &mut Scratch<T>,
) -> u64 {
    let deg = inst.degree(v);
    if deg == 0 {
        return 0;
    }
    let width = (2 * bound + 1) as usize;
    let b = bound as usize;
    scratch.reset(deg, width, b);
    let mut ops = 0u64;

    let idx = |d: i32| (d + bound) as usize;
    let nbrs = inst.neighbors(v);
    for (s, &(_, oid)) in nbrs.iter().enumerate() {
        let in_row = inst.reverse(oid as usize) * width;
        let dst = &mut scratch.eff[s * width..(s + 1) * width];
        if gamma.is_zero() {
            dst.copy_from_slice(&msgs[in_row..in_row + width]);
        } else {
            for (k, slot) in dst.iter_mut().enumerate() {
                *slot = sat_add(msgs[in_row + k], sat_scale(gamma, local[in_row + k]));
            }
        }
        scratch.w_out[s] = weights[oid as usize];
    }
    ops += (deg * width) as u64;

    let eff = |sc: &Scratch<T>, s: usize, d: i32| -> T {
        if d.abs() > bound {
            neg_inf()
        } else {
            sc.eff[s * width + idx(d)]
        }
    };

    if Some(v) == inst.root() {
        // root rule: each neighbor is a depth-1 child or absent
        let mut sum = T::zero();
        for s in 0..deg {
            sum = sum + eff(scratch, s, 1).max(eff(scratch, s, 0));
        }
        for s in 0..deg {
            let val = sum - eff(scratch, s, 1).max(eff(scratch, s, 0));
            scratch.out[s * width + idx(0)] = val;
            scratch.out[s * width + idx(-1)] = val;
        }
        ops += (2 * deg) as u64;
        return ops;
    }

    let prize = inst.prize(v);
    let mut s00 = T::zero();
    for s in 0..deg {
        s00 = s00 + eff(scratch, s, 0);
    }
    // children at depth d+1 or absent, for the "v at depth d" rows
    let pmax = |sc: &Scratch<T>, s: usize, d: i32| -> T { eff(sc, s, d + 1).max(eff(sc, s, 0)) };
    for d in 1..=bound {
        let mut sum = T::zero();
        for s in 0..deg {
            sum = sum + pmax(scratch, s, d);
        }
        scratch.s_pos[d as usize] = sum;
    }
    // "v is a parent of a depth-dd child" rows; dd = bound + 1 is the
    // virtual row feeding only the zero-depth case
    let qmax = |sc: &Scratch<T>, s: usize, dd: i32| -> T { eff(sc, s, 0).max(eff(sc, s, dd)) };
    for dd in 2..=bound + 1 {
        let mut sum = T::zero();
        let (mut a1, mut a2, mut a1k) = (neg_inf::<T>(), neg_inf::<T>(), usize::MAX);
        for s in 0..deg {
            let q = qmax(scratch, s, dd);
            sum = sum + q;
            let a = sat_sub(sat_sub(eff(scratch, s, -(dd - 1)), scratch.w_out[s]), q);
            if is_neg_inf(a1) || a > a1 {
                a2 = a1;
                a1 = a;
                a1k = s;
            } else if is_neg_inf(a2) || a > a2 {
                a2 = a;
            }
        }
        let dd = dd as usize;
        scratch.s_neg[dd] = sum;
        scratch.a1[dd] = a1;
        scratch.a2[dd] = a2;
        scratch.a1k[dd] = a1k;
    }
    ops += (2 * (b + 1) * deg) as u64;

    for s in 0..deg {
        let wj = scratch.w_out[s];
        for d in 1..=bound {
            let val = scratch.s_pos[d as usize] - pmax(scratch, s, d) - wj;
            scratch.out[s * width + idx(d)] = val;
        }
        let mut best_neg = neg_inf::<T>();
        for dd in 2..=bound + 1 {
            let ddu = dd as usize;
            let a = if scratch.a1k[ddu] == s {
                scratch.a2[ddu]
            } else {
                scratch.a1[ddu]
            };
            let val = sat_add(scratch.s_neg[ddu] - qmax(scratch, s, dd), a);
            if dd <= bound {
                scratch.out[s * width + idx(-dd)] = val;
            }
            if is_neg_inf(best_neg) || val > best_neg {
                best_neg = val;
            }
        }
        let empty = s00 - eff(scratch, s, 0) - prize;
        scratch.out[s * width + idx(0)] = empty.max(best_neg);
    }
    ops += (deg * width) as u64;

    if mode == DepthMode::Flat && prize.is_zero() {
        // pass-through candidates per depth: same-depth child role
        // h(d) - h(0) and parent role h(-d) - w - h(0)
        for d in 1..=bound {
            let du = d as usize;
            for s in 0..deg {
                let g = sat_sub(eff(scratch, s, d), eff(scratch, s, 0));
                let m = sat_sub(
                    sat_sub(eff(scratch, s, -d), scratch.w_out[s]),
                    eff(scratch, s, 0),
                );
                top3_offer(&mut scratch.child3[du], g, s);
                top3_offer(&mut scratch.parent3[du], m, s);
            }
        }
        ops += (2 * b * deg) as u64;
        for s in 0..deg {
            let base = s00 - eff(scratch, s, 0);
            let wj = scratch.w_out[s];
            let mut f0 = neg_inf::<T>();
            for d in 1..=bound {
                let du = d as usize;
                let fpos = sat_add(base - wj, top3_best_excluding(&scratch.child3[du], s));
                let row = &mut scratch.out[s * width..(s + 1) * width];
                row[idx(d)] = row[idx(d)].max(fpos);
                let fneg = sat_add(base, top3_best_excluding(&scratch.parent3[du], s));
                row[idx(-d)] = row[idx(-d)].max(fneg);
                let p = pair_best(&scratch.child3[du], &scratch.parent3[du], s);
                if is_neg_inf(f0) || p > f0 {
                    f0 = p;
                }
            }
            let row = &mut scratch.out[s * width..(s + 1) * width];
            row[idx(0)] = row[idx(0)].max(sat_add(base, f0));
        }
        ops += (deg * (3 * b + 1)) as u64;
    }

    ops
}
