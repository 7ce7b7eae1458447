//! Goemans-Williamson growth and pruning for prize-collecting instances,
//! plus the field-guided variant that boosts prizes of vertices the engine
//! predicts in the tree and penalizes edges toward vertices it rejects.

use crate::engine::FieldSnapshot;
use crate::graph::{Instance, SolutionTree};
use crate::scalar::{is_neg_inf, neg_inf, Scalar};

struct Clusters<T> {
    parent: Vec<usize>,
    active: Vec<bool>,
    /// Remaining prize budget of the cluster rooted here.
    potential: Vec<T>,
    members: Vec<Vec<usize>>,
}

impl<T: Scalar> Clusters<T> {
    fn new(n: usize, root: usize, prizes: &[T]) -> Self {
        Clusters {
            parent: (0..n).collect(),
            active: (0..n).map(|v| v != root).collect(),
            potential: prizes.to_vec(),
            members: (0..n).map(|v| vec![v]).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn merge(&mut self, a: usize, b: usize, root_comp: &mut usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        debug_assert_ne!(ra, rb);
        self.parent[ra] = rb;
        self.potential[rb] = self.potential[rb] + self.potential[ra];
        let moved = std::mem::take(&mut self.members[ra]);
        self.members[rb].extend(moved);
        if ra == *root_comp {
            *root_comp = rb;
        }
        self.active[rb] = rb != *root_comp;
    }
}

/// Rooted Goemans-Williamson over explicit undirected edge weights (one per
/// undirected edge id) and prizes. The root's cluster stays inactive; growth
/// runs until no active cluster remains, then dead clusters hanging off the
/// tree by a single edge are pruned.
pub fn goemans_williamson<T: Scalar>(
    inst: &Instance<T>,
    edge_weights: &[T],
    prizes: &[T],
    root: usize,
) -> SolutionTree {
    let n = inst.num_vertices();
    let m = inst.num_edges();
    assert_eq!(edge_weights.len(), m);
    assert_eq!(prizes.len(), n);
    let mut cl = Clusters::new(n, root, prizes);
    let mut root_comp = root;
    let mut moat = vec![T::zero(); n];
    let mut merge_edges: Vec<usize> = Vec::new();
    let mut dead_sets: Vec<Vec<usize>> = Vec::new();

    let event_cap = 4 * n + 16;
    for _ in 0..event_cap {
        // cheapest edge event between distinct clusters with active growth
        let mut edge_pick: Option<(T, usize)> = None;
        for e in 0..m {
            let (u, v) = inst.ends(2 * e);
            let (cu, cv) = (cl.find(u), cl.find(v));
            if cu == cv {
                continue;
            }
            let speed = cl.active[cu] as usize + cl.active[cv] as usize;
            if speed == 0 {
                continue;
            }
            let slack = edge_weights[e] - moat[u] - moat[v];
            let dt = slack / T::from_usize(speed).unwrap();
            let better = match edge_pick {
                None => true,
                Some((best, _)) => dt < best,
            };
            if better {
                edge_pick = Some((dt, e));
            }
        }
        // earliest cluster death; ties toward the lowest member id
        let mut death_pick: Option<(T, usize)> = None;
        for v in 0..n {
            let c = cl.find(v);
            if c != v || !cl.active[c] {
                continue;
            }
            let dt = cl.potential[c];
            let low = *cl.members[c].iter().min().unwrap();
            let better = match death_pick {
                None => true,
                Some((best, at)) => {
                    dt < best || (dt == best && low < *cl.members[cl.find(at)].iter().min().unwrap())
                }
            };
            if better {
                death_pick = Some((dt, c));
            }
        }
        let Some((death_dt, death_c)) = death_pick else {
            break; // no active clusters: growth is over
        };
        let take_edge = match edge_pick {
            Some((edge_dt, _)) => edge_dt <= death_dt,
            None => false,
        };
        let dt = if take_edge {
            edge_pick.unwrap().0
        } else {
            death_dt
        }
        .max(T::zero());
        // advance all active moats and budgets by dt
        for v in 0..n {
            let c = cl.find(v);
            if cl.active[c] {
                moat[v] = moat[v] + dt;
            }
        }
        for v in 0..n {
            if cl.find(v) == v && cl.active[v] {
                cl.potential[v] = cl.potential[v] - dt;
            }
        }
        if take_edge {
            let e = edge_pick.unwrap().1;
            let (u, v) = inst.ends(2 * e);
            merge_edges.push(e);
            cl.merge(u, v, &mut root_comp);
        } else {
            cl.active[death_c] = false;
            dead_sets.push(cl.members[death_c].clone());
        }
    }

    // tree of the root's cluster
    let root_final = cl.find(root);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    for &e in &merge_edges {
        let (u, v) = inst.ends(2 * e);
        if cl.find(u) == root_final {
            adj[u].push((v, e));
            adj[v].push((u, e));
            in_tree[u] = true;
            in_tree[v] = true;
        }
    }
    // pruning stage: drop dead clusters connected by at most one tree edge
    let mut edge_alive = vec![true; m];
    loop {
        let mut changed = false;
        for set in dead_sets.iter().rev() {
            let live: Vec<usize> = set.iter().copied().filter(|&v| in_tree[v]).collect();
            if live.is_empty() || live.contains(&root) {
                continue;
            }
            let mut inside = vec![false; n];
            for &v in &live {
                inside[v] = true;
            }
            let mut crossing = 0;
            for &v in &live {
                for &(u, e) in &adj[v] {
                    if edge_alive[e] && in_tree[u] && !inside[u] {
                        crossing += 1;
                    }
                }
            }
            if crossing <= 1 {
                for &v in &live {
                    in_tree[v] = false;
                    for &(_, e) in &adj[v] {
                        edge_alive[e] = false;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // orient what survives from the root
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &(u, e) in &adj[v] {
            if edge_alive[e] && in_tree[u] && !seen[u] {
                seen[u] = true;
                parent[u] = Some(v as u32);
                stack.push(u);
            }
        }
    }
    // anything no longer reachable is dropped
    for v in 0..n {
        if !seen[v] {
            parent[v] = None;
        }
    }
    SolutionTree::new(inst, root, parent).expect("growth edges form a forest")
}

/// Field-guided Goemans-Williamson: vertices whose presence field
/// `max_{d>0} h_v(d) - h_v(0)` is positive get their prize raised by the
/// penalty constant, and edges touching vertices with a negative presence
/// field are penalized; the returned tree is scored against the original
/// instance by the caller.
pub fn extract_gw<T: Scalar>(inst: &Instance<T>, snap: &FieldSnapshot<T>) -> SolutionTree {
    let root = inst.root().expect("extraction needs a rooted instance");
    let big = inst.big_cost();
    let fields = snap.node_fields(inst);
    let presence: Vec<T> = (0..inst.num_vertices())
        .map(|v| {
            let best_pos = fields[v][1..]
                .iter()
                .cloned()
                .fold(neg_inf::<T>(), |a, x| if x > a { x } else { a });
            if is_neg_inf(best_pos) {
                -big
            } else {
                best_pos - fields[v][0]
            }
        })
        .collect();
    let prizes: Vec<T> = (0..inst.num_vertices())
        .map(|v| {
            if v == root || presence[v] > T::zero() {
                inst.prize(v) + big
            } else {
                inst.prize(v)
            }
        })
        .collect();
    let weights: Vec<T> = (0..inst.num_edges())
        .map(|e| {
            let (u, v) = inst.ends(2 * e);
            let w = inst.weight(2 * e).min(inst.weight(2 * e + 1));
            if presence[u] < T::zero() || presence[v] < T::zero() {
                w + big
            } else {
                w
            }
        })
        .collect();
    goemans_williamson(inst, &weights, &prizes, root)
}
