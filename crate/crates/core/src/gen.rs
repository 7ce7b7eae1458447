//! Benchmark instance generators: grid lattices, preferential-attachment
//! scale-free graphs and random connected graphs. All draws come from a
//! seeded ChaCha stream, so equal seeds give identical instances.

use crate::graph::{Instance, Kind};
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("requested {want} terminals but the graph has {have} vertices")]
    TooManyTerminals { want: usize, have: usize },
    #[error("invalid generator parameters: {0}")]
    BadSpec(String),
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// 1 for a 2d lattice.
    pub nz: usize,
    pub terminals: usize,
    /// `Some((lo, hi))` draws prizes uniformly and produces a PCSPG;
    /// `None` marks classic terminals (SPG).
    pub prize_range: Option<(f64, f64)>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ScaleFreeSpec {
    pub n: usize,
    /// Attachment count; the initial clique has `m` vertices.
    pub m: usize,
    pub terminals: usize,
    pub prize_range: Option<(f64, f64)>,
    pub seed: u64,
}

fn positive_unit<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    let w: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    T::from_f64(w).unwrap()
}

fn assign_terminals<T: Scalar>(
    b: &mut crate::graph::InstanceBuilder<T>,
    n: usize,
    count: usize,
    prize_range: Option<(f64, f64)>,
    rng: &mut ChaCha8Rng,
) -> Result<(), GenError> {
    if count > n {
        return Err(GenError::TooManyTerminals { want: count, have: n });
    }
    let picks = rand::seq::index::sample(rng, n, count);
    if let Some((lo, hi)) = prize_range {
        b.kind(Kind::Pcspg);
        for v in picks {
            let p = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            b.prize(v, T::from_f64(p).unwrap());
        }
    } else {
        b.kind(Kind::Spg);
        for v in picks {
            b.terminal(v);
        }
    }
    Ok(())
}

/// `nx * ny * nz` lattice with nearest-neighbor edges and uniform `[0, 1]`
/// weights.
pub fn grid<T: Scalar>(spec: &GridSpec) -> Result<Instance<T>, GenError> {
    let (nx, ny, nz) = (spec.nx, spec.ny, spec.nz.max(1));
    if nx == 0 || ny == 0 {
        return Err(GenError::BadSpec("grid dimensions must be positive".into()));
    }
    let n = nx * ny * nz;
    let id = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = Instance::<T>::builder(n);
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if x + 1 < nx {
                    b.edge(id(x, y, z), id(x + 1, y, z), positive_unit(&mut rng));
                }
                if y + 1 < ny {
                    b.edge(id(x, y, z), id(x, y + 1, z), positive_unit(&mut rng));
                }
                if z + 1 < nz {
                    b.edge(id(x, y, z), id(x, y, z + 1), positive_unit(&mut rng));
                }
            }
        }
    }
    assign_terminals(&mut b, n, spec.terminals, spec.prize_range, &mut rng)?;
    Ok(b.build().expect("generated grid is well-formed"))
}

/// Barabási-Albert preferential attachment: a clique on `m` vertices, then
/// each new vertex attaches to `m` distinct existing vertices with
/// degree-proportional probability. Edge count is `C(m, 2) + (n - m) * m`.
pub fn scale_free<T: Scalar>(spec: &ScaleFreeSpec) -> Result<Instance<T>, GenError> {
    let (n, m) = (spec.n, spec.m);
    if m == 0 || n < m {
        return Err(GenError::BadSpec(format!(
            "need n >= m >= 1, got n = {n}, m = {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = Instance::<T>::builder(n);
    // one endpoint entry per edge side keeps draws degree-proportional
    let mut endpoints: Vec<usize> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            b.edge(i, j, positive_unit(&mut rng));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        while targets.len() < m {
            let pick = if endpoints.is_empty() {
                rng.gen_range(0..v)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &u in &targets {
            b.edge(v, u, positive_unit(&mut rng));
            endpoints.push(v);
            endpoints.push(u);
        }
    }
    assign_terminals(&mut b, n, spec.terminals, spec.prize_range, &mut rng)?;
    Ok(b.build().expect("generated scale-free graph is well-formed"))
}

/// Random connected graph: a uniform random recursive tree plus `extra`
/// random chords, uniform `[0, 1]` weights, no prizes, no root.
pub fn random_connected<T: Scalar>(n: usize, extra: usize, seed: u64) -> Instance<T> {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Instance::<T>::builder(n);
    let mut present: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for v in 1..n {
        let p = rng.gen_range(0..v);
        b.edge(v, p, positive_unit(&mut rng));
        present.insert((p.min(v), p.max(v)));
    }
    let mut added = 0;
    let max_edges = n * (n - 1) / 2;
    let mut attempts = 0;
    while added < extra && present.len() < max_edges && attempts < 50 * (extra + 1) {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            b.edge(u, v, positive_unit(&mut rng));
            added += 1;
        }
    }
    b.build().expect("generated random graph is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_node_and_edge_counts() {
        let spec = GridSpec {
            nx: 4,
            ny: 3,
            nz: 2,
            terminals: 5,
            prize_range: None,
            seed: 7,
        };
        let inst: Instance<f64> = grid(&spec).unwrap();
        assert_eq!(inst.num_vertices(), 24);
        // per layer: 3*(4-1) + 4*(3-1) = 17 edges, plus 12 vertical
        assert_eq!(inst.num_edges(), 2 * 17 + 12);
        assert_eq!(inst.terminals().len(), 5);
        assert_eq!(inst.kind(), Kind::Spg);
        assert!(inst.weights().iter().all(|&w| w > 0.0 && w <= 1.0));
    }

    #[test]
    fn scale_free_edge_count_formula() {
        let spec = ScaleFreeSpec {
            n: 200,
            m: 3,
            terminals: 10,
            prize_range: Some((0.0, 15.0)),
            seed: 11,
        };
        let inst: Instance<f64> = scale_free(&spec).unwrap();
        assert_eq!(inst.num_vertices(), 200);
        assert_eq!(inst.num_edges(), 3 + (200 - 3) * 3);
        assert_eq!(inst.kind(), Kind::Pcspg);
        assert_eq!(inst.profitable().len(), 10);
    }

    #[test]
    fn determinism_under_seed() {
        let spec = ScaleFreeSpec {
            n: 60,
            m: 2,
            terminals: 6,
            prize_range: Some((0.0, 5.0)),
            seed: 3,
        };
        let a: Instance<f64> = scale_free(&spec).unwrap();
        let b: Instance<f64> = scale_free(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_connected_is_connected() {
        let inst: Instance<f64> = random_connected(30, 15, 5);
        assert_eq!(inst.num_edges(), 29 + 15);
        // BFS reach
        let mut seen = vec![false; 30];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for &(nb, _) in inst.neighbors(v) {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    stack.push(nb as usize);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn too_many_terminals_is_an_error() {
        let spec = GridSpec {
            nx: 2,
            ny: 2,
            nz: 1,
            terminals: 9,
            prize_range: None,
            seed: 0,
        };
        assert_eq!(
            grid::<f64>(&spec).unwrap_err(),
            GenError::TooManyTerminals { want: 9, have: 4 }
        );
    }
}
