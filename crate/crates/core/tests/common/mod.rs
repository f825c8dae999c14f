//! Helpers shared by the integration and acceptance suites.
#![allow(dead_code)]

use packing_color::graph::{bfs_distances, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random subcubic graph on `n` vertices (not necessarily
/// connected or regular).
pub fn random_subcubic(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(n as u64));
    let mut deg = vec![0usize; n];
    let mut edges: Vec<(u32, u32)> = Vec::new();
    if n >= 2 {
        for _ in 0..(3 * n) {
            let u = rng.gen_range(0..n as u32);
            let v = rng.gen_range(0..n as u32);
            if u == v || deg[u as usize] >= 3 || deg[v as usize] >= 3 {
                continue;
            }
            let (a, b) = (u.min(v), u.max(v));
            if edges.contains(&(a, b)) {
                continue;
            }
            deg[a as usize] += 1;
            deg[b as usize] += 1;
            edges.push((a, b));
        }
    }
    Graph::subcubic_from_edges(n, &edges).expect("degree bound respected")
}

pub fn diameter(g: &Graph) -> usize {
    (0..g.vertex_count() as u32)
        .flat_map(|u| bfs_distances(g, u))
        .filter(|&d| d != usize::MAX)
        .max()
        .unwrap_or(0)
}
