//! Helpers shared by unit tests: small random subcubic graphs and a
//! brute-force isomorphism check for tiny instances.

use crate::graph::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random subcubic graph on `n` vertices (not necessarily
/// connected or regular).
pub fn random_subcubic(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(n as u64));
    let mut deg = vec![0usize; n];
    let mut edges: Vec<(u32, u32)> = Vec::new();
    if n >= 2 {
        let attempts = 3 * n;
        for _ in 0..attempts {
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
    Graph::subcubic_from_edges(n, &edges).expect("construction respects the degree bound")
}

/// Backtracking isomorphism test; fine for the tiny graphs used in tests.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let n = a.vertex_count();
    let mut deg_a: Vec<usize> = (0..n).map(|v| a.degree(v as u32)).collect();
    let mut deg_b: Vec<usize> = (0..n).map(|v| b.degree(v as u32)).collect();
    deg_a.sort_unstable();
    deg_b.sort_unstable();
    if deg_a != deg_b {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(a: &Graph, b: &Graph, v: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let n = a.vertex_count();
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || a.degree(v as u32) != b.degree(w as u32) {
                continue;
            }
            let ok = (0..v).all(|p| {
                a.has_edge(p as u32, v as u32) == b.has_edge(map[p] as u32, w as u32)
            });
            if ok {
                map[v] = w;
                used[w] = true;
                if extend(a, b, v + 1, map, used) {
                    return true;
                }
                used[w] = false;
                map[v] = usize::MAX;
            }
        }
        false
    }
    extend(a, b, 0, &mut map, &mut used)
}
