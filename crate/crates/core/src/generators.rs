//! Named graphs, random cubic instances, and the cubic completion that
//! reduces subcubic inputs to the cubic case.

use crate::graph::{Graph, GraphError};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("cycle requires n >= 3, got {0}")]
    CycleTooSmall(usize),
    #[error("random cubic graphs require even n >= 4, got {0}")]
    BadCubicOrder(usize),
    #[error("input graph is not subcubic: {0}")]
    NotSubcubic(#[from] GraphError),
}

/// The Petersen graph under the standard labeling: outer cycle `0..5`,
/// spokes `i - (i+5)`, inner edges `(5+i) - (5 + (i+2) mod 5)`.
pub fn petersen() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::subcubic_from_edges(10, &dedup(edges)).expect("fixed construction")
}

/// Complete graph on `n` vertices (used for K4 and small oracles).
pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).expect("fixed construction")
}

/// Cycle `C_n`, vertices `0..n` in cyclic order.
pub fn cycle(n: usize) -> Result<Graph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::CycleTooSmall(n));
    }
    let edges: Vec<(u32, u32)> =
        (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
    Ok(Graph::subcubic_from_edges(n, &edges).expect("cycle is 2-regular"))
}

/// Prism `C_n x K_2`: two copies of the cycle (`0..n` and `n..2n`) joined by
/// the perfect matching `i - (i+n)`. Cubic on `2n` vertices.
pub fn prism(n: usize) -> Result<Graph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::CycleTooSmall(n));
    }
    let n32 = n as u32;
    let mut edges = Vec::with_capacity(3 * n);
    for i in 0..n32 {
        edges.push((i, (i + 1) % n32));
        edges.push((n32 + i, n32 + (i + 1) % n32));
        edges.push((i, n32 + i));
    }
    Ok(Graph::subcubic_from_edges(2 * n, &edges).expect("prism is cubic"))
}

/// Random simple connected 3-regular graph by the pairing model.
///
/// Three points per vertex are matched uniformly at random; outcomes with
/// loops, parallel edges, or a disconnected result are rejected and retried.
/// Deterministic for a given `(n, seed)`. After 10,000 rejected pairings the
/// generator reseeds (still derived from `seed`) and keeps going.
pub fn random_cubic(n: usize, seed: u64) -> Result<Graph, GeneratorError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(GeneratorError::BadCubicOrder(n));
    }
    let mut round = 0u64;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(round.wrapping_mul(0x5851_f42d)));
        for _ in 0..10_000 {
            let mut points: Vec<u32> = (0..n as u32).flat_map(|v| [v, v, v]).collect();
            points.shuffle(&mut rng);
            if let Some(g) = pairing_to_graph(n, &points) {
                if g.is_connected() {
                    return Ok(g);
                }
            }
        }
        round += 1;
    }
}

fn pairing_to_graph(n: usize, points: &[u32]) -> Option<Graph> {
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(points.len() / 2);
    for pair in points.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v {
            return None;
        }
        edges.push((u, v));
    }
    edges.sort_unstable();
    if edges.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(Graph::subcubic_from_edges(n, &edges).expect("pairing respects degree 3"))
}

/// An induced embedding of a guest graph into a host graph.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub host: Graph,
    /// `image[v]` is the host id of guest vertex `v`.
    pub image: Vec<u32>,
}

impl Embedding {
    pub fn identity(g: &Graph) -> Self {
        Embedding { host: g.clone(), image: (0..g.vertex_count() as u32).collect() }
    }
}

/// Embeds a subcubic graph as an induced subgraph of a simple cubic host.
///
/// Each round takes two disjoint copies of the current graph and joins the
/// two copies of every deficient vertex by an edge, raising every positive
/// deficiency by exactly one degree. At most three rounds are needed, so the
/// host has at most `8 n` vertices. Copy 0 keeps the original ids, hence the
/// returned image is the identity map.
pub fn cubic_complete(g: &Graph) -> Result<Embedding, GeneratorError> {
    g.check_subcubic()?;
    let mut host = g.clone();
    for _ in 0..3 {
        if host.vertex_count() == 0 || host.is_regular(3) {
            break;
        }
        let n = host.vertex_count();
        let mut edges = Vec::with_capacity(2 * host.edge_count() + n);
        for (u, v) in host.edges() {
            edges.push((u, v));
            edges.push((u + n as u32, v + n as u32));
        }
        for v in 0..n as u32 {
            if host.degree(v) < 3 {
                edges.push((v, v + n as u32));
            }
        }
        host = Graph::subcubic_from_edges(2 * n, &edges).expect("doubling keeps degrees <= 3");
    }
    debug_assert!(host.vertex_count() == 0 || host.is_regular(3));
    Ok(Embedding { host, image: (0..g.vertex_count() as u32).collect() })
}

fn dedup(mut edges: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    for e in &mut edges {
        *e = (e.0.min(e.1), e.0.max(e.1));
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_distances;
    use crate::test_support::{isomorphic, random_subcubic};

    fn diameter(g: &Graph) -> usize {
        (0..g.vertex_count() as u32)
            .flat_map(|u| bfs_distances(g, u))
            .filter(|&d| d != usize::MAX)
            .max()
            .unwrap_or(0)
    }

    /// Shortest cycle length via per-edge deletion + BFS; usize::MAX if acyclic.
    fn girth(g: &Graph) -> usize {
        let mut best = usize::MAX;
        for (u, v) in g.edges() {
            let rest: Vec<(u32, u32)> =
                g.edges().into_iter().filter(|&e| e != (u, v)).collect();
            let h = Graph::from_edges(g.vertex_count(), &rest).unwrap();
            let d = bfs_distances(&h, u)[v as usize];
            if d != usize::MAX {
                best = best.min(d + 1);
            }
        }
        best
    }

    fn hypercube3() -> Graph {
        let mut edges = Vec::new();
        for u in 0..8u32 {
            for b in 0..3 {
                let v = u ^ (1 << b);
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(8, &edges).unwrap()
    }

    #[test]
    fn petersen_shape() {
        let g = petersen();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert!(g.is_regular(3));
        assert_eq!(diameter(&g), 2);
        assert_eq!(girth(&g), 5);
    }

    #[test]
    fn cycle_and_prism_shapes() {
        assert!(cycle(2).is_err());
        let c5 = cycle(5).unwrap();
        assert_eq!(c5.vertex_count(), 5);
        assert_eq!(c5.edge_count(), 5);
        assert!(c5.is_regular(2));

        let p3 = prism(3).unwrap();
        assert_eq!(p3.vertex_count(), 6);
        assert_eq!(p3.edge_count(), 9);
        assert!(p3.is_regular(3));

        assert!(isomorphic(&prism(4).unwrap(), &hypercube3()));
    }

    #[test]
    fn random_cubic_n4_is_k4() {
        for seed in [0, 1, 7, 42] {
            let g = random_cubic(4, seed).unwrap();
            assert_eq!(g.edges(), complete(4).edges());
        }
    }

    #[test]
    fn random_cubic_postconditions_and_determinism() {
        let g = random_cubic(10, 1).unwrap();
        assert!(g.is_regular(3));
        assert!(g.is_connected());
        let h = random_cubic(10, 1).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert!(random_cubic(5, 1).is_err());
        assert!(random_cubic(2, 1).is_err());
    }

    #[test]
    fn cubic_complete_single_vertex_gives_cube() {
        let g = Graph::from_edges(1, &[]).unwrap();
        let emb = cubic_complete(&g).unwrap();
        assert_eq!(emb.image, vec![0]);
        assert!(isomorphic(&emb.host, &hypercube3()));
    }

    #[test]
    fn cubic_complete_leaves_cubic_graphs_alone() {
        let k4 = complete(4);
        let emb = cubic_complete(&k4).unwrap();
        assert_eq!(emb.host.edges(), k4.edges());
        assert_eq!(emb.image, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cubic_complete_c6_gives_prism() {
        let c6 = cycle(6).unwrap();
        let emb = cubic_complete(&c6).unwrap();
        assert_eq!(emb.host.vertex_count(), 12);
        assert!(isomorphic(&emb.host, &prism(6).unwrap()));
    }

    #[test]
    fn cubic_complete_is_induced_and_connected() {
        for seed in 0..100u64 {
            let g = random_subcubic(2 + (seed as usize % 14), seed);
            let emb = cubic_complete(&g).unwrap();
            assert!(emb.host.vertex_count() == 0 || emb.host.is_regular(3));
            assert!(emb.host.vertex_count() <= 8 * g.vertex_count().max(1));
            for u in 0..g.vertex_count() as u32 {
                for v in 0..g.vertex_count() as u32 {
                    if u != v {
                        assert_eq!(
                            g.has_edge(u, v),
                            emb.host.has_edge(emb.image[u as usize], emb.image[v as usize]),
                            "embedding must be induced"
                        );
                    }
                }
            }
            if g.is_connected() && !g.is_regular(3) && g.vertex_count() > 0 {
                assert!(emb.host.is_connected());
            }
        }
    }

    #[test]
    fn cubic_complete_rejects_high_degree() {
        let star4 = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(cubic_complete(&star4).is_err());
    }
}
