//! Immutable simple undirected graphs with dense integer vertex ids,
//! distance queries truncated at small radii, and the 1-subdivision
//! transform.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(u32, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
    #[error("vertex {0} has degree {1}, exceeding the subcubic bound 3")]
    DegreeExceeded(u32, usize),
}

/// Immutable simple undirected graph. Vertices are ids `0..n`; adjacency
/// lists are kept sorted so neighbor iteration is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    /// Builds a simple graph from an edge list. Rejects loops and duplicates.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v as usize >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adj[u as usize].contains(&v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, adj, m: edges.len() })
    }

    /// Like [`Graph::from_edges`], additionally enforcing max degree 3.
    pub fn subcubic_from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let g = Self::from_edges(n, edges)?;
        g.check_subcubic()?;
        Ok(g)
    }

    pub fn check_subcubic(&self) -> Result<(), GraphError> {
        for v in 0..self.n {
            if self.adj[v].len() > 3 {
                return Err(GraphError::DegreeExceeded(v as u32, self.adj[v].len()));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    /// Checked variant of [`Graph::neighbors`].
    pub fn try_neighbors(&self, u: u32) -> Result<&[u32], GraphError> {
        if u as usize >= self.n {
            return Err(GraphError::VertexOutOfRange(u, self.n));
        }
        Ok(&self.adj[u as usize])
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn is_regular(&self, d: usize) -> bool {
        (0..self.n).all(|v| self.adj[v].len() == d)
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n as u32 {
            for &v in &self.adj[u as usize] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// True iff a path of length at most `d` joins `u` and `v`.
    ///
    /// Convenience wrapper that allocates a fresh scratch; callers issuing
    /// many queries should hold a [`BfsScratch`] instead.
    pub fn distance_leq(&self, u: u32, v: u32, d: usize) -> Result<bool, GraphError> {
        let mut scratch = BfsScratch::new(self.n);
        scratch.distance_leq(self, u, v, d)
    }
}

/// Reusable context for truncated BFS queries.
///
/// Visited marks are generation stamps, so consecutive queries skip the
/// `O(n)` clearing cost. One scratch per caller; not shared across threads.
#[derive(Debug, Clone)]
pub struct BfsScratch {
    stamp: Vec<u64>,
    generation: u64,
    queue: Vec<u32>,
}

impl BfsScratch {
    pub fn new(n: usize) -> Self {
        BfsScratch { stamp: vec![0; n], generation: 0, queue: Vec::new() }
    }

    fn ensure(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
    }

    /// True iff `d_G(u, v) <= d`. Truncated BFS from `u`, O(Δ^d) per query.
    pub fn distance_leq(
        &mut self,
        g: &Graph,
        u: u32,
        v: u32,
        d: usize,
    ) -> Result<bool, GraphError> {
        if u as usize >= g.n {
            return Err(GraphError::VertexOutOfRange(u, g.n));
        }
        if v as usize >= g.n {
            return Err(GraphError::VertexOutOfRange(v, g.n));
        }
        if u == v {
            return Ok(true);
        }
        if d == 0 {
            return Ok(false);
        }
        self.ensure(g.n);
        self.generation += 1;
        let gen = self.generation;
        self.queue.clear();
        self.queue.push(u);
        self.stamp[u as usize] = gen;
        let mut depth = 0;
        let mut level_start = 0;
        while depth < d {
            let level_end = self.queue.len();
            if level_start == level_end {
                break;
            }
            for qi in level_start..level_end {
                let x = self.queue[qi];
                for &w in &g.adj[x as usize] {
                    if w == v {
                        return Ok(true);
                    }
                    if self.stamp[w as usize] != gen {
                        self.stamp[w as usize] = gen;
                        self.queue.push(w);
                    }
                }
            }
            level_start = level_end;
            depth += 1;
        }
        Ok(false)
    }

    /// All vertices within distance `d` of `u` (including `u`), sorted.
    pub fn ball(&mut self, g: &Graph, u: u32, d: usize, out: &mut Vec<u32>) {
        self.ensure(g.n);
        self.generation += 1;
        let gen = self.generation;
        self.queue.clear();
        self.queue.push(u);
        self.stamp[u as usize] = gen;
        let mut depth = 0;
        let mut level_start = 0;
        while depth < d {
            let level_end = self.queue.len();
            if level_start == level_end {
                break;
            }
            for qi in level_start..level_end {
                let x = self.queue[qi];
                for &w in &g.adj[x as usize] {
                    if self.stamp[w as usize] != gen {
                        self.stamp[w as usize] = gen;
                        self.queue.push(w);
                    }
                }
            }
            level_start = level_end;
            depth += 1;
        }
        out.clear();
        out.extend_from_slice(&self.queue);
        out.sort_unstable();
    }
}

/// Full BFS distances from `src`; `usize::MAX` marks unreachable vertices.
pub fn bfs_distances(g: &Graph, src: u32) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[src as usize] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = dist[u as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Tag recording where a subdivision vertex came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Vertex of the base graph, same id.
    Original(u32),
    /// Midpoint of base edge `(u, v)` with `u < v`.
    Subdivision(u32, u32),
}

/// The 1-subdivision `D(G)`: every edge replaced by a path of two edges.
///
/// Original vertices keep their ids; the midpoint of the `i`-th base edge
/// (edges sorted lexicographically) gets id `n_base + i`.
#[derive(Debug, Clone)]
pub struct SubdividedGraph {
    pub base: Graph,
    pub graph: Graph,
    pub origin_map: Vec<Origin>,
}

pub fn subdivide(g: &Graph) -> SubdividedGraph {
    let n = g.vertex_count();
    let base_edges = g.edges();
    let mut origin_map: Vec<Origin> = (0..n as u32).map(Origin::Original).collect();
    let mut edges = Vec::with_capacity(2 * base_edges.len());
    for (i, &(u, v)) in base_edges.iter().enumerate() {
        let mid = (n + i) as u32;
        origin_map.push(Origin::Subdivision(u, v));
        edges.push((u, mid));
        edges.push((mid, v));
    }
    let graph = Graph::from_edges(n + base_edges.len(), &edges)
        .expect("subdivision of a simple graph is simple");
    SubdividedGraph { base: g.clone(), graph, origin_map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn distance_leq_petersen_diameter_two() {
        let g = generators::petersen();
        let mut scratch = BfsScratch::new(g.vertex_count());
        assert!(scratch.distance_leq(&g, 0, 7, 2).unwrap());
        // every pair is within distance 2
        for u in 0..10 {
            for v in 0..10 {
                assert!(scratch.distance_leq(&g, u, v, 2).unwrap());
            }
        }
    }

    #[test]
    fn distance_leq_zero_distance_identity() {
        let g = generators::cycle(5).unwrap();
        assert!(g.distance_leq(3, 3, 0).unwrap());
    }

    #[test]
    fn distance_leq_c6_antipodal() {
        let g = generators::cycle(6).unwrap();
        // brute-force BFS oracle
        assert_eq!(bfs_distances(&g, 0)[3], 3);
        assert!(!g.distance_leq(0, 3, 2).unwrap());
        assert!(g.distance_leq(0, 3, 3).unwrap());
    }

    #[test]
    fn distance_leq_rejects_bad_ids() {
        let g = generators::cycle(4).unwrap();
        assert!(g.distance_leq(0, 9, 1).is_err());
        assert!(g.distance_leq(9, 0, 1).is_err());
    }

    #[test]
    fn distance_leq_agrees_with_full_bfs() {
        // deterministic sweep over random subcubic graphs up to n = 64
        for seed in 0..20u64 {
            let g = crate::test_support::random_subcubic(8 + 7 * (seed as usize % 9), seed);
            let n = g.vertex_count();
            let mut scratch = BfsScratch::new(n);
            for u in 0..n as u32 {
                let dist = bfs_distances(&g, u);
                for v in 0..n as u32 {
                    for d in 0..5 {
                        let expect = dist[v as usize] <= d;
                        assert_eq!(scratch.distance_leq(&g, u, v, d).unwrap(), expect);
                    }
                }
            }
        }
    }

    proptest::proptest! {
        /// Truncated BFS agrees with full BFS distances on random subcubic
        /// graphs for every pair and radius.
        #[test]
        fn distance_leq_matches_bfs_random(n in 1usize..24, seed in 0u64..5000) {
            let g = crate::test_support::random_subcubic(n, seed);
            let mut scratch = BfsScratch::new(n);
            for u in 0..n as u32 {
                let dist = bfs_distances(&g, u);
                for v in 0..n as u32 {
                    for d in 0..6usize {
                        let expect = dist[v as usize] <= d;
                        proptest::prop_assert_eq!(
                            scratch.distance_leq(&g, u, v, d).unwrap(),
                            expect
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn neighborhood_examples() {
        let g = generators::petersen();
        assert_eq!(g.try_neighbors(0).unwrap(), &[1, 4, 5]);

        let isolated = Graph::from_edges(1, &[]).unwrap();
        assert!(isolated.try_neighbors(0).unwrap().is_empty());

        let k4 = generators::complete(4);
        for u in 0..4u32 {
            let nbrs: Vec<u32> = (0..4).filter(|&v| v != u).collect();
            assert_eq!(k4.try_neighbors(u).unwrap(), nbrs.as_slice());
        }
        assert!(k4.try_neighbors(4).is_err());
    }

    #[test]
    fn from_edges_rejects_malformed() {
        assert_eq!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::from_edges(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(Graph::from_edges(2, &[(0, 2)]), Err(GraphError::VertexOutOfRange(2, 2)));
        let star4 = [(0, 1), (0, 2), (0, 3), (0, 4)];
        assert_eq!(
            Graph::subcubic_from_edges(5, &star4),
            Err(GraphError::DegreeExceeded(0, 4))
        );
    }

    #[test]
    fn subdivide_counts() {
        let k4 = generators::complete(4);
        let d = subdivide(&k4);
        assert_eq!(d.graph.vertex_count(), 10);
        assert_eq!(d.graph.edge_count(), 12);

        let p = generators::petersen();
        let dp = subdivide(&p);
        assert_eq!(dp.graph.vertex_count(), 25);
        assert_eq!(dp.graph.edge_count(), 30);
    }

    #[test]
    fn subdivide_c3_is_c6() {
        let c3 = generators::cycle(3).unwrap();
        let d = subdivide(&c3);
        let c6 = generators::cycle(6).unwrap();
        assert!(crate::test_support::isomorphic(&d.graph, &c6));
    }

    #[test]
    fn subdivide_doubles_distances() {
        for seed in 0..100u64 {
            let g = crate::test_support::random_subcubic(4 + (seed as usize % 12), seed);
            let d = subdivide(&g);
            for u in 0..g.vertex_count() as u32 {
                let base_dist = bfs_distances(&g, u);
                let sub_dist = bfs_distances(&d.graph, u);
                for v in 0..g.vertex_count() {
                    if base_dist[v] == usize::MAX {
                        assert_eq!(sub_dist[v], usize::MAX);
                    } else {
                        assert_eq!(sub_dist[v], 2 * base_dist[v]);
                    }
                }
            }
            // subdivision vertices have degree exactly 2 and a total origin map
            assert_eq!(d.origin_map.len(), d.graph.vertex_count());
            for (id, origin) in d.origin_map.iter().enumerate() {
                match *origin {
                    Origin::Original(v) => assert_eq!(v as usize, id),
                    Origin::Subdivision(u, v) => {
                        assert_eq!(d.graph.degree(id as u32), 2);
                        assert_eq!(d.graph.neighbors(id as u32), &[u.min(v), u.max(v)]);
                    }
                }
            }
        }
    }
}
