//! Exhaustive backtracking search used as a ground-truth oracle: packing
//! S-colorability of small graphs, the maximum union of two disjoint
//! independent sets, and small-graph packing chromatic numbers.

use crate::graph::{bfs_distances, Graph};
use crate::packing::{verify, PackingSequence, SColoring};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("graph has {0} vertices, above the cap of {1} for this search")]
    SizeCapExceeded(usize, usize),
}

/// Outcome of an exact colorability search. `Timeout` is never conflated
/// with `Unsat`: an exhausted time cap is reported as such.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(SColoring),
    Unsat,
    Timeout,
}

impl SolveResult {
    pub fn status(&self) -> &'static str {
        match self {
            SolveResult::Sat(_) => "SAT",
            SolveResult::Unsat => "UNSAT",
            SolveResult::Timeout => "TIMEOUT",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub nodes_expanded: u64,
    pub elapsed: Duration,
}

/// Pairwise distances capped at `cap` (entries above the cap saturate).
fn capped_distance_matrix(g: &Graph, cap: u32) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut mat = vec![vec![cap + 1; n]; n];
    for u in 0..n as u32 {
        let dist = bfs_distances(g, u);
        for v in 0..n {
            if dist[v] != usize::MAX && dist[v] <= cap as usize {
                mat[u as usize][v] = dist[v] as u32;
            }
        }
    }
    mat
}

/// BFS order from vertex 0; disconnected graphs continue from the lowest
/// unvisited id. This is the deterministic branching order of the search.
fn bfs_order(g: &Graph) -> Vec<u32> {
    let n = g.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in g.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Chronological backtracking with forward distance pruning.
///
/// Vertices are tried in BFS order from vertex 0, classes in ascending
/// index order; a class is pruned the moment an already-colored same-class
/// vertex lies within distance `s_i`. The only symmetry breaking is at the
/// first vertex, which tries one representative per distinct `s` value
/// (classes of equal bound are interchangeable while all still empty).
/// Every `Sat` answer is re-verified before being returned.
pub fn solve(g: &Graph, seq: &PackingSequence, time_cap: Duration) -> (SolveResult, SolveStats) {
    let n = g.vertex_count();
    let start = Instant::now();
    let mut stats = SolveStats::default();
    if n == 0 {
        stats.elapsed = start.elapsed();
        return (SolveResult::Sat(SColoring::new(seq.clone(), Vec::new())), stats);
    }
    let k = seq.len();
    let max_s = *seq.as_slice().iter().max().expect("sequence non-empty");
    let dist = capped_distance_matrix(g, max_s);
    let order = bfs_order(g);
    let mut classes = vec![0u32; n];

    // first-vertex candidates: smallest class index of each distinct value
    let mut root_candidates: Vec<u32> = Vec::new();
    for (i, &s) in seq.as_slice().iter().enumerate() {
        if i == 0 || seq.as_slice()[i - 1] != s {
            root_candidates.push(i as u32 + 1);
        }
    }

    struct Ctx<'a> {
        dist: &'a [Vec<u32>],
        order: &'a [u32],
        seq: &'a [u32],
        start: Instant,
        cap: Duration,
        nodes: u64,
        timed_out: bool,
    }

    fn feasible(ctx: &Ctx, classes: &[u32], depth: usize, class: u32) -> bool {
        let v = ctx.order[depth] as usize;
        let bound = ctx.seq[(class - 1) as usize];
        for &u in &ctx.order[..depth] {
            if classes[u as usize] == class && ctx.dist[v][u as usize] <= bound {
                return false;
            }
        }
        true
    }

    fn descend(ctx: &mut Ctx, classes: &mut [u32], depth: usize, k: usize) -> bool {
        if depth == ctx.order.len() {
            return true;
        }
        ctx.nodes += 1;
        if ctx.nodes.is_multiple_of(1024) && ctx.start.elapsed() > ctx.cap {
            ctx.timed_out = true;
            return false;
        }
        for class in 1..=k as u32 {
            if feasible(ctx, classes, depth, class) {
                classes[ctx.order[depth] as usize] = class;
                if descend(ctx, classes, depth + 1, k) {
                    return true;
                }
                classes[ctx.order[depth] as usize] = 0;
                if ctx.timed_out {
                    return false;
                }
            }
        }
        false
    }

    let mut ctx = Ctx {
        dist: &dist,
        order: &order,
        seq: seq.as_slice(),
        start,
        cap: time_cap,
        nodes: 0,
        timed_out: false,
    };

    let mut found = false;
    for &root_class in &root_candidates {
        ctx.nodes += 1;
        classes[order[0] as usize] = root_class;
        if descend(&mut ctx, &mut classes, 1, k) {
            found = true;
            break;
        }
        classes[order[0] as usize] = 0;
        if ctx.timed_out {
            break;
        }
    }
    stats.nodes_expanded = ctx.nodes;
    stats.elapsed = start.elapsed();
    if found {
        let coloring = SColoring::new(seq.clone(), classes);
        let report = verify(g, &coloring).expect("search produces total assignments");
        assert!(report.is_valid(), "exact search must certify its own answers");
        (SolveResult::Sat(coloring), stats)
    } else if ctx.timed_out {
        (SolveResult::Timeout, stats)
    } else {
        (SolveResult::Unsat, stats)
    }
}

/// Maximum of `|I1| + |I2|` over pairs of disjoint independent sets, with one
/// witness pair. Branch and bound over the per-vertex trichotomy
/// (I1 / I2 / neither); capped at 24 vertices.
pub fn max_two_disjoint_independent(
    g: &Graph,
) -> Result<(usize, Vec<u32>, Vec<u32>), ExactError> {
    const CAP: usize = 24;
    let n = g.vertex_count();
    if n > CAP {
        return Err(ExactError::SizeCapExceeded(n, CAP));
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Pick {
        None,
        I1,
        I2,
    }

    struct Ctx<'a> {
        g: &'a Graph,
        best: usize,
        best_sets: (Vec<u32>, Vec<u32>),
    }

    fn descend(ctx: &mut Ctx, picks: &mut Vec<Pick>, v: usize, size: usize, used_i2: bool) {
        let n = ctx.g.vertex_count();
        if size + (n - v) <= ctx.best {
            return; // even taking everything remaining cannot beat best
        }
        if v == n {
            if size > ctx.best {
                ctx.best = size;
                let i1 = (0..n as u32).filter(|&u| picks[u as usize] == Pick::I1).collect();
                let i2 = (0..n as u32).filter(|&u| picks[u as usize] == Pick::I2).collect();
                ctx.best_sets = (i1, i2);
            }
            return;
        }
        let side_free = |picks: &Vec<Pick>, side: Pick| {
            ctx.g.neighbors(v as u32).iter().all(|&w| picks[w as usize] != side)
        };
        if side_free(picks, Pick::I1) {
            picks[v] = Pick::I1;
            descend(ctx, picks, v + 1, size + 1, used_i2);
            picks[v] = Pick::None;
        }
        // I1/I2 are interchangeable: the first sided vertex always goes to I1
        if (used_i2 || picks[..v].contains(&Pick::I1))
            && side_free(picks, Pick::I2) {
                picks[v] = Pick::I2;
                descend(ctx, picks, v + 1, size + 1, true);
                picks[v] = Pick::None;
            }
        descend(ctx, picks, v + 1, size, used_i2);
    }

    let mut ctx = Ctx { g, best: 0, best_sets: (Vec::new(), Vec::new()) };
    let mut picks = vec![Pick::None; n];
    descend(&mut ctx, &mut picks, 0, 0, false);
    let (i1, i2) = ctx.best_sets;
    Ok((ctx.best, i1, i2))
}

/// Result of a packing chromatic number search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiP {
    Value(u32),
    /// The search timed out, or every `k <= k_max` was exhausted as UNSAT.
    Unknown,
}

/// Least `k <= k_max` with a packing `(1, ..., k)`-coloring; `Unknown` on
/// timeout or when `k_max` is exhausted.
pub fn chi_p(g: &Graph, k_max: usize, time_cap: Duration) -> ChiP {
    if g.vertex_count() == 0 {
        return ChiP::Value(0);
    }
    let start = Instant::now();
    for k in 1..=k_max {
        let remaining = time_cap.saturating_sub(start.elapsed());
        if remaining.is_zero() {
            return ChiP::Unknown;
        }
        let (result, _) = solve(g, &PackingSequence::standard(k), remaining);
        match result {
            SolveResult::Sat(_) => return ChiP::Value(k as u32),
            SolveResult::Unsat => continue,
            SolveResult::Timeout => return ChiP::Unknown,
        }
    }
    ChiP::Unknown
}
