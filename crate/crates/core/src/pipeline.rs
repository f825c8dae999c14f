//! Quotient-graph coloring pipeline.
//!
//! A stable partition leaves a set of red vertices whose quotient graph `H`
//! (red vertices joined when within distance 2 in `G`) decomposes into
//! trees, even cycles, and odd cycles. Trees and even cycles are 2-colored,
//! odd cycles get a third color exactly once, and the five classes
//! `I1, I2, A, B, C` assemble into a packing (1,1,2,2,3)-coloring. Two `C`
//! vertices within distance 3 form a 3-3 conflict; conflicts are repaired by
//! potential-neutral cycle rotations followed by the engine's bounded local
//! search, each round strictly raising the potential.

use crate::engine::{
    init_partition, Diagnostic, PartitionState, RepairMove, Side, SideChange, Trigger,
    LOCAL_RADIUS,
};
use crate::generators::{cubic_complete, GeneratorError};
use crate::graph::{BfsScratch, Graph};
use crate::packing::{restrict, verify, PackingSequence, SColoring};
use std::collections::BTreeSet;
use std::io::Write;
use thiserror::Error;

/// Shape tag of one quotient component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompShape {
    Tree,
    EvenCycle,
    OddCycle,
    Other,
}

/// One connected component of the quotient graph.
#[derive(Debug, Clone)]
pub struct HComponent {
    /// Sorted red vertex ids.
    pub vertices: Vec<u32>,
    pub shape: CompShape,
    /// Red edges (adjacent-in-`G` red pairs) inside this component; a stable
    /// state has at most one.
    pub red_p2s: Vec<(u32, u32)>,
}

/// The quotient graph `H`: red vertices, adjacency between pairs at
/// `G`-distance at most 2, and the component decomposition.
#[derive(Debug, Clone)]
pub struct HView {
    /// Sorted red vertex ids.
    pub red_vertices: Vec<u32>,
    /// Adjacency lists parallel to `red_vertices`, holding vertex ids.
    adj: Vec<Vec<u32>>,
    pub components: Vec<HComponent>,
    /// Component index of each red vertex, parallel to `red_vertices`.
    comp_of: Vec<usize>,
}

impl HView {
    fn index_of(&self, v: u32) -> usize {
        self.red_vertices.binary_search(&v).expect("red vertex known to H")
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.index_of(v)]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn component_of(&self, v: u32) -> usize {
        self.comp_of[self.index_of(v)]
    }

    /// Cyclic vertex order of a cycle component: starts at `start`, second
    /// vertex is `second`.
    fn cycle_order(&self, start: u32, second: u32) -> Vec<u32> {
        let mut order = vec![start, second];
        loop {
            let cur = *order.last().expect("nonempty");
            let prev = order[order.len() - 2];
            let next = *self
                .neighbors(cur)
                .iter()
                .find(|&&w| w != prev)
                .expect("cycle vertices have degree 2");
            if next == start {
                return order;
            }
            order.push(next);
        }
    }
}

/// Builds the exact quotient graph of the current partition.
pub fn build_h(state: &PartitionState) -> HView {
    let g = state.graph();
    let reds: Vec<u32> = state.members(Side::Red);
    let mut scratch = BfsScratch::new(g.vertex_count());
    let mut ball = Vec::new();
    let mut adj: Vec<Vec<u32>> = Vec::with_capacity(reds.len());
    for &v in &reds {
        scratch.ball(g, v, 2, &mut ball);
        adj.push(
            ball.iter()
                .copied()
                .filter(|&w| w != v && state.side_of(w) == Side::Red)
                .collect(),
        );
    }
    // component decomposition
    let mut comp_of = vec![usize::MAX; reds.len()];
    let mut components = Vec::new();
    for i in 0..reds.len() {
        if comp_of[i] != usize::MAX {
            continue;
        }
        let comp_idx = components.len();
        let mut members = vec![reds[i]];
        comp_of[i] = comp_idx;
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            for &w in &adj[j] {
                let wi = reds.binary_search(&w).expect("red");
                if comp_of[wi] == usize::MAX {
                    comp_of[wi] = comp_idx;
                    members.push(w);
                    stack.push(wi);
                }
            }
        }
        members.sort_unstable();
        let degs: Vec<usize> = members
            .iter()
            .map(|&v| adj[reds.binary_search(&v).unwrap()].len())
            .collect();
        let edges = degs.iter().sum::<usize>() / 2;
        let shape = if edges + 1 == members.len() {
            CompShape::Tree
        } else if edges == members.len() && degs.iter().all(|&d| d == 2) {
            if members.len() % 2 == 0 {
                CompShape::EvenCycle
            } else {
                CompShape::OddCycle
            }
        } else {
            CompShape::Other
        };
        let mut red_p2s = Vec::new();
        for &a in &members {
            for &b in g.neighbors(a) {
                if a < b && state.side_of(b) == Side::Red {
                    red_p2s.push((a, b));
                }
            }
        }
        components.push(HComponent { vertices: members, shape, red_p2s });
    }
    HView { red_vertices: reds, adj, components, comp_of }
}

/// Quotient-shape violations that route back into engine repair: a component
/// that is neither tree nor cycle, a vertex of `H`-degree above 3, or a
/// 3-vertex that is not a red-edge endpoint with a degree-1 partner.
/// Returns suggested centers for the bounded local search (empty iff clean).
pub fn structure_violation_centers(state: &PartitionState) -> Vec<u32> {
    let h = build_h(state);
    let g = state.graph();
    let mut centers: BTreeSet<u32> = BTreeSet::new();
    let flag = |v: u32, centers: &mut BTreeSet<u32>| {
        centers.insert(v);
        for &w in g.neighbors(v) {
            centers.insert(w);
        }
        for &w in h.neighbors(v) {
            centers.insert(w);
        }
    };
    for comp in &h.components {
        if comp.shape == CompShape::Other {
            for &v in &comp.vertices {
                flag(v, &mut centers);
            }
        }
    }
    for &v in &h.red_vertices {
        let d = h.degree(v);
        if d >= 4 {
            flag(v, &mut centers);
        } else if d == 3 {
            let partner = g
                .neighbors(v)
                .iter()
                .copied()
                .find(|&w| state.side_of(w) == Side::Red);
            match partner {
                Some(p) if h.degree(p) == 1 => {}
                _ => {
                    flag(v, &mut centers);
                    if let Some(p) = partner {
                        flag(p, &mut centers);
                    }
                }
            }
        }
    }
    centers.into_iter().collect()
}

/// Colors used on the quotient graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HColor {
    A,
    B,
    C,
}

/// Proper 3-coloring of `H` with `C` used exactly once per odd cycle.
#[derive(Debug, Clone)]
pub struct HColoring {
    /// Parallel to `HView::red_vertices`.
    colors: Vec<HColor>,
    reds: Vec<u32>,
}

impl HColoring {
    pub fn color_of(&self, v: u32) -> HColor {
        self.colors[self.reds.binary_search(&v).expect("red vertex")]
    }
}

/// Applies the coloring rules: trees and even cycles are 2-colored with `A`
/// on the lowest id of the component; odd cycles alternate `A`/`B` around
/// one `C` vertex. When the component carries the red edge `u1 u2`, the
/// lower-id endpoint is chosen and its other cycle neighbor receives `C`;
/// otherwise `C` sits on the lowest-id cycle vertex.
pub fn color_h(state: &PartitionState, h: &HView) -> Result<HColoring, Diagnostic> {
    let mut colors = vec![HColor::A; h.red_vertices.len()];
    for comp in &h.components {
        match comp.shape {
            CompShape::Other => {
                return Err(Diagnostic::new(
                    state,
                    "color_h",
                    format!("component {:?} is not a tree or cycle", comp.vertices),
                ));
            }
            CompShape::Tree | CompShape::EvenCycle => {
                // BFS 2-coloring from the lowest id
                let root = comp.vertices[0];
                let mut queue = std::collections::VecDeque::from([(root, HColor::A)]);
                let mut seen: BTreeSet<u32> = BTreeSet::from([root]);
                while let Some((v, c)) = queue.pop_front() {
                    colors[h.index_of(v)] = c;
                    let next = if c == HColor::A { HColor::B } else { HColor::A };
                    for &w in h.neighbors(v) {
                        if seen.insert(w) {
                            queue.push_back((w, next));
                        }
                    }
                }
            }
            CompShape::OddCycle => {
                if comp.red_p2s.len() > 1 {
                    return Err(Diagnostic::new(
                        state,
                        "color_h",
                        format!(
                            "component {:?} holds {} red edges",
                            comp.vertices,
                            comp.red_p2s.len()
                        ),
                    ));
                }
                let c_vertex = match comp.red_p2s.first() {
                    Some(&(p, q)) => {
                        // rule: pick the lower endpoint, color its other
                        // cycle neighbor C
                        let chosen = p.min(q);
                        let partner = p.max(q);
                        *h.neighbors(chosen)
                            .iter()
                            .find(|&&w| w != partner)
                            .expect("odd cycle has length >= 3")
                    }
                    None => comp.vertices[0],
                };
                let start_nbrs = h.neighbors(c_vertex);
                let second = *start_nbrs.iter().min().expect("cycle degree 2");
                let order = h.cycle_order(c_vertex, second);
                colors[h.index_of(c_vertex)] = HColor::C;
                for (pos, &v) in order.iter().enumerate().skip(1) {
                    colors[h.index_of(v)] =
                        if pos % 2 == 1 { HColor::A } else { HColor::B };
                }
            }
        }
    }
    let hc = HColoring { colors, reds: h.red_vertices.clone() };
    // properness and C-placement audit
    for &v in &h.red_vertices {
        for &w in h.neighbors(v) {
            if v < w && hc.color_of(v) == hc.color_of(w) {
                return Err(Diagnostic::new(
                    state,
                    "color_h",
                    format!("H-adjacent pair {v},{w} share color {:?}", hc.color_of(v)),
                ));
            }
        }
    }
    for comp in &h.components {
        let c_count = comp
            .vertices
            .iter()
            .filter(|&&v| hc.color_of(v) == HColor::C)
            .count();
        let want = usize::from(comp.shape == CompShape::OddCycle);
        if c_count != want {
            return Err(Diagnostic::new(
                state,
                "color_h",
                format!("component {:?} uses C {c_count} times", comp.vertices),
            ));
        }
    }
    Ok(hc)
}

/// Assembles the five-class coloring: `I1 -> 1`, `I2 -> 2`, `A -> 3`,
/// `B -> 4`, `C -> 5`, with sequence `(1, 1, 2, 2, 3)`.
pub fn assemble(state: &PartitionState, hc: &HColoring) -> SColoring {
    let n = state.graph().vertex_count();
    let classes = (0..n as u32)
        .map(|v| match state.side_of(v) {
            Side::I1 => 1,
            Side::I2 => 2,
            Side::Red => match hc.color_of(v) {
                HColor::A => 3,
                HColor::B => 4,
                HColor::C => 5,
            },
        })
        .collect();
    SColoring::new(PackingSequence::one_one_two_two_three(), classes)
}

/// Lowest-id pair of class-5 vertices within distance 3, if any. Only class
/// 5 is scanned: the coloring rules place `C` once per odd cycle, so any
/// conflict pair spans two distinct odd-cycle components.
pub fn find_33_conflict(g: &Graph, f: &SColoring) -> Option<(u32, u32)> {
    let mut scratch = BfsScratch::new(g.vertex_count());
    let mut ball = Vec::new();
    let fives: Vec<u32> = f.class_members(5);
    for &u in &fives {
        scratch.ball(g, u, 3, &mut ball);
        for &v in &ball {
            if v > u && f.class_of(v) == 5 {
                return Some((u, v));
            }
        }
    }
    None
}

/// The alternating red/black cycle in `G` realizing one odd-cycle component
/// of `H`.
///
/// Layout without a red edge: `[u1, w1, u2, w2, ..., uk, wk]` where `w_t`
/// is the black connector between consecutive reds. With the red edge
/// `u1 u2`: `[u1, u2, w2, u3, w3, ..., uk, wk]` (no connector inside the
/// red edge).
#[derive(Debug, Clone)]
pub struct CycleRealization {
    pub vertices: Vec<u32>,
    pub has_p2: bool,
    /// Number of red vertices on the cycle.
    pub k: usize,
}

impl CycleRealization {
    /// Red cycle vertices in order.
    fn reds(&self) -> Vec<u32> {
        if self.has_p2 {
            let mut r = vec![self.vertices[0], self.vertices[1]];
            r.extend(self.vertices[2..].iter().skip(1).step_by(2).copied());
            r
        } else {
            self.vertices.iter().step_by(2).copied().collect()
        }
    }

    /// Black connectors in order: `w_t` follows the `t`-th red vertex.
    fn blacks(&self) -> Vec<u32> {
        if self.has_p2 {
            self.vertices[2..].iter().step_by(2).copied().collect()
        } else {
            self.vertices.iter().skip(1).step_by(2).copied().collect()
        }
    }

    /// Valid non-identity rotation amounts.
    pub fn rotation_candidates(&self) -> Vec<usize> {
        if self.has_p2 {
            (1..self.k).collect()
        } else {
            vec![self.k]
        }
    }
}

/// Extracts the `G`-cycle realizing an odd-cycle component. Fails when two
/// component edges share their only black connector (then no simple cycle
/// realizes the component and rotations do not apply).
pub fn realize_cycle(
    state: &PartitionState,
    h: &HView,
    comp: &HComponent,
) -> Result<CycleRealization, Diagnostic> {
    let g = state.graph();
    if comp.shape != CompShape::OddCycle && comp.shape != CompShape::EvenCycle {
        return Err(Diagnostic::new(
            state,
            "realize_cycle",
            format!("component {:?} is not a cycle", comp.vertices),
        ));
    }
    if comp.red_p2s.len() > 1 {
        return Err(Diagnostic::new(
            state,
            "realize_cycle",
            "more than one red edge on the cycle".into(),
        ));
    }
    let (order, has_p2) = match comp.red_p2s.first() {
        Some(&(p, q)) => {
            let start = p.min(q);
            (h.cycle_order(start, p.max(q)), true)
        }
        None => {
            let start = comp.vertices[0];
            let second = *h.neighbors(start).iter().min().expect("cycle degree 2");
            (h.cycle_order(start, second), false)
        }
    };
    let k = order.len();
    let mut vertices = Vec::with_capacity(2 * k);
    for (t, &red) in order.iter().enumerate() {
        vertices.push(red);
        let next = order[(t + 1) % k];
        if has_p2 && t == 0 {
            continue; // u1-u2 is a direct red edge, no connector
        }
        let connector = g
            .neighbors(red)
            .iter()
            .copied()
            .find(|&w| state.side_of(w) != Side::Red && g.has_edge(w, next));
        match connector {
            Some(w) => vertices.push(w),
            None => {
                return Err(Diagnostic::new(
                    state,
                    "realize_cycle",
                    format!("no black connector between cycle reds {red} and {next}"),
                ));
            }
        }
    }
    let mut uniq: Vec<u32> = vertices.clone();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != vertices.len() {
        return Err(Diagnostic::new(
            state,
            "realize_cycle",
            format!("realization reuses a vertex: {vertices:?}"),
        ));
    }
    Ok(CycleRealization { vertices, has_p2, k })
}

/// Potential-neutral cycle reassignment. `i = 0` is the identity. On a cycle
/// carrying the red edge, `i` shifts the red edge `i` steps around the
/// cycle; without it, only the full flip (`i = k`) applies, exchanging the
/// red/black roles of the whole cycle. Independence violations yield an
/// error (the caller skips such candidates).
pub fn rotate(
    state: &PartitionState,
    real: &CycleRealization,
    i: usize,
) -> Result<Vec<SideChange>, Diagnostic> {
    if i == 0 {
        return Ok(Vec::new());
    }
    let reds = real.reds();
    let blacks = real.blacks();
    let mut changes: Vec<SideChange> = Vec::new();
    if real.has_p2 {
        if i >= real.k {
            return Err(Diagnostic::new(
                state,
                "rotate",
                format!("rotation {i} out of range for k = {}", real.k),
            ));
        }
        // swap u_2..u_{i+1} with their trailing connectors w_2..w_{i+1}
        for t in 1..=i {
            let u = reds[t];
            let w = blacks[t - 1];
            let w_side = state.side_of(w);
            changes.push((u, Side::Red, w_side));
            changes.push((w, w_side, Side::Red));
        }
    } else {
        if i != real.k {
            return Err(Diagnostic::new(
                state,
                "rotate",
                format!("only the full flip applies; got {i}, k = {}", real.k),
            ));
        }
        for t in 0..real.k {
            let u = reds[t];
            let w = blacks[t];
            let w_side = state.side_of(w);
            changes.push((u, Side::Red, w_side));
            changes.push((w, w_side, Side::Red));
        }
    }
    // validate independence on an overlay before handing the move out
    let effective = |v: u32| {
        changes
            .iter()
            .find(|&&(u, _, _)| u == v)
            .map(|&(_, _, to)| to)
            .unwrap_or(state.side_of(v))
    };
    for &(v, _, to) in &changes {
        if to == Side::Red {
            continue;
        }
        for &w in state.graph().neighbors(v) {
            if effective(w) == to {
                return Err(Diagnostic::new(
                    state,
                    "rotate",
                    format!("rotation {i} breaks independence at edge {v}-{w}"),
                ));
            }
        }
    }
    Ok(changes)
}

/// Repairs a 3-3 conflict: for each candidate rotation of the conflicting
/// components' realizations (identity first), tentatively apply it and probe
/// the engine's local search from every vertex within distance 3 of the
/// conflict pair; the first strictly improving composite is committed, all
/// other tentative work is unwound. Returns the committed composite.
pub fn repair_conflict(
    state: &mut PartitionState,
    conflict: (u32, u32),
    h: &HView,
) -> Result<Vec<RepairMove>, Diagnostic> {
    let (u, v) = conflict;
    let g = state.graph();
    let mut scratch = BfsScratch::new(g.vertex_count());
    let mut centers: Vec<u32> = Vec::new();
    let mut ball = Vec::new();
    for &c in &[u, v] {
        scratch.ball(g, c, LOCAL_RADIUS, &mut ball);
        centers.extend_from_slice(&ball);
    }
    centers.sort_unstable();
    centers.dedup();

    // candidate rotations: identity, then every rotation of u's component,
    // then of v's component
    let mut candidates: Vec<Vec<SideChange>> = vec![Vec::new()];
    let mut rotations_tried = 0usize;
    for &vertex in &[u, v] {
        let comp = &h.components[h.component_of(vertex)];
        let Ok(real) = realize_cycle(state, h, comp) else {
            continue; // degenerate realization: identity probing only
        };
        for i in real.rotation_candidates() {
            if let Ok(changes) = rotate(state, &real, i) {
                candidates.push(changes);
            }
        }
    }

    let phi_base = state.potential();
    for (ci, rotation) in candidates.iter().enumerate() {
        if !rotation.is_empty() {
            state.apply_raw(rotation);
            rotations_tried += 1;
            if state.check_changed(rotation).is_err() {
                state.revert_raw(rotation);
                continue;
            }
            let phi_rot = state.potential();
            if phi_rot > phi_base {
                // the reassignment alone improves: commit it outright
                state.revert_raw(rotation);
                return state.commit(vec![(Trigger::CycleSwap, rotation.clone())]);
            }
            if phi_rot < phi_base {
                state.revert_raw(rotation);
                continue;
            }
        }
        // under a non-identity rotation, only centers whose search ball the
        // rotation can influence need rescanning
        for &center in &centers {
            if ci > 0 {
                scratch.ball(g, center, LOCAL_RADIUS + 1, &mut ball);
                if !rotation.iter().any(|&(w, _, _)| ball.binary_search(&w).is_ok()) {
                    continue;
                }
            }
            if let Some((_, changes)) = state.local_improve(center) {
                return if rotation.is_empty() {
                    state.commit(vec![(Trigger::CycleSwap, changes)])
                } else {
                    state.revert_raw(rotation);
                    state.commit(vec![
                        (Trigger::Rotation, rotation.clone()),
                        (Trigger::CycleSwap, changes),
                    ])
                };
            }
        }
        if !rotation.is_empty() {
            state.revert_raw(rotation);
        }
    }
    Err(Diagnostic {
        trigger: "repair_conflict".into(),
        detail: format!(
            "no improving composite for conflict ({u}, {v}) after {rotations_tried} rotations"
        ),
        state: serde_json::json!({
            "state": state.dump(),
            "conflict": [u, v],
            "rotations_tried": rotations_tried,
        }),
    })
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("bad input: {0}")]
    BadInput(#[from] GeneratorError),
    #[error(transparent)]
    Diagnostic(#[from] Diagnostic),
}

/// Outcome of a successful solve, with audit counters for the harness.
#[derive(Debug)]
pub struct SolveOutput {
    /// Verified packing (1,1,2,2,3)-coloring of the input graph.
    pub coloring: SColoring,
    /// Verified coloring of the cubic host the input embeds into.
    pub host_coloring: SColoring,
    pub host_vertices: usize,
    pub composites: u64,
    pub conflicts_repaired: u64,
}

/// Produces a verified packing (1,1,2,2,3)-coloring of any subcubic graph.
///
/// Pipeline: embed into a cubic host, stabilize the partition, color the
/// quotient graph, assemble, and repair 3-3 conflicts until none remain.
/// Every returned coloring has passed the verifier on both the host and the
/// input graph; failures surface as diagnostics, never as unverified output.
pub fn solve(g: &Graph) -> Result<SolveOutput, SolveError> {
    solve_with_trace(g, None)
}

pub fn solve_with_trace(
    g: &Graph,
    trace: Option<Box<dyn Write>>,
) -> Result<SolveOutput, SolveError> {
    let emb = cubic_complete(g)?;
    let host = &emb.host;
    let mut state = init_partition(host);
    if let Some(w) = trace {
        state.set_trace(w);
    }
    let mut conflicts_repaired = 0u64;
    let budget = state.composite_budget() + 1;
    for _round in 0..budget {
        state.stabilize(structure_violation_centers)?;
        state.assert_stable_shape()?;
        let h = build_h(&state);
        if !structure_violation_centers(&state).is_empty() {
            return Err(Diagnostic::new(
                &state,
                "solve",
                "quotient shape violations survived stabilization".into(),
            )
            .into());
        }
        let hc = color_h(&state, &h)?;
        let f = assemble(&state, &hc);
        match find_33_conflict(host, &f) {
            Some(conflict) => {
                repair_conflict(&mut state, conflict, &h)?;
                conflicts_repaired += 1;
            }
            None => {
                let host_report = verify(host, &f).map_err(|e| {
                    SolveError::Diagnostic(Diagnostic::new(
                        &state,
                        "solve",
                        format!("host verification errored: {e}"),
                    ))
                })?;
                if !host_report.is_valid() {
                    return Err(Diagnostic::new(
                        &state,
                        "solve",
                        format!("assembled coloring failed verification: {host_report:?}"),
                    )
                    .into());
                }
                let coloring = restrict(&f, &emb.image);
                let guest_report = verify(g, &coloring).map_err(|e| {
                    SolveError::Diagnostic(Diagnostic::new(
                        &state,
                        "solve",
                        format!("guest verification errored: {e}"),
                    ))
                })?;
                if !guest_report.is_valid() {
                    return Err(Diagnostic::new(
                        &state,
                        "solve",
                        format!("restricted coloring failed verification: {guest_report:?}"),
                    )
                    .into());
                }
                return Ok(SolveOutput {
                    coloring,
                    host_coloring: f,
                    host_vertices: host.vertex_count(),
                    composites: state.composites_committed(),
                    conflicts_repaired,
                });
            }
        }
    }
    Err(Diagnostic::new(&state, "solve", "conflict-repair rounds exceeded the potential budget".into()).into())
}
