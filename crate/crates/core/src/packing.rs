//! Packing S-coloring data model, the certifying verifier, sequence
//! weakening, and the lift of a valid coloring to the 1-subdivision.

use crate::graph::{Graph, SubdividedGraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackingError {
    #[error("packing sequence must be non-empty")]
    EmptySequence,
    #[error("packing sequence must be positive and non-decreasing at index {0}")]
    NotNonDecreasing(usize),
    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("partial assignment: vertex {0} has no class")]
    PartialAssignment(u32),
    #[error("vertex {vertex} assigned class {class} outside 1..={classes}")]
    ClassOutOfRange { vertex: u32, class: u32, classes: usize },
    #[error("coloring mentions vertex {0}, but the graph has {1} vertices")]
    UnknownVertex(u32, usize),
    #[error("input coloring is invalid ({0} violations)")]
    InvalidInput(usize),
    #[error("subdivision was not built from this base graph")]
    BaseMismatch,
}

/// A non-decreasing sequence of positive integers `(s_1, ..., s_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct PackingSequence(Vec<u32>);

impl PackingSequence {
    pub fn new(s: Vec<u32>) -> Result<Self, PackingError> {
        if s.is_empty() {
            return Err(PackingError::EmptySequence);
        }
        for i in 0..s.len() {
            if s[i] == 0 || (i > 0 && s[i] < s[i - 1]) {
                return Err(PackingError::NotNonDecreasing(i));
            }
        }
        Ok(PackingSequence(s))
    }

    /// The standard sequence `(1, 2, ..., k)` of the packing chromatic number.
    pub fn standard(k: usize) -> Self {
        PackingSequence((1..=k as u32).collect())
    }

    /// The target sequence of the constructive pipeline.
    pub fn one_one_two_two_three() -> Self {
        PackingSequence(vec![1, 1, 2, 2, 3])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s_i` for the 1-based class index `i`.
    pub fn class_bound(&self, class: u32) -> u32 {
        self.0[(class - 1) as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl TryFrom<Vec<u32>> for PackingSequence {
    type Error = PackingError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        PackingSequence::new(v)
    }
}

impl From<PackingSequence> for Vec<u32> {
    fn from(s: PackingSequence) -> Vec<u32> {
        s.0
    }
}

impl std::str::FromStr for PackingSequence {
    type Err = PackingError;
    /// Parses `"1,1,2,2,3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vals: Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
        PackingSequence::new(vals.map_err(|_| PackingError::EmptySequence)?)
    }
}

/// A candidate packing S-coloring: a sequence plus a total assignment of
/// vertices to 1-based class indices. Distance validity is the verifier's
/// job, not a construction invariant; `0` marks an unassigned vertex and is
/// reported by the verifier as a partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SColoring {
    pub seq: PackingSequence,
    pub classes: Vec<u32>,
}

/// Serialization schema shared by coloring input and output:
/// `{"sequence": [1,1,2,2,3], "classes": {"0": 1, ...}}`.
#[derive(Debug, Serialize, Deserialize)]
struct SColoringRepr {
    sequence: PackingSequence,
    classes: BTreeMap<u32, u32>,
}

impl Serialize for SColoring {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let classes = self
            .classes
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(v, &c)| (v as u32, c))
            .collect();
        SColoringRepr { sequence: self.seq.clone(), classes }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SColoring {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = SColoringRepr::deserialize(de)?;
        let n = repr.classes.keys().next_back().map_or(0, |&v| v as usize + 1);
        let mut classes = vec![0u32; n];
        for (v, c) in repr.classes {
            classes[v as usize] = c;
        }
        Ok(SColoring { seq: repr.sequence, classes })
    }
}

impl SColoring {
    pub fn new(seq: PackingSequence, classes: Vec<u32>) -> Self {
        SColoring { seq, classes }
    }

    pub fn class_of(&self, v: u32) -> u32 {
        self.classes[v as usize]
    }

    /// Vertices of the 1-based class `c`, ascending.
    pub fn class_members(&self, c: u32) -> Vec<u32> {
        (0..self.classes.len() as u32).filter(|&v| self.classes[v as usize] == c).collect()
    }
}

/// One verifier finding: a same-class pair closer than its class allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub class: u32,
    pub u: u32,
    pub v: u32,
    /// Actual distance `d_G(u, v)`.
    pub distance: u32,
    /// Required minimum distance `s_i + 1`.
    pub required: u32,
}

/// All violations of a candidate coloring; empty iff the coloring is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every same-class pair of `f` against its distance bound, using a
/// truncated BFS of radius `s_i` from each vertex of class `i`. Reports all
/// violations rather than stopping at the first.
pub fn verify(g: &Graph, f: &SColoring) -> Result<ViolationReport, PackingError> {
    let n = g.vertex_count();
    if f.classes.len() > n {
        return Err(PackingError::UnknownVertex(f.classes.len() as u32 - 1, n));
    }
    for v in 0..n as u32 {
        let class = f.classes.get(v as usize).copied().unwrap_or(0);
        if class == 0 {
            return Err(PackingError::PartialAssignment(v));
        }
        if class as usize > f.seq.len() {
            return Err(PackingError::ClassOutOfRange {
                vertex: v,
                class,
                classes: f.seq.len(),
            });
        }
    }
    let mut report = ViolationReport::default();
    let mut dist = vec![u32::MAX; n];
    let mut queue = Vec::new();
    for u in 0..n as u32 {
        let class = f.classes[u as usize];
        let radius = f.seq.class_bound(class);
        // truncated BFS of radius s_i, recording exact distances
        queue.clear();
        queue.push(u);
        dist[u as usize] = 0;
        let mut level_start = 0;
        for depth in 1..=radius {
            let level_end = queue.len();
            if level_start == level_end {
                break;
            }
            for qi in level_start..level_end {
                let x = queue[qi];
                for &w in g.neighbors(x) {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = depth;
                        queue.push(w);
                    }
                }
            }
            level_start = level_end;
        }
        for &w in &queue {
            if w > u && f.classes[w as usize] == class {
                report.violations.push(Violation {
                    class,
                    u,
                    v: w,
                    distance: dist[w as usize],
                    required: radius + 1,
                });
            }
        }
        for &w in &queue {
            dist[w as usize] = u32::MAX;
        }
    }
    Ok(report)
}

/// True iff every coordinate of `stronger` is at least the matching
/// coordinate of `weaker`; any valid `stronger`-coloring is then a valid
/// `weaker`-coloring under the same assignment.
pub fn weakening_implies(
    stronger: &PackingSequence,
    weaker: &PackingSequence,
) -> Result<bool, PackingError> {
    if stronger.len() != weaker.len() {
        return Err(PackingError::LengthMismatch(stronger.len(), weaker.len()));
    }
    Ok(stronger.as_slice().iter().zip(weaker.as_slice()).all(|(a, b)| a >= b))
}

/// Lifts a valid packing `(s_1, ..., s_k)`-coloring of `g` to a packing
/// `(1, 2s_1+1, ..., 2s_k+1)`-coloring of the subdivision: subdivision
/// vertices form class 1 (they are independent in `D(G)`), and an original
/// vertex of class `i` moves to class `i + 1`.
pub fn lift(g: &Graph, f: &SColoring, sub: &SubdividedGraph) -> Result<SColoring, PackingError> {
    if sub.base.vertex_count() != g.vertex_count() || sub.base.edges() != g.edges() {
        return Err(PackingError::BaseMismatch);
    }
    let report = verify(g, f)?;
    if !report.is_valid() {
        return Err(PackingError::InvalidInput(report.violations.len()));
    }
    let mut seq = vec![1u32];
    seq.extend(f.seq.as_slice().iter().map(|&s| 2 * s + 1));
    let lifted_seq = PackingSequence::new(seq).expect("lift preserves monotonicity");
    let n = g.vertex_count();
    let mut classes = vec![1u32; sub.graph.vertex_count()];
    for (lifted, &base) in classes.iter_mut().zip(&f.classes[..n]) {
        *lifted = base + 1;
    }
    Ok(SColoring::new(lifted_seq, classes))
}

/// Brute-force verification oracle: all-pairs BFS distances checked against
/// every same-class pair. Used by tests and the oracle-equivalence suite.
pub fn verify_oracle(g: &Graph, f: &SColoring) -> Result<ViolationReport, PackingError> {
    let n = g.vertex_count();
    for v in 0..n as u32 {
        let class = f.classes.get(v as usize).copied().unwrap_or(0);
        if class == 0 {
            return Err(PackingError::PartialAssignment(v));
        }
        if class as usize > f.seq.len() {
            return Err(PackingError::ClassOutOfRange {
                vertex: v,
                class,
                classes: f.seq.len(),
            });
        }
    }
    let mut report = ViolationReport::default();
    for u in 0..n as u32 {
        let dist = crate::graph::bfs_distances(g, u);
        for v in (u + 1)..n as u32 {
            if f.classes[u as usize] == f.classes[v as usize] {
                let class = f.classes[u as usize];
                let bound = f.seq.class_bound(class);
                if dist[v as usize] != usize::MAX && dist[v as usize] <= bound as usize {
                    report.violations.push(Violation {
                        class,
                        u,
                        v,
                        distance: dist[v as usize] as u32,
                        required: bound + 1,
                    });
                }
            }
        }
    }
    report.violations.sort_by_key(|w| (w.class, w.u, w.v));
    Ok(report)
}

/// Restricts a coloring of a host graph through an injective vertex image.
pub fn restrict(f: &SColoring, image: &[u32]) -> SColoring {
    let classes = image.iter().map(|&h| f.classes[h as usize]).collect();
    SColoring::new(f.seq.clone(), classes)
}
