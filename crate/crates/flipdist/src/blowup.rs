//! Spine pairs, blow-ups and conflict graphs.
//!
//! A spine pair is a spine edge `(a, a+1)` that is the only spine edge of
//! its triangle in both triangulations. A blow-up subdivides every such edge
//! with `beta` new vertices and fans both apexes to them. Pair `i` conflicts
//! with pair `j` when the fan of `i` in the first triangulation crosses the
//! fan of `j` in the second.

use std::collections::BTreeSet;
use std::fmt;

use crate::acyclic;
use crate::convex::{crosses, Edge, Triangulation, VertexId};

/// A spine edge with the apexes of its triangles in `T` and `T'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinePair {
    pub index: usize,
    pub spine: Edge,
    pub apex_t: VertexId,
    pub apex_tp: VertexId,
}

/// Relative position of a pair's apexes and spine edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairType {
    /// `apex_t < apex_tp < a < a+1`.
    Above,
    /// `a < a+1 < apex_t < apex_tp`.
    Below,
    /// `apex_tp < a < a+1 < apex_t`.
    Crossing,
    /// The mirrored orders and equal apexes.
    MirroredOrOther,
}

impl PairType {
    pub fn name(self) -> &'static str {
        match self {
            PairType::Above => "above",
            PairType::Below => "below",
            PairType::Crossing => "crossing",
            PairType::MirroredOrOther => "other",
        }
    }

    pub fn from_name(s: &str) -> Option<PairType> {
        match s {
            "above" => Some(PairType::Above),
            "below" => Some(PairType::Below),
            "crossing" => Some(PairType::Crossing),
            "other" => Some(PairType::MirroredOrOther),
            _ => None,
        }
    }
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_pair(p: &SpinePair) -> PairType {
    let (a, b, u, up) = (p.spine.a, p.spine.b, p.apex_t, p.apex_tp);
    if u < up && up < a {
        PairType::Above
    } else if b < u && u < up {
        PairType::Below
    } else if up < a && b < u {
        PairType::Crossing
    } else {
        PairType::MirroredOrOther
    }
}

/// Apex of each spine edge `(a, a+1)` whose triangle has no other spine edge.
fn single_spine_apexes(t: &Triangulation) -> Vec<Option<VertexId>> {
    let mut out = vec![None; t.n()];
    for [x, y, z] in t.triangles() {
        let spine: Vec<(VertexId, VertexId)> = [(x, y, z), (y, z, x), (x, z, y)]
            .iter()
            .filter(|(p, q, _)| q == &(p + 1))
            .map(|&(p, _, r)| (p, r))
            .collect();
        if let [(a, apex)] = spine[..] {
            out[a] = Some(apex);
        }
    }
    out
}

/// The pairs `Γ`, ordered left to right along the spine.
pub fn spine_pairs(t1: &Triangulation, t2: &Triangulation) -> Vec<SpinePair> {
    assert_eq!(t1.n(), t2.n(), "spine pairs need triangulations of one polygon");
    let s1 = single_spine_apexes(t1);
    let s2 = single_spine_apexes(t2);
    let mut out = Vec::new();
    for a in 0..t1.n() {
        if let (Some(u), Some(up)) = (s1[a], s2[a]) {
            out.push(SpinePair { index: out.len(), spine: Edge::new(a, a + 1), apex_t: u, apex_tp: up });
        }
    }
    out
}

/// A blown-up pair of triangulations together with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupInstance {
    pub base_t: Triangulation,
    pub base_tp: Triangulation,
    pub beta: usize,
    pub pairs: Vec<SpinePair>,
    /// Old vertex label to new label; strictly increasing.
    pub vertex_map: Vec<VertexId>,
    pub blown_t: Triangulation,
    pub blown_tp: Triangulation,
    /// Per pair, the fan from the image of `apex_t` to the new vertices.
    pub fans_t: Vec<Vec<Edge>>,
    /// Per pair, the fan from the image of `apex_tp`.
    pub fans_tp: Vec<Vec<Edge>>,
}

impl BlowupInstance {
    pub fn n(&self) -> usize {
        self.blown_t.n()
    }

    /// The new vertices inserted on pair `i`'s spine edge.
    pub fn inserted(&self, i: usize) -> std::ops::RangeInclusive<VertexId> {
        let a = self.vertex_map[self.pairs[i].spine.a];
        a + 1..=a + self.beta
    }

    /// Images of `(v1, v3, v2, v2')`: spine endpoints, then the two apexes.
    pub fn corners(&self, i: usize) -> (VertexId, VertexId, VertexId, VertexId) {
        let p = &self.pairs[i];
        let m = &self.vertex_map;
        (m[p.spine.a], m[p.spine.b], m[p.apex_t], m[p.apex_tp])
    }
}

pub fn blow_up(t1: &Triangulation, t2: &Triangulation, beta: usize) -> BlowupInstance {
    let pairs = spine_pairs(t1, t2);
    blow_up_pairs(t1, t2, pairs, beta)
}

fn blow_up_pairs(t1: &Triangulation, t2: &Triangulation, pairs: Vec<SpinePair>, beta: usize) -> BlowupInstance {
    let n = t1.n();
    let mut vertex_map = Vec::with_capacity(n);
    let mut shift = 0;
    let mut next_pair = 0;
    for v in 0..n {
        while next_pair < pairs.len() && pairs[next_pair].spine.b <= v {
            shift += beta;
            next_pair += 1;
        }
        vertex_map.push(v + shift);
    }
    let new_n = n + beta * pairs.len();
    let mut fans_t = Vec::with_capacity(pairs.len());
    let mut fans_tp = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let base = vertex_map[p.spine.a];
        fans_t.push((1..=beta).map(|k| Edge::new(vertex_map[p.apex_t], base + k)).collect::<Vec<_>>());
        fans_tp.push((1..=beta).map(|k| Edge::new(vertex_map[p.apex_tp], base + k)).collect::<Vec<_>>());
    }
    let lift = |t: &Triangulation, fans: &[Vec<Edge>]| {
        let mapped = t.diagonals().iter().map(|e| Edge::new(vertex_map[e.a], vertex_map[e.b]));
        Triangulation::new(new_n, mapped.chain(fans.iter().flatten().copied()))
            .expect("a blow-up stays a triangulation")
    };
    let blown_t = lift(t1, &fans_t);
    let blown_tp = lift(t2, &fans_tp);
    BlowupInstance {
        base_t: t1.clone(),
        base_tp: t2.clone(),
        beta,
        pairs,
        vertex_map,
        blown_t,
        blown_tp,
        fans_t,
        fans_tp,
    }
}

/// A directed graph on `0..vertex_count` without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictGraph {
    pub vertex_count: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl ConflictGraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        assert!(edges.iter().all(|&(i, j)| i != j && i < vertex_count && j < vertex_count));
        ConflictGraph { vertex_count, edges }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Edges present in both directions, each reported once as `(i, j)`, `i < j`.
    pub fn double_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|&(i, j)| i < j && self.has_edge(j, i)).collect()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j)
    }

    /// The subgraph induced by `keep`, relabeled to `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> ConflictGraph {
        let mut pos = vec![usize::MAX; self.vertex_count];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(i, j)| pos[i] != usize::MAX && pos[j] != usize::MAX)
            .map(|&(i, j)| (pos[i], pos[j]));
        ConflictGraph::new(keep.len(), edges)
    }
}

/// The conflict graph of `inst`. Fan crossings do not depend on `beta`, so
/// it is computed on a `beta = 1` blow-up of the base pair.
pub fn conflict_graph(inst: &BlowupInstance) -> ConflictGraph {
    let unit =
        if inst.beta == 1 { inst.clone() } else { blow_up_pairs(&inst.base_t, &inst.base_tp, inst.pairs.clone(), 1) };
    fan_conflicts(&unit.fans_t, &unit.fans_tp)
}

/// Conflicts read off explicit fans: `i -> j` iff some edge of `fans_t[i]`
/// crosses some edge of `fans_tp[j]`.
pub fn fan_conflicts(fans_t: &[Vec<Edge>], fans_tp: &[Vec<Edge>]) -> ConflictGraph {
    let k = fans_t.len();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i != j && fans_t[i].iter().any(|&e| fans_tp[j].iter().any(|&f| crosses(e, f))) {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::new(k, edges)
}

/// Conflicts computed from pair geometry alone, without triangulations.
/// Each fan is represented by one segment from its apex to the midpoint of
/// the spine edge (coordinates doubled to stay integral).
pub fn conflicts_of_pairs(pairs: &[SpinePair]) -> ConflictGraph {
    let seg = |apex: VertexId, a: VertexId| Edge::new(2 * apex, 2 * a + 1);
    let fans_t: Vec<Vec<Edge>> = pairs.iter().map(|p| vec![seg(p.apex_t, p.spine.a)]).collect();
    let fans_tp: Vec<Vec<Edge>> = pairs.iter().map(|p| vec![seg(p.apex_tp, p.spine.a)]).collect();
    fan_conflicts(&fans_t, &fans_tp)
}

/// Why a subset fails the premises of the acyclicity criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PremiseViolation {
    /// A member is neither above, below nor crossing.
    Untyped { vertex: usize },
    /// An edge inside the subset runs in a forbidden direction between types.
    ForbiddenEdge { from: usize, to: usize, from_type: PairType, to_type: PairType },
    /// Premises hold but the subset still has a cycle; the graph cannot be a
    /// genuine conflict graph.
    CyclicDespitePremises,
}

/// Checks that every member of `s` has a named type and every edge inside
/// `s` is same-type, above to crossing, above to below, or crossing to below.
/// Such a subset is acyclic; this is confirmed as well.
pub fn check_acyclic_premises(h: &ConflictGraph, types: &[PairType], s: &[usize]) -> Result<(), PremiseViolation> {
    use PairType::*;
    for &v in s {
        if types[v] == MirroredOrOther {
            return Err(PremiseViolation::Untyped { vertex: v });
        }
    }
    let inside: BTreeSet<usize> = s.iter().copied().collect();
    for &(i, j) in &h.edges {
        if !inside.contains(&i) || !inside.contains(&j) {
            continue;
        }
        let (ti, tj) = (types[i], types[j]);
        let allowed = ti == tj || matches!((ti, tj), (Above, Crossing) | (Above, Below) | (Crossing, Below));
        if !allowed {
            return Err(PremiseViolation::ForbiddenEdge { from: i, to: j, from_type: ti, to_type: tj });
        }
    }
    if !acyclic::is_acyclic(h, s) {
        return Err(PremiseViolation::CyclicDespitePremises);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: usize, u: usize, up: usize) -> SpinePair {
        SpinePair { index: 0, spine: Edge::new(a, a + 1), apex_t: u, apex_tp: up }
    }

    #[test]
    fn fan_pairs() {
        let t = Triangulation::fan(5, 0).unwrap();
        let g = spine_pairs(&t, &t);
        assert_eq!(g.len(), 2);
        assert_eq!((g[0].spine, g[0].apex_t, g[0].apex_tp), (Edge::new(2, 3), 0, 0));
        assert_eq!((g[1].spine, g[1].apex_t, g[1].apex_tp), (Edge::new(3, 4), 0, 0));
    }

    #[test]
    fn quadrilateral_and_triangle_pairs() {
        let a = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        let b = Triangulation::from_pairs(4, &[(1, 3)]).unwrap();
        assert!(spine_pairs(&a, &b).is_empty());
        let t = Triangulation::new(3, []).unwrap();
        assert!(spine_pairs(&t, &t).is_empty());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_pair(&pair(4, 2, 3)), PairType::Above);
        assert_eq!(classify_pair(&pair(0, 3, 4)), PairType::Below);
        assert_eq!(classify_pair(&pair(2, 5, 0)), PairType::Crossing);
        assert_eq!(classify_pair(&pair(2, 0, 0)), PairType::MirroredOrOther);
        assert_eq!(classify_pair(&pair(4, 3, 2)), PairType::MirroredOrOther);
    }

    #[test]
    fn blow_up_sizes() {
        let t = Triangulation::fan(5, 0).unwrap();
        let zero = blow_up(&t, &t, 0);
        assert_eq!(zero.blown_t, t);
        assert_eq!(zero.vertex_map, vec![0, 1, 2, 3, 4]);
        let inst = blow_up(&t, &t, 2);
        assert_eq!(inst.n(), 9);
        assert_eq!(inst.blown_t.diagonals().len(), 6);
        assert_eq!(inst.blown_tp.diagonals().len(), 6);
        for (i, fan) in inst.fans_t.iter().enumerate() {
            assert_eq!(fan.len(), 2);
            let apex = inst.vertex_map[inst.pairs[i].apex_t];
            assert!(fan.iter().all(|e| e.has_endpoint(apex) && inst.blown_t.contains(*e)));
        }
    }

    #[test]
    fn identical_triangulations_have_no_conflicts() {
        let t = Triangulation::from_pairs(7, &[(0, 2), (2, 6), (2, 5), (3, 5)]).unwrap();
        assert!(conflict_graph(&blow_up(&t, &t, 1)).edges.is_empty());
    }

    #[test]
    fn left_fan_over_right_spine_edge() {
        // two above pairs sharing both apexes; the left T fan passes over the
        // right pair's T' apex
        let pairs = vec![
            SpinePair { index: 0, spine: Edge::new(4, 5), apex_t: 0, apex_tp: 2 },
            SpinePair { index: 1, spine: Edge::new(6, 7), apex_t: 0, apex_tp: 2 },
        ];
        let h = conflicts_of_pairs(&pairs);
        assert_eq!(h.edges.iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn premises() {
        use PairType::*;
        let h = ConflictGraph::new(2, [(1, 0)]);
        assert_eq!(check_acyclic_premises(&h, &[Above, Below], &[]), Ok(()));
        assert!(matches!(
            check_acyclic_premises(&h, &[Above, Below], &[0, 1]),
            Err(PremiseViolation::ForbiddenEdge { from: 1, to: 0, .. })
        ));
        let h = ConflictGraph::new(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(check_acyclic_premises(&h, &[Above, Crossing, Below], &[0, 1, 2]), Ok(()));
    }
}
