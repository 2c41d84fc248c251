//! Exact flip distance, happy-edge splitting, diameter, and the fan-based
//! constructive sequences.

use std::collections::HashMap;

use thiserror::Error;

use crate::convex::{self, from_canonical_key, Edge, Triangulation, TriangulationError, VertexId};

/// Default number of states the bidirectional search may store.
pub const DEFAULT_STATE_BUDGET: usize = 4_000_000;

/// Largest `n` accepted by [`diameter`].
pub const DIAMETER_CAP: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("triangulations live on {0} and {1} vertices")]
    SizeMismatch(usize, usize),
    #[error("search stored more than {budget} states")]
    BudgetExceeded { budget: usize },
    #[error("step {index} is not a legal flip")]
    IllegalStep { index: usize },
    #[error("sequence does not end at the target triangulation")]
    WrongTarget,
    #[error("region is not a sub-polygon of the triangulation: {0}")]
    NotASubpolygon(String),
    #[error("diameter supports 3 <= n <= {cap}, got {n}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// A start triangulation and the diagonals removed at each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipSequence {
    pub start: Triangulation,
    pub steps: Vec<Edge>,
}

impl FlipSequence {
    pub fn empty(start: Triangulation) -> Self {
        FlipSequence { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// All triangulations visited, `start` first.
    pub fn replay(&self) -> Result<Vec<Triangulation>, DistanceError> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.start.clone());
        for (index, &e) in self.steps.iter().enumerate() {
            let next = out.last().unwrap().flip(e).map_err(|_| DistanceError::IllegalStep { index })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<Triangulation, DistanceError> {
        let mut t = self.start.clone();
        for (index, &e) in self.steps.iter().enumerate() {
            t = t.flip(e).map_err(|_| DistanceError::IllegalStep { index })?;
        }
        Ok(t)
    }

    /// The same path walked backwards, starting from this sequence's end.
    pub fn reversed(&self) -> Result<FlipSequence, DistanceError> {
        let states = self.replay()?;
        let mut steps = Vec::with_capacity(self.steps.len());
        for i in (0..self.steps.len()).rev() {
            // the diagonal introduced by step i is the one to remove going back
            let introduced = states[i].flip_partner(self.steps[i])?;
            steps.push(introduced);
        }
        Ok(FlipSequence { start: states.last().unwrap().clone(), steps })
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &FlipSequence) {
        self.steps.extend_from_slice(&other.steps);
    }

    /// Text format: `n`, `start` and the diagonal block, then `flip` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\nstart\n", self.start.n());
        s.push_str(&self.start.diagonal_lines());
        for e in &self.steps {
            s.push_str(&format!("flip {} {}\n", e.a, e.b));
        }
        s
    }
}

pub fn validate_sequence(f: &FlipSequence, target: &Triangulation) -> Result<(), DistanceError> {
    if f.end()? != *target {
        return Err(DistanceError::WrongTarget);
    }
    Ok(())
}

/// One independent piece of an instance after splitting along common
/// diagonals. `vertices` are the original labels; the two triangulations are
/// relabeled onto `0..vertices.len()` preserving order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubInstance {
    pub vertices: Vec<VertexId>,
    pub t1: Triangulation,
    pub t2: Triangulation,
}

impl SubInstance {
    fn lift(&self, e: Edge) -> Edge {
        Edge::new(self.vertices[e.a], self.vertices[e.b])
    }
}

/// Splits `(t1, t2)` along every common diagonal. The pieces are the faces
/// of the common subdivision, in sorted order of their vertex lists.
pub fn happy_split(t1: &Triangulation, t2: &Triangulation) -> Result<Vec<SubInstance>, DistanceError> {
    if t1.n() != t2.n() {
        return Err(DistanceError::SizeMismatch(t1.n(), t2.n()));
    }
    let n = t1.n();
    let common: Vec<Edge> = t1.diagonals().iter().copied().filter(|e| t2.contains(*e)).collect();
    let mut out = Vec::new();
    for face in convex::faces(n, &common) {
        let mut local = vec![usize::MAX; n];
        for (i, &v) in face.iter().enumerate() {
            local[v] = i;
        }
        let pick = |t: &Triangulation| -> Vec<Edge> {
            t.diagonals()
                .iter()
                .filter(|e| !t1.contains(**e) || !t2.contains(**e))
                .filter(|e| local[e.a] != usize::MAX && local[e.b] != usize::MAX)
                .map(|e| Edge::new(local[e.a], local[e.b]))
                .collect()
        };
        let k = face.len();
        out.push(SubInstance {
            t1: Triangulation::new(k, pick(t1))?,
            t2: Triangulation::new(k, pick(t2))?,
            vertices: face,
        });
    }
    Ok(out)
}

/// Exact flip distance with the default state budget.
pub fn exact_distance(t1: &Triangulation, t2: &Triangulation) -> Result<(usize, FlipSequence), DistanceError> {
    exact_distance_with_budget(t1, t2, DEFAULT_STATE_BUDGET)
}

/// Exact flip distance and a witness sequence.
///
/// The instance is split along common diagonals first; each piece is solved
/// by a level-synchronous bidirectional breadth-first search. Among meeting
/// states of minimum total depth, the one with the smallest canonical key is
/// used, which makes the witness deterministic.
pub fn exact_distance_with_budget(
    t1: &Triangulation,
    t2: &Triangulation,
    budget: usize,
) -> Result<(usize, FlipSequence), DistanceError> {
    let pieces = happy_split(t1, t2)?;
    let mut seq = FlipSequence::empty(t1.clone());
    for piece in &pieces {
        if piece.t1 == piece.t2 {
            continue;
        }
        let local = bidirectional_search(&piece.t1, &piece.t2, budget)?;
        seq.steps.extend(local.iter().map(|&e| piece.lift(e)));
    }
    Ok((seq.len(), seq))
}

/// Depth, and the parent key with the diagonal removed from it.
type Visit = (usize, Option<(Vec<u8>, Edge)>);

struct Side {
    seen: HashMap<Vec<u8>, Visit>,
    frontier: Vec<Vec<u8>>,
    depth: usize,
}

impl Side {
    fn new(t: &Triangulation) -> Self {
        let key = t.canonical_key();
        let mut seen = HashMap::new();
        seen.insert(key.clone(), (0, None));
        Side { seen, frontier: vec![key], depth: 0 }
    }

    /// Path of removed diagonals from the root of this side to `key`.
    fn path_to(&self, key: &[u8]) -> Vec<Edge> {
        let mut steps = Vec::new();
        let mut cur = key.to_vec();
        while let Some((_, Some((parent, e)))) = self.seen.get(&cur) {
            steps.push(*e);
            cur = parent.clone();
        }
        steps.reverse();
        steps
    }
}

fn bidirectional_search(t1: &Triangulation, t2: &Triangulation, budget: usize) -> Result<Vec<Edge>, DistanceError> {
    let n = t1.n();
    let mut fwd = Side::new(t1);
    let mut bwd = Side::new(t2);
    loop {
        let expand_forward = fwd.frontier.len() <= bwd.frontier.len();
        let (this, other) = if expand_forward { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };
        let mut next = Vec::new();
        let mut best: Option<(usize, Vec<u8>)> = None;
        for key in std::mem::take(&mut this.frontier) {
            let t = from_canonical_key(n, &key);
            for (e, s) in t.flip_neighbors() {
                let sk = s.canonical_key();
                if this.seen.contains_key(&sk) {
                    continue;
                }
                if let Some(&(d, _)) = other.seen.get(&sk) {
                    let total = this.depth + 1 + d;
                    let better = match &best {
                        None => true,
                        Some((bt, bk)) => total < *bt || (total == *bt && sk < *bk),
                    };
                    if better {
                        best = Some((total, sk.clone()));
                    }
                }
                this.seen.insert(sk.clone(), (this.depth + 1, Some((key.clone(), e))));
                next.push(sk);
            }
            if this.seen.len() + other.seen.len() > budget {
                return Err(DistanceError::BudgetExceeded { budget });
            }
        }
        this.depth += 1;
        this.frontier = next;
        if let Some((_, meet)) = best {
            let head = fwd.path_to(&meet);
            let tail_rev = bwd.path_to(&meet);
            // tail_rev walks t2 -> meet; invert it to walk meet -> t2
            let back = FlipSequence { start: t2.clone(), steps: tail_rev }.reversed()?;
            let mut steps = head;
            steps.extend(back.steps);
            return Ok(steps);
        }
        if this.frontier.is_empty() {
            unreachable!("the flip graph of a convex polygon is connected");
        }
    }
}

/// Largest flip distance between two triangulations of the `n`-gon, by a
/// breadth-first search from every vertex of the explicit flip graph.
pub fn diameter(n: usize) -> Result<usize, DistanceError> {
    if !(3..=DIAMETER_CAP).contains(&n) {
        return Err(DistanceError::TooLarge { n, cap: DIAMETER_CAP });
    }
    let adj = flip_graph(n)?;
    let mut best = 0;
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = Vec::with_capacity(adj.len());
    for s in 0..adj.len() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        queue.clear();
        dist[s] = 0;
        queue.push(s);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    best = best.max(dist[u]);
                    queue.push(u);
                }
            }
        }
    }
    Ok(best)
}

/// The flip graph on [`convex::enumerate`]'s ordering, as adjacency lists.
pub fn flip_graph(n: usize) -> Result<Vec<Vec<usize>>, DistanceError> {
    let all = convex::enumerate(n)?;
    let index: HashMap<&Triangulation, usize> = all.iter().enumerate().map(|(i, t)| (t, i)).collect();
    Ok(all.iter().map(|t| t.flip_neighbors().iter().map(|(_, s)| index[s]).collect()).collect())
}

/// Flips the diagonals inside `region` until all of them are incident to
/// `apex`.
///
/// `region` is a sorted vertex list whose cyclically consecutive vertices
/// are joined by sides or diagonals of `t`. Each flip replaces the far side
/// of a triangle at `apex` by a new diagonal at `apex`, so every diagonal of
/// the region is flipped at most once and the length equals the number of
/// region diagonals not already at `apex`.
pub fn fan_sequence(t: &Triangulation, region: &[VertexId], apex: VertexId) -> Result<FlipSequence, DistanceError> {
    let n = t.n();
    let k = region.len();
    if k < 3 || region.windows(2).any(|w| w[0] >= w[1]) || region[k - 1] >= n {
        return Err(DistanceError::NotASubpolygon("need a sorted list of at least 3 vertices".into()));
    }
    let pos = |v: VertexId| region.binary_search(&v).ok();
    let Some(apex_pos) = pos(apex) else {
        return Err(DistanceError::NotASubpolygon(format!("apex {apex} is not a region vertex")));
    };
    let is_side = |e: Edge| {
        let (i, j) = (pos(e.a).unwrap(), pos(e.b).unwrap());
        j == i + 1 || (i == 0 && j == k - 1)
    };
    for i in 0..k {
        let e = Edge::new(region[i], region[(i + 1) % k]);
        if !e.is_boundary(n) && !t.contains(e) {
            return Err(DistanceError::NotASubpolygon(format!("side {e} is missing")));
        }
    }
    let mut cur = t.clone();
    let mut steps = Vec::new();
    loop {
        let adj = cur.adjacency();
        // neighbors of apex inside the region, in cyclic order after apex
        let mut around: Vec<usize> = adj[apex].iter().filter_map(|&v| pos(v)).map(|p| (p + k - apex_pos) % k).collect();
        around.sort_unstable();
        let target = around.windows(2).map(|w| {
            let (u, v) = (region[(w[0] + apex_pos) % k], region[(w[1] + apex_pos) % k]);
            Edge::new(u, v)
        });
        let mut flipped = false;
        for e in target {
            if !is_side(e) {
                cur = cur.flip(e)?;
                steps.push(e);
                flipped = true;
                break;
            }
        }
        if !flipped {
            break;
        }
    }
    Ok(FlipSequence { start: t.clone(), steps })
}

/// A flip sequence from `t1` to `t2` of length at most `2 |t1 \ t2|`.
///
/// Each piece of the happy split is fanned to the apex that needs the fewest
/// flips on both sides (smallest label on ties); the `t2` half is replayed
/// backwards.
pub fn two_approx_sequence(t1: &Triangulation, t2: &Triangulation) -> Result<FlipSequence, DistanceError> {
    let mut seq = FlipSequence::empty(t1.clone());
    for piece in happy_split(t1, t2)? {
        if piece.t1 == piece.t2 {
            continue;
        }
        let k = piece.vertices.len();
        let cost = |apex: VertexId| (k - 3 - piece.t1.degree(apex)) + (k - 3 - piece.t2.degree(apex));
        let apex = (0..k).min_by_key(|&v| (cost(v), v)).unwrap();
        let all: Vec<VertexId> = (0..k).collect();
        let there = fan_sequence(&piece.t1, &all, apex)?;
        let back = fan_sequence(&piece.t2, &all, apex)?.reversed()?;
        seq.steps.extend(there.steps.iter().chain(back.steps.iter()).map(|&e| piece.lift(e)));
    }
    Ok(seq)
}
