//! Triangulations of a labeled convex polygon.
//!
//! Vertices are `0..n` in counterclockwise order. Only diagonals are stored;
//! the polygon sides `(i, i+1)` and `(0, n-1)` are implicit. Cutting the
//! circle between `n-1` and `0` gives the spine: the spine edges are exactly
//! the sides `(i, i+1)`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Position of a vertex on the polygon.
pub type VertexId = usize;

/// Largest `n` accepted by [`enumerate`].
///
/// Catalan(13) = 742 900 triangulations at n = 15; beyond that the list no
/// longer fits comfortably in memory.
pub const ENUMERATION_CAP: usize = 15;

/// An undirected edge, always normalized so that `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
}

impl Edge {
    /// Builds the edge between `u` and `v` in either order.
    ///
    /// # Panics
    /// If `u == v`.
    pub fn new(u: VertexId, v: VertexId) -> Self {
        assert_ne!(u, v, "an edge needs two distinct endpoints");
        if u < v {
            Edge { a: u, b: v }
        } else {
            Edge { a: v, b: u }
        }
    }

    pub fn has_endpoint(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint that is not `v`.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn is_boundary(&self, n: usize) -> bool {
        self.b == self.a + 1 || (self.a == 0 && self.b == n - 1)
    }

    pub fn is_spine(&self) -> bool {
        self.b == self.a + 1
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// True iff the two edges cross in their interiors.
pub fn crosses(e1: Edge, e2: Edge) -> bool {
    (e1.a < e2.a && e2.a < e1.b && e1.b < e2.b) || (e2.a < e1.a && e1.a < e2.b && e2.b < e1.b)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("expected {expected} diagonals, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("diagonals {0} and {1} cross")]
    CrossingPair(Edge, Edge),
    #[error("{0} is not an interior diagonal")]
    NotInterior(Edge),
    #[error("diagonal {0} listed twice")]
    Duplicate(Edge),
    #[error("{0} is not a diagonal of the triangulation")]
    NotADiagonal(Edge),
    #[error("enumeration supports 3 <= n <= {cap}, got {n}")]
    TooLarge { n: usize, cap: usize },
}

/// Checks that `diagonals` form a triangulation of the convex `n`-gon.
///
/// Runs in O(n log n): after sorting by (a ascending, b descending) a set of
/// chords is non-crossing iff it is laminar, which a stack check confirms.
pub fn validate(n: usize, diagonals: &[Edge]) -> Result<(), TriangulationError> {
    if n < 3 {
        return Err(TriangulationError::TooFewVertices(n));
    }
    for &e in diagonals {
        if e.a >= e.b || e.b >= n || e.is_boundary(n) {
            return Err(TriangulationError::NotInterior(e));
        }
    }
    let mut sorted = diagonals.to_vec();
    sorted.sort_by(|x, y| x.a.cmp(&y.a).then(y.b.cmp(&x.b)));
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(TriangulationError::Duplicate(w[0]));
        }
    }
    if let Some((e, f)) = first_crossing_sorted(&sorted) {
        return Err(TriangulationError::CrossingPair(e, f));
    }
    if diagonals.len() != n - 3 {
        return Err(TriangulationError::WrongCount { expected: n - 3, found: diagonals.len() });
    }
    Ok(())
}

/// Some crossing pair among `chords`, if there is one.
pub fn find_crossing(chords: &[Edge]) -> Option<(Edge, Edge)> {
    let mut sorted = chords.to_vec();
    sorted.sort_by(|x, y| x.a.cmp(&y.a).then(y.b.cmp(&x.b)));
    first_crossing_sorted(&sorted)
}

fn first_crossing_sorted(sorted: &[Edge]) -> Option<(Edge, Edge)> {
    let mut stack: Vec<Edge> = Vec::new();
    for &e in sorted {
        while let Some(&top) = stack.last() {
            if top.b <= e.a {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&top) = stack.last() {
            if e.b > top.b {
                return Some((top, e));
            }
        }
        stack.push(e);
    }
    None
}

/// A triangulation of the convex `n`-gon, stored as its sorted diagonal list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    n: usize,
    diagonals: Vec<Edge>,
}

impl Triangulation {
    pub fn new(n: usize, diagonals: impl IntoIterator<Item = Edge>) -> Result<Self, TriangulationError> {
        let mut diagonals: Vec<Edge> = diagonals.into_iter().collect();
        validate(n, &diagonals)?;
        diagonals.sort();
        Ok(Triangulation { n, diagonals })
    }

    /// Convenience constructor from `(a, b)` tuples in any orientation.
    pub fn from_pairs(n: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self, TriangulationError> {
        for &(u, v) in pairs {
            if u == v {
                return Err(TriangulationError::NotInterior(Edge { a: u, b: v }));
            }
        }
        Self::new(n, pairs.iter().map(|&(u, v)| Edge::new(u, v)))
    }

    /// Skips validation; callers guarantee a sorted valid diagonal list.
    pub(crate) fn from_sorted_unchecked(n: usize, diagonals: Vec<Edge>) -> Self {
        debug_assert!(diagonals.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(validate(n, &diagonals), Ok(()));
        Triangulation { n, diagonals }
    }

    /// All diagonals incident to `apex` (the fan triangulation).
    pub fn fan(n: usize, apex: VertexId) -> Result<Self, TriangulationError> {
        if n < 3 {
            return Err(TriangulationError::TooFewVertices(n));
        }
        let diagonals =
            (0..n).filter(|&v| v != apex && v != (apex + 1) % n && v != (apex + n - 1) % n).map(|v| Edge::new(apex, v));
        Self::new(n, diagonals)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> &[Edge] {
        &self.diagonals
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.diagonals.binary_search(&e).is_ok()
    }

    /// Number of diagonals shared with `other`.
    pub fn common_count(&self, other: &Triangulation) -> usize {
        self.diagonals.iter().filter(|e| other.contains(**e)).count()
    }

    /// Diagonals of `self` missing from `other`.
    pub fn difference(&self, other: &Triangulation) -> Vec<Edge> {
        self.diagonals.iter().copied().filter(|e| !other.contains(*e)).collect()
    }

    /// Sorted neighbor list of every vertex, polygon sides included.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let n = self.n;
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for v in 0..n {
            adj[v].push((v + 1) % n);
            adj[v].push((v + n - 1) % n);
        }
        for e in &self.diagonals {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Number of diagonals incident to `v`.
    pub fn degree(&self, v: VertexId) -> usize {
        self.diagonals.iter().filter(|e| e.has_endpoint(v)).count()
    }

    /// All `n - 2` triangles as sorted vertex triples.
    pub fn triangles(&self) -> Vec<[VertexId; 3]> {
        let adj = self.adjacency();
        let mut out = Vec::with_capacity(self.n - 2);
        let mut stack = vec![(0, self.n - 1)];
        while let Some((a, b)) = stack.pop() {
            if b - a < 2 {
                continue;
            }
            let c = inner_apex(&adj[a], a, b);
            out.push([a, c, b]);
            stack.push((a, c));
            stack.push((c, b));
        }
        out.sort_unstable();
        out
    }

    /// The two apexes of the quadrilateral around diagonal `e`: the one
    /// inside the interval `(e.a, e.b)` and the one outside it.
    pub fn quad_apexes(&self, e: Edge) -> Result<(VertexId, VertexId), TriangulationError> {
        if !self.contains(e) {
            return Err(TriangulationError::NotADiagonal(e));
        }
        let n = self.n;
        let (a, b) = (e.a, e.b);
        let mut inner = a + 1;
        let mut outer_high: Option<VertexId> = None;
        let mut outer_low: Option<VertexId> = None;
        let mut consider = |v: VertexId| {
            if v > a && v < b {
                inner = inner.max(v);
            } else if v > b {
                outer_high = Some(outer_high.map_or(v, |h: VertexId| h.min(v)));
            } else if v < a {
                outer_low = Some(outer_low.map_or(v, |l: VertexId| l.min(v)));
            }
        };
        consider((a + 1) % n);
        consider((a + n - 1) % n);
        for d in &self.diagonals {
            if d.has_endpoint(a) {
                consider(d.other(a));
            }
        }
        let outer = outer_high.or(outer_low).expect("every diagonal borders two triangles");
        Ok((inner, outer))
    }

    /// Replaces `e` by the other diagonal of its quadrilateral.
    pub fn flip(&self, e: Edge) -> Result<Triangulation, TriangulationError> {
        let (c, d) = self.quad_apexes(e)?;
        Ok(self.replace(e, Edge::new(c, d)))
    }

    /// The diagonal that flipping `e` would introduce.
    pub fn flip_partner(&self, e: Edge) -> Result<Edge, TriangulationError> {
        let (c, d) = self.quad_apexes(e)?;
        Ok(Edge::new(c, d))
    }

    fn replace(&self, old: Edge, new: Edge) -> Triangulation {
        let mut diagonals: Vec<Edge> = self.diagonals.iter().copied().filter(|&x| x != old).collect();
        let pos = diagonals.binary_search(&new).unwrap_err();
        diagonals.insert(pos, new);
        Triangulation { n: self.n, diagonals }
    }

    /// One entry per diagonal: the flipped diagonal and the resulting
    /// triangulation, in diagonal order.
    pub fn flip_neighbors(&self) -> Vec<(Edge, Triangulation)> {
        self.diagonals.iter().map(|&e| (e, self.flip(e).expect("own diagonal"))).collect()
    }

    /// Injective byte encoding: the sorted edge list, each endpoint as a
    /// big-endian `u16`, so byte order equals lexicographic edge order.
    pub fn canonical_key(&self) -> Vec<u8> {
        canonical_key(self)
    }

    /// Text block `n <n>` followed by one `d <a> <b>` line per diagonal.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        s.push_str(&self.diagonal_lines());
        s
    }

    pub(crate) fn diagonal_lines(&self) -> String {
        let mut s = String::new();
        for e in &self.diagonals {
            s.push_str(&format!("d {} {}\n", e.a, e.b));
        }
        s
    }

    /// Relabels vertices through `map` into a polygon of `new_n` vertices.
    /// `map` must be strictly increasing so the cyclic order is preserved.
    pub fn relabel(&self, new_n: usize, map: &[VertexId]) -> Result<Triangulation, TriangulationError> {
        Triangulation::new(new_n, self.diagonals.iter().map(|e| Edge::new(map[e.a], map[e.b])))
    }
}

pub fn canonical_key(t: &Triangulation) -> Vec<u8> {
    let mut key = Vec::with_capacity(4 * t.diagonals.len());
    for e in &t.diagonals {
        key.extend_from_slice(&(e.a as u16).to_be_bytes());
        key.extend_from_slice(&(e.b as u16).to_be_bytes());
    }
    key
}

/// Inverse of [`canonical_key`].
pub fn from_canonical_key(n: usize, key: &[u8]) -> Triangulation {
    let diagonals = key
        .chunks_exact(4)
        .map(|c| Edge { a: u16::from_be_bytes([c[0], c[1]]) as usize, b: u16::from_be_bytes([c[2], c[3]]) as usize })
        .collect();
    Triangulation::from_sorted_unchecked(n, diagonals)
}

fn inner_apex(neighbors: &[VertexId], a: VertexId, b: VertexId) -> VertexId {
    // neighbors is sorted; the apex over (a, b) is the largest neighbor of a below b
    let idx = neighbors.partition_point(|&v| v < b);
    let c = neighbors[idx - 1];
    debug_assert!(c > a);
    c
}

pub fn flip(t: &Triangulation, e: Edge) -> Result<Triangulation, TriangulationError> {
    t.flip(e)
}

pub fn flip_neighbors(t: &Triangulation) -> Vec<(Edge, Triangulation)> {
    t.flip_neighbors()
}

/// Every triangulation of the convex `n`-gon, sorted by canonical key.
pub fn enumerate(n: usize) -> Result<Vec<Triangulation>, TriangulationError> {
    if !(3..=ENUMERATION_CAP).contains(&n) {
        return Err(TriangulationError::TooLarge { n, cap: ENUMERATION_CAP });
    }
    // by_len[l] lists the diagonal sets of the sub-polygon on 0..=l whose
    // side (0, l) is the closing chord.
    let mut by_len: Vec<Vec<Vec<Edge>>> = vec![vec![Vec::new()], vec![Vec::new()]];
    for len in 2..n {
        let mut all = Vec::new();
        for c in 1..len {
            for left in &by_len[c] {
                for right in &by_len[len - c] {
                    let mut d = left.clone();
                    if c >= 2 {
                        d.push(Edge::new(0, c));
                    }
                    d.extend(right.iter().map(|e| Edge::new(e.a + c, e.b + c)));
                    if len - c >= 2 {
                        d.push(Edge::new(c, len));
                    }
                    all.push(d);
                }
            }
        }
        by_len.push(all);
    }
    let mut out: Vec<Triangulation> = by_len[n - 1]
        .iter()
        .map(|d| {
            let mut d = d.clone();
            d.sort();
            Triangulation::from_sorted_unchecked(n, d)
        })
        .collect();
    out.sort_by_cached_key(|t| t.canonical_key());
    Ok(out)
}

/// The faces cut out of the `n`-gon by a set of non-crossing chords, each as
/// a sorted vertex list. `chords` may contain polygon sides; they are ignored.
pub fn faces(n: usize, chords: &[Edge]) -> Vec<Vec<VertexId>> {
    let mut longest: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for e in chords {
        if !e.is_boundary(n) {
            longest[e.a].push(e.b);
        }
    }
    for list in &mut longest {
        list.sort_unstable();
        list.dedup();
    }
    let mut out = Vec::new();
    let mut stack = vec![(0, n - 1)];
    while let Some((a, b)) = stack.pop() {
        let mut face = Vec::new();
        let mut v = a;
        loop {
            face.push(v);
            if v == b {
                break;
            }
            // longest chord from v that stays inside [a, b], other than (a, b)
            let next = longest[v].iter().rev().copied().find(|&x| x <= b && !(v == a && x == b));
            match next {
                Some(x) => {
                    stack.push((v, x));
                    v = x;
                }
                None => v += 1,
            }
        }
        out.push(face);
    }
    out.sort();
    out
}

/// Completes a non-crossing chord set to a triangulation by fanning every
/// face from its smallest vertex.
pub fn complete_by_fanning(n: usize, chords: &[Edge]) -> Result<Triangulation, TriangulationError> {
    let mut all: BTreeSet<Edge> = chords.iter().copied().filter(|e| !e.is_boundary(n)).collect();
    for face in faces(n, chords) {
        let apex = face[0];
        for &v in &face[2..face.len().saturating_sub(1)] {
            all.insert(Edge::new(apex, v));
        }
    }
    Triangulation::new(n, all)
}
