//! Reduction from planar separable monotone Max-2SAT to a pair of
//! triangulations whose conflict graph encodes the optimum.
//!
//! Variables are laid out left to right. Each variable region reads
//!
//! ```text
//! [neg anchors][x̄ block: m+1 below pairs] M [x block: m+1 above pairs][pos anchors]
//! ```
//!
//! where `M` is a spacer vertex: the triangle `(Qe, M, P0)` closing the gap
//! between the two blocks has two spine edges on both sides and so is not a
//! pair. Adjacent regions share their boundary vertex. A clause contributes
//! one anchor spine edge at each of its variables; anchors for clauses
//! reaching left come first (innermost clause nearest the literal block),
//! then those reaching right (outermost first), which keeps every clause's
//! triangles nested like brackets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::acyclic::{self, AcyclicError, AcyclicResult};
use crate::blowup::{self, classify_pair, ConflictGraph, PairType, SpinePair};
use crate::convex::{self, Edge, Triangulation, TriangulationError, VertexId};

/// Largest variable count for [`max2sat_bruteforce`].
pub const BRUTE_FORCE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Positive => "pos",
            Side::Negative => "neg",
        }
    }
}

/// A two-literal clause over variables `i < j` (1-based), all positive or
/// all negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub side: Side,
    pub i: usize,
    pub j: usize,
}

impl Clause {
    pub fn satisfied(&self, assignment: &[bool]) -> bool {
        let (a, b) = (assignment[self.i - 1], assignment[self.j - 1]);
        match self.side {
            Side::Positive => a || b,
            Side::Negative => !a || !b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Max2SatInstance {
    pub w: usize,
    pub clauses: Vec<Clause>,
    /// Target number of satisfied clauses, when known.
    pub k_prime: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("instance needs at least one variable")]
    NoVariables,
    #[error("clause {clause} mixes positive and negative literals")]
    NotMonotone { clause: usize },
    #[error("{side:?} clauses {c1} and {c2} interleave")]
    NotLaminar { side: Side, c1: usize, c2: usize },
    #[error("clause {clause} is malformed: {reason}")]
    BadClause { clause: usize, reason: String },
    #[error("brute force supports at most {cap} variables, got {w}")]
    TooLarge { w: usize, cap: usize },
    #[error("gadget layout is inconsistent: {0}")]
    Layout(String),
    #[error("acyclic subset of size {ac} but expected {expected}")]
    Mismatch { ac: usize, expected: usize },
    #[error(transparent)]
    Acyclic(#[from] AcyclicError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

impl Max2SatInstance {
    pub fn new(w: usize, clauses: Vec<Clause>, k_prime: Option<usize>) -> Result<Self, ReductionError> {
        let phi = Max2SatInstance { w, clauses, k_prime };
        validate_instance(&phi)?;
        Ok(phi)
    }

    /// Builds an instance from signed literals (`+v` / `-v`, 1-based).
    pub fn from_literals(w: usize, clauses: &[(i64, i64)], k_prime: Option<usize>) -> Result<Self, ReductionError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (idx, &(x, y)) in clauses.iter().enumerate() {
            if x == 0 || y == 0 {
                return Err(ReductionError::BadClause { clause: idx, reason: "literal 0".into() });
            }
            if (x > 0) != (y > 0) {
                return Err(ReductionError::NotMonotone { clause: idx });
            }
            let side = if x > 0 { Side::Positive } else { Side::Negative };
            let (a, b) = (x.unsigned_abs() as usize, y.unsigned_abs() as usize);
            out.push(Clause { side, i: a.min(b), j: a.max(b) });
        }
        Max2SatInstance::new(w, out, k_prime)
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }
}

pub fn validate_instance(phi: &Max2SatInstance) -> Result<(), ReductionError> {
    if phi.w == 0 {
        return Err(ReductionError::NoVariables);
    }
    for (idx, c) in phi.clauses.iter().enumerate() {
        if c.i == 0 || c.j > phi.w {
            return Err(ReductionError::BadClause {
                clause: idx,
                reason: format!("variable out of range 1..={}", phi.w),
            });
        }
        if c.i >= c.j {
            return Err(ReductionError::BadClause { clause: idx, reason: "needs two distinct variables i < j".into() });
        }
    }
    for (x, c) in phi.clauses.iter().enumerate() {
        for (y, d) in phi.clauses.iter().enumerate().skip(x + 1) {
            if c.side == d.side && ((c.i < d.i && d.i < c.j && c.j < d.j) || (d.i < c.i && c.i < d.j && d.j < c.j)) {
                return Err(ReductionError::NotLaminar { side: c.side, c1: x, c2: y });
            }
        }
    }
    if let Some(k) = phi.k_prime {
        if k > phi.m() {
            return Err(ReductionError::BadClause {
                clause: phi.m(),
                reason: format!("target {k} exceeds clause count"),
            });
        }
    }
    Ok(())
}

/// Maximum number of simultaneously satisfiable clauses.
pub fn max2sat_bruteforce(phi: &Max2SatInstance) -> Result<usize, ReductionError> {
    if phi.w > BRUTE_FORCE_CAP {
        return Err(ReductionError::TooLarge { w: phi.w, cap: BRUTE_FORCE_CAP });
    }
    let mut best = 0;
    let mut assignment = vec![false; phi.w];
    for bits in 0u32..(1u32 << phi.w) {
        for (v, slot) in assignment.iter_mut().enumerate() {
            *slot = bits >> v & 1 == 1;
        }
        best = best.max(phi.clauses.iter().filter(|c| c.satisfied(&assignment)).count());
    }
    Ok(best)
}

/// What a spine pair of the reduction stands for. Variables and clauses are
/// 1-based in labels; `copy` runs over `0..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Copy of the positive literal block of a variable (above pair).
    Literal { var: usize, copy: usize },
    /// Copy of the negated literal block (below pair).
    NegLiteral { var: usize, copy: usize },
    /// Positive clause, crossing pair anchored at its first variable.
    PosFirst { clause: usize },
    /// Positive clause, above pair anchored at its second variable.
    PosSecond { clause: usize },
    /// Negative clause, below pair anchored at its first variable.
    NegFirst { clause: usize },
    /// Negative clause, crossing pair anchored at its second variable.
    NegSecond { clause: usize },
}

impl Role {
    pub fn label(&self) -> String {
        match *self {
            Role::Literal { var, copy } => format!("x:{var}:{copy}"),
            Role::NegLiteral { var, copy } => format!("nx:{var}:{copy}"),
            Role::PosFirst { clause } => format!("c1:{}", clause + 1),
            Role::PosSecond { clause } => format!("c2:{}", clause + 1),
            Role::NegFirst { clause } => format!("nc1:{}", clause + 1),
            Role::NegSecond { clause } => format!("nc2:{}", clause + 1),
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<usize>().ok();
        match parts[..] {
            ["x", v, c] => Some(Role::Literal { var: num(v)?, copy: num(c)? }),
            ["nx", v, c] => Some(Role::NegLiteral { var: num(v)?, copy: num(c)? }),
            [kind, k] => {
                let clause = num(k)?.checked_sub(1)?;
                match kind {
                    "c1" => Some(Role::PosFirst { clause }),
                    "c2" => Some(Role::PosSecond { clause }),
                    "nc1" => Some(Role::NegFirst { clause }),
                    "nc2" => Some(Role::NegSecond { clause }),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn clause(&self) -> Option<usize> {
        match *self {
            Role::PosFirst { clause }
            | Role::PosSecond { clause }
            | Role::NegFirst { clause }
            | Role::NegSecond { clause } => Some(clause),
            _ => None,
        }
    }

    /// The partial assignment under which the canonical witness picks this
    /// role, as `(variable, value)` pairs.
    pub fn condition(&self, phi: &Max2SatInstance) -> Vec<(usize, bool)> {
        match *self {
            Role::Literal { var, .. } => vec![(var, true)],
            Role::NegLiteral { var, .. } => vec![(var, false)],
            Role::PosSecond { clause } => vec![(phi.clauses[clause].j, true)],
            Role::PosFirst { clause } => vec![(phi.clauses[clause].i, true), (phi.clauses[clause].j, false)],
            Role::NegFirst { clause } => vec![(phi.clauses[clause].i, false)],
            Role::NegSecond { clause } => vec![(phi.clauses[clause].i, true), (phi.clauses[clause].j, false)],
        }
    }

    /// Two roles never appear together in a canonical witness: their
    /// conditions contradict, or they are the two halves of one clause.
    pub fn exclusive_with(&self, other: &Role, phi: &Max2SatInstance) -> bool {
        if self.clause().is_some() && self.clause() == other.clause() {
            return true;
        }
        let mine = self.condition(phi);
        other.condition(phi).iter().any(|&(v, val)| mine.iter().any(|&(u, w)| u == v && w != val))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The two triangulations of a reduction together with the meaning of each
/// spine pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub instance: Max2SatInstance,
    pub t1: Triangulation,
    pub t2: Triangulation,
    pub pairs: Vec<SpinePair>,
    /// `roles[i]` is the role of pair `i`.
    pub roles: Vec<Role>,
}

impl ReductionOutput {
    pub fn index_of(&self, role: Role) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    /// Role map text, one `role <idx> <label>` line per pair.
    pub fn role_map_text(&self) -> String {
        self.roles.iter().enumerate().map(|(i, r)| format!("role {i} {}\n", r.label())).collect()
    }
}

struct VarRegion {
    /// First vertex of the region (shared with the previous region).
    start: VertexId,
    /// First vertex of the x̄ block.
    neg_block: VertexId,
    /// Vertex right after the x̄ block.
    neg_block_end: VertexId,
    /// First vertex of the x block.
    pos_block: VertexId,
    /// Last vertex of the region (shared with the next region).
    end: VertexId,
}

/// Builds the reduction's pair of triangulations.
pub fn build_reduction(phi: &Max2SatInstance) -> Result<ReductionOutput, ReductionError> {
    validate_instance(phi)?;
    let m = phi.m();
    let mut anchors: HashMap<Role, VertexId> = HashMap::new();
    let mut regions = Vec::with_capacity(phi.w);
    let mut pos = 0;
    for v in 1..=phi.w {
        let start = pos;
        let at = |side: Side, second: bool| -> Vec<(usize, &Clause)> {
            let mut list: Vec<(usize, &Clause)> = phi
                .clauses
                .iter()
                .enumerate()
                .filter(|(_, c)| c.side == side && if second { c.j == v } else { c.i == v })
                .collect();
            if second {
                // reaching left: innermost (largest i) first
                list.sort_by_key(|&(k, c)| (std::cmp::Reverse(c.i), k));
            } else {
                // reaching right: outermost (largest j) first
                list.sort_by_key(|&(k, c)| (std::cmp::Reverse(c.j), std::cmp::Reverse(k)));
            }
            list
        };
        for (k, _) in at(Side::Negative, true) {
            anchors.insert(Role::NegSecond { clause: k }, pos);
            pos += 1;
        }
        for (k, _) in at(Side::Negative, false) {
            anchors.insert(Role::NegFirst { clause: k }, pos);
            pos += 1;
        }
        let neg_block = pos;
        pos += m + 1;
        let neg_block_end = pos;
        // spacer vertex, then the x block
        pos += 2;
        let pos_block = pos;
        pos += m + 1;
        for (k, _) in at(Side::Positive, true) {
            anchors.insert(Role::PosSecond { clause: k }, pos);
            pos += 1;
        }
        for (k, _) in at(Side::Positive, false) {
            anchors.insert(Role::PosFirst { clause: k }, pos);
            pos += 1;
        }
        regions.push(VarRegion { start, neg_block, neg_block_end, pos_block, end: pos });
    }
    let n = pos + 1;

    // (role, spine start, apex in T, apex in T')
    let mut spec: Vec<(Role, VertexId, VertexId, VertexId)> = Vec::new();
    for (idx, g) in regions.iter().enumerate() {
        let var = idx + 1;
        for copy in 0..=m {
            spec.push((Role::NegLiteral { var, copy }, g.neg_block + copy, g.pos_block, g.end));
            spec.push((Role::Literal { var, copy }, g.pos_block + copy, g.start, g.neg_block_end));
        }
    }
    for (k, c) in phi.clauses.iter().enumerate() {
        let (gi, gj) = (&regions[c.i - 1], &regions[c.j - 1]);
        match c.side {
            Side::Positive => {
                let (c1, c2) = (anchors[&Role::PosFirst { clause: k }], anchors[&Role::PosSecond { clause: k }]);
                spec.push((Role::PosFirst { clause: k }, c1, c2, gi.neg_block_end));
                spec.push((Role::PosSecond { clause: k }, c2, c1, gj.neg_block_end));
            }
            Side::Negative => {
                let (d1, d2) = (anchors[&Role::NegFirst { clause: k }], anchors[&Role::NegSecond { clause: k }]);
                spec.push((Role::NegFirst { clause: k }, d1, gi.pos_block, d2 + 1));
                spec.push((Role::NegSecond { clause: k }, d2, gj.pos_block, d1 + 1));
            }
        }
    }
    spec.sort_by_key(|s| s.1);

    let mut chords_t: BTreeSet<Edge> = BTreeSet::new();
    let mut chords_tp: BTreeSet<Edge> = BTreeSet::new();
    let add = |set: &mut BTreeSet<Edge>, u: VertexId, v: VertexId| {
        let e = Edge::new(u, v);
        if !e.is_boundary(n) {
            set.insert(e);
        }
    };
    for &(_, a, u, up) in &spec {
        add(&mut chords_t, u, a);
        add(&mut chords_t, u, a + 1);
        add(&mut chords_tp, up, a);
        add(&mut chords_tp, up, a + 1);
    }
    for g in &regions {
        add(&mut chords_t, g.neg_block_end, g.pos_block);
        add(&mut chords_tp, g.neg_block_end, g.pos_block);
    }
    let complete = |chords: &BTreeSet<Edge>| -> Result<Triangulation, ReductionError> {
        let list: Vec<Edge> = chords.iter().copied().collect();
        if let Some((e, f)) = convex::find_crossing(&list) {
            return Err(ReductionError::Layout(format!("gadget edges {e} and {f} cross")));
        }
        Ok(convex::complete_by_fanning(n, &list)?)
    };
    let t1 = complete(&chords_t)?;
    let t2 = complete(&chords_tp)?;

    let pairs = blowup::spine_pairs(&t1, &t2);
    let expected: Vec<(Edge, VertexId, VertexId)> =
        spec.iter().map(|&(_, a, u, up)| (Edge::new(a, a + 1), u, up)).collect();
    let found: Vec<(Edge, VertexId, VertexId)> = pairs.iter().map(|p| (p.spine, p.apex_t, p.apex_tp)).collect();
    if expected != found {
        return Err(ReductionError::Layout("completed triangulations do not reproduce the gadget pairs".into()));
    }
    let roles = spec.iter().map(|s| s.0).collect();
    Ok(ReductionOutput { instance: phi.clone(), t1, t2, pairs, roles })
}

/// The acyclic subset an assignment induces: the literal block it makes
/// true, plus for each satisfied clause one pair. Positive clauses take the
/// second (above) pair whenever its variable is true, negative clauses take
/// the first (below) pair whenever its variable is false.
pub fn canonical_witness(out: &ReductionOutput, assignment: &[bool]) -> Vec<usize> {
    let phi = &out.instance;
    let mut s = Vec::new();
    for var in 1..=phi.w {
        for copy in 0..=phi.m() {
            let role = if assignment[var - 1] { Role::Literal { var, copy } } else { Role::NegLiteral { var, copy } };
            s.push(out.index_of(role).expect("literal block present"));
        }
    }
    for (clause, c) in phi.clauses.iter().enumerate() {
        let (xi, xj) = (assignment[c.i - 1], assignment[c.j - 1]);
        let role = match c.side {
            Side::Positive if xj => Some(Role::PosSecond { clause }),
            Side::Positive if xi => Some(Role::PosFirst { clause }),
            Side::Negative if !xi => Some(Role::NegFirst { clause }),
            Side::Negative if !xj => Some(Role::NegSecond { clause }),
            _ => None,
        };
        if let Some(r) = role {
            s.push(out.index_of(r).expect("clause pair present"));
        }
    }
    s.sort_unstable();
    s
}

/// How a conflict edge of a reduction was accounted for.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GadgetReport {
    /// All double conflicts, as `(i, j)` with `i < j`.
    pub double_conflicts: Vec<(usize, usize)>,
    /// How many of them the gadget inventories require.
    pub required_doubles: usize,
    /// One-way edges covered by the acyclicity criterion's type rules.
    pub lemma_directed: usize,
    /// One-way edges outside those rules, all between roles that never
    /// share a canonical witness.
    pub exceptional_directed: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("expected a double conflict between {0} and {1}")]
    MissingDoubleConflict(String, String),
    #[error("unexpected double conflict between {0} and {1}")]
    UnexpectedDoubleConflict(String, String),
    #[error("unexpected directed conflict {0} -> {1}")]
    UnexpectedDirectedConflict(String, String),
    #[error("conflict graph has {found} vertices, reduction has {expected} pairs")]
    SizeMismatch { found: usize, expected: usize },
}

/// Double conflicts the gadget inventories call for.
fn required_doubles(out: &ReductionOutput) -> Vec<(Role, Role)> {
    let phi = &out.instance;
    let m = phi.m();
    let mut req = Vec::new();
    for var in 1..=phi.w {
        for r in 0..=m {
            for s in 0..=m {
                req.push((Role::Literal { var, copy: r }, Role::NegLiteral { var, copy: s }));
            }
        }
    }
    for (clause, c) in phi.clauses.iter().enumerate() {
        // positive clauses clash with the negated literal blocks and vice versa
        let (first, second, lit): (Role, Role, fn(usize, usize) -> Role) = match c.side {
            Side::Positive => {
                (Role::PosFirst { clause }, Role::PosSecond { clause }, |var, copy| Role::NegLiteral { var, copy })
            }
            Side::Negative => {
                (Role::NegFirst { clause }, Role::NegSecond { clause }, |var, copy| Role::Literal { var, copy })
            }
        };
        req.push((first, second));
        for copy in 0..=m {
            req.push((lit(c.i, copy), first));
            req.push((lit(c.j, copy), second));
        }
    }
    req
}

/// Pair indices `(i, j)`, `i < j`, that the gadget inventories require to
/// conflict in both directions.
pub fn required_double_conflicts(out: &ReductionOutput) -> BTreeSet<(usize, usize)> {
    required_doubles(out)
        .into_iter()
        .map(|(r1, r2)| {
            let (i, j) = (out.index_of(r1).unwrap(), out.index_of(r2).unwrap());
            (i.min(j), i.max(j))
        })
        .collect()
}

/// Checks a reduction's conflict graph against the gadget inventories.
///
/// Every required double conflict must be present; any other double
/// conflict, and any one-way edge outside the type rules of the acyclicity
/// criterion, must join two roles that never share a canonical witness.
pub fn verify_gadget_conflicts(out: &ReductionOutput, h: &ConflictGraph) -> Result<GadgetReport, GadgetError> {
    let k = out.pairs.len();
    if h.vertex_count != k {
        return Err(GadgetError::SizeMismatch { found: h.vertex_count, expected: k });
    }
    let phi = &out.instance;
    let label = |i: usize| out.roles[i].label();
    let mut report = GadgetReport::default();
    let required = required_double_conflicts(out);
    for &(i, j) in &required {
        if !(h.has_edge(i, j) && h.has_edge(j, i)) {
            return Err(GadgetError::MissingDoubleConflict(label(i), label(j)));
        }
    }
    report.required_doubles = required.len();
    report.double_conflicts = h.double_edges();
    for &(i, j) in &report.double_conflicts {
        if !required.contains(&(i, j)) && !out.roles[i].exclusive_with(&out.roles[j], phi) {
            return Err(GadgetError::UnexpectedDoubleConflict(label(i), label(j)));
        }
    }
    let types: Vec<PairType> = out.pairs.iter().map(classify_pair).collect();
    for &(i, j) in &h.edges {
        if h.has_edge(j, i) {
            continue;
        }
        if lemma_allows(&out.pairs, &types, i, j) {
            report.lemma_directed += 1;
        } else if out.roles[i].exclusive_with(&out.roles[j], phi) {
            report.exceptional_directed.push((i, j));
        } else {
            return Err(GadgetError::UnexpectedDirectedConflict(label(i), label(j)));
        }
    }
    Ok(report)
}

/// Edge directions the acyclicity criterion permits: same type running left
/// to right, above to crossing, above to below, crossing to below.
fn lemma_allows(pairs: &[SpinePair], types: &[PairType], i: usize, j: usize) -> bool {
    use PairType::*;
    match (types[i], types[j]) {
        (MirroredOrOther, _) | (_, MirroredOrOther) => false,
        (a, b) if a == b => pairs[i].spine.a < pairs[j].spine.a,
        (Above, Crossing) | (Above, Below) | (Crossing, Below) => true,
        _ => false,
    }
}

/// Outcome of comparing `ac(H)` with `w(m+1) + OPT`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub ac: AcyclicResult,
    pub optimum: usize,
    pub expected: usize,
}

pub fn reduction_equivalence_check(phi: &Max2SatInstance) -> Result<EquivalenceReport, ReductionError> {
    let out = build_reduction(phi)?;
    let h = blowup::conflict_graph(&blowup::blow_up(&out.t1, &out.t2, 1));
    let ac = acyclic::max_acyclic_subset(&h)?;
    let optimum = max2sat_bruteforce(phi)?;
    let expected = phi.w * (phi.m() + 1) + optimum;
    if ac.size != expected {
        return Err(ReductionError::Mismatch { ac: ac.size, expected });
    }
    Ok(EquivalenceReport { ac, optimum, expected })
}
