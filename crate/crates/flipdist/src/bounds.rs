//! Upper and lower bounds on the flip distance of a blown-up pair, the
//! constructive upper-bound sequence, and the direct/indirect analysis of
//! arbitrary flip sequences.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::acyclic;
use crate::blowup::{self, BlowupInstance, ConflictGraph};
use crate::convex::{self, Edge, Triangulation, VertexId};
use crate::distance::{self, DistanceError, FlipSequence};
use crate::reduction::{self, Max2SatInstance, ReductionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("acyclic size {ac} exceeds the number of pairs {gamma}")]
    AcOutOfRange { ac: usize, gamma: usize },
    #[error("the chosen pairs induce a directed cycle")]
    NotAcyclic,
    #[error("pair index {0} is not a spine pair of the instance")]
    NotASubsetOfGamma(usize),
    #[error("sequence does not lead from the first to the second blown-up triangulation: {0}")]
    InvalidSequence(DistanceError),
    #[error("internal construction error: {0}")]
    Internal(String),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// `β(2|Γ| − ac) + n(2n − 5)`.
pub fn upper_bound_value(n: usize, gamma: usize, ac: usize, beta: usize) -> Result<i64, BoundsError> {
    check_ac(gamma, ac)?;
    let (n, gamma, ac, beta) = (n as i64, gamma as i64, ac as i64, beta as i64);
    Ok(beta * (2 * gamma - ac) + n * (2 * n - 5))
}

/// `β(2|Γ| − ac) − 3n²`. May be negative.
pub fn lower_bound_value(n: usize, gamma: usize, ac: usize, beta: usize) -> Result<i64, BoundsError> {
    check_ac(gamma, ac)?;
    let (n, gamma, ac, beta) = (n as i64, gamma as i64, ac as i64, beta as i64);
    Ok(beta * (2 * gamma - ac) - 3 * n * n)
}

fn check_ac(gamma: usize, ac: usize) -> Result<(), BoundsError> {
    if ac > gamma {
        return Err(BoundsError::AcOutOfRange { ac, gamma });
    }
    Ok(())
}

/// The blow-up factor that separates the two bounds: `6(n² + n)`.
pub fn theorem_beta(n: usize) -> usize {
    assert!(n >= 3);
    let beta = 6 * (n * n + n);
    assert!(beta - 3 * n * n > 2 * n * n - 5 * n);
    beta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundReport {
    pub upper: i64,
    pub lower: i64,
    pub beta: usize,
    pub n: usize,
    pub gamma: usize,
    pub ac: usize,
}

impl BoundReport {
    pub fn new(n: usize, gamma: usize, ac: usize, beta: usize) -> Result<Self, BoundsError> {
        Ok(BoundReport {
            upper: upper_bound_value(n, gamma, ac, beta)?,
            lower: lower_bound_value(n, gamma, ac, beta)?,
            beta,
            n,
            gamma,
            ac,
        })
    }
}

/// A sorted vertex list `{extra…} ∪ [lo..=hi]`.
fn region(extra: &[VertexId], lo: VertexId, hi: VertexId) -> Vec<VertexId> {
    let mut r: Vec<VertexId> = (lo..=hi).chain(extra.iter().copied()).collect();
    r.sort_unstable();
    r.dedup();
    r
}

fn apply(cur: &mut Triangulation, out: &mut Vec<Edge>, f: &FlipSequence) -> Result<(), BoundsError> {
    *cur = f.end().map_err(|e| BoundsError::Internal(format!("replay failed: {e}")))?;
    out.extend_from_slice(&f.steps);
    Ok(())
}

/// A flip sequence from `inst.blown_t` to `inst.blown_tp` that handles the
/// pairs in `s` directly and all others indirectly.
///
/// Indirect pairs are re-fanned to their left spine endpoint on both sides;
/// the target side's flips are replayed backwards at the end. Direct pairs
/// are taken in topological order (smallest-index source first): a short
/// setup brings in two supporting edges, after which `β + 1` flips turn the
/// initial fan into the target fan. A final pass joins the two halves.
pub fn construct_upper_sequence(inst: &BlowupInstance, s: &[usize]) -> Result<FlipSequence, BoundsError> {
    let gamma = inst.pairs.len();
    let direct: BTreeSet<usize> = s.iter().copied().collect();
    if let Some(&bad) = direct.iter().find(|&&i| i >= gamma) {
        return Err(BoundsError::NotASubsetOfGamma(bad));
    }
    let h = blowup::conflict_graph(inst);
    let members: Vec<usize> = direct.iter().copied().collect();
    if !acyclic::is_acyclic(&h, &members) {
        return Err(BoundsError::NotAcyclic);
    }
    let n = inst.n();
    let n_base = inst.base_t.n();
    let beta = inst.beta;

    let mut cur = inst.blown_t.clone();
    let mut steps = Vec::new();
    let mut target = inst.blown_tp.clone();
    let mut target_steps: Vec<Edge> = Vec::new();
    for i in (0..gamma).filter(|i| !direct.contains(i)) {
        let (v1, v3, v2, v2p) = inst.corners(i);
        let f = distance::fan_sequence(&cur, &region(&[v2], v1, v3), v1)?;
        apply(&mut cur, &mut steps, &f)?;
        let g = distance::fan_sequence(&target, &region(&[v2p], v1, v3), v1)?;
        apply(&mut target, &mut target_steps, &g)?;
    }
    let tail = FlipSequence { start: inst.blown_tp.clone(), steps: target_steps }.reversed()?;

    let lambda = |fans: &[Vec<Edge>], i: usize, apex: VertexId| -> Vec<Edge> {
        let (v1, v3, _, _) = inst.corners(i);
        let mut e = fans[i].clone();
        e.push(Edge::new(apex, v1));
        e.push(Edge::new(apex, v3));
        e
    };
    let mut done: BTreeSet<usize> = BTreeSet::new();
    let setup_cap = 2 * n_base.saturating_sub(3);
    while done.len() < direct.len() {
        let i = *direct
            .iter()
            .find(|&&i| !done.contains(&i) && !direct.iter().any(|&j| !done.contains(&j) && h.has_edge(j, i)))
            .ok_or_else(|| BoundsError::Internal("no source among remaining direct pairs".into()))?;
        let (v1, v3, v2, v2p) = inst.corners(i);
        if v2 == v2p {
            done.insert(i);
            continue;
        }
        let mut chords: BTreeSet<Edge> = BTreeSet::new();
        for j in 0..gamma {
            let (w1, w3, w2, w2p) = inst.corners(j);
            if !direct.contains(&j) {
                chords.extend((w1 + 2..=w3).map(|x| Edge::new(w1, x)));
            } else if done.contains(&j) {
                chords.extend(lambda(&inst.fans_tp, j, w2p));
            } else {
                chords.extend(lambda(&inst.fans_t, j, w2));
            }
        }
        let poly = region(&[v2, v2p], v1, v3);
        let at = poly.binary_search(&v2p).unwrap();
        let k = poly.len();
        let (prev, next) = (poly[(at + k - 1) % k], poly[(at + 1) % k]);
        let w = if prev == v2 { next } else { prev };
        chords.insert(Edge::new(v2, v2p));
        chords.insert(Edge::new(v2p, w));
        let chords: Vec<Edge> = chords.into_iter().filter(|e| !e.is_boundary(n)).collect();
        if let Some((e, f)) = convex::find_crossing(&chords) {
            return Err(BoundsError::Internal(format!("intermediate edges {e} and {f} cross for pair {i}")));
        }
        let t_int = convex::complete_by_fanning(n, &chords)
            .map_err(|e| BoundsError::Internal(format!("intermediate triangulation: {e}")))?;
        let setup = distance::two_approx_sequence(&cur, &t_int)?;
        if setup.len() > setup_cap {
            return Err(BoundsError::Internal(format!(
                "setup for pair {i} took {} flips, cap {setup_cap}",
                setup.len()
            )));
        }
        apply(&mut cur, &mut steps, &setup)?;
        let flips = distance::fan_sequence(&cur, &poly, v2p)?;
        if flips.len() != beta + 1 {
            return Err(BoundsError::Internal(format!("pair {i} needed {} direct flips", flips.len())));
        }
        apply(&mut cur, &mut steps, &flips)?;
        done.insert(i);
    }

    let cleanup = distance::two_approx_sequence(&cur, &target)?;
    apply(&mut cur, &mut steps, &cleanup)?;
    steps.extend_from_slice(&tail.steps);
    let seq = FlipSequence { start: inst.blown_t.clone(), steps };
    distance::validate_sequence(&seq, &inst.blown_tp)
        .map_err(|e| BoundsError::Internal(format!("result does not validate: {e}")))?;
    Ok(seq)
}

/// Per-pair view of a flip sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceAnalysis {
    /// First position whose triangulation has no edge of the initial fan;
    /// `None` if the fan survives to the end.
    pub gone: Vec<Option<usize>>,
    /// Some edge of the target fan appears no later than `gone`. Pairs whose
    /// initial fan never vanishes count as direct.
    pub direct: Vec<bool>,
    pub direct_count: usize,
    pub indirect_count: usize,
    /// Conflict edges `i -> j` between direct pairs with `gone(i) >= gone(j)`.
    pub order_violations: Vec<(usize, usize)>,
    /// Set when more pairs are direct than the supplied acyclic size allows.
    pub excess_direct: Option<(usize, usize)>,
}

impl SequenceAnalysis {
    pub fn is_consistent(&self) -> bool {
        self.order_violations.is_empty() && self.excess_direct.is_none()
    }
}

/// Classifies every pair as direct or indirect in `f` and checks the
/// ordering of `gone` along conflict edges between direct pairs. If `ac` is
/// given, also checks that at most `ac` pairs are direct.
pub fn analyze_sequence(
    inst: &BlowupInstance,
    f: &FlipSequence,
    ac: Option<usize>,
) -> Result<SequenceAnalysis, BoundsError> {
    if f.start != inst.blown_t {
        return Err(BoundsError::InvalidSequence(DistanceError::SizeMismatch(f.start.n(), inst.n())));
    }
    let states = f.replay().map_err(BoundsError::InvalidSequence)?;
    if states.last() != Some(&inst.blown_tp) {
        return Err(BoundsError::InvalidSequence(DistanceError::WrongTarget));
    }
    let gamma = inst.pairs.len();
    let mut gone = Vec::with_capacity(gamma);
    let mut direct = Vec::with_capacity(gamma);
    for i in 0..gamma {
        let g = states.iter().position(|t| !inst.fans_t[i].iter().any(|&e| t.contains(e)));
        let d = match g {
            None => true,
            Some(g) => states[..=g].iter().any(|t| inst.fans_tp[i].iter().any(|&e| t.contains(e))),
        };
        gone.push(g);
        direct.push(d);
    }
    let h: ConflictGraph = blowup::conflict_graph(inst);
    let key = |g: Option<usize>| g.unwrap_or(usize::MAX);
    let order_violations: Vec<(usize, usize)> =
        h.edges.iter().copied().filter(|&(i, j)| direct[i] && direct[j] && key(gone[i]) >= key(gone[j])).collect();
    let direct_count = direct.iter().filter(|&&d| d).count();
    let excess_direct = ac.filter(|&ac| direct_count > ac).map(|ac| (direct_count, ac));
    Ok(SequenceAnalysis {
        gone,
        direct,
        direct_count,
        indirect_count: gamma - direct_count,
        order_violations,
        excess_direct,
    })
}

/// A hardness instance: a blown-up pair and the threshold `k` such that the
/// formula has an assignment satisfying `k′` clauses iff the flip distance
/// is at most `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremInstance {
    pub t1: Triangulation,
    pub t2: Triangulation,
    pub k: i64,
    pub beta: usize,
    pub base_n: usize,
    pub gamma: usize,
    pub target: usize,
}

pub fn emit_theorem_instance(phi: &Max2SatInstance) -> Result<TheoremInstance, BoundsError> {
    let out = reduction::build_reduction(phi)?;
    let base_n = out.t1.n();
    let gamma = out.pairs.len();
    let k_prime = match phi.k_prime {
        Some(k) => k,
        None => reduction::max2sat_bruteforce(phi)?,
    };
    let target = phi.w * (phi.m() + 1) + k_prime;
    let beta = theorem_beta(base_n);
    let k = upper_bound_value(base_n, gamma, target, beta)?;
    let inst = blowup::blow_up(&out.t1, &out.t2, beta);
    Ok(TheoremInstance { t1: inst.blown_t, t2: inst.blown_tp, k, beta, base_n, gamma, target })
}
