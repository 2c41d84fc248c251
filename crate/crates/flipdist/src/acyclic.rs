//! Maximum induced acyclic vertex subsets of a directed graph.

use thiserror::Error;

use crate::blowup::ConflictGraph;

/// Largest graph [`max_acyclic_subset`] accepts: vertex sets are `u64` masks.
pub const EXACT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcyclicError {
    #[error("exact search supports at most {cap} vertices, graph has {vertices}")]
    TooLargeForExact { vertices: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicResult {
    /// Sorted vertex indices.
    pub subset: Vec<usize>,
    pub size: usize,
    pub exact: bool,
}

/// True iff the subgraph induced by `s` has no directed cycle.
pub fn is_acyclic(h: &ConflictGraph, s: &[usize]) -> bool {
    let mut member = vec![false; h.vertex_count];
    for &v in s {
        member[v] = true;
    }
    let mut indeg = vec![0usize; h.vertex_count];
    for &(i, j) in &h.edges {
        if member[i] && member[j] {
            indeg[j] += 1;
        }
    }
    let mut ready: Vec<usize> = s.iter().copied().filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = ready.pop() {
        removed += 1;
        for j in h.successors(v) {
            if member[j] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
    }
    let mut distinct = s.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    removed == distinct.len()
}

struct Search {
    out: Vec<u64>,
    inn: Vec<u64>,
    best: u64,
    best_size: u32,
}

impl Search {
    /// Vertices of `included` reachable from `v` along edges inside `included`.
    fn reach_within(&self, v: usize, included: u64) -> u64 {
        let mut seen = 0u64;
        let mut frontier = self.out[v] & included;
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.out[u] & included;
            }
            frontier = next & !seen;
        }
        seen
    }

    /// Adding `v` to `included` closes a cycle.
    fn closes_cycle(&self, v: usize, included: u64) -> bool {
        self.reach_within(v, included) & self.inn[v] != 0
    }

    /// Lower bound on vertices lost from `undecided`: greedily packed
    /// disjoint 2-cycles each cost at least one vertex.
    fn two_cycle_packing(&self, undecided: u64) -> u32 {
        let mut left = undecided;
        let mut lost = 0;
        while left != 0 {
            let v = left.trailing_zeros() as usize;
            left &= left - 1;
            let partners = self.out[v] & self.inn[v] & left;
            if partners != 0 {
                left &= !(1u64 << partners.trailing_zeros());
                lost += 1;
            }
        }
        lost
    }

    fn branch(&mut self, mut included: u64, mut undecided: u64) {
        // reductions: drop vertices that would close a cycle, take vertices
        // that are sources or sinks of the remaining graph
        loop {
            let mut changed = false;
            let mut u = undecided;
            while u != 0 {
                let v = u.trailing_zeros() as usize;
                u &= u - 1;
                let bit = 1u64 << v;
                if self.closes_cycle(v, included) {
                    undecided &= !bit;
                    changed = true;
                    continue;
                }
                let live = included | undecided;
                if self.inn[v] & live == 0 || self.out[v] & live == 0 {
                    included |= bit;
                    undecided &= !bit;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let bound = included.count_ones() + undecided.count_ones() - self.two_cycle_packing(undecided);
        if bound <= self.best_size {
            return;
        }
        if undecided == 0 {
            self.best = included;
            self.best_size = included.count_ones();
            return;
        }
        let v = undecided.trailing_zeros() as usize;
        let bit = 1u64 << v;
        self.branch(included | bit, undecided & !bit);
        self.branch(included, undecided & !bit);
    }
}

/// An exact maximum acyclic subset.
///
/// Branch and bound over include/exclude decisions in index order, trying
/// inclusion first, so the first maximum found is the lexicographically
/// smallest one (the set containing the smallest differing index wins).
/// Reductions that force a vertex in or out are valid for every maximum set
/// of the subtree and so keep that tie-break intact.
pub fn max_acyclic_subset(h: &ConflictGraph) -> Result<AcyclicResult, AcyclicError> {
    let k = h.vertex_count;
    if k > EXACT_CAP {
        return Err(AcyclicError::TooLargeForExact { vertices: k, cap: EXACT_CAP });
    }
    let mut out = vec![0u64; k];
    let mut inn = vec![0u64; k];
    for &(i, j) in &h.edges {
        out[i] |= 1 << j;
        inn[j] |= 1 << i;
    }
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut search = Search { out, inn, best: 0, best_size: 0 };
    // any single vertex is acyclic, so start just below that
    if k > 0 {
        search.branch(0, all);
    }
    let subset: Vec<usize> = (0..k).filter(|&v| search.best >> v & 1 == 1).collect();
    Ok(AcyclicResult { size: subset.len(), subset, exact: true })
}

/// A fast acyclic subset: peel sources and sinks, discard the vertex of
/// largest in-degree times out-degree when stuck, then greedily add back
/// discarded vertices in index order while the set stays acyclic.
pub fn heuristic_acyclic(h: &ConflictGraph) -> AcyclicResult {
    let k = h.vertex_count;
    let mut alive = vec![true; k];
    let mut taken = vec![false; k];
    let mut remaining = k;
    let degrees = |alive: &[bool], v: usize| {
        let din = h.edges.iter().filter(|&&(i, j)| j == v && alive[i]).count();
        let dout = h.edges.iter().filter(|&&(i, j)| i == v && alive[j]).count();
        (din, dout)
    };
    while remaining > 0 {
        let mut progressed = false;
        for v in 0..k {
            if alive[v] {
                let (din, dout) = degrees(&alive, v);
                if din == 0 || dout == 0 {
                    alive[v] = false;
                    taken[v] = true;
                    remaining -= 1;
                    progressed = true;
                }
            }
        }
        if !progressed {
            let victim = (0..k)
                .filter(|&v| alive[v])
                .max_by_key(|&v| {
                    let (din, dout) = degrees(&alive, v);
                    (din * dout, std::cmp::Reverse(v))
                })
                .unwrap();
            alive[victim] = false;
            remaining -= 1;
        }
    }
    let mut subset: Vec<usize> = (0..k).filter(|&v| taken[v]).collect();
    for v in 0..k {
        if !taken[v] {
            let mut trial = subset.clone();
            trial.push(v);
            if is_acyclic(h, &trial) {
                subset = trial;
            }
        }
    }
    subset.sort_unstable();
    AcyclicResult { size: subset.len(), subset, exact: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acyclicity_examples() {
        let two = ConflictGraph::new(2, [(0, 1), (1, 0)]);
        assert!(!is_acyclic(&two, &[0, 1]));
        assert!(is_acyclic(&two, &[]));
        assert!(is_acyclic(&two, &[1]));
        let dag = ConflictGraph::new(4, [(0, 1), (1, 2), (0, 3), (3, 2)]);
        assert!(is_acyclic(&dag, &[0, 1, 2, 3]));
    }

    #[test]
    fn exact_examples() {
        let two = ConflictGraph::new(2, [(0, 1), (1, 0)]);
        let r = max_acyclic_subset(&two).unwrap();
        assert_eq!((r.size, r.subset.clone(), r.exact), (1, vec![0], true));
        let tri = ConflictGraph::new(3, [(0, 1), (1, 2), (2, 0)]);
        assert_eq!(max_acyclic_subset(&tri).unwrap().subset, vec![0, 1]);
        assert_eq!(max_acyclic_subset(&ConflictGraph::new(0, [])).unwrap().size, 0);
        let big = ConflictGraph::new(65, []);
        assert!(matches!(max_acyclic_subset(&big), Err(AcyclicError::TooLargeForExact { .. })));
    }

    #[test]
    fn variable_block_has_two_optima() {
        // m+1 = 3 copies of x (0..3) against 3 copies of x-bar (3..6), plus
        // same-type edges left to right
        let mut edges = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                edges.push((i, j));
                edges.push((j, i));
            }
        }
        edges.extend([(0, 1), (1, 2), (3, 4), (4, 5)]);
        let h = ConflictGraph::new(6, edges);
        let r = max_acyclic_subset(&h).unwrap();
        assert_eq!(r.subset, vec![0, 1, 2]);
        assert!(is_acyclic(&h, &[3, 4, 5]));
        assert!(!is_acyclic(&h, &[0, 1, 3]));
    }

    #[test]
    fn heuristic_examples() {
        let dag = ConflictGraph::new(3, [(0, 1), (1, 2)]);
        assert_eq!(heuristic_acyclic(&dag).size, 3);
        let two = ConflictGraph::new(2, [(0, 1), (1, 0)]);
        let r = heuristic_acyclic(&two);
        assert_eq!((r.size, r.exact), (1, false));
    }
}
