#![allow(dead_code)]

use flipdist::blowup::{self, BlowupInstance};
use flipdist::convex::{Edge, Triangulation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random triangulation: insert random non-crossing chords until full.
pub fn random_triangulation(n: usize, rng: &mut impl Rng) -> Triangulation {
    let mut all: Vec<Edge> =
        (0..n).flat_map(|a| (a + 2..n).map(move |b| Edge::new(a, b))).filter(|e| !e.is_boundary(n)).collect();
    all.shuffle(rng);
    let mut chosen: Vec<Edge> = Vec::new();
    for e in all {
        if chosen.iter().all(|&f| !flipdist::convex::crosses(e, f)) {
            chosen.push(e);
        }
    }
    Triangulation::new(n, chosen).unwrap()
}

/// Seeded base pairs with at least one spine pair whose blow-up stays within
/// `max_blown` vertices.
pub fn sandwich_corpus(count: usize, seed: u64, max_blown: usize) -> Vec<BlowupInstance> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = r.gen_range(5..=7);
        let beta = r.gen_range(1..=3);
        let t1 = random_triangulation(n, &mut r);
        let t2 = random_triangulation(n, &mut r);
        let pairs = blowup::spine_pairs(&t1, &t2);
        if pairs.is_empty() || n + beta * pairs.len() > max_blown {
            continue;
        }
        out.push(blowup::blow_up(&t1, &t2, beta));
    }
    out
}

/// Catalan numbers by the convolution recurrence.
pub fn catalan(k: usize) -> u64 {
    let mut c = vec![1u64; k + 1];
    for i in 1..=k {
        c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
    }
    c[k]
}

/// Every valid monotone laminar instance with `w <= max_w` variables and up
/// to `max_m` clauses, clauses taken as multisets.
pub fn instance_family(max_w: usize, max_m: usize) -> Vec<flipdist::reduction::Max2SatInstance> {
    use flipdist::reduction::{Clause, Max2SatInstance, Side};
    let mut out = Vec::new();
    for w in 1..=max_w {
        let mut kinds = Vec::new();
        for side in [Side::Positive, Side::Negative] {
            for i in 1..=w {
                for j in i + 1..=w {
                    kinds.push(Clause { side, i, j });
                }
            }
        }
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(pick) = stack.pop() {
            let clauses: Vec<Clause> = pick.iter().map(|&k| kinds[k]).collect();
            if let Ok(phi) = Max2SatInstance::new(w, clauses, None) {
                out.push(phi);
            }
            if pick.len() < max_m {
                let from = pick.last().copied().unwrap_or(0);
                for k in from..kinds.len() {
                    let mut next = pick.clone();
                    next.push(k);
                    stack.push(next);
                }
            }
        }
    }
    out
}
