//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use flipdist::acyclic::max_acyclic_subset;
use flipdist::blowup::{self, classify_pair, conflict_graph, BlowupInstance, PairType};
use flipdist::bounds::{analyze_sequence, construct_upper_sequence, lower_bound_value, upper_bound_value};
use flipdist::convex::{crosses, enumerate, Edge, Triangulation};
use flipdist::distance::{diameter, exact_distance, validate_sequence, FlipSequence};
use flipdist::reduction::{self, build_reduction, max2sat_bruteforce, verify_gadget_conflicts, ReductionOutput, Role};
use flipdist::tree::{tree_from_triangulation, triangulation_from_tree, BinaryTree};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

/// The flip graph of the n-gon built from scratch: states, index, adjacency.
struct FlipGraph {
    states: Vec<Triangulation>,
    adj: Vec<Vec<(Edge, usize)>>,
}

impl FlipGraph {
    fn new(n: usize) -> Self {
        let start = Triangulation::fan(n, 0).unwrap();
        let mut index: HashMap<Triangulation, usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start];
        let mut adj = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = Vec::new();
            for (e, u) in states[i].flip_neighbors() {
                let next = index.len();
                let j = *index.entry(u.clone()).or_insert_with(|| {
                    states.push(u);
                    next
                });
                row.push((e, j));
            }
            adj.push(row);
            i += 1;
        }
        FlipGraph { states, adj }
    }

    /// BFS distances from `s`, optionally only through states accepted by `keep`.
    fn bfs(&self, s: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.states.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(_, u) in &self.adj[v] {
                if dist[u] == usize::MAX && keep(u) {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn index_of(&self, t: &Triangulation) -> usize {
        self.states.iter().position(|s| s == t).unwrap()
    }
}

fn catalan_counts() -> Outcome {
    for n in 3..=10 {
        let found = enumerate(n).unwrap().len() as u64;
        ensure!(found == common::catalan(n - 2), "n={n}: {found} triangulations");
    }
    Ok("n = 3..10 match the Catalan recurrence".into())
}

fn bijection() -> Outcome {
    let mut flips = 0;
    for n in 3..=8 {
        for t in enumerate(n).unwrap() {
            let b = tree_from_triangulation(&t);
            ensure!(triangulation_from_tree(&b) == t, "round trip fails on {t:?}");
            ensure!(BinaryTree::from_preorder(&b.to_preorder()).unwrap() == b, "preorder round trip fails");
            let by_flip: Vec<BinaryTree> =
                t.flip_neighbors().into_iter().map(|(_, u)| tree_from_triangulation(&u)).collect();
            let by_rotation: HashSet<BinaryTree> = b.rotation_neighbors().into_iter().map(|(_, r)| r).collect();
            let distinct: HashSet<BinaryTree> = by_flip.iter().cloned().collect();
            ensure!(distinct.len() == by_flip.len(), "two flips map to one rotation");
            ensure!(distinct == by_rotation, "flip and rotation neighborhoods differ for {t:?}");
            flips += by_flip.len();
        }
    }
    Ok(format!("n <= 8 exhaustive, {flips} flips matched to rotations"))
}

fn happy_edges() -> Outcome {
    let mut checked = 0;
    for n in 5..=7 {
        let g = FlipGraph::new(n);
        let k = g.states.len();
        let all: Vec<Vec<usize>> = (0..k).map(|s| g.bfs(s, |_| true)).collect();
        for a in 0..k {
            for b in 0..k {
                let d = all[a][b];
                for &e in g.states[a].diagonals() {
                    if !g.states[b].contains(e) {
                        continue;
                    }
                    let kept = g.bfs(a, |u| g.states[u].contains(e))[b];
                    ensure!(kept == d, "n={n}: keeping {e} costs {kept} > {d}");
                    let forced = (0..k).filter(|&x| !g.states[x].contains(e)).map(|x| all[a][x] + all[x][b]).min();
                    ensure!(forced.is_some_and(|f| f >= d + 2), "n={n}: flipping {e} costs less than {}", d + 2);
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (pair, shared diagonal) cases, n = 5..7 exhaustive"))
}

fn diameters() -> Outcome {
    let mut values = Vec::new();
    for n in 4..=9 {
        let g = FlipGraph::new(n);
        let oracle = (0..g.states.len()).map(|s| *g.bfs(s, |_| true).iter().max().unwrap()).max().unwrap();
        let d = diameter(n).unwrap();
        ensure!(d == oracle, "n={n}: diameter {d}, oracle {oracle}");
        ensure!(d <= 2 * (n - 3), "n={n}: diameter {d} above 2(n-3)");
        values.push(d.to_string());
    }
    Ok(format!("n = 4..9 -> {}", values.join(" ")))
}

struct Checked {
    inst: BlowupInstance,
    ac: usize,
}

fn sandwich(corpus: &[BlowupInstance]) -> Result<(String, Vec<Checked>), String> {
    let mut checked = Vec::new();
    let mut tight = 0;
    for (idx, inst) in corpus.iter().enumerate() {
        let ac = max_acyclic_subset(&conflict_graph(inst)).unwrap();
        let f = construct_upper_sequence(inst, &ac.subset).map_err(|e| format!("instance {idx}: {e}"))?;
        ensure!(validate_sequence(&f, &inst.blown_tp).is_ok(), "instance {idx}: construction does not validate");
        let (d, _) = exact_distance(&inst.blown_t, &inst.blown_tp).unwrap();
        let (n, g, b) = (inst.base_t.n(), inst.pairs.len(), inst.beta);
        let lower = lower_bound_value(n, g, ac.size, b).unwrap();
        let upper = upper_bound_value(n, g, ac.size, b).unwrap();
        ensure!(
            lower <= d as i64 && d <= f.len() && f.len() as i64 <= upper,
            "instance {idx}: {lower} <= {d} <= {} <= {upper} fails",
            f.len()
        );
        tight += usize::from(d == f.len());
        checked.push(Checked { inst: inst.clone(), ac: ac.size });
    }
    Ok((format!("{} instances, construction optimal on {tight}", corpus.len()), checked))
}

fn same_type_direction(corpus: &[BlowupInstance], reductions: &[ReductionOutput]) -> Outcome {
    let mut edges = 0;
    let bases = corpus.iter().map(|i| (&i.base_t, &i.base_tp)).chain(reductions.iter().map(|r| (&r.t1, &r.t2)));
    for (t1, t2) in bases {
        let inst = blowup::blow_up(t1, t2, 1);
        let types: Vec<PairType> = inst.pairs.iter().map(classify_pair).collect();
        for &(i, j) in &conflict_graph(&inst).edges {
            if types[i] == types[j] && types[i] != PairType::MirroredOrOther {
                ensure!(inst.pairs[i].spine.a < inst.pairs[j].spine.a, "edge {i} -> {j} points left");
                edges += 1;
            }
        }
    }
    Ok(format!("{edges} same-type edges, all left to right"))
}

fn all_or_nothing(corpus: &[BlowupInstance]) -> Outcome {
    let mut checked = 0;
    for base in corpus {
        for beta in 1..=3 {
            let inst = blowup::blow_up(&base.base_t, &base.base_tp, beta);
            let k = inst.pairs.len();
            for i in 0..k {
                for j in (0..k).filter(|&j| j != i) {
                    let count = inst.fans_t[i]
                        .iter()
                        .flat_map(|&e| inst.fans_tp[j].iter().filter(move |&&f| crosses(e, f)))
                        .count();
                    ensure!(count == 0 || count == beta * beta, "beta {beta}: {count} crossings for ({i},{j})");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} ordered fan pairs over beta = 1..3"))
}

fn role_kind(r: &Role) -> &'static str {
    match r {
        Role::Literal { .. } => "x",
        Role::NegLiteral { .. } => "nx",
        Role::PosFirst { .. } => "c1",
        Role::PosSecond { .. } => "c2",
        Role::NegFirst { .. } => "nc1",
        Role::NegSecond { .. } => "nc2",
    }
}

fn gadget_inventories(reductions: &[ReductionOutput]) -> Outcome {
    let mut extra_kinds = BTreeSet::new();
    let mut exception_kinds = BTreeSet::new();
    for out in reductions {
        let h = blowup::conflict_graph(&blowup::blow_up(&out.t1, &out.t2, 1));
        let report = verify_gadget_conflicts(out, &h).map_err(|e| format!("{:?}: {e}", out.instance))?;
        let required = reduction::required_double_conflicts(out);
        for &(i, j) in &report.double_conflicts {
            if !required.contains(&(i, j)) {
                extra_kinds.insert(format!("{}<->{}", role_kind(&out.roles[i]), role_kind(&out.roles[j])));
            }
        }
        for &(i, j) in &report.exceptional_directed {
            exception_kinds.insert(format!("{}->{}", role_kind(&out.roles[i]), role_kind(&out.roles[j])));
        }
    }
    Ok(format!(
        "{} reductions clean; optional doubles: {}; exceptional directed: {}",
        reductions.len(),
        extra_kinds.into_iter().collect::<Vec<_>>().join(", "),
        exception_kinds.into_iter().collect::<Vec<_>>().join(", ")
    ))
}

fn equivalence(reductions: &[ReductionOutput]) -> Outcome {
    for out in reductions {
        let phi = &out.instance;
        let h = blowup::conflict_graph(&blowup::blow_up(&out.t1, &out.t2, 1));
        let ac = max_acyclic_subset(&h).unwrap().size;
        let expected = phi.w * (phi.m() + 1) + max2sat_bruteforce(phi).unwrap();
        ensure!(ac == expected, "{phi:?}: ac {ac}, expected {expected}");
    }
    Ok(format!("{} instances", reductions.len()))
}

/// Up to `cap` shortest flip sequences between two triangulations.
fn shortest_sequences(a: &Triangulation, b: &Triangulation, cap: usize) -> Vec<FlipSequence> {
    let g = FlipGraph::new(a.n());
    let (s, t) = (g.index_of(a), g.index_of(b));
    let to_target = g.bfs(t, |_| true);
    let mut out = Vec::new();
    let mut path = Vec::new();
    fn walk(g: &FlipGraph, v: usize, to_target: &[usize], path: &mut Vec<Edge>, out: &mut Vec<Vec<Edge>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if to_target[v] == 0 {
            out.push(path.clone());
            return;
        }
        for &(e, u) in &g.adj[v] {
            if to_target[u] + 1 == to_target[v] {
                path.push(e);
                walk(g, u, to_target, path, out, cap);
                path.pop();
            }
        }
    }
    walk(&g, s, &to_target, &mut path, &mut out, cap);
    out.into_iter().map(|steps| FlipSequence { start: a.clone(), steps }).collect()
}

fn analyzer_lemmas(checked: &[Checked]) -> Outcome {
    let mut sequences = 0;
    let mut instances = 0;
    let mut direct_seen = 0;
    for c in checked {
        let inst = &c.inst;
        let (_, witness) = exact_distance(&inst.blown_t, &inst.blown_tp).unwrap();
        let mut all = vec![witness];
        if inst.n() <= 10 {
            all.extend(shortest_sequences(&inst.blown_t, &inst.blown_tp, 64));
        }
        instances += 1;
        for f in &all {
            let a = analyze_sequence(inst, f, Some(c.ac)).map_err(|e| e.to_string())?;
            ensure!(a.excess_direct.is_none(), "{} direct pairs but ac {}", a.direct_count, c.ac);
            ensure!(a.order_violations.is_empty(), "gone order violated on {:?}", a.order_violations);
            direct_seen += a.direct_count;
            sequences += 1;
        }
    }
    Ok(format!("{sequences} optimal sequences over {instances} instances, {direct_seen} direct pair classifications"))
}

fn report(id: usize, outcome: &Outcome, started: Instant) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("criterion {id:>2}: PASS ({secs:.2}s) {detail}"),
        Err(why) => println!("criterion {id:>2}: FAIL ({secs:.2}s) {why}"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;
    let t = Instant::now();
    ok &= report(1, &catalan_counts(), t);
    let t = Instant::now();
    ok &= report(2, &bijection(), t);
    let t = Instant::now();
    ok &= report(3, &happy_edges(), t);
    let t = Instant::now();
    ok &= report(4, &diameters(), t);

    let t = Instant::now();
    let corpus = common::sandwich_corpus(220, 2024, 13);
    let checked = match sandwich(&corpus) {
        Ok((detail, checked)) => {
            ok &= report(5, &Ok(detail), t);
            checked
        }
        Err(why) => {
            ok &= report(5, &Err(why), t);
            Vec::new()
        }
    };
    let reductions: Vec<ReductionOutput> =
        common::instance_family(3, 3).iter().map(|phi| build_reduction(phi).unwrap()).collect();
    let t = Instant::now();
    ok &= report(6, &same_type_direction(&corpus, &reductions), t);
    let t = Instant::now();
    ok &= report(7, &all_or_nothing(&corpus), t);
    let t = Instant::now();
    ok &= report(8, &gadget_inventories(&reductions), t);
    let t = Instant::now();
    ok &= report(9, &equivalence(&reductions), t);
    let t = Instant::now();
    ok &= report(10, &analyzer_lemmas(&checked), t);
    println!("criterion 11: not run (full-size hardness instances are too large for exact distance)");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
