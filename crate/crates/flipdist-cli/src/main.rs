mod output;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use flipdist::acyclic::{self, AcyclicResult};
use flipdist::blowup::{self, BlowupInstance};
use flipdist::bounds::{self, BoundsError};
use flipdist::convex::{self, Edge, Triangulation};
use flipdist::distance::{self, DistanceError, DEFAULT_STATE_BUDGET};
use flipdist::formats::{self, ParseError};
use flipdist::reduction;
use flipdist::tree::{self, BinaryTree, TreeError};

use output::{Format, Out, Record};

/// Seed used by `sandwich` when none is given.
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "flipdist", version, about = "Flip distance of convex polygon triangulations")]
struct Cli {
    /// Output style for records printed to stdout.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) all triangulations of an n-gon.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        list: bool,
    },
    /// Exact flip distance with a shortest witness sequence.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
        /// Also write the witness in sequence format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diameter of the flip graph of the n-gon.
    Diameter {
        #[arg(long)]
        n: usize,
    },
    /// Triangulation and binary tree conversions.
    Tree {
        #[command(subcommand)]
        action: TreeAction,
    },
    /// Blow up a pair of triangulations.
    Blowup {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        beta: usize,
        /// Directory for `blown_a.tri` and `blown_b.tri`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Conflict graph of a pair of triangulations.
    Conflict {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum acyclic subset of a conflict graph file.
    Acyclic {
        #[arg(long)]
        graph: PathBuf,
        /// Use the fast heuristic instead of the exact search.
        #[arg(long)]
        heuristic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the triangulation pair for a monotone 2SAT instance.
    Reduce {
        #[arg(long)]
        sat: PathBuf,
        /// Directory for `t1.tri`, `t2.tri` and `roles.txt`.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Check a reduction's conflicts against the gadget inventories.
    VerifyGadgets {
        #[arg(long)]
        sat: PathBuf,
    },
    /// Construct an upper-bound flip sequence for the blown-up pair.
    BoundUpper {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        beta: usize,
        /// Acyclic subset file; the exact maximum is used when absent.
        #[arg(long)]
        acyclic: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound on the flip distance of the blown-up pair.
    BoundLower {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        beta: usize,
    },
    /// Direct/indirect analysis of a sequence between blown-up triangulations.
    Analyze {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        seq: PathBuf,
    },
    /// Emit the blown-up hardness instance and its distance threshold.
    EmitTheorem {
        #[arg(long)]
        sat: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Check lower <= exact <= constructed <= upper on random pairs.
    Sandwich {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
    },
    /// Draw a pair of triangulations on a line as SVG.
    RenderSvg {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Draw the blow-up instead of the base pair.
        #[arg(long)]
        beta: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TreeAction {
    /// Dual binary tree of a triangulation, in preorder.
    Encode {
        #[arg(long)]
        tri: PathBuf,
    },
    /// Triangulation of a preorder tree string.
    Decode {
        #[arg(long)]
        tree: String,
    },
    /// Rotation distance of two preorder tree strings.
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Budget(String),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Budget(_) => 2,
            _ => 1,
        }
    }
}

impl From<DistanceError> for CliError {
    fn from(e: DistanceError) -> Self {
        match e {
            DistanceError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Distance(d) => d.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Distance(d) => d.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(convex::TriangulationError, acyclic::AcyclicError, reduction::ReductionError, reduction::GadgetError);

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn parse_with<T>(path: &Path, parse: impl Fn(&str) -> Result<T, ParseError>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Parse { path: path.to_owned(), source })
}

fn read_tri(path: &Path) -> Result<Triangulation, CliError> {
    parse_with(path, formats::parse_triangulation)
}

fn read_pair(a: &Path, b: &Path) -> Result<(Triangulation, Triangulation), CliError> {
    let (t1, t2) = (read_tri(a)?, read_tri(b)?);
    if t1.n() != t2.n() {
        return Err(CliError::Invalid(format!("polygon sizes differ: {} and {}", t1.n(), t2.n())));
    }
    Ok((t1, t2))
}

fn read_blowup(a: &Path, b: &Path, beta: usize) -> Result<BlowupInstance, CliError> {
    let (t1, t2) = read_pair(a, b)?;
    Ok(blowup::blow_up(&t1, &t2, beta))
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })
}

fn diagonal_list(t: &Triangulation) -> String {
    t.diagonals().iter().map(|e| format!("{}-{}", e.a, e.b)).collect::<Vec<_>>().join(",")
}

/// Inserts random non-crossing chords until the polygon is triangulated.
fn random_triangulation(n: usize, rng: &mut impl Rng) -> Triangulation {
    let mut all: Vec<Edge> =
        (0..n).flat_map(|a| (a + 2..n).map(move |b| Edge::new(a, b))).filter(|e| !e.is_boundary(n)).collect();
    all.shuffle(rng);
    let mut chosen: Vec<Edge> = Vec::new();
    for e in all {
        if chosen.iter().all(|&f| !convex::crosses(e, f)) {
            chosen.push(e);
        }
    }
    Triangulation::new(n, chosen).expect("maximal non-crossing chord set")
}

fn run(cli: Cli, out: &mut Out) -> Result<(), CliError> {
    match cli.command {
        Command::Enumerate { n, list } => {
            let all = convex::enumerate(n)?;
            out.emit(Record::new("count").field("count", all.len()))?;
            if list {
                for t in &all {
                    out.emit(Record::new("tri").field("diagonals", diagonal_list(t)))?;
                }
            }
        }
        Command::Distance { a, b, budget, out: path } => {
            let (t1, t2) = read_pair(&a, &b)?;
            let (d, f) = distance::exact_distance_with_budget(&t1, &t2, budget)?;
            out.emit(Record::new("distance").field("distance", d))?;
            out.sequence(&f)?;
            if let Some(p) = path {
                write(&p, &f.to_text())?;
            }
        }
        Command::Diameter { n } => {
            out.emit(Record::new("diameter").field("diameter", distance::diameter(n)?))?;
        }
        Command::Tree { action } => match action {
            TreeAction::Encode { tri } => {
                let t = read_tri(&tri)?;
                if t.n() < 3 {
                    return Err(CliError::Invalid("need at least a triangle".into()));
                }
                let b = tree::tree_from_triangulation(&t);
                out.emit(Record::new("tree").field("preorder", b.to_preorder()))?;
            }
            TreeAction::Decode { tree: s } => {
                let b = BinaryTree::from_preorder(&s)?;
                out.triangulation(&tree::triangulation_from_tree(&b))?;
            }
            TreeAction::Distance { a, b } => {
                let (x, y) = (BinaryTree::from_preorder(&a)?, BinaryTree::from_preorder(&b)?);
                out.emit(Record::new("rotation-distance").field("distance", tree::rotation_distance(&x, &y)?))?;
            }
        },
        Command::Blowup { a, b, beta, out_dir } => {
            let inst = read_blowup(&a, &b, beta)?;
            out.emit(
                Record::new("blowup")
                    .field("n", inst.n())
                    .field("pairs", inst.pairs.len())
                    .field("beta", beta)
                    .labeled(),
            )?;
            if let Some(dir) = out_dir {
                make_dir(&dir)?;
                write(&dir.join("blown_a.tri"), &inst.blown_t.to_text())?;
                write(&dir.join("blown_b.tri"), &inst.blown_tp.to_text())?;
            }
        }
        Command::Conflict { a, b, out: path } => {
            let (t1, t2) = read_pair(&a, &b)?;
            let inst = blowup::blow_up(&t1, &t2, 1);
            let h = blowup::conflict_graph(&inst);
            let types: Vec<_> = inst.pairs.iter().map(blowup::classify_pair).collect();
            out.emit(Record::new("pairs").field("count", inst.pairs.len()))?;
            for (p, t) in inst.pairs.iter().zip(&types) {
                out.emit(
                    Record::new("pair")
                        .field("idx", p.index)
                        .field("spine_a", p.spine.a)
                        .field("spine_b", p.spine.b)
                        .field("apex_a", p.apex_t)
                        .field("apex_b", p.apex_tp)
                        .field("type", t.name()),
                )?;
            }
            for &(i, j) in &h.edges {
                out.emit(Record::new("conf").field("from", i).field("to", j))?;
            }
            if let Some(p) = path {
                write(&p, &formats::conflict_graph_text(&inst.pairs, &types, &h))?;
            }
        }
        Command::Acyclic { graph, heuristic, out: path } => {
            let file = parse_with(&graph, formats::parse_conflict_graph)?;
            let r = if heuristic {
                acyclic::heuristic_acyclic(&file.graph)
            } else {
                acyclic::max_acyclic_subset(&file.graph)?
            };
            emit_acyclic(out, &r)?;
            if let Some(p) = path {
                write(&p, &formats::acyclic_text(&r))?;
            }
        }
        Command::Reduce { sat, out_dir } => {
            let phi = parse_with(&sat, formats::parse_max2sat)?;
            let red = reduction::build_reduction(&phi)?;
            make_dir(&out_dir)?;
            write(&out_dir.join("t1.tri"), &red.t1.to_text())?;
            write(&out_dir.join("t2.tri"), &red.t2.to_text())?;
            write(&out_dir.join("roles.txt"), &red.role_map_text())?;
            out.emit(Record::new("reduce").field("n", red.t1.n()).field("pairs", red.pairs.len()).labeled())?;
        }
        Command::VerifyGadgets { sat } => {
            let phi = parse_with(&sat, formats::parse_max2sat)?;
            let red = reduction::build_reduction(&phi)?;
            let h = blowup::conflict_graph(&blowup::blow_up(&red.t1, &red.t2, 1));
            let report = reduction::verify_gadget_conflicts(&red, &h)?;
            out.emit(
                Record::new("gadgets")
                    .field("status", "ok")
                    .field("doubles", report.double_conflicts.len())
                    .field("required", report.required_doubles)
                    .field("directed", report.lemma_directed)
                    .field("exceptional", report.exceptional_directed.len())
                    .labeled(),
            )?;
            for &(i, j) in &report.exceptional_directed {
                out.emit(
                    Record::new("exception").field("from", red.roles[i].label()).field("to", red.roles[j].label()),
                )?;
            }
        }
        Command::BoundUpper { a, b, beta, acyclic: s, out: path } => {
            let inst = read_blowup(&a, &b, beta)?;
            let r = match s {
                Some(p) => parse_with(&p, formats::parse_acyclic)?,
                None => acyclic::max_acyclic_subset(&blowup::conflict_graph(&inst))?,
            };
            let f = bounds::construct_upper_sequence(&inst, &r.subset)?;
            let bound = bounds::upper_bound_value(inst.base_t.n(), inst.pairs.len(), r.size, beta)?;
            out.emit(Record::new("bound").field("which", "upper").field("value", bound))?;
            out.emit(Record::new("length").field("length", f.len()))?;
            match path {
                Some(p) => write(&p, &f.to_text())?,
                None => out.sequence(&f)?,
            }
        }
        Command::BoundLower { a, b, beta } => {
            let inst = read_blowup(&a, &b, beta)?;
            let r = acyclic::max_acyclic_subset(&blowup::conflict_graph(&inst))?;
            let bound = bounds::lower_bound_value(inst.base_t.n(), inst.pairs.len(), r.size, beta)?;
            out.emit(Record::new("bound").field("which", "lower").field("value", bound))?;
        }
        Command::Analyze { a, b, beta, seq } => {
            let inst = read_blowup(&a, &b, beta)?;
            let f = parse_with(&seq, formats::parse_sequence)?;
            let h = blowup::conflict_graph(&inst);
            let ac = acyclic::max_acyclic_subset(&h).ok().map(|r| r.size);
            let an = bounds::analyze_sequence(&inst, &f, ac)?;
            out.emit(
                Record::new("analysis").field("direct", an.direct_count).field("indirect", an.indirect_count).labeled(),
            )?;
            for (i, (g, d)) in an.gone.iter().zip(&an.direct).enumerate() {
                let gone = g.map_or("none".to_string(), |g| g.to_string());
                out.emit(Record::new("gone").field("idx", i).field("gone", gone).field("direct", *d))?;
            }
            for &(i, j) in &an.order_violations {
                out.emit(Record::new("order-violation").field("from", i).field("to", j))?;
            }
            if let Some((d, ac)) = an.excess_direct {
                out.emit(Record::new("excess-direct").field("direct", d).field("ac", ac))?;
            }
        }
        Command::EmitTheorem { sat, out_dir } => {
            let phi = parse_with(&sat, formats::parse_max2sat)?;
            let th = bounds::emit_theorem_instance(&phi)?;
            make_dir(&out_dir)?;
            write(&out_dir.join("t1.tri"), &th.t1.to_text())?;
            write(&out_dir.join("t2.tri"), &th.t2.to_text())?;
            out.emit(
                Record::new("theorem")
                    .field("n", th.t1.n())
                    .field("base_n", th.base_n)
                    .field("pairs", th.gamma)
                    .field("beta", th.beta)
                    .field("target", th.target)
                    .field("k", th.k)
                    .labeled(),
            )?;
        }
        Command::Sandwich { n, beta, trials, seed, budget } => sandwich(out, n, beta, trials, seed, budget)?,
        Command::RenderSvg { a, b, beta, out: path } => {
            let (t1, t2) = read_pair(&a, &b)?;
            let (t1, t2) = match beta {
                Some(beta) => {
                    let inst = blowup::blow_up(&t1, &t2, beta);
                    (inst.blown_t, inst.blown_tp)
                }
                None => (t1, t2),
            };
            write(&path, &svg::render(&t1, &t2))?;
            out.emit(Record::new("svg").field("n", t1.n()))?;
        }
    }
    Ok(())
}

fn emit_acyclic(out: &mut Out, r: &AcyclicResult) -> Result<(), CliError> {
    out.emit(Record::new("ac").field("size", r.size).field("mode", if r.exact { "exact" } else { "heur" }))?;
    for &v in &r.subset {
        out.emit(Record::new("in").field("idx", v))?;
    }
    Ok(())
}

fn sandwich(out: &mut Out, n: usize, beta: usize, trials: usize, seed: u64, budget: usize) -> Result<(), CliError> {
    if n < 4 {
        return Err(CliError::Invalid("sandwich needs n >= 4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for trial in 0..trials {
        let (t1, t2) = loop {
            let t1 = random_triangulation(n, &mut rng);
            let t2 = random_triangulation(n, &mut rng);
            if !blowup::spine_pairs(&t1, &t2).is_empty() {
                break (t1, t2);
            }
        };
        let inst = blowup::blow_up(&t1, &t2, beta);
        let ac = acyclic::max_acyclic_subset(&blowup::conflict_graph(&inst))?;
        let f = bounds::construct_upper_sequence(&inst, &ac.subset)?;
        let (exact, _) = distance::exact_distance_with_budget(&inst.blown_t, &inst.blown_tp, budget)?;
        let (g, m) = (inst.pairs.len(), inst.base_t.n());
        let lower = bounds::lower_bound_value(m, g, ac.size, beta)?;
        let upper = bounds::upper_bound_value(m, g, ac.size, beta)?;
        let ok = lower <= exact as i64 && exact <= f.len() && f.len() as i64 <= upper;
        failures += usize::from(!ok);
        out.emit(
            Record::new("trial")
                .field("trial", trial)
                .field("lower", lower)
                .field("exact", exact)
                .field("construct", f.len())
                .field("upper", upper)
                .field("ok", ok)
                .labeled(),
        )?;
    }
    if failures > 0 {
        return Err(CliError::Invalid(format!("{failures} trial(s) violated the bounds")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = Out::stdout(cli.format);
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(CliError::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
