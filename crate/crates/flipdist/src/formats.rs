//! Line-oriented text formats. Blank lines and `#` comments are ignored
//! everywhere.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::acyclic::AcyclicResult;
use crate::blowup::{ConflictGraph, PairType, SpinePair};
use crate::convex::{Edge, Triangulation};
use crate::distance::FlipSequence;
use crate::reduction::{Clause, Max2SatInstance, Role, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// Non-empty, comment-stripped lines split into tokens, with line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn num(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError { line, message: format!("expected a non-negative integer, found `{tok}`") })
}

fn expect_args<'a>(line: usize, toks: &'a [&'a str], count: usize) -> Result<&'a [&'a str], ParseError> {
    if toks.len() != count + 1 {
        return err(line, format!("`{}` takes {count} argument(s)", toks[0]));
    }
    Ok(&toks[1..])
}

fn header<'a>(it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>, key: &str) -> Result<usize, ParseError> {
    match it.next() {
        Some((line, toks)) if toks[0] == key => num(line, expect_args(line, &toks, 1)?[0]),
        Some((line, _)) => err(line, format!("expected `{key} <int>`")),
        None => err(0, format!("missing `{key}` line")),
    }
}

fn diagonal_block<'a>(
    n: usize,
    it: &mut std::iter::Peekable<impl Iterator<Item = (usize, Vec<&'a str>)>>,
) -> Result<Triangulation, ParseError> {
    let mut seen = BTreeSet::new();
    let mut last = 0;
    while let Some((line, toks)) = it.peek() {
        if toks[0] != "d" {
            break;
        }
        let (line, toks) = (*line, toks.clone());
        it.next();
        let args = expect_args(line, &toks, 2)?;
        let (a, b) = (num(line, args[0])?, num(line, args[1])?);
        if a >= b {
            return err(line, format!("diagonal ({a},{b}) needs a < b"));
        }
        let e = Edge::new(a, b);
        if !seen.insert(e) {
            return err(line, format!("duplicate diagonal {e}"));
        }
        if b >= n || e.is_boundary(n) {
            return err(line, format!("{e} is not a diagonal of an {n}-gon"));
        }
        last = line;
    }
    Triangulation::new(n, seen).map_err(|e| ParseError { line: last, message: e.to_string() })
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation, ParseError> {
    let mut it = lines(text).peekable();
    let n = header(&mut it, "n")?;
    let t = diagonal_block(n, &mut it)?;
    if let Some((line, toks)) = it.next() {
        return err(line, format!("unexpected `{}`", toks[0]));
    }
    Ok(t)
}

pub fn parse_sequence(text: &str) -> Result<FlipSequence, ParseError> {
    let mut it = lines(text).peekable();
    let n = header(&mut it, "n")?;
    match it.next() {
        Some((_, toks)) if toks == ["start"] => {}
        Some((line, _)) => return err(line, "expected `start`"),
        None => return err(0, "missing `start` line"),
    }
    let start = diagonal_block(n, &mut it)?;
    let mut steps = Vec::new();
    for (line, toks) in it {
        if toks[0] != "flip" {
            return err(line, format!("expected `flip`, found `{}`", toks[0]));
        }
        let args = expect_args(line, &toks, 2)?;
        let (a, b) = (num(line, args[0])?, num(line, args[1])?);
        if a >= b || b >= n {
            return err(line, format!("flip ({a},{b}) is not a diagonal"));
        }
        steps.push(Edge::new(a, b));
    }
    Ok(FlipSequence { start, steps })
}

pub fn conflict_graph_text(pairs: &[SpinePair], types: &[PairType], h: &ConflictGraph) -> String {
    let mut s = format!("pairs {}\n", pairs.len());
    for (p, t) in pairs.iter().zip(types) {
        s.push_str(&format!("pair {} {} {} {} {} {}\n", p.index, p.spine.a, p.spine.b, p.apex_t, p.apex_tp, t.name()));
    }
    for &(i, j) in &h.edges {
        s.push_str(&format!("conf {i} {j}\n"));
    }
    s
}

/// A conflict graph file: pairs, their types, and the edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictFile {
    pub pairs: Vec<SpinePair>,
    pub types: Vec<PairType>,
    pub graph: ConflictGraph,
}

pub fn parse_conflict_graph(text: &str) -> Result<ConflictFile, ParseError> {
    let mut it = lines(text);
    let count = header(&mut it, "pairs")?;
    let mut pairs = Vec::with_capacity(count);
    let mut types = Vec::with_capacity(count);
    let mut edges = BTreeSet::new();
    for (line, toks) in it {
        match toks[0] {
            "pair" => {
                let args = expect_args(line, &toks, 6)?;
                let idx = num(line, args[0])?;
                if idx != pairs.len() {
                    return err(line, format!("pair {idx} out of order"));
                }
                let (a, b) = (num(line, args[1])?, num(line, args[2])?);
                if b != a + 1 {
                    return err(line, format!("({a},{b}) is not a spine edge"));
                }
                let (u, up) = (num(line, args[3])?, num(line, args[4])?);
                let Some(t) = PairType::from_name(args[5]) else {
                    return err(line, format!("unknown pair type `{}`", args[5]));
                };
                pairs.push(SpinePair { index: idx, spine: Edge::new(a, b), apex_t: u, apex_tp: up });
                types.push(t);
            }
            "conf" => {
                let args = expect_args(line, &toks, 2)?;
                let (i, j) = (num(line, args[0])?, num(line, args[1])?);
                if i >= count || j >= count || i == j {
                    return err(line, format!("bad conflict edge {i} -> {j}"));
                }
                if !edges.insert((i, j)) {
                    return err(line, format!("duplicate conflict edge {i} -> {j}"));
                }
            }
            other => return err(line, format!("unexpected `{other}`")),
        }
    }
    if pairs.len() != count {
        return err(0, format!("declared {count} pairs, found {}", pairs.len()));
    }
    Ok(ConflictFile { pairs, types, graph: ConflictGraph::new(count, edges) })
}

pub fn acyclic_text(r: &AcyclicResult) -> String {
    let mut s = format!("ac {} {}\n", r.size, if r.exact { "exact" } else { "heur" });
    for v in &r.subset {
        s.push_str(&format!("in {v}\n"));
    }
    s
}

pub fn parse_acyclic(text: &str) -> Result<AcyclicResult, ParseError> {
    let mut it = lines(text);
    let (size, exact) = match it.next() {
        Some((line, toks)) if toks[0] == "ac" => {
            let args = expect_args(line, &toks, 2)?;
            let exact = match args[1] {
                "exact" => true,
                "heur" => false,
                other => return err(line, format!("expected exact or heur, found `{other}`")),
            };
            (num(line, args[0])?, exact)
        }
        Some((line, _)) => return err(line, "expected `ac <size> exact|heur`"),
        None => return err(0, "missing `ac` line"),
    };
    let mut subset = BTreeSet::new();
    for (line, toks) in it {
        if toks[0] != "in" {
            return err(line, format!("unexpected `{}`", toks[0]));
        }
        let v = num(line, expect_args(line, &toks, 1)?[0])?;
        if !subset.insert(v) {
            return err(line, format!("duplicate member {v}"));
        }
    }
    if subset.len() != size {
        return err(0, format!("declared size {size}, listed {}", subset.len()));
    }
    Ok(AcyclicResult { subset: subset.into_iter().collect(), size, exact })
}

pub fn max2sat_text(phi: &Max2SatInstance) -> String {
    let mut s = format!("vars {}\n", phi.w);
    for c in &phi.clauses {
        s.push_str(&format!("clause {} {} {}\n", c.side.name(), c.i, c.j));
    }
    if let Some(k) = phi.k_prime {
        s.push_str(&format!("k {k}\n"));
    }
    s
}

/// Parses and validates a monotone 2SAT instance.
pub fn parse_max2sat(text: &str) -> Result<Max2SatInstance, ParseError> {
    let mut it = lines(text);
    let w = header(&mut it, "vars")?;
    let mut clauses = Vec::new();
    let mut k_prime = None;
    for (line, toks) in it {
        match toks[0] {
            "clause" => {
                let args = expect_args(line, &toks, 3)?;
                let side = match args[0] {
                    "pos" => Side::Positive,
                    "neg" => Side::Negative,
                    other => return err(line, format!("expected pos or neg, found `{other}`")),
                };
                clauses.push(Clause { side, i: num(line, args[1])?, j: num(line, args[2])? });
            }
            "k" => {
                if k_prime.is_some() {
                    return err(line, "duplicate `k` line");
                }
                k_prime = Some(num(line, expect_args(line, &toks, 1)?[0])?);
            }
            other => return err(line, format!("unexpected `{other}`")),
        }
    }
    Max2SatInstance::new(w, clauses, k_prime).map_err(|e| ParseError { line: 0, message: e.to_string() })
}

pub fn parse_role_map(text: &str) -> Result<Vec<Role>, ParseError> {
    let mut roles = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, toks) in lines(text) {
        if toks[0] != "role" {
            return err(line, format!("unexpected `{}`", toks[0]));
        }
        let args = expect_args(line, &toks, 2)?;
        if num(line, args[0])? != roles.len() {
            return err(line, "role indices must run 0, 1, 2, ...");
        }
        let Some(r) = Role::parse(args[1]) else {
            return err(line, format!("unknown role `{}`", args[1]));
        };
        if !seen.insert(r) {
            return err(line, format!("duplicate role {r}"));
        }
        roles.push(r);
    }
    Ok(roles)
}
