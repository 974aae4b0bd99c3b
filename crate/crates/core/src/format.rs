//! Text formats: graphs, certificates, DIMACS CNF and hypergraphs.
//!
//! Every format uses `c` comment lines and a `p` header. Writers produce
//! output that the matching parser reads back to an equal value.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::bgc::SolveResult;
use crate::error::{Error, Result};
use crate::gen::{Cnf, Hypergraph};
use crate::graph::{Graph, Vertex, VertexSet, WitnessMap};

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

/// Non-blank lines with their 1-based numbers; comments are kept.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn is_comment(line: &str) -> bool {
    line == "c" || line.starts_with("c ")
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    match tok {
        Some(t) => t.parse().or_else(|_| perr(line, format!("bad {what} `{t}`"))),
        None => perr(line, format!("missing {what}")),
    }
}

fn no_more(line: usize, mut toks: std::str::SplitWhitespace<'_>) -> Result<()> {
    match toks.next() {
        Some(t) => perr(line, format!("unexpected token `{t}`")),
        None => Ok(()),
    }
}

/// Parses `p graph <n> <m>` followed by `e <u> <v>` lines.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (ln, line) in lines(text) {
        if is_comment(line) {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return perr(ln, "second header");
                }
                if toks.next() != Some("graph") {
                    return perr(ln, "expected `p graph <n> <m>`");
                }
                let n = num(ln, toks.next(), "vertex count")?;
                let m = num(ln, toks.next(), "edge count")?;
                no_more(ln, toks)?;
                header = Some((n, m, ln));
            }
            Some("e") => {
                let Some((n, _, _)) = header else { return perr(ln, "edge before header") };
                let u: Vertex = num(ln, toks.next(), "vertex")?;
                let v: Vertex = num(ln, toks.next(), "vertex")?;
                no_more(ln, toks)?;
                for x in [u, v] {
                    if x == 0 || x as usize > n {
                        return perr(ln, format!("vertex {x} out of range 1..={n}"));
                    }
                }
                if u == v {
                    return perr(ln, format!("self-loop on vertex {u}"));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return perr(ln, format!("duplicate edge {u} {v}"));
                }
                edges.push((u, v));
            }
            Some(t) => return perr(ln, format!("unknown line type `{t}`")),
            None => unreachable!("blank lines are skipped"),
        }
    }
    let Some((n, m, ln)) = header else { return perr(0, "missing `p graph` header") };
    if edges.len() != m {
        return perr(ln, format!("header announces {m} edges, found {}", edges.len()));
    }
    Graph::from_edge_list(n, &edges)
}

/// Writes the graph with the given comment lines (without the `c ` prefix) on top.
pub fn write_graph(g: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p graph {} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

/// Parsed certificate. `reduction_map` is set for certificates that refer to a
/// reduced graph: `map[old] = new`, index 0 unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    No,
    Yes { witness: WitnessMap, cost: isize, reduction_map: Option<Vec<Vertex>> },
}

impl Certificate {
    /// Certificate for a solver result on a graph with `n` vertices.
    pub fn from_result(res: &SolveResult, n: usize) -> Certificate {
        match &res.certificate {
            None => Certificate::No,
            Some(w) => {
                let (graph_n, reduction_map) = match &res.reduction {
                    Some(red) => (red.graph.n(), Some(red.map.clone())),
                    None => (n, None),
                };
                Certificate::Yes { witness: w.clone(), cost: w.cost(graph_n), reduction_map }
            }
        }
    }
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    match cert {
        Certificate::No => out.push_str("s NO\n"),
        Certificate::Yes { witness, cost, reduction_map } => {
            let _ = writeln!(out, "s YES {} {} {cost}", witness.rows, witness.cols);
            if let Some(map) = reduction_map {
                out.push_str("c reduced-form\n");
                for (old, new) in map.iter().enumerate().skip(1) {
                    let _ = writeln!(out, "c map {old} {new}");
                }
            }
            for (i, (row, col)) in witness.assign.iter().enumerate() {
                let _ = writeln!(out, "w {} {row} {col}", i + 1);
            }
        }
    }
    out
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut header: Option<Option<(usize, usize, isize)>> = None;
    let mut reduced = false;
    let mut map: Vec<(usize, Vertex)> = Vec::new();
    let mut assign: Vec<Option<(usize, usize)>> = Vec::new();
    for (ln, line) in lines(text) {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("c") => match toks.next() {
                Some("reduced-form") => reduced = true,
                Some("map") => {
                    let old = num(ln, toks.next(), "vertex")?;
                    let new = num(ln, toks.next(), "vertex")?;
                    no_more(ln, toks)?;
                    map.push((old, new));
                }
                _ => {}
            },
            Some("s") => {
                if header.is_some() {
                    return perr(ln, "second verdict line");
                }
                header = Some(match toks.next() {
                    Some("NO") => None,
                    Some("YES") => {
                        let r = num(ln, toks.next(), "row count")?;
                        let q = num(ln, toks.next(), "column count")?;
                        let cost = num(ln, toks.next(), "cost")?;
                        Some((r, q, cost))
                    }
                    _ => return perr(ln, "expected `s YES <r> <q> <cost>` or `s NO`"),
                });
                no_more(ln, toks)?;
            }
            Some("w") => {
                let v: usize = num(ln, toks.next(), "vertex")?;
                let row = num(ln, toks.next(), "row")?;
                let col = num(ln, toks.next(), "column")?;
                no_more(ln, toks)?;
                if v == 0 {
                    return perr(ln, "vertex 0 does not exist");
                }
                if assign.len() < v {
                    assign.resize(v, None);
                }
                if assign[v - 1].replace((row, col)).is_some() {
                    return perr(ln, format!("vertex {v} assigned twice"));
                }
            }
            Some(t) => return perr(ln, format!("unknown line type `{t}`")),
            None => unreachable!("blank lines are skipped"),
        }
    }
    match header {
        None => perr(0, "missing `s` verdict line"),
        Some(None) => {
            if !assign.is_empty() {
                return perr(0, "NO certificate with witness lines");
            }
            Ok(Certificate::No)
        }
        Some(Some((r, q, cost))) => {
            let assign: Option<Vec<_>> = assign.iter().copied().collect();
            let Some(assign) = assign else { return perr(0, "witness skips a vertex") };
            let reduction_map = if reduced {
                let n = map.iter().map(|&(old, _)| old).max().unwrap_or(0);
                let mut out = vec![0; n + 1];
                for (old, new) in map {
                    if old == 0 || out[old] != 0 {
                        return perr(0, format!("bad or repeated map entry for vertex {old}"));
                    }
                    out[old] = new;
                }
                if out.iter().skip(1).any(|&v| v == 0) {
                    return perr(0, "reduction map skips a vertex");
                }
                Some(out)
            } else {
                None
            };
            Ok(Certificate::Yes { witness: WitnessMap::new(r, q, assign), cost, reduction_map })
        }
    }
}

/// DIMACS CNF: `p cnf <vars> <clauses>` and zero-terminated clauses, which may
/// span lines.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    let mut last_line = 0;
    for (ln, line) in lines(text) {
        last_line = ln;
        if is_comment(line) || line.starts_with('%') {
            continue;
        }
        let mut toks = line.split_whitespace();
        if line.starts_with('p') {
            toks.next();
            if header.is_some() {
                return perr(ln, "second header");
            }
            if toks.next() != Some("cnf") {
                return perr(ln, "expected `p cnf <vars> <clauses>`");
            }
            let v = num(ln, toks.next(), "variable count")?;
            let c = num(ln, toks.next(), "clause count")?;
            no_more(ln, toks)?;
            header = Some((v, c, ln));
            continue;
        }
        let Some((vars, _, _)) = header else { return perr(ln, "clause before header") };
        for t in toks {
            let lit: i32 = num(ln, Some(t), "literal")?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if lit.unsigned_abs() as usize > vars {
                return perr(ln, format!("literal {lit} out of range for {vars} variables"));
            } else {
                cur.push(lit);
            }
        }
    }
    let Some((vars, count, ln)) = header else { return perr(0, "missing `p cnf` header") };
    if !cur.is_empty() {
        return perr(last_line, "last clause is not terminated by 0");
    }
    if clauses.len() != count {
        return perr(ln, format!("header announces {count} clauses, found {}", clauses.len()));
    }
    Cnf::new(vars, clauses)
}

pub fn write_dimacs(f: &Cnf, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p cnf {} {}", f.vars, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

/// `p hyp <n> <m>` followed by `h <size> <v1> ... <vsize>` lines.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (ln, line) in lines(text) {
        if is_comment(line) {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return perr(ln, "second header");
                }
                if toks.next() != Some("hyp") {
                    return perr(ln, "expected `p hyp <n> <m>`");
                }
                let n = num(ln, toks.next(), "vertex count")?;
                let m = num(ln, toks.next(), "edge count")?;
                no_more(ln, toks)?;
                header = Some((n, m, ln));
            }
            Some("h") => {
                let Some((n, _, _)) = header else { return perr(ln, "hyperedge before header") };
                let size: usize = num(ln, toks.next(), "edge size")?;
                let members: Vec<Vertex> = toks.map(|t| num(ln, Some(t), "vertex")).collect::<Result<_>>()?;
                if members.len() != size {
                    return perr(ln, format!("edge announces {size} vertices, lists {}", members.len()));
                }
                if let Some(&v) = members.iter().find(|&&v| v == 0 || v as usize > n) {
                    return perr(ln, format!("vertex {v} out of range 1..={n}"));
                }
                let set: VertexSet = members.iter().copied().collect();
                if set.len() != size {
                    return perr(ln, "repeated vertex in hyperedge");
                }
                edges.push(set);
            }
            Some(t) => return perr(ln, format!("unknown line type `{t}`")),
            None => unreachable!("blank lines are skipped"),
        }
    }
    let Some((n, m, ln)) = header else { return perr(0, "missing `p hyp` header") };
    if edges.len() != m {
        return perr(ln, format!("header announces {m} edges, found {}", edges.len()));
    }
    Hypergraph::new(n, edges)
}

pub fn write_hypergraph(h: &Hypergraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p hyp {} {}", h.n, h.edges.len());
    for e in &h.edges {
        let _ = write!(out, "h {}", e.len());
        for v in e.iter() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Values of `c <key>=<value>` comment lines, e.g. `c k=3`.
pub fn comment_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    lines(text).filter(|(_, l)| is_comment(l)).find_map(|(_, l)| {
        l[1..].split_whitespace().find_map(|tok| tok.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
    })
}
