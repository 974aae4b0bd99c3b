//! Instance generators: the hardness reductions (3-SAT to NAE-SAT, NAE-SAT to
//! hypergraph 2-colouring, hypergraph 2-colouring to C4 contraction) and
//! planted or random graphs for tests and benchmarks.
//!
//! Everything is a deterministic function of its arguments; randomness comes
//! from a ChaCha stream seeded by the caller.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::graph::{Graph, Vertex, VertexSet, WitnessMap};

/// CNF formula; literals are signed 1-based variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        check_literals(vars, &clauses)?;
        Ok(Cnf { vars, clauses })
    }
}

/// Formula read with not-all-equal semantics: each clause needs a true and a
/// false literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NaeFormula {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl NaeFormula {
    pub fn new(vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        check_literals(vars, &clauses)?;
        if let Some(i) = clauses.iter().position(Vec::is_empty) {
            return invalid(format!("clause {} is empty", i + 1));
        }
        Ok(NaeFormula { vars, clauses })
    }
}

fn check_literals(vars: usize, clauses: &[Vec<i32>]) -> Result<()> {
    for c in clauses {
        for &l in c {
            if l == 0 || l.unsigned_abs() as usize > vars {
                return invalid(format!("literal {l} out of range for {vars} variables"));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<VertexSet>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<VertexSet>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return invalid(format!("hyperedge {} is empty", i + 1));
            }
            if e.iter().any(|v| v == 0 || v as usize > n) {
                return invalid(format!("hyperedge {} has a vertex outside 1..={n}", i + 1));
            }
        }
        Ok(Hypergraph { n, edges })
    }
}

/// Adds one fresh variable `s` to every clause: `f` is satisfiable iff the
/// result is NAE-satisfiable.
pub fn sat3_to_nae(f: &Cnf) -> Result<NaeFormula> {
    if let Some(i) = f.clauses.iter().position(Vec::is_empty) {
        return invalid(format!("clause {} is empty", i + 1));
    }
    let s = f.vars as i32 + 1;
    let clauses = f
        .clauses
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.push(s);
            c
        })
        .collect();
    NaeFormula::new(f.vars + 1, clauses)
}

/// Hypergraph vertex of a literal: `2x - 1` for `x`, `2x` for `¬x`.
pub fn literal_vertex(lit: i32) -> Vertex {
    let x = lit.unsigned_abs();
    if lit > 0 {
        2 * x - 1
    } else {
        2 * x
    }
}

/// One vertex per literal, an edge `{x, ¬x}` per variable and an edge per
/// clause holding its literals.
pub fn nae_to_hypergraph(f: &NaeFormula) -> Hypergraph {
    let mut edges: Vec<VertexSet> = (1..=f.vars as Vertex).map(|x| VertexSet::from([2 * x - 1, 2 * x])).collect();
    edges.extend(f.clauses.iter().map(|c| c.iter().map(|&l| literal_vertex(l)).collect::<VertexSet>()));
    Hypergraph { n: 2 * f.vars, edges }
}

/// Output of [`hypergraph_to_c4_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C4Instance {
    pub graph: Graph,
    pub k: usize,
    /// Universal hyperedges appended to meet the construction's preconditions.
    pub universal_edges_added: usize,
    /// The hypergraph actually encoded.
    pub hypergraph: Hypergraph,
}

/// Graph that contracts to `C4` iff `h` is 2-colourable.
///
/// Layout: `X = 1..=n'` (a clique), then `E1`, then `E2` (complete bipartite
/// between them, `e_i` adjacent to the members of `e`), then `v1` (on all of
/// `E1`) and `v2` (on all of `E2`), joined to each other. `k = |V| - 4`.
pub fn hypergraph_to_c4_instance(h: &Hypergraph) -> Result<C4Instance> {
    if h.n == 0 {
        return invalid("hypergraph has no vertices");
    }
    let universal: VertexSet = (1..=h.n as Vertex).collect();
    let mut hyp = h.clone();
    let mut added = 0;
    if !hyp.edges.contains(&universal) {
        hyp.edges.push(universal.clone());
        added += 1;
    }
    while hyp.edges.len() < 2 {
        hyp.edges.push(universal.clone());
        added += 1;
    }
    let (np, mp) = (hyp.n as Vertex, hyp.edges.len() as Vertex);
    let e1 = |i: Vertex| np + i;
    let e2 = |i: Vertex| np + mp + i;
    let (v1, v2) = (np + 2 * mp + 1, np + 2 * mp + 2);
    let mut edges = Vec::new();
    for a in 1..=np {
        for b in a + 1..=np {
            edges.push((a, b));
        }
    }
    for i in 1..=mp {
        for j in 1..=mp {
            edges.push((e1(i), e2(j)));
        }
        for x in hyp.edges[i as usize - 1].iter() {
            edges.push((x, e1(i)));
            edges.push((x, e2(i)));
        }
        edges.push((v1, e1(i)));
        edges.push((v2, e2(i)));
    }
    edges.push((v1, v2));
    let graph = Graph::from_edge_list(v2 as usize, &edges)?;
    let k = graph.n() - 4;
    Ok(C4Instance { graph, k, universal_edges_added: added, hypergraph: hyp })
}

/// A graph with a known grid contraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub k: usize,
    pub witness: WitnessMap,
}

/// Starts from the `r x q` grid and performs `k` random vertex splits. Each
/// split picks a vertex `v`, adds a new neighbor `v'` of it and moves a random
/// subset of `v`'s other neighbors over to `v'`.
pub fn split_grid(r: usize, q: usize, k: usize, seed: u64) -> Result<PlantedInstance> {
    let base = Graph::grid(r, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new()];
    adj.extend(base.vertices().map(|v| base.neighbors(v).iter().copied().collect()));
    let mut assign: Vec<(usize, usize)> = (0..r * q).map(|idx| (idx / q + 1, idx % q + 1)).collect();
    for _ in 0..k {
        let n = adj.len() - 1;
        let v = rng.gen_range(1..=n) as Vertex;
        let fresh = n as Vertex + 1;
        let moved: Vec<Vertex> = adj[v as usize].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        adj.push(BTreeSet::new());
        for w in moved {
            adj[v as usize].remove(&w);
            adj[w as usize].remove(&v);
            adj[w as usize].insert(fresh);
            adj[fresh as usize].insert(w);
        }
        adj[v as usize].insert(fresh);
        adj[fresh as usize].insert(v);
        assign.push(assign[v as usize - 1]);
    }
    let edges: Vec<(Vertex, Vertex)> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, ns)| ns.iter().filter(move |&&w| w as usize > u).map(move |&w| (u as Vertex, w)))
        .collect();
    let graph = Graph::from_edge_list(adj.len() - 1, &edges)?;
    Ok(PlantedInstance { graph, k, witness: WitnessMap::new(r, q, assign) })
}

/// Uniform simple graph with `n` vertices and `m` edges. With `connected`,
/// draws are repeated until the graph is connected.
pub fn random_graph(n: usize, m: usize, seed: u64, connected: bool) -> Result<Graph> {
    const MAX_ATTEMPTS: usize = 100_000;
    if n == 0 {
        return invalid("random graph needs at least one vertex");
    }
    let pairs = n * (n - 1) / 2;
    if m > pairs {
        return invalid(format!("{m} edges do not fit on {n} vertices"));
    }
    if connected && m + 1 < n {
        return invalid(format!("a connected graph on {n} vertices needs at least {} edges", n - 1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let edges: Vec<(Vertex, Vertex)> = sample(&mut rng, pairs, m).into_iter().map(|idx| pair_at(n, idx)).collect();
        let g = Graph::from_edge_list(n, &edges)?;
        if !connected || g.is_connected() {
            return Ok(g);
        }
    }
    invalid(format!("no connected graph found after {MAX_ATTEMPTS} draws"))
}

/// Random NAE formula: `clauses` clauses of 2 to `max_width` distinct
/// variables, each negated with probability 1/2.
pub fn random_nae(vars: usize, clauses: usize, max_width: usize, seed: u64) -> Result<NaeFormula> {
    if vars < 2 || max_width < 2 {
        return invalid("random NAE clauses need at least two variables");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..clauses)
        .map(|_| {
            let width = rng.gen_range(2..=max_width.min(vars));
            let mut picked: Vec<usize> = sample(&mut rng, vars, width).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|x| if rng.gen_bool(0.5) { -(x as i32 + 1) } else { x as i32 + 1 }).collect()
        })
        .collect();
    NaeFormula::new(vars, out)
}

/// The `idx`-th pair `(u, v)`, `u < v`, in lexicographic order.
fn pair_at(n: usize, mut idx: usize) -> (Vertex, Vertex) {
    for u in 1..n {
        let row = n - u;
        if idx < row {
            return (u as Vertex, (u + 1 + idx) as Vertex);
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}
