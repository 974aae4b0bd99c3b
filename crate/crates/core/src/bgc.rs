//! Bounded grid contraction: is `G` k-contractible to a grid with exactly `r`
//! rows?
//!
//! The dynamic program sweeps columns from left to right. A state is a valid
//! tuple `(S, D)`: `S` is the union of the columns built so far and `D` is its
//! last column, a k-potential r-slab. For each state and contraction budget
//! `k'` the table keeps the achievable column counts. It grows states by
//! attaching extender slabs, the candidate next columns.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{Corners, Graph, Vertex, VertexSet, WitnessMap};
use crate::slab::{enumerate_all_with_stats, RSlab, SlabSearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub fn is_yes(self) -> bool {
        self == Answer::Yes
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if self.is_yes() { "YES" } else { "NO" })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub potential_slabs: u64,
    pub tuples: u64,
    /// Distinct `(tuple, k', q')` entries ever set.
    pub table_entries: u64,
    /// Extender searches, one per processed tuple.
    pub extender_enumerations: u64,
    pub extender_candidates: u64,
    /// Largest candidate list produced by a single extender search.
    pub peak_candidates: u64,
    /// Updates whose target was not a valid tuple and got dropped.
    pub dropped_updates: u64,
    pub search_nodes: u64,
    pub elapsed: Duration,
}

impl SolveStats {
    pub fn absorb(&mut self, other: &SolveStats) {
        self.potential_slabs += other.potential_slabs;
        self.tuples += other.tuples;
        self.table_entries += other.table_entries;
        self.extender_enumerations += other.extender_enumerations;
        self.extender_candidates += other.extender_candidates;
        self.peak_candidates = self.peak_candidates.max(other.peak_candidates);
        self.dropped_updates += other.dropped_updates;
        self.search_nodes += other.search_nodes;
        self.elapsed += other.elapsed;
    }
}

/// Graph a certificate refers to when it is not the input graph, with
/// `map[original] = reduced`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub graph: Graph,
    pub map: Vec<Vertex>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub answer: Answer,
    pub certificate: Option<WitnessMap>,
    pub stats: SolveStats,
    /// Set when the certificate is for a reduced graph rather than the input.
    pub reduction: Option<Reduction>,
}

impl SolveResult {
    pub fn no(stats: SolveStats) -> Self {
        SolveResult { answer: Answer::No, certificate: None, stats, reduction: None }
    }

    pub fn yes(certificate: WitnessMap, stats: SolveStats) -> Self {
        SolveResult { answer: Answer::Yes, certificate: Some(certificate), stats, reduction: None }
    }

    pub fn is_yes(&self) -> bool {
        self.answer.is_yes()
    }
}

/// A k-potential r-slab: `|D| + |N(D)| <= k + 3r` and `G - D` has at most two
/// components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PotentialSlab {
    pub slab: RSlab,
    pub vertices: VertexSet,
    pub neighborhood_size: usize,
}

/// DP state: a connected prefix `S` of columns whose last column is `slab`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValidTuple {
    pub set: VertexSet,
    pub slab: PotentialSlab,
}

impl ValidTuple {
    pub fn key(&self) -> (&VertexSet, &RSlab) {
        (&self.set, &self.slab.slab)
    }
}

pub fn enumerate_potential_slabs(g: &Graph, k: usize, r: usize) -> Vec<PotentialSlab> {
    potential_slabs_with_stats(g, k, r).0
}

fn potential_slabs_with_stats(g: &Graph, k: usize, r: usize) -> (Vec<PotentialSlab>, u64) {
    let limit = k + 3 * r;
    let (slabs, stats) = enumerate_all_with_stats(g, r, limit, limit, Some(limit));
    let out = slabs
        .into_iter()
        .filter_map(|slab| {
            let vertices = slab.vertex_set();
            let neighborhood_size = g.neighborhood(&vertices).len();
            (vertices.len() + neighborhood_size <= limit && g.components(&vertices).len() <= 2)
                .then_some(PotentialSlab { slab, vertices, neighborhood_size })
        })
        .collect();
    (out, stats.nodes)
}

/// Tuples built from one potential slab `D`: one per component `C` of `G - D`
/// as `(C ∪ D, D)`, plus `(D, D)` when `G - D` has at most one component.
fn tuples_of(g: &Graph, d: &PotentialSlab) -> Vec<ValidTuple> {
    let comps = g.components(&d.vertices);
    let mut out: Vec<ValidTuple> =
        comps.iter().map(|c| ValidTuple { set: c.union(&d.vertices), slab: d.clone() }).collect();
    if comps.len() <= 1 {
        out.push(ValidTuple { set: d.vertices.clone(), slab: d.clone() });
    }
    out
}

pub fn enumerate_valid_tuples(g: &Graph, k: usize, r: usize) -> Vec<ValidTuple> {
    let mut out: Vec<ValidTuple> = enumerate_potential_slabs(g, k, r).iter().flat_map(|d| tuples_of(g, d)).collect();
    out.sort();
    out.dedup();
    out
}

/// Checks the defining properties of a valid tuple directly.
pub fn is_valid_tuple(g: &Graph, t: &ValidTuple, k: usize, r: usize) -> bool {
    let d = &t.slab.vertices;
    if t.slab.slab.r() != r
        || !crate::slab::is_r_slab(g, t.slab.slab.parts())
        || d.len() + g.neighborhood(d).len() > k + 3 * r
        || g.components(d).len() > 2
        || !d.is_subset(&t.set)
        || !g.is_connected_set(&t.set)
        || g.components(&t.set).len() > 1
    {
        return false;
    }
    let rest = t.set.difference(d);
    rest.is_empty() || g.components(d).contains(&rest)
}

/// Searches the next-column candidates of tuple `t`: r-slabs outside `S`
/// with `N(D_i) \ S ⊆ A_i`, size at most `alpha` and at most `limit` vertices
/// in `A` plus outside neighbors. Tuples where some `D_i` has no neighbor
/// outside `S` have none, since `A_i` must touch `D_i`.
fn extender_search(g: &Graph, t: &ValidTuple, alpha: usize, limit: usize) -> (Vec<RSlab>, u64) {
    let r = t.slab.slab.r();
    let mut seeds = Vec::with_capacity(r);
    for part in t.slab.slab.parts() {
        let q: VertexSet = g.neighborhood(part).difference(&t.set);
        if q.is_empty() {
            return (Vec::new(), 0);
        }
        seeds.push(q);
    }
    for i in 0..r {
        for j in i + 1..r {
            if !seeds[i].is_disjoint(&seeds[j]) {
                return (Vec::new(), 0);
            }
        }
    }
    let beta = limit.saturating_sub(r);
    let mut search = SlabSearch::new(g, r, alpha, beta, Some(limit));
    search.block(&t.set);
    search.run(&seeds);
    let (found, stats) = search.into_results();
    (found, stats.nodes)
}

/// The extender family `A_{a,b}` of tuple `t`: r-slabs `A` disjoint from `S`
/// with `|A| = a`, `|N(A) \ S| = b` and `N(D_i) \ S ⊆ A_i` for every part.
pub fn compute_extenders(g: &Graph, t: &ValidTuple, a: usize, b: usize, k: usize, r: usize) -> Vec<RSlab> {
    let limit = k + 3 * r;
    let d = t.slab.vertices.len();
    if a < r || a + b + d > limit || g.neighborhood(&t.set).len() > a || t.slab.slab.r() != r {
        return Vec::new();
    }
    let (found, _) = extender_search(g, t, a, limit - d);
    found
        .into_iter()
        .filter(|s| s.size() == a && g.neighborhood(&s.vertex_set()).difference(&t.set).len() == b)
        .collect()
}

/// Corner constraints of the annotated problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Annotation {
    q: usize,
    corners: Corners,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pred {
    Init,
    From { tuple: usize, k: usize, q: usize },
}

/// The table: for each valid tuple and budget `k'`, the achievable column
/// counts with the predecessor that first set them.
pub struct GammaTable {
    k: usize,
    r: usize,
    tuples: Vec<ValidTuple>,
    neighbor_sizes: Vec<usize>,
    entries: Vec<Vec<BTreeMap<usize, Pred>>>,
    stats: SolveStats,
}

impl GammaTable {
    pub fn tuples(&self) -> &[ValidTuple] {
        &self.tuples
    }

    /// Column counts reachable for tuple index `t` with budget `k'`.
    pub fn reachable(&self, t: usize, k_prime: usize) -> Vec<usize> {
        self.entries[t][k_prime].keys().copied().collect()
    }

    /// All set entries as `(tuple, k', q')`.
    pub fn entries(&self) -> impl Iterator<Item = (&ValidTuple, usize, usize)> + '_ {
        self.entries.iter().enumerate().flat_map(move |(t, per_k)| {
            per_k.iter().enumerate().flat_map(move |(kp, m)| m.keys().map(move |&q| (&self.tuples[t], kp, q)))
        })
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    /// Witness for `G[S]` read off the predecessor chain of an entry.
    pub fn witness(&self, t: usize, k_prime: usize, q: usize, n: usize) -> WitnessMap {
        let mut columns = Vec::new();
        let (mut t, mut kp, mut q) = (t, k_prime, q);
        loop {
            columns.push(t);
            match self.entries[t][kp][&q] {
                Pred::Init => break,
                Pred::From { tuple, k, q: pq } => {
                    t = tuple;
                    kp = k;
                    q = pq;
                }
            }
        }
        columns.reverse();
        let mut assign = vec![(0, 0); n];
        for (j, &c) in columns.iter().enumerate() {
            for (i, part) in self.tuples[c].slab.slab.parts().iter().enumerate() {
                for v in part.iter() {
                    assign[v as usize - 1] = (i + 1, j + 1);
                }
            }
        }
        WitnessMap::new(self.r, columns.len(), assign)
    }
}

/// Builds and fills the table for `(g, k, r)`.
pub fn gamma_table(g: &Graph, k: usize, r: usize) -> GammaTable {
    build_table(g, k, r, None)
}

fn build_table(g: &Graph, k: usize, r: usize, annotation: Option<Annotation>) -> GammaTable {
    let started = Instant::now();
    let mut stats = SolveStats::default();
    let limit = k + 3 * r;
    let n = g.n();

    let (slabs, nodes) = potential_slabs_with_stats(g, k, r);
    stats.potential_slabs = slabs.len() as u64;
    stats.search_nodes += nodes;
    let mut tuples: Vec<ValidTuple> = slabs.iter().flat_map(|d| tuples_of(g, d)).collect();
    tuples.sort_by(|a, b| {
        (a.set.len(), a.slab.vertices.len(), &a.set, &a.slab.slab).cmp(&(
            b.set.len(),
            b.slab.vertices.len(),
            &b.set,
            &b.slab.slab,
        ))
    });
    tuples.dedup();
    stats.tuples = tuples.len() as u64;
    let index: HashMap<(VertexSet, RSlab), usize> =
        tuples.iter().enumerate().map(|(i, t)| ((t.set.clone(), t.slab.slab.clone()), i)).collect();
    let neighbor_sizes: Vec<usize> = tuples.iter().map(|t| g.neighborhood(&t.set).len()).collect();
    let mut entries: Vec<Vec<BTreeMap<usize, Pred>>> = vec![vec![BTreeMap::new(); k + 1]; tuples.len()];

    let within_budget = |kp: usize, nbr: usize| kp + nbr <= k + r;

    // Initialization: single-column prefixes.
    for (ti, t) in tuples.iter().enumerate() {
        if t.set != t.slab.vertices {
            continue;
        }
        if let Some(a) = annotation {
            let [x1, x2, x3, x4] = a.corners.0;
            let d = &t.slab.slab;
            if !d.part(1).contains(x1) || !d.part(r).contains(x4) {
                continue;
            }
            if t.set.contains(x2) || t.set.contains(x3) {
                continue;
            }
        }
        let Some(first) = t.set.len().checked_sub(r) else { continue };
        for (kp, slot) in entries[ti].iter_mut().enumerate().skip(first) {
            if within_budget(kp, neighbor_sizes[ti]) && slot.insert(1, Pred::Init).is_none() {
                stats.table_entries += 1;
            }
        }
    }

    // Chronological sweep; every update targets a strictly larger S, so a
    // tuple's entries are final when it is reached.
    for ti in 0..tuples.len() {
        let t = &tuples[ti];
        if t.set.len() == n {
            continue;
        }
        let Some(k_min) = (0..=k).find(|&kp| !entries[ti][kp].is_empty()) else { continue };
        let d = t.slab.vertices.len();
        if d > limit {
            continue;
        }
        let alpha = (limit - d).min(k - k_min + r);
        let (extenders, nodes) = extender_search(g, t, alpha, limit - d);
        stats.extender_enumerations += 1;
        stats.extender_candidates += extenders.len() as u64;
        stats.peak_candidates = stats.peak_candidates.max(extenders.len() as u64);
        stats.search_nodes += nodes;
        let nbr_s = neighbor_sizes[ti];

        for ext in &extenders {
            let a = ext.size();
            if a < r || a < nbr_s {
                continue;
            }
            let ext_set = ext.vertex_set();
            let new_set = t.set.union(&ext_set);
            let last = new_set.len() == n;
            if let Some(ann) = annotation {
                let [_, x2, x3, _] = ann.corners.0;
                let has_x2_x3 = ext_set.contains(x2) || ext_set.contains(x3);
                if last {
                    if !ext.part(1).contains(x2) || !ext.part(r).contains(x3) {
                        continue;
                    }
                } else if has_x2_x3 {
                    continue;
                }
            }
            let Some(&target) = index.get(&(new_set, ext.clone())) else {
                stats.dropped_updates += 1;
                continue;
            };
            let nbr_target = neighbor_sizes[target];
            for kp in k_min..=k {
                if entries[ti][kp].is_empty() || kp + a - r > k {
                    continue;
                }
                let qs: Vec<usize> = entries[ti][kp].keys().copied().collect();
                for q in qs {
                    let nq = q + 1;
                    if let Some(ann) = annotation {
                        if nq > ann.q || (!last && nq >= ann.q) {
                            continue;
                        }
                    }
                    for (k1, slot) in entries[target].iter_mut().enumerate().skip(kp + a - r) {
                        if !within_budget(k1, nbr_target) {
                            break;
                        }
                        if let Entry::Vacant(e) = slot.entry(nq) {
                            e.insert(Pred::From { tuple: ti, k: kp, q });
                            stats.table_entries += 1;
                        }
                    }
                }
            }
        }
    }
    stats.elapsed = started.elapsed();
    GammaTable { k, r, tuples, neighbor_sizes, entries, stats }
}

impl GammaTable {
    /// First accepting entry: `S = V`, smallest `k'`, then tuple order, then
    /// smallest column count. `accept` filters on `(tuple, q')`.
    fn accepting(&self, n: usize, accept: impl Fn(&ValidTuple, usize) -> bool) -> Option<(usize, usize, usize)> {
        for kp in 0..=self.k {
            for (ti, t) in self.tuples.iter().enumerate() {
                if t.set.len() != n {
                    continue;
                }
                debug_assert_eq!(self.neighbor_sizes[ti], 0);
                if let Some(&q) = self.entries[ti][kp].keys().find(|&&q| accept(t, q)) {
                    return Some((ti, kp, q));
                }
            }
        }
        None
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Whether some `q >= 1` has `n - k <= r * q <= n`.
fn column_count_possible(n: usize, k: usize, r: usize) -> bool {
    let q = n / r;
    q >= 1 && r * q + k >= n
}

/// Is `g` k-contractible to a grid with exactly `r` rows (any number of
/// columns, one included)?
pub fn solve_bounded(g: &Graph, k: usize, r: usize) -> Result<SolveResult> {
    require_connected(g)?;
    if r == 0 {
        return Err(Error::Invalid("r must be positive".into()));
    }
    if !column_count_possible(g.n(), k, r) {
        return Ok(SolveResult::no(SolveStats::default()));
    }
    let table = build_table(g, k, r, None);
    let n = g.n();
    Ok(match table.accepting(n, |_, _| true) {
        Some((t, kp, q)) => SolveResult::yes(table.witness(t, kp, q, n), table.stats()),
        None => SolveResult::no(table.stats()),
    })
}

/// Is `g` k-contractible to the `r x q` grid with `x1..x4` in the cells
/// `[1,1]`, `[1,q]`, `[r,q]`, `[r,1]`?
pub fn solve_annotated(g: &Graph, k: usize, r: usize, q: usize, c: Corners) -> Result<SolveResult> {
    require_connected(g)?;
    if r < 2 || q < 2 {
        return Err(Error::Invalid(format!("annotated targets need r, q >= 2, got {r}x{q}")));
    }
    let n = g.n();
    if c.0.iter().any(|&x| x == 0 || x as usize > n) {
        return Err(Error::Invalid(format!("corner out of range: {:?}", c.0)));
    }
    if r * q > n || r * q + k < n {
        return Ok(SolveResult::no(SolveStats::default()));
    }
    let table = build_table(g, k, r, Some(Annotation { q, corners: c }));
    let [_, x2, x3, _] = c.0;
    let accept =
        |t: &ValidTuple, cols: usize| cols == q && t.slab.slab.part(1).contains(x2) && t.slab.slab.part(r).contains(x3);
    Ok(match table.accepting(n, accept) {
        Some((t, kp, cols)) => SolveResult::yes(table.witness(t, kp, cols, n), table.stats()),
        None => SolveResult::no(table.stats()),
    })
}

/// Is `g` k-contractible to a path?
pub fn solve_path(g: &Graph, k: usize) -> Result<SolveResult> {
    solve_bounded(g, k, 1)
}
