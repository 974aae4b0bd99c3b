//! Enumeration of r-slabs: ordered partitions `<A_1, .., A_r>` of a connected
//! set whose parts chain together like the cells of one grid column.
//!
//! The engine is a bounded branching search. Starting from a seed partition it
//! repeatedly picks a free neighbor of the current parts and either excludes it
//! (charging the outside budget) or puts it into one of the at most three parts
//! it may legally join.

use std::collections::BTreeSet;

use crate::error::{invalid, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// Ordered r-partition `<A_1, .., A_r>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RSlab {
    parts: Vec<VertexSet>,
}

impl RSlab {
    pub fn new(parts: Vec<VertexSet>) -> Self {
        RSlab { parts }
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }

    /// Part `i`, 1-based.
    pub fn part(&self, i: usize) -> &VertexSet {
        &self.parts[i - 1]
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(VertexSet::len).sum()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.parts.iter().flat_map(|p| p.iter()).collect()
    }
}

/// Seed `<Q_1, .., Q_r>`; parts may be empty but must be pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedPartition {
    parts: Vec<VertexSet>,
}

impl SeedPartition {
    pub fn new(parts: Vec<VertexSet>) -> Result<Self> {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if !parts[i].is_disjoint(&parts[j]) {
                    return invalid(format!("seed parts {} and {} overlap", i + 1, j + 1));
                }
            }
        }
        Ok(SeedPartition { parts })
    }

    /// `{v}` in part `i` (1-based), every other part empty.
    pub fn single(r: usize, i: usize, v: Vertex) -> Self {
        let mut parts = vec![VertexSet::new(); r];
        parts[i - 1] = VertexSet::singleton(v);
        SeedPartition { parts }
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(VertexSet::len).sum()
    }
}

/// Full r-slab check: parts nonempty, disjoint and connected; parts adjacent
/// exactly when consecutive; the outside neighborhoods `B_i = N(A_i) \ A`
/// pairwise disjoint and adjacent only when `|i - j| <= 1`.
pub fn is_r_slab(g: &Graph, parts: &[VertexSet]) -> bool {
    let r = parts.len();
    if r == 0 {
        return false;
    }
    let n = g.n();
    let mut label = vec![0usize; n + 1];
    for (i, p) in parts.iter().enumerate() {
        if p.is_empty() {
            return false;
        }
        for v in p.iter() {
            if v == 0 || v as usize > n || label[v as usize] != 0 {
                return false;
            }
            label[v as usize] = i + 1;
        }
    }
    if !parts.iter().all(|p| g.is_connected_set(p)) {
        return false;
    }
    let mut adjacent = vec![false; (r + 1) * (r + 1)];
    let mut owner = vec![0usize; n + 1];
    for (i, p) in parts.iter().enumerate() {
        for u in p.iter() {
            for &w in g.neighbors(u) {
                let lw = label[w as usize];
                if lw != 0 {
                    adjacent[(i + 1) * (r + 1) + lw] = true;
                } else if owner[w as usize] == 0 {
                    owner[w as usize] = i + 1;
                } else if owner[w as usize] != i + 1 {
                    return false;
                }
            }
        }
    }
    for i in 1..=r {
        for j in i + 1..=r {
            if adjacent[i * (r + 1) + j] != (j == i + 1) {
                return false;
            }
        }
    }
    for w in 1..=n {
        let i = owner[w];
        if i == 0 {
            continue;
        }
        for &x in g.neighbors(w as Vertex) {
            let j = owner[x as usize];
            if j != 0 && i.abs_diff(j) > 1 {
                return false;
            }
        }
    }
    true
}

/// Counters gathered by the branching search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SlabStats {
    pub nodes: u64,
    pub leaves: u64,
    pub emitted: u64,
}

const FREE: u16 = 0;
const EXCLUDED: u16 = u16::MAX;
const BLOCKED: u16 = u16::MAX - 1;

/// Bounded search for slabs extending a seed.
///
/// * `alpha` bounds `|A|`.
/// * `beta` bounds `|N(A) \ blocked|`.
/// * `combined`, when set, bounds the sum of the two.
///
/// Blocked vertices may never join `A`.
pub(crate) struct SlabSearch<'g> {
    g: &'g Graph,
    r: usize,
    label: Vec<u16>,
    q_size: usize,
    excluded: usize,
    alpha: usize,
    beta: usize,
    combined: usize,
    /// Vertices below this may not join part 1.
    part1_floor: Vertex,
    out: BTreeSet<RSlab>,
    pub stats: SlabStats,
}

impl<'g> SlabSearch<'g> {
    pub(crate) fn new(g: &'g Graph, r: usize, alpha: usize, beta: usize, combined: Option<usize>) -> Self {
        assert!(r >= 1 && r < BLOCKED as usize, "unsupported number of parts {r}");
        SlabSearch {
            g,
            r,
            label: vec![FREE; g.n() + 1],
            q_size: 0,
            excluded: 0,
            alpha,
            beta,
            combined: combined.unwrap_or(usize::MAX),
            part1_floor: 0,
            out: BTreeSet::new(),
            stats: SlabStats::default(),
        }
    }

    pub(crate) fn block(&mut self, set: &VertexSet) {
        for v in set.iter() {
            self.label[v as usize] = BLOCKED;
        }
    }

    /// Runs the search from one seed. Results accumulate across calls.
    pub(crate) fn run(&mut self, seed: &[VertexSet]) {
        debug_assert_eq!(seed.len(), self.r);
        let mut placed = Vec::new();
        let mut ok = true;
        for (i, part) in seed.iter().enumerate() {
            for v in part.iter() {
                if self.label[v as usize] != FREE {
                    ok = false;
                    break;
                }
                self.label[v as usize] = (i + 1) as u16;
                placed.push(v);
            }
        }
        self.q_size = placed.len();
        if ok && self.q_size > 0 && self.seed_valid(&placed) {
            self.search();
        }
        for v in placed {
            self.label[v as usize] = FREE;
        }
        self.q_size = 0;
    }

    /// Runs from the seed `{v}` in part 1, only finding slabs whose part 1
    /// has `v` as its smallest vertex.
    pub(crate) fn run_from_min(&mut self, v: Vertex) {
        self.part1_floor = v;
        self.run(SeedPartition::single(self.r, 1, v).parts());
        self.part1_floor = 0;
    }

    pub(crate) fn into_results(self) -> (Vec<RSlab>, SlabStats) {
        (self.out.into_iter().collect(), self.stats)
    }

    fn part_of(&self, v: Vertex) -> Option<usize> {
        let l = self.label[v as usize];
        (l != FREE && l != EXCLUDED && l != BLOCKED).then_some(l as usize)
    }

    fn seed_valid(&self, placed: &[Vertex]) -> bool {
        placed.iter().all(|&v| {
            let p = self.part_of(v).unwrap();
            self.g.neighbors(v).iter().all(|&w| self.part_of(w).is_none_or(|pw| pw.abs_diff(p) <= 1))
        })
    }

    fn measure(&self) -> usize {
        (self.alpha - self.q_size.min(self.alpha)) + (self.beta - self.excluded.min(self.beta))
    }

    /// Smallest and largest part index adjacent to `v`.
    fn part_range(&self, v: Vertex) -> Option<(usize, usize)> {
        let mut range: Option<(usize, usize)> = None;
        for &w in self.g.neighbors(v) {
            if let Some(p) = self.part_of(w) {
                range = Some(match range {
                    None => (p, p),
                    Some((lo, hi)) => (lo.min(p), hi.max(p)),
                });
            }
        }
        range
    }

    fn can_place(&self, v: Vertex, p: usize) -> bool {
        if p == 0 || p > self.r || self.q_size >= self.alpha || self.q_size + self.excluded >= self.combined {
            return false;
        }
        if p == 1 && v < self.part1_floor {
            return false;
        }
        for &w in self.g.neighbors(v) {
            match self.label[w as usize] {
                FREE => {}
                EXCLUDED | BLOCKED => {
                    // w would sit in B_p; it must not already border another part.
                    if self.g.neighbors(w).iter().any(|&x| self.part_of(x).is_some_and(|px| px != p)) {
                        return false;
                    }
                }
                pw => {
                    if (pw as usize).abs_diff(p) > 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn frontier(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for v in self.g.vertices() {
            if self.label[v as usize] == FREE && self.g.neighbors(v).iter().any(|&w| self.part_of(w).is_some()) {
                out.push(v);
            }
        }
        out
    }

    /// False when some part can no longer become connected, or adjacent to a
    /// neighboring part, or there are more empty parts than vertices left to place.
    fn still_feasible(&self) -> bool {
        let room = (self.alpha - self.q_size.min(self.alpha))
            .min(self.combined - (self.q_size + self.excluded).min(self.combined));
        let mut members = vec![Vec::new(); self.r + 1];
        for v in self.g.vertices() {
            if let Some(p) = self.part_of(v) {
                members[p].push(v);
            }
        }
        if members[1..].iter().filter(|m| m.is_empty()).count() > room {
            return false;
        }
        let open = |v: &Vertex| self.g.neighbors(*v).iter().any(|&w| self.label[w as usize] == FREE);
        let mut closed = vec![false; self.r + 2];
        for p in 1..=self.r {
            let part = &members[p];
            closed[p] = !part.is_empty() && !part.iter().any(open);
            if part.len() < 2 {
                continue;
            }
            // Components of the part; each must still be able to grow unless it is the whole part.
            let mut seen = vec![false; part.len()];
            for start in 0..part.len() {
                if seen[start] {
                    continue;
                }
                seen[start] = true;
                let mut stack = vec![start];
                let (mut size, mut grows) = (0, false);
                while let Some(i) = stack.pop() {
                    size += 1;
                    grows |= open(&part[i]);
                    for &w in self.g.neighbors(part[i]) {
                        if self.label[w as usize] == p as u16 {
                            let j = part.binary_search(&w).unwrap();
                            if !seen[j] {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
                if size < part.len() && !grows {
                    return false;
                }
            }
        }
        for p in 1..=self.r {
            if !closed[p] {
                continue;
            }
            for nb in [p.wrapping_sub(1), p + 1] {
                if nb == 0 || nb > self.r {
                    continue;
                }
                let touches = members[p]
                    .iter()
                    .any(|&v| self.g.neighbors(v).iter().any(|&w| self.label[w as usize] == nb as u16));
                if !touches {
                    return false;
                }
            }
        }
        true
    }

    fn search(&mut self) {
        self.stats.nodes += 1;
        if !self.still_feasible() {
            return;
        }
        let frontier = self.frontier();
        if frontier.is_empty() {
            self.leaf();
            return;
        }
        // Each frontier vertex ends up in A or in N(A), costing one unit either way.
        let spare = (self.alpha + self.beta).saturating_sub(self.q_size + self.excluded);
        let spare = spare.min(self.combined.saturating_sub(self.q_size + self.excluded));
        if frontier.len() > spare {
            return;
        }
        let mut pivot = None;
        for &v in &frontier {
            let (lo, hi) = self.part_range(v).unwrap();
            match hi - lo {
                0 | 1 => {
                    if pivot.is_none() {
                        pivot = Some((v, lo, hi));
                    }
                }
                2 => {
                    // Excluding v would put it in two outside neighborhoods.
                    self.branch_place(v, lo + 1);
                    return;
                }
                _ => return,
            }
        }
        let (v, i, hi) = pivot.unwrap();
        if hi == i && self.excluded < self.beta && self.q_size + self.excluded < self.combined {
            self.branch_exclude(v);
        }
        for p in [i.wrapping_sub(1), i, i + 1] {
            self.branch_place(v, p);
        }
    }

    fn branch_place(&mut self, v: Vertex, p: usize) {
        if !self.can_place(v, p) {
            return;
        }
        let before = self.measure();
        self.label[v as usize] = p as u16;
        self.q_size += 1;
        debug_assert!(self.measure() < before);
        self.search();
        self.q_size -= 1;
        self.label[v as usize] = FREE;
    }

    fn branch_exclude(&mut self, v: Vertex) {
        let before = self.measure();
        self.label[v as usize] = EXCLUDED;
        self.excluded += 1;
        debug_assert!(self.measure() < before);
        self.search();
        self.excluded -= 1;
        self.label[v as usize] = FREE;
    }

    fn leaf(&mut self) {
        self.stats.leaves += 1;
        // Every excluded vertex is in N(A), so this is |A| and |N(A) \ blocked|.
        if self.q_size > self.alpha || self.excluded > self.beta || self.q_size + self.excluded > self.combined {
            return;
        }
        let mut parts = vec![Vec::new(); self.r];
        for v in self.g.vertices() {
            if let Some(p) = self.part_of(v) {
                parts[p - 1].push(v);
            }
        }
        let parts: Vec<VertexSet> = parts.into_iter().map(VertexSet::from_sorted).collect();
        if is_r_slab(self.g, &parts) {
            self.stats.emitted += 1;
            self.out.insert(RSlab::new(parts));
        }
    }
}

/// All r-slabs `<A_1..A_r>` with `Q_i ⊆ A_i`, `|A| <= alpha` and `|N(A)| <= beta`.
pub fn enumerate_seeded(g: &Graph, seed: &SeedPartition, alpha: usize, beta: usize) -> Vec<RSlab> {
    if seed.r() == 0 || seed.size() == 0 {
        return Vec::new();
    }
    let mut search = SlabSearch::new(g, seed.r(), alpha, beta, None);
    search.run(seed.parts());
    search.into_results().0
}

/// All r-slabs with `|A| <= alpha` and `|N(A)| <= beta`.
pub fn enumerate_all(g: &Graph, r: usize, alpha: usize, beta: usize) -> Vec<RSlab> {
    enumerate_all_with_stats(g, r, alpha, beta, None).0
}

pub(crate) fn enumerate_all_with_stats(
    g: &Graph,
    r: usize,
    alpha: usize,
    beta: usize,
    combined: Option<usize>,
) -> (Vec<RSlab>, SlabStats) {
    if r == 0 || r > g.n() {
        return (Vec::new(), SlabStats::default());
    }
    let mut search = SlabSearch::new(g, r, alpha, beta, combined);
    // Every slab is found once, from the smallest vertex of its A_1.
    for v in g.vertices() {
        search.run_from_min(v);
    }
    search.into_results()
}

/// Connected sets `A ⊇ q` with `|A| <= alpha` and `|N(A)| <= beta`.
pub fn enumerate_connected_sets(g: &Graph, q: &VertexSet, alpha: usize, beta: usize) -> Vec<VertexSet> {
    let seed = SeedPartition { parts: vec![q.clone()] };
    enumerate_seeded(g, &seed, alpha, beta).into_iter().map(|s| s.parts.into_iter().next().unwrap()).collect()
}
