//! Simple undirected graphs on dense vertex ids `1..=n`.
//!
//! Graphs are immutable values. Every operation that changes the vertex set
//! returns a fresh graph together with the old-to-new vertex map.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{invalid, Error, Result};

pub type Vertex = u32;

/// Sorted, duplicate-free set of vertices. The sorted sequence doubles as the
/// canonical encoding, so derived `Eq`/`Ord`/`Hash` are canonical too.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(vec![v])
    }

    /// Wraps a vector that the caller promises is strictly increasing.
    pub(crate) fn from_sorted(v: Vec<Vertex>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            if a < b {
                out.push(a);
                i += 1;
            } else if b < a {
                out.push(b);
                j += 1;
            } else {
                out.push(a);
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VertexSet(out)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(v: Vec<Vertex>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(v: [Vertex; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// Assignment of every vertex to a cell `(row, col)` of an `rows x cols` grid.
///
/// `assign[v - 1]` is the cell of vertex `v`, both coordinates 1-based. Nothing
/// is enforced on construction; [`crate::oracle::verify_witness`] checks it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WitnessMap {
    pub rows: usize,
    pub cols: usize,
    pub assign: Vec<(usize, usize)>,
}

impl WitnessMap {
    pub fn new(rows: usize, cols: usize, assign: Vec<(usize, usize)>) -> Self {
        WitnessMap { rows, cols, assign }
    }

    pub fn cell_of(&self, v: Vertex) -> (usize, usize) {
        self.assign[v as usize - 1]
    }

    /// Number of contractions this witness stands for on a graph with `n` vertices.
    pub fn cost(&self, n: usize) -> isize {
        n as isize - (self.rows * self.cols) as isize
    }

    /// Vertices of each cell, row-major. Out-of-range cells are skipped.
    pub fn cells(&self) -> Vec<Vec<Vertex>> {
        let mut cells = vec![Vec::new(); self.rows * self.cols];
        for (idx, &(i, j)) in self.assign.iter().enumerate() {
            if (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j) {
                cells[(i - 1) * self.cols + (j - 1)].push(idx as Vertex + 1);
            }
        }
        cells
    }

    pub fn transpose(&self) -> WitnessMap {
        WitnessMap { rows: self.cols, cols: self.rows, assign: self.assign.iter().map(|&(i, j)| (j, i)).collect() }
    }

    /// The distinct images of this witness under the 8 symmetries of the grid.
    pub fn symmetries(&self) -> Vec<WitnessMap> {
        let (r, q) = (self.rows, self.cols);
        let maps: [&dyn Fn(usize, usize) -> (usize, usize); 8] = [
            &|i, j| (i, j),
            &|i, j| (i, q + 1 - j),
            &|i, j| (r + 1 - i, j),
            &|i, j| (r + 1 - i, q + 1 - j),
            &|i, j| (j, i),
            &|i, j| (q + 1 - j, i),
            &|i, j| (j, r + 1 - i),
            &|i, j| (q + 1 - j, r + 1 - i),
        ];
        let mut out: Vec<WitnessMap> = Vec::with_capacity(8);
        for (idx, f) in maps.iter().enumerate() {
            let (rows, cols) = if idx < 4 { (r, q) } else { (q, r) };
            let w = WitnessMap { rows, cols, assign: self.assign.iter().map(|&(i, j)| f(i, j)).collect() };
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    /// Pulls the witness back along a vertex map `map[old] = new`, e.g. the map
    /// returned by [`Graph::contract_edges`].
    pub fn pull_back(&self, map: &[Vertex]) -> WitnessMap {
        WitnessMap { rows: self.rows, cols: self.cols, assign: map[1..].iter().map(|&nv| self.cell_of(nv)).collect() }
    }
}

/// Four pairwise distinct vertices meant to land in the grid corners
/// `[1,1]`, `[1,q]`, `[r,q]`, `[r,1]` in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corners(pub [Vertex; 4]);

impl Corners {
    pub fn new(x1: Vertex, x2: Vertex, x3: Vertex, x4: Vertex) -> Result<Self> {
        let x = [x1, x2, x3, x4];
        for a in 0..4 {
            for b in a + 1..4 {
                if x[a] == x[b] {
                    return invalid(format!("corner vertices must be distinct, got {x:?}"));
                }
            }
        }
        Ok(Corners(x))
    }

    pub fn get(&self, i: usize) -> Vertex {
        self.0[i - 1]
    }

    pub fn map(&self, map: &[Vertex]) -> Corners {
        Corners(self.0.map(|v| map[v as usize]))
    }
}

/// Immutable simple undirected graph. `adj[v]` is the sorted neighbor list of
/// `v`; `adj[0]` is always empty so vertex ids index directly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges().collect::<Vec<_>>())
    }
}

impl Graph {
    /// Builds a graph from an edge list. Repeated pairs are merged.
    pub fn from_edge_list(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n + 1];
        for &(u, v) in edges {
            for w in [u, v] {
                if w == 0 || w as usize > n {
                    return Err(Error::OutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut m2 = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m2 += list.len();
        }
        Ok(Graph { adj, m: m2 / 2 })
    }

    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n + 1], m: 0 }
    }

    pub fn n(&self) -> usize {
        self.adj.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n() as Vertex
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet(self.vertices().collect())
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| self.adj[u as usize].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_vec(&self) -> Vec<(Vertex, Vertex)> {
        self.edges().collect()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Quotient graph by a labelling `label[v]` in `1..=c` (index 0 ignored).
    /// Labels must be dense. Each label class becomes one vertex.
    pub fn quotient(&self, label: &[Vertex], c: usize) -> Graph {
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            let (a, b) = (label[u as usize], label[v as usize]);
            if a != b {
                edges.push((a, b));
            }
        }
        Graph::from_edge_list(c, &edges).expect("labels are in range")
    }

    /// Contracts every edge of `f`. Returns the contracted graph and `map`
    /// with `map[old] = new` (`map[0]` unused). New ids follow the order of
    /// the smallest old vertex in each class.
    pub fn contract_edges(&self, f: &[(Vertex, Vertex)]) -> Result<(Graph, Vec<Vertex>)> {
        let n = self.n();
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in f {
            if u == 0 || v == 0 || u as usize > n || v as usize > n || !self.has_edge(u, v) {
                return Err(Error::NotAnEdge(u, v));
            }
            let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut map = vec![0 as Vertex; n + 1];
        let mut next = 0;
        for v in 1..=n {
            let root = find(&mut parent, v);
            if map[root] == 0 {
                next += 1;
                map[root] = next;
            }
            map[v] = map[root];
        }
        Ok((self.quotient(&map, next as usize), map))
    }

    /// Induced subgraph on `set`, renumbered densely in increasing order.
    /// Returns the subgraph and the list of original ids (`ids[new - 1] = old`).
    pub fn induced(&self, set: &VertexSet) -> (Graph, Vec<Vertex>) {
        let mut index = vec![0 as Vertex; self.n() + 1];
        for (i, v) in set.iter().enumerate() {
            index[v as usize] = i as Vertex + 1;
        }
        let mut edges = Vec::new();
        for u in set.iter() {
            for &v in self.neighbors(u) {
                if v > u && index[v as usize] != 0 {
                    edges.push((index[u as usize], index[v as usize]));
                }
            }
        }
        let g = Graph::from_edge_list(set.len(), &edges).expect("renumbered ids are in range");
        (g, set.as_slice().to_vec())
    }

    /// Components of the subgraph induced by vertices with `allowed[v]`,
    /// ordered by smallest member.
    pub(crate) fn components_masked(&self, allowed: &[bool]) -> Vec<VertexSet> {
        let mut seen = vec![false; self.n() + 1];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in self.vertices() {
            if !allowed[s as usize] || seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in self.neighbors(u) {
                    if allowed[w as usize] && !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(VertexSet(comp));
        }
        out
    }

    /// Connected components of `G - excluded`.
    pub fn components(&self, excluded: &VertexSet) -> Vec<VertexSet> {
        let mut allowed = vec![true; self.n() + 1];
        allowed[0] = false;
        for v in excluded.iter() {
            allowed[v as usize] = false;
        }
        self.components_masked(&allowed)
    }

    /// Connected components of `G[set]`.
    pub fn components_within(&self, set: &VertexSet) -> Vec<VertexSet> {
        let mut allowed = vec![false; self.n() + 1];
        for v in set.iter() {
            allowed[v as usize] = true;
        }
        self.components_masked(&allowed)
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components(&VertexSet::new()).len() == 1
    }

    /// Whether `G[set]` is connected. The empty set is not.
    pub fn is_connected_set(&self, set: &VertexSet) -> bool {
        let Some(s) = set.first() else { return false };
        let mut seen = vec![false; self.n() + 1];
        let mut inside = vec![false; self.n() + 1];
        for v in set.iter() {
            inside[v as usize] = true;
        }
        seen[s as usize] = true;
        let mut stack = vec![s];
        let mut count = 0;
        while let Some(u) = stack.pop() {
            count += 1;
            for &w in self.neighbors(u) {
                if inside[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        count == set.len()
    }

    /// `N(S)`: vertices outside `S` with a neighbor in `S`.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut mark = vec![false; self.n() + 1];
        for v in set.iter() {
            mark[v as usize] = true;
        }
        let mut out = Vec::new();
        for v in set.iter() {
            for &w in self.neighbors(v) {
                if !mark[w as usize] {
                    mark[w as usize] = true;
                    out.push(w);
                }
            }
        }
        out.into()
    }

    /// Boundary of `S`: members with a neighbor outside `S`.
    pub fn boundary(&self, set: &VertexSet) -> VertexSet {
        VertexSet(set.iter().filter(|&v| self.neighbors(v).iter().any(|&w| !set.contains(w))).collect())
    }

    pub fn sets_adjacent(&self, a: &VertexSet, b: &VertexSet) -> bool {
        a.iter().any(|u| self.neighbors(u).iter().any(|&w| b.contains(w)))
    }

    /// BFS distances from `s`; `None` for unreachable vertices.
    pub fn distances(&self, s: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n() + 1];
        dist[s as usize] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap();
            for &w in self.neighbors(u) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Largest distance between two vertices, `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in self.vertices() {
            for d in self.distances(v).into_iter().skip(1) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// The shortest `u`-`v` path if it is the only shortest path.
    pub fn unique_shortest_path(&self, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
        let n = self.n();
        let mut dist = vec![usize::MAX; n + 1];
        // Path counts saturate at 2; only "exactly one" matters.
        let mut count = vec![0u8; n + 1];
        dist[u as usize] = 0;
        count[u as usize] = 1;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &w in self.neighbors(x) {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[x as usize] + 1;
                    queue.push_back(w as Vertex);
                }
                if dist[w] == dist[x as usize] + 1 {
                    count[w] = (count[w] + count[x as usize]).min(2);
                }
            }
        }
        if dist[v as usize] == usize::MAX || count[v as usize] != 1 {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = *self
                .neighbors(cur)
                .iter()
                .find(|&&w| dist[w as usize] + 1 == dist[cur as usize])
                .expect("a predecessor exists on a shortest path");
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Grid with `r` rows and `q` columns; vertex `(i, j)` is `(i-1)*q + j`.
    pub fn grid(r: usize, q: usize) -> Result<Graph> {
        if r == 0 || q == 0 {
            return invalid(format!("grid dimensions must be positive, got {r}x{q}"));
        }
        let id = |i: usize, j: usize| ((i - 1) * q + j) as Vertex;
        let mut edges = Vec::new();
        for i in 1..=r {
            for j in 1..=q {
                if j < q {
                    edges.push((id(i, j), id(i, j + 1)));
                }
                if i < r {
                    edges.push((id(i, j), id(i + 1, j)));
                }
            }
        }
        Graph::from_edge_list(r * q, &edges)
    }

    pub fn path(n: usize) -> Result<Graph> {
        Graph::grid(1, n)
    }

    pub fn is_grid(&self) -> bool {
        self.recognize_grid().is_some()
    }

    /// Grid coordinates if the graph is isomorphic to an `r x q` grid
    /// (paths included). Normalized to `r <= q`; among the valid coordinate
    /// systems the lexicographically smallest assignment is returned.
    pub fn recognize_grid(&self) -> Option<WitnessMap> {
        let n = self.n();
        if n == 0 || !self.is_connected() {
            return None;
        }
        if n == 1 {
            return Some(WitnessMap::new(1, 1, vec![(1, 1)]));
        }
        if self.m == n - 1 && self.max_degree() <= 2 {
            return self.path_coordinates();
        }
        let corners: Vec<Vertex> = self.vertices().filter(|&v| self.degree(v) == 2).collect();
        if corners.len() != 4 || self.vertices().any(|v| !(2..=4).contains(&self.degree(v))) {
            return None;
        }
        let dists: Vec<Vec<Option<usize>>> = corners.iter().map(|&c| self.distances(c)).collect();
        let mut best: Option<WitnessMap> = None;
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                let q = dists[a][corners[b] as usize]? + 1;
                if q < 2 || !n.is_multiple_of(q) || n / q < 2 || n / q > q {
                    continue;
                }
                let r = n / q;
                if self.m != 2 * r * q - r - q {
                    continue;
                }
                if let Some(w) = self.coordinates_from(&dists[a], &dists[b], r, q) {
                    if best.as_ref().is_none_or(|cur| w.assign < cur.assign) {
                        best = Some(w);
                    }
                }
            }
        }
        best
    }

    fn coordinates_from(&self, d1: &[Option<usize>], d2: &[Option<usize>], r: usize, q: usize) -> Option<WitnessMap> {
        let n = self.n();
        let mut used = vec![false; n];
        let mut assign = Vec::with_capacity(n);
        for v in 1..=n {
            let (a, b) = (d1[v]?, d2[v]?);
            let s = (a + b).checked_sub(q - 1)?;
            if s % 2 != 0 {
                return None;
            }
            let i = s / 2 + 1;
            let t = (a + q - 1).checked_sub(b)?;
            let j = t / 2 + 1;
            if i > r || j > q {
                return None;
            }
            let slot = (i - 1) * q + (j - 1);
            if used[slot] {
                return None;
            }
            used[slot] = true;
            assign.push((i, j));
        }
        for (u, v) in self.edges() {
            let (p, s) = (assign[u as usize - 1], assign[v as usize - 1]);
            if p.0.abs_diff(s.0) + p.1.abs_diff(s.1) != 1 {
                return None;
            }
        }
        Some(WitnessMap::new(r, q, assign))
    }

    fn path_coordinates(&self) -> Option<WitnessMap> {
        let n = self.n();
        let ends: Vec<Vertex> = self.vertices().filter(|&v| self.degree(v) == 1).collect();
        if ends.len() != 2 {
            return None;
        }
        let mut best: Option<WitnessMap> = None;
        for &start in &ends {
            let mut assign = vec![(0, 0); n];
            let (mut prev, mut cur) = (0, start);
            for j in 1..=n {
                assign[cur as usize - 1] = (1, j);
                let next = self.neighbors(cur).iter().copied().find(|&w| w != prev);
                prev = cur;
                match next {
                    Some(w) => cur = w,
                    None => break,
                }
            }
            if best.as_ref().is_none_or(|b| assign < b.assign) {
                best = Some(WitnessMap::new(1, n, assign));
            }
        }
        best
    }
}
