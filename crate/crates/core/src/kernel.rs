//! Polynomial kernel: degree rules, tall grid separators and row contraction.

use std::collections::{HashMap, VecDeque};

use crate::error::{invalid, Result};
use crate::gc::find_row_separator_grid;
use crate::graph::{Graph, Vertex, VertexSet};

/// `k_o = (4k + 8)(k + 1) + 1`.
pub fn k_o(k: usize) -> usize {
    (4 * k + 8) * (k + 1) + 1
}

/// Largest kernel the reduction can return: `k_o^2 + k + 1`.
pub fn kernel_vertex_bound(k: usize) -> usize {
    k_o(k) * k_o(k) + k + 1
}

/// Reduction Rule 2. `false` means the instance is a NO-instance.
pub fn apply_rr2(g: &Graph, k: usize) -> bool {
    let mut high = 0;
    for v in g.vertices() {
        let d = g.degree(v);
        if d > k + 5 {
            return false;
        }
        if d >= 6 {
            high += 1;
        }
    }
    high <= 6 * k
}

/// An induced `p x t` grid (`cells[i][j]` is row `i`, column `j`, 0-based)
/// whose removal leaves exactly two large components, one bordering the first
/// row and the other the last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSeparator {
    pub cells: Vec<Vec<Vertex>>,
    pub p: usize,
    pub t: usize,
}

impl GridSeparator {
    pub fn vertex_set(&self) -> VertexSet {
        self.cells.iter().flatten().copied().collect()
    }
}

pub fn check_grid_separator(g: &Graph, k: usize, sep: &GridSeparator) -> Result<()> {
    let (p, t) = (sep.p, sep.t);
    if p == 0 || t == 0 || sep.cells.len() != p || sep.cells.iter().any(|row| row.len() != t) {
        return invalid("separator cells must form a p x t array");
    }
    let mut pos = HashMap::new();
    for (i, row) in sep.cells.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v == 0 || v as usize > g.n() || pos.insert(v, (i, j)).is_some() {
                return invalid("separator cells must be distinct vertices of the graph");
            }
        }
    }
    for (&v, &(i, j)) in &pos {
        let seen = g.neighbors(v).iter().filter_map(|w| pos.get(w)).count();
        let expected = usize::from(i > 0) + usize::from(i + 1 < p) + usize::from(j > 0) + usize::from(j + 1 < t);
        let unit = g.neighbors(v).iter().filter_map(|w| pos.get(w)).all(|&(a, b)| a.abs_diff(i) + b.abs_diff(j) == 1);
        if seen != expected || !unit {
            return invalid("separator cells do not induce the p x t grid");
        }
    }
    let comps = g.components(&sep.vertex_set());
    if comps.len() != 2 {
        return invalid(format!("removing the separator leaves {} components, not 2", comps.len()));
    }
    if comps.iter().any(|c| c.len() < k + 1) {
        return invalid("a side component has at most k vertices");
    }
    let first: VertexSet = sep.cells[0].iter().copied().collect();
    let last: VertexSet = sep.cells[p - 1].iter().copied().collect();
    let (n0, n1) = (g.neighborhood(&comps[0]), g.neighborhood(&comps[1]));
    if !((n0 == first && n1 == last) || (n0 == last && n1 == first)) {
        return invalid("side components must border exactly the first and last rows");
    }
    Ok(())
}

/// Unique shortest paths of exactly `len` edges starting at `u`.
fn unique_paths_from(g: &Graph, u: Vertex, len: usize) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let mut dist = vec![usize::MAX; n + 1];
    let mut count = vec![0u8; n + 1];
    let mut parent = vec![0 as Vertex; n + 1];
    dist[u as usize] = 0;
    count[u as usize] = 1;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x as usize];
        if dx == len {
            continue;
        }
        for &y in g.neighbors(x) {
            let y = y as usize;
            if dist[y] == usize::MAX {
                dist[y] = dx + 1;
                parent[y] = x;
                queue.push_back(y as Vertex);
            }
            if dist[y] == dx + 1 {
                count[y] = count[y].saturating_add(count[x as usize]).min(2);
            }
        }
    }
    let mut out = Vec::new();
    for v in 1..=n {
        if dist[v] == len && count[v] == 1 {
            let mut path = vec![v as Vertex];
            while *path.last().unwrap() != u {
                path.push(parent[*path.last().unwrap() as usize]);
            }
            path.reverse();
            out.push(path);
        }
    }
    out
}

/// Widest `p x t` grid separator with `t >= t_min`, trying every anchor pair
/// joined by a unique shortest path. Ties go to the smallest anchors.
pub fn find_grid_separator(g: &Graph, k: usize, p: usize, t_min: usize) -> Option<GridSeparator> {
    if p < 2 || !p.is_multiple_of(2) {
        return None;
    }
    let mut best: Option<GridSeparator> = None;
    for u in g.vertices() {
        for path in unique_paths_from(g, u, p - 1) {
            let Some(sep) = separator_from_column(g, k, &path) else { continue };
            if sep.t >= t_min && best.as_ref().is_none_or(|b| sep.t > b.t) {
                best = Some(sep);
            }
        }
    }
    best
}

fn separator_from_column(g: &Graph, k: usize, column: &[Vertex]) -> Option<GridSeparator> {
    let mut cells = Vec::with_capacity(column.len());
    for pair in column.chunks(2) {
        let strip = find_row_separator_grid(g, pair[0], pair[1])?;
        if cells.first().is_some_and(|r: &Vec<Vertex>| r.len() != strip.width()) {
            return None;
        }
        cells.push(strip.top);
        cells.push(strip.bottom);
    }
    let sep = GridSeparator { p: cells.len(), t: cells[0].len(), cells };
    check_grid_separator(g, k, &sep).is_ok().then_some(sep)
}

/// Reduction Rule 3: contracts the middle rows `p/2` and `p/2 + 1` of the
/// separator (1-based) into one.
pub fn apply_rr3(g: &Graph, k: usize, sep: &GridSeparator) -> Result<Graph> {
    if sep.p < 4 {
        return invalid(format!("a {}-row separator has no two consecutive internal rows", sep.p));
    }
    check_grid_separator(g, k, sep)?;
    let a = sep.p / 2 - 1;
    let f: Vec<(Vertex, Vertex)> = sep.cells[a].iter().copied().zip(sep.cells[a + 1].iter().copied()).collect();
    Ok(g.contract_edges(&f)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelOutcome {
    NoInstance,
    Kernel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub outcome: KernelOutcome,
    pub kernel_graph: Option<Graph>,
    pub k: usize,
    pub rr3_applications: usize,
    pub k_o: usize,
}

impl KernelReport {
    fn no(k: usize, rr3_applications: usize) -> Self {
        KernelReport { outcome: KernelOutcome::NoInstance, kernel_graph: None, k, rr3_applications, k_o: k_o(k) }
    }

    pub fn bound(&self) -> usize {
        kernel_vertex_bound(self.k)
    }
}

/// Shrinks `(g, k)` to an equivalent instance on at most
/// [`kernel_vertex_bound`] vertices, or decides it is a NO-instance.
pub fn kernelize(g: &Graph, k: usize) -> KernelReport {
    if !g.is_connected() {
        return KernelReport::no(k, 0);
    }
    if k == 0 && !g.is_grid() {
        return KernelReport::no(k, 0);
    }
    let bound = kernel_vertex_bound(k);
    let p = 4 * k + 6;
    let mut cur = g.clone();
    let mut rr3 = 0;
    loop {
        if !apply_rr2(&cur, k) {
            return KernelReport::no(k, rr3);
        }
        if cur.n() <= bound {
            return KernelReport {
                outcome: KernelOutcome::Kernel,
                kernel_graph: Some(cur),
                k,
                rr3_applications: rr3,
                k_o: k_o(k),
            };
        }
        // Big yes-instances always contain such a separator.
        let Some(sep) = find_grid_separator(&cur, k, p, 1) else {
            return KernelReport::no(k, rr3);
        };
        cur = apply_rr3(&cur, k, &sep).expect("separator was just checked");
        rr3 += 1;
    }
}
