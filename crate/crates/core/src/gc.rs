//! Grid contraction with no bound on the number of rows.
//!
//! Small row counts go straight to the bounded DP. For targets with at least
//! `2k + 5` rows and columns the solver guesses the grid shape and its four
//! corner vertices. It then shrinks the instance with Reduction Rule 1,
//! contracting two consecutive separator rows into one, until the row count
//! drops below the threshold. Only then does the annotated DP run.

use std::collections::HashMap;
use std::time::Instant;

use crate::bgc::{solve_annotated, solve_bounded, solve_path, Reduction, SolveResult, SolveStats};
use crate::error::{invalid, Result};
use crate::graph::{Corners, Graph, Vertex, VertexSet};

/// Two induced rows `top`, `bottom` of a `2 x q` grid, listed column by column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowGrid {
    pub top: Vec<Vertex>,
    pub bottom: Vec<Vertex>,
}

impl RowGrid {
    pub fn width(&self) -> usize {
        self.top.len()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.top.iter().chain(&self.bottom).copied().collect()
    }
}

/// How [`find_row_separator_grid_with`] handles several growth candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeparatorMode {
    /// Give up unless the next column is unique at every step.
    #[default]
    Literal,
    /// Explore every candidate sequence and keep the widest valid grid.
    Branching,
}

/// `(C12, Su, Sv, C34)`: a `2 x q` grid whose rows separate the top corners
/// from the bottom ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalDecomposition {
    pub c12: VertexSet,
    pub su: Vec<Vertex>,
    pub sv: Vec<Vertex>,
    pub c34: VertexSet,
}

/// A target shape with corner vertices `x1..x4` at `[1,1], [1,q], [r,q], [r,1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuessInstance {
    pub r: usize,
    pub q: usize,
    pub corners: Corners,
}

/// Candidate next columns `(u2, v2)` after the column `(u, v)`.
fn growth_candidates(g: &Graph, in_s: &[bool], u: Vertex, v: Vertex) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for &u2 in g.neighbors(u) {
        if in_s[u2 as usize] || g.has_edge(v, u2) {
            continue;
        }
        // Keep G[S] an induced grid: the new vertices only see their row predecessor.
        if g.neighbors(u2).iter().any(|&w| in_s[w as usize] && w != u) {
            continue;
        }
        for &v2 in g.neighbors(u2) {
            if v2 == u || in_s[v2 as usize] || !g.has_edge(v, v2) || g.has_edge(u, v2) {
                continue;
            }
            if g.neighbors(v2).iter().any(|&w| in_s[w as usize] && w != v) {
                continue;
            }
            out.push((u2, v2));
        }
    }
    out
}

fn is_separator(g: &Graph, row: &[Vertex]) -> bool {
    g.components(&row.iter().copied().collect()).len() >= 2
}

fn rows_separate(g: &Graph, grid: &RowGrid) -> bool {
    is_separator(g, &grid.top) && is_separator(g, &grid.bottom)
}

/// The `2 x q` induced grid grown from the first column `(u1, v1)` whose rows
/// both separate `g`. Literal mode.
pub fn find_row_separator_grid(g: &Graph, u1: Vertex, v1: Vertex) -> Option<RowGrid> {
    find_row_separator_grid_with(g, u1, v1, SeparatorMode::Literal)
}

pub fn find_row_separator_grid_with(g: &Graph, u1: Vertex, v1: Vertex, mode: SeparatorMode) -> Option<RowGrid> {
    if u1 == v1 || !g.has_edge(u1, v1) {
        return None;
    }
    let mut in_s = vec![false; g.n() + 1];
    in_s[u1 as usize] = true;
    in_s[v1 as usize] = true;
    let mut grid = RowGrid { top: vec![u1], bottom: vec![v1] };
    match mode {
        SeparatorMode::Literal => loop {
            let (u, v) = (*grid.top.last().unwrap(), *grid.bottom.last().unwrap());
            let cands = growth_candidates(g, &in_s, u, v);
            match cands.as_slice() {
                [] => return rows_separate(g, &grid).then_some(grid),
                [(u2, v2)] => {
                    in_s[*u2 as usize] = true;
                    in_s[*v2 as usize] = true;
                    grid.top.push(*u2);
                    grid.bottom.push(*v2);
                }
                _ => return None,
            }
        },
        SeparatorMode::Branching => {
            let mut best = None;
            let mut budget = 100_000usize;
            branch_grow(g, &mut in_s, &mut grid, &mut best, &mut budget);
            best
        }
    }
}

fn branch_grow(g: &Graph, in_s: &mut [bool], grid: &mut RowGrid, best: &mut Option<RowGrid>, budget: &mut usize) {
    if *budget == 0 {
        return;
    }
    *budget -= 1;
    if rows_separate(g, grid) && best.as_ref().is_none_or(|b| grid.width() > b.width()) {
        *best = Some(grid.clone());
    }
    let (u, v) = (*grid.top.last().unwrap(), *grid.bottom.last().unwrap());
    for (u2, v2) in growth_candidates(g, in_s, u, v) {
        in_s[u2 as usize] = true;
        in_s[v2 as usize] = true;
        grid.top.push(u2);
        grid.bottom.push(v2);
        branch_grow(g, in_s, grid, best, budget);
        grid.top.pop();
        grid.bottom.pop();
        in_s[u2 as usize] = false;
        in_s[v2 as usize] = false;
    }
}

/// Checks every defining property of a horizontal decomposition.
pub fn check_decomposition(g: &Graph, d: &HorizontalDecomposition, c: &Corners) -> Result<()> {
    let q = d.su.len();
    if q == 0 || d.sv.len() != q {
        return invalid("decomposition rows must be nonempty and of equal length");
    }
    let rows = RowGrid { top: d.su.clone(), bottom: d.sv.clone() };
    let s = rows.vertex_set();
    if s.len() != 2 * q {
        return invalid("decomposition rows overlap");
    }
    for j in 0..q {
        if !g.has_edge(d.su[j], d.sv[j]) {
            return invalid(format!("rows are not joined in column {}", j + 1));
        }
    }
    for (a, b) in s.iter().flat_map(|a| s.iter().map(move |b| (a, b))).filter(|(a, b)| a < b) {
        let pa = position(&rows, a);
        let pb = position(&rows, b);
        let unit = pa.0.abs_diff(pb.0) + pa.1.abs_diff(pb.1) == 1;
        if g.has_edge(a, b) != unit {
            return invalid("rows do not induce a 2 x q grid");
        }
    }
    let comps = g.components(&s);
    if comps.len() != 2 || !comps.contains(&d.c12) || !comps.contains(&d.c34) {
        return invalid("C12 and C34 must be the two components left by the rows");
    }
    let [x1, x2, x3, x4] = c.0;
    if !(d.c12.contains(x1) && d.c12.contains(x2) && d.c34.contains(x3) && d.c34.contains(x4)) {
        return invalid("corners are on the wrong sides of the decomposition");
    }
    if g.neighborhood(&d.c12) != d.su.iter().copied().collect()
        || g.neighborhood(&d.c34) != d.sv.iter().copied().collect()
    {
        return invalid("C12 must border exactly Su and C34 exactly Sv");
    }
    Ok(())
}

fn position(rows: &RowGrid, v: Vertex) -> (usize, usize) {
    if let Some(j) = rows.top.iter().position(|&x| x == v) {
        (1, j)
    } else {
        (2, rows.bottom.iter().position(|&x| x == v).unwrap())
    }
}

/// Row grids grown from every ordered edge `(u1, v1)`, in edge order.
fn row_grids(g: &Graph, mode: SeparatorMode) -> Vec<RowGrid> {
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        for (u1, v1) in [(a, b), (b, a)] {
            if let Some(grid) = find_row_separator_grid_with(g, u1, v1, mode) {
                out.push(grid);
            }
        }
    }
    out
}

fn decomposition_from(g: &Graph, grid: &RowGrid, c: &Corners) -> Option<HorizontalDecomposition> {
    let comps = g.components(&grid.vertex_set());
    if comps.len() != 2 {
        return None;
    }
    let c12 = comps.iter().find(|comp| comp.contains(c.0[0]))?.clone();
    let c34 = comps.iter().find(|comp| **comp != c12)?.clone();
    let d = HorizontalDecomposition { c12, su: grid.top.clone(), sv: grid.bottom.clone(), c34 };
    check_decomposition(g, &d, c).is_ok().then_some(d)
}

/// First horizontal decomposition found over ordered edges `(u1, v1)`.
pub fn find_horizontal_decomposition(g: &Graph, c: &Corners) -> Option<HorizontalDecomposition> {
    row_grids(g, SeparatorMode::Literal).iter().find_map(|grid| decomposition_from(g, grid, c))
}

/// Same, restricted to rows of exactly `q` vertices.
pub fn find_horizontal_decomposition_of_width(
    g: &Graph,
    c: &Corners,
    q: usize,
    mode: SeparatorMode,
) -> Option<HorizontalDecomposition> {
    row_grids(g, mode).iter().filter(|grid| grid.width() == q).find_map(|grid| decomposition_from(g, grid, c))
}

/// Result of one application of Reduction Rule 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rr1Output {
    pub graph: Graph,
    /// `map[old] = new`.
    pub map: Vec<Vertex>,
    pub k: usize,
    pub r: usize,
    pub q: usize,
    pub corners: Corners,
}

/// Contracts every edge `u_j v_j` between the decomposition rows; the target
/// loses one row.
pub fn apply_rr1(
    g: &Graph,
    d: &HorizontalDecomposition,
    k: usize,
    r: usize,
    q: usize,
    c: Corners,
) -> Result<Rr1Output> {
    check_decomposition(g, d, &c)?;
    if d.su.len() != q {
        return invalid(format!("decomposition has width {} but the target has {q} columns", d.su.len()));
    }
    if r < 2 {
        return invalid("a target with one row cannot lose a row");
    }
    let f: Vec<(Vertex, Vertex)> = d.su.iter().copied().zip(d.sv.iter().copied()).collect();
    let (graph, map) = g.contract_edges(&f)?;
    let corners = c.map(&map);
    Ok(Rr1Output { graph, map, k, r: r - 1, q, corners })
}

fn canonical_images(r: usize, q: usize, x: [Vertex; 4]) -> [(usize, usize, [Vertex; 4]); 8] {
    let [x1, x2, x3, x4] = x;
    [
        (r, q, [x1, x2, x3, x4]),
        (r, q, [x3, x4, x1, x2]),
        (r, q, [x2, x1, x4, x3]),
        (r, q, [x4, x3, x2, x1]),
        (q, r, [x1, x4, x3, x2]),
        (q, r, [x3, x2, x1, x4]),
        (q, r, [x4, x1, x2, x3]),
        (q, r, [x2, x3, x4, x1]),
    ]
}

/// The 8 equivalent forms of a guess under the symmetries of the grid.
pub fn guess_symmetries(g: &GuessInstance) -> Vec<GuessInstance> {
    canonical_images(g.r, g.q, g.corners.0)
        .into_iter()
        .map(|(r, q, x)| GuessInstance { r, q, corners: Corners(x) })
        .collect()
}

fn is_canonical(r: usize, q: usize, x: [Vertex; 4]) -> bool {
    canonical_images(r, q, x).iter().all(|img| (r, q, x) <= *img)
}

/// Shapes `(r, q)` with `r, q >= 2` and `n - k <= rq <= n`, in increasing order.
fn admissible_shapes(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 2..=n / 2 {
        for q in 2..=n / r {
            if r * q + k >= n {
                out.push((r, q));
            }
        }
    }
    out
}

/// Corner tuples of shape `(r, q)` that are canonical under the grid symmetries.
fn canonical_corners(n: usize, r: usize, q: usize) -> impl Iterator<Item = Corners> {
    let n = n as Vertex;
    (1..=n).flat_map(move |x1| {
        (1..=n).flat_map(move |x2| {
            (1..=n).flat_map(move |x3| {
                (1..=n).filter_map(move |x4| {
                    let x = [x1, x2, x3, x4];
                    let distinct = x1 != x2 && x1 != x3 && x1 != x4 && x2 != x3 && x2 != x4 && x3 != x4;
                    (distinct && is_canonical(r, q, x)).then_some(Corners(x))
                })
            })
        })
    })
}

/// All admissible guesses, one per symmetry class, ordered by `r`, `q`, corners.
pub fn enumerate_guesses(g: &Graph, k: usize) -> Vec<GuessInstance> {
    let n = g.n();
    admissible_shapes(n, k)
        .into_iter()
        .filter(|&(r, q)| r <= q)
        .flat_map(|(r, q)| canonical_corners(n, r, q).map(move |corners| GuessInstance { r, q, corners }))
        .collect()
}

/// Knobs for [`solve_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub separator_mode: SeparatorMode,
    /// Row count from which guesses are reduced with Rule 1 instead of being
    /// handed to the bounded DP. Defaults to `2k + 5`.
    pub large_r_threshold: Option<usize>,
}

/// Is `g` k-contractible to some grid (paths included)?
pub fn solve(g: &Graph, k: usize) -> Result<SolveResult> {
    solve_with(g, k, &SolveOptions::default())
}

pub fn solve_with(g: &Graph, k: usize, opts: &SolveOptions) -> Result<SolveResult> {
    let started = Instant::now();
    let mut stats = SolveStats::default();
    let finish = |mut res: SolveResult, mut stats: SolveStats| {
        stats.absorb(&res.stats);
        stats.elapsed = started.elapsed();
        res.stats = stats;
        res
    };
    if !g.is_connected() {
        return Ok(finish(SolveResult::no(SolveStats::default()), stats));
    }
    if let Some(w) = g.recognize_grid() {
        return Ok(finish(SolveResult::yes(w, SolveStats::default()), stats));
    }
    if k == 0 {
        return Ok(finish(SolveResult::no(SolveStats::default()), stats));
    }
    let res = solve_path(g, k)?;
    if res.is_yes() {
        return Ok(finish(res, stats));
    }
    stats.absorb(&res.stats);

    let n = g.n();
    let threshold = opts.large_r_threshold.unwrap_or(2 * k + 5).max(2);
    // A grid with r <= q rows has r * r <= n; taller grids are found transposed.
    let mut r = 2;
    while r < threshold && r * r <= n {
        let res = solve_bounded(g, k, r)?;
        if res.is_yes() {
            return Ok(finish(res, stats));
        }
        stats.absorb(&res.stats);
        r += 1;
    }

    let mut memo = HashMap::new();
    for (r, q) in admissible_shapes(n, k) {
        if r < threshold || q < r {
            continue;
        }
        for corners in canonical_corners(n, r, q) {
            let guess = GuessInstance { r, q, corners };
            if let Some(res) = solve_guess(g, k, &guess, threshold, opts.separator_mode, &mut memo)? {
                return Ok(finish(res, stats));
            }
        }
    }
    Ok(finish(SolveResult::no(SolveStats::default()), stats))
}

/// Row grids per graph, shared across guesses.
type RowGridMemo = HashMap<Graph, Vec<RowGrid>>;

fn solve_guess(
    g: &Graph,
    k: usize,
    guess: &GuessInstance,
    threshold: usize,
    mode: SeparatorMode,
    memo: &mut RowGridMemo,
) -> Result<Option<SolveResult>> {
    let mut cur = g.clone();
    let mut map: Vec<Vertex> = (0..=g.n() as Vertex).collect();
    let mut corners = guess.corners;
    let mut r = guess.r;
    let q = guess.q;
    let mut reduced = false;
    while r >= threshold {
        let grids = memo.entry(cur.clone()).or_insert_with(|| row_grids(&cur, mode));
        let decomposition =
            grids.iter().filter(|grid| grid.width() == q).find_map(|grid| decomposition_from(&cur, grid, &corners));
        let Some(d) = decomposition else {
            if r >= 2 * k + 5 {
                // A yes-instance this tall always has a decomposition.
                return Ok(None);
            }
            break;
        };
        let out = apply_rr1(&cur, &d, k, r, q, corners)?;
        for slot in map.iter_mut().skip(1) {
            *slot = out.map[*slot as usize];
        }
        cur = out.graph;
        corners = out.corners;
        r = out.r;
        reduced = true;
    }
    let mut res = solve_annotated(&cur, k, r, q, corners)?;
    if !res.is_yes() {
        return Ok(None);
    }
    if reduced {
        res.reduction = Some(Reduction { graph: cur, map });
    }
    Ok(Some(res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgc::Answer;
    use crate::oracle::{brute_force_grid, verify_witness, OracleOptions};

    fn c4() -> Graph {
        Graph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap()
    }

    fn k4() -> Graph {
        Graph::from_edge_list(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    /// Vertex of cell `(i, j)` in the `r x q` grid built by `Graph::grid`.
    fn at(q: usize, i: usize, j: usize) -> Vertex {
        ((i - 1) * q + j) as Vertex
    }

    #[test]
    fn row_separator_examples() {
        let g = Graph::grid(4, 3).unwrap();
        let grid = find_row_separator_grid(&g, at(3, 2, 1), at(3, 3, 1)).unwrap();
        assert_eq!(grid.top, vec![at(3, 2, 1), at(3, 2, 2), at(3, 2, 3)]);
        assert_eq!(grid.bottom, vec![at(3, 3, 1), at(3, 3, 2), at(3, 3, 3)]);
        assert!(find_row_separator_grid(&c4(), 1, 2).is_none());
        for (u, v) in k4().edges() {
            assert!(find_row_separator_grid(&k4(), u, v).is_none());
        }
        // Started mid-row the growth is ambiguous.
        assert!(find_row_separator_grid(&g, at(3, 2, 2), at(3, 3, 2)).is_none());
    }

    #[test]
    fn branching_mode_matches_literal_on_grids() {
        let g = Graph::grid(5, 4).unwrap();
        for (u, v) in g.edges() {
            for (a, b) in [(u, v), (v, u)] {
                let lit = find_row_separator_grid_with(&g, a, b, SeparatorMode::Literal);
                let br = find_row_separator_grid_with(&g, a, b, SeparatorMode::Branching);
                if let Some(l) = lit {
                    assert_eq!(Some(l), br);
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let g = Graph::grid(5, 2).unwrap();
        let c = Corners::new(at(2, 1, 1), at(2, 1, 2), at(2, 5, 2), at(2, 5, 1)).unwrap();
        let d = find_horizontal_decomposition(&g, &c).unwrap();
        assert_eq!(check_decomposition(&g, &d, &c), Ok(()));
        assert_eq!(d.su.len(), 2);
        assert!(!d.su.contains(&at(2, 1, 1)) && !d.sv.contains(&at(2, 5, 1)));

        for perm in [[1, 2, 3, 4], [1, 3, 2, 4], [2, 1, 4, 3]] {
            let c = Corners::new(perm[0], perm[1], perm[2], perm[3]).unwrap();
            assert!(find_horizontal_decomposition(&c4(), &c).is_none());
        }
        let g = Graph::grid(2, 4).unwrap();
        let c = Corners::new(1, 4, 8, 5).unwrap();
        assert!(find_horizontal_decomposition(&g, &c).is_none());
    }

    #[test]
    fn rr1_on_grids() {
        let g = Graph::grid(4, 2).unwrap();
        let c = Corners::new(1, 2, 8, 7).unwrap();
        let d = find_horizontal_decomposition(&g, &c).unwrap();
        let out = apply_rr1(&g, &d, 0, 4, 2, c).unwrap();
        let w = out.graph.recognize_grid().unwrap();
        assert_eq!((w.rows, w.cols, out.r), (2, 3, 3));
        assert_eq!(out.graph.n(), g.n() - 2);
        assert!(apply_rr1(&g, &d, 0, 4, 3, c).is_err());
    }

    #[test]
    fn guess_counts() {
        let guesses = enumerate_guesses(&c4(), 0);
        assert_eq!(guesses.len(), 3);
        assert!(guesses.iter().all(|g| (g.r, g.q) == (2, 2)));

        let six = Graph::path(6).unwrap();
        let shapes: Vec<_> = enumerate_guesses(&six, 1).iter().map(|g| (g.r, g.q)).collect();
        assert!(shapes.iter().all(|&s| s == (2, 3)));
        // 360 ordered tuples for each of 2x3 and 3x2, classes of size 8.
        assert_eq!(shapes.len(), 2 * 360 / 8);

        let nine = Graph::path(9).unwrap();
        let mut shapes: Vec<_> = enumerate_guesses(&nine, 2).iter().map(|g| (g.r, g.q)).collect();
        shapes.dedup();
        assert_eq!(shapes, vec![(2, 4), (3, 3)]);
    }

    #[test]
    fn guess_symmetries_preserve_annotated_verdicts() {
        let g = Graph::grid(2, 3).unwrap();
        let guess = GuessInstance { r: 2, q: 3, corners: Corners::new(1, 3, 6, 4).unwrap() };
        for image in guess_symmetries(&guess) {
            let res = solve_annotated(&g, 0, image.r, image.q, image.corners).unwrap();
            assert!(res.is_yes(), "{image:?}");
        }
    }

    #[test]
    fn solve_examples() {
        assert!(solve(&Graph::grid(3, 3).unwrap(), 0).unwrap().is_yes());
        let diamond = Graph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]).unwrap();
        let res = solve(&diamond, 1).unwrap();
        assert!(res.is_yes());
        assert_eq!(verify_witness(&diamond, res.certificate.as_ref().unwrap(), 1), Ok(()));

        let mut e = Vec::new();
        for u in 1..=5 {
            for v in u + 1..=5 {
                e.push((u, v));
            }
        }
        let k5 = Graph::from_edge_list(5, &e).unwrap();
        let oracle = brute_force_grid(&k5, 3, &OracleOptions::default()).unwrap();
        assert_eq!(solve(&k5, 3).unwrap().answer, oracle.answer);

        let two = Graph::empty(2);
        assert_eq!(solve(&two, 3).unwrap().answer, Answer::No);
    }

    #[test]
    fn low_threshold_exercises_reduction_loop() {
        // Tall grid with one split: the guess loop must reduce it and still say yes.
        let inst = crate::gen::split_grid(5, 2, 1, 3).unwrap();
        let opts = SolveOptions { large_r_threshold: Some(3), ..SolveOptions::default() };
        let res = solve_with(&inst.graph, 1, &opts).unwrap();
        assert!(res.is_yes());
        if let Some(red) = &res.reduction {
            assert_eq!(verify_witness(&red.graph, res.certificate.as_ref().unwrap(), 1), Ok(()));
        } else {
            assert_eq!(verify_witness(&inst.graph, res.certificate.as_ref().unwrap(), 1), Ok(()));
        }
    }
}
