//! Brute-force ground truth. Nothing here shares logic with the solvers:
//! grid contraction is decided by trying every edge subset, formulas and
//! hypergraphs by trying every assignment.

use itertools::Itertools;
use thiserror::Error;

use crate::bgc::Answer;
use crate::error::{Error, Result};
use crate::gen::{Hypergraph, NaeFormula};
use crate::graph::{Corners, Graph, VertexSet, WitnessMap};

/// Default cap on edge subsets examined by [`brute_force_grid`].
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Largest variable or vertex count accepted by the truth-table oracles.
pub const MAX_TRUTH_TABLE_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Rejection {
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("incomplete: {assigned} of {n} vertices assigned")]
    Incomplete { assigned: usize, n: usize },
    #[error("vertex {vertex} mapped to ({row},{col}) outside the {rows}x{cols} grid")]
    OutOfRange { vertex: u32, row: usize, col: usize, rows: usize, cols: usize },
    #[error("cell ({0},{1}) is empty")]
    EmptyCell(usize, usize),
    #[error("cell ({0},{1}) is not connected")]
    DisconnectedCell(usize, usize),
    #[error("cells {0:?} and {1:?} are grid neighbors but share no edge")]
    MissingAdjacency((usize, usize), (usize, usize)),
    #[error("cells {0:?} and {1:?} share an edge but are not grid neighbors")]
    ExtraAdjacency((usize, usize), (usize, usize)),
    #[error("cost {cost} exceeds k={k}")]
    CostExceeded { cost: usize, k: usize },
}

/// Checks that `w` is a witness structure of `g` onto its grid with cost at most `k`.
pub fn verify_witness(g: &Graph, w: &WitnessMap, k: usize) -> std::result::Result<(), Rejection> {
    let n = g.n();
    let (rows, cols) = (w.rows, w.cols);
    if rows == 0 || cols == 0 {
        return Err(Rejection::ZeroDimension { rows, cols });
    }
    let assigned = w.assign.iter().filter(|&&(i, j)| i != 0 || j != 0).count();
    if w.assign.len() != n || assigned != n {
        return Err(Rejection::Incomplete { assigned: assigned.min(n), n });
    }
    for (idx, &(i, j)) in w.assign.iter().enumerate() {
        if !(1..=rows).contains(&i) || !(1..=cols).contains(&j) {
            return Err(Rejection::OutOfRange { vertex: idx as u32 + 1, row: i, col: j, rows, cols });
        }
    }
    let cells = w.cells();
    for i in 1..=rows {
        for j in 1..=cols {
            let cell = &cells[(i - 1) * cols + (j - 1)];
            if cell.is_empty() {
                return Err(Rejection::EmptyCell(i, j));
            }
            if !g.is_connected_set(&VertexSet::from(cell.clone())) {
                return Err(Rejection::DisconnectedCell(i, j));
            }
        }
    }
    let mut touching = vec![false; (rows * cols) * (rows * cols)];
    let id = |(i, j): (usize, usize)| (i - 1) * cols + (j - 1);
    for (u, v) in g.edges() {
        let (a, b) = (w.cell_of(u), w.cell_of(v));
        if a == b {
            continue;
        }
        if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) != 1 {
            return Err(Rejection::ExtraAdjacency(a.min(b), a.max(b)));
        }
        touching[id(a) * rows * cols + id(b)] = true;
        touching[id(b) * rows * cols + id(a)] = true;
    }
    for i in 1..=rows {
        for j in 1..=cols {
            for b in [(i + 1, j), (i, j + 1)] {
                if b.0 <= rows && b.1 <= cols && !touching[id((i, j)) * rows * cols + id(b)] {
                    return Err(Rejection::MissingAdjacency((i, j), b));
                }
            }
        }
    }
    let cost = n - rows * cols;
    if cost > k {
        return Err(Rejection::CostExceeded { cost, k });
    }
    Ok(())
}

/// Oracle verdict together with the number of edge subsets examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<WitnessMap>,
    pub explored: u64,
}

/// Restrictions on the grids [`brute_force_grid`] accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Both grid sides must be at least this long (1 admits paths).
    pub min_side: usize,
    /// Exact number of rows of the target grid.
    pub rows: Option<usize>,
    /// Exact target `(r, q)` with corner vertices at `[1,1], [1,q], [r,q], [r,1]`.
    pub corners: Option<(usize, usize, Corners)>,
    pub budget: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { min_side: 1, rows: None, corners: None, budget: DEFAULT_BUDGET }
    }
}

fn accepts(w: &WitnessMap, contracted_map: &[u32], opts: &OracleOptions) -> Option<WitnessMap> {
    for cand in w.symmetries() {
        if cand.rows < opts.min_side || cand.cols < opts.min_side {
            continue;
        }
        if opts.rows.is_some_and(|r| cand.rows != r) {
            continue;
        }
        if let Some((r, q, c)) = opts.corners {
            let want = [(1, 1), (1, q), (r, q), (r, 1)];
            if cand.rows != r || cand.cols != q {
                continue;
            }
            if (0..4).any(|i| cand.cell_of(contracted_map[c.0[i] as usize]) != want[i]) {
                continue;
            }
        }
        return Some(cand.pull_back(contracted_map));
    }
    None
}

/// Tries every edge subset `F` with `|F| <= k`, smallest first, and asks
/// whether `G/F` is a grid meeting `opts`.
pub fn brute_force_grid(g: &Graph, k: usize, opts: &OracleOptions) -> Result<Verdict> {
    if !g.is_connected() {
        return Ok(Verdict { answer: Answer::No, witness: None, explored: 0 });
    }
    let edges = g.edge_vec();
    let mut explored = 0u64;
    for size in 0..=k.min(edges.len()) {
        for subset in edges.iter().copied().combinations(size) {
            explored += 1;
            if explored > opts.budget {
                return Err(Error::Budget { limit: opts.budget });
            }
            let (h, map) = g.contract_edges(&subset)?;
            if let Some(w) = h.recognize_grid() {
                if let Some(witness) = accepts(&w, &map, opts) {
                    return Ok(Verdict { answer: Answer::Yes, witness: Some(witness), explored });
                }
            }
        }
    }
    Ok(Verdict { answer: Answer::No, witness: None, explored })
}

/// Is there a partition of `g` into four connected sets `W1..W4` forming a
/// 4-cycle of adjacencies? Exhaustive over the vertex sets `W1 ∪ W3`.
pub fn brute_force_c4(g: &Graph) -> Result<Option<WitnessMap>> {
    let n = g.n();
    if n > 26 {
        return Err(Error::Budget { limit: 1 << 25 });
    }
    if n < 4 {
        return Ok(None);
    }
    let adj: Vec<u32> = (0..n).map(|i| g.neighbors(i as u32 + 1).iter().fold(0, |m, &w| m | 1 << (w - 1))).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let component = |start: u32, mask: u32| {
        let mut comp = start;
        loop {
            let mut grown = comp;
            let mut bits = comp;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grown |= adj[v] & mask;
            }
            if grown == comp {
                return comp;
            }
            comp = grown;
        }
    };
    // Two components exactly: returns them.
    let split = |mask: u32| -> Option<(u32, u32)> {
        if mask == 0 {
            return None;
        }
        let a = component(mask & mask.wrapping_neg(), mask);
        let rest = mask & !a;
        if rest == 0 {
            return None;
        }
        let b = component(rest & rest.wrapping_neg(), rest);
        (b == rest).then_some((a, b))
    };
    let touches = |a: u32, b: u32| {
        let mut bits = a;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if adj[v] & b != 0 {
                return true;
            }
        }
        false
    };
    // Vertex 1 is put in W1 ∪ W3 without loss of generality.
    for rest in 0..(1u32 << (n - 1)) {
        let u = 1 | rest << 1;
        let Some((w1, w3)) = split(u) else { continue };
        let Some((w2, w4)) = split(full & !u) else { continue };
        if touches(w1, w2) && touches(w2, w3) && touches(w3, w4) && touches(w4, w1) {
            let mut assign = vec![(0, 0); n];
            for (set, cell) in [(w1, (1, 1)), (w2, (1, 2)), (w3, (2, 2)), (w4, (2, 1))] {
                for (v, slot) in assign.iter_mut().enumerate() {
                    if set >> v & 1 == 1 {
                        *slot = cell;
                    }
                }
            }
            return Ok(Some(WitnessMap::new(2, 2, assign)));
        }
    }
    Ok(None)
}

/// Truth-table NAE check: some assignment gives every clause a true and a false literal.
pub fn brute_force_nae(f: &NaeFormula) -> Result<bool> {
    if f.vars > MAX_TRUTH_TABLE_VARS {
        return Err(Error::Budget { limit: 1 << MAX_TRUTH_TABLE_VARS });
    }
    let value = |bits: u32, lit: i32| {
        let on = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
        on == (lit > 0)
    };
    Ok((0..1u32 << f.vars)
        .any(|bits| f.clauses.iter().all(|c| c.iter().any(|&l| value(bits, l)) && c.iter().any(|&l| !value(bits, l)))))
}

/// Exhaustive 2-colouring check: every edge must see both colours.
pub fn brute_force_hypergraph_2col(h: &Hypergraph) -> Result<bool> {
    if h.n > MAX_TRUTH_TABLE_VARS {
        return Err(Error::Budget { limit: 1 << MAX_TRUTH_TABLE_VARS });
    }
    Ok((0..1u32 << h.n).any(|bits| {
        h.edges.iter().all(|e| {
            let ones = e.iter().filter(|&v| bits >> (v - 1) & 1 == 1).count();
            ones > 0 && ones < e.len()
        })
    }))
}
