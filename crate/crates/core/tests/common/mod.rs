//! Shared test helpers: fixed corpora and independent brute-force oracles.
//! Nothing here calls into the slab engine or the solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use gridcon::gen::random_graph;
use gridcon::{Graph, Vertex, VertexSet};

/// Connected graphs with `1 <= n <= max_n` and at most `max_m` edges, one per seed.
pub fn corpus(count: usize, seed_base: u64, max_n: usize, max_m: usize) -> Vec<Graph> {
    (0..count)
        .map(|i| {
            let seed = seed_base + i as u64;
            let n = 1 + i % max_n;
            let lo = n.saturating_sub(1);
            let hi = (n * (n - 1) / 2).min(max_m).max(lo);
            let m = lo + (seed as usize * 7919) % (hi - lo + 1);
            random_graph(n, m, seed, true).expect("corpus parameters are feasible")
        })
        .collect()
}

pub struct Masks {
    pub n: usize,
    pub adj: Vec<u32>,
}

impl Masks {
    pub fn new(g: &Graph) -> Self {
        assert!(g.n() <= 31);
        let adj = (1..=g.n() as Vertex).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << (w - 1))).collect();
        Masks { n: g.n(), adj }
    }

    pub fn nbhd(&self, set: u32) -> u32 {
        let mut out = 0;
        let mut bits = set;
        while bits != 0 {
            out |= self.adj[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        out & !set
    }

    pub fn connected(&self, set: u32) -> bool {
        if set == 0 {
            return false;
        }
        let mut comp = set & set.wrapping_neg();
        loop {
            let grown = (comp | self.nbhd(comp)) & set;
            if grown == comp {
                return comp == set;
            }
            comp = grown;
        }
    }

    pub fn touch(&self, a: u32, b: u32) -> bool {
        self.nbhd(a) & b != 0
    }
}

pub fn to_set(mask: u32) -> VertexSet {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i as Vertex + 1).collect()
}

/// One r-slab found by brute force: its parts, `|A|` and `|N(A)|`.
pub struct BruteSlab {
    pub parts: Vec<VertexSet>,
    pub masks: Vec<u32>,
    pub size: usize,
    pub outside: usize,
}

/// Every ordered r-partition of every connected set of at most `max_size`
/// vertices, filtered by the r-slab definition.
pub fn brute_slabs(g: &Graph, r: usize, max_size: usize) -> Vec<BruteSlab> {
    let m = Masks::new(g);
    let mut out = Vec::new();
    for set in 1u32..(1 << m.n) {
        let size = set.count_ones() as usize;
        if size > max_size || size < r || !m.connected(set) {
            continue;
        }
        let members: Vec<usize> = (0..m.n).filter(|i| set >> i & 1 == 1).collect();
        let mut label = vec![0usize; size];
        'labels: loop {
            let mut parts = vec![0u32; r];
            for (idx, &v) in members.iter().enumerate() {
                parts[label[idx]] |= 1 << v;
            }
            if is_slab(&m, &parts, set) {
                out.push(BruteSlab {
                    parts: parts.iter().map(|&p| to_set(p)).collect(),
                    masks: parts.clone(),
                    size,
                    outside: m.nbhd(set).count_ones() as usize,
                });
            }
            for slot in label.iter_mut() {
                *slot += 1;
                if *slot < r {
                    continue 'labels;
                }
                *slot = 0;
            }
            break;
        }
    }
    out
}

fn is_slab(m: &Masks, parts: &[u32], all: u32) -> bool {
    let r = parts.len();
    if parts.iter().any(|&p| !m.connected(p)) {
        return false;
    }
    let b: Vec<u32> = parts.iter().map(|&p| m.nbhd(p) & !all).collect();
    for i in 0..r {
        for j in i + 1..r {
            if m.touch(parts[i], parts[j]) != (j - i == 1) {
                return false;
            }
            if b[i] & b[j] != 0 {
                return false;
            }
            if j - i >= 2 && m.touch(b[i], b[j]) {
                return false;
            }
        }
    }
    true
}

pub fn slab_key(parts: &[VertexSet]) -> Vec<Vec<Vertex>> {
    parts.iter().map(|p| p.iter().collect()).collect()
}

pub fn key_set<'a>(it: impl IntoIterator<Item = &'a [VertexSet]>) -> BTreeSet<Vec<Vec<Vertex>>> {
    it.into_iter().map(slab_key).collect()
}
