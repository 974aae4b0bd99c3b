//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 2 4`.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use gridcon::bgc::{solve_annotated, solve_bounded, solve_path};
use gridcon::gc::{self, apply_rr1, find_horizontal_decomposition_of_width, SeparatorMode};
use gridcon::gen::{hypergraph_to_c4_instance, nae_to_hypergraph, split_grid, NaeFormula};
use gridcon::kernel::{apply_rr3, find_grid_separator, kernel_vertex_bound, kernelize, KernelOutcome};
use gridcon::oracle::{
    brute_force_c4, brute_force_grid, brute_force_hypergraph_2col, brute_force_nae, verify_witness, OracleOptions,
};
use gridcon::slab::{enumerate_all, enumerate_seeded, SeedPartition};
use gridcon::{Answer, Corners, Graph, SolveResult, Vertex};

use common::{brute_slabs, corpus, key_set};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Outcome {
        match failures.first() {
            None => Outcome { pass: true, detail: summary },
            Some(first) => {
                for f in failures.iter().take(12) {
                    eprintln!("  {f}");
                }
                Outcome { pass: false, detail: format!("{summary}; {} failures, first: {first}", failures.len()) }
            }
        }
    }
}

fn slab_corpus() -> Vec<Graph> {
    corpus(300, 1_000, 8, 14)
}

fn solver_corpus() -> Vec<Graph> {
    corpus(500, 50_000, 8, 12)
}

/// Slab enumeration equals brute force on the fixed corpus.
fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for (gi, g) in slab_corpus().iter().enumerate() {
        for r in 1..=3 {
            let brute = brute_slabs(g, r, 6);
            for alpha in 0..=6 {
                for beta in 0..=6 {
                    let fits: Vec<_> = brute.iter().filter(|s| s.size <= alpha && s.outside <= beta).collect();
                    let got = enumerate_all(g, r, alpha, beta);
                    let want = key_set(fits.iter().map(|s| s.parts.as_slice()));
                    let have = key_set(got.iter().map(|s| s.parts()));
                    checks += 1;
                    if have != want || have.len() != got.len() {
                        let extra: Vec<_> = have.difference(&want).take(2).collect();
                        let missing: Vec<_> = want.difference(&have).take(2).collect();
                        failures.push(format!(
                            "graph {gi} all r={r} a={alpha} b={beta}: extra {extra:?} missing {missing:?}"
                        ));
                    }
                    for v in g.vertices() {
                        for i in 1..=r {
                            let seed = SeedPartition::single(r, i, v);
                            let got = enumerate_seeded(g, &seed, alpha, beta);
                            let bit = 1u32 << (v - 1);
                            let want =
                                key_set(fits.iter().filter(|s| s.masks[i - 1] & bit != 0).map(|s| s.parts.as_slice()));
                            let have = key_set(got.iter().map(|s| s.parts()));
                            checks += 1;
                            if have != want || have.len() != got.len() {
                                failures.push(format!("graph {gi} seed v={v} part {i} r={r} a={alpha} b={beta}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Outcome::new(&failures, format!("{checks} enumerations matched brute force"))
}

fn oracle_opts(rows: Option<usize>) -> OracleOptions {
    OracleOptions { rows, ..OracleOptions::default() }
}

/// Every solver run of criterion 2, kept so criteria 3 and 9 can inspect them.
struct SolverRun {
    graph: usize,
    k: usize,
    what: String,
    rows: Option<usize>,
    res: SolveResult,
}

fn solver_runs() -> Vec<SolverRun> {
    let mut runs = Vec::new();
    for (gi, g) in solver_corpus().iter().enumerate() {
        for k in 0..=4 {
            runs.push(SolverRun { graph: gi, k, what: "grid".into(), rows: None, res: gc::solve(g, k).unwrap() });
            runs.push(SolverRun { graph: gi, k, what: "path".into(), rows: Some(1), res: solve_path(g, k).unwrap() });
            for r in 2..=3 {
                let res = solve_bounded(g, k, r).unwrap();
                runs.push(SolverRun { graph: gi, k, what: format!("bounded r={r}"), rows: Some(r), res });
            }
        }
    }
    runs
}

/// Solver verdicts equal the edge-subset oracle.
fn criterion_2(runs: &[SolverRun], graphs: &[Graph]) -> Outcome {
    let mut failures = Vec::new();
    let mut yes = 0;
    for run in runs {
        let oracle = brute_force_grid(&graphs[run.graph], run.k, &oracle_opts(run.rows)).unwrap();
        if oracle.answer != run.res.answer {
            failures.push(format!(
                "graph {} k={} {}: solver {} oracle {}",
                run.graph, run.k, run.what, run.res.answer, oracle.answer
            ));
        }
        yes += usize::from(oracle.answer.is_yes());
    }
    Outcome::new(&failures, format!("{} verdicts on {} graphs agree ({yes} YES)", runs.len(), graphs.len()))
}

/// Every YES carries a certificate that verifies with cost at most k.
fn criterion_3(runs: &[SolverRun], graphs: &[Graph]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for run in runs.iter().filter(|r| r.res.is_yes()) {
        let g = &graphs[run.graph];
        let target = run.res.reduction.as_ref().map_or(g, |red| &red.graph);
        checked += 1;
        match &run.res.certificate {
            None => failures.push(format!("graph {} k={} {}: YES without certificate", run.graph, run.k, run.what)),
            Some(w) => {
                if let Err(e) = verify_witness(target, w, run.k) {
                    failures.push(format!("graph {} k={} {}: {e}", run.graph, run.k, run.what));
                }
                if run.rows.is_some_and(|r| w.rows != r) {
                    failures
                        .push(format!("graph {} k={} {}: certificate has {} rows", run.graph, run.k, run.what, w.rows));
                }
            }
        }
    }
    Outcome::new(&failures, format!("{checked} YES certificates verified"))
}

/// Planted split grids are always YES.
fn criterion_4() -> Outcome {
    let shapes: Vec<(usize, usize)> = (1..=12).flat_map(|r| (1..=12 / r).map(move |q| (r, q))).collect();
    let mut failures = Vec::new();
    let mut count = 0;
    for seed in 0..240u64 {
        let (r, q) = shapes[seed as usize % shapes.len()];
        let k = (seed as usize / shapes.len()) % 5;
        let inst = split_grid(r, q, k, seed).unwrap();
        if verify_witness(&inst.graph, &inst.witness, k).is_err() {
            failures.push(format!("seed {seed}: planted witness does not verify"));
        }
        let res = gc::solve(&inst.graph, k).unwrap();
        count += 1;
        if !res.is_yes() {
            failures.push(format!("seed {seed}: {r}x{q} with {k} splits answered NO"));
        } else if res.reduction.is_none() && verify_witness(&inst.graph, res.certificate.as_ref().unwrap(), k).is_err()
        {
            failures.push(format!("seed {seed}: certificate rejected"));
        }
    }
    Outcome::new(&failures, format!("{count} planted instances (r*q <= 12, k <= 4) answered YES"))
}

/// `|enumerate_all| <= 4^(alpha+beta) * n^3`.
fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0f64;
    let mut checks = 0;
    for (gi, g) in slab_corpus().iter().enumerate() {
        let n3 = (g.n() as f64).powi(3);
        for r in 1..=3 {
            for alpha in 0..=6 {
                for beta in 0..=6 {
                    let count = enumerate_all(g, r, alpha, beta).len() as f64;
                    let bound = 4f64.powi((alpha + beta) as i32) * n3;
                    worst = worst.max(count / bound);
                    checks += 1;
                    if count > bound {
                        failures.push(format!("graph {gi} r={r} a={alpha} b={beta}: {count} > {bound}"));
                    }
                }
            }
        }
    }
    Outcome::new(&failures, format!("{checks} counts within bound, max ratio {worst:.4}"))
}

fn first_in_cell(w: &gridcon::WitnessMap, cell: (usize, usize)) -> Vertex {
    (1..=w.assign.len() as Vertex).find(|&v| w.cell_of(v) == cell).unwrap()
}

/// Verdicts before and after Reduction Rules 1 and 3 agree.
fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let (mut rr1, mut rr3) = (0, 0);
    let mut verdicts = BTreeSet::new();
    // Rule 1 on annotated instances built from tall split grids.
    for seed in 0..160u64 {
        let (r, q) = [(3, 2), (4, 2), (3, 3), (5, 2)][seed as usize % 4];
        let splits = (seed as usize / 4) % 2;
        let k = if seed % 3 == 0 { splits.saturating_sub(1) } else { splits };
        let inst = split_grid(r, q, splits, seed).unwrap();
        let g = &inst.graph;
        let w = &inst.witness;
        let corners = Corners::new(
            first_in_cell(w, (1, 1)),
            first_in_cell(w, (1, q)),
            first_in_cell(w, (r, q)),
            first_in_cell(w, (r, 1)),
        )
        .unwrap();
        let Some(d) = find_horizontal_decomposition_of_width(g, &corners, q, SeparatorMode::Literal) else { continue };
        // Also try corners that sit on the right sides but are not grid corners.
        let top: Vec<Vertex> = d.c12.iter().collect();
        let bottom: Vec<Vertex> = d.c34.iter().collect();
        let mut tries = vec![corners];
        if top.len() >= 2 && bottom.len() >= 2 {
            let i = seed as usize;
            let (a, b) = (top[i % top.len()], top[(i + 1) % top.len()]);
            let (c, e) = (bottom[i % bottom.len()], bottom[(i + 1) % bottom.len()]);
            tries.push(Corners::new(a, b, c, e).unwrap());
        }
        for c in tries {
            let before = solve_annotated(g, k, r, q, c).unwrap().answer;
            let out = apply_rr1(g, &d, k, r, q, c).unwrap();
            let after = solve_annotated(&out.graph, k, out.r, q, out.corners).unwrap().answer;
            rr1 += 1;
            verdicts.insert(before);
            if before != after {
                failures.push(format!("RR1 seed {seed} {r}x{q} k={k}: {before} then {after}"));
            }
        }
    }
    // Rule 3 on 2-wide split grids tall enough for a 10-row separator (k = 1).
    for seed in 0..240u64 {
        let rows = 13 + (seed as usize % 3);
        let splits = 1 + usize::from(seed % 4 == 3);
        let inst = split_grid(rows, 2, splits, seed).unwrap();
        let g = &inst.graph;
        let Some(sep) = find_grid_separator(g, 1, 10, 1) else { continue };
        let h = apply_rr3(g, 1, &sep).unwrap();
        let before = gc::solve(g, 1).unwrap().answer;
        let after = gc::solve(&h, 1).unwrap().answer;
        rr3 += 1;
        verdicts.insert(before);
        if before != after {
            failures.push(format!("RR3 seed {seed}: {before} then {after}"));
        }
    }
    if rr1 + rr3 < 100 {
        failures.push(format!("only {} reducible instances", rr1 + rr3));
    }
    Outcome::new(&failures, format!("{rr1} Rule 1 and {rr3} Rule 3 applications preserved verdicts {verdicts:?}"))
}

/// Kernel size bound and verdict preservation.
fn criterion_7(graphs: &[Graph]) -> Outcome {
    let mut failures = Vec::new();
    if kernel_vertex_bound(1) != 627 {
        failures.push(format!("bound for k=1 is {}", kernel_vertex_bound(1)));
    }
    let mut checked = 0;
    let mut check = |name: String, g: &Graph, k: usize, direct: Option<Answer>| {
        let rep = kernelize(g, k);
        checked += 1;
        let kernel_answer = match (&rep.outcome, &rep.kernel_graph) {
            (KernelOutcome::NoInstance, _) => Answer::No,
            (KernelOutcome::Kernel, Some(h)) => {
                if h.n() > kernel_vertex_bound(k) {
                    failures.push(format!("{name}: kernel has {} vertices", h.n()));
                }
                gc::solve(h, k).unwrap().answer
            }
            (KernelOutcome::Kernel, None) => {
                failures.push(format!("{name}: kernel outcome without a graph"));
                return;
            }
        };
        let direct = direct.unwrap_or_else(|| gc::solve(g, k).unwrap().answer);
        if direct != kernel_answer {
            failures.push(format!("{name}: direct {direct}, kernel {kernel_answer}"));
        }
    };
    for (gi, g) in graphs.iter().enumerate().step_by(5) {
        for k in 0..=2 {
            check(format!("corpus graph {gi} k={k}"), g, k, None);
        }
    }
    // Above the k = 0 threshold of 82 vertices.
    for (r, q) in [(42, 2), (30, 3), (9, 10), (12, 8)] {
        let g = Graph::grid(r, q).unwrap();
        check(format!("{r}x{q} grid k=0"), &g, 0, Some(Answer::Yes));
        let mut e = g.edge_vec();
        e.push((1, (q + 2) as Vertex));
        let chorded = Graph::from_edge_list(g.n(), &e).unwrap();
        check(format!("{r}x{q} grid with chord k=0"), &chorded, 0, Some(Answer::No));
    }
    // Above the k = 1 threshold of 627 vertices; the planted witness decides.
    for seed in 0..2 {
        let inst = split_grid(320, 2, 1, seed).unwrap();
        check(format!("320x2 split grid seed {seed} k=1"), &inst.graph, 1, Some(Answer::Yes));
    }
    Outcome::new(&failures, format!("{checked} kernels within bound with preserved verdicts"))
}

/// All NAE formulas with at most 3 variables and 3 clauses, one per
/// variable-renaming/polarity class.
fn nae_formulas() -> Vec<NaeFormula> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for vars in 1..=3usize {
        let literals: Vec<i32> = (1..=vars as i32).flat_map(|x| [x, -x]).collect();
        let clauses: Vec<Vec<i32>> = (1u32..1 << literals.len())
            .map(|mask| literals.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l).collect())
            .collect();
        let perms: Vec<Vec<i32>> = permutations(vars);
        for count in 0..=3 {
            for pick in combinations(clauses.len(), count) {
                let f: Vec<Vec<i32>> = pick.iter().map(|&i| clauses[i].clone()).collect();
                let canon = perms
                    .iter()
                    .flat_map(|p| (0..1u32 << vars).map(move |flip| (p, flip)))
                    .map(|(p, flip)| {
                        let mut cs: Vec<Vec<i32>> = f
                            .iter()
                            .map(|c| {
                                let mut c: Vec<i32> = c
                                    .iter()
                                    .map(|&l| {
                                        let x = l.unsigned_abs() as usize - 1;
                                        let sign = if flip >> x & 1 == 1 { -l.signum() } else { l.signum() };
                                        sign * p[x]
                                    })
                                    .collect();
                                c.sort_unstable();
                                c
                            })
                            .collect();
                        cs.sort();
                        cs
                    })
                    .min()
                    .unwrap();
                if seen.insert((vars, canon)) {
                    out.push(NaeFormula::new(vars, f).unwrap());
                }
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<i32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n as i32);
            out.push(p);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|first| {
            combinations(n - first - 1, k - 1).into_iter().map(move |rest| {
                let mut c = vec![first];
                c.extend(rest.into_iter().map(|x| x + first + 1));
                c
            })
        })
        .collect()
}

/// NAE satisfiability equals contractibility of the reduction output to a
/// grid with both sides at least 2.
fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let formulas = nae_formulas();
    let (mut yes, mut cross) = (0, 0);
    for f in &formulas {
        let nae = brute_force_nae(f).unwrap();
        let h = nae_to_hypergraph(f);
        if brute_force_hypergraph_2col(&h).unwrap() != nae {
            failures.push(format!("{f:?}: hypergraph colouring disagrees"));
        }
        let inst = hypergraph_to_c4_instance(&h).unwrap();
        let g = &inst.graph;
        // With k = |V| - 4 and both sides >= 2, any admissible grid contracts
        // further to the 2x2 grid, so the exhaustive C4 partition search decides it.
        let c4 = brute_force_c4(g).unwrap();
        if let Some(w) = &c4 {
            if let Err(e) = verify_witness(g, w, inst.k) {
                failures.push(format!("{f:?}: C4 witness rejected: {e}"));
            }
        }
        if c4.is_some() != nae {
            failures.push(format!("{f:?}: NAE {nae}, contraction {}", c4.is_some()));
        }
        if g.n() <= 10 {
            let opts = OracleOptions { min_side: 2, ..OracleOptions::default() };
            let grid = brute_force_grid(g, inst.k, &opts).unwrap();
            cross += 1;
            if grid.answer.is_yes() != nae {
                failures.push(format!("{f:?}: edge-subset oracle says {}", grid.answer));
            }
        }
        yes += usize::from(nae);
    }
    Outcome::new(
        &failures,
        format!("{} formula classes ({yes} NAE-satisfiable), {cross} cross-checked by edge subsets", formulas.len()),
    )
}

/// DP work counters stay within `4^(k+3r) * n^3`.
fn criterion_9(runs: &[SolverRun], graphs: &[Graph]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0f64;
    let mut checked = 0;
    for run in runs.iter().filter(|r| r.what.starts_with("bounded") || r.what == "path") {
        let r = run.rows.unwrap();
        let n = graphs[run.graph].n() as f64;
        let bound = 4f64.powi((run.k + 3 * r) as i32) * n.powi(3);
        let s = &run.res.stats;
        checked += 1;
        for (name, v) in [("table entries", s.table_entries), ("extender enumerations", s.extender_enumerations)] {
            worst = worst.max(v as f64 / bound);
            if v as f64 > bound {
                failures.push(format!("graph {} k={} {}: {name} {v} > {bound}", run.graph, run.k, run.what));
            }
        }
    }
    Outcome::new(&failures, format!("{checked} bounded solves within bound, max ratio {worst:.2e}"))
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |i: usize| wanted.is_empty() || wanted.contains(&i);
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |i: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        if run(i) {
            let start = Instant::now();
            let outcome = f();
            let secs = start.elapsed().as_secs_f64();
            println!(
                "criterion {i} {}: {name}: {} ({secs:.1}s)",
                if outcome.pass { "PASS" } else { "FAIL" },
                outcome.detail
            );
            results.push((i, name, outcome, secs));
        }
    };
    timed(1, "slab enumeration equals brute force", &mut criterion_1);
    let graphs = solver_corpus();
    let runs = if run(2) || run(3) || run(9) { solver_runs() } else { Vec::new() };
    timed(2, "solver verdicts equal oracle", &mut || criterion_2(&runs, &graphs));
    timed(3, "certificates verify", &mut || criterion_3(&runs, &graphs));
    timed(4, "planted instances answered YES", &mut criterion_4);
    timed(5, "slab count bound", &mut criterion_5);
    timed(6, "reduction rules preserve verdicts", &mut criterion_6);
    timed(7, "kernel bound and verdicts", &mut || criterion_7(&graphs));
    timed(8, "NAE pipeline", &mut criterion_8);
    timed(9, "DP work within bound", &mut || criterion_9(&runs, &graphs));

    println!();
    for (i, name, outcome, _) in &results {
        println!("{} {i}. {name}", if outcome.pass { "PASS" } else { "FAIL" });
    }
    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
