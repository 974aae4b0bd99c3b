//! `gridctl`: solve, kernelize, generate, verify and benchmark grid
//! contraction instances.
//!
//! Verdicts go to stdout as `s YES` / `s NO`. Exit codes are reserved for
//! operational failures: 2 for unreadable input, 3 for an exhausted budget or
//! timeout, 4 when the oracle disagrees with the solver.

mod bench;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use gridcon::bgc::{solve_annotated, solve_bounded, solve_path};
use gridcon::format::{
    comment_value, parse_certificate, parse_dimacs, parse_graph, parse_hypergraph, write_certificate, write_dimacs,
    write_graph, write_hypergraph, Certificate,
};
use gridcon::gc::{self, SeparatorMode, SolveOptions};
use gridcon::gen::{
    hypergraph_to_c4_instance, nae_to_hypergraph, random_graph, random_nae, sat3_to_nae, split_grid, Cnf, NaeFormula,
};
use gridcon::kernel::{kernelize, KernelOutcome};
use gridcon::oracle::{brute_force_grid, brute_force_nae, verify_witness, OracleOptions, DEFAULT_BUDGET};
use gridcon::{Answer, Corners, Graph, SolveResult, Vertex};

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_DISAGREE: u8 = 4;

/// Operational failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Display) -> Self {
        Failure { code, msg: msg.to_string() }
    }

    fn parse(msg: impl Display) -> Self {
        Failure::new(EXIT_PARSE, msg)
    }

    fn internal(msg: impl Display) -> Self {
        Failure::new(1, msg)
    }
}

impl From<gridcon::Error> for Failure {
    fn from(e: gridcon::Error) -> Self {
        match e {
            gridcon::Error::Budget { .. } => Failure::new(EXIT_BUDGET, e),
            gridcon::Error::Parse { .. } | gridcon::Error::Invalid(_) => Failure::parse(e),
            _ => Failure::internal(e),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "gridctl", version, about = "Grid contraction solver toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the graph contracts to a grid with at most k contractions
    Solve(SolveArgs),
    /// Shrink an instance with the reduction rules
    Kernelize(KernelizeArgs),
    /// Write generated instances
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check a certificate against a graph
    Verify(VerifyArgs),
    /// Brute-force verdict over all edge subsets of size at most k
    Oracle(OracleArgs),
    /// Run `solve` over a directory of instances and append CSV records
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Graph file
    #[arg(long)]
    input: PathBuf,
    /// Contraction budget; falls back to a `c k=<k>` line in the input
    #[arg(short)]
    k: Option<usize>,
}

impl InstanceArgs {
    fn load(&self) -> CliResult<(Graph, usize)> {
        let text = read(&self.input)?;
        let g = parse_graph(&text).map_err(|e| Failure::parse(format!("{}: {e}", self.input.display())))?;
        let k = match self.k {
            Some(k) => k,
            None => comment_value(&text, "k")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Failure::parse("no -k given and no `c k=` line in the input"))?,
        };
        Ok((g, k))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Write the certificate here
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Cross-check against the brute-force oracle
    #[arg(long)]
    oracle_check: bool,
    /// grid, path, bounded:<r> or annotated:<r>,<q>,<x1>,<x2>,<x3>,<x4>
    #[arg(long, default_value = "grid")]
    mode: Mode,
    /// Explore every candidate pair when growing row separators
    #[arg(long)]
    branching_separator: bool,
    /// Oracle subset budget
    #[arg(long, env = "GRIDCTL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct KernelizeArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Write the kernel graph here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    certificate: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "grid")]
    mode: Mode,
    /// Smallest admissible grid side
    #[arg(long, default_value_t = 1)]
    min_side: usize,
    #[arg(long)]
    certificate: Option<PathBuf>,
    #[arg(long, env = "GRIDCTL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum GenCommand {
    /// The r x q grid
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// A grid with k random vertex splits (always a YES instance)
    GridSplit {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the planted certificate
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Uniform random graph
    Random {
        #[arg(short = 'n', long)]
        vertices: usize,
        #[arg(short = 'm', long)]
        edges: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// 3-SAT (DIMACS) to NAE-SAT (DIMACS read with NAE semantics)
    Nae {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// NAE-SAT to hypergraph 2-colouring
    Hypergraph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hypergraph 2-colouring to contraction onto C4
    C4 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Random NAE formulas pushed through the reductions, with verdicts
    NaeCorpus {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 1)]
        clauses: usize,
    },
}

/// Which question `solve` answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Grid,
    Path,
    Bounded(usize),
    Annotated(usize, usize, Corners),
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<usize>, String> {
            tail.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad number `{t}` in `{s}`")))
                .collect()
        };
        match head {
            "grid" if tail.is_empty() => Ok(Mode::Grid),
            "path" if tail.is_empty() => Ok(Mode::Path),
            "bounded" => match nums()?.as_slice() {
                [r] if *r >= 1 => Ok(Mode::Bounded(*r)),
                _ => Err("expected bounded:<r> with r >= 1".into()),
            },
            "annotated" => match nums()?.as_slice() {
                &[r, q, x1, x2, x3, x4] if r >= 2 && q >= 2 => {
                    let c = Corners::new(x1 as Vertex, x2 as Vertex, x3 as Vertex, x4 as Vertex)
                        .map_err(|e| e.to_string())?;
                    Ok(Mode::Annotated(r, q, c))
                }
                _ => Err("expected annotated:<r>,<q>,<x1>,<x2>,<x3>,<x4> with r, q >= 2".into()),
            },
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

impl Mode {
    fn oracle_options(self, budget: u64) -> OracleOptions {
        let base = OracleOptions { budget, ..OracleOptions::default() };
        match self {
            Mode::Grid => base,
            Mode::Path => OracleOptions { rows: Some(1), ..base },
            Mode::Bounded(r) => OracleOptions { rows: Some(r), ..base },
            Mode::Annotated(r, q, c) => OracleOptions { corners: Some((r, q, c)), ..base },
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::internal(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to stdout without one.
fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(a: Answer) -> &'static str {
    if a.is_yes() {
        "s YES"
    } else {
        "s NO"
    }
}

fn stats_line(res: &SolveResult) -> String {
    let s = &res.stats;
    format!(
        "c stats potential_slabs={} tuples={} table_entries={} extender_enumerations={} extender_candidates={} \
         peak_candidates={} dropped_updates={} search_nodes={} elapsed_ms={}",
        s.potential_slabs,
        s.tuples,
        s.table_entries,
        s.extender_enumerations,
        s.extender_candidates,
        s.peak_candidates,
        s.dropped_updates,
        s.search_nodes,
        s.elapsed.as_millis()
    )
}

fn cmd_solve(a: &SolveArgs) -> CliResult {
    let (g, k) = a.instance.load()?;
    if let Mode::Annotated(_, _, c) = a.mode {
        if let Some(&x) = c.0.iter().find(|&&x| x as usize > g.n()) {
            return Err(Failure::parse(format!("corner {x} is not a vertex")));
        }
    }
    if !g.is_connected() {
        println!("c disconnected");
        println!("s NO");
        if let Some(path) = &a.certificate {
            write(path, &write_certificate(&Certificate::No))?;
        }
        return Ok(());
    }
    let res = match a.mode {
        Mode::Grid => {
            let mode = if a.branching_separator { SeparatorMode::Branching } else { SeparatorMode::Literal };
            gc::solve_with(&g, k, &SolveOptions { separator_mode: mode, ..SolveOptions::default() })?
        }
        Mode::Path => solve_path(&g, k)?,
        Mode::Bounded(r) => solve_bounded(&g, k, r)?,
        Mode::Annotated(r, q, c) => solve_annotated(&g, k, r, q, c)?,
    };
    println!("{}", verdict(res.answer));
    let cert = Certificate::from_result(&res, g.n());
    if let Certificate::Yes { witness, cost, reduction_map } = &cert {
        println!("c witness rows={} cols={} cost={cost}", witness.rows, witness.cols);
        if reduction_map.is_some() {
            println!("c reduced-form");
        }
    }
    println!("{}", stats_line(&res));
    if let Some(path) = &a.certificate {
        write(path, &write_certificate(&cert))?;
    }
    if a.oracle_check {
        oracle_check(&g, k, a, &res)?;
    }
    Ok(())
}

fn oracle_check(g: &Graph, k: usize, a: &SolveArgs, res: &SolveResult) -> CliResult {
    if let (Some(w), None) = (&res.certificate, &res.reduction) {
        if let Err(why) = verify_witness(g, w, k) {
            return Err(Failure::new(EXIT_DISAGREE, format!("solver certificate rejected: {why}")));
        }
    }
    match brute_force_grid(g, k, &a.mode.oracle_options(a.budget)) {
        Ok(v) if v.answer == res.answer => {
            println!("c oracle agrees explored={}", v.explored);
            Ok(())
        }
        Ok(v) => Err(Failure::new(
            EXIT_DISAGREE,
            format!("oracle says {} but solver says {}", verdict(v.answer), verdict(res.answer)),
        )),
        Err(gridcon::Error::Budget { limit }) => {
            println!("c oracle skipped: budget {limit} exceeded");
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_kernelize(a: &KernelizeArgs) -> CliResult {
    let (g, k) = a.instance.load()?;
    let rep = kernelize(&g, k);
    match (rep.outcome, &rep.kernel_graph) {
        (KernelOutcome::Kernel, Some(h)) => {
            println!("kernel n={} m={} bound={}", h.n(), h.m(), rep.bound());
            println!("c rr3={}", rep.rr3_applications);
            let comments = [format!("kernel k={k} rr3={}", rep.rr3_applications), format!("k={k}")];
            emit(a.output.as_deref(), &write_graph(h, &comments))
        }
        _ => {
            println!("s NO");
            println!("c bound={} rr3={}", rep.bound(), rep.rr3_applications);
            Ok(())
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> CliResult {
    let (g, k) = a.instance.load()?;
    let text = read(&a.certificate)?;
    let cert = parse_certificate(&text).map_err(|e| Failure::parse(format!("{}: {e}", a.certificate.display())))?;
    match check_certificate(&g, k, &cert) {
        Ok(note) => {
            if let Some(note) = note {
                println!("c {note}");
            }
            println!("accept");
        }
        Err(why) => println!("reject {why}"),
    }
    Ok(())
}

/// Checks `cert` against `(g, k)`. A reduced-form certificate is checked
/// against the quotient its map describes, after confirming that every class
/// of the map is connected in `g`.
fn check_certificate(g: &Graph, k: usize, cert: &Certificate) -> Result<Option<String>, String> {
    let Certificate::Yes { witness, cost, reduction_map } = cert else {
        return Err("certificate claims NO and carries no witness".into());
    };
    let (target, note) = match reduction_map {
        None => (g.clone(), None),
        Some(map) => {
            if map.len() != g.n() + 1 {
                return Err(format!("reduction map covers {} vertices, graph has {}", map.len() - 1, g.n()));
            }
            let c = map.iter().skip(1).copied().max().unwrap_or(0) as usize;
            let mut classes = vec![Vec::new(); c + 1];
            for v in g.vertices() {
                classes[map[v as usize] as usize].push(v);
            }
            for (id, class) in classes.iter().enumerate().skip(1) {
                if class.is_empty() {
                    return Err(format!("reduction map skips class {id}"));
                }
                if !g.is_connected_set(&class.iter().copied().collect()) {
                    return Err(format!("reduction class {id} is not connected"));
                }
            }
            let h = g.quotient(map, c);
            (h, Some(format!("reduced-form: witness checked on the {c}-vertex contracted graph")))
        }
    };
    verify_witness(&target, witness, k).map_err(|e| e.to_string())?;
    let actual = witness.cost(target.n());
    if actual != *cost {
        return Err(format!("declared cost {cost} but the witness costs {actual}"));
    }
    Ok(note)
}

fn cmd_oracle(a: &OracleArgs) -> CliResult {
    let (g, k) = a.instance.load()?;
    let opts = OracleOptions { min_side: a.min_side, ..a.mode.oracle_options(a.budget) };
    let v = brute_force_grid(&g, k, &opts)?;
    println!("{}", verdict(v.answer));
    println!("c explored={}", v.explored);
    if let Some(path) = &a.certificate {
        let cert = match v.witness {
            Some(w) => Certificate::Yes { cost: w.cost(g.n()), witness: w, reduction_map: None },
            None => Certificate::No,
        };
        write(path, &write_certificate(&cert))?;
    }
    Ok(())
}

fn read_nae(path: &Path) -> CliResult<NaeFormula> {
    let f = parse_dimacs(&read(path)?).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    NaeFormula::new(f.vars, f.clauses).map_err(Failure::parse)
}

fn nae_text(f: &NaeFormula, comments: &[String]) -> CliResult<String> {
    let cnf = Cnf::new(f.vars, f.clauses.clone())?;
    Ok(write_dimacs(&cnf, comments))
}

fn cmd_gen(cmd: &GenCommand) -> CliResult {
    match cmd {
        GenCommand::Grid { rows, cols, output } => {
            let g = Graph::grid(*rows, *cols)?;
            emit(output.as_deref(), &write_graph(&g, &[format!("grid {rows}x{cols}"), "k=0".into()]))
        }
        GenCommand::GridSplit { rows, cols, k, seed, output, witness } => {
            let inst = split_grid(*rows, *cols, *k, *seed)?;
            let comments =
                [format!("grid-split rows={rows} cols={cols} seed={seed}"), format!("k={k}"), "expected YES".into()];
            if let Some(path) = witness {
                let cert = Certificate::Yes {
                    cost: inst.witness.cost(inst.graph.n()),
                    witness: inst.witness.clone(),
                    reduction_map: None,
                };
                write(path, &write_certificate(&cert))?;
            }
            emit(output.as_deref(), &write_graph(&inst.graph, &comments))
        }
        GenCommand::Random { vertices, edges, seed, connected, output } => {
            let g = random_graph(*vertices, *edges, *seed, *connected)?;
            emit(output.as_deref(), &write_graph(&g, &[format!("random n={vertices} m={edges} seed={seed}")]))
        }
        GenCommand::Nae { input, output } => {
            let f = parse_dimacs(&read(input)?).map_err(|e| Failure::parse(format!("{}: {e}", input.display())))?;
            let nae = sat3_to_nae(&f)?;
            emit(output.as_deref(), &nae_text(&nae, &["nae".into()])?)
        }
        GenCommand::Hypergraph { input, output } => {
            let h = nae_to_hypergraph(&read_nae(input)?);
            emit(output.as_deref(), &write_hypergraph(&h, &[]))
        }
        GenCommand::C4 { input, output } => {
            let text = read(input)?;
            let h = parse_hypergraph(&text).map_err(|e| Failure::parse(format!("{}: {e}", input.display())))?;
            let inst = hypergraph_to_c4_instance(&h)?;
            emit(output.as_deref(), &write_graph(&inst.graph, &c4_comments(&inst, None)))
        }
        GenCommand::NaeCorpus { dir, count, seed, vars, clauses } => {
            fs::create_dir_all(dir).map_err(|e| Failure::internal(format!("{}: {e}", dir.display())))?;
            for i in 0..*count {
                let s = seed + i as u64;
                let f = random_nae(*vars, *clauses, 3, s)?;
                let expected = brute_force_nae(&f)?;
                let h = nae_to_hypergraph(&f);
                let inst = hypergraph_to_c4_instance(&h)?;
                let id = format!("nae-{s:06}");
                let tag = format!("seed={s}");
                write(&dir.join(format!("{id}.cnf")), &nae_text(&f, &["nae".into(), tag.clone()])?)?;
                write(&dir.join(format!("{id}.hyp")), &write_hypergraph(&h, &[tag]))?;
                write(
                    &dir.join(format!("{id}.graph")),
                    &write_graph(&inst.graph, &c4_comments(&inst, Some(expected))),
                )?;
            }
            println!("c wrote {count} instances to {}", dir.display());
            Ok(())
        }
    }
}

/// Comments for a C4 instance. Bounded mode with two rows asks exactly for a
/// contraction onto a grid with both sides at least 2, because `k = n - 4`
/// forces at least four cells.
fn c4_comments(inst: &gridcon::gen::C4Instance, expected: Option<bool>) -> Vec<String> {
    let mut out = vec![
        format!("k={}", inst.k),
        "mode=bounded:2".into(),
        format!("universal-edges={}", inst.universal_edges_added),
    ];
    if let Some(e) = expected {
        out.push(format!("expected {}", if e { "YES" } else { "NO" }));
    }
    out
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Kernelize(a) => cmd_kernelize(&a),
        Command::Gen(c) => cmd_gen(&c),
        Command::Verify(a) => cmd_verify(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gridctl: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
