//! `gridctl bench`: runs `gridctl solve` on every `*.graph` file of a
//! directory, one subprocess per instance so a timeout can kill it, and
//! appends one CSV row per instance. Instances whose id already appears in the
//! output file are skipped, so an interrupted run can be resumed.

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use clap::Args;

use gridcon::format::{comment_value, parse_graph};

use crate::{CliResult, Failure, EXIT_BUDGET};

pub const HEADER: [&str; 11] =
    ["id", "n", "m", "k", "command", "verdict", "cost", "wall_ms", "table_entries", "peak_candidates", "outcome"];

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of `*.graph` instances
    #[arg(long)]
    dir: PathBuf,
    /// CSV file; rows are appended
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    /// Instances run at once
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Budget for instances without a `c k=` line
    #[arg(short)]
    k: Option<usize>,
}

/// One CSV row. Numeric fields the run did not produce are left empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenchRecord {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub command: String,
    pub verdict: String,
    pub cost: String,
    pub wall_ms: u128,
    pub table_entries: String,
    pub peak_candidates: String,
    pub outcome: String,
}

impl BenchRecord {
    fn fields(&self) -> [String; 11] {
        [
            self.id.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            self.command.clone(),
            self.verdict.clone(),
            self.cost.clone(),
            self.wall_ms.to_string(),
            self.table_entries.clone(),
            self.peak_candidates.clone(),
            self.outcome.clone(),
        ]
    }
}

struct Job {
    id: String,
    path: PathBuf,
}

fn instances(dir: &Path) -> CliResult<Vec<Job>> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::parse(format!("{}: {e}", dir.display())))?;
    let mut jobs: Vec<Job> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "graph"))
        .filter_map(|path| {
            let id = path.file_stem()?.to_string_lossy().into_owned();
            Some(Job { id, path })
        })
        .collect();
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(jobs)
}

/// Ids already recorded in `path`, if it exists.
fn finished_ids(path: &Path) -> CliResult<BTreeSet<String>> {
    if !path.exists() {
        return Ok(BTreeSet::new());
    }
    let mut rd = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let mut ids = BTreeSet::new();
    for row in rd.records() {
        let row = row.map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
        if let Some(id) = row.get(0) {
            ids.insert(id.to_string());
        }
    }
    Ok(ids)
}

/// Value of `key=` on the first line starting with `prefix`.
fn field<'a>(out: &'a str, prefix: &str, key: &str) -> Option<&'a str> {
    let line = out.lines().find(|l| l.starts_with(prefix))?;
    line.split_whitespace().find_map(|t| t.strip_prefix(key)?.strip_prefix('='))
}

fn run_one(job: &Job, default_k: Option<usize>, timeout: Duration) -> BenchRecord {
    let mut rec = BenchRecord { id: job.id.clone(), ..BenchRecord::default() };
    let text = match fs::read_to_string(&job.path) {
        Ok(t) => t,
        Err(_) => {
            rec.outcome = "error".into();
            return rec;
        }
    };
    let (Ok(g), Some(k)) = (parse_graph(&text), comment_value(&text, "k").and_then(|v| v.parse().ok()).or(default_k))
    else {
        rec.outcome = "error".into();
        return rec;
    };
    let mode = comment_value(&text, "mode").unwrap_or("grid").to_string();
    (rec.n, rec.m, rec.k) = (g.n(), g.m(), k);
    rec.command = format!("solve --mode {mode}");

    let start = Instant::now();
    let exe = std::env::current_exe().expect("path of the running executable");
    let child = Command::new(exe)
        .arg("solve")
        .arg("--input")
        .arg(&job.path)
        .args(["-k", &k.to_string(), "--mode", &mode])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn();
    let Ok(mut child) = child else {
        rec.outcome = "error".into();
        return rec;
    };
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(_) => break None,
        }
    };
    rec.wall_ms = start.elapsed().as_millis();
    let Some(status) = status else {
        rec.outcome = "timeout".into();
        return rec;
    };
    let mut out = String::new();
    if let Some(mut so) = child.stdout.take() {
        let _ = so.read_to_string(&mut out);
    }
    rec.outcome = match status.code() {
        Some(0) => "ok".into(),
        Some(c) if c == EXIT_BUDGET as i32 => "budget".into(),
        _ => "error".into(),
    };
    if let Some(line) = out.lines().find(|l| !l.starts_with('c')) {
        rec.verdict = line.trim_start_matches("s ").to_string();
    }
    rec.cost = field(&out, "c witness", "cost").unwrap_or("").to_string();
    rec.table_entries = field(&out, "c stats", "table_entries").unwrap_or("").to_string();
    rec.peak_candidates = field(&out, "c stats", "peak_candidates").unwrap_or("").to_string();
    rec
}

pub fn run(a: &BenchArgs) -> CliResult {
    let done = finished_ids(&a.output)?;
    let todo: Vec<Job> = instances(&a.dir)?.into_iter().filter(|j| !done.contains(&j.id)).collect();
    let fresh = fs::metadata(&a.output).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&a.output)
        .map_err(|e| Failure::internal(format!("{}: {e}", a.output.display())))?;
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let csv_err = |e: csv::Error| Failure::internal(format!("{}: {e}", a.output.display()));
    if fresh {
        wr.write_record(HEADER).map_err(csv_err)?;
        wr.flush().map_err(|e| Failure::internal(e.to_string()))?;
    }
    println!("c bench: {} to run, {} already recorded", todo.len(), done.len());

    let timeout = Duration::from_secs(a.timeout_secs);
    let queue = Mutex::new(todo.into_iter());
    let (tx, rx) = mpsc::channel::<BenchRecord>();
    thread::scope(|s| -> CliResult {
        for _ in 0..a.jobs.max(1) {
            let tx = tx.clone();
            let queue = &queue;
            s.spawn(move || loop {
                let next = queue.lock().expect("queue lock").next();
                let Some(job) = next else { break };
                if tx.send(run_one(&job, a.k, timeout)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for rec in rx {
            println!("c {} {} {} {}ms", rec.id, rec.outcome, rec.verdict, rec.wall_ms);
            wr.write_record(rec.fields()).map_err(csv_err)?;
            wr.flush().map_err(|e| Failure::internal(e.to_string()))?;
        }
        Ok(())
    })
}
