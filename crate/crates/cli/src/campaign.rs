//! The campaign driver: enumerates the grid, runs it in parallel and
//! aggregates rows in case-id order.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use charsum_core::bounds::BOUND_NAMES;
use charsum_core::charmod::MultChar;
use charsum_core::padic::PrimePower;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CampaignConfig;
use crate::corpus::{corpus, Pair};
use crate::engine::{Checks, PairRun};
use crate::error::{CliError, CliResult};
use crate::row::{CaseRow, CsvSink};

/// Aggregate statistics of a campaign.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub cases: u64,
    pub pairs: BTreeMap<u64, usize>,
    /// Rows with at least one failed check.
    pub violations: u64,
    /// Failed rows per check.
    pub failed: BTreeMap<String, u64>,
    /// `max |S| / bound` per applicable bound.
    pub max_ratio: BTreeMap<String, f64>,
    pub applied_bounds: u64,
    pub reduced: u64,
    pub degenerate: u64,
    pub local_checks: u64,
    pub closed_form_checks: u64,
    pub relation_checks: u64,
    pub identity_checks: u64,
    pub oracle_checks: u64,
    /// A few failing rows for diagnosis.
    pub examples: Vec<String>,
    pub seconds: f64,
}

impl Summary {
    pub fn add(&mut self, row: &CaseRow) {
        self.cases += 1;
        let s = row.brute_abs.unwrap_or(row.fast_abs);
        for (name, b) in BOUND_NAMES
            .iter()
            .zip(&row.bounds)
            .filter_map(|(n, b)| b.map(|b| (n, b)))
            .chain(std::iter::once((&"trivial", row.trivial)))
        {
            self.applied_bounds += 1;
            if b > 0.0 {
                let r = self.max_ratio.entry(name.to_string()).or_insert(0.0);
                *r = r.max(s / b);
            }
        }
        self.reduced += u64::from(row.reduced);
        self.degenerate += u64::from(
            row.classification == "DEGENERATE" || row.classification == "CONSTANT_ON_DOMAIN",
        );
        self.local_checks += u64::from(row.n_local);
        self.closed_form_checks += u64::from(row.n_multone);
        self.relation_checks += u64::from(row.relations);
        self.identity_checks += u64::from(row.identity_checked);
        self.oracle_checks += u64::from(row.oracle_checked);
        let flags = [
            ("bounds", row.ok_bounds),
            ("eval", row.ok_eval),
            ("local", row.ok_local),
            ("structural", row.ok_structural),
            ("identity", row.ok_identity),
            ("oracle", row.ok_oracle),
        ];
        for (name, ok) in flags {
            if !ok {
                *self.failed.entry(name.to_owned()).or_default() += 1;
            }
        }
        if !row.passed() {
            self.violations += 1;
            if self.examples.len() < 20 {
                self.examples.push(format!(
                    "#{} p={} m={} f={} g={} c={} κ={}: {}",
                    row.id,
                    row.p,
                    row.m,
                    row.f,
                    row.g,
                    row.c,
                    row.kappa,
                    row.failures.join(";")
                ));
            }
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "cases {}  violations {}  reduced {:.1}%  degenerate {}  time {:.1}s\n",
            self.cases,
            self.violations,
            100.0 * self.reduced as f64 / self.cases.max(1) as f64,
            self.degenerate,
            self.seconds
        );
        out += &format!(
            "checks: bounds {}  local {}  closed-form {}  relations {}  identities {}  oracle {}\n",
            self.applied_bounds,
            self.local_checks,
            self.closed_form_checks,
            self.relation_checks,
            self.identity_checks,
            self.oracle_checks
        );
        for (name, r) in &self.max_ratio {
            out += &format!("  max |S|/{name:<16} {r:.6}\n");
        }
        for (name, n) in &self.failed {
            out += &format!("  failed {name}: {n}\n");
        }
        for e in &self.examples {
            out += &format!("  {e}\n");
        }
        out
    }
}

struct Job<'a> {
    pair: &'a Pair,
    pp: PrimePower,
    chars: &'a [MultChar],
    first_id: u64,
}

/// The moduli of the grid, in order.
pub fn tiers(cfg: &CampaignConfig) -> Vec<PrimePower> {
    cfg.primes
        .iter()
        .flat_map(|&p| (cfg.m_min..=cfg.m_max).filter_map(move |m| PrimePower::new(p, m).ok()))
        .filter(|pp| pp.q() <= cfg.max_q)
        .collect()
}

pub fn checks(cfg: &CampaignConfig) -> Checks {
    Checks {
        tol_eval: cfg.tol_eval,
        tol_bound: cfg.tol_bound,
        oracle_stride: cfg.oracle_stride,
        oracle_full_q: cfg.oracle_full_q,
        max_q: cfg.max_q,
    }
}

/// Runs every case, handing rows to `sink` in case-id order.
pub fn run_campaign(
    cfg: &CampaignConfig,
    mut sink: impl FnMut(&CaseRow) -> CliResult<()>,
) -> CliResult<Summary> {
    cfg.validate()?;
    let start = Instant::now();
    let mut summary = Summary::default();
    let corpora: BTreeMap<u64, Vec<Pair>> =
        cfg.primes.iter().map(|&p| (p, corpus(cfg, p))).collect();
    summary.pairs = corpora.iter().map(|(p, c)| (*p, c.len())).collect();
    let grid: Vec<(PrimePower, Vec<MultChar>)> = tiers(cfg)
        .into_iter()
        .map(|pp| {
            (
                pp,
                MultChar::all(pp)
                    .into_iter()
                    .step_by(cfg.char_stride)
                    .collect(),
            )
        })
        .collect();
    let mut jobs = Vec::new();
    let mut next_id = 0u64;
    for (pp, chars) in &grid {
        for pair in &corpora[&pp.p()] {
            jobs.push(Job {
                pair,
                pp: *pp,
                chars,
                first_id: next_id,
            });
            next_id += chars.len() as u64;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let checks = checks(cfg);
    for batch in jobs.chunks(cfg.jobs * 8) {
        let rows: Vec<Vec<CaseRow>> = pool.install(|| {
            batch
                .par_iter()
                .map(|job| {
                    let run = PairRun {
                        family: job.pair.family.name(),
                        f: &job.pair.f,
                        g: &job.pair.g,
                        pp: job.pp,
                    };
                    run.run(job.chars, job.first_id, &checks)
                })
                .collect()
        });
        for row in rows.iter().flatten() {
            summary.add(row);
            sink(row)?;
        }
    }
    summary.seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// `cases.csv`, `cases.jsonl` and `summary.json` inside one directory.
pub struct OutputDir {
    dir: PathBuf,
    csv: CsvSink<BufWriter<File>>,
    jsonl: BufWriter<File>,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_owned(),
        source,
    }
}

impl OutputDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let csv_path = dir.join("cases.csv");
        let csv_file = File::create(&csv_path).map_err(io_err(&csv_path))?;
        let csv = CsvSink::new(BufWriter::new(csv_file)).map_err(io_err(&csv_path))?;
        let jsonl_path = dir.join("cases.jsonl");
        let jsonl = BufWriter::new(File::create(&jsonl_path).map_err(io_err(&jsonl_path))?);
        Ok(Self {
            dir: dir.to_owned(),
            csv,
            jsonl,
        })
    }

    pub fn write(&mut self, row: &CaseRow) -> CliResult<()> {
        self.csv.write(row).map_err(io_err(&self.dir))?;
        writeln!(self.jsonl, "{}", row.json_line()).map_err(io_err(&self.dir))
    }

    pub fn finish(mut self, summary: &Summary) -> CliResult<()> {
        self.csv.finish().map_err(io_err(&self.dir))?;
        self.jsonl.flush().map_err(io_err(&self.dir))?;
        let path = self.dir.join("summary.json");
        let text = serde_json::to_string_pretty(summary).expect("summary serializes");
        fs::write(&path, text + "\n").map_err(io_err(&path))
    }
}

/// Runs the campaign and writes its artifacts when an output directory is configured.
pub fn run_to_output(cfg: &CampaignConfig) -> CliResult<Summary> {
    match &cfg.out {
        None => run_campaign(cfg, |_| Ok(())),
        Some(dir) => {
            let mut out = OutputDir::create(dir)?;
            let summary = run_campaign(cfg, |row| out.write(row))?;
            out.finish(&summary)?;
            Ok(summary)
        }
    }
}
