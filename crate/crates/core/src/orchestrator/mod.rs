//! Runs the three phases over a range of degrees: build the source groups and
//! their subgroup classes, enumerate and filter restriction classes, then test
//! every candidate image of `rho_12` in parallel shards.

pub mod checkpoint;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::{subgroup_classes, SubgroupClass};
use crate::error::{Error, Result};
use crate::group::{ConjugacyOptions, DEFAULT_NODE_BUDGET};
use crate::hom::{compatibility_filter, injectivity_justification, Constituents, HomClass, InjectivityMode, DEFAULT_MULTISET_BOUND};
use crate::search::{
    check_certificate, nontrivial_certificate, run_shard, Certificate, CertificateCheck, ExhaustionCounts, InnerTest,
    PreparedAlpha, ShardResult, DEFAULT_TAU_BUDGET,
};
use crate::sources::SourceGroups;
use checkpoint::{certificate_file, p2_file, p3_file, sha256_hex, to_jsonl, to_pretty, Checkpoint, LedgerRecord};

pub const DEFAULT_SHARD_SIZE: u64 = 4096;
pub const DEFAULT_BATCH_SHARDS: usize = 64;

/// Everything that determines the results of a run. Thread count and file
/// locations are deliberately absent: they do not change any output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub rank: usize,
    pub degree_lo: usize,
    pub degree_hi: usize,
    pub injectivity: InjectivityMode,
    pub compatibility: bool,
    pub tau_budget: u64,
    pub node_budget: u64,
    pub multiset_bound: usize,
    pub early_stop: bool,
    pub inner: InnerTest,
    pub shard_size: u64,
    pub batch_shards: usize,
}

impl SearchConfig {
    pub fn new(rank: usize, degree_lo: usize, degree_hi: usize) -> Self {
        SearchConfig {
            rank,
            degree_lo,
            degree_hi,
            injectivity: InjectivityMode::Auto,
            compatibility: true,
            tau_budget: DEFAULT_TAU_BUDGET,
            node_budget: DEFAULT_NODE_BUDGET,
            multiset_bound: DEFAULT_MULTISET_BOUND,
            early_stop: true,
            inner: InnerTest::R2,
            shard_size: DEFAULT_SHARD_SIZE,
            batch_shards: DEFAULT_BATCH_SHARDS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::input(msg.to_string()));
        if self.rank < 3 {
            return fail("rank must be at least 3");
        }
        if self.degree_lo < 1 || self.degree_lo > self.degree_hi {
            return fail("degree range must satisfy 1 <= lo <= hi");
        }
        if self.tau_budget == 0 || self.node_budget == 0 || self.multiset_bound == 0 {
            return fail("budgets must be positive");
        }
        if self.shard_size == 0 || self.batch_shards == 0 {
            return fail("shard size and batch size must be positive");
        }
        Ok(())
    }
}

/// How a run executes; none of this affects its results.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// One structured line per completed batch on standard error.
    pub progress: bool,
    /// Stop after this many completed steps (a phase-2 result or a batch of shards).
    pub stop_after_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DegreeOutcome {
    Exhausted { counts: ExhaustionCounts },
    Nontrivial { alpha_index: usize, tau_index: u64 },
    CapacityError { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub m: usize,
    #[serde(flatten)]
    pub outcome: DegreeOutcome,
}

/// Results of a sweep. Contains no timings, so identical runs give identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub rank: usize,
    pub degree_lo: usize,
    pub degree_hi: usize,
    pub degrees: Vec<DegreeReport>,
    /// `x_n >= lower_bound`: one more than the largest exhausted degree.
    pub lower_bound: Option<usize>,
    /// `x_n <= upper_bound`: the smallest degree with a verified action.
    pub upper_bound: Option<usize>,
    pub statement: String,
}

impl RunReport {
    pub fn build(cfg: &SearchConfig, degrees: Vec<DegreeReport>) -> Self {
        let lower_bound = degrees
            .iter()
            .filter(|d| matches!(d.outcome, DegreeOutcome::Exhausted { .. }))
            .map(|d| d.m + 1)
            .max();
        let upper_bound =
            degrees.iter().filter(|d| matches!(d.outcome, DegreeOutcome::Nontrivial { .. })).map(|d| d.m).min();
        let n = cfg.rank;
        let statement = match (lower_bound, upper_bound) {
            (Some(l), Some(u)) if l == u => format!("x_{n} = {u}"),
            (Some(l), Some(u)) => format!("{l} <= x_{n} <= {u}"),
            (None, Some(u)) => format!("x_{n} <= {u}"),
            (Some(l), None) => format!("x_{n} >= {l}"),
            (None, None) => format!("no conclusion for x_{n}"),
        };
        RunReport { rank: n, degree_lo: cfg.degree_lo, degree_hi: cfg.degree_hi, degrees, lower_bound, upper_bound, statement }
    }

    /// An action on `m` points gives one on `m + 1` points, so no degree above a
    /// verified action may be exhausted.
    pub fn check_consistency(&self) -> Result<()> {
        if let (Some(l), Some(u)) = (self.lower_bound, self.upper_bound) {
            if l > u {
                return Err(Error::Consistency(format!(
                    "rank {}: exhausted at degree {} above a verified action at degree {u}",
                    self.rank,
                    l - 1
                )));
            }
        }
        Ok(())
    }
}

/// Checks that minimal degrees do not decrease with the rank across reports.
pub fn check_monotonicity(reports: &[RunReport]) -> Result<()> {
    for a in reports {
        a.check_consistency()?;
        for b in reports.iter().filter(|b| b.rank > a.rank) {
            if let (Some(l), Some(u)) = (a.lower_bound, b.upper_bound) {
                if l > u {
                    return Err(Error::Consistency(format!(
                        "x_{} >= {l} but x_{} <= {u}",
                        a.rank, b.rank
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Complete(RunReport),
    Interrupted { steps: usize },
}

/// One summary line per subgroup class, recorded with the checkpoint.
#[derive(Debug, Clone, Serialize)]
struct ClassLine<'a> {
    source: &'a str,
    id: usize,
    #[serde(flatten)]
    class: &'a SubgroupClass,
}

struct Interrupted;

struct Engine {
    cfg: SearchConfig,
    opts: RunOptions,
    sources: SourceGroups,
    constituents_d: Constituents,
    constituents_a: Constituents,
    checkpoint: Option<Checkpoint>,
    steps: usize,
    pool: rayon::ThreadPool,
    certificates: Vec<(usize, Certificate)>,
    started: Instant,
}

/// Phase-2 result for one degree.
struct Restrictions {
    alphas: Vec<HomClass>,
    counts: ExhaustionCounts,
    justifications: Vec<String>,
}

impl Engine {
    fn new(cfg: SearchConfig, opts: RunOptions, checkpoint: Option<Checkpoint>) -> Result<(Self, String)> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = opts.threads {
            if t == 0 {
                return Err(Error::input("thread count must be positive"));
            }
            builder = builder.num_threads(t);
        }
        let pool = builder.build().map_err(|e| Error::input(format!("thread pool: {e}")))?;
        let sources = SourceGroups::new(cfg.rank)?;
        let classes_d = subgroup_classes(&sources.d_prime)?;
        let classes_a = subgroup_classes(&sources.alternating_next)?;
        let mut lines = Vec::new();
        for (g, classes) in [(&sources.d_prime, &classes_d), (&sources.alternating_next, &classes_a)] {
            lines.extend(classes.iter().enumerate().map(|(id, class)| ClassLine { source: g.name(), id, class }));
        }
        let p1 = to_jsonl(&lines)?;
        let constituents_d = Constituents::new(&sources.d_prime, &classes_d, cfg.degree_hi)?;
        let constituents_a = Constituents::new(&sources.alternating_next, &classes_a, cfg.degree_hi)?;
        let engine = Engine {
            cfg,
            opts,
            sources,
            constituents_d,
            constituents_a,
            checkpoint,
            steps: 0,
            pool,
            certificates: Vec::new(),
            started: Instant::now(),
        };
        Ok((engine, p1))
    }

    fn step(&mut self) -> std::result::Result<(), Interrupted> {
        self.steps += 1;
        match self.opts.stop_after_steps {
            Some(k) if self.steps >= k => Err(Interrupted),
            _ => Ok(()),
        }
    }

    fn ledger(&self) -> &[LedgerRecord] {
        self.checkpoint.as_ref().map(|c| c.records()).unwrap_or(&[])
    }

    fn append(&mut self, records: Vec<LedgerRecord>) -> Result<()> {
        match self.checkpoint.as_mut() {
            Some(c) => c.append(records),
            None => Ok(()),
        }
    }

    fn restrictions(&self, m: usize) -> Result<Restrictions> {
        let n = self.cfg.rank;
        let bound = self.cfg.multiset_bound;
        let mut alphas = self.constituents_d.enumerate(m, bound)?;
        let mut betas = self.constituents_a.enumerate(m, bound)?;
        let mut counts = ExhaustionCounts { alpha_classes: alphas.len(), beta_classes: betas.len(), ..Default::default() };
        let mut justifications = Vec::new();
        if let Some(reason) = injectivity_justification(self.cfg.injectivity, n, m) {
            alphas.retain(|h| h.injective);
            betas.retain(|h| h.injective);
            justifications.push(format!("non-injective classes dropped: {reason}"));
        }
        counts.after_injectivity = alphas.len();
        if self.cfg.compatibility {
            let options = ConjugacyOptions { node_budget: self.cfg.node_budget };
            alphas = compatibility_filter(&alphas, &betas, n, m, options)?;
            justifications.push(format!(
                "restrictions to A_{n} must be conjugate in S_{m} to the restriction of a class from A_{}",
                n + 1
            ));
        }
        counts.after_compatibility = alphas.len();
        Ok(Restrictions { alphas, counts, justifications })
    }

    fn run(&mut self) -> Result<std::result::Result<RunReport, Interrupted>> {
        let mut degrees = Vec::new();
        for m in self.cfg.degree_lo..=self.cfg.degree_hi {
            let outcome = match self.run_degree(m)? {
                Ok(o) => o,
                Err(Interrupted) => return Ok(Err(Interrupted)),
            };
            let stop = self.cfg.early_stop && matches!(outcome, DegreeOutcome::Nontrivial { .. });
            degrees.push(DegreeReport { m, outcome });
            if stop {
                break;
            }
        }
        Ok(Ok(RunReport::build(&self.cfg, degrees)))
    }

    fn recorded_outcome(&self, m: usize) -> Option<DegreeOutcome> {
        self.ledger().iter().find_map(|r| match r {
            LedgerRecord::Degree { m: d, outcome } if *d == m => Some(outcome.clone()),
            _ => None,
        })
    }

    fn run_degree(&mut self, m: usize) -> Result<std::result::Result<DegreeOutcome, Interrupted>> {
        if let Some(outcome) = self.recorded_outcome(m) {
            if let Some(cp) = &self.checkpoint {
                let file = certificate_file(self.cfg.rank, m);
                if !matches!(outcome, DegreeOutcome::CapacityError { .. }) && !cp.path(&file).exists() {
                    return Err(Error::checkpoint(cp.path(&file), "certificate listed in the ledger is missing"));
                }
            }
            return Ok(Ok(outcome));
        }
        let outcome = match self.search_degree(m)? {
            Ok(Ok(o)) => o,
            Ok(Err(message)) => DegreeOutcome::CapacityError { message },
            Err(Interrupted) => return Ok(Err(Interrupted)),
        };
        self.append(vec![LedgerRecord::Degree { m, outcome: outcome.clone() }])?;
        Ok(Ok(outcome))
    }

    /// `Ok(Err(message))` is a capacity failure for this degree only.
    #[allow(clippy::type_complexity)]
    fn search_degree(&mut self, m: usize) -> Result<std::result::Result<std::result::Result<DegreeOutcome, String>, Interrupted>> {
        let n = self.cfg.rank;
        // Phase 2 is recomputed on resume and must reproduce the recorded file.
        let restrictions = match self.restrictions(m) {
            Ok(r) => r,
            Err(Error::Capacity(msg)) => return Ok(Ok(Err(msg))),
            Err(e) => return Err(e),
        };
        let p2_text = to_jsonl(&restrictions.alphas)?;
        let p2_sha = sha256_hex(p2_text.as_bytes());
        let recorded = self.ledger().iter().find_map(|r| match r {
            LedgerRecord::P2 { m: d, file_sha256 } if *d == m => Some(file_sha256.clone()),
            _ => None,
        });
        match (recorded, &self.checkpoint) {
            (Some(sha), Some(cp)) => {
                let on_disk = sha256_hex(cp.read_file(&p2_file(m))?.as_bytes());
                if on_disk != sha || sha != p2_sha {
                    return Err(Error::checkpoint(cp.path(&p2_file(m)), "restriction classes differ from the ledger"));
                }
            }
            _ => {
                if let Some(cp) = &self.checkpoint {
                    cp.write_file(&p2_file(m), &p2_text)?;
                }
                self.append(vec![LedgerRecord::P2 { m, file_sha256: p2_sha }])?;
                if self.step().is_err() {
                    return Ok(Err(Interrupted));
                }
            }
        }

        let Restrictions { alphas, mut counts, justifications } = restrictions;
        let mut prepared = Vec::with_capacity(alphas.len());
        for (k, a) in alphas.iter().enumerate() {
            let p = match PreparedAlpha::new(&self.sources, a) {
                Ok(p) => p,
                Err(Error::Capacity(msg)) => return Ok(Ok(Err(format!("class {k}: {msg}")))),
                Err(e) => return Err(e),
            };
            if p.candidate_count() > self.cfg.tau_budget as u128 {
                return Ok(Ok(Err(format!(
                    "class {k}: centralizer of order {} exceeds the candidate budget {}",
                    p.candidate_count(),
                    self.cfg.tau_budget
                ))));
            }
            prepared.push(p);
        }
        let mut shards: Vec<(usize, u64, u64)> = Vec::new();
        for (k, p) in prepared.iter().enumerate() {
            let total = p.candidate_count() as u64;
            let mut start = 0;
            while start < total {
                let end = (start + self.cfg.shard_size).min(total);
                shards.push((k, start, end));
                start = end;
            }
        }

        let mut done: Vec<ShardResult> = self
            .ledger()
            .iter()
            .filter_map(|r| match r {
                LedgerRecord::Shard { m: d, result } if *d == m => Some(result.clone()),
                _ => None,
            })
            .collect();
        for (r, s) in done.iter().zip(&shards) {
            if (r.alpha, r.start, r.end) != *s {
                let path = self.checkpoint.as_ref().map(|c| c.path(checkpoint::LEDGER_FILE)).unwrap_or_default();
                return Err(Error::checkpoint(path, format!("shard record for degree {m} does not match the shard plan")));
            }
        }
        let mut found = done.iter().filter_map(|r| r.found.map(|t| (r.alpha, t))).min();
        let mut next = done.len();
        while found.is_none() && next < shards.len() {
            let batch = &shards[next..(next + self.cfg.batch_shards).min(shards.len())];
            let inner = self.cfg.inner;
            let prepared_ref = &prepared;
            let results: Vec<Result<ShardResult>> = self.pool.install(|| {
                batch.par_iter().map(|&(k, s, e)| run_shard(&prepared_ref[k], k, s, e, inner)).collect()
            });
            let results = results.into_iter().collect::<Result<Vec<_>>>()?;
            next += batch.len();
            found = results.iter().filter_map(|r| r.found.map(|t| (r.alpha, t))).min();
            if self.opts.progress {
                let tested: u64 = results.iter().map(|r| r.tested).sum();
                let secs = self.started.elapsed().as_secs_f64();
                eprintln!(
                    "{{\"rank\":{n},\"m\":{m},\"shards_done\":{next},\"shards_total\":{},\"tested\":{tested},\"elapsed_s\":{secs:.3}}}",
                    shards.len()
                );
            }
            done.extend(results.iter().cloned());
            if let Some(cp) = &self.checkpoint {
                cp.write_file(&p3_file(m), &to_jsonl(&done)?)?;
            }
            self.append(results.into_iter().map(|result| LedgerRecord::Shard { m, result }).collect())?;
            if self.step().is_err() {
                return Ok(Err(Interrupted));
            }
        }

        let (certificate, outcome) = match found {
            Some((k, tau_index)) => {
                let cert = nontrivial_certificate(&prepared[k], k, &alphas[k], tau_index)?;
                (cert, DegreeOutcome::Nontrivial { alpha_index: k, tau_index })
            }
            None => {
                for r in &done {
                    counts.candidates_tested += r.tested;
                    counts.passed_inner += r.passed_inner;
                    counts.audit_rejected += r.audit_rejected;
                }
                let cert = Certificate::Exhausted { n, m, counts: counts.clone(), filter_justifications: justifications };
                (cert, DegreeOutcome::Exhausted { counts })
            }
        };
        if let Some(cp) = &self.checkpoint {
            cp.write_file(&certificate_file(n, m), &to_pretty(&certificate)?)?;
        }
        self.certificates.push((m, certificate));
        Ok(Ok(Ok(outcome)))
    }

    fn finish(&mut self, report: &RunReport) -> Result<()> {
        if let Some(cp) = &self.checkpoint {
            cp.write_file(checkpoint::REPORT_FILE, &to_pretty(report)?)?;
        }
        report.check_consistency()
    }
}

/// Runs a sweep from scratch. With a checkpoint directory, every completed
/// step is recorded there and the run can be resumed.
pub fn run_search(cfg: &SearchConfig, opts: &RunOptions) -> Result<RunStatus> {
    cfg.validate()?;
    let checkpoint = match &opts.checkpoint {
        Some(dir) => Some(Checkpoint::create(dir, cfg)?),
        None => None,
    };
    let (mut engine, p1) = Engine::new(cfg.clone(), opts.clone(), checkpoint)?;
    if let Some(cp) = &engine.checkpoint {
        cp.write_file(checkpoint::P1_FILE, &p1)?;
    }
    drive(&mut engine)
}

/// Continues a checkpointed run; on a completed run this just rebuilds the report.
pub fn resume(dir: &Path, opts: &RunOptions) -> Result<RunStatus> {
    let (checkpoint, header) = Checkpoint::open(dir)?;
    header.config.validate()?;
    let mut opts = opts.clone();
    opts.checkpoint = Some(dir.to_path_buf());
    let (mut engine, p1) = Engine::new(header.config, opts, Some(checkpoint))?;
    let cp = engine.checkpoint.as_ref().expect("opened above");
    if cp.read_file(checkpoint::P1_FILE)? != p1 {
        return Err(Error::checkpoint(cp.path(checkpoint::P1_FILE), "subgroup classes differ from this build"));
    }
    drive(&mut engine)
}

fn drive(engine: &mut Engine) -> Result<RunStatus> {
    match engine.run()? {
        Ok(report) => {
            engine.finish(&report)?;
            Ok(RunStatus::Complete(report))
        }
        Err(Interrupted) => Ok(RunStatus::Interrupted { steps: engine.steps }),
    }
}

/// Runs a sweep without files and returns the report with every certificate produced.
pub fn run_in_memory(cfg: &SearchConfig, threads: Option<usize>) -> Result<(RunReport, Vec<(usize, Certificate)>)> {
    cfg.validate()?;
    let opts = RunOptions { threads, ..Default::default() };
    let (mut engine, _) = Engine::new(cfg.clone(), opts, None)?;
    match engine.run()? {
        Ok(report) => {
            engine.finish(&report)?;
            Ok((report, std::mem::take(&mut engine.certificates)))
        }
        Err(Interrupted) => unreachable!("no interrupt configured"),
    }
}

/// Reads and checks a certificate file.
pub fn verify_file(path: &Path) -> Result<(Certificate, CertificateCheck)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let cert: Certificate =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let check = check_certificate(&cert)?;
    Ok((cert, check))
}

/// Restriction classes surviving phase 2 at degree `m`, for inspection and tests.
pub fn restriction_classes(cfg: &SearchConfig, m: usize) -> Result<(Vec<HomClass>, ExhaustionCounts)> {
    cfg.validate()?;
    let (engine, _) = Engine::new(cfg.clone(), RunOptions { threads: Some(1), ..Default::default() }, None)?;
    let r = engine.restrictions(m)?;
    Ok((r.alphas, r.counts))
}
