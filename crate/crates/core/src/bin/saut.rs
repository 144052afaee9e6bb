use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use saut_core::control::psl_action;
use saut_core::hom::InjectivityMode;
use saut_core::orchestrator::checkpoint::to_pretty;
use saut_core::orchestrator::{resume, run_search, verify_file, RunOptions, RunReport, RunStatus, SearchConfig};
use saut_core::relations::check_gersten;
use saut_core::search::{Certificate, InnerTest, Origin};
use saut_core::Error;

/// Search for nontrivial actions of SAut(F_n) on small sets.
#[derive(Parser)]
#[command(name = "saut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a degree range for one rank.
    Search(SearchArgs),
    /// Continue a checkpointed sweep.
    Resume {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, env = "SAUT_THREADS")]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Re-audit a certificate file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Emit a known certificate.
    Control {
        #[command(subcommand)]
        which: ControlCommand,
    },
    /// Check the relations on the automorphisms themselves.
    Selftest {
        #[command(subcommand)]
        which: SelftestCommand,
    },
}

#[derive(Subcommand)]
enum ControlCommand {
    /// The action on the nonzero vectors of F_2^n.
    Psl {
        #[arg(long)]
        rank: usize,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SelftestCommand {
    Gersten {
        #[arg(long)]
        rank: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Injectivity {
    Auto,
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Inner {
    R2,
    Full,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    rank: usize,
    /// Inclusive range such as `2..7`.
    #[arg(long, value_parser = parse_range)]
    degrees: (usize, usize),
    #[arg(long, env = "SAUT_THREADS")]
    threads: Option<usize>,
    /// Checkpoint directory; defaults to a fresh directory under SAUT_CHECKPOINT_ROOT when that is set.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    injectivity: Injectivity,
    #[arg(long, value_enum, default_value = "on")]
    compat: Switch,
    #[arg(long)]
    budget_tau: Option<u64>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_multisets: Option<usize>,
    #[arg(long, value_enum, default_value = "r2")]
    inner: Inner,
    #[arg(long)]
    shard_size: Option<u64>,
    #[arg(long)]
    no_early_stop: bool,
    /// Machine-readable report on standard output.
    #[arg(long)]
    json: bool,
    /// Progress lines on standard error.
    #[arg(long)]
    progress: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower degree {lo:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper degree {hi:?}"))?;
    Ok((lo, hi))
}

fn print_report(report: &RunReport, json: bool) -> Result<(), Error> {
    if json {
        print!("{}", to_pretty(report)?);
        return Ok(());
    }
    println!("rank {}: degrees {}..{}", report.rank, report.degree_lo, report.degree_hi);
    for d in &report.degrees {
        let line = match &d.outcome {
            saut_core::orchestrator::DegreeOutcome::Exhausted { counts } => format!(
                "exhausted ({} classes, {} candidates, {} passed r2)",
                counts.after_compatibility, counts.candidates_tested, counts.passed_inner
            ),
            saut_core::orchestrator::DegreeOutcome::Nontrivial { alpha_index, tau_index } => {
                format!("nontrivial action (class {alpha_index}, candidate {tau_index})")
            }
            saut_core::orchestrator::DegreeOutcome::CapacityError { message } => format!("capacity error: {message}"),
        };
        println!("  m = {:>2}: {line}", d.m);
    }
    println!("{}", report.statement);
    Ok(())
}

fn finish(status: RunStatus, json: bool, started: Instant) -> Result<(), Error> {
    match status {
        RunStatus::Complete(report) => {
            print_report(&report, json)?;
            eprintln!("elapsed {:.2}s", started.elapsed().as_secs_f64());
            Ok(())
        }
        RunStatus::Interrupted { steps } => {
            eprintln!("interrupted after {steps} steps");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let started = Instant::now();
    match cli.command {
        Command::Search(a) => {
            let mut cfg = SearchConfig::new(a.rank, a.degrees.0, a.degrees.1);
            cfg.injectivity = match a.injectivity {
                Injectivity::Auto => InjectivityMode::Auto,
                Injectivity::On => InjectivityMode::On,
                Injectivity::Off => InjectivityMode::Off,
            };
            cfg.compatibility = matches!(a.compat, Switch::On);
            cfg.early_stop = !a.no_early_stop;
            cfg.inner = match a.inner {
                Inner::R2 => InnerTest::R2,
                Inner::Full => InnerTest::Full,
            };
            if let Some(b) = a.budget_tau {
                cfg.tau_budget = b;
            }
            if let Some(b) = a.budget_nodes {
                cfg.node_budget = b;
            }
            if let Some(b) = a.budget_multisets {
                cfg.multiset_bound = b;
            }
            if let Some(s) = a.shard_size {
                cfg.shard_size = s;
            }
            let checkpoint = a.checkpoint.or_else(|| {
                std::env::var_os("SAUT_CHECKPOINT_ROOT").map(|root| {
                    PathBuf::from(root).join(format!("rank{}_m{}-{}", cfg.rank, cfg.degree_lo, cfg.degree_hi))
                })
            });
            let opts = RunOptions { threads: a.threads, checkpoint, progress: a.progress, stop_after_steps: None };
            finish(run_search(&cfg, &opts)?, a.json, started)
        }
        Command::Resume { checkpoint, threads, json } => {
            let opts = RunOptions { threads, ..Default::default() };
            finish(resume(&checkpoint, &opts)?, json, started)
        }
        Command::Verify { file, json } => {
            let (cert, check) = verify_file(&file)?;
            if json {
                print!("{}", to_pretty(&check)?);
            } else {
                let kind = match &check.classification {
                    Some(c) => format!("{c:?}").to_lowercase(),
                    None => "exhaustion record".to_string(),
                };
                println!("{}: {} ({kind}, degree {})", file.display(), if check.passed { "pass" } else { "FAIL" }, cert.degree());
                for p in &check.problems {
                    println!("  {p}");
                }
            }
            if check.passed {
                Ok(())
            } else {
                Err(Error::Consistency("certificate failed verification".into()))
            }
        }
        Command::Control { which: ControlCommand::Psl { rank, out } } => {
            let t = psl_action(rank)?;
            let origin = Origin::Control { description: format!("GL_{rank}(F_2) acting on the nonzero vectors of F_2^{rank}") };
            let cert = Certificate::from_images(&t, origin)?;
            let text = to_pretty(&cert)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Selftest { which: SelftestCommand::Gersten { rank } } => {
            let audit = check_gersten(rank)?;
            println!(
                "rank {rank}: {} relation instances checked (r1 {}, r2 {}, r3 {}, r4 {}), {} failures",
                audit.total_checked(),
                audit.checked[0],
                audit.checked[1],
                audit.checked[2],
                audit.checked[3],
                audit.failures.len()
            );
            for f in &audit.failures {
                println!("  {}: {}", f.family, f.witness);
            }
            if audit.passed() {
                Ok(())
            } else {
                Err(Error::Consistency("relations fail on the automorphisms".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
