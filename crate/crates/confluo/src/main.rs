use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use confluo::bench::{bench, BenchConfig};
use confluo::dataset_io::{dedup_sets, gen_corpus, label_histogram, label_runs, labels_from_runs, load_dir, print_classes, stem, LabelJob};
use confluo::portfolio_io::{invent, parse_space, InventConfig, DEFAULT_SPACE, DEFAULT_TEMPLATE};
use confluo::records::{read_jsonl, write_jsonl, matrix_from_records, RunRecord};
use confluo::runner::{render_witness, run_one};
use confluo::schedule_io::{combine, parse_schedule, print_schedule, run_schedule};
use confluo::strategy::{check, default_defs, parse_strategy, StrategyDefs};
use confluo::trs_io::{list_problems, load_problem, LoadError};
use confluo_core::dataset::balance;
use confluo_core::generator::{GenConfig, GenStats, gen_trs_indexed};
use confluo_core::portfolio::Beta;

/// Confluence prover with strategy portfolio tooling.
#[derive(Parser)]
#[command(name = "confluo", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Parallel {
    /// Threads used inside a single proof attempt.
    #[arg(long, env = "CONFLUO_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Proof attempts run at the same time.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide confluence of one problem and print YES, NO or MAYBE.
    Prove {
        problem: PathBuf,
        /// Strategy file; the built-in strategy when omitted.
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Definition to run; the last one in the file by default.
        #[arg(long)]
        entry: Option<String>,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, env = "CONFLUO_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Write the proof or disproof to this file.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Print the processor trace to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Generate random rewrite systems.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 12)]
        max_funs: usize,
        #[arg(long, default_value_t = 5)]
        max_consts: usize,
        #[arg(long, default_value_t = 8)]
        max_vars: usize,
        #[arg(long, default_value_t = 15)]
        max_rules: usize,
        #[arg(long, default_value_t = 8)]
        max_arity: usize,
        /// Probability of forcing left-linear rules.
        #[arg(long, default_value_t = 0.6)]
        left_linear: f64,
        #[arg(long, default_value_t = 1.6)]
        complex_bias: f64,
        #[arg(long, default_value_t = 15)]
        max_size: usize,
    },
    /// Group problems equal up to renaming and write classes.tsv.
    Dedup {
        /// Human-made problems; preferred as survivors.
        #[arg(long)]
        human: Option<PathBuf>,
        #[arg(long)]
        generated: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write surviving ids, one per line.
        #[arg(long)]
        survivors: Option<PathBuf>,
    },
    /// Run every strategy on every problem and record the runs.
    Label {
        #[arg(long)]
        problems: PathBuf,
        /// Directory of `.strategy` files; ids are file stems.
        #[arg(long)]
        strategies: PathBuf,
        /// Per-run limit in seconds.
        #[arg(long, default_value_t = 30.0)]
        limit: f64,
        #[command(flatten)]
        par: Parallel,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick a label-balanced subset from recorded runs.
    Balance {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 30.0)]
        limit: f64,
        /// Problems kept per label.
        #[arg(long, default_value_t = 300)]
        cap: usize,
        /// Unsolved problems kept.
        #[arg(long, default_value_t = 1200)]
        unsolved: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invent a strategy portfolio over a parameter space.
    Invent {
        /// Parameter-space file; the built-in space when omitted.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Strategy template; the built-in template when omitted.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        problems: PathBuf,
        /// Per-run limit in seconds.
        #[arg(long, default_value_t = 30.0)]
        limit: f64,
        #[command(flatten)]
        par: Parallel,
        /// Wall budget in hours.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 10)]
        generation_size: usize,
        #[arg(long, default_value_t = 200)]
        portfolio_cap: usize,
        /// Specialization budget in seconds.
        #[arg(long, default_value_t = 600.0)]
        spec_budget: f64,
        #[arg(long, default_value_t = 50)]
        spec_candidates: usize,
        #[arg(long, default_value_t = 3)]
        max_specializations: usize,
        #[arg(long, default_value_t = 100)]
        max_iterations: usize,
        /// Portfolio directory; an existing one is resumed.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a schedule from an evaluation matrix.
    Combine {
        #[arg(long)]
        matrix: PathBuf,
        /// Total budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long, default_value_t = 100)]
        shuffles: usize,
        /// Combine runs recorded with different worker counts.
        #[arg(long)]
        allow_mixed_workers: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a schedule on one problem.
    Run {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Directory with `<id>.strategy` files; defaults to `strategies/`
        /// next to the schedule.
        #[arg(long)]
        strategies: Option<PathBuf>,
        #[arg(long, env = "CONFLUO_WORKERS", default_value_t = 1)]
        workers: usize,
    },
    /// Run one strategy over a directory of problems.
    Bench {
        problems: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[command(flatten)]
        par: Parallel,
        /// JSONL report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Malformed input; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

fn input_err(e: impl std::fmt::Display) -> anyhow::Error {
    InputError(e.to_string()).into()
}

fn load(path: &Path) -> Result<confluo_core::Trs> {
    match load_problem(path) {
        Ok(f) => Ok(f.trs),
        Err(e @ LoadError::Parse { .. }) => Err(input_err(e)),
        Err(e) => Err(e.into()),
    }
}

fn load_set(dir: &Path) -> Result<Vec<(String, confluo_core::Trs)>> {
    load_dir(dir).map_err(|e| match e {
        LoadError::Parse { .. } => input_err(e),
        e => e.into(),
    })
}

fn load_strategy(path: Option<&Path>, entry: Option<&str>) -> Result<(StrategyDefs, String, String)> {
    let (defs, name) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| p.display().to_string())?;
            let d = parse_strategy(&text).map_err(|e| input_err(format!("{}:{e}", p.display())))?;
            (d, stem(p))
        }
        None => (default_defs(), "default".to_string()),
    };
    let entry = match entry {
        Some(e) => e.to_string(),
        None => defs.default_entry().ok_or_else(|| input_err("strategy file defines nothing"))?.to_string(),
    };
    check(&defs, &entry).map_err(input_err)?;
    Ok((defs, entry, name))
}

fn strategy_dir(dir: &Path) -> Result<Vec<(String, StrategyDefs)>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| dir.display().to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "strategy"))
        .collect();
    files.sort_by(|a, b| confluo_core::dataset::natural_cmp(&stem(a), &stem(b)));
    files
        .iter()
        .map(|p| {
            let (d, _, name) = load_strategy(Some(p), None)?;
            Ok((name, d))
        })
        .collect()
}

fn secs(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| input_err(format!("bad duration {s}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Prove { problem, strategy, entry, timeout, workers, certificate, trace } => {
            let trs = load(&problem)?;
            let (defs, entry, _) = load_strategy(strategy.as_deref(), entry.as_deref())?;
            let r = run_one(&defs, &entry, &trs, Some(secs(timeout)?), workers);
            println!("{}", r.answer);
            if let Some(o) = &r.outcome {
                if trace {
                    for t in &o.trace {
                        eprintln!("{} {}ms {}", t.processor, t.millis, t.result);
                    }
                }
                if let (Some(path), Some(w)) = (&certificate, o.witness()) {
                    let steps: Vec<String> = o.trace.iter().filter(|t| t.result != "fail").map(|t| t.processor.clone()).collect();
                    std::fs::write(path, render_witness(&trs, o.answer, w, &steps))?;
                }
            }
        }
        Cmd::Gen { out, count, max_funs, max_consts, max_vars, max_rules, max_arity, left_linear, complex_bias, max_size } => {
            let cfg = GenConfig {
                max_funs,
                max_consts,
                max_vars,
                max_rules,
                max_arity,
                left_linear_prob: left_linear,
                complex_bias,
                max_term_size: max_size,
                seed,
            };
            gen_corpus(&cfg, count, &out)?;
            let mut stats = GenStats::default();
            for i in 0..count {
                let (t, m) = gen_trs_indexed(&cfg, i);
                stats.add(&t, &m);
            }
            println!("{}", stats.summary());
        }
        Cmd::Dedup { human, generated, out, survivors } => {
            if human.is_none() && generated.is_none() {
                bail!("give --human and/or --generated");
            }
            let h = match &human {
                Some(d) => load_set(d)?,
                None => Vec::new(),
            };
            let g = match &generated {
                Some(d) => load_set(d)?,
                None => Vec::new(),
            };
            let classes = dedup_sets(&h, &g);
            std::fs::write(&out, print_classes(&classes))?;
            if let Some(p) = survivors {
                let ids: String = classes.iter().map(|c| format!("{}\n", c.survivor)).collect();
                std::fs::write(p, ids)?;
            }
            println!("{} problems, {} classes", h.len() + g.len(), classes.len());
        }
        Cmd::Label { problems, strategies, limit, par, out } => {
            let job = LabelJob {
                problems: load_set(&problems)?,
                strategies: strategy_dir(&strategies)?,
                limit: secs(limit)?,
                workers: par.workers,
                jobs: par.jobs,
                out: out.clone(),
            };
            let n = label_runs(&job)?;
            let runs: Vec<RunRecord> = read_jsonl(&out)?;
            let records = labels_from_runs(&runs, job.limit.as_millis() as u64);
            eprintln!("{n} new runs");
            for (label, count) in label_histogram(&records) {
                println!("{}\t{count}", label.as_deref().unwrap_or("unsolved"));
            }
        }
        Cmd::Balance { labels, limit, cap, unsolved, out } => {
            let runs: Vec<RunRecord> = read_jsonl(&labels)?;
            let records = labels_from_runs(&runs, secs(limit)?.as_millis() as u64);
            let ids = balance(&records, cap, unsolved, seed);
            let text: String = ids.iter().map(|i| format!("{i}\n")).collect();
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Invent {
            space,
            template,
            problems,
            limit,
            par,
            budget,
            generation_size,
            portfolio_cap,
            spec_budget,
            spec_candidates,
            max_specializations,
            max_iterations,
            out,
        } => {
            let space_text = match &space {
                Some(p) => std::fs::read_to_string(p).with_context(|| p.display().to_string())?,
                None => DEFAULT_SPACE.to_string(),
            };
            let space = parse_space(&space_text).map_err(|e| input_err(format!("parameter space: {e}")))?;
            let template = match &template {
                Some(p) => std::fs::read_to_string(p).with_context(|| p.display().to_string())?,
                None => DEFAULT_TEMPLATE.to_string(),
            };
            let problems: BTreeMap<_, _> = load_set(&problems)?.into_iter().collect();
            let beta = Beta {
                generation_size,
                portfolio_cap,
                eval_limit_ms: secs(limit)?.as_millis() as u64,
                spec_budget_ms: secs(spec_budget)?.as_millis() as u64,
                spec_max_candidates: spec_candidates,
                max_specializations,
                workers: par.workers,
                max_iterations,
                wall_budget_ms: budget.map(|h| secs(h * 3600.0)).transpose()?.map(|d| d.as_millis() as u64),
                max_evaluations: None,
            };
            let s = invent(InventConfig { space, template, problems, out, beta, jobs: par.jobs, seed })?;
            println!(
                "{} strategies, {} in the current generation, {} runs, stopped: {:?}{}",
                s.state.strategies.len(),
                s.state.current.len(),
                s.state.runs,
                s.stop,
                if s.resumed { " (resumed)" } else { "" }
            );
        }
        Cmd::Combine { matrix, budget, shuffles, allow_mixed_workers, out } => {
            let runs: Vec<RunRecord> = read_jsonl(&matrix)?;
            let m = matrix_from_records(&runs);
            let budget_ms = secs(budget)?.as_millis() as u64;
            let s = combine(&m, budget_ms, shuffles, seed, allow_mixed_workers)?;
            let text = print_schedule(&s);
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Run { schedule, problem, strategies, workers } => {
            let text = std::fs::read_to_string(&schedule).with_context(|| schedule.display().to_string())?;
            let sched = parse_schedule(&text).map_err(|e| input_err(format!("{}: {e}", schedule.display())))?;
            let dir = strategies.unwrap_or_else(|| schedule.parent().unwrap_or(Path::new(".")).join("strategies"));
            let mut defs = BTreeMap::new();
            for (id, _) in &sched.entries {
                if !defs.contains_key(id) {
                    let (d, _, _) = load_strategy(Some(&dir.join(format!("{id}.strategy"))), None)?;
                    defs.insert(id.clone(), d);
                }
            }
            let trs = load(&problem)?;
            let o = run_schedule(&sched, &trs, &defs, workers);
            println!("{}", o.answer);
            if let Some(by) = o.by {
                eprintln!("by {by} after {} ms", o.total.as_millis());
            }
        }
        Cmd::Bench { problems, strategy, entry, timeout, par, out } => {
            let (defs, entry, name) = load_strategy(strategy.as_deref(), entry.as_deref())?;
            let files = list_problems(&problems).with_context(|| problems.display().to_string())?;
            let cfg = BenchConfig {
                defs: &defs,
                entry: &entry,
                strategy_name: &name,
                timeout: secs(timeout)?,
                workers: par.workers,
                jobs: par.jobs,
            };
            let report = bench(&files, &cfg);
            if let Some(p) = out {
                write_jsonl(&p, &report.rows)?;
            }
            print!("{}", report.table());
        }
    }
    Ok(())
}
