//! Parameter-space files, the strategy evaluator, and the on-disk portfolio.
//!
//! A portfolio directory holds `strategies/<id>.strategy`, `state.json`
//! (rewritten after every iteration) and `evals.jsonl` (append-only).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use confluo_core::budget::Clock;
use confluo_core::generator::stream_rng;
use confluo_core::portfolio::{
    grackle_loop, Assignment, Beta, Candidate, EvalEntry, Evaluator, Invention, Job, Param, ParamRole, ParamSpace,
    PortfolioState, SpecContext, StopReason,
};
use confluo_core::Trs;

use crate::records::{append_jsonl, read_jsonl, RunRecord};
use crate::runner::{pool, run_one};
use crate::strategy::{parse_strategy, StrategyDefs};

pub const DEFAULT_TEMPLATE: &str = include_str!("../assets/template.strategy");
pub const DEFAULT_SPACE: &str = include_str!("../assets/default.space");

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct SpaceError {
    pub line: usize,
    pub msg: String,
}

/// Parses `name {v1,v2,...}[default]` and `FORBID {p=v, q=w}` lines.
pub fn parse_space(text: &str) -> Result<ParamSpace, SpaceError> {
    let mut space = ParamSpace::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| SpaceError { line, msg };
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let open = l.find('{').ok_or_else(|| err("expected `{`".into()))?;
        let close = l.find('}').ok_or_else(|| err("expected `}`".into()))?;
        if close < open {
            return Err(err("`}` before `{`".into()));
        }
        let head = l[..open].trim();
        let items: Vec<&str> = l[open + 1..close].split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let tail = l[close + 1..].trim();
        if head == "FORBID" {
            if !tail.is_empty() {
                return Err(err(format!("unexpected `{tail}` after FORBID block")));
            }
            let mut pattern = Vec::new();
            for it in items {
                let (p, v) = it.split_once('=').ok_or_else(|| err(format!("expected `param=value`, got `{it}`")))?;
                pattern.push((p.trim().to_string(), v.trim().to_string()));
            }
            if pattern.is_empty() {
                return Err(err("empty FORBID block".into()));
            }
            space.forbidden.push(pattern);
            continue;
        }
        if head.is_empty() || !head.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(err(format!("bad parameter name `{head}`")));
        }
        let default = tail
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| err("expected `[default]` after the value list".into()))?
            .trim();
        space.params.push(Param {
            name: head.to_string(),
            values: items.iter().map(|s| s.to_string()).collect(),
            default: default.to_string(),
        });
    }
    space.validate().map_err(|e| SpaceError { line: 0, msg: e.to_string() })?;
    Ok(space)
}

pub fn print_space(space: &ParamSpace) -> String {
    let mut out = String::new();
    for p in &space.params {
        out.push_str(&format!("{} {{{}}}[{}]\n", p.name, p.values.join(","), p.default));
    }
    for f in &space.forbidden {
        let items: Vec<String> = f.iter().map(|(p, v)| format!("{p}={v}")).collect();
        out.push_str(&format!("FORBID {{{}}}\n", items.join(", ")));
    }
    out
}

/// The defaults plus, for each definition switch, the defaults with every
/// other definition switched off. Forbidden ones are skipped.
pub fn initial_candidates(space: &ParamSpace, template: &str) -> Vec<Candidate> {
    let defaults = space.defaults();
    let switches: Vec<&Param> =
        space.params.iter().filter(|p| confluo_core::portfolio::role_of(p, template) == ParamRole::Definition).collect();
    let mut assignments = vec![defaults.clone()];
    for keep in &switches {
        let mut a = defaults.clone();
        for s in &switches {
            a.insert(s.name.clone(), if s.name == keep.name { "yes" } else { "no" }.to_string());
        }
        assignments.push(a);
    }
    let mut out: Vec<Candidate> = Vec::new();
    for a in assignments {
        if space.is_forbidden(&a) {
            continue;
        }
        if let Ok(c) = Candidate::new(space, template, a, None) {
            if !out.iter().any(|o| o.id == c.id) {
                out.push(c);
            }
        }
    }
    out
}

/// Milliseconds since construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        WallClock(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now_ms(&self) -> u64 {
        self.0.elapsed().as_millis() as u64
    }
}

/// Runs candidate strategies on named problems in a bounded thread pool.
pub struct StrategyEvaluator {
    pub problems: BTreeMap<String, Trs>,
    pub workers_per_run: usize,
    pub log: Option<PathBuf>,
    pub crashes: usize,
    pool: rayon::ThreadPool,
    parsed: HashMap<String, Option<StrategyDefs>>,
}

impl StrategyEvaluator {
    pub fn new(problems: BTreeMap<String, Trs>, jobs: usize, workers_per_run: usize, log: Option<PathBuf>) -> Self {
        StrategyEvaluator { problems, workers_per_run, log, crashes: 0, pool: pool(jobs), parsed: HashMap::new() }
    }
}

impl Evaluator for StrategyEvaluator {
    fn run_batch(&mut self, jobs: &[Job<'_>], limit_ms: u64) -> Vec<EvalEntry> {
        for j in jobs {
            self.parsed.entry(j.strategy.id.clone()).or_insert_with(|| match parse_strategy(&j.strategy.text) {
                Ok(d) if d.default_entry().is_some() => Some(d),
                Ok(_) => None,
                Err(e) => {
                    log::warn!("strategy {} does not parse: {e}", j.strategy.id);
                    None
                }
            });
        }
        let parsed = &self.parsed;
        let problems = &self.problems;
        let workers = self.workers_per_run;
        let limit = Some(Duration::from_millis(limit_ms));
        let results: Vec<(u64, confluo_core::Answer, bool)> = self.pool.install(|| {
            jobs.par_iter()
                .map(|j| {
                    let defs = parsed[&j.strategy.id].as_ref();
                    match (defs, problems.get(j.problem)) {
                        (Some(d), Some(trs)) => {
                            let entry = d.default_entry().expect("checked above").to_string();
                            let r = run_one(d, &entry, trs, limit, workers);
                            (r.millis, r.answer, r.crashed)
                        }
                        _ => (0, confluo_core::Answer::Maybe, true),
                    }
                })
                .collect()
        });
        let records: Vec<RunRecord> = jobs
            .iter()
            .zip(&results)
            .map(|(j, &(millis, answer, crashed))| RunRecord {
                problem: j.problem.to_string(),
                strategy: j.strategy.id.clone(),
                answer,
                millis,
                workers,
                crashed,
            })
            .collect();
        self.crashes += results.iter().filter(|r| r.2).count();
        if let Some(p) = &self.log {
            if let Err(e) = append_jsonl(p, &records) {
                log::error!("cannot append to {}: {e}", p.display());
            }
        }
        results.iter().map(|&(millis, answer, _)| EvalEntry { answer, millis, workers }).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StrategyEntry {
    id: String,
    parent: Option<String>,
    assignment: Assignment,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct InventionEntry {
    iteration: usize,
    parent: String,
    child: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BetaEntry {
    generation_size: usize,
    portfolio_cap: usize,
    eval_limit_ms: u64,
    spec_budget_ms: u64,
    spec_max_candidates: usize,
    max_specializations: usize,
    workers: usize,
    max_iterations: usize,
    wall_budget_ms: Option<u64>,
    max_evaluations: Option<usize>,
}

impl From<&Beta> for BetaEntry {
    fn from(b: &Beta) -> Self {
        BetaEntry {
            generation_size: b.generation_size,
            portfolio_cap: b.portfolio_cap,
            eval_limit_ms: b.eval_limit_ms,
            spec_budget_ms: b.spec_budget_ms,
            spec_max_candidates: b.spec_max_candidates,
            max_specializations: b.max_specializations,
            workers: b.workers,
            max_iterations: b.max_iterations,
            wall_budget_ms: b.wall_budget_ms,
            max_evaluations: b.max_evaluations,
        }
    }
}

/// Contents of `state.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct StateFile {
    seed: u64,
    iteration: usize,
    strategies: Vec<StrategyEntry>,
    current: Vec<String>,
    specializations: BTreeMap<String, usize>,
    exhausted: BTreeSet<String>,
    history: Vec<InventionEntry>,
    beta: BetaEntry,
}

pub struct PortfolioDir {
    pub root: PathBuf,
}

impl PortfolioDir {
    pub fn create(root: &Path) -> std::io::Result<PortfolioDir> {
        std::fs::create_dir_all(root.join("strategies"))?;
        Ok(PortfolioDir { root: root.to_path_buf() })
    }

    pub fn evals_path(&self) -> PathBuf {
        self.root.join("evals.jsonl")
    }

    pub fn state_path(&self) -> PathBuf {
        self.root.join("state.json")
    }

    pub fn strategy_path(&self, id: &str) -> PathBuf {
        self.root.join("strategies").join(format!("{id}.strategy"))
    }

    pub fn save(&self, state: &PortfolioState, seed: u64) -> std::io::Result<()> {
        for c in &state.strategies {
            let p = self.strategy_path(&c.id);
            if !p.exists() {
                std::fs::write(&p, &c.text)?;
            }
        }
        let file = StateFile {
            seed,
            iteration: state.iteration,
            strategies: state
                .strategies
                .iter()
                .map(|c| StrategyEntry { id: c.id.clone(), parent: c.parent.clone(), assignment: c.assignment.clone() })
                .collect(),
            current: state.current.clone(),
            specializations: state.specializations.clone(),
            exhausted: state.exhausted.clone(),
            history: state
                .history
                .iter()
                .map(|h| InventionEntry { iteration: h.iteration, parent: h.parent.clone(), child: h.child.clone() })
                .collect(),
            beta: BetaEntry::from(&state.beta),
        };
        // Write then rename so an interrupted save leaves the old state intact.
        let tmp = self.root.join("state.json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&file).map_err(std::io::Error::other)?)?;
        std::fs::rename(tmp, self.state_path())
    }

    /// Restores a saved state; `beta` replaces the stored hyperparameters.
    pub fn load(&self, beta: Beta) -> std::io::Result<Option<(PortfolioState, u64)>> {
        let text = match std::fs::read_to_string(self.state_path()) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        let file: StateFile = serde_json::from_str(&text).map_err(std::io::Error::other)?;
        let mut state = PortfolioState::new(beta);
        for s in file.strategies {
            let text = std::fs::read_to_string(self.strategy_path(&s.id))?;
            state.add(Candidate { id: s.id, text, assignment: s.assignment, parent: s.parent });
        }
        let records: Vec<RunRecord> = read_jsonl(&self.evals_path())?;
        for r in &records {
            state.matrix.insert(&r.strategy, &r.problem, EvalEntry { answer: r.answer, millis: r.millis, workers: r.workers });
            state.evaluated.insert(r.strategy.clone());
        }
        state.runs = records.len();
        state.iteration = file.iteration;
        state.current = file.current;
        state.specializations = file.specializations;
        state.exhausted = file.exhausted;
        state.history = file
            .history
            .into_iter()
            .map(|h| Invention { iteration: h.iteration, parent: h.parent, child: h.child })
            .collect();
        Ok(Some((state, file.seed)))
    }
}

pub struct InventConfig {
    pub space: ParamSpace,
    pub template: String,
    pub problems: BTreeMap<String, Trs>,
    pub out: PathBuf,
    pub beta: Beta,
    pub jobs: usize,
    pub seed: u64,
}

pub struct InventSummary {
    pub state: PortfolioState,
    pub stop: StopReason,
    pub resumed: bool,
}

/// Runs (or resumes) the invention loop, persisting after every iteration.
pub fn invent(cfg: InventConfig) -> std::io::Result<InventSummary> {
    let dir = PortfolioDir::create(&cfg.out)?;
    let problems: Vec<String> = cfg.problems.keys().cloned().collect();
    let (mut state, resumed) = match dir.load(cfg.beta.clone())? {
        Some((s, seed)) => {
            if seed != cfg.seed {
                log::warn!("resuming a portfolio created with seed {seed}, continuing with seed {}", cfg.seed);
            }
            (s, true)
        }
        None => {
            let mut s = PortfolioState::new(cfg.beta.clone());
            for c in initial_candidates(&cfg.space, &cfg.template) {
                s.add(c);
            }
            (s, false)
        }
    };
    let mut ev = StrategyEvaluator::new(cfg.problems, cfg.jobs, cfg.beta.workers, Some(dir.evals_path()));
    let clock = WallClock::new();
    let ctx = SpecContext { space: &cfg.space, template: &cfg.template, clock: &clock };
    // The stream depends on the iteration so a resumed run stays seeded.
    let mut rng = stream_rng(cfg.seed, state.iteration as u64);
    let mut save_err: Option<std::io::Error> = None;
    let stop = grackle_loop(&mut state, &ctx, &mut ev, &problems, &mut rng, |s| {
        log::info!("iteration {}: {} strategies, {} runs", s.iteration, s.strategies.len(), s.runs);
        if let Err(e) = dir.save(s, cfg.seed) {
            save_err.get_or_insert(e);
        }
    });
    if let Some(e) = save_err {
        return Err(e);
    }
    dir.save(&state, cfg.seed)?;
    Ok(InventSummary { state, stop, resumed })
}
