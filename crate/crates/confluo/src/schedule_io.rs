//! Schedule files (`strategy-id<TAB>seconds`) and the schedule runner.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use confluo_core::portfolio::EvalMatrix;
use confluo_core::scheduler::{best_schedule, catalog, Schedule};
use confluo_core::{Answer, Trs};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::runner::run_one;
use crate::strategy::StrategyDefs;

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ScheduleError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ScheduleError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let err = |msg: String| ScheduleError { line: i + 1, msg };
        let (id, secs) = l
            .split_once('\t')
            .or_else(|| l.split_once(','))
            .or_else(|| l.rsplit_once(' '))
            .ok_or_else(|| err("expected `strategy-id<TAB>seconds`".into()))?;
        let secs: f64 = secs.trim().parse().map_err(|_| err(format!("bad time split `{}`", secs.trim())))?;
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(err(format!("time split must be positive, got {secs}")));
        }
        entries.push((id.trim().to_string(), (secs * 1000.0).round() as u64));
    }
    Ok(Schedule { entries })
}

pub fn print_schedule(s: &Schedule) -> String {
    s.entries.iter().map(|(id, ms)| format!("{id}\t{}\n", *ms as f64 / 1000.0)).collect()
}

#[derive(Clone, Debug)]
pub struct ScheduleStep {
    pub strategy: String,
    pub answer: Answer,
    pub millis: u64,
}

#[derive(Clone, Debug)]
pub struct ScheduleOutcome {
    pub answer: Answer,
    /// Strategy that produced the answer, if any.
    pub by: Option<String>,
    pub steps: Vec<ScheduleStep>,
    pub total: Duration,
}

/// Runs each strategy under its split as a hard deadline; the first YES or
/// NO stops the schedule.
pub fn run_schedule(sched: &Schedule, trs: &Trs, defs: &BTreeMap<String, StrategyDefs>, workers: usize) -> ScheduleOutcome {
    let start = Instant::now();
    let mut steps = Vec::new();
    for (id, ms) in &sched.entries {
        let Some(d) = defs.get(id) else {
            log::warn!("schedule names unknown strategy {id}");
            steps.push(ScheduleStep { strategy: id.clone(), answer: Answer::Maybe, millis: 0 });
            continue;
        };
        let entry = d.default_entry().unwrap_or_default().to_string();
        let r = run_one(d, &entry, trs, Some(Duration::from_millis(*ms)), workers);
        steps.push(ScheduleStep { strategy: id.clone(), answer: r.answer, millis: r.millis });
        if r.answer.is_solved() {
            return ScheduleOutcome { answer: r.answer, by: Some(id.clone()), steps, total: start.elapsed() };
        }
    }
    ScheduleOutcome { answer: Answer::Maybe, by: None, steps, total: start.elapsed() }
}

#[derive(Debug, thiserror::Error)]
pub enum CombineError {
    #[error("matrix mixes worker counts {0:?}; pass the override flag to combine anyway")]
    MixedWorkers(Vec<usize>),
    #[error("matrix is empty")]
    Empty,
}

/// Builds the best schedule from a recorded matrix. The built-in split
/// catalog is scaled to `budget_ms`.
pub fn combine(
    m: &EvalMatrix,
    budget_ms: u64,
    shuffles: usize,
    seed: u64,
    allow_mixed_workers: bool,
) -> Result<Schedule, CombineError> {
    if m.is_empty() {
        return Err(CombineError::Empty);
    }
    let workers = m.worker_counts();
    if workers.len() > 1 && !allow_mixed_workers {
        return Err(CombineError::MixedWorkers(workers.into_iter().collect()));
    }
    let strategies = m.strategies();
    let problems = m.problems();
    let patterns = scaled_catalog(budget_ms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(best_schedule(m, &strategies, &patterns, budget_ms, shuffles, &problems, &mut rng))
}

/// The catalog scaled from 60 s to `budget_ms`; splits never drop below 1 ms.
pub fn scaled_catalog(budget_ms: u64) -> Vec<Vec<u64>> {
    catalog()
        .into_iter()
        .map(|p| p.into_iter().map(|ms| (ms as u128 * budget_ms as u128 / 60_000).max(1) as u64).collect())
        .collect()
}
