//! Sequential strategy schedules over a fixed time budget.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::portfolio::EvalMatrix;

/// Ordered `(strategy id, split in milliseconds)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub entries: Vec<(String, u64)>,
}

impl Schedule {
    pub fn total_ms(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub const DEFAULT_BUDGET_MS: u64 = 60_000;
pub const DEFAULT_SHUFFLES: usize = 100;

/// Split patterns in milliseconds for a 60 s budget.
pub fn catalog() -> Vec<Vec<u64>> {
    let mut mixed = vec![500; 8];
    mixed.extend([4_000, 8_000, 12_000, 16_000, 15_500]);
    vec![
        vec![60_000],
        vec![30_000, 30_000],
        vec![10_000; 6],
        mixed,
        vec![1_000, 2_000, 4_000, 8_000, 16_000, 29_000],
    ]
}

/// A strategy is credited for `p` under split `t` iff it solved `p` in at most `t`.
pub fn credited(m: &EvalMatrix, strategy: &str, problem: &str, split_ms: u64) -> bool {
    m.solved(strategy, problem).is_some_and(|ms| ms <= split_ms)
}

pub fn covered<'a>(m: &EvalMatrix, s: &Schedule, problems: &'a [String]) -> BTreeSet<&'a str> {
    problems
        .iter()
        .filter(|p| s.entries.iter().any(|(id, t)| credited(m, id, p, *t)))
        .map(|p| p.as_str())
        .collect()
}

pub fn coverage(m: &EvalMatrix, s: &Schedule, problems: &[String]) -> usize {
    covered(m, s, problems).len()
}

/// For each split in order, the strategy that newly covers most problems;
/// ties go to the lower strategy index.
pub fn greedy_schedule(m: &EvalMatrix, strategies: &[String], splits: &[u64], problems: &[String]) -> Schedule {
    let mut open: Vec<&str> = problems.iter().map(|p| p.as_str()).collect();
    let mut out = Schedule::default();
    if strategies.is_empty() {
        return out;
    }
    for &t in splits {
        let mut best = (0usize, 0usize);
        for (i, s) in strategies.iter().enumerate() {
            let gain = open.iter().filter(|p| credited(m, s, p, t)).count();
            if gain > best.0 {
                best = (gain, i);
            }
        }
        let s = &strategies[best.1];
        open.retain(|p| !credited(m, s, p, t));
        out.entries.push((s.clone(), t));
    }
    out
}

/// Greedy schedules over `shuffles` orderings of every pattern (the first
/// ordering is the pattern as given). The single split `[budget]` is always
/// considered. Best coverage wins, then shorter total, then earlier pattern.
pub fn best_schedule(
    m: &EvalMatrix,
    strategies: &[String],
    patterns: &[Vec<u64>],
    budget_ms: u64,
    shuffles: usize,
    problems: &[String],
    rng: &mut impl RngCore,
) -> Schedule {
    let mut all: Vec<Vec<u64>> = patterns.to_vec();
    if !all.iter().any(|p| p.as_slice() == [budget_ms]) {
        all.push(vec![budget_ms]);
    }
    let mut best: Option<(usize, u64, Schedule)> = None;
    for pattern in &all {
        let mut order = pattern.clone();
        for k in 0..shuffles.max(1) {
            if k > 0 {
                order.shuffle(rng);
            }
            let s = greedy_schedule(m, strategies, &order, problems);
            let c = coverage(m, &s, problems);
            let t = s.total_ms();
            let better = match &best {
                None => true,
                Some((bc, bt, _)) => c > *bc || (c == *bc && t < *bt),
            };
            if better {
                best = Some((c, t, s));
            }
        }
    }
    best.map(|b| b.2).unwrap_or_default()
}
