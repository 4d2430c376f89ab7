//! Benchmark runs over a problem directory.

use std::path::PathBuf;
use std::time::Duration;

use rayon::prelude::*;

use confluo_core::Answer;

use crate::records::BenchRow;
use crate::runner::{pool, run_one};
use crate::strategy::StrategyDefs;
use crate::trs_io::load_problem;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub yes: usize,
    pub no: usize,
    pub maybe: usize,
}

impl Summary {
    pub fn solved(&self) -> usize {
        self.yes + self.no
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub rows: Vec<BenchRow>,
}

impl RunReport {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for r in &self.rows {
            match r.answer {
                Answer::Yes => s.yes += 1,
                Answer::No => s.no += 1,
                Answer::Maybe => s.maybe += 1,
            }
        }
        s
    }

    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.problem.len()).max().unwrap_or(7).max(7);
        let mut out = format!("{:<width$}  {:<6}  {:>8}\n", "problem", "answer", "ms");
        for r in &self.rows {
            out.push_str(&format!("{:<width$}  {:<6}  {:>8}", r.problem, r.answer.as_str(), r.millis));
            if let Some(e) = &r.error {
                out.push_str(&format!("  ({e})"));
            }
            out.push('\n');
        }
        let s = self.summary();
        out.push_str(&format!("\nyes     {}\nno      {}\nsolved  {}\nmaybe   {}\n", s.yes, s.no, s.solved(), s.maybe));
        out
    }
}

pub struct BenchConfig<'a> {
    pub defs: &'a StrategyDefs,
    pub entry: &'a str,
    pub strategy_name: &'a str,
    pub timeout: Duration,
    pub workers: usize,
    pub jobs: usize,
}

/// Rows follow the order of `problems`; failures become MAYBE rows.
pub fn bench(problems: &[PathBuf], cfg: &BenchConfig<'_>) -> RunReport {
    let rows = pool(cfg.jobs).install(|| {
        problems
            .par_iter()
            .map(|p| {
                let name = crate::dataset_io::stem(p);
                match load_problem(p) {
                    Ok(f) => {
                        let r = run_one(cfg.defs, cfg.entry, &f.trs, Some(cfg.timeout), cfg.workers);
                        BenchRow {
                            problem: name,
                            answer: r.answer,
                            millis: r.millis,
                            strategy: cfg.strategy_name.to_string(),
                            error: r.crashed.then(|| "strategy crashed".to_string()),
                        }
                    }
                    Err(e) => BenchRow {
                        problem: name,
                        answer: Answer::Maybe,
                        millis: 0,
                        strategy: cfg.strategy_name.to_string(),
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    RunReport { rows }
}
