//! Running strategies on problems with crash isolation and a thread pool.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use confluo_core::procs::Witness;
use confluo_core::{Answer, Trs};

use crate::strategy::{eval_strategy, EvalOptions, Outcome, StrategyDefs};

/// Result of one run; a panic inside the engine is reported as MAYBE.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub answer: Answer,
    pub millis: u64,
    pub crashed: bool,
    pub outcome: Option<Outcome>,
}

pub fn run_one(defs: &StrategyDefs, entry: &str, trs: &Trs, timeout: Option<Duration>, workers: usize) -> RunResult {
    let start = Instant::now();
    let opts = EvalOptions { timeout, workers, cancel: None };
    let r = catch_unwind(AssertUnwindSafe(|| eval_strategy(defs, entry, trs, &opts)));
    let millis = start.elapsed().as_millis() as u64;
    match r {
        Ok(Ok(o)) => RunResult { answer: o.answer, millis, crashed: false, outcome: Some(o) },
        Ok(Err(e)) => {
            log::warn!("{}: {e}", trs.name);
            RunResult { answer: Answer::Maybe, millis, crashed: true, outcome: None }
        }
        Err(_) => {
            log::warn!("{}: strategy run panicked", trs.name);
            RunResult { answer: Answer::Maybe, millis, crashed: true, outcome: None }
        }
    }
}

pub fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool")
}

/// Plain-text certificate for a YES or NO answer.
pub fn render_witness(trs: &Trs, answer: Answer, w: &Witness, trace: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{answer}");
    let _ = writeln!(s, "problem: {}", trs.name);
    if !trace.is_empty() {
        let _ = writeln!(s, "proof: {}", trace.join(" ; "));
    }
    match w {
        Witness::Confluent { criterion, termination, joins } => {
            let _ = writeln!(s, "criterion: {criterion}");
            if let Some(c) = termination {
                let _ = writeln!(s, "termination: {c}");
            }
            let _ = writeln!(s, "critical pair joins: {}", joins.len());
            for j in joins {
                let _ = writeln!(s, "  {j}");
            }
        }
        Witness::NonConfluent { peak, left, right, reason } => {
            let _ = writeln!(s, "peak: {peak}");
            let show = |d: &[confluo_core::Term]| d.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" -> ");
            let _ = writeln!(s, "left: {}", show(left));
            let _ = writeln!(s, "right: {}", show(right));
            let _ = writeln!(s, "not joinable by: {reason}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::parse_strategy;
    use crate::trs_io::parse_trs;

    #[test]
    fn run_one_and_render() {
        let trs = parse_trs("(VAR x)\n(RULES f(x,x) -> a f(x,g(x)) -> b c -> g(c))").unwrap();
        let defs = parse_strategy("S = nonconfluence -steps 2").unwrap();
        let r = run_one(&defs, "S", &trs, Some(Duration::from_secs(5)), 1);
        assert_eq!(r.answer, Answer::No);
        let o = r.outcome.unwrap();
        let text = render_witness(&trs, o.answer, o.witness().unwrap(), &[]);
        assert!(text.starts_with("NO\n"));
        assert!(text.contains("peak:"));
    }
}
