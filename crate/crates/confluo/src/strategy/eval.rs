//! Strategy evaluation over a confluence problem.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use confluo_core::budget::Deadline;
use confluo_core::procs::{Verdict, Witness};
use confluo_core::{Answer, Trs};

use super::registry::{self, ProcOutput};
use super::syntax::{Modifier, Strategy, StrategyDefs};

/// Cap on `s*` repetitions, guarding against oscillating transformations.
pub const STAR_CAP: usize = 64;

#[derive(Clone, Debug)]
pub enum Problem {
    Open(Arc<Trs>),
    Solved { trs: Arc<Trs>, witness: Arc<Witness>, by: String },
}

impl Problem {
    pub fn trs(&self) -> &Trs {
        match self {
            Problem::Open(t) | Problem::Solved { trs: t, .. } => t,
        }
    }

    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            Problem::Open(_) => None,
            Problem::Solved { witness, .. } => Some(witness.verdict()),
        }
    }

    fn key(&self) -> (u64, Option<Verdict>) {
        (self.trs().fingerprint(), self.verdict())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub processor: String,
    pub millis: u64,
    pub result: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub answer: Answer,
    pub success: bool,
    pub trace: Vec<TraceEntry>,
    pub total: Duration,
    /// The problem as left by the strategy; a verdict's witness refers to it.
    pub problem: Problem,
}

impl Outcome {
    pub fn witness(&self) -> Option<&Witness> {
        match &self.problem {
            Problem::Solved { witness, .. } if self.success => Some(witness),
            _ => None,
        }
    }
}

pub fn answer_of(o: &Outcome) -> Answer {
    match (o.success, o.problem.verdict()) {
        (true, Some(Verdict::Yes)) => Answer::Yes,
        (true, Some(Verdict::No)) => Answer::No,
        _ => Answer::Maybe,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("undefined strategy or processor `{0}`")]
    Undefined(String),
    #[error("cyclic definition: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("{0}")]
    BadFlags(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
}

/// Checks everything reachable from `entry`: names resolve, flags are in
/// range, predicates exist, and definitions are acyclic.
pub fn check(defs: &StrategyDefs, entry: &str) -> Result<(), EvalError> {
    let root = defs.get(entry).ok_or_else(|| EvalError::Undefined(entry.to_string()))?;
    let mut done = BTreeSet::new();
    let mut stack = vec![entry.to_string()];
    check_node(defs, root, &mut stack, &mut done)
}

fn check_node(defs: &StrategyDefs, s: &Strategy, stack: &mut Vec<String>, done: &mut BTreeSet<String>) -> Result<(), EvalError> {
    let mut preds = Vec::new();
    collect_preds(s, &mut preds);
    if let Some(p) = preds.into_iter().find(|p| !registry::PREDICATES.contains(&p.as_str())) {
        return Err(EvalError::UnknownPredicate(p));
    }
    for (name, args) in s.calls() {
        if let Some(def) = defs.get(name) {
            if !args.is_empty() {
                return Err(EvalError::BadFlags(format!("definition `{name}` takes no flags")));
            }
            if let Some(k) = stack.iter().position(|n| n == name) {
                let mut cycle = stack[k..].to_vec();
                cycle.push(name.to_string());
                return Err(EvalError::Cycle(cycle));
            }
            if done.contains(name) {
                continue;
            }
            stack.push(name.to_string());
            check_node(defs, def, stack, done)?;
            stack.pop();
            done.insert(name.to_string());
        } else {
            let spec = registry::lookup(name).ok_or_else(|| EvalError::Undefined(name.to_string()))?;
            registry::parse_flags(spec, args).map_err(EvalError::BadFlags)?;
        }
    }
    Ok(())
}

fn collect_preds(s: &Strategy, out: &mut Vec<String>) {
    match s {
        Strategy::If { pred, then, els } => {
            out.push(pred.clone());
            collect_preds(then, out);
            collect_preds(els, out);
        }
        Strategy::Call { .. } => {}
        Strategy::Seq(a, b) | Strategy::Choice(a, b) | Strategy::Par(a, b) => {
            collect_preds(a, out);
            collect_preds(b, out);
        }
        Strategy::Opt(x)
        | Strategy::Star(x)
        | Strategy::Plus(x)
        | Strategy::IterN(x, _)
        | Strategy::IterTimed(x, _)
        | Strategy::Bang(x)
        | Strategy::Timed(x, _)
        | Strategy::Modified(x, _) => collect_preds(x, out),
    }
}

/// Wall-clock deadline plus a chain of cancellation flags.
#[derive(Clone)]
pub struct Budget {
    at: Option<Instant>,
    cancel: Vec<Arc<AtomicBool>>,
}

impl Budget {
    pub fn new(limit: Option<Duration>) -> Budget {
        Budget { at: limit.map(|d| Instant::now() + d), cancel: Vec::new() }
    }

    fn within(&self, d: Duration) -> Budget {
        let at = Instant::now() + d;
        Budget { at: Some(self.at.map_or(at, |p| p.min(at))), cancel: self.cancel.clone() }
    }

    fn child(&self) -> (Budget, Arc<AtomicBool>) {
        let flag = Arc::new(AtomicBool::new(false));
        let mut cancel = self.cancel.clone();
        cancel.push(flag.clone());
        (Budget { at: self.at, cancel }, flag)
    }
}

impl Deadline for Budget {
    fn expired(&self) -> bool {
        self.at.is_some_and(|t| Instant::now() >= t) || self.cancel.iter().any(|c| c.load(Ordering::Relaxed))
    }
}

enum Res {
    Fail,
    Success(Problem),
}

struct Engine<'d> {
    defs: &'d StrategyDefs,
    /// Threads available beyond the caller's.
    permits: AtomicUsize,
}

impl Engine<'_> {
    fn acquire(&self) -> bool {
        self.permits.fetch_update(Ordering::AcqRel, Ordering::Acquire, |n| n.checked_sub(1)).is_ok()
    }

    fn release(&self) {
        self.permits.fetch_add(1, Ordering::AcqRel);
    }

    fn eval(&self, s: &Strategy, p: Problem, b: &Budget, trace: &mut Vec<TraceEntry>) -> Res {
        match s {
            Strategy::Call { name, args } => {
                if let Some(def) = self.defs.get(name) {
                    return self.eval(def, p, b, trace);
                }
                self.call(name, args, p, b, trace)
            }
            Strategy::Seq(a, c) => match self.eval(a, p, b, trace) {
                Res::Success(q) => self.eval(c, q, b, trace),
                Res::Fail => Res::Fail,
            },
            Strategy::Choice(a, c) => match self.eval(a, p.clone(), b, trace) {
                Res::Fail if !b.expired() => self.eval(c, p, b, trace),
                r => r,
            },
            Strategy::Par(a, c) => self.par(a, c, p, b, trace),
            Strategy::If { pred, then, els } => {
                if registry::predicate(pred, p.trs()).unwrap_or(false) {
                    self.eval(then, p, b, trace)
                } else {
                    self.eval(els, p, b, trace)
                }
            }
            Strategy::Opt(x) => match self.eval(x, p.clone(), b, trace) {
                Res::Fail => Res::Success(p),
                r => r,
            },
            Strategy::Star(x) => self.repeat(x, p, STAR_CAP, b, trace),
            Strategy::Plus(x) => match self.repeat(x, p, STAR_CAP, b, trace) {
                Res::Success(q) => self.eval(x, q, b, trace),
                Res::Fail => Res::Fail,
            },
            Strategy::IterN(x, n) => self.repeat(x, p, *n as usize, b, trace),
            Strategy::IterTimed(x, secs) => {
                let inner = b.within(Duration::from_secs_f64(*secs));
                self.repeat(x, p, usize::MAX, &inner, trace)
            }
            Strategy::Bang(x) => match self.eval(x, p, b, trace) {
                Res::Success(q) if q.verdict().is_some() => Res::Success(q),
                _ => Res::Fail,
            },
            Strategy::Timed(x, secs) => {
                let limit = Duration::from_secs_f64(*secs);
                let start = Instant::now();
                let inner = b.within(limit);
                let r = self.eval(x, p, &inner, trace);
                if start.elapsed() > limit {
                    return Res::Fail;
                }
                r
            }
            Strategy::Modified(x, Modifier::NoNo) => match self.eval(x, p, b, trace) {
                Res::Success(q) if q.verdict() == Some(Verdict::No) => Res::Fail,
                r => r,
            },
        }
    }

    /// Applies `x` until it fails, stops changing the problem, `cap` rounds
    /// pass or the budget runs out. Always succeeds.
    fn repeat(&self, x: &Strategy, p: Problem, cap: usize, b: &Budget, trace: &mut Vec<TraceEntry>) -> Res {
        let mut cur = p;
        for _ in 0..cap {
            if cur.verdict().is_some() || b.expired() {
                break;
            }
            match self.eval(x, cur.clone(), b, trace) {
                Res::Success(next) if next.key() != cur.key() => cur = next,
                _ => break,
            }
        }
        Res::Success(cur)
    }

    fn call(&self, name: &str, args: &[String], p: Problem, b: &Budget, trace: &mut Vec<TraceEntry>) -> Res {
        let Some(spec) = registry::lookup(name) else { return Res::Fail };
        if spec.name == "fail" {
            trace.push(TraceEntry { processor: name.to_string(), millis: 0, result: "FAIL".into() });
            return Res::Fail;
        }
        // Nothing is left to do on a solved problem.
        if p.verdict().is_some() {
            return Res::Success(p);
        }
        let Ok(flags) = registry::parse_flags(spec, args) else { return Res::Fail };
        if b.expired() {
            return Res::Fail;
        }
        let start = Instant::now();
        let out = registry::run(spec, &flags, p.trs(), b);
        let millis = start.elapsed().as_millis() as u64;
        let mut label = name.to_string();
        for a in args {
            label.push(' ');
            label.push_str(a);
        }
        let (res, result) = match out {
            ProcOutput::Fail(why) => (Res::Fail, format!("FAIL {why}")),
            ProcOutput::Proved(w) => {
                let v = w.verdict().to_string();
                (Res::Success(Problem::Solved { trs: Arc::new(p.trs().clone()), witness: Arc::new(w), by: label.clone() }), v)
            }
            ProcOutput::Transformed(t) => {
                let n = t.rules.len();
                (Res::Success(Problem::Open(Arc::new(t))), format!("SUCCESS {n} rules"))
            }
        };
        trace.push(TraceEntry { processor: label, millis, result });
        res
    }

    fn par(&self, a: &Strategy, c: &Strategy, p: Problem, b: &Budget, trace: &mut Vec<TraceEntry>) -> Res {
        if !self.acquire() {
            // No spare worker: left first, right only if left fails.
            return match self.eval(a, p.clone(), b, trace) {
                Res::Fail if !b.expired() => self.eval(c, p, b, trace),
                r => r,
            };
        }
        let (left_budget, left_flag) = b.child();
        let (right_budget, right_flag) = b.child();
        let winner: Mutex<Option<bool>> = Mutex::new(None);
        let claim = |is_left: bool, loser: &AtomicBool| {
            let mut w = winner.lock().expect("winner lock");
            if w.is_none() {
                *w = Some(is_left);
                loser.store(true, Ordering::Relaxed);
            }
        };
        let (left, right) = std::thread::scope(|scope| {
            let pr = p.clone();
            let handle = scope.spawn(|| {
                let mut t = Vec::new();
                let r = self.eval(c, pr, &right_budget, &mut t);
                if matches!(r, Res::Success(_)) {
                    claim(false, &left_flag);
                }
                (r, t)
            });
            let mut t = Vec::new();
            let r = self.eval(a, p, &left_budget, &mut t);
            if matches!(r, Res::Success(_)) {
                claim(true, &right_flag);
            }
            let right = handle.join().unwrap_or((Res::Fail, Vec::new()));
            ((r, t), right)
        });
        self.release();
        let w = *winner.lock().expect("winner lock");
        match w {
            Some(true) => {
                trace.extend(left.1);
                left.0
            }
            Some(false) => {
                trace.extend(right.1);
                right.0
            }
            None => {
                trace.extend(left.1);
                trace.extend(right.1);
                Res::Fail
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub timeout: Option<Duration>,
    pub workers: usize,
    /// External cancellation.
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { timeout: None, workers: 1, cancel: None }
    }
}

/// Runs `entry` on `trs` as `(entry)!`.
pub fn eval_strategy(defs: &StrategyDefs, entry: &str, trs: &Trs, opts: &EvalOptions) -> Result<Outcome, EvalError> {
    run_root(defs, &Strategy::Bang(Box::new(Strategy::call(entry))), entry, trs, opts)
}

/// Like [`eval_strategy`] but without the implicit `!`; exposes the raw
/// success flag.
pub fn eval_raw(defs: &StrategyDefs, entry: &str, trs: &Trs, opts: &EvalOptions) -> Result<Outcome, EvalError> {
    run_root(defs, &Strategy::call(entry), entry, trs, opts)
}

fn run_root(defs: &StrategyDefs, root: &Strategy, entry: &str, trs: &Trs, opts: &EvalOptions) -> Result<Outcome, EvalError> {
    check(defs, entry)?;
    let start = Instant::now();
    let mut budget = Budget::new(opts.timeout);
    if let Some(c) = &opts.cancel {
        budget.cancel.push(c.clone());
    }
    let engine = Engine { defs, permits: AtomicUsize::new(opts.workers.max(1) - 1) };
    let mut trace = Vec::new();
    let p0 = Problem::Open(Arc::new(trs.clone()));
    let (success, problem) = match engine.eval(root, p0.clone(), &budget, &mut trace) {
        Res::Success(q) => (true, q),
        Res::Fail => (false, p0),
    };
    let mut o = Outcome { answer: Answer::Maybe, success, trace, total: start.elapsed(), problem };
    o.answer = answer_of(&o);
    Ok(o)
}
