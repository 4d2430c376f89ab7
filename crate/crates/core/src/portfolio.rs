//! Strategy portfolio invention: evaluate, reduce, select, specialize.
//!
//! Strategies are instantiations of a template over a discrete parameter
//! space. Running a strategy is delegated to an [`Evaluator`], so the loop
//! itself is deterministic given its RNG and the evaluator's answers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngCore};
use sha2::{Digest, Sha256};

use crate::answer::Answer;
use crate::budget::Clock;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub values: Vec<String>,
    pub default: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamSpace {
    pub params: Vec<Param>,
    /// Partial assignments that must never be matched.
    pub forbidden: Vec<Vec<(String, String)>>,
}

pub type Assignment = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PortfolioError {
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("value `{value}` not in the domain of `{param}`")]
    BadValue { param: String, value: String },
    #[error("parameter `{0}` has duplicate values")]
    DuplicateValue(String),
    #[error("default of `{0}` is not in its domain")]
    BadDefault(String),
    #[error("parameter `{0}` declared twice")]
    DuplicateParam(String),
    #[error("missing value for `{0}`")]
    Missing(String),
    #[error("assignment matches a forbidden pattern")]
    Forbidden,
    #[error("unterminated placeholder in template")]
    Placeholder,
}

impl ParamSpace {
    pub fn validate(&self) -> Result<(), PortfolioError> {
        let mut seen = BTreeSet::new();
        for p in &self.params {
            if !seen.insert(&p.name) {
                return Err(PortfolioError::DuplicateParam(p.name.clone()));
            }
            let vs: BTreeSet<&String> = p.values.iter().collect();
            if vs.len() != p.values.len() {
                return Err(PortfolioError::DuplicateValue(p.name.clone()));
            }
            if !vs.contains(&p.default) {
                return Err(PortfolioError::BadDefault(p.name.clone()));
            }
        }
        for pat in &self.forbidden {
            for (k, v) in pat {
                let p = self.param(k).ok_or_else(|| PortfolioError::UnknownParam(k.clone()))?;
                if !p.values.contains(v) {
                    return Err(PortfolioError::BadValue { param: k.clone(), value: v.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn defaults(&self) -> Assignment {
        self.params.iter().map(|p| (p.name.clone(), p.default.clone())).collect()
    }

    pub fn is_forbidden(&self, a: &Assignment) -> bool {
        self.forbidden.iter().any(|pat| pat.iter().all(|(k, v)| a.get(k) == Some(v)))
    }

    /// Total, in-domain and not forbidden.
    pub fn check(&self, a: &Assignment) -> Result<(), PortfolioError> {
        for k in a.keys() {
            if self.param(k).is_none() {
                return Err(PortfolioError::UnknownParam(k.clone()));
            }
        }
        for p in &self.params {
            let v = a.get(&p.name).ok_or_else(|| PortfolioError::Missing(p.name.clone()))?;
            if !p.values.contains(v) {
                return Err(PortfolioError::BadValue { param: p.name.clone(), value: v.clone() });
            }
        }
        if self.is_forbidden(a) {
            return Err(PortfolioError::Forbidden);
        }
        Ok(())
    }

    pub fn size(&self) -> u128 {
        self.params.iter().map(|p| p.values.len() as u128).product()
    }
}

/// How a parameter enters the template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamRole {
    /// yes/no switch for the definition of the same name; `no` turns it into
    /// `fail`.
    Definition,
    /// Time or loop count, spliced in verbatim.
    Raw,
    /// Processor flag `-name`: `yes` → `-name`, `no` → nothing, other → `-name v`.
    Flag(String),
}

pub fn role_of(p: &Param, template: &str) -> ParamRole {
    if p.name.ends_with("_time") || p.name.ends_with("_loop") {
        return ParamRole::Raw;
    }
    let boolean = p.values.iter().all(|v| v == "yes" || v == "no");
    if boolean && definition_names(template).iter().any(|d| *d == p.name) {
        return ParamRole::Definition;
    }
    let flag = p.name.rsplit('_').next().unwrap_or(&p.name);
    ParamRole::Flag(flag.to_string())
}

/// Names defined by `NAME = …` at the start of a logical line.
pub fn definition_names(text: &str) -> Vec<String> {
    logical_lines(text)
        .iter()
        .filter_map(|(l, _)| {
            let (lhs, _) = l.split_once('=')?;
            let n = lhs.trim();
            (!n.is_empty() && n.chars().all(|c| c.is_alphanumeric() || c == '_')).then(|| n.to_string())
        })
        .collect()
}

/// Logical lines (joined continuations) with the physical line range they span.
fn logical_lines(text: &str) -> Vec<(String, (usize, usize))> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let start = i;
        let mut acc = String::new();
        loop {
            let l = lines[i];
            let stripped = strip_comment(l).trim_end();
            if let Some(body) = stripped.strip_suffix('\\') {
                acc.push_str(body);
                acc.push(' ');
                i += 1;
                if i >= lines.len() {
                    break;
                }
            } else {
                acc.push_str(stripped);
                i += 1;
                break;
            }
        }
        out.push((acc, (start, i)));
    }
    out
}

fn strip_comment(l: &str) -> &str {
    match l.find('#') {
        Some(k) => &l[..k],
        None => l,
    }
}

/// Expands the template for `a`. Definition switches set to `no` replace the
/// whole definition with `NAME = fail`; everything else substitutes
/// `${name}` placeholders. The layout of the template is kept.
pub fn instantiate(space: &ParamSpace, template: &str, a: &Assignment) -> Result<String, PortfolioError> {
    space.check(a)?;
    let mut disabled: BTreeSet<String> = BTreeSet::new();
    let mut subst: BTreeMap<String, String> = BTreeMap::new();
    for p in &space.params {
        let v = &a[&p.name];
        match role_of(p, template) {
            ParamRole::Definition => {
                if v == "no" {
                    disabled.insert(p.name.clone());
                }
            }
            ParamRole::Raw => {
                subst.insert(p.name.clone(), v.clone());
            }
            ParamRole::Flag(f) => {
                let s = match v.as_str() {
                    "yes" => format!("-{f}"),
                    "no" => String::new(),
                    other => format!("-{f} {other}"),
                };
                subst.insert(p.name.clone(), s);
            }
        }
    }
    let lines: Vec<&str> = template.lines().collect();
    let mut out: Vec<String> = Vec::new();
    for (logical, (start, end)) in logical_lines(template) {
        let def = logical.split_once('=').map(|(n, _)| n.trim().to_string());
        if let Some(n) = def.filter(|n| disabled.contains(n)) {
            out.push(format!("{n} = fail"));
            continue;
        }
        for l in &lines[start..end] {
            out.push(substitute(l, &subst)?);
        }
    }
    let mut text = out.join("\n");
    if template.ends_with('\n') {
        text.push('\n');
    }
    Ok(text)
}

fn substitute(line: &str, subst: &BTreeMap<String, String>) -> Result<String, PortfolioError> {
    if !line.contains("${") {
        return Ok(line.to_string());
    }
    let mut out = String::new();
    let mut rest = line;
    while let Some(k) = rest.find("${") {
        out.push_str(&rest[..k]);
        let after = &rest[k + 2..];
        let close = after.find('}').ok_or(PortfolioError::Placeholder)?;
        let key = &after[..close];
        let val = subst.get(key).ok_or_else(|| PortfolioError::UnknownParam(key.to_string()))?;
        out.push_str(val);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    // Empty flags leave double spaces behind; keep the indentation.
    let indent = out.len() - out.trim_start().len();
    let body: Vec<&str> = out.split_whitespace().collect();
    let mut joined = String::from(&out[..indent]);
    joined.push_str(&body.join(" "));
    for bad in [" )", "( "] {
        joined = joined.replace(bad, bad.trim());
    }
    Ok(joined)
}

/// First 16 hex digits of SHA-256 over the strategy text.
pub fn strategy_id(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub id: String,
    pub text: String,
    pub assignment: Assignment,
    pub parent: Option<String>,
}

impl Candidate {
    pub fn new(space: &ParamSpace, template: &str, assignment: Assignment, parent: Option<String>) -> Result<Candidate, PortfolioError> {
        let text = instantiate(space, template, &assignment)?;
        Ok(Candidate { id: strategy_id(&text), text, assignment, parent })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalEntry {
    pub answer: Answer,
    pub millis: u64,
    pub workers: usize,
}

/// `(strategy id, problem) → result`, append-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalMatrix {
    cells: BTreeMap<(String, String), EvalEntry>,
    log: Vec<(String, String)>,
}

impl EvalMatrix {
    pub fn get(&self, strategy: &str, problem: &str) -> Option<&EvalEntry> {
        self.cells.get(&(strategy.to_string(), problem.to_string()))
    }

    pub fn contains(&self, strategy: &str, problem: &str) -> bool {
        self.get(strategy, problem).is_some()
    }

    /// Keeps the first entry for a pair; returns whether it was new.
    pub fn insert(&mut self, strategy: &str, problem: &str, e: EvalEntry) -> bool {
        let key = (strategy.to_string(), problem.to_string());
        if self.cells.contains_key(&key) {
            return false;
        }
        self.cells.insert(key.clone(), e);
        self.log.push(key);
        true
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Entries in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &EvalEntry)> {
        self.log.iter().map(|k| (k.0.as_str(), k.1.as_str(), &self.cells[k]))
    }

    pub fn solved(&self, strategy: &str, problem: &str) -> Option<u64> {
        self.get(strategy, problem).filter(|e| e.answer.is_solved()).map(|e| e.millis)
    }

    pub fn solved_set<'a>(&self, strategy: &str, problems: &'a [String]) -> BTreeSet<&'a str> {
        problems.iter().filter(|p| self.solved(strategy, p).is_some()).map(|p| p.as_str()).collect()
    }

    pub fn strategies(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.log.iter().filter(|k| seen.insert(k.0.clone())).map(|k| k.0.clone()).collect()
    }

    pub fn problems(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.log.iter().filter(|k| seen.insert(k.1.clone())).map(|k| k.1.clone()).collect()
    }

    pub fn worker_counts(&self) -> BTreeSet<usize> {
        self.cells.values().map(|e| e.workers).collect()
    }
}

pub struct Job<'a> {
    pub strategy: &'a Candidate,
    pub problem: &'a str,
}

/// Runs strategies on problems; crashes must be reported as MAYBE.
pub trait Evaluator {
    fn run_batch(&mut self, jobs: &[Job<'_>], limit_ms: u64) -> Vec<EvalEntry>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Beta {
    pub generation_size: usize,
    pub portfolio_cap: usize,
    pub eval_limit_ms: u64,
    pub spec_budget_ms: u64,
    pub spec_max_candidates: usize,
    pub max_specializations: usize,
    pub workers: usize,
    pub max_iterations: usize,
    pub wall_budget_ms: Option<u64>,
    pub max_evaluations: Option<usize>,
}

impl Default for Beta {
    fn default() -> Self {
        Beta {
            generation_size: 10,
            portfolio_cap: 200,
            eval_limit_ms: 30_000,
            spec_budget_ms: 600_000,
            spec_max_candidates: 50,
            max_specializations: 3,
            workers: 1,
            max_iterations: 100,
            wall_budget_ms: None,
            max_evaluations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invention {
    pub iteration: usize,
    pub parent: String,
    pub child: String,
}

#[derive(Clone, Debug, Default)]
pub struct PortfolioState {
    /// Φ_strat in insertion order.
    pub strategies: Vec<Candidate>,
    /// Φ_cur.
    pub current: Vec<String>,
    pub matrix: EvalMatrix,
    pub specializations: BTreeMap<String, usize>,
    pub exhausted: BTreeSet<String>,
    pub history: Vec<Invention>,
    pub iteration: usize,
    /// Distinct strategies that have been run at least once.
    pub evaluated: BTreeSet<String>,
    pub runs: usize,
    pub beta: Beta,
}

impl PortfolioState {
    pub fn new(beta: Beta) -> PortfolioState {
        PortfolioState { beta, ..Default::default() }
    }

    pub fn strategy(&self, id: &str) -> Option<&Candidate> {
        self.strategies.iter().find(|c| c.id == id)
    }

    /// Adds a strategy unless one with the same id exists.
    pub fn add(&mut self, c: Candidate) -> bool {
        if self.strategy(&c.id).is_some() {
            return false;
        }
        self.strategies.push(c);
        true
    }

    pub fn solved_by_any(&self, problems: &[String]) -> BTreeSet<String> {
        problems
            .iter()
            .filter(|p| self.strategies.iter().any(|s| self.matrix.solved(&s.id, p).is_some()))
            .cloned()
            .collect()
    }
}

/// Runs all missing `(strategy, problem)` pairs.
pub fn evaluate(state: &mut PortfolioState, ev: &mut dyn Evaluator, strategies: &[Candidate], problems: &[String]) -> usize {
    let jobs: Vec<Job<'_>> = strategies
        .iter()
        .flat_map(|s| problems.iter().map(move |p| (s, p)))
        .filter(|(s, p)| !state.matrix.contains(&s.id, p))
        .map(|(s, p)| Job { strategy: s, problem: p })
        .collect();
    if jobs.is_empty() {
        return 0;
    }
    let results = ev.run_batch(&jobs, state.beta.eval_limit_ms);
    let mut n = 0;
    for (job, e) in jobs.iter().zip(results) {
        if state.matrix.insert(&job.strategy.id, job.problem, e) {
            n += 1;
            state.evaluated.insert(job.strategy.id.clone());
        }
    }
    state.runs += n;
    n
}

/// (solved, total millis on solved).
pub fn score(m: &EvalMatrix, id: &str, problems: &[String]) -> (usize, u64) {
    problems.iter().filter_map(|p| m.solved(id, p)).fold((0, 0), |(n, t), ms| (n + 1, t + ms))
}

/// Ranks Φ_strat, trims it to the portfolio cap (never dropping the only
/// solver of a problem) and sets Φ_cur to the top `generation_size`.
pub fn reduce(state: &mut PortfolioState, problems: &[String]) {
    let mut ranked: Vec<(usize, (usize, u64))> =
        state.strategies.iter().enumerate().map(|(i, s)| (i, score(&state.matrix, &s.id, problems))).collect();
    ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)).then(a.0.cmp(&b.0)));
    if state.strategies.len() > state.beta.portfolio_cap {
        let mut keep: Vec<usize> = ranked.iter().map(|r| r.0).collect();
        while keep.len() > state.beta.portfolio_cap {
            let unique = |i: usize, keep: &[usize]| {
                problems.iter().any(|p| {
                    state.matrix.solved(&state.strategies[i].id, p).is_some()
                        && keep.iter().all(|&j| j == i || state.matrix.solved(&state.strategies[j].id, p).is_none())
                })
            };
            let victim = (0..keep.len()).rev().find(|&k| !unique(keep[k], &keep)).unwrap_or(keep.len() - 1);
            keep.remove(victim);
        }
        let kept: BTreeSet<usize> = keep.into_iter().collect();
        let mut i = 0;
        state.strategies.retain(|_| {
            let k = kept.contains(&i);
            i += 1;
            k
        });
        return reduce(state, problems);
    }
    state.current = ranked.iter().take(state.beta.generation_size).map(|r| state.strategies[r.0].id.clone()).collect();
}

/// Problems each strategy of Φ_cur solves no slower than every other member
/// (time ties go to the member listed first).
pub fn mastered_sets(state: &PortfolioState, problems: &[String]) -> Vec<(String, BTreeSet<String>)> {
    let mut out: Vec<(String, BTreeSet<String>)> = state.current.iter().map(|s| (s.clone(), BTreeSet::new())).collect();
    for p in problems {
        let best = state
            .current
            .iter()
            .enumerate()
            .filter_map(|(i, s)| state.matrix.solved(s, p).map(|t| (t, i)))
            .min();
        if let Some((_, i)) = best {
            out[i].1.insert(p.clone());
        }
    }
    out
}

pub fn select(state: &PortfolioState, problems: &[String], rng: &mut impl RngCore) -> Option<String> {
    let eligible: Vec<(String, usize)> = mastered_sets(state, problems)
        .into_iter()
        .filter(|(s, _)| {
            !state.exhausted.contains(s)
                && state.specializations.get(s).copied().unwrap_or(0) < state.beta.max_specializations
        })
        .map(|(s, m)| (s, m.len()))
        .collect();
    let top = eligible.iter().map(|e| e.1).max()?;
    let tied: Vec<&String> = eligible.iter().filter(|e| e.1 == top).map(|e| &e.0).collect();
    tied.choose(rng).map(|s| (*s).clone())
}

/// Probability of a random restart per local-search step.
pub const RESTART_PROB: f64 = 0.05;
/// Parameters changed by a restart perturbation.
pub const PERTURB_PARAMS: usize = 3;

/// (solved on focus, of those not solved by the parent, -time).
type Objective = (usize, usize, i64);

fn objective(m: &EvalMatrix, id: &str, focus: &[String], parent_solved: &BTreeSet<&str>) -> Objective {
    let mut solved = 0;
    let mut fresh = 0;
    let mut time = 0u64;
    for p in focus {
        if let Some(t) = m.solved(id, p) {
            solved += 1;
            time += t;
            if !parent_solved.contains(p.as_str()) {
                fresh += 1;
            }
        }
    }
    (solved, fresh, -(time as i64))
}

pub struct SpecContext<'a> {
    pub space: &'a ParamSpace,
    pub template: &'a str,
    pub clock: &'a dyn Clock,
}

/// Focused iterated local search from `s`; returns the best new strategy
/// or `None` when nothing distinct from `s` was found within budget.
pub fn specialize(
    s: &str,
    state: &mut PortfolioState,
    ctx: &SpecContext<'_>,
    ev: &mut dyn Evaluator,
    problems: &[String],
    rng: &mut impl RngCore,
) -> Option<Candidate> {
    let start = ctx.clock.now_ms();
    let parent = state.strategy(s)?.clone();
    if state.beta.spec_budget_ms == 0 || state.beta.spec_max_candidates == 0 {
        return None;
    }
    let solved: Vec<String> = problems.iter().filter(|p| state.matrix.solved(s, p).is_some()).cloned().collect();
    let by_portfolio = state.solved_by_any(problems);
    let mut unsolved: Vec<String> = problems.iter().filter(|p| !by_portfolio.contains(*p)).cloned().collect();
    if unsolved.is_empty() {
        unsolved = problems.iter().filter(|p| !solved.contains(p)).cloned().collect();
    }
    unsolved.shuffle(rng);
    let mut focus = solved.clone();
    focus.extend(unsolved.into_iter().take(solved.len().max(PERTURB_PARAMS + 1)));

    let parent_solved: BTreeSet<&str> = solved.iter().map(|p| p.as_str()).collect();

    let mut current = parent.clone();
    let mut current_obj = objective(&state.matrix, &current.id, &focus, &parent_solved);
    let mut best: Option<(Candidate, Objective)> = None;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(parent.id.clone());
    let mut evaluated = 0;
    let mut attempts = 0;
    let max_attempts = state.beta.spec_max_candidates * 20;
    while evaluated < state.beta.spec_max_candidates && attempts < max_attempts {
        if ctx.clock.now_ms().saturating_sub(start) >= state.beta.spec_budget_ms {
            break;
        }
        if state.beta.max_evaluations.is_some_and(|cap| state.evaluated.len() >= cap) {
            break;
        }
        attempts += 1;
        let restart = rng.random_bool(RESTART_PROB);
        let base = if restart { best.as_ref().map(|b| &b.0).unwrap_or(&current).assignment.clone() } else { current.assignment.clone() };
        let changes = if restart { PERTURB_PARAMS } else { 1 };
        let Some(a) = neighbour(ctx.space, &base, changes, rng) else { break };
        if ctx.space.is_forbidden(&a) {
            continue;
        }
        let Ok(cand) = Candidate::new(ctx.space, ctx.template, a, Some(parent.id.clone())) else { continue };
        if !seen.insert(cand.id.clone()) {
            continue;
        }
        evaluate(state, ev, core::slice::from_ref(&cand), &focus);
        evaluated += 1;
        let obj = objective(&state.matrix, &cand.id, &focus, &parent_solved);
        let is_new = state.strategy(&cand.id).is_none();
        if is_new && best.as_ref().is_none_or(|b| obj > b.1) {
            best = Some((cand.clone(), obj));
        }
        if restart || obj > current_obj {
            current = cand;
            current_obj = obj;
        }
    }
    let (cand, obj) = best?;
    // Only an improvement over the parent on the focus set counts.
    let parent_obj = objective(&state.matrix, &parent.id, &focus, &parent_solved);
    (obj > parent_obj).then_some(cand)
}

/// Changes `k` distinct random parameters to different values.
fn neighbour(space: &ParamSpace, a: &Assignment, k: usize, rng: &mut impl RngCore) -> Option<Assignment> {
    let mut idx: Vec<usize> = (0..space.params.len()).filter(|&i| space.params[i].values.len() > 1).collect();
    if idx.is_empty() {
        return None;
    }
    idx.shuffle(rng);
    let mut out = a.clone();
    for &i in idx.iter().take(k.max(1)) {
        let p = &space.params[i];
        let cur = &a[&p.name];
        let others: Vec<&String> = p.values.iter().filter(|v| *v != cur).collect();
        out.insert(p.name.clone(), (*others.choose(rng)?).clone());
    }
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    SelectExhausted,
    IterationCap,
    WallBudget,
    EvaluationCap,
}

/// Evaluate → reduce → select → specialize until a stop condition holds.
pub fn grackle_loop(
    state: &mut PortfolioState,
    ctx: &SpecContext<'_>,
    ev: &mut dyn Evaluator,
    problems: &[String],
    rng: &mut impl RngCore,
    mut on_iteration: impl FnMut(&PortfolioState),
) -> StopReason {
    let start = ctx.clock.now_ms();
    loop {
        let all = state.strategies.clone();
        evaluate(state, ev, &all, problems);
        reduce(state, problems);
        on_iteration(state);
        if state.iteration >= state.beta.max_iterations {
            return StopReason::IterationCap;
        }
        if state.beta.wall_budget_ms.is_some_and(|b| ctx.clock.now_ms().saturating_sub(start) >= b) {
            return StopReason::WallBudget;
        }
        if state.beta.max_evaluations.is_some_and(|cap| state.evaluated.len() >= cap) {
            return StopReason::EvaluationCap;
        }
        let Some(s) = select(state, problems, rng) else { return StopReason::SelectExhausted };
        state.iteration += 1;
        match specialize(&s, state, ctx, ev, problems, rng) {
            Some(c) => {
                debug_assert!(!ctx.space.is_forbidden(&c.assignment));
                *state.specializations.entry(s.clone()).or_insert(0) += 1;
                state.history.push(Invention { iteration: state.iteration, parent: s, child: c.id.clone() });
                state.add(c);
            }
            None => {
                state.exhausted.insert(s);
            }
        }
    }
}
