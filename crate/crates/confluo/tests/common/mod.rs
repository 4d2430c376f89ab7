#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use confluo::strategy::{parse_strategy, StrategyDefs};
use confluo::trs_io::parse_trs;
use confluo_core::budget::{Deadline, PollBudget, Unlimited};
use confluo_core::critical::{critical_pairs, variable_peaks};
use confluo_core::generator::{GenConfig, stream_rng};
use confluo_core::portfolio::{Assignment, EvalEntry, Evaluator, Job, Param, ParamSpace};
use confluo_core::procs::Witness;
use confluo_core::rewrite::{explore, successors, Reach};
use confluo_core::{Answer, Rule, Symbol, Term, Trs};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn trs(text: &str) -> Trs {
    parse_trs(text).expect("test system parses")
}

pub fn defs(text: &str) -> StrategyDefs {
    parse_strategy(text).expect("test strategy parses")
}

pub fn small_config(seed: u64) -> GenConfig {
    GenConfig {
        max_funs: 3,
        max_consts: 2,
        max_vars: 2,
        max_rules: 4,
        max_arity: 2,
        left_linear_prob: 0.6,
        complex_bias: 1.6,
        max_term_size: 7,
        seed,
    }
}

/// Random terminating ground system: every rule strictly shrinks the term.
pub fn ground_acyclic(seed: u64, index: u64) -> Trs {
    let mut rng = stream_rng(seed, index);
    let sig = [Symbol::new("a", 0), Symbol::new("b", 0), Symbol::new("c", 0), Symbol::new("f", 1), Symbol::new("g", 2)];
    let mut rules = Vec::new();
    let n = rng.random_range(1..=5);
    while rules.len() < n {
        let l = random_ground(&sig, 5, &mut rng);
        let r = random_ground(&sig, 4, &mut rng);
        if r.size() < l.size() {
            let rule = Rule::new(l, r).expect("ground rule");
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
    }
    let mut t = Trs::from_rules("ground", rules).expect("fixed arities");
    t.name = format!("ground_{seed}_{index}");
    t
}

pub fn random_ground(sig: &[Symbol], max_size: usize, rng: &mut impl Rng) -> Term {
    let consts: Vec<&Symbol> = sig.iter().filter(|f| f.arity == 0).collect();
    fn go(sig: &[Symbol], consts: &[&Symbol], budget: &mut usize, rng: &mut impl Rng) -> Term {
        let fits: Vec<&Symbol> = sig.iter().filter(|f| f.arity > 0 && f.arity < *budget).collect();
        if fits.is_empty() || rng.random_bool(0.35) {
            *budget = budget.saturating_sub(1);
            return Term::constant(&consts.choose(rng).expect("constant").name);
        }
        let f = fits.choose(rng).expect("non-empty");
        *budget -= 1;
        let args = (0..f.arity).map(|_| go(sig, consts, budget, rng)).collect();
        Term::app(&f.name, args)
    }
    let mut budget = rng.random_range(1..=max_size);
    go(sig, &consts, &mut budget, rng)
}

/// All ground terms over `sig` up to `max_size` symbols, at most `cap`.
pub fn ground_terms(sig: &[Symbol], max_size: usize, cap: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    for n in 1..=max_size {
        let mut out = Vec::new();
        for f in sig {
            if f.arity == 0 {
                if n == 1 {
                    out.push(Term::constant(&f.name));
                }
                continue;
            }
            if n < f.arity + 1 {
                continue;
            }
            // Split n - 1 symbols among the arguments.
            let mut stack: Vec<(Vec<Term>, usize)> = vec![(Vec::new(), n - 1)];
            while let Some((args, left)) = stack.pop() {
                if args.len() == f.arity {
                    if left == 0 {
                        out.push(Term::app(&f.name, args));
                    }
                    continue;
                }
                for k in 1..=left {
                    for t in &by_size[k] {
                        let mut a = args.clone();
                        a.push(t.clone());
                        stack.push((a, left - k));
                    }
                }
                if out.len() > cap {
                    break;
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().take(cap).collect()
}

const ORACLE_DEPTH: usize = 6;
const ORACLE_POLLS: u64 = 2000;
/// Per-problem cap; once spent the oracle stops looking for evidence.
const ORACLE_TOTAL_POLLS: u64 = 30_000;

struct Both<'a>(&'a PollBudget, PollBudget);

impl Deadline for Both<'_> {
    fn expired(&self) -> bool {
        self.0.expired() || self.1.expired()
    }
}

fn reach(t: &Term, trs: &Trs) -> Reach {
    explore(t, trs, ORACLE_DEPTH, None, &Unlimited)
}

/// Brute-force evidence against a prover answer, if any.
///
/// Against YES: some source has two one-step reducts whose reduct sets are
/// both exhausted within the depth bound and disjoint. Against NO: the two
/// ends of the witness have a common reduct.
pub fn oracle_contradiction(trs: &Trs, answer: Answer, witness: Option<&Witness>) -> Option<String> {
    match answer {
        Answer::Maybe => None,
        Answer::No => {
            let Some(Witness::NonConfluent { left, right, .. }) = witness else {
                return Some("NO without a non-confluence witness".into());
            };
            let (a, b) = (left.last()?, right.last()?);
            let (ra, rb) = (reach(a, trs), reach(b, trs));
            let meet = ra.terms().find(|t| rb.contains(t)).map(|t| format!("{a} and {b} meet in {t}"));
            meet
        }
        Answer::Yes => {
            let mut sources: Vec<Term> = critical_pairs(trs).into_iter().map(|c| c.peak).collect();
            sources.extend(variable_peaks(trs).into_iter().map(|p| p.source));
            let mut sig: Vec<Symbol> = trs.signature.iter().cloned().collect();
            if !sig.iter().any(|f| f.arity == 0) {
                sig.push(Symbol::new("k0", 0));
            }
            sources.extend(ground_terms(&sig, 5, 300));
            let mut seen = BTreeSet::new();
            // Reduct sets by term; `None` when the set is infinite or too large to finish.
            let mut cache: BTreeMap<Term, Option<BTreeSet<Term>>> = BTreeMap::new();
            let total = PollBudget::new(ORACLE_TOTAL_POLLS);
            for s in sources {
                if total.expired() {
                    break;
                }
                if !seen.insert(s.clone()) {
                    continue;
                }
                let next = successors(&s, trs);
                let next: Vec<&Term> = next.iter().take(6).collect();
                for u in &next {
                    if !cache.contains_key(*u) {
                        let r = finite_reach(u, trs, &total);
                        cache.insert((*u).clone(), r);
                    }
                }
                for i in 0..next.len() {
                    for j in i + 1..next.len() {
                        if let (Some(x), Some(y)) = (&cache[next[i]], &cache[next[j]]) {
                            if x.is_disjoint(y) {
                                return Some(format!("{} and {} from {s} never meet", next[i], next[j]));
                            }
                        }
                    }
                }
            }
            None
        }
    }
}

/// All reducts of `t` if there are finitely many and they are all found
/// within the depth bound.
fn finite_reach(t: &Term, trs: &Trs, total: &PollBudget) -> Option<BTreeSet<Term>> {
    let r = explore(t, trs, ORACLE_DEPTH, None, &Both(total, PollBudget::new(ORACLE_POLLS)));
    r.is_complete().then(|| r.terms().cloned().collect())
}

/// Synthetic tuning benchmark with a planted complementary optimum.
///
/// Three groups of ten problems. Four per group are solved by everyone;
/// three more need the group switch `g<k>=yes`; the last three also need
/// `q<k>` at the group's target value. Every switched-on group costs time,
/// so specialists master their own group.
pub struct Synthetic {
    pub space: ParamSpace,
    pub template: String,
    pub problems: Vec<String>,
    pub solvable: BTreeSet<String>,
}

pub const TARGETS: [&str; 3] = ["3", "1", "4"];

impl Synthetic {
    pub fn new() -> Synthetic {
        let yn = |n: &str| Param { name: n.into(), values: vec!["no".into(), "yes".into()], default: "no".into() };
        let q = |n: &str| Param { name: n.into(), values: (0..5).map(|v| v.to_string()).collect(), default: "0".into() };
        let space = ParamSpace {
            params: vec![yn("g1"), yn("g2"), yn("g3"), q("q1"), q("q2"), q("q3")],
            forbidden: vec![
                vec![("q1".into(), "4".into()), ("q3".into(), "4".into())],
                vec![("g2".into(), "yes".into()), ("q1".into(), "2".into())],
            ],
        };
        let template = "S = succ ${g1} ${g2} ${g3} ${q1} ${q2} ${q3}\n".to_string();
        let mut problems = Vec::new();
        for g in 1..=3 {
            for k in 0..10 {
                problems.push(format!("p{g}_{k}"));
            }
        }
        let solvable = problems.iter().cloned().collect();
        problems.extend((0..3).map(|k| format!("x{k}")));
        Synthetic { space, template, problems, solvable }
    }

    pub fn solves(a: &Assignment, problem: &str) -> bool {
        let Some(rest) = problem.strip_prefix('p') else { return false };
        let (g, k) = rest.split_once('_').expect("p<g>_<k>");
        let (g, k): (usize, usize) = (g.parse().unwrap(), k.parse().unwrap());
        let on = a[&format!("g{g}")] == "yes";
        match k {
            0..=3 => true,
            4..=6 => on,
            _ => on && a[&format!("q{g}")] == TARGETS[g - 1],
        }
    }

    pub fn millis(a: &Assignment) -> u64 {
        let on = (1..=3).filter(|g| a[&format!("g{g}")] == "yes").count() as u64;
        let q: u64 = (1..=3).map(|g| a[&format!("q{g}")].parse::<u64>().unwrap()).sum();
        100 + 300 * on + 5 * q
    }
}

/// Evaluator over [`Synthetic`] that counts what it was asked to run.
#[derive(Default)]
pub struct SyntheticEvaluator {
    pub runs: usize,
    pub forbidden_visits: usize,
    pub strategies: BTreeSet<String>,
    pub space: ParamSpace,
}

impl Evaluator for SyntheticEvaluator {
    fn run_batch(&mut self, jobs: &[Job<'_>], limit_ms: u64) -> Vec<EvalEntry> {
        jobs.iter()
            .map(|j| {
                self.runs += 1;
                self.strategies.insert(j.strategy.id.clone());
                if self.space.is_forbidden(&j.strategy.assignment) {
                    self.forbidden_visits += 1;
                }
                let a = &j.strategy.assignment;
                let millis = Synthetic::millis(a);
                let answer = if Synthetic::solves(a, j.problem) && millis <= limit_ms { Answer::Yes } else { Answer::Maybe };
                EvalEntry { answer, millis, workers: 1 }
            })
            .collect()
    }
}

pub fn solved_map(m: &confluo_core::portfolio::EvalMatrix, ids: &[String], problems: &[String]) -> BTreeMap<String, BTreeSet<String>> {
    ids.iter()
        .map(|s| (s.clone(), problems.iter().filter(|p| m.solved(s, p).is_some()).cloned().collect()))
        .collect()
}
