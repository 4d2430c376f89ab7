//! Confluence and non-confluence processors, and redundant-rule
//! transformations.
//!
//! Every YES or NO carries a [`Witness`] that [`validate_witness`] replays
//! against the rewrite system without trusting the processor.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::budget::Deadline;
use crate::critical::{critical_pairs, variable_peaks, CriticalPair, Peak};
use crate::rewrite::{
    bounded_join_within, explore, is_derivation, is_normal_form, one_step_reducts, syntactic_predicates, Join,
    JoinResult, Reach, Width,
};
use crate::term::{ground_freeze, Name, Rule, Term, Trs};
use crate::termination::{check_certificate, prove_termination, Certificate, TermBudget};
use crate::unify::unify;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Yes,
    No,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonJoinReason {
    Tcap,
    Nf,
}

impl fmt::Display for NonJoinReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonJoinReason::Tcap => "tcap",
            NonJoinReason::Nf => "nf",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// One join per critical pair, in `critical_pairs` order.
    Confluent { criterion: String, termination: Option<Certificate>, joins: Vec<Join> },
    /// `left[0] ← peak.source → right[0]`, then `left`, `right` are
    /// derivations to two terms that cannot be joined.
    NonConfluent { peak: Peak, left: Vec<Term>, right: Vec<Term>, reason: NonJoinReason },
}

impl Witness {
    pub fn verdict(&self) -> Verdict {
        match self {
            Witness::Confluent { .. } => Verdict::Yes,
            Witness::NonConfluent { .. } => Verdict::No,
        }
    }

    /// Certificate text, one item per line.
    pub fn lines(&self) -> Vec<String> {
        match self {
            Witness::Confluent { criterion, termination, joins } => {
                let mut out = alloc::vec![format!("CRITERION {criterion}")];
                if let Some(c) = termination {
                    out.push(format!("TERMINATION {c}"));
                }
                out.extend(joins.iter().map(|j| format!("{j}")));
                out
            }
            Witness::NonConfluent { peak, left, right, reason } => {
                let (t, u) = (left.last().expect("path"), right.last().expect("path"));
                alloc::vec![
                    String::from("CRITERION nonconfluence"),
                    format!("{peak}"),
                    format!("REACH {} ->{} {}", left[0], left.len() - 1, t),
                    format!("REACH {} ->{} {}", right[0], right.len() - 1, u),
                    format!("NONJOINABLE {t} {u} ({reason})"),
                ]
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProcOutcome {
    Yes,
    No,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcResult {
    pub outcome: ProcOutcome,
    pub witness: Option<Witness>,
    pub reason: String,
}

impl ProcResult {
    pub fn fail(reason: impl Into<String>) -> ProcResult {
        ProcResult { outcome: ProcOutcome::Fail, witness: None, reason: reason.into() }
    }

    pub fn proved(w: Witness) -> ProcResult {
        let outcome = match w.verdict() {
            Verdict::Yes => ProcOutcome::Yes,
            Verdict::No => ProcOutcome::No,
        };
        let reason = w.lines().join("\n");
        ProcResult { outcome, witness: Some(w), reason }
    }
}

/// Weak orthogonality: left-linear with only trivial critical pairs.
pub fn proc_orthogonal(trs: &Trs) -> ProcResult {
    if !syntactic_predicates(trs).left_linear {
        return ProcResult::fail("not left-linear");
    }
    let cps = critical_pairs(trs);
    if let Some(cp) = cps.iter().find(|c| !c.is_trivial()) {
        return ProcResult::fail(format!("non-trivial critical pair {} = {}", cp.left, cp.right));
    }
    let joins = cps.iter().map(|c| Join::trivial(&c.left)).collect();
    ProcResult::proved(Witness::Confluent { criterion: String::from("orthogonal"), termination: None, joins })
}

/// `s →≤n v ←= t` with `v` found by breadth-first search from `s`.
fn closing(s: &Term, t: &Term, trs: &Trs, n: usize, deadline: &dyn Deadline) -> Option<Join> {
    let reach = explore(s, trs, n, None, deadline);
    if reach.contains(t) {
        return Some(Join { left: reach.path_to(t)?, right: alloc::vec![t.clone()] });
    }
    for r in one_step_reducts(t, trs) {
        if reach.contains(&r.term) {
            return Some(Join { left: reach.path_to(&r.term)?, right: alloc::vec![t.clone(), r.term] });
        }
    }
    None
}

pub fn proc_strongly_closed(trs: &Trs, n: usize, deadline: &dyn Deadline) -> ProcResult {
    if !syntactic_predicates(trs).linear {
        return ProcResult::fail("not linear");
    }
    let mut joins = Vec::new();
    for cp in critical_pairs(trs) {
        if deadline.expired() {
            return ProcResult::fail("timeout");
        }
        let (Some(a), Some(b)) = (closing(&cp.left, &cp.right, trs, n, deadline), closing(&cp.right, &cp.left, trs, n, deadline))
        else {
            return ProcResult::fail(format!("critical pair {} = {} not strongly closed", cp.left, cp.right));
        };
        joins.push(a);
        // The mirrored closing is a join from right to left; store it oriented.
        joins.push(Join { left: b.right, right: b.left });
    }
    ProcResult::proved(Witness::Confluent { criterion: format!("strongly-closed {n}"), termination: None, joins })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbConfig {
    pub termination: TermBudget,
    pub join_depth: usize,
}

impl Default for KbConfig {
    fn default() -> Self {
        KbConfig { termination: TermBudget::default(), join_depth: 8 }
    }
}

fn first_normal_form(reach: &Reach, trs: &Trs) -> Option<Term> {
    reach.terms_by_distance().into_iter().find(|t| is_normal_form(t, trs)).cloned()
}

/// Newman's lemma: terminating and every critical pair joinable.
pub fn proc_knuth_bendix(trs: &Trs, cfg: &KbConfig, deadline: &dyn Deadline) -> ProcResult {
    let term = prove_termination(trs, &cfg.termination, deadline);
    let Some(cert) = term.certificate.filter(|_| term.status == crate::termination::TermStatus::Terminating) else {
        return ProcResult::fail("termination not shown");
    };
    let mut joins = Vec::new();
    let mut exhausted = false;
    for cp in critical_pairs(trs) {
        if deadline.expired() {
            return ProcResult::fail("timeout");
        }
        match bounded_join_within(&cp.left, &cp.right, trs, cfg.join_depth, None, deadline) {
            JoinResult::Joinable(j) => joins.push(j),
            _ => {
                if let Some(w) = distinct_normal_forms(&cp, trs, cfg.join_depth, deadline) {
                    return ProcResult::proved(w);
                }
                exhausted = true;
            }
        }
    }
    if exhausted {
        return ProcResult::fail("join search exhausted");
    }
    ProcResult::proved(Witness::Confluent { criterion: String::from("knuth-bendix"), termination: Some(cert), joins })
}

fn distinct_normal_forms(cp: &CriticalPair, trs: &Trs, depth: usize, deadline: &dyn Deadline) -> Option<Witness> {
    let ls = explore(&cp.left, trs, depth, None, deadline);
    let rs = explore(&cp.right, trs, depth, None, deadline);
    let n1 = first_normal_form(&ls, trs)?;
    let n2 = first_normal_form(&rs, trs)?;
    if n1 == n2 {
        return None;
    }
    Some(Witness::NonConfluent {
        peak: cp.as_peak(),
        left: ls.path_to(&n1)?,
        right: rs.path_to(&n2)?,
        reason: NonJoinReason::Nf,
    })
}

/// Over-approximation of the reducts of `t`: every reduct of `t` is an
/// instance of `tcap(t)`. Fresh variables are `prefix0, prefix1, …`.
pub fn tcap(t: &Term, trs: &Trs) -> Term {
    let lhss: Vec<Term> = trs.rules.iter().map(|r| r.lhs.rename_vars("l")).collect();
    let mut next = 0;
    tcap_with(t, &lhss, "_", &mut next)
}

fn tcap_with(t: &Term, lhss: &[Term], prefix: &str, next: &mut usize) -> Term {
    let fresh = |next: &mut usize| {
        let v = Term::var(&format!("{prefix}{next}"));
        *next += 1;
        v
    };
    match t {
        Term::Var(_) => fresh(next),
        Term::App(f, args) => {
            let capped = Term::App(f.clone(), args.iter().map(|a| tcap_with(a, lhss, prefix, next)).collect());
            if lhss.iter().any(|l| unify(l, &capped).is_some()) {
                fresh(next)
            } else {
                capped
            }
        }
    }
}

/// `tcap(t)` and `tcap(u)` (variables apart) do not unify.
pub fn tcap_separates(t: &Term, u: &Term, trs: &Trs) -> bool {
    let lhss: Vec<Term> = trs.rules.iter().map(|r| r.lhs.rename_vars("l")).collect();
    let mut n1 = 0;
    let mut n2 = 0;
    let a = tcap_with(t, &lhss, "_a", &mut n1);
    let b = tcap_with(u, &lhss, "_b", &mut n2);
    unify(&a, &b).is_none()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapMode {
    Fun,
    Var,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonconfluenceConfig {
    pub steps: usize,
    pub width: Width,
    pub mode: OverlapMode,
    pub use_tcap: bool,
    pub use_nf: bool,
    pub guard_depth: usize,
}

impl Default for NonconfluenceConfig {
    fn default() -> Self {
        NonconfluenceConfig { steps: 2, width: None, mode: OverlapMode::Both, use_tcap: true, use_nf: false, guard_depth: 6 }
    }
}

/// Pairs examined per peak before moving on.
const PAIRS_PER_PEAK: usize = 20_000;

pub fn proc_nonconfluence(trs: &Trs, cfg: &NonconfluenceConfig, deadline: &dyn Deadline) -> ProcResult {
    let mut peaks: Vec<Peak> = Vec::new();
    if matches!(cfg.mode, OverlapMode::Fun | OverlapMode::Both) {
        peaks.extend(critical_pairs(trs).iter().map(CriticalPair::as_peak));
    }
    if matches!(cfg.mode, OverlapMode::Var | OverlapMode::Both) {
        peaks.extend(variable_peaks(trs));
    }
    let mut seen = BTreeSet::new();
    peaks.retain(|p| p.left != p.right && seen.insert(p.clone()));
    for peak in peaks {
        if deadline.expired() {
            return ProcResult::fail("timeout");
        }
        if let Some(w) = refute_peak(&peak, trs, cfg, deadline) {
            return ProcResult::proved(w);
        }
    }
    ProcResult::fail("no non-joinable peak found")
}

struct Candidate {
    term: Term,
    frozen: Term,
    dist: usize,
    nf: bool,
}

fn candidates(reach: &Reach, trs: &Trs, need_nf: bool) -> Vec<Candidate> {
    reach
        .terms_by_distance()
        .into_iter()
        .map(|t| {
            let frozen = ground_freeze(t);
            let nf = need_nf && is_normal_form(&frozen, trs);
            Candidate { term: t.clone(), frozen, dist: reach.distance(t).unwrap_or(0), nf }
        })
        .collect()
}

fn refute_peak(peak: &Peak, trs: &Trs, cfg: &NonconfluenceConfig, deadline: &dyn Deadline) -> Option<Witness> {
    let ls = explore(&peak.left, trs, cfg.steps, cfg.width, deadline);
    let rs = explore(&peak.right, trs, cfg.steps, cfg.width, deadline);
    let lc = candidates(&ls, trs, cfg.use_nf);
    let rc = candidates(&rs, trs, cfg.use_nf);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..lc.len() {
        for j in 0..rc.len() {
            pairs.push((i, j));
            if pairs.len() >= PAIRS_PER_PEAK {
                break;
            }
        }
    }
    pairs.sort_by_key(|&(i, j)| lc[i].dist + rc[j].dist);
    for (k, (i, j)) in pairs.into_iter().enumerate() {
        if k % 64 == 0 && deadline.expired() {
            return None;
        }
        let (t, u) = (&lc[i], &rc[j]);
        if t.frozen == u.frozen {
            continue;
        }
        let reason = if cfg.use_nf && t.nf && u.nf {
            NonJoinReason::Nf
        } else if cfg.use_tcap && tcap_separates(&t.frozen, &u.frozen, trs) {
            NonJoinReason::Tcap
        } else {
            continue;
        };
        let guard = bounded_join_within(&t.term, &u.term, trs, cfg.guard_depth, None, deadline);
        if guard.is_joinable() {
            debug_assert!(false, "non-joinability claim refuted for {} and {}", t.term, u.term);
            continue;
        }
        return Some(Witness::NonConfluent {
            peak: peak.clone(),
            left: ls.path_to(&t.term)?,
            right: rs.path_to(&u.term)?,
            reason,
        });
    }
    None
}

/// Replays a witness: joins and derivations step by step, the criterion's
/// side conditions, and the non-joinability argument.
pub fn validate_witness(trs: &Trs, w: &Witness) -> bool {
    match w {
        Witness::Confluent { criterion, termination, joins } => {
            if !joins.iter().all(|j| j.validate(trs)) {
                return false;
            }
            let cps = critical_pairs(trs);
            let covers = |joins: &[Join]| {
                cps.iter().all(|c| joins.iter().any(|j| j.source_left() == &c.left && j.source_right() == &c.right))
            };
            let p = syntactic_predicates(trs);
            if criterion == "orthogonal" {
                p.left_linear && cps.iter().all(CriticalPair::is_trivial)
            } else if let Some(n) = criterion.strip_prefix("strongly-closed ") {
                let Ok(n) = n.parse::<usize>() else { return false };
                p.linear
                    && cps.iter().all(|c| {
                        let fits = |a: &Term, b: &Term| {
                            joins.iter().any(|j| {
                                j.source_left() == a && j.source_right() == b && j.left_steps() <= n && j.right_steps() <= 1
                            })
                        };
                        let mirrored = |a: &Term, b: &Term| {
                            joins.iter().any(|j| {
                                j.source_left() == a && j.source_right() == b && j.left_steps() <= 1 && j.right_steps() <= n
                            })
                        };
                        fits(&c.left, &c.right) && mirrored(&c.left, &c.right)
                    })
            } else if criterion == "knuth-bendix" {
                termination.as_ref().is_some_and(|c| check_certificate(trs, c)) && covers(joins)
            } else {
                false
            }
        }
        Witness::NonConfluent { peak, left, right, reason } => {
            if !peak.validate(trs) || !is_derivation(left, trs) || !is_derivation(right, trs) {
                return false;
            }
            if left[0] != peak.left || right[0] != peak.right {
                return false;
            }
            let t = ground_freeze(left.last().expect("path"));
            let u = ground_freeze(right.last().expect("path"));
            if t == u {
                return false;
            }
            match reason {
                NonJoinReason::Nf => is_normal_form(&t, trs) && is_normal_form(&u, trs),
                NonJoinReason::Tcap => tcap_separates(&t, &u, trs),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundantConfig {
    pub js: bool,
    pub rhs: bool,
    pub develop: Option<usize>,
    /// Skip added rules whose rhs size is at least this; `None` = no limit.
    pub size_cap: Option<usize>,
    /// Joins up to minimal length + m; `None` disables the join search.
    pub join_m: Option<usize>,
}

impl Default for RedundantConfig {
    fn default() -> Self {
        RedundantConfig { js: true, rhs: false, develop: None, size_cap: None, join_m: Some(0) }
    }
}

/// Join search depth per side used by the `js` mode.
const JS_DEPTH: usize = 5;
/// Upper bound on rules added by one call.
pub const MAX_ADDED_RULES: usize = 64;

/// Adds rules `l → r` with `l →⁺ r` in `trs`. Returns `trs` unchanged when
/// nothing new qualifies.
pub fn redundant_add(trs: &Trs, cfg: &RedundantConfig, deadline: &dyn Deadline) -> Trs {
    let mut added: Vec<Rule> = Vec::new();
    let avoid: BTreeSet<Name> = trs.symbol_names();
    let push = |l: &Term, r: &Term, added: &mut Vec<Rule>| {
        if l == r || added.len() >= MAX_ADDED_RULES {
            return;
        }
        if cfg.size_cap.is_some_and(|n| r.size() >= n) {
            return;
        }
        let Ok(rule) = Rule::new(l.clone(), r.clone()) else { return };
        let rule = rule.normalize_vars(&avoid);
        if trs.rules.iter().chain(added.iter()).any(|q| q.is_variant_of(&rule)) {
            return;
        }
        added.push(rule);
    };
    let needs_cps = (cfg.js && cfg.join_m.is_some()) || cfg.develop.is_some();
    let cps = if needs_cps { critical_pairs(trs) } else { Vec::new() };
    if let (true, Some(m)) = (cfg.js, cfg.join_m) {
        for cp in &cps {
            if deadline.expired() {
                break;
            }
            for v in join_meets(&cp.left, &cp.right, trs, m, deadline) {
                push(&cp.peak, &v, &mut added);
            }
        }
    }
    if cfg.rhs {
        for rule in &trs.rules {
            for red in one_step_reducts(&rule.rhs, trs) {
                push(&rule.lhs, &red.term, &mut added);
            }
        }
    }
    if let Some(k) = cfg.develop {
        for cp in &cps {
            if deadline.expired() {
                break;
            }
            for side in [&cp.left, &cp.right] {
                let reach = explore(side, trs, k, None, deadline);
                for u in reach.terms_by_distance() {
                    push(&cp.peak, u, &mut added);
                }
            }
        }
    }
    if added.is_empty() {
        return trs.clone();
    }
    let mut rules = trs.rules.clone();
    rules.extend(added);
    trs.with_rules(rules)
}

/// Common reducts `v` of `s` and `t` with `|s →* v| + |t →* v| ≤ k + m`,
/// `k` the shortest such total.
fn join_meets(s: &Term, t: &Term, trs: &Trs, m: usize, deadline: &dyn Deadline) -> Vec<Term> {
    let ls = explore(s, trs, JS_DEPTH + m, None, deadline);
    let rs = explore(t, trs, JS_DEPTH + m, None, deadline);
    let mut meets: Vec<(usize, Term)> = ls
        .terms_by_distance()
        .into_iter()
        .filter_map(|v| Some((ls.distance(v)? + rs.distance(v)?, v.clone())))
        .collect();
    let Some(k) = meets.iter().map(|(d, _)| *d).min() else { return Vec::new() };
    meets.retain(|(d, _)| *d <= k + m);
    meets.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    meets.into_iter().map(|(_, v)| v).collect()
}

/// Depth used when removal runs with an unbounded join search.
pub const UNBOUNDED_REMOVE_DEPTH: usize = 32;

/// Drops rules `l → r` with `l →^{≤depth} r` in the remaining system, last
/// rule first. Requiring a derivation rather than a join keeps `→*`
/// unchanged, so NO answers on the result also hold for the input.
/// `depth = None` searches up to [`UNBOUNDED_REMOVE_DEPTH`] steps (the node
/// cap still applies).
pub fn redundant_remove(trs: &Trs, depth: Option<usize>, deadline: &dyn Deadline) -> Trs {
    let depth = depth.unwrap_or(UNBOUNDED_REMOVE_DEPTH);
    let mut rules = trs.rules.clone();
    let mut i = rules.len();
    while i > 0 {
        i -= 1;
        if deadline.expired() {
            break;
        }
        let mut rest = rules.clone();
        let rule = rest.remove(i);
        let remainder = trs.with_rules(rest.clone());
        let reach = explore(&rule.lhs, &remainder, depth, None, deadline);
        if reach.contains(&rule.rhs) {
            rules = rest;
        }
    }
    if rules.len() == trs.rules.len() {
        return trs.clone();
    }
    trs.with_rules(rules)
}
