//! One-step rewriting, bounded reachability and joinability search.
//!
//! All enumeration is deterministic: positions in pre-order (outermost and
//! leftmost first), then rules in list order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::budget::{Deadline, Unlimited};
use crate::term::{Position, Term, Trs};
use crate::unify::match_term;

/// Per-node successor cap for breadth-first searches. `None` is unbounded.
pub type Width = Option<usize>;

/// Upper bound on the number of terms a single exploration may hold.
pub const MAX_NODES: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduct {
    pub position: Position,
    pub rule: usize,
    pub term: Term,
}

/// All single-step successors of `t` with their witnesses.
pub fn one_step_reducts(t: &Term, trs: &Trs) -> Vec<Reduct> {
    let mut out = Vec::new();
    for pos in t.fun_positions() {
        let sub = t.subterm(&pos).expect("position from fun_positions");
        for (i, rule) in trs.rules.iter().enumerate() {
            if let Some(sigma) = match_term(&rule.lhs, sub) {
                let term = t.replace_at(&pos.0, sigma.apply(&rule.rhs)).expect("valid position");
                out.push(Reduct { position: pos.clone(), rule: i, term });
            }
        }
    }
    out
}

/// Rewrites `t` at `pos` with rule `rule`, if the rule applies there.
pub fn rewrite_at(t: &Term, pos: &Position, rule: usize, trs: &Trs) -> Option<Term> {
    let r = trs.rules.get(rule)?;
    let sub = t.subterm(pos)?;
    let sigma = match_term(&r.lhs, sub)?;
    t.replace_at(&pos.0, sigma.apply(&r.rhs))
}

/// Distinct successor terms in enumeration order.
pub fn successors(t: &Term, trs: &Trs) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for r in one_step_reducts(t, trs) {
        if !out.contains(&r.term) {
            out.push(r.term);
        }
    }
    out
}

pub fn is_normal_form(t: &Term, trs: &Trs) -> bool {
    t.fun_positions().iter().all(|p| {
        let sub = t.subterm(p).expect("valid position");
        trs.rules.iter().all(|r| match_term(&r.lhs, sub).is_none())
    })
}

/// `a →_R b` in exactly one step.
pub fn is_one_step(a: &Term, b: &Term, trs: &Trs) -> bool {
    one_step_reducts(a, trs).iter().any(|r| &r.term == b)
}

/// Every consecutive pair of `path` is a single rewrite step.
pub fn is_derivation(path: &[Term], trs: &Trs) -> bool {
    !path.is_empty() && path.windows(2).all(|w| is_one_step(&w[0], &w[1], trs))
}

/// Breadth-first reduct set with parent links for path reconstruction.
#[derive(Clone, Debug)]
pub struct Reach {
    nodes: BTreeMap<Term, (usize, Option<Term>)>,
    frontier: Vec<Term>,
    levels: usize,
    pruned: bool,
}

impl Reach {
    pub fn new(root: Term) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(root.clone(), (0, None));
        Reach { nodes, frontier: vec![root], levels: 0, pruned: false }
    }

    /// Expands the frontier by one rewrite step and returns the new terms.
    pub fn expand_level(&mut self, trs: &Trs, width: Width, deadline: &dyn Deadline) -> Vec<Term> {
        let mut fresh = Vec::new();
        let frontier = core::mem::take(&mut self.frontier);
        let level = self.levels + 1;
        for t in frontier {
            if deadline.expired() || self.nodes.len() >= MAX_NODES {
                self.pruned = true;
                break;
            }
            let succ = successors(&t, trs);
            let keep = match width {
                Some(w) if succ.len() > w => {
                    self.pruned = true;
                    w
                }
                _ => succ.len(),
            };
            for u in succ.into_iter().take(keep) {
                if !self.nodes.contains_key(&u) {
                    self.nodes.insert(u.clone(), (level, Some(t.clone())));
                    fresh.push(u);
                }
            }
        }
        self.levels = level;
        self.frontier = fresh.clone();
        fresh
    }

    /// No unexplored terms remain and nothing was cut away.
    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty() && !self.pruned
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    pub fn frontier_is_empty(&self) -> bool {
        self.frontier.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.nodes.contains_key(t)
    }

    pub fn distance(&self, t: &Term) -> Option<usize> {
        self.nodes.get(t).map(|(d, _)| *d)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.nodes.keys()
    }

    /// Terms in breadth-first discovery order (distance, then term order).
    pub fn terms_by_distance(&self) -> Vec<&Term> {
        let mut v: Vec<(&Term, usize)> = self.nodes.iter().map(|(t, (d, _))| (t, *d)).collect();
        v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        v.into_iter().map(|(t, _)| t).collect()
    }

    /// Derivation from the root to `t`.
    pub fn path_to(&self, t: &Term) -> Option<Vec<Term>> {
        let mut path = vec![t.clone()];
        let mut cur = self.nodes.get(t)?;
        while let Some(parent) = &cur.1 {
            path.push(parent.clone());
            cur = self.nodes.get(parent).expect("parent recorded");
        }
        path.reverse();
        Some(path)
    }
}

/// Reducts of `t` reachable in at most `depth` steps.
pub fn explore(t: &Term, trs: &Trs, depth: usize, width: Width, deadline: &dyn Deadline) -> Reach {
    let mut reach = Reach::new(t.clone());
    for _ in 0..depth {
        if reach.frontier_is_empty() {
            break;
        }
        reach.expand_level(trs, width, deadline);
    }
    reach
}

/// Two derivations ending in the same term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Join {
    pub left: Vec<Term>,
    pub right: Vec<Term>,
}

impl Join {
    pub fn trivial(t: &Term) -> Join {
        Join { left: vec![t.clone()], right: vec![t.clone()] }
    }

    pub fn source_left(&self) -> &Term {
        &self.left[0]
    }

    pub fn source_right(&self) -> &Term {
        &self.right[0]
    }

    pub fn meet(&self) -> &Term {
        self.left.last().expect("non-empty derivation")
    }

    pub fn left_steps(&self) -> usize {
        self.left.len() - 1
    }

    pub fn right_steps(&self) -> usize {
        self.right.len() - 1
    }

    /// Replays both derivations step by step.
    pub fn validate(&self, trs: &Trs) -> bool {
        self.left.last() == self.right.last() && is_derivation(&self.left, trs) && is_derivation(&self.right, trs)
    }
}

impl core::fmt::Display for Join {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "JOIN {} ->{} {} <-{} {}",
            self.source_left(),
            self.left_steps(),
            self.meet(),
            self.right_steps(),
            self.source_right()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinResult {
    Joinable(Join),
    /// Both reduct sets were explored completely and do not meet.
    NotProven,
    /// A depth, width, node or time limit cut the search short.
    Exhausted,
}

impl JoinResult {
    pub fn is_joinable(&self) -> bool {
        matches!(self, JoinResult::Joinable(_))
    }
}

pub fn bounded_join(s: &Term, t: &Term, trs: &Trs, depth: usize, width: Width) -> JoinResult {
    bounded_join_within(s, t, trs, depth, width, &Unlimited)
}

/// Searches for a common reduct of `s` and `t` within `depth` steps on each
/// side. Never claims non-joinability.
pub fn bounded_join_within(
    s: &Term,
    t: &Term,
    trs: &Trs,
    depth: usize,
    width: Width,
    deadline: &dyn Deadline,
) -> JoinResult {
    if s == t {
        return JoinResult::Joinable(Join::trivial(s));
    }
    let mut left = Reach::new(s.clone());
    let mut right = Reach::new(t.clone());
    for _ in 0..depth {
        if left.is_complete() && right.is_complete() {
            return JoinResult::NotProven;
        }
        if deadline.expired() {
            return JoinResult::Exhausted;
        }
        for u in left.expand_level(trs, width, deadline) {
            if right.contains(&u) {
                return JoinResult::Joinable(join_via(&left, &right, &u));
            }
        }
        for u in right.expand_level(trs, width, deadline) {
            if left.contains(&u) {
                return JoinResult::Joinable(join_via(&left, &right, &u));
            }
        }
    }
    if left.is_complete() && right.is_complete() {
        JoinResult::NotProven
    } else {
        JoinResult::Exhausted
    }
}

fn join_via(left: &Reach, right: &Reach, meet: &Term) -> Join {
    Join { left: left.path_to(meet).expect("meet in left"), right: right.path_to(meet).expect("meet in right") }
}

/// Syntactic properties used by `if p then s else s'` and by processors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub left_linear: bool,
    pub right_linear: bool,
    pub linear: bool,
    pub ground: bool,
    pub collapsing: bool,
    pub duplicating: bool,
}

pub fn syntactic_predicates(trs: &Trs) -> Predicates {
    let left_linear = trs.rules.iter().all(|r| r.lhs.is_linear());
    let right_linear = trs.rules.iter().all(|r| r.rhs.is_linear());
    let ground = trs.rules.iter().all(|r| r.lhs.is_ground() && r.rhs.is_ground());
    let collapsing = trs.rules.iter().any(|r| r.rhs.is_var());
    let duplicating = trs.rules.iter().any(|r| {
        let lc = r.lhs.var_occurrences();
        r.rhs.var_occurrences().iter().any(|(x, n)| *n > lc.get(x).copied().unwrap_or(0))
    });
    Predicates { left_linear, right_linear, linear: left_linear && right_linear, ground, collapsing, duplicating }
}
