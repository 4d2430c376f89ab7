//! Overlaps, critical pairs and variable-position peaks.
//!
//! Every overlap renames its inner rule with suffix `#1` and its outer rule
//! with suffix `#2`, so results are stable across runs.

use alloc::vec::Vec;
use core::fmt;

use crate::rewrite::is_one_step;
use crate::term::{Position, Rule, Substitution, Term, Trs};
use crate::unify::unify;

pub const INNER_SUFFIX: &str = "1";
pub const OUTER_SUFFIX: &str = "2";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub inner_index: usize,
    pub inner_rule: Rule,
    pub position: Position,
    pub outer_index: usize,
    pub outer_rule: Rule,
    pub mgu: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub left: Term,
    pub right: Term,
    pub peak: Term,
    pub position: Position,
    pub inner_index: usize,
    pub outer_index: usize,
}

impl CriticalPair {
    pub fn is_trivial(&self) -> bool {
        self.left == self.right
    }

    pub fn as_peak(&self) -> Peak {
        Peak { source: self.peak.clone(), left: self.left.clone(), right: self.right.clone() }
    }
}

/// `left ← source → right`, one step each.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Peak {
    pub source: Term,
    pub left: Term,
    pub right: Term,
}

impl Peak {
    pub fn validate(&self, trs: &Trs) -> bool {
        is_one_step(&self.source, &self.left, trs) && is_one_step(&self.source, &self.right, trs)
    }
}

impl fmt::Display for Peak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PEAK {} <- {} -> {}", self.left, self.source, self.right)
    }
}

pub fn overlaps(trs: &Trs) -> Vec<Overlap> {
    let mut out = Vec::new();
    for (j, outer) in trs.rules.iter().enumerate() {
        let outer_r = outer.rename(OUTER_SUFFIX);
        for pos in outer_r.lhs.fun_positions() {
            let sub = outer_r.lhs.subterm(&pos).expect("function position");
            for (i, inner) in trs.rules.iter().enumerate() {
                if pos.is_root() && inner.is_variant_of(outer) {
                    continue;
                }
                let inner_r = inner.rename(INNER_SUFFIX);
                if let Some(mgu) = unify(&inner_r.lhs, sub) {
                    out.push(Overlap {
                        inner_index: i,
                        inner_rule: inner_r,
                        position: pos.clone(),
                        outer_index: j,
                        outer_rule: outer_r.clone(),
                        mgu,
                    });
                }
            }
        }
    }
    out
}

impl Overlap {
    pub fn critical_pair(&self) -> CriticalPair {
        let peak = self.mgu.apply(&self.outer_rule.lhs);
        let left = peak.replace_at(&self.position.0, self.mgu.apply(&self.inner_rule.rhs)).expect("overlap position");
        let right = self.mgu.apply(&self.outer_rule.rhs);
        CriticalPair {
            left,
            right,
            peak,
            position: self.position.clone(),
            inner_index: self.inner_index,
            outer_index: self.outer_index,
        }
    }
}

pub fn critical_pairs(trs: &Trs) -> Vec<CriticalPair> {
    overlaps(trs).iter().map(Overlap::critical_pair).collect()
}

/// Peaks obtained by plugging a renamed lhs `l₁` into one variable occurrence
/// of another lhs `l₂`. `left` is the root step with `l₂ → r₂`, `right`
/// rewrites the designated occurrence with `l₁ → r₁`.
pub fn variable_peaks(trs: &Trs) -> Vec<Peak> {
    let mut out = Vec::new();
    for outer in &trs.rules {
        let outer_r = outer.rename(OUTER_SUFFIX);
        for q in outer_r.lhs.var_positions() {
            let Some(Term::Var(x)) = outer_r.lhs.subterm(&q) else { continue };
            for inner in &trs.rules {
                let inner_r = inner.rename(INNER_SUFFIX);
                let mut sigma = Substitution::new();
                sigma.insert(x.clone(), inner_r.lhs.clone());
                let source = sigma.apply(&outer_r.lhs);
                let left = sigma.apply(&outer_r.rhs);
                let right = source.replace_at(&q.0, inner_r.rhs.clone()).expect("variable position");
                out.push(Peak { source, left, right });
            }
        }
    }
    out
}
