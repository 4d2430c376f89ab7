//! Syntactic matching and most general unifiers with occurs check.

use alloc::vec;
use alloc::vec::Vec;

use crate::term::{Substitution, Term};

/// Finds `σ` with `pattern σ = subject`. The domain of `σ` is exactly the
/// variables of `pattern`; variables of `subject` are treated as constants.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    let mut stack = vec![(pattern, subject)];
    while let Some((p, s)) = stack.pop() {
        match p {
            Term::Var(x) => match sigma.get(x) {
                Some(bound) if bound != s => return None,
                Some(_) => {}
                None => sigma.insert(x.clone(), s.clone()),
            },
            Term::App(f, ps) => match s {
                Term::App(g, ss) if f == g && ps.len() == ss.len() => stack.extend(ps.iter().zip(ss.iter())),
                _ => return None,
            },
        }
    }
    Some(sigma)
}

/// Most general unifier of `s` and `t`, idempotent, or `None`.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    unify_all(vec![(s.clone(), t.clone())])
}

/// Simultaneous unification of a list of equations.
pub fn unify_all(mut eqs: Vec<(Term, Term)>) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    while let Some((a, b)) = eqs.pop() {
        let a = sigma.apply(&a);
        let b = sigma.apply(&b);
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(&x) {
                    return None;
                }
                let mut single = Substitution::new();
                single.insert(x.clone(), t.clone());
                for v in sigma.0.values_mut() {
                    *v = single.apply(v);
                }
                sigma.insert(x, t);
            }
            (Term::App(f, fs), Term::App(g, gs)) => {
                if f != g || fs.len() != gs.len() {
                    return None;
                }
                eqs.extend(fs.into_iter().zip(gs));
            }
        }
    }
    Some(sigma)
}
