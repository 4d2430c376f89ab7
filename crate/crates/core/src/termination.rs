//! Termination via reduction orders: LPO, KBO and linear interpretations
//! over the naturals, with bounded parameter search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Deadline;
use crate::term::{Name, Symbol, Term, Trs};

/// Symbol ranks; a higher rank is bigger. Equal ranks of distinct symbols
/// are incomparable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Precedence {
    rank: BTreeMap<Name, usize>,
}

impl Precedence {
    /// Total order from smallest to largest.
    pub fn from_order(order: &[Name]) -> Precedence {
        Precedence { rank: order.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect() }
    }

    pub fn from_ranks(rank: BTreeMap<Name, usize>) -> Precedence {
        Precedence { rank }
    }

    pub fn greater(&self, f: &Name, g: &Name) -> bool {
        match (self.rank.get(f), self.rank.get(g)) {
            (Some(a), Some(b)) => a > b,
            _ => false,
        }
    }

    pub fn is_maximal(&self, f: &Name) -> bool {
        let Some(r) = self.rank.get(f) else { return false };
        self.rank.iter().all(|(g, s)| g == f || s < r)
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v: Vec<(&Name, &usize)> = self.rank.iter().collect();
        v.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        let parts: Vec<&str> = v.iter().map(|(n, _)| &***n).collect();
        write!(f, "{}", parts.join(" > "))
    }
}

pub fn lpo_greater(s: &Term, t: &Term, prec: &Precedence) -> bool {
    let Term::App(f, ss) = s else { return false };
    if let Term::Var(x) = t {
        return s.occurs(x);
    }
    if ss.iter().any(|si| si == t || lpo_greater(si, t, prec)) {
        return true;
    }
    let Term::App(g, ts) = t else { unreachable!() };
    if prec.greater(f, g) {
        return ts.iter().all(|tj| lpo_greater(s, tj, prec));
    }
    if f == g && ss.len() == ts.len() {
        if !ts.iter().all(|tj| lpo_greater(s, tj, prec)) {
            return false;
        }
        for (si, ti) in ss.iter().zip(ts) {
            if si != ti {
                return lpo_greater(si, ti, prec);
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFn {
    pub w0: u64,
    pub weights: BTreeMap<Name, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KboError {
    #[error("w0 must be positive")]
    ZeroW0,
    #[error("constant `{0}` has weight below w0")]
    LightConstant(Name),
    #[error("unary symbol `{0}` has weight 0 but is not maximal in the precedence")]
    ZeroUnaryNotMaximal(Name),
}

impl WeightFn {
    pub fn weight_of(&self, f: &Name) -> u64 {
        self.weights.get(f).copied().unwrap_or(self.w0)
    }

    pub fn term_weight(&self, t: &Term) -> u64 {
        match t {
            Term::Var(_) => self.w0,
            Term::App(f, args) => self.weight_of(f) + args.iter().map(|a| self.term_weight(a)).sum::<u64>(),
        }
    }

    pub fn check_admissible(&self, signature: &BTreeSet<Symbol>, prec: &Precedence) -> Result<(), KboError> {
        if self.w0 == 0 {
            return Err(KboError::ZeroW0);
        }
        for s in signature {
            let w = self.weight_of(&s.name);
            if s.arity == 0 && w < self.w0 {
                return Err(KboError::LightConstant(s.name.clone()));
            }
            if s.arity == 1 && w == 0 {
                let others_below = signature.iter().all(|g| g.name == s.name || prec.greater(&s.name, &g.name));
                if !others_below {
                    return Err(KboError::ZeroUnaryNotMaximal(s.name.clone()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w0={}", self.w0)?;
        for (g, w) in &self.weights {
            write!(f, " w({g})={w}")?;
        }
        Ok(())
    }
}

/// KBO comparison. The weight function is checked for admissibility against
/// the symbols of `s` and `t`.
pub fn kbo_greater(s: &Term, t: &Term, prec: &Precedence, w: &WeightFn) -> Result<bool, KboError> {
    let mut sig = BTreeSet::new();
    s.symbols(&mut sig);
    t.symbols(&mut sig);
    // Admissibility is a property of the whole signature; restricted to the
    // symbols at hand it is only checked for the symbols present.
    for sym in &sig {
        let wf = w.weight_of(&sym.name);
        if w.w0 == 0 {
            return Err(KboError::ZeroW0);
        }
        if sym.arity == 0 && wf < w.w0 {
            return Err(KboError::LightConstant(sym.name.clone()));
        }
        if sym.arity == 1 && wf == 0 && sig.iter().any(|g| g.name != sym.name && !prec.greater(&sym.name, &g.name)) {
            return Err(KboError::ZeroUnaryNotMaximal(sym.name.clone()));
        }
    }
    Ok(kbo_unchecked(s, t, prec, w))
}

fn kbo_unchecked(s: &Term, t: &Term, prec: &Precedence, w: &WeightFn) -> bool {
    if s == t {
        return false;
    }
    let sv = s.var_occurrences();
    if t.var_occurrences().iter().any(|(x, n)| sv.get(x).copied().unwrap_or(0) < *n) {
        return false;
    }
    let (ws, wt) = (w.term_weight(s), w.term_weight(t));
    if ws != wt {
        return ws > wt;
    }
    match (s, t) {
        (Term::Var(_), _) => false,
        (Term::App(_, _), Term::Var(x)) => {
            // s = f^k(x) with unary f of weight 0.
            let mut cur = s;
            while let Term::App(_, args) = cur {
                if args.len() != 1 {
                    return false;
                }
                cur = &args[0];
            }
            matches!(cur, Term::Var(y) if y == x)
        }
        (Term::App(f, ss), Term::App(g, ts)) => {
            if prec.greater(f, g) {
                return true;
            }
            if f == g && ss.len() == ts.len() {
                for (si, ti) in ss.iter().zip(ts) {
                    if si != ti {
                        return kbo_unchecked(si, ti, prec, w);
                    }
                }
            }
            false
        }
    }
}

/// `f_A(x₁,…,xₙ) = a₀ + a₁x₁ + … + aₙxₙ` per symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearInterp {
    pub coeffs: BTreeMap<Name, (u64, Vec<u64>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(Name),
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(Name),
    #[error("arithmetic overflow")]
    Overflow,
}

impl LinearInterp {
    pub fn set(&mut self, f: &str, constant: u64, args: Vec<u64>) {
        self.coeffs.insert(crate::term::name(f), (constant, args));
    }
}

impl fmt::Display for LinearInterp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, (a0, args)) in &self.coeffs {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            let mut parts: Vec<String> = args.iter().enumerate().map(|(i, a)| format!("{a}*x{}", i + 1)).collect();
            parts.push(format!("{a0}"));
            write!(f, "[{g}] = {}", parts.join(" + "))?;
        }
        Ok(())
    }
}

pub fn interp_value(t: &Term, interp: &LinearInterp, assignment: &BTreeMap<Name, u64>) -> Result<u64, InterpError> {
    match t {
        Term::Var(x) => assignment.get(x).copied().ok_or_else(|| InterpError::MissingAssignment(x.clone())),
        Term::App(f, args) => {
            let (a0, coeffs) = interp.coeffs.get(f).ok_or_else(|| InterpError::Uninterpreted(f.clone()))?;
            let mut v = *a0;
            for (a, arg) in coeffs.iter().zip(args) {
                let x = interp_value(arg, interp, assignment)?;
                v = a.checked_mul(x).and_then(|p| v.checked_add(p)).ok_or(InterpError::Overflow)?;
            }
            Ok(v)
        }
    }
}

/// Linear polynomial `constant + Σ coeff·x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinPoly {
    pub constant: u64,
    pub coeffs: BTreeMap<Name, u64>,
}

pub fn linear_poly(t: &Term, interp: &LinearInterp) -> Option<LinPoly> {
    match t {
        Term::Var(x) => Some(LinPoly { constant: 0, coeffs: [(x.clone(), 1)].into_iter().collect() }),
        Term::App(f, args) => {
            let (a0, cs) = interp.coeffs.get(f)?;
            if cs.len() != args.len() {
                return None;
            }
            let mut out = LinPoly { constant: *a0, coeffs: BTreeMap::new() };
            for (a, arg) in cs.iter().zip(args) {
                let p = linear_poly(arg, interp)?;
                out.constant = out.constant.checked_add(a.checked_mul(p.constant)?)?;
                for (x, c) in p.coeffs {
                    let e = out.coeffs.entry(x).or_insert(0);
                    *e = e.checked_add(a.checked_mul(c)?)?;
                }
            }
            Some(out)
        }
    }
}

/// `[l] > [r]` for all assignments, via the sufficient criterion: every
/// variable coefficient of `[l]` is at least that of `[r]` and the constant
/// part is strictly greater. Arguments are monotone since all `aᵢ ≥ 1`.
pub fn poly_dominates(l: &LinPoly, r: &LinPoly) -> bool {
    l.constant > r.constant && r.coeffs.iter().all(|(x, c)| l.coeffs.get(x).copied().unwrap_or(0) >= *c)
}

pub fn interp_orients(trs: &Trs, interp: &LinearInterp) -> bool {
    let monotone = interp.coeffs.values().all(|(_, cs)| cs.iter().all(|a| *a >= 1));
    monotone
        && trs.rules.iter().all(|r| match (linear_poly(&r.lhs, interp), linear_poly(&r.rhs, interp)) {
            (Some(l), Some(rp)) => poly_dominates(&l, &rp),
            _ => false,
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Lpo(Precedence),
    Kbo(Precedence, WeightFn),
    Interp(LinearInterp),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Lpo(p) => write!(f, "LPO precedence {p}"),
            Certificate::Kbo(p, w) => write!(f, "KBO precedence {p} weights {w}"),
            Certificate::Interp(i) => write!(f, "linear interpretation {i}"),
        }
    }
}

/// Re-verifies every rule strictly decreasing under the certificate.
pub fn check_certificate(trs: &Trs, cert: &Certificate) -> bool {
    match cert {
        Certificate::Lpo(p) => trs.rules.iter().all(|r| lpo_greater(&r.lhs, &r.rhs, p)),
        Certificate::Kbo(p, w) => {
            w.check_admissible(&trs.signature, p).is_ok()
                && trs.rules.iter().all(|r| kbo_unchecked(&r.lhs, &r.rhs, p, w))
        }
        Certificate::Interp(i) => trs.signature.iter().all(|s| i.coeffs.contains_key(&s.name)) && interp_orients(trs, i),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermBudget {
    pub lpo: bool,
    pub kbo: bool,
    pub interp: bool,
    pub coeff_bound: u64,
    pub weight_bound: u64,
}

impl Default for TermBudget {
    fn default() -> Self {
        TermBudget { lpo: true, kbo: true, interp: true, coeff_bound: 3, weight_bound: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermStatus {
    Terminating,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermResult {
    pub status: TermStatus,
    pub certificate: Option<Certificate>,
}

impl TermResult {
    fn unknown() -> TermResult {
        TermResult { status: TermStatus::Unknown, certificate: None }
    }

    fn proved(c: Certificate) -> TermResult {
        TermResult { status: TermStatus::Terminating, certificate: Some(c) }
    }

    pub fn is_terminating(&self) -> bool {
        self.status == TermStatus::Terminating
    }
}

/// Largest symbol count for which all total precedences are enumerated.
pub const EXHAUSTIVE_PRECEDENCE: usize = 6;
const RANDOM_RESTARTS: usize = 100;
/// Interpretation candidates examined before giving up.
const INTERP_CANDIDATES: usize = 200_000;
const KBO_WEIGHT_CANDIDATES: usize = 4096;

pub fn prove_termination(trs: &Trs, budget: &TermBudget, deadline: &dyn Deadline) -> TermResult {
    if trs.rules.is_empty() {
        return TermResult::proved(Certificate::Interp(LinearInterp::default()));
    }
    // A rule l -> r with l a subterm of r (or equal) can never be oriented.
    if trs.rules.iter().any(|r| r.rhs.positions().iter().any(|p| r.rhs.subterm(p) == Some(&r.lhs))) {
        return TermResult::unknown();
    }
    if budget.lpo {
        if let Some(p) = search_precedence(trs, deadline, |p| trs.rules.iter().all(|r| lpo_greater(&r.lhs, &r.rhs, p))) {
            return TermResult::proved(Certificate::Lpo(p));
        }
    }
    if deadline.expired() {
        return TermResult::unknown();
    }
    if budget.kbo {
        if let Some(c) = search_kbo(trs, budget.weight_bound, deadline) {
            return TermResult::proved(c);
        }
    }
    if deadline.expired() {
        return TermResult::unknown();
    }
    if budget.interp {
        if let Some(i) = search_interp(trs, budget.coeff_bound, deadline) {
            return TermResult::proved(Certificate::Interp(i));
        }
    }
    TermResult::unknown()
}

fn function_symbols(trs: &Trs) -> Vec<Name> {
    trs.signature.iter().map(|s| s.name.clone()).collect()
}

/// Exhaustive over total orders for few symbols, otherwise greedy
/// topological orders of "lhs root above rhs symbols" with random tie
/// breaking.
fn search_precedence(trs: &Trs, deadline: &dyn Deadline, ok: impl Fn(&Precedence) -> bool) -> Option<Precedence> {
    let syms = function_symbols(trs);
    if syms.len() <= EXHAUSTIVE_PRECEDENCE {
        let mut order = syms;
        loop {
            if deadline.expired() {
                return None;
            }
            let p = Precedence::from_order(&order);
            if ok(&p) {
                return Some(p);
            }
            if !next_permutation(&mut order) {
                return None;
            }
        }
    }
    let mut edges: BTreeSet<(Name, Name)> = BTreeSet::new();
    for r in &trs.rules {
        if let Term::App(f, _) = &r.lhs {
            let mut rs = BTreeSet::new();
            r.rhs.symbols(&mut rs);
            for g in rs {
                if &g.name != f {
                    edges.insert((f.clone(), g.name));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..=RANDOM_RESTARTS {
        if deadline.expired() {
            return None;
        }
        let order = greedy_order(&syms, &edges, &mut rng);
        let p = Precedence::from_order(&order);
        if ok(&p) {
            return Some(p);
        }
    }
    None
}

/// Smallest-first order: repeatedly pick (randomly) a symbol that has no
/// remaining required successor; on a cycle pick any remaining symbol.
fn greedy_order(syms: &[Name], edges: &BTreeSet<(Name, Name)>, rng: &mut ChaCha8Rng) -> Vec<Name> {
    let mut left: Vec<Name> = syms.to_vec();
    left.shuffle(rng);
    let mut order = Vec::new();
    while !left.is_empty() {
        let free: Vec<usize> = (0..left.len())
            .filter(|&i| !edges.iter().any(|(f, g)| f == &left[i] && g != f && left.contains(g)))
            .collect();
        let pick = if free.is_empty() { rng.random_range(0..left.len()) } else { free[rng.random_range(0..free.len())] };
        order.push(left.remove(pick));
    }
    order
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn search_kbo(trs: &Trs, wb: u64, deadline: &dyn Deadline) -> Option<Certificate> {
    let sig: Vec<Symbol> = trs.signature.iter().cloned().collect();
    // Variable condition does not depend on weights or precedence.
    for r in &trs.rules {
        let lv = r.lhs.var_occurrences();
        if r.rhs.var_occurrences().iter().any(|(x, n)| lv.get(x).copied().unwrap_or(0) < *n) {
            return None;
        }
    }
    let ranges: Vec<(u64, u64)> = sig.iter().map(|s| (if s.arity == 0 { 1 } else { 0 }, wb.max(1))).collect();
    let mut current: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    let mut tried = 0;
    loop {
        if tried >= KBO_WEIGHT_CANDIDATES || deadline.expired() {
            return None;
        }
        tried += 1;
        let w = WeightFn { w0: 1, weights: sig.iter().map(|s| s.name.clone()).zip(current.iter().copied()).collect() };
        let weights_ok = trs.rules.iter().all(|r| w.term_weight(&r.lhs) >= w.term_weight(&r.rhs));
        if weights_ok {
            let all_strict = trs.rules.iter().all(|r| w.term_weight(&r.lhs) > w.term_weight(&r.rhs));
            let found = if all_strict {
                // Any precedence putting weight-0 unary symbols on top works.
                let mut order = function_symbols(trs);
                order.sort_by_key(|f| w.weight_of(f) == 0);
                let p = Precedence::from_order(&order);
                w.check_admissible(&trs.signature, &p).is_ok().then_some(p)
            } else {
                search_precedence(trs, deadline, |p| {
                    w.check_admissible(&trs.signature, p).is_ok()
                        && trs.rules.iter().all(|r| kbo_unchecked(&r.lhs, &r.rhs, p, &w))
                })
            };
            if let Some(p) = found {
                return Some(Certificate::Kbo(p, w));
            }
        }
        if !odometer(&mut current, &ranges) {
            return None;
        }
    }
}

fn odometer(v: &mut [u64], ranges: &[(u64, u64)]) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < ranges[i].1 {
            v[i] += 1;
            return true;
        }
        v[i] = ranges[i].0;
    }
    false
}

fn search_interp(trs: &Trs, cb: u64, deadline: &dyn Deadline) -> Option<LinearInterp> {
    let cb = cb.max(1);
    let sig: Vec<Symbol> = trs.signature.iter().cloned().collect();
    // Coefficient slots: per symbol a₀ ∈ [0,cb], aᵢ ∈ [1,cb].
    let mut ranges = Vec::new();
    for s in &sig {
        ranges.push((0, cb));
        for _ in 0..s.arity {
            ranges.push((1, cb));
        }
    }
    let build = |v: &[u64]| {
        let mut interp = LinearInterp::default();
        let mut k = 0;
        for s in &sig {
            let a0 = v[k];
            let args = v[k + 1..k + 1 + s.arity].to_vec();
            k += 1 + s.arity;
            interp.coeffs.insert(s.name.clone(), (a0, args));
        }
        interp
    };
    let space = ranges.iter().try_fold(1u64, |acc, (lo, hi)| acc.checked_mul(hi - lo + 1));
    if space.is_some_and(|n| n as usize <= INTERP_CANDIDATES) {
        let mut v: Vec<u64> = ranges.iter().map(|r| r.0).collect();
        let mut polls = 0u32;
        loop {
            polls += 1;
            if polls % 256 == 0 && deadline.expired() {
                return None;
            }
            let i = build(&v);
            if interp_orients(trs, &i) {
                return Some(i);
            }
            if !odometer(&mut v, &ranges) {
                return None;
            }
        }
    }
    // Large spaces: small-coefficient candidates first, then random samples.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7e);
    for n in 0..INTERP_CANDIDATES {
        if n % 256 == 0 && deadline.expired() {
            return None;
        }
        let cap = if n < INTERP_CANDIDATES / 2 { 2.min(cb) } else { cb };
        let v: Vec<u64> = ranges.iter().map(|(lo, hi)| rng.random_range(*lo..=(*hi).min(cap.max(*lo)))).collect();
        let i = build(&v);
        if interp_orients(trs, &i) {
            return Some(i);
        }
    }
    None
}

/// Every rule as `lhs ≻ rhs` under the certificate, for reporting.
pub fn describe(trs: &Trs, cert: &Certificate) -> Vec<String> {
    let mut out = vec![format!("{cert}")];
    for r in &trs.rules {
        out.push(format!("{} > {}", r.lhs, r.rhs));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Unlimited;
    use crate::term::build::{term, trs};
    use crate::term::{name, Substitution};
    use proptest::prelude::*;

    fn assoc() -> Trs {
        trs(&["f(f(x,y),z) -> f(x,f(y,z))"], &["x", "y", "z"])
    }

    fn looping() -> Trs {
        trs(&["f(x) -> g(f(x))", "g(y) -> f(g(y))"], &["x", "y"])
    }

    fn assoc_interp() -> LinearInterp {
        let mut i = LinearInterp::default();
        i.set("f", 1, vec![2, 1]);
        i
    }

    #[test]
    fn interp_value_examples() {
        let i = assoc_interp();
        let zero: BTreeMap<Name, u64> = ["x", "y", "z"].iter().map(|v| (name(v), 0)).collect();
        let one: BTreeMap<Name, u64> = ["x", "y", "z"].iter().map(|v| (name(v), 1)).collect();
        let lhs = term("f(f(x,y),z)", &["x", "y", "z"]);
        let rhs = term("f(x,f(y,z))", &["x", "y", "z"]);
        assert_eq!(interp_value(&lhs, &i, &zero), Ok(3));
        assert_eq!(interp_value(&rhs, &i, &one), Ok(7));
        assert_eq!(interp_value(&lhs, &i, &one), Ok(10));
        let mut c = LinearInterp::default();
        c.set("a", 0, vec![]);
        assert_eq!(interp_value(&term("a", &[]), &c, &BTreeMap::new()), Ok(0));
        assert!(matches!(interp_value(&lhs, &i, &BTreeMap::new()), Err(InterpError::MissingAssignment(_))));
    }

    #[test]
    fn interp_orients_examples() {
        assert!(interp_orients(&assoc(), &assoc_interp()));
        let mut c = LinearInterp::default();
        c.set("a", 2, vec![]);
        assert!(!interp_orients(&trs(&["a -> a"], &[]), &c));
        assert_eq!(search_interp(&looping(), 3, &Unlimited), None);
    }

    #[test]
    fn lpo_examples() {
        let p = Precedence::from_order(&[name("f")]);
        assert!(lpo_greater(&term("f(f(x,y),z)", &["x", "y", "z"]), &term("f(x,f(y,z))", &["x", "y", "z"]), &p));
        assert!(!lpo_greater(&Term::var("x"), &Term::var("x"), &p));
        let gf = Precedence::from_order(&[name("f"), name("g")]);
        assert!(!lpo_greater(&term("f(x)", &["x"]), &term("g(f(x))", &["x"]), &gf));
    }

    #[test]
    fn kbo_examples() {
        let p = Precedence::from_order(&[name("f")]);
        let w = WeightFn { w0: 1, weights: [(name("f"), 1)].into_iter().collect() };
        let l = term("f(f(x,y),z)", &["x", "y", "z"]);
        let r = term("f(x,f(y,z))", &["x", "y", "z"]);
        assert_eq!(kbo_greater(&l, &r, &p, &w), Ok(true));
        let ab = WeightFn { w0: 1, weights: [(name("a"), 2), (name("b"), 1)].into_iter().collect() };
        assert_eq!(kbo_greater(&term("a", &[]), &term("b", &[]), &Precedence::default(), &ab), Ok(true));
        assert_eq!(kbo_greater(&Term::var("x"), &Term::var("y"), &p, &w), Ok(false));
        let light = WeightFn { w0: 2, weights: [(name("a"), 1)].into_iter().collect() };
        assert!(matches!(
            kbo_greater(&term("a", &[]), &term("a", &[]), &p, &light),
            Err(KboError::LightConstant(_))
        ));
        let zero_unary = WeightFn { w0: 1, weights: [(name("h"), 0), (name("a"), 1)].into_iter().collect() };
        let low_h = Precedence::from_order(&[name("h"), name("a")]);
        assert!(matches!(
            kbo_greater(&term("h(a)", &[]), &term("a", &[]), &low_h, &zero_unary),
            Err(KboError::ZeroUnaryNotMaximal(_))
        ));
        let high_h = Precedence::from_order(&[name("a"), name("h")]);
        assert_eq!(kbo_greater(&term("h(x)", &["x"]), &Term::var("x"), &high_h, &zero_unary), Ok(true));
    }

    #[test]
    fn prove_termination_examples() {
        let b = TermBudget::default();
        let res = prove_termination(&assoc(), &b, &Unlimited);
        assert!(res.is_terminating());
        assert!(check_certificate(&assoc(), res.certificate.as_ref().unwrap()));
        for only in [0, 1, 2] {
            let b = TermBudget { lpo: only == 0, kbo: only == 1, interp: only == 2, ..TermBudget::default() };
            let res = prove_termination(&assoc(), &b, &Unlimited);
            assert!(res.is_terminating(), "order {only}");
            assert!(check_certificate(&assoc(), res.certificate.as_ref().unwrap()));
        }
        assert_eq!(prove_termination(&looping(), &b, &Unlimited).status, TermStatus::Unknown);
        assert!(prove_termination(&Trs::empty("e"), &b, &Unlimited).is_terminating());
    }

    #[test]
    fn many_symbols_use_greedy_search() {
        let r = trs(
            &["h1(x) -> h2(x)", "h2(x) -> h3(x)", "h3(x) -> h4(x)", "h4(x) -> h5(x)", "h5(x) -> h6(x)", "h6(x) -> h7(h8(x))"],
            &["x"],
        );
        let b = TermBudget { kbo: false, interp: false, ..TermBudget::default() };
        let res = prove_termination(&r, &b, &Unlimited);
        assert!(res.is_terminating());
        assert!(check_certificate(&r, res.certificate.as_ref().unwrap()));
    }

    #[test]
    fn permutations_are_exhaustive() {
        let mut v = vec![1, 2, 3, 4];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 24);
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            proptest::sample::select(&["x", "y"][..]).prop_map(Term::var),
            proptest::sample::select(&["a", "b"][..]).prop_map(Term::constant),
        ];
        leaf.prop_recursive(3, 10, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("g", vec![t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::app("f", vec![a, b])),
            ]
        })
    }

    fn ground_subst() -> impl Strategy<Value = Substitution> {
        let leaf = proptest::sample::select(&["a", "b"][..]).prop_map(Term::constant);
        let g = leaf.prop_recursive(2, 4, 2, |inner| inner.prop_map(|t| Term::app("g", vec![t])));
        (g.clone(), g).prop_map(|(s, t)| {
            let mut sigma = Substitution::new();
            sigma.insert(name("x"), s);
            sigma.insert(name("y"), t);
            sigma
        })
    }

    fn prec() -> Precedence {
        Precedence::from_order(&[name("a"), name("b"), name("g"), name("f")])
    }

    fn weights() -> WeightFn {
        WeightFn { w0: 1, weights: [(name("a"), 1), (name("b"), 2), (name("g"), 1), (name("f"), 0)].into_iter().collect() }
    }

    fn interp() -> LinearInterp {
        let mut i = LinearInterp::default();
        i.set("a", 1, vec![]);
        i.set("b", 0, vec![]);
        i.set("g", 1, vec![2]);
        i.set("f", 0, vec![1, 3]);
        i
    }

    fn interp_greater(s: &Term, t: &Term) -> bool {
        match (linear_poly(s, &interp()), linear_poly(t, &interp())) {
            (Some(l), Some(r)) => poly_dominates(&l, &r),
            _ => false,
        }
    }

    fn orders() -> [fn(&Term, &Term) -> bool; 3] {
        [
            |s, t| lpo_greater(s, t, &prec()),
            |s, t| kbo_unchecked(s, t, &prec(), &weights()),
            interp_greater,
        ]
    }

    proptest! {
        #[test]
        fn orders_are_irreflexive_and_transitive(s in arb_term(), t in arb_term(), u in arb_term()) {
            for gt in orders() {
                prop_assert!(!gt(&s, &s));
                if gt(&s, &t) && gt(&t, &u) {
                    prop_assert!(gt(&s, &u));
                }
                if gt(&s, &t) {
                    prop_assert!(!gt(&t, &s));
                }
            }
        }

        #[test]
        fn orders_closed_under_substitution_and_context(s in arb_term(), t in arb_term(), sigma in ground_subst(), c in arb_term()) {
            for gt in orders() {
                if gt(&s, &t) {
                    prop_assert!(gt(&sigma.apply(&s), &sigma.apply(&t)));
                    prop_assert!(gt(&Term::app("g", vec![s.clone()]), &Term::app("g", vec![t.clone()])));
                    prop_assert!(gt(&Term::app("f", vec![c.clone(), s.clone()]), &Term::app("f", vec![c.clone(), t.clone()])));
                }
            }
        }

        #[test]
        fn interp_dominance_agrees_with_evaluation(s in arb_term(), t in arb_term(), xv in 0u64..4, yv in 0u64..4) {
            if interp_greater(&s, &t) {
                let asg: BTreeMap<Name, u64> = [(name("x"), xv), (name("y"), yv)].into_iter().collect();
                prop_assert!(interp_value(&s, &interp(), &asg).unwrap() > interp_value(&t, &interp(), &asg).unwrap());
            }
        }
    }
}
