//! First-order terms, positions, substitutions, rules and rewrite systems.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// Interned identifier for variables and function symbols.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Function symbol with a fixed arity. Constants have arity zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: Name,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol { name: Arc::from(name), arity }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(Arc::from(x))
    }

    pub fn constant(c: &str) -> Term {
        Term::App(Arc::from(c), Vec::new())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(f), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root_symbol(&self) -> Option<Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => Some(Symbol { name: f.clone(), arity: args.len() }),
        }
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variables in order of first occurrence (pre-order), without repetition.
    pub fn vars_ordered(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.walk_vars(&mut |x| {
            if !out.contains(x) {
                out.push(x.clone());
            }
        });
        out
    }

    pub fn walk_vars(&self, visit: &mut impl FnMut(&Name)) {
        match self {
            Term::Var(x) => visit(x),
            Term::App(_, args) => args.iter().for_each(|a| a.walk_vars(visit)),
        }
    }

    pub fn occurs(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::App(_, args) => args.iter().any(|a| a.occurs(x)),
        }
    }

    pub fn var_occurrences(&self) -> BTreeMap<Name, usize> {
        let mut counts = BTreeMap::new();
        self.walk_vars(&mut |x| *counts.entry(x.clone()).or_insert(0) += 1);
        counts
    }

    pub fn is_linear(&self) -> bool {
        self.var_occurrences().values().all(|&n| n == 1)
    }

    pub fn symbols(&self, out: &mut BTreeSet<Symbol>) {
        if let Term::App(f, args) = self {
            out.insert(Symbol { name: f.clone(), arity: args.len() });
            args.iter().for_each(|a| a.symbols(out));
        }
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in &pos.0 {
            match cur {
                Term::App(_, args) if i >= 1 && i <= args.len() => cur = &args[i - 1],
                _ => return None,
            }
        }
        Some(cur)
    }

    /// `self[replacement]_pos`; `None` when the position is invalid.
    pub fn replace_at(&self, pos: &[usize], replacement: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(replacement),
            Some((&i, rest)) => match self {
                Term::App(f, args) if i >= 1 && i <= args.len() => {
                    let mut args = args.clone();
                    args[i - 1] = args[i - 1].replace_at(rest, replacement)?;
                    Some(Term::App(f.clone(), args))
                }
                _ => None,
            },
        }
    }

    /// All positions in pre-order (root first, children left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out, &|_| true);
        out
    }

    /// Positions of function symbols, pre-order.
    pub fn fun_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out, &|t| !t.is_var());
        out
    }

    /// Positions of variables, pre-order.
    pub fn var_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out, &Term::is_var);
        out
    }

    fn collect_positions(&self, path: &mut Vec<usize>, out: &mut Vec<Position>, keep: &dyn Fn(&Term) -> bool) {
        if keep(self) {
            out.push(Position(path.clone()));
        }
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                path.push(i + 1);
                a.collect_positions(path, out, keep);
                path.pop();
            }
        }
    }

    /// Renames every variable `x` to `x#suffix`.
    pub fn rename_vars(&self, suffix: &str) -> Term {
        self.map_vars(&mut |x| Term::Var(Arc::from(alloc::format!("{x}#{suffix}").as_str())))
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Name) -> Term) -> Term {
        match self {
            Term::Var(x) => f(x),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Exact set of variable names occurring in `t`.
pub fn vars_of(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    t.walk_vars(&mut |x| {
        out.insert(x.clone());
    });
    out
}

/// Path of 1-based argument indices; the empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Finite map from variable names to terms, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Name, t: Term) {
        self.0.insert(x, t);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, t: &Term) -> Term {
        apply_subst(t, self)
    }

    /// `t(self)` is already fully applied when `(t self) self = t self`.
    pub fn is_idempotent(&self) -> bool {
        self.0.values().all(|t| t.vars_ordered().iter().all(|x| !self.0.contains_key(x)))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

pub fn apply_subst(t: &Term, sigma: &Substitution) -> Term {
    if sigma.is_empty() {
        return t.clone();
    }
    t.map_vars(&mut |x| sigma.0.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone())))
}

/// Prefix of the reserved namespace used for frozen variables. Identifiers in
/// problem files never contain it.
pub const FROZEN_OPEN: char = '⟨';

/// Replaces each variable `x` by the reserved constant `⟨x⟩`.
pub fn ground_freeze(t: &Term) -> Term {
    t.map_vars(&mut |x| Term::App(Arc::from(alloc::format!("⟨{x}⟩").as_str()), Vec::new()))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("left-hand side `{0}` is a variable")]
    VariableLhs(Term),
    #[error("variable `{var}` of the right-hand side does not occur in the left-hand side of `{rule}`")]
    FreshRhsVariable { var: Name, rule: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, RuleError> {
        if lhs.is_var() {
            return Err(RuleError::VariableLhs(lhs));
        }
        let lv = vars_of(&lhs);
        if let Some(x) = vars_of(&rhs).into_iter().find(|x| !lv.contains(x)) {
            return Err(RuleError::FreshRhsVariable { var: x, rule: alloc::format!("{lhs} -> {rhs}") });
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn rename(&self, suffix: &str) -> Rule {
        Rule { lhs: self.lhs.rename_vars(suffix), rhs: self.rhs.rename_vars(suffix) }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }

    /// `self` and `other` are equal up to a bijective variable renaming.
    pub fn is_variant_of(&self, other: &Rule) -> bool {
        let a = Term::App(Arc::from("→"), alloc::vec![self.lhs.clone(), self.rhs.clone()]);
        let b = Term::App(Arc::from("→"), alloc::vec![other.lhs.clone(), other.rhs.clone()]);
        match crate::unify::match_term(&a, &b) {
            None => false,
            Some(s) => {
                let mut seen = BTreeSet::new();
                s.0.values().all(|t| match t {
                    Term::Var(y) => seen.insert(y.clone()),
                    _ => false,
                })
            }
        }
    }

    /// Renames variables to `v1, v2, …` in order of first occurrence, skipping
    /// names in `avoid`.
    pub fn normalize_vars(&self, avoid: &BTreeSet<Name>) -> Rule {
        let mut map: BTreeMap<Name, Term> = BTreeMap::new();
        let mut next = 1usize;
        for x in self.lhs.vars_ordered() {
            let fresh = loop {
                let cand: Name = Arc::from(alloc::format!("v{next}").as_str());
                next += 1;
                if !avoid.contains(&cand) {
                    break cand;
                }
            };
            map.insert(x, Term::Var(fresh));
        }
        let sigma = Substitution(map);
        Rule { lhs: sigma.apply(&self.lhs), rhs: sigma.apply(&self.rhs) }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TrsError {
    #[error("symbol `{name}` used with arities {first} and {second}")]
    ArityConflict { name: Name, first: usize, second: usize },
    #[error("`{0}` is declared as a variable but used as a function symbol")]
    VariableAsFunction(Name),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// A named rewrite system. The signature is derived from the rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trs {
    pub name: String,
    pub signature: BTreeSet<Symbol>,
    pub variables: BTreeSet<Name>,
    pub rules: Vec<Rule>,
}

impl Trs {
    pub fn new(name: &str, variables: BTreeSet<Name>, rules: Vec<Rule>) -> Result<Trs, TrsError> {
        let mut signature = BTreeSet::new();
        for r in &rules {
            if r.lhs.is_var() {
                return Err(RuleError::VariableLhs(r.lhs.clone()).into());
            }
            r.lhs.symbols(&mut signature);
            r.rhs.symbols(&mut signature);
        }
        let mut arities: BTreeMap<Name, usize> = BTreeMap::new();
        for s in &signature {
            if let Some(&first) = arities.get(&s.name) {
                return Err(TrsError::ArityConflict { name: s.name.clone(), first, second: s.arity });
            }
            if variables.contains(&s.name) {
                return Err(TrsError::VariableAsFunction(s.name.clone()));
            }
            arities.insert(s.name.clone(), s.arity);
        }
        Ok(Trs { name: String::from(name), signature, variables, rules })
    }

    /// Builds a TRS from rules, declaring exactly the variables they use.
    pub fn from_rules(name: &str, rules: Vec<Rule>) -> Result<Trs, TrsError> {
        let mut vars = BTreeSet::new();
        for r in &rules {
            vars.extend(vars_of(&r.lhs));
        }
        Trs::new(name, vars, rules)
    }

    pub fn empty(name: &str) -> Trs {
        Trs { name: String::from(name), signature: BTreeSet::new(), variables: BTreeSet::new(), rules: Vec::new() }
    }

    /// Same name and declared variables, different rule list.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Trs {
        let mut vars = self.variables.clone();
        for r in &rules {
            vars.extend(vars_of(&r.lhs));
        }
        let mut signature = BTreeSet::new();
        for r in &rules {
            r.lhs.symbols(&mut signature);
            r.rhs.symbols(&mut signature);
        }
        Trs { name: self.name.clone(), signature, variables: vars, rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn symbol_names(&self) -> BTreeSet<Name> {
        self.signature.iter().map(|s| s.name.clone()).collect()
    }

    /// Order-sensitive structural fingerprint, used to detect "no modification".
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        for r in &self.rules {
            h.write_term(&r.lhs);
            h.write(b"->");
            h.write_term(&r.rhs);
            h.write(b";");
        }
        h.finish()
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// 64-bit FNV-1a, enough for structural change detection.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn write_term(&mut self, t: &Term) {
        match t {
            Term::Var(x) => {
                self.write(b"?");
                self.write(x.as_bytes());
            }
            Term::App(g, args) => {
                self.write(g.as_bytes());
                self.write(b"(");
                for a in args {
                    self.write_term(a);
                    self.write(b",");
                }
                self.write(b")");
            }
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Shorthand constructors used by tests and fixtures: `t("f(x,g(y))")` with
/// variables given explicitly.
pub mod build {
    use super::*;

    /// Parses a term in `f(t1,…,tn)` notation; identifiers listed in `vars` are
    /// variables. Panics on malformed input, intended for literals only.
    pub fn term(src: &str, vars: &[&str]) -> Term {
        let bytes: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse(&bytes, &mut pos, vars);
        assert_eq!(pos, bytes.len(), "trailing input in term literal `{src}`");
        t
    }

    fn parse(s: &[char], pos: &mut usize, vars: &[&str]) -> Term {
        let start = *pos;
        while *pos < s.len() && (s[*pos].is_alphanumeric() || s[*pos] == '_' || s[*pos] == '\'') {
            *pos += 1;
        }
        let id: String = s[start..*pos].iter().collect();
        assert!(!id.is_empty(), "identifier expected at {start}");
        if *pos < s.len() && s[*pos] == '(' {
            *pos += 1;
            let mut args = Vec::new();
            loop {
                args.push(parse(s, pos, vars));
                match s.get(*pos) {
                    Some(',') => *pos += 1,
                    Some(')') => {
                        *pos += 1;
                        break;
                    }
                    other => panic!("unexpected {other:?} in term literal"),
                }
            }
            Term::app(&id, args)
        } else if vars.contains(&id.as_str()) {
            Term::var(&id)
        } else {
            Term::constant(&id)
        }
    }

    /// Builds a TRS from `lhs -> rhs` strings.
    pub fn trs(rules: &[&str], vars: &[&str]) -> Trs {
        let rules = rules
            .iter()
            .map(|r| {
                let (l, rhs) = r.split_once("->").expect("rule literal needs ->");
                Rule::new(term(l, vars), term(rhs, vars)).expect("well-formed rule literal")
            })
            .collect();
        Trs::new("fixture", vars.iter().map(|v| name(v)).collect(), rules).expect("well-formed TRS literal")
    }
}
