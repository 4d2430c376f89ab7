//! Duplicate detection modulo renaming, fastest-solver labels and dataset
//! balancing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::answer::Answer;
use crate::term::{Name, Rule, Term, Trs};

/// Equal keys ⟺ equal systems up to variable renaming, an arity-preserving
/// bijection on function symbols, and rule order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub String);

/// Individualisation nodes explored before falling back to a literal key.
pub const SEARCH_CAP: usize = 10_000;

/// Rule with variables numbered by first occurrence (lhs then rhs).
#[derive(Clone, Debug)]
enum Node {
    Var(usize),
    App(usize, Vec<Node>),
}

struct Shape {
    rules: Vec<(Node, Node)>,
    arity: Vec<usize>,
}

fn shape(trs: &Trs) -> (Shape, Vec<Name>) {
    let names: Vec<Name> = trs.signature.iter().map(|s| s.name.clone()).collect();
    let arity: Vec<usize> = trs.signature.iter().map(|s| s.arity).collect();
    let index: BTreeMap<&Name, usize> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let rules = trs
        .rules
        .iter()
        .map(|r| {
            let mut vars: Vec<Name> = Vec::new();
            let l = to_node(&r.lhs, &index, &mut vars);
            let rr = to_node(&r.rhs, &index, &mut vars);
            (l, rr)
        })
        .collect();
    (Shape { rules, arity }, names)
}

fn to_node(t: &Term, index: &BTreeMap<&Name, usize>, vars: &mut Vec<Name>) -> Node {
    match t {
        Term::Var(x) => match vars.iter().position(|v| v == x) {
            Some(i) => Node::Var(i),
            None => {
                vars.push(x.clone());
                Node::Var(vars.len() - 1)
            }
        },
        Term::App(f, args) => Node::App(index[f], args.iter().map(|a| to_node(a, index, vars)).collect()),
    }
}

/// Occurrence context of a symbol: side, depth, parent colour and argument
/// index, colours (or variable numbers) of the children.
type Occurrence = (u8, usize, Option<(usize, usize)>, Vec<(bool, usize)>);

fn occurrences(node: &Node, side: u8, depth: usize, parent: Option<(usize, usize)>, col: &[usize], out: &mut [Vec<Occurrence>]) {
    if let Node::App(f, args) = node {
        let kids = args
            .iter()
            .map(|a| match a {
                Node::Var(v) => (false, *v),
                Node::App(g, _) => (true, col[*g]),
            })
            .collect();
        out[*f].push((side, depth, parent, kids));
        for (i, a) in args.iter().enumerate() {
            occurrences(a, side, depth + 1, Some((col[*f], i)), col, out);
        }
    }
}

/// Colour refinement to a fixed point; colours are ranks of invariant
/// signatures, so the result does not depend on symbol names.
fn refine(shape: &Shape, mut col: Vec<usize>) -> Vec<usize> {
    loop {
        let classes_before = count_classes(&col);
        let mut occ: Vec<Vec<Occurrence>> = vec![Vec::new(); col.len()];
        for (l, r) in &shape.rules {
            occurrences(l, 0, 0, None, &col, &mut occ);
            occurrences(r, 1, 0, None, &col, &mut occ);
        }
        let sigs: Vec<(usize, Vec<Occurrence>)> = occ
            .into_iter()
            .enumerate()
            .map(|(i, mut o)| {
                o.sort();
                (col[i], o)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<Occurrence>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        col = sigs.iter().map(|s| distinct.binary_search(&s).expect("present")).collect();
        if count_classes(&col) == classes_before {
            return col;
        }
    }
}

fn count_classes(col: &[usize]) -> usize {
    let mut v = col.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn render(node: &Node, col: &[usize], out: &mut String) {
    match node {
        Node::Var(v) => out.push_str(&format!("v{v}")),
        Node::App(f, args) => {
            out.push_str(&format!("s{}", col[*f]));
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    render(a, col, out);
                }
                out.push(')');
            }
        }
    }
}

fn leaf_key(shape: &Shape, col: &[usize]) -> String {
    let mut rules: Vec<String> = shape
        .rules
        .iter()
        .map(|(l, r)| {
            let mut s = String::new();
            render(l, col, &mut s);
            s.push_str("->");
            render(r, col, &mut s);
            s
        })
        .collect();
    rules.sort();
    rules.join(";")
}

fn search(shape: &Shape, col: Vec<usize>, nodes: &mut usize, best: &mut Option<String>) -> bool {
    *nodes += 1;
    if *nodes > SEARCH_CAP {
        return false;
    }
    let col = refine(shape, col);
    // First colour class with more than one member.
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, c) in col.iter().enumerate() {
        members.entry(*c).or_default().push(i);
    }
    let Some((&c, cell)) = members.iter().find(|(_, m)| m.len() > 1) else {
        let key = leaf_key(shape, &col);
        if best.as_ref().is_none_or(|b| key < *b) {
            *best = Some(key);
        }
        return true;
    };
    for &m in cell {
        let split: Vec<usize> = col.iter().enumerate().map(|(i, &k)| 2 * k + usize::from(k == c && i != m)).collect();
        if !search(shape, split, nodes, best) {
            return false;
        }
    }
    true
}

pub fn canonical_form(trs: &Trs) -> CanonicalKey {
    let (shape, _) = shape(trs);
    // Initial colours: arity only.
    let col = shape.arity.clone();
    let mut best = None;
    let mut nodes = 0;
    if search(&shape, col, &mut nodes, &mut best) {
        if let Some(k) = best {
            return CanonicalKey(format!("{}|{}", arity_profile(&shape), k));
        }
    }
    CanonicalKey(format!("literal|{}|{}", trs.name, trs))
}

fn arity_profile(shape: &Shape) -> String {
    let mut a = shape.arity.clone();
    a.sort_unstable();
    let parts: Vec<String> = a.iter().map(|x| format!("{x}")).collect();
    parts.join(",")
}

/// Orders ids so that embedded numbers compare numerically (`p2 < p10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return Ordering::Equal,
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(p), Some(q)) if p.is_ascii_digit() && q.is_ascii_digit() => {
                let dx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let dy = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let nx = trim_zeros(&x[..dx]);
                let ny = trim_zeros(&y[..dy]);
                let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[dx..];
                y = &y[dy..];
            }
            (Some(p), Some(q)) => {
                if p != q {
                    return p.cmp(q);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|c| **c == b'0').count();
    &d[k.min(d.len().saturating_sub(1))..]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedupItem {
    pub id: String,
    pub human: bool,
    pub key: CanonicalKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedupClass {
    pub key: CanonicalKey,
    pub members: Vec<String>,
    pub survivor: String,
}

/// Classes in order of first appearance; the survivor is a human-made
/// member if any, then the lowest id.
pub fn dedup(items: &[DedupItem]) -> Vec<DedupClass> {
    let mut order: Vec<CanonicalKey> = Vec::new();
    let mut groups: BTreeMap<&CanonicalKey, Vec<&DedupItem>> = BTreeMap::new();
    for it in items {
        let g = groups.entry(&it.key).or_default();
        if g.is_empty() {
            order.push(it.key.clone());
        }
        g.push(it);
    }
    order
        .into_iter()
        .map(|k| {
            let g = &groups[&k];
            let survivor =
                g.iter().min_by(|a, b| b.human.cmp(&a.human).then_with(|| natural_cmp(&a.id, &b.id))).expect("non-empty");
            DedupClass { key: k.clone(), members: g.iter().map(|i| i.id.clone()).collect(), survivor: survivor.id.clone() }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyRun {
    pub strategy: String,
    pub answer: Answer,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelRecord {
    pub problem: String,
    pub runs: Vec<StrategyRun>,
    pub label: Option<String>,
}

/// Fastest YES/NO within the limit; ties go to the earlier strategy in
/// `strategies`.
pub fn label_of(runs: &[StrategyRun], strategies: &[String], limit_ms: u64) -> Option<String> {
    let rank = |s: &str| strategies.iter().position(|x| x == s).unwrap_or(usize::MAX);
    runs.iter()
        .filter(|r| r.answer.is_solved() && r.millis <= limit_ms)
        .min_by(|a, b| a.millis.cmp(&b.millis).then_with(|| rank(&a.strategy).cmp(&rank(&b.strategy))))
        .map(|r| r.strategy.clone())
}

/// Groups runs by problem (first-appearance order) and labels each.
pub fn label_records(runs: &[(String, StrategyRun)], strategies: &[String], limit_ms: u64) -> Vec<LabelRecord> {
    let mut order: Vec<String> = Vec::new();
    let mut by: BTreeMap<String, Vec<StrategyRun>> = BTreeMap::new();
    for (p, r) in runs {
        let e = by.entry(p.clone()).or_default();
        if e.is_empty() {
            order.push(p.clone());
        }
        // Later entries for the same pair replace earlier ones.
        e.retain(|x| x.strategy != r.strategy);
        e.push(r.clone());
    }
    order
        .into_iter()
        .map(|p| {
            let runs = by.remove(&p).unwrap_or_default();
            let label = label_of(&runs, strategies, limit_ms);
            LabelRecord { problem: p, runs, label }
        })
        .collect()
}

/// At most `cap` problems per label plus `min(unsolved_quota, available)`
/// unsolved ones, in a seeded shuffled order.
pub fn balance(records: &[LabelRecord], cap: usize, unsolved_quota: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_label: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut unsolved: Vec<&str> = Vec::new();
    for r in records {
        match &r.label {
            Some(l) => by_label.entry(l).or_default().push(&r.problem),
            None => unsolved.push(&r.problem),
        }
    }
    let mut out: Vec<String> = Vec::new();
    for (_, mut ids) in by_label {
        ids.shuffle(&mut rng);
        out.extend(ids.into_iter().take(cap).map(String::from));
    }
    unsolved.shuffle(&mut rng);
    out.extend(unsolved.into_iter().take(unsolved_quota).map(String::from));
    out.shuffle(&mut rng);
    out
}

/// Renames variables with `var_map`, symbols with `fun_map` and permutes
/// rules by `order`. Used to plant duplicates.
pub fn rename_trs(trs: &Trs, fun_map: &BTreeMap<Name, Name>, var_map: &BTreeMap<Name, Name>, order: &[usize]) -> Trs {
    fn go(t: &Term, f: &BTreeMap<Name, Name>, v: &BTreeMap<Name, Name>) -> Term {
        match t {
            Term::Var(x) => Term::Var(v.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::App(g, args) => {
                Term::App(f.get(g).cloned().unwrap_or_else(|| g.clone()), args.iter().map(|a| go(a, f, v)).collect())
            }
        }
    }
    let rules: Vec<Rule> = order
        .iter()
        .map(|&i| {
            let r = &trs.rules[i];
            Rule { lhs: go(&r.lhs, fun_map, var_map), rhs: go(&r.rhs, fun_map, var_map) }
        })
        .collect();
    let vars = trs.variables.iter().map(|x| var_map.get(x).cloned().unwrap_or_else(|| x.clone())).collect();
    Trs::new(&trs.name, vars, rules).expect("renaming preserves well-formedness")
}
