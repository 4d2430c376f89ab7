//! Random TRS generation.
//!
//! Terms are grown breadth-first from a root symbol. A size budget keeps
//! every term within `max_term_size`: a symbol of arity `a` is only a
//! candidate while `a` fits into the budget left after reserving one symbol
//! for every other open argument slot.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::term::{name, Name, Rule, Symbol, Term, Trs};

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub max_funs: usize,
    pub max_consts: usize,
    pub max_vars: usize,
    pub max_rules: usize,
    pub max_arity: usize,
    pub left_linear_prob: f64,
    pub complex_bias: f64,
    pub max_term_size: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_funs: 12,
            max_consts: 5,
            max_vars: 8,
            max_rules: 15,
            max_arity: 8,
            left_linear_prob: 0.6,
            complex_bias: 1.6,
            max_term_size: 15,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct GenContext {
    pub funs: Vec<Symbol>,
    pub consts: Vec<Name>,
    pub vars: Vec<Name>,
    pub comp: f64,
    pub linear: bool,
    pub side: Side,
    pub max_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("no admissible root symbol")]
    NoRoot,
    #[error("no admissible symbol for an argument slot")]
    NoArgument,
}

#[derive(Clone)]
enum Pick {
    Fun(Symbol),
    Const(Name),
    Var(Name),
}

impl Pick {
    fn arity(&self) -> usize {
        match self {
            Pick::Fun(s) => s.arity,
            _ => 0,
        }
    }

    fn label(&self) -> &Name {
        match self {
            Pick::Fun(s) => &s.name,
            Pick::Const(c) | Pick::Var(c) => c,
        }
    }
}

fn pool(funs: &[Symbol], consts: &[Name], vars: &[Name], max_arity: usize) -> Vec<Pick> {
    let mut out: Vec<Pick> = funs.iter().filter(|f| f.arity <= max_arity).cloned().map(Pick::Fun).collect();
    out.extend(consts.iter().cloned().map(Pick::Const));
    out.extend(vars.iter().cloned().map(Pick::Var));
    out
}

/// One term; `ctx.vars` loses every variable used on a linear left side.
pub fn gen_term(ctx: &mut GenContext, rng: &mut impl RngCore) -> Result<Term, GenError> {
    let max = ctx.max_size.max(1);
    let root_arity = max - 1;
    let complex = rng.random::<f64>() < ctx.comp;
    let no_vars: &[Name] = &[];
    let mut roots = if complex {
        pool(&ctx.funs, &[], no_vars, root_arity)
    } else if ctx.side == Side::Left {
        pool(&ctx.funs, &ctx.consts, no_vars, root_arity)
    } else {
        pool(&ctx.funs, &ctx.consts, &ctx.vars, root_arity)
    };
    if roots.is_empty() && complex {
        let vars: &[Name] = if ctx.side == Side::Left { no_vars } else { &ctx.vars };
        roots = pool(&ctx.funs, &ctx.consts, vars, root_arity);
    }
    let root = roots.choose(rng).cloned().ok_or(GenError::NoRoot)?;
    if let Pick::Var(x) = &root {
        return Ok(Term::Var(x.clone()));
    }
    // Arena of (symbol, children); slots are filled breadth-first.
    let mut nodes: Vec<(Pick, Vec<usize>)> = vec![(root.clone(), Vec::new())];
    let mut open: VecDeque<usize> = VecDeque::new();
    for _ in 0..root.arity() {
        open.push_back(0);
    }
    let mut used = 1;
    while let Some(parent) = open.pop_front() {
        let budget = max - used - open.len();
        let cands = pool(&ctx.funs, &ctx.consts, &ctx.vars, budget.saturating_sub(1));
        let sym = cands.choose(rng).cloned().ok_or(GenError::NoArgument)?;
        if let Pick::Var(x) = &sym {
            if ctx.linear && ctx.side == Side::Left {
                ctx.vars.retain(|v| v != x);
            }
        }
        let id = nodes.len();
        for _ in 0..sym.arity() {
            open.push_back(id);
        }
        nodes.push((sym, Vec::new()));
        nodes[parent].1.push(id);
        used += 1;
    }
    Ok(build(&nodes, 0))
}

fn build(nodes: &[(Pick, Vec<usize>)], i: usize) -> Term {
    let (sym, kids) = &nodes[i];
    match sym {
        Pick::Var(x) => Term::Var(x.clone()),
        _ => Term::App(sym.label().clone(), kids.iter().map(|&k| build(nodes, k)).collect()),
    }
}

/// Signature and per-TRS draws shared by all rules of one system.
#[derive(Clone, Debug)]
pub struct GenTemplate {
    pub funs: Vec<Symbol>,
    pub consts: Vec<Name>,
    pub vars: Vec<Name>,
    pub comp: f64,
    pub linear: bool,
    pub max_size: usize,
}

pub fn gen_rule(tpl: &GenTemplate, rng: &mut impl RngCore) -> Result<Rule, GenError> {
    let mut left = GenContext {
        funs: tpl.funs.clone(),
        consts: tpl.consts.clone(),
        vars: tpl.vars.clone(),
        comp: tpl.comp,
        linear: tpl.linear,
        side: Side::Left,
        max_size: tpl.max_size,
    };
    let lhs = gen_term(&mut left, rng)?;
    let mut right = GenContext { vars: lhs.vars_ordered(), side: Side::Right, ..left };
    right.vars.sort();
    let rhs = gen_term(&mut right, rng)?;
    Ok(Rule::new(lhs, rhs).expect("lhs is never a variable and rhs uses lhs variables only"))
}

/// Facts about one generated system, recorded in manifests.
#[derive(Clone, Debug, PartialEq)]
pub struct GenMeta {
    pub index: u64,
    pub forced_left_linear: bool,
    pub comp: f64,
    pub funs: usize,
    pub consts: usize,
    pub vars: usize,
    pub resamples: usize,
}

const RULE_RETRIES: usize = 32;

/// Random generator for system `index` of the stream seeded by `cfg.seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th system of the stream; identical inputs give identical
/// output.
pub fn gen_trs_indexed(cfg: &GenConfig, index: u64) -> (Trs, GenMeta) {
    let mut rng = stream_rng(cfg.seed, index);
    let (mut trs, mut meta) = gen_trs(cfg, &mut rng);
    trs.name = format!("gen_{}_{}", cfg.seed, index);
    meta.index = index;
    (trs, meta)
}

pub fn gen_trs(cfg: &GenConfig, rng: &mut impl RngCore) -> (Trs, GenMeta) {
    let mut resamples = 0;
    // Drawn once so that resampling a degenerate shape cannot bias the ratio.
    let linear = rng.random_bool(cfg.left_linear_prob.clamp(0.0, 1.0));
    loop {
        let nf = rng.random_range(0..=cfg.max_funs);
        let nc = rng.random_range(0..=cfg.max_consts);
        let nv = rng.random_range(0..=cfg.max_vars);
        // No lhs root without functions or constants; no finished term
        // without constants or variables.
        if nf + nc == 0 || nc + nv == 0 {
            resamples += 1;
            continue;
        }
        let funs: Vec<Symbol> = (1..=nf)
            .map(|i| {
                let a = rng.random_range(1..=cfg.max_arity.max(1));
                Symbol::new(&format!("f{i}"), a)
            })
            .collect();
        let consts: Vec<Name> = (1..=nc).map(|i| name(&format!("c{i}"))).collect();
        let vars: Vec<Name> = (1..=nv).map(|i| name(&format!("x{i}"))).collect();
        let n_rules = rng.random_range(1..=cfg.max_rules.max(1));
        let comp = if cfg.complex_bias > 0.0 { rng.random_range(0.0..cfg.complex_bias) } else { 0.0 };
        let tpl = GenTemplate { funs, consts, vars: vars.clone(), comp, linear, max_size: cfg.max_term_size };
        let mut rules = Vec::with_capacity(n_rules);
        'rules: for _ in 0..n_rules {
            for _ in 0..RULE_RETRIES {
                if let Ok(r) = gen_rule(&tpl, rng) {
                    rules.push(r);
                    continue 'rules;
                }
            }
            break;
        }
        if rules.len() < n_rules {
            resamples += 1;
            continue;
        }
        let declared: BTreeSet<Name> = vars.into_iter().collect();
        let trs = Trs::new("gen", declared, rules).expect("generated symbols have fixed arities");
        let meta = GenMeta { index: 0, forced_left_linear: linear, comp, funs: nf, consts: nc, vars: nv, resamples };
        return (trs, meta);
    }
}

/// Summary of a generated batch.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenStats {
    pub samples: usize,
    pub forced: usize,
    pub left_linear: usize,
    pub max_term_size: usize,
    pub malformed: usize,
}

impl GenStats {
    pub fn add(&mut self, trs: &Trs, meta: &GenMeta) {
        self.samples += 1;
        self.forced += usize::from(meta.forced_left_linear);
        self.left_linear += usize::from(crate::rewrite::syntactic_predicates(trs).left_linear);
        for r in &trs.rules {
            self.max_term_size = self.max_term_size.max(r.lhs.size()).max(r.rhs.size());
            if Rule::new(r.lhs.clone(), r.rhs.clone()).is_err() {
                self.malformed += 1;
            }
        }
    }

    pub fn forced_fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.forced as f64 / self.samples as f64
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "samples={} forced={:.4} left_linear={:.4} max_size={} malformed={}",
            self.samples,
            self.forced_fraction(),
            self.left_linear as f64 / self.samples.max(1) as f64,
            self.max_term_size,
            self.malformed
        )
    }
}
