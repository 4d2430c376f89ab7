//! Processors and predicates available to strategies.

use std::collections::BTreeMap;

use confluo_core::budget::Deadline;
use confluo_core::procs::{
    proc_knuth_bendix, proc_nonconfluence, proc_orthogonal, proc_strongly_closed, redundant_add, redundant_remove,
    KbConfig, NonconfluenceConfig, OverlapMode, ProcOutcome, RedundantConfig, Witness,
};
use confluo_core::rewrite::syntactic_predicates;
use confluo_core::termination::TermBudget;
use confluo_core::Trs;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagKind {
    Switch,
    Int { min: i64, max: i64 },
}

pub struct ProcSpec {
    pub name: &'static str,
    pub flags: &'static [(&'static str, FlagKind)],
    /// Transformations succeed by changing the problem, never with a verdict.
    pub transforms: bool,
}

const fn int(min: i64, max: i64) -> FlagKind {
    FlagKind::Int { min, max }
}

use FlagKind::Switch;

pub const PROCESSORS: &[ProcSpec] = &[
    ProcSpec { name: "fail", flags: &[], transforms: false },
    ProcSpec { name: "succ", flags: &[], transforms: false },
    ProcSpec { name: "orthogonal", flags: &[], transforms: false },
    ProcSpec { name: "closed", flags: &[("steps", int(1, 16))], transforms: false },
    ProcSpec {
        name: "kb",
        flags: &[
            ("join", int(1, 32)),
            ("lpo", Switch),
            ("kbo", Switch),
            ("poly", Switch),
            ("cb", int(1, 8)),
            ("wb", int(1, 8)),
        ],
        transforms: false,
    },
    ProcSpec {
        name: "nonconfluence",
        flags: &[
            ("steps", int(0, 8)),
            ("width", int(-1, 64)),
            ("fun", Switch),
            ("var", Switch),
            ("tcap", Switch),
            ("nf", Switch),
            ("guard", int(0, 10)),
        ],
        transforms: false,
    },
    ProcSpec {
        name: "redundant",
        flags: &[
            ("js", Switch),
            ("rhs", Switch),
            ("development", int(1, 10)),
            ("size", int(-1, 64)),
            ("m", int(-1, 8)),
        ],
        transforms: true,
    },
    ProcSpec { name: "redundant_remove", flags: &[("n", int(-1, 16))], transforms: true },
];

pub const PREDICATES: &[&str] = &["left-linear", "right-linear", "linear", "ground", "collapsing", "duplicating", "trs"];

pub fn lookup(name: &str) -> Option<&'static ProcSpec> {
    let name = if name == "redundant_add" { "redundant" } else { name };
    PROCESSORS.iter().find(|p| p.name == name)
}

pub fn predicate(name: &str, trs: &Trs) -> Option<bool> {
    let p = syntactic_predicates(trs);
    Some(match name {
        "left-linear" => p.left_linear,
        "right-linear" => p.right_linear,
        "linear" => p.linear,
        "ground" => p.ground,
        "collapsing" => p.collapsing,
        "duplicating" => p.duplicating,
        "trs" => true,
        _ => return None,
    })
}

/// Flag name → value (`None` for switches).
pub type Flags = BTreeMap<String, Option<i64>>;

pub fn parse_flags(spec: &ProcSpec, args: &[String]) -> Result<Flags, String> {
    let mut out = Flags::new();
    let mut i = 0;
    while i < args.len() {
        let flag = args[i].strip_prefix('-').ok_or_else(|| format!("`{}`: unexpected argument `{}`", spec.name, args[i]))?;
        let kind = spec
            .flags
            .iter()
            .find(|f| f.0 == flag)
            .map(|f| f.1)
            .ok_or_else(|| format!("`{}` has no flag `-{flag}`", spec.name))?;
        let value = match kind {
            FlagKind::Switch => None,
            FlagKind::Int { min, max } => {
                let raw = args.get(i + 1).ok_or_else(|| format!("`-{flag}` of `{}` needs a value", spec.name))?;
                i += 1;
                let v: i64 = raw.parse().map_err(|_| format!("`-{flag}` expects an integer, got `{raw}`"))?;
                if v < min || v > max {
                    return Err(format!("`-{flag}` of `{}` must be in {min}..={max}, got {v}", spec.name));
                }
                Some(v)
            }
        };
        if out.insert(flag.to_string(), value).is_some() {
            return Err(format!("`-{flag}` given twice to `{}`", spec.name));
        }
        i += 1;
    }
    Ok(out)
}

pub enum ProcOutput {
    Fail(String),
    Proved(Witness),
    Transformed(Trs),
}

fn int_flag(f: &Flags, name: &str, default: i64) -> i64 {
    f.get(name).copied().flatten().unwrap_or(default)
}

fn bound(v: i64) -> Option<usize> {
    (v >= 0).then_some(v as usize)
}

/// Runs an already validated processor call.
pub fn run(spec: &ProcSpec, flags: &Flags, trs: &Trs, deadline: &dyn Deadline) -> ProcOutput {
    let has = |n: &str| flags.contains_key(n);
    let verdict = |r: confluo_core::procs::ProcResult| match (r.outcome, r.witness) {
        (ProcOutcome::Yes | ProcOutcome::No, Some(w)) => ProcOutput::Proved(w),
        _ => ProcOutput::Fail(r.reason),
    };
    match spec.name {
        "fail" => ProcOutput::Fail("fail".into()),
        "succ" => ProcOutput::Transformed(trs.clone()),
        "orthogonal" => verdict(proc_orthogonal(trs)),
        "closed" => verdict(proc_strongly_closed(trs, int_flag(flags, "steps", 3) as usize, deadline)),
        "kb" => {
            let any = has("lpo") || has("kbo") || has("poly");
            let termination = TermBudget {
                lpo: !any || has("lpo"),
                kbo: !any || has("kbo"),
                interp: !any || has("poly"),
                coeff_bound: int_flag(flags, "cb", 3) as u64,
                weight_bound: int_flag(flags, "wb", 3) as u64,
            };
            let cfg = KbConfig { termination, join_depth: int_flag(flags, "join", 8) as usize };
            verdict(proc_knuth_bendix(trs, &cfg, deadline))
        }
        "nonconfluence" => {
            let mode = match (has("fun"), has("var")) {
                (true, false) => OverlapMode::Fun,
                (false, true) => OverlapMode::Var,
                _ => OverlapMode::Both,
            };
            let (use_tcap, use_nf) = match (has("tcap"), has("nf")) {
                (false, false) => (true, false),
                pair => pair,
            };
            let cfg = NonconfluenceConfig {
                steps: int_flag(flags, "steps", 2) as usize,
                width: bound(int_flag(flags, "width", -1)),
                mode,
                use_tcap,
                use_nf,
                guard_depth: int_flag(flags, "guard", 6) as usize,
            };
            verdict(proc_nonconfluence(trs, &cfg, deadline))
        }
        "redundant" => {
            let any = has("js") || has("rhs") || has("development");
            let cfg = RedundantConfig {
                js: !any || has("js"),
                rhs: has("rhs"),
                develop: flags.get("development").copied().flatten().map(|k| k as usize),
                size_cap: bound(int_flag(flags, "size", -1)),
                join_m: bound(int_flag(flags, "m", 0)),
            };
            changed(trs, redundant_add(trs, &cfg, deadline))
        }
        "redundant_remove" => changed(trs, redundant_remove(trs, bound(int_flag(flags, "n", 4)), deadline)),
        other => ProcOutput::Fail(format!("unknown processor `{other}`")),
    }
}

fn changed(before: &Trs, after: Trs) -> ProcOutput {
    if after.rules == before.rules {
        ProcOutput::Fail("no change".into())
    } else {
        ProcOutput::Transformed(after)
    }
}
