//! Generated corpora, deduplication tables, labels and balanced subsets.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;

use confluo_core::dataset::{canonical_form, dedup, label_records, natural_cmp, DedupClass, DedupItem, LabelRecord, StrategyRun};
use confluo_core::generator::{gen_trs_indexed, GenConfig};
use confluo_core::rewrite::syntactic_predicates;
use confluo_core::Trs;

use crate::records::{append_jsonl, read_jsonl, write_jsonl, ManifestRecord, RunRecord};
use crate::runner::{pool, run_one};
use crate::strategy::StrategyDefs;
use crate::trs_io::{list_problems, load_problem, print_trs, LoadError};

/// Writes `count` systems as `<name>.trs` plus `manifest.jsonl` into `out`.
pub fn gen_corpus(cfg: &GenConfig, count: u64, out: &Path) -> std::io::Result<Vec<ManifestRecord>> {
    std::fs::create_dir_all(out)?;
    let made: Vec<(Trs, ManifestRecord)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (trs, meta) = gen_trs_indexed(cfg, i);
            let rec = ManifestRecord {
                name: trs.name.clone(),
                seed: cfg.seed,
                index: i,
                forced_left_linear: meta.forced_left_linear,
                left_linear: syntactic_predicates(&trs).left_linear,
                comp: meta.comp,
                funs: meta.funs,
                consts: meta.consts,
                vars: meta.vars,
                rules: trs.rules.len(),
                max_term_size: trs.rules.iter().map(|r| r.lhs.size().max(r.rhs.size())).max().unwrap_or(0),
            };
            (trs, rec)
        })
        .collect();
    for (trs, rec) in &made {
        std::fs::write(out.join(format!("{}.trs", rec.name)), format!("{}\n", print_trs(trs)))?;
    }
    let manifest: Vec<ManifestRecord> = made.into_iter().map(|m| m.1).collect();
    write_jsonl(&out.join("manifest.jsonl"), &manifest)?;
    Ok(manifest)
}

/// Loads every `.trs` file in `dir` keyed by file stem, in natural order.
pub fn load_dir(dir: &Path) -> Result<Vec<(String, Trs)>, LoadError> {
    let mut out = Vec::new();
    let files = list_problems(dir).map_err(|source| LoadError::Io { path: dir.display().to_string(), source })?;
    for p in files {
        let f = load_problem(&p)?;
        out.push((stem(&p), f.trs));
    }
    out.sort_by(|a, b| natural_cmp(&a.0, &b.0));
    Ok(out)
}

pub fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Deduplicates human-made problems first, then generated ones.
pub fn dedup_sets(human: &[(String, Trs)], generated: &[(String, Trs)]) -> Vec<DedupClass> {
    let items: Vec<DedupItem> = human
        .par_iter()
        .map(|(id, t)| (id, t, true))
        .chain(generated.par_iter().map(|(id, t)| (id, t, false)))
        .map(|(id, t, human)| DedupItem { id: id.clone(), human, key: canonical_form(t) })
        .collect();
    dedup(&items)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}

/// `key<TAB>members`, members comma-separated with the survivor first.
pub fn print_classes(classes: &[DedupClass]) -> String {
    let mut out = String::new();
    for c in classes {
        let mut members = vec![c.survivor.clone()];
        members.extend(c.members.iter().filter(|m| **m != c.survivor).cloned());
        out.push_str(&format!("{}\t{}\n", escape(&c.key.0), members.join(",")));
    }
    out
}

pub struct LabelJob {
    pub problems: Vec<(String, Trs)>,
    /// `(id, definitions)` in tie-break order.
    pub strategies: Vec<(String, StrategyDefs)>,
    pub limit: Duration,
    pub workers: usize,
    pub jobs: usize,
    pub out: PathBuf,
}

/// Runs every missing `(problem, strategy)` pair and appends the runs to
/// `out`. Returns the number of new runs.
pub fn label_runs(job: &LabelJob) -> std::io::Result<usize> {
    let done: BTreeSet<(String, String)> =
        read_jsonl::<RunRecord>(&job.out)?.into_iter().map(|r| (r.problem, r.strategy)).collect();
    let todo: Vec<(&String, &Trs, &String, &StrategyDefs)> = job
        .problems
        .iter()
        .flat_map(|(p, t)| job.strategies.iter().map(move |(s, d)| (p, t, s, d)))
        .filter(|(p, _, s, _)| !done.contains(&((*p).clone(), (*s).clone())))
        .collect();
    let pool = pool(job.jobs);
    // Small chunks, each appended at once, so an interrupted run loses little work.
    for chunk in todo.chunks(job.jobs.max(1) * 4) {
        let recs: Vec<RunRecord> = pool.install(|| {
            chunk
                .par_iter()
                .map(|(p, t, s, d)| {
                    let entry = d.default_entry().unwrap_or_default().to_string();
                    let r = run_one(d, &entry, t, Some(job.limit), job.workers);
                    RunRecord {
                        problem: (*p).clone(),
                        strategy: (*s).clone(),
                        answer: r.answer,
                        millis: r.millis,
                        workers: job.workers,
                        crashed: r.crashed,
                    }
                })
                .collect()
        });
        append_jsonl(&job.out, &recs)?;
    }
    Ok(todo.len())
}

/// Groups recorded runs into labelled problems. Ties between equally fast
/// strategies go to the lower id in natural order.
pub fn labels_from_runs(runs: &[RunRecord], limit_ms: u64) -> Vec<LabelRecord> {
    let mut ids: Vec<String> = runs.iter().map(|r| r.strategy.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    ids.sort_by(|a, b| natural_cmp(a, b));
    let pairs: Vec<(String, StrategyRun)> = runs
        .iter()
        .map(|r| (r.problem.clone(), StrategyRun { strategy: r.strategy.clone(), answer: r.answer, millis: r.millis }))
        .collect();
    label_records(&pairs, &ids, limit_ms)
}

/// Label counts, with `None` for unsolved problems.
pub fn label_histogram(records: &[LabelRecord]) -> BTreeMap<Option<String>, usize> {
    let mut h = BTreeMap::new();
    for r in records {
        *h.entry(r.label.clone()).or_insert(0) += 1;
    }
    h
}
