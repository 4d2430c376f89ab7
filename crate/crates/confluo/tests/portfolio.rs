mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{fixture, Synthetic, SyntheticEvaluator};
use confluo::portfolio_io::{initial_candidates, invent, parse_space, InventConfig, PortfolioDir, DEFAULT_SPACE, DEFAULT_TEMPLATE};
use confluo::records::{read_jsonl, RunRecord};
use confluo::strategy::{check, parse_strategy};
use confluo::trs_io::load_problem;
use confluo_core::budget::StepClock;
use confluo_core::portfolio::{grackle_loop, instantiate, Assignment, Beta, Candidate, PortfolioState, SpecContext};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn beta(cap: usize) -> Beta {
    Beta {
        generation_size: 5,
        portfolio_cap: cap,
        eval_limit_ms: 10_000,
        spec_budget_ms: 1_000_000,
        spec_max_candidates: 15,
        max_specializations: 3,
        workers: 1,
        max_iterations: 30,
        wall_budget_ms: None,
        max_evaluations: Some(150),
    }
}

struct Run {
    state: PortfolioState,
    ev: SyntheticEvaluator,
    coverage: Vec<usize>,
}

fn run_synthetic(seed: u64, cap: usize) -> Run {
    let syn = Synthetic::new();
    let mut state = PortfolioState::new(beta(cap));
    state.add(Candidate::new(&syn.space, &syn.template, syn.space.defaults(), None).unwrap());
    let mut ev = SyntheticEvaluator { space: syn.space.clone(), ..Default::default() };
    let clock = StepClock::new(1);
    let ctx = SpecContext { space: &syn.space, template: &syn.template, clock: &clock };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coverage = Vec::new();
    grackle_loop(&mut state, &ctx, &mut ev, &syn.problems, &mut rng, |s| coverage.push(s.solved_by_any(&syn.problems).len()));
    Run { state, ev, coverage }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn loop_invariants_hold(seed in any::<u64>(), cap in 2usize..12) {
        let r = run_synthetic(seed, cap);
        // Every pair is run at most once.
        prop_assert_eq!(r.ev.runs, r.state.matrix.len());
        prop_assert_eq!(r.ev.forbidden_visits, 0);
        prop_assert!(r.coverage.windows(2).all(|w| w[0] <= w[1]), "{:?}", r.coverage);
        prop_assert!(r.state.strategies.len() <= cap.max(1) + 1);
        prop_assert!(r.state.evaluated.len() <= 150 + 15);
    }
}

#[test]
fn same_seed_same_portfolio() {
    let a = run_synthetic(9, 8);
    let b = run_synthetic(9, 8);
    let ids = |r: &Run| r.state.strategies.iter().map(|c| c.id.clone()).collect::<Vec<_>>();
    assert_eq!(ids(&a), ids(&b));
    assert_eq!(a.state.history, b.state.history);
    assert_eq!(a.state.matrix, b.state.matrix);
}

#[test]
fn every_assignment_of_the_default_space_yields_a_valid_strategy() {
    let space = parse_space(DEFAULT_SPACE).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut seen = 0;
    for c in initial_candidates(&space, DEFAULT_TEMPLATE) {
        let d = parse_strategy(&c.text).unwrap();
        check(&d, d.default_entry().unwrap()).unwrap();
    }
    while seen < 300 {
        let a: Assignment = space.params.iter().map(|p| (p.name.clone(), p.values.choose(&mut rng).unwrap().clone())).collect();
        if space.is_forbidden(&a) {
            assert!(instantiate(&space, DEFAULT_TEMPLATE, &a).is_err());
            continue;
        }
        let text = instantiate(&space, DEFAULT_TEMPLATE, &a).unwrap();
        let d = parse_strategy(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        check(&d, d.default_entry().unwrap()).unwrap_or_else(|e| panic!("{e}\n{text}"));
        seen += 1;
    }
}

#[test]
fn invention_resumes_without_rerunning() {
    let dir = tempfile::tempdir().unwrap();
    let problems: BTreeMap<String, _> = ["nonlinear", "var_overlap", "assoc", "overlap", "empty"]
        .iter()
        .map(|n| (n.to_string(), load_problem(&fixture(&format!("examples/{n}.trs"))).unwrap().trs))
        .collect();
    let space = parse_space(DEFAULT_SPACE).unwrap();
    let small = |iterations| Beta {
        generation_size: 3,
        portfolio_cap: 10,
        eval_limit_ms: 300,
        spec_budget_ms: 5_000,
        spec_max_candidates: 2,
        max_specializations: 1,
        workers: 1,
        max_iterations: iterations,
        wall_budget_ms: None,
        max_evaluations: None,
    };
    let cfg = |iterations| InventConfig {
        space: space.clone(),
        template: DEFAULT_TEMPLATE.to_string(),
        problems: problems.clone(),
        out: dir.path().to_path_buf(),
        beta: small(iterations),
        jobs: 1,
        seed: 5,
    };
    let first = invent(cfg(1)).unwrap();
    assert!(!first.resumed);
    let runs_before = first.state.matrix.len();
    let second = invent(cfg(2)).unwrap();
    assert!(second.resumed);
    assert!(second.state.iteration >= first.state.iteration);
    for c in &first.state.strategies {
        assert!(second.state.strategy(&c.id).is_some() || second.state.strategies.len() == 10);
    }
    let pd = PortfolioDir { root: dir.path().to_path_buf() };
    let log: Vec<RunRecord> = read_jsonl(&pd.evals_path()).unwrap();
    let pairs: BTreeSet<(String, String)> = log.iter().map(|r| (r.strategy.clone(), r.problem.clone())).collect();
    assert_eq!(pairs.len(), log.len(), "a pair was evaluated twice");
    assert!(log.len() >= runs_before);
    for c in &second.state.strategies {
        let text = std::fs::read_to_string(pd.strategy_path(&c.id)).unwrap();
        assert!(parse_strategy(&text).is_ok());
    }
}
