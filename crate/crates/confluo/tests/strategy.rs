mod common;

use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{defs, fixture, small_config};
use confluo::strategy::{eval_raw, eval_strategy, parse_strategy, EvalOptions};
use confluo::trs_io::load_problem;
use confluo_core::generator::gen_trs_indexed;
use confluo_core::Answer;
use proptest::prelude::*;

const ATOMS: &[&str] = &[
    "orthogonal",
    "closed -steps 2",
    "kb -lpo -join 4",
    "nonconfluence -steps 1",
    "redundant_remove -n 2",
    "redundant -js -size 8",
    "succ",
    "fail",
];

fn strategy() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(ATOMS).prop_map(|s| s.to_string());
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a};{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}|{b})")),
            inner.clone().prop_map(|a| format!("({a})!")),
            inner.prop_map(|a| format!("({a})2*")),
        ]
    })
}

fn opts() -> EvalOptions {
    EvalOptions { timeout: Some(Duration::from_secs(10)), ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn optional_and_star_never_fail(s in strategy(), k in 0u64..200) {
        let (t, _) = gen_trs_indexed(&small_config(1), k);
        for wrapped in [format!("S = ({s})?\n"), format!("S = ({s})*\n")] {
            let o = eval_raw(&defs(&wrapped), "S", &t, &opts()).unwrap();
            prop_assert!(o.success, "{wrapped} failed on {}", t.name);
        }
    }

    #[test]
    fn printed_strategies_reparse_to_the_same_tree(s in strategy()) {
        let d = defs(&format!("S = {s}\n"));
        let again = parse_strategy(&format!("S = {}\n", d.get("S").unwrap())).unwrap();
        prop_assert_eq!(again.get("S"), d.get("S"));
    }
}

#[test]
fn timed_strategies_stop_near_their_limit() {
    let ta = load_problem(&fixture("examples/loop.trs")).unwrap().trs;
    for f in [0.05, 0.1, 0.3] {
        let d = defs(&format!("S = (nonconfluence -steps 8 -nf)[{f}]\n"));
        let start = Instant::now();
        let o = eval_strategy(&d, "S", &ta, &EvalOptions::default()).unwrap();
        let took = start.elapsed();
        assert_eq!(o.answer, Answer::Maybe);
        assert!(took <= Duration::from_secs_f64(f) + Duration::from_millis(100), "[{f}] took {took:?}");
    }
}

#[test]
fn cancelled_runs_are_maybe_and_never_contradict() {
    let ta = load_problem(&fixture("examples/loop.trs")).unwrap().trs;
    let d = defs("S = nonconfluence -steps 8 -nf\n");
    let flag = Arc::new(AtomicBool::new(true));
    let start = Instant::now();
    let o = eval_strategy(&d, "S", &ta, &EvalOptions { cancel: Some(flag), ..Default::default() }).unwrap();
    assert_eq!(o.answer, Answer::Maybe);
    assert!(start.elapsed() < Duration::from_millis(100));

    let auto = confluo::strategy::default_defs();
    for k in 0..40 {
        let (t, _) = gen_trs_indexed(&small_config(2), k);
        let full = eval_strategy(&auto, "AUTO", &t, &opts()).unwrap().answer;
        let flag = Arc::new(AtomicBool::new(false));
        let setter = {
            let flag = flag.clone();
            std::thread::spawn(move || {
                std::thread::sleep(Duration::from_millis(5));
                flag.store(true, std::sync::atomic::Ordering::Relaxed);
            })
        };
        let cut = eval_strategy(&auto, "AUTO", &t, &EvalOptions { cancel: Some(flag), ..opts() }).unwrap().answer;
        setter.join().unwrap();
        assert!(cut == Answer::Maybe || cut == full || full == Answer::Maybe, "{}: {cut} vs {full}", t.name);
    }
}

#[test]
fn predicates_pick_a_branch() {
    let b = load_problem(&fixture("examples/var_overlap.trs")).unwrap().trs;
    let d = defs("S = if left-linear then succ else fail\n");
    assert!(!eval_raw(&d, "S", &b, &EvalOptions::default()).unwrap().success);
    let d = defs("S = if left-linear then fail else nonconfluence -var\n");
    assert_eq!(eval_strategy(&d, "S", &b, &EvalOptions::default()).unwrap().answer, Answer::No);
}
