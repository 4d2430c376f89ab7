//! The strategy language: syntax, processor registry, evaluation.

pub mod eval;
pub mod registry;
pub mod syntax;

pub use eval::{answer_of, check, eval_raw, eval_strategy, Budget, EvalError, EvalOptions, Outcome, Problem, TraceEntry};
pub use syntax::{parse_expr, parse_strategy, Modifier, Strategy, StrategyDefs, SyntaxError};

/// Built-in strategy used when no strategy file is given.
pub const DEFAULT_STRATEGY: &str = include_str!("../../assets/default.strategy");

pub fn default_defs() -> StrategyDefs {
    parse_strategy(DEFAULT_STRATEGY).expect("built-in strategy parses")
}
