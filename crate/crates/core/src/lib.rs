//! Core algorithms for confluence analysis of first-order term rewrite systems.
//!
//! Everything in this crate is allocation-only (`no_std` + `alloc`). Wall-clock
//! time enters through the [`budget::Deadline`] and [`budget::Clock`] traits so
//! the std companion crate can supply real clocks and cancellation.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod answer;
pub mod budget;
pub mod critical;
pub mod dataset;
pub mod generator;
pub mod portfolio;
pub mod procs;
pub mod rewrite;
pub mod scheduler;
pub mod term;
pub mod termination;
pub mod unify;

pub use answer::Answer;
pub use term::{Name, Position, Rule, Substitution, Symbol, Term, Trs};
