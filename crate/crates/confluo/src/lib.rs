//! Std companion to `confluo-core`: file formats, the strategy language,
//! portfolio persistence, scheduling and benchmarking.

pub mod bench;
pub mod dataset_io;
pub mod portfolio_io;
pub mod records;
pub mod runner;
pub mod schedule_io;
pub mod strategy;
pub mod trs_io;
