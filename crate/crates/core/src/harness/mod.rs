//! Fixtures, corpus, generators, the differential fuzzer and the benchmark grid.

pub mod bench;
pub mod corpus;
pub mod fixture;
pub mod fuzz;
pub mod generate;

pub use bench::{run_bench, BenchConfig, BenchReport, BenchRow, Timing};
pub use corpus::{CorpusQuery, CORPUS};
pub use fuzz::{check, compare_engines, fuzz, shrink, Counterexample, FuzzConfig, FuzzReport, Verdict};
pub use generate::{random_dataset, random_mapping, synthetic_dataset, DatasetSpec, TreeGenerator};
