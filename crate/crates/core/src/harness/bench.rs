//! Storage and timing report over a grid of synthetic archives.

use std::fmt::Write as _;
use std::time::Instant;

use crate::algebra::{translate, Algebra};
use crate::eval::{eval_condensed, eval_flat, EvalError};
use crate::model::{condense, FlatDataset};
use crate::query::{prepare, QueryError};

use super::corpus::CORPUS;
use super::generate::synthetic_dataset;

/// Bytes per flat row: four term ids and a version ordinal, 32 bits each.
pub const FLAT_ROW_BYTES: u64 = 20;
/// Bytes per condensed entry before its version bitstring: four term ids.
pub const CONDENSED_ENTRY_BYTES: u64 = 16;

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub versions: Vec<usize>,
    pub steps: Vec<usize>,
    /// Quads present in every version.
    pub shared: usize,
    /// Quads private to each version.
    pub volatile: usize,
    pub warmup: usize,
    pub runs: usize,
    /// Skip query timing and only measure storage.
    pub storage_only: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            versions: vec![5, 20, 50],
            steps: vec![0, 5, 10],
            shared: 4,
            volatile: 8,
            warmup: 5,
            runs: 10,
            storage_only: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timing {
    pub median_ms: f64,
    pub p75_ms: f64,
    pub p95_ms: f64,
}

impl Timing {
    /// Nearest-rank percentiles of the samples.
    pub fn from_samples(mut samples: Vec<f64>) -> Self {
        if samples.is_empty() {
            return Timing::default();
        }
        samples.sort_by(f64::total_cmp);
        let rank = |p: f64| samples[((p * samples.len() as f64).ceil() as usize).clamp(1, samples.len()) - 1];
        Timing {
            median_ms: rank(0.5),
            p75_ms: rank(0.75),
            p95_ms: rank(0.95),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QueryTiming {
    pub name: &'static str,
    pub flat: Timing,
    pub condensed: Timing,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub versions: usize,
    pub steps: usize,
    pub flat_rows: usize,
    pub condensed_entries: usize,
    pub bytes_flat: u64,
    pub bytes_condensed: u64,
    /// Whole-corpus time per run.
    pub flat: Timing,
    pub condensed: Timing,
    pub queries: Vec<QueryTiming>,
}

impl BenchRow {
    pub fn ratio(&self) -> f64 {
        self.condensed_entries as f64 / self.flat_rows.max(1) as f64
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("corpus query {name}: {source}")]
    Query { name: &'static str, source: QueryError },
    #[error("corpus query {name}: {source}")]
    Translate {
        name: &'static str,
        source: crate::algebra::AlgebraError,
    },
    #[error("corpus query {name}: {source}")]
    Eval { name: &'static str, source: EvalError },
}

pub const CSV_HEADER: &str = "versions,steps,flat_rows,condensed_entries,bytes_flat,bytes_condensed,\
flat_median_ms,flat_p75_ms,flat_p95_ms,condensed_median_ms,condensed_p75_ms,condensed_p95_ms";

pub const QUERY_CSV_HEADER: &str = "versions,steps,query,flat_median_ms,flat_p75_ms,flat_p95_ms,\
condensed_median_ms,condensed_p75_ms,condensed_p95_ms";

impl BenchReport {
    /// One line per grid cell, whole-corpus timings.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
                r.versions,
                r.steps,
                r.flat_rows,
                r.condensed_entries,
                r.bytes_flat,
                r.bytes_condensed,
                r.flat.median_ms,
                r.flat.p75_ms,
                r.flat.p95_ms,
                r.condensed.median_ms,
                r.condensed.p75_ms,
                r.condensed.p95_ms
            );
        }
        out
    }

    /// One line per grid cell and corpus query.
    pub fn queries_csv(&self) -> String {
        let mut out = format!("{QUERY_CSV_HEADER}\n");
        for r in &self.rows {
            for q in &r.queries {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
                    r.versions,
                    r.steps,
                    q.name,
                    q.flat.median_ms,
                    q.flat.p75_ms,
                    q.flat.p95_ms,
                    q.condensed.median_ms,
                    q.condensed.p75_ms,
                    q.condensed.p95_ms
                );
            }
        }
        out
    }
}

struct Prepared {
    name: &'static str,
    flat: Algebra,
    condensed: Algebra,
}

fn prepare_corpus() -> Result<Vec<Prepared>, BenchError> {
    CORPUS
        .iter()
        .map(|q| {
            let flat = prepare(q.text).map_err(|source| BenchError::Query { name: q.name, source })?;
            let condensed = translate(&flat).map_err(|source| BenchError::Translate { name: q.name, source })?;
            Ok(Prepared {
                name: q.name,
                flat,
                condensed,
            })
        })
        .collect()
}

fn time_ms(f: impl FnOnce() -> Result<(), EvalError>) -> Result<f64, EvalError> {
    let start = Instant::now();
    f()?;
    Ok(start.elapsed().as_secs_f64() * 1e3)
}

pub fn storage_row(flat: &FlatDataset, versions: usize, steps: usize) -> BenchRow {
    let condensed = condense(flat);
    let bytes_condensed = condensed
        .entries()
        .values()
        .map(|set| CONDENSED_ENTRY_BYTES + 8 * set.blocks().len() as u64)
        .sum();
    BenchRow {
        versions,
        steps,
        flat_rows: flat.len(),
        condensed_entries: condensed.len(),
        bytes_flat: FLAT_ROW_BYTES * flat.len() as u64,
        bytes_condensed,
        flat: Timing::default(),
        condensed: Timing::default(),
        queries: Vec::new(),
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    let corpus = prepare_corpus()?;
    let mut report = BenchReport::default();
    for &versions in &config.versions {
        for &steps in &config.steps {
            let spec = synthetic_dataset(versions, steps, config.shared, config.volatile);
            let flat = spec.flat();
            let mut row = storage_row(&flat, versions, steps);
            log::info!(
                "bench cell versions={versions} steps={steps}: {} rows, {} entries",
                row.flat_rows,
                row.condensed_entries
            );
            if !config.storage_only {
                let condensed = condense(&flat);
                let mut flat_totals = vec![0.0; config.runs];
                let mut condensed_totals = vec![0.0; config.runs];
                for q in &corpus {
                    let eval_err = |source| BenchError::Eval { name: q.name, source };
                    let mut flat_samples = Vec::with_capacity(config.runs);
                    let mut condensed_samples = Vec::with_capacity(config.runs);
                    for run in 0..config.warmup + config.runs {
                        let f = time_ms(|| eval_flat(&flat, &q.flat).map(drop)).map_err(eval_err)?;
                        let c = time_ms(|| eval_condensed(&condensed, &q.condensed).map(drop)).map_err(eval_err)?;
                        if run >= config.warmup {
                            flat_samples.push(f);
                            condensed_samples.push(c);
                            flat_totals[run - config.warmup] += f;
                            condensed_totals[run - config.warmup] += c;
                        }
                    }
                    row.queries.push(QueryTiming {
                        name: q.name,
                        flat: Timing::from_samples(flat_samples),
                        condensed: Timing::from_samples(condensed_samples),
                    });
                }
                row.flat = Timing::from_samples(flat_totals);
                row.condensed = Timing::from_samples(condensed_totals);
            }
            report.rows.push(row);
        }
    }
    Ok(report)
}
