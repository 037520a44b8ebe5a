//! Differential checking of the two engines, with random search and shrinking.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{translate, Aggregation, Algebra};
use crate::eval::{
    eval_condensed_with, eval_flat, expanded_multiset, EvalOptions, ExpandedMultiset, Mutation,
};
use crate::model::{CondensedDataset, FlatDataset};

use super::generate::{random_dataset, DatasetSpec, TreeGenerator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    Different {
        flat: ExpandedMultiset,
        condensed: ExpandedMultiset,
    },
    Failed(String),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent => write!(f, "EQUIVALENT"),
            Verdict::Failed(message) => write!(f, "FAILED: {message}"),
            Verdict::Different { flat, condensed } => {
                writeln!(f, "DIFFERENT")?;
                let render = |row: &Vec<(crate::algebra::Var, crate::model::Term)>| {
                    row.iter().map(|(v, t)| format!("{v}={t}")).collect::<Vec<_>>().join(" ")
                };
                for (row, n) in flat {
                    let other = condensed.get(row).copied().unwrap_or(0);
                    if other != *n {
                        writeln!(f, "  flat {n} x condensed {other}: {{{}}}", render(row))?;
                    }
                }
                for (row, n) in condensed {
                    if !flat.contains_key(row) {
                        writeln!(f, "  flat 0 x condensed {n}: {{{}}}", render(row))?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Evaluates `algebra` with the flat engine and its translation with the condensed engine,
/// then compares the expanded results.
pub fn compare_engines(
    flat: &FlatDataset,
    condensed: &CondensedDataset,
    algebra: &Algebra,
    options: &EvalOptions,
) -> Verdict {
    let translated = match translate(algebra) {
        Ok(t) => t,
        Err(e) => return Verdict::Failed(format!("translation: {e}")),
    };
    let flat_result = eval_flat(flat, algebra).and_then(|s| expanded_multiset(&s, flat.catalog()));
    let condensed_result = eval_condensed_with(condensed, &translated, options)
        .and_then(|s| expanded_multiset(&s, condensed.catalog()));
    match (flat_result, condensed_result) {
        (Ok(f), Ok(c)) if f == c => Verdict::Equivalent,
        (Ok(flat), Ok(condensed)) => Verdict::Different { flat, condensed },
        (Err(e), _) => Verdict::Failed(format!("flat engine: {e}")),
        (_, Err(e)) => Verdict::Failed(format!("condensed engine: {e}")),
    }
}

pub fn check(spec: &DatasetSpec, algebra: &Algebra, options: &EvalOptions) -> Verdict {
    compare_engines(&spec.flat(), &spec.condensed(), algebra, options)
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub iteration: u64,
    pub dataset: DatasetSpec,
    pub algebra: Algebra,
    pub verdict: Verdict,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counterexample at iteration {}", self.iteration)?;
        writeln!(f, "dataset:")?;
        for (label, rows) in &self.dataset.versions {
            for [s, p, o, g] in rows {
                writeln!(f, "  {label}: {s} {p} {o} {g}")?;
            }
        }
        writeln!(f, "query:\n{}", self.algebra.pretty())?;
        write!(f, "verdict: {}", self.verdict)
    }
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub seed: u64,
    pub iterations: u64,
    pub max_depth: usize,
    pub mutation: Option<Mutation>,
    /// Stop as soon as one counterexample is found.
    pub stop_at_first: bool,
    pub threads: usize,
}

impl FuzzConfig {
    pub fn new(seed: u64, iterations: u64) -> Self {
        FuzzConfig {
            seed,
            iterations,
            max_depth: 4,
            mutation: None,
            stop_at_first: false,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub iterations: u64,
    /// Iterations whose random tree could not be typed and were not evaluated.
    pub skipped: u64,
    pub failures: Vec<Counterexample>,
}

/// The dataset and tree of one fuzz iteration; `None` if no typeable tree was drawn.
pub fn fuzz_instance(seed: u64, iteration: u64, max_depth: usize) -> Option<(DatasetSpec, Algebra)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    let spec = random_dataset(&mut rng);
    let flat = spec.flat();
    let mut generator = TreeGenerator::new(&mut rng, Some(flat.catalog()));
    (0..20)
        .map(|_| generator.tree(max_depth))
        .find(|a| translate(a).is_ok())
        .map(|a| (spec, a))
}

pub fn fuzz(config: &FuzzConfig) -> FuzzReport {
    let stop = AtomicBool::new(false);
    let skipped = Mutex::new(0u64);
    let failures = Mutex::new(Vec::new());
    let options = EvalOptions {
        mutation: config.mutation,
    };
    let threads = config.threads.max(1) as u64;
    std::thread::scope(|scope| {
        for t in 0..threads {
            let (stop, skipped, failures) = (&stop, &skipped, &failures);
            scope.spawn(move || {
                let mut i = t;
                while i < config.iterations && !stop.load(Ordering::Relaxed) {
                    match fuzz_instance(config.seed, i, config.max_depth) {
                        None => *skipped.lock().expect("no poisoning") += 1,
                        Some((dataset, algebra)) => {
                            let verdict = check(&dataset, &algebra, &options);
                            if !verdict.is_equivalent() {
                                failures.lock().expect("no poisoning").push(Counterexample {
                                    iteration: i,
                                    dataset,
                                    algebra,
                                    verdict,
                                });
                                if config.stop_at_first {
                                    stop.store(true, Ordering::Relaxed);
                                }
                            }
                        }
                    }
                    i += threads;
                }
            });
        }
    });
    let mut failures = failures.into_inner().expect("no poisoning");
    failures.sort_by_key(|c| c.iteration);
    if config.stop_at_first {
        failures.truncate(1);
    }
    let failures = failures
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k < 3 { shrink(c, &options) } else { c })
        .collect();
    FuzzReport {
        iterations: config.iterations,
        skipped: skipped.into_inner().expect("no poisoning"),
        failures,
    }
}

/// Removes rows, then versions, then operators while the instance keeps failing.
pub fn shrink(mut c: Counterexample, options: &EvalOptions) -> Counterexample {
    let still_fails = |spec: &DatasetSpec, algebra: &Algebra| -> Option<Verdict> {
        translate(algebra).ok()?;
        let v = check(spec, algebra, options);
        (!v.is_equivalent()).then_some(v)
    };
    loop {
        let mut progressed = false;
        for vi in 0..c.dataset.versions.len() {
            let mut ri = 0;
            while ri < c.dataset.versions[vi].1.len() {
                let mut candidate = c.dataset.clone();
                candidate.versions[vi].1.remove(ri);
                if let Some(v) = still_fails(&candidate, &c.algebra) {
                    c.dataset = candidate;
                    c.verdict = v;
                    progressed = true;
                } else {
                    ri += 1;
                }
            }
        }
        let mut vi = 0;
        while vi < c.dataset.versions.len() && c.dataset.versions.len() > 1 {
            let mut candidate = c.dataset.clone();
            candidate.versions.remove(vi);
            if let Some(v) = still_fails(&candidate, &c.algebra) {
                c.dataset = candidate;
                c.verdict = v;
                progressed = true;
            } else {
                vi += 1;
            }
        }
        for candidate in smaller_trees(&c.algebra) {
            if let Some(v) = still_fails(&c.dataset, &candidate) {
                c.algebra = candidate;
                c.verdict = v;
                progressed = true;
                break;
            }
        }
        if !progressed {
            return c;
        }
    }
}

/// Inputs of an operator, seen through aggregation group nodes.
fn inputs(a: &Algebra) -> Vec<&Algebra> {
    match a {
        Algebra::Aggregation(agg) => agg.group_parts().map(|(_, i)| vec![i]).unwrap_or_default(),
        Algebra::AggregateJoin(aggs) => aggs
            .first()
            .and_then(|agg| agg.group_parts().ok())
            .map(|(_, i)| vec![i])
            .unwrap_or_default(),
        other => other.children(),
    }
}

fn with_input(a: &Algebra, index: usize, new: Algebra) -> Algebra {
    let replace_group = |agg: &Aggregation| -> Aggregation {
        let mut agg = agg.clone();
        if let Algebra::Group { input, .. } = agg.group.as_mut() {
            **input = new.clone();
        }
        agg
    };
    let mut out = a.clone();
    match &mut out {
        Algebra::Join(l, r) | Algebra::Union(l, r) => **(if index == 0 { l } else { r }) = new,
        Algebra::Diff { left, right, .. } | Algebra::LeftJoin { left, right, .. } => {
            **(if index == 0 { left } else { right }) = new
        }
        Algebra::Filter { input, .. }
        | Algebra::Projection { input, .. }
        | Algebra::Group { input, .. }
        | Algebra::Transform { input, .. } => **input = new,
        Algebra::Aggregation(agg) => *agg = replace_group(agg),
        Algebra::AggregateJoin(aggs) => {
            for agg in aggs.iter_mut() {
                *agg = replace_group(agg);
            }
        }
        _ => {}
    }
    out
}

/// Trees with one operator replaced by one of its inputs, or an aggregate join reduced
/// to one aggregation; smallest first.
pub fn smaller_trees(a: &Algebra) -> Vec<Algebra> {
    let mut out: Vec<Algebra> = inputs(a).into_iter().cloned().collect();
    if let Algebra::AggregateJoin(aggs) = a {
        out.extend(aggs.iter().map(|agg| Algebra::Aggregation(agg.clone())));
    }
    for (i, child) in inputs(a).into_iter().enumerate() {
        for smaller in smaller_trees(child) {
            out.push(with_input(a, i, smaller));
        }
    }
    out.sort_by_key(Algebra::node_count);
    out
}
