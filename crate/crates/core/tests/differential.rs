use verso::eval::{EvalOptions, Mutation};
use verso::harness::fixture::{example_condensed, example_flat};
use verso::harness::{compare_engines, fuzz, synthetic_dataset, FuzzConfig, CORPUS};
use verso::query::prepare;

#[test]
fn corpus_is_equivalent_on_the_example() {
    let (flat, condensed) = (example_flat(), example_condensed());
    for q in &CORPUS {
        let a = prepare(q.text).unwrap();
        let v = compare_engines(&flat, &condensed, &a, &EvalOptions::default());
        assert!(v.is_equivalent(), "{}: {v}", q.name);
    }
}

#[test]
fn corpus_is_equivalent_on_synthetic_archives() {
    for (versions, steps) in [(3, 0), (4, 2)] {
        let spec = synthetic_dataset(versions, steps, 2, 3);
        let (flat, condensed) = (spec.flat(), spec.condensed());
        for q in &CORPUS {
            let a = prepare(q.text).unwrap();
            let v = compare_engines(&flat, &condensed, &a, &EvalOptions::default());
            assert!(v.is_equivalent(), "{} on {versions}x{steps}: {v}", q.name);
        }
    }
}

#[test]
fn fuzz_seed_42_finds_no_counterexample() {
    let report = fuzz(&FuzzConfig::new(42, 500));
    if let Some(c) = report.failures.first() {
        panic!("{} failures; first:\n{c}", report.failures.len());
    }
    assert!(report.skipped < 50, "too many untypeable trees: {}", report.skipped);
}

#[test]
fn every_mutation_is_detected() {
    for mutation in Mutation::ALL {
        let mut config = FuzzConfig::new(42, 500);
        config.mutation = Some(mutation);
        config.stop_at_first = true;
        let report = fuzz(&config);
        assert!(!report.failures.is_empty(), "{} went unnoticed", mutation.name());
    }
}
