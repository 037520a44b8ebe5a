//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use verso::algebra::{
    execution_env, optimal_env, transform_env, translate, Algebra, Environment, Representation, Var,
};
use verso::eval::{
    eval_condensed, eval_flat, expanded_multiset, transform_sequence, Binding, EvalOptions,
    SolutionSequence,
};
use verso::harness::bench::storage_row;
use verso::harness::fixture::{
    example_condensed, example_flat, EXAMPLE_ROWS, FILTER_QUERY, NAMED_GRAPH_QUERY, VERSION_QUERY,
};
use verso::harness::fuzz::fuzz_instance;
use verso::harness::{compare_engines, fuzz, random_dataset, synthetic_dataset, FuzzConfig, CORPUS};
use verso::model::{condense, flatten, Catalog, Term, VersionId, VersionSet};
use verso::query::prepare;

type Outcome = Result<String, String>;
type Row = (&'static str, &'static str, &'static str, &'static str);
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Sorted rows of `vars` after expansion, one entry per solution.
fn rows(seq: &[verso::eval::SolutionMapping], vars: &[&str], catalog: &Catalog) -> Result<Vec<Vec<String>>, String> {
    let mut out = Vec::new();
    for (m, n) in expanded_multiset(seq, catalog).map_err(err)? {
        let row: Vec<String> = vars
            .iter()
            .map(|v| {
                m.iter()
                    .find(|(var, _)| var.name() == *v)
                    .map(|(_, t)| t.lexical().to_owned())
                    .unwrap_or_default()
            })
            .collect();
        for _ in 0..n {
            out.push(row.clone());
        }
    }
    out.sort();
    Ok(out)
}

/// Runs `query` under both engines and returns the shared sorted rows.
fn both_engines(query: &str, vars: &[&str]) -> Result<Vec<Vec<String>>, String> {
    let (flat, condensed) = (example_flat(), example_condensed());
    let algebra = prepare(query).map_err(err)?;
    let f = eval_flat(&flat, &algebra).map_err(err)?;
    let c = eval_condensed(&condensed, &translate(&algebra).map_err(err)?).map_err(err)?;
    let fr = rows(&f, vars, flat.catalog())?;
    let cr = rows(&c, vars, condensed.catalog())?;
    ensure(fr == cr, || format!("flat {fr:?} vs condensed {cr:?}"))?;
    Ok(fr)
}

fn sorted(mut v: Vec<Vec<String>>) -> Vec<Vec<String>> {
    v.sort();
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (flat, condensed) = (example_flat(), example_condensed());
    ensure(flatten(&condensed) == flat, || "flatten(example) differs".into())?;
    ensure(condense(&flat) == condensed, || "condense(example) differs".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let spec = random_dataset(&mut rng);
        let (f, c) = (spec.flat(), spec.condensed());
        ensure(flatten(&c) == f, || format!("dataset {i}: flatten(condense(d)) != d"))?;
        ensure(condense(&f) == c, || format!("dataset {i}: condense(flatten(d)) != d"))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 10.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!("example + 1000 random datasets in {elapsed:.2}s"))
}

fn criterion_2() -> Outcome {
    let condensed = example_condensed();
    let catalog = condensed.catalog();
    let label = |v: VersionId| catalog.versions.label(v).unwrap_or("?").to_owned();
    let got: BTreeSet<(String, String, String, Vec<String>)> = condensed
        .entries()
        .iter()
        .map(|(q, set)| {
            (
                catalog.term(q.s).lexical().to_owned(),
                catalog.term(q.o).lexical().to_owned(),
                catalog.term(q.g).lexical().to_owned(),
                set.iter().map(label).collect(),
            )
        })
        .collect();
    // Oracle: group the flat rows by quad.
    let mut oracle: BTreeMap<(String, String, String), Vec<String>> = BTreeMap::new();
    for (s, o, g, v) in EXAMPLE_ROWS {
        oracle.entry((s.into(), o.into(), g.into())).or_default().push(v.into());
    }
    let expected: BTreeSet<_> = oracle.into_iter().map(|((s, o, g), v)| (s, o, g, v)).collect();
    ensure(got == expected, || format!("entries {got:?}"))?;
    ensure(got.len() == 5, || format!("{} entries", got.len()))?;
    let key = ("ex:bldg#1".into(), "10.5".into(), "ng:Gr-Lyon".into(), vec!["v:1".into(), "v:2".into()]);
    ensure(got.contains(&key), || "missing (ex:bldg#1, 10.5, ng:Gr-Lyon) -> {v:1, v:2}".into())?;
    Ok("5 entries; (ex:bldg#1, height, 10.5, ng:Gr-Lyon) -> {v:1, v:2}".into())
}

fn criterion_3() -> Outcome {
    let heights = |pred: &dyn Fn(&Row) -> bool| {
        sorted(EXAMPLE_ROWS.iter().filter(|r| pred(r)).map(|r| vec![r.1.to_owned()]).collect())
    };

    let named = both_engines(NAMED_GRAPH_QUERY, &["height"])?;
    let named_oracle = heights(&|r| r.2 == "ng:Gr-Lyon");
    ensure(named == named_oracle, || format!("named graph: {named:?}"))?;
    let published = sorted(["10.5", "9.1", "10.5", "15"].map(|h| vec![h.to_owned()]).to_vec());
    ensure(named == published, || format!("named graph: {named:?}"))?;

    // Every graph of v:1 contributes, including ng:IGN's 11.
    let version = both_engines(VERSION_QUERY, &["height"])?;
    let version_oracle = heights(&|r| r.3 == "v:1");
    ensure(version == version_oracle, || format!("version: {version:?}"))?;
    let lyon_v1 = both_engines(
        "SELECT ?height WHERE { GRAPH ?vng { ?s ex:height ?height } \
         ?vng v:in-version v:1 . ?vng v:is-version-of ng:Gr-Lyon . }",
        &["height"],
    )?;
    let lyon_v1_expected = sorted(vec![vec!["10.5".into()], vec!["9.1".into()]]);
    ensure(lyon_v1 == lyon_v1_expected, || format!("version restricted to ng:Gr-Lyon: {lyon_v1:?}"))?;

    let agg = both_engines(FILTER_QUERY, &["height", "concatbuilding"])?;
    let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (s, o, _, _) in EXAMPLE_ROWS {
        if o.parse::<f64>().unwrap() > 10.0 {
            groups.entry(o).or_default().push(format!("B.{s}"));
        }
    }
    let agg_oracle = sorted(
        groups
            .into_iter()
            .map(|(h, mut bs)| {
                bs.sort();
                vec![h.to_owned(), bs.join(",")]
            })
            .collect(),
    );
    ensure(agg == agg_oracle, || format!("aggregate join: {agg:?}"))?;
    let published = sorted(vec![
        vec!["10.5".into(), "B.ex:bldg#1,B.ex:bldg#1,B.ex:bldg#1".into()],
        vec!["11".into(), "B.ex:bldg#1".into()],
        vec!["15".into(), "B.ex:bldg#3".into()],
    ]);
    ensure(agg == published, || format!("aggregate join: {agg:?}"))?;
    Ok(format!(
        "named graph {named:?}; version v:1 {version:?} (ng:Gr-Lyon only: {lyon_v1:?}); aggregate join {agg:?}"
    ))
}

/// Input of the first `Group` node.
fn group_input(a: &Algebra) -> Option<&Algebra> {
    if let Algebra::Group { input, .. } = a {
        return Some(input);
    }
    a.children().into_iter().find_map(group_input)
}

fn criterion_4() -> Outcome {
    let (flat, condensed) = (example_flat(), example_condensed());
    let algebra = prepare(FILTER_QUERY).map_err(err)?;
    let input = group_input(&algebra).ok_or("no group")?;
    let omega = eval_flat(&flat, input).map_err(err)?;
    let mut table5: Vec<(String, String, String)> = Vec::new();
    for m in &omega {
        let get = |v: &str| match m.get(&Var::new(v)) {
            Some(Binding::Value(t)) => t.lexical().to_owned(),
            other => format!("{other:?}"),
        };
        for _ in 0..m.multiplicity() {
            table5.push((get("b"), get("height"), get("vng")));
        }
    }
    table5.sort();
    // vi:1..vi:4 are (v:1, Lyon), (v:1, IGN), (v:2, Lyon), (v:2, IGN).
    let vi = |v: &str, g: &str| match (v, g) {
        ("v:1", "ng:Gr-Lyon") => "vi:1",
        ("v:1", "ng:IGN") => "vi:2",
        ("v:2", "ng:Gr-Lyon") => "vi:3",
        _ => "vi:4",
    };
    let mut oracle5: Vec<(String, String, String)> = EXAMPLE_ROWS
        .iter()
        .filter(|r| r.1.parse::<f64>().unwrap() > 10.0)
        .map(|(s, o, g, v)| (s.to_string(), o.to_string(), vi(v, g).to_owned()))
        .collect();
    oracle5.sort();
    ensure(table5 == oracle5 && table5.len() == 5, || format!("flat Ω {table5:?}"))?;

    let translated = translate(&algebra).map_err(err)?;
    let input = group_input(&translated).ok_or("no group")?;
    let omega = eval_condensed(&condensed, input).map_err(err)?;
    let catalog_c = condensed.catalog();
    let term_id = |t: &str| {
        catalog_c
            .dictionary
            .lookup(&Term::iri(t))
            .or_else(|| catalog_c.dictionary.lookup(&Term::literal(t)))
            .map(|id| id.get())
    };
    let mut table6 = Vec::new();
    for m in &omega {
        let id = |v: &str| match m.get(&Var::new(v)) {
            Some(Binding::Id(id)) => Some(id.get()),
            Some(Binding::Value(t)) => term_id(t.lexical()),
            _ => None,
        };
        let graph = match m.get(&Var::new("vng")) {
            Some(Binding::Graph(g, set)) => Some((g.get(), set.iter().map(|v| v.ordinal()).collect::<Vec<_>>())),
            _ => None,
        };
        table6.push((graph, id("b"), id("height"), m.multiplicity()));
    }
    table6.sort();
    let mut expected6 = vec![
        (Some((6, vec![1, 2])), Some(1), Some(2), 1),
        (Some((7, vec![2])), Some(1), Some(2), 1),
        (Some((7, vec![1])), Some(1), Some(3), 1),
        (Some((6, vec![2])), Some(4), Some(5), 1),
    ];
    expected6.sort();
    ensure(table6 == expected6, || format!("condensed Ω {table6:?}"))?;
    Ok("flat Ω has 5 rows; condensed Ω is (6,{v1,v2},1,2) (7,{v2},1,2) (7,{v1},1,3) (6,{v2},4,5)".into())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let options = EvalOptions::default();
    let mut stores = vec![("example".to_owned(), example_flat(), example_condensed())];
    for (v, s) in [(3, 0), (5, 2)] {
        let spec = synthetic_dataset(v, s, 2, 3);
        stores.push((format!("synthetic {v}x{s}"), spec.flat(), spec.condensed()));
    }
    for (name, flat, condensed) in &stores {
        for q in &CORPUS {
            let algebra = prepare(q.text).map_err(err)?;
            let verdict = compare_engines(flat, condensed, &algebra, &options);
            ensure(verdict.is_equivalent(), || format!("{} on {name}: {verdict}", q.name))?;
        }
    }
    let mut fuzzed = 0;
    for seed in [42, 7] {
        let report = fuzz(&FuzzConfig::new(seed, 500));
        if let Some(c) = report.failures.first() {
            return Err(format!("seed {seed}: {} counterexamples, first:\n{c}", report.failures.len()));
        }
        fuzzed += report.iterations - report.skipped;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 120.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!(
        "{} corpus queries x {} stores, {fuzzed} fuzzed instances over 2 seeds, 0 counterexamples in {elapsed:.1}s",
        CORPUS.len(),
        stores.len()
    ))
}

fn criterion_6() -> Outcome {
    use Representation::*;
    let named = optimal_env(&prepare(NAMED_GRAPH_QUERY).map_err(err)?).map_err(err)?;
    let expected: Environment = [("s", Iota), ("height", Iota), ("vng", Zeta)]
        .into_iter()
        .map(|(v, r)| (Var::new(v), r))
        .collect();
    ensure(named == expected, || format!("named graph env {named}"))?;
    let filter = optimal_env(&prepare(FILTER_QUERY).map_err(err)?).map_err(err)?;
    for (v, r) in [("height", Nu), ("b", Nu), ("vng", Zeta)] {
        ensure(filter.get(&Var::new(v)) == Some(r), || format!("filter env {filter}"))?;
    }
    Ok(format!("named graph {named}; filter {filter}"))
}

fn criterion_7() -> Outcome {
    let set = |vs: &[u32]| vs.iter().map(|&v| VersionId(v)).collect::<VersionSet>();
    let got = set(&[1, 5]).intersection(&set(&[1, 10]));
    ensure(got == set(&[1]), || format!("intersect gave {got:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..10_000 {
        let width = rng.gen_range(1..=200u32);
        let a: BTreeSet<u32> = (0..rng.gen_range(0..40)).map(|_| rng.gen_range(1..=width)).collect();
        let b: BTreeSet<u32> = (0..rng.gen_range(0..40)).map(|_| rng.gen_range(1..=width)).collect();
        let (sa, sb) = (set(&a.iter().copied().collect::<Vec<_>>()), set(&b.iter().copied().collect::<Vec<_>>()));
        let members = |s: &VersionSet| s.iter().map(|v| v.0).collect::<BTreeSet<u32>>();
        let checks = [
            members(&sa.intersection(&sb)) == a.intersection(&b).copied().collect(),
            members(&sa.union(&sb)) == a.union(&b).copied().collect(),
            members(&sa.difference(&sb)) == a.difference(&b).copied().collect(),
            sa.len() == a.len(),
            sa.is_subset(&sb) == a.is_subset(&b),
            sa.intersects(&sb) == !a.is_disjoint(&b),
        ];
        ensure(checks.iter().all(|c| *c), || format!("trial {trial}: {a:?} vs {b:?} -> {checks:?}"))?;
    }
    Ok("{v:1,v:5} ∩ {v:1,v:10} = {v:1}; 10000 random trials agree with the set oracle".into())
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    for versions in [5, 20, 50] {
        let mut previous: Option<f64> = None;
        for steps in [0, 5, 10] {
            let flat = synthetic_dataset(versions, steps, 4, 8).flat();
            let row = storage_row(&flat, versions, steps);
            ensure(row.condensed_entries <= row.flat_rows, || {
                format!("{versions}x{steps}: {} entries > {} rows", row.condensed_entries, row.flat_rows)
            })?;
            let ratio = row.condensed_entries as f64 / row.flat_rows as f64;
            if versions >= 20 {
                if let Some(p) = previous {
                    ensure(ratio < p, || format!("{versions}x{steps}: ratio {ratio:.4} not below {p:.4}"))?;
                }
            }
            previous = Some(ratio);
            lines.push(format!("{versions}x{steps}={ratio:.3}"));
        }
    }
    Ok(format!("entries/rows {}", lines.join(" ")))
}

/// Raises each variable of `env` by a random number of steps.
fn promote(env: &Environment, rng: &mut impl Rng) -> Environment {
    env.iter()
        .map(|(v, mut r)| {
            for _ in 0..rng.gen_range(0..4) {
                r = r.step_up().unwrap_or(r);
            }
            (v.clone(), r)
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut done, mut iteration, mut raised) = (0, 0u64, 0);
    while done < 200 {
        iteration += 1;
        ensure(iteration < 2000, || format!("only {done} typeable instances"))?;
        let Some((spec, flat_tree)) = fuzz_instance(9, iteration, 3) else { continue };
        let condensed = spec.condensed();
        let catalog = condensed.catalog();
        let tree = translate(&flat_tree).map_err(err)?;
        let env = execution_env(&tree).map_err(err)?.restrict(&tree.output_vars());
        let promoted = promote(&env, &mut rng);
        if promoted != env {
            raised += 1;
        }
        let before: SolutionSequence = eval_condensed(&condensed, &tree).map_err(err)?;
        let after_seq = transform_sequence(&env, &promoted, before.clone(), catalog).map_err(err)?;
        let after_tree = eval_condensed(&condensed, &transform_env(&env, &promoted, tree.clone()).map_err(err)?)
            .map_err(err)?;
        let reference = expanded_multiset(&before, catalog).map_err(err)?;
        ensure(expanded_multiset(&after_seq, catalog).map_err(err)? == reference, || {
            format!("instance {iteration}: sequence ⇓ changed the expansion\n{}", tree)
        })?;
        ensure(expanded_multiset(&after_tree, catalog).map_err(err)? == reference, || {
            format!("instance {iteration}: tree ⇓ changed the expansion\n{}", tree)
        })?;
        done += 1;
    }
    Ok(format!("200 triples ({raised} with a strict promotion), expansions unchanged"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("round trip flatten/condense", criterion_1),
        ("example condenses to the 5 published entries", criterion_2),
        ("worked query results under both engines", criterion_3),
        ("pre-group intermediate states", criterion_4),
        ("flat and condensed evaluation are equivalent", criterion_5),
        ("optimal environments of the worked queries", criterion_6),
        ("version set bitstrings", criterion_7),
        ("storage trend on the synthetic grid", criterion_8),
        ("canonical representation under promotion", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
