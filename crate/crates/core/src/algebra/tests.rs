use super::*;
use Representation::*;

const NAMED_GRAPH: &str = "(project (?height) (join (quad ?s <building:height> ?height ?vng) \
                           (graph-restrict <ng:Gr-Lyon> ?vng)))";

const FILTER: &str = r#"(project (?height ?concatbuilding)
  (aggregate-join
    (aggregate ?concatbuilding group_concat "," ((concat "B." ?b))
      (group (?height)
        (filter ((> ?height 10))
          (quad ?b <ex:height> ?height ?vng))))))"#;

fn env(pairs: &[(&str, Representation)]) -> Environment {
    pairs.iter().map(|(v, r)| (Var::new(v), *r)).collect()
}

/// Every environment over the tree's variables, filtered by `check_typing`, reduced with
/// `lower_env`.
fn enumerated_optimum(algebra: &Algebra) -> Option<Environment> {
    let vars = algebra.all_vars();
    let mut typing = Vec::new();
    for code in 0..4usize.pow(vars.len() as u32) {
        let e: Environment = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), Representation::ALL[(code / 4usize.pow(i as u32)) % 4]))
            .collect();
        if check_typing(&e, algebra).unwrap() {
            typing.push(e);
        }
    }
    lower_env(&typing).ok()
}

#[test]
fn named_graph_query_optimal_env() {
    let tree = parse_algebra(NAMED_GRAPH).unwrap();
    let expected = env(&[("s", Iota), ("height", Iota), ("vng", Zeta)]);
    assert_eq!(optimal_env(&tree).unwrap(), expected);
    assert!(check_typing(&expected, &tree.children()[0].children()[0].clone()).unwrap());
    assert_eq!(enumerated_optimum(&tree), Some(expected));
}

#[test]
fn filter_query_optimal_env() {
    let tree = parse_algebra(FILTER).unwrap();
    let optimal = optimal_env(&tree).unwrap();
    assert_eq!(optimal.get(&Var::new("height")), Some(Nu));
    assert_eq!(optimal.get(&Var::new("b")), Some(Nu));
    assert_eq!(optimal.get(&Var::new("vng")), Some(Zeta));
    assert_eq!(enumerated_optimum(&tree), Some(optimal));
}

#[test]
fn unconstrained_graph_variable_is_psi() {
    let tree = parse_algebra("(quad ?s ?p ?o ?g)").unwrap();
    let expected = env(&[("s", Iota), ("p", Iota), ("o", Iota), ("g", Psi)]);
    assert_eq!(optimal_env(&tree).unwrap(), expected);
    assert_eq!(enumerated_optimum(&tree), Some(expected.clone()));
    assert_eq!(execution_env(&tree).unwrap().get(&Var::new("g")), Some(Zeta));
}

#[test]
fn filter_needs_nu() {
    let tree = parse_algebra("(filter ((> ?x 10)) (quad ?s <p> ?x <g>))").unwrap();
    assert!(check_typing(&env(&[("s", Iota), ("x", Nu)]), &tree).unwrap());
    assert!(!check_typing(&env(&[("s", Iota), ("x", Iota)]), &tree).unwrap());
    assert!(matches!(
        check_typing(&env(&[("x", Nu)]), &tree),
        Err(AlgebraError::UnboundVariable(_))
    ));
}

#[test]
fn equality_accepts_ids() {
    let tree = parse_algebra("(filter ((= ?x ?y)) (join (quad ?s <p> ?x <g>) (quad ?s <q> ?y <g>)))")
        .unwrap();
    let optimal = optimal_env(&tree).unwrap();
    assert_eq!(optimal.get(&Var::new("x")), Some(Iota));
    assert_eq!(optimal.get(&Var::new("y")), Some(Iota));
    // Mixed representations still type: the lattice is monotone.
    assert!(check_typing(&env(&[("s", Iota), ("x", Nu), ("y", Iota)]), &tree).unwrap());
}

#[test]
fn typing_is_monotone() {
    for text in [NAMED_GRAPH, FILTER, "(quad ?s ?p ?o ?g)"] {
        let tree = parse_algebra(text).unwrap();
        let optimal = optimal_env(&tree).unwrap();
        let vars: Vec<Var> = optimal.vars().cloned().collect();
        for code in 0..4usize.pow(vars.len() as u32) {
            let raised: Environment = vars
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let r = Representation::ALL[(code / 4usize.pow(i as u32)) % 4];
                    (v.clone(), repr_max(r, optimal.get(v).unwrap()))
                })
                .collect();
            assert!(check_typing(&raised, &tree).unwrap(), "{raised} for {text}");
        }
        let top: Environment = vars.iter().map(|v| (v.clone(), Nu)).collect();
        assert!(check_typing(&top, &tree).unwrap());
    }
}

#[test]
fn translate_quad_pattern_is_identity() {
    let tree = parse_algebra("(quad ?s <p> ?o ?g)").unwrap();
    assert_eq!(translate(&tree).unwrap(), tree);
}

#[test]
fn translate_filter_query_places_transforms() {
    let tree = parse_algebra(FILTER).unwrap();
    let condensed = translate(&tree).unwrap();
    let expected = parse_algebra(
        r#"(project (?height ?concatbuilding)
  (aggregate-join
    (aggregate ?concatbuilding group_concat "," ((concat "B." ?b) card)
      (group (?height)
        (transform ?b ι ν
          (filter ((> ?height 10))
            (transform ?height ι ν
              (quad ?b <ex:height> ?height ?vng))))))))"#,
    )
    .unwrap();
    assert_eq!(condensed, expected, "\n{}", condensed.pretty());
    assert!(transforms_are_elementary(&condensed));
}

#[test]
fn translate_named_graph_query_needs_no_transform() {
    let tree = parse_algebra(NAMED_GRAPH).unwrap();
    let condensed = translate(&tree).unwrap();
    assert_eq!(condensed.transform_count(), 0);
    assert_eq!(condensed, tree);
}

#[test]
fn transform_tree_composes_single_steps() {
    let input = parse_algebra("(quad ?s <p> ?o ?g)").unwrap();
    let from = env(&[("g", Zeta)]);
    let to = env(&[("g", Nu)]);
    let out = transform_env(&from, &to, input.clone()).unwrap();
    assert_eq!(out.to_string(), "(transform ?g ι ν (transform ?g ζ ι (quad ?s <p> ?o ?g)))");
    assert!(matches!(
        transform_env(&to, &from, input),
        Err(AlgebraError::IllegalPromotion { .. })
    ));
}

#[test]
fn sexpr_round_trips() {
    for text in [NAMED_GRAPH, FILTER] {
        let tree = parse_algebra(text).unwrap();
        assert_eq!(parse_algebra(&tree.to_string()).unwrap(), tree);
        assert_eq!(parse_algebra(&tree.pretty()).unwrap(), tree);
        let condensed = translate(&tree).unwrap();
        assert_eq!(parse_algebra(&condensed.to_string()).unwrap(), condensed);
    }
    assert_eq!(parse_algebra(NAMED_GRAPH).unwrap().to_string(), NAMED_GRAPH.split_whitespace().collect::<Vec<_>>().join(" "));
    let tricky = r#"(left-join (union (vi-restrict <vi:1> ?g) (version-restrict <v:1> ?g))
        (diff (quad ?s <p> "a \"q\"" ?g) (quad ?s <p> -2.5 ?g) "true"^^<http://www.w3.org/2001/XMLSchema#boolean>)
        (|| (<= ?x 3) (! (!= ?s <ex:a>))))"#;
    let tree = parse_algebra(tricky).unwrap();
    assert_eq!(parse_algebra(&tree.to_string()).unwrap(), tree);
}

#[test]
fn sexpr_reports_positions() {
    match parse_algebra("(join (quad ?s ?p ?o ?g))") {
        Err(AlgebraError::Parse { position, .. }) => assert_eq!(position, 0),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_algebra("(quad ?s ?p ?o ?g").is_err());
    assert!(parse_algebra("(frobnicate)").is_err());
    assert!(parse_algebra("(transform ?x ν ι (quad ?s ?p ?o ?g))").is_err());
}
