//! The two-version, two-graph example store with its published id assignment.

use crate::model::{CondensedDataset, DatasetBuilder, FlatDataset, Term, TermDictionary};

pub const HEIGHT: &str = "ex:height";

/// Terms in id order 1..=9: the identifier table of the example.
pub const EXAMPLE_TERMS: [(&str, bool); 9] = [
    ("ex:bldg#1", true),
    ("10.5", false),
    ("11", false),
    ("ex:bldg#3", true),
    ("15", false),
    ("ng:Gr-Lyon", true),
    ("ng:IGN", true),
    ("ex:bldg#2", true),
    (HEIGHT, true),
];

/// `(subject, object, graph, version)` rows of the flat example.
pub const EXAMPLE_ROWS: [(&str, &str, &str, &str); 6] = [
    ("ex:bldg#1", "10.5", "ng:Gr-Lyon", "v:1"),
    ("ex:bldg#2", "9.1", "ng:Gr-Lyon", "v:1"),
    ("ex:bldg#1", "11", "ng:IGN", "v:1"),
    ("ex:bldg#1", "10.5", "ng:IGN", "v:2"),
    ("ex:bldg#1", "10.5", "ng:Gr-Lyon", "v:2"),
    ("ex:bldg#3", "15", "ng:Gr-Lyon", "v:2"),
];

fn term((lexical, iri): (&str, bool)) -> Term {
    if iri {
        Term::iri(lexical)
    } else {
        Term::literal(lexical)
    }
}

fn builder() -> DatasetBuilder {
    let mut dictionary = TermDictionary::new();
    for t in EXAMPLE_TERMS {
        dictionary.intern(term(t));
    }
    let mut b = DatasetBuilder::with_dictionary(dictionary);
    let v1 = b.add_version("v:1").expect("fresh registry");
    let v2 = b.add_version("v:2").expect("fresh registry");
    let lyon = b.intern(Term::iri("ng:Gr-Lyon"));
    let ign = b.intern(Term::iri("ng:IGN"));
    // vi:1..vi:4 in the order of the versioned IRI table.
    for (v, g) in [(v1, lyon), (v1, ign), (v2, lyon), (v2, ign)] {
        b.register_graph(v, g).expect("registered version");
    }
    for (s, o, g, v) in EXAMPLE_ROWS {
        let version = b.version(v).expect("registered version");
        b.insert_terms(
            Term::iri(s),
            Term::iri(HEIGHT),
            Term::literal(o),
            Term::iri(g),
            version,
        )
        .expect("valid example row");
    }
    b
}

pub fn example_flat() -> FlatDataset {
    builder().build_flat()
}

pub fn example_condensed() -> CondensedDataset {
    builder().build_condensed()
}

/// The example as one N-Quads document per version.
pub fn example_nquads() -> Vec<(&'static str, String)> {
    ["v:1", "v:2"]
        .into_iter()
        .map(|label| {
            let text = EXAMPLE_ROWS
                .iter()
                .filter(|r| r.3 == label)
                .map(|(s, o, g, _)| format!("<{s}> <{HEIGHT}> \"{o}\" <{g}> .\n"))
                .collect();
            (label, text)
        })
        .collect()
}

pub const NAMED_GRAPH_QUERY: &str = "SELECT ?height WHERE {
    GRAPH ?vng { ?s ex:height ?height }
    ?vng v:is-version-of ng:Gr-Lyon .
}";

pub const VERSION_QUERY: &str = "SELECT ?height WHERE {
    GRAPH ?vng { ?s ex:height ?height }
    ?vng v:in-version v:1 .
}";

pub const VERSIONED_GRAPH_QUERY: &str = "SELECT ?height WHERE {
    GRAPH <vi:1> { ?s ex:height ?height }
}";

pub const FILTER_QUERY: &str = r#"SELECT ?height (GROUP_CONCAT(CONCAT("B.", ?b); separator=",") AS ?concatbuilding) WHERE {
    GRAPH ?vng { ?b ex:height ?height . }
    FILTER(?height > 10)
} GROUP BY ?height"#;
