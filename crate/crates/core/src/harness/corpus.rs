//! Reference query corpus exercising every operator of the algebra.

use super::fixture::{FILTER_QUERY, NAMED_GRAPH_QUERY, VERSIONED_GRAPH_QUERY, VERSION_QUERY};

pub struct CorpusQuery {
    pub name: &'static str,
    pub text: &'static str,
}

pub const CORPUS: [CorpusQuery; 17] = [
    CorpusQuery {
        name: "named-graph",
        text: NAMED_GRAPH_QUERY,
    },
    CorpusQuery {
        name: "version",
        text: VERSION_QUERY,
    },
    CorpusQuery {
        name: "versioned-graph",
        text: VERSIONED_GRAPH_QUERY,
    },
    CorpusQuery {
        name: "concat-by-height",
        text: FILTER_QUERY,
    },
    CorpusQuery {
        name: "all-quads",
        text: "SELECT * WHERE { GRAPH ?g { ?s ?p ?o } }",
    },
    CorpusQuery {
        name: "cross-graph-join",
        text: "SELECT ?s ?h1 ?h2 WHERE {
            GRAPH ?g1 { ?s ex:height ?h1 }
            GRAPH ?g2 { ?s ex:height ?h2 }
        }",
    },
    CorpusQuery {
        name: "same-graph-join",
        text: "SELECT ?s ?h ?n WHERE { GRAPH ?g { ?s ex:height ?h . ?s ex:name ?n } }",
    },
    CorpusQuery {
        name: "union",
        text: "SELECT ?s ?v WHERE {
            { GRAPH ?g { ?s ex:height ?v } } UNION { GRAPH ?g { ?s ex:floors ?v } }
        }",
    },
    CorpusQuery {
        name: "range-filter",
        text: "SELECT ?s ?h WHERE { GRAPH ?g { ?s ex:height ?h } FILTER(?h >= 11 && ?h < 20) }",
    },
    CorpusQuery {
        name: "minus",
        text: "SELECT ?s ?h WHERE {
            GRAPH ?g { ?s ex:height ?h }
            MINUS { GRAPH ?g { ?s ex:height 11 } }
        }",
    },
    CorpusQuery {
        name: "optional",
        text: "SELECT ?s ?h ?f WHERE {
            GRAPH ?g { ?s ex:height ?h OPTIONAL { ?s ex:floors ?f FILTER(?f > 2) } }
        }",
    },
    CorpusQuery {
        name: "project-subjects",
        text: "SELECT ?s WHERE { GRAPH ?g { ?s ex:height ?h } }",
    },
    CorpusQuery {
        name: "distinct-heights",
        text: "SELECT ?h WHERE { GRAPH ?g { ?s ex:height ?h } } GROUP BY ?h",
    },
    CorpusQuery {
        name: "count-per-subject",
        text: "SELECT ?s (COUNT(*) AS ?n) WHERE { GRAPH ?g { ?s ex:height ?h } } GROUP BY ?s",
    },
    CorpusQuery {
        name: "sum-avg-per-subject",
        text: "SELECT ?s (SUM(?h) AS ?total) (AVG(?h) AS ?mean) WHERE {
            GRAPH ?g { ?s ex:height ?h }
        } GROUP BY ?s",
    },
    CorpusQuery {
        name: "min-max-per-graph",
        text: "SELECT ?g (MIN(?h) AS ?low) (MAX(?h) AS ?high) WHERE {
            GRAPH ?g { ?s ex:height ?h }
        } GROUP BY ?g",
    },
    CorpusQuery {
        name: "count-in-version",
        text: "SELECT ?g (COUNT(?s) AS ?n) WHERE {
            GRAPH ?g { ?s ex:height ?h }
            ?g v:in-version v:2 .
        } GROUP BY ?g",
    },
];
