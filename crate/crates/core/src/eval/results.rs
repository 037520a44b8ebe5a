//! Rendering of solution sequences as CSV, JSON or an aligned table.

use crate::algebra::Var;
use crate::model::Catalog;

use super::{expand_sequence, EvalError, SolutionMapping};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Table,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            "table" => Some(OutputFormat::Table),
            _ => None,
        }
    }
}

/// Cells per output row; a mapping of multiplicity n yields n rows. Condensed bindings
/// print as `graph@{v:1,v:2}` unless `expand` flattens them first.
pub fn result_rows(
    seq: &[SolutionMapping],
    vars: &[Var],
    catalog: &Catalog,
    expand: bool,
) -> Result<Vec<Vec<Option<String>>>, EvalError> {
    let expanded;
    let seq = if expand {
        expanded = expand_sequence(seq, catalog)?;
        &expanded[..]
    } else {
        seq
    };
    let mut rows = Vec::new();
    for m in seq {
        let row: Vec<Option<String>> = vars
            .iter()
            .map(|v| m.get(v).map(|b| b.display(catalog)))
            .collect();
        for _ in 0..m.multiplicity() {
            rows.push(row.clone());
        }
    }
    Ok(rows)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn render_results(
    seq: &[SolutionMapping],
    vars: &[Var],
    catalog: &Catalog,
    format: OutputFormat,
    expand: bool,
) -> Result<String, EvalError> {
    let rows = result_rows(seq, vars, catalog, expand)?;
    let names: Vec<&str> = vars.iter().map(Var::name).collect();
    Ok(match format {
        OutputFormat::Csv => {
            let mut out = names.iter().map(|n| csv_field(n)).collect::<Vec<_>>().join(",");
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|c| csv_field(c.as_deref().unwrap_or(""))).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = rows
                .into_iter()
                .map(|row| {
                    names
                        .iter()
                        .zip(row)
                        .filter_map(|(n, c)| c.map(|c| ((*n).to_owned(), serde_json::Value::String(c))))
                        .collect::<serde_json::Map<_, _>>()
                        .into()
                })
                .collect();
            let doc = serde_json::json!({ "vars": names, "rows": rows });
            let mut out = serde_json::to_string_pretty(&doc).expect("plain JSON values");
            out.push('\n');
            out
        }
        OutputFormat::Table => {
            let cells: Vec<Vec<String>> = rows
                .into_iter()
                .map(|r| r.into_iter().map(Option::unwrap_or_default).collect())
                .collect();
            let widths: Vec<usize> = names
                .iter()
                .enumerate()
                .map(|(i, n)| cells.iter().map(|r| r[i].chars().count()).chain([n.len()]).max().unwrap_or(0))
                .collect();
            let line = |row: Vec<String>| -> String {
                let padded: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                format!("| {} |\n", padded.join(" | "))
            };
            let rule: String = format!(
                "|{}|\n",
                widths.iter().map(|w| "-".repeat(w + 2)).collect::<Vec<_>>().join("|")
            );
            let mut out = line(names.iter().map(|n| (*n).to_owned()).collect());
            out.push_str(&rule);
            for row in cells {
                out.push_str(&line(row));
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Binding;
    use crate::model::{DatasetBuilder, Term, VersionSet};

    #[test]
    fn csv_repeats_rows_and_expands_graphs() {
        let mut b = DatasetBuilder::new();
        let v1 = b.add_version("v:1").unwrap();
        let v2 = b.add_version("v:2").unwrap();
        for v in [v1, v2] {
            b.insert_terms(Term::iri("ex:a"), Term::iri("ex:p"), Term::literal("a,b"), Term::iri("ng:G"), v)
                .unwrap();
        }
        let d = b.build_condensed();
        let c = d.catalog();
        let g = c.dictionary.lookup(&Term::iri("ng:G")).unwrap();
        let vars = [Var::new("g"), Var::new("o")];
        let m = SolutionMapping::from_bindings([
            (vars[0].clone(), Binding::Graph(g, [v1, v2].into_iter().collect::<VersionSet>())),
            (vars[1].clone(), Binding::Value(Term::literal("a,b"))),
        ])
        .with_multiplicity(2);
        let seq = [m];
        let out = render_results(&seq, &vars, c, OutputFormat::Csv, false).unwrap();
        assert_eq!(out, "g,o\n\"ng:G@{v:1,v:2}\",\"a,b\"\n\"ng:G@{v:1,v:2}\",\"a,b\"\n");
        let out = render_results(&seq, &vars, c, OutputFormat::Csv, true).unwrap();
        assert_eq!(out.lines().count(), 5);
        assert!(out.contains("vi:2,\"a,b\""));
        let json = render_results(&seq, &vars, c, OutputFormat::Json, false).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
        assert_eq!(doc["rows"][0]["o"], "a,b");
    }
}
