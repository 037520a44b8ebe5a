//! Weighted aggregate functions. The flat engine weights each mapping by its
//! multiplicity; the condensed engine by multiplicity times card.

use num::{BigInt, BigRational, Zero};

use crate::algebra::{AggregateFunction, AggregationParams};
use crate::model::{Catalog, Term};

use super::value::compare_terms;
use super::Value;

/// One aggregated row: the evaluated arguments and how many flat solutions it stands for.
pub struct WeightedRow {
    pub args: Vec<Value>,
    pub weight: u64,
}

/// Folds weighted rows. Null arguments are skipped; errors make `SUM`, `AVG` and
/// `GROUP_CONCAT` fail and are skipped by `COUNT`, `MIN` and `MAX`. `GROUP_CONCAT` sorts
/// its operands lexically.
pub fn aggregate(params: &AggregationParams, rows: &[WeightedRow], catalog: &Catalog) -> Value {
    let function = params.function();
    if function == AggregateFunction::Count {
        let total: u64 = rows
            .iter()
            .filter(|r| match r.args.first() {
                None => true,
                Some(v) => !v.is_null() && !v.is_error(),
            })
            .map(|r| r.weight)
            .sum();
        return Value::Term(Term::number(&BigRational::from_integer(total.into())));
    }
    let values = rows.iter().filter_map(|r| {
        let v = r.args.first()?;
        (!v.is_null()).then_some((v, r.weight))
    });
    match function {
        AggregateFunction::Sum | AggregateFunction::Avg => {
            let mut sum = BigRational::zero();
            let mut count: u64 = 0;
            for (v, w) in values {
                let Some(x) = v.term(catalog).and_then(|t| t.numeric_value()) else {
                    return Value::Error;
                };
                sum += x * BigRational::from_integer(BigInt::from(w));
                count += w;
            }
            if function == AggregateFunction::Sum {
                Value::Term(Term::number(&sum))
            } else if count == 0 {
                Value::Error
            } else {
                Value::Term(Term::number(&(sum / BigRational::from_integer(count.into()))))
            }
        }
        AggregateFunction::Min | AggregateFunction::Max => {
            let terms = values.filter_map(|(v, _)| v.term(catalog));
            let best = if function == AggregateFunction::Min {
                terms.min_by(compare_terms)
            } else {
                terms.max_by(compare_terms)
            };
            best.map(Value::Term).unwrap_or(Value::Null)
        }
        AggregateFunction::GroupConcat => {
            let mut parts = Vec::new();
            for (v, w) in values {
                let Some(t) = v.term(catalog) else {
                    return Value::Error;
                };
                for _ in 0..w {
                    parts.push(t.lexical().to_owned());
                }
            }
            parts.sort();
            Value::Term(Term::string(parts.join(params.separator().unwrap_or(" "))))
        }
        AggregateFunction::Count => unreachable!("handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DatasetBuilder;

    fn rows(values: &[(&str, u64)]) -> Vec<WeightedRow> {
        values
            .iter()
            .map(|(lex, w)| WeightedRow {
                args: vec![Value::Term(Term::literal(lex))],
                weight: *w,
            })
            .collect()
    }

    fn run(params: AggregationParams, rows: &[WeightedRow]) -> Value {
        let catalog = DatasetBuilder::new().build_flat().catalog().as_ref().clone();
        aggregate(&params, rows, &catalog)
    }

    fn num(lex: &str) -> Value {
        Value::Term(Term::literal(lex))
    }

    #[test]
    fn weights_multiply_every_function() {
        let r = rows(&[("10.5", 2), ("11", 1)]);
        assert_eq!(run(AggregationParams::new(AggregateFunction::Count), &r), num("3"));
        assert_eq!(run(AggregationParams::new(AggregateFunction::Sum), &r), num("32"));
        assert_eq!(
            run(AggregationParams::new(AggregateFunction::Avg), &r),
            num("10.666666666666666666")
        );
        assert_eq!(run(AggregationParams::new(AggregateFunction::Min), &r), num("10.5"));
        assert_eq!(run(AggregationParams::new(AggregateFunction::Max), &r), num("11"));
        assert_eq!(
            run(AggregationParams::group_concat(","), &r),
            Value::Term(Term::string("10.5,10.5,11"))
        );
    }

    #[test]
    fn empty_and_erroneous_inputs() {
        assert_eq!(run(AggregationParams::new(AggregateFunction::Avg), &[]), Value::Error);
        assert_eq!(run(AggregationParams::new(AggregateFunction::Sum), &[]), num("0"));
        assert_eq!(run(AggregationParams::new(AggregateFunction::Min), &[]), Value::Null);
        let bad = rows(&[("x", 1)]);
        assert_eq!(run(AggregationParams::new(AggregateFunction::Sum), &bad), Value::Error);
        let with_null = vec![
            WeightedRow {
                args: vec![Value::Null],
                weight: 4,
            },
            WeightedRow {
                args: vec![num("1")],
                weight: 1,
            },
        ];
        assert_eq!(run(AggregationParams::new(AggregateFunction::Count), &with_null), num("1"));
        assert_eq!(run(AggregationParams::new(AggregateFunction::Avg), &with_null), num("1"));
    }
}
