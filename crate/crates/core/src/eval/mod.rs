//! Evaluation over the flat and condensed models.

mod aggregate;
mod engine;
mod expand;
mod mapping;
mod transform;
mod results;
mod value;

pub use aggregate::{aggregate, WeightedRow};
pub use engine::{
    eval_condensed, eval_condensed_with, eval_flat, group_solutions, EvalOptions, GroupedSolutions,
    Mutation,
};
pub use expand::{equivalent, expand, expand_sequence, expanded_multiset, vals, ExpandedMultiset};
pub use mapping::{compat_cond, compat_flat, merge_cond, merge_flat, Binding, SolutionMapping, SolutionSequence};
pub use transform::{downgrade_mapping, raise_var, transform_sequence, translate_value};
pub use results::{render_results, result_rows, OutputFormat};
pub use value::{compare_terms, ebv, eval_expression, Value};

use thiserror::Error;

use crate::algebra::{AlgebraError, Representation, Var};
use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("translation failed: {0}")]
    Translation(String),
    #[error("{var} expected in bank {expected}, found {}", found.map_or("nothing".to_owned(), |r| r.to_string()))]
    BankMismatch {
        var: Var,
        expected: Representation,
        found: Option<Representation>,
    },
    #[error("illegal promotion of {var} from {from} to {to}")]
    IllegalPromotion {
        var: Var,
        from: Representation,
        to: Representation,
    },
    #[error("unbound variable {0}")]
    UnboundVariable(Var),
    #[error("mappings are not compatible")]
    Incompatible,
    #[error("malformed solution: {0}")]
    Malformed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
