//! Query algebra, variable representations, typing and flat-to-condensed translation.

mod expr;
mod repr;
mod sexpr;
mod translate;
mod tree;
mod typing;

#[cfg(test)]
mod tests;

pub use expr::{AggregateFunction, AggregationParams, Expression, Function, Var};
pub use repr::{lower_env, repr_max, repr_min, Environment, Representation};
pub use sexpr::{parse_algebra, parse_expression, render_term};
pub use translate::{transform_env, transform_tree, transforms_are_elementary, translate};
pub use tree::{Aggregation, Algebra, PatternTerm};
pub use typing::{check_expression, check_typing, execution_env, expression_type, optimal_env};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("lower environment of an empty set")]
    EmptyEnvironmentSet,
    #[error("unbound variable {0}")]
    UnboundVariable(Var),
    #[error("typing error: {0}")]
    Typing(String),
    #[error("cannot lower {var} from {from} to {to}")]
    IllegalPromotion {
        var: Var,
        from: Representation,
        to: Representation,
    },
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error("algebra syntax error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}
