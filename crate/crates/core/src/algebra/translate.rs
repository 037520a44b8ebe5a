//! Flat-to-condensed translation and environment transformation of trees.

use super::typing::execution_env;
use super::{Aggregation, Algebra, AlgebraError, Environment, Expression, Var};

/// Wraps `input` in elementary `Transform` nodes raising every variable of `vars` from its
/// representation in `from` to its representation in `to`.
pub fn transform_tree<'a>(
    from: &Environment,
    to: &Environment,
    vars: impl IntoIterator<Item = &'a Var>,
    input: Algebra,
) -> Result<Algebra, AlgebraError> {
    let mut out = input;
    for var in vars {
        let (Some(mut r), Some(target)) = (from.get(var), to.get(var)) else {
            continue;
        };
        if r > target {
            return Err(AlgebraError::IllegalPromotion {
                var: var.clone(),
                from: r,
                to: target,
            });
        }
        while r < target {
            let next = r.step_up().expect("below the top representation");
            out = Algebra::transform(var.clone(), r, next, out);
            r = next;
        }
    }
    Ok(out)
}

/// `⇓(Γ, Γ')` applied to a whole tree: raises every output variable of `input` whose
/// representation differs between the two environments.
pub fn transform_env(
    from: &Environment,
    to: &Environment,
    input: Algebra,
) -> Result<Algebra, AlgebraError> {
    let vars = input.output_vars();
    transform_tree(from, to, &vars, input)
}

/// Translates a flat tree into the condensed algebra.
///
/// Each child is translated recursively and then raised from its own execution
/// environment to its parent's on the variables it produces; aggregations raise their
/// grouped input to the environment of the whole aggregate and gain a trailing `Card`.
pub fn translate(algebra: &Algebra) -> Result<Algebra, AlgebraError> {
    algebra.validate()?;
    let mut has_transform = false;
    algebra.walk(&mut |n| has_transform |= matches!(n, Algebra::Transform { .. }));
    if has_transform || algebra.expressions().iter().any(|e| e.contains_card()) {
        return Err(AlgebraError::Malformed(
            "translate expects a flat tree without transforms".into(),
        ));
    }
    execution_env(algebra)?;
    tr(algebra)
}

fn lift(child: &Algebra, target: &Environment) -> Result<Algebra, AlgebraError> {
    let translated = tr(child)?;
    transform_env(&execution_env(child)?, target, translated)
}

fn tr(algebra: &Algebra) -> Result<Algebra, AlgebraError> {
    Ok(match algebra {
        Algebra::QuadPattern { .. }
        | Algebra::ViRestrict { .. }
        | Algebra::GraphRestrict { .. }
        | Algebra::VersionRestrict { .. } => algebra.clone(),
        Algebra::Join(l, r) => {
            let env = execution_env(algebra)?;
            Algebra::join(lift(l, &env)?, lift(r, &env)?)
        }
        Algebra::Union(l, r) => {
            let env = execution_env(algebra)?;
            Algebra::union(lift(l, &env)?, lift(r, &env)?)
        }
        Algebra::Diff {
            left,
            right,
            condition,
        } => {
            let env = execution_env(algebra)?;
            Algebra::diff(lift(left, &env)?, lift(right, &env)?, condition.clone())
        }
        Algebra::LeftJoin {
            left,
            right,
            condition,
        } => {
            let env = execution_env(algebra)?;
            Algebra::left_join(lift(left, &env)?, lift(right, &env)?, condition.clone())
        }
        Algebra::Filter { conditions, input } => {
            let env = execution_env(algebra)?;
            Algebra::filter(conditions.clone(), lift(input, &env)?)
        }
        Algebra::Projection { input, vars } => {
            let env = execution_env(algebra)?;
            Algebra::project(lift(input, &env)?, vars.clone())
        }
        Algebra::Group { keys, input } => {
            let env = execution_env(algebra)?;
            Algebra::group(keys.clone(), lift(input, &env)?)
        }
        Algebra::Aggregation(a) => {
            let env = execution_env(algebra)?;
            Algebra::Aggregation(tr_aggregation(a, &env)?)
        }
        Algebra::AggregateJoin(aggs) => {
            let env = execution_env(algebra)?;
            Algebra::AggregateJoin(
                aggs.iter()
                    .map(|a| tr_aggregation(a, &env))
                    .collect::<Result<_, _>>()?,
            )
        }
        Algebra::Transform { .. } => {
            return Err(AlgebraError::Malformed(
                "translate expects a flat tree without transforms".into(),
            ))
        }
    })
}

fn tr_aggregation(a: &Aggregation, env: &Environment) -> Result<Aggregation, AlgebraError> {
    let (keys, input) = a.group_parts()?;
    let mut exprs = a.arguments().to_vec();
    exprs.push(Expression::Card);
    Ok(Aggregation {
        exprs,
        params: a.params.clone(),
        group: Box::new(Algebra::group(keys.to_vec(), lift(input, env)?)),
        target: a.target.clone(),
    })
}

/// Every `Transform` raises by exactly one step of the chain.
pub fn transforms_are_elementary(algebra: &Algebra) -> bool {
    let mut ok = true;
    algebra.walk(&mut |n| {
        if let Algebra::Transform { from, to, .. } = n {
            ok &= from.step_up() == Some(*to);
        }
    });
    ok
}

