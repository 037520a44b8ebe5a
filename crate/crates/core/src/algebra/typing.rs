//! Typing judgments over the representation lattice and the optimal environment.
//!
//! Rules, all for one environment Γ over the whole tree:
//! - terms and function calls type ν, a variable types exactly Γ(x);
//! - function arguments must type ν, except `=`/`!=` whose sides need any type ≥ ι;
//! - quad-pattern subject/predicate/object variables need ≥ ι, the graph variable any;
//! - variables shared by the two sides of a join, difference or optional need ≥ ζ;
//! - filter, difference and optional conditions must type ν;
//! - bare-variable group keys need ≥ ι and other keys ν; every variable produced by the
//!   grouped input needs ≥ ζ so that its version sets weight the aggregates;
//! - aggregate arguments must type ν, except `COUNT(?x)` which accepts any representation;
//!   aggregate targets are ν;
//! - restricted graph variables need ≥ ζ.
//!
//! Every rule is a lower bound, so the environments typing a tree are upward closed and
//! the optimal one is the pointwise maximum of the bounds.

use super::{
    AggregateFunction, Aggregation, Algebra, AlgebraError, Environment, Expression,
    PatternTerm, Representation, Var,
};

use Representation::{Iota, Nu, Psi, Zeta};

/// The representation `expr` derives under `env`, or `None` if no rule applies.
pub fn expression_type(
    env: &Environment,
    expr: &Expression,
) -> Result<Option<Representation>, AlgebraError> {
    Ok(match expr {
        Expression::Term(_) | Expression::Card => Some(Nu),
        Expression::Var(v) => Some(lookup(env, v)?),
        Expression::Call(f, args) => {
            let floor = if f.is_equality() { Iota } else { Nu };
            let mut ok = true;
            for arg in args {
                ok &= matches!(expression_type(env, arg)?, Some(r) if r >= floor);
            }
            ok.then_some(Nu)
        }
    })
}

/// `env ⊢ expr : repr`.
pub fn check_expression(
    env: &Environment,
    expr: &Expression,
    repr: Representation,
) -> Result<bool, AlgebraError> {
    Ok(expression_type(env, expr)? == Some(repr))
}

/// `env ⊢ algebra`.
pub fn check_typing(env: &Environment, algebra: &Algebra) -> Result<bool, AlgebraError> {
    for v in algebra.all_vars() {
        lookup(env, &v)?;
    }
    check_node(env, algebra)
}

fn lookup(env: &Environment, var: &Var) -> Result<Representation, AlgebraError> {
    env.get(var)
        .ok_or_else(|| AlgebraError::UnboundVariable(var.clone()))
}

fn at_least(env: &Environment, var: &Var, floor: Representation) -> Result<bool, AlgebraError> {
    Ok(lookup(env, var)? >= floor)
}

fn shared_at_least_zeta(env: &Environment, l: &Algebra, r: &Algebra) -> Result<bool, AlgebraError> {
    let right = r.output_vars();
    for v in l.output_vars().iter().filter(|v| right.contains(v)) {
        if !at_least(env, v, Zeta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_node(env: &Environment, algebra: &Algebra) -> Result<bool, AlgebraError> {
    match algebra {
        Algebra::QuadPattern { s, p, o, g } => {
            for t in [s, p, o] {
                if let PatternTerm::Var(v) = t {
                    if !at_least(env, v, Iota)? {
                        return Ok(false);
                    }
                }
            }
            if let PatternTerm::Var(v) = g {
                lookup(env, v)?;
            }
            Ok(true)
        }
        Algebra::Join(l, r) => Ok(check_node(env, l)?
            && check_node(env, r)?
            && shared_at_least_zeta(env, l, r)?),
        Algebra::Union(l, r) => Ok(check_node(env, l)? && check_node(env, r)?),
        Algebra::Filter { conditions, input } => {
            for c in conditions {
                if !check_expression(env, c, Nu)? {
                    return Ok(false);
                }
            }
            check_node(env, input)
        }
        Algebra::Diff {
            left,
            right,
            condition,
        }
        | Algebra::LeftJoin {
            left,
            right,
            condition,
        } => Ok(check_node(env, left)?
            && check_node(env, right)?
            && check_expression(env, condition, Nu)?
            && shared_at_least_zeta(env, left, right)?),
        Algebra::Projection { input, vars } => {
            for v in vars {
                lookup(env, v)?;
            }
            check_node(env, input)
        }
        Algebra::Group { keys, input } => {
            for k in keys {
                let ok = match k {
                    Expression::Var(v) => at_least(env, v, Iota)?,
                    _ => check_expression(env, k, Nu)?,
                };
                if !ok {
                    return Ok(false);
                }
            }
            for v in input.output_vars() {
                if !at_least(env, &v, Zeta)? {
                    return Ok(false);
                }
            }
            check_node(env, input)
        }
        Algebra::Aggregation(a) => check_aggregation(env, a),
        Algebra::AggregateJoin(aggs) => {
            for a in aggs {
                if !check_aggregation(env, a)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Algebra::ViRestrict { var, .. }
        | Algebra::GraphRestrict { var, .. }
        | Algebra::VersionRestrict { var, .. } => at_least(env, var, Zeta),
        Algebra::Transform { var, to, input, .. } => {
            Ok(at_least(env, var, *to)? && check_node(env, input)?)
        }
    }
}

fn counts_bare_var(a: &Aggregation) -> bool {
    a.params.function() == AggregateFunction::Count
        && matches!(a.arguments(), [Expression::Var(_)])
}

fn check_aggregation(env: &Environment, a: &Aggregation) -> Result<bool, AlgebraError> {
    if !counts_bare_var(a) {
        for e in a.arguments() {
            if !check_expression(env, e, Nu)? {
                return Ok(false);
            }
        }
    }
    Ok(lookup(env, &a.target)? == Nu && check_node(env, &a.group)?)
}

/// Lowest environment typing `algebra`, computed by collecting the lower bound every rule
/// places on each variable and taking the maximum per variable.
pub fn optimal_env(algebra: &Algebra) -> Result<Environment, AlgebraError> {
    algebra.validate()?;
    let mut env = Environment::new();
    for v in algebra.all_vars() {
        env.insert(v, Psi);
    }
    collect(algebra, &mut env);
    if !check_typing(&env, algebra)? {
        return Err(AlgebraError::Typing(format!(
            "no environment types the {} operator",
            algebra.name()
        )));
    }
    Ok(env)
}

/// Optimal environment with `ψ` raised to `ζ`: the representations the condensed engine
/// actually binds.
pub fn execution_env(algebra: &Algebra) -> Result<Environment, AlgebraError> {
    Ok(optimal_env(algebra)?.clamp_psi())
}

fn constrain(expr: &Expression, floor: Representation, env: &mut Environment) {
    match expr {
        Expression::Var(v) => env.raise(v, floor),
        Expression::Call(f, args) => {
            let floor = if f.is_equality() { Iota } else { Nu };
            for arg in args {
                constrain(arg, floor, env);
            }
        }
        Expression::Term(_) | Expression::Card => {}
    }
}

fn raise_shared(l: &Algebra, r: &Algebra, env: &mut Environment) {
    let right = r.output_vars();
    for v in l.output_vars().iter().filter(|v| right.contains(v)) {
        env.raise(v, Zeta);
    }
}

fn collect(algebra: &Algebra, env: &mut Environment) {
    match algebra {
        Algebra::QuadPattern { s, p, o, .. } => {
            for v in [s, p, o].into_iter().filter_map(PatternTerm::as_var) {
                env.raise(v, Iota);
            }
        }
        Algebra::Join(l, r) => raise_shared(l, r, env),
        Algebra::Diff {
            left,
            right,
            condition,
        }
        | Algebra::LeftJoin {
            left,
            right,
            condition,
        } => {
            raise_shared(left, right, env);
            constrain(condition, Nu, env);
        }
        Algebra::Filter { conditions, .. } => {
            conditions.iter().for_each(|c| constrain(c, Nu, env));
        }
        Algebra::Group { keys, input } => {
            for k in keys {
                match k {
                    Expression::Var(v) => env.raise(v, Iota),
                    _ => constrain(k, Nu, env),
                }
            }
            for v in input.output_vars() {
                env.raise(&v, Zeta);
            }
        }
        Algebra::Aggregation(a) => collect_aggregation(a, env),
        Algebra::AggregateJoin(aggs) => aggs.iter().for_each(|a| collect_aggregation(a, env)),
        Algebra::ViRestrict { var, .. }
        | Algebra::GraphRestrict { var, .. }
        | Algebra::VersionRestrict { var, .. } => env.raise(var, Zeta),
        Algebra::Transform { var, to, .. } => env.raise(var, *to),
        Algebra::Union(..) | Algebra::Projection { .. } => {}
    }
    for child in algebra.children() {
        if !matches!(algebra, Algebra::Aggregation(_) | Algebra::AggregateJoin(_)) {
            collect(child, env);
        }
    }
}

fn collect_aggregation(a: &Aggregation, env: &mut Environment) {
    if !counts_bare_var(a) {
        a.arguments().iter().for_each(|e| constrain(e, Nu, env));
    }
    env.raise(&a.target, Nu);
    collect(&a.group, env);
}
