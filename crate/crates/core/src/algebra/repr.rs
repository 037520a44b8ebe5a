use std::collections::BTreeMap;
use std::fmt;

use super::{AlgebraError, Var};

/// Level at which a variable is materialized, ordered `Psi < Zeta < Iota < Nu`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Representation {
    /// Any versioned graph, left unbound.
    Psi,
    /// A named-graph id with a set of versions.
    Zeta,
    /// A dictionary id.
    Iota,
    /// A term value.
    Nu,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Psi,
        Representation::Zeta,
        Representation::Iota,
        Representation::Nu,
    ];

    /// The next representation up the chain.
    pub fn step_up(self) -> Option<Self> {
        match self {
            Representation::Psi => Some(Representation::Zeta),
            Representation::Zeta => Some(Representation::Iota),
            Representation::Iota => Some(Representation::Nu),
            Representation::Nu => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Representation::Psi => "ψ",
            Representation::Zeta => "ζ",
            Representation::Iota => "ι",
            Representation::Nu => "ν",
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Representation::Psi => "psi",
            Representation::Zeta => "zeta",
            Representation::Iota => "iota",
            Representation::Nu => "nu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.symbol() == s || r.ascii() == s)
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn repr_min(a: Representation, b: Representation) -> Representation {
    a.min(b)
}

pub fn repr_max(a: Representation, b: Representation) -> Representation {
    a.max(b)
}

/// A partial map from variables to representations.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Environment(BTreeMap<Var, Representation>);

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &Var) -> Option<Representation> {
        self.0.get(var).copied()
    }

    pub fn insert(&mut self, var: Var, repr: Representation) -> Option<Representation> {
        self.0.insert(var, repr)
    }

    /// Raises `var` to at least `repr`, adding it if absent.
    pub fn raise(&mut self, var: &Var, repr: Representation) {
        let slot = self.0.entry(var.clone()).or_insert(repr);
        *slot = (*slot).max(repr);
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.0.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, Representation)> {
        self.0.iter().map(|(v, r)| (v, *r))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise `self <= other` over the domain of `self`, which must be included in
    /// the domain of `other`.
    pub fn le(&self, other: &Environment) -> bool {
        self.iter()
            .all(|(v, r)| other.get(v).is_some_and(|o| r <= o))
    }

    /// Keeps only the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Environment {
        vars.into_iter()
            .filter_map(|v| self.get(v).map(|r| (v.clone(), r)))
            .collect()
    }

    /// Replaces `Psi` by `Zeta`.
    pub fn clamp_psi(&self) -> Environment {
        self.iter()
            .map(|(v, r)| (v.clone(), r.max(Representation::Zeta)))
            .collect()
    }
}

impl FromIterator<(Var, Representation)> for Environment {
    fn from_iter<I: IntoIterator<Item = (Var, Representation)>>(iter: I) -> Self {
        Environment(iter.into_iter().collect())
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, r)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}:{r}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Intersection of the domains, each variable at its minimum over `envs`.
pub fn lower_env(envs: &[Environment]) -> Result<Environment, AlgebraError> {
    let (first, rest) = envs.split_first().ok_or(AlgebraError::EmptyEnvironmentSet)?;
    Ok(first
        .iter()
        .filter_map(|(v, r)| {
            rest.iter()
                .try_fold(r, |acc, env| env.get(v).map(|o| repr_min(acc, o)))
                .map(|r| (v.clone(), r))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Representation::*;

    fn chain_index(r: Representation) -> usize {
        ["ψ", "ζ", "ι", "ν"]
            .iter()
            .position(|s| *s == r.symbol())
            .unwrap()
    }

    #[test]
    fn min_agrees_with_the_chain_on_all_pairs() {
        for a in Representation::ALL {
            assert_eq!(repr_min(a, a), a);
            for b in Representation::ALL {
                let expected = if chain_index(a) <= chain_index(b) { a } else { b };
                assert_eq!(repr_min(a, b), expected);
                assert_eq!(repr_min(a, b), repr_min(b, a));
                for c in Representation::ALL {
                    assert_eq!(repr_min(repr_min(a, b), c), repr_min(a, repr_min(b, c)));
                }
            }
            assert_eq!(repr_min(a, Nu), a);
            assert_eq!(repr_min(a, Psi), Psi);
        }
        assert_eq!(repr_min(Zeta, Nu), Zeta);
    }

    #[test]
    fn lower_env_examples() {
        let x = Var::new("x");
        let y = Var::new("y");
        let e1: Environment = [(x.clone(), Nu)].into_iter().collect();
        let e2: Environment = [(x.clone(), Zeta)].into_iter().collect();
        assert_eq!(lower_env(&[e1, e2.clone()]).unwrap(), e2);

        let e3: Environment = [(x.clone(), Nu), (y.clone(), Iota)].into_iter().collect();
        let e4: Environment = [(x.clone(), Iota)].into_iter().collect();
        assert_eq!(lower_env(&[e3, e4.clone()]).unwrap(), e4);

        assert!(matches!(lower_env(&[]), Err(AlgebraError::EmptyEnvironmentSet)));
    }

    #[test]
    fn step_up_walks_the_chain() {
        assert_eq!(Psi.step_up(), Some(Zeta));
        assert_eq!(Zeta.step_up(), Some(Iota));
        assert_eq!(Iota.step_up(), Some(Nu));
        assert_eq!(Nu.step_up(), None);
        for r in Representation::ALL {
            assert_eq!(Representation::parse(r.symbol()), Some(r));
            assert_eq!(Representation::parse(r.ascii()), Some(r));
        }
    }
}
