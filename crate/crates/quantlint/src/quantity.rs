//! The algebra of named quantities.
//!
//! A value's kind of quantity is either `Named` (it denotes a known entity
//! such as torque), `Noname` (entity unknown or irrelevant), or a quantity
//! variable bound in a generic function signature. Three operators drive the
//! checker: [`diamond`] decides whether two quantities may be added,
//! [`triangle`] gives the quantity of a product, and [`assign_op`] checks an
//! assignment against the target's current binding, promoting `Noname`
//! bindings when a named value flows into them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuantName {
    /// A named kind of quantity; names are nonempty and compared exactly.
    Named(String),
    Noname,
    /// A quantity variable (`?q`), local to one function signature.
    Quantvar(String),
}

impl QuantName {
    pub fn named(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "named quantities need a nonempty name");
        QuantName::Named(name)
    }

    pub fn is_named(&self) -> bool {
        matches!(self, QuantName::Named(_))
    }

    pub fn is_quantvar(&self) -> bool {
        matches!(self, QuantName::Quantvar(_))
    }
}

impl fmt::Display for QuantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantName::Named(n) => write!(f, "Named \"{}\"", n),
            QuantName::Noname => write!(f, "Noname"),
            QuantName::Quantvar(q) => write!(f, "?{}", q),
        }
    }
}

/// The quantity environment: a total mapping from the unit variables in
/// scope to their current kind of quantity. Updates are persistent (they
/// return a new environment) and monotone: a binding only ever moves from
/// `Noname` to `Named`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuantEnv {
    bindings: BTreeMap<String, QuantName>,
}

impl QuantEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&QuantName> {
        self.bindings.get(var)
    }

    /// In-place insert, used while building the initial environment.
    pub fn bind(&mut self, var: impl Into<String>, name: QuantName) {
        self.bindings.insert(var.into(), name);
    }

    /// Returns a copy of the environment with `var` rebound.
    pub fn with_binding(&self, var: &str, name: QuantName) -> Self {
        let mut next = self.clone();
        next.bindings.insert(var.to_string(), name);
        next
    }

    /// Right-biased union: bindings in `other` override bindings in `self`.
    pub fn override_with(&self, other: &QuantEnv) -> Self {
        let mut next = self.clone();
        for (var, name) in &other.bindings {
            next.bindings.insert(var.clone(), name.clone());
        }
        next
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &QuantName)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Bindings of `self` that differ from `initial`, in variable order.
    pub fn promotions_from(&self, initial: &QuantEnv) -> Vec<(String, QuantName)> {
        self.bindings
            .iter()
            .filter(|(var, name)| initial.get(var) != Some(name))
            .map(|(var, name)| (var.clone(), name.clone()))
            .collect()
    }

    /// True when every binding either kept its value from `initial` or was
    /// promoted from `Noname` to `Named`.
    pub fn is_monotone_extension_of(&self, initial: &QuantEnv) -> bool {
        self.bindings
            .iter()
            .all(|(var, name)| match initial.get(var) {
                Some(old) if old == name => true,
                Some(QuantName::Noname) => name.is_named(),
                _ => false,
            })
    }
}

impl FromIterator<(String, QuantName)> for QuantEnv {
    fn from_iter<I: IntoIterator<Item = (String, QuantName)>>(iter: I) -> Self {
        QuantEnv {
            bindings: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// Two distinct named quantities met where a single entity was required.
    #[error("named quantities {left} and {right} do not represent the same entity")]
    Mismatch { left: QuantName, right: QuantName },
    /// A quantity variable escaped to an operator; unification resolves
    /// these at call sites, so hitting one here is an internal error.
    #[error("unresolved quantity variable {0} reached the quantity algebra")]
    UnresolvedQuantvar(QuantName),
}

fn reject_quantvar(a: &QuantName, b: &QuantName) -> Result<(), AlgebraError> {
    for side in [a, b] {
        if side.is_quantvar() {
            return Err(AlgebraError::UnresolvedQuantvar(side.clone()));
        }
    }
    Ok(())
}

/// Addition compatibility. Defined when the operands can denote one entity:
/// equal names, or a name meeting `Noname` (which casts upward to the name).
pub fn diamond(a: &QuantName, b: &QuantName) -> Result<QuantName, AlgebraError> {
    reject_quantvar(a, b)?;
    match (a, b) {
        (QuantName::Named(n1), QuantName::Named(n2)) => {
            if n1 == n2 {
                Ok(a.clone())
            } else {
                Err(AlgebraError::Mismatch {
                    left: a.clone(),
                    right: b.clone(),
                })
            }
        }
        (QuantName::Named(_), QuantName::Noname) => Ok(a.clone()),
        (QuantName::Noname, QuantName::Named(_)) => Ok(b.clone()),
        (QuantName::Noname, QuantName::Noname) => Ok(QuantName::Noname),
        _ => unreachable!("quantvars rejected above"),
    }
}

/// Multiplication. The product denotes a new entity, so the result is always
/// `Noname` regardless of the operand names.
pub fn triangle(a: &QuantName, b: &QuantName) -> Result<QuantName, AlgebraError> {
    reject_quantvar(a, b)?;
    Ok(QuantName::Noname)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignFailCode {
    /// Target and value carry different names.
    NameMismatch,
    /// A quantity variable reached assignment unresolved.
    UnresolvedQuantvar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignFailure {
    pub code: AssignFailCode,
    pub lhs: QuantName,
    pub rhs: QuantName,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignResult {
    Succeed(QuantEnv),
    Fail(AssignFailure),
}

impl AssignResult {
    pub fn is_succeed(&self) -> bool {
        matches!(self, AssignResult::Succeed(_))
    }
}

/// Checks `lhs <- rhs` for the variable `target`, where `lhs` is the
/// target's current binding in `env` and `rhs` the inferred quantity of the
/// assigned expression. Assigning a named value to a `Noname` variable
/// promotes the binding; every other success leaves `env` untouched.
pub fn assign_op(target: &str, lhs: &QuantName, rhs: &QuantName, env: &QuantEnv) -> AssignResult {
    if lhs.is_quantvar() || rhs.is_quantvar() {
        return AssignResult::Fail(AssignFailure {
            code: AssignFailCode::UnresolvedQuantvar,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        });
    }
    match (lhs, rhs) {
        (QuantName::Named(n1), QuantName::Named(n2)) => {
            if n1 == n2 {
                AssignResult::Succeed(env.clone())
            } else {
                AssignResult::Fail(AssignFailure {
                    code: AssignFailCode::NameMismatch,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                })
            }
        }
        (QuantName::Named(_), QuantName::Noname) => AssignResult::Succeed(env.clone()),
        (QuantName::Noname, QuantName::Noname) => AssignResult::Succeed(env.clone()),
        (QuantName::Noname, QuantName::Named(_)) => {
            AssignResult::Succeed(env.with_binding(target, rhs.clone()))
        }
        _ => unreachable!("quantvars rejected above"),
    }
}
