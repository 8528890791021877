//! Variables and the variable registry.
//!
//! A [`Var`] is a small self-describing key. Its derived ordering is the
//! canonical variable order: role first (torus coordinates, then dilation
//! coordinates, then auxiliary symbols), then group slot, vertex and index.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A coordinate symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    /// Coordinate `x[slot, vertex, index]` on a torus chart. `slot` and
    /// `index` are 1-based, `vertex` is the 0-based position in the quiver's
    /// vertex list.
    Torus { slot: u16, vertex: u16, index: u16 },
    /// Coordinate `d_k` on the dilation torus chart (1-based).
    Dilation(u16),
    /// Free symbol, named through a [`VarRegistry`].
    Aux(u16),
}

impl Var {
    pub const fn torus(slot: u16, vertex: u16, index: u16) -> Self {
        Var::Torus { slot, vertex, index }
    }

    pub fn is_dilation(&self) -> bool {
        matches!(self, Var::Dilation(_))
    }

    /// Vertex of a torus coordinate.
    pub fn vertex(&self) -> Option<usize> {
        match self {
            Var::Torus { vertex, .. } => Some(*vertex as usize),
            _ => None,
        }
    }

    pub fn slot(&self) -> Option<u16> {
        match self {
            Var::Torus { slot, .. } => Some(*slot),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Torus { slot, vertex, index } => write!(f, "x[{},{},{}]", slot, vertex + 1, index),
            Var::Dilation(k) => write!(f, "d{}", k),
            Var::Aux(k) => write!(f, "a{}", k),
        }
    }
}

/// Role tag of a registered variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Torus,
    Dilation,
    Auxiliary,
}

/// Ordered, named set of variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarRegistry {
    names: BTreeMap<Var, String>,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `var` under `name`. Returns `false` (and changes nothing)
    /// when the variable or the name is already taken.
    pub fn register(&mut self, var: Var, name: impl Into<String>) -> bool {
        let name = name.into();
        if self.names.contains_key(&var) || self.names.values().any(|n| *n == name) {
            return false;
        }
        self.names.insert(var, name);
        true
    }

    /// Registers a fresh auxiliary symbol and returns it.
    pub fn aux(&mut self, name: &str) -> Var {
        if let Some((v, _)) = self.names.iter().find(|(_, n)| n.as_str() == name) {
            return *v;
        }
        let next = self
            .names
            .keys()
            .filter_map(|v| match v {
                Var::Aux(k) => Some(*k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let v = Var::Aux(next);
        self.names.insert(v, name.to_string());
        v
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.names.contains_key(var)
    }

    pub fn name(&self, var: &Var) -> String {
        self.names.get(var).cloned().unwrap_or_else(|| var.to_string())
    }

    pub fn role(var: &Var) -> Role {
        match var {
            Var::Torus { .. } => Role::Torus,
            Var::Dilation(_) => Role::Dilation,
            Var::Aux(_) => Role::Auxiliary,
        }
    }

    /// Variables in canonical order.
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.names.keys()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.names.iter().find(|(_, n)| n.as_str() == name).map(|(v, _)| *v)
    }
}
