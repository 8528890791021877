//! Exact polynomial and rational-function arithmetic over the rationals.

pub mod poly;
pub mod rational;
pub mod symmetrize;
pub mod var;

pub use poly::{ratio, scalar, Monomial, MultiPoly, Scalar};
pub use rational::{FactorValue, PoleError, RationalFunction};
pub use symmetrize::{combinations, symmetrize, Block, SymmetrizeError};
pub use var::{Role, Var, VarRegistry};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("variable {0} is not in the registry")]
    Unregistered(Var),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
}

/// Registry-checked polynomial arithmetic.
pub fn poly_arith(reg: &VarRegistry, a: &MultiPoly, b: &MultiPoly, op: PolyOp) -> Result<MultiPoly, RegistryError> {
    if let Some(v) = a.vars().into_iter().chain(b.vars()).find(|v| !reg.contains(v)) {
        return Err(RegistryError::Unregistered(v));
    }
    Ok(match op {
        PolyOp::Add => a + b,
        PolyOp::Mul => a * b,
    })
}

/// Functional equality of two rational functions.
pub fn rat_equal(a: &RationalFunction, b: &RationalFunction) -> bool {
    a.equals(b)
}
