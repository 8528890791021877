//! Rational functions kept in factored form.
//!
//! A value is `unit · Π factor^exp` with each factor a primitive polynomial
//! (coprime integer coefficients, positive leading coefficient). Products and
//! quotients only touch the factor multiset; sums pull out the common part and
//! expand the rest into one new factor.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, MulAssign, Neg, Sub};

use rayon::prelude::*;

use num::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::poly::{MultiPoly, Scalar};
use super::var::{Var, VarRegistry};

/// A denominator factor vanished at the evaluation point.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("pole: denominator factor `{factor}` vanishes")]
pub struct PoleError {
    pub factor: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalFunction {
    unit: Scalar,
    factors: BTreeMap<MultiPoly, i64>,
}

/// Value of one factor at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorValue {
    pub factor: MultiPoly,
    pub exponent: i64,
    pub value: Scalar,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { unit: Scalar::zero(), factors: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        RationalFunction { unit: c, factors: BTreeMap::new() }
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(&MultiPoly::var(v))
    }

    pub fn from_poly(p: &MultiPoly) -> Self {
        Self::from_factor(p, 1)
    }

    /// `p^exp`; panics when `p` is zero and `exp` is negative.
    pub fn from_factor(p: &MultiPoly, exp: i64) -> Self {
        if p.is_zero() {
            assert!(exp >= 0, "zero polynomial raised to a negative power");
            return if exp == 0 { Self::one() } else { Self::zero() };
        }
        let (content, prim) = p.primitive_part();
        let mut out = RationalFunction {
            unit: pow_scalar(&content, exp),
            factors: BTreeMap::new(),
        };
        if !prim.is_constant() && exp != 0 {
            out.factors.insert(prim, exp);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn unit(&self) -> &Scalar {
        &self.unit
    }

    pub fn factors(&self) -> impl Iterator<Item = (&MultiPoly, i64)> {
        self.factors.iter().map(|(p, e)| (p, *e))
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Constant value, when the function has no factors.
    pub fn as_constant(&self) -> Option<&Scalar> {
        self.factors.is_empty().then_some(&self.unit)
    }

    /// No denominator factors.
    pub fn is_polynomial(&self) -> bool {
        self.factors.values().all(|e| *e > 0)
    }

    /// Denominator factors are single variables only.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.factors.iter().all(|(p, e)| *e > 0 || is_single_var(p))
    }

    /// Nonzero constant times a (Laurent) monomial.
    pub fn is_monomial_unit(&self) -> bool {
        !self.is_zero() && self.factors.keys().all(is_single_var)
    }

    fn insert_factor(&mut self, p: MultiPoly, exp: i64) {
        if exp == 0 {
            return;
        }
        match self.factors.entry(p) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += exp;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(exp);
            }
        }
    }

    /// Sum over a common denominator, expanding each numerator once.
    pub fn sum(terms: &[RationalFunction]) -> Self {
        let terms: Vec<&RationalFunction> = terms.iter().filter(|t| !t.is_zero()).collect();
        match terms.len() {
            0 => return Self::zero(),
            1 => return terms[0].clone(),
            _ => {}
        }
        // Minimum exponent of each factor over all terms (absent = 0).
        let mut common: BTreeMap<MultiPoly, i64> = BTreeMap::new();
        for t in &terms {
            for (p, e) in &t.factors {
                if *e < 0 || terms.iter().all(|u| u.factors.contains_key(p)) {
                    let m = terms.iter().map(|u| u.factors.get(p).copied().unwrap_or(0)).min().unwrap_or(0);
                    if m != 0 {
                        common.insert(p.clone(), m);
                    }
                }
            }
        }
        let rests: Vec<MultiPoly> = terms
            .par_iter()
            .map(|f| {
                let mut acc = MultiPoly::constant(f.unit.clone());
                for (p, e) in &f.factors {
                    let k = e - common.get(p).copied().unwrap_or(0);
                    if k > 0 {
                        acc = &acc * &p.pow(k as u32);
                    }
                }
                for (p, c) in &common {
                    if !f.factors.contains_key(p) {
                        acc = &acc * &p.pow((-c) as u32);
                    }
                }
                acc
            })
            .collect();
        let total = rests.into_iter().fold(MultiPoly::zero(), |a, b| a + b);
        if total.is_zero() {
            return Self::zero();
        }
        let (content, mut prim) = total.primitive_part();
        let mut out = RationalFunction { unit: content, factors: common };
        let dens: Vec<MultiPoly> = out.factors.iter().filter(|(_, e)| **e < 0).map(|(p, _)| p.clone()).collect();
        for q in dens {
            while !prim.is_constant() && out.factors.get(&q).map(|e| *e < 0).unwrap_or(false) {
                match prim.exact_div(&q) {
                    Some(quot) => {
                        prim = quot;
                        out.insert_factor(q.clone(), 1);
                    }
                    None => break,
                }
            }
        }
        &out * &RationalFunction::from_poly(&prim)
    }

    pub fn pow(&self, exp: i64) -> Self {
        if exp == 0 {
            return Self::one();
        }
        assert!(!(self.is_zero() && exp < 0), "zero raised to a negative power");
        RationalFunction {
            unit: pow_scalar(&self.unit, exp),
            factors: self.factors.iter().map(|(p, e)| (p.clone(), e * exp)).collect(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.pow(-1))
    }

    /// Expanded numerator, including the unit.
    pub fn numerator(&self) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.unit.clone());
        for (p, e) in &self.factors {
            if *e > 0 {
                acc = &acc * &p.pow(*e as u32);
            }
        }
        acc
    }

    /// Expanded denominator (monic in the sense of the factor normalisation).
    pub fn denominator(&self) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for (p, e) in &self.factors {
            if *e < 0 {
                acc = &acc * &p.pow((-e) as u32);
            }
        }
        acc
    }

    /// Functional equality by cross-multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let r = self / other;
        if r.factors.is_empty() {
            return r.unit.is_one();
        }
        r.numerator() == r.denominator()
    }

    /// Cancels denominator factors that exactly divide numerator factors.
    pub fn cancel(&self) -> Self {
        let mut out = self.clone();
        loop {
            let dens: Vec<MultiPoly> =
                out.factors.iter().filter(|(_, e)| **e < 0).map(|(p, _)| p.clone()).collect();
            let nums: Vec<MultiPoly> =
                out.factors.iter().filter(|(_, e)| **e > 0).map(|(p, _)| p.clone()).collect();
            let mut changed = false;
            'outer: for q in &dens {
                for p in &nums {
                    if p.num_terms() < 2 || p == q {
                        continue;
                    }
                    if let Some(quot) = p.exact_div(q) {
                        out.insert_factor(p.clone(), -1);
                        out.insert_factor(q.clone(), 1);
                        let rest = RationalFunction::from_poly(&quot);
                        out = &out * &rest;
                        changed = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                return out;
            }
        }
    }

    /// Renames variables; factors are renormalised afterwards.
    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> Self {
        let mut out = Self::constant(self.unit.clone());
        for (p, e) in &self.factors {
            out = &out * &Self::from_factor(&p.rename(map), *e);
        }
        out
    }

    /// Partial evaluation. Fails when a denominator factor becomes zero; a
    /// vanishing numerator factor makes the result zero.
    pub fn substitute(&self, assignment: &BTreeMap<Var, Scalar>) -> Result<Self, PoleError> {
        let mut out = Self::constant(self.unit.clone());
        let mut zero = false;
        for (p, e) in &self.factors {
            let q = p.substitute(assignment);
            if q.is_zero() {
                if *e < 0 {
                    return Err(PoleError { factor: p.to_string() });
                }
                zero = true;
                continue;
            }
            out = &out * &Self::from_factor(&q, *e);
        }
        Ok(if zero { Self::zero() } else { out })
    }

    pub fn evaluate(&self, assignment: &BTreeMap<Var, Scalar>) -> Result<Scalar, PoleError> {
        let values = self.factor_values(assignment);
        if let Some(fv) = values.iter().find(|fv| fv.exponent < 0 && fv.value.is_zero()) {
            return Err(PoleError { factor: fv.factor.to_string() });
        }
        let mut acc = self.unit.clone();
        for fv in values {
            acc *= pow_scalar(&fv.value, fv.exponent);
        }
        Ok(acc)
    }

    /// Value of every factor at a full assignment. Variables without a value
    /// are read as zero.
    pub fn factor_values(&self, assignment: &BTreeMap<Var, Scalar>) -> Vec<FactorValue> {
        self.factors
            .iter()
            .map(|(p, e)| {
                let q = p.substitute(assignment);
                FactorValue { factor: p.clone(), exponent: *e, value: q.constant_term() }
            })
            .collect()
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.factors.keys().flat_map(|p| p.vars()).collect()
    }

    pub fn display_with(&self, reg: Option<&VarRegistry>) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let fmt_side = |positive: bool| -> Vec<String> {
            self.factors
                .iter()
                .filter(|(_, e)| (**e > 0) == positive)
                .map(|(p, e)| {
                    let body = format!("({})", p.display_with(reg));
                    let k = e.abs();
                    if k == 1 {
                        body
                    } else {
                        format!("{}^{}", body, k)
                    }
                })
                .collect()
        };
        let num = fmt_side(true);
        let den = fmt_side(false);
        let mut s = if num.is_empty() {
            self.unit.to_string()
        } else if self.unit.is_one() {
            num.join("*")
        } else if (-&self.unit).is_one() {
            format!("-{}", num.join("*"))
        } else {
            format!("{}*{}", self.unit, num.join("*"))
        };
        if !den.is_empty() {
            s = format!("{} / ({})", s, den.join("*"));
        }
        s
    }

    /// Machine-readable factored form.
    pub fn to_json(&self) -> FactoredJson {
        FactoredJson {
            unit: self.unit.to_string(),
            factors: self
                .factors
                .iter()
                .map(|(p, e)| FactorJson { poly: p.to_string(), exp: *e })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactoredJson {
    pub unit: String,
    pub factors: Vec<FactorJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorJson {
    pub poly: String,
    pub exp: i64,
}

fn is_single_var(p: &MultiPoly) -> bool {
    p.num_terms() == 1
        && p.leading().map(|(m, _)| m.pairs().len() == 1 && m.degree() == 1).unwrap_or(false)
}

pub(crate) fn pow_scalar(c: &Scalar, exp: i64) -> Scalar {
    if exp >= 0 {
        num::pow::pow(c.clone(), exp as usize)
    } else {
        num::pow::pow(c.recip(), (-exp) as usize)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(None))
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        let mut out = self.clone();
        out.unit *= &rhs.unit;
        for (p, e) in &rhs.factors {
            out.insert_factor(p.clone(), *e);
        }
        out
    }
}

impl MulAssign<&RationalFunction> for RationalFunction {
    fn mul_assign(&mut self, rhs: &RationalFunction) {
        if self.is_zero() || rhs.is_zero() {
            *self = RationalFunction::zero();
            return;
        }
        self.unit *= &rhs.unit;
        for (p, e) in &rhs.factors {
            self.insert_factor(p.clone(), *e);
        }
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inv().expect("division by the zero rational function")
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // Common part: componentwise minimum of exponents (absent = 0).
        let mut common: BTreeMap<MultiPoly, i64> = BTreeMap::new();
        for (p, ea) in &self.factors {
            let eb = rhs.factors.get(p).copied().unwrap_or(0);
            let m = (*ea).min(eb);
            if m != 0 {
                common.insert(p.clone(), m);
            }
        }
        for (p, eb) in &rhs.factors {
            if !self.factors.contains_key(p) && *eb < 0 {
                common.insert(p.clone(), *eb);
            }
        }
        let rest = |f: &RationalFunction| -> MultiPoly {
            let mut acc = MultiPoly::constant(f.unit.clone());
            for (p, e) in &f.factors {
                let k = e - common.get(p).copied().unwrap_or(0);
                debug_assert!(k >= 0);
                if k > 0 {
                    acc = &acc * &p.pow(k as u32);
                }
            }
            for (p, c) in &common {
                if !f.factors.contains_key(p) {
                    acc = &acc * &p.pow((-c) as u32);
                }
            }
            acc
        };
        let sum = &rest(self) + &rest(rhs);
        if sum.is_zero() {
            return RationalFunction::zero();
        }
        let (content, mut prim) = sum.primitive_part();
        let mut out = RationalFunction { unit: content, factors: common };
        // Fallback exact division against the denominator factors.
        let dens: Vec<MultiPoly> =
            out.factors.iter().filter(|(_, e)| **e < 0).map(|(p, _)| p.clone()).collect();
        for q in dens {
            while !prim.is_constant() {
                match prim.exact_div(&q) {
                    Some(quot) => {
                        prim = quot;
                        out.insert_factor(q.clone(), 1);
                        if !out.factors.get(&q).map(|e| *e < 0).unwrap_or(false) {
                            break;
                        }
                    }
                    None => break,
                }
            }
        }
        &out * &RationalFunction::from_poly(&prim)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { unit: -self.unit.clone(), factors: self.factors.clone() }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        &self + &rhs
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}

impl Div for RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: RationalFunction) -> RationalFunction {
        &self / &rhs
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        &self - &rhs
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}
