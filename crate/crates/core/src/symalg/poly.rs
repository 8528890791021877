//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use super::var::{Var, VarRegistry};

/// Exact rational scalar.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// the earliest variable in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `true` when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(
            other
                .0
                .iter()
                .filter_map(|(v, e)| {
                    let r = e - self.exponent(v);
                    (r > 0).then_some((*v, r))
                })
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let vars: BTreeSet<Var> = self.0.iter().chain(other.0.iter()).map(|(v, _)| *v).collect();
        Monomial(
            vars.into_iter()
                .map(|v| (v, self.exponent(&v).max(other.exponent(&v))))
                .collect(),
        )
    }

    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|(v, e)| (map(*v), *e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                        // `self` carries an earlier variable that `other` lacks.
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {
                            if ea != eb {
                                return ea.cmp(&eb);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; no zero coefficient is ever stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Linear form `Σ c_v v`.
    pub fn linear(coeffs: impl IntoIterator<Item = (Var, i64)>) -> Self {
        let mut p = Self::zero();
        for (v, c) in coeffs {
            p.add_term(Monomial::var(v), scalar(c));
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|(v, _)| *v))
            .collect()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        MultiPoly {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Product with all terms of total degree above `order` dropped.
    pub fn mul_truncated(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() <= order {
                    out.add_term(ma.mul(mb), ca * cb);
                }
            }
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.rename(map), c.clone());
        }
        out
    }

    /// Substitutes scalars for the variables present in `assignment`; other
    /// variables stay symbolic.
    pub fn substitute(&self, assignment: &BTreeMap<Var, Scalar>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m.pairs() {
                match assignment.get(v) {
                    Some(val) => coeff *= num::pow::pow(val.clone(), *e as usize),
                    None => rest.push((*v, *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Substitutes polynomials for variables.
    pub fn compose(&self, images: &BTreeMap<Var, MultiPoly>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(c.clone());
            for (v, e) in m.pairs() {
                match images.get(v) {
                    Some(img) => term = &term * &img.pow(*e),
                    None => term = term.mul_monomial(&Monomial(vec![(*v, *e)])),
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Evaluates at a full assignment; `None` when a variable is missing.
    pub fn evaluate(&self, assignment: &BTreeMap<Var, Scalar>) -> Option<Scalar> {
        let p = self.substitute(assignment);
        p.is_constant().then(|| p.constant_term())
    }

    /// Splits `self = scale · primitive` where `primitive` has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn primitive_part(&self) -> (Scalar, MultiPoly) {
        if self.is_zero() {
            return (Scalar::zero(), Self::zero());
        }
        let negative = self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false);
        let mut content = if self.terms.values().all(|c| c.denom().is_one()) {
            let mut g = BigInt::zero();
            for c in self.terms.values() {
                g = g.gcd(c.numer());
                if g.is_one() {
                    break;
                }
            }
            BigRational::from_integer(g)
        } else {
            let mut den_lcm = BigInt::one();
            for c in self.terms.values() {
                den_lcm = den_lcm.lcm(c.denom());
            }
            let mut num_gcd = BigInt::zero();
            for c in self.terms.values() {
                let n = (c * BigRational::from_integer(den_lcm.clone())).to_integer();
                num_gcd = num_gcd.gcd(&n);
            }
            BigRational::new(num_gcd, den_lcm)
        };
        if content.is_one() {
            return if negative { (-content, -self) } else { (content, self.clone()) };
        }
        if negative {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Multivariate division by an ordered list of divisors (graded-lex).
    /// Returns quotients and remainder with `self = Σ q_k d_k + r`.
    pub fn div_rem(&self, divisors: &[MultiPoly]) -> (Vec<MultiPoly>, MultiPoly) {
        let mut quotients = vec![MultiPoly::zero(); divisors.len()];
        let mut rem = MultiPoly::zero();
        let mut p = self.clone();
        while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let mut divided = false;
            for (k, d) in divisors.iter().enumerate() {
                let Some((dm, dc)) = d.leading() else { continue };
                if dm.divides(&lm) {
                    let qm = dm.quotient_of(&lm);
                    let qc = &lc / dc;
                    for (m, c) in &d.terms {
                        p.add_term(m.mul(&qm), -(c * &qc));
                    }
                    quotients[k].add_term(qm, qc);
                    divided = true;
                    break;
                }
            }
            if !divided {
                rem.add_term(lm.clone(), lc.clone());
                p.terms.remove(&lm);
            }
        }
        (quotients, rem)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (dm, dc) = d.leading()?;
        let mut q = MultiPoly::zero();
        let mut p = self.clone();
        // With a single divisor every leading term must be divisible.
        while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !dm.divides(&lm) {
                return None;
            }
            let qm = dm.quotient_of(&lm);
            let qc = &lc / dc;
            for (m, c) in &d.terms {
                p.add_term(m.mul(&qm), -(c * &qc));
            }
            q.add_term(qm, qc);
        }
        Some(q)
    }

    pub fn display_with(&self, reg: Option<&VarRegistry>) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m
                .pairs()
                .iter()
                .map(|(v, e)| {
                    let name = reg.map(|r| r.name(v)).unwrap_or_else(|| v.to_string());
                    if *e == 1 {
                        name
                    } else {
                        format!("{}^{}", name, e)
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", abs, mono));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(None))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

/// Coefficients scaled to integers by the lcm of their denominators.
fn integer_terms(p: &MultiPoly) -> (BigInt, Vec<(&Monomial, BigInt)>) {
    let den = p.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let terms = p.terms.iter().map(|(m, c)| (m, c.numer() * (&den / c.denom()))).collect();
    (den, terms)
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero();
        }
        // Accumulate over the integers; rational additions would pay a gcd each.
        let (da, ta) = integer_terms(self);
        let (db, tb) = integer_terms(rhs);
        let mut acc: std::collections::HashMap<Monomial, BigInt> = std::collections::HashMap::new();
        for (ma, ca) in &ta {
            for (mb, cb) in &tb {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let den = da * db;
        MultiPoly {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, BigRational::new(c, den.clone())))
                .collect(),
        }
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Scalar::one())
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MultiPoly {
        MultiPoly::var(Var::Aux(0))
    }
    fn y() -> MultiPoly {
        MultiPoly::var(Var::Aux(1))
    }

    #[test]
    fn add_and_mul_examples() {
        assert_eq!(&(&x() + &y()) + &(&x() - &y()), x().scale(&scalar(2)));
        assert_eq!(&(&x() - &y()) * &(&x() + &y()), &x().pow(2) - &y().pow(2));
        let p = &x() + &y().pow(3);
        assert!((&MultiPoly::zero() * &p).is_zero());
        assert_eq!((&MultiPoly::zero() * &p).num_terms(), 0);
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::var(Var::Aux(0));
        let b = Monomial::var(Var::Aux(1));
        let b2 = Monomial::from_pairs([(Var::Aux(1), 2)]);
        assert!(a > b);
        assert!(b2 > a);
        assert!(Monomial::from_pairs([(Var::Aux(0), 1), (Var::Aux(1), 1)]) < Monomial::from_pairs([(Var::Aux(0), 2)]));
    }

    #[test]
    fn primitive_part_fixes_sign_and_content() {
        let p = (&y() - &x()).scale(&ratio(3, 2));
        let (c, q) = p.primitive_part();
        assert_eq!(c, ratio(-3, 2));
        assert_eq!(q, &x() - &y());
    }

    #[test]
    fn exact_division() {
        let p = &x().pow(2) - &y().pow(2);
        assert_eq!(p.exact_div(&(&x() - &y())), Some(&x() + &y()));
        assert_eq!(p.exact_div(&(&x() + &MultiPoly::one())), None);
    }

    #[test]
    fn substitution_and_evaluation() {
        let p = &(&x() * &y()) + &MultiPoly::constant(scalar(3));
        let mut a = BTreeMap::new();
        a.insert(Var::Aux(0), scalar(2));
        assert_eq!(p.substitute(&a), &y().scale(&scalar(2)) + &MultiPoly::constant(scalar(3)));
        assert_eq!(p.evaluate(&a), None);
        a.insert(Var::Aux(1), ratio(1, 2));
        assert_eq!(p.evaluate(&a), Some(scalar(4)));
    }
}
