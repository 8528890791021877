//! Formal group laws and the orientation map `χ ↦ λ_χ`.
//!
//! Three backends: additive (ordinary cohomology), multiplicative (K-theory,
//! in exponentiated coordinates `X_v`), and a truncated power-series law
//! `F(u,v) = u + v + Σ a_ij u^i v^j` kept modulo total degree `> N`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex};

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symalg::{scalar, Monomial, MultiPoly, RationalFunction, Scalar, Var};

/// Largest truncation order accepted for series laws.
pub const MAX_SERIES_ORDER: u32 = 12;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FglError {
    #[error("truncation order {order} exceeds the supported maximum {max}")]
    TruncationOverflow { order: u32, max: u32 },
    #[error("coefficient a_{{{i}{j}}} lies outside the truncation window of order {order}")]
    CoefficientOutOfRange { i: u32, j: u32, order: u32 },
    #[error("malformed series law: {0}")]
    Parse(String),
    #[error("operation is not available for the {0} backend")]
    Unsupported(&'static str),
}

/// Integer combination of coordinates (torus and dilation).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Character(BTreeMap<Var, i64>);

impl Character {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: Var) -> Self {
        Character::from_terms([(v, 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Var, i64)>) -> Self {
        let mut c = Character::zero();
        for (v, n) in terms {
            c.add_term(v, n);
        }
        c
    }

    pub fn add_term(&mut self, v: Var, n: i64) {
        let e = self.0.entry(v).or_insert(0);
        *e += n;
        if *e == 0 {
            self.0.remove(&v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Var, i64)> + '_ {
        self.0.iter().map(|(v, n)| (*v, *n))
    }

    pub fn coeff(&self, v: &Var) -> i64 {
        self.0.get(v).copied().unwrap_or(0)
    }

    /// The part supported on dilation coordinates.
    pub fn dilation_part(&self) -> Character {
        Character(self.0.iter().filter(|(v, _)| v.is_dilation()).map(|(v, n)| (*v, *n)).collect())
    }

    pub fn torus_part(&self) -> Character {
        Character(self.0.iter().filter(|(v, _)| !v.is_dilation()).map(|(v, n)| (*v, *n)).collect())
    }

    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> Character {
        Character::from_terms(self.terms().map(|(v, n)| (map(v), n)))
    }

    pub fn linear_form(&self) -> MultiPoly {
        MultiPoly::linear(self.terms())
    }
}

impl Add for &Character {
    type Output = Character;
    fn add(self, rhs: &Character) -> Character {
        let mut out = self.clone();
        for (v, n) in rhs.terms() {
            out.add_term(v, n);
        }
        out
    }
}

impl Neg for &Character {
    type Output = Character;
    fn neg(self) -> Character {
        Character(self.0.iter().map(|(v, n)| (*v, -n)).collect())
    }
}

impl Sub for &Character {
    type Output = Character;
    fn sub(self, rhs: &Character) -> Character {
        self + &(-rhs)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        f.write_str(&self.linear_form().to_string())
    }
}

/// On-disk form of a series law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub order: u32,
    /// `(i, j, a_ij)` with `a_ij` written as an integer or `"p/q"`.
    pub coefficients: Vec<(u32, u32, String)>,
}

/// Truncated power-series formal group law.
#[derive(Clone, Debug)]
pub struct SeriesLaw {
    order: u32,
    coeffs: BTreeMap<(u32, u32), Scalar>,
    cache: Arc<Mutex<BTreeMap<Character, RationalFunction>>>,
}

impl PartialEq for SeriesLaw {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.coeffs == other.coeffs
    }
}

impl SeriesLaw {
    pub fn new(order: u32, coeffs: impl IntoIterator<Item = ((u32, u32), Scalar)>) -> Result<Self, FglError> {
        if order > MAX_SERIES_ORDER {
            return Err(FglError::TruncationOverflow { order, max: MAX_SERIES_ORDER });
        }
        let mut map = BTreeMap::new();
        for ((i, j), a) in coeffs {
            if i == 0 || j == 0 || i + j > order {
                return Err(FglError::CoefficientOutOfRange { i, j, order });
            }
            if !a.is_zero() {
                map.insert((i, j), a);
            }
        }
        Ok(SeriesLaw { order, coeffs: map, cache: Arc::default() })
    }

    pub fn from_spec(spec: &SeriesSpec) -> Result<Self, FglError> {
        let mut coeffs = Vec::new();
        for (i, j, a) in &spec.coefficients {
            let val: Scalar = a.trim().parse().map_err(|_| FglError::Parse(format!("bad coefficient `{}`", a)))?;
            coeffs.push(((*i, *j), val));
        }
        Self::new(spec.order, coeffs)
    }

    pub fn from_json(text: &str) -> Result<Self, FglError> {
        let spec: SeriesSpec = serde_json::from_str(text).map_err(|e| FglError::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &BTreeMap<(u32, u32), Scalar> {
        &self.coeffs
    }

    /// `F(a, b)` truncated.
    pub fn combine(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let n = self.order;
        let mut out = (a + b).truncate(n);
        if self.coeffs.is_empty() {
            return out;
        }
        let max_i = self.coeffs.keys().map(|(i, _)| *i).max().unwrap_or(0);
        let max_j = self.coeffs.keys().map(|(_, j)| *j).max().unwrap_or(0);
        let pa = truncated_powers(a, max_i, n);
        let pb = truncated_powers(b, max_j, n);
        for ((i, j), c) in &self.coeffs {
            let t = pa[*i as usize].mul_truncated(&pb[*j as usize], n);
            out = &out + &t.scale(c);
        }
        out
    }

    /// Formal inverse `ι(t)` with `F(t, ι(t)) = 0`.
    pub fn inverse(&self, t: &MultiPoly) -> MultiPoly {
        let mut iota = -t;
        for _ in 0..=self.order {
            // ι ← ι - F(t, ι); the correction only touches higher degrees.
            let f = self.combine(t, &iota);
            iota = (&iota - &f).truncate(self.order);
        }
        iota
    }

    /// Formal multiple `[n]_F(t)`.
    pub fn multiple(&self, n: i64, t: &MultiPoly) -> MultiPoly {
        let base = if n < 0 { self.inverse(t) } else { t.clone() };
        let mut acc = MultiPoly::zero();
        for _ in 0..n.unsigned_abs() {
            acc = self.combine(&acc, &base);
        }
        acc
    }

    /// `⟨χ, x⟩_F`: the F-sum of the formal multiples of the coordinates.
    pub fn character_series(&self, chi: &Character) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (v, n) in chi.terms() {
            let m = self.multiple(n, &MultiPoly::var(v));
            acc = self.combine(&acc, &m);
        }
        acc
    }
}

fn truncated_powers(p: &MultiPoly, k: u32, order: u32) -> Vec<MultiPoly> {
    let mut out = vec![MultiPoly::one()];
    for i in 1..=k as usize {
        let next = out[i - 1].mul_truncated(p, order);
        out.push(next);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum FormalGroupLaw {
    Additive,
    Multiplicative,
    Series(SeriesLaw),
}

impl FormalGroupLaw {
    pub fn name(&self) -> &'static str {
        match self {
            FormalGroupLaw::Additive => "additive",
            FormalGroupLaw::Multiplicative => "multiplicative",
            FormalGroupLaw::Series(_) => "series",
        }
    }

    /// The multiplicative law truncated at `order`: `a_11 = -1`.
    pub fn multiplicative_series(order: u32) -> Result<Self, FglError> {
        Ok(FormalGroupLaw::Series(SeriesLaw::new(order, [((1, 1), scalar(-1))])?))
    }

    /// `λ_χ` as a function on the chart.
    pub fn lambda_char(&self, chi: &Character) -> Result<RationalFunction, FglError> {
        if chi.is_zero() {
            return Ok(RationalFunction::zero());
        }
        Ok(match self {
            FormalGroupLaw::Additive => RationalFunction::from_poly(&chi.linear_form()),
            FormalGroupLaw::Multiplicative => multiplicative_lambda(chi),
            FormalGroupLaw::Series(law) => {
                if let Some(hit) = law.cache.lock().unwrap().get(chi) {
                    return Ok(hit.clone());
                }
                // Split off the linear form where it divides, leaving a factor
                // with constant term 1; diagonal poles then cancel factorwise.
                let series = law.character_series(chi);
                let linear = chi.linear_form();
                let f = match series.exact_div(&linear) {
                    Some(unit) => &RationalFunction::from_poly(&linear) * &RationalFunction::from_poly(&unit),
                    None => RationalFunction::from_poly(&series),
                };
                law.cache.lock().unwrap().insert(chi.clone(), f.clone());
                f
            }
        })
    }

    /// Group operation on points of `𝔾` (additive or multiplicative only).
    pub fn point_add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, FglError> {
        match self {
            FormalGroupLaw::Additive => Ok(a + b),
            FormalGroupLaw::Multiplicative => Ok(a * b),
            FormalGroupLaw::Series(_) => Err(FglError::Unsupported("series")),
        }
    }

    pub fn point_neg(&self, a: &Scalar) -> Result<Scalar, FglError> {
        match self {
            FormalGroupLaw::Additive => Ok(-a.clone()),
            FormalGroupLaw::Multiplicative => Ok(a.recip()),
            FormalGroupLaw::Series(_) => Err(FglError::Unsupported("series")),
        }
    }

    pub fn identity_point(&self) -> Result<Scalar, FglError> {
        match self {
            FormalGroupLaw::Additive => Ok(Scalar::zero()),
            FormalGroupLaw::Multiplicative => Ok(Scalar::one()),
            FormalGroupLaw::Series(_) => Err(FglError::Unsupported("series")),
        }
    }

    /// `𝔄_χ` applied to a point given by coordinate values.
    pub fn character_at(&self, chi: &Character, point: &BTreeMap<Var, Scalar>) -> Result<Scalar, FglError> {
        let mut acc = self.identity_point()?;
        for (v, n) in chi.terms() {
            let x = point.get(&v).cloned().unwrap_or_else(|| self.identity_point().unwrap());
            let term = match self {
                FormalGroupLaw::Additive => x * scalar(n),
                _ => crate::symalg::rational::pow_scalar(&x, n),
            };
            acc = self.point_add(&acc, &term)?;
        }
        Ok(acc)
    }

    /// Checks the formal group axioms.
    pub fn verify(&self) -> FglReport {
        match self {
            FormalGroupLaw::Additive => {
                let law = SeriesLaw::new(MAX_SERIES_ORDER, []).unwrap();
                series_report(&law)
            }
            FormalGroupLaw::Multiplicative => multiplicative_report(),
            FormalGroupLaw::Series(law) => series_report(law),
        }
    }
}

fn multiplicative_lambda(chi: &Character) -> RationalFunction {
    // 1 - X^{-χ} = (X^P - X^N) / X^P  with χ = P - N.
    let pos: Vec<(Var, u32)> = chi.terms().filter(|(_, n)| *n > 0).map(|(v, n)| (v, n as u32)).collect();
    let neg: Vec<(Var, u32)> = chi.terms().filter(|(_, n)| *n < 0).map(|(v, n)| (v, (-n) as u32)).collect();
    let xp = Monomial::from_pairs(pos.iter().copied());
    let xn = Monomial::from_pairs(neg.iter().copied());
    let num = &MultiPoly::monomial(xp, Scalar::one()) - &MultiPoly::monomial(xn, Scalar::one());
    let mut f = RationalFunction::from_poly(&num);
    for (v, e) in pos {
        f = &f * &RationalFunction::from_factor(&MultiPoly::var(v), -(e as i64));
    }
    f
}

/// Pass/fail per axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FglReport {
    pub unit: bool,
    pub commutativity: bool,
    pub associativity: bool,
}

impl FglReport {
    pub fn all_pass(&self) -> bool {
        self.unit && self.commutativity && self.associativity
    }
}

fn series_report(law: &SeriesLaw) -> FglReport {
    let (u, v, w) = (MultiPoly::var(Var::Aux(0)), MultiPoly::var(Var::Aux(1)), MultiPoly::var(Var::Aux(2)));
    let unit = law.combine(&u, &MultiPoly::zero()) == u.truncate(law.order)
        && law.combine(&MultiPoly::zero(), &u) == u.truncate(law.order);
    let commutativity = law.combine(&u, &v) == law.combine(&v, &u);
    let left = law.combine(&law.combine(&u, &v), &w);
    let right = law.combine(&u, &law.combine(&v, &w));
    FglReport { unit, commutativity, associativity: left == right }
}

fn multiplicative_report() -> FglReport {
    // u(X) = 1 - X^{-1}; F(a, b) = a + b - ab must realise u(XY).
    let coord = |vars: &[Var]| multiplicative_lambda(&Character::from_terms(vars.iter().map(|v| (*v, 1))));
    let f = |a: &RationalFunction, b: &RationalFunction| &(a + b) - &(a * b);
    let (x, y, z) = (Var::Aux(0), Var::Aux(1), Var::Aux(2));
    let (ux, uy, uz) = (coord(&[x]), coord(&[y]), coord(&[z]));
    let unit = f(&ux, &RationalFunction::zero()).equals(&ux);
    let commutativity = f(&ux, &uy).equals(&f(&uy, &ux)) && f(&ux, &uy).equals(&coord(&[x, y]));
    let associativity = f(&f(&ux, &uy), &uz).equals(&f(&ux, &f(&uy, &uz))) && f(&f(&ux, &uy), &uz).equals(&coord(&[x, y, z]));
    FglReport { unit, commutativity, associativity }
}
