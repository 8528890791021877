//! The twisted shuffle product and weight spaces of the spherical subalgebra.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fgl::FormalGroupLaw;
use crate::quiver::{ColorWord, DimVector, Quiver};
use crate::symalg::{scalar, symmetrize, Block, MultiPoly, PoleError, RationalFunction, Scalar, SymmetrizeError, Var};
use crate::thom::{biextension_kernel, ThomError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ShuffleError {
    #[error(transparent)]
    Thom(#[from] ThomError),
    #[error(transparent)]
    Symmetrize(#[from] SymmetrizeError),
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error("product has a pole on a diagonal: {0}")]
    PoleOnDiagonal(String),
    #[error("weight has {got} entries, quiver has {expected} vertices")]
    WeightMismatch { got: usize, expected: usize },
    #[error("dilation specialization needs {expected} values, got {got}")]
    TauMismatch { got: usize, expected: usize },
    #[error("weight spaces need the additive or multiplicative backend")]
    SeriesUnsupported,
}

/// A symmetric function on the chart `x[1,i,s]` of weight `weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleElement {
    pub weight: DimVector,
    pub representative: RationalFunction,
}

impl ShuffleElement {
    pub fn new(weight: DimVector, representative: RationalFunction) -> Self {
        ShuffleElement { weight, representative }
    }

    pub fn unit(n: usize) -> Self {
        ShuffleElement::new(DimVector::zero(n), RationalFunction::one())
    }

    /// `e_i`: weight the unit vector at `i`, representative 1.
    pub fn generator(n: usize, i: usize) -> Self {
        ShuffleElement::new(DimVector::unit(n, i), RationalFunction::one())
    }

    /// `x^a · e_i`.
    pub fn generator_times(n: usize, i: usize, a: u32) -> Self {
        let x = MultiPoly::var(Var::torus(1, i as u16, 1));
        ShuffleElement::new(DimVector::unit(n, i), RationalFunction::from_poly(&x.pow(a)))
    }

    /// Polynomial (additive) or Laurent polynomial (multiplicative).
    pub fn is_polynomial(&self, fgl: &FormalGroupLaw) -> bool {
        is_polynomial(fgl, &self.representative)
    }

    /// Invariance under every per-vertex transposition.
    pub fn is_symmetric(&self) -> bool {
        for (i, &d) in self.weight.0.iter().enumerate() {
            for s in 1..d as u16 {
                let (a, b) = (Var::torus(1, i as u16, s), Var::torus(1, i as u16, s + 1));
                let swapped = self.representative.rename(&|v| if v == a { b } else if v == b { a } else { v });
                if !swapped.equals(&self.representative) {
                    return false;
                }
            }
        }
        true
    }

    pub fn equals(&self, other: &ShuffleElement) -> bool {
        self.weight == other.weight && self.representative.equals(&other.representative)
    }
}

/// Polynomial for the additive law, Laurent polynomial for the
/// multiplicative one. For a series law the truncated factors `λ(u)/u` have
/// constant term 1, so only denominators vanishing at the origin count.
pub fn is_polynomial(fgl: &FormalGroupLaw, f: &RationalFunction) -> bool {
    let c = f.cancel();
    match fgl {
        FormalGroupLaw::Multiplicative => c.is_laurent_polynomial(),
        FormalGroupLaw::Series(_) => c.factors().all(|(p, e)| e > 0 || !p.constant_term().is_zero()),
        FormalGroupLaw::Additive => c.is_polynomial(),
    }
}

fn to_slot(f: &RationalFunction, slot: u16) -> RationalFunction {
    f.rename(&|v| match v {
        Var::Torus { vertex, index, .. } => Var::torus(slot, vertex, index),
        other => other,
    })
}

/// `a ★ b = Sym(a(x⁽¹⁾) · b(x⁽²⁾) · ℒ_{v1,v2}(x⁽¹⁾, x⁽²⁾))`.
pub fn shuffle_product(q: &Quiver, fgl: &FormalGroupLaw, a: &ShuffleElement, b: &ShuffleElement) -> Result<ShuffleElement, ShuffleError> {
    let n = q.num_vertices();
    for w in [&a.weight, &b.weight] {
        if w.len() != n {
            return Err(ShuffleError::WeightMismatch { got: w.len(), expected: n });
        }
    }
    let kernel = biextension_kernel(q, fgl, &a.weight, &b.weight)?;
    let f = &(&a.representative * &to_slot(&b.representative, 2)) * &kernel.literal();
    let mut blocks = Vec::new();
    for i in 0..n {
        for (slot, w) in [(1u16, &a.weight), (2u16, &b.weight)] {
            let vars: Vec<Var> = (1..=w.get(i) as u16).map(|s| Var::torus(slot, i as u16, s)).collect();
            if !vars.is_empty() {
                blocks.push(Block::new(i, vars));
            }
        }
    }
    let sym = symmetrize(&f, &blocks)?;
    let offsets = a.weight.clone();
    let merged = sym.rename(&|v| match v {
        Var::Torus { slot: 2, vertex, index } => Var::torus(1, vertex, offsets.get(vertex as usize) as u16 + index),
        other => other,
    });
    Ok(ShuffleElement::new(a.weight.add(&b.weight), merged.cancel()))
}

/// Like [`shuffle_product`], failing when the result keeps a diagonal pole.
pub fn shuffle_product_polynomial(
    q: &Quiver,
    fgl: &FormalGroupLaw,
    a: &ShuffleElement,
    b: &ShuffleElement,
) -> Result<ShuffleElement, ShuffleError> {
    let p = shuffle_product(q, fgl, a, b)?;
    if !p.is_polynomial(fgl) {
        return Err(ShuffleError::PoleOnDiagonal(p.representative.to_string()));
    }
    Ok(p)
}

/// Left-nested product of generators along a word.
pub fn word_product(q: &Quiver, fgl: &FormalGroupLaw, word: &ColorWord) -> Result<ShuffleElement, ShuffleError> {
    let n = q.num_vertices();
    let mut acc = ShuffleElement::unit(n);
    for &i in &word.0 {
        acc = shuffle_product(q, fgl, &acc, &ShuffleElement::generator(n, i))?;
    }
    Ok(acc)
}

/// `a ★ b` is polynomial.
pub fn verify_ideal(q: &Quiver, fgl: &FormalGroupLaw, a: &ShuffleElement, b: &ShuffleElement) -> Result<bool, ShuffleError> {
    Ok(shuffle_product(q, fgl, a, b)?.is_polynomial(fgl))
}

/// Substitutes dilation coordinates `d_k ↦ τ_k`.
pub fn specialize(f: &RationalFunction, tau: &[Scalar]) -> Result<RationalFunction, ShuffleError> {
    let assignment: BTreeMap<Var, Scalar> =
        tau.iter().enumerate().map(|(k, t)| (Var::Dilation(k as u16 + 1), t.clone())).collect();
    Ok(f.substitute(&assignment)?)
}

/// Laurent expansion of a function whose denominators are monomials.
pub fn laurent_terms(f: &RationalFunction) -> Option<BTreeMap<Vec<(Var, i64)>, Scalar>> {
    let f = f.cancel();
    if !f.is_laurent_polynomial() {
        return None;
    }
    let mut shift: BTreeMap<Var, i64> = BTreeMap::new();
    for (p, e) in f.factors() {
        if e < 0 {
            let v = *p.vars().iter().next()?;
            *shift.entry(v).or_insert(0) += e;
        }
    }
    let num = f.numerator();
    let mut out = BTreeMap::new();
    for (m, c) in num.terms() {
        let mut exps: BTreeMap<Var, i64> = m.pairs().iter().map(|(v, e)| (*v, *e as i64)).collect();
        for (v, s) in &shift {
            *exps.entry(*v).or_insert(0) += s;
        }
        let key: Vec<(Var, i64)> = exps.into_iter().filter(|(_, e)| *e != 0).collect();
        out.insert(key, c.clone());
    }
    Some(out)
}

/// Span of products of generators with polynomial coefficients, cut to
/// degree `≤ d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSpaceBasis {
    pub weight: DimVector,
    pub degree: u32,
    pub dimension: usize,
    /// Dimension at a second specialization point.
    pub confirmation: usize,
    #[serde(skip)]
    pub basis: Vec<ShuffleElement>,
}

fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let factor = &row[c] / &pivot_row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &factor * y;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn multiset_permutations(alpha: &DimVector) -> Vec<ColorWord> {
    let mut out = BTreeSet::new();
    let letters: Vec<usize> = alpha.0.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(i, d as usize)).collect();
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if rest.is_empty() {
            out.insert(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            if k > 0 && rest[k] == rest[k - 1] {
                continue;
            }
            let x = rest.remove(k);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(k, x);
        }
    }
    rec(&mut letters.clone(), &mut Vec::new(), &mut out);
    out.into_iter().map(ColorWord).collect()
}

fn spanning_elements(q: &Quiver, fgl: &FormalGroupLaw, alpha: &DimVector, d: u32) -> Result<Vec<ShuffleElement>, ShuffleError> {
    let n = q.num_vertices();
    let mut out = Vec::new();
    for word in multiset_permutations(alpha) {
        let mut exps: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..word.len() {
            exps = exps.into_iter().flat_map(|e| (0..=d).map(move |a| [e.clone(), vec![a]].concat())).collect();
        }
        for e in exps {
            if e.iter().sum::<u32>() > d {
                continue;
            }
            let mut acc = ShuffleElement::unit(n);
            for (&i, &a) in word.0.iter().zip(&e) {
                acc = shuffle_product(q, fgl, &acc, &ShuffleElement::generator_times(n, i, a))?;
            }
            out.push(acc);
        }
    }
    if alpha.is_zero() {
        out.push(ShuffleElement::unit(n));
    }
    Ok(out)
}

fn dimension_at(elements: &[ShuffleElement], tau: &[Scalar], d: u32) -> Result<usize, ShuffleError> {
    let mut expansions = Vec::new();
    let mut monomials = BTreeSet::new();
    for e in elements {
        let f = specialize(&e.representative, tau)?;
        let terms = laurent_terms(&f).ok_or_else(|| ShuffleError::PoleOnDiagonal(f.to_string()))?;
        monomials.extend(terms.keys().cloned());
        expansions.push(terms);
    }
    let degree = |m: &Vec<(Var, i64)>| m.iter().map(|(_, e)| e.unsigned_abs()).sum::<u64>();
    let cols: Vec<&Vec<(Var, i64)>> = monomials.iter().collect();
    let rows: Vec<Vec<Scalar>> =
        expansions.iter().map(|t| cols.iter().map(|m| t.get(*m).cloned().unwrap_or_else(Scalar::zero)).collect()).collect();
    let high: Vec<usize> = (0..cols.len()).filter(|&k| degree(cols[k]) > d as u64).collect();
    let high_rows: Vec<Vec<Scalar>> = rows.iter().map(|r| high.iter().map(|&k| r[k].clone()).collect()).collect();
    Ok(rank(&rows) - rank(&high_rows))
}

fn random_tau(rng: &mut ChaCha8Rng, r: usize) -> Vec<Scalar> {
    (0..r).map(|_| Scalar::new(rng.gen_range(2..50i64).into(), rng.gen_range(1..7i64).into())).collect()
}

/// `dim (U⁺)_α ∩ {deg ≤ d}` at the dilation point `τ*`, confirmed at a second
/// point drawn from `seed`.
pub fn weight_space(
    q: &Quiver,
    fgl: &FormalGroupLaw,
    alpha: &DimVector,
    d: u32,
    tau: &[Scalar],
    seed: u64,
) -> Result<WeightSpaceBasis, ShuffleError> {
    if matches!(fgl, FormalGroupLaw::Series(_)) {
        return Err(ShuffleError::SeriesUnsupported);
    }
    if tau.len() != q.dilation.rank {
        return Err(ShuffleError::TauMismatch { got: tau.len(), expected: q.dilation.rank });
    }
    let elements = spanning_elements(q, fgl, alpha, d)?;
    let dimension = dimension_at(&elements, tau, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let confirmation = dimension_at(&elements, &random_tau(&mut rng, q.dilation.rank), d)?;
    Ok(WeightSpaceBasis { weight: alpha.clone(), degree: d, dimension, confirmation, basis: elements })
}

/// A random symmetric element of weight `e_i`, `e_i + e_j` or `2e_i`, with
/// a representative `c0 + c1 p1 + c2 p1²` in the power sum `p1`.
pub fn random_element(rng: &mut impl Rng, n: usize) -> ShuffleElement {
    let mut w = DimVector::zero(n);
    for _ in 0..rng.gen_range(1..=2) {
        w.0[rng.gen_range(0..n)] += 1;
    }
    let mut p1 = MultiPoly::zero();
    for (i, &d) in w.0.iter().enumerate() {
        for s in 1..=d as u16 {
            p1 = &p1 + &MultiPoly::var(Var::torus(1, i as u16, s));
        }
    }
    let c = |rng: &mut dyn rand::RngCore| scalar(rng.gen_range(-3..=3));
    let mut rep = MultiPoly::constant(c(rng));
    rep = &rep + &p1.scale(&c(rng));
    rep = &rep + &p1.pow(2).scale(&c(rng));
    if rep.is_zero() {
        rep = MultiPoly::one();
    }
    ShuffleElement::new(w, RationalFunction::from_poly(&rep))
}

/// Checks `(a★b)★c = a★(b★c)`.
pub fn check_associativity(
    q: &Quiver,
    fgl: &FormalGroupLaw,
    a: &ShuffleElement,
    b: &ShuffleElement,
    c: &ShuffleElement,
) -> Result<bool, ShuffleError> {
    let left = shuffle_product(q, fgl, &shuffle_product(q, fgl, a, b)?, c)?;
    let right = shuffle_product(q, fgl, a, &shuffle_product(q, fgl, b, c)?)?;
    Ok(left.equals(&right))
}

/// Default bound on the total weight of a random associativity triple.
pub const MAX_TRIPLE_WEIGHT: u32 = 4;

/// Random triples of total weight at most `max_weight` (at least 3).
pub fn random_triples(rng: &mut impl Rng, n: usize, count: usize, max_weight: u32) -> Vec<[ShuffleElement; 3]> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = [random_element(rng, n), random_element(rng, n), random_element(rng, n)];
        if t.iter().map(|e| e.weight.total()).sum::<u32>() <= max_weight.max(3) {
            out.push(t);
        }
    }
    out
}

/// Associativity on `count` random triples drawn from `seed`; returns the
/// number of triples that passed.
pub fn associativity_trials(
    q: &Quiver,
    fgl: &FormalGroupLaw,
    count: usize,
    seed: u64,
    max_weight: u32,
) -> Result<usize, ShuffleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples = random_triples(&mut rng, q.num_vertices(), count, max_weight);
    let mut passed = 0;
    for [a, b, c] in &triples {
        if check_associativity(q, fgl, a, b, c)? {
            passed += 1;
        }
    }
    Ok(passed)
}

pub fn is_one(f: &RationalFunction) -> bool {
    f.as_constant().map(|c| c.is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{catalog, DilationTorus};

    fn a1() -> Quiver {
        Quiver::with_defaults(catalog::a1()).with_dilation(DilationTorus::new(vec![vec![1], vec![0]]).unwrap())
    }
    fn x(i: u16, s: u16) -> MultiPoly {
        MultiPoly::var(Var::torus(1, i, s))
    }

    #[test]
    fn e_star_e_is_two_and_cubic_is_six() {
        let fgl = FormalGroupLaw::Additive;
        let q = a1();
        let w2 = word_product(&q, &fgl, &ColorWord(vec![0, 0])).unwrap();
        assert_eq!(w2.representative, RationalFunction::constant(scalar(2)));
        let w3 = word_product(&q, &fgl, &ColorWord(vec![0, 0, 0])).unwrap();
        assert_eq!(w3.representative, RationalFunction::constant(scalar(6)));
    }

    #[test]
    fn x_e_star_e() {
        let fgl = FormalGroupLaw::Additive;
        let q = a1();
        let p = shuffle_product(&q, &fgl, &ShuffleElement::generator_times(1, 0, 1), &ShuffleElement::generator(1, 0)).unwrap();
        let expect = &(&x(0, 1) + &x(0, 2)) - &MultiPoly::var(Var::Dilation(1));
        assert_eq!(p.representative, RationalFunction::from_poly(&expect));
        assert!(p.is_symmetric());
    }

    #[test]
    fn a2_distinct_vertices() {
        let fgl = FormalGroupLaw::Additive;
        let q = Quiver::with_defaults(catalog::a2());
        let p = word_product(&q, &fgl, &ColorWord(vec![0, 1])).unwrap();
        let d = MultiPoly::var(Var::Dilation(1));
        let f1 = &(&x(1, 1) - &x(0, 1)) + &d;
        let f2 = &(&x(0, 1) - &x(1, 1)) + &d;
        assert!(p.representative.equals(&(RationalFunction::from_poly(&f1) * RationalFunction::from_poly(&f2))));
        assert!(p.is_polynomial(&fgl));
    }

    #[test]
    fn unit_is_two_sided() {
        let q = Quiver::with_defaults(catalog::a2());
        let fgl = FormalGroupLaw::Multiplicative;
        let e = ShuffleElement::generator_times(2, 1, 2);
        let u = ShuffleElement::unit(2);
        assert!(shuffle_product(&q, &fgl, &u, &e).unwrap().equals(&e));
        assert!(shuffle_product(&q, &fgl, &e, &u).unwrap().equals(&e));
    }

    #[test]
    fn weight_space_examples() {
        let q = a1();
        let fgl = FormalGroupLaw::Additive;
        let tau = [scalar(3)];
        assert_eq!(weight_space(&q, &fgl, &DimVector(vec![1]), 1, &tau, 1).unwrap().dimension, 2);
        let w = weight_space(&q, &fgl, &DimVector(vec![2]), 0, &tau, 1).unwrap();
        assert_eq!((w.dimension, w.confirmation), (1, 1));
        assert_eq!(weight_space(&q, &fgl, &DimVector(vec![0]), 2, &tau, 1).unwrap().dimension, 1);
    }

    #[test]
    fn multiplicative_products_are_laurent() {
        let q = a1();
        let fgl = FormalGroupLaw::Multiplicative;
        let p = word_product(&q, &fgl, &ColorWord(vec![0, 0])).unwrap();
        assert!(p.is_polynomial(&fgl));
        assert!(verify_ideal(&q, &fgl, &ShuffleElement::generator_times(1, 0, 1), &ShuffleElement::generator(1, 0)).unwrap());
    }

    #[test]
    fn small_associativity() {
        let q = Quiver::with_defaults(catalog::a2());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fgl in [FormalGroupLaw::Additive, FormalGroupLaw::Multiplicative] {
            let (a, b, c) = (random_element(&mut rng, 2), random_element(&mut rng, 2), random_element(&mut rng, 2));
            assert!(check_associativity(&q, &fgl, &a, &b, &c).unwrap());
        }
    }
}
