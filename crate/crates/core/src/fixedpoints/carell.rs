//! Coordinate rings of fixed-point schemes of a regular nilpotent on
//! Grassmannians, computed through Gröbner bases.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::groebner::{groebner_basis, standard_monomials};
use super::poincare::{gaussian_binomial, QPoly};
use crate::symalg::combinations;
use crate::symalg::{Monomial, MultiPoly, Scalar, Var};

/// Largest ambient dimension handled.
pub const MAX_N: u32 = 4;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CarellError {
    #[error("degree overflow: n = {0} exceeds {MAX_N}")]
    DegreeOverflow(u32),
    #[error("p = {p} out of range for n = {n}")]
    OutOfRange { n: u32, p: u32 },
    #[error("quotient is not finite-dimensional")]
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarellReport {
    pub n: u32,
    pub p: u32,
    pub dimension: usize,
    /// Hilbert series for the loop-rotation weights.
    pub hilbert: QPoly,
    pub binomial: u64,
    pub gaussian: QPoly,
}

impl CarellReport {
    pub fn consistent(&self) -> bool {
        self.dimension as u64 == self.binomial && self.hilbert == self.gaussian
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k as u64).fold(1, |acc, i| acc * (n as u64 - i) / (i + 1))
}

/// Sign of sorting `seq`, with the sorted sequence; `None` on a repeat.
fn sort_sign(seq: &[u32]) -> Option<(i64, Vec<u32>)> {
    let mut v = seq.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

struct Plucker {
    coords: BTreeMap<Vec<u32>, MultiPoly>,
    weights: BTreeMap<Var, i64>,
}

impl Plucker {
    /// Affine chart `p_{I0} = 1` around the invariant subspace
    /// `I0 = {n-p, …, n-1}`.
    fn new(n: u32, p: u32) -> Self {
        let all: Vec<u32> = (0..n).collect();
        let i0: Vec<u32> = (n - p..n).collect();
        let w0: i64 = i0.iter().map(|k| *k as i64).sum();
        let mut coords = BTreeMap::new();
        let mut weights = BTreeMap::new();
        for (k, subset) in combinations(&all, p as usize).into_iter().enumerate() {
            if subset == i0 {
                coords.insert(subset, MultiPoly::one());
                continue;
            }
            let v = Var::Aux(k as u16);
            weights.insert(v, w0 - subset.iter().map(|s| *s as i64).sum::<i64>());
            coords.insert(subset, MultiPoly::var(v));
        }
        Plucker { coords, weights }
    }

    fn get(&self, seq: &[u32]) -> MultiPoly {
        match sort_sign(seq) {
            Some((s, sorted)) => self.coords[&sorted].scale(&Scalar::from_integer(s.into())),
            None => MultiPoly::zero(),
        }
    }

    /// Quadratic Plücker relations.
    fn relations(&self, n: u32, p: u32) -> Vec<MultiPoly> {
        let all: Vec<u32> = (0..n).collect();
        let mut out = Vec::new();
        if p == 0 || p == n {
            return out;
        }
        for i in combinations(&all, p as usize - 1) {
            for j in combinations(&all, p as usize + 1) {
                let mut rel = MultiPoly::zero();
                for l in 0..j.len() {
                    let mut left = i.clone();
                    left.push(j[l]);
                    let right: Vec<u32> = j.iter().enumerate().filter(|(k, _)| *k != l).map(|(_, x)| *x).collect();
                    let term = &self.get(&left) * &self.get(&right);
                    rel = if l % 2 == 0 { &rel + &term } else { &rel - &term };
                }
                if !rel.is_zero() {
                    out.push(rel);
                }
            }
        }
        out
    }

    /// Components of `e·ω`, `e` acting on `∧^p k[z]/zⁿ` as a derivation
    /// with `e(z^k) = z^{k+1}`.
    fn derivation(&self, n: u32) -> BTreeMap<Vec<u32>, MultiPoly> {
        let mut out: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        for (subset, coord) in &self.coords {
            for j in 0..subset.len() {
                if subset[j] + 1 >= n {
                    continue;
                }
                let mut seq = subset.clone();
                seq[j] += 1;
                if let Some((s, sorted)) = sort_sign(&seq) {
                    let e = out.entry(sorted).or_default();
                    *e = &*e + &coord.scale(&Scalar::from_integer(s.into()));
                }
            }
        }
        out
    }
}

fn weighted_series(std: &[Monomial], weights: &BTreeMap<Var, i64>) -> QPoly {
    let mut acc = QPoly(vec![0]);
    for m in std {
        let w: i64 = m.pairs().iter().map(|(v, e)| weights[v] * *e as i64).sum();
        acc = acc.add(&QPoly::q_power(w as usize));
    }
    acc
}

/// Dimension of the coordinate ring of `Gr_p(n)^e`: the Plücker ideal plus
/// the conditions that `e·ω` be proportional to `ω`.
pub fn carell_dim(n: u32, p: u32) -> Result<CarellReport, CarellError> {
    if n > MAX_N {
        return Err(CarellError::DegreeOverflow(n));
    }
    if p > n {
        return Err(CarellError::OutOfRange { n, p });
    }
    let pl = Plucker::new(n, p);
    let mut gens = pl.relations(n, p);
    let d = pl.derivation(n);
    let zero = MultiPoly::zero();
    let subsets: Vec<&Vec<u32>> = pl.coords.keys().collect();
    for a in 0..subsets.len() {
        for b in a + 1..subsets.len() {
            let (i, j) = (subsets[a], subsets[b]);
            let minor = &(&pl.coords[i] * d.get(j).unwrap_or(&zero)) - &(&pl.coords[j] * d.get(i).unwrap_or(&zero));
            if !minor.is_zero() {
                gens.push(minor);
            }
        }
    }
    let vars: Vec<Var> = pl.weights.keys().copied().collect();
    let basis = groebner_basis(&gens);
    let std = standard_monomials(&basis, &vars).ok_or(CarellError::Infinite)?;
    Ok(CarellReport {
        n,
        p,
        dimension: std.len(),
        hilbert: weighted_series(&std, &pl.weights),
        binomial: binomial(n, p),
        gaussian: gaussian_binomial(n, p).expect("in range"),
    })
}

/// Hilbert series of the scheme of monic `P` of degree `β` dividing `zⁿ`:
/// `k[c_1..c_β] / (coefficients of zⁿ mod P)` with `c_k` of weight `k`.
pub fn divisor_scheme_series(n: u32, beta: u32) -> Result<QPoly, CarellError> {
    if beta > n {
        return Err(CarellError::OutOfRange { n, p: beta });
    }
    let c: Vec<MultiPoly> = (1..=beta as u16).map(|k| MultiPoly::var(Var::Aux(k))).collect();
    // z^β ≡ -(c_1 z^{β-1} + … + c_β); reduce z^n as a vector of z-coefficients.
    let b = beta as usize;
    let mut rem: Vec<MultiPoly> = vec![MultiPoly::zero(); (n as usize).max(b) + 1];
    rem[n as usize] = MultiPoly::one();
    for deg in (b..=n as usize).rev() {
        let top = std::mem::take(&mut rem[deg]);
        if top.is_zero() || b == 0 {
            rem[deg] = top;
            continue;
        }
        for k in 1..=b {
            rem[deg - k] = &rem[deg - k] - &(&top * &c[k - 1]);
        }
    }
    let gens: Vec<MultiPoly> = if b == 0 { rem.iter().filter(|p| !p.is_zero()).cloned().collect() } else { rem[..b].to_vec() };
    let vars: Vec<Var> = (1..=beta as u16).map(Var::Aux).collect();
    let weights: BTreeMap<Var, i64> = vars.iter().map(|v| (*v, if let Var::Aux(k) = v { *k as i64 } else { 0 })).collect();
    if b == 0 {
        return Ok(QPoly::one());
    }
    let basis = groebner_basis(&gens);
    let std = standard_monomials(&basis, &vars).ok_or(CarellError::Infinite)?;
    Ok(weighted_series(&std, &weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(carell_dim(2, 1).unwrap().dimension, 2);
        assert_eq!(carell_dim(3, 1).unwrap().dimension, 3);
        assert_eq!(carell_dim(3, 0).unwrap().dimension, 1);
        assert!(matches!(carell_dim(5, 1), Err(CarellError::DegreeOverflow(5))));
    }

    #[test]
    fn all_small_grassmannians() {
        for n in 0..=MAX_N {
            for p in 0..=n {
                let r = carell_dim(n, p).unwrap();
                assert!(r.consistent(), "{:?}", r);
            }
        }
    }

    #[test]
    fn divisor_scheme_matches_gaussian() {
        for n in 0..=4 {
            for b in 0..=n {
                assert_eq!(divisor_scheme_series(n, b).unwrap(), gaussian_binomial(n, b).unwrap());
            }
        }
    }
}
