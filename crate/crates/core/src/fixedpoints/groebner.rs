//! Buchberger's algorithm over the rationals (graded-lex order) and standard
//! monomial counting for zero-dimensional ideals.

use std::collections::BTreeSet;

use crate::symalg::{Monomial, MultiPoly, Var};

fn monic(p: &MultiPoly) -> MultiPoly {
    match p.leading() {
        Some((_, c)) => p.scale(&c.recip()),
        None => p.clone(),
    }
}

fn s_polynomial(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let (fm, fc) = f.leading().unwrap();
    let (gm, gc) = g.leading().unwrap();
    let l = fm.lcm(gm);
    let a = f.mul_monomial(&fm.quotient_of(&l)).scale(&fc.recip());
    let b = g.mul_monomial(&gm.quotient_of(&l)).scale(&gc.recip());
    &a - &b
}

fn reduce(p: &MultiPoly, basis: &[MultiPoly]) -> MultiPoly {
    p.div_rem(basis).1
}

/// Reduced Gröbner basis.
pub fn groebner_basis(generators: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut basis: Vec<MultiPoly> = generators.iter().filter(|g| !g.is_zero()).map(monic).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let (fm, gm) = (basis[i].leading().unwrap().0.clone(), basis[j].leading().unwrap().0.clone());
        // Coprime leading monomials: the S-polynomial reduces to zero.
        if fm.lcm(&gm).degree() == fm.degree() + gm.degree() {
            continue;
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(monic(&r));
            for i in 0..k {
                pairs.push((i, k));
            }
        }
    }
    // Minimalize, then inter-reduce.
    let mut minimal: Vec<MultiPoly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let lm = g.leading().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(l, h)| {
            let hm = h.leading().unwrap().0;
            l != k && hm.divides(lm) && (hm != lm || l < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<MultiPoly> = minimal.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, g)| g.clone()).collect();
        let lead = minimal[k].leading().unwrap();
        let tail = &minimal[k] - &MultiPoly::monomial(lead.0.clone(), lead.1.clone());
        reduced.push(monic(&(&MultiPoly::monomial(lead.0.clone(), lead.1.clone()) + &reduce(&tail, &others))));
    }
    reduced.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    reduced
}

/// Monomials in `vars` outside the leading-term ideal. `None` if the
/// quotient is infinite-dimensional.
pub fn standard_monomials(basis: &[MultiPoly], vars: &[Var]) -> Option<Vec<Monomial>> {
    let leads: Vec<Monomial> = basis.iter().filter_map(|g| g.leading().map(|(m, _)| m.clone())).collect();
    if leads.iter().any(|m| m.is_one()) {
        return Some(Vec::new());
    }
    for v in vars {
        let pure = leads.iter().any(|m| m.pairs().len() == 1 && m.pairs()[0].0 == *v);
        if !pure {
            return None;
        }
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut frontier = vec![Monomial::one()];
    while let Some(m) = frontier.pop() {
        if !seen.insert(m.clone()) || leads.iter().any(|l| l.divides(&m)) {
            continue;
        }
        out.push(m.clone());
        for v in vars {
            frontier.push(m.mul(&Monomial::var(*v)));
        }
    }
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::scalar;

    fn v(k: u16) -> MultiPoly {
        MultiPoly::var(Var::Aux(k))
    }

    #[test]
    fn twisted_cubic_style_ideal() {
        // (x^2 - y, x y - 1): x^3 = 1, quotient dimension 3.
        let g = groebner_basis(&[&v(0).pow(2) - &v(1), &(&v(0) * &v(1)) - &MultiPoly::one()]);
        let std = standard_monomials(&g, &[Var::Aux(0), Var::Aux(1)]).unwrap();
        assert_eq!(std.len(), 3);
    }

    #[test]
    fn unit_ideal_and_infinite_quotient() {
        let g = groebner_basis(&[v(0), &v(0) - &MultiPoly::constant(scalar(1))]);
        assert_eq!(g, vec![MultiPoly::one()]);
        assert_eq!(standard_monomials(&g, &[Var::Aux(0)]).unwrap().len(), 0);
        let h = groebner_basis(&[v(0)]);
        assert!(standard_monomials(&h, &[Var::Aux(0), Var::Aux(1)]).is_none());
    }

    #[test]
    fn monomial_ideal_counts() {
        let g = groebner_basis(&[v(0).pow(2), v(1).pow(3), &v(0) * &v(1)]);
        assert_eq!(standard_monomials(&g, &[Var::Aux(0), Var::Aux(1)]).unwrap().len(), 4);
    }
}
