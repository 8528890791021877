//! Symmetrization over coset representatives of colored block permutations.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use super::rational::RationalFunction;
use super::var::Var;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SymmetrizeError {
    #[error("variable {0} appears in more than one block")]
    Overlap(Var),
}

/// A block of variables sharing one color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub color: usize,
    pub vars: Vec<Var>,
}

impl Block {
    pub fn new(color: usize, vars: Vec<Var>) -> Self {
        Block { color, vars }
    }
}

/// Coset representatives of `Π S(block)` inside `Π_color S(union of the
/// color's blocks)`, each as a variable substitution. Enumerated in a fixed
/// canonical order.
pub fn coset_representatives(blocks: &[Block]) -> Result<Vec<BTreeMap<Var, Var>>, SymmetrizeError> {
    let mut seen = BTreeSet::new();
    for b in blocks {
        for v in &b.vars {
            if !seen.insert(*v) {
                return Err(SymmetrizeError::Overlap(*v));
            }
        }
    }
    let mut by_color: BTreeMap<usize, Vec<&Block>> = BTreeMap::new();
    for b in blocks {
        by_color.entry(b.color).or_default().push(b);
    }
    let mut reps = vec![BTreeMap::new()];
    for color_blocks in by_color.values() {
        let mut union: Vec<Var> = color_blocks.iter().flat_map(|b| b.vars.iter().copied()).collect();
        union.sort();
        let sizes: Vec<usize> = color_blocks.iter().map(|b| b.vars.len()).collect();
        let mut local = Vec::new();
        ordered_partitions(&union, &sizes, &mut Vec::new(), &mut local);
        let mut next = Vec::with_capacity(reps.len() * local.len());
        for r in &reps {
            for parts in &local {
                let mut m: BTreeMap<Var, Var> = r.clone();
                for (block, targets) in color_blocks.iter().zip(parts) {
                    let mut src = block.vars.clone();
                    src.sort();
                    for (s, t) in src.iter().zip(targets) {
                        m.insert(*s, *t);
                    }
                }
                next.push(m);
            }
        }
        reps = next;
    }
    Ok(reps)
}

fn ordered_partitions(pool: &[Var], sizes: &[usize], acc: &mut Vec<Vec<Var>>, out: &mut Vec<Vec<Vec<Var>>>) {
    let Some((&k, rest)) = sizes.split_first() else {
        out.push(acc.clone());
        return;
    };
    for subset in combinations(pool, k) {
        let remaining: Vec<Var> = pool.iter().copied().filter(|v| !subset.contains(v)).collect();
        acc.push(subset);
        ordered_partitions(&remaining, rest, acc, out);
        acc.pop();
    }
}

/// All `k`-subsets of `pool`, each sorted, in lexicographic order.
pub fn combinations<T: Copy>(pool: &[T], k: usize) -> Vec<Vec<T>> {
    fn rec<T: Copy>(pool: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= pool.len() {
        rec(pool, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Applies a variable substitution (variables outside the map are fixed).
pub fn permute(f: &RationalFunction, sigma: &BTreeMap<Var, Var>) -> RationalFunction {
    f.rename(&|v| sigma.get(&v).copied().unwrap_or(v))
}

/// `Σ_σ σ(f)` over the coset representatives of the block structure.
///
/// Terms are built in parallel and summed sequentially in representative
/// order, so the result does not depend on the thread count.
pub fn symmetrize(f: &RationalFunction, blocks: &[Block]) -> Result<RationalFunction, SymmetrizeError> {
    let reps = coset_representatives(blocks)?;
    let terms: Vec<RationalFunction> = reps.par_iter().map(|s| permute(f, s)).collect();
    Ok(RationalFunction::sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::poly::{scalar, MultiPoly};

    fn v(k: u16) -> Var {
        Var::torus(1, 0, k)
    }
    fn p(k: u16) -> MultiPoly {
        MultiPoly::var(v(k))
    }
    fn omega() -> MultiPoly {
        MultiPoly::var(Var::Dilation(1))
    }
    fn singletons(n: u16) -> Vec<Block> {
        (1..=n).map(|k| Block::new(0, vec![v(k)])).collect()
    }

    #[test]
    fn antisymmetric_input_gives_zero() {
        let f = RationalFunction::from_poly(&(&p(1) - &p(2)));
        assert!(symmetrize(&f, &singletons(2)).unwrap().is_zero());
    }

    #[test]
    fn two_point_kernel_symmetrizes_to_two() {
        let d = &p(2) - &p(1);
        let f = &RationalFunction::from_poly(&(&d + &omega())) / &RationalFunction::from_poly(&d);
        let s = symmetrize(&f, &singletons(2)).unwrap();
        assert_eq!(s, RationalFunction::constant(scalar(2)));
    }

    #[test]
    fn three_point_kernel_symmetrizes_to_six() {
        let mut f = RationalFunction::one();
        for i in 1..=3 {
            for j in (i + 1)..=3 {
                let d = &p(j) - &p(i);
                f = &f * &(&RationalFunction::from_poly(&(&d + &omega())) / &RationalFunction::from_poly(&d));
            }
        }
        let s = symmetrize(&f, &singletons(3)).unwrap();
        assert!(s.equals(&RationalFunction::constant(scalar(6))));
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let blocks = vec![Block::new(0, vec![v(1)]), Block::new(0, vec![v(1), v(2)])];
        assert_eq!(
            symmetrize(&RationalFunction::one(), &blocks),
            Err(SymmetrizeError::Overlap(v(1)))
        );
    }

    #[test]
    fn representative_counts_are_multinomial() {
        let blocks = vec![Block::new(0, vec![v(1), v(2)]), Block::new(0, vec![v(3), v(4)])];
        assert_eq!(coset_representatives(&blocks).unwrap().len(), 6);
        let colored = vec![
            Block::new(0, vec![v(1)]),
            Block::new(0, vec![v(2)]),
            Block::new(1, vec![Var::torus(1, 1, 1)]),
        ];
        assert_eq!(coset_representatives(&colored).unwrap().len(), 2);
    }
}
