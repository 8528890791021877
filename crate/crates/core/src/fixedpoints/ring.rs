//! `F_p[ε]/(ε^e)` and Laurent polynomials in `z` over it.

use std::collections::BTreeMap;
use std::fmt;

/// Element of `F_p[ε]/(ε^e)` as its `ε`-coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub Vec<u64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncatedRing {
    pub p: u64,
    pub e: usize,
}

impl TruncatedRing {
    pub fn new(p: u64, e: usize) -> Self {
        assert!(p >= 2 && e >= 1);
        TruncatedRing { p, e }
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![0; self.e])
    }

    pub fn one(&self) -> Elem {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> Elem {
        let mut v = vec![0; self.e];
        v[0] = c % self.p;
        Elem(v)
    }

    pub fn epsilon(&self) -> Elem {
        let mut v = vec![0; self.e];
        if self.e > 1 {
            v[1] = 1;
        }
        Elem(v)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = vec![0; self.e];
        for (i, x) in a.0.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.0.iter().enumerate().take(self.e - i) {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        Elem(out)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.0.iter().all(|x| *x == 0)
    }

    /// Members of the nilradical `(ε)`.
    pub fn is_nilpotent(&self, a: &Elem) -> bool {
        a.0[0] == 0
    }

    /// All `p^{e-1}` elements of the nilradical, in lexicographic order.
    pub fn nilradical(&self) -> Vec<Elem> {
        let mut out = vec![vec![0u64]];
        for _ in 1..self.e {
            out = out.into_iter().flat_map(|v| (0..self.p).map(move |c| [v.clone(), vec![c]].concat())).collect();
        }
        out.into_iter().map(Elem).collect()
    }

    pub fn display(&self, a: &Elem) -> String {
        let mut parts = Vec::new();
        for (k, c) in a.0.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let coeff = if *c == 1 && k > 0 { String::new() } else { c.to_string() };
            parts.push(match k {
                0 => coeff,
                1 => format!("{}e", coeff),
                _ => format!("{}e^{}", coeff, k),
            });
        }
        if parts.is_empty() { "0".into() } else { parts.join(" + ") }
    }
}

/// Finite Laurent polynomial `Σ c_k z^k`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent(pub BTreeMap<i64, Elem>);

impl Laurent {
    pub fn monomial(ring: &TruncatedRing, c: Elem, k: i64) -> Self {
        let mut l = Laurent::default();
        if !ring.is_zero(&c) {
            l.0.insert(k, c);
        }
        l
    }

    pub fn one(ring: &TruncatedRing) -> Self {
        Self::monomial(ring, ring.one(), 0)
    }

    pub fn add(&self, ring: &TruncatedRing, other: &Laurent) -> Laurent {
        let mut out = self.0.clone();
        for (k, c) in &other.0 {
            let v = match out.get(k) {
                Some(a) => ring.add(a, c),
                None => c.clone(),
            };
            if ring.is_zero(&v) {
                out.remove(k);
            } else {
                out.insert(*k, v);
            }
        }
        Laurent(out)
    }

    pub fn neg(&self, ring: &TruncatedRing) -> Laurent {
        Laurent(self.0.iter().map(|(k, c)| (*k, ring.neg(c))).collect())
    }

    pub fn mul(&self, ring: &TruncatedRing, other: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (i, a) in &self.0 {
            for (j, b) in &other.0 {
                out = out.add(ring, &Laurent::monomial(ring, ring.mul(a, b), i + j));
            }
        }
        out
    }

    pub fn shift(&self, k: i64) -> Laurent {
        Laurent(self.0.iter().map(|(i, c)| (i + k, c.clone())).collect())
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }

    /// No negative powers of `z`.
    pub fn in_o(&self) -> bool {
        self.min_degree().map(|k| k >= 0).unwrap_or(true)
    }

    /// Inverse of `1 + (nilpotent)`: `Σ_{k<e} (1 − Q)^k`.
    pub fn inverse_unipotent(&self, ring: &TruncatedRing) -> Laurent {
        let one = Laurent::one(ring);
        let n = one.add(ring, &self.neg(ring));
        let mut term = one.clone();
        let mut acc = one;
        for _ in 1..ring.e {
            term = term.mul(ring, &n);
            acc = acc.add(ring, &term);
        }
        acc
    }

    pub fn display(&self, ring: &TruncatedRing) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        self.0
            .iter()
            .rev()
            .map(|(k, c)| {
                let coeff = ring.display(c);
                let coeff = if coeff.contains('+') { format!("({})", coeff) } else { coeff };
                match (*k, coeff.as_str()) {
                    (0, _) => coeff.clone(),
                    (1, "1") => "z".into(),
                    (_, "1") => format!("z^{}", k),
                    (1, _) => format!("{}z", coeff),
                    _ => format!("{}z^{}", coeff, k),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Long division by a monic polynomial; returns the remainder.
pub fn rem_monic(ring: &TruncatedRing, a: &Laurent, monic: &Laurent) -> Laurent {
    let d = monic.max_degree().expect("nonzero divisor");
    let mut r = a.clone();
    while let Some(top) = r.max_degree() {
        if top < d {
            break;
        }
        let c = r.0[&top].clone();
        let t = Laurent::monomial(ring, c, top - d);
        r = r.add(ring, &t.mul(ring, monic).neg(ring));
    }
    r
}
