//! Gaussian binomials, Poincaré polynomials of total Grassmannians, and the
//! colored subscheme lattice.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::quiver::DimVector;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("binomial index {p} out of range for n = {n}")]
pub struct RangeError {
    pub n: u32,
    pub p: u32,
}

/// Polynomial in `q` with integer coefficients, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QPoly(pub Vec<i64>);

impl QPoly {
    pub fn one() -> Self {
        QPoly(vec![1])
    }

    pub fn q_power(k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = 1;
        QPoly(v)
    }

    fn trimmed(mut self) -> Self {
        while self.0.len() > 1 && self.0.last() == Some(&0) {
            self.0.pop();
        }
        if self.0.is_empty() {
            self.0.push(0);
        }
        self
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        QPoly((0..n).map(|k| self.0.get(k).unwrap_or(&0) + other.0.get(k).unwrap_or(&0)).collect()).trimmed()
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = vec![0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly(out).trimmed()
    }

    pub fn at_one(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| match (k, c) {
                (0, _) => c.to_string(),
                (1, 1) => "q".into(),
                (1, _) => format!("{}q", c),
                (_, 1) => format!("q^{}", k),
                _ => format!("{}q^{}", c, k),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// The q-binomial `[n choose p]_q`.
pub fn gaussian_binomial(n: u32, p: u32) -> Result<QPoly, RangeError> {
    if p > n {
        return Err(RangeError { n, p });
    }
    // Pascal rule [n, p] = [n-1, p-1] + q^p [n-1, p].
    let mut row = vec![QPoly::one()];
    for m in 1..=n as usize {
        let mut next = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let left = if k > 0 { row[k - 1].clone() } else { QPoly(vec![0]) };
            let right = if k < m { QPoly::q_power(k).mul(&row[k]) } else { QPoly(vec![0]) };
            next.push(left.add(&right));
        }
        row = next;
    }
    Ok(row[p as usize].clone())
}

/// Poincaré polynomial of `∏_i ⊔_p Gr(p, α_i)`.
pub fn quiver_grass_poincare(alpha: &DimVector) -> QPoly {
    let mut acc = QPoly::one();
    for &a in &alpha.0 {
        let mut total = QPoly(vec![0]);
        for p in 0..=a {
            total = total.add(&gaussian_binomial(a, p).expect("in range"));
        }
        acc = acc.mul(&total);
    }
    acc
}

/// `∏_i {0..α_i}` ordered componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoredSubschemeLattice {
    pub alpha: DimVector,
    /// One point per grade `β ≤ α`.
    pub points: Vec<DimVector>,
}

impl ColoredSubschemeLattice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn leq(a: &DimVector, b: &DimVector) -> bool {
        a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
    }

    /// Number of points of grade `β`.
    pub fn count_at(&self, beta: &DimVector) -> usize {
        self.points.iter().filter(|p| *p == beta).count()
    }
}

pub fn hilbert_colored(alpha: &DimVector) -> ColoredSubschemeLattice {
    ColoredSubschemeLattice { alpha: alpha.clone(), points: alpha.below() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_binomial(2, 1).unwrap().to_string(), "1 + q");
        assert_eq!(gaussian_binomial(3, 1).unwrap().to_string(), "1 + q + q^2");
        assert_eq!(gaussian_binomial(5, 0).unwrap(), QPoly::one());
        assert_eq!(gaussian_binomial(4, 2).unwrap().0, vec![1, 1, 2, 1, 1]);
        assert!(gaussian_binomial(1, 2).is_err());
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(quiver_grass_poincare(&DimVector(vec![2])).to_string(), "3 + q");
        assert_eq!(quiver_grass_poincare(&DimVector(vec![1])).at_one(), 2);
        assert_eq!(quiver_grass_poincare(&DimVector(vec![1, 1])).at_one(), 4);
    }

    #[test]
    fn colored_lattice_examples() {
        assert_eq!(hilbert_colored(&DimVector(vec![2])).len(), 3);
        assert_eq!(hilbert_colored(&DimVector(vec![1, 1])).len(), 4);
        let empty = hilbert_colored(&DimVector(vec![0]));
        assert_eq!(empty.len(), 1);
        let l = hilbert_colored(&DimVector(vec![2, 1]));
        for b in DimVector(vec![2, 1]).below() {
            assert_eq!(l.count_at(&b), 1);
        }
    }
}
