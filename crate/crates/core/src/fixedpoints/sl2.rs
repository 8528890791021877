//! Lattice enumeration for `SL_2` over `F_p[ε]/(ε^e)`.
//!
//! A point of the torus-fixed orbit at level `n` over the thickened base is
//! the lattice `L = ⟨Q⁻¹ z⁻ⁿ e₁, Q zⁿ e₂⟩` with `Q = 1 + q₁z⁻¹ + … + q_s z⁻ˢ`
//! and nilpotent `q_k`. It lies in the closure `S̄₀` iff `zⁿQ ∈ O`, and then
//! in `S̄⁻_m` iff `z^m (zⁿQ)⁻¹ ∈ O`, i.e. iff the monic polynomial `zⁿQ`
//! divides `z^m`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::ring::{rem_monic, Elem, Laurent, TruncatedRing};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Sl2Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("nilpotency order must be at least 2")]
    OrderTooSmall,
    #[error("window {window} is too small for level {n} and order {e} (need at least {need})")]
    WindowTooSmall { window: u32, n: u32, e: usize, need: u32 },
    #[error("enumeration of {0} candidates is too large")]
    TooLarge(u128),
}

/// Largest number of candidates enumerated.
pub const MAX_CANDIDATES: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionRow {
    pub q: String,
    pub polynomial: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipRow {
    pub m: u32,
    /// Members of `S̄₀ ∩ S̄⁻_m` by the lattice test.
    pub lattice_count: usize,
    /// Monic polynomials dividing `z^m` by long division.
    pub divisibility_count: usize,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sl2Report {
    pub p: u64,
    pub e: usize,
    pub n: u32,
    pub window: u32,
    pub candidates: usize,
    pub s0_count: usize,
    pub expected_count: u64,
    /// `Q ↦ zⁿQ` is a bijection onto monic degree-`n` polynomials with
    /// nilpotent lower coefficients.
    pub bijection: bool,
    pub table: Vec<BijectionRow>,
    pub membership: Vec<MembershipRow>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The lattice `⟨Q⁻¹z⁻ⁿe₁, Qzⁿe₂⟩` as its two generators.
pub fn lattice(ring: &TruncatedRing, q: &Laurent, n: u32) -> (Laurent, Laurent) {
    (q.inverse_unipotent(ring).shift(-(n as i64)), q.shift(n as i64))
}

/// `S̄₀` test: the inverse of the first generator, `zⁿQ`, has no negative powers.
pub fn in_s0(ring: &TruncatedRing, q: &Laurent, n: u32) -> bool {
    let (_, g2) = lattice(ring, q, n);
    g2.in_o()
}

/// `S̄⁻_m` test: `z^m · (zⁿQ)⁻¹ ∈ O`.
pub fn in_s_minus(ring: &TruncatedRing, q: &Laurent, n: u32, m: u32) -> bool {
    let (g1, _) = lattice(ring, q, n);
    g1.shift(m as i64).in_o()
}

fn candidates(ring: &TruncatedRing, s: u32) -> Vec<Laurent> {
    let nil = ring.nilradical();
    let mut out = vec![Laurent::one(ring)];
    for k in 1..=s as i64 {
        out = out
            .into_iter()
            .flat_map(|q| nil.iter().map(move |c| q.add(ring, &Laurent::monomial(ring, c.clone(), -k))).collect::<Vec<_>>())
            .collect();
    }
    out
}

fn monic_nilpotent(ring: &TruncatedRing, n: u32) -> BTreeSet<Vec<(i64, Elem)>> {
    let mut out = vec![Laurent::monomial(ring, ring.one(), n as i64)];
    for k in 0..n as i64 {
        out = out
            .into_iter()
            .flat_map(|p| ring.nilradical().into_iter().map(move |c| p.add(ring, &Laurent::monomial(ring, c, k))).collect::<Vec<_>>())
            .collect();
    }
    out.into_iter().map(|l| l.0.into_iter().collect()).collect()
}

/// Enumerates all `Q` of degree at most the window `N` in `z⁻¹`.
pub fn sl2_enumerate(p: u64, e: usize, n: u32, window: u32) -> Result<Sl2Report, Sl2Error> {
    if !is_prime(p) {
        return Err(Sl2Error::NotPrime(p));
    }
    if e < 2 {
        return Err(Sl2Error::OrderTooSmall);
    }
    let need = n + e as u32;
    if window < need {
        return Err(Sl2Error::WindowTooSmall { window, n, e, need });
    }
    let total = (p as u128).checked_pow((e as u32 - 1) * window).unwrap_or(u128::MAX);
    if total > MAX_CANDIDATES {
        return Err(Sl2Error::TooLarge(total));
    }
    let ring = TruncatedRing::new(p, e);
    let all = candidates(&ring, window);
    let members: Vec<&Laurent> = all.par_iter().filter(|q| in_s0(&ring, q, n)).collect::<Vec<_>>();
    let images: Vec<Laurent> = members.iter().map(|q| q.shift(n as i64)).collect();
    let image_set: BTreeSet<Vec<(i64, Elem)>> = images.iter().map(|l| l.0.clone().into_iter().collect()).collect();
    let target = monic_nilpotent(&ring, n);
    let bijection = image_set.len() == images.len() && image_set == target;
    let table = members
        .iter()
        .zip(&images)
        .map(|(q, poly)| BijectionRow { q: q.display(&ring), polynomial: poly.display(&ring) })
        .collect();
    let mut membership = Vec::new();
    for m in 0..=(2 * n).max(1) {
        let lattice_count = members.iter().filter(|q| in_s_minus(&ring, q, n, m)).count();
        let zm = Laurent::monomial(&ring, ring.one(), m as i64);
        let divisibility_count = images.iter().filter(|poly| rem_monic(&ring, &zm, poly).0.is_empty()).count();
        let agree = members
            .iter()
            .zip(&images)
            .all(|(q, poly)| in_s_minus(&ring, q, n, m) == rem_monic(&ring, &zm, poly).0.is_empty());
        membership.push(MembershipRow { m, lattice_count, divisibility_count, agree });
    }
    Ok(Sl2Report {
        p,
        e,
        n,
        window,
        candidates: all.len(),
        s0_count: members.len(),
        expected_count: p.pow((e as u32 - 1) * n),
        bijection,
        table,
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_over_dual_numbers() {
        let r = sl2_enumerate(2, 2, 1, 4).unwrap();
        assert_eq!(r.candidates, 16);
        assert_eq!(r.s0_count, 2);
        assert!(r.bijection);
        let m1 = &r.membership[1];
        assert_eq!((m1.lattice_count, m1.divisibility_count), (1, 1));
        assert!(r.membership.iter().all(|row| row.agree));
    }

    #[test]
    fn level_zero_is_base_point() {
        let r = sl2_enumerate(2, 2, 0, 2).unwrap();
        assert_eq!(r.s0_count, 1);
        assert_eq!(r.table[0].q, "1");
    }

    #[test]
    fn errors() {
        assert_eq!(sl2_enumerate(4, 2, 1, 4), Err(Sl2Error::NotPrime(4)));
        assert!(matches!(sl2_enumerate(2, 2, 3, 4), Err(Sl2Error::WindowTooSmall { .. })));
        assert_eq!(sl2_enumerate(2, 1, 1, 4), Err(Sl2Error::OrderTooSmall));
    }
}
