//! Shifted diagonals, `(m,τ)`-disjointness and the factorization of the local
//! line bundle.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fgl::{Character, FglError, FormalGroupLaw};
use crate::quiver::{ColorWord, DimVector, Quiver, QuiverError};
use crate::symalg::{RationalFunction, Scalar, Var};
use crate::thom::{biextension_kernel, flag_kernel, HomBlock, ThomError, TorusChart};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LocalityError {
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Thom(#[from] ThomError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("configurations are not (m,τ)-disjoint")]
    NotDisjoint,
    #[error("configuration weight {got} does not match word weight {expected}")]
    WeightMismatch { got: String, expected: String },
    #[error("point configuration: {0}")]
    Parse(String),
}

/// Points of one colored divisor, per vertex.
pub type Divisor = BTreeMap<usize, Vec<Scalar>>;

/// Two configurations and a dilation point `τ*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    pub tau: Vec<Scalar>,
    pub d1: Divisor,
    pub d2: Divisor,
}

#[derive(Deserialize)]
struct ConfigFile {
    tau: Vec<serde_json::Value>,
    #[serde(rename = "D1")]
    d1: BTreeMap<String, Vec<serde_json::Value>>,
    #[serde(rename = "D2", default)]
    d2: BTreeMap<String, Vec<serde_json::Value>>,
}

/// Parses an integer or a `"p/q"` string.
pub fn parse_scalar(v: &serde_json::Value) -> Result<Scalar, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(|k| Scalar::from_integer(k.into()))
            .ok_or_else(|| format!("`{}` is not an integer; write fractions as \"p/q\"", n)),
        serde_json::Value::String(s) => s.trim().parse::<Scalar>().map_err(|_| format!("bad rational `{}`", s)),
        other => Err(format!("bad number `{}`", other)),
    }
}

impl PointConfig {
    pub fn from_json(q: &Quiver, text: &str) -> Result<Self, LocalityError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| LocalityError::Parse(e.to_string()))?;
        let scalars = |vals: &[serde_json::Value]| -> Result<Vec<Scalar>, LocalityError> {
            vals.iter().map(|v| parse_scalar(v).map_err(LocalityError::Parse)).collect()
        };
        let divisor = |m: &BTreeMap<String, Vec<serde_json::Value>>| -> Result<Divisor, LocalityError> {
            let mut out = Divisor::new();
            for (name, pts) in m {
                out.insert(q.spec.vertex_index(name)?, scalars(pts)?);
            }
            Ok(out)
        };
        Ok(PointConfig { tau: scalars(&file.tau)?, d1: divisor(&file.d1)?, d2: divisor(&file.d2)? })
    }

    pub fn weight(d: &Divisor, n: usize) -> DimVector {
        DimVector((0..n).map(|i| d.get(&i).map(|p| p.len() as u32).unwrap_or(0)).collect())
    }

    pub fn swapped(&self) -> PointConfig {
        PointConfig { tau: self.tau.clone(), d1: self.d2.clone(), d2: self.d1.clone() }
    }

    fn dilation_point(&self) -> BTreeMap<Var, Scalar> {
        self.tau.iter().enumerate().map(|(k, t)| (Var::Dilation(k as u16 + 1), t.clone())).collect()
    }

    /// Chart assignment with `D1` on slot 1 and `D2` on slot 2.
    pub fn assignment(&self) -> BTreeMap<Var, Scalar> {
        let mut a = self.dilation_point();
        for (slot, d) in [(1u16, &self.d1), (2u16, &self.d2)] {
            for (i, pts) in d {
                for (s, p) in pts.iter().enumerate() {
                    a.insert(Var::torus(slot, *i as u16, s as u16 + 1), p.clone());
                }
            }
        }
        a
    }
}

/// One family of shifted diagonals between two colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalDescriptor {
    /// `Delta_h`, `Delta_i` or `Delta_i(tau)`.
    pub family: String,
    pub label: String,
    pub first_color: String,
    pub second_color: String,
    /// Shift of the second point relative to the first, as written in the
    /// definition.
    pub shift: String,
    /// Shift at which the corresponding biextension factor vanishes.
    pub kernel_shift: String,
    pub condition: String,
}

fn shift_value(fgl: &FormalGroupLaw, mu: &Character, tau: &[Scalar]) -> Result<Scalar, FglError> {
    let point: BTreeMap<Var, Scalar> = tau.iter().enumerate().map(|(k, t)| (Var::Dilation(k as u16 + 1), t.clone())).collect();
    fgl.character_at(mu, &point)
}

fn op_symbol(fgl: &FormalGroupLaw) -> &'static str {
    if matches!(fgl, FormalGroupLaw::Multiplicative) { "*" } else { "+" }
}

/// Shifted diagonals between configurations of weights `v1` (first factor)
/// and `v2` (second factor).
pub fn shifted_diagonals(
    q: &Quiver,
    fgl: &FormalGroupLaw,
    v1: &DimVector,
    v2: &DimVector,
    tau: &[Scalar],
) -> Result<Vec<DiagonalDescriptor>, LocalityError> {
    let op = op_symbol(fgl);
    let mut out = Vec::new();
    for h in q.spec.double() {
        let (a, b) = (q.spec.tail(h), q.spec.head(h));
        if v1.get(a) == 0 || v2.get(b) == 0 {
            continue;
        }
        let t = shift_value(fgl, &q.mu(h), tau)?;
        let inv = fgl.point_neg(&t)?;
        out.push(DiagonalDescriptor {
            family: "Delta_h".into(),
            label: q.spec.arrow_name(h),
            first_color: q.spec.vertex_name(a).into(),
            second_color: q.spec.vertex_name(b).into(),
            shift: t.to_string(),
            kernel_shift: inv.to_string(),
            condition: format!("y = x {} {}", op, t),
        });
    }
    let w = shift_value(fgl, &q.omega(), tau)?;
    let id = fgl.identity_point()?;
    for i in 0..q.num_vertices() {
        if v1.get(i) == 0 || v2.get(i) == 0 {
            continue;
        }
        let name = q.spec.vertex_name(i).to_string();
        out.push(DiagonalDescriptor {
            family: "Delta_i".into(),
            label: name.clone(),
            first_color: name.clone(),
            second_color: name.clone(),
            shift: id.to_string(),
            kernel_shift: id.to_string(),
            condition: "x = y".into(),
        });
        // The ω-shift acts on the first factor: (y + τ, y).
        let inv = fgl.point_neg(&w)?;
        out.push(DiagonalDescriptor {
            family: "Delta_i(tau)".into(),
            label: name.clone(),
            first_color: name.clone(),
            second_color: name,
            shift: inv.to_string(),
            kernel_shift: inv.to_string(),
            condition: format!("x = y {} {}", op, w),
        });
    }
    Ok(out)
}

fn disjoint_shifted(fgl: &FormalGroupLaw, xs: &[Scalar], ys: &[Scalar], shift: &Scalar) -> Result<bool, FglError> {
    for x in xs {
        let moved = fgl.point_add(x, shift)?;
        if ys.contains(&moved) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn one_order(q: &Quiver, fgl: &FormalGroupLaw, d1: &Divisor, d2: &Divisor, tau: &[Scalar]) -> Result<bool, FglError> {
    let empty = Vec::new();
    let pts = |d: &Divisor, i: usize| d.get(&i).unwrap_or(&empty).clone();
    let w = shift_value(fgl, &q.omega(), tau)?;
    let id = fgl.identity_point()?;
    for i in 0..q.num_vertices() {
        let (a, b) = (pts(d1, i), pts(d2, i));
        for s in [id.clone(), w.clone(), fgl.point_neg(&w)?] {
            if !disjoint_shifted(fgl, &a, &b, &s)? {
                return Ok(false);
            }
        }
    }
    for h in q.spec.double() {
        let t = shift_value(fgl, &q.mu(h), tau)?;
        let (a, b) = (pts(d1, q.spec.tail(h)), pts(d2, q.spec.head(h)));
        for s in [t.clone(), fgl.point_neg(&t)?] {
            if !disjoint_shifted(fgl, &b, &a, &s)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(m,τ)`-disjointness, checked for `(D1,D2)` and `(D2,D1)`.
pub fn is_m_tau_disjoint(q: &Quiver, fgl: &FormalGroupLaw, cfg: &PointConfig) -> Result<bool, LocalityError> {
    Ok(one_order(q, fgl, &cfg.d1, &cfg.d2, &cfg.tau)? && one_order(q, fgl, &cfg.d2, &cfg.d1, &cfg.tau)?)
}

/// A λ-factor that vanishes at the configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingFactor {
    /// `D1->D2` or `D2->D1`.
    pub order: String,
    pub factor: String,
    /// `zero` (numerator) or `pole` (denominator).
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrivializationReport {
    pub disjoint: bool,
    /// `ℒ_{D1,D2} · ℒ_{D2,D1}` at the configuration, when finite.
    pub value: Option<String>,
    pub vanishing: Vec<VanishingFactor>,
    /// Disjoint pairs give a finite nonzero value; other pairs name a factor.
    pub pass: bool,
}

fn lambda_value(fgl: &FormalGroupLaw, chi: &Character, point: &BTreeMap<Var, Scalar>) -> Result<Scalar, FglError> {
    let a = fgl.character_at(chi, point)?;
    Ok(match fgl {
        FormalGroupLaw::Multiplicative => Scalar::one() - a.recip(),
        _ => a,
    })
}

fn biextension_characters(q: &Quiver, v1: &DimVector, v2: &DimVector) -> Vec<(Character, i64)> {
    let chart = TorusChart::new(vec![v1.clone(), v2.clone()]);
    let mut blocks: Vec<HomBlock> = Vec::new();
    for i in 0..q.num_vertices() {
        blocks.push(HomBlock::new((1, i), (2, i), q.omega(), 1));
        blocks.push(HomBlock::new((1, i), (2, i), Character::zero(), -1));
    }
    for h in q.spec.double() {
        let (a, b) = (q.spec.tail(h), q.spec.head(h));
        blocks.push(HomBlock::new((2, a), (1, b), q.mu(h), 1));
        blocks.push(HomBlock::new((1, a), (2, b), q.mu(h), 1));
    }
    blocks.iter().flat_map(|bl| bl.characters(&chart).into_iter().map(move |c| (c, bl.multiplicity))).collect()
}

/// Evaluates `ℒ_{D1,D2} ℒ_{D2,D1}` factor by factor.
pub fn verify_trivialization(q: &Quiver, fgl: &FormalGroupLaw, cfg: &PointConfig) -> Result<TrivializationReport, LocalityError> {
    let n = q.num_vertices();
    let disjoint = is_m_tau_disjoint(q, fgl, cfg)?;
    let mut value = Scalar::one();
    let mut vanishing = Vec::new();
    for (label, c) in [("D1->D2", cfg.clone()), ("D2->D1", cfg.swapped())] {
        let (v1, v2) = (PointConfig::weight(&c.d1, n), PointConfig::weight(&c.d2, n));
        let point = c.assignment();
        for (chi, e) in biextension_characters(q, &v1, &v2) {
            let l = lambda_value(fgl, &chi, &point)?;
            if l.is_zero() {
                vanishing.push(VanishingFactor {
                    order: label.into(),
                    factor: format!("lambda({})", chi),
                    kind: if e > 0 { "zero" } else { "pole" }.into(),
                });
            } else {
                value *= crate::symalg::rational::pow_scalar(&l, e);
            }
        }
    }
    let value = vanishing.is_empty().then(|| value.to_string());
    let pass = if disjoint { value.is_some() } else { !vanishing.is_empty() };
    Ok(TrivializationReport { disjoint, value, vanishing, pass })
}

/// The symmetric kernel `ℒ_{D1,D2} ℒ_{D2,D1}` as a function, for
/// cross-checking [`verify_trivialization`].
pub fn symmetric_kernel(q: &Quiver, fgl: &FormalGroupLaw, v1: &DimVector, v2: &DimVector) -> Result<RationalFunction, LocalityError> {
    let k12 = biextension_kernel(q, fgl, v1, v2)?.function;
    let k21 = biextension_kernel(q, fgl, v2, v1)?.function;
    let swap = |v: Var| match v {
        Var::Torus { slot, vertex, index } => Var::torus(3 - slot, vertex, index),
        other => other,
    };
    Ok(&k12 * &k21.rename(&swap))
}

/// The local line bundle kernel on the word chart: the complete flag
/// `(e_{i1}, …, e_{iN})`, with coordinate `x[k, i_k, 1]` for letter `k`.
pub fn word_kernel(q: &Quiver, fgl: &FormalGroupLaw, word: &ColorWord) -> Result<RationalFunction, LocalityError> {
    if word.is_empty() {
        return Ok(RationalFunction::one());
    }
    let n = q.num_vertices();
    let flag: Vec<DimVector> = word.0.iter().map(|&i| DimVector::unit(n, i)).collect();
    Ok(flag_kernel(q, fgl, &flag)?.function)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub identity_holds: bool,
    /// The cross factor evaluated at the configuration.
    pub value: Option<String>,
}

/// Checks `ℒ_{γ1γ2} = ℒ_{γ1} · ℒ_{γ2} · ℒ_{ab(γ1),ab(γ2)}` exactly, with the
/// biextension's `s`-th point of color `i` identified with the `s`-th
/// occurrence of `i` in the word.
pub fn verify_m_locality(
    q: &Quiver,
    fgl: &FormalGroupLaw,
    g1: &ColorWord,
    g2: &ColorWord,
    cfg: Option<&PointConfig>,
) -> Result<LocalityReport, LocalityError> {
    let n = q.num_vertices();
    let (v1, v2) = (g1.abelianize(n), g2.abelianize(n));
    if let Some(c) = cfg {
        for (d, v) in [(&c.d1, &v1), (&c.d2, &v2)] {
            let got = PointConfig::weight(d, n);
            if &got != v {
                return Err(LocalityError::WeightMismatch { got: got.to_string(), expected: v.to_string() });
            }
        }
        if !is_m_tau_disjoint(q, fgl, c)? {
            return Err(LocalityError::NotDisjoint);
        }
    }
    let whole = word_kernel(q, fgl, &g1.concat(g2))?;
    let off = g1.len() as u16;
    let left = word_kernel(q, fgl, g1)?;
    let right = word_kernel(q, fgl, g2)?.rename(&|v| match v {
        Var::Torus { slot, vertex, index } => Var::torus(slot + off, vertex, index),
        other => other,
    });
    let occurrence = |word: &ColorWord, shift: u16| -> BTreeMap<(u16, u16), u16> {
        let mut seen = BTreeMap::new();
        let mut out = BTreeMap::new();
        for (k, &i) in word.0.iter().enumerate() {
            let s = seen.entry(i).or_insert(0u16);
            *s += 1;
            out.insert((i as u16, *s), k as u16 + 1 + shift);
        }
        out
    };
    let (o1, o2) = (occurrence(g1, 0), occurrence(g2, off));
    let cross = biextension_kernel(q, fgl, &v1, &v2)?.function;
    let to_word = |v: Var| match v {
        Var::Torus { slot: 1, vertex, index } => Var::torus(o1[&(vertex, index)], vertex, 1),
        Var::Torus { slot: 2, vertex, index } => Var::torus(o2[&(vertex, index)], vertex, 1),
        other => other,
    };
    let cross_word = cross.rename(&to_word);
    let identity_holds = whole.equals(&(&(&left * &right) * &cross_word));
    let value = cfg.map(|c| cross.evaluate(&c.assignment()).map(|v| v.to_string()).unwrap_or_else(|e| e.to_string()));
    Ok(LocalityReport { identity_holds, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{catalog, DilationTorus};
    use crate::symalg::{ratio, scalar};

    fn a1() -> Quiver {
        Quiver::with_defaults(catalog::a1()).with_dilation(DilationTorus::new(vec![vec![1], vec![0]]).unwrap())
    }
    fn cfg(tau: i64, d1: &[i64], d2: &[i64]) -> PointConfig {
        let div = |p: &[i64]| -> Divisor {
            if p.is_empty() { Divisor::new() } else { [(0, p.iter().map(|x| scalar(*x)).collect())].into() }
        };
        PointConfig { tau: vec![scalar(tau)], d1: div(d1), d2: div(d2) }
    }

    #[test]
    fn disjointness_examples() {
        let fgl = FormalGroupLaw::Additive;
        assert!(is_m_tau_disjoint(&a1(), &fgl, &cfg(1, &[0], &[5])).unwrap());
        assert!(!is_m_tau_disjoint(&a1(), &fgl, &cfg(1, &[0], &[1])).unwrap());
        assert!(!is_m_tau_disjoint(&a1(), &fgl, &cfg(7, &[0], &[0])).unwrap());
    }

    #[test]
    fn trivialization_value() {
        let fgl = FormalGroupLaw::Additive;
        let r = verify_trivialization(&a1(), &fgl, &cfg(1, &[0], &[5])).unwrap();
        assert_eq!(r.value, Some(ratio(24, 25).to_string()));
        assert!(r.pass);
        let k = symmetric_kernel(&a1(), &fgl, &DimVector(vec![1]), &DimVector(vec![1])).unwrap();
        assert_eq!(k.evaluate(&cfg(1, &[0], &[5]).assignment()).unwrap(), ratio(24, 25));
        let bad = verify_trivialization(&a1(), &fgl, &cfg(1, &[0], &[1])).unwrap();
        assert!(bad.pass && !bad.disjoint);
        assert_eq!(bad.vanishing.len(), 1);
        assert_eq!(bad.vanishing[0].kind, "zero");
        let empty = verify_trivialization(&a1(), &fgl, &cfg(1, &[0], &[])).unwrap();
        assert_eq!(empty.value, Some("1".into()));
    }

    #[test]
    fn shifted_diagonal_families() {
        let fgl = FormalGroupLaw::Additive;
        let one = DimVector(vec![1]);
        let d = shifted_diagonals(&a1(), &fgl, &one, &one, &[scalar(1)]).unwrap();
        let fams: Vec<&str> = d.iter().map(|x| x.family.as_str()).collect();
        assert_eq!(fams, vec!["Delta_i", "Delta_i(tau)"]);
        let a2 = Quiver::with_defaults(catalog::a2());
        let both = DimVector(vec![1, 1]);
        let d = shifted_diagonals(&a2, &fgl, &both, &both, &[scalar(3)]).unwrap();
        assert_eq!(d.iter().filter(|x| x.family == "Delta_h").count(), 2);
        let zero = shifted_diagonals(&a2, &fgl, &both, &both, &[scalar(0)]).unwrap();
        assert!(zero.iter().all(|x| x.shift == "0"));
    }

    #[test]
    fn locality_identity_examples() {
        let a2 = Quiver::with_defaults(catalog::a2());
        for fgl in [FormalGroupLaw::Additive, FormalGroupLaw::Multiplicative, FormalGroupLaw::multiplicative_series(4).unwrap()] {
            let r = verify_m_locality(&a1(), &fgl, &ColorWord(vec![0]), &ColorWord(vec![0]), None).unwrap();
            assert!(r.identity_holds);
            let r = verify_m_locality(&a2, &fgl, &ColorWord(vec![0]), &ColorWord(vec![1]), None).unwrap();
            assert!(r.identity_holds);
            let r = verify_m_locality(&a2, &fgl, &ColorWord(vec![0, 1]), &ColorWord(vec![]), None).unwrap();
            assert!(r.identity_holds);
        }
    }

    #[test]
    fn locality_requires_disjointness() {
        let fgl = FormalGroupLaw::Additive;
        let w = ColorWord(vec![0]);
        assert_eq!(
            verify_m_locality(&a1(), &fgl, &w, &w, Some(&cfg(1, &[0], &[1]))),
            Err(LocalityError::NotDisjoint)
        );
        assert!(verify_m_locality(&a1(), &fgl, &w, &w, Some(&cfg(1, &[0], &[5]))).unwrap().identity_holds);
    }

    #[test]
    fn config_json() {
        let c = PointConfig::from_json(&a1(), r#"{"tau":[1],"D1":{"i":[0]},"D2":{"i":[5, "1/2"]}}"#).unwrap();
        assert_eq!(c.d2[&0], vec![scalar(5), ratio(1, 2)]);
        assert!(PointConfig::from_json(&a1(), r#"{"tau":[1],"D1":{"z":[0]}}"#).is_err());
    }
}
