//! Quivers, their doubles, Nakajima weights and the dilation torus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fgl::Character;
use crate::symalg::Var;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QuiverError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}` in weights")]
    UnknownArrow(String),
    #[error("dilation basis must have 2 rows of length rank <= 2")]
    BadDilation,
    #[error("malformed input: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// An arrow of the double `H ⊔ H*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoubleArrow {
    pub arrow: usize,
    pub star: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverSpec {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl QuiverSpec {
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String, String)>) -> Result<Self, QuiverError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(QuiverError::DuplicateVertex(v.clone()));
            }
        }
        let index = |name: &str| {
            vertices.iter().position(|v| v == name).ok_or_else(|| QuiverError::UnknownVertex(name.to_string()))
        };
        let mut ids = BTreeSet::new();
        let mut out = Vec::new();
        for (id, tail, head) in arrows {
            if id.ends_with('*') || !ids.insert(id.clone()) {
                return Err(QuiverError::DuplicateArrow(id));
            }
            out.push(Arrow { tail: index(&tail)?, head: index(&head)?, id });
        }
        Ok(QuiverSpec { vertices, arrows: out })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, QuiverError> {
        self.vertices.iter().position(|v| v == name).ok_or_else(|| QuiverError::UnknownVertex(name.to_string()))
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// `H ⊔ H*`: every arrow followed by its reverse.
    pub fn double(&self) -> Vec<DoubleArrow> {
        (0..self.arrows.len())
            .flat_map(|a| [DoubleArrow { arrow: a, star: false }, DoubleArrow { arrow: a, star: true }])
            .collect()
    }

    pub fn tail(&self, h: DoubleArrow) -> usize {
        let a = &self.arrows[h.arrow];
        if h.star { a.head } else { a.tail }
    }

    pub fn head(&self, h: DoubleArrow) -> usize {
        let a = &self.arrows[h.arrow];
        if h.star { a.tail } else { a.head }
    }

    pub fn arrow_name(&self, h: DoubleArrow) -> String {
        let id = &self.arrows[h.arrow].id;
        if h.star { format!("{}*", id) } else { id.clone() }
    }

    pub fn loops(&self) -> Vec<&Arrow> {
        self.arrows.iter().filter(|a| a.tail == a.head).collect()
    }

    pub fn has_loops(&self) -> bool {
        self.arrows.iter().any(|a| a.tail == a.head)
    }

    /// Arrows reversed.
    pub fn opposite(&self) -> QuiverSpec {
        QuiverSpec {
            vertices: self.vertices.clone(),
            arrows: self.arrows.iter().map(|a| Arrow { id: a.id.clone(), tail: a.head, head: a.tail }).collect(),
        }
    }

    /// `Q(i,j)`: arrows between `i` and `j` in either direction, loops on the
    /// diagonal.
    pub fn incidence_form(&self) -> Vec<Vec<i64>> {
        let n = self.num_vertices();
        let mut q = vec![vec![0; n]; n];
        for a in &self.arrows {
            if a.tail == a.head {
                q[a.tail][a.tail] += 1;
            } else {
                q[a.tail][a.head] += 1;
                q[a.head][a.tail] += 1;
            }
        }
        q
    }

    /// `m(h_p) = a+2-2p`, `m(h_p*) = -a+2p` for the arrows `h_1..h_a`
    /// sharing an ordered (tail, head) pair.
    pub fn default_nakajima(&self) -> NakajimaWeights {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (k, a) in self.arrows.iter().enumerate() {
            groups.entry((a.tail, a.head)).or_default().push(k);
        }
        let mut w = BTreeMap::new();
        for members in groups.values() {
            let a = members.len() as i64;
            for (pos, k) in members.iter().enumerate() {
                let p = pos as i64 + 1;
                w.insert(DoubleArrow { arrow: *k, star: false }, a + 2 - 2 * p);
                w.insert(DoubleArrow { arrow: *k, star: true }, -a + 2 * p);
            }
        }
        NakajimaWeights(w)
    }
}

/// `m : H ⊔ H* → ℤ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NakajimaWeights(pub BTreeMap<DoubleArrow, i64>);

impl NakajimaWeights {
    pub fn get(&self, h: DoubleArrow) -> i64 {
        self.0.get(&h).copied().unwrap_or(0)
    }

    pub fn constant(q: &QuiverSpec, value: i64) -> Self {
        NakajimaWeights(q.double().into_iter().map(|h| (h, value)).collect())
    }
}

/// Subtorus `D ⊆ 𝔾_m²` with integer basis: a 2×r matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationTorus {
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
}

impl DilationTorus {
    pub fn new(basis: Vec<Vec<i64>>) -> Result<Self, QuiverError> {
        if basis.len() != 2 {
            return Err(QuiverError::BadDilation);
        }
        let rank = basis[0].len();
        if rank > 2 || basis[1].len() != rank {
            return Err(QuiverError::BadDilation);
        }
        Ok(DilationTorus { rank, basis })
    }

    /// The diagonal `𝔾_m ⊂ 𝔾_m²`.
    pub fn diagonal() -> Self {
        DilationTorus { rank: 1, basis: vec![vec![1], vec![1]] }
    }

    pub fn full() -> Self {
        DilationTorus { rank: 2, basis: vec![vec![1, 0], vec![0, 1]] }
    }

    pub fn trivial() -> Self {
        DilationTorus { rank: 0, basis: vec![vec![], vec![]] }
    }

    pub fn coords(&self) -> Vec<Var> {
        (1..=self.rank as u16).map(Var::Dilation).collect()
    }

    /// Restriction of `t1^a t2^b` to `D`.
    pub fn restrict(&self, a: i64, b: i64) -> Character {
        Character::from_terms(
            (0..self.rank).map(|k| (Var::Dilation(k as u16 + 1), a * self.basis[0][k] + b * self.basis[1][k])),
        )
    }

    pub fn omega(&self) -> Character {
        self.restrict(1, 1)
    }
}

/// Per-arrow outcome of the dilation constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowCheck {
    pub arrow: String,
    pub pass: bool,
    pub is_loop: bool,
}

/// Quiver together with its quantization parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub spec: QuiverSpec,
    pub weights: NakajimaWeights,
    pub dilation: DilationTorus,
}

impl Quiver {
    /// Default weights and the diagonal dilation torus.
    pub fn with_defaults(spec: QuiverSpec) -> Self {
        let weights = spec.default_nakajima();
        Quiver { spec, weights, dilation: DilationTorus::diagonal() }
    }

    pub fn with_dilation(mut self, d: DilationTorus) -> Self {
        self.dilation = d;
        self
    }

    pub fn with_weights(mut self, w: NakajimaWeights) -> Self {
        self.weights = w;
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.spec.num_vertices()
    }

    /// `μ_h`: the D-character by which `h ∈ H ⊔ H*` is twisted.
    pub fn mu(&self, h: DoubleArrow) -> Character {
        let m = self.weights.get(h);
        if h.star { self.dilation.restrict(0, m) } else { self.dilation.restrict(m, 0) }
    }

    pub fn omega(&self) -> Character {
        self.dilation.omega()
    }

    pub fn validate_dilation(&self) -> Vec<ArrowCheck> {
        let omega = self.omega();
        self.spec
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let m1 = self.weights.get(DoubleArrow { arrow: k, star: false });
                let m2 = self.weights.get(DoubleArrow { arrow: k, star: true });
                ArrowCheck { arrow: a.id.clone(), pass: self.dilation.restrict(m1, m2) == omega, is_loop: a.tail == a.head }
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self, QuiverError> {
        let file: QuiverFile = serde_json::from_str(text).map_err(|e| QuiverError::Parse(e.to_string()))?;
        file.build()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let weights: BTreeMap<String, i64> =
            self.weights.0.iter().map(|(h, m)| (self.spec.arrow_name(*h), *m)).collect();
        serde_json::json!({
            "vertices": self.spec.vertices(),
            "arrows": self.spec.arrows().iter().map(|a| serde_json::json!({
                "id": a.id, "tail": self.spec.vertex_name(a.tail), "head": self.spec.vertex_name(a.head)
            })).collect::<Vec<_>>(),
            "weights": weights,
            "dilation": self.dilation,
        })
    }

    pub fn parse_dim(&self, text: &str) -> Result<DimVector, QuiverError> {
        DimVector::parse(text, self.num_vertices())
    }

    /// Comma-separated vertex names.
    pub fn parse_word(&self, text: &str) -> Result<ColorWord, QuiverError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(ColorWord(Vec::new()));
        }
        text.split(',').map(|s| self.spec.vertex_index(s.trim())).collect::<Result<_, _>>().map(ColorWord)
    }

    /// Flag type `"1,0|0,1"`.
    pub fn parse_flag(&self, text: &str) -> Result<Vec<DimVector>, QuiverError> {
        text.split('|').map(|part| self.parse_dim(part)).collect()
    }
}

#[derive(Deserialize)]
struct QuiverFile {
    vertices: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowFile>,
    #[serde(default)]
    weights: Option<BTreeMap<String, i64>>,
    #[serde(default)]
    dilation: Option<DilationFile>,
}

#[derive(Deserialize)]
struct ArrowFile {
    id: String,
    tail: String,
    head: String,
}

#[derive(Deserialize)]
struct DilationFile {
    rank: usize,
    basis: Vec<Vec<i64>>,
}

impl QuiverFile {
    fn build(self) -> Result<Quiver, QuiverError> {
        let spec = QuiverSpec::new(self.vertices, self.arrows.into_iter().map(|a| (a.id, a.tail, a.head)).collect())?;
        let mut weights = spec.default_nakajima();
        if let Some(w) = self.weights {
            for (name, m) in w {
                let (id, star) = match name.strip_suffix('*') {
                    Some(id) => (id, true),
                    None => (name.as_str(), false),
                };
                let arrow = spec.arrows().iter().position(|a| a.id == id).ok_or(QuiverError::UnknownArrow(name.clone()))?;
                weights.0.insert(DoubleArrow { arrow, star }, m);
            }
        }
        let dilation = match self.dilation {
            Some(d) => {
                let t = DilationTorus::new(d.basis)?;
                if t.rank != d.rank {
                    return Err(QuiverError::BadDilation);
                }
                t
            }
            None => DilationTorus::diagonal(),
        };
        Ok(Quiver { spec, weights, dilation })
    }
}

/// Element of `ℕ[I]`, indexed by vertex position.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimVector(v)
    }

    pub fn parse(text: &str, n: usize) -> Result<Self, QuiverError> {
        let parts: Vec<u32> = text
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| QuiverError::Parse(format!("bad dimension `{}`", text))))
            .collect::<Result<_, _>>()?;
        if parts.len() != n {
            return Err(QuiverError::Parse(format!("dimension vector `{}` needs {} entries", text, n)));
        }
        Ok(DimVector(parts))
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|d| *d == 0)
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        let n = self.len().max(other.len());
        DimVector((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// Every `β ≤ self`, in lexicographic order.
    pub fn below(&self) -> Vec<DimVector> {
        let mut out = vec![Vec::new()];
        for &d in &self.0 {
            out = out.into_iter().flat_map(|pre: Vec<u32>| (0..=d).map(move |k| [pre.clone(), vec![k]].concat())).collect();
        }
        out.into_iter().map(DimVector).collect()
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Sequence of vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorWord(pub Vec<usize>);

impl ColorWord {
    pub fn abelianize(&self, n: usize) -> DimVector {
        let mut v = DimVector::zero(n);
        for &i in &self.0 {
            v.0[i] += 1;
        }
        v
    }

    pub fn concat(&self, other: &ColorWord) -> ColorWord {
        ColorWord([self.0.clone(), other.0.clone()].concat())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All words of length `len` over `n` letters.
    pub fn all(n: usize, len: usize) -> Vec<ColorWord> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out.into_iter().flat_map(|w: Vec<usize>| (0..n).map(move |i| [w.clone(), vec![i]].concat())).collect();
        }
        out.into_iter().map(ColorWord).collect()
    }
}

/// Small named quivers.
pub mod catalog {
    use super::QuiverSpec;

    fn build(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> QuiverSpec {
        QuiverSpec::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            arrows.iter().map(|(a, t, h)| (a.to_string(), t.to_string(), h.to_string())).collect(),
        )
        .expect("catalog quiver")
    }

    pub fn a1() -> QuiverSpec {
        build(&["i"], &[])
    }

    pub fn a2() -> QuiverSpec {
        build(&["1", "2"], &[("h1", "1", "2")])
    }

    pub fn a3() -> QuiverSpec {
        build(&["1", "2", "3"], &[("h1", "1", "2"), ("h2", "2", "3")])
    }

    /// `1 → 2 ← 3`.
    pub fn a3_alt() -> QuiverSpec {
        build(&["1", "2", "3"], &[("h1", "1", "2"), ("h2", "3", "2")])
    }

    pub fn kronecker() -> QuiverSpec {
        build(&["1", "2"], &[("h1", "1", "2"), ("h2", "1", "2")])
    }

    pub fn triple() -> QuiverSpec {
        build(&["1", "2"], &[("h1", "1", "2"), ("h2", "1", "2"), ("h3", "1", "2")])
    }

    /// `1 ⇄ 2`.
    pub fn opposite_pair() -> QuiverSpec {
        build(&["1", "2"], &[("h1", "1", "2"), ("h2", "2", "1")])
    }

    pub fn cyclic3() -> QuiverSpec {
        build(&["1", "2", "3"], &[("h1", "1", "2"), ("h2", "2", "3"), ("h3", "3", "1")])
    }

    pub fn jordan() -> QuiverSpec {
        build(&["1"], &[("h1", "1", "1")])
    }

    /// Loop-free quivers with at most three vertices and three arrows.
    pub fn loop_free_test_set() -> Vec<(&'static str, QuiverSpec)> {
        vec![
            ("A1", a1()),
            ("A2", a2()),
            ("A3", a3()),
            ("A3'", a3_alt()),
            ("Kronecker", kronecker()),
            ("triple", triple()),
            ("opposite", opposite_pair()),
            ("cyclic", cyclic3()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_weights_single_and_double_arrow() {
        let a2 = catalog::a2().default_nakajima();
        assert_eq!(a2.get(DoubleArrow { arrow: 0, star: false }), 1);
        assert_eq!(a2.get(DoubleArrow { arrow: 0, star: true }), 1);
        let k = catalog::kronecker().default_nakajima();
        let vals: Vec<i64> = catalog::kronecker().double().iter().map(|h| k.get(*h)).collect();
        assert_eq!(vals, vec![2, 0, 0, 2]);
        assert!(catalog::a1().default_nakajima().0.is_empty());
    }

    #[test]
    fn dilation_validation_examples() {
        let q = Quiver::with_defaults(catalog::kronecker());
        assert!(q.validate_dilation().iter().all(|c| c.pass));
        let full = q.clone().with_dilation(DilationTorus::full());
        assert!(!full.validate_dilation().iter().all(|c| c.pass));
        let ones = full.clone().with_weights(NakajimaWeights::constant(&catalog::kronecker(), 1));
        assert!(ones.validate_dilation().iter().all(|c| c.pass));
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(catalog::a2().incidence_form(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(catalog::jordan().incidence_form(), vec![vec![1]]);
        assert_eq!(catalog::a1().incidence_form(), vec![vec![0]]);
        let q = catalog::a3_alt();
        assert_eq!(q.incidence_form(), q.opposite().incidence_form());
    }

    #[test]
    fn json_roundtrip_and_defaults() {
        let text = r#"{"vertices":["1","2"],"arrows":[{"id":"h1","tail":"1","head":"2"}],"weights":{"h1":1,"h1*":1},"dilation":{"rank":1,"basis":[[1],[1]]}}"#;
        let q = Quiver::from_json(text).unwrap();
        assert_eq!(q, Quiver::with_defaults(catalog::a2()));
        let again = Quiver::from_json(&q.to_json().to_string()).unwrap();
        assert_eq!(again, q);
        let bare = Quiver::from_json(r#"{"vertices":["1","2"],"arrows":[{"id":"h1","tail":"1","head":"2"}]}"#).unwrap();
        assert_eq!(bare, q);
    }

    #[test]
    fn json_errors() {
        assert!(matches!(
            Quiver::from_json(r#"{"vertices":["1"],"arrows":[{"id":"h","tail":"1","head":"9"}]}"#),
            Err(QuiverError::UnknownVertex(_))
        ));
        assert!(matches!(Quiver::from_json(r#"{"vertices":["1","1"]}"#), Err(QuiverError::DuplicateVertex(_))));
        assert!(matches!(Quiver::from_json("{"), Err(QuiverError::Parse(_))));
    }

    #[test]
    fn omega_and_mu_on_diagonal() {
        let q = Quiver::with_defaults(catalog::a2());
        assert_eq!(q.omega(), Character::from_terms([(Var::Dilation(1), 2)]));
        assert_eq!(q.mu(DoubleArrow { arrow: 0, star: true }), Character::var(Var::Dilation(1)));
    }

    #[test]
    fn words_and_dims() {
        let q = Quiver::with_defaults(catalog::a2());
        let w = q.parse_word("1,2,1").unwrap();
        assert_eq!(w.abelianize(2), DimVector(vec![2, 1]));
        assert_eq!(q.parse_flag("1,0|0,1").unwrap().len(), 2);
        assert_eq!(DimVector(vec![1, 2]).below().len(), 6);
        assert_eq!(ColorWord::all(2, 3).len(), 8);
    }
}
