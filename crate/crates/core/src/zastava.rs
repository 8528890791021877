//! Poset induction on colored divisors: subscheme lattices, ranks of
//! `Ind^P(L)`, and Segre coordinates of generic fibers.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fgl::{FglError, FormalGroupLaw};
use crate::locality::{is_m_tau_disjoint, parse_scalar, Divisor, LocalityError, PointConfig};
use crate::quiver::{DimVector, Quiver, QuiverError};
use crate::symalg::rational::pow_scalar;
use crate::symalg::{MultiPoly, RationalFunction, Scalar, Var};
use crate::thom::biextension_kernel;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ZastavaError {
    #[error("poset relation is not antisymmetric ({0} and {1})")]
    NotAntisymmetric(usize, usize),
    #[error("poset: {0}")]
    Parse(String),
    #[error("configuration is not generic: {0}")]
    NonGeneric(String),
    #[error("divisors share support or are not (m,τ)-disjoint")]
    NotDisjoint,
    #[error(transparent)]
    Locality(#[from] LocalityError),
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// Finite poset given by its reflexive-transitive order relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    pub names: Vec<String>,
    leq: Vec<Vec<bool>>,
}

#[derive(Deserialize)]
struct PosetFile {
    elements: Vec<String>,
    #[serde(default)]
    relations: Vec<(String, String)>,
}

impl Poset {
    /// Closure of the given cover relations `a ≤ b`.
    pub fn new(names: Vec<String>, relations: &[(usize, usize)]) -> Result<Self, ZastavaError> {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (k, row) in leq.iter_mut().enumerate() {
            row[k] = true;
        }
        for &(a, b) in relations {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        if let Some((i, j)) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| leq[i][j] && leq[j][i]) {
            return Err(ZastavaError::NotAntisymmetric(i, j));
        }
        Ok(Poset { names, leq })
    }

    pub fn chain(m: usize) -> Self {
        let rel: Vec<(usize, usize)> = (1..m).map(|k| (k - 1, k)).collect();
        Poset::new((0..m).map(|k| k.to_string()).collect(), &rel).expect("chain")
    }

    pub fn antichain(k: usize) -> Self {
        Poset::new((0..k).map(|i| i.to_string()).collect(), &[]).expect("antichain")
    }

    pub fn point() -> Self {
        Poset::chain(1)
    }

    /// `chain:m`, `antichain:k`, or JSON `{"elements":[..],"relations":[[a,b],..]}`.
    pub fn parse(text: &str) -> Result<Self, ZastavaError> {
        let t = text.trim();
        let count = |s: &str| s.trim().parse::<usize>().map_err(|_| ZastavaError::Parse(format!("bad size in `{}`", t)));
        if let Some(m) = t.strip_prefix("chain:") {
            return Ok(Poset::chain(count(m)?));
        }
        if let Some(k) = t.strip_prefix("antichain:") {
            return Ok(Poset::antichain(count(k)?));
        }
        let file: PosetFile = serde_json::from_str(t).map_err(|e| ZastavaError::Parse(e.to_string()))?;
        let index = |name: &str| {
            file.elements.iter().position(|e| e == name).ok_or_else(|| ZastavaError::Parse(format!("unknown element `{}`", name)))
        };
        let rel = file.relations.iter().map(|(a, b)| Ok((index(a)?, index(b)?))).collect::<Result<Vec<_>, ZastavaError>>()?;
        Poset::new(file.elements.clone(), &rel)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }
}

/// A point of a colored divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorPoint {
    pub id: String,
    pub color: String,
    pub multiplicity: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredDivisor {
    pub points: Vec<DivisorPoint>,
    coords: Vec<Option<Scalar>>,
}

impl ColoredDivisor {
    pub fn new(points: Vec<(String, String, u32)>) -> Result<Self, ZastavaError> {
        let mut seen = std::collections::BTreeSet::new();
        for (id, color, m) in &points {
            if *m == 0 {
                return Err(ZastavaError::Parse(format!("point `{}` has multiplicity 0", id)));
            }
            if !seen.insert((id.clone(), color.clone())) {
                return Err(ZastavaError::Parse(format!("point `{}:{}` repeated", id, color)));
            }
        }
        let n = points.len();
        Ok(ColoredDivisor {
            points: points
                .into_iter()
                .map(|(id, color, multiplicity)| DivisorPoint { id, color, multiplicity, coordinate: None })
                .collect(),
            coords: vec![None; n],
        })
    }

    pub fn empty() -> Self {
        ColoredDivisor { points: Vec::new(), coords: Vec::new() }
    }

    /// `a:i:2,b:j:1` (id, color, multiplicity; multiplicity defaults to 1).
    pub fn parse(text: &str) -> Result<Self, ZastavaError> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(Self::empty());
        }
        let mut pts = Vec::new();
        for part in t.split(',') {
            let f: Vec<&str> = part.trim().split(':').collect();
            let m = match f.len() {
                2 => 1,
                3 => f[2].parse::<u32>().map_err(|_| ZastavaError::Parse(format!("bad multiplicity in `{}`", part)))?,
                _ => return Err(ZastavaError::Parse(format!("expected id:color[:mult], got `{}`", part))),
            };
            pts.push((f[0].to_string(), f[1].to_string(), m));
        }
        Self::new(pts)
    }

    pub fn with_coordinates(mut self, coords: Vec<Scalar>) -> Self {
        for (p, c) in self.points.iter_mut().zip(&coords) {
            p.coordinate = Some(c.to_string());
        }
        self.coords = coords.into_iter().map(Some).collect();
        self
    }

    pub fn coordinate(&self, k: usize) -> Option<&Scalar> {
        self.coords.get(k).and_then(|c| c.as_ref())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `D′ ⊔ D″`.
    pub fn union(&self, other: &ColoredDivisor) -> ColoredDivisor {
        ColoredDivisor {
            points: [self.points.clone(), other.points.clone()].concat(),
            coords: [self.coords.clone(), other.coords.clone()].concat(),
        }
    }

    /// Total weight per color name.
    pub fn weight(&self) -> BTreeMap<String, u32> {
        let mut w = BTreeMap::new();
        for p in &self.points {
            *w.entry(p.color.clone()).or_insert(0) += p.multiplicity;
        }
        w
    }
}

/// `H_D`: sub-multiplicity vectors, ordered componentwise.
pub fn subscheme_lattice(d: &ColoredDivisor) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for p in &d.points {
        out = out.into_iter().flat_map(|v: Vec<u32>| (0..=p.multiplicity).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out
}

fn sub_leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Order-preserving maps `P → H_D`, each as one sub-multiplicity vector per
/// poset element.
pub fn monotone_maps(poset: &Poset, d: &ColoredDivisor) -> Vec<Vec<Vec<u32>>> {
    let lattice = subscheme_lattice(d);
    let n = poset.len();
    let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 0..n {
        partial = partial
            .into_par_iter()
            .flat_map_iter(|f| {
                let lattice = &lattice;
                (0..lattice.len()).filter_map(move |x| {
                    let ok = (0..k).all(|j| {
                        (!poset.leq(j, k) || sub_leq(&lattice[f[j]], &lattice[x]))
                            && (!poset.leq(k, j) || sub_leq(&lattice[x], &lattice[f[j]]))
                    });
                    ok.then(|| [f.clone(), vec![x]].concat())
                })
            })
            .collect();
    }
    partial.into_iter().map(|f| f.into_iter().map(|x| lattice[x].clone()).collect()).collect()
}

/// Rank of `Ind^P(L)` at `D`.
pub fn ind_rank(poset: &Poset, d: &ColoredDivisor) -> usize {
    monotone_maps(poset, d).len()
}

/// Segre data of a generic fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndFiberData {
    pub maps: Vec<Vec<Vec<u32>>>,
    /// `∏_p ℒ(D^p)` with the biextension cross terms.
    pub values: Vec<String>,
    /// The same with cross terms divided out.
    pub trivialized: Vec<String>,
    #[serde(skip)]
    pub raw_values: Vec<Scalar>,
    #[serde(skip)]
    pub raw_trivialized: Vec<Scalar>,
}

/// Evaluation context: quiver, backend, and the dilation point.
pub struct FiberContext<'a> {
    pub quiver: &'a Quiver,
    pub fgl: &'a FormalGroupLaw,
    pub tau: Vec<Scalar>,
    kernels: RefCell<BTreeMap<(DimVector, DimVector), RationalFunction>>,
}

impl<'a> FiberContext<'a> {
    pub fn new(quiver: &'a Quiver, fgl: &'a FormalGroupLaw, tau: Vec<Scalar>) -> Self {
        FiberContext { quiver, fgl, tau, kernels: RefCell::new(BTreeMap::new()) }
    }

    fn kernel(&self, v1: &DimVector, v2: &DimVector) -> Result<RationalFunction, ZastavaError> {
        let key = (v1.clone(), v2.clone());
        if let Some(k) = self.kernels.borrow().get(&key) {
            return Ok(k.clone());
        }
        let k = biextension_kernel(self.quiver, self.fgl, v1, v2).map_err(|e| ZastavaError::NonGeneric(e.to_string()))?.function;
        self.kernels.borrow_mut().insert(key, k.clone());
        Ok(k)
    }

    fn color(&self, name: &str) -> Result<usize, ZastavaError> {
        Ok(self.quiver.spec.vertex_index(name)?)
    }

    fn lambda_point(&self, z: &Scalar) -> Scalar {
        match self.fgl {
            FormalGroupLaw::Multiplicative => Scalar::one() - z.recip(),
            _ => z.clone(),
        }
    }

    fn single(&self, color: usize, z: &Scalar, k: u32) -> Divisor {
        [(color, vec![z.clone(); k as usize])].into()
    }

    /// `ℒ_{E1,E2} ℒ_{E2,E1}` for two point clusters.
    fn cross(&self, a: (usize, &Scalar, u32), b: (usize, &Scalar, u32)) -> Result<Scalar, ZastavaError> {
        if a.2 == 0 || b.2 == 0 {
            return Ok(Scalar::one());
        }
        let n = self.quiver.num_vertices();
        let cfg = PointConfig { tau: self.tau.clone(), d1: self.single(a.0, a.1, a.2), d2: self.single(b.0, b.1, b.2) };
        let (v1, v2) = (PointConfig::weight(&cfg.d1, n), PointConfig::weight(&cfg.d2, n));
        let k12 = self.kernel(&v1, &v2)?;
        let k21 = self.kernel(&v2, &v1)?;
        let x = k12.evaluate(&cfg.assignment()).map_err(|e| ZastavaError::NonGeneric(e.to_string()))?;
        let y = k21.evaluate(&cfg.swapped().assignment()).map_err(|e| ZastavaError::NonGeneric(e.to_string()))?;
        Ok(x * y)
    }

    /// Classical cross term from the incidence form:
    /// `(λ(z_b − z_a) λ(z_a − z_b))^{2 M(i,j) k_a k_b}`.
    fn classical_cross(&self, a: (usize, &Scalar, u32), b: (usize, &Scalar, u32)) -> Result<Scalar, ZastavaError> {
        let q = self.quiver.spec.incidence_form();
        let m = if a.0 == b.0 { 2 * q[a.0][a.0] } else { q[a.0][b.0] };
        let diff = |x: &Scalar, y: &Scalar| -> Result<Scalar, FglError> { self.fgl.point_add(x, &self.fgl.point_neg(y)?) };
        let l1 = self.lambda_point(&diff(b.1, a.1)?);
        let l2 = self.lambda_point(&diff(a.1, b.1)?);
        Ok(pow_scalar(&(l1 * l2), 2 * m * (a.2 as i64) * (b.2 as i64)))
    }
}

fn check_generic(ctx: &FiberContext, d: &ColoredDivisor) -> Result<Vec<(usize, Scalar, u32)>, ZastavaError> {
    let mut pts = Vec::new();
    for (k, p) in d.points.iter().enumerate() {
        let z = d.coordinate(k).ok_or_else(|| ZastavaError::NonGeneric(format!("point `{}` has no coordinate", p.id)))?.clone();
        if ctx.lambda_point(&z).is_zero() {
            return Err(ZastavaError::NonGeneric(format!("point `{}` sits at the origin", p.id)));
        }
        pts.push((ctx.color(&p.color)?, z, p.multiplicity));
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let cfg = PointConfig {
                tau: ctx.tau.clone(),
                d1: ctx.single(pts[a].0, &pts[a].1, 1),
                d2: ctx.single(pts[b].0, &pts[b].1, 1),
            };
            if pts[a].1 == pts[b].1 || !is_m_tau_disjoint(ctx.quiver, ctx.fgl, &cfg)? {
                return Err(ZastavaError::NonGeneric(format!(
                    "points `{}` and `{}` are not disjoint",
                    d.points[a].id, d.points[b].id
                )));
            }
        }
    }
    Ok(pts)
}

fn line_value(
    ctx: &FiberContext,
    pts: &[(usize, Scalar, u32)],
    sub: &[u32],
    classical: bool,
) -> Result<(Scalar, Scalar), ZastavaError> {
    let mut triv = Scalar::one();
    for ((_, z, _), k) in pts.iter().zip(sub) {
        triv *= pow_scalar(&ctx.lambda_point(z), *k as i64);
    }
    let mut cross = Scalar::one();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let ea = (pts[a].0, &pts[a].1, sub[a]);
            let eb = (pts[b].0, &pts[b].1, sub[b]);
            if ea.2 == 0 || eb.2 == 0 {
                continue;
            }
            cross *= if classical { ctx.classical_cross(ea, eb)? } else { ctx.cross(ea, eb)? };
        }
    }
    Ok((&triv * &cross, triv))
}

/// Segre coordinates of the fiber at a generic configuration. With
/// `classical`, cross terms come from the incidence form instead of the
/// quantum kernel.
pub fn ind_fiber(ctx: &FiberContext, poset: &Poset, d: &ColoredDivisor, classical: bool) -> Result<IndFiberData, ZastavaError> {
    let pts = check_generic(ctx, d)?;
    let maps = monotone_maps(poset, d);
    let mut raw_values = Vec::with_capacity(maps.len());
    let mut raw_trivialized = Vec::with_capacity(maps.len());
    for f in &maps {
        let mut v = Scalar::one();
        let mut t = Scalar::one();
        for sub in f {
            let (a, b) = line_value(ctx, &pts, sub, classical)?;
            v *= a;
            t *= b;
        }
        raw_values.push(v);
        raw_trivialized.push(t);
    }
    Ok(IndFiberData {
        maps,
        values: raw_values.iter().map(|v| v.to_string()).collect(),
        trivialized: raw_trivialized.iter().map(|v| v.to_string()).collect(),
        raw_values,
        raw_trivialized,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub lines: usize,
    /// Raw values agree after dividing out the cross biextension terms.
    pub twisted_holds: bool,
    /// Trivialized values are the exact Segre product.
    pub segre_holds: bool,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.twisted_holds && self.segre_holds
    }
}

/// Checks `Z_{D′} × Z_{D″} ≅ Z_{D′ ⊔ D″}` on Segre coordinates.
pub fn generic_fiber_factorization(
    ctx: &FiberContext,
    poset: &Poset,
    d1: &ColoredDivisor,
    d2: &ColoredDivisor,
) -> Result<FactorizationReport, ZastavaError> {
    let p1 = check_generic(ctx, d1)?;
    let p2 = check_generic(ctx, d2)?;
    let whole = d1.union(d2);
    if check_generic(ctx, &whole).is_err() {
        return Err(ZastavaError::NotDisjoint);
    }
    let f = ind_fiber(ctx, poset, &whole, false)?;
    let f1 = ind_fiber(ctx, poset, d1, false)?;
    let f2 = ind_fiber(ctx, poset, d2, false)?;
    let index1: BTreeMap<&Vec<Vec<u32>>, usize> = f1.maps.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let index2: BTreeMap<&Vec<Vec<u32>>, usize> = f2.maps.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let (n1, n2) = (p1.len(), p2.len());
    let mut twisted_holds = f.maps.len() == f1.maps.len() * f2.maps.len();
    let mut segre_holds = twisted_holds;
    for (k, map) in f.maps.iter().enumerate() {
        let left: Vec<Vec<u32>> = map.iter().map(|s| s[..n1].to_vec()).collect();
        let right: Vec<Vec<u32>> = map.iter().map(|s| s[n1..n1 + n2].to_vec()).collect();
        let (Some(&a), Some(&b)) = (index1.get(&left), index2.get(&right)) else {
            twisted_holds = false;
            segre_holds = false;
            continue;
        };
        let mut cross = Scalar::one();
        for sub in map {
            for (x, pa) in p1.iter().enumerate() {
                for (y, pb) in p2.iter().enumerate() {
                    cross *= ctx.cross((pa.0, &pa.1, sub[x]), (pb.0, &pb.1, sub[n1 + y]))?;
                }
            }
        }
        twisted_holds &= f.raw_values[k] == &(&f1.raw_values[a] * &f2.raw_values[b]) * &cross;
        segre_holds &= f.raw_trivialized[k] == &f1.raw_trivialized[a] * &f2.raw_trivialized[b];
    }
    Ok(FactorizationReport { lines: f.maps.len(), twisted_holds, segre_holds })
}

/// Builds a configured divisor from a JSON fiber file:
/// `{"tau":[1],"poset":"chain:1","points":[{"id":"a","color":"i","mult":1,"coord":3}]}`.
pub struct FiberFile {
    pub tau: Vec<Scalar>,
    pub poset: Poset,
    pub divisor: ColoredDivisor,
}

#[derive(Deserialize)]
struct FiberJson {
    #[serde(default)]
    tau: Vec<serde_json::Value>,
    #[serde(default)]
    poset: Option<String>,
    points: Vec<FiberPointJson>,
}

#[derive(Deserialize)]
struct FiberPointJson {
    id: String,
    color: String,
    #[serde(default = "one")]
    mult: u32,
    coord: serde_json::Value,
}

fn one() -> u32 {
    1
}

impl FiberFile {
    pub fn parse(text: &str) -> Result<Self, ZastavaError> {
        let f: FiberJson = serde_json::from_str(text).map_err(|e| ZastavaError::Parse(e.to_string()))?;
        let tau = f.tau.iter().map(|v| parse_scalar(v).map_err(ZastavaError::Parse)).collect::<Result<Vec<_>, _>>()?;
        let coords = f.points.iter().map(|p| parse_scalar(&p.coord).map_err(ZastavaError::Parse)).collect::<Result<Vec<_>, _>>()?;
        let divisor = ColoredDivisor::new(f.points.into_iter().map(|p| (p.id, p.color, p.mult)).collect())?.with_coordinates(coords);
        let poset = match f.poset {
            Some(s) => Poset::parse(&s)?,
            None => Poset::point(),
        };
        Ok(FiberFile { tau, poset, divisor })
    }
}

/// Result of the A1 flat-limit experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatLimitReport {
    /// Lines indexed by `(k_a, k_b)`.
    pub lines: Vec<(u32, u32)>,
    /// Limit points at `ε = 0` (twisted, then trivialized), each normalised
    /// by the smallest `ε`-valuation.
    pub twisted_limit: Vec<String>,
    pub trivialized_limit: Vec<String>,
    pub twisted_valuations: Vec<Option<i64>>,
    /// The trivialized limit satisfies the Segre relation `x00 x11 = x01 x10`.
    pub in_segre: bool,
    /// Some homogeneous coordinate of the trivialized limit vanishes.
    pub off_open_chart: bool,
}

fn valuation(f: &RationalFunction, eps: Var) -> Option<(i64, Scalar)> {
    if f.is_zero() {
        return None;
    }
    let mut v = 0i64;
    let mut lead = f.unit().clone();
    for (p, e) in f.factors() {
        let low = p.terms().map(|(m, _)| m.exponent(&eps)).min().unwrap_or(0);
        let c: Scalar = p
            .terms()
            .filter(|(m, _)| m.exponent(&eps) == low)
            .map(|(_, c)| c.clone())
            .fold(Scalar::zero(), |a, b| a + b);
        v += low as i64 * e;
        lead *= pow_scalar(&c, e);
    }
    Some((v, lead))
}

fn limit_point(coords: &[RationalFunction], eps: Var) -> (Vec<Scalar>, Vec<Option<i64>>) {
    let vals: Vec<Option<(i64, Scalar)>> = coords.iter().map(|f| valuation(f, eps)).collect();
    let vmin = vals.iter().flatten().map(|(v, _)| *v).min().unwrap_or(0);
    let point = vals
        .iter()
        .map(|x| match x {
            Some((v, c)) if *v == vmin => c.clone(),
            _ => Scalar::zero(),
        })
        .collect();
    (point, vals.iter().map(|x| x.as_ref().map(|(v, _)| *v)).collect())
}

/// A1, `α = 2`, `P = pt`, points at `0` and `ε`: the one-parameter family of
/// Segre points and its limit at `ε = 0`.
pub fn flat_limit_a1(q: &Quiver, fgl: &FormalGroupLaw, tau: &[Scalar]) -> Result<FlatLimitReport, ZastavaError> {
    let eps = Var::Aux(0);
    let lam = |z: &MultiPoly| -> Result<RationalFunction, FglError> {
        match fgl {
            FormalGroupLaw::Multiplicative => {
                let r = RationalFunction::from_poly(z);
                Ok(&RationalFunction::one() - &r.inv().expect("nonzero"))
            }
            _ => Ok(RationalFunction::from_poly(z)),
        }
    };
    // Coordinates 0 and ε in additive terms; 1 and 1+ε multiplicatively.
    let (za, zb) = match fgl {
        FormalGroupLaw::Multiplicative => (MultiPoly::one(), &MultiPoly::one() + &MultiPoly::var(eps)),
        _ => (MultiPoly::zero(), MultiPoly::var(eps)),
    };
    let one = DimVector(vec![1]);
    let k = crate::locality::symmetric_kernel(q, fgl, &one, &one)?;
    let mut assign: BTreeMap<Var, MultiPoly> = tau.iter().enumerate().map(|(i, t)| (Var::Dilation(i as u16 + 1), MultiPoly::constant(t.clone()))).collect();
    assign.insert(Var::torus(1, 0, 1), za.clone());
    assign.insert(Var::torus(2, 0, 1), zb.clone());
    let mut cross = RationalFunction::constant(k.unit().clone());
    for (p, e) in k.factors() {
        let c = p.compose(&assign);
        if c.is_zero() {
            return Err(ZastavaError::NonGeneric(format!("kernel factor {} vanishes identically", p)));
        }
        cross = &cross * &RationalFunction::from_factor(&c, e);
    }
    let (la, lb) = (lam(&za)?, lam(&zb)?);
    let lines = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
    let triv: Vec<RationalFunction> = lines
        .iter()
        .map(|(a, b)| &la.pow(*a as i64) * &lb.pow(*b as i64))
        .collect();
    let twisted: Vec<RationalFunction> =
        triv.iter().zip(&lines).map(|(t, (a, b))| if *a == 1 && *b == 1 { t * &cross } else { t.clone() }).collect();
    let (tw, tw_val) = limit_point(&twisted, eps);
    let (tr, _) = limit_point(&triv, eps);
    let in_segre = &tr[0] * &tr[3] == &tr[1] * &tr[2];
    let off_open_chart = tr.iter().any(|c| c.is_zero());
    Ok(FlatLimitReport {
        lines,
        twisted_limit: tw.iter().map(|c| c.to_string()).collect(),
        trivialized_limit: tr.iter().map(|c| c.to_string()).collect(),
        twisted_valuations: tw_val,
        in_segre,
        off_open_chart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{catalog, DilationTorus};
    use crate::symalg::scalar;

    fn a1() -> Quiver {
        Quiver::with_defaults(catalog::a1()).with_dilation(DilationTorus::new(vec![vec![1], vec![0]]).unwrap())
    }

    #[test]
    fn lattices() {
        assert_eq!(subscheme_lattice(&ColoredDivisor::parse("a:i").unwrap()).len(), 2);
        assert_eq!(subscheme_lattice(&ColoredDivisor::parse("a:i:2").unwrap()).len(), 3);
        assert_eq!(subscheme_lattice(&ColoredDivisor::parse("a:i,b:j").unwrap()).len(), 4);
    }

    #[test]
    fn rank_examples() {
        let ai = ColoredDivisor::parse("a:i").unwrap();
        assert_eq!(ind_rank(&Poset::point(), &ai), 2);
        for m in 1..5 {
            assert_eq!(ind_rank(&Poset::chain(m), &ai), m + 1);
        }
        assert_eq!(ind_rank(&Poset::antichain(2), &ai), 4);
        assert_eq!(ind_rank(&Poset::chain(3), &ColoredDivisor::parse("a:i:2").unwrap()), 10);
        assert_eq!(ind_rank(&Poset::point(), &ColoredDivisor::empty()), 1);
    }

    #[test]
    fn poset_parsing() {
        let p = Poset::parse(r#"{"elements":["x","y","z"],"relations":[["x","y"],["y","z"]]}"#).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(p, Poset::new(vec!["x".into(), "y".into(), "z".into()], &[(0, 1), (1, 2)]).unwrap());
        assert!(matches!(
            Poset::parse(r#"{"elements":["x","y"],"relations":[["x","y"],["y","x"]]}"#),
            Err(ZastavaError::NotAntisymmetric(0, 1))
        ));
        assert!(Poset::parse("chain:x").is_err());
    }

    #[test]
    fn fiber_values() {
        let q = a1();
        let fgl = FormalGroupLaw::Additive;
        let ctx = FiberContext::new(&q, &fgl, vec![scalar(1)]);
        let d = ColoredDivisor::parse("a:i").unwrap().with_coordinates(vec![scalar(3)]);
        let f = ind_fiber(&ctx, &Poset::point(), &d, false).unwrap();
        assert_eq!(f.values, vec!["1", "3"]);
        let empty = ind_fiber(&ctx, &Poset::point(), &ColoredDivisor::empty(), false).unwrap();
        assert_eq!(empty.values, vec!["1"]);
    }

    #[test]
    fn factorization_same_and_distinct_colors() {
        let fgl = FormalGroupLaw::Additive;
        let q = a1();
        let ctx = FiberContext::new(&q, &fgl, vec![scalar(1)]);
        let d1 = ColoredDivisor::parse("a:i").unwrap().with_coordinates(vec![scalar(3)]);
        let d2 = ColoredDivisor::parse("b:i").unwrap().with_coordinates(vec![scalar(10)]);
        assert!(generic_fiber_factorization(&ctx, &Poset::point(), &d1, &d2).unwrap().holds());
        assert!(generic_fiber_factorization(&ctx, &Poset::chain(2), &d1, &ColoredDivisor::empty()).unwrap().holds());
        let a2 = Quiver::with_defaults(catalog::a2());
        let ctx2 = FiberContext::new(&a2, &fgl, vec![scalar(2)]);
        let e1 = ColoredDivisor::parse("a:1").unwrap().with_coordinates(vec![scalar(3)]);
        let e2 = ColoredDivisor::parse("b:2").unwrap().with_coordinates(vec![scalar(17)]);
        assert!(generic_fiber_factorization(&ctx2, &Poset::chain(2), &e1, &e2).unwrap().holds());
        let clash = ColoredDivisor::parse("b:2").unwrap().with_coordinates(vec![scalar(5)]);
        assert!(generic_fiber_factorization(&ctx2, &Poset::point(), &e1, &clash).is_err());
    }

    #[test]
    fn classical_matches_quantum_at_identity() {
        let fgl = FormalGroupLaw::Additive;
        let q = Quiver::with_defaults(catalog::a2());
        let ctx = FiberContext::new(&q, &fgl, vec![scalar(0)]);
        let d = ColoredDivisor::parse("a:1:2,b:2").unwrap().with_coordinates(vec![scalar(3), scalar(-4)]);
        let quantum = ind_fiber(&ctx, &Poset::chain(2), &d, false).unwrap();
        let classical = ind_fiber(&ctx, &Poset::chain(2), &d, true).unwrap();
        assert_eq!(quantum.values, classical.values);
    }

    #[test]
    fn flat_limit_is_reported() {
        let r = flat_limit_a1(&a1(), &FormalGroupLaw::Additive, &[scalar(1)]).unwrap();
        assert!(r.in_segre);
        assert!(r.off_open_chart);
    }
}
