//! Thom kernels of the cotangent extension correspondence.
//!
//! Two independent assemblies are provided. The main path multiplies the
//! `d*p` and `q̃` kernels block by block. The alternative path collects the
//! weight multiset of `ι` and `ψ = ψ′ ⊗ ψ″`, cancels it, and only then forms
//! the product of λ-factors.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fgl::{Character, FglError, FormalGroupLaw};
use crate::quiver::{DimVector, Quiver};
use crate::symalg::{MultiPoly, RationalFunction, Scalar, Var};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ThomError {
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error("flag type must have at least one slot")]
    EmptyFlag,
    #[error("block references slot {slot} outside the chart")]
    BadSlot { slot: usize },
    #[error("classical divisors need the additive or multiplicative backend")]
    SeriesUnsupported,
}

/// Coordinates `x[g,i,s]` for a flag type `(v_1, …, v_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusChart {
    pub flag: Vec<DimVector>,
}

impl TorusChart {
    pub fn new(flag: Vec<DimVector>) -> Self {
        TorusChart { flag }
    }

    pub fn slots(&self) -> usize {
        self.flag.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.flag.iter().map(|v| v.len()).max().unwrap_or(0)
    }

    /// Block `x[g,i,1..v_g^i]`; slots are 1-based.
    pub fn block(&self, g: usize, i: usize) -> Vec<Var> {
        let d = self.flag[g - 1].get(i);
        (1..=d as u16).map(|s| Var::torus(g as u16, i as u16, s)).collect()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for g in 1..=self.slots() {
            for i in 0..self.num_vertices() {
                out.extend(self.block(g, i));
            }
        }
        out
    }

    pub fn total(&self) -> DimVector {
        self.flag.iter().fold(DimVector::zero(self.num_vertices()), |acc, v| acc.add(v))
    }
}

/// `Hom(V_g^i, V_{g′}^j) ⊗ μ` with a signed multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomBlock {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub twist: String,
    #[serde(skip)]
    pub mu: Character,
    pub multiplicity: i64,
}

impl HomBlock {
    pub fn new(from: (usize, usize), to: (usize, usize), mu: Character, multiplicity: i64) -> Self {
        HomBlock { from, to, twist: mu.to_string(), mu, multiplicity }
    }

    /// Characters `x[g′,j,t] − x[g,i,s] + μ`.
    pub fn characters(&self, chart: &TorusChart) -> Vec<Character> {
        let mut out = Vec::new();
        for s in chart.block(self.from.0, self.from.1) {
            for t in chart.block(self.to.0, self.to.1) {
                let mut chi = self.mu.clone();
                chi.add_term(t, 1);
                chi.add_term(s, -1);
                out.push(chi);
            }
        }
        out
    }
}

impl fmt::Display for HomBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Hom(V[{},{}], V[{},{}])",
            self.from.0,
            self.from.1 + 1,
            self.to.0,
            self.to.1 + 1
        )?;
        if !self.mu.is_zero() {
            write!(f, "<{}>", self.mu)?;
        }
        if self.multiplicity != 1 {
            write!(f, "^{}", self.multiplicity)?;
        }
        Ok(())
    }
}

/// A Thom kernel together with the module it represents.
#[derive(Clone, Debug, PartialEq)]
pub struct ThomKernel {
    pub function: RationalFunction,
    pub blocks: Vec<HomBlock>,
    /// Weight-zero characters, skipped as units.
    pub degenerate: Vec<Character>,
}

impl ThomKernel {
    pub fn one() -> Self {
        ThomKernel { function: RationalFunction::one(), blocks: Vec::new(), degenerate: Vec::new() }
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }

    /// The kernel with weight-zero factors kept literally (`λ(0) = 0`).
    pub fn literal(&self) -> RationalFunction {
        if self.degenerate.is_empty() {
            self.function.clone()
        } else {
            RationalFunction::zero()
        }
    }

    pub fn mul(&self, other: &ThomKernel) -> ThomKernel {
        ThomKernel {
            function: &self.function * &other.function,
            blocks: [self.blocks.clone(), other.blocks.clone()].concat(),
            degenerate: [self.degenerate.clone(), other.degenerate.clone()].concat(),
        }
    }
}

/// `∏_blocks ∏_{s,t} λ(x[g′,j,t] − x[g,i,s] + μ)^{mult}`.
pub fn kernel_of_module(fgl: &FormalGroupLaw, chart: &TorusChart, blocks: &[HomBlock]) -> Result<ThomKernel, ThomError> {
    let mut function = RationalFunction::one();
    let mut degenerate = Vec::new();
    for b in blocks {
        for slot in [b.from.0, b.to.0] {
            if slot == 0 || slot > chart.slots() {
                return Err(ThomError::BadSlot { slot });
            }
        }
        for chi in b.characters(chart) {
            if chi.is_zero() {
                degenerate.push(chi);
                continue;
            }
            function *= &fgl.lambda_char(&chi)?.pow(b.multiplicity);
        }
    }
    Ok(ThomKernel { function, blocks: blocks.to_vec(), degenerate })
}

fn slot_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=m).flat_map(move |g| ((g + 1)..=m).map(move |h| (g, h)))
}

/// `𝔤/𝔭 = ⊕_{g<g′} Hom(V_g^i, V_{g′}^i)` twisted by `μ`.
fn g_mod_p_blocks(q: &Quiver, m: usize, mu: &Character, mult: i64) -> Vec<HomBlock> {
    let mut out = Vec::new();
    for (g, gp) in slot_pairs(m) {
        for i in 0..q.num_vertices() {
            out.push(HomBlock::new((g, i), (gp, i), mu.clone(), mult));
        }
    }
    out
}

/// Rep_Q̄ blocks `Hom(V_g^{h′}, V_{g′}^{h″}) ⊗ μ_h` over the slot pairs
/// accepted by `keep(g, g′)`.
fn rep_blocks(q: &Quiver, m: usize, keep: impl Fn(usize, usize) -> bool) -> Vec<HomBlock> {
    let mut out = Vec::new();
    for h in q.spec.double() {
        for g in 1..=m {
            for gp in 1..=m {
                if keep(g, gp) {
                    out.push(HomBlock::new((g, q.spec.tail(h)), (gp, q.spec.head(h)), q.mu(h), 1));
                }
            }
        }
    }
    out
}

fn check_flag(flag: &[DimVector]) -> Result<TorusChart, ThomError> {
    if flag.is_empty() {
        return Err(ThomError::EmptyFlag);
    }
    Ok(TorusChart::new(flag.to_vec()))
}

/// `Θ(𝔤/𝔭 ⊗ ω) ⊗ Θ(F_{−1} Rep_Q̄(F))`.
pub fn kernel_dstar_p(q: &Quiver, fgl: &FormalGroupLaw, flag: &[DimVector]) -> Result<ThomKernel, ThomError> {
    let chart = check_flag(flag)?;
    let m = chart.slots();
    let mut blocks = g_mod_p_blocks(q, m, &q.omega(), 1);
    blocks.extend(rep_blocks(q, m, |g, gp| gp < g));
    kernel_of_module(fgl, &chart, &blocks)
}

/// `Θ[Rep_Q̄(V)/Rep_Q̄(F)] ⊗ Θ(𝔤/𝔭)^{-1}`.
pub fn kernel_tilde_q(q: &Quiver, fgl: &FormalGroupLaw, flag: &[DimVector]) -> Result<ThomKernel, ThomError> {
    let chart = check_flag(flag)?;
    let m = chart.slots();
    let mut blocks = rep_blocks(q, m, |g, gp| g < gp);
    blocks.extend(g_mod_p_blocks(q, m, &Character::zero(), -1));
    kernel_of_module(fgl, &chart, &blocks)
}

/// `Th(d*p) ⊗ Th(q̃)` for an arbitrary flag type.
pub fn flag_kernel(q: &Quiver, fgl: &FormalGroupLaw, flag: &[DimVector]) -> Result<ThomKernel, ThomError> {
    Ok(kernel_dstar_p(q, fgl, flag)?.mul(&kernel_tilde_q(q, fgl, flag)?))
}

/// The biextension `ℒ_{V1,V2}` on the two-slot chart.
pub fn biextension_kernel(q: &Quiver, fgl: &FormalGroupLaw, v1: &DimVector, v2: &DimVector) -> Result<ThomKernel, ThomError> {
    flag_kernel(q, fgl, &[v1.clone(), v2.clone()])
}

/// Flag types `(v_1, …, v_m)` with nonzero parts and `|v_1 + … + v_m| ≤ max_total`.
pub fn flag_types(n: usize, max_total: u32) -> Vec<Vec<DimVector>> {
    let parts: Vec<DimVector> = DimVector(vec![max_total; n]).below().into_iter().filter(|v| !v.is_zero() && v.total() <= max_total).collect();
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<DimVector>, u32)> = vec![(Vec::new(), 0)];
    while let Some((flag, used)) = frontier.pop() {
        for p in &parts {
            if used + p.total() <= max_total {
                let mut next = flag.clone();
                next.push(p.clone());
                out.push(next.clone());
                frontier.push((next, used + p.total()));
            }
        }
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// Checks `ℒ_{V′+V″,W} = ℒ_{V′,W} ℒ_{V″,W}` and `ℒ_{W,V′+V″} = ℒ_{W,V′} ℒ_{W,V″}`,
/// the points of `V″` following those of `V′` in each block.
pub fn check_bilinearity(q: &Quiver, fgl: &FormalGroupLaw, v1: &DimVector, v2: &DimVector, w: &DimVector) -> Result<bool, ThomError> {
    let sum = v1.add(v2);
    let shift = |slot: u16| {
        move |v: Var| match v {
            Var::Torus { slot: s, vertex, index } if s == slot => Var::torus(s, vertex, index + v1.get(vertex as usize) as u16),
            other => other,
        }
    };
    let left = biextension_kernel(q, fgl, &sum, w)?;
    let a = biextension_kernel(q, fgl, v1, w)?;
    let b = biextension_kernel(q, fgl, v2, w)?;
    let first = left.function.equals(&(&a.function * &b.function.rename(&shift(1))));
    let right = biextension_kernel(q, fgl, w, &sum)?;
    let c = biextension_kernel(q, fgl, w, v1)?;
    let d = biextension_kernel(q, fgl, w, v2)?;
    let second = right.function.equals(&(&c.function * &d.function.rename(&shift(2))));
    Ok(first && second)
}

/// Weight multiset: character ↦ signed multiplicity.
type Weights = BTreeMap<Character, i64>;

fn add_weights(acc: &mut Weights, chars: impl IntoIterator<Item = Character>, mult: i64) {
    for chi in chars {
        let e = acc.entry(chi.clone()).or_insert(0);
        *e += mult;
        if *e == 0 {
            acc.remove(&chi);
        }
    }
}

/// Weights of `V ⊗ W` for `V = Hom(V_g^i, V_{g′}^j)` read off the chart.
fn hom_weights(chart: &TorusChart, from: (usize, usize), to: (usize, usize), mu: &Character) -> Vec<Character> {
    HomBlock::new(from, to, mu.clone(), 1).characters(chart)
}

/// Outcome of the alternative assembly.
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixKernel {
    pub kernel: ThomKernel,
    /// `Θ(ι)`, `Θ(ψ′)`, `Θ(ψ″)`.
    pub iota: RationalFunction,
    pub psi_prime: RationalFunction,
    pub psi_second: RationalFunction,
    /// `Θ(M*) / Θ(M)` for `M = 𝔤/𝔭`, recorded when resolving the dual in `ι`.
    pub duality_unit: RationalFunction,
    /// Whether `Gr_0 Rep_Q̄(V)` had no weights.
    pub gr0_empty: bool,
}

fn product_of(fgl: &FormalGroupLaw, w: &Weights) -> Result<(RationalFunction, Vec<Character>), ThomError> {
    let mut f = RationalFunction::one();
    let mut zero = Vec::new();
    for (chi, e) in w {
        if chi.is_zero() {
            zero.push(chi.clone());
            continue;
        }
        f = &f * &fgl.lambda_char(chi)?.pow(*e);
    }
    Ok((f, zero))
}

/// `Θ(ι) ⊗ Θ(ψ′) ⊗ Θ(ψ″)` from weight multisets.
pub fn appendix_b_kernel(q: &Quiver, fgl: &FormalGroupLaw, flag: &[DimVector]) -> Result<AppendixKernel, ThomError> {
    let chart = check_flag(flag)?;
    let m = chart.slots();
    let n = chart.num_vertices().max(q.num_vertices());
    let omega = q.omega();

    // ι: 𝔭^⊥ ⊗ ω ≅ (𝔤/𝔭)* ⊗ ω. The dual of Hom(V_g, V_{g′}) is Hom(V_{g′}, V_g);
    // the Thom bundle is resolved back onto Hom(V_g, V_{g′}) ⊗ ω and the
    // function-level discrepancy Θ(M*)/Θ(M) is recorded.
    let mut iota = Weights::new();
    let mut g_p = Weights::new();
    let mut g_p_dual = Weights::new();
    for g in 1..=m {
        for gp in 1..=m {
            if g >= gp {
                continue;
            }
            for i in 0..n {
                add_weights(&mut iota, hom_weights(&chart, (g, i), (gp, i), &omega), 1);
                add_weights(&mut g_p, hom_weights(&chart, (g, i), (gp, i), &Character::zero()), 1);
                add_weights(&mut g_p_dual, hom_weights(&chart, (gp, i), (g, i), &Character::zero()), 1);
            }
        }
    }

    // ψ′: (F_∞/F_0) Rep_Q̄(V) = Rep_Q̄(V) minus its associated-graded degree 0.
    let mut full = Weights::new();
    let mut gr0 = Weights::new();
    for h in q.spec.double() {
        let (a, b) = (q.spec.tail(h), q.spec.head(h));
        let mu = q.mu(h);
        for g in 1..=m {
            for gp in 1..=m {
                add_weights(&mut full, hom_weights(&chart, (g, a), (gp, b), &mu), 1);
            }
            add_weights(&mut gr0, hom_weights(&chart, (g, a), (g, b), &mu), 1);
        }
    }
    let gr0_empty = gr0.is_empty();
    let mut psi_prime = full;
    for (chi, e) in &gr0 {
        add_weights(&mut psi_prime, [chi.clone()], -e);
    }

    // ψ″: Θ(𝔤/𝔭)^{-1}.
    let psi_second: Weights = g_p.iter().map(|(c, e)| (c.clone(), -e)).collect();

    let mut total = iota.clone();
    for part in [&psi_prime, &psi_second] {
        for (chi, e) in part {
            add_weights(&mut total, [chi.clone()], *e);
        }
    }
    let (function, degenerate) = product_of(fgl, &total)?;
    let (iota_f, _) = product_of(fgl, &iota)?;
    let (pp_f, _) = product_of(fgl, &psi_prime)?;
    let (ps_f, _) = product_of(fgl, &psi_second)?;
    let (dual_f, _) = product_of(fgl, &g_p_dual)?;
    let (gp_f, _) = product_of(fgl, &g_p)?;
    Ok(AppendixKernel {
        kernel: ThomKernel { function, blocks: Vec::new(), degenerate },
        iota: iota_f,
        psi_prime: pp_f,
        psi_second: ps_f,
        duality_unit: &dual_f / &gp_f,
        gr0_empty,
    })
}

/// Comparison of the two assemblies.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheck {
    pub main: RationalFunction,
    pub appendix: RationalFunction,
    /// `main / appendix`.
    pub ratio: RationalFunction,
    pub duality_unit: RationalFunction,
    pub degenerate: bool,
}

impl CrossCheck {
    /// The ratio is an invertible constant or monomial.
    pub fn is_unit(&self) -> bool {
        self.ratio.cancel().is_monomial_unit()
    }

    pub fn unit_value(&self) -> Option<Scalar> {
        let r = self.ratio.cancel();
        r.as_constant().cloned()
    }
}

pub fn cross_check(q: &Quiver, fgl: &FormalGroupLaw, flag: &[DimVector]) -> Result<CrossCheck, ThomError> {
    let main = flag_kernel(q, fgl, flag)?;
    let alt = appendix_b_kernel(q, fgl, flag)?;
    let ratio = &main.function / &alt.kernel.function;
    let degenerate = main.is_degenerate() || alt.kernel.is_degenerate();
    Ok(CrossCheck {
        main: main.function,
        appendix: alt.kernel.function,
        ratio,
        duality_unit: alt.duality_unit,
        degenerate,
    })
}

/// For loop-free quivers and complete flags, `Gr_0 Rep_Q̄(V)` vanishes and
/// `Θ(ψ′)` is the kernel of the full off-diagonal `Rep_Q̄(V)`.
pub fn corollary_b_holds(q: &Quiver, fgl: &FormalGroupLaw, flag: &[DimVector]) -> Result<bool, ThomError> {
    let alt = appendix_b_kernel(q, fgl, flag)?;
    let chart = TorusChart::new(flag.to_vec());
    let full = kernel_of_module(fgl, &chart, &rep_blocks(q, flag.len(), |g, gp| g != gp))?;
    Ok(alt.gr0_empty && alt.psi_prime.equals(&full.function))
}

/// Sets the dilation coordinates to the group identity.
pub fn classical_limit(fgl: &FormalGroupLaw, f: &RationalFunction) -> Result<RationalFunction, ThomError> {
    let id = fgl.identity_point()?;
    let assignment: BTreeMap<Var, Scalar> =
        f.vars().into_iter().filter(|v| v.is_dilation()).map(|v| (v, id.clone())).collect();
    f.substitute(&assignment).map_err(|_| ThomError::SeriesUnsupported)
}

/// Diagonal multiplicities of a kernel on the chart points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalDivisor {
    /// Unordered point pair ↦ multiplicity of its diagonal factor.
    pub multiplicities: BTreeMap<(Var, Var), i64>,
    /// Number of weight-zero characters (the literal kernel is 0 if any).
    pub degenerate: usize,
    /// Factors that are not point diagonals.
    pub other_factors: usize,
}

impl ClassicalDivisor {
    /// Expected multiplicity `Q(i,j)` for distinct colors, `2Q(i,i)` for a
    /// pair of distinct points of one color, scaled by `copies`.
    pub fn matches_incidence(&self, q: &Quiver, chart_vars: &[Var], copies: i64) -> bool {
        let form = q.spec.incidence_form();
        if self.other_factors != 0 {
            return false;
        }
        for (a, x) in chart_vars.iter().enumerate() {
            for y in &chart_vars[a + 1..] {
                let (i, j) = (x.vertex().unwrap(), y.vertex().unwrap());
                let expected = if i == j { 2 * form[i][i] } else { form[i][j] };
                let got = self.multiplicities.get(&(*x, *y)).copied().unwrap_or(0);
                if got != copies * expected {
                    return false;
                }
            }
        }
        true
    }
}

fn diagonal_pair(p: &MultiPoly) -> Option<(Var, Var)> {
    let vars: Vec<Var> = p.vars().into_iter().collect();
    if vars.len() != 2 || vars.iter().any(|v| v.is_dilation()) || p.num_terms() != 2 {
        return None;
    }
    let mut it = p.terms();
    let (_, c1) = it.next()?;
    let (_, c2) = it.next()?;
    (c1 + c2 == Scalar::from_integer(0.into())).then_some((vars[0], vars[1]))
}

/// Diagonal multiplicities of a classical (dilation-free) kernel.
pub fn divisor_of(f: &RationalFunction, degenerate: usize) -> ClassicalDivisor {
    let mut multiplicities = BTreeMap::new();
    let mut other_factors = 0;
    for (p, e) in f.factors() {
        if p.vars().len() == 1 && p.num_terms() == 1 {
            continue;
        }
        match diagonal_pair(p) {
            Some(pair) => *multiplicities.entry(pair).or_insert(0) += e,
            None => other_factors += 1,
        }
    }
    multiplicities.retain(|_, e| *e != 0);
    ClassicalDivisor { multiplicities, degenerate, other_factors }
}

/// The Thom divisor of `Rep_Q(V)` (arrows of `H` only) at `D = 0`.
pub fn classical_divisor(q: &Quiver, fgl: &FormalGroupLaw, v: &DimVector) -> Result<ClassicalDivisor, ThomError> {
    if matches!(fgl, FormalGroupLaw::Series(_)) {
        return Err(ThomError::SeriesUnsupported);
    }
    let chart = TorusChart::new(vec![v.clone()]);
    let blocks: Vec<HomBlock> = q
        .spec
        .arrows()
        .iter()
        .map(|a| HomBlock::new((1, a.tail), (1, a.head), Character::zero(), 1))
        .collect();
    let k = kernel_of_module(fgl, &chart, &blocks)?;
    Ok(divisor_of(&k.function, k.degenerate.len()))
}
