use std::collections::BTreeMap;

use loopgr_core::fgl::{Character, FormalGroupLaw, SeriesLaw};
use loopgr_core::fixedpoints::{carell_dim, gaussian_binomial, quiver_grass_poincare, sl2_enumerate};
use loopgr_core::locality::{is_m_tau_disjoint, verify_trivialization, Divisor, PointConfig};
use loopgr_core::quiver::{catalog, DilationTorus, DimVector, DoubleArrow, Quiver};
use loopgr_core::shuffle::{shuffle_product, weight_space, ShuffleElement};
use loopgr_core::symalg::{ratio, scalar, symmetrize, Block, MultiPoly, RationalFunction, Scalar, Var};
use loopgr_core::thom::{biextension_kernel, classical_divisor, cross_check, kernel_dstar_p, kernel_tilde_q};
use loopgr_core::zastava::{ind_rank, ColoredDivisor, Poset};

fn x(slot: u16, vertex: u16, index: u16) -> MultiPoly {
    MultiPoly::var(Var::torus(slot, vertex, index))
}

fn d1() -> MultiPoly {
    MultiPoly::var(Var::Dilation(1))
}

fn rf(p: &MultiPoly) -> RationalFunction {
    RationalFunction::from_poly(p)
}

fn a1() -> Quiver {
    Quiver::with_defaults(catalog::a1()).with_dilation(DilationTorus::new(vec![vec![1], vec![0]]).unwrap())
}

fn a2() -> Quiver {
    Quiver::with_defaults(catalog::a2())
}

fn dv(v: &[u32]) -> DimVector {
    DimVector(v.to_vec())
}

#[test]
fn polynomial_arithmetic() {
    let (a, b) = (x(1, 0, 1), x(1, 0, 2));
    assert_eq!(&(&a + &b) + &(&a - &b), a.scale(&scalar(2)));
    assert_eq!(&(&a - &b) * &(&a + &b), &a.pow(2) - &b.pow(2));
    assert!((&MultiPoly::zero() * &a).is_zero());
}

#[test]
fn rational_equality() {
    let (a, b, w) = (x(1, 0, 1), x(1, 0, 2), d1());
    let lhs = &rf(&(&a.pow(2) - &b.pow(2))) / &rf(&(&a - &b));
    assert!(lhs.equals(&rf(&(&a + &b))));
    assert!(!(&rf(&(&a + &w)) / &rf(&a)).equals(&(&rf(&(&a - &w)) / &rf(&a))));
    let f = &(&rf(&w) * &rf(&(&a - &b))) / &rf(&(&a - &b));
    assert!(f.equals(&rf(&w)));
}

#[test]
fn symmetrization_examples() {
    let (a, b, w) = (x(1, 0, 1), x(1, 0, 2), d1());
    let blocks = [Block::new(0, vec![Var::torus(1, 0, 1)]), Block::new(0, vec![Var::torus(1, 0, 2)])];
    assert!(symmetrize(&rf(&(&a - &b)), &blocks).unwrap().is_zero());
    let f = &rf(&(&(&b - &a) + &w)) / &rf(&(&b - &a));
    assert!(symmetrize(&f, &blocks).unwrap().equals(&RationalFunction::constant(scalar(2))));

    let c = x(1, 0, 3);
    let vs = [&a, &b, &c];
    let mut g = RationalFunction::one();
    for i in 0..3 {
        for j in i + 1..3 {
            g = &g * &(&rf(&(&(vs[j] - vs[i]) + &w)) / &rf(&(vs[j] - vs[i])));
        }
    }
    let singles: Vec<Block> = (1..=3).map(|s| Block::new(0, vec![Var::torus(1, 0, s)])).collect();
    assert!(symmetrize(&g, &singles).unwrap().equals(&RationalFunction::constant(scalar(6))));
}

#[test]
fn evaluation_examples() {
    let (a, w) = (x(1, 0, 1), d1());
    let f = &rf(&(&a + &w)) / &rf(&a);
    let at = |xv: i64| -> BTreeMap<Var, Scalar> { [(Var::torus(1, 0, 1), scalar(xv)), (Var::Dilation(1), scalar(1))].into() };
    assert_eq!(f.evaluate(&at(5)).unwrap(), ratio(6, 5));
    let err = f.evaluate(&at(0)).unwrap_err();
    assert!(err.factor.contains("x[1,1,1]"));
    assert_eq!(RationalFunction::constant(scalar(2)).evaluate(&at(3)).unwrap(), scalar(2));
}

#[test]
fn lambda_examples() {
    let (u, v) = (Var::torus(1, 0, 1), Var::torus(1, 0, 2));
    let chi = Character::from_terms([(u, 1), (v, -1)]);
    assert!(FormalGroupLaw::Additive.lambda_char(&chi).unwrap().equals(&rf(&(&x(1, 0, 1) - &x(1, 0, 2)))));
    let one_minus_inv = &RationalFunction::one() - &(&RationalFunction::one() / &rf(&x(1, 0, 1)));
    assert!(FormalGroupLaw::Multiplicative.lambda_char(&Character::var(u)).unwrap().equals(&one_minus_inv));
    for fgl in [FormalGroupLaw::Additive, FormalGroupLaw::Multiplicative, FormalGroupLaw::multiplicative_series(4).unwrap()] {
        assert!(fgl.lambda_char(&Character::zero()).unwrap().is_zero());
    }
}

#[test]
fn truncated_multiplicative_law_passes_axioms() {
    let law = SeriesLaw::new(3, [((1, 1), scalar(-1))]).unwrap();
    assert!(FormalGroupLaw::Series(law).verify().all_pass());
}

#[test]
fn dilation_examples() {
    let diag = Quiver::with_defaults(catalog::kronecker());
    assert!(diag.validate_dilation().iter().all(|c| c.pass));
    let full_default = Quiver::with_defaults(catalog::kronecker()).with_dilation(DilationTorus::full());
    assert!(full_default.validate_dilation().iter().any(|c| !c.pass));
}

#[test]
fn incidence_examples() {
    assert_eq!(catalog::a2().incidence_form(), vec![vec![0, 1], vec![1, 0]]);
    assert_eq!(catalog::jordan().incidence_form(), vec![vec![1]]);
}

#[test]
fn kernel_examples() {
    let q = a1();
    let fgl = FormalGroupLaw::Additive;
    let f = [dv(&[1]), dv(&[1])];
    let diff = &x(2, 0, 1) - &x(1, 0, 1);
    assert!(kernel_dstar_p(&q, &fgl, &f).unwrap().function.equals(&rf(&(&diff + &d1()))));
    assert!(kernel_tilde_q(&q, &fgl, &f).unwrap().function.equals(&(&RationalFunction::one() / &rf(&diff))));
    let k = biextension_kernel(&q, &fgl, &dv(&[1]), &dv(&[1])).unwrap();
    assert!(k.function.equals(&(&rf(&(&diff + &d1())) / &rf(&diff))));

    let q = a2();
    let h = DoubleArrow { arrow: 0, star: false };
    let hs = DoubleArrow { arrow: 0, star: true };
    let (p, r) = (x(1, 0, 1), x(2, 1, 1));
    let forward = &(&r - &p) + &q.mu(h).linear_form();
    let backward = &(&p - &r) + &q.mu(hs).linear_form();
    let k = biextension_kernel(&q, &fgl, &dv(&[1, 0]), &dv(&[0, 1])).unwrap();
    assert!(k.function.equals(&rf(&(&forward * &backward))));
    assert!(cross_check(&a1(), &fgl, &[dv(&[1]), dv(&[1])]).unwrap().is_unit());
    assert!(cross_check(&q, &fgl, &[dv(&[1, 0]), dv(&[0, 1])]).unwrap().is_unit());
}

#[test]
fn classical_divisor_examples() {
    let fgl = FormalGroupLaw::Additive;
    let d = classical_divisor(&a2(), &fgl, &dv(&[1, 1])).unwrap();
    assert_eq!(d.multiplicities.values().copied().collect::<Vec<_>>(), vec![1]);
    let jordan = Quiver::with_defaults(catalog::jordan());
    assert!(classical_divisor(&jordan, &fgl, &dv(&[2])).unwrap().degenerate > 0);
}

#[test]
fn shuffle_examples() {
    let q = a1();
    let fgl = FormalGroupLaw::Additive;
    let e = ShuffleElement::generator(1, 0);
    let xe = ShuffleElement::generator_times(1, 0, 1);
    let p = shuffle_product(&q, &fgl, &xe, &e).unwrap();
    let expected = &(&x(1, 0, 1) + &x(1, 0, 2)) - &d1();
    assert!(p.representative.equals(&rf(&expected)), "{}", p.representative);
    assert!(p.is_polynomial(&fgl) && p.is_symmetric());

    let q = a2();
    let p = shuffle_product(&q, &fgl, &ShuffleElement::generator(2, 0), &ShuffleElement::generator(2, 1)).unwrap();
    let (a, b) = (x(1, 0, 1), x(1, 1, 1));
    let forward = &(&b - &a) + &q.mu(DoubleArrow { arrow: 0, star: false }).linear_form();
    let backward = &(&a - &b) + &q.mu(DoubleArrow { arrow: 0, star: true }).linear_form();
    assert!(p.representative.equals(&rf(&(&forward * &backward))));
    assert!(p.is_polynomial(&fgl));
}

#[test]
fn weight_space_examples() {
    let q = a1();
    let fgl = FormalGroupLaw::Additive;
    let tau = [ratio(7, 3)];
    assert_eq!(weight_space(&q, &fgl, &dv(&[1]), 1, &tau, 0).unwrap().dimension, 2);
    assert_eq!(weight_space(&q, &fgl, &dv(&[2]), 0, &tau, 0).unwrap().dimension, 1);
    assert_eq!(weight_space(&q, &fgl, &dv(&[0]), 2, &tau, 0).unwrap().dimension, 1);
}

#[test]
fn locality_examples() {
    let q = a1();
    let fgl = FormalGroupLaw::Additive;
    let cfg = |a: i64, b: Option<i64>| PointConfig {
        tau: vec![scalar(1)],
        d1: Divisor::from([(0, vec![scalar(a)])]),
        d2: b.map(|b| Divisor::from([(0, vec![scalar(b)])])).unwrap_or_default(),
    };
    assert!(is_m_tau_disjoint(&q, &fgl, &cfg(0, Some(5))).unwrap());
    assert!(!is_m_tau_disjoint(&q, &fgl, &cfg(0, Some(1))).unwrap());
    assert!(!is_m_tau_disjoint(&q, &fgl, &cfg(0, Some(0))).unwrap());
    // (x2 - x1 + 1)(x1 - x2 + 1) / ((x2 - x1)(x1 - x2)) at x1 = 0, x2 = 5.
    let r = verify_trivialization(&q, &fgl, &cfg(0, Some(5))).unwrap();
    assert_eq!(r.value.as_deref(), Some("24/25"));
    let r = verify_trivialization(&q, &fgl, &cfg(0, Some(1))).unwrap();
    assert!(r.pass && r.value.is_none() && !r.vanishing.is_empty());
    assert_eq!(verify_trivialization(&q, &fgl, &cfg(0, None)).unwrap().value.as_deref(), Some("1"));
}

#[test]
fn fixed_point_examples() {
    let r = sl2_enumerate(2, 2, 1, 3).unwrap();
    assert_eq!(r.s0_count, 2);
    let m1 = r.membership.iter().find(|m| m.m == 1).unwrap();
    assert_eq!((m1.lattice_count, m1.divisibility_count), (1, 1));
    assert_eq!(gaussian_binomial(2, 1).unwrap().to_string(), "1 + q");
    assert_eq!(gaussian_binomial(3, 1).unwrap().to_string(), "1 + q + q^2");
    assert_eq!(gaussian_binomial(5, 0).unwrap().to_string(), "1");
    assert_eq!(quiver_grass_poincare(&dv(&[2])).to_string(), "3 + q");
    assert_eq!(carell_dim(2, 1).unwrap().dimension, 2);
    assert_eq!(carell_dim(3, 1).unwrap().dimension, 3);
    assert_eq!(carell_dim(4, 0).unwrap().dimension, 1);
}

#[test]
fn ind_rank_examples() {
    let ai = ColoredDivisor::parse("a:i").unwrap();
    assert_eq!(ind_rank(&Poset::point(), &ai), 2);
    assert_eq!(ind_rank(&Poset::chain(3), &ai), 4);
    assert_eq!(ind_rank(&Poset::antichain(2), &ai), 4);
    assert_eq!(ind_rank(&Poset::point(), &ColoredDivisor::empty()), 1);
}
