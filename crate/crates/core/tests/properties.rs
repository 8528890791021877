use std::collections::BTreeMap;

use proptest::prelude::*;

use loopgr_core::fgl::{Character, FormalGroupLaw};
use loopgr_core::fixedpoints::{gaussian_binomial, QPoly};
use loopgr_core::quiver::{catalog, DimVector, Quiver};
use loopgr_core::symalg::{symmetrize, Block, Monomial, MultiPoly, RationalFunction, Scalar, Var};
use loopgr_core::thom::check_bilinearity;
use loopgr_core::zastava::{ind_rank, subscheme_lattice, ColoredDivisor, Poset};

fn vars() -> [Var; 3] {
    [Var::torus(1, 0, 1), Var::torus(1, 0, 2), Var::Dilation(1)]
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -4i64..=4), 0..5).prop_map(|terms| {
        let v = vars();
        let mut p = MultiPoly::zero();
        for ((a, b, c), k) in terms {
            let m = Monomial::from_pairs([(v[0], a), (v[1], b), (v[2], c)]);
            p.add_term(m, Scalar::from_integer(k.into()));
        }
        p
    })
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn point() -> impl Strategy<Value = BTreeMap<Var, Scalar>> {
    (-6i64..=6, -6i64..=6, 1i64..=5).prop_map(|(a, b, c)| {
        let v = vars();
        [(v[0], a), (v[1], b), (v[2], c)].into_iter().map(|(x, n)| (x, Scalar::from_integer(n.into()))).collect()
    })
}

fn character() -> impl Strategy<Value = Character> {
    (-2i64..=2, -2i64..=2, -1i64..=1).prop_map(|(a, b, c)| {
        let v = vars();
        Character::from_terms([(v[0], a), (v[1], b), (v[2], c)])
    })
}

fn small_dim(n: usize, max: u32) -> impl Strategy<Value = DimVector> {
    prop::collection::vec(0..=max, n).prop_map(DimVector).prop_filter("nonzero", |v| !v.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in nonzero_poly()) {
        prop_assert_eq!((&a * &b).exact_div(&b), Some(a));
    }

    #[test]
    fn grlex_is_compatible_with_multiplication(x in (0u32..3, 0u32..3), y in (0u32..3, 0u32..3), z in (0u32..3, 0u32..3)) {
        let v = vars();
        let m = |(a, b): (u32, u32)| Monomial::from_pairs([(v[0], a), (v[1], b)]);
        let (mx, my, mz) = (m(x), m(y), m(z));
        prop_assert_eq!(mx.cmp(&my), mx.mul(&mz).cmp(&my.mul(&mz)));
    }

    #[test]
    fn rational_field_operations(p in nonzero_poly(), q in nonzero_poly(), r in nonzero_poly()) {
        let f = &RationalFunction::from_poly(&p) / &RationalFunction::from_poly(&q);
        let g = RationalFunction::from_poly(&r);
        prop_assert!((&(&f * &g) / &g).equals(&f));
        prop_assert!((&f + &g).equals(&(&g + &f)));
        prop_assert!((&(&f + &g) - &g).equals(&f));
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn evaluation_is_multiplicative(p in nonzero_poly(), q in nonzero_poly(), at in point()) {
        let (f, g) = (RationalFunction::from_poly(&p), RationalFunction::from_poly(&q));
        let lhs = (&f * &g).evaluate(&at).unwrap();
        prop_assert_eq!(lhs, f.evaluate(&at).unwrap() * g.evaluate(&at).unwrap());
        let direct = p.evaluate(&at).unwrap() + q.evaluate(&at).unwrap();
        prop_assert_eq!((&f + &g).evaluate(&at).unwrap(), direct);
    }

    #[test]
    fn equality_is_an_equivalence(p in nonzero_poly(), q in nonzero_poly()) {
        let f = &RationalFunction::from_poly(&p) / &RationalFunction::from_poly(&q);
        let g = &(&f * &RationalFunction::from_poly(&q)) / &RationalFunction::from_poly(&q);
        let h = f.cancel();
        prop_assert!(f.equals(&f));
        prop_assert!(f.equals(&g) && g.equals(&f));
        prop_assert!(g.equals(&h) && f.equals(&h));
    }

    #[test]
    fn symmetrization_is_linear(p in poly(), q in poly(), k in -3i64..=3) {
        let v = vars();
        let blocks = [Block::new(0, vec![v[0], v[1]])];
        let (f, g) = (RationalFunction::from_poly(&p), RationalFunction::from_poly(&q));
        let c = RationalFunction::constant(Scalar::from_integer(k.into()));
        let lhs = symmetrize(&(&f + &(&c * &g)), &blocks).unwrap();
        let rhs = &symmetrize(&f, &blocks).unwrap() + &(&c * &symmetrize(&g, &blocks).unwrap());
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn additive_lambda_is_additive(a in character(), b in character()) {
        let fgl = FormalGroupLaw::Additive;
        let sum = fgl.lambda_char(&(&a + &b)).unwrap();
        prop_assert!(sum.equals(&(&fgl.lambda_char(&a).unwrap() + &fgl.lambda_char(&b).unwrap())));
    }

    #[test]
    fn multiplicative_lambda_follows_group_law(a in character(), b in character()) {
        let fgl = FormalGroupLaw::Multiplicative;
        let (la, lb) = (fgl.lambda_char(&a).unwrap(), fgl.lambda_char(&b).unwrap());
        let expected = &(&la + &lb) - &(&la * &lb);
        prop_assert!(fgl.lambda_char(&(&a + &b)).unwrap().equals(&expected));
    }

    #[test]
    fn biextension_is_bilinear_on_a2(v1 in small_dim(2, 1), v2 in small_dim(2, 1), w in small_dim(2, 2)) {
        let q = Quiver::with_defaults(catalog::a2());
        for fgl in [FormalGroupLaw::Additive, FormalGroupLaw::Multiplicative] {
            prop_assert!(check_bilinearity(&q, &fgl, &v1, &v2, &w).unwrap());
        }
    }

    #[test]
    fn subscheme_lattice_and_ranks(ks in prop::collection::vec(1u32..=3, 1..=3), m in 1usize..=3) {
        let pts = ks.iter().enumerate().map(|(a, k)| (format!("p{}", a), "i".to_string(), *k)).collect();
        let d = ColoredDivisor::new(pts).unwrap();
        let size: usize = ks.iter().map(|k| *k as usize + 1).product();
        prop_assert_eq!(subscheme_lattice(&d).len(), size);
        let chain: usize = ks.iter().map(|&k| binomial(k as usize + m, m)).product();
        prop_assert_eq!(ind_rank(&Poset::chain(m), &d), chain);
        prop_assert_eq!(ind_rank(&Poset::antichain(m), &d), size.pow(m as u32));
    }

    #[test]
    fn gaussian_binomials(n in 0u32..=8, p in 0u32..=8) {
        prop_assume!(p <= n);
        let g = gaussian_binomial(n, p).unwrap();
        prop_assert_eq!(&g, &gaussian_binomial(n, n - p).unwrap());
        prop_assert_eq!(g.at_one(), binomial(n as usize, p as usize) as i64);
        let mut rev = g.0.clone();
        rev.reverse();
        prop_assert_eq!(rev, g.0.clone());
    }

    #[test]
    fn below_counts(v in prop::collection::vec(0u32..=3, 1..=3)) {
        let expected: usize = v.iter().map(|a| *a as usize + 1).product();
        prop_assert_eq!(DimVector(v).below().len(), expected);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

#[test]
fn incidence_form_is_symmetric_and_orientation_free() {
    let mut specs = catalog::loop_free_test_set();
    specs.push(("Jordan", catalog::jordan()));
    for (name, spec) in specs {
        let form = spec.incidence_form();
        for (i, row) in form.iter().enumerate() {
            for (j, q) in row.iter().enumerate() {
                assert_eq!(*q, form[j][i], "{}", name);
            }
        }
        assert_eq!(spec.opposite().incidence_form(), form, "{}", name);
    }
}

#[test]
fn qpoly_product_evaluates_multiplicatively() {
    let a = gaussian_binomial(4, 2).unwrap();
    let b = gaussian_binomial(3, 1).unwrap();
    assert_eq!(a.mul(&b).at_one(), 18);
    assert_eq!(QPoly::one().mul(&a), a);
}
