//! Extended isometries: witness algebra, compatibility and classification.

use bstree_core::checks;
use bstree_core::isometry::{classify, find_witness, min_displacement, ExtendedIsometry, IsometryClass};
use bstree_core::splittings::baumslag_solitar_splitting;
use bstree_core::surfaces::{dehn_twist, split_along_curve, CurveSpec};
use bstree_core::tree::{self, expand_ball};
use bstree_core::{Automorphism, Side, Verdict, Word};
use proptest::prelude::*;

fn words(alphabet: bstree_core::Alphabet, max_len: usize) -> impl Strategy<Value = Word> {
    let k = 2 * alphabet.len();
    prop::collection::vec(0..k, 0..=max_len)
        .prop_map(move |idx| Word::from_letters(idx.into_iter().map(|i| alphabet.letter(i))))
}

fn hnn_alphabet() -> bstree_core::Alphabet {
    split_along_curve(2, CurveSpec::NonSeparating)
        .unwrap()
        .splitting
        .whole()
        .alphabet()
        .clone()
}

fn bs_alphabet() -> bstree_core::Alphabet {
    baumslag_solitar_splitting(2, 3).unwrap().whole().alphabet().clone()
}

#[test]
fn twist_extensions_are_elliptic_and_compatible() {
    for curve in [CurveSpec::NonSeparating, CurveSpec::Separating(1)] {
        let w = split_along_curve(2, curve).unwrap();
        let s = &w.splitting;
        let twist = w.transport(&dehn_twist(2, curve).unwrap()).unwrap();
        let iso = find_witness(s, &twist, 2).unwrap().expect("witness");
        // The twist fixes the curve, so its extension fixes the base edge.
        let e = tree::base_edge();
        assert!(tree::edge_equal(s, &iso.apply_edge(s, &e).unwrap(), &e).unwrap());
        let ball = expand_ball(s, &tree::base_vertex(s, Side::A), 2, 1).unwrap();
        let sample: Vec<Word> = s.whole().alphabet().reduced_words(2).collect();
        let r = bstree_core::isometry::check_compatibility(s, &iso, &ball, &sample).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{curve}");
        let lambda = checks::check_lambda_membership(s, &twist, 2).unwrap();
        assert!(lambda.iter().all(|r| r.verdict == Verdict::Verified), "{curve}");
    }
}

#[test]
fn inner_witness_search_recovers_the_conjugator_class() {
    let s = baumslag_solitar_splitting(2, 3).unwrap();
    let t_x = Word::parse("t x").unwrap();
    let phi = Automorphism::inner(s.whole(), &t_x).unwrap();
    let iso = find_witness(&s, &phi, 2).unwrap().expect("witness");
    let ball = expand_ball(&s, &tree::base_vertex(&s, Side::A), 3, 1).unwrap();
    for v in ball.vertex_list() {
        let a = iso.apply_vertex(&s, v).unwrap();
        let b = tree::act_vertex(&s, &t_x, v).unwrap();
        assert!(tree::vertex_equal(&s, &a, &b).unwrap(), "{v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_extensions_compose_like_products(x in words(hnn_alphabet(), 4), y in words(hnn_alphabet(), 4), i in 0usize..145) {
        let w = split_along_curve(2, CurveSpec::NonSeparating).unwrap();
        let s = &w.splitting;
        let ball = expand_ball(s, &tree::base_vertex(s, Side::A), 2, 1).unwrap();
        let v = &ball.vertices[i].vertex;
        let ix = ExtendedIsometry::inner(s, &x).unwrap();
        let iy = ExtendedIsometry::inner(s, &y).unwrap();
        let both = ix.compose(s, &iy).unwrap();
        let direct = tree::act_vertex(s, &x.concat(&y), v).unwrap();
        prop_assert!(tree::vertex_equal(s, &both.apply_vertex(s, v).unwrap(), &direct).unwrap());
        let back = ix.invert(s).unwrap();
        let home = back.apply_vertex(s, &ix.apply_vertex(s, v).unwrap()).unwrap();
        prop_assert!(tree::vertex_equal(s, &home, v).unwrap());
    }

    #[test]
    fn twisted_extensions_satisfy_compatibility(g in words(hnn_alphabet(), 5), i in 0usize..145, k in -2i64..=2) {
        let w = split_along_curve(2, CurveSpec::NonSeparating).unwrap();
        let s = &w.splitting;
        let twist = w.transport(&dehn_twist(2, CurveSpec::NonSeparating).unwrap()).unwrap();
        let mut iso = ExtendedIsometry::identity(s);
        let step = find_witness(s, &twist, 2).unwrap().unwrap();
        let step = if k < 0 { step.invert(s).unwrap() } else { step };
        for _ in 0..k.abs() {
            iso = step.compose(s, &iso).unwrap();
        }
        let ball = expand_ball(s, &tree::base_vertex(s, Side::A), 2, 1).unwrap();
        let u = &ball.vertices[i].vertex;
        let lhs = iso.apply_vertex(s, &tree::act_vertex(s, &g, u).unwrap()).unwrap();
        let rhs = tree::act_vertex(s, &iso.phi.apply(&g).unwrap(), &iso.apply_vertex(s, u).unwrap()).unwrap();
        prop_assert!(tree::vertex_equal(s, &lhs, &rhs).unwrap());
    }

    #[test]
    fn classification_matches_brute_force(g in words(bs_alphabet(), 5)) {
        let s = baumslag_solitar_splitting(2, 3).unwrap();
        let probe = tree::base_vertex(&s, Side::A);
        let class = classify(&s, &g, &probe).unwrap();
        let ball = expand_ball(&s, &probe, 4, 1).unwrap();
        prop_assert_eq!(class.displacement(), Some(min_displacement(&s, &g, &ball).unwrap()));
        // Translation lengths scale under powers; elliptics stay elliptic.
        let square = classify(&s, &g.pow(2), &probe).unwrap();
        match class {
            IsometryClass::Hyperbolic { length } => prop_assert_eq!(square.displacement(), Some(2 * length)),
            IsometryClass::Elliptic { .. } => prop_assert_eq!(square.displacement(), Some(0)),
            IsometryClass::UnknownWithinBound => prop_assert!(false, "no inversions in this tree"),
        }
        // Conjugation preserves the class.
        let h = Word::parse("t x").unwrap();
        let conj = Word::product([&h, &g, &h.inverse()]);
        prop_assert_eq!(classify(&s, &conj, &probe).unwrap().displacement(), class.displacement());
    }
}
