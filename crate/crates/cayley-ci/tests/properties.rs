//! Randomized invariant checks, mostly pitting the fast paths against
//! brute-force oracles on small degrees.

use proptest::prelude::*;

use cayley_ci::autgrp::aut_group;
use cayley_ci::group::wreath_product;
use cayley_ci::perm::Permutation;
use cayley_ci::relstruct::{digraph_wreath, orbit_coloring, ColorRelStruct};
use cayley_ci::{GroupSpec, PermGroup};

use num_bigint::BigUint;
use std::collections::HashSet;

fn arb_perm(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

fn arb_group(degree: usize, gens: usize) -> impl Strategy<Value = PermGroup> {
    prop::collection::vec(arb_perm(degree), 1..=gens)
        .prop_map(|gens| PermGroup::from_generators(gens).unwrap())
}

fn arb_structure(n: usize, k: usize) -> impl Strategy<Value = ColorRelStruct> {
    prop::collection::vec(
        (prop::collection::vec(0..n, k), 0..3u32),
        0..=(2 * n).min(16),
    )
    .prop_map(move |edges| {
        let mut x = ColorRelStruct::new(n, k).unwrap();
        for (tuple, color) in edges {
            x.set(&tuple, color).unwrap();
        }
        x
    })
}

fn arb_loop_free_digraph(n: usize) -> impl Strategy<Value = ColorRelStruct> {
    prop::collection::vec(((0..n, 0..n), 0..3u32), 0..=2 * n).prop_map(move |edges| {
        let mut x = ColorRelStruct::new(n, 2).unwrap();
        for ((a, b), color) in edges {
            if a != b {
                x.set(&[a, b], color).unwrap();
            }
        }
        x
    })
}

/// Exhaustive closure of a generating set; the oracle for group orders.
fn closure(gens: &[Permutation]) -> HashSet<Vec<usize>> {
    let degree = gens[0].degree();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut frontier = vec![Permutation::identity(degree)];
    seen.insert(frontier[0].images().to_vec());
    while let Some(g) = frontier.pop() {
        for h in gens {
            let next = h.compose(&g);
            if seen.insert(next.images().to_vec()) {
                frontier.push(next);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn compose_is_associative_with_identity_and_inverses(
        (a, b, c) in (1usize..=64).prop_flat_map(|n| (arb_perm(n), arb_perm(n), arb_perm(n))),
    ) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        let id = Permutation::identity(a.degree());
        prop_assert_eq!(a.compose(&id), a.clone());
        prop_assert_eq!(id.compose(&a), a.clone());
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert!(a.inverse().compose(&a).is_identity());
    }

    #[test]
    fn cycle_notation_round_trips(g in (1usize..=40).prop_flat_map(arb_perm)) {
        let text = g.cycle_string();
        let back = Permutation::parse_cycles(&text, g.degree()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn pow_respects_order(g in arb_perm(12)) {
        let order = g.order() as i64;
        prop_assert!(g.pow(order).is_identity());
        prop_assert_eq!(g.pow(-1), g.inverse());
        prop_assert_eq!(g.pow(order + 3), g.pow(3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_order_matches_brute_closure(group in arb_group(6, 3)) {
        let brute = closure(group.generators());
        prop_assert_eq!(group.order(), &BigUint::from(brute.len()));
        for images in brute.iter().take(60) {
            let g = Permutation::from_images(images.clone()).unwrap();
            prop_assert!(group.contains(&g));
        }
    }

    #[test]
    fn orbit_stabilizer_identity(group in arb_group(7, 3)) {
        for x in 0..group.degree() {
            let orbit = group.orbit(x);
            let stab = group.point_stabilizer(x);
            prop_assert_eq!(
                BigUint::from(orbit.len()) * stab.order(),
                group.order().clone()
            );
        }
    }

    #[test]
    fn block_systems_are_invariant_equal_sized_partitions(group in arb_group(6, 2)) {
        prop_assume!(group.is_transitive());
        for sys in group.all_block_systems().unwrap() {
            let size = sys.blocks()[0].len();
            prop_assert_eq!(sys.degree(), group.degree());
            for b in sys.blocks() {
                prop_assert_eq!(b.len(), size);
            }
            for g in group.generators() {
                for b in sys.blocks() {
                    let mut image: Vec<usize> = b.iter().map(|&u| g.apply(u)).collect();
                    image.sort_unstable();
                    prop_assert!(sys.blocks().contains(&image));
                }
            }
        }
    }

    #[test]
    fn block_kernel_is_the_blockwise_fixer(group in arb_group(6, 2)) {
        prop_assume!(group.is_transitive());
        for sys in group.all_block_systems().unwrap() {
            let kernel = group.block_kernel(&sys).unwrap();
            for g in group.elements().unwrap() {
                let fixes_all = sys.blocks().iter().all(|b| {
                    let mut image: Vec<usize> = b.iter().map(|&u| g.apply(u)).collect();
                    image.sort_unstable();
                    &image == b
                });
                prop_assert_eq!(fixes_all, kernel.contains(&g));
            }
        }
    }

    #[test]
    fn conjugator_verdicts_match_exhaustive_search(
        ambient in arb_group(5, 2),
        a_word in prop::collection::vec(0usize..2, 1..4),
        b_word in prop::collection::vec(0usize..2, 1..4),
    ) {
        // subgroups generated by words in the ambient generators
        let spell = |word: &[usize]| {
            word.iter().fold(Permutation::identity(5), |acc, &i| {
                ambient.generators()[i % ambient.generators().len()].compose(&acc)
            })
        };
        let a = PermGroup::from_generators(vec![spell(&a_word)]).unwrap();
        let b = PermGroup::from_generators(vec![spell(&b_word)]).unwrap();
        let conjugated = |g: &Permutation| {
            PermGroup::from_generators(
                a.generators().iter().map(|h| h.conjugate_by(g)).collect(),
            )
            .unwrap()
        };
        let verdict = ambient.find_conjugator(&a, &b, 100_000).unwrap();
        match verdict {
            Some(g) => prop_assert!(conjugated(&g).same_group(&b)),
            None => {
                for g in ambient.elements().unwrap() {
                    prop_assert!(!conjugated(&g).same_group(&b));
                }
            }
        }
    }

    #[test]
    fn wreath_product_order(top in arb_group(3, 2), bottom in arb_group(3, 2)) {
        let w = wreath_product(&top, &bottom);
        prop_assert_eq!(w.degree(), top.degree() * bottom.degree());
        let expected = top.order() * bottom.order().pow(top.degree() as u32);
        prop_assert_eq!(w.order(), &expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_perm_is_a_group_action(
        x in arb_structure(5, 3),
        p in arb_perm(5),
        q in arb_perm(5),
    ) {
        let both = x.apply_perm(&p.compose(&q)).unwrap();
        let staged = x.apply_perm(&q).unwrap().apply_perm(&p).unwrap();
        prop_assert_eq!(both, staged);
    }

    #[test]
    fn orbit_coloring_admits_the_group(group in arb_group(5, 2), k in 1usize..=3) {
        let colored = orbit_coloring(&group, k).unwrap();
        for g in group.generators() {
            prop_assert!(colored.is_automorphism(g));
        }
        let aut = aut_group(&colored).unwrap();
        prop_assert!(aut.contains_group(&group));
    }

    #[test]
    fn connection_set_expansion_is_translation_closed(
        p in prop::sample::select(vec![1u64, 2, 3, 5]),
        d in 0u32..=3,
        raw in prop::collection::vec((prop::collection::vec(0usize..64, 2), 0..2u32), 0..6),
    ) {
        prop_assume!(p > 1 || d > 0);
        let spec = GroupSpec::new(p, d).unwrap();
        let mut conn = cayley_ci::relstruct::ConnectionSet::new(spec, 3);
        for (tuple, color) in raw {
            let t: Vec<usize> = tuple.into_iter().map(|v| v % spec.degree()).collect();
            if conn.color(&t).is_none() {
                conn.insert(t, color).unwrap();
            }
        }
        let x = conn.expand().unwrap();
        for g in spec.left_regular().generators() {
            prop_assert!(x.structure().is_automorphism(g));
        }
        prop_assert_eq!(x.structure().edge_count(), conn.len() * spec.degree());
    }

    #[test]
    fn wreath_digraph_edge_count(
        outer in arb_loop_free_digraph(4),
        inner in arb_structure(3, 2),
    ) {
        let w = digraph_wreath(&outer, &inner).unwrap();
        prop_assert_eq!(w.vertex_count(), 12);
        // exact because loop-free bundles never overlay a fiber copy
        prop_assert_eq!(
            w.edge_count(),
            outer.vertex_count() * inner.edge_count()
                + outer.edge_count() * inner.vertex_count() * inner.vertex_count()
        );
    }

    #[test]
    fn aut_groups_of_relabeled_structures_are_conjugate(
        x in arb_structure(5, 2),
        sigma in arb_perm(5),
    ) {
        let y = x.apply_perm(&sigma).unwrap();
        let ax = aut_group(&x).unwrap();
        let ay = aut_group(&y).unwrap();
        prop_assert_eq!(ax.order(), ay.order());
        for g in ax.generators() {
            prop_assert!(ay.contains(&g.conjugate_by(&sigma.inverse())));
        }
    }
}
