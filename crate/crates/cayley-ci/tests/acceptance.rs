//! The claims this crate exists to machine-check, one test per claim.
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! pass lines and timings.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cayley_ci::autgrp::{
    aut_group, brute_force_aut, group_automorphism_count, k_closure, BRUTE_FORCE_MAX,
};
use cayley_ci::perm::Permutation;
use cayley_ci::relstruct::ColorRelStruct;
use cayley_ci::report::Report;
use cayley_ci::witness::{
    build_anchor, build_witness, semiregular_digraph, verify_pair, verify_witness, Mode,
    WitnessSpec, WITNESS_VALID,
};
use cayley_ci::z2five;
use cayley_ci::{GroupSpec, PermGroup};

fn cyc(s: &str, n: usize) -> Permutation {
    Permutation::parse_cycles(s, n).unwrap()
}

fn demand_all_pass(report: &Report) {
    assert!(
        report.all_pass(),
        "expected all verdicts to pass:\n{}",
        report.render_text()
    );
}

fn pass(criterion: u32, label: &str, started: Instant, extra: &str) {
    println!(
        "ACCEPTANCE {} {}: PASS ({} ms){}{}",
        criterion,
        label,
        started.elapsed().as_millis(),
        if extra.is_empty() { "" } else { " " },
        extra
    );
}

#[test]
fn acceptance_01_smallest_witness_both_modes() {
    let started = Instant::now();
    for mode in [Mode::Color, Mode::Plain] {
        let spec = WitnessSpec::standard(3, 2, mode).unwrap();
        let bundle = build_witness(spec).unwrap();
        let report = verify_witness(&bundle);
        demand_all_pass(&report);
        assert_eq!(report.verdicts.len(), 5, "mode {}", mode);
        assert!(report.conclusion.starts_with(WITNESS_VALID));
        let scan = &report.verdicts[4];
        assert!(
            scan.detail.contains("all 12 group automorphisms"),
            "mode {}: {}",
            mode,
            scan.detail
        );
    }
    pass(1, "witness-(3,2)-both-modes", started, "12 candidates each");
}

#[test]
fn acceptance_02_witness_7_3_plain() {
    let started = Instant::now();
    let gspec = GroupSpec::new(7, 3).unwrap();
    assert_eq!(group_automorphism_count(&gspec), BigUint::from(1008u32));
    let bundle = build_witness(WitnessSpec::standard(7, 3, Mode::Plain).unwrap()).unwrap();
    let report = verify_witness(&bundle);
    demand_all_pass(&report);
    assert!(
        report.verdicts[4].detail.contains("all 1008 group automorphisms"),
        "{}",
        report.verdicts[4].detail
    );
    pass(2, "witness-(7,3)-plain", started, "1008 candidates");
}

#[test]
fn acceptance_03_witness_5_4_plain() {
    let started = Instant::now();
    let gspec = GroupSpec::new(5, 4).unwrap();
    assert_eq!(group_automorphism_count(&gspec), BigUint::from(80640u32));
    let bundle = build_witness(WitnessSpec::standard(5, 4, Mode::Plain).unwrap()).unwrap();
    let report = verify_witness(&bundle);
    demand_all_pass(&report);
    assert!(
        report.verdicts[4].detail.contains("all 80640 group automorphisms"),
        "{}",
        report.verdicts[4].detail
    );
    pass(3, "witness-(5,4)-plain", started, "80640 candidates");
}

#[test]
fn acceptance_04_anchor_automorphism_groups() {
    let started = Instant::now();
    let cases: [(u64, u32, Mode, u32); 4] = [
        (3, 2, Mode::Color, 12),
        (3, 2, Mode::Plain, 12),
        (7, 3, Mode::Plain, 56),
        (5, 4, Mode::Plain, 80),
    ];
    for (p, d, mode, expected) in cases {
        let spec = WitnessSpec::standard(p, d, mode).unwrap();
        let anchor = build_anchor(&spec).unwrap();
        let aut = aut_group(&anchor.structure).unwrap();
        assert_eq!(
            *aut.order(),
            BigUint::from(expected),
            "anchor for p={} d={} mode={}",
            p,
            d,
            mode
        );
        // the intended group, rebuilt here rather than taken from the anchor
        let vspec = GroupSpec::new(1, d).unwrap();
        let mut gens = vspec.left_regular().generators().to_vec();
        gens.push(spec.alpha().clone());
        let intended = PermGroup::from_generators(gens).unwrap();
        assert!(aut.contains_group(&intended), "p={} d={} mode={}", p, d, mode);
        assert!(aut.same_group(&intended), "p={} d={} mode={}", p, d, mode);
    }
    pass(4, "anchor-aut-orders-12-12-56-80", started, "");
}

#[test]
fn acceptance_05_semiregular_digraphs() {
    let started = Instant::now();
    for m in [2usize, 3, 5] {
        for s in [1usize, 2, 3] {
            let x = semiregular_digraph(m, s).unwrap();
            let aut = aut_group(&x).unwrap();
            assert_eq!(*aut.order(), BigUint::from(m), "m={} s={}", m, s);
            if m * s <= BRUTE_FORCE_MAX {
                let brute = brute_force_aut(&x).unwrap();
                assert!(aut.same_group(&brute), "m={} s={}", m, s);
            }
        }
    }
    pass(5, "semiregular-digraph-aut-orders", started, "9 shapes");
}

#[test]
fn acceptance_06_search_matches_brute_force_on_random_structures() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checked = 0;
    while checked < 60 {
        let n = rng.gen_range(1..=7usize);
        let k = if rng.gen_bool(0.5) { 2 } else { 3 };
        let mut x = ColorRelStruct::new(n, k).unwrap();
        let tuple_space = (n as u64).pow(k as u32);
        let edges = rng.gen_range(0..=tuple_space.min(24));
        for _ in 0..edges {
            let tuple: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            let color = rng.gen_range(0..3u32);
            x.set(&tuple, color).unwrap();
        }
        let fast = aut_group(&x).unwrap();
        let brute = brute_force_aut(&x).unwrap();
        assert!(
            fast.same_group(&brute),
            "disagreement on n={} k={} edges:\n{}",
            n,
            k,
            x.to_text()
        );
        checked += 1;
    }
    pass(6, "aut-search-equals-brute-force", started, "60 random structures");
}

#[test]
fn acceptance_07_z2five_counterexample() {
    let started = Instant::now();
    let report = z2five::verify_counterexample(false).unwrap();
    demand_all_pass(&report);
    assert_eq!(report.verdicts.len(), 5);
    assert!(report.verdicts[0].detail.contains("2048"));
    pass(7, "z2^5-counterexample-full", started, "");
}

#[test]
fn acceptance_08_construction_identities() {
    let started = Instant::now();
    for (p, d) in [(3u64, 2u32), (7, 3), (5, 4)] {
        let spec = WitnessSpec::standard(p, d, Mode::Plain).unwrap();
        let bundle = build_witness(spec.clone()).unwrap();
        let gspec = bundle.group;
        let vectors = 1usize << d;

        // the alpha extension interleaves with every vector translation
        for g in 0..vectors {
            let ghat = gspec.translation(gspec.encode(0, g));
            let image_hat = gspec.translation(gspec.encode(0, spec.alpha().apply(g)));
            assert_eq!(
                bundle.alpha_ext.compose(&ghat),
                image_hat.compose(&bundle.alpha_ext),
                "p={} d={} g={}",
                p,
                d,
                g
            );
        }

        // conjugating the fiber shift by the twist peels off one alpha
        assert_eq!(
            bundle.shift.conjugate_by(&bundle.twist),
            bundle.shift.compose(&bundle.alpha_ext.inverse()),
            "p={} d={}",
            p,
            d
        );

        // closed-form marker pairs equal the commutator evaluations
        let alpha_inv = spec.alpha().pow(-1);
        let alpha_inv_sq = spec.alpha().pow(-2);
        for g in 0..vectors {
            let ghat = gspec.translation(gspec.encode(0, g));
            let comm = ghat.commutator(&bundle.twist);
            let s1 = gspec.encode(1, alpha_inv.apply(g) ^ g);
            let s2 = gspec.encode(2, alpha_inv_sq.apply(g) ^ g);
            assert_eq!(comm.apply(gspec.encode(1, 0)), s1, "p={} d={} g={}", p, d, g);
            assert_eq!(comm.apply(gspec.encode(2, 0)), s2, "p={} d={} g={}", p, d, g);
            assert_eq!(bundle.marker_pairs.color(&[s1, s2]), Some(bundle.fresh_color));
        }

        // the twist does not fix the marker pair set
        let twisted = bundle.marker_pairs.map_points(&bundle.twist);
        let before: Vec<_> = bundle.marker_pairs.iter().collect();
        let after: Vec<_> = twisted.iter().collect();
        assert_ne!(before, after, "p={} d={}", p, d);

        // g -> alpha^{-1}(g) + g is a bijection on the vectors
        let mut hit = vec![false; vectors];
        for g in 0..vectors {
            hit[alpha_inv.apply(g) ^ g] = true;
        }
        assert!(hit.iter().all(|&b| b), "p={} d={}", p, d);
    }
    pass(8, "construction-identities-three-specs", started, "");
}

#[test]
fn acceptance_09_k_closure_sanity() {
    let started = Instant::now();
    let groups: Vec<(&str, PermGroup)> = vec![
        ("sym2", PermGroup::from_generators(vec![cyc("(1,2)", 2)]).unwrap()),
        ("sym3", PermGroup::from_generators(vec![cyc("(1,2)", 3), cyc("(1,2,3)", 3)]).unwrap()),
        ("c4", PermGroup::from_generators(vec![cyc("(1,2,3,4)", 4)]).unwrap()),
        ("v4", PermGroup::from_generators(vec![cyc("(1,2)(3,4)", 4), cyc("(1,3)(2,4)", 4)]).unwrap()),
        ("a4", PermGroup::from_generators(vec![cyc("(1,2,3)", 4), cyc("(1,2)(3,4)", 4)]).unwrap()),
        ("d4", PermGroup::from_generators(vec![cyc("(1,2,3,4)", 4), cyc("(2,4)", 4)]).unwrap()),
        ("c2xc3", PermGroup::from_generators(vec![cyc("(1,2)", 5), cyc("(3,4,5)", 5)]).unwrap()),
        ("c6", PermGroup::from_generators(vec![cyc("(1,2,3,4,5,6)", 6)]).unwrap()),
        ("d6", PermGroup::from_generators(vec![cyc("(1,2,3,4,5,6)", 6), cyc("(2,6)(3,5)", 6)]).unwrap()),
        (
            "z2cubed",
            GroupSpec::new(1, 3).unwrap().left_regular(),
        ),
        ("c12", PermGroup::from_generators(vec![cyc("(1,2,3,4,5,6,7,8,9,10,11,12)", 12)]).unwrap()),
    ];
    for (name, g) in &groups {
        let g3 = k_closure(g, 3).unwrap();
        let g2 = k_closure(g, 2).unwrap();
        assert!(g3.contains_group(g), "{}: G not inside its 3-closure", name);
        assert!(
            g2.contains_group(&g3),
            "{}: 3-closure not inside the 2-closure",
            name
        );
    }
    let sym3 = &groups[1].1;
    assert!(k_closure(sym3, 2).unwrap().same_group(sym3));
    let c4 = &groups[2].1;
    assert!(k_closure(c4, 2).unwrap().same_group(c4));
    pass(9, "k-closure-sanity", started, "11 groups");
}

/// Deleting a transposition from generator `g` means composing with it:
/// the listed generators are products of disjoint transpositions.
fn without_transposition(g: &Permutation, a: usize, b: usize) -> Permutation {
    let mut images: Vec<usize> = (0..g.degree()).collect();
    images.swap(a, b);
    let t = Permutation::from_images(images).unwrap();
    g.compose(&t)
}

#[test]
fn acceptance_10_negative_controls() {
    let started = Instant::now();

    // every single-transposition deletion in the 32-point data flips a verdict
    let baseline = z2five::load_counterexample().unwrap();
    let lists: [&[Permutation]; 3] = [&baseline.v_gens, &baseline.w_gens, &baseline.extra_gens];
    let mut mutations = 0;
    let mut slow_path = 0;
    for (which, gens) in lists.iter().enumerate() {
        for (i, g) in gens.iter().enumerate() {
            for cycle in g.cycles() {
                assert_eq!(cycle.len(), 2);
                let mutated = without_transposition(g, cycle[0], cycle[1]);
                let mut v = baseline.v_gens.clone();
                let mut w = baseline.w_gens.clone();
                let mut extra = baseline.extra_gens.clone();
                match which {
                    0 => v[i] = mutated,
                    1 => w[i] = mutated,
                    _ => extra[i] = mutated,
                }
                let rebuilt = z2five::counterexample_from_generators(v, w, extra).unwrap();
                mutations += 1;
                // cheap verdicts first; the full report only when they hold
                let cheap_flip = *rebuilt.group.order() != BigUint::from(2048u32)
                    || !(rebuilt.v.is_regular() && rebuilt.v.is_elementary_abelian())
                    || !(rebuilt.w.is_regular() && rebuilt.w.is_elementary_abelian());
                if cheap_flip {
                    continue;
                }
                slow_path += 1;
                let report = z2five::verify_parts(&rebuilt, false);
                assert!(
                    !report.all_pass(),
                    "mutation of list {} generator {} dropping ({},{}) still passes:\n{}",
                    which,
                    i,
                    cycle[0] + 1,
                    cycle[1] + 1,
                    report.render_text()
                );
            }
        }
    }

    // every single-edge recoloring of the smallest witness flips a verdict
    let bundle = build_witness(WitnessSpec::standard(3, 2, Mode::Color).unwrap()).unwrap();
    let edges = bundle.x.structure().edges_sorted();
    let mut recolorings = 0;
    for (tuple, color) in &edges {
        let mut damaged = bundle.x.structure().clone();
        damaged.set(tuple, color + 1).unwrap();
        let report = verify_pair(&bundle.spec, &damaged, &bundle.y);
        assert!(
            !report.all_pass(),
            "recoloring edge {:?} still passes:\n{}",
            tuple,
            report.render_text()
        );
        recolorings += 1;
    }

    pass(
        10,
        "negative-controls",
        started,
        &format!(
            "{} transposition deletions ({} needed the full verdicts), {} edge recolorings",
            mutations, slow_path, recolorings
        ),
    );
}
