//! A fully explicit counterexample on 32 points: one ternary structure
//! whose automorphism group contains two regular elementary abelian
//! subgroups of order 32 that are not conjugate inside it. Since every
//! regular representation of `Z_2^5` realizes the structure as a Cayley
//! structure, this shows `Z_2^5` is not a CI-group with respect to ternary
//! relational structures.
//!
//! The twelve generators and the two edge orbit seeds are data, embedded
//! below in 1-indexed cycle notation on the points 1..32 (point k stands
//! for the vector k-1). Everything else is recomputed from them.

use crate::autgrp::aut_group;
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::relstruct::ColorRelStruct;
use crate::report::Report;
use crate::witness::WitnessError;

pub const DEGREE: usize = 32;

/// The first regular copy: translations by the five basis vectors.
pub const V_GENERATORS: [&str; 5] = [
    "(1,2)(3,4)(5,6)(7,8)(9,10)(11,12)(13,14)(15,16)(17,18)(19,20)(21,22)(23,24)(25,26)(27,28)(29,30)(31,32)",
    "(1,3)(2,4)(5,7)(6,8)(9,11)(10,12)(13,15)(14,16)(17,19)(18,20)(21,23)(22,24)(25,27)(26,28)(29,31)(30,32)",
    "(1,5)(2,6)(3,7)(4,8)(9,13)(10,14)(11,15)(12,16)(17,21)(18,22)(19,23)(20,24)(25,29)(26,30)(27,31)(28,32)",
    "(1,9)(2,10)(3,11)(4,12)(5,13)(6,14)(7,15)(8,16)(17,25)(18,26)(19,27)(20,28)(21,29)(22,30)(23,31)(24,32)",
    "(1,17)(2,18)(3,19)(4,20)(5,21)(6,22)(7,23)(8,24)(9,25)(10,26)(11,27)(12,28)(13,29)(14,30)(15,31)(16,32)",
];

/// The second regular copy; its first generator coincides with the first
/// translation.
pub const W_GENERATORS: [&str; 5] = [
    "(1,2)(3,4)(5,6)(7,8)(9,10)(11,12)(13,14)(15,16)(17,18)(19,20)(21,22)(23,24)(25,26)(27,28)(29,30)(31,32)",
    "(1,3)(2,4)(5,7)(6,8)(9,11)(10,12)(13,15)(14,16)(17,20)(18,19)(21,24)(22,23)(25,28)(26,27)(29,32)(30,31)",
    "(1,5)(2,6)(3,7)(4,8)(9,14)(10,13)(11,16)(12,15)(17,22)(18,21)(19,24)(20,23)(25,29)(26,30)(27,31)(28,32)",
    "(1,9)(2,10)(3,11)(4,12)(5,14)(6,13)(7,16)(8,15)(17,27)(18,28)(19,25)(20,26)(21,32)(22,31)(23,30)(24,29)",
    "(1,17)(2,18)(3,20)(4,19)(5,22)(6,21)(7,23)(8,24)(9,27)(10,28)(11,26)(12,25)(13,32)(14,31)(15,29)(16,30)",
];

/// Two more automorphisms thrown in to grow the group to order 2048.
pub const EXTRA_GENERATORS: [&str; 2] = [
    "(25,26)(27,28)(29,30)(31,32)",
    "(1,11)(2,12)(3,9)(4,10)(5,13)(6,14)(7,15)(8,16)(17,19)(18,20)(25,27)(26,28)",
];

/// Edge orbit seeds, 0-indexed; in cycle labels these read (1,3,9) and
/// (1,5,25).
pub const SEEDS: [[usize; 3]; 2] = [[0, 2, 8], [0, 4, 24]];

pub struct Counterexample {
    pub v_gens: Vec<Permutation>,
    pub w_gens: Vec<Permutation>,
    pub extra_gens: Vec<Permutation>,
    pub v: PermGroup,
    pub w: PermGroup,
    /// The group generated by all twelve listed permutations.
    pub group: PermGroup,
    /// The orbit of the seed triples under that group, one color.
    pub structure: ColorRelStruct,
}

/// The smallest edge set on `degree` points containing the seeds and
/// closed under the generators.
pub fn structure_from_seeds(
    degree: usize,
    gens: &[Permutation],
    seeds: &[[usize; 3]],
) -> Result<ColorRelStruct, WitnessError> {
    let mut x = ColorRelStruct::new(degree, 3)?;
    let mut queue: Vec<Vec<usize>> = Vec::new();
    for seed in seeds {
        let t = seed.to_vec();
        if x.color(&t).is_none() {
            x.set(&t, 0)?;
            queue.push(t);
        }
    }
    while let Some(t) = queue.pop() {
        for g in gens {
            let image = g.apply_tuple(&t);
            if x.color(&image).is_none() {
                x.set(&image, 0)?;
                queue.push(image);
            }
        }
    }
    Ok(x)
}

pub fn counterexample_from_strings(
    v: &[&str],
    w: &[&str],
    extra: &[&str],
) -> Result<Counterexample, WitnessError> {
    let parse_all = |strs: &[&str]| -> Result<Vec<Permutation>, WitnessError> {
        strs.iter()
            .map(|s| Permutation::parse_cycles(s, DEGREE).map_err(WitnessError::from))
            .collect()
    };
    counterexample_from_generators(parse_all(v)?, parse_all(w)?, parse_all(extra)?)
}

pub fn counterexample_from_generators(
    v_gens: Vec<Permutation>,
    w_gens: Vec<Permutation>,
    extra_gens: Vec<Permutation>,
) -> Result<Counterexample, WitnessError> {
    let v = PermGroup::from_generators(v_gens.clone())?;
    let w = PermGroup::from_generators(w_gens.clone())?;
    let mut all = v_gens.clone();
    all.extend(w_gens.iter().cloned());
    all.extend(extra_gens.iter().cloned());
    let group = PermGroup::from_generators(all)?;
    let structure = structure_from_seeds(DEGREE, group.generators(), &SEEDS)?;
    Ok(Counterexample {
        v_gens,
        w_gens,
        extra_gens,
        v,
        w,
        group,
        structure,
    })
}

pub fn load_counterexample() -> Result<Counterexample, WitnessError> {
    counterexample_from_strings(&V_GENERATORS, &W_GENERATORS, &EXTRA_GENERATORS)
}

/// Runs the verdicts on an assembled counterexample. Computing the full
/// automorphism group of the structure is the slow step and can be
/// skipped; the skip is recorded as a note, never as a passing verdict.
pub fn verify_parts(data: &Counterexample, skip_full_aut: bool) -> Report {
    let mut report = Report::new("explicit 32-point counterexample for Z_2^5");

    report.record("group-order-2048", || {
        let order = data.group.order();
        (
            *order == 2048u32.into(),
            format!("the twelve generators generate a group of order {}", order),
        )
    });

    report.record("v-and-w-regular-elementary-abelian", || {
        let describe = |g: &PermGroup| {
            format!(
                "order {}, regular: {}, elementary abelian: {}",
                g.order(),
                g.is_regular(),
                g.is_elementary_abelian()
            )
        };
        let good = |g: &PermGroup| {
            *g.order() == 32u32.into() && g.is_regular() && g.is_elementary_abelian()
        };
        (
            good(&data.v) && good(&data.w),
            format!("V: {}; W: {}", describe(&data.v), describe(&data.w)),
        )
    });

    report.record("generators-preserve-structure", || {
        let gens = data.group.generators();
        let bad: Vec<usize> = gens
            .iter()
            .enumerate()
            .filter(|(_, g)| !data.structure.is_automorphism(g))
            .map(|(i, _)| i)
            .collect();
        if bad.is_empty() {
            (
                true,
                format!("all {} generators preserve the edge set", gens.len()),
            )
        } else {
            (false, format!("generators {:?} break the edge set", bad))
        }
    });

    if skip_full_aut {
        report.note("full automorphism group computation skipped on request");
    } else {
        report.record("automorphism-group-is-exactly-the-group", || {
            match aut_group(&data.structure) {
                Ok(aut) => (
                    aut.same_group(&data.group),
                    format!(
                        "automorphism group has order {}, the generated group {}",
                        aut.order(),
                        data.group.order()
                    ),
                ),
                Err(e) => (false, format!("automorphism search failed: {}", e)),
            }
        });
    }

    report.record("v-and-w-not-conjugate-in-the-group", || {
        match data.group.find_conjugator(&data.v, &data.w, 100_000) {
            Ok(Some(g)) => (false, format!("conjugate via {}", g.cycle_string())),
            Ok(None) => (
                true,
                format!(
                    "no element of the order-{} group conjugates V onto W",
                    data.group.order()
                ),
            ),
            Err(e) => (false, format!("conjugacy search failed: {}", e)),
        }
    });

    report.note(format!(
        "seed triples: {:?} (cycle labels (1,3,9) and (1,5,25))",
        SEEDS
    ));
    report.note(format!(
        "the seed orbit has {} edges",
        data.structure.edge_count()
    ));
    report.conclusion = if report.all_pass() {
        "COUNTEREXAMPLE-VALID: Z_2^5 is not a CI-group with respect to ternary relational structures"
            .to_string()
    } else {
        "COUNTEREXAMPLE-INVALID: at least one verdict failed".to_string()
    };
    report
}

pub fn verify_counterexample(skip_full_aut: bool) -> Result<Report, WitnessError> {
    Ok(verify_parts(&load_counterexample()?, skip_full_aut))
}
