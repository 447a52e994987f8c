use std::collections::{BTreeMap, HashSet};

use hermat_core::rational::{big, double_factorial_odd, factorial, frac, int};
use hermat_core::ribbon::{
    class_weighted_sum, connected_matrix_expansion, enumerate_classes, RibbonGraph,
};
use hermat_core::wick::{
    cyclic_successor, enumerate_matchings, for_each_matching, matching_count,
    matrix_bruteforce_sum, matrix_expansion, par_fold_matchings, scalar_coefficient,
};
use hermat_core::{DegreeProfile, NPoly};
use num_bigint::BigInt;
use proptest::prelude::*;

fn prof(s: &str) -> DegreeProfile {
    s.parse().unwrap()
}

/// Independent count of free indices: the number of cycles of the boundary
/// permutation `h -> eps(nu(h))`, followed naively.
fn boundary_cycles(nu: &[u32], eps: &[u32]) -> u32 {
    let mut seen = vec![false; nu.len()];
    let mut count = 0;
    for s in 0..nu.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut h = s;
        while !seen[h] {
            seen[h] = true;
            h = eps[nu[h] as usize] as usize;
        }
    }
    count
}

/// Every permutation of half-edges commuting with both `nu` and `eps`.
fn aut_by_all_permutations(g: &RibbonGraph) -> u64 {
    let nu = g.rotation();
    let eps = g.pairing();
    let size = nu.len();
    let mut perm: Vec<usize> = (0..size).collect();
    let mut count = 0;
    let mut c = vec![0usize; size];
    let check = |p: &[usize]| {
        (0..size).all(|h| {
            p[nu[h] as usize] == nu[p[h]] as usize && p[eps[h] as usize] == eps[p[h]] as usize
        })
    };
    if check(&perm) {
        count += 1;
    }
    let mut i = 0;
    while i < size {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if check(&perm) {
                count += 1;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count
}

#[test]
fn matching_counts_are_double_factorials() {
    for dots in [0u32, 2, 4, 6, 8, 10] {
        let p = DegreeProfile::from_counts([(dots.max(1), 1)]).unwrap();
        let p = if dots == 0 { DegreeProfile::empty() } else { p };
        let all: Vec<_> = enumerate_matchings(&p).unwrap().collect();
        assert_eq!(BigInt::from(all.len()), double_factorial_odd(dots as u64));
        let unique: HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), all.len());
        let mut dfs = 0u64;
        for_each_matching(dots, |_| dfs += 1);
        assert_eq!(Some(dfs), matching_count(dots));
        let par = par_fold_matchings(dots, || 0u64, |a, _| *a += 1, |a, b| a + b);
        assert_eq!(Some(par), matching_count(dots));
    }
    assert!(enumerate_matchings(&prof("3:1")).is_err());
}

#[test]
fn quartic_scalar_coefficients() {
    for v in 0..=4u64 {
        let p = DegreeProfile::from_counts([(4, v as u32)]).unwrap();
        let expect =
            big(double_factorial_odd(4 * v)) / big(factorial(4).pow(v as u32) * factorial(v));
        assert_eq!(scalar_coefficient(&p), expect);
    }
    assert_eq!(scalar_coefficient(&prof("4:1")), frac(1, 8));
}

#[test]
fn quartic_vertex_from_both_routes() {
    let expect = NPoly::from_terms([(3, frac(1, 2)), (1, frac(1, 4))]);
    assert_eq!(matrix_bruteforce_sum(&prof("4:1")).unwrap(), expect);
    assert_eq!(class_weighted_sum(&prof("4:1")).unwrap(), expect);
}

#[test]
fn pairing_sum_matches_boundary_cycle_oracle() {
    for p in ["3:2", "4:1", "3:2,4:1", "4:2", "6:1", "3:4"] {
        let p = prof(p);
        let nu = cyclic_successor(&p);
        let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
        for_each_matching(p.half_edges(), |eps| {
            *acc.entry(boundary_cycles(&nu, eps)).or_default() += 1
        });
        let group = big(p.ribbon_group_order());
        let oracle = NPoly::from_terms(acc.into_iter().map(|(b, c)| (b, int(c as i64) / &group)));
        assert_eq!(matrix_bruteforce_sum(&p).unwrap(), oracle, "{p}");
        assert_eq!(class_weighted_sum(&p).unwrap(), oracle, "{p}");
    }
}

#[test]
fn orbit_sizes_sum_to_matching_count() {
    for p in ["3:2", "4:2", "3:2,4:1", "3:4", "8:1"] {
        let p = prof(p);
        let group = p.ribbon_group_order();
        let total: BigInt = enumerate_classes(&p, false)
            .unwrap()
            .iter()
            .map(|c| &group / BigInt::from(c.aut))
            .sum();
        assert_eq!(total, double_factorial_odd(p.half_edges() as u64), "{p}");
    }
}

#[test]
fn aut_agrees_with_full_permutation_scan() {
    for p in ["4:1", "3:2", "4:2", "6:1", "3:2,4:1"] {
        for c in enumerate_classes(&prof(p), false).unwrap() {
            let g = &c.canonical;
            assert_eq!(aut_by_all_permutations(g), c.aut, "{p} {:?}", g.pairing());
            assert_eq!(g.aut_order_by_scan(), g.aut_order_by_search());
        }
    }
}

#[test]
fn disconnected_classes_factor_into_components() {
    // n^b / aut is multiplicative over components up to the symmetry factor of
    // repeated components, which is what exp(connected) = full encodes.
    let full = matrix_expansion(8, 8).unwrap();
    let conn = connected_matrix_expansion(8).unwrap();
    assert_eq!(conn.exp().unwrap(), full);
    for c in enumerate_classes(&prof("3:4"), false).unwrap() {
        let parts = c.canonical.components();
        assert_eq!(parts.len() as u32, c.components);
        let b: u32 = parts.iter().map(RibbonGraph::boundary_components).sum();
        assert_eq!(b, c.boundary);
    }
}

fn profile_strategy() -> impl Strategy<Value = DegreeProfile> {
    prop_oneof![
        Just(prof("4:1")),
        Just(prof("3:2")),
        Just(prof("4:2")),
        Just(prof("3:2,4:1")),
        Just(prof("5:2")),
        Just(prof("3:1,5:1")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_and_aut_survive_relabelling(
        p in profile_strategy(),
        pick in any::<prop::sample::Index>(),
        shuffle in any::<u64>(),
    ) {
        let classes = enumerate_classes(&p, false).unwrap();
        let c = &classes[pick.index(classes.len())];
        let size = p.half_edges() as usize;
        let mut perm: Vec<u32> = (0..size as u32).collect();
        let mut state = shuffle | 1;
        for i in (1..size).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            perm.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let moved = c.canonical.relabel(&perm);
        prop_assert_eq!(moved.canonical_form(), c.canonical.clone());
        prop_assert_eq!(moved.aut_order(), c.aut);
        prop_assert_eq!(moved.boundary_components(), c.boundary);
        prop_assert_eq!(moved.genus().ok(), c.canonical.genus().ok());
    }

    #[test]
    fn euler_relation_holds(p in profile_strategy()) {
        for c in enumerate_classes(&p, true).unwrap() {
            let (g, s) = c.canonical.genus().unwrap();
            prop_assert_eq!(2 - 2 * g as i64, c.vertices as i64 - c.edges as i64 + s as i64);
        }
    }

    #[test]
    fn json_round_trip(p in profile_strategy()) {
        for c in enumerate_classes(&p, false).unwrap() {
            prop_assert_eq!(RibbonGraph::from_json(&c.canonical.to_json()).unwrap(), c.canonical);
        }
    }
}
