use gpkn_core::bollobas::{classic_lhs, doubled_pairs, lemma5_lhs, permutation_oracle};
use gpkn_core::combinatorics::{
    enumerate_ksets, parse_family_file, profile, rank_colex, serialize_family_file, unrank_colex,
};
use gpkn_core::families::{
    hilton_milner, hilton_milner_size, is_intersecting, is_maximal, random_maximal_system,
    validate_system,
};
use gpkn_core::geodesy::{
    check_gp_components, check_gp_direct, gp_solve_exact, gp_solve_naive, SolveLimits,
};
use gpkn_core::kneser::{all_pairs_distances, distance_closed_form_2k1};
use gpkn_core::{binomial, choose, KSet, KneserParams, Rational, SetPairSystem, SimpleGraph};
use proptest::prelude::*;

fn kset(n: u32) -> impl Strategy<Value = KSet> {
    (1u32..=n.min(63)).prop_flat_map(move |k| {
        Just(()).prop_perturb(move |_, mut rng| {
            let mut elems: Vec<u32> = (1..=n).collect();
            for i in (1..elems.len()).rev() {
                let j = rng.random_range(0..=i);
                elems.swap(i, j);
            }
            elems.truncate(k as usize);
            KSet::from_elements(&elems, n).unwrap()
        })
    })
}

fn graph() -> impl Strategy<Value = SimpleGraph> {
    (2usize..=12, 0usize..=90, any::<u64>()).prop_map(|(order, density, seed)| {
        SimpleGraph::random_connected(order, density, seed).unwrap()
    })
}

fn subset_of(order: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0..order, 1..=order).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binomial_counts_enumeration(n in 1u32..=16, k in 0u32..=16) {
        prop_assume!(k <= n);
        let count = enumerate_ksets(n, k).unwrap().count() as u64;
        prop_assert_eq!(binomial(n as u64, k as i64).unwrap(), count);
    }

    #[test]
    fn pascal_rule(n in 1u32..=64, k in 1u32..=64) {
        prop_assume!(k <= n);
        prop_assert_eq!(choose(n, k), choose(n - 1, k - 1) + choose(n - 1, k));
    }

    #[test]
    fn colex_rank_round_trips(n in 1u32..=64, s in (1u32..=64).prop_flat_map(kset)) {
        prop_assume!(s.n() <= n);
        let s = KSet::from_mask(s.mask(), n).unwrap();
        let r = rank_colex(s);
        prop_assert!(r < choose(n, s.k()));
        prop_assert_eq!(unrank_colex(r, n, s.k()).unwrap(), s);
    }

    #[test]
    fn kset_text_round_trips(s in (1u32..=64).prop_flat_map(kset)) {
        prop_assert_eq!(KSet::parse_list(&s.to_list_string(), s.n()).unwrap(), s);
    }

    #[test]
    fn graph_distances_form_a_metric(g in graph()) {
        let dm = g.distances().unwrap();
        prop_assert!(dm.is_metric());
        for u in 0..g.order() {
            for v in 0..g.order() {
                prop_assert_eq!(dm.get(u, v) == 1, g.is_adjacent(u, v));
            }
        }
    }

    #[test]
    fn checkers_agree((g, set) in graph().prop_flat_map(|g| { let o = g.order(); (Just(g), subset_of(o)) })) {
        let dm = g.distances().unwrap();
        let direct = check_gp_direct(&dm, &set).unwrap();
        let comp = check_gp_components(&dm, &set).unwrap();
        prop_assert_eq!(direct.is_pass(), comp.is_pass());
        if let Some(w) = direct.witness() {
            prop_assert_eq!(dm.get(w.x, w.z) + dm.get(w.z, w.y), dm.get(w.x, w.y));
        }
    }

    #[test]
    fn general_position_is_hereditary(g in graph(), drop in any::<prop::sample::Index>()) {
        let dm = g.distances().unwrap();
        let best = gp_solve_exact(&dm, None, &SolveLimits::default()).unwrap();
        prop_assert!(check_gp_direct(&dm, &best.set).unwrap().is_pass());
        let mut smaller = best.set.clone();
        smaller.remove(drop.index(smaller.len()));
        prop_assert!(check_gp_direct(&dm, &smaller).unwrap().is_pass());
    }

    #[test]
    fn exact_matches_naive(g in graph()) {
        let dm = g.distances().unwrap();
        prop_assert_eq!(gp_solve_exact(&dm, None, &SolveLimits::default()).unwrap(), gp_solve_naive(&dm).unwrap());
    }

    #[test]
    fn odd_graph_distances(k in 1u32..=4, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let p = KneserParams::new(2 * k + 1, k).unwrap();
        let dm = all_pairs_distances(p).unwrap();
        let (i, j) = (a.index(dm.order()), b.index(dm.order()));
        let s = p.vertex(i as u64).unwrap().intersection_size(p.vertex(j as u64).unwrap());
        let want = if i == j { 0 } else { distance_closed_form_2k1(k, s).unwrap() };
        prop_assert_eq!(dm.get(i, j) as u32, want);
    }

    #[test]
    fn random_systems_are_valid_and_maximal(n in 7u32..=10, k in 2u32..=3, seed in any::<u64>()) {
        let sys = random_maximal_system(n, k, seed).unwrap();
        prop_assert!(validate_system(&sys).is_ok());
        prop_assert!(is_maximal(&sys).unwrap());
        // Σ|F_i| = h + Σ_{j>=2} m_j
        let prof = profile(&sys);
        prop_assert_eq!(sys.total(), prof.layered_total());
        let again = parse_family_file(&serialize_family_file(&sys)).unwrap();
        prop_assert_eq!(serialize_family_file(&again), serialize_family_file(&sys));
    }

    #[test]
    fn hilton_milner_shape(n in 6u32..=10, k in 2u32..=3, x in 1u32..=10, g in (6u32..=10).prop_flat_map(kset)) {
        prop_assume!(n >= 2 * k && x <= n && g.n() <= n);
        let g = KSet::from_elements(&g.elements().into_iter().take(k as usize).collect::<Vec<_>>(), n).unwrap();
        prop_assume!(g.k() == k && !g.contains(x));
        let hm = hilton_milner(n, k, x, g).unwrap();
        prop_assert_eq!(hm.members.len() as u64, hilton_milner_size(n, k));
        prop_assert!(is_intersecting(&hm.members));
        let common = hm.members.iter().fold(u64::MAX, |acc, s| acc & s.mask());
        prop_assert_eq!(common, 0);
    }

    #[test]
    fn doubled_cross_intersecting_pairs(k in 2u32..=4, picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..5)) {
        // pairs (F, [2k] \ F) of k-subsets of [2k] pairwise meet across pairs
        let all: Vec<KSet> = enumerate_ksets(2 * k, k).unwrap().collect();
        let full = (1u64 << (2 * k)) - 1;
        let mut pairs: Vec<[u64; 2]> = Vec::new();
        for ix in picks {
            let f = all[ix.index(all.len())].mask();
            let f = f.min(full & !f);
            if !pairs.iter().any(|p| p[0] == f) {
                pairs.push([f, full & !f]);
            }
        }
        let lhs = classic_lhs(&doubled_pairs(&pairs)).unwrap();
        let want = Rational::new((2 * pairs.len() as i64).into(), (choose(2 * k, k) as i64).into());
        prop_assert_eq!(lhs.clone(), want);
        prop_assert!(lhs <= Rational::from_integer(1.into()));
    }

    #[test]
    fn oracle_reassembles_lemma5_lhs(a in 1u32..=2, b in 1u32..=2, c in 1u32..=2) {
        let mask = |lo: u32, len: u32| ((1u64 << len) - 1) << lo;
        let sys = SetPairSystem::new(vec![], vec![[mask(0, a), mask(a, b), mask(a + b, c)]]).unwrap();
        let r = permutation_oracle(&sys).unwrap();
        prop_assert!(r.counts_match);
        prop_assert!(r.at_most_one);
        prop_assert_eq!(r.lhs_from_counts, lemma5_lhs(&sys));
    }
}
