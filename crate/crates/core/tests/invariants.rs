//! Cross-module invariants, checked exhaustively on the built-in catalog and
//! by property tests on random explicit tables.

use std::sync::Arc;

use funrep::analysis::{compose_params, reducer_table};
use funrep::families::zero_index;
use funrep::{
    builtin_catalog, classify, emergence_census, find_reducer, information_loss, invert, is_constant, is_linear,
    is_self_similar, Distribution, FamilyRule, FiniteDomain, FunctionKind, FunctionRep, Linearity, ParamFamily,
};
use proptest::prelude::*;

fn frs(family: &ParamFamily) -> impl Iterator<Item = FunctionRep> + '_ {
    let shared = Arc::new(family.clone());
    (0..family.size()).map(move |v| FunctionRep::new(shared.clone(), v).unwrap())
}

fn catalog_up_to(max_n: usize) -> Vec<ParamFamily> {
    (1..=max_n).flat_map(builtin_catalog).collect()
}

/// A random table where each column is, with probability ~1/3, constant.
fn table_family(max_n: usize) -> impl Strategy<Value = ParamFamily> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(0..n, n), n),
                prop::collection::vec(0..3u8, n),
            )
        })
        .prop_map(|(n, mut matrix, kinds)| {
            for (v, kind) in kinds.iter().enumerate() {
                if *kind == 0 {
                    let c = matrix[0][v];
                    for row in matrix.iter_mut() {
                        row[v] = c;
                    }
                }
            }
            ParamFamily::table("t", FiniteDomain::plain("D", n).unwrap(), matrix).unwrap()
        })
}

fn check_fr_invariants(fr: &FunctionRep) {
    let n = fr.domain().size();
    let uniform = Distribution::uniform(fr.domain());
    let out = fr.pushforward(&uniform).unwrap();

    // information ⟺ more than one output
    assert_eq!(out.entropy() > 1e-12, fr.image_size() > 1);
    assert_eq!(out.contains_information(), fr.image_size() > 1);
    // knowledge ⟺ non-constant
    assert_eq!(fr.is_knowledge(), !is_constant(fr));

    assert!(out.probs().iter().all(|&p| p >= 0.0));
    assert!((out.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);

    let report = classify(fr);
    assert_eq!(report.bijective, report.injective && report.surjective);
    assert_eq!(report.kind == FunctionKind::Associative, report.bijective);
    assert_eq!(report.kind == FunctionKind::Associative, invert(fr).is_ok());
    assert_eq!(information_loss(fr) > 0, report.kind == FunctionKind::Additive);
    assert_eq!(report.information_loss, n - report.image_size);
    if let Ok(inverse) = invert(fr) {
        for i in 0..n {
            assert_eq!(inverse[fr.apply(i).unwrap()], i);
        }
    }
}

fn check_connection_invariants(family: &ParamFamily) {
    let n = family.size();
    let columns: Vec<FunctionRep> = frs(family).collect();
    for v1 in 0..n {
        for v2 in 0..n {
            let composed = compose_params(family, v1, v2);
            let report = funrep::analysis::classify_column(&composed);
            let first = classify(&columns[v1]);
            let second = classify(&columns[v2]);
            assert!(report.image_size <= first.image_size.min(second.image_size));
            assert_eq!(report.bijective, first.bijective && second.bijective);
            if let Some(r) = find_reducer(family, v1, v2).unwrap() {
                assert_eq!(family.column(r), composed.as_slice());
            }
        }
    }
}

#[test]
fn catalog_satisfies_fr_invariants() {
    for family in catalog_up_to(16) {
        for fr in frs(&family) {
            check_fr_invariants(&fr);
        }
    }
}

#[test]
fn catalog_satisfies_connection_invariants() {
    for family in catalog_up_to(12) {
        check_connection_invariants(&family);
    }
}

#[test]
fn builtin_families_are_total() {
    for family in catalog_up_to(16) {
        let n = family.size();
        for v in 0..n {
            for i in 0..n {
                assert!(family.eval(i, v) < n);
            }
        }
    }
}

#[test]
fn memories_absorb_null() {
    for n in 1..=16 {
        for family in builtin_catalog(n) {
            if let Some(null) = family.domain().null_index() {
                for v in 0..family.size() {
                    assert_eq!(family.eval(null, v), null, "{}", family.name());
                    assert_eq!(family.eval(v, null), null, "{}", family.name());
                }
            }
        }
    }
}

#[test]
fn closed_form_reducers_for_linear_exemplars() {
    for n in 2..=16 {
        let d = FiniteDomain::plain("Z", n).unwrap();
        let add = ParamFamily::new("add", d.clone(), FamilyRule::AffineMod { a: 1 }).unwrap();
        let mul = ParamFamily::new("mul", d, FamilyRule::MulMod).unwrap();
        for v1 in 0..n {
            for v2 in 0..n {
                assert_eq!(find_reducer(&add, v1, v2).unwrap(), Some((v1 + v2) % n));
                assert_eq!(find_reducer(&mul, v1, v2).unwrap(), Some((v1 * v2) % n));
            }
        }
    }
}

#[test]
fn zero_weight_neuron_is_not_knowledge() {
    for n in [3usize, 9, 17] {
        let d = FiniteDomain::plain("Z", n).unwrap();
        let fam = Arc::new(ParamFamily::new("q", d, FamilyRule::QuantizedNeuron { s: 2 }).unwrap());
        let fr = FunctionRep::new(fam, zero_index(n)).unwrap();
        assert!(!fr.is_knowledge());
    }
}

/// Linearity implies self-similarity exactly when the fitted slope is
/// idempotent (`a·a ≡ a mod n`); a fixed slope family is otherwise not
/// closed under connection.
#[test]
fn linear_slope_and_self_similarity() {
    for n in 2..=32usize {
        for a in 1..n {
            let d = FiniteDomain::plain("Z", n).unwrap();
            let family = ParamFamily::new("aff", d, FamilyRule::AffineMod { a: a as i64 }).unwrap();
            assert_eq!(is_linear(&family), Linearity::Yes);
            assert_eq!(is_self_similar(&family), (a * a) % n == a, "affine_mod({n}, {a})");
        }
    }
}

#[test]
fn census_agrees_with_pairwise_reducer_search() {
    for family in catalog_up_to(7) {
        let n = family.size();
        let census = emergence_census(&family);
        let mut emergent = 0;
        let mut first = None;
        for v1 in 0..n {
            for v2 in 0..n {
                if find_reducer(&family, v1, v2).unwrap().is_none() {
                    emergent += 1;
                    first.get_or_insert((v1, v2));
                }
            }
        }
        assert_eq!(census.pairs_emergent, emergent, "{}", family.name());
        assert_eq!(census.example_emergent_pair, first);
        assert_eq!(census.pairs_reducible + census.pairs_emergent, n * n);
        assert_eq!(census.self_similar, emergent == 0);
        assert_eq!(reducer_table(&family).iter().filter(|r| r.is_none()).count(), emergent);
    }
}

proptest! {
    #[test]
    fn random_tables_satisfy_fr_invariants(family in table_family(16)) {
        for fr in frs(&family) {
            check_fr_invariants(&fr);
        }
    }

    #[test]
    fn random_tables_satisfy_connection_invariants(family in table_family(8)) {
        check_connection_invariants(&family);
    }

    #[test]
    fn pushforward_is_a_distribution(
        family in table_family(10),
        weights in prop::collection::vec(0.0f64..1.0, 10),
        v in 0usize..10,
    ) {
        let n = family.size();
        let mut w: Vec<f64> = weights[..n].to_vec();
        w[0] += 1e-3;
        let total: f64 = w.iter().sum();
        let input = Distribution::new(family.domain().clone(), w.iter().map(|x| x / total).collect()).unwrap();
        let fr = FunctionRep::new(Arc::new(family), v % n).unwrap();
        let out = fr.pushforward(&input).unwrap();
        prop_assert!(out.probs().iter().all(|&p| p >= 0.0));
        prop_assert!((out.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn entropy_is_permutation_invariant(
        weights in prop::collection::vec(0.0f64..1.0, 1..20),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let total: f64 = weights.iter().sum::<f64>() + 1e-3;
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        probs[0] += 1e-3 / total;
        let domain = FiniteDomain::plain("D", probs.len()).unwrap();
        let original = Distribution::new(domain.clone(), probs.clone()).unwrap();
        probs.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let shuffled = Distribution::new(domain, probs).unwrap();
        prop_assert!((original.entropy() - shuffled.entropy()).abs() <= 1e-12);
    }

    #[test]
    fn apply_is_deterministic(family in table_family(12), i in 0usize..12, v in 0usize..12) {
        let n = family.size();
        let fr = FunctionRep::new(Arc::new(family), v % n).unwrap();
        prop_assert_eq!(fr.apply(i % n).unwrap(), fr.apply(i % n).unwrap());
    }

    #[test]
    fn table_families_are_bit_identical(family in table_family(12)) {
        let funrep::FamilyRule::Table { matrix } = family.rule().clone() else { unreachable!() };
        prop_assert_eq!(family.to_matrix(), matrix);
    }
}
