use hopf_forge_core::hopf::{self, AntipodeAlgorithm};
use hopf_forge_core::instances::enumerate_basis;
use hopf_forge_core::{make_rule, Element, ObjectKey, Rule};
use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::sample::select;

fn basis(rule: &Rule, bound: usize) -> Vec<ObjectKey> {
    enumerate_basis(rule, bound).unwrap()
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

fn graph_literal(edges: &[(u32, u32)]) -> String {
    let parts: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    format!("g{{{}}}", parts.join(","))
}

fn edge_list() -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((1u32..=5, 1u32..=5), 1..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_keys_ignore_vertex_names(edges in edge_list(), perm in Just((1u32..=5).collect::<Vec<_>>()).prop_shuffle()) {
        let rule = make_rule("graph", None).unwrap();
        let renamed: Vec<(u32, u32)> = edges.iter().map(|&(u, v)| (perm[u as usize - 1], perm[v as usize - 1])).collect();
        prop_assert_eq!(
            rule.parse_object(&graph_literal(&edges)).unwrap(),
            rule.parse_object(&graph_literal(&renamed)).unwrap()
        );
    }

    #[test]
    fn graph_edge_order_is_irrelevant(edges in edge_list().prop_shuffle()) {
        let rule = make_rule("graph", None).unwrap();
        let mut sorted = edges.clone();
        sorted.sort();
        prop_assert_eq!(
            rule.parse_object(&graph_literal(&edges)).unwrap(),
            rule.parse_object(&graph_literal(&sorted)).unwrap()
        );
    }

    #[test]
    fn literals_round_trip(name in select(vec!["free", "symmetric", "shuffle", "polynomial", "graph", "forest"]), pick in any::<prop::sample::Index>()) {
        let rule = make_rule(name, None).unwrap();
        let objs = basis(&rule, 3);
        let k = pick.get(&objs);
        let again = rule.parse_object(&rule.format_object(k)).unwrap();
        prop_assert_eq!(&again, k);
        prop_assert_eq!(rule.parse_object(&rule.format_object(&again)).unwrap(), again);
    }

    #[test]
    fn composition_adds_sizes(name in select(vec!["free", "symmetric", "shuffle", "polynomial", "graph", "forest"]), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let rule = make_rule(name, None).unwrap();
        let objs = basis(&rule, 3);
        let (a, b) = (i.get(&objs), j.get(&objs));
        let want = rule.size(a).unwrap() + rule.size(b).unwrap();
        for k in rule.compose(a, b).unwrap().elements() {
            prop_assert_eq!(rule.size(k).unwrap(), want);
        }
        for (l, r) in rule.decompose(a).unwrap().elements() {
            prop_assert_eq!(rule.size(l).unwrap() + rule.size(r).unwrap(), rule.size(a).unwrap());
        }
    }

    #[test]
    fn forest_union_commutes(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let rule = make_rule("forest", None).unwrap();
        let objs = basis(&rule, 4);
        let (a, b) = (i.get(&objs), j.get(&objs));
        prop_assert_eq!(rule.compose(a, b).unwrap(), rule.compose(b, a).unwrap());
    }

    #[test]
    fn shuffle_counts_are_binomial(u in "[ab]{0,5}", v in "[ab]{0,5}") {
        let rule = make_rule("shuffle", Some("ab")).unwrap();
        let (ku, kv) = (rule.parse_object(&format!("w\"{u}\"")).unwrap(), rule.parse_object(&format!("w\"{v}\"")).unwrap());
        let m = rule.compose(&ku, &kv).unwrap();
        prop_assert_eq!(m.cardinality(), binomial((u.len() + v.len()) as u64, u.len() as u64));
    }

    #[test]
    fn free_iterated_decomposition_counts(w in "[ab]{0,5}", n in 0usize..4) {
        let rule = make_rule("free", Some("ab")).unwrap();
        let k = rule.parse_object(&format!("w\"{w}\"")).unwrap();
        // every letter picks one of the n+1 slots
        let want = BigUint::from(n as u32 + 1).pow(w.len() as u32);
        prop_assert_eq!(rule.iterated_decompose(&k, n).unwrap().cardinality(), want);
    }

    #[test]
    fn symmetric_exponents_add(p in 0usize..4, q in 0usize..4) {
        let rule = make_rule("symmetric", Some("x")).unwrap();
        let a = rule.parse_object(&format!("w\"{}\"", "x".repeat(p))).unwrap();
        let b = rule.parse_object(&format!("w\"{}\"", "x".repeat(q))).unwrap();
        let m = rule.compose(&a, &b).unwrap();
        prop_assert_eq!(m.distinct_len(), 1);
        prop_assert_eq!(rule.size(m.elements().next().unwrap()).unwrap(), p + q);
    }

    #[test]
    fn antipode_algorithms_agree_and_invert(name in select(vec!["free", "symmetric", "shuffle", "polynomial", "graph", "forest"]), pick in any::<prop::sample::Index>()) {
        let rule = make_rule(name, None).unwrap();
        let objs = basis(&rule, 3);
        let x = Element::basis(pick.get(&objs).clone());
        let s1 = hopf::antipode(&rule, &x, AntipodeAlgorithm::AlternatingSum).unwrap();
        let s2 = hopf::antipode(&rule, &x, AntipodeAlgorithm::Recursive).unwrap();
        prop_assert_eq!(&s1, &s2);
        let delta = hopf::coproduct(&rule, &x).unwrap();
        let left = hopf::map_tensor_factor(&delta, false, |g| hopf::antipode_sum(&rule, g)).unwrap();
        prop_assert_eq!(hopf::mu(&rule, &left).unwrap(), hopf::counit_projection(&rule, &x).unwrap());
    }

    #[test]
    fn grade_projections_sum_back(name in select(vec!["free", "shuffle", "graph", "forest"]), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let rule = make_rule(name, None).unwrap();
        let objs = basis(&rule, 3);
        let mut x = Element::zero();
        for (i, p) in picks.iter().enumerate() {
            x.add_term(p.get(&objs).clone(), hopf_forge_core::vector::rational(i as i64 + 1, 2));
        }
        let mut total = Element::zero();
        for n in 0..=3 {
            total = total.add(&hopf::project_grade(&rule, &x, n).unwrap());
        }
        prop_assert_eq!(total, x);
    }
}
