mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::brute_force_matches;
use gql_core::algebra::{op_join, op_union};
use gql_core::matching::{build_match, enumerate_matches};
use gql_core::{FreshVarGen, Graph, Label, Match, Triple};

fn label() -> impl Strategy<Value = Label> + Clone {
    prop_oneof![
        3 => prop::sample::select(vec!["a", "b", "c"]).prop_map(Label::str),
        1 => (1i64..3).prop_map(Label::int),
        2 => prop::sample::select(vec!["u", "v"]).prop_map(Label::var),
    ]
}

fn pattern_label() -> impl Strategy<Value = Label> + Clone {
    prop_oneof![
        3 => prop::sample::select(vec!["x", "y", "z"]).prop_map(Label::var),
        1 => prop::sample::select(vec!["a", "b"]).prop_map(Label::str),
    ]
}

fn graph(l: impl Strategy<Value = Label> + Clone, max: usize) -> impl Strategy<Value = Graph> {
    let triple = (l.clone(), l.clone(), l.clone()).prop_map(|(s, p, o)| Triple::new(s, p, o));
    (
        prop::collection::vec(triple, 0..=max),
        prop::collection::vec(l, 0..=1),
    )
        .prop_map(|(ts, ns)| {
            let mut g = Graph::from_triples(ts);
            for n in ns {
                g.insert_node(n);
            }
            g
        })
}

proptest! {
    #[test]
    fn enumeration_equals_brute_force(l in graph(pattern_label(), 3), g in graph(label(), 6)) {
        let got = enumerate_matches(&l, &g);
        prop_assert_eq!(got.assignments(), &brute_force_matches(&l, &g));
        prop_assert!(got.validate().is_ok());
    }

    #[test]
    fn every_enumerated_match_is_a_homomorphism(l in graph(pattern_label(), 3), g in graph(label(), 6)) {
        let ms = enumerate_matches(&l, &g);
        for a in ms.assignments() {
            let m = Match::new(Arc::new(l.clone()), Arc::new(g.clone()), a.clone());
            prop_assert!(m.is_ok());
        }
    }

    #[test]
    fn join_is_commutative(
        l1 in graph(pattern_label(), 2),
        l2 in graph(pattern_label(), 2),
        g in graph(label(), 6),
    ) {
        let a = enumerate_matches(&l1, &g);
        let b = enumerate_matches(&l2, &g);
        prop_assert_eq!(op_join(&a, &b), op_join(&b, &a));
    }

    #[test]
    fn join_with_inclusion_of_nothing_is_identity(l in graph(pattern_label(), 3), g in graph(label(), 6)) {
        let a = enumerate_matches(&l, &g);
        let unit = enumerate_matches(&Graph::empty(), &g);
        prop_assert_eq!(unit.len(), 1);
        prop_assert_eq!(op_join(&a, &unit), a);
    }

    #[test]
    fn union_is_idempotent(l in graph(pattern_label(), 3), g in graph(label(), 6)) {
        let a = enumerate_matches(&l, &g);
        prop_assert_eq!(op_union(&a, &a).unwrap(), a);
    }

    #[test]
    fn built_matches_are_homomorphisms(
        l in graph(pattern_label(), 2),
        r in graph(pattern_label(), 2),
        g in graph(label(), 6),
    ) {
        let ms = enumerate_matches(&l, &g);
        let mut gen = FreshVarGen::new();
        gen.reserve_graph(&g);
        gen.reserve_graph(&l);
        gen.reserve_graph(&r);
        for m in ms.iter() {
            let (built, h) = build_match(&m, &r, &mut gen);
            prop_assert!(h.is_subgraph_of(built.target()));
            prop_assert!(g.is_subgraph_of(built.target()));
            for v in l.vars().intersection(&r.vars()) {
                prop_assert_eq!(built.assignment().get(v), m.assignment().get(v));
            }
        }
    }
}

#[test]
fn constants_must_be_present() {
    let l = Graph::from_triples([Triple::new(Label::str("a"), Label::str("p"), Label::var("x"))]);
    let g = Graph::from_triples([Triple::new(Label::str("b"), Label::str("p"), Label::str("c"))]);
    assert!(enumerate_matches(&l, &g).is_empty());
    assert!(brute_force_matches(&l, &g).is_empty());
}
