mod common;

use proptest::prelude::*;

use common::*;
use gql_core::error::Error;
use gql_core::expr::EvalError;
use gql_core::narrowing::{derive, step_bound, EngineError};
use gql_core::pattern::fresh_gen_for;
use gql_core::props::{check_case, gen_case, run_props};
use gql_core::renaming::match_sets_equal_up_to_renaming;
use gql_core::{check, eval_pattern, evaluate, Engine, EvalOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_cases_agree(seed in any::<u64>(), i in 0u64..1000) {
        let case = gen_case(seed, i);
        prop_assert!(check_case(&case).is_ok(), "{:?}", check_case(&case));
    }

    #[test]
    fn derivations_take_exactly_the_bound(seed in any::<u64>()) {
        let case = gen_case(seed, 0);
        let (g, p) = (&case.graph, &case.pattern);
        if let Ok(d) = derive(g, p, &mut fresh_gen_for(g, p), case.opts) {
            prop_assert_eq!(d.trace.len(), step_bound(p));
        }
    }
}

#[test]
fn harness_is_deterministic() {
    assert_eq!(run_props(9, 40).to_string(), run_props(9, 40).to_string());
    assert!(run_props(9, 40).ok());
}

#[test]
fn strict_errors_agree() {
    let g = g("a n 0 . b n 2 .");
    let q = query("SELECT ?x ?y WHERE BASIC { ?s n ?x . } BIND 4 / ?x AS ?y");
    let report = check(&q, &g, EvalOptions::default());
    assert!(report.agrees());
    assert!(matches!(report.narrowing, Err(Error::Eval(EvalError::DivisionByZero))));

    let lenient = EvalOptions { lenient: true };
    let r = evaluate(&q, &g, Engine::Narrowing, lenient).unwrap();
    assert_eq!(r.result.table().unwrap().rows.len(), 1);
    assert!(check(&q, &g, lenient).agrees());
}

#[test]
fn filter_and_union_agree_on_the_toy_database() {
    let p = pat(
        "(BASIC { ?p teaches ?t . ?s studies ?t . } FILTER ?p = Alice) \
         UNION (BASIC { ?p teaches ?t . ?s studies ?t . } FILTER COUNT(?s BY ?t) < 2)",
    );
    let g = gex();
    let o = eval_pattern(&p, &g, &mut fresh_gen_for(&g, &p), EvalOptions::default()).unwrap();
    let n = derive(&g, &p, &mut fresh_gen_for(&g, &p), EvalOptions::default()).unwrap();
    assert!(match_sets_equal_up_to_renaming(&o.matches, &n.matches));
    assert_eq!(o.matches.len(), 3);
    let rules: Vec<String> = n.trace.rule_ids().iter().map(ToString::to_string).collect();
    assert_eq!(rules, ["r11", "r7", "r1", "r8", "r12", "r7", "r1", "r8", "r13"]);
}

#[test]
fn invalid_patterns_are_rejected_before_rewriting() {
    let p = pat("BASIC { ?x p ?y . } FILTER ?z = 1");
    let g = gex();
    let err = derive(&g, &p, &mut fresh_gen_for(&g, &p), EvalOptions::default()).unwrap_err();
    assert!(err.is_static(), "{err}");
    assert!(!matches!(err, Error::Engine(EngineError::StuckTerm(_))));
}
