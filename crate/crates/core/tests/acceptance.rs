//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use gql_core::algebra::op_match;
use gql_core::matching::enumerate_matches;
use gql_core::narrowing::{derive, rules, step_bound, step_decreases, Derivation, Term, Trace};
use gql_core::pattern::fresh_gen_for;
use gql_core::props::{check_aggregates, gen_case, run_props, Gen};
use gql_core::renaming::{graphs_equal_up_to_renaming, match_sets_equal_up_to_renaming};
use gql_core::syntax::parser::{parse_graph, parse_query};
use gql_core::syntax::print;
use gql_core::{
    eval_pattern, evaluate, Assignment, Engine, EvalOptions, Graph, Label, MatchSet, Pattern,
    QueryResult, SolutionTable, Triple, Variable,
};

const SEED: u64 = 1;
const PROPERTY_CASES: usize = 500;
const MATCH_PAIRS: usize = 1000;
const ROUND_TRIPS: u64 = 200;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn assignment(pairs: &[(&str, Label)]) -> Assignment {
    let mut a = Assignment::new();
    for (v, l) in pairs {
        a.insert(Variable::new(v), l.clone());
    }
    a
}

fn s(x: &str) -> Label {
    Label::str(x)
}

fn opts() -> EvalOptions {
    EvalOptions::default()
}

fn both_engines(p: &Pattern, g: &Graph) -> Result<[MatchSet; 2], String> {
    let oracle = eval_pattern(p, g, &mut fresh_gen_for(g, p), opts()).map_err(|e| e.to_string())?;
    let narrowing = derive(g, p, &mut fresh_gen_for(g, p), opts()).map_err(|e| e.to_string())?;
    Ok([oracle.matches, narrowing.matches])
}

fn query_both(name: &str) -> Result<[QueryResult; 2], String> {
    let q = query_fixture(name);
    let g = gex();
    let run = |engine| {
        evaluate(&q, &g, engine, opts())
            .map(|e| e.result)
            .map_err(|e| format!("{name}: {e}"))
    };
    Ok([run(Engine::Oracle)?, run(Engine::Narrowing)?])
}

fn criterion_1() -> Check {
    let gex = gex();

    // (a) the three matches of L_ex
    let ms = op_match(&g(L_EX), &gex);
    let expected: BTreeSet<Assignment> = [
        ("Alice", "Mathematics", "Charlie"),
        ("Alice", "Mathematics", "David"),
        ("Bob", "Informatics", "Eric"),
    ]
    .iter()
    .map(|(p, t, st)| assignment(&[("p", s(p)), ("t", s(t)), ("s", s(st))]))
    .collect();
    ensure(ms.assignments() == &expected, || format!("(a) Tab = {:?}", ms.tab()))?;

    // (b) P_ex: fresh ?z per match and six added triples
    let mut g_prime = gex.clone();
    let mut rows = Vec::new();
    for (i, (p, st)) in [("Alice", "Charlie"), ("Alice", "David"), ("Bob", "Eric")]
        .iter()
        .enumerate()
    {
        let z = Label::var(&format!("z{}", i + 1));
        g_prime.insert_triple(Triple::new(s(p), s("teaches"), z.clone()));
        g_prime.insert_triple(Triple::new(s(st), s("studies"), z.clone()));
        rows.push(assignment(&[("p", s(p)), ("z", z), ("s", s(st))]));
    }
    let expected = MatchSet::from_parts(Arc::new(g(R_EX)), Arc::new(g_prime.clone()), rows);
    for (engine, got) in ["oracle", "narrowing"].iter().zip(both_engines(&p_ex(), &gex)?) {
        ensure(match_sets_equal_up_to_renaming(&got, &expected), || {
            format!("(b) {engine}: {:?}", got.tab())
        })?;
        ensure(got.target().triples().len() == gex.triples().len() + 6, || {
            format!("(b) {engine}: G' has {} triples", got.target().triples().len())
        })?;
    }

    // (c) CONSTRUCT result is the image of R_ex
    let image = Graph::from_triples(
        g_prime
            .triples()
            .iter()
            .filter(|t| !gex.triples().contains(*t))
            .cloned(),
    );
    for r in query_both("construct.gql")? {
        let got = r.graph().ok_or("(c) not a graph")?;
        ensure(got.triples().len() == 6 && graphs_equal_up_to_renaming(got, &image), || {
            format!("(c) {got:?}")
        })?;
    }

    // (d) SELECT rows
    let table = SolutionTable::new(
        vec![Variable::new("p"), Variable::new("s")],
        vec![
            row(&["Alice", "Charlie"]),
            row(&["Alice", "David"]),
            row(&["Bob", "Eric"]),
        ],
    );
    for r in query_both("select.gql")? {
        ensure(r == QueryResult::Table(table.clone()), || format!("(d) {r}"))?;
    }

    // (e) CONSELECT graph and counts
    let supervised = g("David supervisedby Alice . Charlie supervisedby Alice . Eric supervisedby Bob .");
    let columns = vec![Variable::new("p"), Variable::new("nbstudents")];
    let counts = BTreeSet::from([vec![s("Alice"), Label::int(2)], vec![s("Bob"), Label::int(1)]]);
    for r in query_both("conselect.gql")? {
        let QueryResult::Pair(graph, table) = &r else {
            return Err(format!("(e) not a pair: {r}"));
        };
        // one row per match: Alice supervises two students
        let distinct: BTreeSet<_> = table.rows.iter().cloned().collect();
        ensure(
            *graph == supervised && table.columns == columns && distinct == counts && table.rows.len() == 3,
            || format!("(e) {r}"),
        )?;
    }
    Ok("examples (a)-(e) exact on both engines".into())
}

fn rule_names(t: &Trace) -> Vec<String> {
    t.rule_ids().iter().map(ToString::to_string).collect()
}

fn criterion_2() -> Check {
    let d = derive(&gex(), &p_ex(), &mut fresh_gen_for(&gex(), &p_ex()), opts())
        .map_err(|e| e.to_string())?;
    ensure(rule_names(&d.trace) == ["r9", "r1", "r10"], || {
        format!("P_ex rules {:?}", rule_names(&d.trace))
    })?;

    let ga = ga();
    let pi = pi_a();
    let d: Derivation =
        derive(&ga, &pi, &mut fresh_gen_for(&ga, &pi), opts()).map_err(|e| e.to_string())?;
    let expected = ["r2", "r9", "r1", "r10", "r3", "r9", "r1", "r10", "r4"];
    ensure(rule_names(&d.trace) == expected, || {
        format!("pi_A rules {:?}", rule_names(&d.trace))
    })?;

    let p5: BTreeSet<Assignment> = [("David", "Lab1"), ("Eric", "Lab2")]
        .iter()
        .map(|(x, l)| assignment(&[("x", s(x)), ("l", s(l))]))
        .collect();
    ensure(d.matches.assignments() == &p5, || format!("Tab(p5) = {:?}", d.matches.tab()))?;

    let g_b = ga.union(&g("David member Lab1 . Eric member Lab2 ."));
    let g_c = g_b.union(&g("David is Intern . Eric is Intern ."));
    let after = |n: usize| match_sets_in(&d.trace.steps()[n - 1].term);
    let p2 = after(4);
    ensure(p2.len() == 1 && **p2[0].target() == g_b, || "G_B after step (4)".into())?;
    let p4 = after(8);
    ensure(
        p4.len() == 2 && **p4[0].target() == g_b && **p4[1].target() == g_c,
        || "G_C after step (8)".into(),
    )?;
    ensure(**d.matches.target() == g_c, || "final target is not G_C".into())?;
    Ok(format!(
        "r9 r1 r10; 9 steps {}; G_B {} triples, G_C {} triples as listed",
        expected.join(" "),
        g_b.triples().len(),
        g_c.triples().len()
    ))
}

fn criterion_3() -> Check {
    let report = run_props(SEED, PROPERTY_CASES);
    ensure(report.ok(), || report.to_string())?;
    Ok(format!(
        "{}/{} cases agree up to renaming",
        report.passed, report.cases
    ))
}

/// Derivations of criteria 1-3 that ran to completion, with their patterns.
fn all_derivations() -> Vec<(Pattern, Trace)> {
    let mut out = Vec::new();
    let mut add = |g: &Graph, p: Pattern, opts: EvalOptions| {
        if let Ok(d) = derive(g, &p, &mut fresh_gen_for(g, &p), opts) {
            out.push((p, d.trace));
        }
    };
    add(&gex(), p_ex(), opts());
    add(&ga(), pi_a(), opts());
    for name in ["construct.gql", "select.gql", "conselect.gql", "interns.gql", "empty.gql"] {
        let q = query_fixture(name);
        if let Ok(p) = q.wrapped_pattern() {
            add(&gex(), p.clone(), opts());
            add(&ga(), p, opts());
        }
    }
    for i in 0..PROPERTY_CASES as u64 {
        let case = gen_case(SEED, i);
        add(&case.graph, case.pattern.clone(), case.opts);
        if let Ok(p) = case.query.wrapped_pattern() {
            add(&case.graph, p, case.opts);
        }
    }
    out
}

/// Counts redexes by trying every rule at every position.
fn redex_count(t: &Term) -> usize {
    t.positions()
        .iter()
        .map(|pos| {
            let sub = t.at(pos).expect("position of the term");
            rules().iter().filter(|r| r.matches(sub).is_some()).count()
        })
        .sum()
}

fn criterion_4(derivations: &[(Pattern, Trace)]) -> Check {
    let mut terms = 0;
    for (p, trace) in derivations {
        let n = trace.len();
        for (k, t) in trace.terms().enumerate() {
            terms += 1;
            let c = redex_count(t);
            let expect = usize::from(k < n);
            ensure(c == expect, || format!("{c} redexes at step {k} of {p}"))?;
        }
    }
    Ok(format!(
        "{} derivations, {terms} terms scanned, 0 violations",
        derivations.len()
    ))
}

fn criterion_5(derivations: &[(Pattern, Trace)]) -> Check {
    let mut steps = 0;
    for (p, trace) in derivations {
        ensure(trace.len() <= step_bound(p), || {
            format!("{} steps > bound {} for {p}", trace.len(), step_bound(p))
        })?;
        let mut before = trace.initial();
        for st in trace.steps() {
            steps += 1;
            ensure(step_decreases(before, &st.term, &st.position), || {
                format!("measure does not decrease at {} {} in {p}", st.rule, st.position)
            })?;
            before = &st.term;
        }
    }
    Ok(format!("{steps} steps within bounds, measure strictly decreasing"))
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Graph, Graph) {
    const POOL: &[&str] = &["a", "b", "c", "p", "q", "?u", "?v", "1"];
    let mut pool: Vec<Label> = POOL
        .iter()
        .map(|x| match x.strip_prefix('?') {
            Some(v) => Label::var(v),
            None => x.parse().map(Label::int).unwrap_or_else(|_| Label::str(x)),
        })
        .collect();
    // at most six labels in G
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.gen_range(0..=i));
    }
    pool.truncate(rng.gen_range(2..=6));
    let pick = |rng: &mut ChaCha8Rng, xs: &[Label]| xs[rng.gen_range(0..xs.len())].clone();
    let mut g = Graph::empty();
    for _ in 0..rng.gen_range(0..=6) {
        let t = Triple::new(pick(rng, &pool), pick(rng, &pool), pick(rng, &pool));
        g.insert_triple(t);
    }
    if rng.gen_bool(0.3) {
        g.insert_node(pick(rng, &pool));
    }

    let extra = pick(rng, &pool);
    let n_vars = rng.gen_range(1..=if extra.is_var() { 2 } else { 3 });
    let mut l_pool: Vec<Label> = ["x", "y", "z"][..n_vars].iter().map(|v| Label::var(v)).collect();
    l_pool.push(extra);
    let mut l = Graph::empty();
    for _ in 0..rng.gen_range(0..=3) {
        let t = Triple::new(pick(rng, &l_pool), pick(rng, &l_pool), pick(rng, &l_pool));
        l.insert_triple(t);
    }
    if rng.gen_bool(0.3) {
        l.insert_node(pick(rng, &l_pool));
    }
    (l, g)
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut nonempty = 0;
    for i in 0..MATCH_PAIRS {
        let (l, g) = random_pair(&mut rng);
        assert!(l.vars().len() <= 3 && g.labels().len() <= 6);
        let got = enumerate_matches(&l, &g);
        let want = brute_force_matches(&l, &g);
        ensure(got.assignments() == &want, || {
            format!("pair {i}: L = {l:?}, G = {g:?}: {} vs {} matches", got.len(), want.len())
        })?;
        nonempty += usize::from(!want.is_empty());
    }
    Ok(format!("{MATCH_PAIRS} pairs equal to brute force ({nonempty} with matches)"))
}

fn criterion_7() -> Check {
    let gex = gex();
    let fixtures = [
        ("COUNT(?t)", "COUNT(DISTINCT ?t)", vec![(None, 3, 2)]),
        (
            "COUNT(?t BY ?p)",
            "COUNT(DISTINCT ?t BY ?p)",
            vec![(Some("Alice"), 2, 1), (Some("Bob"), 1, 1)],
        ),
        (
            "COUNT(?p BY ?t)",
            "COUNT(DISTINCT ?p BY ?t)",
            vec![(Some("Mathematics"), 2, 1), (Some("Informatics"), 1, 1)],
        ),
    ];
    for (plain, distinct, expected) in &fixtures {
        for engine in [Engine::Oracle, Engine::Narrowing] {
            let count = |agg: &str| -> Result<Vec<Vec<Label>>, String> {
                let group = if agg.contains("BY ?t") { "?t" } else { "?p" };
                let src = format!(
                    "SELECT {group} ?n ?s WHERE BASIC {{ {L_EX} }} BIND {agg} AS ?n"
                );
                let q = parse_query(&src).map_err(|e| e.to_string())?;
                let r = evaluate(&q, &gex, engine, opts()).map_err(|e| e.to_string())?;
                Ok(r.result.table().ok_or("no table")?.rows.clone())
            };
            let a = count(plain)?;
            let b = count(distinct)?;
            for (key, n_plain, n_distinct) in expected {
                let pick = |rows: &[Vec<Label>]| -> BTreeSet<Label> {
                    rows.iter()
                        .filter(|r| key.is_none_or(|k| r[0] == s(k)))
                        .map(|r| r[1].clone())
                        .collect()
                };
                ensure(
                    pick(&a) == BTreeSet::from([Label::int(*n_plain)])
                        && pick(&b) == BTreeSet::from([Label::int(*n_distinct)]),
                    || format!("{plain} / {distinct} for {key:?}: {a:?} / {b:?}"),
                )?;
            }
        }
    }

    let mut checks = 0;
    for i in 0..PROPERTY_CASES as u64 {
        let case = gen_case(SEED, i);
        checks += check_aggregates(&case.pattern, &case.graph, case.opts)
            .map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok(format!(
        "COUNT vs COUNT DISTINCT fixtures exact; {checks} constancy checks over {PROPERTY_CASES} cases"
    ))
}

fn criterion_8() -> Check {
    for i in 0..ROUND_TRIPS {
        let mut gen = Gen::wide(SEED * 1000 + i);
        let g = gen.any_graph();
        let text = print::print_graph(&g);
        let back = parse_graph(&text).map_err(|e| format!("graph {i}: {e}\n{text}"))?;
        ensure(back == g, || format!("graph {i}: parse(print(g)) != g\n{text}"))?;
        ensure(print::print_graph(&back) == text, || format!("graph {i}: reprint differs"))?;

        let q = gen.any_query();
        let text = print::query(&q);
        let back = parse_query(&text).map_err(|e| format!("query {i}: {e}\n{text}"))?;
        ensure(back == q, || format!("query {i}: parse(print(q)) != q\n{text}"))?;
        ensure(print::query(&back) == text, || format!("query {i}: reprint differs"))?;
    }
    Ok(format!("{ROUND_TRIPS} graphs and {ROUND_TRIPS} queries"))
}

fn report(n: u32, limit: Option<Duration>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let late = limit.is_some_and(|l| elapsed > l);
    let (status, detail) = match (&result, late) {
        (Ok(d), false) => ("PASS", d.clone()),
        (Ok(d), true) => ("FAIL", format!("{d}; over the {:?} limit", limit.unwrap())),
        (Err(e), _) => ("FAIL", e.clone()),
    };
    println!("criterion {n}: {status} ({elapsed:.2?}) {detail}");
    status == "PASS"
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, Some(secs(1)), criterion_1);
    ok &= report(2, Some(secs(1)), criterion_2);
    ok &= report(3, Some(secs(30)), criterion_3);
    let derivations = all_derivations();
    ok &= report(4, None, || criterion_4(&derivations));
    ok &= report(5, None, || criterion_5(&derivations));
    ok &= report(6, Some(secs(10)), criterion_6);
    ok &= report(7, None, criterion_7);
    ok &= report(8, None, criterion_8);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
