#![allow(dead_code)]

use std::collections::BTreeSet;

use gql_core::narrowing::{Literal, Term};
use gql_core::syntax::parser::{parse_graph, parse_pattern, parse_query};
use gql_core::{Assignment, Graph, Label, MatchSet, Pattern, Query, Variable};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn gex() -> Graph {
    parse_graph(&fixture("gex.triples")).unwrap()
}

pub fn ga() -> Graph {
    parse_graph(&fixture("ga.triples")).unwrap()
}

pub fn g(src: &str) -> Graph {
    parse_graph(src).unwrap()
}

pub fn pat(src: &str) -> Pattern {
    parse_pattern(src).unwrap()
}

pub fn query(src: &str) -> Query {
    parse_query(src).unwrap()
}

pub fn query_fixture(name: &str) -> Query {
    parse_query(&fixture(name)).unwrap()
}

pub const L_EX: &str = "?p teaches ?t . ?s studies ?t .";
pub const R_EX: &str = "?p teaches ?z . ?s studies ?z .";

pub fn p_ex() -> Pattern {
    pat(&format!("BASIC {{ {L_EX} }} BUILD {{ {R_EX} }}"))
}

pub fn pi_a() -> Pattern {
    pat("(BASIC { ?x supervisedby ?p . ?p member ?l . } BUILD { ?x member ?l . }) \
         JOIN (BASIC { ?x member ?t . ?x is Student . } BUILD { ?x is Intern . })")
}

pub fn row(cells: &[&str]) -> Vec<Label> {
    cells.iter().map(|c| Label::str(c)).collect()
}

/// Every function from the variables of `l` to the labels of `g`, kept when
/// it sends each node of `l` to a node of `g` and each triple to a triple.
pub fn brute_force_matches(l: &Graph, g: &Graph) -> BTreeSet<Assignment> {
    let vars: Vec<Variable> = l.vars().into_iter().collect();
    let labels: Vec<Label> = g.labels().into_iter().collect();
    let mut out = BTreeSet::new();
    if labels.is_empty() && !vars.is_empty() {
        return out;
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        let mut a = Assignment::new();
        for (v, &i) in vars.iter().zip(&idx) {
            a.insert(v.clone(), labels[i].clone());
        }
        let nodes_ok = l.nodes().iter().all(|n| g.nodes().contains(&a.apply(n)));
        let triples_ok = l.triples().iter().all(|t| g.triples().contains(&t.map(|x| a.apply(x))));
        if nodes_ok && triples_ok {
            out.insert(a);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < labels.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The match-set literals of a term, left to right.
pub fn match_sets_in(t: &Term) -> Vec<MatchSet> {
    let mut out = Vec::new();
    collect(t, &mut out);
    out
}

fn collect(t: &Term, out: &mut Vec<MatchSet>) {
    match t {
        Term::Lit(Literal::Matches(ms)) => out.push((**ms).clone()),
        Term::Lit(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| collect(a, out)),
    }
}
