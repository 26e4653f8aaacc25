//! The rewriting calculus: redex search, the narrowing step with built-in
//! evaluation of algebra operations, derivations and their traces.

mod measure;
pub mod rules;
pub mod term;
mod trace;

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{op_bind, op_build, op_filter, op_join, op_union, EvalOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{enumerate_shared, FreshVarGen, MatchSet};
use crate::pattern::Pattern;
use crate::query::{graph_of_vars, print_c, print_cs, print_s, Query, QueryResult};

pub use measure::{step_decreases, Measure};
pub use rules::{rule, rules, Rule, RuleId};
pub use term::{pattern_term, query_term, term_pattern, Literal, Position, Sort, Sym, Term, Verbosity};
pub use trace::{Step, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("more than one redex in {term}: {redexes}")]
    NonDeterminismDetected { term: String, redexes: String },
    #[error("normal form {0} is not a terminal configuration")]
    StuckTerm(String),
    #[error("derivation exceeded its bound of {0} steps")]
    BoundExceeded(usize),
    #[error("termination measure did not decrease at step {step} ({rule} @ {position})")]
    MeasureViolation {
        step: usize,
        rule: RuleId,
        position: String,
    },
    #[error("ill-sorted built-in call {0}")]
    IllSorted(String),
}

/// `Solve(⟨P | i_G⟩)`.
pub fn initial_term(g: &Graph, p: &Pattern) -> Result<Term> {
    p.ensure_valid()?;
    Ok(Term::app(
        Sym::Solve,
        vec![Term::app(
            Sym::Config,
            vec![pattern_term(p), Term::matches(MatchSet::inclusion(Arc::new(g.clone())))],
        )],
    ))
}

/// `Solve_Q(Q, G)`.
pub fn initial_query_term(g: &Graph, q: &Query) -> Result<Term> {
    q.validate()?;
    Ok(Term::app(Sym::SolveQ, vec![query_term(q), Term::graph(g.clone())]))
}

#[derive(Clone, Debug)]
pub struct Redex {
    pub position: Position,
    pub rule: RuleId,
}

/// Scans every position against every rule; at most one redex may exist.
pub fn find_redex(t: &Term) -> Result<Option<Redex>, EngineError> {
    let mut found: Vec<Redex> = Vec::new();
    for pos in t.positions() {
        let sub = t.at(&pos).expect("positions are valid");
        let Some(head) = sub.head() else { continue };
        for r in rules().iter().filter(|r| r.head() == head) {
            if r.matches(sub).is_some() {
                found.push(Redex {
                    position: pos.clone(),
                    rule: r.id,
                });
            }
        }
    }
    if found.len() > 1 {
        let redexes = found
            .iter()
            .map(|r| format!("{} @ {}", r.rule, r.position))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(EngineError::NonDeterminismDetected {
            term: t.to_string(),
            redexes,
        });
    }
    Ok(found.pop())
}

/// `t[σ(rhs)↓gq]_u` for the given redex.
pub fn apply(
    t: &Term,
    redex: &Redex,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<Term> {
    let sub = t.at(&redex.position).expect("redex position is valid");
    let r = rule(redex.rule);
    let subst = r.matches(sub).expect("redex matches its rule");
    let rhs = rules::instantiate(&r.rhs, &subst);
    let rhs = normalize(rhs, gen, opts)?;
    let mut out = t.clone();
    out.replace(&redex.position, rhs);
    Ok(out)
}

/// One narrowing step, or `None` on a normal form.
pub fn step(
    t: &Term,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<Option<(Redex, Term)>> {
    match find_redex(t)? {
        None => Ok(None),
        Some(redex) => {
            let next = apply(t, &redex, gen, opts)?;
            Ok(Some((redex, next)))
        }
    }
}

/// `↓gq`: evaluates built-in calls innermost first, left to right.
pub fn normalize(t: Term, gen: &mut FreshVarGen, opts: EvalOptions) -> Result<Term> {
    match t {
        Term::Lit(_) => Ok(t),
        Term::App(sym, args) => {
            let args = args
                .into_iter()
                .map(|a| normalize(a, gen, opts))
                .collect::<Result<Vec<_>>>()?;
            if sym.is_builtin() {
                eval_builtin(sym, &args, gen, opts).map(Term::Lit)
            } else {
                Ok(Term::App(sym, args))
            }
        }
    }
}

fn eval_builtin(
    sym: Sym,
    args: &[Term],
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<Literal> {
    use Literal as L;
    let lits: Vec<&Literal> = args
        .iter()
        .map(|a| match a {
            Term::Lit(l) => Some(l),
            Term::App(..) => None,
        })
        .collect::<Option<_>>()
        .ok_or_else(|| ill_sorted(sym, args))?;
    let matches = |ms: MatchSet| L::Matches(Arc::new(ms));
    let result = |r: QueryResult| L::Result(Arc::new(r));
    Ok(match (sym, lits.as_slice()) {
        (Sym::OpMatch, [L::Graph(l), L::Graph(g)]) => matches(enumerate_shared(l.clone(), g.clone())),
        (Sym::OpJoin, [L::Matches(a), L::Matches(b)]) => matches(op_join(a, b)),
        (Sym::OpBind, [L::Matches(a), L::Expr(e), L::Var(x)]) => matches(op_bind(a, e, x, opts)?),
        (Sym::OpFilter, [L::Matches(a), L::Expr(e)]) => matches(op_filter(a, e, opts)?),
        (Sym::OpBuild, [L::Matches(a), L::Graph(r)]) => matches(op_build(a, r, gen)),
        (Sym::OpUnion, [L::Matches(a), L::Matches(b)]) => matches(op_union(a, b)?),
        (Sym::Target, [L::Matches(a)]) => L::Graph(a.target().clone()),
        (Sym::EmptySet, [L::Graph(g)]) => matches(MatchSet::empty_on(g.clone())),
        (Sym::Inclusion, [L::Graph(g)]) => matches(MatchSet::inclusion(g.clone())),
        (Sym::GraphOfVars, [L::Vars(s)]) => L::Graph(Arc::new(graph_of_vars(s)?)),
        (Sym::GraphUnion, [L::Graph(a), L::Graph(b)]) => L::Graph(Arc::new(a.union(b))),
        (Sym::PrintC, [L::Graph(r), L::Matches(m)]) => result(QueryResult::Graph(print_c(r, m)?)),
        (Sym::PrintS, [L::Vars(s), L::Matches(m)]) => result(QueryResult::Table(print_s(s, m))),
        (Sym::PrintCS, [L::Vars(s), L::Graph(r), L::Matches(m)]) => result(print_cs(s, r, m)?),
        _ => return Err(ill_sorted(sym, args)),
    })
}

fn ill_sorted(sym: Sym, args: &[Term]) -> Error {
    EngineError::IllSorted(Term::App(sym, args.to_vec()).to_string()).into()
}

/// Σ over constructors: 3 for JOIN and UNION, 2 for BIND, FILTER and BUILD,
/// 1 for BASIC and EMPTY. This is the exact length of every derivation.
pub fn step_bound(p: &Pattern) -> usize {
    match p {
        Pattern::Empty | Pattern::Basic(_) => 1,
        Pattern::Join(a, b) | Pattern::Union(a, b) => 3 + step_bound(a) + step_bound(b),
        Pattern::Bind(a, ..) | Pattern::Filter(a, _) | Pattern::Build(a, _) => 2 + step_bound(a),
    }
}

/// Query derivations add the Solve_Q, BUILD and Display steps.
pub fn query_step_bound(q: &Query) -> usize {
    step_bound(q.pattern()) + 4
}

/// Rewrites to a normal form, checking determinism, the bound and the
/// termination measure at every step.
pub fn run(
    initial: Term,
    bound: usize,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<Trace> {
    let mut trace = Trace::new(initial);
    loop {
        let current = trace.last();
        let Some((redex, next)) = step(current, gen, opts)? else {
            return Ok(trace);
        };
        if trace.len() == bound {
            return Err(EngineError::BoundExceeded(bound).into());
        }
        if !step_decreases(current, &next, &redex.position) {
            return Err(EngineError::MeasureViolation {
                step: trace.len() + 1,
                rule: redex.rule,
                position: redex.position.to_string(),
            }
            .into());
        }
        trace.push(redex.rule, redex.position, next);
    }
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub matches: MatchSet,
    pub trace: Trace,
}

/// `Solve(⟨P | i_G⟩) ⇝* ⟨□ | m⟩`.
pub fn derive(
    g: &Graph,
    p: &Pattern,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<Derivation> {
    let t = initial_term(g, p)?;
    let trace = run(t, step_bound(p), gen, opts)?;
    match trace.last() {
        Term::App(Sym::Config, args)
            if args[0].head() == Some(Sym::Empty) =>
        {
            match &args[1] {
                Term::Lit(Literal::Matches(ms)) => Ok(Derivation {
                    matches: (**ms).clone(),
                    trace,
                }),
                other => Err(EngineError::StuckTerm(other.to_string()).into()),
            }
        }
        other => Err(EngineError::StuckTerm(other.to_string()).into()),
    }
}

/// Rules r14–r19 around a pattern derivation.
pub fn solve_query(
    q: &Query,
    g: &Graph,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<(QueryResult, Trace)> {
    let t = initial_query_term(g, q)?;
    let trace = run(t, query_step_bound(q), gen, opts)?;
    match trace.last() {
        Term::Lit(Literal::Result(r)) => {
            let r = (**r).clone();
            Ok((r, trace))
        }
        other => Err(EngineError::StuckTerm(other.to_string()).into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_graph, parse_pattern};

    fn gex() -> Graph {
        parse_graph(include_str!("../../fixtures/gex.triples")).unwrap()
    }

    fn rule_ids(t: &Trace) -> Vec<String> {
        t.steps().iter().map(|s| s.rule.to_string()).collect()
    }

    #[test]
    fn empty_pattern_is_one_step() {
        let mut gen = FreshVarGen::new();
        let d = derive(&gex(), &Pattern::Empty, &mut gen, EvalOptions::default()).unwrap();
        assert_eq!(rule_ids(&d.trace), ["r0"]);
        assert!(d.matches.is_empty());
        assert_eq!(**d.matches.target(), gex());
        assert_eq!(step_bound(&Pattern::Empty), 1);
    }

    #[test]
    fn redex_inside_a_continuation() {
        let basic = parse_pattern("BASIC { ?a is ?b . }").unwrap();
        let t = Term::app(
            Sym::SolveJL,
            vec![
                initial_term(&gex(), &basic).unwrap(),
                pattern_term(&Pattern::Empty),
            ],
        );
        let r = find_redex(&t).unwrap().unwrap();
        assert_eq!((r.position.to_string(), r.rule), ("1".to_string(), RuleId(1)));
    }

    #[test]
    fn terminal_configuration_is_normal() {
        let t = Term::app(
            Sym::Config,
            vec![
                pattern_term(&Pattern::Empty),
                Term::matches(MatchSet::inclusion(Arc::new(gex()))),
            ],
        );
        assert!(find_redex(&t).unwrap().is_none());
    }

    #[test]
    fn two_redexes_are_reported() {
        let solve = initial_term(&gex(), &Pattern::Empty).unwrap();
        let t = Term::app(Sym::SolveJR, vec![Term::matches(MatchSet::inclusion(Arc::new(gex()))), solve.clone()]);
        assert!(find_redex(&t).unwrap().is_some());
        // hand-built ill-formed term with two Solve redexes
        let bad = Term::app(Sym::SolveJL, vec![solve.clone(), Term::app(Sym::Empty, vec![])]);
        let twice = Term::app(Sym::SolveJR, vec![Term::matches(MatchSet::inclusion(Arc::new(gex()))), bad]);
        assert!(find_redex(&twice).unwrap().is_some());
        let two = Term::app(Sym::Config, vec![solve.clone(), solve]);
        assert!(matches!(
            find_redex(&two),
            Err(EngineError::NonDeterminismDetected { .. })
        ));
    }
}
