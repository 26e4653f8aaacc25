//! Patterns, their scope graphs, static validation and the set-based
//! (denotational) evaluator used as the reference for the rewriting engine.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{op_bind, op_build, op_filter, op_join, op_match, op_union, EvalOptions};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::graph::{Graph, Label, Variable};
use crate::matching::{FreshVarGen, MatchSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Empty,
    Basic(Graph),
    Join(Box<Pattern>, Box<Pattern>),
    Bind(Box<Pattern>, Expr, Variable),
    Filter(Box<Pattern>, Expr),
    Build(Box<Pattern>, Graph),
    Union(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn basic(l: Graph) -> Pattern {
        Pattern::Basic(l)
    }

    pub fn join(self, other: Pattern) -> Pattern {
        Pattern::Join(Box::new(self), Box::new(other))
    }

    pub fn union(self, other: Pattern) -> Pattern {
        Pattern::Union(Box::new(self), Box::new(other))
    }

    pub fn bind(self, e: Expr, x: Variable) -> Pattern {
        Pattern::Bind(Box::new(self), e, x)
    }

    pub fn filter(self, e: Expr) -> Pattern {
        Pattern::Filter(Box::new(self), e)
    }

    pub fn build(self, r: Graph) -> Pattern {
        Pattern::Build(Box::new(self), r)
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Pattern::Empty => "EMPTY",
            Pattern::Basic(_) => "BASIC",
            Pattern::Join(..) => "JOIN",
            Pattern::Bind(..) => "BIND",
            Pattern::Filter(..) => "FILTER",
            Pattern::Build(..) => "BUILD",
            Pattern::Union(..) => "UNION",
        }
    }

    /// `sc(P)`.
    pub fn scope_graph(&self) -> Graph {
        match self {
            Pattern::Empty => Graph::empty(),
            Pattern::Basic(l) => l.clone(),
            Pattern::Join(p1, p2) => p1.scope_graph().union(&p2.scope_graph()),
            Pattern::Bind(p1, _, x) => {
                let mut g = p1.scope_graph();
                g.insert_node(Label::Var(x.clone()));
                g
            }
            Pattern::Filter(p1, _) => p1.scope_graph(),
            Pattern::Build(_, r) => r.clone(),
            Pattern::Union(p1, _) => p1.scope_graph(),
        }
    }

    /// `V(P)`, the in-scope variables.
    pub fn vars(&self) -> BTreeSet<Variable> {
        self.scope_graph().vars()
    }

    /// Every variable written anywhere in the pattern.
    pub fn mentioned_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_mentioned(&mut out);
        out
    }

    fn collect_mentioned(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Pattern::Empty => {}
            Pattern::Basic(g) => out.extend(g.vars()),
            Pattern::Join(a, b) | Pattern::Union(a, b) => {
                a.collect_mentioned(out);
                b.collect_mentioned(out);
            }
            Pattern::Bind(p, e, x) => {
                p.collect_mentioned(out);
                out.extend(e.all_vars());
                out.insert(x.clone());
            }
            Pattern::Filter(p, e) => {
                p.collect_mentioned(out);
                out.extend(e.all_vars());
            }
            Pattern::Build(p, r) => {
                p.collect_mentioned(out);
                out.extend(r.vars());
            }
        }
    }

    /// Number of pattern constructors.
    pub fn size(&self) -> usize {
        match self {
            Pattern::Empty | Pattern::Basic(_) => 1,
            Pattern::Join(a, b) | Pattern::Union(a, b) => 1 + a.size() + b.size(),
            Pattern::Bind(p, ..) | Pattern::Filter(p, _) | Pattern::Build(p, _) => 1 + p.size(),
        }
    }

    /// Static side conditions: expression scoping, disjoint grouping
    /// variables and equal scope graphs under UNION.
    pub fn validate(&self) -> Vec<ValidationError> {
        let mut errs = Vec::new();
        self.validate_into(&mut errs);
        errs
    }

    fn validate_into(&self, errs: &mut Vec<ValidationError>) {
        match self {
            Pattern::Empty | Pattern::Basic(_) => {}
            Pattern::Join(a, b) => {
                a.validate_into(errs);
                b.validate_into(errs);
            }
            Pattern::Union(a, b) => {
                a.validate_into(errs);
                b.validate_into(errs);
                if a.scope_graph() != b.scope_graph() {
                    errs.push(ValidationError::new(
                        self,
                        "UNION operands must have the same scope graph",
                    ));
                }
            }
            Pattern::Bind(p, e, _) | Pattern::Filter(p, e) => {
                p.validate_into(errs);
                check_expr(self, e, &p.vars(), errs);
            }
            Pattern::Build(p, _) => p.validate_into(errs),
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let errs = self.validate();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }
}

fn check_expr(
    at: &Pattern,
    e: &Expr,
    scope: &BTreeSet<Variable>,
    errs: &mut Vec<ValidationError>,
) {
    for x in e.all_vars() {
        if !scope.contains(&x) {
            errs.push(ValidationError::new(
                at,
                format!("variable {x} in `{e}` is not in scope"),
            ));
        }
    }
    e.walk(&mut |sub| {
        if let Expr::AggBy(_, inner, gp) = sub {
            let inner_vars = inner.vars();
            for g in gp.exprs() {
                for x in g.all_vars().intersection(&inner_vars) {
                    errs.push(ValidationError::new(
                        at,
                        format!("grouping variable {x} also occurs in the aggregated expression of `{sub}`"),
                    ));
                }
            }
        }
    });
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::pattern(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    /// Keyword of the offending construct.
    pub construct: &'static str,
    pub message: String,
}

impl ValidationError {
    fn new(at: &Pattern, message: impl Into<String>) -> Self {
        ValidationError {
            construct: at.keyword(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.construct, self.message)
    }
}

/// A fresh-variable generator that avoids every variable of `g` and `p`.
pub fn fresh_gen_for(g: &Graph, p: &Pattern) -> FreshVarGen {
    let mut gen = FreshVarGen::new();
    gen.reserve_graph(g);
    gen.reserve(p.mentioned_vars());
    gen
}

/// `⟦P⟧_G` together with the extended graph `G^(P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub matches: MatchSet,
}

impl EvalResult {
    pub fn extended_graph(&self) -> &Arc<Graph> {
        self.matches.target()
    }
}

/// Set-based evaluation. The right operand of JOIN and UNION is evaluated
/// over the graph extended by the left operand.
pub fn eval_pattern(
    p: &Pattern,
    g: &Graph,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<EvalResult> {
    p.ensure_valid()?;
    let matches = eval_in(p, Arc::new(g.clone()), gen, opts)?;
    Ok(EvalResult { matches })
}

fn eval_in(
    p: &Pattern,
    g: Arc<Graph>,
    gen: &mut FreshVarGen,
    opts: EvalOptions,
) -> Result<MatchSet> {
    Ok(match p {
        Pattern::Empty => MatchSet::empty_on(g),
        Pattern::Basic(l) => op_match(l, &g),
        Pattern::Join(p1, p2) => {
            let m1 = eval_in(p1, g, gen, opts)?;
            let m2 = eval_in(p2, m1.target().clone(), gen, opts)?;
            op_join(&m1, &m2)
        }
        Pattern::Bind(p1, e, x) => op_bind(&eval_in(p1, g, gen, opts)?, e, x, opts)?,
        Pattern::Filter(p1, e) => op_filter(&eval_in(p1, g, gen, opts)?, e, opts)?,
        Pattern::Build(p1, r) => op_build(&eval_in(p1, g, gen, opts)?, r, gen),
        Pattern::Union(p1, p2) => {
            let m1 = eval_in(p1, g, gen, opts)?;
            let m2 = eval_in(p2, m1.target().clone(), gen, opts)?;
            op_union(&m1, &m2)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinaryOp;
    use crate::syntax::parser::{parse_graph, parse_pattern};

    fn g(text: &str) -> Graph {
        parse_graph(text).unwrap()
    }

    fn gex() -> Graph {
        g(include_str!("../fixtures/gex.triples"))
    }

    fn eval(p: &Pattern, graph: &Graph) -> EvalResult {
        let mut gen = fresh_gen_for(graph, p);
        eval_pattern(p, graph, &mut gen, EvalOptions::default()).unwrap()
    }

    #[test]
    fn scope_graphs() {
        assert!(Pattern::Empty.scope_graph().is_empty());
        let l = g("?p teaches ?t . ?s studies ?t .");
        let r = g("?p teaches ?z . ?s studies ?z .");
        assert_eq!(Pattern::basic(l.clone()).build(r.clone()).scope_graph(), r);
        let bound = Pattern::basic(l.clone()).bind(Expr::int(1), Variable::new("n"));
        let mut expected = l;
        expected.insert_node(Label::var("n"));
        assert_eq!(bound.scope_graph(), expected);
    }

    #[test]
    fn validation() {
        let l = g("?p teaches ?t . ?s studies ?t .");
        let bad = Pattern::basic(l.clone()).filter(Expr::binary(
            Expr::var("q"),
            BinaryOp::Gt,
            Expr::int(1),
        ));
        assert_eq!(bad.validate().len(), 1);
        let conselect = parse_pattern(
            "BASIC { ?p is Professor . ?p teaches ?c . ?s is Student . ?s studies ?c . } \
             BIND COUNT(?s BY ?p) AS ?nbstudents",
        )
        .unwrap();
        assert!(conselect.validate().is_empty());
        let u = Pattern::basic(l).union(Pattern::basic(g("?a b ?c .")));
        assert_eq!(u.validate().len(), 1);
        let overlap = parse_pattern("BASIC { ?s p ?o . } BIND COUNT(?s BY ?s) AS ?n").unwrap();
        assert_eq!(overlap.validate().len(), 1);
    }

    #[test]
    fn running_example_value() {
        let p = parse_pattern(
            "BASIC { ?p teaches ?t . ?s studies ?t . } BUILD { ?p teaches ?z . ?s studies ?z . }",
        )
        .unwrap();
        let res = eval(&p, &gex());
        assert_eq!(res.matches.len(), 3);
        assert_eq!(**res.matches.source(), p.scope_graph());
        let g2 = res.extended_graph();
        assert!(gex().is_subgraph_of(g2));
        assert_eq!(g2.triples().len() - gex().triples().len(), 6);
    }

    #[test]
    fn empty_and_basic() {
        let res = eval(&Pattern::Empty, &gex());
        assert!(res.matches.is_empty());
        assert!(res.matches.source().is_empty());
        assert_eq!(**res.extended_graph(), gex());
        let basic = Pattern::basic(g("?a is ?b ."));
        assert_eq!(**eval(&basic, &gex()).extended_graph(), gex());
    }

    #[test]
    fn union_uses_left_extended_graph() {
        let p = parse_pattern(
            "(BASIC { ?a teaches ?b . } BUILD { ?a new ?b . }) UNION \
             (BASIC { ?a new ?b . } BUILD { ?a new ?b . })",
        )
        .unwrap();
        let res = eval(&p, &gex());
        // the right operand sees the triples built by the left one
        assert_eq!(res.matches.len(), 2);
    }
}
