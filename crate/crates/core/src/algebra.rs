//! The six operations of the graph query algebra over sets of matches.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::expr::{eval_family_partial, EvalError, Expr};
use crate::graph::{ConstValue, Graph, Label, Variable};
use crate::matching::{build_assignment, enumerate_matches, FreshVarGen, MatchError, MatchSet};

/// Per-evaluation switches shared by both engines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Drop a match whose expression fails to evaluate instead of aborting.
    pub lenient: bool,
}

/// `Match(L, G)`.
pub fn op_match(l: &Graph, g: &Graph) -> MatchSet {
    enumerate_matches(l, g)
}

/// `Join(a, b) : La ∪ Lb => Ga ∪ Gb`.
pub fn op_join(a: &MatchSet, b: &MatchSet) -> MatchSet {
    let source = Arc::new(a.source().union(b.source()));
    let target = Arc::new(a.target().union(b.target()));
    let mut members = BTreeSet::new();
    for x in a.assignments() {
        for y in b.assignments() {
            if x.compatible(y) {
                members.insert(x.merge(y));
            }
        }
    }
    MatchSet::from_parts(source, target, members)
}

/// `Bind(a, e, x)`.
///
/// For a fresh `x` every match is extended with `x ↦ ev(a, e)_m` and the
/// values become target nodes. For an `x` already in scope, the matches with
/// `m(x)` syntactically equal to the value are kept.
pub fn op_bind(
    a: &MatchSet,
    e: &Expr,
    x: &Variable,
    opts: EvalOptions,
) -> Result<MatchSet, EvalError> {
    let values = eval_family_partial(a, e)?;
    let in_scope = a.source().vars().contains(x);
    let mut source = (**a.source()).clone();
    source.insert_node(Label::Var(x.clone()));
    let mut target = (**a.target()).clone();
    let mut members = Vec::with_capacity(values.len());
    for (m, v) in values {
        let v = match v {
            Ok(v) => v,
            Err(_) if opts.lenient => continue,
            Err(err) => return Err(err),
        };
        if in_scope {
            if m.get(x) == Some(&v) {
                target.insert_node(v);
                members.push(m);
            }
        } else {
            let mut m = m;
            m.insert(x.clone(), v.clone());
            target.insert_node(v);
            members.push(m);
        }
    }
    Ok(MatchSet::from_parts(
        Arc::new(source),
        Arc::new(target),
        members,
    ))
}

/// `Filter(a, e)`: the matches whose value is `true`.
pub fn op_filter(a: &MatchSet, e: &Expr, opts: EvalOptions) -> Result<MatchSet, EvalError> {
    let values = eval_family_partial(a, e)?;
    let mut members = Vec::new();
    for (m, v) in values {
        match v {
            Ok(Label::Const(ConstValue::Bool(true))) => members.push(m),
            Ok(Label::Const(ConstValue::Bool(false))) => {}
            Ok(_) | Err(_) if opts.lenient => {}
            Ok(other) => {
                return Err(EvalError::TypeError(format!(
                    "FILTER expression evaluated to non-boolean {other}"
                )))
            }
            Err(err) => return Err(err),
        }
    }
    Ok(MatchSet::from_parts(
        a.source().clone(),
        a.target().clone(),
        members,
    ))
}

/// `Build(a, R) : R => G ∪ a(R)`, consuming fresh names in member order.
pub fn op_build(a: &MatchSet, r: &Graph, gen: &mut FreshVarGen) -> MatchSet {
    let mut target = (**a.target()).clone();
    let mut members = Vec::with_capacity(a.len());
    for m in a.assignments() {
        let built = build_assignment(m, r, gen);
        target.extend(&r.map_labels(|l| built.apply(l)));
        members.push(built);
    }
    MatchSet::from_parts(Arc::new(r.clone()), Arc::new(target), members)
}

/// `Union(a, b) : L => Ga ∪ Gb`; both sets must share their source.
pub fn op_union(a: &MatchSet, b: &MatchSet) -> Result<MatchSet, MatchError> {
    if a.source() != b.source() {
        return Err(MatchError::SourceMismatch(
            "UNION operands have different sources".into(),
        ));
    }
    let target = Arc::new(a.target().union(b.target()));
    Ok(MatchSet::from_parts(
        a.source().clone(),
        target,
        a.assignments().iter().chain(b.assignments()).cloned(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{AggFn, Aggregate, BinaryOp};
    use crate::matching::Assignment;
    use crate::syntax::parser::parse_graph;

    fn g(text: &str) -> Graph {
        parse_graph(text).unwrap()
    }

    fn gex() -> Graph {
        g(include_str!("../fixtures/gex.triples"))
    }

    fn ga() -> Graph {
        g(include_str!("../fixtures/ga.triples"))
    }

    fn m_ex() -> MatchSet {
        op_match(&g("?p teaches ?t . ?s studies ?t ."), &gex())
    }

    fn column(ms: &MatchSet, x: &str) -> Vec<Label> {
        let x = Variable::new(x);
        ms.assignments().iter().map(|a| a.get(&x).unwrap().clone()).collect()
    }

    fn strict() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn build_of_the_running_example() {
        let r = g("?p teaches ?z . ?s studies ?z .");
        let mut gen = FreshVarGen::new();
        let p = op_build(&m_ex(), &r, &mut gen);
        assert_eq!(p.len(), 3);
        assert_eq!(**p.source(), r);
        assert_eq!(p.target().triples().len(), 16);
        assert!(gex().is_subgraph_of(p.target()));
        let zs: BTreeSet<_> = column(&p, "z").into_iter().collect();
        assert_eq!(zs.len(), 3);
        p.validate().unwrap();

        let none = MatchSet::from_parts(m_ex().source().clone(), Arc::new(gex()), []);
        let built = op_build(&none, &r, &mut gen);
        assert!(built.is_empty());
        assert_eq!(**built.target(), gex());
    }

    #[test]
    fn join_of_the_intern_example() {
        let mut gen = FreshVarGen::new();
        let p1 = op_match(&g("?x supervisedby ?p . ?p member ?l ."), &ga());
        let p2 = op_build(&p1, &g("?x member ?l ."), &mut gen);
        assert_eq!(p2.target().triples().len(), 16);
        let p3 = op_match(&g("?x member ?t . ?x is Student ."), p2.target());
        let p4 = op_build(&p3, &g("?x is Intern ."), &mut gen);
        assert_eq!(p4.target().triples().len(), 18);
        let p5 = op_join(&p2, &p4);
        assert_eq!(
            p5.tab().rows,
            vec![
                vec![Label::str("Lab1"), Label::str("David")],
                vec![Label::str("Lab2"), Label::str("Eric")],
            ]
        );
        assert_eq!(gen.counter(), 0);
    }

    #[test]
    fn join_with_inclusion_and_empty() {
        let a = m_ex();
        let big = Arc::new(gex().union(&g("extra p q .")));
        let joined = op_join(&a, &MatchSet::inclusion(big.clone()));
        assert_eq!(joined.assignments(), a.assignments());
        assert_eq!(joined.target(), &big);
        assert!(op_join(&a, &MatchSet::empty_on(big)).is_empty());
    }

    #[test]
    fn bind_fresh_constant_and_in_scope_identity() {
        let a = m_ex();
        let seven = op_bind(&a, &Expr::int(7), &Variable::new("n"), strict()).unwrap();
        assert_eq!(seven.len(), 3);
        assert!(column(&seven, "n").iter().all(|v| *v == Label::int(7)));
        assert!(seven.target().nodes().contains(&Label::int(7)));
        assert!(seven.source().isolated_nodes().contains(&Label::var("n")));

        let same = op_bind(&a, &Expr::var("p"), &Variable::new("p"), strict()).unwrap();
        assert_eq!(same.assignments(), a.assignments());
        assert_eq!(same.target(), a.target());

        let restricted =
            op_bind(&a, &Expr::str("Bob"), &Variable::new("p"), strict()).unwrap();
        assert_eq!(restricted.len(), 1);
    }

    #[test]
    fn bind_projection_recovers_members() {
        let a = m_ex();
        let e = Expr::agg_by(Aggregate::new(AggFn::Count), Expr::var("s"), vec![Expr::var("p")]);
        let b = op_bind(&a, &e, &Variable::new("n"), strict()).unwrap();
        let vars = a.source().vars();
        let projected: BTreeSet<Assignment> =
            b.assignments().iter().map(|m| m.restrict(&vars)).collect();
        assert_eq!(&projected, a.assignments());
    }

    #[test]
    fn filter_cases() {
        let a = m_ex();
        let t = Expr::Const(ConstValue::Bool(true));
        let f = Expr::Const(ConstValue::Bool(false));
        assert_eq!(op_filter(&a, &t, strict()).unwrap(), a);
        let none = op_filter(&a, &f, strict()).unwrap();
        assert!(none.is_empty());
        assert_eq!(none.source(), a.source());
        assert_eq!(none.target(), a.target());
        let alice = Expr::binary(Expr::var("p"), BinaryOp::Eq, Expr::str("Alice"));
        assert_eq!(op_filter(&a, &alice, strict()).unwrap().len(), 2);
        assert!(matches!(
            op_filter(&a, &Expr::int(1), strict()),
            Err(EvalError::TypeError(_))
        ));
        let bad = Expr::binary(Expr::var("p"), BinaryOp::Add, Expr::int(1));
        assert!(op_filter(&a, &bad, strict()).is_err());
        let lenient = EvalOptions { lenient: true };
        assert!(op_filter(&a, &bad, lenient).unwrap().is_empty());
    }

    #[test]
    fn union_cases() {
        let a = m_ex();
        let bigger = Arc::new(gex().union(&g("x y z .")));
        let u = op_union(&a, &a.with_target(bigger.clone())).unwrap();
        assert_eq!(u.assignments(), a.assignments());
        assert_eq!(u.target(), &bigger);
        let empty = MatchSet::from_parts(a.source().clone(), a.target().clone(), []);
        assert_eq!(op_union(&a, &empty).unwrap(), a);

        let src = Arc::new(g("node ?x ."));
        let one = |v: &str| {
            MatchSet::from_parts(
                src.clone(),
                Arc::new(g("node a . node b .")),
                [[(Variable::new("x"), Label::str(v))].into_iter().collect()],
            )
        };
        assert_eq!(op_union(&one("a"), &one("b")).unwrap().len(), 2);
        assert!(op_union(&a, &one("a")).is_err());
    }
}
