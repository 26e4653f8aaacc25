//! The rewrite rules r0–r19 as data: left- and right-hand side templates.

use std::fmt;
use std::sync::OnceLock;

use super::term::{Sort, Sym, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u8);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub enum Tmpl {
    App(Sym, Vec<Tmpl>),
    Var(&'static str, Sort),
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: Tmpl,
    pub rhs: Tmpl,
}

/// Bindings of rule variables, in first-occurrence order.
pub type Subst<'t> = Vec<(&'static str, &'t Term)>;

impl Rule {
    pub fn head(&self) -> Sym {
        match self.lhs {
            Tmpl::App(s, _) => s,
            Tmpl::Var(..) => unreachable!("rule left-hand sides are applications"),
        }
    }

    /// `σ` with `σ(lhs) = t`, if any.
    pub fn matches<'t>(&self, t: &'t Term) -> Option<Subst<'t>> {
        let mut subst = Vec::new();
        match_tmpl(&self.lhs, t, &mut subst).then_some(subst)
    }
}

fn match_tmpl<'t>(tmpl: &Tmpl, t: &'t Term, subst: &mut Subst<'t>) -> bool {
    match tmpl {
        Tmpl::Var(name, sort) => {
            if t.sort() != *sort {
                return false;
            }
            match subst.iter().find(|(n, _)| n == name) {
                Some((_, bound)) => *bound == t,
                None => {
                    subst.push((name, t));
                    true
                }
            }
        }
        Tmpl::App(sym, targs) => match t {
            Term::App(s, args) if s == sym && args.len() == targs.len() => targs
                .iter()
                .zip(args)
                .all(|(ta, a)| match_tmpl(ta, a, subst)),
            _ => false,
        },
    }
}

/// `σ(rhs)`, built-in calls still unevaluated.
pub fn instantiate(tmpl: &Tmpl, subst: &Subst<'_>) -> Term {
    match tmpl {
        Tmpl::Var(name, _) => subst
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| (*t).clone())
            .expect("right-hand side variables occur on the left"),
        Tmpl::App(sym, args) => {
            Term::App(*sym, args.iter().map(|a| instantiate(a, subst)).collect())
        }
    }
}

fn app(sym: Sym, args: Vec<Tmpl>) -> Tmpl {
    Tmpl::App(sym, args)
}

fn pat(name: &'static str) -> Tmpl {
    Tmpl::Var(name, Sort::Pat)
}

fn som(name: &'static str) -> Tmpl {
    Tmpl::Var(name, Sort::Som)
}

fn gr(name: &'static str) -> Tmpl {
    Tmpl::Var(name, Sort::Gr)
}

fn exp() -> Tmpl {
    Tmpl::Var("e", Sort::Exp)
}

fn var() -> Tmpl {
    Tmpl::Var("x", Sort::Var)
}

fn vars() -> Tmpl {
    Tmpl::Var("S", Sort::Vars)
}

fn empty() -> Tmpl {
    app(Sym::Empty, vec![])
}

fn config(p: Tmpl, m: Tmpl) -> Tmpl {
    app(Sym::Config, vec![p, m])
}

fn solve(p: Tmpl, m: Tmpl) -> Tmpl {
    app(Sym::Solve, vec![config(p, m)])
}

fn done(m: Tmpl) -> Tmpl {
    config(empty(), m)
}

/// Solve of a unary pattern constructor, then the continuation that applies
/// the matching algebra operation.
fn unary_pair(
    id: u8,
    ctor: Sym,
    cont: Sym,
    op: Sym,
    extra: fn() -> Vec<Tmpl>,
) -> [Rule; 2] {
    let mut lhs_args = vec![pat("P")];
    lhs_args.extend(extra());
    let mut cont_args = vec![solve(pat("P"), som("m"))];
    cont_args.extend(extra());
    let mut cont_lhs = vec![done(som("m"))];
    cont_lhs.extend(extra());
    let mut op_args = vec![som("m")];
    op_args.extend(extra());
    [
        Rule {
            id: RuleId(id),
            lhs: solve(app(ctor, lhs_args), som("m")),
            rhs: app(cont, cont_args),
        },
        Rule {
            id: RuleId(id + 1),
            lhs: app(cont, cont_lhs),
            rhs: done(app(op, op_args)),
        },
    ]
}

/// Solve of a binary pattern constructor: left operand, then right operand
/// over the left result, then the algebra operation.
fn binary_triple(id: u8, ctor: Sym, left: Sym, right: Sym, op: Sym) -> [Rule; 3] {
    [
        Rule {
            id: RuleId(id),
            lhs: solve(app(ctor, vec![pat("P1"), pat("P2")]), som("m")),
            rhs: app(left, vec![solve(pat("P1"), som("m")), pat("P2")]),
        },
        Rule {
            id: RuleId(id + 1),
            lhs: app(left, vec![done(som("m")), pat("P")]),
            rhs: app(right, vec![som("m"), solve(pat("P"), som("m"))]),
        },
        Rule {
            id: RuleId(id + 2),
            lhs: app(right, vec![som("m"), done(som("m2"))]),
            rhs: done(app(op, vec![som("m"), som("m2")])),
        },
    ]
}

fn build_rules() -> Vec<Rule> {
    let mut rules = vec![
        Rule {
            id: RuleId(0),
            lhs: solve(empty(), som("m")),
            rhs: done(app(Sym::EmptySet, vec![app(Sym::Target, vec![som("m")])])),
        },
        Rule {
            id: RuleId(1),
            lhs: solve(app(Sym::Basic, vec![gr("L")]), som("m")),
            rhs: done(app(
                Sym::OpMatch,
                vec![gr("L"), app(Sym::Target, vec![som("m")])],
            )),
        },
    ];
    rules.extend(binary_triple(2, Sym::Join, Sym::SolveJL, Sym::SolveJR, Sym::OpJoin));
    rules.extend(unary_pair(5, Sym::Bind, Sym::SolveBI, Sym::OpBind, || {
        vec![exp(), var()]
    }));
    rules.extend(unary_pair(7, Sym::Filter, Sym::SolveFR, Sym::OpFilter, || {
        vec![exp()]
    }));
    rules.extend(unary_pair(9, Sym::Build, Sym::SolveBU, Sym::OpBuild, || {
        vec![gr("R")]
    }));
    rules.extend(binary_triple(11, Sym::Union, Sym::SolveUL, Sym::SolveUR, Sym::OpUnion));

    let incl = || app(Sym::Inclusion, vec![gr("G")]);
    let start = |r: Tmpl| app(Sym::Solve, vec![config(app(Sym::Build, vec![pat("P"), r]), incl())]);
    let graph_s = || app(Sym::GraphOfVars, vec![vars()]);
    rules.extend([
        Rule {
            id: RuleId(14),
            lhs: app(Sym::SolveQ, vec![app(Sym::Construct, vec![gr("R"), pat("P")]), gr("G")]),
            rhs: app(Sym::DisplayC, vec![gr("R"), start(gr("R"))]),
        },
        Rule {
            id: RuleId(15),
            lhs: app(Sym::DisplayC, vec![gr("R"), done(som("m"))]),
            rhs: app(Sym::PrintC, vec![gr("R"), som("m")]),
        },
        Rule {
            id: RuleId(16),
            lhs: app(Sym::SolveQ, vec![app(Sym::Select, vec![vars(), pat("P")]), gr("G")]),
            rhs: app(Sym::DisplayS, vec![vars(), start(graph_s())]),
        },
        Rule {
            id: RuleId(17),
            lhs: app(Sym::DisplayS, vec![vars(), done(som("m"))]),
            rhs: app(Sym::PrintS, vec![vars(), som("m")]),
        },
        Rule {
            id: RuleId(18),
            lhs: app(
                Sym::SolveQ,
                vec![app(Sym::Conselect, vec![vars(), gr("R"), pat("P")]), gr("G")],
            ),
            rhs: app(
                Sym::DisplayCS,
                vec![
                    vars(),
                    gr("R"),
                    start(app(Sym::GraphUnion, vec![graph_s(), gr("R")])),
                ],
            ),
        },
        Rule {
            id: RuleId(19),
            lhs: app(Sym::DisplayCS, vec![vars(), gr("R"), done(som("m"))]),
            rhs: app(Sym::PrintCS, vec![vars(), gr("R"), som("m")]),
        },
    ]);
    rules
}

/// All twenty rules, ordered by number.
pub fn rules() -> &'static [Rule] {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    RULES.get_or_init(build_rules)
}

pub fn rule(id: RuleId) -> &'static Rule {
    &rules()[id.0 as usize]
}
