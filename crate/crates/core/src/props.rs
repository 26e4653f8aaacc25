//! Seeded random instances and the property harness comparing the rewriting
//! engine with the set-based evaluator.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::EvalOptions;
use crate::expr::{eval_family_partial, group_classes, AggFn, Aggregate, BinaryOp, Expr, Group, UnaryOp};
use crate::graph::{ConstValue, Graph, Label, Triple, Variable};
use crate::narrowing::{derive, query_step_bound, step_bound, Sort};
use crate::pattern::{eval_pattern, fresh_gen_for, Pattern};
use crate::query::{check, Query};
use crate::renaming::match_sets_equal_up_to_renaming;

const NODES: &[&str] = &["a", "b", "c", "d"];
const PREDICATES: &[&str] = &["p", "q"];
const GRAPH_VARS: &[&str] = &["x", "y", "u", "v"];
const PATTERN_VARS: &[&str] = &["x", "y", "z", "w"];
const TEMPLATE_VARS: &[&str] = &["t", "x", "y"];
const BIND_VARS: &[&str] = &["n", "k"];

const ODD_STRINGS: &[&str] = &[
    "two words", "quote\"d", "back\\slash", "line\nbreak", "tab\there", "é", "JOIN", "node",
    "true", "", "3", "?x", "#hash", "a.b", "{", "é_ü",
];
const ODD_VARS: &[&str] = &["x", "_f1", "y2", "é", "__row_", "long_variable_name"];

/// Random graphs, expressions, patterns and queries.
///
/// The default generator draws from a small vocabulary so that matches are
/// frequent; [`Gen::wide`] draws awkward labels for printer round trips.
pub struct Gen {
    rng: ChaCha8Rng,
    wide: bool,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            wide: false,
        }
    }

    pub fn wide(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            wide: true,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).expect("non-empty choice")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn constant(&mut self) -> ConstValue {
        if !self.wide {
            return match self.rng.gen_range(0..10) {
                0 => ConstValue::Int(self.rng.gen_range(1..=2)),
                _ => ConstValue::str(self.pick(NODES)),
            };
        }
        match self.rng.gen_range(0..8) {
            0 => ConstValue::Int(*self.pick(&[0, -3, 42, i64::MAX, i64::MIN])),
            1 => ConstValue::Float(*self.pick(&[0.5, -2.25, 1e20, 3.0, 1e-7, -0.0])),
            2 => ConstValue::Bool(self.chance(0.5)),
            3 | 4 => ConstValue::str(self.pick(ODD_STRINGS)),
            _ => ConstValue::str(self.pick(NODES)),
        }
    }

    fn variable(&mut self, pool: &[&str]) -> Variable {
        if self.wide {
            Variable::new(self.pick(ODD_VARS))
        } else {
            Variable::new(self.pick(pool))
        }
    }

    fn label(&mut self, vars: &[&str], p_var: f64) -> Label {
        if !vars.is_empty() && self.chance(p_var) {
            Label::Var(self.variable(vars))
        } else {
            Label::Const(self.constant())
        }
    }

    fn predicate(&mut self, vars: &[&str], p_var: f64) -> Label {
        if !vars.is_empty() && self.chance(p_var) {
            Label::Var(self.variable(vars))
        } else if self.wide && self.chance(0.3) {
            Label::Const(self.constant())
        } else {
            Label::str(self.pick(PREDICATES))
        }
    }

    /// Up to `max_triples` triples and occasionally an isolated node.
    pub fn graph_with(&mut self, max_triples: usize, vars: &[&str], p_var: f64) -> Graph {
        let n = self.rng.gen_range(max_triples / 4..=max_triples);
        let mut g = Graph::empty();
        for _ in 0..n {
            let s = self.label(vars, p_var);
            let p = self.predicate(vars, p_var / 3.0);
            let o = self.label(vars, p_var);
            g.insert_triple(Triple::new(s, p, o));
        }
        if self.chance(0.2) {
            let node = self.label(vars, p_var);
            g.insert_node(node);
        }
        g
    }

    /// A data graph: at most 8 triples and 4 variables.
    pub fn data_graph(&mut self) -> Graph {
        self.graph_with(8, GRAPH_VARS, 0.1)
    }

    /// A graph for printer round trips.
    pub fn any_graph(&mut self) -> Graph {
        self.graph_with(6, GRAPH_VARS, 0.3)
    }

    fn basic_graph(&mut self) -> Graph {
        loop {
            let n = self.rng.gen_range(1..=2);
            let mut g = Graph::empty();
            for _ in 0..n {
                let s = self.label(PATTERN_VARS, 0.9);
                let p = self.predicate(PATTERN_VARS, 0.1);
                let o = self.label(PATTERN_VARS, 0.75);
                g.insert_triple(Triple::new(s, p, o));
            }
            if self.chance(0.1) {
                g.insert_node(Label::Var(self.variable(PATTERN_VARS)));
            }
            if !g.is_empty() {
                return g;
            }
        }
    }

    fn template(&mut self, scope: &[Variable]) -> Graph {
        let n = self.rng.gen_range(1..=2);
        let mut g = Graph::empty();
        let label = |gen: &mut Gen| -> Label {
            match gen.rng.gen_range(0..5) {
                0 | 1 if !scope.is_empty() => Label::Var(gen.pick(scope).clone()),
                2 => Label::Var(gen.variable(TEMPLATE_VARS)),
                _ => Label::Const(gen.constant()),
            }
        };
        for _ in 0..n {
            let s = label(self);
            let o = label(self);
            let p = Label::str(self.pick(&["r", "p"]));
            g.insert_triple(Triple::new(s, p, o));
        }
        g
    }

    fn scope_operand(&mut self, scope: &[Variable]) -> Expr {
        if !scope.is_empty() && self.chance(0.7) {
            Expr::Var(self.pick(scope).clone())
        } else {
            Expr::Const(self.constant())
        }
    }

    fn count(&mut self, scope: &[Variable]) -> Expr {
        let inner = self.scope_operand(scope);
        let inner_vars = inner.vars();
        match self.rng.gen_range(0..3) {
            0 => Expr::agg(Aggregate::new(AggFn::Count), inner),
            1 => Expr::agg(Aggregate::distinct(AggFn::Count), inner),
            _ => {
                let others: Vec<Variable> =
                    scope.iter().filter(|v| !inner_vars.contains(*v)).cloned().collect();
                let g = if !others.is_empty() && self.chance(0.8) {
                    Expr::Var(self.pick(&others).clone())
                } else {
                    Expr::int(1)
                };
                let agg = if self.chance(0.3) {
                    Aggregate::distinct(AggFn::Count)
                } else {
                    Aggregate::new(AggFn::Count)
                };
                Expr::AggBy(agg, Box::new(inner), Group::new(vec![g]).unwrap())
            }
        }
    }

    /// A boolean over the scope: comparisons and COUNT variants.
    pub fn condition(&mut self, scope: &[Variable]) -> Expr {
        let base = match self.rng.gen_range(0..6) {
            0..=2 => {
                let op = *self.pick(&[BinaryOp::Eq, BinaryOp::Eq, BinaryOp::Lt, BinaryOp::Gt]);
                let l = self.scope_operand(scope);
                let r = self.scope_operand(scope);
                Expr::binary(l, op, r)
            }
            _ => {
                let c = self.count(scope);
                let op = *self.pick(&[BinaryOp::Eq, BinaryOp::Gt, BinaryOp::Lt]);
                Expr::binary(c, op, Expr::int(self.rng.gen_range(0..=2)))
            }
        };
        if self.chance(0.15) {
            Expr::Unary(UnaryOp::Not, Box::new(base))
        } else {
            base
        }
    }

    fn bind_value(&mut self, scope: &[Variable]) -> Expr {
        match self.rng.gen_range(0..4) {
            0 => self.scope_operand(scope),
            1 => self.condition(scope),
            _ => self.count(scope),
        }
    }

    /// A valid pattern whose constructors nest at most `depth` levels below
    /// the root.
    pub fn pattern(&mut self, depth: usize) -> Pattern {
        loop {
            let p = self.pattern_raw(depth);
            if p.validate().is_empty() {
                return p;
            }
        }
    }

    fn pattern_raw(&mut self, depth: usize) -> Pattern {
        let choice = if depth == 0 {
            if self.chance(0.9) {
                0
            } else {
                1
            }
        } else {
            // fewer EMPTY leaves inside the tree
            [0, 0, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6][self.rng.gen_range(0..13)]
        };
        match choice {
            0 => Pattern::Basic(self.basic_graph()),
            1 => Pattern::Empty,
            2 => {
                let a = self.pattern_raw(depth - 1);
                let b = self.pattern_raw(depth - 1);
                a.join(b)
            }
            3 => {
                let p = self.pattern_raw(depth - 1);
                let scope: Vec<Variable> = p.vars().into_iter().collect();
                let e = self.bind_value(&scope);
                let x = if !scope.is_empty() && self.chance(0.2) {
                    self.pick(&scope).clone()
                } else {
                    Variable::new(self.pick(BIND_VARS))
                };
                p.bind(e, x)
            }
            4 => {
                let p = self.pattern_raw(depth - 1);
                let scope: Vec<Variable> = p.vars().into_iter().collect();
                let e = self.condition(&scope);
                p.filter(e)
            }
            5 => {
                let p = self.pattern_raw(depth - 1);
                let scope: Vec<Variable> = p.vars().into_iter().collect();
                let r = self.template(&scope);
                p.build(r)
            }
            _ => {
                if depth >= 2 && self.chance(0.6) {
                    // operands built into the same template share their scope
                    let a = self.pattern_raw(depth - 2);
                    let b = self.pattern_raw(depth - 2);
                    let mut scope: Vec<Variable> = a.vars().into_iter().collect();
                    scope.extend(b.vars());
                    let r = self.template(&scope);
                    a.build(r.clone()).union(b.build(r))
                } else if depth >= 2 {
                    let base = self.pattern_raw(depth - 2);
                    let scope: Vec<Variable> = base.vars().into_iter().collect();
                    let e1 = self.condition(&scope);
                    let e2 = self.condition(&scope);
                    base.clone().filter(e1).union(base.filter(e2))
                } else {
                    let l = self.basic_graph();
                    Pattern::Basic(l.clone()).union(Pattern::Basic(l))
                }
            }
        }
    }

    /// A valid query wrapping `p`.
    pub fn query_for(&mut self, p: Pattern) -> Query {
        let scope: Vec<Variable> = p.vars().into_iter().collect();
        let mut selected: Vec<Variable> = scope
            .iter()
            .filter(|_| self.rng.gen_bool(0.6))
            .cloned()
            .collect();
        if selected.is_empty() {
            selected.push(match scope.first() {
                Some(v) if self.chance(0.8) => v.clone(),
                _ => Variable::new("unbound"),
            });
        }
        selected.shuffle(&mut self.rng);
        match self.rng.gen_range(0..3) {
            0 => Query::Construct {
                template: self.template(&scope),
                pattern: p,
            },
            1 => Query::Select {
                vars: selected,
                pattern: p,
            },
            _ => Query::Conselect {
                vars: selected,
                template: self.template(&scope),
                pattern: p,
            },
        }
    }

    /// Any expression tree, for printer round trips.
    pub fn any_expr(&mut self, depth: usize) -> Expr {
        let leaf = depth == 0 || self.chance(0.25);
        if leaf {
            return if self.chance(0.5) {
                Expr::Var(self.variable(PATTERN_VARS))
            } else {
                Expr::Const(self.constant())
            };
        }
        match self.rng.gen_range(0..5) {
            0 => {
                let op = *self.pick(&[UnaryOp::Neg, UnaryOp::Not]);
                Expr::Unary(op, Box::new(self.any_expr(depth - 1)))
            }
            1 | 2 => {
                let op = *self.pick(&[
                    BinaryOp::Add,
                    BinaryOp::Sub,
                    BinaryOp::Mul,
                    BinaryOp::Div,
                    BinaryOp::Eq,
                    BinaryOp::Lt,
                    BinaryOp::Gt,
                    BinaryOp::And,
                    BinaryOp::Or,
                ]);
                let l = self.any_expr(depth - 1);
                let r = self.any_expr(depth - 1);
                Expr::binary(l, op, r)
            }
            3 => {
                let agg = self.any_aggregate();
                Expr::agg(agg, self.any_expr(depth - 1))
            }
            _ => {
                let agg = self.any_aggregate();
                let inner = self.any_expr(depth - 1);
                let n = self.rng.gen_range(1..=2);
                let group = (0..n).map(|_| self.any_expr(depth - 1)).collect();
                Expr::AggBy(agg, Box::new(inner), Group::new(group).unwrap())
            }
        }
    }

    fn any_aggregate(&mut self) -> Aggregate {
        Aggregate {
            func: *self.pick(&[AggFn::Max, AggFn::Min, AggFn::Sum, AggFn::Avg, AggFn::Count]),
            distinct: self.chance(0.3),
        }
    }

    /// Any pattern tree, valid or not, for printer round trips.
    pub fn any_pattern(&mut self, depth: usize) -> Pattern {
        let leaf = depth == 0 || self.chance(0.2);
        if leaf {
            return if self.chance(0.8) {
                Pattern::Basic(self.graph_with(3, PATTERN_VARS, 0.5))
            } else {
                Pattern::Empty
            };
        }
        match self.rng.gen_range(0..5) {
            0 => self.any_pattern(depth - 1).join(self.any_pattern(depth - 1)),
            1 => self.any_pattern(depth - 1).union(self.any_pattern(depth - 1)),
            2 => {
                let p = self.any_pattern(depth - 1);
                let e = self.any_expr(2);
                let x = self.variable(BIND_VARS);
                p.bind(e, x)
            }
            3 => {
                let p = self.any_pattern(depth - 1);
                p.filter(self.any_expr(2))
            }
            _ => {
                let p = self.any_pattern(depth - 1);
                p.build(self.graph_with(3, TEMPLATE_VARS, 0.5))
            }
        }
    }

    /// Any query, for printer round trips.
    pub fn any_query(&mut self) -> Query {
        let pattern = self.any_pattern(3);
        let mut vars: Vec<Variable> = Vec::new();
        for _ in 0..self.rng.gen_range(1..=3) {
            let v = self.variable(PATTERN_VARS);
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        match self.rng.gen_range(0..3) {
            0 => Query::Construct {
                template: self.graph_with(3, TEMPLATE_VARS, 0.5),
                pattern,
            },
            1 => Query::Select { vars, pattern },
            _ => Query::Conselect {
                vars,
                template: self.graph_with(3, TEMPLATE_VARS, 0.5),
                pattern,
            },
        }
    }
}

/// The generator for case `i` of a run.
pub fn case_gen(seed: u64, i: u64) -> Gen {
    Gen::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i))
}

/// One random instance of the harness.
#[derive(Clone, Debug)]
pub struct Case {
    pub graph: Graph,
    pub pattern: Pattern,
    pub query: Query,
    pub opts: EvalOptions,
}

pub const PATTERN_DEPTH: usize = 3;

pub fn gen_case(seed: u64, i: u64) -> Case {
    let mut gen = case_gen(seed, i);
    let graph = gen.data_graph();
    let pattern = gen.pattern(PATTERN_DEPTH);
    let query = gen.query_for(pattern.clone());
    let opts = EvalOptions {
        lenient: gen.chance(0.5),
    };
    Case {
        graph,
        pattern,
        query,
        opts,
    }
}

/// Counters gathered while checking one case.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseStats {
    pub steps: usize,
    pub query_steps: usize,
    pub both_failed: bool,
    pub aggregate_checks: usize,
    pub matches: usize,
}

/// Runs every property on one case.
pub fn check_case(case: &Case) -> Result<CaseStats, String> {
    let mut stats = CaseStats::default();
    let Case {
        graph: g,
        pattern: p,
        query: q,
        opts,
    } = case;

    let oracle = eval_pattern(p, g, &mut fresh_gen_for(g, p), *opts);
    let narrowing = derive(g, p, &mut fresh_gen_for(g, p), *opts);
    match (&oracle, &narrowing) {
        (Ok(o), Ok(n)) => {
            if !match_sets_equal_up_to_renaming(&o.matches, &n.matches) {
                return Err(format!(
                    "pattern results differ:\n oracle {:?}\n narrowing {:?}",
                    o.matches.tab(),
                    n.matches.tab()
                ));
            }
            let bound = step_bound(p);
            if n.trace.len() > bound {
                return Err(format!("{} steps exceed the bound {bound}", n.trace.len()));
            }
            for t in n.trace.terms() {
                t.check_sorts()
                    .map_err(|e| format!("ill-sorted term in derivation: {e}"))?;
            }
            if n.trace.last().check_sorts() != Ok(Sort::Conf) {
                return Err("derivation does not end in a configuration".into());
            }
            stats.steps = n.trace.len();
            stats.matches = n.matches.len();
        }
        (Err(a), Err(b)) if a == b => stats.both_failed = true,
        (a, b) => {
            return Err(format!(
                "engines disagree: oracle {:?}, narrowing {:?}",
                a.as_ref().err(),
                b.as_ref().err()
            ))
        }
    }

    stats.aggregate_checks = check_aggregates(p, g, *opts)?;

    let report = check(q, g, *opts);
    if !report.agrees() {
        return Err(format!(
            "query results differ for {q}:\n oracle {:?}\n narrowing {:?}",
            report.oracle.as_ref().map(|e| &e.result),
            report.narrowing.as_ref().map(|e| &e.result)
        ));
    }
    if let Ok(ev) = &report.narrowing {
        let steps = ev.trace.as_ref().map_or(0, |t| t.len());
        if steps > query_step_bound(q) {
            return Err(format!("query derivation took {steps} steps"));
        }
        stats.query_steps = steps;
    }
    Ok(stats)
}

/// Aggregate values are constant over the whole set (plain) or over each
/// class of the grouping (BY), for every aggregate in the pattern.
pub fn check_aggregates(p: &Pattern, g: &Graph, opts: EvalOptions) -> Result<usize, String> {
    let mut checks = 0;
    let mut err = None;
    visit(p, &mut |sub| {
        let (inner, e) = match sub {
            Pattern::Bind(inner, e, _) | Pattern::Filter(inner, e) => (inner, e),
            _ => return,
        };
        let Ok(res) = eval_pattern(inner, g, &mut fresh_gen_for(g, inner), opts) else {
            return;
        };
        let ms = res.matches;
        e.walk(&mut |a| {
            let values = match a {
                Expr::Agg(..) | Expr::AggBy(..) => match eval_family_partial(&ms, a) {
                    Ok(v) => v,
                    Err(_) => return,
                },
                _ => return,
            };
            let classes: Vec<Vec<usize>> = match a {
                Expr::AggBy(_, _, gp) => match group_classes(&ms, gp) {
                    Ok(cs) => cs
                        .iter()
                        .map(|c| {
                            c.iter()
                                .map(|m| values.iter().position(|(x, _)| x == m).unwrap())
                                .collect()
                        })
                        .collect(),
                    Err(_) => return,
                },
                _ => vec![(0..values.len()).collect()],
            };
            for class in classes {
                checks += 1;
                if let Some(&first) = class.first() {
                    if class.iter().any(|&i| values[i].1 != values[first].1) {
                        err.get_or_insert_with(|| format!("`{a}` is not constant over a class"));
                    }
                }
            }
        });
    });
    match err {
        Some(e) => Err(e),
        None => Ok(checks),
    }
}

fn visit(p: &Pattern, f: &mut impl FnMut(&Pattern)) {
    f(p);
    match p {
        Pattern::Empty | Pattern::Basic(_) => {}
        Pattern::Join(a, b) | Pattern::Union(a, b) => {
            visit(a, f);
            visit(b, f);
        }
        Pattern::Bind(a, ..) | Pattern::Filter(a, _) | Pattern::Build(a, _) => visit(a, f),
    }
}

#[derive(Clone, Debug, Default)]
pub struct PropsReport {
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<(u64, String)>,
    pub counters: BTreeMap<&'static str, usize>,
}

impl PropsReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.cases
    }
}

impl fmt::Display for PropsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}: {}/{} cases passed", self.seed, self.passed, self.cases)?;
        for (k, v) in &self.counters {
            writeln!(f, "  {k}: {v}")?;
        }
        for (i, msg) in &self.failures {
            writeln!(f, "case {i} FAILED: {msg}")?;
        }
        Ok(())
    }
}

pub fn run_props(seed: u64, cases: usize) -> PropsReport {
    let mut report = PropsReport {
        seed,
        cases,
        ..Default::default()
    };
    for i in 0..cases as u64 {
        let case = gen_case(seed, i);
        let mut bump = |k: &'static str, n: usize| *report.counters.entry(k).or_default() += n;
        visit(&case.pattern, &mut |p| {
            bump(
                match p {
                    Pattern::Empty => "constructor EMPTY",
                    Pattern::Basic(_) => "constructor BASIC",
                    Pattern::Join(..) => "constructor JOIN",
                    Pattern::Bind(..) => "constructor BIND",
                    Pattern::Filter(..) => "constructor FILTER",
                    Pattern::Build(..) => "constructor BUILD",
                    Pattern::Union(..) => "constructor UNION",
                },
                1,
            )
        });
        match check_case(&case) {
            Ok(stats) => {
                bump("derivation steps", stats.steps + stats.query_steps);
                bump("aggregate class checks", stats.aggregate_checks);
                bump("cases with matches", usize::from(stats.matches > 0));
                bump("cases where both engines failed alike", usize::from(stats.both_failed));
                report.passed += 1;
            }
            Err(msg) => report.failures.push((i, msg)),
        }
    }
    report
}
