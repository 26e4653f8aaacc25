//! CONSTRUCT, SELECT and CONSELECT queries, their results, and evaluation
//! through either engine.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::EvalOptions;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::graph::{ConstValue, Graph, Label, Triple, Variable};
use crate::matching::{FreshVarGen, MatchSet};
use crate::narrowing::{self, Trace};
use crate::pattern::{eval_pattern, Pattern};
use crate::syntax::print;

/// Row variable of `Graph(S)`.
pub const ROW_VAR: &str = "__row";
/// Prefix of the column constants of `Graph(S)`.
pub const COLUMN_PREFIX: &str = "__col_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("the list of selected variables is empty")]
    EmptySelectList,
    #[error("variable {0} is selected twice")]
    DuplicateVariable(Variable),
    #[error("the query uses the reserved label {0}")]
    ReservedLabel(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    Construct {
        template: Graph,
        pattern: Pattern,
    },
    Select {
        vars: Vec<Variable>,
        pattern: Pattern,
    },
    Conselect {
        vars: Vec<Variable>,
        template: Graph,
        pattern: Pattern,
    },
}

impl Query {
    pub fn pattern(&self) -> &Pattern {
        match self {
            Query::Construct { pattern, .. }
            | Query::Select { pattern, .. }
            | Query::Conselect { pattern, .. } => pattern,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Query::Construct { .. } => "CONSTRUCT",
            Query::Select { .. } => "SELECT",
            Query::Conselect { .. } => "CONSELECT",
        }
    }

    pub fn template(&self) -> Option<&Graph> {
        match self {
            Query::Construct { template, .. } | Query::Conselect { template, .. } => Some(template),
            Query::Select { .. } => None,
        }
    }

    pub fn selected(&self) -> Option<&[Variable]> {
        match self {
            Query::Select { vars, .. } | Query::Conselect { vars, .. } => Some(vars),
            Query::Construct { .. } => None,
        }
    }

    pub fn mentioned_vars(&self) -> BTreeSet<Variable> {
        let mut out = self.pattern().mentioned_vars();
        if let Some(r) = self.template() {
            out.extend(r.vars());
        }
        if let Some(s) = self.selected() {
            out.extend(s.iter().cloned());
        }
        out
    }

    /// Pattern side conditions plus the query-level ones.
    pub fn validate(&self) -> Result<()> {
        self.pattern().ensure_valid()?;
        if let Some(s) = self.selected() {
            if s.is_empty() {
                return Err(QueryError::EmptySelectList.into());
            }
            let mut seen = BTreeSet::new();
            for v in s {
                if !seen.insert(v) {
                    return Err(QueryError::DuplicateVariable(v.clone()).into());
                }
            }
        }
        if self.mentioned_vars().iter().any(|v| v.name() == ROW_VAR) {
            return Err(QueryError::ReservedLabel(format!("?{ROW_VAR}")).into());
        }
        let mut consts = BTreeSet::new();
        if let Some(r) = self.template() {
            consts.extend(r.consts());
        }
        collect_consts(self.pattern(), &mut consts);
        for c in consts {
            if let ConstValue::Str(s) = &c {
                if s.starts_with(COLUMN_PREFIX) {
                    return Err(QueryError::ReservedLabel(c.to_string()).into());
                }
            }
        }
        Ok(())
    }

    /// `P BUILD R`, `P BUILD Graph(S)` or `P BUILD (Graph(S) ∪ R)`.
    pub fn wrapped_pattern(&self) -> Result<Pattern> {
        let p = self.pattern().clone();
        Ok(match self {
            Query::Construct { template, .. } => p.build(template.clone()),
            Query::Select { vars, .. } => p.build(graph_of_vars(vars)?),
            Query::Conselect { vars, template, .. } => {
                p.build(graph_of_vars(vars)?.union(template))
            }
        })
    }
}

fn collect_consts(p: &Pattern, out: &mut BTreeSet<ConstValue>) {
    let from_expr = |e: &Expr, out: &mut BTreeSet<ConstValue>| {
        e.walk(&mut |sub| {
            if let Expr::Const(c) = sub {
                out.insert(c.clone());
            }
        })
    };
    match p {
        Pattern::Empty => {}
        Pattern::Basic(l) => out.extend(l.consts()),
        Pattern::Join(a, b) | Pattern::Union(a, b) => {
            collect_consts(a, out);
            collect_consts(b, out);
        }
        Pattern::Bind(a, e, _) | Pattern::Filter(a, e) => {
            collect_consts(a, out);
            from_expr(e, out);
        }
        Pattern::Build(a, r) => {
            collect_consts(a, out);
            out.extend(r.consts());
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::query(self))
    }
}

/// `Graph(S)`: one triple `(?__row, "__col_<x>", ?x)` per selected variable.
pub fn graph_of_vars(s: &[Variable]) -> Result<Graph, QueryError> {
    if s.is_empty() {
        return Err(QueryError::EmptySelectList);
    }
    let row = Label::var(ROW_VAR);
    let mut g = Graph::empty();
    for x in s {
        g.insert_triple(Triple::new(
            row.clone(),
            Label::str(&format!("{COLUMN_PREFIX}{}", x.name())),
            Label::Var(x.clone()),
        ));
    }
    Ok(g)
}

/// A multiset of solutions; rows are kept in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionTable {
    pub columns: Vec<Variable>,
    pub rows: Vec<Vec<Label>>,
}

impl SolutionTable {
    pub fn new(columns: Vec<Variable>, mut rows: Vec<Vec<Label>>) -> Self {
        rows.sort();
        SolutionTable { columns, rows }
    }
}

impl fmt::Display for SolutionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::table(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryResult {
    Graph(Graph),
    Table(SolutionTable),
    Pair(Graph, SolutionTable),
}

impl QueryResult {
    pub fn graph(&self) -> Option<&Graph> {
        match self {
            QueryResult::Graph(g) | QueryResult::Pair(g, _) => Some(g),
            QueryResult::Table(_) => None,
        }
    }

    pub fn table(&self) -> Option<&SolutionTable> {
        match self {
            QueryResult::Table(t) | QueryResult::Pair(_, t) => Some(t),
            QueryResult::Graph(_) => None,
        }
    }
}

impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryResult::Graph(g) => f.write_str(&print::graph_block(g)),
            QueryResult::Table(t) => f.write_str(&print::table(t)),
            QueryResult::Pair(g, t) => f.write_str(&print::pair(g, t)),
        }
    }
}

/// The image of `R` by the final matches.
pub fn print_c(r: &Graph, ms: &MatchSet) -> Result<Graph> {
    Ok(ms.image(r)?)
}

/// One row per match, projected on `S`.
pub fn print_s(s: &[Variable], ms: &MatchSet) -> SolutionTable {
    let rows = ms
        .assignments()
        .iter()
        .map(|a| s.iter().map(|x| a.apply(&Label::Var(x.clone()))).collect())
        .collect();
    SolutionTable::new(s.to_vec(), rows)
}

pub fn print_cs(s: &[Variable], r: &Graph, ms: &MatchSet) -> Result<QueryResult> {
    Ok(QueryResult::Pair(print_c(r, ms)?, print_s(s, ms)))
}

/// Result extraction from the matches of the wrapped pattern.
pub fn extract(q: &Query, ms: &MatchSet) -> Result<QueryResult> {
    Ok(match q {
        Query::Construct { template, .. } => QueryResult::Graph(print_c(template, ms)?),
        Query::Select { vars, .. } => QueryResult::Table(print_s(vars, ms)),
        Query::Conselect { vars, template, .. } => print_cs(vars, template, ms)?,
    })
}

/// A generator avoiding every variable of `g` and `q`.
pub fn fresh_gen_for_query(g: &Graph, q: &Query) -> FreshVarGen {
    let mut gen = FreshVarGen::new();
    gen.reserve_graph(g);
    gen.reserve(q.mentioned_vars());
    gen
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    Narrowing,
    Oracle,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub result: QueryResult,
    /// Present for the narrowing engine.
    pub trace: Option<Trace>,
}

pub fn evaluate(q: &Query, g: &Graph, engine: Engine, opts: EvalOptions) -> Result<Evaluation> {
    q.validate()?;
    let mut gen = fresh_gen_for_query(g, q);
    match engine {
        Engine::Narrowing => {
            let (result, trace) = narrowing::solve_query(q, g, &mut gen, opts)?;
            Ok(Evaluation {
                result,
                trace: Some(trace),
            })
        }
        Engine::Oracle => {
            let wrapped = q.wrapped_pattern()?;
            let res = eval_pattern(&wrapped, g, &mut gen, opts)?;
            Ok(Evaluation {
                result: extract(q, &res.matches)?,
                trace: None,
            })
        }
    }
}

/// Outcome of running both engines.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub narrowing: std::result::Result<Evaluation, Error>,
    pub oracle: std::result::Result<Evaluation, Error>,
}

impl CheckReport {
    /// Equal up to renaming, or both failed with the same error.
    pub fn agrees(&self) -> bool {
        match (&self.narrowing, &self.oracle) {
            (Ok(a), Ok(b)) => crate::renaming::results_equal_up_to_renaming(&a.result, &b.result),
            (Err(a), Err(b)) => a == b,
            _ => false,
        }
    }
}

pub fn check(q: &Query, g: &Graph, opts: EvalOptions) -> CheckReport {
    CheckReport {
        narrowing: evaluate(q, g, Engine::Narrowing, opts),
        oracle: evaluate(q, g, Engine::Oracle, opts),
    }
}
