//! Expressions, aggregation and their evaluation relative to a set of matches.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{ConstValue, Label, Variable};
use crate::matching::{Assignment, MatchSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("type error: {0}")]
    TypeError(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} over an empty multiset")]
    EmptyAggregate(Aggregate),
    #[error("variable {0} is not in scope")]
    UnboundVariable(Variable),
    #[error("numeric overflow in {0}")]
    Overflow(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Gt,
    Lt,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::Gt => ">",
            BinaryOp::Lt => "<",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Gt | BinaryOp::Lt => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Mul | BinaryOp::Div => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggFn {
    Max,
    Min,
    Sum,
    Avg,
    Count,
}

impl AggFn {
    pub fn keyword(self) -> &'static str {
        match self {
            AggFn::Max => "MAX",
            AggFn::Min => "MIN",
            AggFn::Sum => "SUM",
            AggFn::Avg => "AVG",
            AggFn::Count => "COUNT",
        }
    }
}

/// An aggregation operator, optionally applied to the underlying set only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Aggregate {
    pub func: AggFn,
    pub distinct: bool,
}

impl Aggregate {
    pub fn new(func: AggFn) -> Self {
        Aggregate {
            func,
            distinct: false,
        }
    }

    pub fn distinct(func: AggFn) -> Self {
        Aggregate {
            func,
            distinct: true,
        }
    }

    /// Applies the operator to a multiset of values.
    pub fn apply(&self, values: &[Label]) -> Result<Label, EvalError> {
        let deduped: Vec<Label>;
        let values = if self.distinct {
            let mut seen = BTreeSet::new();
            deduped = values
                .iter()
                .filter(|v| seen.insert(*v))
                .cloned()
                .collect();
            &deduped[..]
        } else {
            values
        };
        match self.func {
            AggFn::Count => Ok(Label::Const(ConstValue::Int(values.len() as i64))),
            AggFn::Sum => sum(values).map(Label::Const),
            AggFn::Avg => {
                if values.is_empty() {
                    return Err(EvalError::EmptyAggregate(*self));
                }
                let total = match sum(values)? {
                    ConstValue::Int(i) => i as f64,
                    ConstValue::Float(f) => f,
                    _ => unreachable!(),
                };
                finite(total / values.len() as f64, "AVG").map(Label::Const)
            }
            AggFn::Max | AggFn::Min => {
                let want = if self.func == AggFn::Max {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
                let mut best: Option<&Label> = None;
                for v in values {
                    best = Some(match best {
                        None => {
                            value_cmp(v, v, self.func.keyword())?;
                            v
                        }
                        Some(b) if value_cmp(v, b, self.func.keyword())? == want => v,
                        Some(b) => b,
                    });
                }
                best.cloned().ok_or(EvalError::EmptyAggregate(*self))
            }
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.func.keyword())?;
        if self.distinct {
            f.write_str(" DISTINCT")?;
        }
        Ok(())
    }
}

fn sum(values: &[Label]) -> Result<ConstValue, EvalError> {
    let mut int_total: Option<i64> = Some(0);
    let mut float_total = 0.0;
    for v in values {
        match v {
            Label::Const(ConstValue::Int(i)) => {
                int_total = int_total
                    .map(|t| t.checked_add(*i).ok_or(EvalError::Overflow("SUM".into())))
                    .transpose()?;
                float_total += *i as f64;
            }
            Label::Const(ConstValue::Float(f)) => {
                int_total = None;
                float_total += f;
            }
            other => return Err(type_error("SUM", other)),
        }
    }
    match int_total {
        Some(i) => Ok(ConstValue::Int(i)),
        None => finite(float_total, "SUM"),
    }
}

fn finite(f: f64, what: &str) -> Result<ConstValue, EvalError> {
    if f.is_finite() {
        Ok(ConstValue::Float(f))
    } else {
        Err(EvalError::Overflow(what.into()))
    }
}

fn type_error(op: &str, l: &Label) -> EvalError {
    match l {
        Label::Var(v) => EvalError::TypeError(format!("{op} applied to variable label {v}")),
        Label::Const(c) => {
            EvalError::TypeError(format!("{op} applied to {} value {c}", c.type_name()))
        }
    }
}

fn numeric(l: &Label) -> Option<f64> {
    match l {
        Label::Const(ConstValue::Int(i)) => Some(*i as f64),
        Label::Const(ConstValue::Float(f)) => Some(*f),
        _ => None,
    }
}

/// Order used by `<`, `>`, MAX and MIN: numbers (mixed int/float), strings,
/// or booleans; anything else is a type error.
fn value_cmp(a: &Label, b: &Label, op: &str) -> Result<Ordering, EvalError> {
    use ConstValue::*;
    match (a, b) {
        (Label::Const(Int(x)), Label::Const(Int(y))) => Ok(x.cmp(y)),
        (Label::Const(Str(x)), Label::Const(Str(y))) => Ok(x.cmp(y)),
        (Label::Const(Bool(x)), Label::Const(Bool(y))) => Ok(x.cmp(y)),
        _ => match (numeric(a), numeric(b)) {
            (Some(x), Some(y)) => Ok(x.total_cmp(&y)),
            _ if !matches!(a, Label::Const(Int(_) | Float(_) | Str(_) | Bool(_))) => {
                Err(type_error(op, a))
            }
            _ if !matches!(b, Label::Const(Int(_) | Float(_) | Str(_) | Bool(_))) => {
                Err(type_error(op, b))
            }
            _ => Err(EvalError::TypeError(format!(
                "{op} compares {} with {}",
                a.as_const().unwrap().type_name(),
                b.as_const().unwrap().type_name()
            ))),
        },
    }
}

/// A non-empty list of grouping expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group(Vec<Expr>);

impl Group {
    /// `None` for an empty list.
    pub fn new(exprs: Vec<Expr>) -> Option<Group> {
        (!exprs.is_empty()).then_some(Group(exprs))
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(ConstValue),
    Var(Variable),
    Unary(UnaryOp, Box<Expr>),
    Binary(Box<Expr>, BinaryOp, Box<Expr>),
    Agg(Aggregate, Box<Expr>),
    AggBy(Aggregate, Box<Expr>, Group),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(Variable::new(name))
    }

    pub fn int(i: i64) -> Expr {
        Expr::Const(ConstValue::Int(i))
    }

    pub fn str(s: &str) -> Expr {
        Expr::Const(ConstValue::str(s))
    }

    pub fn binary(l: Expr, op: BinaryOp, r: Expr) -> Expr {
        Expr::Binary(Box::new(l), op, Box::new(r))
    }

    pub fn agg(a: Aggregate, e: Expr) -> Expr {
        Expr::Agg(a, Box::new(e))
    }

    pub fn agg_by(a: Aggregate, e: Expr, group: Vec<Expr>) -> Expr {
        Expr::AggBy(a, Box::new(e), Group::new(group).expect("non-empty group"))
    }

    /// In-scope variables; grouping expressions do not contribute.
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out, false);
        out
    }

    /// Every variable mentioned, grouping expressions included.
    pub fn all_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out, true);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>, with_groups: bool) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Unary(_, e) | Expr::Agg(_, e) => e.collect_vars(out, with_groups),
            Expr::Binary(l, _, r) => {
                l.collect_vars(out, with_groups);
                r.collect_vars(out, with_groups);
            }
            Expr::AggBy(_, e, gp) => {
                e.collect_vars(out, with_groups);
                if with_groups {
                    for g in gp.exprs() {
                        g.collect_vars(out, with_groups);
                    }
                }
            }
        }
    }

    /// Visits this expression and all subexpressions, grouping ones included.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Unary(_, e) | Expr::Agg(_, e) => e.walk(f),
            Expr::Binary(l, _, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::AggBy(_, e, gp) => {
                e.walk(f);
                for g in gp.exprs() {
                    g.walk(f);
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::expr(self))
    }
}

/// The family `ev(m, e)`, one value per member of the set it was evaluated on.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueFamily {
    values: BTreeMap<Assignment, Label>,
}

impl ValueFamily {
    pub fn get(&self, a: &Assignment) -> Option<&Label> {
        self.values.get(a)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Assignment, &Label)> {
        self.values.iter()
    }

    /// The multiset of values, in member order.
    pub fn multiset(&self) -> Vec<Label> {
        self.values.values().cloned().collect()
    }
}

fn check_scope(ms: &MatchSet, e: &Expr) -> Result<(), EvalError> {
    let scope = ms.source().vars();
    match e.all_vars().into_iter().find(|x| !scope.contains(x)) {
        Some(x) => Err(EvalError::UnboundVariable(x)),
        None => Ok(()),
    }
}

/// Strict evaluation: the first per-match error, in member order, aborts.
pub fn eval_family(ms: &MatchSet, e: &Expr) -> Result<ValueFamily, EvalError> {
    let values = eval_family_partial(ms, e)?
        .into_iter()
        .map(|(a, v)| v.map(|v| (a, v)))
        .collect::<Result<_, _>>()?;
    Ok(ValueFamily { values })
}

/// A member with its own evaluation outcome.
pub type PartialValue = (Assignment, Result<Label, EvalError>);

/// Per-match results; only a scope violation fails as a whole.
pub fn eval_family_partial(
    ms: &MatchSet,
    e: &Expr,
) -> Result<Vec<PartialValue>, EvalError> {
    check_scope(ms, e)?;
    let rows: Vec<&Assignment> = ms.assignments().iter().collect();
    let values = eval_rows(&rows, e);
    Ok(rows.into_iter().cloned().zip(values).collect())
}

/// The classes of matches sharing the same group tuple, in member order.
pub fn group_classes(ms: &MatchSet, gp: &Group) -> Result<Vec<Vec<Assignment>>, EvalError> {
    for g in gp.exprs() {
        check_scope(ms, g)?;
    }
    let rows: Vec<&Assignment> = ms.assignments().iter().collect();
    let keys = group_keys(&rows, gp);
    let mut classes: BTreeMap<Vec<Label>, Vec<Assignment>> = BTreeMap::new();
    let mut order = Vec::new();
    for (row, key) in rows.iter().zip(keys) {
        let key = key?;
        if !classes.contains_key(&key) {
            order.push(key.clone());
        }
        classes.entry(key).or_default().push((*row).clone());
    }
    Ok(order
        .into_iter()
        .map(|k| classes.remove(&k).unwrap())
        .collect())
}

fn group_keys(rows: &[&Assignment], gp: &Group) -> Vec<Result<Vec<Label>, EvalError>> {
    let columns: Vec<Vec<Result<Label, EvalError>>> =
        gp.exprs().iter().map(|g| eval_rows(rows, g)).collect();
    (0..rows.len())
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect()
}

fn eval_rows(rows: &[&Assignment], e: &Expr) -> Vec<Result<Label, EvalError>> {
    match e {
        Expr::Const(c) => vec![Ok(Label::Const(c.clone())); rows.len()],
        Expr::Var(x) => rows
            .iter()
            .map(|a| a.get(x).cloned().ok_or_else(|| EvalError::UnboundVariable(x.clone())))
            .collect(),
        Expr::Unary(op, inner) => eval_rows(rows, inner)
            .into_iter()
            .map(|v| v.and_then(|v| unary(*op, &v)))
            .collect(),
        Expr::Binary(l, op, r) => eval_rows(rows, l)
            .into_iter()
            .zip(eval_rows(rows, r))
            .map(|(a, b)| binary(&a?, *op, &b?))
            .collect(),
        Expr::Agg(agg, inner) => {
            let v = aggregate_over(rows, *agg, inner);
            vec![v; rows.len()]
        }
        Expr::AggBy(agg, inner, gp) => {
            let keys = group_keys(rows, gp);
            let mut classes: BTreeMap<&Vec<Label>, Vec<&Assignment>> = BTreeMap::new();
            for (row, key) in rows.iter().zip(&keys) {
                if let Ok(k) = key {
                    classes.entry(k).or_default().push(row);
                }
            }
            let per_class: BTreeMap<&Vec<Label>, Result<Label, EvalError>> = classes
                .iter()
                .map(|(k, members)| (*k, aggregate_over(members, *agg, inner)))
                .collect();
            keys.iter()
                .map(|key| match key {
                    Ok(k) => per_class[k].clone(),
                    Err(e) => Err(e.clone()),
                })
                .collect()
        }
    }
}

fn aggregate_over(rows: &[&Assignment], agg: Aggregate, inner: &Expr) -> Result<Label, EvalError> {
    let values = eval_rows(rows, inner)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    agg.apply(&values)
}

fn unary(op: UnaryOp, v: &Label) -> Result<Label, EvalError> {
    match (op, v) {
        (UnaryOp::Neg, Label::Const(ConstValue::Int(i))) => i
            .checked_neg()
            .map(|i| Label::Const(ConstValue::Int(i)))
            .ok_or(EvalError::Overflow("-".into())),
        (UnaryOp::Neg, Label::Const(ConstValue::Float(f))) => Ok(Label::Const(ConstValue::Float(-f))),
        (UnaryOp::Not, Label::Const(ConstValue::Bool(b))) => Ok(Label::Const(ConstValue::Bool(!b))),
        (UnaryOp::Neg, other) => Err(type_error("-", other)),
        (UnaryOp::Not, other) => Err(type_error("NOT", other)),
    }
}

fn binary(a: &Label, op: BinaryOp, b: &Label) -> Result<Label, EvalError> {
    use ConstValue::*;
    let boolean = |x: bool| Ok(Label::Const(Bool(x)));
    match op {
        BinaryOp::Eq => boolean(a == b),
        BinaryOp::Gt => boolean(value_cmp(a, b, ">")? == Ordering::Greater),
        BinaryOp::Lt => boolean(value_cmp(a, b, "<")? == Ordering::Less),
        BinaryOp::And | BinaryOp::Or => match (a, b) {
            (Label::Const(Bool(x)), Label::Const(Bool(y))) => {
                boolean(if op == BinaryOp::And { *x && *y } else { *x || *y })
            }
            (Label::Const(Bool(_)), other) | (other, _) => Err(type_error(op.symbol(), other)),
        },
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
            let (x, y) = match (numeric(a), numeric(b)) {
                (Some(x), Some(y)) => (x, y),
                (None, _) => return Err(type_error(op.symbol(), a)),
                (_, None) => return Err(type_error(op.symbol(), b)),
            };
            if op == BinaryOp::Div {
                if y == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                return finite(x / y, "/").map(Label::Const);
            }
            if let (Label::Const(Int(i)), Label::Const(Int(j))) = (a, b) {
                let r = match op {
                    BinaryOp::Add => i.checked_add(*j),
                    BinaryOp::Sub => i.checked_sub(*j),
                    _ => i.checked_mul(*j),
                };
                return r
                    .map(|r| Label::Const(Int(r)))
                    .ok_or(EvalError::Overflow(op.symbol().into()));
            }
            let r = match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                _ => x * y,
            };
            finite(r, op.symbol()).map(Label::Const)
        }
    }
}
