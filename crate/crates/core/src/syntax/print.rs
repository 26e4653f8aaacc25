//! Canonical printers. Everything printed here parses back to the same value.

use std::fmt::Write;

use crate::expr::{Expr, UnaryOp};
use crate::graph::{ConstValue, Graph, Label, Variable};
use crate::pattern::Pattern;
use crate::query::{Query, SolutionTable};

/// The triple file format: sorted triples, then isolated nodes.
pub fn graph_block(g: &Graph) -> String {
    let mut out = String::new();
    for t in g.triples() {
        let _ = writeln!(out, "{} {} {} .", t.subject, t.predicate, t.object);
    }
    for n in g.isolated_nodes() {
        let _ = writeln!(out, "node {n} .");
    }
    out
}

pub fn print_graph(g: &Graph) -> String {
    graph_block(g)
}

/// `{ s p o . node n . }` on one line.
pub fn inline_graph(g: &Graph) -> String {
    let mut out = String::from("{ ");
    for line in graph_block(g).lines() {
        out.push_str(line);
        out.push(' ');
    }
    out.push('}');
    out
}

pub fn grid(columns: &[Variable], rows: &[Vec<Label>]) -> String {
    let header: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|l| l.to_string()).collect())
        .collect();
    let widths: Vec<usize> = (0..columns.len())
        .map(|i| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain([header[i].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let border = {
        let mut s = String::from("+");
        for w in &widths {
            s.push_str(&"-".repeat(w + 2));
            s.push('+');
        }
        s
    };
    let line = |row: &[String]| {
        let mut s = String::from("|");
        for (c, w) in row.iter().zip(&widths) {
            let pad = w - c.chars().count();
            let _ = write!(s, " {c}{} |", " ".repeat(pad));
        }
        s
    };
    let mut out = String::new();
    let _ = writeln!(out, "{border}");
    let _ = writeln!(out, "{}", line(&header));
    let _ = writeln!(out, "{border}");
    for r in &cells {
        let _ = writeln!(out, "{}", line(r));
    }
    if !cells.is_empty() {
        let _ = writeln!(out, "{border}");
    }
    out
}

pub fn table(t: &SolutionTable) -> String {
    grid(&t.columns, &t.rows)
}

/// Graph block, a blank line, then the table.
pub fn pair(g: &Graph, t: &SolutionTable) -> String {
    format!("{}\n{}", graph_block(g), table(t))
}

pub fn expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

// Unary and atoms bind tighter than any binary operator.
const ATOM: u8 = 10;

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(_, op, _) => op.precedence(),
        _ => ATOM,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let parens = expr_prec(e) < min_prec;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Const(c) => write_const(out, c),
        Expr::Var(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Unary(UnaryOp::Neg, inner) => {
            out.push_str("-(");
            write_expr(out, inner, 0);
            out.push(')');
        }
        Expr::Unary(UnaryOp::Not, inner) => {
            out.push_str("NOT ");
            write_expr(out, inner, ATOM);
        }
        Expr::Binary(l, op, r) => {
            let p = op.precedence();
            write_expr(out, l, p);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, p + 1);
        }
        Expr::Agg(agg, inner) => {
            out.push_str(agg.func.keyword());
            out.push_str(if agg.distinct { "(DISTINCT " } else { "(" });
            write_expr(out, inner, 0);
            out.push(')');
        }
        Expr::AggBy(agg, inner, group) => {
            out.push_str(agg.func.keyword());
            out.push_str(if agg.distinct { "(DISTINCT " } else { "(" });
            write_expr(out, inner, 0);
            out.push_str(" BY ");
            for (i, g) in group.exprs().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, g, 0);
            }
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

fn write_const(out: &mut String, c: &ConstValue) {
    out.push_str(&c.render());
}

pub fn pattern(p: &Pattern) -> String {
    let mut out = String::new();
    write_pattern(&mut out, p);
    out
}

fn is_infix(p: &Pattern) -> bool {
    matches!(p, Pattern::Join(..) | Pattern::Union(..))
}

fn write_operand(out: &mut String, p: &Pattern, parens: bool) {
    if parens {
        out.push('(');
        write_pattern(out, p);
        out.push(')');
    } else {
        write_pattern(out, p);
    }
}

fn write_pattern(out: &mut String, p: &Pattern) {
    match p {
        Pattern::Empty => out.push_str("EMPTY"),
        Pattern::Basic(l) => {
            out.push_str("BASIC ");
            out.push_str(&inline_graph(l));
        }
        Pattern::Join(a, b) | Pattern::Union(a, b) => {
            let same = |x: &Pattern| std::mem::discriminant(x) == std::mem::discriminant(p);
            // left-associative: a left operand of the same kind needs no parentheses
            write_operand(out, a, is_infix(a) && !same(a));
            let _ = write!(out, " {} ", p.keyword());
            write_operand(out, b, is_infix(b));
        }
        Pattern::Bind(inner, e, x) => {
            write_operand(out, inner, is_infix(inner));
            let _ = write!(out, " BIND {} AS {x}", expr(e));
        }
        Pattern::Filter(inner, e) => {
            write_operand(out, inner, is_infix(inner));
            let _ = write!(out, " FILTER {}", expr(e));
        }
        Pattern::Build(inner, r) => {
            write_operand(out, inner, is_infix(inner));
            let _ = write!(out, " BUILD {}", inline_graph(r));
        }
    }
}

pub fn query(q: &Query) -> String {
    let vars = |vs: &[Variable]| {
        vs.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    match q {
        Query::Construct { template, pattern: p } => {
            format!("CONSTRUCT {} WHERE {}", inline_graph(template), pattern(p))
        }
        Query::Select { vars: s, pattern: p } => {
            format!("SELECT {} WHERE {}", vars(s), pattern(p))
        }
        Query::Conselect {
            vars: s,
            template,
            pattern: p,
        } => format!(
            "CONSELECT {} {} WHERE {}",
            vars(s),
            inline_graph(template),
            pattern(p)
        ),
    }
}
