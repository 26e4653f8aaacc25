//! Recursive-descent parsers for graphs, expressions, patterns, queries and
//! printed tables.

use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;
use crate::expr::{AggFn, Aggregate, BinaryOp, Expr, Group, UnaryOp};
use crate::graph::{ConstValue, Graph, Label, Triple, Variable};
use crate::pattern::Pattern;
use crate::query::{Query, SolutionTable};

type PResult<T> = Result<T, SyntaxError>;

pub fn parse_graph(src: &str) -> PResult<Graph> {
    let mut p = Parser::new(src)?;
    let g = p.statements(&Tok::Eof)?;
    p.expect(&Tok::Eof)?;
    Ok(g)
}

pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

pub fn parse_pattern(src: &str) -> PResult<Pattern> {
    let mut p = Parser::new(src)?;
    let pat = p.pattern()?;
    p.expect(&Tok::Eof)?;
    Ok(pat)
}

pub fn parse_query(src: &str) -> PResult<Query> {
    let mut p = Parser::new(src)?;
    let q = p.query()?;
    p.expect(&Tok::Eof)?;
    Ok(q)
}

/// Reads back the grid produced by [`super::print::table`].
pub fn parse_table(src: &str) -> PResult<SolutionTable> {
    let mut columns: Option<Vec<Variable>> = None;
    let mut rows = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('+') {
            continue;
        }
        let mut p = Parser::new(line).map_err(|e| SyntaxError::new(i + 1, e.col, e.message))?;
        let cells = p
            .table_row(columns.is_none())
            .map_err(|e| SyntaxError::new(i + 1, e.col, e.message))?;
        match &columns {
            None => {
                let vars = cells
                    .into_iter()
                    .map(|l| match l {
                        Label::Var(v) => Ok(v),
                        other => Err(SyntaxError::new(
                            i + 1,
                            1,
                            format!("column header {other} is not a variable"),
                        )),
                    })
                    .collect::<PResult<Vec<_>>>()?;
                columns = Some(vars);
            }
            Some(cols) => {
                if cells.len() != cols.len() {
                    return Err(SyntaxError::new(
                        i + 1,
                        1,
                        format!("row has {} cells, expected {}", cells.len(), cols.len()),
                    ));
                }
                rows.push(cells);
            }
        }
    }
    let columns = columns.ok_or_else(|| SyntaxError::new(1, 1, "missing table header"))?;
    Ok(SolutionTable::new(columns, rows))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn token(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> SyntaxError {
        let t = self.token();
        SyntaxError::new(t.line, t.col, msg)
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        self.error_here(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Token> {
        if self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn var(&mut self) -> PResult<Variable> {
        match self.peek() {
            Tok::Var(v) => {
                let v = Variable::new(v);
                self.bump();
                Ok(v)
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    /// A `-` immediately followed by a number literal.
    fn at_negative_number(&self) -> bool {
        *self.peek() == Tok::Minus
            && matches!(self.peek_at(1), Tok::Int(_) | Tok::Float(_))
            && self.toks[self.pos].end == self.toks[self.pos + 1].start
    }

    fn number(&mut self, negative: bool) -> PResult<ConstValue> {
        let t = self.bump();
        let sign = if negative { "-" } else { "" };
        match &t.tok {
            Tok::Int(s) => format!("{sign}{s}")
                .parse::<i64>()
                .map(ConstValue::Int)
                .map_err(|_| SyntaxError::new(t.line, t.col, format!("integer {sign}{s} out of range"))),
            Tok::Float(s) => {
                let f: f64 = format!("{sign}{s}")
                    .parse()
                    .map_err(|_| SyntaxError::new(t.line, t.col, "malformed number"))?;
                if f.is_finite() {
                    Ok(ConstValue::Float(f))
                } else {
                    Err(SyntaxError::new(t.line, t.col, format!("number {sign}{s} is not finite")))
                }
            }
            _ => unreachable!(),
        }
    }

    fn label(&mut self) -> PResult<Label> {
        if self.at_negative_number() {
            self.bump();
            return self.number(true).map(Label::Const);
        }
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Label::var(&v))
            }
            Tok::Int(_) | Tok::Float(_) => self.number(false).map(Label::Const),
            Tok::Str(s) => {
                self.bump();
                Ok(Label::str(&s))
            }
            Tok::Word(w) => {
                self.bump();
                Ok(Label::Const(match w.as_str() {
                    "true" => ConstValue::Bool(true),
                    "false" => ConstValue::Bool(false),
                    _ => ConstValue::str(&w),
                }))
            }
            _ => Err(self.unexpected("a label")),
        }
    }

    /// Triple and `node` statements up to (not including) `end`.
    fn statements(&mut self, end: &Tok) -> PResult<Graph> {
        let mut g = Graph::empty();
        while self.peek() != end && *self.peek() != Tok::Eof {
            if self.at_word("node") {
                self.bump();
                let n = self.label()?;
                g.insert_node(n);
            } else {
                let s = self.label()?;
                let p = self.label()?;
                let o = self.label()?;
                g.insert_triple(Triple::new(s, p, o));
            }
            self.expect(&Tok::Dot)?;
        }
        Ok(g)
    }

    fn graph_block(&mut self) -> PResult<Graph> {
        self.expect(&Tok::LBrace)?;
        let g = self.statements(&Tok::RBrace)?;
        self.expect(&Tok::RBrace)?;
        Ok(g)
    }

    // Patterns

    fn pattern(&mut self) -> PResult<Pattern> {
        let mut left = self.postfix()?;
        let mut op: Option<&'static str> = None;
        loop {
            let this = if self.at_word("JOIN") {
                "JOIN"
            } else if self.at_word("UNION") {
                "UNION"
            } else {
                return Ok(left);
            };
            if op.is_some_and(|o| o != this) {
                return Err(self.error_here("JOIN and UNION cannot be mixed without parentheses"));
            }
            op = Some(this);
            self.bump();
            let right = self.postfix()?;
            left = if this == "JOIN" {
                left.join(right)
            } else {
                left.union(right)
            };
        }
    }

    fn postfix(&mut self) -> PResult<Pattern> {
        let mut p = self.primary()?;
        loop {
            if self.eat_word("BIND") {
                let e = self.expr()?;
                self.expect_word("AS")?;
                let x = self.var()?;
                p = p.bind(e, x);
            } else if self.eat_word("FILTER") {
                let e = self.expr()?;
                p = p.filter(e);
            } else if self.eat_word("BUILD") {
                let r = self.graph_block()?;
                p = p.build(r);
            } else {
                return Ok(p);
            }
        }
    }

    fn primary(&mut self) -> PResult<Pattern> {
        if self.eat_word("EMPTY") {
            Ok(Pattern::Empty)
        } else if self.eat_word("BASIC") {
            Ok(Pattern::Basic(self.graph_block()?))
        } else if *self.peek() == Tok::LParen {
            self.bump();
            let p = self.pattern()?;
            self.expect(&Tok::RParen)?;
            Ok(p)
        } else {
            Err(self.unexpected("`EMPTY`, `BASIC` or `(`"))
        }
    }

    // Queries

    fn query(&mut self) -> PResult<Query> {
        if self.eat_word("CONSTRUCT") {
            let template = self.graph_block()?;
            self.expect_word("WHERE")?;
            let pattern = self.pattern()?;
            Ok(Query::Construct { template, pattern })
        } else if self.eat_word("SELECT") {
            let vars = self.var_list()?;
            self.expect_word("WHERE")?;
            let pattern = self.pattern()?;
            Ok(Query::Select { vars, pattern })
        } else if self.eat_word("CONSELECT") {
            let vars = self.var_list()?;
            let template = self.graph_block()?;
            self.expect_word("WHERE")?;
            let pattern = self.pattern()?;
            Ok(Query::Conselect {
                vars,
                template,
                pattern,
            })
        } else {
            Err(self.unexpected("`CONSTRUCT`, `SELECT` or `CONSELECT`"))
        }
    }

    fn var_list(&mut self) -> PResult<Vec<Variable>> {
        let mut vars: Vec<Variable> = Vec::new();
        loop {
            let t = self.token().clone();
            let v = self.var()?;
            if vars.contains(&v) {
                return Err(SyntaxError::new(t.line, t.col, format!("{v} is listed twice")));
            }
            vars.push(v);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else if !matches!(self.peek(), Tok::Var(_)) {
                return Ok(vars);
            }
        }
    }

    // Expressions

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.and_expr()?;
        while self.eat_word("OR") {
            e = Expr::binary(e, BinaryOp::Or, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut e = self.cmp_expr()?;
        while self.eat_word("AND") {
            e = Expr::binary(e, BinaryOp::And, self.cmp_expr()?);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let mut e = self.add_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Eq => BinaryOp::Eq,
                Tok::Lt => BinaryOp::Lt,
                Tok::Gt => BinaryOp::Gt,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::binary(e, op, self.add_expr()?);
        }
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::binary(e, op, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut e = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::binary(e, op, self.unary_expr()?);
        }
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.at_negative_number() {
            self.bump();
            return self.number(true).map(Expr::Const);
        }
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary_expr()?)));
        }
        if self.eat_word("NOT") {
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary_expr()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let func = match self.peek() {
            Tok::Word(w) => match w.as_str() {
                "COUNT" => Some(AggFn::Count),
                "SUM" => Some(AggFn::Sum),
                "AVG" => Some(AggFn::Avg),
                "MIN" => Some(AggFn::Min),
                "MAX" => Some(AggFn::Max),
                _ => None,
            },
            _ => None,
        };
        if let Some(func) = func {
            self.bump();
            return self.aggregate(func);
        }
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Var(_) => Ok(Expr::Var(self.var()?)),
            Tok::Word(w) if super::lexer::KEYWORDS.contains(&w.as_str()) && w != "true" && w != "false" => {
                Err(self.unexpected("an expression"))
            }
            Tok::Word(_) | Tok::Str(_) | Tok::Int(_) | Tok::Float(_) => match self.label()? {
                Label::Const(c) => Ok(Expr::Const(c)),
                Label::Var(v) => Ok(Expr::Var(v)),
            },
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn aggregate(&mut self, func: AggFn) -> PResult<Expr> {
        self.expect(&Tok::LParen)?;
        let agg = Aggregate {
            func,
            distinct: self.eat_word("DISTINCT"),
        };
        let inner = self.expr()?;
        let e = if self.eat_word("BY") {
            let mut group = vec![self.expr()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                group.push(self.expr()?);
            }
            Expr::AggBy(agg, Box::new(inner), Group::new(group).unwrap())
        } else {
            Expr::Agg(agg, Box::new(inner))
        };
        self.expect(&Tok::RParen)?;
        Ok(e)
    }

    // Tables

    fn table_row(&mut self, header: bool) -> PResult<Vec<Label>> {
        self.expect(&Tok::Pipe)?;
        let mut cells = Vec::new();
        while *self.peek() != Tok::Eof {
            cells.push(if header {
                Label::Var(self.var()?)
            } else {
                self.label()?
            });
            self.expect(&Tok::Pipe)?;
        }
        Ok(cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_file() {
        let g = parse_graph(include_str!("../../fixtures/gex.triples")).unwrap();
        assert_eq!(g.triples().len(), 10);
        let g = parse_graph("a p -3 . b q \"x y\" .\nnode ?n . c r true .").unwrap();
        assert!(g.nodes().contains(&Label::int(-3)));
        assert!(g.isolated_nodes().contains(&Label::var("n")));
        let err = parse_graph("a p b .\nc q").unwrap_err();
        assert_eq!((err.line, err.col), (2, 4));
    }

    #[test]
    fn expressions() {
        let e = parse_expr("?x + 2 * ?y > 3 AND NOT ?b").unwrap();
        assert_eq!(e.to_string(), "?x + 2 * ?y > 3 AND NOT ?b");
        assert_eq!(parse_expr("?x -3").unwrap(), parse_expr("?x - 3").unwrap());
        assert_eq!(parse_expr("-3").unwrap(), Expr::int(-3));
        assert!(matches!(parse_expr("- 3").unwrap(), Expr::Unary(UnaryOp::Neg, _)));
        let c = parse_expr("COUNT(DISTINCT ?s BY ?p, ?q)").unwrap();
        assert!(matches!(c, Expr::AggBy(Aggregate { distinct: true, .. }, _, _)));
        assert!(parse_expr("COUNT(?s BY)").is_err());
        assert_eq!(
            parse_expr("-9223372036854775808").unwrap(),
            Expr::int(i64::MIN)
        );
    }

    #[test]
    fn patterns() {
        let p = parse_pattern("BASIC { ?a p ?b . } JOIN BASIC { ?b q ?c . } JOIN EMPTY").unwrap();
        assert!(matches!(&p, Pattern::Join(l, r) if matches!(**l, Pattern::Join(..)) && **r == Pattern::Empty));
        assert!(parse_pattern("EMPTY JOIN EMPTY UNION EMPTY").is_err());
        assert!(parse_pattern("(EMPTY JOIN EMPTY) UNION EMPTY").is_ok());
        let p = parse_pattern("BASIC { ?a p ?b . } FILTER ?a = ?b BIND 1 AS ?c BUILD { ?c r ?a . }").unwrap();
        assert!(matches!(p, Pattern::Build(..)));
    }

    #[test]
    fn queries() {
        let q = parse_query(include_str!("../../fixtures/select.gql")).unwrap();
        assert!(matches!(q, Query::Select { ref vars, .. } if vars.len() == 2));
        assert!(parse_query("SELECT ?a, ?b WHERE EMPTY").is_ok());
        assert!(parse_query("SELECT WHERE EMPTY").is_err());
        assert!(parse_query("SELECT ?a ?a WHERE EMPTY").is_err());
        let q = parse_query(include_str!("../../fixtures/conselect.gql")).unwrap();
        assert!(matches!(q, Query::Conselect { .. }));
    }
}
