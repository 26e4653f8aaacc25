//! First-order terms of the rewriting calculus, positions and sorts.

use std::fmt;
use std::sync::Arc;

use crate::expr::Expr;
use crate::graph::{Graph, Variable};
use crate::matching::MatchSet;
use crate::pattern::Pattern;
use crate::query::{Query, QueryResult};
use crate::syntax::print;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    // defined functions
    Solve,
    SolveJL,
    SolveJR,
    SolveBI,
    SolveFR,
    SolveBU,
    SolveUL,
    SolveUR,
    SolveQ,
    DisplayC,
    DisplayS,
    DisplayCS,
    Config,
    // pattern constructors
    Empty,
    Basic,
    Join,
    Bind,
    Filter,
    Build,
    Union,
    // query constructors
    Construct,
    Select,
    Conselect,
    // built-in operations, evaluated by ↓gq
    OpMatch,
    OpJoin,
    OpBind,
    OpFilter,
    OpBuild,
    OpUnion,
    Target,
    EmptySet,
    Inclusion,
    GraphOfVars,
    GraphUnion,
    PrintC,
    PrintS,
    PrintCS,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Pat,
    Som,
    Gr,
    Exp,
    Var,
    Vars,
    Query,
    Conf,
    Result,
}

impl Sym {
    pub fn name(self) -> &'static str {
        use Sym::*;
        match self {
            Solve => "Solve",
            SolveJL => "Solve_JL",
            SolveJR => "Solve_JR",
            SolveBI => "Solve_BI",
            SolveFR => "Solve_FR",
            SolveBU => "Solve_BU",
            SolveUL => "Solve_UL",
            SolveUR => "Solve_UR",
            SolveQ => "Solve_Q",
            DisplayC => "Display_C",
            DisplayS => "Display_S",
            DisplayCS => "Display_CS",
            Config => "Config",
            Empty => "EMPTY",
            Basic => "BASIC",
            Join => "JOIN",
            Bind => "BIND",
            Filter => "FILTER",
            Build => "BUILD",
            Union => "UNION",
            Construct => "CONSTRUCT",
            Select => "SELECT",
            Conselect => "CONSELECT",
            OpMatch => "Match",
            OpJoin => "Join",
            OpBind => "Bind",
            OpFilter => "Filter",
            OpBuild => "Build",
            OpUnion => "Union",
            Target => "Target",
            EmptySet => "EmptySet",
            Inclusion => "Inclusion",
            GraphOfVars => "GraphOfVars",
            GraphUnion => "GraphUnion",
            PrintC => "Print_C",
            PrintS => "Print_S",
            PrintCS => "Print_CS",
        }
    }

    /// Argument sorts and result sort.
    pub fn signature(self) -> (&'static [Sort], Sort) {
        use Sort::*;
        match self {
            Sym::Solve => (&[Conf], Conf),
            Sym::SolveJL | Sym::SolveUL => (&[Conf, Pat], Conf),
            Sym::SolveJR | Sym::SolveUR => (&[Som, Conf], Conf),
            Sym::SolveBI => (&[Conf, Exp, Var], Conf),
            Sym::SolveFR => (&[Conf, Exp], Conf),
            Sym::SolveBU => (&[Conf, Gr], Conf),
            Sym::SolveQ => (&[Query, Gr], Result),
            Sym::DisplayC => (&[Gr, Conf], Result),
            Sym::DisplayS => (&[Vars, Conf], Result),
            Sym::DisplayCS => (&[Vars, Gr, Conf], Result),
            Sym::Config => (&[Pat, Som], Conf),
            Sym::Empty => (&[], Pat),
            Sym::Basic => (&[Gr], Pat),
            Sym::Join | Sym::Union => (&[Pat, Pat], Pat),
            Sym::Bind => (&[Pat, Exp, Var], Pat),
            Sym::Filter => (&[Pat, Exp], Pat),
            Sym::Build => (&[Pat, Gr], Pat),
            Sym::Construct => (&[Gr, Pat], Query),
            Sym::Select => (&[Vars, Pat], Query),
            Sym::Conselect => (&[Vars, Gr, Pat], Query),
            Sym::OpMatch => (&[Gr, Gr], Som),
            Sym::OpJoin | Sym::OpUnion => (&[Som, Som], Som),
            Sym::OpBind => (&[Som, Exp, Var], Som),
            Sym::OpFilter => (&[Som, Exp], Som),
            Sym::OpBuild => (&[Som, Gr], Som),
            Sym::Target => (&[Som], Gr),
            Sym::EmptySet | Sym::Inclusion => (&[Gr], Som),
            Sym::GraphOfVars => (&[Vars], Gr),
            Sym::GraphUnion => (&[Gr, Gr], Gr),
            Sym::PrintC => (&[Gr, Som], Result),
            Sym::PrintS => (&[Vars, Som], Result),
            Sym::PrintCS => (&[Vars, Gr, Som], Result),
        }
    }

    pub fn is_builtin(self) -> bool {
        self >= Sym::OpMatch
    }

    pub fn is_display(self) -> bool {
        matches!(self, Sym::DisplayC | Sym::DisplayS | Sym::DisplayCS)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Graph(Arc<Graph>),
    Matches(Arc<MatchSet>),
    Expr(Arc<Expr>),
    Var(Variable),
    Vars(Arc<[Variable]>),
    Result(Arc<QueryResult>),
}

impl Literal {
    pub fn sort(&self) -> Sort {
        match self {
            Literal::Graph(_) => Sort::Gr,
            Literal::Matches(_) => Sort::Som,
            Literal::Expr(_) => Sort::Exp,
            Literal::Var(_) => Sort::Var,
            Literal::Vars(_) => Sort::Vars,
            Literal::Result(_) => Sort::Result,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    App(Sym, Vec<Term>),
    Lit(Literal),
}

impl Term {
    pub fn app(sym: Sym, args: Vec<Term>) -> Term {
        Term::App(sym, args)
    }

    pub fn graph(g: Graph) -> Term {
        Term::Lit(Literal::Graph(Arc::new(g)))
    }

    pub fn matches(ms: MatchSet) -> Term {
        Term::Lit(Literal::Matches(Arc::new(ms)))
    }

    pub fn head(&self) -> Option<Sym> {
        match self {
            Term::App(s, _) => Some(*s),
            Term::Lit(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Lit(_) => &[],
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::App(s, _) => s.signature().1,
            Term::Lit(l) => l.sort(),
        }
    }

    /// Checks arities and argument sorts everywhere.
    pub fn check_sorts(&self) -> Result<Sort, String> {
        match self {
            Term::Lit(l) => Ok(l.sort()),
            Term::App(s, args) => {
                let (params, result) = s.signature();
                if params.len() != args.len() {
                    return Err(format!(
                        "{} expects {} arguments, got {}",
                        s.name(),
                        params.len(),
                        args.len()
                    ));
                }
                for (i, (want, a)) in params.iter().zip(args).enumerate() {
                    let got = a.check_sorts()?;
                    if got != *want {
                        return Err(format!(
                            "argument {} of {} has sort {got:?}, expected {want:?}",
                            i + 1,
                            s.name()
                        ));
                    }
                }
                Ok(result)
            }
        }
    }

    /// Height; a constant or literal has height 1.
    pub fn height(&self) -> usize {
        1 + self.args().iter().map(Term::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn at(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// `t[s]_pos`.
    pub fn replace(&mut self, pos: &Position, s: Term) {
        let mut t = self;
        for &i in &pos.0 {
            match t {
                Term::App(_, args) => t = &mut args[i - 1],
                Term::Lit(_) => panic!("position {pos} does not exist"),
            }
        }
        *t = s;
    }

    /// Every position, children before parents, left to right.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_positions(self, &mut path, &mut out);
        out
    }

    pub fn render(&self, verbosity: Verbosity) -> String {
        let mut out = String::new();
        render(self, verbosity, &mut out);
        out
    }
}

fn collect_positions(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    for (i, a) in t.args().iter().enumerate() {
        path.push(i + 1);
        collect_positions(a, path, out);
        path.pop();
    }
    out.push(Position(path.clone()));
}

/// A path of 1-based argument indices; the empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("Λ");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

pub fn pattern_term(p: &Pattern) -> Term {
    let lit = |l: Literal| Term::Lit(l);
    match p {
        Pattern::Empty => Term::app(Sym::Empty, vec![]),
        Pattern::Basic(l) => Term::app(Sym::Basic, vec![Term::graph(l.clone())]),
        Pattern::Join(a, b) => Term::app(Sym::Join, vec![pattern_term(a), pattern_term(b)]),
        Pattern::Union(a, b) => Term::app(Sym::Union, vec![pattern_term(a), pattern_term(b)]),
        Pattern::Bind(a, e, x) => Term::app(
            Sym::Bind,
            vec![
                pattern_term(a),
                lit(Literal::Expr(Arc::new(e.clone()))),
                lit(Literal::Var(x.clone())),
            ],
        ),
        Pattern::Filter(a, e) => Term::app(
            Sym::Filter,
            vec![pattern_term(a), lit(Literal::Expr(Arc::new(e.clone())))],
        ),
        Pattern::Build(a, r) => {
            Term::app(Sym::Build, vec![pattern_term(a), Term::graph(r.clone())])
        }
    }
}

/// Inverse of [`pattern_term`] on built-in-free pattern terms.
pub fn term_pattern(t: &Term) -> Option<Pattern> {
    let Term::App(sym, args) = t else {
        return None;
    };
    let graph = |t: &Term| match t {
        Term::Lit(Literal::Graph(g)) => Some((**g).clone()),
        _ => None,
    };
    let expr = |t: &Term| match t {
        Term::Lit(Literal::Expr(e)) => Some((**e).clone()),
        _ => None,
    };
    Some(match (sym, args.as_slice()) {
        (Sym::Empty, []) => Pattern::Empty,
        (Sym::Basic, [l]) => Pattern::Basic(graph(l)?),
        (Sym::Join, [a, b]) => term_pattern(a)?.join(term_pattern(b)?),
        (Sym::Union, [a, b]) => term_pattern(a)?.union(term_pattern(b)?),
        (Sym::Bind, [a, e, Term::Lit(Literal::Var(x))]) => {
            term_pattern(a)?.bind(expr(e)?, x.clone())
        }
        (Sym::Filter, [a, e]) => term_pattern(a)?.filter(expr(e)?),
        (Sym::Build, [a, r]) => term_pattern(a)?.build(graph(r)?),
        _ => return None,
    })
}

pub fn query_term(q: &Query) -> Term {
    let vars = |s: &[Variable]| Term::Lit(Literal::Vars(s.into()));
    match q {
        Query::Construct { template, pattern } => Term::app(
            Sym::Construct,
            vec![Term::graph(template.clone()), pattern_term(pattern)],
        ),
        Query::Select { vars: s, pattern } => {
            Term::app(Sym::Select, vec![vars(s), pattern_term(pattern)])
        }
        Query::Conselect {
            vars: s,
            template,
            pattern,
        } => Term::app(
            Sym::Conselect,
            vec![vars(s), Term::graph(template.clone()), pattern_term(pattern)],
        ),
    }
}

/// How much of the match sets and graphs a rendered term shows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Verbosity {
    /// Match sets as counts, large graphs as sizes.
    #[default]
    Summary,
    Full,
}

const INLINE_GRAPH_LIMIT: usize = 4;

fn render(t: &Term, v: Verbosity, out: &mut String) {
    match t {
        Term::Lit(l) => render_literal(l, v, out),
        Term::App(Sym::Config, args) if args.len() == 2 => {
            out.push('⟨');
            render(&args[0], v, out);
            out.push_str(" | ");
            render(&args[1], v, out);
            out.push('⟩');
        }
        Term::App(s, _) if s.signature().1 == Sort::Pat => match term_pattern(t) {
            Some(Pattern::Empty) => out.push('□'),
            Some(p) => out.push_str(&print::pattern(&p)),
            None => render_app(t, v, out),
        },
        Term::App(..) => render_app(t, v, out),
    }
}

fn render_app(t: &Term, v: Verbosity, out: &mut String) {
    let Term::App(s, args) = t else { unreachable!() };
    out.push_str(s.name());
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        render(a, v, out);
    }
    out.push(')');
}

fn render_graph(g: &Graph, v: Verbosity, out: &mut String) {
    let items = g.triples().len() + g.isolated_nodes().len();
    if v == Verbosity::Summary && items > INLINE_GRAPH_LIMIT {
        out.push_str(&format!("{{{} triples}}", g.triples().len()));
    } else {
        out.push_str(&print::inline_graph(g));
    }
}

fn render_literal(l: &Literal, v: Verbosity, out: &mut String) {
    match l {
        Literal::Graph(g) => render_graph(g, v, out),
        Literal::Matches(ms) => match v {
            Verbosity::Summary => {
                let n = ms.len();
                out.push_str(&format!(
                    "{{{n} {}}}",
                    if n == 1 { "match" } else { "matches" }
                ));
            }
            Verbosity::Full => {
                out.push('{');
                for (i, a) in ms.assignments().iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push('(');
                    let cells: Vec<String> =
                        a.iter().map(|(x, l)| format!("{x} ↦ {l}")).collect();
                    out.push_str(&cells.join(", "));
                    out.push(')');
                }
                out.push_str("} : ");
                render_graph(ms.source(), v, out);
                out.push_str(" ⇒ ");
                render_graph(ms.target(), v, out);
            }
        },
        Literal::Expr(e) => out.push_str(&print::expr(e)),
        Literal::Var(x) => out.push_str(&x.to_string()),
        Literal::Vars(s) => {
            let names: Vec<String> = s.iter().map(ToString::to_string).collect();
            out.push_str(&format!("[{}]", names.join(" ")));
        }
        Literal::Result(r) => match v {
            Verbosity::Summary => out.push_str(match &**r {
                QueryResult::Graph(_) => "Result_C",
                QueryResult::Table(_) => "Result_S",
                QueryResult::Pair(..) => "Result_CS",
            }),
            Verbosity::Full => out.push_str(&r.to_string().replace('\n', " ")),
        },
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Verbosity::Summary))
    }
}
