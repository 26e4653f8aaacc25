//! Generalized RDF graphs: labels, triples and graphs with isolated nodes.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::syntax::lexer::{escape_string, is_bare_word};

/// A constant value. Floats are kept finite by every operation of this crate.
#[derive(Clone, Debug)]
pub enum ConstValue {
    Int(i64),
    Float(f64),
    Str(Arc<str>),
    Bool(bool),
}

impl ConstValue {
    pub fn str(s: &str) -> Self {
        ConstValue::Str(Arc::from(s))
    }

    /// Canonical printed form, also used as the ordering key.
    pub fn render(&self) -> Cow<'_, str> {
        match self {
            ConstValue::Int(i) => Cow::Owned(i.to_string()),
            ConstValue::Float(f) => Cow::Owned(format!("{f:?}")),
            ConstValue::Bool(true) => Cow::Borrowed("true"),
            ConstValue::Bool(false) => Cow::Borrowed("false"),
            ConstValue::Str(s) if is_bare_word(s) => Cow::Borrowed(s),
            ConstValue::Str(s) => Cow::Owned(escape_string(s)),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            ConstValue::Int(_) => "int",
            ConstValue::Float(_) => "float",
            ConstValue::Str(_) => "string",
            ConstValue::Bool(_) => "bool",
        }
    }
}

// Int and Float never compare equal, even when numerically equal.
impl PartialEq for ConstValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ConstValue::Int(a), ConstValue::Int(b)) => a == b,
            (ConstValue::Float(a), ConstValue::Float(b)) => {
                a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
            }
            (ConstValue::Str(a), ConstValue::Str(b)) => a == b,
            (ConstValue::Bool(a), ConstValue::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for ConstValue {}

impl Hash for ConstValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            ConstValue::Int(i) => i.hash(state),
            ConstValue::Float(f) if f.is_nan() => f64::NAN.to_bits().hash(state),
            ConstValue::Float(f) => f.to_bits().hash(state),
            ConstValue::Str(s) => s.hash(state),
            ConstValue::Bool(b) => b.hash(state),
        }
    }
}

impl Ord for ConstValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (ConstValue::Str(a), ConstValue::Str(b)) = (self, other) {
            if a == b {
                return Ordering::Equal;
            }
        }
        self.render().cmp(&other.render())
    }
}

impl PartialOrd for ConstValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A variable name, printed with a leading `?`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    /// Panics on an empty name.
    pub fn new(name: &str) -> Self {
        assert!(!name.is_empty(), "variable names are nonempty");
        Variable(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// A label is either a constant or a variable. Constants sort before variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Const(ConstValue),
    Var(Variable),
}

impl Label {
    pub fn var(name: &str) -> Self {
        Label::Var(Variable::new(name))
    }

    pub fn str(s: &str) -> Self {
        Label::Const(ConstValue::str(s))
    }

    pub fn int(i: i64) -> Self {
        Label::Const(ConstValue::Int(i))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Label::Var(v) => Some(v),
            Label::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&ConstValue> {
        match self {
            Label::Const(c) => Some(c),
            Label::Var(_) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Label::Var(_))
    }
}

impl From<Variable> for Label {
    fn from(v: Variable) -> Self {
        Label::Var(v)
    }
}

impl From<ConstValue> for Label {
    fn from(c: ConstValue) -> Self {
        Label::Const(c)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Const(c) => c.fmt(f),
            Label::Var(v) => v.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Label,
    pub predicate: Label,
    pub object: Label,
}

impl Triple {
    pub fn new(subject: Label, predicate: Label, object: Label) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }

    pub fn labels(&self) -> [&Label; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn map(&self, mut f: impl FnMut(&Label) -> Label) -> Triple {
        Triple::new(f(&self.subject), f(&self.predicate), f(&self.object))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.predicate, self.object)
    }
}

/// A graph: a node set and a triple set whose subjects and objects are nodes.
///
/// Every constructor inserts the subject and object of each triple into the
/// node set, so the invariant holds for all values of this type.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    nodes: BTreeSet<Label>,
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn empty() -> Self {
        Graph::default()
    }

    pub fn new(
        triples: impl IntoIterator<Item = Triple>,
        nodes: impl IntoIterator<Item = Label>,
    ) -> Self {
        let mut g = Graph::empty();
        for t in triples {
            g.insert_triple(t);
        }
        for n in nodes {
            g.insert_node(n);
        }
        g
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        Graph::new(triples, std::iter::empty())
    }

    pub fn insert_triple(&mut self, t: Triple) {
        self.nodes.insert(t.subject.clone());
        self.nodes.insert(t.object.clone());
        self.triples.insert(t);
    }

    pub fn insert_node(&mut self, n: Label) {
        self.nodes.insert(n);
    }

    pub fn nodes(&self) -> &BTreeSet<Label> {
        &self.nodes
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.triples.is_empty()
    }

    pub fn union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        g.extend(other);
        g
    }

    pub fn extend(&mut self, other: &Graph) {
        self.nodes.extend(other.nodes.iter().cloned());
        self.triples.extend(other.triples.iter().cloned());
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.nodes.is_subset(&other.nodes) && self.triples.is_subset(&other.triples)
    }

    pub fn isolated_nodes(&self) -> BTreeSet<Label> {
        let mut isolated = self.nodes.clone();
        for t in &self.triples {
            isolated.remove(&t.subject);
            isolated.remove(&t.object);
        }
        isolated
    }

    /// Nodes and predicates.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut labels = self.nodes.clone();
        labels.extend(self.triples.iter().map(|t| t.predicate.clone()));
        labels
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.labels()
            .into_iter()
            .filter_map(|l| match l {
                Label::Var(v) => Some(v),
                Label::Const(_) => None,
            })
            .collect()
    }

    pub fn consts(&self) -> BTreeSet<ConstValue> {
        self.labels()
            .into_iter()
            .filter_map(|l| match l {
                Label::Const(c) => Some(c),
                Label::Var(_) => None,
            })
            .collect()
    }

    pub fn map_labels(&self, mut f: impl FnMut(&Label) -> Label) -> Graph {
        let mut g = Graph::empty();
        for t in &self.triples {
            g.insert_triple(t.map(&mut f));
        }
        for n in &self.nodes {
            g.insert_node(f(n));
        }
        g
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::graph_block(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        let lab = |x: &str| match x.strip_prefix('?') {
            Some(v) => Label::var(v),
            None => Label::str(x),
        };
        Triple::new(lab(s), lab(p), lab(o))
    }

    #[test]
    fn construction_inserts_subjects_and_objects() {
        let g = Graph::from_triples([t("s", "p", "o")]);
        assert!(g.nodes().contains(&Label::str("s")));
        assert!(g.nodes().contains(&Label::str("o")));
        assert!(!g.nodes().contains(&Label::str("p")));
        assert!(g.labels().contains(&Label::str("p")));
    }

    #[test]
    fn isolated_nodes_notation_example() {
        let g = Graph::new(
            [t("s1", "o1", "p1")],
            [Label::str("n1"), Label::str("n2")],
        );
        assert_eq!(g.nodes().len(), 4);
        let iso: Vec<_> = g.isolated_nodes().into_iter().collect();
        assert_eq!(iso, vec![Label::str("n1"), Label::str("n2")]);
        assert!(Graph::empty().isolated_nodes().is_empty());
    }

    #[test]
    fn subgraph_and_union() {
        let a = Graph::from_triples([t("a", "p", "b")]);
        let b = Graph::from_triples([t("b", "p", "c")]);
        let u = a.union(&b);
        assert!(a.is_subgraph_of(&u) && b.is_subgraph_of(&u));
        assert!(Graph::empty().is_subgraph_of(&a));
        assert_eq!(Graph::empty().union(&a), a);
        assert_eq!(a.union(&a), a);
        let with_n = Graph::new([], [Label::str("n")]);
        assert!(!with_n.is_subgraph_of(&a));
    }

    #[test]
    fn vars_and_consts_partition_labels() {
        let l = Graph::from_triples([t("?p", "teaches", "?t"), t("?s", "studies", "?t")]);
        let vars: Vec<_> = l.vars().into_iter().map(|v| v.name().to_string()).collect();
        assert_eq!(vars, vec!["p", "s", "t"]);
        assert_eq!(l.consts().len(), 2);
        assert!(Graph::empty().vars().is_empty() && Graph::empty().consts().is_empty());
    }

    #[test]
    fn int_and_float_are_distinct_labels() {
        assert_ne!(ConstValue::Int(3), ConstValue::Float(3.0));
        assert_ne!(
            ConstValue::Int(3).cmp(&ConstValue::Float(3.0)),
            Ordering::Equal
        );
        assert!(Label::str("zzz") < Label::var("a"));
    }
}
