//! Matches (constant-fixing graph homomorphisms), homogeneous sets of matches
//! and assignment tables.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Graph, Label, Triple, Variable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("matches disagree on shared variable {0}")]
    IncompatibleMatches(Variable),
    #[error("source mismatch: {0}")]
    SourceMismatch(String),
    #[error("not a match: {0}")]
    InvalidMatch(String),
}

/// The restriction of a match to the variables of its source.
///
/// Constants are mapped to themselves, so a match is fully determined by its
/// source, its target and this assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(BTreeMap<Variable, Label>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn get(&self, x: &Variable) -> Option<&Label> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Variable, l: Label) {
        self.0.insert(x, l);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Label)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &Variable) -> bool {
        self.0.contains_key(x)
    }

    /// Applies the assignment to a label, leaving constants and unassigned
    /// variables unchanged.
    pub fn apply(&self, l: &Label) -> Label {
        match l {
            Label::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| l.clone()),
            Label::Const(_) => l.clone(),
        }
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Variable>) -> Assignment {
        Assignment(
            vars.into_iter()
                .filter_map(|v| self.0.get(v).map(|l| (v.clone(), l.clone())))
                .collect(),
        )
    }

    /// The first shared variable on which the two assignments disagree.
    pub fn conflict<'a>(&'a self, other: &'a Assignment) -> Option<&'a Variable> {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .find(|(k, v)| large.0.get(*k).is_some_and(|w| w != *v))
            .map(|(k, _)| k)
    }

    pub fn compatible(&self, other: &Assignment) -> bool {
        self.conflict(other).is_none()
    }

    pub fn merge(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (k, v) in &other.0 {
            out.0.entry(k.clone()).or_insert_with(|| v.clone());
        }
        out
    }
}

impl FromIterator<(Variable, Label)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Variable, Label)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// A match `source -> target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    source: Arc<Graph>,
    target: Arc<Graph>,
    assignment: Assignment,
}

impl Match {
    /// Checks that the assignment covers exactly the source variables and
    /// preserves nodes and triples.
    pub fn new(
        source: Arc<Graph>,
        target: Arc<Graph>,
        assignment: Assignment,
    ) -> Result<Match, MatchError> {
        let m = Match {
            source,
            target,
            assignment,
        };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<(), MatchError> {
        let vars = self.source.vars();
        if vars.len() != self.assignment.len() || vars.iter().any(|v| !self.assignment.contains(v))
        {
            return Err(MatchError::InvalidMatch(
                "assignment domain differs from the source variables".into(),
            ));
        }
        for n in self.source.nodes() {
            let img = self.apply(n);
            if !self.target.nodes().contains(&img) {
                return Err(MatchError::InvalidMatch(format!(
                    "node {n} maps to {img}, which is not a target node"
                )));
            }
        }
        for t in self.source.triples() {
            let img = t.map(|l| self.apply(l));
            if !self.target.triples().contains(&img) {
                return Err(MatchError::InvalidMatch(format!(
                    "triple {t} maps to {img}, which is not a target triple"
                )));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<Graph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.target
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn apply(&self, l: &Label) -> Label {
        self.assignment.apply(l)
    }

    /// Pointwise image `m(sub)`.
    pub fn image(&self, sub: &Graph) -> Graph {
        sub.map_labels(|l| self.apply(l))
    }
}

/// Agreement on the shared source variables.
pub fn compatible(m1: &Match, m2: &Match) -> bool {
    m1.assignment.compatible(&m2.assignment)
}

/// `m1 ⋈ m2 : L1 ∪ L2 -> G1 ∪ G2`.
pub fn join_match(m1: &Match, m2: &Match) -> Result<Match, MatchError> {
    if let Some(x) = m1.assignment.conflict(&m2.assignment) {
        return Err(MatchError::IncompatibleMatches(x.clone()));
    }
    Ok(Match {
        source: Arc::new(m1.source.union(&m2.source)),
        target: Arc::new(m1.target.union(&m2.target)),
        assignment: m1.assignment.merge(&m2.assignment),
    })
}

/// `Build(m, R)` together with the image `H` of `R`.
///
/// Variables of `R` shared with the source of `m` follow `m`; every other
/// variable of `R` receives a fresh variable from `gen`, in variable order.
pub fn build_match(m: &Match, r: &Graph, gen: &mut FreshVarGen) -> (Match, Graph) {
    let assignment = build_assignment(&m.assignment, r, gen);
    let image = r.map_labels(|l| assignment.apply(l));
    let target = Arc::new(m.target.union(&image));
    let built = Match {
        source: Arc::new(r.clone()),
        target,
        assignment,
    };
    (built, image)
}

pub(crate) fn build_assignment(a: &Assignment, r: &Graph, gen: &mut FreshVarGen) -> Assignment {
    r.vars()
        .into_iter()
        .map(|x| {
            let l = match a.get(&x) {
                Some(l) => l.clone(),
                None => Label::Var(gen.fresh()),
            };
            (x, l)
        })
        .collect()
}

/// A homogeneous set of matches `source => target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchSet {
    source: Arc<Graph>,
    target: Arc<Graph>,
    members: BTreeSet<Assignment>,
}

impl MatchSet {
    /// Builds a set without checking the members; use [`MatchSet::validate`]
    /// to check them.
    pub fn from_parts(
        source: Arc<Graph>,
        target: Arc<Graph>,
        members: impl IntoIterator<Item = Assignment>,
    ) -> Self {
        MatchSet {
            source,
            target,
            members: members.into_iter().collect(),
        }
    }

    /// `i_G`: the single inclusion of the empty graph into `g`.
    pub fn inclusion(g: Arc<Graph>) -> Self {
        MatchSet::from_parts(Arc::new(Graph::empty()), g, [Assignment::new()])
    }

    /// `∅_G`: the empty subset of `i_G`.
    pub fn empty_on(g: Arc<Graph>) -> Self {
        MatchSet::from_parts(Arc::new(Graph::empty()), g, [])
    }

    pub fn source(&self) -> &Arc<Graph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn assignments(&self) -> &BTreeSet<Assignment> {
        &self.members
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.members.contains(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = Match> + '_ {
        self.members.iter().map(|a| Match {
            source: self.source.clone(),
            target: self.target.clone(),
            assignment: a.clone(),
        })
    }

    /// Same members viewed into a larger target.
    pub fn with_target(&self, target: Arc<Graph>) -> MatchSet {
        debug_assert!(self.target.is_subgraph_of(&target));
        MatchSet {
            source: self.source.clone(),
            target,
            members: self.members.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), MatchError> {
        for m in self.iter() {
            m.check()?;
        }
        Ok(())
    }

    /// `m(sub)`, the union of the pointwise images of a subgraph of the source.
    pub fn image(&self, sub: &Graph) -> Result<Graph, MatchError> {
        if !sub.is_subgraph_of(&self.source) {
            return Err(MatchError::SourceMismatch(
                "graph is not a subgraph of the source".into(),
            ));
        }
        let mut out = Graph::empty();
        for a in &self.members {
            out.extend(&sub.map_labels(|l| a.apply(l)));
        }
        Ok(out)
    }

    pub fn tab(&self) -> AssignmentTable {
        let columns: Vec<Variable> = self.source.vars().into_iter().collect();
        let rows = self
            .members
            .iter()
            .map(|a| columns.iter().map(|c| a.apply(&Label::Var(c.clone()))).collect())
            .collect();
        AssignmentTable { columns, rows }
    }
}

/// One column per source variable, one row per match, rows in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentTable {
    pub columns: Vec<Variable>,
    pub rows: Vec<Vec<Label>>,
}

impl fmt::Display for AssignmentTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::grid(&self.columns, &self.rows))
    }
}

/// Source of fresh variables `?_f<N>` for one evaluation.
#[derive(Clone, Debug, Default)]
pub struct FreshVarGen {
    counter: u64,
    reserved: HashSet<Variable>,
}

impl FreshVarGen {
    pub fn new() -> Self {
        FreshVarGen::default()
    }

    pub fn reserve(&mut self, vars: impl IntoIterator<Item = Variable>) {
        self.reserved.extend(vars);
    }

    pub fn reserve_graph(&mut self, g: &Graph) {
        self.reserve(g.vars());
    }

    /// Number of names handed out or skipped so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn fresh(&mut self) -> Variable {
        loop {
            self.counter += 1;
            let v = Variable::new(&format!("_f{}", self.counter));
            if !self.reserved.contains(&v) {
                self.reserved.insert(v.clone());
                return v;
            }
        }
    }
}

/// `Match(L, G)`: every match from `l` to `g`.
///
/// Backtracking over the source triples, most constrained first, scanning the
/// target triples in canonical order; isolated source variables range over
/// the target nodes last.
pub fn enumerate_matches(l: &Graph, g: &Graph) -> MatchSet {
    let source = Arc::new(l.clone());
    let target = Arc::new(g.clone());
    enumerate_shared(source, target)
}

pub(crate) fn enumerate_shared(source: Arc<Graph>, target: Arc<Graph>) -> MatchSet {
    let mut found = BTreeSet::new();
    let l = &*source;
    let g = &*target;

    let constant_nodes_present = l
        .nodes()
        .iter()
        .filter(|n| !n.is_var())
        .all(|n| g.nodes().contains(n));
    if constant_nodes_present {
        let order = triple_order(l);
        let tail_nodes: Vec<&Label> = {
            let in_triples: BTreeSet<&Label> =
                l.triples().iter().flat_map(|t| t.labels()).collect();
            l.nodes()
                .iter()
                .filter(|n| n.is_var() && !in_triples.contains(n))
                .collect()
        };
        let needs_node_check: Vec<&Label> = {
            // Variables used as predicates and also listed as isolated nodes.
            let so: BTreeSet<&Label> = l
                .triples()
                .iter()
                .flat_map(|t| [&t.subject, &t.object])
                .collect();
            l.nodes()
                .iter()
                .filter(|n| n.is_var() && !so.contains(n))
                .collect()
        };
        let mut search = Search {
            g,
            order: &order,
            tail_nodes: &tail_nodes,
            needs_node_check: &needs_node_check,
            found: &mut found,
        };
        search.triples(0, &mut BTreeMap::new());
    }
    MatchSet {
        source,
        target,
        members: found,
    }
}

fn triple_order(l: &Graph) -> Vec<&Triple> {
    let mut remaining: Vec<&Triple> = l.triples().iter().collect();
    let mut bound: HashSet<&Variable> = HashSet::new();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let score = |t: &Triple| {
            t.labels()
                .iter()
                .filter(|l| match l {
                    Label::Const(_) => true,
                    Label::Var(v) => bound.contains(v),
                })
                .count()
        };
        let mut best = 0;
        for (i, t) in remaining.iter().enumerate() {
            if score(t) > score(remaining[best]) {
                best = i;
            }
        }
        let t = remaining.remove(best);
        for l in t.labels() {
            if let Label::Var(v) = l {
                bound.insert(v);
            }
        }
        order.push(t);
    }
    order
}

struct Search<'a> {
    g: &'a Graph,
    order: &'a [&'a Triple],
    tail_nodes: &'a [&'a Label],
    needs_node_check: &'a [&'a Label],
    found: &'a mut BTreeSet<Assignment>,
}

impl Search<'_> {
    fn triples(&mut self, depth: usize, binding: &mut BTreeMap<Variable, Label>) {
        let Some(pat) = self.order.get(depth) else {
            let nodes_ok = self.needs_node_check.iter().all(|n| match n {
                Label::Var(v) => binding
                    .get(v)
                    .is_none_or(|img| self.g.nodes().contains(img)),
                Label::Const(_) => true,
            });
            if nodes_ok {
                self.isolated(0, binding);
            }
            return;
        };
        for cand in self.g.triples() {
            let mut added: Vec<Variable> = Vec::new();
            let ok = unify(&pat.subject, &cand.subject, binding, &mut added)
                && unify(&pat.predicate, &cand.predicate, binding, &mut added)
                && unify(&pat.object, &cand.object, binding, &mut added);
            if ok {
                self.triples(depth + 1, binding);
            }
            for v in added {
                binding.remove(&v);
            }
        }
    }

    fn isolated(&mut self, i: usize, binding: &mut BTreeMap<Variable, Label>) {
        let Some(node) = self.tail_nodes.get(i) else {
            self.found.insert(Assignment(binding.clone()));
            return;
        };
        let Label::Var(v) = node else { unreachable!() };
        if binding.contains_key(v) {
            self.isolated(i + 1, binding);
            return;
        }
        for n in self.g.nodes() {
            binding.insert(v.clone(), n.clone());
            self.isolated(i + 1, binding);
        }
        binding.remove(v);
    }
}

fn unify(
    pat: &Label,
    cand: &Label,
    binding: &mut BTreeMap<Variable, Label>,
    added: &mut Vec<Variable>,
) -> bool {
    match pat {
        Label::Const(_) => pat == cand,
        Label::Var(v) => match binding.get(v) {
            Some(b) => b == cand,
            None => {
                binding.insert(v.clone(), cand.clone());
                added.push(v.clone());
                true
            }
        },
    }
}
