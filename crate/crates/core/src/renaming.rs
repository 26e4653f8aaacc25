//! Equality up to a bijective renaming of variables.
//!
//! Fresh variables produced by BUILD are arbitrary names, so results of two
//! evaluations are compared modulo one renaming applied consistently to every
//! row, triple and node.

use std::collections::{BTreeMap, HashMap};

use crate::graph::{Graph, Label, Variable};
use crate::matching::MatchSet;
use crate::query::{QueryResult, SolutionTable};

/// A tagged tuple of labels; tags keep rows, triples and nodes apart.
type Item = (u8, Vec<Label>);

const ROW: u8 = 0;
const TRIPLE: u8 = 1;
const NODE: u8 = 2;

fn graph_items(g: &Graph, out: &mut Vec<Item>) {
    for t in g.triples() {
        out.push((
            TRIPLE,
            vec![t.subject.clone(), t.predicate.clone(), t.object.clone()],
        ));
    }
    for n in g.nodes() {
        out.push((NODE, vec![n.clone()]));
    }
}

fn table_items(t: &SolutionTable, out: &mut Vec<Item>) {
    out.extend(t.rows.iter().map(|r| (ROW, r.clone())));
}

/// Same source, and members and targets equal under one renaming.
pub fn match_sets_equal_up_to_renaming(a: &MatchSet, b: &MatchSet) -> bool {
    if a == b {
        return true;
    }
    if a.source() != b.source() || a.len() != b.len() {
        return false;
    }
    let items = |m: &MatchSet| {
        let mut out = Vec::new();
        out.extend(m.tab().rows.into_iter().map(|r| (ROW, r)));
        graph_items(m.target(), &mut out);
        out
    };
    find_renaming(&items(a), &items(b)).is_some()
}

pub fn graphs_equal_up_to_renaming(a: &Graph, b: &Graph) -> bool {
    if a == b {
        return true;
    }
    let items = |g: &Graph| {
        let mut out = Vec::new();
        graph_items(g, &mut out);
        out
    };
    find_renaming(&items(a), &items(b)).is_some()
}

/// Tables compare as multisets of rows; a pair uses one renaming for both parts.
pub fn results_equal_up_to_renaming(a: &QueryResult, b: &QueryResult) -> bool {
    if a == b {
        return true;
    }
    let items = |r: &QueryResult| {
        let mut out = Vec::new();
        if let Some(g) = r.graph() {
            graph_items(g, &mut out);
        }
        if let Some(t) = r.table() {
            table_items(t, &mut out);
        }
        out
    };
    let columns = |r: &QueryResult| r.table().map(|t| t.columns.clone());
    std::mem::discriminant(a) == std::mem::discriminant(b)
        && columns(a) == columns(b)
        && find_renaming(&items(a), &items(b)).is_some()
}

/// Constants in place, variables numbered by first occurrence in the item.
fn shape(item: &Item) -> (u8, Vec<Result<Label, usize>>) {
    let mut seen: Vec<&Variable> = Vec::new();
    let cells = item
        .1
        .iter()
        .map(|l| match l {
            Label::Const(_) => Ok(l.clone()),
            Label::Var(v) => Err(match seen.iter().position(|s| *s == v) {
                Some(i) => i,
                None => {
                    seen.push(v);
                    seen.len() - 1
                }
            }),
        })
        .collect();
    (item.0, cells)
}

fn is_ground(item: &Item) -> bool {
    item.1.iter().all(|l| !l.is_var())
}

/// A bijection `φ` on variables with `φ(a) = b` as multisets of items.
pub fn find_renaming(a: &[Item], b: &[Item]) -> Option<BTreeMap<Variable, Variable>> {
    if a.len() != b.len() {
        return None;
    }
    let split = |xs: &[Item]| {
        let (mut ground, open): (Vec<Item>, Vec<Item>) = xs.iter().cloned().partition(is_ground);
        ground.sort();
        (ground, open)
    };
    let (ga, oa) = split(a);
    let (gb, ob) = split(b);
    if ga != gb || oa.len() != ob.len() {
        return None;
    }
    let mut buckets: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, item) in ob.iter().enumerate() {
        buckets.entry(shape(item)).or_default().push(i);
    }
    let mut order: Vec<(usize, Vec<usize>)> = Vec::with_capacity(oa.len());
    for (i, item) in oa.iter().enumerate() {
        let candidates = buckets.get(&shape(item))?.clone();
        order.push((i, candidates));
    }
    // bucket sizes must agree before searching
    let mut need: HashMap<_, usize> = HashMap::new();
    for item in &oa {
        *need.entry(shape(item)).or_default() += 1;
    }
    if need.iter().any(|(k, n)| buckets.get(k).map_or(0, Vec::len) != *n) {
        return None;
    }
    order.sort_by_key(|(_, c)| c.len());
    let mut search = Search {
        a: &oa,
        b: &ob,
        order: &order,
        used: vec![false; ob.len()],
        fwd: BTreeMap::new(),
        inv: BTreeMap::new(),
    };
    search.run(0).then_some(search.fwd)
}

struct Search<'a> {
    a: &'a [Item],
    b: &'a [Item],
    order: &'a [(usize, Vec<usize>)],
    used: Vec<bool>,
    fwd: BTreeMap<Variable, Variable>,
    inv: BTreeMap<Variable, Variable>,
}

impl Search<'_> {
    fn run(&mut self, k: usize) -> bool {
        let Some((ai, cands)) = self.order.get(k) else {
            return true;
        };
        for &bi in cands {
            if self.used[bi] {
                continue;
            }
            let mut added = Vec::new();
            if self.bind(&self.a[*ai].1, &self.b[bi].1, &mut added) {
                self.used[bi] = true;
                if self.run(k + 1) {
                    return true;
                }
                self.used[bi] = false;
            }
            for v in added {
                let w = self.fwd.remove(&v).unwrap();
                self.inv.remove(&w);
            }
        }
        false
    }

    fn bind(&mut self, xs: &[Label], ys: &[Label], added: &mut Vec<Variable>) -> bool {
        for (x, y) in xs.iter().zip(ys) {
            let (Label::Var(v), Label::Var(w)) = (x, y) else {
                continue;
            };
            match (self.fwd.get(v), self.inv.get(w)) {
                (Some(w2), _) if w2 != w => return false,
                (_, Some(v2)) if v2 != v => return false,
                (Some(_), _) => {}
                (None, _) => {
                    self.fwd.insert(v.clone(), w.clone());
                    self.inv.insert(w.clone(), v.clone());
                    added.push(v.clone());
                }
            }
        }
        true
    }
}
