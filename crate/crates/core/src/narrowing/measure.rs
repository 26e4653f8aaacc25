//! The termination measure.
//!
//! `Q(t)` counts pending query work (`2` per `Solve_Q`, `1` per `Display_*`),
//! `M(t)` is the multiset of heights of the pattern subterms of `t`, and the
//! last component is the height of the rewritten subterm. A step must
//! decrease `(Q, M)` lexicographically (multisets under the multiset
//! ordering), or leave it unchanged and decrease the height at the redex.

use std::cmp::Ordering;

use super::term::{Position, Sort, Sym, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    pub pending_queries: usize,
    /// Sorted in decreasing order.
    pub pattern_heights: Vec<usize>,
    pub height: usize,
}

impl Measure {
    pub fn of(t: &Term) -> Measure {
        let mut heights = Vec::new();
        let mut pending = 0;
        collect(t, &mut heights, &mut pending);
        heights.sort_unstable_by(|a, b| b.cmp(a));
        Measure {
            pending_queries: pending,
            pattern_heights: heights,
            height: t.height(),
        }
    }
}

fn collect(t: &Term, heights: &mut Vec<usize>, pending: &mut usize) {
    match t.head() {
        Some(Sym::SolveQ) => *pending += 2,
        Some(s) if s.is_display() => *pending += 1,
        _ => {}
    }
    if t.sort() == Sort::Pat {
        heights.push(t.height());
    }
    for a in t.args() {
        collect(a, heights, pending);
    }
}

/// Multiset ordering over naturals: compare the decreasingly sorted
/// sequences lexicographically.
pub fn multiset_cmp(a: &[usize], b: &[usize]) -> Ordering {
    a.cmp(b)
}

/// Whether rewriting `before` into `after` at `pos` decreases the measure.
pub fn step_decreases(before: &Term, after: &Term, pos: &Position) -> bool {
    let (mb, ma) = (Measure::of(before), Measure::of(after));
    match mb.pending_queries.cmp(&ma.pending_queries) {
        Ordering::Greater => return true,
        Ordering::Less => return false,
        Ordering::Equal => {}
    }
    match multiset_cmp(&mb.pattern_heights, &ma.pattern_heights) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let hb = before.at(pos).map_or(0, Term::height);
            let ha = after.at(pos).map_or(usize::MAX, Term::height);
            hb > ha
        }
    }
}
