//! Derivation traces.

use std::fmt::Write;

use super::rules::RuleId;
use super::term::{Position, Term, Verbosity};

#[derive(Clone, Debug)]
pub struct Step {
    pub rule: RuleId,
    pub position: Position,
    /// The term after the step.
    pub term: Term,
}

#[derive(Clone, Debug)]
pub struct Trace {
    initial: Term,
    steps: Vec<Step>,
}

impl Trace {
    pub fn new(initial: Term) -> Self {
        Trace {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, rule: RuleId, position: Position, term: Term) {
        self.steps.push(Step {
            rule,
            position,
            term,
        });
    }

    pub fn initial(&self) -> &Term {
        &self.initial
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rule_ids(&self) -> Vec<RuleId> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    /// The final term.
    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.term)
    }

    /// The term before each step, followed by the final term.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.term))
    }

    /// `(0) <initial>` then one `(n) ⇝_{rK} @ <position> : <term>` line per step.
    pub fn render(&self, verbosity: Verbosity) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "(0) {}", self.initial.render(verbosity));
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "({}) ⇝_{{{}}} @ {} : {}",
                i + 1,
                s.rule,
                s.position,
                s.term.render(verbosity)
            );
        }
        out
    }
}
