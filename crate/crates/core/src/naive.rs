//! Baseline without preprocessing: one NFA run from every start position.

use crate::bits::StateSet;
use crate::dag::DagAutomaton;
use crate::enumerate::Span;
use crate::error::{Error, Result};
use crate::frontend::{glushkov::compile_node, RegexFormula};

/// The NFA of a capture-free pattern, simulated with state sets.
#[derive(Clone, Debug)]
pub struct NaiveScan {
    nfa: DagAutomaton,
}

impl NaiveScan {
    /// Only patterns whose single variable surrounds the whole expression
    /// (capture-free patterns) are supported.
    pub fn new(formula: &RegexFormula) -> Result<Self> {
        if !formula.implicit {
            return Err(Error::NaiveUnsupported { variables: formula.variables.len() });
        }
        let va = compile_node(&formula.body, Vec::new());
        let nfa = DagAutomaton::general(&va)?;
        Ok(NaiveScan { nfa })
    }

    /// Spans `[i, j)` matched by the pattern, ordered by start then end.
    pub fn scan<'s, 'd>(&'s self, doc: &'d [u8]) -> NaiveSpans<'s, 'd> {
        let cap = self.nfa.stride() * 64;
        NaiveSpans {
            nfa: &self.nfa,
            doc,
            start: 0,
            pos: 0,
            cur: StateSet::new(cap),
            next: StateSet::new(cap),
            running: false,
        }
    }
}

pub struct NaiveSpans<'s, 'd> {
    nfa: &'s DagAutomaton,
    doc: &'d [u8],
    start: usize,
    pos: usize,
    cur: StateSet,
    next: StateSet,
    running: bool,
}

impl NaiveSpans<'_, '_> {
    fn accepting(&self) -> bool {
        crate::bits::intersects(self.cur.words(), self.nfa.finals())
    }
}

impl Iterator for NaiveSpans<'_, '_> {
    type Item = Span;

    fn next(&mut self) -> Option<Span> {
        loop {
            if !self.running {
                if self.start > self.doc.len() {
                    return None;
                }
                self.cur.clear_all();
                self.cur.insert(self.nfa.initial() as usize);
                self.pos = self.start;
                self.running = true;
                if self.accepting() {
                    return Some(Span { start: self.start, end: self.pos });
                }
            }
            if self.pos == self.doc.len() || self.cur.is_empty() {
                self.running = false;
                self.start += 1;
                continue;
            }
            let class = self.nfa.class_of(self.doc[self.pos]);
            self.next.clear_all();
            for q in self.cur.iter() {
                for &t in self.nfa.letter_targets(class, q as u32) {
                    self.next.insert(t as usize);
                }
            }
            std::mem::swap(&mut self.cur, &mut self.next);
            self.pos += 1;
            if self.accepting() {
                return Some(Span { start: self.start, end: self.pos });
            }
        }
    }
}

/// All spans of a capture-free pattern, by naive scanning.
pub fn naive_scan_enumerate(formula: &RegexFormula, doc: &[u8]) -> Result<Vec<Span>> {
    Ok(NaiveScan::new(formula)?.scan(doc).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_regex_formula;

    fn spans(p: &str, d: &str) -> Vec<(usize, usize)> {
        let f = parse_regex_formula(p.as_bytes()).unwrap();
        naive_scan_enumerate(&f, d.as_bytes()).unwrap().into_iter().map(|s| (s.start, s.end)).collect()
    }

    #[test]
    fn single_letter() {
        assert_eq!(spans("a", "aaa"), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn empty_document() {
        assert!(spans("a", "").is_empty());
    }

    #[test]
    fn nullable_pattern_matches_everywhere() {
        assert_eq!(spans("a*", "ab"), vec![(0, 0), (0, 1), (1, 1), (2, 2)]);
    }

    #[test]
    fn explicit_captures_rejected() {
        let f = parse_regex_formula(b"x{a}y{b}").unwrap();
        assert_eq!(NaiveScan::new(&f).unwrap_err(), Error::NaiveUnsupported { variables: 2 });
    }
}
