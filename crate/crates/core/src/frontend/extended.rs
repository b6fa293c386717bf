//! Extended VAs: each position reads one marker set through an ev-transition.

use std::collections::{BTreeSet, VecDeque};

use super::automaton::{Marker, StateId, VarAutomaton};
use super::formula::ByteSet;
use crate::error::{Error, Result};

/// Default cap on the number of ev-transitions produced by the conversion.
pub const DEFAULT_EXTENDED_BUDGET: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    EvState,
    LetterState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedVA {
    pub(crate) classes: Vec<StateClass>,
    pub(crate) initial: StateId,
    pub(crate) finals: Vec<bool>,
    /// `(source, sorted marker set, target)`.
    pub(crate) ev: Vec<(StateId, Vec<Marker>, StateId)>,
    pub(crate) letters: Vec<(StateId, ByteSet, StateId)>,
    pub(crate) variables: Vec<String>,
}

impl ExtendedVA {
    pub fn new(variables: Vec<String>) -> Self {
        ExtendedVA {
            classes: Vec::new(),
            initial: 0,
            finals: Vec::new(),
            ev: Vec::new(),
            letters: Vec::new(),
            variables,
        }
    }

    pub fn add_state(&mut self, class: StateClass) -> StateId {
        self.classes.push(class);
        self.finals.push(false);
        (self.classes.len() - 1) as StateId
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial = q;
    }

    pub fn set_final(&mut self, q: StateId, accepting: bool) {
        self.finals[q as usize] = accepting;
    }

    pub fn add_ev(&mut self, src: StateId, markers: &[Marker], dst: StateId) {
        let mut m = markers.to_vec();
        m.sort_unstable();
        m.dedup();
        self.ev.push((src, m, dst));
    }

    pub fn add_letters(&mut self, src: StateId, set: ByteSet, dst: StateId) {
        if !set.is_empty() {
            self.letters.push((src, set, dst));
        }
    }

    pub fn num_states(&self) -> u32 {
        self.classes.len() as u32
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q as usize]
    }

    pub fn class(&self, q: StateId) -> StateClass {
        self.classes[q as usize]
    }

    pub fn ev_transitions(&self) -> &[(StateId, Vec<Marker>, StateId)] {
        &self.ev
    }

    pub fn letter_transitions(&self) -> &[(StateId, ByteSet, StateId)] {
        &self.letters
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// True when ev-transitions leave only ev-states and enter letter-states,
    /// letter transitions do the opposite, the initial state is an ev-state
    /// and every final state is a letter-state.
    pub fn alternates(&self) -> bool {
        use StateClass::*;
        self.class(self.initial) == EvState
            && (0..self.num_states()).all(|q| !self.is_final(q) || self.class(q) == LetterState)
            && self.ev.iter().all(|(s, _, d)| self.class(*s) == EvState && self.class(*d) == LetterState)
            && self.letters.iter().all(|(s, _, d)| self.class(*s) == LetterState && self.class(*d) == EvState)
    }

    /// Accessible and co-accessible part, renumbered in ascending order.
    pub fn trim(&self) -> Option<ExtendedVA> {
        let n = self.num_states() as usize;
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for (s, _, d) in &self.ev {
            fwd[*s as usize].push(*d);
            bwd[*d as usize].push(*s);
        }
        for (s, _, d) in &self.letters {
            fwd[*s as usize].push(*d);
            bwd[*d as usize].push(*s);
        }
        let sweep = |adj: &[Vec<StateId>], start: Vec<StateId>| {
            let mut seen = vec![false; n];
            for &q in &start {
                seen[q as usize] = true;
            }
            let mut queue = VecDeque::from(start);
            while let Some(q) = queue.pop_front() {
                for &t in &adj[q as usize] {
                    if !seen[t as usize] {
                        seen[t as usize] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen
        };
        let acc = sweep(&fwd, vec![self.initial]);
        let co = sweep(&bwd, (0..n as StateId).filter(|&q| self.finals[q as usize]).collect());
        if !(acc[self.initial as usize] && co[self.initial as usize]) {
            return None;
        }
        let mut map = vec![u32::MAX; n];
        let mut out = ExtendedVA::new(self.variables.clone());
        for q in 0..n {
            if acc[q] && co[q] {
                map[q] = out.add_state(self.classes[q]);
                out.finals[map[q] as usize] = self.finals[q];
            }
        }
        out.initial = map[self.initial as usize];
        let kept = |s: &StateId, d: &StateId| map[*s as usize] != u32::MAX && map[*d as usize] != u32::MAX;
        for (s, m, d) in &self.ev {
            if kept(s, d) {
                out.ev.push((map[*s as usize], m.clone(), map[*d as usize]));
            }
        }
        for (s, set, d) in &self.letters {
            if kept(s, d) {
                out.letters.push((map[*s as usize], *set, map[*d as usize]));
            }
        }
        Some(out)
    }
}

/// Collapses every marker path of a sequential VA into one ev-transition.
///
/// State `q` becomes the ev-state `2q` and the letter-state `2q + 1`. For every
/// marker path `q → … → q'` (including the empty one) there is an ev-transition
/// from `2q` to `2q' + 1` labeled by the path's marker set.
pub fn to_extended_va(va: &VarAutomaton, budget: usize) -> Result<ExtendedVA> {
    if let Some(state) = va.marker_cycle() {
        return Err(Error::MarkerCycle { state });
    }
    let n = va.num_states() as usize;
    let mut out = ExtendedVA::new(va.variables().to_vec());
    for _ in 0..n {
        out.add_state(StateClass::EvState);
        out.add_state(StateClass::LetterState);
    }
    out.set_initial(2 * va.initial());
    for q in va.finals() {
        out.set_final(2 * q + 1, true);
    }
    let mut markers_out = vec![Vec::new(); n];
    for &(s, m, d) in va.marker_transitions() {
        markers_out[s as usize].push((m, d));
    }
    let mut steps = 0usize;
    for q in 0..n as StateId {
        let mut found: BTreeSet<(Vec<Marker>, StateId)> = BTreeSet::new();
        let mut stack: Vec<(StateId, Vec<Marker>)> = vec![(q, Vec::new())];
        while let Some((p, set)) = stack.pop() {
            steps += 1;
            if steps > budget.saturating_mul(4) {
                return Err(Error::ExtendedBudget { budget });
            }
            for &(m, d) in &markers_out[p as usize] {
                if set.contains(&m) {
                    continue;
                }
                let mut next = set.clone();
                next.push(m);
                stack.push((d, next));
            }
            let mut key = set;
            key.sort_unstable();
            found.insert((key, p));
        }
        for (set, p) in found {
            out.ev.push((2 * q, set, 2 * p + 1));
            if out.ev.len() > budget {
                return Err(Error::ExtendedBudget { budget });
            }
        }
    }
    for &(s, set, d) in va.letter_transitions() {
        out.letters.push((2 * s + 1, set, 2 * d));
    }
    Ok(out.trim().unwrap_or_else(|| empty_extended(va.variables().to_vec())))
}

/// An extended VA accepting nothing.
fn empty_extended(variables: Vec<String>) -> ExtendedVA {
    let mut out = ExtendedVA::new(variables);
    out.add_state(StateClass::EvState);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::automaton::VarId;

    #[test]
    fn variable_free_automaton_gets_empty_labels() {
        let mut va = VarAutomaton::with_states(vec![], 2);
        va.add_letter(0, b'a', 1);
        va.set_final(1, true);
        let e = to_extended_va(&va, DEFAULT_EXTENDED_BUDGET).unwrap();
        assert!(e.alternates());
        assert!(e.ev_transitions().iter().all(|(_, m, _)| m.is_empty()));
    }

    #[test]
    fn marker_chain_collapses() {
        let mut va = VarAutomaton::with_states(vec!["x".into(), "y".into()], 3);
        va.add_marker(0, VarId(1).open(), 1);
        va.add_marker(1, VarId(0).open(), 2);
        va.set_final(2, true);
        let e = to_extended_va(&va, DEFAULT_EXTENDED_BUDGET).unwrap();
        assert!(e.alternates());
        let labels: Vec<_> = e.ev_transitions().iter().map(|(_, m, _)| m.clone()).collect();
        assert_eq!(labels, vec![vec![VarId(0).open(), VarId(1).open()]]);
    }
}
