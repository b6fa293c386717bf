//! Variable-set automata: letter transitions plus variable-marker transitions.

use std::collections::VecDeque;
use std::fmt;

use super::formula::ByteSet;

pub type StateId = u32;

/// Dense 0-based variable identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn open(self) -> Marker {
        Marker(self.0 * 2)
    }

    pub fn close(self) -> Marker {
        Marker(self.0 * 2 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MarkerKind {
    Open,
    Close,
}

/// A variable marker `x⊢` or `⊣x`, encoded as `2·x` and `2·x + 1`.
///
/// The encoding gives the canonical marker order: variable 0 open, variable 0
/// close, variable 1 open, and so on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marker(pub u32);

impl Marker {
    pub fn new(var: VarId, kind: MarkerKind) -> Self {
        match kind {
            MarkerKind::Open => var.open(),
            MarkerKind::Close => var.close(),
        }
    }

    pub fn var(self) -> VarId {
        VarId(self.0 / 2)
    }

    pub fn kind(self) -> MarkerKind {
        if self.0.is_multiple_of(2) {
            MarkerKind::Open
        } else {
            MarkerKind::Close
        }
    }

    pub fn is_open(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// `open:name` or `close:name`.
    pub fn display<'a>(self, variables: &'a [String]) -> MarkerDisplay<'a> {
        MarkerDisplay { marker: self, variables }
    }
}

pub struct MarkerDisplay<'a> {
    marker: Marker,
    variables: &'a [String],
}

impl fmt::Display for MarkerDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.marker.is_open() { "open" } else { "close" };
        match self.variables.get(self.marker.var().index()) {
            Some(name) => write!(f, "{kind}:{name}"),
            None => write!(f, "{kind}:#{}", self.marker.var().0),
        }
    }
}

/// What a single transition reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Letters(ByteSet),
    Marker(Marker),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub src: StateId,
    pub label: Label,
    pub dst: StateId,
}

/// A variable-set automaton `(Q, q0, F, δ)` over bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarAutomaton {
    num_states: u32,
    initial: StateId,
    finals: Vec<bool>,
    letters: Vec<(StateId, ByteSet, StateId)>,
    markers: Vec<(StateId, Marker, StateId)>,
    variables: Vec<String>,
}

impl VarAutomaton {
    /// An automaton with one (initial, non-final) state.
    pub fn new(variables: Vec<String>) -> Self {
        VarAutomaton {
            num_states: 1,
            initial: 0,
            finals: vec![false],
            letters: Vec::new(),
            markers: Vec::new(),
            variables,
        }
    }

    pub fn with_states(variables: Vec<String>, num_states: u32) -> Self {
        assert!(num_states > 0);
        VarAutomaton {
            num_states,
            initial: 0,
            finals: vec![false; num_states as usize],
            letters: Vec::new(),
            markers: Vec::new(),
            variables,
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.num_states += 1;
        self.finals.push(false);
        self.num_states - 1
    }

    pub fn set_initial(&mut self, q: StateId) {
        assert!(q < self.num_states);
        self.initial = q;
    }

    pub fn set_final(&mut self, q: StateId, accepting: bool) {
        self.finals[q as usize] = accepting;
    }

    pub fn add_letters(&mut self, src: StateId, set: ByteSet, dst: StateId) {
        assert!(src < self.num_states && dst < self.num_states);
        if !set.is_empty() {
            self.letters.push((src, set, dst));
        }
    }

    pub fn add_letter(&mut self, src: StateId, byte: u8, dst: StateId) {
        self.add_letters(src, ByteSet::single(byte), dst)
    }

    pub fn add_marker(&mut self, src: StateId, marker: Marker, dst: StateId) {
        assert!(src < self.num_states && dst < self.num_states);
        assert!(marker.var().index() < self.variables.len(), "marker for unknown variable");
        self.markers.push((src, marker, dst));
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states).filter(|&q| self.finals[q as usize])
    }

    pub fn letter_transitions(&self) -> &[(StateId, ByteSet, StateId)] {
        &self.letters
    }

    pub fn marker_transitions(&self) -> &[(StateId, Marker, StateId)] {
        &self.markers
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        let l = self.letters.iter().map(|&(src, s, dst)| Transition { src, label: Label::Letters(s), dst });
        let m = self.markers.iter().map(|&(src, m, dst)| Transition { src, label: Label::Marker(m), dst });
        l.chain(m)
    }

    /// `|A|`: states plus transitions plus final states.
    pub fn size(&self) -> usize {
        self.num_states as usize + self.letters.len() + self.markers.len() + self.finals.iter().filter(|&&f| f).count()
    }

    pub(crate) fn forward_adjacency(&self) -> Vec<Vec<StateId>> {
        let mut adj = vec![Vec::new(); self.num_states as usize];
        for t in self.transitions() {
            adj[t.src as usize].push(t.dst);
        }
        adj
    }

    /// States reachable from the initial state.
    pub fn accessible(&self) -> Vec<bool> {
        let adj = self.forward_adjacency();
        let mut seen = vec![false; self.num_states as usize];
        seen[self.initial as usize] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for &t in &adj[q as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub fn co_accessible(&self) -> Vec<bool> {
        let mut radj = vec![Vec::new(); self.num_states as usize];
        for t in self.transitions() {
            radj[t.dst as usize].push(t.src);
        }
        let mut seen = self.finals.clone();
        let mut queue: VecDeque<StateId> = self.finals().collect();
        while let Some(q) = queue.pop_front() {
            for &s in &radj[q as usize] {
                if !seen[s as usize] {
                    seen[s as usize] = true;
                    queue.push_back(s);
                }
            }
        }
        seen
    }

    /// Keeps only states that are accessible and co-accessible, preserving
    /// their relative order. `None` when the spanner is empty.
    pub fn trim(&self) -> Option<VarAutomaton> {
        let acc = self.accessible();
        let co = self.co_accessible();
        let keep: Vec<bool> = acc.iter().zip(&co).map(|(a, c)| *a && *c).collect();
        if !keep[self.initial as usize] {
            return None;
        }
        Some(self.restrict(&keep))
    }

    /// Subautomaton induced by `keep`, renumbered in ascending order.
    pub(crate) fn restrict(&self, keep: &[bool]) -> VarAutomaton {
        let mut map = vec![u32::MAX; self.num_states as usize];
        let mut next = 0u32;
        for q in 0..self.num_states as usize {
            if keep[q] {
                map[q] = next;
                next += 1;
            }
        }
        let mut out = VarAutomaton::with_states(self.variables.clone(), next);
        out.initial = map[self.initial as usize];
        for q in 0..self.num_states as usize {
            if keep[q] {
                out.finals[map[q] as usize] = self.finals[q];
            }
        }
        for &(s, set, d) in &self.letters {
            if keep[s as usize] && keep[d as usize] {
                out.letters.push((map[s as usize], set, map[d as usize]));
            }
        }
        for &(s, m, d) in &self.markers {
            if keep[s as usize] && keep[d as usize] {
                out.markers.push((map[s as usize], m, map[d as usize]));
            }
        }
        out
    }

    /// A state on a cycle made only of marker transitions, if any.
    pub fn marker_cycle(&self) -> Option<StateId> {
        let n = self.num_states as usize;
        let mut adj = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(s, _, d) in &self.markers {
            adj[s as usize].push(d);
            indeg[d as usize] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&q| indeg[q] == 0).collect();
        let mut done = 0;
        while let Some(q) = stack.pop() {
            done += 1;
            for &d in &adj[q] {
                indeg[d as usize] -= 1;
                if indeg[d as usize] == 0 {
                    stack.push(d as usize);
                }
            }
        }
        if done == n {
            None
        } else {
            (0..n).find(|&q| indeg[q] > 0).map(|q| q as StateId)
        }
    }
}

/// Free-function form of [`VarAutomaton::trim`].
pub fn trim_va(va: &VarAutomaton) -> Option<VarAutomaton> {
    va.trim()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marker_encoding() {
        let x = VarId(3);
        assert_eq!(x.open().var(), x);
        assert_eq!(x.close().kind(), MarkerKind::Close);
        assert!(x.open() < x.close() && x.close() < VarId(4).open());
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(VarId(1).close().display(&names).to_string(), "close:b");
    }

    #[test]
    fn trim_removes_unreachable_and_dead_states() {
        let mut va = VarAutomaton::with_states(vec!["x".into()], 4);
        va.add_letter(0, b'a', 1);
        va.add_letter(0, b'b', 2); // 2 reaches no final
        va.add_letter(3, b'a', 1); // 3 is unreachable
        va.set_final(1, true);
        let t = va.trim().unwrap();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.letter_transitions(), &[(0, ByteSet::single(b'a'), 1)]);
        assert!(t.is_final(1));
    }

    #[test]
    fn trim_of_empty_spanner() {
        let mut va = VarAutomaton::with_states(vec![], 2);
        va.add_letter(0, b'a', 1);
        assert!(va.trim().is_none());
    }

    #[test]
    fn detects_marker_cycles() {
        let mut va = VarAutomaton::with_states(vec!["x".into()], 2);
        va.add_marker(0, VarId(0).open(), 1);
        assert_eq!(va.marker_cycle(), None);
        va.add_marker(1, VarId(0).close(), 0);
        assert!(va.marker_cycle().is_some());
    }
}
