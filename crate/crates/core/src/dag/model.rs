//! Automaton tables specialized for deriving product-DAG edges on demand.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::bits::{self, words_for};
use crate::error::{Error, Result};
use crate::frontend::{ByteSet, ExtendedVA, Marker, StateId, VarAutomaton};

pub type LabelId = u32;

/// Most variables the general engine accepts; its per-level label masks are 64 bits.
pub const MAX_VARIABLES: usize = 32;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DagKind {
    /// Built from a VA: marker edges carry single markers, several may be
    /// followed in a row within a level.
    General,
    /// Built from an extended VA: each level alternates one marker-set edge
    /// (possibly `∅`) with one letter edge.
    Extended,
}

/// Marker-edge label order: marker-id sequences compared lexicographically, `∅` last.
pub fn compare_labels(a: &[Marker], b: &[Marker]) -> Ordering {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => a.cmp(b),
    }
}

/// A sequential automaton prepared for product construction.
///
/// States are renumbered so that every marker transition goes from a smaller
/// to a larger id; inside one DAG level, ascending id order is topological.
#[derive(Clone, Debug)]
pub struct DagAutomaton {
    kind: DagKind,
    num_states: u32,
    stride: usize,
    initial: StateId,
    finals: Vec<u64>,
    variables: Vec<String>,
    original: Vec<StateId>,
    renumbered: Vec<StateId>,
    byte_class: [u8; 256],
    num_classes: usize,
    letter_offsets: Vec<u32>,
    letter_targets: Vec<StateId>,
    marker_offsets: Vec<u32>,
    marker_out: Vec<(LabelId, StateId)>,
    marker_in_offsets: Vec<u32>,
    marker_in: Vec<(LabelId, StateId)>,
    closure_slot: Vec<u32>,
    closure_rows: Vec<u64>,
    labels: Vec<Vec<Marker>>,
    empty_label: Option<LabelId>,
    automaton_size: usize,
}

struct RawEdges {
    num_states: usize,
    initial: StateId,
    finals: Vec<bool>,
    letters: Vec<(StateId, ByteSet, StateId)>,
    markers: Vec<(StateId, Vec<Marker>, StateId)>,
    variables: Vec<String>,
    size: usize,
}

impl DagAutomaton {
    /// Tables for the general product DAG of a sequential VA.
    pub fn general(va: &VarAutomaton) -> Result<Self> {
        if va.num_variables() > MAX_VARIABLES {
            return Err(Error::TooManyVariables { count: va.num_variables(), max: MAX_VARIABLES });
        }
        let raw = RawEdges {
            num_states: va.num_states() as usize,
            initial: va.initial(),
            finals: (0..va.num_states()).map(|q| va.is_final(q)).collect(),
            letters: va.letter_transitions().to_vec(),
            markers: va.marker_transitions().iter().map(|&(s, m, d)| (s, vec![m], d)).collect(),
            variables: va.variables().to_vec(),
            size: va.size(),
        };
        Self::build(DagKind::General, raw)
    }

    /// Tables for the product DAG of an extended VA.
    pub fn extended(eva: &ExtendedVA) -> Result<Self> {
        let n = eva.num_states();
        let raw = RawEdges {
            num_states: n as usize,
            initial: eva.initial(),
            finals: (0..n).map(|q| eva.is_final(q)).collect(),
            letters: eva.letter_transitions().to_vec(),
            markers: eva.ev_transitions().to_vec(),
            variables: eva.variables().to_vec(),
            size: n as usize
                + eva.letter_transitions().len()
                + eva.ev_transitions().len()
                + (0..n).filter(|&q| eva.is_final(q)).count(),
        };
        Self::build(DagKind::Extended, raw)
    }

    fn build(kind: DagKind, raw: RawEdges) -> Result<Self> {
        let n = raw.num_states;
        let (original, renumbered) = topological_order(n, &raw.markers)?;
        let re = |q: StateId| renumbered[q as usize];
        let stride = words_for(n.max(1));

        let mut finals = vec![0u64; stride];
        for q in 0..n {
            if raw.finals[q] {
                bits::set(&mut finals, re(q as StateId) as usize);
            }
        }

        // Byte classes: bytes with identical membership across all letter sets.
        let mut distinct: Vec<ByteSet> = raw.letters.iter().map(|t| t.1).collect();
        distinct.sort_by_key(|s| s.0);
        distinct.dedup();
        let mut signature_ids: HashMap<Vec<u64>, u8> = HashMap::new();
        let mut byte_class = [0u8; 256];
        for b in 0..=255u8 {
            let mut sig = vec![0u64; words_for(distinct.len().max(1))];
            for (i, s) in distinct.iter().enumerate() {
                if s.contains(b) {
                    bits::set(&mut sig, i);
                }
            }
            let next = signature_ids.len() as u8;
            byte_class[b as usize] = *signature_ids.entry(sig).or_insert(next);
        }
        let num_classes = signature_ids.len();
        let mut class_rep = vec![0u8; num_classes];
        for b in (0..=255u8).rev() {
            class_rep[byte_class[b as usize] as usize] = b;
        }

        let mut buckets: Vec<Vec<StateId>> = vec![Vec::new(); num_classes * n];
        for &(s, set, d) in &raw.letters {
            for (c, &rep) in class_rep.iter().enumerate() {
                if set.contains(rep) {
                    buckets[c * n + re(s) as usize].push(re(d));
                }
            }
        }
        let mut letter_offsets = Vec::with_capacity(buckets.len() + 1);
        let mut letter_targets = Vec::new();
        letter_offsets.push(0);
        for b in &mut buckets {
            b.sort_unstable();
            b.dedup();
            letter_targets.extend_from_slice(b);
            letter_offsets.push(letter_targets.len() as u32);
        }

        let mut label_sets: Vec<Vec<Marker>> = raw.markers.iter().map(|t| t.1.clone()).collect();
        label_sets.sort_by(|a, b| compare_labels(a, b));
        label_sets.dedup();
        let label_ids: BTreeMap<Vec<Marker>, LabelId> =
            label_sets.iter().enumerate().map(|(i, l)| (l.clone(), i as LabelId)).collect();
        let empty_label = label_ids.get(&Vec::new()).copied();

        let mut out: Vec<Vec<(LabelId, StateId)>> = vec![Vec::new(); n];
        let mut inc: Vec<Vec<(LabelId, StateId)>> = vec![Vec::new(); n];
        for (s, m, d) in &raw.markers {
            let l = label_ids[m];
            out[re(*s) as usize].push((l, re(*d)));
            inc[re(*d) as usize].push((l, re(*s)));
        }
        let (marker_offsets, marker_out) = csr(&mut out);
        let (marker_in_offsets, marker_in) = csr(&mut inc);

        let mut closure_slot = vec![NONE; n];
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut row_of: Vec<Option<usize>> = vec![None; n];
        for q in (0..n).rev() {
            let edges = &marker_out[marker_offsets[q] as usize..marker_offsets[q + 1] as usize];
            if edges.is_empty() {
                continue;
            }
            let mut row = vec![0u64; stride];
            bits::set(&mut row, q);
            for &(_, t) in edges {
                match row_of[t as usize] {
                    Some(r) => bits::or_into(&mut row, &rows[r]),
                    None => bits::set(&mut row, t as usize),
                }
            }
            row_of[q] = Some(rows.len());
            closure_slot[q] = rows.len() as u32;
            rows.push(row);
        }
        let closure_rows = rows.concat();

        Ok(DagAutomaton {
            kind,
            num_states: n as u32,
            stride,
            initial: re(raw.initial),
            finals,
            variables: raw.variables,
            original,
            renumbered,
            byte_class,
            num_classes,
            letter_offsets,
            letter_targets,
            marker_offsets,
            marker_out,
            marker_in_offsets,
            marker_in,
            closure_slot,
            closure_rows,
            labels: label_sets,
            empty_label,
            automaton_size: raw.size,
        })
    }

    pub fn kind(&self) -> DagKind {
        self.kind
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    /// Words per level bitmap row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &[u64] {
        &self.finals
    }

    pub fn is_final(&self, q: StateId) -> bool {
        bits::test(&self.finals, q as usize)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Internal id of a state of the source automaton.
    pub fn state_id(&self, original: StateId) -> StateId {
        self.renumbered[original as usize]
    }

    /// Source-automaton id of an internal state.
    pub fn original(&self, q: StateId) -> StateId {
        self.original[q as usize]
    }

    #[inline]
    pub fn class_of(&self, byte: u8) -> usize {
        self.byte_class[byte as usize] as usize
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    #[inline]
    pub fn letter_targets(&self, class: usize, q: StateId) -> &[StateId] {
        let i = class * self.num_states as usize + q as usize;
        &self.letter_targets[self.letter_offsets[i] as usize..self.letter_offsets[i + 1] as usize]
    }

    /// Outgoing marker transitions sorted by label order, then target.
    #[inline]
    pub fn marker_out(&self, q: StateId) -> &[(LabelId, StateId)] {
        let q = q as usize;
        &self.marker_out[self.marker_offsets[q] as usize..self.marker_offsets[q + 1] as usize]
    }

    /// Incoming marker transitions as `(label, source)`.
    #[inline]
    pub fn marker_in(&self, q: StateId) -> &[(LabelId, StateId)] {
        let q = q as usize;
        &self.marker_in[self.marker_in_offsets[q] as usize..self.marker_in_offsets[q + 1] as usize]
    }

    /// States reachable from `q` through marker transitions, `q` included;
    /// `None` when `q` has no marker transition.
    #[inline]
    pub fn marker_closure(&self, q: StateId) -> Option<&[u64]> {
        let slot = self.closure_slot[q as usize];
        (slot != NONE).then(|| &self.closure_rows[slot as usize * self.stride..(slot as usize + 1) * self.stride])
    }

    pub fn label(&self, id: LabelId) -> &[Marker] {
        &self.labels[id as usize]
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn empty_label(&self) -> Option<LabelId> {
        self.empty_label
    }

    #[inline]
    pub fn is_empty_label(&self, id: LabelId) -> bool {
        self.empty_label == Some(id)
    }

    /// `|A|` of the source automaton: states, transitions and final states.
    pub fn automaton_size(&self) -> usize {
        self.automaton_size
    }

    pub fn num_letter_transitions(&self) -> usize {
        self.letter_targets.len()
    }
}

fn csr(lists: &mut [Vec<(LabelId, StateId)>]) -> (Vec<u32>, Vec<(LabelId, StateId)>) {
    let mut offsets = Vec::with_capacity(lists.len() + 1);
    let mut flat = Vec::new();
    offsets.push(0);
    for l in lists.iter_mut() {
        l.sort_unstable();
        l.dedup();
        flat.extend_from_slice(l);
        offsets.push(flat.len() as u32);
    }
    (offsets, flat)
}

/// Kahn's algorithm over marker transitions, smallest ready id first, so an
/// already topological numbering is kept as is.
fn topological_order(n: usize, markers: &[(StateId, Vec<Marker>, StateId)]) -> Result<(Vec<StateId>, Vec<StateId>)> {
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0u32; n];
    for (s, _, d) in markers {
        adj[*s as usize].push(*d);
        indeg[*d as usize] += 1;
    }
    let mut heap: BinaryHeap<Reverse<StateId>> =
        (0..n as StateId).filter(|&q| indeg[q as usize] == 0).map(Reverse).collect();
    let mut original = Vec::with_capacity(n);
    while let Some(Reverse(q)) = heap.pop() {
        original.push(q);
        for &d in &adj[q as usize] {
            indeg[d as usize] -= 1;
            if indeg[d as usize] == 0 {
                heap.push(Reverse(d));
            }
        }
    }
    if original.len() < n {
        let state = (0..n).find(|&q| indeg[q] > 0).unwrap() as StateId;
        return Err(Error::MarkerCycle { state });
    }
    let mut renumbered = vec![0; n];
    for (new, &old) in original.iter().enumerate() {
        renumbered[old as usize] = new as StateId;
    }
    Ok((original, renumbered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::VarId;

    #[test]
    fn label_order_puts_empty_last() {
        let x = VarId(0);
        let y = VarId(1);
        let mut v = vec![vec![], vec![y.open()], vec![x.open(), y.open()], vec![x.open()]];
        v.sort_by(|a, b| compare_labels(a, b));
        assert_eq!(v, vec![vec![x.open()], vec![x.open(), y.open()], vec![y.open()], vec![]]);
    }

    #[test]
    fn renumbering_makes_markers_increase() {
        let mut va = VarAutomaton::with_states(vec!["x".into()], 3);
        va.add_marker(2, VarId(0).open(), 1);
        va.add_marker(1, VarId(0).close(), 0);
        va.set_initial(2);
        va.set_final(0, true);
        let d = DagAutomaton::general(&va).unwrap();
        for q in 0..3 {
            for &(_, t) in d.marker_out(q) {
                assert!(t > q);
            }
        }
        assert_eq!(d.initial(), 0);
        assert_eq!(d.original(0), 2);
        let closure: Vec<_> = bits::iter_ones(d.marker_closure(0).unwrap()).collect();
        assert_eq!(closure, vec![0, 1, 2]);
    }

    #[test]
    fn byte_classes_partition_letters() {
        let mut va = VarAutomaton::with_states(vec![], 2);
        va.add_letters(0, ByteSet::range(b'a', b'c'), 1);
        va.add_letter(0, b'b', 1);
        let d = DagAutomaton::general(&va).unwrap();
        assert_eq!(d.num_classes(), 3);
        assert_eq!(d.class_of(b'a'), d.class_of(b'c'));
        assert_ne!(d.class_of(b'a'), d.class_of(b'b'));
        assert_eq!(d.letter_targets(d.class_of(b'b'), 0), &[1]);
        assert!(d.letter_targets(d.class_of(b'z'), 0).is_empty());
    }
}
