//! The leveled product DAG of an automaton and a document, stored as one
//! presence bit per (level, state). Edges are derived from the automaton
//! tables and the document whenever they are needed.

use std::fmt::Write as _;

use super::model::{DagAutomaton, DagKind, LabelId};
use crate::bits::{self, StateSet};
use crate::frontend::StateId;

/// A non-empty set of vertices on one level. On the last level the only
/// vertex is the final vertex, represented as state 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelSet {
    pub level: usize,
    pub members: StateSet,
}

impl LevelSet {
    pub fn new(level: usize, members: StateSet) -> Self {
        LevelSet { level, members }
    }

    pub fn singleton(level: usize, q: StateId, capacity: usize) -> Self {
        let mut members = StateSet::new(capacity);
        members.insert(q as usize);
        LevelSet { level, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.members.iter().map(|q| q as StateId)
    }
}

/// Size parameters of a trimmed DAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct DagStats {
    /// Largest number of vertices on one level.
    pub width_w: usize,
    /// Largest number of vertices plus outgoing edges on one level.
    pub complete_width_wc: usize,
    /// Largest number of distinct marker-edge labels on one level.
    pub alphabet_size_b: usize,
    /// Index of the final level, `|d| + 1`.
    pub depth_d: usize,
}

#[derive(Clone, Debug)]
pub struct MappingDag<'a> {
    model: &'a DagAutomaton,
    doc: &'a [u8],
    stride: usize,
    bitmap: Vec<u64>,
    marker_levels: Vec<u64>,
    trimmed: bool,
}

impl<'a> MappingDag<'a> {
    /// Builds and trims the product DAG.
    pub fn new(model: &'a DagAutomaton, doc: &'a [u8]) -> Self {
        Self::forward(model, doc).trim()
    }

    /// Vertices accessible from the initial vertex, not yet trimmed.
    pub fn forward(model: &'a DagAutomaton, doc: &'a [u8]) -> Self {
        let n = doc.len();
        let stride = model.stride();
        let mut bitmap = bits::zeroed_large::<u64>((n + 2) * stride);
        let mut step = vec![0u64; stride];
        bits::set(&mut step, model.initial() as usize);
        close_level(model, &step, &mut bitmap[..stride]);
        for i in 0..n {
            let class = model.class_of(doc[i]);
            let (done, rest) = bitmap.split_at_mut((i + 1) * stride);
            let cur = &done[i * stride..];
            step.fill(0);
            for q in bits::iter_ones(cur) {
                for &t in model.letter_targets(class, q as StateId) {
                    bits::set(&mut step, t as usize);
                }
            }
            close_level(model, &step, &mut rest[..stride]);
        }
        if bits::intersects(&bitmap[n * stride..(n + 1) * stride], model.finals()) {
            bitmap[(n + 1) * stride] = 1;
        }
        MappingDag { model, doc, stride, bitmap, marker_levels: vec![0; bits::words_for(n + 1)], trimmed: false }
    }

    /// Keeps the vertices that also reach the final vertex. One backward pass:
    /// inside a level, targets of marker edges have larger ids, so visiting
    /// states in descending order sees every successor first.
    pub fn trim(mut self) -> Self {
        let n = self.doc.len();
        let s = self.stride;
        let model = self.model;
        self.marker_levels.fill(0);
        for i in (0..=n).rev() {
            let (head, tail) = self.bitmap.split_at_mut((i + 1) * s);
            let row = &mut head[i * s..];
            let below = &tail[..s];
            let class = if i < n { model.class_of(self.doc[i]) } else { 0 };
            let mut has_marker = false;
            for w in (0..s).rev() {
                let mut word = row[w];
                while word != 0 {
                    let bit = 63 - word.leading_zeros() as usize;
                    word &= !(1u64 << bit);
                    let q = w * 64 + bit;
                    let qs = q as StateId;
                    let mut keep = if i < n {
                        model.letter_targets(class, qs).iter().any(|&t| bits::test(below, t as usize))
                    } else {
                        below[0] & 1 == 1 && model.is_final(qs)
                    };
                    for &(label, t) in model.marker_out(qs) {
                        if bits::test(row, t as usize) {
                            keep = true;
                            if !model.is_empty_label(label) {
                                has_marker = true;
                            }
                        }
                    }
                    if !keep {
                        bits::clear(row, q);
                    }
                }
            }
            if has_marker {
                bits::set(&mut self.marker_levels, i);
            }
        }
        self.trimmed = true;
        self
    }

    pub fn model(&self) -> &'a DagAutomaton {
        self.model
    }

    pub fn doc(&self) -> &'a [u8] {
        self.doc
    }

    pub fn kind(&self) -> DagKind {
        self.model.kind()
    }

    pub fn is_trimmed(&self) -> bool {
        self.trimmed
    }

    /// `|d|`.
    pub fn doc_len(&self) -> usize {
        self.doc.len()
    }

    /// Level of the final vertex, `|d| + 1`.
    pub fn final_level(&self) -> usize {
        self.doc.len() + 1
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// True when no mapping exists: the initial vertex was trimmed away.
    pub fn is_empty(&self) -> bool {
        !self.contains(0, self.model.initial())
    }

    #[inline]
    pub fn row(&self, level: usize) -> &[u64] {
        &self.bitmap[level * self.stride..(level + 1) * self.stride]
    }

    /// Prefetches the rows of `level` and `level + 1` and the letter read
    /// between them.
    pub fn prefetch_level(&self, level: usize) {
        if let Some(b) = self.doc.get(level) {
            bits::prefetch(b);
        }
        for r in [level, level + 1] {
            if let Some(w) = self.bitmap.get(r * self.stride) {
                bits::prefetch(w);
            }
        }
    }

    #[inline]
    pub fn contains(&self, level: usize, q: StateId) -> bool {
        (q as usize) < self.stride * 64 && bits::test(self.row(level), q as usize)
    }

    pub fn vertices_at(&self, level: usize) -> impl Iterator<Item = StateId> + '_ {
        bits::iter_ones(self.row(level)).map(|q| q as StateId)
    }

    pub fn level_width(&self, level: usize) -> usize {
        bits::count(self.row(level))
    }

    /// True when some edge between present vertices of `level` carries a
    /// label other than `∅` (trimmed DAGs only).
    #[inline]
    pub fn is_marker_level(&self, level: usize) -> bool {
        level <= self.doc.len() && bits::test(&self.marker_levels, level)
    }

    pub fn marker_levels(&self) -> impl Iterator<Item = usize> + '_ {
        bits::iter_ones(&self.marker_levels)
    }

    /// Targets of ε-edges out of `(level, q)`, all on `level + 1`. From the
    /// last document level the only possible target is the final vertex.
    pub fn eps_successors(&self, level: usize, q: StateId) -> EpsSuccessors<'_> {
        let n = self.doc.len();
        let targets: &[StateId] = if level < n {
            self.model.letter_targets(self.model.class_of(self.doc[level]), q)
        } else if level == n && self.model.is_final(q) {
            &[0]
        } else {
            &[]
        };
        EpsSuccessors { targets, row: self.row((level + 1).min(n + 1)) }
    }

    /// Marker edges out of `(level, q)` to present vertices, in label order
    /// with `∅` last.
    pub fn marker_edges(&self, level: usize, q: StateId) -> impl Iterator<Item = (LabelId, StateId)> + '_ {
        let row = self.row(level);
        self.model.marker_out(q).iter().copied().filter(move |&(_, t)| bits::test(row, t as usize))
    }

    /// Exact W, W_c, B and D over present vertices and derived edges.
    pub fn stats(&self) -> DagStats {
        let n = self.doc.len();
        let mut st = DagStats { depth_d: n + 1, ..DagStats::default() };
        let mut seen_labels = vec![usize::MAX; self.model.num_labels()];
        for i in 0..=n + 1 {
            let width = self.level_width(i);
            st.width_w = st.width_w.max(width);
            if i == n + 1 {
                st.complete_width_wc = st.complete_width_wc.max(width);
                continue;
            }
            let mut edges = 0;
            let mut labels = 0;
            for q in self.vertices_at(i) {
                edges += self.eps_successors(i, q).count();
                for (l, _) in self.marker_edges(i, q) {
                    edges += 1;
                    if seen_labels[l as usize] != i {
                        seen_labels[l as usize] = i;
                        labels += 1;
                    }
                }
            }
            st.complete_width_wc = st.complete_width_wc.max(width + edges);
            st.alphabet_size_b = st.alphabet_size_b.max(labels);
        }
        st
    }

    pub fn bitmap_bytes(&self) -> usize {
        (self.bitmap.len() + self.marker_levels.len()) * 8
    }

    /// `level marker-set` text for a label at a position.
    pub fn label_text(&self, label: LabelId, level: usize) -> String {
        let markers = self.model.label(label);
        if markers.is_empty() {
            return "empty".to_string();
        }
        let vars = self.model.variables();
        let parts: Vec<String> = markers.iter().map(|m| format!("{}@{level}", m.display(vars))).collect();
        parts.join(",")
    }

    /// Text listing of present vertices and derived edges; states are shown
    /// with their source-automaton ids.
    pub fn dump(&self) -> String {
        let n = self.doc.len();
        let mut out = String::new();
        for i in 0..=n {
            for q in self.vertices_at(i) {
                let _ = writeln!(out, "{i} {}", self.model.original(q));
            }
        }
        if self.contains(n + 1, 0) {
            let _ = writeln!(out, "{} final", n + 1);
        }
        for i in 0..=n {
            for q in self.vertices_at(i) {
                let oq = self.model.original(q);
                for (l, t) in self.marker_edges(i, q) {
                    let _ = writeln!(out, "{i} {oq} -> {} {}", self.model.original(t), self.label_text(l, i));
                }
                for t in self.eps_successors(i, q) {
                    if i == n {
                        let _ = writeln!(out, "{i} {oq} -> final eps");
                    } else {
                        let _ = writeln!(out, "{i} {oq} -> {} eps", self.model.original(t));
                    }
                }
            }
        }
        out
    }
}

pub struct EpsSuccessors<'r> {
    targets: &'r [StateId],
    row: &'r [u64],
}

impl Iterator for EpsSuccessors<'_> {
    type Item = StateId;

    #[inline]
    fn next(&mut self) -> Option<StateId> {
        while let Some((&t, rest)) = self.targets.split_first() {
            self.targets = rest;
            if bits::test(self.row, t as usize) {
                return Some(t);
            }
        }
        None
    }
}

fn close_level(model: &DagAutomaton, step: &[u64], out: &mut [u64]) {
    out.copy_from_slice(step);
    for q in bits::iter_ones(step) {
        if let Some(row) = model.marker_closure(q as StateId) {
            bits::or_into(out, row);
        }
    }
}

/// Product DAG of a general sequential VA's tables with `doc`, untrimmed.
pub fn build_product_dag<'a>(model: &'a DagAutomaton, doc: &'a [u8]) -> MappingDag<'a> {
    assert_eq!(model.kind(), DagKind::General, "tables were built from an extended VA");
    MappingDag::forward(model, doc)
}

/// Product DAG of an extended VA's tables with `doc`, untrimmed.
pub fn build_product_dag_extended<'a>(model: &'a DagAutomaton, doc: &'a [u8]) -> MappingDag<'a> {
    assert_eq!(model.kind(), DagKind::Extended, "tables were built from a plain VA");
    MappingDag::forward(model, doc)
}

pub fn trim_dag(dag: MappingDag<'_>) -> MappingDag<'_> {
    dag.trim()
}
