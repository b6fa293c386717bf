//! NEXTLEVEL for DAGs of general sequential VAs: flashlight search over the
//! decision tree of the level's labels, pruned by the S⁺/S⁻-path test.

use crate::bits::{self, StateSet};
use crate::dag::{LabelId, LevelSet, MappingDag};
use crate::frontend::StateId;

/// Label sets as bitmasks over a level's label list; bit 127 is the fresh
/// label of the virtual source vertex.
pub type LabelMask = u128;

const SOURCE_LABEL: LabelMask = 1 << 127;

/// A graph whose vertex ids are a topological order (edges go from smaller
/// to larger ids) and whose edge labels are indices below 127.
pub trait LevelGraph {
    fn vertex_count(&self) -> usize;

    /// Incoming edges of `v` as `(source, label)`.
    fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_;
}

/// Reusable per-vertex storage for [`spath_closure`].
#[derive(Clone, Debug, Default)]
pub struct ClosureScratch {
    chi: Vec<LabelMask>,
    reached: Vec<u64>,
}

impl ClosureScratch {
    fn prepare(&mut self, n: usize) {
        if self.chi.len() < n {
            self.chi.resize(n, 0);
        }
        let w = bits::words_for(n.max(1));
        if self.reached.len() < w {
            self.reached.resize(w, 0);
        }
    }
}

/// Vertices `v` with an S⁺/S⁻-path from some vertex of `lam` to `v`: a path
/// avoiding labels of `s_minus` that reads every label of `s_plus` once.
///
/// `candidates` must contain every vertex reachable from `lam` (extra vertices
/// are harmless). Edges labeled in `s_minus` are ignored; a fresh source with
/// edges into `lam` carries its own label; `χ` is assigned in topological
/// order, and the answer is the set of vertices whose `χ` is all of `s_plus`
/// plus the source label.
pub fn spath_closure<G: LevelGraph>(
    g: &G,
    lam: &StateSet,
    candidates: &[u64],
    s_plus: LabelMask,
    s_minus: LabelMask,
    scratch: &mut ClosureScratch,
    steps: &mut u64,
) -> StateSet {
    debug_assert_eq!(s_plus & s_minus, 0);
    let n = g.vertex_count();
    scratch.prepare(n);
    let want = s_plus | SOURCE_LABEL;
    let mut out = StateSet::new(n);
    let mut touched: Vec<usize> = Vec::new();
    for v in bits::iter_ones(candidates) {
        if v >= n {
            break;
        }
        *steps += 1;
        let from_source = lam.contains(v);
        let mut union: LabelMask = if from_source { SOURCE_LABEL } else { 0 };
        let mut reached = from_source;
        for (u, label) in g.in_edges(v) {
            *steps += 1;
            if !bits::test(&scratch.reached, u) {
                continue;
            }
            let bit: LabelMask = 1 << label;
            if s_minus & bit == 0 {
                union |= (scratch.chi[u] | bit) & want;
                reached = true;
            }
        }
        if !reached {
            continue;
        }
        // χ(v) is the union of the incoming sets when one of them equals it.
        let agrees = (from_source && union == SOURCE_LABEL)
            || g.in_edges(v).any(|(u, label)| {
                bits::test(&scratch.reached, u) && {
                    let bit: LabelMask = 1 << label;
                    s_minus & bit == 0 && (scratch.chi[u] | bit) & want == union
                }
            });
        let chi = if agrees { union } else { 0 };
        bits::set(&mut scratch.reached, v);
        touched.push(v);
        scratch.chi[v] = chi;
        if chi == want {
            out.insert(v);
        }
    }
    for v in touched {
        bits::clear(&mut scratch.reached, v);
        scratch.chi[v] = 0;
    }
    out
}

/// The marker edges of one DAG level, relabeled by position in `labels`.
pub struct DagLevel<'d, 'a> {
    pub dag: &'d MappingDag<'a>,
    pub level: usize,
    /// `LabelId` to index in the level's label list, `u8::MAX` when absent.
    pub label_index: &'d [u8],
}

impl LevelGraph for DagLevel<'_, '_> {
    fn vertex_count(&self) -> usize {
        self.dag.model().num_states() as usize
    }

    fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let row = self.dag.row(self.level);
        self.dag
            .model()
            .marker_in(v as StateId)
            .iter()
            .filter(move |&&(_, s)| bits::test(row, s as usize))
            .map(|&(l, s)| (s as usize, self.label_index[l as usize] as u32))
    }
}

#[derive(Clone, Debug)]
struct Node {
    depth: usize,
    plus: LabelMask,
    minus: LabelMask,
    /// Endpoints of P/N-paths that have an outgoing ε-edge.
    ends: StateSet,
}

/// Depth-first walk over the decision tree of one level set's labels.
#[derive(Clone, Debug)]
pub struct FlashlightCursor {
    lam: LevelSet,
    candidates: Vec<u64>,
    labels: Vec<LabelId>,
    label_index: Vec<u8>,
    stack: Vec<Node>,
}

impl FlashlightCursor {
    pub fn new(dag: &MappingDag<'_>, lam: &LevelSet, steps: &mut u64) -> Self {
        let model = dag.model();
        let level = lam.level;
        let row = dag.row(level);
        let mut candidates = lam.members.words().to_vec();
        candidates.resize(dag.stride(), 0);
        for v in lam.iter() {
            if let Some(c) = model.marker_closure(v) {
                bits::or_into(&mut candidates, c);
            }
            *steps += 1;
        }
        for (c, r) in candidates.iter_mut().zip(row) {
            *c &= *r;
        }
        let mut present = vec![false; model.num_labels()];
        for u in bits::iter_ones(&candidates) {
            for (l, _) in dag.marker_edges(level, u as StateId) {
                present[l as usize] = true;
                *steps += 1;
            }
        }
        let labels: Vec<LabelId> = (0..model.num_labels() as LabelId).filter(|&l| present[l as usize]).collect();
        debug_assert!(labels.len() < 127);
        let mut label_index = vec![u8::MAX; model.num_labels()];
        for (i, &l) in labels.iter().enumerate() {
            label_index[l as usize] = i as u8;
        }
        let mut cursor = FlashlightCursor { lam: lam.clone(), candidates, labels, label_index, stack: Vec::new() };
        // The root is good in a trimmed DAG; its endpoint set is only needed
        // when it is also a leaf.
        let ends = if cursor.labels.is_empty() {
            let mut scratch = ClosureScratch::default();
            cursor.good_ends(dag, 0, 0, &mut scratch, steps)
        } else {
            StateSet::default()
        };
        cursor.stack.push(Node { depth: 0, plus: 0, minus: 0, ends });
        cursor
    }

    pub fn level(&self) -> usize {
        self.lam.level
    }

    /// Labels of the decision tree, in tree order.
    pub fn labels(&self) -> &[LabelId] {
        &self.labels
    }

    fn good_ends(
        &self,
        dag: &MappingDag<'_>,
        plus: LabelMask,
        minus: LabelMask,
        scratch: &mut ClosureScratch,
        steps: &mut u64,
    ) -> StateSet {
        let g = DagLevel { dag, level: self.lam.level, label_index: &self.label_index };
        let mut ends = spath_closure(&g, &self.lam.members, &self.candidates, plus, minus, scratch, steps);
        let reached: Vec<usize> = ends.iter().collect();
        for v in reached {
            *steps += 1;
            if dag.eps_successors(self.lam.level, v as StateId).next().is_none() {
                ends.remove(v);
            }
        }
        ends
    }

    /// Next `(S⁺, Λ'')`; the `S⁺ = ∅` pair, when present, comes last.
    pub fn next(
        &mut self,
        dag: &MappingDag<'_>,
        scratch: &mut ClosureScratch,
        steps: &mut u64,
    ) -> Option<(Vec<LabelId>, LevelSet)> {
        let k = self.labels.len();
        while let Some(node) = self.stack.pop() {
            if node.depth == k {
                let level = self.lam.level;
                let mut next = StateSet::new(dag.stride() * 64);
                for v in node.ends.iter() {
                    for w in dag.eps_successors(level, v as StateId) {
                        next.insert(w as usize);
                        *steps += 1;
                    }
                }
                let plus: Vec<LabelId> = (0..k).filter(|&i| node.plus >> i & 1 == 1).map(|i| self.labels[i]).collect();
                return Some((plus, LevelSet::new(level + 1, next)));
            }
            let bit: LabelMask = 1 << node.depth;
            let minus_ends = self.good_ends(dag, node.plus, node.minus | bit, scratch, steps);
            let plus_ends = self.good_ends(dag, node.plus | bit, node.minus, scratch, steps);
            if !minus_ends.is_empty() {
                self.stack.push(Node {
                    depth: node.depth + 1,
                    plus: node.plus,
                    minus: node.minus | bit,
                    ends: minus_ends,
                });
            }
            if !plus_ends.is_empty() {
                self.stack.push(Node {
                    depth: node.depth + 1,
                    plus: node.plus | bit,
                    minus: node.minus,
                    ends: plus_ends,
                });
            }
        }
        None
    }
}

/// All `(S⁺, Λ'')` pairs of `NEXTLEVEL(Λ)` for a general DAG.
pub fn next_level_flashlight(dag: &MappingDag<'_>, lam: &LevelSet) -> Vec<(Vec<LabelId>, LevelSet)> {
    let mut steps = 0;
    let mut scratch = ClosureScratch::default();
    let mut c = FlashlightCursor::new(dag, lam, &mut steps);
    std::iter::from_fn(|| c.next(dag, &mut scratch, &mut steps)).collect()
}
