//! Duplicate-free enumeration of the mappings of a trimmed mapping DAG.
//!
//! The recursion `ENUM(Λ, Mapping)` runs on an explicit stack. A frame holds
//! the NEXTLEVEL cursor of a jumped level set and the labels chosen above it,
//! as a shared linked chain. The `∅` item always comes last, so its frame is
//! popped before descending, which keeps at most `r + 1` frames alive while
//! producing a mapping of size `r`.

pub mod flashlight;
pub mod merge;

use std::fmt;
use std::rc::Rc;

use crate::dag::{DagKind, LabelId, LevelSet, MappingDag};
use crate::frontend::{Marker, MarkerKind, VarId};
use crate::jump::JumpIndex;

pub use flashlight::{next_level_flashlight, spath_closure, ClosureScratch, FlashlightCursor, LabelMask, LevelGraph};
pub use merge::{next_level_extended, MergeCursor};

/// Half-open document range `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// A valid set of `(marker, position)` pairs, sorted by position, then opens
/// before closes, then variable id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mapping {
    pairs: Vec<(Marker, usize)>,
}

fn pair_key(&(m, p): &(Marker, usize)) -> (usize, MarkerKind, VarId) {
    (p, m.kind(), m.var())
}

impl Mapping {
    /// Sorts `pairs` into canonical order.
    pub fn from_pairs(mut pairs: Vec<(Marker, usize)>) -> Self {
        pairs.sort_by_key(pair_key);
        Mapping { pairs }
    }

    pub fn empty() -> Self {
        Mapping { pairs: Vec::new() }
    }

    pub fn pairs(&self) -> &[(Marker, usize)] {
        &self.pairs
    }

    /// Number of pairs, `r`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, m: Marker) -> Option<usize> {
        self.pairs.iter().find(|(x, _)| *x == m).map(|&(_, p)| p)
    }

    /// Assigned variables with their spans, by variable id.
    pub fn spans(&self) -> Vec<(VarId, Span)> {
        let mut out: Vec<(VarId, Span)> = self
            .pairs
            .iter()
            .filter(|(m, _)| m.is_open())
            .filter_map(|&(m, start)| {
                let end = self.position(m.var().close())?;
                Some((m.var(), Span { start, end }))
            })
            .collect();
        out.sort();
        out
    }

    /// Each marker at most once, each close preceded by its open at an
    /// earlier or equal position, and each open closed.
    pub fn is_valid(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for &(m, _) in &self.pairs {
            if !seen.insert(m) {
                return false;
            }
        }
        self.pairs.iter().all(|&(m, p)| {
            if m.is_open() {
                self.position(m.var().close()).is_some_and(|q| p <= q)
            } else {
                self.position(m.var().open()).is_some_and(|q| q <= p)
            }
        })
    }
}

#[derive(Debug)]
struct ChainNode {
    level: usize,
    markers: Box<[Marker]>,
    prev: Chain,
}

type Chain = Option<Rc<ChainNode>>;

/// Materializes the pairs of a label chain, checking the union is disjoint.
fn emit_mapping(chain: &Chain) -> Mapping {
    let mut pairs = Vec::new();
    let mut cur = chain.as_deref();
    while let Some(node) = cur {
        pairs.extend(node.markers.iter().map(|&m| (m, node.level)));
        cur = node.prev.as_deref();
    }
    let m = Mapping::from_pairs(pairs);
    debug_assert!(m.pairs.windows(2).all(|w| w[0] != w[1]), "label chain repeats a pair");
    m
}

#[derive(Clone, Debug)]
enum Cursor {
    Merge(MergeCursor),
    Flash(FlashlightCursor),
}

struct Frame {
    cursor: Cursor,
    chain: Chain,
}

/// One step of an instrumented enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// A jumped level set was expanded with NEXTLEVEL.
    Expand { level: usize, width: usize },
    /// NEXTLEVEL produced a label set.
    Item { level: usize, empty: bool },
    /// After an `∅` item the cursor was drained; `extra` counts items it still had.
    AfterEmpty { level: usize, extra: usize },
    /// A mapping was output with this many frames alive, the emitting call included.
    Emit { depth: usize, size: usize },
}

/// Iterator over the mappings of a trimmed DAG.
pub struct Enumeration<'e, 'a> {
    dag: &'e MappingDag<'a>,
    index: &'e JumpIndex,
    stack: Vec<Frame>,
    scratch: ClosureScratch,
    started: bool,
    steps: u64,
    last_steps: u64,
    total_steps: u64,
    max_depth: usize,
    trace: Option<Vec<TraceEvent>>,
}

impl<'e, 'a> Enumeration<'e, 'a> {
    pub fn new(dag: &'e MappingDag<'a>, index: &'e JumpIndex) -> Self {
        Enumeration {
            dag,
            index,
            stack: Vec::new(),
            scratch: ClosureScratch::default(),
            started: false,
            steps: 0,
            last_steps: 0,
            total_steps: 0,
            max_depth: 0,
            trace: None,
        }
    }

    /// Records a [`TraceEvent`] log; `∅` items also drain their cursor to
    /// check nothing follows them.
    pub fn traced(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn trace(&self) -> &[TraceEvent] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Vertex and edge touches spent producing the most recent mapping.
    pub fn last_steps(&self) -> u64 {
        self.last_steps
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps + self.steps
    }

    /// Largest number of simultaneously live frames seen at an emission.
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn record(&mut self, e: TraceEvent) {
        if let Some(t) = self.trace.as_mut() {
            t.push(e);
        }
    }

    fn cursor_for(&mut self, lam: &LevelSet) -> Cursor {
        match self.dag.kind() {
            DagKind::Extended => Cursor::Merge(MergeCursor::new(lam)),
            DagKind::General => Cursor::Flash(FlashlightCursor::new(self.dag, lam, &mut self.steps)),
        }
    }

    fn next_item(&mut self) -> Option<(Vec<Marker>, LevelSet)> {
        let dag = self.dag;
        let frame = self.stack.last_mut()?;
        let model = dag.model();
        match &mut frame.cursor {
            Cursor::Merge(c) => {
                c.next(dag, &mut self.steps).map(|(l, lam): (LabelId, LevelSet)| (model.label(l).to_vec(), lam))
            }
            Cursor::Flash(c) => c.next(dag, &mut self.scratch, &mut self.steps).map(|(ls, lam)| {
                let mut markers: Vec<Marker> = ls.iter().flat_map(|&l| model.label(l).iter().copied()).collect();
                markers.sort_unstable();
                (markers, lam)
            }),
        }
    }

    /// `ENUM(Λ, chain)` up to its first NEXTLEVEL: jump, then either output or
    /// push a frame.
    fn descend(&mut self, lam: LevelSet, chain: Chain) -> Option<Mapping> {
        let jumped = self.index.jump_counted(self.dag, &lam, &mut self.steps);
        if jumped.level == self.dag.final_level() {
            let depth = self.stack.len() + 1;
            self.max_depth = self.max_depth.max(depth);
            let m = emit_mapping(&chain);
            self.steps += m.len() as u64 + 1;
            self.record(TraceEvent::Emit { depth, size: m.len() });
            return Some(m);
        }
        self.record(TraceEvent::Expand { level: jumped.level, width: jumped.len() });
        self.index.prefetch_slot(jumped.level + 1);
        let cursor = self.cursor_for(&jumped);
        self.index.prefetch_record(jumped.level + 1);
        self.stack.push(Frame { cursor, chain });
        None
    }

    fn finish(&mut self, m: Mapping) -> Option<Mapping> {
        self.last_steps = self.steps;
        self.total_steps += self.steps;
        self.steps = 0;
        Some(m)
    }
}

impl Iterator for Enumeration<'_, '_> {
    type Item = Mapping;

    fn next(&mut self) -> Option<Mapping> {
        if !self.started {
            self.started = true;
            if self.dag.is_empty() {
                return None;
            }
            if self.dag.model().variables().is_empty() {
                self.max_depth = 1;
                self.record(TraceEvent::Emit { depth: 1, size: 0 });
                return self.finish(Mapping::empty());
            }
            let start = LevelSet::singleton(0, self.dag.model().initial(), self.dag.stride() * 64);
            if let Some(m) = self.descend(start, None) {
                return self.finish(m);
            }
        }
        loop {
            let level = self.stack.last()?.cursor_level();
            let Some((markers, lam)) = self.next_item() else {
                self.stack.pop();
                continue;
            };
            let empty = markers.is_empty();
            self.record(TraceEvent::Item { level, empty });
            let frame = self.stack.last().expect("frame still live");
            let chain = if empty {
                frame.chain.clone()
            } else {
                Some(Rc::new(ChainNode { level, markers: markers.into_boxed_slice(), prev: frame.chain.clone() }))
            };
            if empty {
                if self.trace.is_some() {
                    let mut extra = 0;
                    while self.next_item().is_some() {
                        extra += 1;
                    }
                    self.record(TraceEvent::AfterEmpty { level, extra });
                }
                self.stack.pop();
            }
            if let Some(m) = self.descend(lam, chain) {
                return self.finish(m);
            }
        }
    }
}

impl Frame {
    fn cursor_level(&self) -> usize {
        match &self.cursor {
            Cursor::Merge(c) => c.level(),
            Cursor::Flash(c) => c.level(),
        }
    }
}

/// Every mapping of the DAG, in enumeration order.
pub fn enumerate<'e, 'a>(dag: &'e MappingDag<'a>, index: &'e JumpIndex) -> Enumeration<'e, 'a> {
    Enumeration::new(dag, index)
}
