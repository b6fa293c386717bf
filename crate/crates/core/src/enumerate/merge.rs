//! NEXTLEVEL for DAGs of extended VAs: a k-way merge of the members' sorted
//! marker-edge lists, one output per distinct label.

use crate::dag::{LabelId, LevelSet, MappingDag};
use crate::frontend::StateId;

#[derive(Clone, Debug)]
pub struct MergeCursor {
    level: usize,
    members: Vec<StateId>,
    heads: Vec<usize>,
}

impl MergeCursor {
    pub fn new(lam: &LevelSet) -> Self {
        let members: Vec<StateId> = lam.iter().collect();
        let heads = vec![0; members.len()];
        MergeCursor { level: lam.level, members, heads }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Next `(label, Λ'')` in label order, `∅` last.
    pub fn next(&mut self, dag: &MappingDag<'_>, steps: &mut u64) -> Option<(LabelId, LevelSet)> {
        let model = dag.model();
        let level = self.level;
        let mut best: Option<LabelId> = None;
        for (k, &v) in self.members.iter().enumerate() {
            let edges = model.marker_out(v);
            while self.heads[k] < edges.len() && !dag.contains(level, edges[self.heads[k]].1) {
                self.heads[k] += 1;
                *steps += 1;
            }
            if let Some(&(l, _)) = edges.get(self.heads[k]) {
                best = Some(best.map_or(l, |b| b.min(l)));
            }
            *steps += 1;
        }
        let label = best?;
        let capacity = dag.stride() * 64;
        let mut mid = crate::bits::StateSet::new(capacity);
        for (k, &v) in self.members.iter().enumerate() {
            let edges = model.marker_out(v);
            while let Some(&(l, t)) = edges.get(self.heads[k]) {
                if l != label {
                    break;
                }
                if dag.contains(level, t) {
                    mid.insert(t as usize);
                }
                self.heads[k] += 1;
                *steps += 1;
            }
        }
        let mut next = crate::bits::StateSet::new(capacity);
        for t in mid.iter() {
            for w in dag.eps_successors(level, t as StateId) {
                next.insert(w as usize);
                *steps += 1;
            }
        }
        debug_assert!(!next.is_empty(), "trimmed DAG: marker targets continue");
        Some((label, LevelSet::new(level + 1, next)))
    }
}

/// All `(label, Λ'')` pairs of `NEXTLEVEL(Λ)` for an extended DAG.
pub fn next_level_extended(dag: &MappingDag<'_>, lam: &LevelSet) -> Vec<(LabelId, LevelSet)> {
    let mut c = MergeCursor::new(lam);
    let mut steps = 0;
    std::iter::from_fn(|| c.next(dag, &mut steps)).collect()
}
