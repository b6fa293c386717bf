//! Jump levels, reachable levels and reachability matrices.
//!
//! Rows and columns of a matrix `Reach(i, j)` are the present vertices of
//! levels `i` and `j`, numbered by ascending state id.

use super::matrix::{or_row, padded_row_bytes, row_ones, BoolMatrix, MatrixRef};
use crate::bits::{self, StateSet};
use crate::dag::{LevelSet, MappingDag};
use crate::frontend::StateId;

const PREFETCH_BYTES: usize = 256;
const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndexOptions {
    /// Store every level instead of only the levels enumeration can reach.
    pub keep_all_levels: bool,
}

/// Heap bytes of the index structures, split as in the benchmark report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndexSize {
    pub dag_bytes: usize,
    pub jump_bytes: usize,
    pub matrix_bytes: usize,
}

/// Stored levels live in one byte arena. A record is
/// `[w][t][JL × w][(j, cols) × t][Reach(i, j) rows for each j > i]`, all
/// integers `u32`, so one jump reads a single contiguous region.
#[derive(Clone, Debug)]
pub struct JumpIndex {
    slot: Vec<u32>,
    arena: Vec<u8>,
    stored: usize,
    matrices: usize,
    matrix_bytes: usize,
    final_level: usize,
}

#[derive(Clone, Copy)]
struct Record<'r> {
    level: usize,
    width: usize,
    bytes: &'r [u8],
}

#[inline]
fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_ne_bytes(b[at..at + 4].try_into().unwrap())
}

impl<'r> Record<'r> {
    fn targets(&self) -> usize {
        read_u32(self.bytes, 4) as usize
    }

    #[inline]
    fn jl(&self, rank: usize) -> u32 {
        read_u32(self.bytes, 8 + 4 * rank)
    }

    fn target(&self, k: usize) -> (u32, usize) {
        let at = 8 + 4 * self.width + 8 * k;
        (read_u32(self.bytes, at), read_u32(self.bytes, at + 4) as usize)
    }

    fn levels(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.targets()).map(|k| self.target(k).0 as usize)
    }

    /// `Reach(level, j)`, found by walking the target headers.
    fn matrix(&self, j: u32) -> Option<MatrixRef<'r>> {
        let t = self.targets();
        let mut at = 8 + 4 * self.width + 8 * t;
        for k in 0..t {
            let (jk, cols) = self.target(k);
            if jk as usize == self.level {
                continue;
            }
            let len = self.width * padded_row_bytes(cols);
            if jk == j {
                return Some(MatrixRef::new(self.width, cols, &self.bytes[at..at + len]));
            }
            at += len;
        }
        None
    }
}

fn push_u32(arena: &mut Vec<u8>, x: u32) {
    arena.extend_from_slice(&x.to_ne_bytes());
}

impl JumpIndex {
    /// Keeps only levels that enumeration can start from: level 0 and the
    /// level after each level carrying a non-`∅` marker edge.
    pub fn new(dag: &MappingDag<'_>) -> Self {
        Self::with_options(dag, IndexOptions::default())
    }

    /// One reverse sweep over the trimmed DAG computing `JL`, `Rlevel` and
    /// `Reach(i, j) = Reach(i, i+1) × Reach(i+1, j)` in decreasing `i`.
    pub fn with_options(dag: &MappingDag<'_>, opts: IndexOptions) -> Self {
        assert!(dag.is_trimmed(), "jump index needs a trimmed DAG");
        let n = dag.doc_len();
        let model = dag.model();
        let q = model.num_states() as usize;
        let mut index = JumpIndex {
            slot: bits::zeroed_large::<u32>(n + 2),
            arena: Vec::new(),
            stored: 0,
            matrices: 0,
            matrix_bytes: 0,
            final_level: n + 1,
        };
        index.slot.fill(NONE);
        if dag.is_empty() {
            return index;
        }
        let keep = |i: usize| opts.keep_all_levels || i == 0 || dag.is_marker_level(i - 1);

        // State-indexed scratch for the current level and the one below.
        let mut cur_jl = vec![NONE; q.max(1)];
        let mut next_jl = vec![NONE; q.max(1)];
        let mut cur_rank = vec![NONE; q.max(1)];
        let mut next_rank = vec![NONE; q.max(1)];
        next_jl[0] = (n + 1) as u32;
        next_rank[0] = 0;
        let mut next_mats: Vec<(u32, BoolMatrix)> = Vec::new();
        let mut next_width = 1usize;
        if keep(n + 1) {
            index.store(n + 1, &[(n + 1) as u32], &[(n + 1) as u32], &[]);
        }

        let mut present: Vec<StateId> = Vec::with_capacity(q);
        let mut targets: Vec<u32> = Vec::new();
        let mut jls: Vec<u32> = Vec::with_capacity(q);
        for i in (0..=n).rev() {
            present.clear();
            present.extend(dag.vertices_at(i));
            for (r, &v) in present.iter().enumerate() {
                cur_rank[v as usize] = r as u32;
            }
            for &v in present.iter().rev() {
                let mut jl = NONE;
                for (label, t) in dag.marker_edges(i, v) {
                    if model.is_empty_label(label) {
                        jl = jl.min(cur_jl[t as usize]);
                    } else {
                        jl = i as u32;
                        break;
                    }
                }
                if jl != i as u32 {
                    for t in dag.eps_successors(i, v) {
                        jl = jl.min(next_jl[t as usize]);
                    }
                }
                debug_assert_ne!(jl, NONE, "vertex without successor in a trimmed DAG");
                cur_jl[v as usize] = jl;
            }
            targets.clear();
            targets.extend(present.iter().map(|&v| cur_jl[v as usize]));
            targets.sort_unstable();
            targets.dedup();

            let mut cur_mats: Vec<(u32, BoolMatrix)> = Vec::new();
            if targets.iter().any(|&j| j as usize > i) {
                // Reach(i, i+1): ε-edges, after any number of ∅-edges.
                let mut step = BoolMatrix::zeros(present.len(), next_width);
                for (r, &v) in present.iter().enumerate().rev() {
                    for t in dag.eps_successors(i, v) {
                        step.set(r, next_rank[t as usize] as usize);
                    }
                    for (label, t) in dag.marker_edges(i, v) {
                        if model.is_empty_label(label) {
                            let tr = cur_rank[t as usize] as usize;
                            let (lo, hi) = step_rows(&mut step, r, tr);
                            or_row(lo, hi);
                        }
                    }
                }
                for &j in targets.iter().filter(|&&j| j as usize > i) {
                    let m = if j as usize == i + 1 {
                        step.clone()
                    } else {
                        let right = next_mats
                            .iter()
                            .find(|(k, _)| *k == j)
                            .map(|(_, m)| m)
                            .unwrap_or_else(|| panic!("Reach({}, {j}) missing while building level {i}", i + 1));
                        step.multiply(right).expect("level widths agree")
                    };
                    cur_mats.push((j, m));
                }
            }

            if keep(i) {
                jls.clear();
                jls.extend(present.iter().map(|&v| cur_jl[v as usize]));
                index.store(i, &jls, &targets, &cur_mats);
            }
            std::mem::swap(&mut cur_jl, &mut next_jl);
            std::mem::swap(&mut cur_rank, &mut next_rank);
            next_mats = cur_mats;
            next_width = present.len();
        }
        index.arena.shrink_to_fit();
        index
    }

    fn store(&mut self, level: usize, jl: &[u32], targets: &[u32], mats: &[(u32, BoolMatrix)]) {
        let offset = u32::try_from(self.arena.len()).expect("jump index arena exceeds 4 GiB");
        self.slot[level] = offset;
        self.stored += 1;
        push_u32(&mut self.arena, jl.len() as u32);
        push_u32(&mut self.arena, targets.len() as u32);
        for &x in jl {
            push_u32(&mut self.arena, x);
        }
        let mut mi = mats.iter();
        for &j in targets {
            push_u32(&mut self.arena, j);
            let cols = if j as usize == level { 0 } else { mi.next().expect("matrix per later target").1.cols() };
            push_u32(&mut self.arena, cols as u32);
        }
        for (_, m) in mats {
            self.arena.extend_from_slice(m.data());
            self.matrices += 1;
            self.matrix_bytes += m.bytes();
        }
    }

    pub fn final_level(&self) -> usize {
        self.final_level
    }

    fn record(&self, level: usize) -> Option<Record<'_>> {
        let s = *self.slot.get(level)?;
        if s == NONE {
            return None;
        }
        let bytes = &self.arena[s as usize..];
        Some(Record { level, width: read_u32(bytes, 0) as usize, bytes })
    }

    /// Prefetches the slot of `level`.
    pub fn prefetch_slot(&self, level: usize) {
        if let Some(s) = self.slot.get(level) {
            bits::prefetch(s);
        }
    }

    /// Prefetches the head of the record of `level`.
    pub fn prefetch_record(&self, level: usize) {
        let Some(&s) = self.slot.get(level) else { return };
        if s == NONE {
            return;
        }
        let s = s as usize;
        for off in (s..self.arena.len().min(s + PREFETCH_BYTES)).step_by(64) {
            bits::prefetch(&self.arena[off]);
        }
    }

    pub fn has_level(&self, level: usize) -> bool {
        self.record(level).is_some()
    }

    /// `JL(v)` for a present vertex of a stored level.
    pub fn jump_level(&self, dag: &MappingDag<'_>, level: usize, q: StateId) -> Option<usize> {
        let e = self.record(level)?;
        if level == self.final_level {
            return (q == 0).then_some(level);
        }
        if !dag.contains(level, q) {
            return None;
        }
        let r = bits::rank(dag.row(level), q as usize);
        Some(e.jl(r) as usize)
    }

    /// `Rlevel(i)` for a stored level, ascending.
    pub fn reachable_levels(&self, level: usize) -> Option<Vec<usize>> {
        self.record(level).map(|e| e.levels().collect())
    }

    /// `Reach(i, j)` when it was stored.
    pub fn reach(&self, i: usize, j: usize) -> Option<MatrixRef<'_>> {
        self.record(i)?.matrix(u32::try_from(j).ok()?)
    }

    /// Levels with a stored record, ascending.
    pub fn stored_levels(&self) -> impl Iterator<Item = usize> + '_ {
        self.slot.iter().enumerate().filter(|(_, &s)| s != NONE).map(|(i, _)| i)
    }

    pub fn num_stored_levels(&self) -> usize {
        self.stored
    }

    pub fn num_matrices(&self) -> usize {
        self.matrices
    }

    /// `JUMP(Λ)`: `Λ` itself when a member has a non-`∅` marker edge,
    /// otherwise the union of the rows of `Reach(level, JL(Λ))` selected by `Λ`.
    pub fn jump(&self, dag: &MappingDag<'_>, lam: &LevelSet) -> LevelSet {
        let mut steps = 0;
        self.jump_counted(dag, lam, &mut steps)
    }

    /// [`JumpIndex::jump`], adding the number of vertex and row-word touches to `steps`.
    pub fn jump_counted(&self, dag: &MappingDag<'_>, lam: &LevelSet, steps: &mut u64) -> LevelSet {
        let i = lam.level;
        if i == self.final_level {
            return lam.clone();
        }
        let e = self.record(i).unwrap_or_else(|| panic!("jump from level {i}, which the index did not keep"));
        let row = dag.row(i);
        let mut ranks: Vec<usize> = Vec::with_capacity(lam.len());
        let mut j = u32::MAX;
        for v in lam.iter() {
            debug_assert!(dag.contains(i, v), "level set member not in the DAG");
            let r = bits::rank(row, v as usize);
            ranks.push(r);
            j = j.min(e.jl(r));
        }
        *steps += ranks.len() as u64 + row.len() as u64;
        if j as usize == i {
            return lam.clone();
        }
        dag.prefetch_level(j as usize);
        let m = e.matrix(j).unwrap_or_else(|| panic!("Reach({i}, {j}) not stored"));
        let mut acc = vec![0u8; m.row_bytes()];
        for &r in &ranks {
            or_row(&mut acc, m.row(r));
        }
        *steps += (ranks.len() * m.row_bytes()).div_ceil(8) as u64;
        let j = j as usize;
        let mut members = StateSet::new(dag.stride() * 64);
        if j == self.final_level {
            members.insert(0);
            return LevelSet::new(j, members);
        }
        let mut wanted = row_ones(&acc).peekable();
        for (rank, v) in dag.vertices_at(j).enumerate() {
            *steps += 1;
            match wanted.peek() {
                Some(&w) if w == rank => {
                    members.insert(v as usize);
                    wanted.next();
                }
                Some(_) => {}
                None => break,
            }
        }
        LevelSet::new(j, members)
    }

    pub fn size(&self, dag: &MappingDag<'_>) -> IndexSize {
        let jump_bytes = self.slot.len() * 4 + self.arena.len() - self.matrix_bytes;
        IndexSize { dag_bytes: dag.bitmap_bytes(), jump_bytes, matrix_bytes: self.matrix_bytes }
    }
}

/// Row `dst` mutably and row `src` immutably; `src > dst`.
fn step_rows(m: &mut BoolMatrix, dst: usize, src: usize) -> (&mut [u8], &[u8]) {
    assert!(src > dst, "∅-edge targets have larger ids");
    let rb = m.row_bytes();
    let (head, tail) = m.rows_split((dst + 1) * rb);
    (&mut head[dst * rb..], &tail[(src - dst - 1) * rb..(src - dst) * rb])
}

pub fn build_jump_index(dag: &MappingDag<'_>) -> JumpIndex {
    JumpIndex::new(dag)
}
