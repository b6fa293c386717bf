//! Exhaustive ground truth: every accepting run of an automaton on a
//! document, and every source-to-final path of a mapping DAG.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::dag::{LevelSet, MappingDag};
use crate::enumerate::Mapping;
use crate::error::{Error, Result};
use crate::frontend::{ExtendedVA, Marker, StateId, VarAutomaton};

/// Configuration cap for the exhaustive searches.
pub const ORACLE_BUDGET: u64 = 10_000_000;

struct Config {
    state: StateId,
    pos: usize,
    used: u64,
    pairs: Vec<(Marker, usize)>,
}

fn accepts_markers(used: u64, m: Marker) -> bool {
    let bit = 1u64 << m.index();
    used & bit == 0 && (m.is_open() || used & (1u64 << m.var().open().index()) != 0)
}

fn all_closed(used: u64) -> bool {
    let opens = used & 0x5555_5555_5555_5555;
    let closes = (used >> 1) & 0x5555_5555_5555_5555;
    opens == closes
}

/// Mappings of all valid accepting runs of `va` on `doc`, by depth-first
/// search over configurations `(state, position, pairs so far)`.
pub fn oracle_enumerate(va: &VarAutomaton, doc: &[u8]) -> Result<BTreeSet<Mapping>> {
    oracle_enumerate_with_budget(va, doc, ORACLE_BUDGET)
}

pub fn oracle_enumerate_with_budget(va: &VarAutomaton, doc: &[u8], budget: u64) -> Result<BTreeSet<Mapping>> {
    assert!(va.num_variables() <= 32, "oracle supports at most 32 variables");
    let n = va.num_states() as usize;
    let mut letters = vec![Vec::new(); n];
    for &(s, set, d) in va.letter_transitions() {
        letters[s as usize].push((set, d));
    }
    let mut markers = vec![Vec::new(); n];
    for &(s, m, d) in va.marker_transitions() {
        markers[s as usize].push((m, d));
    }
    let mut out = BTreeSet::new();
    let mut explored = 0u64;
    let mut seen = HashSet::new();
    let mut stack = vec![Config { state: va.initial(), pos: 0, used: 0, pairs: Vec::new() }];
    while let Some(c) = stack.pop() {
        if !seen.insert((c.state, c.pos, c.pairs.clone())) {
            continue;
        }
        explored += 1;
        if explored > budget {
            return Err(Error::OracleBudget { budget });
        }
        if c.pos == doc.len() && va.is_final(c.state) && all_closed(c.used) {
            out.insert(Mapping::from_pairs(c.pairs.clone()));
        }
        for &(m, d) in &markers[c.state as usize] {
            if accepts_markers(c.used, m) {
                let mut pairs = c.pairs.clone();
                pairs.push((m, c.pos));
                stack.push(Config { state: d, pos: c.pos, used: c.used | 1 << m.index(), pairs });
            }
        }
        if let Some(&b) = doc.get(c.pos) {
            for &(set, d) in &letters[c.state as usize] {
                if set.contains(b) {
                    stack.push(Config { state: d, pos: c.pos + 1, used: c.used, pairs: c.pairs.clone() });
                }
            }
        }
    }
    Ok(out)
}

/// Mappings of all valid accepting runs of an extended VA: each position
/// reads one marker set, then one letter.
pub fn oracle_enumerate_extended(eva: &ExtendedVA, doc: &[u8]) -> Result<BTreeSet<Mapping>> {
    let n = eva.num_states() as usize;
    let mut letters = vec![Vec::new(); n];
    for (s, set, d) in eva.letter_transitions() {
        letters[*s as usize].push((*set, *d));
    }
    let mut evs = vec![Vec::new(); n];
    for (s, m, d) in eva.ev_transitions() {
        evs[*s as usize].push((m.as_slice(), *d));
    }
    let mut out = BTreeSet::new();
    let mut explored = 0u64;
    let mut seen = HashSet::new();
    let mut stack = vec![Config { state: eva.initial(), pos: 0, used: 0, pairs: Vec::new() }];
    while let Some(c) = stack.pop() {
        if !seen.insert((c.state, c.pos, c.pairs.clone())) {
            continue;
        }
        explored += 1;
        if explored > ORACLE_BUDGET {
            return Err(Error::OracleBudget { budget: ORACLE_BUDGET });
        }
        'ev: for &(set, p) in &evs[c.state as usize] {
            let mut used = c.used;
            for &m in set.iter().filter(|m| m.is_open()).chain(set.iter().filter(|m| !m.is_open())) {
                if !accepts_markers(used, m) {
                    continue 'ev;
                }
                used |= 1 << m.index();
            }
            let mut pairs = c.pairs.clone();
            pairs.extend(set.iter().map(|&m| (m, c.pos)));
            if c.pos == doc.len() {
                if eva.is_final(p) && all_closed(used) {
                    out.insert(Mapping::from_pairs(pairs));
                }
                continue;
            }
            for &(letters, d) in &letters[p as usize] {
                if letters.contains(doc[c.pos]) {
                    stack.push(Config { state: d, pos: c.pos + 1, used, pairs: pairs.clone() });
                }
            }
        }
    }
    Ok(out)
}

type PathState = (usize, StateId, Vec<(Marker, usize)>);

/// Label sets of every path from the root to the final vertex of a trimmed
/// DAG, walking marker and ε-edges explicitly. Returns the multiset size
/// (number of paths) alongside the distinct mappings.
pub fn dag_path_mappings(dag: &MappingDag<'_>) -> Result<(u64, BTreeSet<Mapping>)> {
    let mut out = BTreeSet::new();
    if dag.is_empty() {
        return Ok((0, out));
    }
    let model = dag.model();
    let fin = dag.final_level();
    let mut paths = 0u64;
    let mut explored = 0u64;
    let mut stack: Vec<PathState> = vec![(0, model.initial(), Vec::new())];
    while let Some((level, q, pairs)) = stack.pop() {
        explored += 1;
        if explored > ORACLE_BUDGET {
            return Err(Error::OracleBudget { budget: ORACLE_BUDGET });
        }
        if level == fin {
            paths += 1;
            out.insert(Mapping::from_pairs(pairs));
            continue;
        }
        for (l, t) in dag.marker_edges(level, q) {
            let mut next = pairs.clone();
            next.extend(model.label(l).iter().map(|&m| (m, level)));
            stack.push((level, t, next));
        }
        for t in dag.eps_successors(level, q) {
            stack.push((level + 1, t, pairs.clone()));
        }
    }
    Ok((paths, out))
}

/// Mappings of the paths from a level set to the final vertex, with the
/// labels below the level set omitted. Suffix sets are memoized per vertex.
pub struct SuffixOracle<'d, 'a> {
    dag: &'d MappingDag<'a>,
    memo: HashMap<(usize, StateId), Rc<BTreeSet<Mapping>>>,
}

impl<'d, 'a> SuffixOracle<'d, 'a> {
    pub fn new(dag: &'d MappingDag<'a>) -> Self {
        SuffixOracle { dag, memo: HashMap::new() }
    }

    pub fn mappings(&mut self, lam: &LevelSet) -> BTreeSet<Mapping> {
        let mut out = BTreeSet::new();
        for q in lam.iter() {
            out.extend(self.vertex(lam.level, q).iter().cloned());
        }
        out
    }

    fn vertex(&mut self, level: usize, q: StateId) -> Rc<BTreeSet<Mapping>> {
        if let Some(m) = self.memo.get(&(level, q)) {
            return m.clone();
        }
        let dag = self.dag;
        let mut out = BTreeSet::new();
        if level == dag.final_level() {
            out.insert(Mapping::empty());
        } else {
            let edges: Vec<_> = dag.marker_edges(level, q).collect();
            for (l, t) in edges {
                let label = dag.model().label(l);
                for m in self.vertex(level, t).iter() {
                    let mut pairs = m.pairs().to_vec();
                    pairs.extend(label.iter().map(|&x| (x, level)));
                    out.insert(Mapping::from_pairs(pairs));
                }
            }
            let next: Vec<_> = dag.eps_successors(level, q).collect();
            for t in next {
                out.extend(self.vertex(level + 1, t).iter().cloned());
            }
        }
        let out = Rc::new(out);
        self.memo.insert((level, q), out.clone());
        out
    }
}

/// [`SuffixOracle::mappings`] without reuse.
pub fn level_set_mappings(dag: &MappingDag<'_>, lam: &LevelSet) -> BTreeSet<Mapping> {
    SuffixOracle::new(dag).mappings(lam)
}
