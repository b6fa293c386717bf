#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use docspan::dag::{DagAutomaton, LevelSet, MappingDag};
use docspan::enumerate::{enumerate, Mapping};
use docspan::frontend::{make_sequential, to_extended_va, StateId, VarAutomaton, DEFAULT_EXTENDED_BUDGET};
use docspan::jump::JumpIndex;
use docspan::synth::{random_doc, random_va, RandomVaParams};
use rand::Rng;

pub const EXAMPLE_PATTERN: &str = "(.*_)?x{[^@_]+@[^@_]+}(_.*)?";
pub const EXAMPLE_DOC: &[u8] = b"a_a@b_b@c";

/// A random sequential, trimmed VA with at most 8 states after
/// sequentialization is not guaranteed; the source VA has at most 8.
pub struct Instance {
    pub source: VarAutomaton,
    pub va: VarAutomaton,
    pub doc: Vec<u8>,
}

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let params = RandomVaParams::default();
    loop {
        let source = random_va(rng, &params);
        let seq = make_sequential(&source, 1 << 20).expect("within budget");
        let Some(va) = seq.trim() else { continue };
        let doc = random_doc(rng, b"ab", 10);
        return Instance { source, va, doc };
    }
}

pub fn general_model(va: &VarAutomaton) -> DagAutomaton {
    DagAutomaton::general(va).unwrap()
}

pub fn extended_model(va: &VarAutomaton) -> DagAutomaton {
    DagAutomaton::extended(&to_extended_va(va, DEFAULT_EXTENDED_BUDGET).unwrap()).unwrap()
}

/// Runs the enumeration and checks it has no duplicates.
pub fn enumerate_checked(model: &DagAutomaton, doc: &[u8]) -> BTreeSet<Mapping> {
    let dag = MappingDag::new(model, doc);
    let index = JumpIndex::new(&dag);
    let mut out = BTreeSet::new();
    for m in enumerate(&dag, &index) {
        assert!(m.is_valid(), "invalid mapping {m:?}");
        assert!(out.insert(m.clone()), "duplicate mapping {m:?}");
    }
    out
}

/// First level `j ≥ level` where some vertex reachable from `(level, q)` over
/// ε- and `∅`-edges has a non-`∅` marker edge or is the final vertex.
pub fn bfs_jump_level(dag: &MappingDag<'_>, level: usize, q: StateId) -> Option<usize> {
    let model = dag.model();
    let mut frontier: BTreeSet<StateId> = [q].into();
    let mut l = level;
    loop {
        if l == dag.final_level() {
            return (!frontier.is_empty()).then_some(l);
        }
        let mut seen: HashSet<StateId> = frontier.iter().copied().collect();
        let mut stack: Vec<StateId> = frontier.iter().copied().collect();
        let mut marked = false;
        while let Some(v) = stack.pop() {
            for (lab, t) in dag.marker_edges(l, v) {
                if model.is_empty_label(lab) {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                } else {
                    marked = true;
                }
            }
        }
        if marked {
            return Some(l);
        }
        let next: BTreeSet<StateId> = seen.iter().flat_map(|&v| dag.eps_successors(l, v)).collect();
        if next.is_empty() {
            return None;
        }
        frontier = next;
        l += 1;
    }
}

/// Vertices of level `j` reachable from `(i, q)` without non-`∅` marker edges.
pub fn bfs_reach(dag: &MappingDag<'_>, i: usize, q: StateId, j: usize) -> BTreeSet<StateId> {
    let model = dag.model();
    let mut frontier: BTreeSet<StateId> = [q].into();
    for l in i..j {
        let mut seen: HashSet<StateId> = frontier.iter().copied().collect();
        let mut stack: Vec<StateId> = frontier.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for (lab, t) in dag.marker_edges(l, v) {
                if model.is_empty_label(lab) && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        frontier = seen.iter().flat_map(|&v| dag.eps_successors(l, v)).collect();
    }
    frontier
}

pub fn level_set(dag: &MappingDag<'_>, level: usize, members: impl IntoIterator<Item = StateId>) -> LevelSet {
    let mut s = docspan::bits::StateSet::new(dag.stride() * 64);
    for q in members {
        s.insert(q as usize);
    }
    LevelSet::new(level, s)
}

/// A one-level labeled DAG with edges from smaller to larger ids.
pub struct SmallGraph {
    pub n: usize,
    pub edges: Vec<(usize, u32, usize)>,
}

impl docspan::enumerate::LevelGraph for SmallGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.edges.iter().filter(move |e| e.2 == v).map(|e| (e.0, e.1))
    }
}

/// A random one-level graph in which no path reads a label twice, as in a
/// mapping DAG.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize, labels: u32) -> SmallGraph {
    let n = rng.gen_range(1..=max_n);
    let mut g = SmallGraph { n, edges: Vec::new() };
    for _ in 0..rng.gen_range(0..=3 * n) {
        let u = rng.gen_range(0..n);
        if u + 1 >= n {
            continue;
        }
        let v = rng.gen_range(u + 1..n);
        let l = rng.gen_range(0..labels);
        if g.edges.contains(&(u, l, v)) {
            continue;
        }
        g.edges.push((u, l, v));
        let reach = g.reachability();
        let repeats = g.edges.iter().any(|&(_, m, b)| g.edges.iter().any(|&(a, m2, _)| m == m2 && reach[b][a]));
        if repeats {
            g.edges.pop();
        }
    }
    g
}

impl SmallGraph {
    /// `r[a][b]`: a path (possibly empty) leads from `a` to `b`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; self.n]; self.n];
        for a in (0..self.n).rev() {
            r[a][a] = true;
            for &(u, _, v) in &self.edges {
                if u == a {
                    let below = r[v].clone();
                    for (dst, hit) in r[a].iter_mut().zip(below) {
                        *dst |= hit;
                    }
                }
            }
        }
        r
    }
}

/// Endpoints of paths from `lam` that avoid `minus` and read every label of
/// `plus` exactly once, by walking all paths.
pub fn brute_spath(g: &SmallGraph, lam: &[usize], plus: u128, minus: u128) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<(usize, u128)> = lam.iter().map(|&v| (v, 0)).collect();
    while let Some((v, seen)) = stack.pop() {
        if seen == plus {
            out.insert(v);
        }
        for &(u, l, w) in &g.edges {
            let bit = 1u128 << l;
            if u == v && minus & bit == 0 && seen & bit == 0 {
                stack.push((w, seen | (bit & plus)));
            }
        }
    }
    out
}
