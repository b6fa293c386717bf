//! Sequentiality test and the status-product sequentialization.

use std::collections::{HashMap, VecDeque};

use super::automaton::{Label, StateId, Transition, VarAutomaton};
use crate::error::{Error, Result};

/// Default cap on the number of states `make_sequential` may create.
pub const DEFAULT_STATE_BUDGET: u64 = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Unseen,
    Open,
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequentiality {
    Sequential,
    /// An accepting path that reads some variable's markers invalidly.
    Violation(Vec<Transition>),
}

impl Sequentiality {
    pub fn is_sequential(&self) -> bool {
        matches!(self, Sequentiality::Sequential)
    }
}

fn step(status: Status, open: bool) -> Option<Status> {
    match (status, open) {
        (Status::Unseen, true) => Some(Status::Open),
        (Status::Open, false) => Some(Status::Closed),
        _ => None,
    }
}

/// Decides whether every accepting run is valid, one variable at a time,
/// by searching the product of the automaton with a three-valued status.
pub fn check_sequential(va: &VarAutomaton) -> Sequentiality {
    let n = va.num_states() as usize;
    let co = va.co_accessible();
    if !co[va.initial() as usize] {
        return Sequentiality::Sequential;
    }
    let mut out: Vec<Vec<Transition>> = vec![Vec::new(); n];
    for t in va.transitions() {
        if co[t.dst as usize] {
            out[t.src as usize].push(t);
        }
    }
    for var in 0..va.num_variables() as u32 {
        let idx = |q: StateId, s: Status| q as usize * 3 + s as usize;
        let mut parent: Vec<Option<Transition>> = vec![None; n * 3];
        let mut seen = vec![false; n * 3];
        let start = (va.initial(), Status::Unseen);
        seen[idx(start.0, start.1)] = true;
        let mut queue = VecDeque::from([start]);
        let path_to = |parent: &[Option<Transition>], mut q: StateId, mut s: Status| {
            let mut path = Vec::new();
            while let Some(t) = parent[idx(q, s)] {
                path.push(t);
                s = match t.label {
                    Label::Marker(m) if m.var().0 == var => {
                        if m.is_open() {
                            Status::Unseen
                        } else {
                            Status::Open
                        }
                    }
                    _ => s,
                };
                q = t.src;
            }
            path.reverse();
            path
        };
        while let Some((q, s)) = queue.pop_front() {
            for &t in &out[q as usize] {
                let next = match t.label {
                    Label::Marker(m) if m.var().0 == var => match step(s, m.is_open()) {
                        Some(ns) => ns,
                        None => {
                            let mut path = path_to(&parent, q, s);
                            path.push(t);
                            path.extend(path_to_final(va, &out, t.dst));
                            return Sequentiality::Violation(path);
                        }
                    },
                    _ => s,
                };
                if !seen[idx(t.dst, next)] {
                    seen[idx(t.dst, next)] = true;
                    parent[idx(t.dst, next)] = Some(t);
                    queue.push_back((t.dst, next));
                }
            }
            if s == Status::Open && va.is_final(q) {
                return Sequentiality::Violation(path_to(&parent, q, s));
            }
        }
    }
    Sequentiality::Sequential
}

fn path_to_final(va: &VarAutomaton, out: &[Vec<Transition>], from: StateId) -> Vec<Transition> {
    let n = va.num_states() as usize;
    let mut parent: Vec<Option<Transition>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from as usize] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if va.is_final(q) {
            let mut path = Vec::new();
            let mut cur = q;
            while let Some(t) = parent[cur as usize] {
                path.push(t);
                cur = t.src;
            }
            path.reverse();
            return path;
        }
        for &t in &out[q as usize] {
            if !seen[t.dst as usize] {
                seen[t.dst as usize] = true;
                parent[t.dst as usize] = Some(t);
                queue.push_back(t.dst);
            }
        }
    }
    Vec::new()
}

/// Builds the product of `va` with per-variable statuses, keeping only valid
/// marker uses; accepting states have no variable left open. The result is
/// sequential and has the same mappings as the valid runs of `va`.
pub fn make_sequential(va: &VarAutomaton, budget: u64) -> Result<VarAutomaton> {
    let k = va.num_variables() as u32;
    let required = 3u64.checked_pow(k).and_then(|p| p.checked_mul(va.num_states() as u64)).unwrap_or(u64::MAX);
    if required > budget {
        return Err(Error::StateBudget { required, budget });
    }
    let n = va.num_states() as usize;
    let mut letters_out = vec![Vec::new(); n];
    for &(s, set, d) in va.letter_transitions() {
        letters_out[s as usize].push((set, d));
    }
    let mut markers_out = vec![Vec::new(); n];
    for &(s, m, d) in va.marker_transitions() {
        markers_out[s as usize].push((m, d));
    }
    let pow3: Vec<u64> = (0..k).map(|i| 3u64.pow(i)).collect();
    let status_of = |code: u64, v: usize| (code / pow3[v]) % 3;

    let mut ids: HashMap<(StateId, u64), StateId> = HashMap::new();
    let mut order: Vec<(StateId, u64)> = Vec::new();
    let mut intern = |key: (StateId, u64), order: &mut Vec<(StateId, u64)>| -> StateId {
        *ids.entry(key).or_insert_with(|| {
            order.push(key);
            (order.len() - 1) as StateId
        })
    };
    intern((va.initial(), 0), &mut order);
    let mut out = VarAutomaton::new(va.variables().to_vec());
    let mut i = 0;
    while i < order.len() {
        let (q, code) = order[i];
        let src = i as StateId;
        for &(set, d) in &letters_out[q as usize] {
            let dst = intern((d, code), &mut order);
            while out.num_states() <= dst {
                out.add_state();
            }
            out.add_letters(src, set, dst);
        }
        for &(m, d) in &markers_out[q as usize] {
            let v = m.var().index();
            let s = status_of(code, v);
            let ncode = match (s, m.is_open()) {
                (0, true) => code + pow3[v],
                (1, false) => code + pow3[v],
                _ => continue,
            };
            let dst = intern((d, ncode), &mut order);
            while out.num_states() <= dst {
                out.add_state();
            }
            out.add_marker(src, m, dst);
        }
        if va.is_final(q) && (0..k as usize).all(|v| status_of(code, v) != 1) {
            out.set_final(src, true);
        }
        i += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::automaton::VarId;

    #[test]
    fn repeated_open_is_detected() {
        let mut va = VarAutomaton::new(vec!["x".into()]);
        va.add_marker(0, VarId(0).open(), 0);
        va.set_final(0, true);
        let Sequentiality::Violation(w) = check_sequential(&va) else { panic!() };
        let opens = w.iter().filter(|t| t.label == Label::Marker(VarId(0).open())).count();
        assert_eq!(opens, 2);
    }

    #[test]
    fn one_state_all_markers_needs_three_states() {
        let mut va = VarAutomaton::new(vec!["x".into()]);
        va.add_letters(0, crate::frontend::ByteSet::FULL, 0);
        va.add_marker(0, VarId(0).open(), 0);
        va.add_marker(0, VarId(0).close(), 0);
        va.set_final(0, true);
        assert!(!check_sequential(&va).is_sequential());
        let s = make_sequential(&va, DEFAULT_STATE_BUDGET).unwrap();
        assert!(s.num_states() <= 3);
        assert!(check_sequential(&s).is_sequential());
    }

    #[test]
    fn budget_is_reported() {
        let mut va = VarAutomaton::with_states((0..5).map(|i| format!("v{i}")).collect(), 4);
        va.set_final(0, true);
        assert_eq!(make_sequential(&va, 100), Err(Error::StateBudget { required: 243 * 4, budget: 100 }));
    }
}
