//! Position-automaton construction with capture boundaries as marker positions.

use super::automaton::{Marker, VarAutomaton};
use super::formula::{ByteSet, Node, RegexFormula};

#[derive(Clone, Copy)]
enum Symbol {
    Letters(ByteSet),
    Marker(Marker),
}

struct Info {
    nullable: bool,
    first: Vec<u32>,
    last: Vec<u32>,
}

#[derive(Default)]
struct Builder {
    symbols: Vec<Symbol>,
    follow: Vec<Vec<u32>>,
}

impl Builder {
    fn position(&mut self, s: Symbol) -> u32 {
        self.symbols.push(s);
        self.follow.push(Vec::new());
        (self.symbols.len() - 1) as u32
    }

    fn link(&mut self, from: &[u32], to: &[u32]) {
        for &p in from {
            self.follow[p as usize].extend_from_slice(to);
        }
    }

    fn visit(&mut self, node: &Node) -> Info {
        match node {
            Node::Epsilon => Info { nullable: true, first: vec![], last: vec![] },
            Node::Literal(_) | Node::AnyChar | Node::Class(_) => {
                let p = self.position(Symbol::Letters(node.letter_set().unwrap()));
                Info { nullable: false, first: vec![p], last: vec![p] }
            }
            Node::Concat(items) => {
                let mut acc = Info { nullable: true, first: vec![], last: vec![] };
                for item in items {
                    let next = self.visit(item);
                    acc = self.seq(acc, next);
                }
                acc
            }
            Node::Union(branches) => {
                let mut acc = Info { nullable: false, first: vec![], last: vec![] };
                for b in branches {
                    let i = self.visit(b);
                    acc.nullable |= i.nullable;
                    acc.first.extend(i.first);
                    acc.last.extend(i.last);
                }
                acc
            }
            Node::Star(c) => {
                let i = self.visit(c);
                self.link(&i.last, &i.first);
                Info { nullable: true, ..i }
            }
            Node::Plus(c) => {
                let i = self.visit(c);
                self.link(&i.last, &i.first);
                i
            }
            Node::Optional(c) => {
                let i = self.visit(c);
                Info { nullable: true, ..i }
            }
            Node::Counter { child, min, max } => self.counter(child, *min, *max),
            Node::Capture(v, body) => {
                let open = self.position(Symbol::Marker(v.open()));
                let inner = self.visit(body);
                let close = self.position(Symbol::Marker(v.close()));
                self.link(&[open], &inner.first);
                self.link(&inner.last, &[close]);
                if inner.nullable {
                    self.link(&[open], &[close]);
                }
                Info { nullable: false, first: vec![open], last: vec![close] }
            }
        }
    }

    fn seq(&mut self, a: Info, b: Info) -> Info {
        self.link(&a.last, &b.first);
        let mut first = a.first;
        if a.nullable {
            first.extend_from_slice(&b.first);
        }
        let mut last = b.last;
        if b.nullable {
            last.extend(a.last);
        }
        Info { nullable: a.nullable && b.nullable, first, last }
    }

    /// `e{m,n}` as `e^m` followed by `(e(e(…)?)?)?` with `n - m` copies,
    /// so every copy has at most two follow targets.
    fn counter(&mut self, child: &Node, min: u32, max: u32) -> Info {
        let mut acc = Info { nullable: true, first: vec![], last: vec![] };
        for _ in 0..min {
            let copy = self.visit(child);
            acc = self.seq(acc, copy);
        }
        let optional = max - min;
        if optional == 0 {
            return acc;
        }
        let copies: Vec<Info> = (0..optional).map(|_| self.visit(child)).collect();
        // Fold from the innermost copy outwards.
        let mut tail: Option<Info> = None;
        for copy in copies.into_iter().rev() {
            let combined = match tail {
                None => copy,
                Some(inner) => {
                    let inner = Info { nullable: true, ..inner };
                    self.seq(copy, inner)
                }
            };
            tail = Some(combined);
        }
        let opt = Info { nullable: true, ..tail.unwrap() };
        self.seq(acc, opt)
    }
}

/// Compiles a formula's semantic tree into a VA: state 0 is initial and each
/// position `p` becomes state `p + 1`, entered by reading the position's symbol.
pub fn compile_to_va(formula: &RegexFormula) -> VarAutomaton {
    compile_node(&formula.semantic_root(), formula.variables.clone())
}

pub(crate) fn compile_node(root: &Node, variables: Vec<String>) -> VarAutomaton {
    let mut b = Builder::default();
    let info = b.visit(root);
    let n = b.symbols.len() as u32;
    let mut va = VarAutomaton::with_states(variables, n + 1);
    let emit = |va: &mut VarAutomaton, src: u32, targets: &mut Vec<u32>| {
        targets.sort_unstable();
        targets.dedup();
        for &p in targets.iter() {
            match b.symbols[p as usize] {
                Symbol::Letters(s) => va.add_letters(src, s, p + 1),
                Symbol::Marker(m) => va.add_marker(src, m, p + 1),
            }
        }
    };
    let mut first = info.first.clone();
    emit(&mut va, 0, &mut first);
    let mut follow = std::mem::take(&mut b.follow);
    for (p, f) in follow.iter_mut().enumerate() {
        emit(&mut va, p as u32 + 1, f);
    }
    for &p in &info.last {
        va.set_final(p + 1, true);
    }
    if info.nullable {
        va.set_final(0, true);
    }
    va
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_regex_formula;

    fn va(p: &str) -> VarAutomaton {
        compile_to_va(&parse_regex_formula(p.as_bytes()).unwrap())
    }

    #[test]
    fn single_letter_with_implicit_capture() {
        let a = va("a");
        // initial, Σ* prefix, open, a, close, Σ* suffix
        assert_eq!(a.num_states(), 6);
        assert_eq!(a.marker_transitions().len(), 3);
        assert!(a.marker_cycle().is_none());
    }

    #[test]
    fn counter_expansion_is_linear() {
        let a = va("x{a.{0,50}b}");
        assert_eq!(a.num_states(), 1 + 1 + 1 + 50 + 1 + 1);
        let dots = a.letter_transitions().len();
        assert!(dots <= 3 * 53, "{dots} transitions");
    }

    #[test]
    fn nullable_pattern_makes_initial_final() {
        let a = va("x{a}*");
        assert!(a.is_final(0));
        let b = va("x{a}");
        assert!(!b.is_final(0));
    }
}
