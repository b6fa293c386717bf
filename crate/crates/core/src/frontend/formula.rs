//! Regex-formula syntax tree and its canonical printer.

use std::fmt;

use super::automaton::VarId;

/// A set of bytes, one bit per value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ByteSet(pub [u64; 4]);

impl ByteSet {
    pub const EMPTY: ByteSet = ByteSet([0; 4]);
    pub const FULL: ByteSet = ByteSet([u64::MAX; 4]);

    pub fn single(b: u8) -> Self {
        let mut s = Self::EMPTY;
        s.insert(b);
        s
    }

    pub fn range(lo: u8, hi: u8) -> Self {
        let mut s = Self::EMPTY;
        for b in lo..=hi {
            s.insert(b);
        }
        s
    }

    /// Everything `.` matches: all bytes except newline.
    pub fn any_but_newline() -> Self {
        let mut s = Self::FULL;
        s.remove(b'\n');
        s
    }

    #[inline]
    pub fn contains(&self, b: u8) -> bool {
        self.0[(b >> 6) as usize] >> (b & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, b: u8) {
        self.0[(b >> 6) as usize] |= 1 << (b & 63);
    }

    #[inline]
    pub fn remove(&mut self, b: u8) {
        self.0[(b >> 6) as usize] &= !(1 << (b & 63));
    }

    pub fn union(&self, other: &ByteSet) -> ByteSet {
        let mut out = *self;
        for (o, w) in out.0.iter_mut().zip(other.0) {
            *o |= w;
        }
        out
    }

    pub fn complement(&self) -> ByteSet {
        ByteSet(self.0.map(|w| !w))
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&b| self.contains(b))
    }

    /// Maximal runs of consecutive member bytes.
    pub fn ranges(&self) -> Vec<(u8, u8)> {
        let mut out: Vec<(u8, u8)> = Vec::new();
        for b in self.iter() {
            match out.last_mut() {
                Some((_, hi)) if *hi as u16 + 1 == b as u16 => *hi = b,
                _ => out.push((b, b)),
            }
        }
        out
    }
}

impl fmt::Debug for ByteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&print_class(self)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Epsilon,
    Literal(u8),
    AnyChar,
    Class(ByteSet),
    Concat(Vec<Node>),
    Union(Vec<Node>),
    Star(Box<Node>),
    Plus(Box<Node>),
    Optional(Box<Node>),
    Counter { child: Box<Node>, min: u32, max: u32 },
    Capture(VarId, Box<Node>),
}

impl Node {
    /// Bytes this node reads when it is a single-letter node.
    pub fn letter_set(&self) -> Option<ByteSet> {
        match self {
            Node::Literal(b) => Some(ByteSet::single(*b)),
            Node::AnyChar => Some(ByteSet::any_but_newline()),
            Node::Class(s) => Some(*s),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Node::Concat(xs) | Node::Union(xs) => xs.iter().map(Node::size).sum(),
            Node::Star(c) | Node::Plus(c) | Node::Optional(c) | Node::Capture(_, c) => c.size(),
            Node::Counter { child, .. } => child.size(),
            _ => 0,
        }
    }
}

/// A parsed pattern: the written body plus its variable table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegexFormula {
    pub body: Node,
    pub variables: Vec<String>,
    /// True when the pattern had no capture and is evaluated as `.*match{body}.*`.
    pub implicit: bool,
}

/// Name of the variable added around capture-free patterns.
pub const IMPLICIT_VARIABLE: &str = "match";

impl RegexFormula {
    /// The tree whose semantics the automaton implements.
    pub fn semantic_root(&self) -> Node {
        if !self.implicit {
            return self.body.clone();
        }
        let any = || Node::Star(Box::new(Node::Class(ByteSet::FULL)));
        Node::Concat(vec![any(), Node::Capture(VarId(0), Box::new(self.body.clone())), any()])
    }

    /// Canonical pattern text; parsing it yields this formula again.
    pub fn to_pattern(&self) -> Vec<u8> {
        let mut out = Vec::new();
        print_alt(&self.body, &self.variables, &mut out);
        out
    }
}

impl fmt::Display for RegexFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.to_pattern()))
    }
}

pub(crate) const SPECIAL: &[u8] = b"\\.{}[]|()*+?";

fn print_alt(node: &Node, vars: &[String], out: &mut Vec<u8>) {
    match node {
        Node::Union(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push(b'|');
                }
                match x {
                    Node::Union(_) => group(x, vars, out),
                    _ => print_concat(x, vars, out),
                }
            }
        }
        _ => print_concat(node, vars, out),
    }
}

fn print_concat(node: &Node, vars: &[String], out: &mut Vec<u8>) {
    match node {
        Node::Epsilon => {}
        Node::Concat(xs) => {
            for x in xs {
                match x {
                    Node::Concat(_) | Node::Union(_) | Node::Epsilon => group(x, vars, out),
                    _ => print_item(x, vars, out),
                }
            }
        }
        _ => print_item(node, vars, out),
    }
}

fn print_item(node: &Node, vars: &[String], out: &mut Vec<u8>) {
    let (child, suffix): (&Node, Vec<u8>) = match node {
        Node::Star(c) => (c, b"*".to_vec()),
        Node::Plus(c) => (c, b"+".to_vec()),
        Node::Optional(c) => (c, b"?".to_vec()),
        Node::Counter { child, min, max } if min == max => (child, format!("{{{min}}}").into_bytes()),
        Node::Counter { child, min, max } => (child, format!("{{{min},{max}}}").into_bytes()),
        _ => return print_atom(node, vars, out),
    };
    match child {
        Node::Literal(_) | Node::AnyChar | Node::Class(_) | Node::Capture(..) => print_atom(child, vars, out),
        _ => group(child, vars, out),
    }
    out.extend_from_slice(&suffix);
}

fn print_atom(node: &Node, vars: &[String], out: &mut Vec<u8>) {
    match node {
        Node::Literal(b) => {
            if SPECIAL.contains(b) {
                out.push(b'\\');
            }
            out.push(*b);
        }
        Node::AnyChar => out.push(b'.'),
        Node::Class(s) => out.extend_from_slice(&print_class(s)),
        Node::Capture(v, body) => {
            // Parenthesized so a preceding identifier byte cannot merge into the name.
            out.push(b'(');
            out.extend_from_slice(vars[v.index()].as_bytes());
            out.push(b'{');
            let mut inner = Vec::new();
            print_alt(body, vars, &mut inner);
            if looks_like_counter(&inner) {
                out.push(b'(');
                out.extend_from_slice(&inner);
                out.push(b')');
            } else {
                out.extend_from_slice(&inner);
            }
            out.extend_from_slice(b"})");
        }
        _ => group(node, vars, out),
    }
}

fn looks_like_counter(body: &[u8]) -> bool {
    let mut parts = body.split(|&b| b == b',');
    let ok = |p: &[u8]| !p.is_empty() && p.iter().all(u8::is_ascii_digit);
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), None, None) => ok(a),
        (Some(a), Some(b), None) => ok(a) && ok(b),
        _ => false,
    }
}

fn group(node: &Node, vars: &[String], out: &mut Vec<u8>) {
    out.push(b'(');
    print_alt(node, vars, out);
    out.push(b')');
}

fn print_class(set: &ByteSet) -> Vec<u8> {
    let (negated, members) = if set.len() > 128 && set.len() < 256 { (true, set.complement()) } else { (false, *set) };
    let mut out = vec![b'['];
    if negated {
        out.push(b'^');
    }
    let push = |out: &mut Vec<u8>, b: u8| {
        if matches!(b, b'\\' | b']' | b'[' | b'^' | b'-') {
            out.push(b'\\');
        }
        out.push(b);
    };
    for (lo, hi) in members.ranges() {
        push(&mut out, lo);
        if hi > lo {
            if hi > lo + 1 {
                out.push(b'-');
            }
            push(&mut out, hi);
        }
    }
    out.push(b']');
    out
}
