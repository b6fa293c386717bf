//! Recursive-descent parser for regex-formulas over bytes.

use super::automaton::VarId;
use super::formula::{ByteSet, Node, RegexFormula, IMPLICIT_VARIABLE, SPECIAL};
use crate::error::{ParseError, ParseErrorKind};

/// Largest accepted counter bound.
pub const MAX_COUNTER: u32 = 10_000;

pub fn parse_regex_formula(pattern: &[u8]) -> Result<RegexFormula, ParseError> {
    let mut p = Parser { src: pattern, pos: 0, variables: Vec::new() };
    let body = p.alt()?;
    if p.pos < p.src.len() {
        let kind = match p.src[p.pos] {
            b')' => ParseErrorKind::UnmatchedParen,
            b'}' => ParseErrorKind::UnmatchedBrace,
            b => ParseErrorKind::UnexpectedByte(b),
        };
        return Err(p.err_at(kind, p.pos));
    }
    let implicit = p.variables.is_empty();
    let variables = if implicit { vec![IMPLICIT_VARIABLE.to_string()] } else { std::mem::take(&mut p.variables) };
    Ok(RegexFormula { body, variables, implicit })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    variables: Vec<String>,
}

impl Parser<'_> {
    fn err_at(&self, kind: ParseErrorKind, offset: usize) -> ParseError {
        ParseError { kind, offset }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn alt(&mut self) -> Result<Node, ParseError> {
        let mut branches = vec![self.concat()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Node::Union(branches) })
    }

    fn concat(&mut self) -> Result<Node, ParseError> {
        let mut items = Vec::new();
        while let Some(b) = self.peek() {
            if matches!(b, b'|' | b')' | b'}') {
                break;
            }
            items.push(self.item()?);
        }
        Ok(match items.len() {
            0 => Node::Epsilon,
            1 => items.pop().unwrap(),
            _ => Node::Concat(items),
        })
    }

    fn item(&mut self) -> Result<Node, ParseError> {
        let atom = self.atom()?;
        let start = self.pos;
        let node = match self.peek() {
            Some(b'*') => {
                self.pos += 1;
                Node::Star(Box::new(atom))
            }
            Some(b'+') => {
                self.pos += 1;
                Node::Plus(Box::new(atom))
            }
            Some(b'?') => {
                self.pos += 1;
                Node::Optional(Box::new(atom))
            }
            Some(b'{') => match self.counter_at(self.pos) {
                Some((min, max, end)) => {
                    if max > MAX_COUNTER as u64 {
                        return Err(self.err_at(ParseErrorKind::CounterTooLarge(max), start));
                    }
                    let (min, max) = (min as u32, max as u32);
                    if min > max {
                        return Err(self.err_at(ParseErrorKind::CounterBounds { min, max }, start));
                    }
                    self.pos = end;
                    Node::Counter { child: Box::new(atom), min, max }
                }
                None => return Err(self.err_at(ParseErrorKind::UnexpectedByte(b'{'), start)),
            },
            _ => return Ok(atom),
        };
        if let Some(b'*' | b'+' | b'?') = self.peek() {
            return Err(self.err_at(ParseErrorKind::NothingToRepeat, self.pos));
        }
        if self.peek() == Some(b'{') && self.counter_at(self.pos).is_some() {
            return Err(self.err_at(ParseErrorKind::NothingToRepeat, self.pos));
        }
        Ok(node)
    }

    /// Recognizes `{n}` or `{n,m}` starting at `at`; returns bounds and end offset.
    fn counter_at(&self, at: usize) -> Option<(u64, u64, usize)> {
        let s = self.src;
        let digits = |mut i: usize| -> Option<(u64, usize)> {
            let start = i;
            let mut v: u64 = 0;
            while i < s.len() && s[i].is_ascii_digit() {
                v = v.saturating_mul(10).saturating_add((s[i] - b'0') as u64);
                i += 1;
            }
            (i > start).then_some((v, i))
        };
        if s.get(at) != Some(&b'{') {
            return None;
        }
        let (min, i) = digits(at + 1)?;
        match s.get(i) {
            Some(b'}') => Some((min, min, i + 1)),
            Some(b',') => {
                let (max, j) = digits(i + 1)?;
                (s.get(j) == Some(&b'}')).then_some((min, max, j + 1))
            }
            _ => None,
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let Some(b) = self.peek() else {
            return Err(self.err_at(ParseErrorKind::UnexpectedEnd, start));
        };
        match b {
            b'(' => {
                self.pos += 1;
                let inner = self.alt()?;
                if self.peek() != Some(b')') {
                    return Err(self.err_at(ParseErrorKind::UnmatchedParen, start));
                }
                self.pos += 1;
                Ok(inner)
            }
            b'[' => self.class(),
            b'.' => {
                self.pos += 1;
                Ok(Node::AnyChar)
            }
            b'\\' => {
                let Some(e) = self.src.get(self.pos + 1).copied() else {
                    return Err(self.err_at(ParseErrorKind::UnexpectedEnd, self.pos + 1));
                };
                if !SPECIAL.contains(&e) {
                    return Err(self.err_at(ParseErrorKind::BadEscape(e), start));
                }
                self.pos += 2;
                Ok(Node::Literal(e))
            }
            b'*' | b'+' | b'?' => Err(self.err_at(ParseErrorKind::NothingToRepeat, start)),
            b')' => Err(self.err_at(ParseErrorKind::UnmatchedParen, start)),
            b']' | b'{' | b'|' => Err(self.err_at(ParseErrorKind::UnexpectedByte(b), start)),
            b'}' => Err(self.err_at(ParseErrorKind::UnmatchedBrace, start)),
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let mut end = self.pos + 1;
                while end < self.src.len() && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_') {
                    end += 1;
                }
                if self.src.get(end) == Some(&b'{') && self.counter_at(end).is_none() {
                    self.capture(start, end)
                } else {
                    self.pos += 1;
                    Ok(Node::Literal(b))
                }
            }
            _ => {
                self.pos += 1;
                Ok(Node::Literal(b))
            }
        }
    }

    fn capture(&mut self, start: usize, name_end: usize) -> Result<Node, ParseError> {
        let name = String::from_utf8(self.src[start..name_end].to_vec()).expect("identifier is ASCII");
        if self.variables.contains(&name) {
            return Err(self.err_at(ParseErrorKind::DuplicateVariable(name), start));
        }
        let id = VarId(self.variables.len() as u32);
        self.variables.push(name);
        self.pos = name_end + 1;
        let body = self.alt()?;
        if self.peek() != Some(b'}') {
            return Err(self.err_at(ParseErrorKind::UnmatchedBrace, name_end));
        }
        self.pos += 1;
        Ok(Node::Capture(id, Box::new(body)))
    }

    fn class(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let negated = self.peek() == Some(b'^');
        if negated {
            self.pos += 1;
        }
        let mut set = ByteSet::EMPTY;
        loop {
            let Some(b) = self.peek() else {
                return Err(self.err_at(ParseErrorKind::UnterminatedClass, start));
            };
            if b == b']' {
                self.pos += 1;
                break;
            }
            let lo = self.class_byte()?;
            if self.peek() == Some(b'-') && self.src.get(self.pos + 1).is_some_and(|&c| c != b']') {
                let dash = self.pos;
                self.pos += 1;
                let hi = self.class_byte()?;
                if hi < lo {
                    return Err(self.err_at(ParseErrorKind::InvalidRange(lo, hi), dash));
                }
                set = set.union(&ByteSet::range(lo, hi));
            } else {
                set.insert(lo);
            }
        }
        let set = if negated { set.complement() } else { set };
        if set.is_empty() {
            return Err(self.err_at(ParseErrorKind::EmptyClass, start));
        }
        Ok(Node::Class(set))
    }

    fn class_byte(&mut self) -> Result<u8, ParseError> {
        let at = self.pos;
        let b = self.src[at];
        if b != b'\\' {
            self.pos += 1;
            return Ok(b);
        }
        let Some(e) = self.src.get(at + 1).copied() else {
            return Err(self.err_at(ParseErrorKind::UnterminatedClass, at));
        };
        if !SPECIAL.contains(&e) && e != b'-' && e != b'^' {
            return Err(self.err_at(ParseErrorKind::BadEscape(e), at));
        }
        self.pos += 2;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> RegexFormula {
        parse_regex_formula(s.as_bytes()).unwrap()
    }

    fn err(s: &str) -> ParseError {
        parse_regex_formula(s.as_bytes()).unwrap_err()
    }

    #[test]
    fn dna_query_is_implicitly_captured() {
        let f = parse("TTAC.{0,3}CACC");
        assert!(f.implicit);
        assert_eq!(f.variables, vec!["match"]);
        let Node::Concat(items) = &f.body else { panic!() };
        assert_eq!(items.len(), 9);
        assert_eq!(items[4], Node::Counter { child: Box::new(Node::AnyChar), min: 0, max: 3 });
        let Node::Concat(wrapped) = f.semantic_root() else { panic!() };
        assert!(matches!(wrapped[1], Node::Capture(VarId(0), _)));
    }

    #[test]
    fn empty_pattern() {
        let f = parse("");
        assert_eq!(f.body, Node::Epsilon);
        assert!(f.implicit);
    }

    #[test]
    fn explicit_capture_is_not_wrapped() {
        let f = parse("x{a(b|c)*}d");
        assert!(!f.implicit);
        let expected = Node::Concat(vec![
            Node::Capture(
                VarId(0),
                Box::new(Node::Concat(vec![
                    Node::Literal(b'a'),
                    Node::Star(Box::new(Node::Union(vec![Node::Literal(b'b'), Node::Literal(b'c')]))),
                ])),
            ),
            Node::Literal(b'd'),
        ]);
        assert_eq!(f.body, expected);
        assert_eq!(f.to_string(), "(x{a(b|c)*})d");
        assert_eq!(parse(&f.to_string()), f);
    }

    #[test]
    fn identifier_followed_by_counter_is_literal() {
        let f = parse("ab{2}");
        assert_eq!(
            f.body,
            Node::Concat(vec![
                Node::Literal(b'a'),
                Node::Counter { child: Box::new(Node::Literal(b'b')), min: 2, max: 2 },
            ])
        );
        let g = parse("ab{c}");
        assert_eq!(g.variables, vec!["ab"]);
    }

    #[test]
    fn classes() {
        let f = parse("[^@ ]");
        let Node::Class(s) = f.body else { panic!() };
        assert!(!s.contains(b'@') && !s.contains(b' ') && s.contains(b'\n'));
        assert_eq!(s.len(), 254);
        let g = parse("[a-c\\]-]");
        let Node::Class(t) = g.body else { panic!() };
        assert_eq!(t.iter().collect::<Vec<_>>(), b"-]abc".to_vec());
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(err("ab)").offset, 2);
        assert_eq!(err("ab)").kind, ParseErrorKind::UnmatchedParen);
        assert_eq!(err("(ab").kind, ParseErrorKind::UnmatchedParen);
        assert_eq!(err("x{a}y{b}x{c}").kind, ParseErrorKind::DuplicateVariable("x".into()));
        assert_eq!(err("x{a}y{b}x{c}").offset, 8);
        assert_eq!(err("a{3,2}").kind, ParseErrorKind::CounterBounds { min: 3, max: 2 });
        assert_eq!(err("a**").kind, ParseErrorKind::NothingToRepeat);
        assert_eq!(err("*").offset, 0);
        assert_eq!(err("[ab").kind, ParseErrorKind::UnterminatedClass);
        assert_eq!(err("\\n").kind, ParseErrorKind::BadEscape(b'n'));
        assert_eq!(err("x{ab").kind, ParseErrorKind::UnmatchedBrace);
        assert_eq!(err("a}").kind, ParseErrorKind::UnmatchedBrace);
        assert_eq!(err("1{a}").kind, ParseErrorKind::UnexpectedByte(b'{'));
        assert_eq!(err("[z-a]").kind, ParseErrorKind::InvalidRange(b'z', b'a'));
    }

    #[test]
    fn empty_branches_are_epsilon() {
        let f = parse("a|");
        assert_eq!(f.body, Node::Union(vec![Node::Literal(b'a'), Node::Epsilon]));
        assert_eq!(parse(&f.to_string()), f);
        assert_eq!(parse("()*").body, Node::Star(Box::new(Node::Epsilon)));
    }
}
