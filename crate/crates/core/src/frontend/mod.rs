//! Pattern parsing and compilation into sequential variable-set automata.

pub mod automaton;
pub mod extended;
pub mod formula;
pub mod glushkov;
pub mod parser;
pub mod sequential;

pub use automaton::{trim_va, Label, Marker, MarkerKind, StateId, Transition, VarAutomaton, VarId};
pub use extended::{to_extended_va, ExtendedVA, StateClass, DEFAULT_EXTENDED_BUDGET};
pub use formula::{ByteSet, Node, RegexFormula, IMPLICIT_VARIABLE};
pub use glushkov::compile_to_va;
pub use parser::parse_regex_formula;
pub use sequential::{check_sequential, make_sequential, Sequentiality, DEFAULT_STATE_BUDGET};
