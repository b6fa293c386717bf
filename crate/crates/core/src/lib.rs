//! Constant-delay enumeration of the results of regular document spanners.
//!
//! A pattern with capture variables compiles to a sequential variable-set
//! automaton. For each document a trimmed product DAG and a jump index are
//! built in linear time; the mappings are then listed without duplicates,
//! with a delay that does not depend on the document.
//!
//! ```
//! use docspan::Spanner;
//!
//! let s = Spanner::new("x{ab}").unwrap();
//! assert_eq!(s.mappings(b"ab").len(), 1);
//! ```

pub mod bench;
pub mod bits;
pub mod dag;
pub mod enumerate;
pub mod error;
pub mod frontend;
pub mod jump;
pub mod naive;
pub mod oracle;
pub mod spanner;
pub mod synth;

pub use enumerate::{Mapping, Span};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use spanner::{Engine, Evaluation, Spanner};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/automata.md")]
    mod automata {}
    #[doc = include_str!("../../../book/src/mapping-dag.md")]
    mod mapping_dag {}
    #[doc = include_str!("../../../book/src/jump-index.md")]
    mod jump_index {}
    #[doc = include_str!("../../../book/src/enumeration.md")]
    mod enumeration {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    mod benchmarking {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
