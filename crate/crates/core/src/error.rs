use std::fmt;

/// What went wrong while reading a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedEnd,
    UnexpectedByte(u8),
    UnmatchedParen,
    UnmatchedBrace,
    UnterminatedClass,
    EmptyClass,
    BadEscape(u8),
    InvalidRange(u8, u8),
    NothingToRepeat,
    DuplicateVariable(String),
    CounterBounds { min: u32, max: u32 },
    CounterTooLarge(u64),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of pattern"),
            ParseErrorKind::UnexpectedByte(b) => write!(f, "unexpected {}", show_byte(*b)),
            ParseErrorKind::UnmatchedParen => write!(f, "unmatched parenthesis"),
            ParseErrorKind::UnmatchedBrace => write!(f, "unmatched brace"),
            ParseErrorKind::UnterminatedClass => write!(f, "unterminated character class"),
            ParseErrorKind::EmptyClass => write!(f, "empty character class"),
            ParseErrorKind::BadEscape(b) => write!(f, "unsupported escape \\{}", show_byte(*b)),
            ParseErrorKind::InvalidRange(a, b) => {
                write!(f, "invalid class range {}-{}", show_byte(*a), show_byte(*b))
            }
            ParseErrorKind::NothingToRepeat => write!(f, "quantifier has nothing to repeat"),
            ParseErrorKind::DuplicateVariable(name) => {
                write!(f, "variable `{name}` is captured more than once")
            }
            ParseErrorKind::CounterBounds { min, max } => {
                write!(f, "counter minimum {min} exceeds maximum {max}")
            }
            ParseErrorKind::CounterTooLarge(n) => write!(f, "counter bound {n} is too large"),
        }
    }
}

fn show_byte(b: u8) -> String {
    if b.is_ascii_graphic() {
        format!("'{}'", b as char)
    } else {
        format!("byte 0x{b:02x}")
    }
}

/// A pattern syntax error at a byte offset.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("sequentialization needs {required} states, budget is {budget}")]
    StateBudget { required: u64, budget: u64 },
    #[error("extended automaton exceeds {budget} transitions")]
    ExtendedBudget { budget: usize },
    #[error("automaton has a cycle of variable transitions through state {state}")]
    MarkerCycle { state: u32 },
    #[error("{count} variables exceed the supported maximum of {max}")]
    TooManyVariables { count: usize, max: usize },
    #[error("automaton is not sequential")]
    NotSequential,
    #[error("oracle explored more than {budget} configurations")]
    OracleBudget { budget: u64 },
    #[error("naive scan needs a capture-free pattern, this one has {variables} variables")]
    NaiveUnsupported { variables: usize },
    #[error("result order changed between repetitions at result {index}")]
    NondeterministicOrder { index: usize },
    #[error("histogram bucket width must be positive")]
    InvalidBucketWidth,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("matrix dimensions {left_cols} and {right_rows} do not agree")]
    DimensionMismatch { left_cols: usize, right_rows: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
