//! Pattern-to-results pipeline: compile once, evaluate per document.

use std::time::{Duration, Instant};

use crate::dag::{DagAutomaton, DagKind, MappingDag};
use crate::enumerate::{Enumeration, Mapping};
use crate::error::Result;
use crate::frontend::{
    check_sequential, compile_to_va, make_sequential, parse_regex_formula, to_extended_va, RegexFormula, VarAutomaton,
    DEFAULT_EXTENDED_BUDGET, DEFAULT_STATE_BUDGET,
};
use crate::jump::{IndexOptions, IndexSize, JumpIndex};

/// Which NEXTLEVEL the enumeration uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Product of the sequential VA, flashlight search per level.
    #[default]
    General,
    /// Product of the extended VA, merge of sorted marker-set labels.
    Extended,
}

/// A compiled pattern.
#[derive(Clone, Debug)]
pub struct Spanner {
    formula: RegexFormula,
    va: VarAutomaton,
    model: DagAutomaton,
}

impl Spanner {
    pub fn new(pattern: &str) -> Result<Self> {
        Self::with_engine(pattern.as_bytes(), Engine::General)
    }

    pub fn with_engine(pattern: &[u8], engine: Engine) -> Result<Self> {
        let formula = parse_regex_formula(pattern)?;
        Self::from_formula(formula, engine)
    }

    pub fn from_formula(formula: RegexFormula, engine: Engine) -> Result<Self> {
        let raw = compile_to_va(&formula);
        let va =
            if check_sequential(&raw).is_sequential() { raw } else { make_sequential(&raw, DEFAULT_STATE_BUDGET)? };
        let va = va.trim().unwrap_or_else(|| VarAutomaton::new(formula.variables.clone()));
        Self::from_va(formula, va, engine)
    }

    /// `va` must be sequential and recognize `formula`.
    pub fn from_va(formula: RegexFormula, va: VarAutomaton, engine: Engine) -> Result<Self> {
        let model = match engine {
            Engine::General => DagAutomaton::general(&va)?,
            Engine::Extended => DagAutomaton::extended(&to_extended_va(&va, DEFAULT_EXTENDED_BUDGET)?)?,
        };
        Ok(Spanner { formula, va, model })
    }

    pub fn formula(&self) -> &RegexFormula {
        &self.formula
    }

    pub fn automaton(&self) -> &VarAutomaton {
        &self.va
    }

    pub fn model(&self) -> &DagAutomaton {
        &self.model
    }

    pub fn engine(&self) -> Engine {
        match self.model.kind() {
            DagKind::General => Engine::General,
            DagKind::Extended => Engine::Extended,
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.formula.variables
    }

    /// Preprocessing: trimmed product DAG and jump index.
    pub fn evaluate<'a>(&'a self, doc: &'a [u8]) -> Evaluation<'a> {
        self.evaluate_with(doc, IndexOptions::default())
    }

    pub fn evaluate_with<'a>(&'a self, doc: &'a [u8], opts: IndexOptions) -> Evaluation<'a> {
        let t = Instant::now();
        let dag = MappingDag::new(&self.model, doc);
        let index = JumpIndex::with_options(&dag, opts);
        Evaluation { dag, index, preprocess: t.elapsed() }
    }

    /// Every mapping of `doc`, collected.
    pub fn mappings(&self, doc: &[u8]) -> Vec<Mapping> {
        self.evaluate(doc).iter().collect()
    }
}

/// The index of one document, ready for enumeration.
pub struct Evaluation<'a> {
    dag: MappingDag<'a>,
    index: JumpIndex,
    preprocess: Duration,
}

impl<'a> Evaluation<'a> {
    pub fn iter(&self) -> Enumeration<'_, 'a> {
        Enumeration::new(&self.dag, &self.index)
    }

    pub fn dag(&self) -> &MappingDag<'a> {
        &self.dag
    }

    pub fn index(&self) -> &JumpIndex {
        &self.index
    }

    pub fn preprocess_time(&self) -> Duration {
        self.preprocess
    }

    pub fn size(&self) -> IndexSize {
        self.index.size(&self.dag)
    }
}
