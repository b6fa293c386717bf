//! Leveled product DAGs of an automaton and a document.

pub mod model;
pub mod product;

pub use model::{compare_labels, DagAutomaton, DagKind, LabelId, MAX_VARIABLES};
pub use product::{build_product_dag, build_product_dag_extended, trim_dag, DagStats, LevelSet, MappingDag};
