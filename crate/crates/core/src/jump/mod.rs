//! Jump function: skip levels whose only labels are `ε` and `∅`.

pub mod index;
pub mod matrix;

pub use index::{build_jump_index, IndexOptions, IndexSize, JumpIndex};
pub use matrix::{bool_matrix_multiply, padded_row_bytes, BoolMatrix, MatrixRef};
