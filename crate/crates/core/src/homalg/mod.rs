//! Exact linear algebra over the rationals: ranks, kernels, homology and
//! symmetric-group characters.

mod characters;
mod complex;
mod q;
mod sparse;

pub use characters::{
    action_matrix, character, character_table, class_representative, class_size, decompose_character, mn_character,
    partitions, CharacterTable, Partition,
};
pub use complex::{betti_numbers, homology, homology_group, ChainComplex, HomologyGroup, HomologyResult};
pub use q::{ParseQError, Q};
pub use sparse::{axpy, svec_from_map, svec_get, svec_scale, Reducer, Rref, SVec, SparseMatrix, PRIMES};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomalgError {
    #[error("d∘d ≠ 0 out of degree {degree}: entry ({row}, {col})")]
    NotAComplex { degree: i64, row: usize, col: usize },
    #[error("chain in degree {degree} is not closed or not in the span of the homology basis")]
    ProjectionFailure { degree: i64 },
    #[error("non-integral multiplicity {value} for partition {partition:?}")]
    NonIntegralMultiplicity { partition: Vec<usize>, value: String },
}
