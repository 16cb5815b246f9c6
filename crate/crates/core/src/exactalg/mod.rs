//! Exact linear algebra over Z, Q and F_2, graded and filtered chain
//! complexes, homology with torsion, filtration gradings and spectral
//! sequence pages.

mod complex;
mod filtration;
mod matrix;
mod ring;
mod snf;
mod spectral;

pub use complex::{ComplexError, FilteredChainComplex, GradedChainComplex, HomologyCell, HomologySummary};
pub use filtration::{filtration_grading, filtered_homology, FilteredHomology};
pub use matrix::{add_vec, scale_vec, SparseMatrix, SparseVec};
pub use ring::{FieldScalar, Int, Mod2, Rat, Scalar};
pub use snf::{smith_normal_form, SmithNormalForm};
pub use spectral::{spectral_pages, Page, SpectralSequence};

use serde::{Deserialize, Serialize};

/// Coefficient ring selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingTag {
    /// The integers.
    Integers,
    /// The rationals; 2 is invertible, as Lee-type constructions require.
    Rationals,
    /// The field with two elements.
    Mod2,
}

impl RingTag {
    pub fn two_invertible(self) -> bool {
        matches!(self, RingTag::Rationals)
    }
}

impl std::fmt::Display for RingTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RingTag::Integers => write!(f, "Z"),
            RingTag::Rationals => write!(f, "Q"),
            RingTag::Mod2 => write!(f, "F2"),
        }
    }
}
