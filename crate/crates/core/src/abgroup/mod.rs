//! Exact integer linear algebra: Smith normal form, finitely generated
//! abelian groups and their complexes, localization away from `p`, and the
//! Euler characteristic `χ(f) = #Coker(f)_tor / #Ker(f)_tor`.

mod chi;
mod fq;
mod group;
mod matrix;
mod snf;

use thiserror::Error;

pub use chi::{
    chi, chi_complex_check, chi_compose_check, chi_snake_check, ChiIdentity, ShortExactRow,
    SnakeDiagram, SnakeReport,
};
pub use fq::{chi_fq, localize, localize_complex_homology, DivisibleBehavior, DivisibleRank, FQGroup, FQMap};
pub use group::{
    direct_sum, ker_coker, sum_map, ComplexMap, DirectSum, FGAbGroup, FGComplex, FGMap,
    LesKind, LesTerm, LongExactSequence, Subquotient,
};
pub use matrix::{IntMatrix, Matrix};
pub use snf::{kernel_basis, snf, solve_integral, Snf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbGroupError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid homomorphism: {0}")]
    InvalidMap(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("d ∘ d != 0 at degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("the {part} has free rank {free_rank}, so it is not finite plus uniquely divisible")]
    NotFQ { part: &'static str, free_rank: usize },
    #[error("divisible ranks {source_rank} -> {target_rank} differ and the map's divisible behavior is unspecified")]
    DivisibleBehaviorUnspecified {
        source_rank: String,
        target_rank: String,
    },
    #[error("rows are not short exact: {0}")]
    RowsNotExact(String),
    #[error("diagram does not commute: {0}")]
    NotCommutative(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}
