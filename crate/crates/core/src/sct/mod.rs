//! Generic supercharacter-theory engine for small finite groups.
//!
//! A theory is a group given by its multiplication table, a partition of
//! the elements into superclasses, and a table of supercharacter values
//! (one complex value per superclass). The engine validates the defining
//! orthogonality properties, computes the superplancherel measure, and
//! implements superinduction, restriction and the transition measure
//! between consistently embedded theories.

mod builtin;
mod group;
mod theory;

pub use builtin::{
    coarse_theory, cyclic_irreducible, cyclic_subgroup_embedding, identity_embedding, u2_theory,
    u3_theory,
};
pub use group::FiniteGroup;
pub use theory::{
    OrthReport, ReciprocityReport, SubgroupEmbedding, SuperTheory, TransitionMatrix,
};

use thiserror::Error;

/// Numerical tolerance for all floating checks in the engine.
pub const TOLERANCE: f64 = 1e-9;

/// Largest group order the engine accepts.
pub const MAX_GROUP_ORDER: usize = 256;

/// Group orders up to this bound get exhaustive associativity checking;
/// larger tables are spot-checked on pseudorandom triples.
pub const EXHAUSTIVE_ASSOC_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SctError {
    #[error("group order {order} exceeds the engine cap {max}")]
    GroupTooLarge { order: usize, max: usize },
    #[error("multiplication table is not a square over 0..{order}: {detail}")]
    BadMulTable { order: usize, detail: String },
    #[error("identity law fails at element {g}")]
    IdentityLawFails { g: usize },
    #[error("element {g} has no two-sided inverse")]
    MissingInverse { g: usize },
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("superclasses do not partition the group: {detail}")]
    NotAPartition { detail: String },
    #[error("character table is malformed: {detail}")]
    BadCharacterTable { detail: String },
    #[error("{classes} superclasses but {characters} supercharacters")]
    CountsMismatch { classes: usize, characters: usize },
    #[error("the identity does not form a singleton superclass")]
    NoIdentitySingleton,
    #[error("rows {row1} and {row2} are not orthogonal (deviation {deviation:.3e})")]
    RowsNotOrthogonal {
        row1: usize,
        row2: usize,
        deviation: f64,
    },
    #[error("row {row} has numerically zero self-product")]
    ZeroSelfProduct { row: usize },
    #[error("row {row} self-product is not a positive real (value {value:?})")]
    SelfProductNotPositive { row: usize, value: (f64, f64) },
    #[error("superplancherel masses sum to {sum}, not 1")]
    SplNotNormalized { sum: f64 },
    #[error("second-kind orthogonality fails (deviation {deviation:.3e} > {tolerance:.3e})")]
    SecondOrthogonalityFails { deviation: f64, tolerance: f64 },
    #[error("injection is not well-formed: {detail}")]
    BadInjection { detail: String },
    #[error("injection is not a homomorphism at ({a}, {b})")]
    NotHomomorphism { a: usize, b: usize },
    #[error("embedding is inconsistent: subgroup superclass {sub_class} straddles parent superclasses")]
    Inconsistent { sub_class: usize },
    #[error("value expected to be real is {value:?}")]
    NotReal { value: (f64, f64) },
    #[error("unsupported field: {detail}")]
    UnsupportedField { detail: String },
    #[error("JSON: {0}")]
    Json(String),
}
