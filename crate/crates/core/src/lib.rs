//! Toolkit for the superplancherel measure on set partitions of
//! `{1, ..., n}`, the probability measure a supercharacter theory of the
//! upper unitriangular group `U_n(F_q)` induces on its supercharacters.
//!
//! The crate provides:
//!
//! * [`setpartition`] — set partitions, arcs, and the statistics
//!   (`d`, `dim`, `crs`, `nst`) the supercharacter values depend on;
//! * [`sampler`] — exact superplancherel sampling by drawing a uniform
//!   matrix pattern from `U_n(F_q)` and canonicalizing it with a
//!   diagonal sweep;
//! * [`measure`] — exact rational superplancherel weights, full
//!   distribution tables for small `n`, and enumeration cross-checks;
//! * [`embedding`] — set partitions as subprobability measures on the
//!   triangle above the diagonal of the unit square, the entropy-style
//!   functionals, and a corner-CDF discrepancy against the limit shape;
//! * [`sct`] — a generic supercharacter-theory engine for small finite
//!   groups: orthogonality checks, superinduction, transition measures;
//! * [`experiments`] — seeded, reproducible batch experiments for the
//!   limit-shape behaviour.

pub mod embedding;
pub mod experiments;
pub mod measure;
pub mod rng;
pub mod sampler;
pub mod sct;
pub mod setpartition;

pub use setpartition::{ArcStatistics, PartitionError, SetPartition};
