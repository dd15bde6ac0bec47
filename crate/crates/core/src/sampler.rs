//! Superplancherel sampling through uniform random matrices of
//! `U_n(F_q)`.
//!
//! A uniform element of `U_n(F_q)` is drawn, then canonicalized by a sweep
//! over the diagonals from the upper-right corner inward: every nonzero
//! entry met on a diagonal becomes a pivot and zeroes out the rest of its
//! row to the left and its column below. The surviving nonzero positions
//! form the arc set of a set partition, and that partition is distributed
//! exactly by the superplancherel measure.
//!
//! The sweep reads entries only through zero tests and writes only zeros
//! and canonical ones, so the induced partition law depends on the matrix
//! only through its zero/nonzero indicator pattern. Field elements are
//! therefore never materialized: a pattern stores one boolean per
//! strictly-upper entry.

use rand::Rng;
use thiserror::Error;

use crate::rng::stream_rng;
use crate::setpartition::SetPartition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("field order must satisfy q >= 2, got {q}")]
    FieldTooSmall { q: u64 },
    #[error("enumeration of U_{n}(F_{q}) refused: {count} matrices exceeds the bound {bound}")]
    EnumerationTooLarge { n: usize, q: u64, count: String, bound: u64 },
}

/// Order of the coefficient field.
///
/// The supercharacter machinery is stated for prime powers; other values
/// are accepted (they still define a sampling law) but flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FieldParam {
    q: u64,
}

impl FieldParam {
    pub fn new(q: u64) -> Result<Self, SamplerError> {
        if q < 2 {
            return Err(SamplerError::FieldTooSmall { q });
        }
        Ok(FieldParam { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// True when `q = p^k` for a prime `p`. Callers may warn otherwise.
    pub fn is_prime_power(&self) -> bool {
        let mut q = self.q;
        let mut p = 0u64;
        let mut f = 2u64;
        while f * f <= q {
            if q.is_multiple_of(f) {
                p = f;
                break;
            }
            f += 1;
        }
        if p == 0 {
            return true; // q itself is prime
        }
        while q.is_multiple_of(p) {
            q /= p;
        }
        q == 1
    }
}

/// Zero/nonzero pattern of a strictly-upper-triangular `n x n` array; the
/// diagonal is implicitly one. Entry `(i, j)` with `1 <= i < j <= n` is
/// stored at a fixed row-major offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperUniPattern {
    n: usize,
    nonzero: Vec<bool>,
}

impl UpperUniPattern {
    pub fn new_zero(n: usize) -> Self {
        assert!(n >= 1);
        UpperUniPattern {
            n,
            nonzero: vec![false; n * (n - 1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of strictly-upper entries.
    pub fn entry_count(&self) -> usize {
        self.nonzero.len()
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.n);
        (i - 1) * self.n - i * (i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.nonzero[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let idx = self.idx(i, j);
        self.nonzero[idx] = value;
    }

    pub fn count_nonzero(&self) -> usize {
        self.nonzero.iter().filter(|&&b| b).count()
    }

    /// Nonzero positions in lexicographic order.
    pub fn nonzero_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..self.n {
            for j in i + 1..=self.n {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Canonicalize by the diagonal sweep; see [`canonicalize`].
    pub fn canonicalize(&self) -> (UpperUniPattern, SweepTrace) {
        canonicalize(self)
    }

    /// The set partition this matrix pattern classifies to.
    pub fn partition(&self) -> SetPartition {
        let (canonical, _) = self.canonicalize();
        SetPartition::from_arcs(self.n, &canonical.nonzero_positions())
            .expect("canonical pattern is a partial matching, hence a valid arc set")
    }
}

/// One sweep step: the diagonal index, the pivots kept on it, and the
/// entries they zeroed out (positions that were nonzero before clearing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepStep {
    pub k: usize,
    pub pivots: Vec<(usize, usize)>,
    pub cleared: Vec<(usize, usize)>,
}

/// Audit trail of a canonicalization sweep, one record per diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepTrace {
    pub steps: Vec<SweepStep>,
}

/// Sample the pattern of a uniform random element of `U_n(F_q)`: each
/// strictly-upper entry is independently nonzero with probability
/// `(q-1)/q`. Deterministic in `(n, q, seed)`.
pub fn sample_pattern(n: usize, q: FieldParam, seed: u64) -> UpperUniPattern {
    assert!(n >= 1);
    let mut rng = stream_rng(seed, 0);
    let mut pattern = UpperUniPattern::new_zero(n);
    for slot in pattern.nonzero.iter_mut() {
        *slot = rng.random_range(0..q.q) != 0;
    }
    pattern
}

/// Diagonal-sweep canonicalization.
///
/// For `k = 1..n-1` the `k`-th diagonal from the upper-right corner holds
/// the entries `(i, n-k+i)`. Every nonzero entry on it is kept as a pivot
/// while the entries strictly to its left in the same row and strictly
/// below in the same column (exclusive of the main diagonal) are zeroed.
/// Entries on one diagonal share no row or column, so the scan order
/// within a diagonal is irrelevant. The final pattern has at most one
/// nonzero per row and per column: an arc set.
///
/// The diagonal at distance `n` is the main diagonal and nothing on it can
/// clear anything, so the loop stops at `n-1`.
pub fn canonicalize(pattern: &UpperUniPattern) -> (UpperUniPattern, SweepTrace) {
    let n = pattern.n;
    let mut out = pattern.clone();
    let mut trace = SweepTrace::default();
    for k in 1..n {
        let mut pivots = Vec::new();
        let mut cleared = Vec::new();
        for i in 1..=k {
            let j = n - k + i;
            if !out.get(i, j) {
                continue;
            }
            pivots.push((i, j));
            for col in i + 1..j {
                if out.get(i, col) {
                    cleared.push((i, col));
                    out.set(i, col, false);
                }
            }
            for row in i + 1..j {
                if out.get(row, j) {
                    cleared.push((row, j));
                    out.set(row, j, false);
                }
            }
        }
        trace.steps.push(SweepStep { k, pivots, cleared });
    }
    (out, trace)
}

/// Classify a pattern: canonicalize and read the surviving nonzeros as an
/// arc set. Total on `U_n` patterns.
pub fn partition_of(pattern: &UpperUniPattern) -> SetPartition {
    pattern.partition()
}

/// Draw one superplancherel-distributed partition of `1..=n`.
pub fn sample_partition(n: usize, q: FieldParam, seed: u64) -> SetPartition {
    sample_pattern(n, q, seed).partition()
}

/// Enumeration of all zero/nonzero patterns of `U_n(F_q)`, each with
/// multiplicity `(q-1)^{#nonzero}`, so multiplicities add up to
/// `|U_n| = q^{n(n-1)/2}`.
#[derive(Debug)]
pub struct MatrixEnumeration {
    n: usize,
    q: u64,
    entries: u32,
    next_mask: u64,
    done: bool,
}

impl Iterator for MatrixEnumeration {
    type Item = (UpperUniPattern, u64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mask = self.next_mask;
        let mut pattern = UpperUniPattern::new_zero(self.n);
        for bit in 0..self.entries {
            pattern.nonzero[bit as usize] = mask >> bit & 1 == 1;
        }
        let multiplicity = (self.q - 1).pow(mask.count_ones());
        // The size guard keeps `entries` well below 64.
        if mask == (1u64 << self.entries) - 1 {
            self.done = true;
        } else {
            self.next_mask = mask + 1;
        }
        Some((pattern, multiplicity))
    }
}

/// Weighted enumeration of `U_n(F_q)`. Refused when `q^{n(n-1)/2}` exceeds
/// ten million; the error reports the count.
pub fn enumerate_matrices(n: usize, q: FieldParam) -> Result<MatrixEnumeration, SamplerError> {
    assert!(n >= 1);
    const BOUND: u64 = 10_000_000;
    let entries = (n * (n - 1) / 2) as u32;
    let count = num_bigint::BigUint::from(q.q).pow(entries);
    if count > num_bigint::BigUint::from(BOUND) {
        return Err(SamplerError::EnumerationTooLarge {
            n,
            q: q.q,
            count: count.to_string(),
            bound: BOUND,
        });
    }
    Ok(MatrixEnumeration {
        n,
        q: q.q,
        entries,
        next_mask: 0,
        done: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern_from(n: usize, nonzeros: &[(usize, usize)]) -> UpperUniPattern {
        let mut p = UpperUniPattern::new_zero(n);
        for &(i, j) in nonzeros {
            p.set(i, j, true);
        }
        p
    }

    #[test]
    fn field_param_validation() {
        assert!(FieldParam::new(0).is_err());
        assert!(FieldParam::new(1).is_err());
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 27] {
            assert!(FieldParam::new(q).unwrap().is_prime_power(), "q={q}");
        }
        for q in [6, 10, 12, 15, 100] {
            assert!(!FieldParam::new(q).unwrap().is_prime_power(), "q={q}");
        }
    }

    #[test]
    fn sweep_worked_example() {
        // Pattern of the 5x5 matrix with nonzeros at
        // (1,3), (1,4), (1,5), (2,3), (3,4), (4,5).
        let a0 = pattern_from(5, &[(1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)]);
        let (canonical, trace) = a0.canonicalize();
        assert_eq!(canonical.nonzero_positions(), vec![(1, 5), (2, 3), (3, 4)]);
        assert_eq!(trace.steps[0].pivots, vec![(1, 5)]);
        assert_eq!(trace.steps[0].cleared, vec![(1, 3), (1, 4), (4, 5)]);
        let p = a0.partition();
        assert_eq!(p.blocks(), &[vec![1, 5], vec![2, 3, 4]]);
    }

    #[test]
    fn sweep_identity_and_single_nonzero() {
        let id = UpperUniPattern::new_zero(4);
        let (c, trace) = id.canonicalize();
        assert_eq!(c, id);
        assert!(trace.steps.iter().all(|s| s.pivots.is_empty()));
        for i in 1..4 {
            for j in i + 1..=4 {
                let p = pattern_from(4, &[(i, j)]);
                assert_eq!(p.canonicalize().0, p);
            }
        }
    }

    #[test]
    fn all_nonzero_three_by_three() {
        let p = pattern_from(3, &[(1, 2), (1, 3), (2, 3)]);
        assert_eq!(p.partition().blocks(), &[vec![1, 3], vec![2]]);
    }

    #[test]
    fn all_zero_gives_singletons() {
        let p = UpperUniPattern::new_zero(6);
        assert_eq!(p.partition(), SetPartition::singletons(6));
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let q = FieldParam::new(3).unwrap();
        for seed in 0..50 {
            let m = sample_pattern(7, q, seed);
            let (c1, _) = m.canonicalize();
            let (c2, _) = c1.canonicalize();
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn canonical_output_is_partial_matching() {
        let q = FieldParam::new(2).unwrap();
        for seed in 0..100 {
            let (c, _) = sample_pattern(8, q, seed).canonicalize();
            let arcs = c.nonzero_positions();
            let mut lefts = std::collections::BTreeSet::new();
            let mut rights = std::collections::BTreeSet::new();
            for (i, j) in arcs {
                assert!(lefts.insert(i), "row {i} holds two pivots");
                assert!(rights.insert(j), "column {j} holds two pivots");
            }
        }
    }

    #[test]
    fn one_point_pattern_is_empty() {
        let q = FieldParam::new(5).unwrap();
        let p = sample_pattern(1, q, 3);
        assert_eq!(p.entry_count(), 0);
        assert_eq!(p.partition(), SetPartition::singletons(1));
    }

    #[test]
    fn trace_steps_run_in_order() {
        let q = FieldParam::new(2).unwrap();
        let (_, trace) = sample_pattern(7, q, 12).canonicalize();
        let ks: Vec<usize> = trace.steps.iter().map(|s| s.k).collect();
        assert_eq!(ks, (1..7).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_is_deterministic() {
        let q = FieldParam::new(4).unwrap();
        assert_eq!(sample_pattern(10, q, 99), sample_pattern(10, q, 99));
        assert_ne!(sample_pattern(10, q, 99), sample_pattern(10, q, 100));
    }

    #[test]
    fn entry_frequency_matches_bernoulli() {
        // n=2, q=2: the single entry is nonzero with probability 1/2.
        let q = FieldParam::new(2).unwrap();
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|&seed| sample_pattern(2, q, seed).get(1, 2))
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq={freq}");

        // n=5, q=3: ten entries, each nonzero with probability 2/3.
        let q3 = FieldParam::new(3).unwrap();
        let samples = 10_000;
        let total: usize = (0..samples)
            .map(|seed| sample_pattern(5, q3, seed).count_nonzero())
            .sum();
        let mean = total as f64 / samples as f64;
        assert!((mean - 20.0 / 3.0).abs() < 0.2, "mean={mean}");
    }

    #[test]
    fn diagonal_scan_order_does_not_matter() {
        // Process each diagonal in a shuffled order and compare with the
        // standard sweep. Entries on one diagonal share no row or column,
        // so the outcome must be identical.
        use rand::seq::SliceRandom;

        fn canonicalize_shuffled(pattern: &UpperUniPattern, seed: u64) -> UpperUniPattern {
            let n = pattern.n();
            let mut rng = crate::rng::stream_rng(seed, 99);
            let mut out = pattern.clone();
            for k in 1..n {
                let mut order: Vec<usize> = (1..=k).collect();
                order.shuffle(&mut rng);
                for i in order {
                    let j = n - k + i;
                    if !out.get(i, j) {
                        continue;
                    }
                    for col in i + 1..j {
                        out.set(i, col, false);
                    }
                    for row in i + 1..j {
                        out.set(row, j, false);
                    }
                }
            }
            out
        }
        let q = FieldParam::new(2).unwrap();
        for n in 2..=6 {
            for seed in 0..200 {
                let m = sample_pattern(n, q, seed);
                assert_eq!(m.canonicalize().0, canonicalize_shuffled(&m, seed));
            }
        }
    }

    #[test]
    fn enumeration_totals() {
        let q2 = FieldParam::new(2).unwrap();
        let total: u64 = enumerate_matrices(2, q2).unwrap().map(|(_, m)| m).sum();
        assert_eq!(total, 2);
        let total: u64 = enumerate_matrices(3, q2).unwrap().map(|(_, m)| m).sum();
        assert_eq!(total, 8);
        let q3 = FieldParam::new(3).unwrap();
        let total: u64 = enumerate_matrices(4, q3).unwrap().map(|(_, m)| m).sum();
        assert_eq!(total, 729);
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let q = FieldParam::new(5).unwrap();
        let err = enumerate_matrices(8, q).unwrap_err();
        match err {
            SamplerError::EnumerationTooLarge { count, .. } => {
                assert_eq!(count, num_bigint::BigUint::from(5u64).pow(28).to_string());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
