//! Exact superplancherel weights and distributions for `U_n(F_q)`.
//!
//! The weight of a set partition `pi` is
//! `(q-1)^{d} * q^{2 dim - 2 d - crs} / q^{n(n-1)/2}`, carried here as the
//! exponent pair `(a, b) = (d, 2 dim - 2 d - crs - n(n-1)/2)` so that
//! distribution totals can be summed exactly. A weight materializes as a
//! `BigRational` on demand; for large `n` only the log form is available
//! because the exact denominators grow like `q^{n^2/2}`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::sampler::{enumerate_matrices, FieldParam, SamplerError};
use crate::setpartition::{enumerate_all, ArcStatistics, SetPartition};

/// Exact weights wider than this many decimal digits are refused; use the
/// log form instead. The bound corresponds to roughly `n = 80` at `q = 2`.
pub const MAX_EXACT_DIGITS: u32 = 1024;

/// Hard ceiling for full-distribution enumeration (`Bell(12) ~ 4.2e6`).
pub const MAX_DISTRIBUTION_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("exact weight needs about {digits} digits, over the {budget}-digit budget; use log_value")]
    DigitBudgetExceeded { digits: u64, budget: u32 },
    #[error("exact distribution is limited to n <= {max}, got n = {n}")]
    DistributionTooLarge { n: usize, max: usize },
    #[error("distribution total is {total}, not 1")]
    TotalNotOne { total: String },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Superplancherel weight `(q-1)^a * q^b` in exponent form. Always lies in
/// `(0, 1]` for a weight built from a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplWeight {
    /// Exponent of `q - 1`; equals `d`.
    pub a: u64,
    /// Exponent of `q`; equals `2 dim - 2 d - crs - n(n-1)/2`, usually negative.
    pub b: i64,
    pub q: FieldParam,
}

impl SplWeight {
    /// Estimate of the decimal digits needed by numerator plus denominator.
    fn digit_estimate(&self) -> u64 {
        let q = self.q.q() as f64;
        let digits = self.a as f64 * (q - 1.0).log10() + self.b.unsigned_abs() as f64 * q.log10();
        digits.ceil() as u64 + 1
    }

    /// The weight as an exact rational. Refused beyond [`MAX_EXACT_DIGITS`].
    pub fn exact(&self) -> Result<BigRational, MeasureError> {
        let digits = self.digit_estimate();
        if digits > MAX_EXACT_DIGITS as u64 {
            return Err(MeasureError::DigitBudgetExceeded {
                digits,
                budget: MAX_EXACT_DIGITS,
            });
        }
        let qm1 = BigInt::from(self.q.q() - 1);
        let q = BigInt::from(self.q.q());
        let num = qm1.pow(self.a as u32);
        let value = if self.b >= 0 {
            BigRational::from_integer(num * q.pow(self.b as u32))
        } else {
            BigRational::new(num, q.pow(self.b.unsigned_abs() as u32))
        };
        Ok(value)
    }

    /// Natural log of the weight: `a ln(q-1) + b ln q`.
    pub fn log_value(&self) -> f64 {
        let q = self.q.q() as f64;
        self.a as f64 * (q - 1.0).ln() + self.b as f64 * q.ln()
    }

    /// Floating approximation `exp(log_value)`.
    pub fn approx(&self) -> f64 {
        self.log_value().exp()
    }
}

/// Superplancherel weight of `pi` under `F_q`.
pub fn spl_weight(pi: &SetPartition, q: FieldParam) -> SplWeight {
    let s = pi.statistics();
    let n = pi.n() as i64;
    let b = 2 * s.dim as i64 - 2 * s.d as i64 - s.crs as i64 - n * (n - 1) / 2;
    SplWeight { a: s.d as u64, b, q }
}

/// Exponent of `q` in `|J_pi|`: `2(dim - d) - crs`, always nonnegative.
fn j_exponent(s: &ArcStatistics) -> u64 {
    let e = 2 * (s.dim as i64 - s.d as i64) - s.crs as i64;
    assert!(e >= 0, "2(dim-d) >= crs for every partition");
    e as u64
}

/// Number of matrices in `U_n(F_q)` classifying to `pi`:
/// `(q-1)^d * q^{2 dim - 2 d - crs}`. These add up to `q^{n(n-1)/2}`.
pub fn j_size(pi: &SetPartition, q: FieldParam) -> BigUint {
    let s = pi.statistics();
    let qm1 = BigUint::from(q.q() - 1);
    let qq = BigUint::from(q.q());
    qm1.pow(s.d as u32) * qq.pow(j_exponent(s) as u32)
}

/// One row of an exact distribution table.
#[derive(Debug, Clone)]
pub struct DistRow {
    pub partition: SetPartition,
    pub stats: ArcStatistics,
    pub weight: SplWeight,
}

/// The full superplancherel distribution for a small `n`: one row per set
/// partition, in enumeration order, plus the exact total (always 1).
#[derive(Debug, Clone)]
pub struct DistributionTable {
    pub n: usize,
    pub q: FieldParam,
    pub rows: Vec<DistRow>,
    pub total: BigRational,
}

impl DistributionTable {
    /// Render as CSV with columns
    /// `partition,d,dim,crs,nst,a,b,weight_exact,weight_float`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("partition,d,dim,crs,nst,a,b,weight_exact,weight_float\n");
        for row in &self.rows {
            let exact = row.weight.exact().ok();
            let exact_string = exact
                .as_ref()
                .map(|r| format!("{}/{}", r.numer(), r.denom()))
                .unwrap_or_else(|| String::from("overflow"));
            let float = exact
                .as_ref()
                .and_then(|r| r.to_f64())
                .unwrap_or_else(|| row.weight.approx());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.partition.block_string(),
                row.stats.d,
                row.stats.dim,
                row.stats.crs,
                row.stats.nst,
                row.weight.a,
                row.weight.b,
                exact_string,
                float,
            ));
        }
        out
    }
}

/// Exact distribution of the superplancherel measure on partitions of
/// `1..=n`. Fails loudly if the exact total is not 1.
pub fn exact_distribution(n: usize, q: FieldParam) -> Result<DistributionTable, MeasureError> {
    if n > MAX_DISTRIBUTION_N {
        return Err(MeasureError::DistributionTooLarge {
            n,
            max: MAX_DISTRIBUTION_N,
        });
    }
    let mut rows = Vec::new();
    // All weights share the denominator q^{n(n-1)/2}; sum numerators exactly.
    let mut numerator_sum = BigUint::zero();
    for partition in enumerate_all(n) {
        let stats = *partition.statistics();
        let weight = spl_weight(&partition, q);
        numerator_sum += j_size(&partition, q);
        rows.push(DistRow {
            partition,
            stats,
            weight,
        });
    }
    let denom = BigUint::from(q.q()).pow((n * (n - 1) / 2) as u32);
    let total = BigRational::new(BigInt::from(numerator_sum), BigInt::from(denom));
    if !total.is_one() {
        return Err(MeasureError::TotalNotOne {
            total: total.to_string(),
        });
    }
    Ok(DistributionTable { n, q, rows, total })
}

/// Comparison of the matrix-enumeration tally against the closed-form
/// `|J_pi|` for one partition.
#[derive(Debug, Clone)]
pub struct CountEntry {
    pub partition: SetPartition,
    pub expected: BigUint,
    pub tallied: BigUint,
}

/// Outcome of [`verify_counts`].
#[derive(Debug, Clone)]
pub struct CountReport {
    pub n: usize,
    pub q: FieldParam,
    pub entries: Vec<CountEntry>,
    pub total: BigUint,
}

impl CountReport {
    pub fn mismatches(&self) -> Vec<&CountEntry> {
        self.entries
            .iter()
            .filter(|e| e.expected != e.tallied)
            .collect()
    }

    pub fn ok(&self) -> bool {
        let group_order =
            BigUint::from(self.q.q()).pow((self.n * (self.n - 1) / 2) as u32);
        self.mismatches().is_empty() && self.total == group_order
    }
}

/// Enumerate every matrix pattern of `U_n(F_q)` with multiplicity, classify
/// each by the sweep, and compare the class tallies against `|J_pi|`.
pub fn verify_counts(n: usize, q: FieldParam) -> Result<CountReport, MeasureError> {
    let mut tally: BTreeMap<SetPartition, BigUint> = BTreeMap::new();
    let mut total = BigUint::zero();
    for (pattern, multiplicity) in enumerate_matrices(n, q)? {
        let pi = pattern.partition();
        total += multiplicity;
        *tally.entry(pi).or_default() += BigUint::from(multiplicity);
    }
    let entries = enumerate_all(n)
        .map(|partition| {
            let expected = j_size(&partition, q);
            let tallied = tally.remove(&partition).unwrap_or_default();
            CountEntry {
                partition,
                expected,
                tallied,
            }
        })
        .collect();
    Ok(CountReport {
        n,
        q,
        entries,
        total,
    })
}

/// Supercharacter value `chi^pi` at the superclass indexed by `sigma`.
///
/// Zero unless every arc of `sigma` is a regular pair of `pi`; otherwise
/// `q^{dim - d - nst_pi(sigma)} * (q-1)^{d - m} * (-1)^m` with
/// `m = |D(pi) ∩ D(sigma)|`. The value is always an integer. At
/// `sigma = singletons` this is the degree `(q-1)^d q^{dim-d}`.
pub fn character_value(pi: &SetPartition, sigma: &SetPartition, q: FieldParam) -> BigRational {
    assert_eq!(pi.n(), sigma.n(), "character value needs pi.n == sigma.n");
    if !sigma.arcs().iter().all(|&(k, l)| pi.is_regular(k, l)) {
        return BigRational::zero();
    }
    let s = pi.statistics();
    let shared = sigma
        .arcs()
        .iter()
        .filter(|a| pi.arcs().binary_search(a).is_ok())
        .count();
    let nst = pi.nst_weight(sigma);
    let exponent = s.dim - s.d - nst; // nst_pi(sigma) <= dim - d always
    let qm1 = BigInt::from(q.q() - 1);
    let magnitude =
        BigInt::from(q.q()).pow(exponent as u32) * qm1.pow((s.d - shared) as u32);
    let signed = if shared % 2 == 0 { magnitude } else { -magnitude };
    BigRational::from_integer(signed)
}

/// Frobenius self-product `<chi^pi, chi^pi> = (q-1)^d q^{crs}`.
pub fn inner_product_self(pi: &SetPartition, q: FieldParam) -> BigRational {
    let s = pi.statistics();
    let qm1 = BigInt::from(q.q() - 1);
    BigRational::from_integer(qm1.pow(s.d as u32) * BigInt::from(q.q()).pow(s.crs as u32))
}

/// Order of `U_n(F_q)`.
pub fn group_order(n: usize, q: FieldParam) -> BigUint {
    BigUint::from(q.q()).pow((n * (n - 1) / 2) as u32)
}

/// Total-variation distance between an empirical tally and an exact table.
pub fn total_variation(table: &DistributionTable, counts: &BTreeMap<SetPartition, u64>) -> f64 {
    let total: u64 = counts.values().sum();
    let mut tv = 0.0;
    for row in &table.rows {
        let empirical = counts.get(&row.partition).copied().unwrap_or(0) as f64 / total as f64;
        tv += (empirical - row.weight.approx()).abs();
    }
    tv / 2.0
}
