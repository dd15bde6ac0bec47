//! Seeded, reproducible batch experiments: limit-shape convergence
//! diagnostics over growing `n`, pooled heatmaps, and a side-by-side
//! contrast with uniformly random set partitions.
//!
//! Every sample draws from its own derived-seed generator, so splitting a
//! batch across workers reproduces the serial output byte for byte; the
//! `SPL_THREADS` environment variable caps the worker count.

use std::fs;
use std::path::PathBuf;

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::embed;
use crate::rng::{derive_seed, stream_rng};
use crate::sampler::{sample_pattern, FieldParam, SamplerError};
use crate::setpartition::SetPartition;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("I/O failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

fn default_grid() -> usize {
    100
}

/// A batch description: for each `n`, draw `count` superplancherel samples
/// at field order `q` and record shape statistics. The `grid` controls
/// both the discrepancy lattice and the heatmap bin count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub q: u64,
    pub seed: u64,
    pub count: usize,
    pub n_values: Vec<usize>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.q < 2 {
            return Err(ExperimentError::InvalidPlan(format!(
                "q must be at least 2, got {}",
                self.q
            )));
        }
        if self.count == 0 {
            return Err(ExperimentError::InvalidPlan("count must be positive".into()));
        }
        if self.n_values.is_empty() {
            return Err(ExperimentError::InvalidPlan("no n values".into()));
        }
        if self.n_values[0] == 0 {
            return Err(ExperimentError::InvalidPlan("n must be positive".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::InvalidPlan(
                "n values must be strictly increasing".into(),
            ));
        }
        if self.grid < 2 {
            return Err(ExperimentError::InvalidPlan(format!(
                "grid must be at least 2, got {}",
                self.grid
            )));
        }
        Ok(())
    }
}

/// Aggregated shape statistics for one value of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub q: u64,
    pub count: usize,
    pub mean_dim_n2: f64,
    pub sd_dim_n2: f64,
    pub mean_crs_n2: f64,
    pub sd_crs_n2: f64,
    pub mean_darc_n: f64,
    pub mean_disc: f64,
    pub sd_disc: f64,
    pub mean_entropy: f64,
}

/// Everything a run produces; files are additionally written when the plan
/// names an output directory.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ConvergenceRow>,
    pub convergence_csv: String,
    /// One `(n, csv)` pair per requested `n`.
    pub heatmaps: Vec<(usize, String)>,
}

struct SampleRecord {
    dim_n2: f64,
    crs_n2: f64,
    darc_n: f64,
    disc: f64,
    entropy: f64,
    heatmap: Vec<Vec<f64>>,
}

fn one_sample(n: usize, q: FieldParam, seed: u64, grid: usize) -> SampleRecord {
    let pi = sample_pattern(n, q, seed).partition();
    let stats = *pi.statistics();
    let m = embed(&pi);
    let n2 = (n * n) as f64;
    // dim = sum(right ends) - sum(left ends) <= d (n - d) <= n^2 / 4.
    assert!(stats.dim as f64 / n2 <= 0.5, "dim out of range");
    SampleRecord {
        dim_n2: stats.dim as f64 / n2,
        crs_n2: stats.crs as f64 / n2,
        darc_n: stats.d as f64 / n as f64,
        disc: m.discrepancy(grid),
        entropy: m.entropy().to_f64().unwrap_or(f64::NAN),
    heatmap: m.heatmap(grid),
    }
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone, count: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / count as f64;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64;
    (mean, var.sqrt())
}

fn heatmap_csv(n: usize, q: u64, seed: u64, grid: usize, bins: &[Vec<f64>]) -> String {
    let mut out = format!("# {n} {q} {seed} {grid}\n");
    for row in bins {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

const CONVERGENCE_HEADER: &str = "n,q,count,mean_dim_n2,sd_dim_n2,mean_crs_n2,sd_crs_n2,mean_darc_n,mean_disc,sd_disc,mean_entropy";

fn compute(plan: &ExperimentPlan, q: FieldParam) -> (Vec<ConvergenceRow>, Vec<(usize, String)>) {
    let mut rows = Vec::with_capacity(plan.n_values.len());
    let mut heatmaps = Vec::with_capacity(plan.n_values.len());
    for &n in &plan.n_values {
        let batch_seed = derive_seed(plan.seed, n as u64);
        let records: Vec<SampleRecord> = (0..plan.count)
            .into_par_iter()
            .map(|i| one_sample(n, q, derive_seed(batch_seed, i as u64), plan.grid))
            .collect();
        let count = records.len();
        let (mean_dim_n2, sd_dim_n2) = mean_sd(records.iter().map(|r| r.dim_n2), count);
        let (mean_crs_n2, sd_crs_n2) = mean_sd(records.iter().map(|r| r.crs_n2), count);
        let (mean_darc_n, _) = mean_sd(records.iter().map(|r| r.darc_n), count);
        let (mean_disc, sd_disc) = mean_sd(records.iter().map(|r| r.disc), count);
        let (mean_entropy, _) = mean_sd(records.iter().map(|r| r.entropy), count);
        rows.push(ConvergenceRow {
            n,
            q: q.q(),
            count,
            mean_dim_n2,
            sd_dim_n2,
            mean_crs_n2,
            sd_crs_n2,
            mean_darc_n,
            mean_disc,
            sd_disc,
            mean_entropy,
        });
        // Pool the sample heatmaps in index order.
        let mut pooled = vec![vec![0.0f64; plan.grid]; plan.grid];
        for record in &records {
            for (acc_row, row) in pooled.iter_mut().zip(&record.heatmap) {
                for (acc, v) in acc_row.iter_mut().zip(row) {
                    *acc += v;
                }
            }
        }
        for row in pooled.iter_mut() {
            for v in row.iter_mut() {
                *v /= count as f64;
            }
        }
        heatmaps.push((n, heatmap_csv(n, q.q(), plan.seed, plan.grid, &pooled)));
    }
    (rows, heatmaps)
}

fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(CONVERGENCE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.q,
            r.count,
            r.mean_dim_n2,
            r.sd_dim_n2,
            r.mean_crs_n2,
            r.sd_crs_n2,
            r.mean_darc_n,
            r.mean_disc,
            r.sd_disc,
            r.mean_entropy
        ));
    }
    out
}

/// Worker cap from the `SPL_THREADS` environment variable, if set.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("SPL_THREADS").ok()?.parse().ok()
}

/// Run a plan with an explicit worker count (`None` for the rayon
/// default). The output is identical for every worker count.
pub fn run_with_threads(
    plan: &ExperimentPlan,
    threads: Option<usize>,
) -> Result<ExperimentOutput, ExperimentError> {
    plan.validate()?;
    let q = FieldParam::new(plan.q)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let (rows, heatmaps) = pool.install(|| compute(plan, q));
    let output = ExperimentOutput {
        convergence_csv: convergence_csv(&rows),
        rows,
        heatmaps,
    };
    if let Some(dir) = &plan.out_dir {
        fs::create_dir_all(dir).map_err(|e| ExperimentError::Io {
            path: dir.clone(),
            source: e,
        })?;
        let path = dir.join("convergence.csv");
        fs::write(&path, &output.convergence_csv)
            .map_err(|e| ExperimentError::Io { path, source: e })?;
        for (n, csv) in &output.heatmaps {
            let path = dir.join(format!("heatmap_{n}.csv"));
            fs::write(&path, csv).map_err(|e| ExperimentError::Io { path, source: e })?;
        }
    }
    Ok(output)
}

/// Run a plan, honouring `SPL_THREADS`.
pub fn run(plan: &ExperimentPlan) -> Result<ExperimentOutput, ExperimentError> {
    run_with_threads(plan, threads_from_env())
}

/// Exact uniform sampling of set partitions by the exchangeable-urn
/// construction: draw the urn count `U` with probability proportional to
/// `u^n / u!`, then place each element independently and uniformly into
/// one of the `U` urns. The occupied urns then form a uniformly random
/// set partition.
pub struct UniformPartitionSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl UniformPartitionSampler {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let u_max = 3 * n + 40;
        let mut log_weights = Vec::with_capacity(u_max);
        let mut log_factorial = 0.0f64;
        for u in 1..=u_max {
            log_factorial += (u as f64).ln();
            log_weights.push(n as f64 * (u as f64).ln() - log_factorial);
        }
        let peak = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut cdf = Vec::with_capacity(u_max);
        let mut acc = 0.0;
        for lw in &log_weights {
            acc += (lw - peak).exp();
            cdf.push(acc);
        }
        let total = acc;
        for v in cdf.iter_mut() {
            *v /= total;
        }
        UniformPartitionSampler { n, cdf }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> SetPartition {
        let r: f64 = rng.random();
        let u = self.cdf.partition_point(|&c| c < r) + 1;
        let mut urns = vec![Vec::new(); u];
        for element in 1..=self.n {
            urns[rng.random_range(0..u)].push(element);
        }
        let blocks: Vec<Vec<usize>> = urns.into_iter().filter(|b| !b.is_empty()).collect();
        SetPartition::from_blocks(self.n, &blocks)
            .expect("urn occupancy always forms a partition")
    }
}

/// Side-by-side means of `dim/n^2` and `crs/n^2` under the uniform measure
/// and under the superplancherel measure (at `q = 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub n: usize,
    pub count: usize,
    pub uniform_mean_dim_n2: f64,
    pub uniform_mean_crs_n2: f64,
    pub spl_mean_dim_n2: f64,
    pub spl_mean_crs_n2: f64,
}

/// Contrast uniform and superplancherel random partitions at one `n`.
pub fn compare_uniform(n: usize, count: usize, seed: u64) -> Result<CompareReport, ExperimentError> {
    if n == 0 || n > 2000 {
        return Err(ExperimentError::InvalidPlan(format!(
            "compare_uniform needs 1 <= n <= 2000, got {n}"
        )));
    }
    if count == 0 {
        return Err(ExperimentError::InvalidPlan("count must be positive".into()));
    }
    let q = FieldParam::new(2).expect("2 is a valid field order");
    let uniform = UniformPartitionSampler::new(n);
    let uniform_base = derive_seed(seed, 1);
    let spl_base = derive_seed(seed, 2);
    let n2 = (n * n) as f64;
    let mut u_dim = 0.0;
    let mut u_crs = 0.0;
    let mut s_dim = 0.0;
    let mut s_crs = 0.0;
    for i in 0..count {
        let mut rng = stream_rng(uniform_base, i as u64);
        let pi = uniform.sample(&mut rng);
        let st = pi.statistics();
        u_dim += st.dim as f64 / n2;
        u_crs += st.crs as f64 / n2;

        let pi = sample_pattern(n, q, derive_seed(spl_base, i as u64)).partition();
        let st = pi.statistics();
        s_dim += st.dim as f64 / n2;
        s_crs += st.crs as f64 / n2;
    }
    let c = count as f64;
    Ok(CompareReport {
        n,
        count,
        uniform_mean_dim_n2: u_dim / c,
        uniform_mean_crs_n2: u_crs / c,
        spl_mean_dim_n2: s_dim / c,
        spl_mean_crs_n2: s_crs / c,
    })
}
