//! `spl` — sampling, exact tables, verification suites, shape experiments
//! and the supercharacter engine, from one binary.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error,
//! 3 failed verification identity.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use superplancherel::experiments::{self, ExperimentPlan};
use superplancherel::measure::{exact_distribution, verify_counts};
use superplancherel::rng::derive_seed;
use superplancherel::sampler::{sample_pattern, FieldParam};
use superplancherel::sct::{SubgroupEmbedding, SuperTheory};

const EXIT_RUNTIME: u8 = 1;
const EXIT_IDENTITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "spl",
    version,
    about = "Superplancherel measure toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Draw random set partitions from the superplancherel measure.
    Sample {
        /// Ground-set size.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Field order (>= 2).
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        q: u64,
        /// Base seed; sample i uses the seed derived from (seed, i).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of samples.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        /// json: one partition record per line; csv: statistics rows.
        #[arg(long, value_enum, default_value_t = SampleFormat::Json)]
        format: SampleFormat,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact distribution table for a small n.
    Exact {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the matrix-enumeration identities for all n up to a bound.
    Verify {
        #[arg(long = "n-max", default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        /// Comma-separated field orders.
        #[arg(long = "q-list", value_delimiter = ',', default_value = "2,3")]
        q_list: Vec<u64>,
    },
    /// Run a shape-experiment plan from a JSON file.
    Shape {
        #[arg(long = "plan-file")]
        plan_file: PathBuf,
    },
    /// Supercharacter-theory engine.
    Sct {
        #[command(subcommand)]
        action: SctAction,
    },
}

#[derive(Subcommand)]
enum SctAction {
    /// Validate a theory file: axioms, orthogonality of both kinds, and
    /// normalization of the superplancherel masses.
    Validate {
        #[arg(long)]
        theory: PathBuf,
    },
    /// Transition matrix from an embedded theory to an ambient one.
    Transition {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
    },
}

fn warn_if_not_prime_power(q: FieldParam) {
    if !q.is_prime_power() {
        eprintln!(
            "warning: q = {} is not a prime power; the supercharacter theory is stated for prime powers",
            q.q()
        );
    }
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_sample(
    n: u64,
    q: u64,
    seed: u64,
    count: u64,
    format: SampleFormat,
    out: Option<PathBuf>,
) -> Result<u8, String> {
    let q = FieldParam::new(q).map_err(|e| e.to_string())?;
    warn_if_not_prime_power(q);
    let mut content = String::new();
    if format == SampleFormat::Csv {
        content.push_str("n,q,seed,d,dim,crs,nst\n");
    }
    for i in 0..count {
        let sample_seed = derive_seed(seed, i);
        let pi = sample_pattern(n as usize, q, sample_seed).partition();
        match format {
            SampleFormat::Json => {
                let line = serde_json::to_string(&pi).map_err(|e| e.to_string())?;
                content.push_str(&line);
                content.push('\n');
            }
            SampleFormat::Csv => {
                let s = pi.statistics();
                let _ = writeln!(
                    content,
                    "{},{},{},{},{},{},{}",
                    n,
                    q.q(),
                    sample_seed,
                    s.d,
                    s.dim,
                    s.crs,
                    s.nst
                );
            }
        }
    }
    emit(out.as_ref(), &content)?;
    Ok(0)
}

fn cmd_exact(n: u64, q: u64, out: Option<PathBuf>) -> Result<u8, String> {
    let q = FieldParam::new(q).map_err(|e| e.to_string())?;
    warn_if_not_prime_power(q);
    let table = exact_distribution(n as usize, q).map_err(|e| e.to_string())?;
    emit(out.as_ref(), &table.to_csv())?;
    Ok(0)
}

fn cmd_verify(n_max: u64, q_list: Vec<u64>) -> Result<u8, String> {
    if q_list.is_empty() {
        return Err("q-list must not be empty".into());
    }
    let mut failed = false;
    for qv in &q_list {
        let q = FieldParam::new(*qv).map_err(|e| e.to_string())?;
        warn_if_not_prime_power(q);
        for n in 1..=n_max as usize {
            let report = verify_counts(n, q).map_err(|e| e.to_string())?;
            if report.ok() {
                println!("n={n} q={qv}: counts OK (total {})", report.total);
            } else {
                failed = true;
                println!("n={n} q={qv}: MISMATCH");
                for entry in report.mismatches() {
                    println!(
                        "  {}: expected {}, tallied {}",
                        entry.partition, entry.expected, entry.tallied
                    );
                }
            }
            // The exact table independently re-checks that the weights
            // add up to exactly 1.
            if let Err(e) = exact_distribution(n, q) {
                failed = true;
                println!("n={n} q={qv}: normalization FAILED ({e})");
            }
        }
    }
    Ok(if failed { EXIT_IDENTITY } else { 0 })
}

fn cmd_shape(plan_file: PathBuf) -> Result<u8, String> {
    let text = fs::read_to_string(&plan_file)
        .map_err(|e| format!("cannot read {}: {e}", plan_file.display()))?;
    let plan: ExperimentPlan = serde_json::from_str(&text)
        .map_err(|e| format!("bad plan {}: {e}", plan_file.display()))?;
    let output = experiments::run(&plan).map_err(|e| e.to_string())?;
    match &plan.out_dir {
        Some(dir) => {
            println!("wrote {}", dir.join("convergence.csv").display());
            for (n, _) in &output.heatmaps {
                println!("wrote {}", dir.join(format!("heatmap_{n}.csv")).display());
            }
        }
        None => print!("{}", output.convergence_csv),
    }
    Ok(0)
}

fn load_theory(path: &PathBuf) -> Result<SuperTheory, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SuperTheory::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_sct_validate(theory: PathBuf) -> Result<u8, String> {
    let t = load_theory(&theory)?;
    let mut ok = true;
    match t.validate() {
        Ok(()) => println!("axioms: OK"),
        Err(e) => {
            ok = false;
            println!("axioms: FAILED ({e})");
        }
    }
    match t.second_orthogonality() {
        Ok(report) if report.pass => println!(
            "second-kind orthogonality: OK (max deviation {:.3e})",
            report.max_deviation
        ),
        Ok(report) => {
            ok = false;
            println!(
                "second-kind orthogonality: FAILED (max deviation {:.3e})",
                report.max_deviation
            );
        }
        Err(e) => {
            ok = false;
            println!("second-kind orthogonality: FAILED ({e})");
        }
    }
    match t.spl() {
        Ok(masses) => {
            let rendered: Vec<String> = masses.iter().map(|m| format!("{m:.6}")).collect();
            println!("superplancherel masses: [{}]", rendered.join(", "));
        }
        Err(e) => {
            ok = false;
            println!("superplancherel masses: FAILED ({e})");
        }
    }
    Ok(if ok { 0 } else { EXIT_IDENTITY })
}

fn cmd_sct_transition(theory: PathBuf, embedding: PathBuf) -> Result<u8, String> {
    let parent = load_theory(&theory)?;
    let text = fs::read_to_string(&embedding)
        .map_err(|e| format!("cannot read {}: {e}", embedding.display()))?;
    let emb = SubgroupEmbedding::from_json_str(&text)
        .map_err(|e| format!("{}: {e}", embedding.display()))?;
    emb.validate_in(&parent).map_err(|e| e.to_string())?;
    let matrix = emb.transition(&parent).map_err(|e| e.to_string())?;
    for row in &matrix.rows {
        let rendered: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        println!("{}", rendered.join(","));
    }
    let mut ok = true;
    for (idx, sum) in matrix.row_sums().iter().enumerate() {
        if (sum - 1.0).abs() > 1e-9 {
            ok = false;
            println!("row {idx} sums to {sum}, not 1");
        }
    }
    let sub_spl = emb.sub.spl().map_err(|e| e.to_string())?;
    let parent_spl = parent.spl().map_err(|e| e.to_string())?;
    for (chi, &target) in parent_spl.iter().enumerate() {
        let pushed: f64 = matrix
            .rows
            .iter()
            .zip(&sub_spl)
            .map(|(row, &mass)| row[chi] * mass)
            .sum();
        if (pushed - target).abs() > 1e-9 {
            ok = false;
            println!("pushforward mismatch at column {chi}: {pushed} vs {target}");
        }
    }
    if ok {
        println!("rows sum to 1; pushforward matches the ambient superplancherel measure");
    }
    Ok(if ok { 0 } else { EXIT_IDENTITY })
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Sample {
            n,
            q,
            seed,
            count,
            format,
            out,
        } => cmd_sample(n, q, seed, count, format, out),
        Command::Exact { n, q, out } => cmd_exact(n, q, out),
        Command::Verify { n_max, q_list } => cmd_verify(n_max, q_list),
        Command::Shape { plan_file } => cmd_shape(plan_file),
        Command::Sct { action } => match action {
            SctAction::Validate { theory } => cmd_sct_validate(theory),
            SctAction::Transition { theory, embedding } => {
                cmd_sct_transition(theory, embedding)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
