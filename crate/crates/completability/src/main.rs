//! Command-line front end. All logic lives in the library; this binary
//! parses flags, reads/writes files, and maps verdicts to exit codes
//! (0 completable, 1 not completable, 2 usage or runtime error). Stdout
//! carries only machine-readable payload; diagnostics go to stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use completability::harness::{
    bench, fit_scaling, read_sweep_csv, sweep, write_bench_csv, write_sweep_csv, HarnessConfig,
};
use completability::pattern::{
    parse_pattern, sample_gram, sample_rect, write_pattern, Pattern, PatternKind,
};
use completability::rank1::{check_gram_rank1, check_rect_rank1, complete_gram_rank1, Rank1Values};
use completability::verdict::{test_global, test_local, TestConfig, TestKind};

#[derive(Parser)]
#[command(
    name = "completability",
    version,
    about = "Test whether a partially observed low-rank matrix has a unique completion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Gram,
    Rect,
}

impl From<KindArg> for PatternKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gram => PatternKind::Gram,
            KindArg::Rect => PatternKind::Rect,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    Local,
    Global,
}

impl From<TestArg> for TestKind {
    fn from(t: TestArg) -> Self {
        match t {
            TestArg::Local => TestKind::Local,
            TestArg::Global => TestKind::Global,
        }
    }
}

#[derive(Args)]
struct ProbeFlags {
    /// Probe tolerance scale (LSQR tolerance is epsilon/sqrt(#vertices))
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Independent probes per kernel test
    #[arg(short = 'k', long, default_value_t = 1)]
    probes: usize,
    /// RNG seed (fixed default keeps runs reproducible)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random observation pattern and write it in the pattern
    /// file format
    Sample {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Matrix dimension (gram), or rows when --n2 is given
        #[arg(long, required_unless_present = "n1")]
        n: Option<usize>,
        /// Rows (rect)
        #[arg(long, conflicts_with = "n")]
        n1: Option<usize>,
        /// Columns (rect)
        #[arg(long, conflicts_with = "n")]
        n2: Option<usize>,
        /// Observation probability per entry
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a completability test on a pattern file; prints a JSON verdict
    Check {
        #[arg(value_enum)]
        test: TestArg,
        /// Target rank d
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        probe: ProbeFlags,
        pattern: PathBuf,
    },
    /// Rank-1 tools: combinatorial checks and exact completion
    Rank1 {
        #[command(subcommand)]
        mode: Rank1Mode,
    },
    /// Estimate completability thresholds over a grid of sizes; prints CSV
    Threshold {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Rank values, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        rank: Vec<usize>,
        /// Sizes, comma separated (rect cells use n1 = n2 = n)
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_enum)]
        test: TestArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Concurrent trials in the refinement phase
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the scaling law log(beta*) = a1 log n + a2 log log n + a3 to a
    /// sweep CSV; prints the coefficients as JSON
    Fit {
        /// Pin a2 to this value (1 = coupon-collector scaling)
        #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "1.0")]
        fix_a2: Option<f64>,
        csv: PathBuf,
    },
    /// Time verdicts at multiples of the threshold; prints CSV
    Bench {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value = "local")]
        test: TestArg,
        /// Multiples of beta* to run, comma separated
        #[arg(long, value_delimiter = ',')]
        multipliers: Option<Vec<f64>>,
        /// Use this beta* instead of estimating it
        #[arg(long)]
        beta_star: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Rank1Mode {
    /// Combinatorial completability checks; prints JSON
    Check { pattern: PathBuf },
    /// Reconstruct points from observed values (gram patterns); prints JSON
    Complete {
        pattern: PathBuf,
        /// Values file: lines `i j value`, 1-based
        #[arg(long)]
        values: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, payload).with_context(|| format!("writing {path:?}"))?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn load_pattern(path: &PathBuf) -> Result<Pattern> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(parse_pattern(&text)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sample { kind, n, n1, n2, beta, seed, out } => {
            if !(0.0..=1.0).contains(&beta) {
                bail!("beta must lie in [0, 1], got {beta}");
            }
            let pattern = match (kind, n, n1, n2) {
                (KindArg::Gram, Some(n), None, None) => {
                    Pattern::Gram(sample_gram(n, beta, seed))
                }
                (KindArg::Rect, None, Some(n1), Some(n2)) => {
                    Pattern::Rect(sample_rect(n1, n2, beta, seed))
                }
                (KindArg::Gram, ..) => bail!("gram sampling takes --n"),
                (KindArg::Rect, ..) => bail!("rect sampling takes --n1 and --n2"),
            };
            emit(out.as_ref(), &write_pattern(&pattern))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Check { test, rank, probe, pattern } => {
            let pattern = load_pattern(&pattern)?;
            let cfg = TestConfig {
                epsilon: probe.epsilon,
                probes: probe.probes,
                seed: probe.seed,
                ..Default::default()
            };
            let verdict = match TestKind::from(test) {
                TestKind::Local => test_local(&pattern, rank, &cfg)?,
                TestKind::Global => test_global(&pattern, rank, &cfg)?,
            };
            println!("{}", verdict.to_json());
            Ok(if verdict.completable { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }

        Command::Rank1 { mode } => match mode {
            Rank1Mode::Check { pattern } => {
                let verdict = match load_pattern(&pattern)? {
                    Pattern::Gram(p) => check_gram_rank1(&p),
                    Pattern::Rect(p) => check_rect_rank1(&p),
                };
                let components: Vec<serde_json::Value> = verdict
                    .components
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "vertices": c.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
                            "edges": c.edge_count,
                            "has_self_loop": c.has_self_loop,
                            "has_odd_cycle": c.has_odd_cycle,
                            "bipartite": c.bipartite,
                        })
                    })
                    .collect();
                let payload = serde_json::json!({
                    "schema": 1,
                    "minimally_locally": verdict.minimally_locally,
                    "locally": verdict.locally,
                    "minimally_globally": verdict.minimally_globally,
                    "globally": verdict.globally,
                    "components": components,
                });
                println!("{payload}");
                Ok(ExitCode::SUCCESS)
            }
            Rank1Mode::Complete { pattern, values } => {
                let Pattern::Gram(gram) = load_pattern(&pattern)? else {
                    bail!("rank-1 completion expects a gram pattern");
                };
                let text =
                    fs::read_to_string(&values).with_context(|| format!("reading {values:?}"))?;
                let values = Rank1Values::parse(&text)?;
                let points = complete_gram_rank1(&gram, &values)?;
                let comps: Vec<Vec<usize>> = check_gram_rank1(&gram)
                    .components
                    .iter()
                    .map(|c| c.vertices.iter().map(|v| v + 1).collect())
                    .collect();
                eprintln!(
                    "note: points are determined up to one sign flip per component; \
                     one representative follows ({} components)",
                    comps.len()
                );
                let payload = serde_json::json!({
                    "schema": 1,
                    "points": points,
                    "sign_orbit_components": comps,
                });
                println!("{payload}");
                Ok(ExitCode::SUCCESS)
            }
        },

        Command::Threshold { kind, rank, n, test, seed, jobs, epsilon, out } => {
            let cfg = HarnessConfig { jobs, epsilon, ..Default::default() };
            let rows = sweep(&n, &rank, kind.into(), test.into(), &cfg, seed)?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            emit(out.as_ref(), std::str::from_utf8(&buf)?)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Fit { fix_a2, csv } => {
            let file = fs::File::open(&csv).with_context(|| format!("opening {csv:?}"))?;
            let rows = read_sweep_csv(file)?;
            let points: Vec<(f64, f64)> =
                rows.iter().map(|r| (r.n as f64, r.beta_star)).collect();
            let fit = fit_scaling(&points, fix_a2)?;
            let payload = serde_json::json!({
                "schema": 1,
                "a1": fit.a1,
                "a1_plus_2": fit.a1_plus_2,
                "a2": fit.a2,
                "a3": fit.a3,
                "se_a1": fit.se_a1,
                "se_a2": fit.se_a2,
                "se_a3": fit.se_a3,
                "residual_norm": fit.residual_norm,
                "points": fit.points,
                "a2_fixed": fix_a2.is_some(),
            });
            println!("{payload}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Bench { kind, rank, n, test, multipliers, beta_star, seed, out } => {
            let test: TestKind = test.into();
            let defaults = match test {
                TestKind::Local => vec![0.75, 1.0, 2.0],
                TestKind::Global => vec![0.8, 1.0, 2.0],
            };
            let multipliers = multipliers.unwrap_or(defaults);
            let cfg = HarnessConfig::default();
            let rows =
                bench(&n, rank, kind.into(), test, &multipliers, beta_star, &cfg, seed)?;
            let mut buf = Vec::new();
            write_bench_csv(&rows, &mut buf)?;
            emit(out.as_ref(), std::str::from_utf8(&buf)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
