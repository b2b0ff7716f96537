use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ltsp_core::bench::{read_config, run_benchmark, write_report, TableFormat};
use ltsp_core::instances::{
    gen_gs_tightness, gen_online_adversary_base, gen_sss_pathological, gen_synthetic,
    knapsack_to_ltspr, read_instance, write_instance, KnapsackInput, KnapsackItem,
    SyntheticParams,
};
use ltsp_core::offline::{oracle_exact, uniform_case_solver, DEFAULT_ORACLE_FILES};
use ltsp_core::online::{adversary_lower_bound, simulate, simulate_with, OnlinePolicy, SimOptions};
use ltsp_core::{evaluate_offline, OfflineAlgorithm, RequestSet, Schedule, SolverContext};

#[derive(Parser)]
#[command(name = "ltsp", version, about = "Linear tape read scheduling")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Synthetic,
    SssPath,
    GsTight,
    Adversary,
    Knapsack,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write an instance file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Files (synthetic) or items (knapsack).
        #[arg(long, default_value_t = 100)]
        files: usize,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Tape length for sss-path and gs-tight.
        #[arg(long, default_value_t = 100)]
        m: u64,
        #[arg(long, default_value_t = 10)]
        capacity: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run an offline solver on release-zeroed requests.
    Solve {
        #[arg(long)]
        algo: String,
        path: PathBuf,
    },
    /// Run an online policy through the simulator.
    Simulate {
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the event trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        path: PathBuf,
    },
    /// Play the adaptive two-file adversary.
    Adversary {
        #[arg(long)]
        policy: String,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a benchmark config and write its tables.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn knapsack_input(items: usize, capacity: u64, seed: u64) -> KnapsackInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    KnapsackInput {
        items: (0..items)
            .map(|_| KnapsackItem {
                value: rng.random_range(1..=10),
                weight: rng.random_range(1..=capacity.max(1)),
            })
            .collect(),
        capacity,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate {
            kind,
            files,
            k,
            m,
            capacity,
            seed,
            output,
        } => {
            let (tape, reqs) = match kind {
                Kind::Synthetic => gen_synthetic(&SyntheticParams {
                    n_files: files,
                    k,
                    seed,
                })?,
                Kind::SssPath => gen_sss_pathological(m)?,
                Kind::GsTight => gen_gs_tightness(m)?,
                Kind::Adversary => {
                    let tape = gen_online_adversary_base(k)?;
                    let reqs = RequestSet::from_counts(&tape, &[0, 1])?;
                    (tape, reqs)
                }
                Kind::Knapsack => {
                    let (t, r, _) = knapsack_to_ltspr(&knapsack_input(files, capacity, seed))?;
                    (t, r)
                }
            };
            write_instance(&output, &tape, &reqs)
                .with_context(|| format!("writing {}", output.display()))?;
            println!(
                "wrote {} ({} files, {} requests, m={})",
                output.display(),
                tape.num_files(),
                reqs.len(),
                tape.length_m()
            );
        }
        Cmd::Solve { algo, path } => {
            let (tape, reqs) = read_instance(&path)?;
            let zeroed = reqs.zero_releases();
            let ctx = SolverContext::new(&tape, &zeroed);
            let schedule: Schedule = match algo.as_str() {
                "oracle" => oracle_exact(&ctx, DEFAULT_ORACLE_FILES)?.0,
                "uniform" => uniform_case_solver(&ctx)?,
                other => other.parse::<OfflineAlgorithm>()?.solve(&ctx),
            };
            let v = evaluate_offline(&tape, &zeroed, &schedule)?.total_response;
            println!("schedule {schedule}");
            println!("objective {v}");
        }
        Cmd::Simulate {
            policy,
            seed,
            trace,
            path,
        } => {
            let (tape, reqs) = read_instance(&path)?;
            let mut p = policy.parse::<OnlinePolicy>()?.build();
            let total = match trace {
                Some(out) => {
                    let (res, tr) = simulate(&tape, &reqs, p.as_mut(), seed)?;
                    std::fs::write(&out, tr.dump())
                        .with_context(|| format!("writing {}", out.display()))?;
                    res.total_response
                }
                None => {
                    simulate_with(&tape, &reqs, p.as_mut(), seed, SimOptions::default())?
                        .0
                        .total_response
                }
            };
            println!("objective {total}");
        }
        Cmd::Adversary { policy, k, seed } => {
            let mut p = policy.parse::<OnlinePolicy>()?.build();
            let out = adversary_lower_bound(p.as_mut(), k, seed)?;
            println!("alg_cost {}", out.alg_cost);
            println!("reference_cost {}", out.reference_cost);
            println!("ratio {:.4}", out.ratio);
        }
        Cmd::Bench { config, out } => {
            let cfg = read_config(&config)?;
            let report = run_benchmark(&cfg)?;
            write_report(&report, &out)?;
            print!("{}", ltsp_core::bench::relative_table(&report, TableFormat::Markdown));
            if report.configs.iter().any(|c| c.is_partial()) {
                bail!("some runs faulted; see {}", out.join("faults.txt").display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
