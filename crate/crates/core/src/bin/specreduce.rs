use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specreduce::basis::{exhaustive_reduce, greedy_reduce, random_reduce, theoretical_max_calls};
use specreduce::experiment::{run_experiment1, run_experiment2, summarize, ExperimentConfig};
use specreduce::harness::DEFAULT_ALPHA;
use specreduce::programs::{
    gen_grover, gen_quantum_walk, gen_ring_graph_state, parse_circuit, serialize_circuit, simulate, Circuit,
    GroverIterations, GroverSpec,
};
use specreduce::{Error, Result};

#[derive(Parser)]
#[command(name = "specreduce", version, about = "Reduce quantum program specifications and test with them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Greedy,
    Random,
    Exhaustive,
}

#[derive(Subcommand)]
enum Command {
    /// Search a mixed Hadamard basis that minimizes the rank of a circuit's output.
    Reduce {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        algo: Algo,
        /// Masks drawn by the random search (default n(n+1)/2).
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduction runs, Greedy against Random.
    Exp1 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Mutant testing in the default and reduced bases.
    Exp2 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Summary tables for experiment CSVs.
    Summarize {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Summary CSV path (default: summary.csv next to the first input).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a generated circuit in text form.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Grover search.
    Grov {
        #[arg(long)]
        qubits: usize,
        /// Marked basis indices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        marked: Vec<usize>,
        /// `auto` or a fixed iteration count.
        #[arg(long, default_value = "auto")]
        iterations: String,
    },
    /// Ring graph state.
    Gs {
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 0)]
        input: usize,
    },
    /// Discrete walk on a cycle with one coin qubit.
    Qwalk {
        #[arg(long)]
        positions: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        input: usize,
    },
}

fn with_input(c: Circuit, input: usize) -> Result<Circuit> {
    Circuit::with_gates(c.num_qubits(), input, c.label(), c.gates().to_vec())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Reduce {
            circuit,
            algo,
            budget,
            seed,
        } => {
            let circuit = parse_circuit(&std::fs::read_to_string(&circuit)?)?;
            let state = simulate(&circuit)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let result = match algo {
                Algo::Greedy => greedy_reduce(&state, &mut rng),
                Algo::Random => {
                    let budget = budget.unwrap_or_else(|| theoretical_max_calls(circuit.num_qubits()));
                    random_reduce(&state, budget, &mut rng)?
                }
                Algo::Exhaustive => exhaustive_reduce(&state)?,
            };
            println!("mask {}", result.mask);
            println!("default_rank {}", result.default_rank);
            println!("reduced_rank {}", result.reduced_rank);
            println!("reduction_rate {}", result.reduction_rate());
            println!("objective_calls {}", result.objective_calls);
        }
        Command::Exp1 { config } => {
            println!("{}", run_experiment1(&ExperimentConfig::load(&config)?)?.display());
        }
        Command::Exp2 { config } => {
            println!("{}", run_experiment2(&ExperimentConfig::load(&config)?)?.display());
        }
        Command::Summarize { csv, alpha, output } => {
            let summary = summarize(&csv, alpha)?;
            let output = output.unwrap_or_else(|| {
                csv[0]
                    .parent()
                    .map(|d| d.join("summary.csv"))
                    .unwrap_or_else(|| PathBuf::from("summary.csv"))
            });
            summary.write_csv(&output)?;
            print!("{}", summary.report);
        }
        Command::Gen { family } => {
            let circuit = match family {
                Family::Grov {
                    qubits,
                    marked,
                    iterations,
                } => {
                    let iterations = match iterations.as_str() {
                        "auto" => GroverIterations::Auto,
                        k => GroverIterations::Fixed(
                            k.parse()
                                .map_err(|_| Error::InvalidArgument(format!("bad iteration count {k:?}")))?,
                        ),
                    };
                    gen_grover(&GroverSpec::new(qubits, marked, iterations))?
                }
                Family::Gs { qubits, input } => with_input(gen_ring_graph_state(qubits)?, input)?,
                Family::Qwalk { positions, steps, input } => with_input(gen_quantum_walk(positions, steps)?, input)?,
            };
            print!("{}", serialize_circuit(&circuit));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
