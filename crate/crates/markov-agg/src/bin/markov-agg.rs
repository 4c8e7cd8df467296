//! Command-line front end: stationary distributions, partition evaluation,
//! lifting, lumpability checks, partition search, M-sweeps, and the
//! reaction-network pipeline.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use markov_agg::textio::{
    fmt_display, parse_fixed_set, parse_matrix, parse_partition, write_fixed_set, write_legend,
    write_matrix, write_partition,
};
use markov_agg::{
    aggregate, evaluate, lumpability_check, p_lift, pi_lift, strict_local_minima, sweep,
    Criterion, Error, FixedClass, MarkovChain, Partition, ReactionNetwork, SweepMethod,
    SweepRecord,
};

#[derive(Parser)]
#[command(name = "markov-agg", version, about = "Markov chain state space reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the stationary distribution of a transition matrix.
    Stationary {
        matrix: PathBuf,
        /// Renormalize rows instead of rejecting row-sum violations.
        #[arg(long)]
        renormalize: bool,
    },
    /// Evaluate both lifting bounds and information losses for a partition.
    Evaluate {
        matrix: PathBuf,
        partition: PathBuf,
        #[arg(long, default_value_t = markov_agg::LUMPABILITY_TOL)]
        tol: f64,
        /// Write both lifted matrices next to --out.
        #[arg(long)]
        emit_lifts: bool,
        /// Output path prefix for emitted lifts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a lifted transition matrix and write it in matrix format.
    Lift {
        matrix: PathBuf,
        partition: PathBuf,
        #[arg(long, value_enum, default_value_t = Lifting::P)]
        lifting: Lifting,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check strong lumpability of a matrix w.r.t. a partition.
    Lumpcheck {
        matrix: PathBuf,
        partition: PathBuf,
        #[arg(long, default_value_t = markov_agg::LUMPABILITY_TOL)]
        tol: f64,
    },
    /// Search for the best partition at a fixed class count.
    Search {
        matrix: PathBuf,
        /// Target number of classes.
        #[arg(short = 'M', long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Method::Aib)]
        method: Method,
        #[arg(long, value_enum, default_value_t = CriterionArg::PLiftKldr)]
        criterion: CriterionArg,
        #[command(flatten)]
        fixed: FixedArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate partitions over a range of class counts; emits a TSV curve.
    Sweep {
        matrix: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum, default_value_t = Method::Aib)]
        method: Method,
        #[arg(long, default_value_t = markov_agg::LUMPABILITY_TOL)]
        tol: f64,
        #[command(flatten)]
        fixed: FixedArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniformize a reaction-network CTMC into a DTMC matrix plus legend.
    Ctmc {
        network: PathBuf,
        /// Uniformization constant; defaults to max |R_ii| + 1.
        #[arg(long)]
        lambda: Option<f64>,
        /// Reachable state cap.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        /// Fixed-class predicate over species counts, e.g. "P>9" or "gene-on".
        #[arg(long)]
        fixed_predicate: Option<String>,
        /// Output path prefix (writes <out>.mat, <out>.legend, <out>.fixed).
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct FixedArgs {
    /// File with 1-based state indices forming a fixed class.
    #[arg(long)]
    fixed: Option<PathBuf>,
    /// Allow the fixed class to merge with other classes during the search.
    #[arg(long)]
    fixed_mergeable: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lifting {
    /// Transition-profile lifting.
    P,
    /// Stationary-distribution lifting (pi = mu).
    Mu,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Aib,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    LossX,
    PLiftKldr,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::TooLarge { .. }
        | Error::TooManySequences { .. }
        | Error::StateSpaceExceeded { .. } => 3,
        Error::NotConverged { .. }
        | Error::NotRegular
        | Error::AbsoluteContinuityViolation { .. }
        | Error::AggregationMismatch { .. }
        | Error::TargetNotInStateList { .. } => 1,
        _ => 2,
    }
}

fn load_chain(path: &Path, renormalize: bool) -> Result<MarkovChain, Error> {
    let text = std::fs::read_to_string(path)?;
    let p = parse_matrix(&text, renormalize)?;
    MarkovChain::new(p)
}

fn load_partition(path: &Path, n: usize) -> Result<Partition, Error> {
    let text = std::fs::read_to_string(path)?;
    let g = parse_partition(&text)?;
    if g.n() != n {
        return Err(Error::Parse {
            line: 0,
            message: format!("partition covers {} states, matrix has {n}", g.n()),
        });
    }
    Ok(g)
}

fn load_fixed(args: &FixedArgs, n: usize) -> Result<Option<FixedClass>, Error> {
    match &args.fixed {
        None => Ok(None),
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let states = parse_fixed_set(&text, n)?;
            Ok(Some(FixedClass { states, mergeable: args.fixed_mergeable }))
        }
    }
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn sweep_tsv(records: &[SweepRecord]) -> String {
    let mut out = String::from("m\tkldr_p\tkldr_mu\tloss_x\tlumpable\tpartition\n");
    for r in records {
        let labels: Vec<String> = r.partition.assignment().iter().map(|l| l.to_string()).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.m,
            fmt_display(r.kldr_p),
            fmt_display(r.kldr_mu),
            fmt_display(r.loss_x),
            r.lumpable,
            labels.join(",")
        ));
    }
    out
}

/// Fixed-class predicate over species counts: `gene-on` (shorthand for
/// `G1>0`) or `<species><op><integer>` with op one of >, >=, <, <=, =.
fn predicate_states(network: &ReactionNetwork, states: &[Vec<u64>], expr: &str) -> Result<Vec<usize>, Error> {
    let expr = expr.trim();
    let normalized = if expr == "gene-on" { "G1>0" } else { expr };
    let (name, op, value) = ["<=", ">=", "<", ">", "="]
        .iter()
        .find_map(|op| {
            normalized
                .split_once(op)
                .map(|(name, value)| (name.trim(), *op, value.trim()))
        })
        .ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("bad predicate: {expr}"),
        })?;
    let species = network
        .species
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("predicate references unknown species {name}"),
        })?;
    let threshold: u64 = value.parse().map_err(|e| Error::Parse {
        line: 0,
        message: format!("bad predicate threshold {value}: {e}"),
    })?;
    let selected: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, s)| match op {
            ">" => s[species] > threshold,
            ">=" => s[species] >= threshold,
            "<" => s[species] < threshold,
            "<=" => s[species] <= threshold,
            _ => s[species] == threshold,
        })
        .map(|(i, _)| i)
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidFixedSet { n: states.len() });
    }
    Ok(selected)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Stationary { matrix, renormalize } => {
            let chain = load_chain(&matrix, renormalize)?;
            let cells: Vec<String> =
                chain.mu().entries().iter().map(|&v| fmt_display(v)).collect();
            println!("{}", cells.join(" "));
        }
        Command::Evaluate { matrix, partition, tol, emit_lifts, out } => {
            let chain = load_chain(&matrix, false)?;
            let g = load_partition(&partition, chain.n())?;
            let report = evaluate(&chain, &g, tol)?;
            let y = aggregate(&chain, &g);
            println!("kldr_p={}", fmt_display(report.kldr_p));
            println!("kldr_mu={}", fmt_display(report.kldr_mu));
            println!("loss_x={}", fmt_display(report.loss_x));
            println!("loss_y={}", fmt_display(report.loss_y));
            println!("h_rate={}", fmt_display(report.h_rate));
            println!("lumpable={}", report.lumpable);
            let nu: Vec<String> = y.nu().entries().iter().map(|&v| fmt_display(v)).collect();
            println!("nu={}", nu.join(" "));
            for (k, row) in y.q().rows().enumerate() {
                let cells: Vec<String> = row.iter().map(|&v| fmt_display(v)).collect();
                println!("q[{}]={}", k + 1, cells.join(" "));
            }
            if emit_lifts {
                let prefix = out.ok_or_else(|| Error::Parse {
                    line: 0,
                    message: "--emit-lifts requires --out <prefix>".into(),
                })?;
                let plifted = p_lift(&chain, &y, &g)?;
                let mulifted = pi_lift(&y, &g, chain.mu())?;
                std::fs::write(with_suffix(&prefix, ".plift.mat"), write_matrix(plifted.kernel()))?;
                std::fs::write(with_suffix(&prefix, ".mulift.mat"), write_matrix(mulifted.kernel()))?;
            }
        }
        Command::Lift { matrix, partition, lifting, out } => {
            let chain = load_chain(&matrix, false)?;
            let g = load_partition(&partition, chain.n())?;
            let y = aggregate(&chain, &g);
            let lifted = match lifting {
                Lifting::P => p_lift(&chain, &y, &g)?,
                Lifting::Mu => pi_lift(&y, &g, chain.mu())?,
            };
            write_or_print(out.as_deref(), &write_matrix(lifted.kernel()))?;
        }
        Command::Lumpcheck { matrix, partition, tol } => {
            let text = std::fs::read_to_string(&matrix)?;
            let p = parse_matrix(&text, false)?;
            let g = load_partition(&partition, p.n())?;
            let report = lumpability_check(&p, &g, tol);
            println!(
                "lumpable={} max_violation={}",
                report.lumpable,
                fmt_display(report.max_violation)
            );
        }
        Command::Search { matrix, m, method, criterion, fixed, out } => {
            let chain = load_chain(&matrix, false)?;
            let fixed = load_fixed(&fixed, chain.n())?;
            let (best, value) = match method {
                Method::Aib => {
                    let g = markov_agg::aib_greedy(&chain, m, fixed.as_ref())?;
                    let value = match criterion {
                        CriterionArg::LossX => markov_agg::relevant_loss_x(&chain, &g).loss,
                        CriterionArg::PLiftKldr => {
                            let lifted = markov_agg::info::p_lift_of(&chain, &g)?;
                            markov_agg::kldr_markov(&chain, lifted.kernel())?
                        }
                    };
                    (g, value)
                }
                Method::Exhaustive => {
                    let criterion = match criterion {
                        CriterionArg::LossX => Criterion::LossX,
                        CriterionArg::PLiftKldr => Criterion::PLiftKldr,
                    };
                    let found =
                        markov_agg::exhaustive_search(&chain, m, criterion, fixed.as_ref())?;
                    (found.best, found.value)
                }
            };
            println!("{best}");
            println!("value={}", fmt_display(value));
            if let Some(path) = out {
                std::fs::write(path, write_partition(&best))?;
            }
        }
        Command::Sweep { matrix, from, to, method, tol, fixed, out } => {
            let chain = load_chain(&matrix, false)?;
            let fixed = load_fixed(&fixed, chain.n())?;
            let method = match method {
                Method::Aib => SweepMethod::Aib,
                Method::Exhaustive => SweepMethod::Exhaustive,
            };
            let records = sweep(&chain, from, to, method, fixed.as_ref(), tol)?;
            write_or_print(out.as_deref(), &sweep_tsv(&records))?;
            let minima = strict_local_minima(&records);
            if !minima.is_empty() {
                let ms: Vec<String> =
                    minima.iter().map(|&i| records[i].m.to_string()).collect();
                eprintln!("strict local minima of kldr_p at m = {}", ms.join(", "));
            }
        }
        Command::Ctmc { network, lambda, cap, fixed_predicate, out } => {
            let text = std::fs::read_to_string(&network)?;
            let network = markov_agg::parse_network(&text)?;
            let states = network.enumerate_reachable(cap)?;
            let generator = network.build_generator(states)?;
            let uniformized = markov_agg::uniformize(&generator, lambda)?;
            std::fs::write(with_suffix(&out, ".mat"), write_matrix(&uniformized.p))?;
            std::fs::write(
                with_suffix(&out, ".legend"),
                write_legend(&network.species, &generator.states),
            )?;
            if let Some(expr) = fixed_predicate {
                let selected = predicate_states(&network, &generator.states, &expr)?;
                std::fs::write(with_suffix(&out, ".fixed"), write_fixed_set(&selected))?;
            }
            println!(
                "states={} lambda={}",
                generator.n(),
                fmt_display(uniformized.lambda_used)
            );
        }
    }
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
