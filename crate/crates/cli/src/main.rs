//! Command-line interface for community extraction, partition baselines,
//! block-model simulation and scoring.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commex::blockmodel::{
    check_consistency_conditions, interior_stationary_point, population_grid_argmax,
    PopulationCriterion,
};
use commex::criteria::ExtractionCriterion;
use commex::evaluation::match_and_score;
use commex::graph::{load_edge_list, load_label_file, DirectedMode, LoadedGraph};
use commex::harness::{run_scenario, write_csv, write_svg_boxplot, Scenario};
use commex::partition::{leading_eigenvector_split, sequential_modularity_partition};
use commex::pipeline::{extract_sequence, ExtractionReport, StopRule};
use commex::tabu::TabuConfig;

#[derive(Parser)]
#[command(
    name = "commex",
    about = "Community extraction toolkit for undirected weighted networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Original,
    Adjusted,
}

impl From<CriterionArg> for ExtractionCriterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Original => ExtractionCriterion::Original,
            CriterionArg::Adjusted => ExtractionCriterion::Adjusted,
        }
    }
}

#[derive(Args)]
struct GraphInput {
    /// Edge list file: whitespace-separated `u v [w]`, `#` comments.
    edges: PathBuf,
    /// Treat records as directed and average the two directions.
    #[arg(long)]
    avg_directed: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sequentially extract communities and classify the rest as background.
    Extract {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value = "adjusted")]
        criterion: CriterionArg,
        /// Keep a proposed community only if it has at least this many nodes.
        #[arg(long, default_value_t = 5)]
        min_size: usize,
        /// Stop after this many communities.
        #[arg(long)]
        max_communities: Option<usize>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the result as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sequential modularity partition (every node gets a community).
    Partition {
        #[command(flatten)]
        input: GraphInput,
        /// Maximum number of communities.
        #[arg(long)]
        max_k: Option<usize>,
        /// Write leading-eigenvector components (`label value` lines) here.
        #[arg(long)]
        eigvec: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a block-model simulation scenario and emit CSV (and SVG) results.
    Simulate {
        /// Scenario description (JSON).
        scenario: PathBuf,
        /// Override the scenario's replication count.
        #[arg(long)]
        reps: Option<usize>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write grouped box plots (SVG) here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Score an extraction result against ground-truth labels (PPV/NPV).
    Score {
        #[command(flatten)]
        input: GraphInput,
        /// `node_id true_label` lines.
        labels: PathBuf,
        /// Extraction result JSON produced by `extract --json`.
        result: PathBuf,
    },
    /// Check the consistency conditions and grid-maximize the population criteria.
    VerifyTheory {
        #[arg(long, default_value_t = 0.5)]
        p11: f64,
        #[arg(long, default_value_t = 0.05)]
        p12: f64,
        #[arg(long, default_value_t = 0.4)]
        p22: f64,
        #[arg(long, default_value_t = 0.3)]
        pi: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Compute(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Compute(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<commex::Error> for CliError {
    fn from(e: commex::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("invalid JSON: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_graph(input: &GraphInput) -> Result<LoadedGraph<f64>, CliError> {
    let file = File::open(&input.edges)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.edges.display())))?;
    let mode = if input.avg_directed {
        DirectedMode::AverageDirected
    } else {
        DirectedMode::Undirected
    };
    let loaded = load_edge_list::<f64, _>(BufReader::new(file), mode)?;
    if loaded.dropped_self_loops > 0 {
        eprintln!(
            "note: dropped {} self-loop record(s)",
            loaded.dropped_self_loops
        );
    }
    Ok(loaded)
}

fn open_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        CliError::Input(format!("{}: {e}", path.display()))
    })?))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract {
            input,
            criterion,
            min_size,
            max_communities,
            restarts,
            seed,
            json,
        } => {
            let loaded = load_graph(&input)?;
            let cfg = TabuConfig::default_for(loaded.graph.node_count())
                .with_seed(seed)
                .with_restarts(restarts);
            let stop = StopRule {
                min_size,
                max_communities,
            };
            let result = extract_sequence(&loaded.graph, criterion.into(), &cfg, &stop)?;
            let report = ExtractionReport::from_result(&result, &loaded.labels);
            for c in &report.communities {
                println!(
                    "community {} (score {:.6}, {} nodes): {}",
                    c.rank,
                    c.score,
                    c.members.len(),
                    c.members.join(" ")
                );
            }
            println!(
                "background ({} nodes): {}",
                report.background.len(),
                report.background.join(" ")
            );
            if let Some(path) = json {
                let mut out = open_out(&path)?;
                serde_json::to_writer_pretty(&mut out, &report)?;
                out.write_all(b"\n")?;
            }
            Ok(())
        }
        Command::Partition {
            input,
            max_k,
            eigvec,
            restarts,
            seed,
        } => {
            let loaded = load_graph(&input)?;
            let cfg = TabuConfig::default_for(loaded.graph.node_count())
                .with_seed(seed)
                .with_restarts(restarts);
            let labeling = sequential_modularity_partition(&loaded.graph, &cfg, max_k)?;
            let q = commex::criteria::modularity_kway_score(&loaded.graph, labeling.assignment())?;
            println!("{} communities, modularity {:.6}", labeling.k(), q);
            for id in 0..labeling.k() {
                let members: Vec<&str> = labeling
                    .community(id)
                    .into_iter()
                    .map(|m| loaded.labels[m].as_str())
                    .collect();
                println!(
                    "community {} ({} nodes): {}",
                    id + 1,
                    members.len(),
                    members.join(" ")
                );
            }
            if let Some(path) = eigvec {
                let split = leading_eigenvector_split(&loaded.graph, 1e-8, 100_000)?;
                let mut out = open_out(&path)?;
                for (i, value) in split.eigvec.iter().enumerate() {
                    writeln!(out, "{} {}", loaded.labels[i], value)?;
                }
            }
            Ok(())
        }
        Command::Simulate {
            scenario,
            reps,
            out,
            plot,
        } => {
            let file = File::open(&scenario)
                .map_err(|e| CliError::Input(format!("{}: {e}", scenario.display())))?;
            let mut sc: Scenario = serde_json::from_reader(BufReader::new(file))?;
            if let Some(reps) = reps {
                sc.reps = reps;
            }
            let rows = run_scenario(&sc)?;
            match &out {
                Some(path) => {
                    let mut w = open_out(path)?;
                    write_csv(&rows, &mut w)?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut w = stdout.lock();
                    write_csv(&rows, &mut w)?;
                }
            }
            if let Some(path) = plot {
                let mut w = open_out(&path)?;
                write_svg_boxplot(&rows, &sc.id, &mut w)?;
            }
            Ok(())
        }
        Command::Score {
            input,
            labels,
            result,
        } => {
            let loaded = load_graph(&input)?;
            let n = loaded.graph.node_count();
            let label_file = load_label_file(BufReader::new(
                File::open(&labels)
                    .map_err(|e| CliError::Input(format!("{}: {e}", labels.display())))?,
            ))?;
            let mut truth = vec![usize::MAX; n];
            for (node, class) in &label_file.assignments {
                let idx = loaded.index_of(node).ok_or_else(|| {
                    CliError::Input(format!("label file names unknown node '{node}'"))
                })?;
                truth[idx] = *class;
            }
            if let Some(missing) = truth.iter().position(|&c| c == usize::MAX) {
                return Err(CliError::Input(format!(
                    "no true label for node '{}'",
                    loaded.labels[missing]
                )));
            }
            let report: ExtractionReport = serde_json::from_reader(BufReader::new(
                File::open(&result)
                    .map_err(|e| CliError::Input(format!("{}: {e}", result.display())))?,
            ))?;
            println!("rank,size,matched_class,ppv,npv");
            for c in &report.communities {
                let members: Vec<usize> = c
                    .members
                    .iter()
                    .map(|m| {
                        loaded.index_of(m).ok_or_else(|| {
                            CliError::Input(format!("result names unknown node '{m}'"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let score = match_and_score::<f64>(&members, &truth, None)?;
                println!(
                    "{},{},{},{},{}",
                    c.rank,
                    members.len(),
                    label_file.class_names[score.matched_class],
                    score.ppv,
                    score.npv
                );
            }
            Ok(())
        }
        Command::VerifyTheory {
            p11,
            p12,
            p22,
            pi,
            step,
        } => {
            let holds = check_consistency_conditions(p11, p12, p22);
            println!(
                "conditions p11 > p12, p11 > p22, p11 + p22 > 2*p12: {}",
                if holds { "satisfied" } else { "violated" }
            );
            match interior_stationary_point(p11, p12, p22) {
                Ok((t1, t2)) => println!(
                    "interior stationary point: t1* = {t1:.6}, t2* = {t2:.6} (sum deviates {:.2e} from 1)",
                    (t1 + t2 - 1.0_f64).abs()
                ),
                Err(e) => println!("interior stationary point: {e}"),
            }
            for (name, criterion) in [
                ("original", PopulationCriterion::Original),
                ("adjusted", PopulationCriterion::Adjusted),
            ] {
                let res = population_grid_argmax(criterion, pi, p11, p12, p22, step)?;
                let truthful = (res.t1 - 1.0).abs() < 1e-9 && (res.t2 - 1.0).abs() < 1e-9;
                println!(
                    "{name}: grid argmax ({:.4}, {:.4}), value {:.6}{}{}",
                    res.t1,
                    res.t2,
                    res.value,
                    if res.degenerate {
                        ", degenerate (ties)"
                    } else {
                        ""
                    },
                    if truthful {
                        ", truthful corner"
                    } else {
                        ", NOT the truthful corner"
                    }
                );
            }
            if !holds {
                println!("note: argmax is reported but consistency is not guaranteed");
            }
            Ok(())
        }
    }
}
