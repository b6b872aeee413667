//! The `rendezvous` command line. Reports go to standard out as one JSON
//! document; diagnostics go to standard error.
//!
//! Exit codes: 0 decided, 1 malformed input, 2 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rendezvous::forge::{
    clique_spider, path_spider, random_chordal_graph, random_connected_graph, reduce_qbf,
    reduce_qbf_unbounded, reduce_set_cover, QbfFormula, SetCoverInstance,
};
use rendezvous::game::{
    extract_divider_strategy, facilitator_wins_in_with, verify_strategy_tree, BoundedMode,
    StrategyTree, WinTable, DEFAULT_POSITION_BUDGET,
};
use rendezvous::graph::{is_chordal, is_p5_free, lambda, parse_graph, parse_instance};
use rendezvous::nd::{divider_wins_in_time_nd_report, neighborhood_decomposition, NdConfig};
use rendezvous::structural::{
    applicable_fast_paths, fast_divider_number, ADJACENT_OR_EQUAL, GENERIC,
};
use rendezvous::{Extended, Graph, Instance, SolveError, Vertex};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "rendezvous",
    version,
    about = "Solver and tooling for the rendezvous game with adversaries"
)]
pub struct Cli {
    /// Worker threads for parallel solver stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether Facilitator wins an instance.
    Solve(SolveArgs),
    /// Divider number of a pair, with the separator number.
    Dnumber(PairArgs),
    /// Separator number of a pair, with a minimum separator.
    Lambda(PairArgs),
    /// Structural facts about a graph.
    Classify(ClassifyArgs),
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Build a game instance from a source problem.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Check a Divider strategy certificate.
    Verify(VerifyArgs),
    /// Run the arena HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Auto,
    Generic,
    NdFpt,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Step bound; overrides the instance's own.
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Cap on positions (generic) and on tree nodes and candidates (nd-fpt).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write a Divider strategy tree here when Divider survives a bounded game.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub s: Vertex,
    #[arg(long)]
    pub t: Vertex,
    /// Largest team size the game solver tries.
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, requires = "t")]
    pub s: Option<Vertex>,
    #[arg(long, requires = "s")]
    pub t: Option<Vertex>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write here instead of standard out.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Clique with two-edge legs to s and t; divider number 2.
    CliqueSpider {
        #[arg(long)]
        p: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Path with long legs to s and t; divider number 2.
    PathSpider {
        #[arg(long)]
        p: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Connected G(n, p) sample.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        tau: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random connected chordal graph.
    Chordal {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReduceCommand {
    /// `{"n", "sets", "k"}` to a two-move game.
    SetCover {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// `{"n", "clauses"}` to a step-bounded game.
    Qbf {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// `{"n", "clauses"}` to an unbounded game.
    QbfUnbounded {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub strategy: PathBuf,
    /// Defaults to the instance's step bound.
    #[arg(long)]
    pub tau: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Cap on win-table positions per game.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Append session events to this JSON-lines file.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget { message: String, report: Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Budget { .. } => 2,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::BudgetExceeded {
            stage,
            estimate,
            budget,
        } => CliError::Budget {
            message: e.to_string(),
            report: json!({"error": "budget-exceeded", "stage": stage, "estimate": estimate.to_string(), "budget": budget.to_string()}),
        },
        SolveError::Bracketed { lower, upper } => CliError::Budget {
            message: e.to_string(),
            report: json!({"error": "budget-exceeded", "lower": lower, "upper": upper}),
        },
        SolveError::Contract(m) => CliError::Input(m),
    }
}

/// Result of one command: text for standard out.
pub type Output = Result<String, CliError>;

fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(input)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read_text(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_pair(g: &Graph, s: Vertex, t: Vertex) -> Result<(), CliError> {
    match [s, t].into_iter().find(|&v| v >= g.n()) {
        Some(v) => Err(CliError::Input(format!(
            "vertex {v} out of range for n = {}",
            g.n()
        ))),
        None => Ok(()),
    }
}

fn json_line(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("report serialization") + "\n"
}

fn emit(text: String, out: &OutArgs) -> Output {
    match &out.out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub facilitator_wins: bool,
    pub method: &'static str,
    pub ell_star: Option<usize>,
    pub elapsed_ms: u64,
}

fn nd_config(budget: Option<u64>) -> NdConfig {
    match budget {
        Some(b) => NdConfig {
            tree_budget: b as usize,
            candidate_budget: b,
            ..NdConfig::default()
        },
        None => NdConfig::default(),
    }
}

pub fn solve(args: &SolveArgs) -> Output {
    let start = Instant::now();
    let inst = read_instance(&args.instance)?;
    let tau = args.tau.or(inst.tau);
    if tau == Some(0) {
        return Err(CliError::Input("step bound tau must be at least 1".into()));
    }
    let (g, s, t, k) = (&inst.graph, inst.s, inst.t, inst.k);
    let budget = args.budget.map_or(DEFAULT_POSITION_BUDGET, u128::from);
    let nd = |tau| -> Result<bool, CliError> {
        let report = divider_wins_in_time_nd_report(g, s, t, k, tau, &nd_config(args.budget))
            .map_err(solve_error)?;
        Ok(!report.divider_wins)
    };
    let (wins, method, ell_star) = if s == t || g.adjacent(s, t) {
        (true, ADJACENT_OR_EQUAL, None)
    } else {
        match (tau, args.mode) {
            (None, Mode::NdFpt) => {
                return Err(CliError::Input(
                    "nd-fpt decides step-bounded games; pass --tau".into(),
                ));
            }
            (None, mode) => match fast_divider_number(g, s, t).filter(|_| mode == Mode::Auto) {
                Some(fast) => (Extended::Finite(k) < fast.value, fast.reason, None),
                None => {
                    let table = WinTable::build(g, k, budget).map_err(solve_error)?;
                    (
                        table.facilitator_wins_from(s, t),
                        GENERIC,
                        Some(table.ell_star()),
                    )
                }
            },
            (Some(tau), Mode::NdFpt) => (nd(tau)?, "nd-fpt", None),
            (Some(tau), mode) => {
                match facilitator_wins_in_with(g, s, t, k, tau, BoundedMode::Search, budget) {
                    Ok(w) => (w, GENERIC, None),
                    // few modules: the parameterized algorithm may still finish
                    Err(SolveError::BudgetExceeded { .. })
                        if mode == Mode::Auto && neighborhood_decomposition(g).ell() <= 4 =>
                    {
                        (nd(tau)?, "nd-fpt", None)
                    }
                    Err(e) => return Err(solve_error(e)),
                }
            }
        }
    };
    if let Some(path) = &args.certificate {
        match tau {
            Some(tau) if !wins => {
                let tree = extract_divider_strategy(g, s, t, k, tau).map_err(solve_error)?;
                fs::write(path, json_line(&tree))
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            Some(_) => eprintln!("Facilitator wins; no Divider certificate written"),
            None => eprintln!("certificates need a step bound; none written"),
        }
    }
    let report = SolveReport {
        facilitator_wins: wins,
        method,
        ell_star,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok(json_line(&report))
}

pub fn dnumber(args: &PairArgs) -> Output {
    let g = read_graph(&args.graph)?;
    check_pair(&g, args.s, args.t)?;
    let lam = lambda(&g, args.s, args.t).value;
    let budget = args.budget.map_or(DEFAULT_POSITION_BUDGET, u128::from);
    let (d, reason) = match fast_divider_number(&g, args.s, args.t) {
        Some(fast) => (fast.value, fast.reason),
        None => match rendezvous::game::divider_number_with(&g, args.s, args.t, args.max_k, budget)
        {
            Ok(d) => (d, GENERIC),
            Err(SolveError::Bracketed { lower, upper }) => {
                return Err(CliError::Budget {
                    message: format!("divider number undecided: lies in [{lower}, {upper}]"),
                    report: json!({"d": {"lower": lower, "upper": upper}, "lambda": lam, "reason": GENERIC}),
                });
            }
            Err(e) => return Err(solve_error(e)),
        },
    };
    Ok(json_line(&json!({"d": d, "lambda": lam, "reason": reason})))
}

pub fn lambda_cmd(args: &PairArgs) -> Output {
    let g = read_graph(&args.graph)?;
    check_pair(&g, args.s, args.t)?;
    let r = lambda(&g, args.s, args.t);
    Ok(json_line(
        &json!({"lambda": r.value, "separator": r.witness}),
    ))
}

pub fn classify(args: &ClassifyArgs) -> Output {
    let g = read_graph(&args.graph)?;
    let nd = neighborhood_decomposition(&g);
    let modules: Vec<Value> = nd
        .modules
        .iter()
        .zip(&nd.kinds)
        .map(|(m, kind)| json!({"kind": kind, "vertices": m}))
        .collect();
    let mut report = json!({
        "n": g.n(),
        "m": g.edge_count(),
        "chordal": is_chordal(&g).0,
        "p5_free": is_p5_free(&g),
        "neighborhood_diversity": nd.ell(),
        "modules": modules,
    });
    if let (Some(s), Some(t)) = (args.s, args.t) {
        check_pair(&g, s, t)?;
        report["fast_paths"] =
            serde_json::to_value(applicable_fast_paths(&g, s, t)).expect("serializable");
    }
    Ok(json_line(&report))
}

pub fn generate(cmd: &GenCommand) -> Output {
    let (inst, out) = match cmd {
        GenCommand::CliqueSpider { p, out } => (clique_spider(*p).map_err(input)?, out),
        GenCommand::PathSpider { p, out } => (path_spider(*p).map_err(input)?, out),
        GenCommand::Random {
            n,
            edge_prob,
            seed,
            k,
            tau,
            out,
        } => {
            let g = random_connected_graph(*n, *edge_prob, *seed).map_err(input)?;
            (Instance::new(g, 0, n - 1, *k, *tau).map_err(input)?, out)
        }
        GenCommand::Chordal { n, seed, k, out } => {
            if *n < 2 {
                return Err(CliError::Input(format!("n = {n} < 2")));
            }
            let g = random_chordal_graph(*n, *seed);
            (Instance::new(g, 0, n - 1, *k, None).map_err(input)?, out)
        }
    };
    emit(inst.to_json() + "\n", out)
}

pub fn reduce(cmd: &ReduceCommand) -> Output {
    let (inst, out) = match cmd {
        ReduceCommand::SetCover { file, out } => {
            let sc: SetCoverInstance = serde_json::from_str(&read_text(file)?).map_err(input)?;
            (reduce_set_cover(&sc).map_err(input)?, out)
        }
        ReduceCommand::Qbf { file, out } => {
            let phi: QbfFormula = serde_json::from_str(&read_text(file)?).map_err(input)?;
            (reduce_qbf(&phi).map_err(input)?, out)
        }
        ReduceCommand::QbfUnbounded { file, out } => {
            let phi: QbfFormula = serde_json::from_str(&read_text(file)?).map_err(input)?;
            (reduce_qbf_unbounded(&phi).map_err(input)?, out)
        }
    };
    emit(inst.to_json() + "\n", out)
}

pub fn verify(args: &VerifyArgs) -> Output {
    let inst = read_instance(&args.instance)?;
    let tau = args
        .tau
        .or(inst.tau)
        .ok_or_else(|| CliError::Input("no step bound: pass --tau".into()))?;
    let tree: StrategyTree = serde_json::from_str(&read_text(&args.strategy)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.strategy.display())))?;
    Ok(format!(
        "{}\n",
        verify_strategy_tree(&inst.graph, inst.s, inst.t, inst.k, tau, &tree)
    ))
}

pub fn serve(args: &ServeArgs) -> Output {
    let config = rendezvous_arena::Config {
        budget: args.budget.map_or(DEFAULT_POSITION_BUDGET, u128::from),
        log: args.log.clone(),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(input)?;
    runtime
        .block_on(rendezvous_arena::serve(
            SocketAddr::new(args.host, args.port),
            config,
        ))
        .map_err(input)?;
    Ok(String::new())
}

pub fn execute(cli: &Cli) -> Output {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(input)?;
    }
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Dnumber(a) => dnumber(a),
        Command::Lambda(a) => lambda_cmd(a),
        Command::Classify(a) => classify(a),
        Command::Gen(c) => generate(c),
        Command::Reduce(c) => reduce(c),
        Command::Verify(a) => verify(a),
        Command::Serve(a) => serve(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            match &e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Budget { message, report } => {
                    eprintln!("budget exceeded: {message}");
                    print!("{}", json_line(report));
                }
            }
            e.exit_code()
        }
    }
}
