use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gql_core::narrowing::{Trace, Verbosity};
use gql_core::output::{result_json, trace_json};
use gql_core::props::run_props;
use gql_core::query::{check, evaluate, CheckReport, Engine, Evaluation};
use gql_core::syntax::parser::{parse_graph, parse_query};
use gql_core::{Error, EvalOptions, Graph, Query, QueryResult};

const EXIT_STATIC: u8 = 1;
const EXIT_EVAL: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "gql", version, about = "Evaluate graph queries by rewriting or by the set semantics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a query over a graph file.
    Query(QueryArgs),
    /// Compare both engines on seeded random graphs and patterns.
    Props {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        cases: u64,
    },
}

#[derive(Args)]
struct QueryArgs {
    /// Graph in the triple file format.
    #[arg(short, long)]
    graph: PathBuf,
    /// File holding the query.
    #[arg(short, long, conflicts_with = "expr", required_unless_present = "expr")]
    query: Option<PathBuf>,
    /// Query text given inline.
    #[arg(short, long)]
    expr: Option<String>,
    #[arg(long, value_enum, default_value_t = EngineArg::Narrowing)]
    engine: EngineArg,
    #[arg(long, value_enum, default_value_t = TraceArg::Off)]
    trace: TraceArg,
    /// Write the trace here instead of standard error.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Drop matches whose expressions fail instead of aborting.
    #[arg(long)]
    lenient: bool,
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    output: OutputArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Narrowing,
    Oracle,
    Check,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceArg {
    Off,
    Summary,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_STATIC)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Query(args) => match run_query(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(code) => ExitCode::from(code),
        },
        Command::Props { seed, cases } => {
            let report = run_props(seed, cases as usize);
            print!("{report}");
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_MISMATCH)
            }
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn exit_code(e: &Error) -> u8 {
    if e.is_static() {
        EXIT_STATIC
    } else {
        EXIT_EVAL
    }
}

fn read(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_STATIC, format!("{}: {e}", path.display())))
}

fn load(args: &QueryArgs) -> Result<(Graph, Query), u8> {
    let graph_text = read(&args.graph)?;
    let graph = parse_graph(&graph_text)
        .map_err(|e| fail(EXIT_STATIC, format!("{}:{e}", args.graph.display())))?;
    let (origin, query_text) = match (&args.query, &args.expr) {
        (Some(path), _) => (path.display().to_string(), read(path)?),
        (None, Some(text)) => ("<inline>".to_string(), text.clone()),
        (None, None) => unreachable!("clap requires a query source"),
    };
    let query = parse_query(&query_text).map_err(|e| fail(EXIT_STATIC, format!("{origin}:{e}")))?;
    query.validate().map_err(|e| fail(exit_code(&e), e))?;
    Ok((graph, query))
}

fn run_query(args: &QueryArgs) -> Result<(), u8> {
    let (graph, query) = load(args)?;
    let opts = EvalOptions {
        lenient: args.lenient,
    };
    match args.engine {
        EngineArg::Narrowing | EngineArg::Oracle => {
            let engine = match args.engine {
                EngineArg::Oracle => Engine::Oracle,
                _ => Engine::Narrowing,
            };
            let ev = evaluate(&query, &graph, engine, opts).map_err(|e| fail(exit_code(&e), e))?;
            emit_trace(args, ev.trace.as_ref())?;
            print_result(args.output, &ev.result);
            Ok(())
        }
        EngineArg::Check => {
            let report = check(&query, &graph, opts);
            if let Ok(ev) = &report.narrowing {
                emit_trace(args, ev.trace.as_ref())?;
            }
            if report.agrees() {
                return match &report.narrowing {
                    Ok(ev) => {
                        print_result(args.output, &ev.result);
                        Ok(())
                    }
                    Err(e) => Err(fail(exit_code(e), e)),
                };
            }
            print_diff(args.output, &report);
            Err(EXIT_MISMATCH)
        }
    }
}

fn print_result(output: OutputArg, r: &QueryResult) {
    match output {
        OutputArg::Text => print!("{r}"),
        OutputArg::Json => println!("{}", result_json(r)),
    }
}

fn side_json(side: &Result<Evaluation, Error>) -> serde_json::Value {
    match side {
        Ok(ev) => json!({ "result": result_json(&ev.result) }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn side_text(side: &Result<Evaluation, Error>) -> String {
    match side {
        Ok(ev) => ev.result.to_string(),
        Err(e) => format!("error: {e}\n"),
    }
}

fn print_diff(output: OutputArg, report: &CheckReport) {
    match output {
        OutputArg::Json => println!(
            "{}",
            json!({
                "agree": false,
                "narrowing": side_json(&report.narrowing),
                "oracle": side_json(&report.oracle),
            })
        ),
        OutputArg::Text => {
            println!("engines disagree");
            println!("--- narrowing");
            print!("{}", side_text(&report.narrowing));
            println!("--- oracle");
            print!("{}", side_text(&report.oracle));
            if let (Ok(n), Ok(o)) = (&report.narrowing, &report.oracle) {
                if let (Some(a), Some(b)) = (n.result.table(), o.result.table()) {
                    for r in a.rows.iter().filter(|r| !b.rows.contains(r)) {
                        println!("only narrowing: {r:?}");
                    }
                    for r in b.rows.iter().filter(|r| !a.rows.contains(r)) {
                        println!("only oracle: {r:?}");
                    }
                }
            }
        }
    }
}

fn emit_trace(args: &QueryArgs, trace: Option<&Trace>) -> Result<(), u8> {
    let verbosity = match args.trace {
        TraceArg::Off => return Ok(()),
        TraceArg::Summary => Verbosity::Summary,
        TraceArg::Full => Verbosity::Full,
    };
    let Some(trace) = trace else {
        eprintln!("note: the oracle engine records no trace");
        return Ok(());
    };
    let text = match args.output {
        OutputArg::Text => trace.render(verbosity),
        OutputArg::Json => format!("{}\n", trace_json(trace)),
    };
    match &args.trace_out {
        Some(path) => fs::write(path, text)
            .map_err(|e| fail(EXIT_EVAL, format!("{}: {e}", path.display()))),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}
