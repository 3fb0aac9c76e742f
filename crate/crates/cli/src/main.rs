use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use memotab::bench::{run_bench, slopes, write_csv, write_table, GrammarSource};
use memotab::combinators::{remainder, tokenize, tokens, Tokens};
use memotab::dsl::parse_grammar;
use memotab::grammars::{self, EdgeSet, GrammarId};
use memotab::nondet::Session;

#[derive(Parser)]
#[command(name = "memotab", version, about = "Tabled recognition with left-recursive grammars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether the input is in the grammar's language.
    Recognize(InputArgs),
    /// Print the memo tables built while recognizing the input, as JSON.
    Chart(InputArgs),
    /// Time recognition of a^n for each grammar and length; CSV on stdout.
    Bench(BenchArgs),
    /// Run a memoised demo computation.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Built-in grammar (johnson, sm, sml, smml) or path to a grammar file.
    #[arg(long, short)]
    grammar: String,
    /// Read whitespace-separated tokens from a file instead of the command line.
    #[arg(long, conflicts_with = "tokens")]
    input: Option<PathBuf>,
    tokens: Vec<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "sm,sml,smml")]
    grammars: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "12,24,48,72,96")]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Demo {
    /// The n-th Fibonacci number.
    Fib {
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Nodes reachable from NODE over the edges a->b, b->c.
    Path { node: String },
}

fn resolve_grammar(name: &str) -> Result<GrammarSource> {
    if let Ok(id) = name.parse::<GrammarId>() {
        return Ok(GrammarSource::Builtin(id));
    }
    let text = fs::read_to_string(name)
        .with_context(|| format!("`{name}` is neither a built-in grammar nor a readable file"))?;
    let rules = parse_grammar(&text).with_context(|| format!("in grammar file {name}"))?;
    Ok(GrammarSource::Dsl {
        label: name.to_string(),
        rules,
    })
}

fn read_input(args: &InputArgs) -> Result<Tokens> {
    match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read input file {}", path.display()))?;
            Ok(tokenize(&text))
        }
        None => Ok(tokens(args.tokens.iter().cloned())),
    }
}

fn recognize(args: &InputArgs) -> Result<bool> {
    let source = resolve_grammar(&args.grammar)?;
    let input = read_input(args)?;
    let session = Session::new();
    let accepted = source.instantiate(&session, &input).accepts(&session);
    println!("{}", if accepted { "accepted" } else { "rejected" });
    Ok(accepted)
}

fn chart(args: &InputArgs) -> Result<()> {
    let source = resolve_grammar(&args.grammar)?;
    let input = read_input(args)?;
    let session = Session::new();
    let grammar = source.instantiate(&session, &input);
    let accepted = grammar.accepts(&session);
    let mut charts = Map::new();
    for (name, chart) in grammar.charts() {
        let entries: Vec<Value> = chart
            .into_iter()
            .map(|(key, results)| {
                json!({
                    "key": key,
                    "key_remainder": remainder(&input, key),
                    "results": results,
                    "result_remainders": results
                        .iter()
                        .map(|&r| remainder(&input, r))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        charts.insert(name, Value::Array(entries));
    }
    let doc = json!({
        "grammar": source.label(),
        "input": &*input,
        "accepted": accepted,
        "charts": charts,
    });
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let sources = args
        .grammars
        .iter()
        .map(|g| resolve_grammar(g))
        .collect::<Result<Vec<_>>>()?;
    let records = run_bench(&sources, &args.lengths, args.reps as usize);
    let mut out = io::stdout().lock();
    match args.format {
        Format::Csv => write_csv(&records, &mut out)?,
        Format::Table => write_table(&records, &mut out)?,
    }
    out.flush()?;
    // In CSV mode stdout carries only the header and rows.
    for (grammar, slope) in slopes(&records) {
        if let Some(slope) = slope {
            let line = format!("slope {grammar} {slope:.3}");
            match args.format {
                Format::Csv => eprintln!("# {line}"),
                Format::Table => println!("{line}"),
            }
        }
    }
    Ok(())
}

fn demo(which: &Demo) -> Result<()> {
    let session = Session::new();
    match which {
        Demo::Fib { n } => {
            let n: i64 = match n.parse() {
                Ok(n) if n >= 0 => n,
                _ => bail!("fib expects a non-negative integer, got `{n}`"),
            };
            if n > 93 {
                bail!("fib({n}) does not fit in 64 bits");
            }
            let fib = grammars::fib(&session);
            let values: Vec<String> = session.run(&fib.call(n)).iter().map(u64::to_string).collect();
            println!("{}", values.join(" "));
        }
        Demo::Path { node } => {
            let path = grammars::path(&session, EdgeSet::demo());
            println!("{}", session.run(&path.call(node.clone())).join(" "));
        }
    }
    Ok(())
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause
            .downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            || cause
                .downcast_ref::<serde_json::Error>()
                .and_then(|e| e.io_error_kind())
                == Some(io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Recognize(args) => recognize(args).map(|ok| if ok { 0 } else { 1 }),
        Command::Chart(args) => chart(args).map(|_| 0),
        Command::Bench(args) => bench(args).map(|_| 0),
        Command::Demo { demo: which } => demo(which).map(|_| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
