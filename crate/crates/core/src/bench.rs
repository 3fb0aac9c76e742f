//! Timing of the ambiguous `a^n` grammars.
//!
//! A measurement covers the recognition run plus a full traversal of every
//! chart the grammar exposes. Grammar construction is not timed.

use std::fmt;
use std::hint::black_box;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use crate::combinators::Tokens;
use crate::dsl::{self, RuleSet};
use crate::grammars::{self, Grammar, GrammarId};
use crate::nondet::Session;

/// Where a grammar comes from: built in, or a DSL rule set.
#[derive(Debug, Clone)]
pub enum GrammarSource {
    Builtin(GrammarId),
    Dsl { label: String, rules: RuleSet },
}

impl GrammarSource {
    pub fn label(&self) -> &str {
        match self {
            GrammarSource::Builtin(id) => id.name(),
            GrammarSource::Dsl { label, .. } => label,
        }
    }

    pub fn instantiate(&self, session: &Session, input: &Tokens) -> Grammar {
        match self {
            GrammarSource::Builtin(id) => grammars::build(session, *id, input),
            GrammarSource::Dsl { rules, .. } => dsl::compile(session, rules, input),
        }
    }
}

impl fmt::Display for GrammarSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub grammar: String,
    pub n: usize,
    pub seconds: f64,
    pub accepted: bool,
}

pub const CSV_HEADER: &str = "grammar,n,seconds,accepted";

/// Time one recognition of `a^n` in a fresh session.
pub fn measure_once(source: &GrammarSource, n: usize) -> (Duration, bool) {
    let session = Session::new();
    let input = grammars::sentence(n);
    let grammar = source.instantiate(&session, &input);
    let started = Instant::now();
    let ends = session.run(&grammar.start.at(0));
    let mut cells = 0usize;
    for (_, chart) in grammar.charts() {
        for (key, results) in chart {
            cells += black_box(key) + results.iter().map(|r| black_box(*r)).sum::<usize>();
        }
    }
    black_box(cells);
    let elapsed = started.elapsed();
    (elapsed, ends.contains(&n))
}

/// Median over `reps` measurements for each (grammar, n) cell, run
/// sequentially in the given order.
pub fn run_bench(sources: &[GrammarSource], lengths: &[usize], reps: usize) -> Vec<BenchRecord> {
    let reps = reps.max(1);
    let mut records = Vec::with_capacity(sources.len() * lengths.len());
    for source in sources {
        for &n in lengths {
            let mut times = Vec::with_capacity(reps);
            let mut accepted = true;
            for _ in 0..reps {
                let (t, ok) = measure_once(source, n);
                times.push(t.as_secs_f64());
                accepted &= ok;
            }
            records.push(BenchRecord {
                grammar: source.label().to_string(),
                n,
                seconds: median(&mut times),
                accepted,
            });
        }
    }
    records
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

/// Least-squares slope of `ln(seconds)` against `ln(n)`. Points with `n == 0`
/// are skipped; needs at least three usable points.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    const FLOOR: f64 = 1e-9;
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| *n > 0)
        .map(|&(n, s)| ((n as f64).ln(), s.max(FLOOR).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Slope per grammar, in first-appearance order.
pub fn slopes(records: &[BenchRecord]) -> Vec<(String, Option<f64>)> {
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.grammar.as_str()) {
            names.push(&r.grammar);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let pts: Vec<(usize, f64)> = records
                .iter()
                .filter(|r| r.grammar == name)
                .map(|r| (r.n, r.seconds))
                .collect();
            (name.to_string(), loglog_slope(&pts))
        })
        .collect()
}

pub fn write_csv(records: &[BenchRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{:.6},{}", r.grammar, r.n, r.seconds, r.accepted)?;
    }
    Ok(())
}

pub fn write_table(records: &[BenchRecord], mut out: impl Write) -> io::Result<()> {
    let width = records
        .iter()
        .map(|r| r.grammar.len())
        .chain(["grammar".len()])
        .max()
        .unwrap_or(7);
    writeln!(out, "{:<width$}  {:>6}  {:>12}  accepted", "grammar", "n", "seconds")?;
    for r in records {
        writeln!(
            out,
            "{:<width$}  {:>6}  {:>12.6}  {}",
            r.grammar, r.n, r.seconds, r.accepted
        )?;
    }
    Ok(())
}
