//! `docspan`: extract spans of a pattern from a document, or benchmark it.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use docspan::bench::{emit_histogram, measure_delays, write_histogram_csv, write_reports_csv, BenchReport};
use docspan::frontend::Marker;
use docspan::naive::NaiveScan;
use docspan::oracle::oracle_enumerate;
use docspan::{synth, Engine, Error, Mapping, Spanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    General,
    Extended,
    Naive,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Spans,
    Pairs,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(name = "docspan", version, about = "Enumerate the mappings of a regex formula with capture variables")]
struct Cli {
    /// Pattern, e.g. `x{[^@_]+@[^@_]+}`; capture-free patterns get the variable `match`.
    #[arg(short = 'e', long = "pattern")]
    pattern: String,
    /// Input document; standard input when absent.
    #[arg(short = 'f', long = "file", conflicts_with = "synth")]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "general")]
    engine: EngineArg,
    #[arg(long, value_enum, default_value = "spans")]
    format: Format,
    /// Stop after this many mappings.
    #[arg(long)]
    limit: Option<usize>,
    /// Print only the number of mappings.
    #[arg(long)]
    count_only: bool,
    /// Benchmark with this many enumeration runs and print a CSV report.
    #[arg(long, value_name = "N")]
    bench: Option<usize>,
    /// Write the delay histogram of `--bench` to this CSV file.
    #[arg(long, value_name = "PATH", requires = "bench")]
    histogram: Option<PathBuf>,
    /// Histogram bucket width in nanoseconds.
    #[arg(long, default_value_t = 100, requires = "histogram")]
    bucket_ns: u64,
    /// Compare the result set with the exhaustive oracle.
    #[arg(long)]
    verify: bool,
    /// Use a synthetic ACGT document of this many bytes.
    #[arg(long, value_name = "BYTES")]
    synth: Option<usize>,
    /// Seed of the synthetic document.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Pattern(String),
    Io(String),
    Engine(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Pattern(_) => 1,
            Failure::Io(_) => 2,
            Failure::Engine(_) => 3,
            Failure::Verify(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Pattern(m) | Failure::Io(m) | Failure::Engine(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure::Pattern(format!("pattern error: {p}")),
            Error::Io(m) => Failure::Io(m),
            other => Failure::Engine(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn read_document(cli: &Cli) -> Result<Vec<u8>, Failure> {
    if let Some(n) = cli.synth {
        return Ok(synth::dna(n, cli.seed));
    }
    let mut buf = Vec::new();
    match &cli.file {
        Some(p) => File::open(p)
            .and_then(|mut f| f.read_to_end(&mut buf))
            .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        None => io::stdin().lock().read_to_end(&mut buf)?,
    };
    Ok(buf)
}

fn marker_name(m: Marker, vars: &[String]) -> String {
    m.display(vars).to_string()
}

fn write_record<W: Write>(out: &mut W, m: &Mapping, vars: &[String], format: Format) -> io::Result<()> {
    match format {
        Format::Spans => {
            let parts: Vec<String> = m.spans().iter().map(|(v, s)| format!("{}:{s}", vars[v.index()])).collect();
            writeln!(out, "{}", parts.join(" "))
        }
        Format::Pairs => {
            let parts: Vec<String> =
                m.pairs().iter().map(|&(mk, p)| format!("({},{p})", marker_name(mk, vars))).collect();
            writeln!(out, "{}", parts.join(" "))
        }
        Format::Jsonl => {
            let obj: serde_json::Map<String, serde_json::Value> =
                m.spans().iter().map(|(v, s)| (vars[v.index()].clone(), serde_json::json!([s.start, s.end]))).collect();
            writeln!(out, "{}", serde_json::Value::Object(obj))
        }
    }
}

/// Streams mappings, flushing the first one at once.
fn emit<W: Write, I: Iterator<Item = Mapping>>(
    out: &mut W,
    mappings: I,
    vars: &[String],
    cli: &Cli,
) -> Result<usize, Failure> {
    let mut count = 0;
    for m in mappings.take(cli.limit.unwrap_or(usize::MAX)) {
        if !cli.count_only {
            write_record(out, &m, vars, cli.format)?;
            if count == 0 {
                out.flush()?;
            }
        }
        count += 1;
    }
    if cli.count_only {
        writeln!(out, "{count}")?;
    }
    out.flush()?;
    Ok(count)
}

fn spanner(cli: &Cli) -> Result<Spanner, Failure> {
    let engine = match cli.engine {
        EngineArg::Extended => Engine::Extended,
        _ => Engine::General,
    };
    Ok(Spanner::with_engine(cli.pattern.as_bytes(), engine)?)
}

fn naive_mappings<'a>(scan: &'a NaiveScan, doc: &'a [u8]) -> impl Iterator<Item = Mapping> + 'a {
    let x = docspan::frontend::VarId(0);
    scan.scan(doc).map(move |sp| Mapping::from_pairs(vec![(x.open(), sp.start), (x.close(), sp.end)]))
}

fn verify(s: &Spanner, doc: &[u8], got: &BTreeSet<Mapping>) -> Result<(), Failure> {
    let want = oracle_enumerate(s.automaton(), doc).map_err(|e| Failure::Engine(format!("verify: {e}")))?;
    if &want != got {
        return Err(Failure::Verify(format!(
            "verify failed: engine produced {} mappings, oracle {} ({} missing, {} extra)",
            got.len(),
            want.len(),
            want.difference(got).count(),
            got.difference(&want).count()
        )));
    }
    Ok(())
}

fn run_extract(cli: &Cli, s: &Spanner, doc: &[u8]) -> Result<(), Failure> {
    let vars = s.variables().to_vec();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.engine {
        EngineArg::General | EngineArg::Extended => {
            let ev = s.evaluate(doc);
            emit(&mut out, ev.iter(), &vars, cli)?;
            if cli.verify {
                verify(s, doc, &ev.iter().collect())?;
            }
        }
        EngineArg::Naive => {
            let scan = NaiveScan::new(s.formula())?;
            emit(&mut out, naive_mappings(&scan, doc), &vars, cli)?;
            if cli.verify {
                verify(s, doc, &naive_mappings(&scan, doc).collect())?;
            }
        }
        EngineArg::Oracle => {
            let all = oracle_enumerate(s.automaton(), doc)?;
            emit(&mut out, all.into_iter(), &vars, cli)?;
        }
    }
    Ok(())
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[(xs.len() - 1) / 2]
}

fn run_bench(cli: &Cli, s: &Spanner, doc: &[u8], runs: usize) -> Result<(), Failure> {
    if runs == 0 {
        return Err(Failure::Engine("--bench needs at least one run".into()));
    }
    let mut pre = Vec::with_capacity(runs);
    for _ in 0..runs {
        let t = Instant::now();
        let ev = s.evaluate(doc);
        pre.push(t.elapsed());
        drop(ev);
    }
    let ev = s.evaluate(doc);
    let t = Instant::now();
    let profile = match cli.engine {
        EngineArg::General | EngineArg::Extended => {
            measure_delays(runs, || ev.iter().take(cli.limit.unwrap_or(usize::MAX)))?
        }
        EngineArg::Naive => {
            let scan = NaiveScan::new(s.formula())?;
            measure_delays(runs, || scan.scan(doc).take(cli.limit.unwrap_or(usize::MAX)))?
        }
        EngineArg::Oracle => return Err(Failure::Engine("the oracle engine cannot be benchmarked".into())),
    };
    let enumeration = t.elapsed() / runs as u32;
    let size = ev.size();
    let report = BenchReport {
        doc_bytes: doc.len(),
        pattern: cli.pattern.clone(),
        preproc: median(pre),
        enumeration,
        results: profile.len(),
        avg_delay_ns: profile.avg_ns(),
        max_delay_ns: profile.max_ns(),
        dag_bytes: size.dag_bytes,
        jump_bytes: size.jump_bytes,
        matrix_bytes: size.matrix_bytes,
    };
    write_reports_csv(&[report], io::stdout().lock())?;
    if let Some(path) = &cli.histogram {
        let rows = emit_histogram(&profile, cli.bucket_ns)?;
        let f = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        write_histogram_csv(&rows, BufWriter::new(f))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let s = spanner(cli)?;
    if cli.engine == EngineArg::Naive {
        NaiveScan::new(s.formula())?;
    }
    let doc = read_document(cli)?;
    match cli.bench {
        Some(runs) => run_bench(cli, &s, &doc, runs),
        None => run_extract(cli, &s, &doc),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(m)) if m.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("docspan: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
