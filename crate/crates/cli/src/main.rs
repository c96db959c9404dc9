//! `tracemon`: slice and monitor parametric traces from the command line.
//!
//! Exit codes: 0 success, 1 input or spec error, 2 enumeration cap exceeded,
//! 3 a monitored verdict was reported, 4 selfcheck found a mismatch.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use tracemon::lattice::{ParamInstance, DEFAULT_CAP};
use tracemon::monitor::{parse_property_spec, render_property_spec, MonitorSpec};
use tracemon::param::{FullScanMonitor, IndexedMonitor, ParametricMonitor, ReportPolicy};
use tracemon::selfcheck::{self, Mutation};
use tracemon::slicer::Slicer;
use tracemon::trace::{render_trace, ParametricTrace, TraceReader};
use tracemon::workload::{adversarial_trace, iterator_trace, ADVERSARIAL_SPEC, ITERATOR_SPEC};

const EXIT_INPUT: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_VERDICT: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "tracemon", version, about = "Parametric trace slicing and monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print trace slices, either one instance's or all stored ones.
    Slice {
        /// Trace log, or `-` for stdin.
        #[arg(long)]
        trace: PathBuf,
        /// Instance to slice for, e.g. `a=a1,b=b1`. Empty means ⊥.
        #[arg(long)]
        instance: Option<String>,
        /// Largest instance size whose restrictions may be enumerated.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Monitor a trace against a property spec, streaming reports.
    Monitor {
        #[arg(long)]
        spec: PathBuf,
        /// Trace log, or `-` for stdin.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::C)]
        algo: Algo,
        /// Report every triggering verdict, including repeats.
        #[arg(long)]
        report_every: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Differential check of slicer and engines on seeded random traces.
    Selfcheck {
        #[arg(long)]
        seed: u64,
        /// Number of random traces.
        #[arg(long, default_value_t = 1000)]
        counts: usize,
        /// Inject a known defect to confirm the checks catch it.
        #[arg(long, value_enum, hide = true)]
        mutate: Option<MutateArg>,
        /// Directory for the counterexample files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Throughput of both engines on synthetic workloads, as CSV.
    Bench {
        /// Events per workload trace.
        #[arg(long)]
        events: usize,
        #[arg(long, value_enum, default_value_t = Workload::All)]
        workload: Workload,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Full scan of the instance domain per event.
    B,
    /// Indexed engine.
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MutateArg {
    SkipJoin,
    NoSnapshot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Workload {
    Iterator,
    Adversarial,
    All,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{context}: {source}")]
    Core { context: String, source: tracemon::Error },
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if source.is_cap_exceeded() => EXIT_CAP,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            _ => EXIT_INPUT,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn core_err(context: impl Into<String>) -> impl FnOnce(tracemon::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Core { context, source }
}

fn open_trace(path: &Path) -> Result<TraceReader<Box<dyn BufRead>>, CliError> {
    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        Box::new(BufReader::new(File::open(path).map_err(io_err(path))?))
    };
    Ok(TraceReader::new(reader))
}

fn trace_name(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

fn load_spec(path: &Path) -> Result<MonitorSpec, CliError> {
    let text = fs::read(path).map_err(io_err(path))?;
    parse_property_spec(&text).map_err(core_err(path.display().to_string()))
}

fn cmd_slice(trace: &Path, instance: Option<&str>, cap: usize, out: &mut impl Write) -> Result<u8, CliError> {
    let query = instance
        .map(ParamInstance::parse_canonical)
        .transpose()
        .map_err(core_err("--instance"))?;
    let name = trace_name(trace);
    let mut slicer = Slicer::new(cap);
    for item in open_trace(trace)? {
        let (line, event) = item.map_err(core_err(name.clone()))?;
        slicer.push(&event).map_err(core_err(format!("{name}: line {line}")))?;
    }
    let stdout = io_err(Path::new("<stdout>"));
    match query {
        Some(theta) => {
            let slice = slicer.slice(&theta).map_err(core_err("--instance"))?;
            writeln!(out, "{slice}").map_err(stdout)?;
        }
        None => {
            let mut text = String::new();
            for (theta, slice) in slicer.iter() {
                text.push_str(&format!("{}\t{slice}\n", theta.canonical()));
            }
            out.write_all(text.as_bytes()).map_err(stdout)?;
        }
    }
    Ok(0)
}

fn stream_reports<P: ParametricMonitor>(
    mut engine: P,
    trace: &Path,
    out: &mut impl Write,
) -> Result<u8, CliError> {
    let name = trace_name(trace);
    let mut fired = false;
    for item in open_trace(trace)? {
        let (line, event) = item.map_err(core_err(name.clone()))?;
        let reports = engine.process(&event).map_err(core_err(format!("{name}: line {line}")))?;
        for r in &reports {
            writeln!(out, "{r}").map_err(io_err(Path::new("<stdout>")))?;
        }
        if !reports.is_empty() {
            fired = true;
            out.flush().map_err(io_err(Path::new("<stdout>")))?;
        }
    }
    Ok(if fired { EXIT_VERDICT } else { 0 })
}

fn cmd_monitor(
    spec: &Path,
    trace: &Path,
    algo: Algo,
    report_every: bool,
    cap: usize,
    out: &mut impl Write,
) -> Result<u8, CliError> {
    let spec = load_spec(spec)?;
    let mut policy = ReportPolicy::new(spec.trigger.clone());
    policy.every = report_every;
    match algo {
        Algo::B => stream_reports(FullScanMonitor::new(&spec, policy).with_cap(cap), trace, out),
        Algo::C => stream_reports(IndexedMonitor::new(&spec, policy).with_cap(cap), trace, out),
    }
}

fn cmd_selfcheck(
    seed: u64,
    counts: usize,
    mutate: Option<MutateArg>,
    dir: &Path,
    out: &mut impl Write,
) -> Result<u8, CliError> {
    let mut config = selfcheck::Config::new(seed, counts);
    config.mutation = mutate.map(|m| match m {
        MutateArg::SkipJoin => Mutation::SkipJoin,
        MutateArg::NoSnapshot => Mutation::NoSnapshot,
    });
    let summary = selfcheck::run(&config);
    writeln!(out, "{summary}").map_err(io_err(Path::new("<stdout>")))?;
    let Some(cx) = summary.counterexample else {
        return Ok(0);
    };
    let spec_path = dir.join("counterexample.spec");
    let trace_path = dir.join("counterexample.trace");
    fs::write(&spec_path, render_property_spec(&cx.spec)).map_err(io_err(&spec_path))?;
    fs::write(&trace_path, render_trace(&cx.trace)).map_err(io_err(&trace_path))?;
    Err(CliError::Mismatch(format!(
        "case {} failed {} ({} events after shrinking): {}\ncounterexample written to {} and {}",
        cx.case,
        cx.check,
        cx.trace.len(),
        cx.detail,
        spec_path.display(),
        trace_path.display()
    )))
}

struct BenchRow {
    algo: &'static str,
    events_per_second: f64,
    peak_instances: usize,
    monitor_steps: u64,
}

fn bench_engine<P: ParametricMonitor>(algo: &'static str, mut engine: P, trace: &ParametricTrace) -> Result<BenchRow, CliError> {
    let start = Instant::now();
    for ev in trace {
        engine.process(ev).map_err(core_err(format!("bench {algo}")))?;
    }
    let secs = start.elapsed().as_secs_f64().max(1e-9);
    Ok(BenchRow {
        algo,
        events_per_second: trace.len() as f64 / secs,
        peak_instances: engine.instance_count(),
        monitor_steps: engine.counters().monitor_steps,
    })
}

fn cmd_bench(events: usize, workload: Workload, seed: u64, out: &mut impl Write) -> Result<u8, CliError> {
    let stdout = io_err(Path::new("<stdout>"));
    let mut csv = String::from("workload,trace_size,algo,events_per_second,peak_instances,monitor_steps\n");
    if events > 0 {
        let mut runs: Vec<(&str, &str, ParametricTrace)> = Vec::new();
        if matches!(workload, Workload::Iterator | Workload::All) {
            let trace = iterator_trace(&mut ChaCha8Rng::seed_from_u64(seed), events);
            runs.push(("iterator", ITERATOR_SPEC, trace));
        }
        if matches!(workload, Workload::Adversarial | Workload::All) {
            runs.push(("adversarial", ADVERSARIAL_SPEC, adversarial_trace(events)));
        }
        for (name, spec_text, trace) in runs {
            let spec = parse_property_spec(spec_text.as_bytes()).map_err(core_err(name))?;
            let policy = ReportPolicy::new(spec.trigger.clone());
            // Both engines are independent; run them side by side.
            let (b, c) = std::thread::scope(|s| {
                let b = s.spawn(|| bench_engine("b", FullScanMonitor::new(&spec, policy.clone()), &trace));
                let c = bench_engine("c", IndexedMonitor::new(&spec, policy.clone()), &trace);
                (b.join().expect("bench thread panicked"), c)
            });
            let (b, c) = (b?, c?);
            if b.monitor_steps != c.monitor_steps || b.peak_instances != c.peak_instances {
                return Err(CliError::Mismatch(format!(
                    "{name}: engines disagree: {} vs {} steps, {} vs {} instances",
                    b.monitor_steps, c.monitor_steps, b.peak_instances, c.peak_instances
                )));
            }
            for row in [b, c] {
                csv.push_str(&format!(
                    "{name},{},{},{:.0},{},{}\n",
                    trace.len(),
                    row.algo,
                    row.events_per_second,
                    row.peak_instances,
                    row.monitor_steps
                ));
            }
        }
    }
    out.write_all(csv.as_bytes()).map_err(stdout)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Slice { trace, instance, cap } => cmd_slice(trace, instance.as_deref(), *cap, &mut out),
        Command::Monitor { spec, trace, algo, report_every, cap } => {
            cmd_monitor(spec, trace, *algo, *report_every, *cap, &mut out)
        }
        Command::Selfcheck { seed, counts, mutate, out: dir } => cmd_selfcheck(*seed, *counts, *mutate, dir, &mut out),
        Command::Bench { events, workload, seed } => cmd_bench(*events, *workload, *seed, &mut out),
    };
    let flushed = out.flush();
    match result {
        Ok(code) => {
            if let Err(e) = flushed {
                eprintln!("error: <stdout>: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
