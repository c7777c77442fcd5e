//! Command-line front end. The `simul-latency` binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (or warnings under
//! `--strict`).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::evs::concat_links;
use crate::io::{read_alignments, read_traces, write_alignments, write_traces, AlignmentRecord};
use crate::metric::parse_metric_list;
use crate::report::{self, EvalOptions, EvsColumns, EvsReport, ReportTable};
use crate::sim::{sweep, Strategy};
use crate::stats::spearman_pairwise;
use crate::trace::{
    concat_sessions, SessionTrace, SubSegmentConfig, TimeBase, TimelineKind, TokenGranularity,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "simul-latency",
    version,
    about = "Latency metrics for simultaneous translation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a JSONL trace file; writes a CSV (or JSON) report.
    Eval(EvalArgs),
    /// Generate synthetic wait-k, chunk-k or case4 traces.
    Simulate(SimulateArgs),
    /// Mean EVS per sentence from a JSONL alignment file.
    Evs(EvsArgs),
    /// Spearman's rho between two report columns.
    Correlate(CorrelateArgs),
    /// Join pairs of sessions into two-sentence sessions.
    Concat(ConcatArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Trace file, `-` for stdin.
    input: PathBuf,
    /// Comma-separated metric names or `all`.
    #[arg(long, default_value = "al,dal,atd")]
    metrics: String,
    /// Sub-segment duration for speech, in ms.
    #[arg(long, default_value_t = crate::trace::DEFAULT_TAU_MS)]
    tau: f64,
    /// `word` or `char:N`.
    #[arg(long, default_value = "word")]
    granularity: String,
    /// Score on this timeline instead of each record's own (ca, nca, steps).
    #[arg(long)]
    timeline: Option<TimelineKind>,
    /// Treat skipped records and metrics as errors.
    #[arg(long)]
    strict: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// wait-k, chunk-k or case4.
    #[arg(long)]
    strategy: Strategy,
    /// Parameter (k or first output length): `N` or `A..B` inclusive.
    #[arg(long, default_value = "1..20")]
    range: String,
    #[arg(long, default_value_t = 20)]
    src_len: usize,
    #[arg(long, default_value_t = 20)]
    tgt_len: usize,
    /// Write a long-format curve table (strategy, parameter, metric, value)
    /// instead of traces.
    #[arg(long)]
    curve: bool,
    /// Metrics for `--curve`.
    #[arg(long, default_value = "al,dal,atd")]
    metrics: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvsArgs {
    /// Alignment file, `-` for stdin.
    input: PathBuf,
    /// verified, automatic or both.
    #[arg(long, default_value = "both")]
    mode: EvsColumns,
    #[arg(long)]
    strict: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    /// Report CSV with an `id` column.
    report: PathBuf,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Second report joined on `id` before correlating.
    #[arg(long)]
    join: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Pairing {
    /// (1,2), (3,4), ...
    Adjacent,
    /// (1,2), (2,3), ...
    Sliding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum TimeBaseArg {
    Absolute,
    Relative,
}

#[derive(Debug, Args)]
struct ConcatArgs {
    /// Trace file, `-` for stdin.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sliding")]
    pairing: Pairing,
    #[arg(long, value_enum, default_value = "absolute")]
    time_base: TimeBaseArg,
    /// Alignment file to concatenate with the same pairing.
    #[arg(long, requires = "alignments_output")]
    alignments: Option<PathBuf>,
    #[arg(long, requires = "alignments")]
    alignments_output: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(a) => eval(a, out, err),
        Command::Simulate(a) => simulate(a, out),
        Command::Evs(a) => evs(a, out, err),
        Command::Correlate(a) => correlate(a, out),
        Command::Concat(a) => concat(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            }
        }
    }
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn with_output<F>(path: Option<&Path>, out: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

fn eval(a: EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let opts = EvalOptions {
        metrics: parse_metric_list(&a.metrics)?,
        subsegment: SubSegmentConfig::new(a.tau)?,
        granularity: a.granularity.parse::<TokenGranularity>()?,
        timeline: a.timeline,
    };
    let sessions = read_traces(open_input(&a.input)?)?;
    let rep = report::evaluate(&sessions, &opts)?;
    for w in &rep.warnings {
        writeln!(err, "warning: {w}")?;
    }
    with_output(a.output.as_deref(), out, |w| {
        if a.json {
            serde_json::to_writer_pretty(&mut *w, &rep.to_json())?;
            writeln!(w)?;
            Ok(())
        } else {
            rep.write_csv(w)
        }
    })?;
    Ok(if a.strict && !rep.warnings.is_empty() {
        EXIT_DATA
    } else {
        EXIT_OK
    })
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::Config(format!("bad range `{s}` (expected N or A..B)"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let range = parse_range(&a.range)?;
    if a.curve {
        let metrics = parse_metric_list(&a.metrics)?;
        let rows = sweep(&metrics, a.strategy, range, a.src_len, a.tgt_len)?;
        with_output(a.output.as_deref(), out, |w| {
            report::write_curve_csv(w, &rows)
        })?;
    } else {
        let sessions = range
            .map(|p| a.strategy.generate(p, a.src_len, a.tgt_len))
            .collect::<Result<Vec<_>>>()?;
        with_output(a.output.as_deref(), out, |w| write_traces(w, &sessions))?;
    }
    Ok(EXIT_OK)
}

fn evs(a: EvsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let records = read_alignments(open_input(&a.input)?)?;
    if records.is_empty() {
        return Err(Error::NoSessions);
    }
    let rep = EvsReport::from_records(&records);
    let mut warned = false;
    for r in &rep.rows {
        if r.mean_evs.is_none() && a.mode != EvsColumns::Automatic {
            writeln!(err, "warning: {}: no verified links", r.id)?;
            warned = true;
        }
        if r.duplicates > 0 {
            writeln!(
                err,
                "warning: {}: {} duplicate link(s) dropped",
                r.id, r.duplicates
            )?;
            warned = true;
        }
    }
    with_output(a.output.as_deref(), out, |w| rep.write_csv(w, a.mode))?;
    Ok(if a.strict && warned {
        EXIT_DATA
    } else {
        EXIT_OK
    })
}

fn correlate(a: CorrelateArgs, out: &mut dyn Write) -> Result<i32> {
    let mut table = ReportTable::read_csv(File::open(&a.report)?)?;
    if let Some(j) = &a.join {
        table = table.join(&ReportTable::read_csv(File::open(j)?)?);
    }
    let c = spearman_pairwise(table.column(&a.a)?, table.column(&a.b)?)?;
    with_output(a.output.as_deref(), out, |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["a", "b", "rho", "p_value", "n"])?;
        w.write_record([
            a.a.clone(),
            a.b.clone(),
            format!("{:.4}", c.rho),
            format!("{:.4}", c.p_value),
            c.n.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn pairs(n: usize, pairing: Pairing) -> Vec<(usize, usize)> {
    match pairing {
        Pairing::Adjacent => (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect(),
        Pairing::Sliding => (1..n).map(|i| (i - 1, i)).collect(),
    }
}

fn concat(a: ConcatArgs, out: &mut dyn Write) -> Result<i32> {
    let sessions: Vec<SessionTrace> = read_traces(open_input(&a.input)?)?;
    if sessions.len() < 2 {
        return Err(Error::Mismatch(format!(
            "need at least two sessions, got {}",
            sessions.len()
        )));
    }
    let time_base = match a.time_base {
        TimeBaseArg::Absolute => TimeBase::Absolute,
        TimeBaseArg::Relative => TimeBase::Relative,
    };
    let pairing = pairs(sessions.len(), a.pairing);
    let joined = pairing
        .iter()
        .map(|&(i, j)| concat_sessions(&sessions[i], &sessions[j], time_base))
        .collect::<Result<Vec<_>>>()?;
    with_output(a.output.as_deref(), out, |w| write_traces(w, &joined))?;

    if let (Some(inp), Some(outp)) = (&a.alignments, &a.alignments_output) {
        let records = read_alignments(open_input(inp)?)?;
        let by_id = |id: &str| {
            records
                .iter()
                .find(|r| r.id == id)
                .ok_or_else(|| Error::Mismatch(format!("no alignment record for session `{id}`")))
        };
        let joined = pairing
            .iter()
            .map(|&(i, j)| {
                let ra = by_id(sessions[i].id())?;
                let rb = by_id(sessions[j].id())?;
                Ok(AlignmentRecord {
                    id: format!("{}+{}", ra.id, rb.id),
                    links: concat_links(&ra.links, &rb.links),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut w = BufWriter::new(File::create(outp)?);
        write_alignments(&mut w, &joined)?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..20").unwrap(), 1..=20);
        assert_eq!(parse_range("1..=3").unwrap(), 1..=3);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("5..3").is_err());
    }

    #[test]
    fn pairing_policies() {
        assert_eq!(pairs(5, Pairing::Adjacent), vec![(0, 1), (2, 3)]);
        assert_eq!(pairs(3, Pairing::Sliding), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["simul-latency", "bogus"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["simul-latency", "--help"], &mut o, &mut e), EXIT_OK);
    }
}
