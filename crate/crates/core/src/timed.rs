//! Wall-clock latency metrics for timed traces (milliseconds).

use crate::error::{Error, Result};
use crate::step::token_correspondence;
use crate::trace::{
    chunk_ends_from_reads, ComputationSpan, SessionTrace, TimedToken, TimelineKind,
};

fn require_timed(s: &SessionTrace, metric: &'static str) -> Result<()> {
    if !s.timeline().is_timed() {
        return Err(Error::IncompatibleTimeline {
            metric,
            timeline: s.timeline().as_str(),
        });
    }
    if s.source().is_empty() {
        return Err(Error::NoInput);
    }
    if s.target().is_empty() {
        return Err(Error::NoOutput);
    }
    Ok(())
}

/// Average Token Delay on a timed trace: the mean over outputs of
/// `end(y_t) - end(x_a(t))`, with `a` from [`token_correspondence`].
///
/// Computation-aware and non-computation-aware scores differ only in how
/// the token times were produced; see [`build_nca_timeline`].
pub fn atd_timed(s: &SessionTrace) -> Result<f64> {
    require_timed(s, "atd")?;
    let a = token_correspondence(s.reads());
    let src = s.source();
    let total: f64 = s
        .target()
        .iter()
        .zip(&a)
        .map(|(y, &ax)| y.end - src[ax - 1].end)
        .sum();
    Ok(total / s.target().len() as f64)
}

/// Start of the first output minus start of the first input.
pub fn start_offset(s: &SessionTrace) -> Result<f64> {
    require_timed(s, "start-offset")?;
    Ok(s.target()[0].start - s.source()[0].start)
}

/// End of the last output minus end of the last input. Negative when the
/// system stopped speaking before the speaker did.
pub fn end_offset(s: &SessionTrace) -> Result<f64> {
    require_timed(s, "end-offset")?;
    let last = |toks: &[TimedToken]| toks[toks.len() - 1].end;
    Ok(last(s.target()) - last(s.source()))
}

/// Sorted, disjoint union of the spans.
fn merge_spans(spans: &[ComputationSpan]) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = spans.iter().map(|s| (s.start, s.end)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (s, e) in iv {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    merged
}

fn covered(merged: &[(f64, f64)], from: f64, to: f64) -> f64 {
    merged
        .iter()
        .map(|&(s, e)| (e.min(to) - s.max(from)).max(0.0))
        .sum()
}

/// Re-schedules a computation-aware trace with computation removed.
///
/// Output chunks are runs of targets written after the same read. Each
/// chunk is moved earlier by the computation time recorded between its
/// triggering source token's end and its own start, but never before that
/// source token ends (unless it already started earlier) and never before
/// the previous chunk has finished: synthesized speech cannot overlap.
/// Token durations and offsets inside a chunk are kept. Source times are
/// unchanged.
pub fn build_nca_timeline(s: &SessionTrace) -> Result<SessionTrace> {
    if s.timeline() != TimelineKind::ComputationAware {
        return Err(Error::IncompatibleTimeline {
            metric: "nca re-scheduling",
            timeline: s.timeline().as_str(),
        });
    }
    let spans = s.spans().ok_or(Error::MissingSpans)?;
    let merged = merge_spans(spans);
    let source = s.source();
    let target = s.target();

    let mut out: Vec<TimedToken> = Vec::with_capacity(target.len());
    let mut prev_end = f64::NEG_INFINITY;
    let mut chunk_start = 0;
    for chunk_end in chunk_ends_from_reads(s.reads()) {
        let chunk = &target[chunk_start..chunk_end];
        let ca_start = chunk[0].start;
        let trigger = source[s.reads()[chunk_start] - 1].end;
        let floor = trigger.min(ca_start);
        let collapsed = ca_start - covered(&merged, floor, ca_start);
        let new_start = collapsed.max(floor).max(prev_end);
        let shift = new_start - ca_start;
        for tok in chunk {
            out.push(TimedToken {
                start: tok.start + shift,
                end: tok.end + shift,
                ..tok.clone()
            });
        }
        prev_end = out.iter().map(|t| t.end).fold(prev_end, f64::max);
        chunk_start = chunk_end;
    }
    s.replace_target(out, TimelineKind::NonComputationAware)
}
