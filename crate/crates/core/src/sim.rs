//! Synthetic READ/WRITE schedules: wait-k, fixed chunk-k, the two-chunk
//! family with a varying first output length, and the two hand-built cases
//! that contrast short and long first outputs.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evs::AlignedPair;
use crate::metric::Metric;
use crate::step::output_step_times;
use crate::trace::{Modality, SessionTrace, TimedToken, TimelineKind};

/// Read `k` tokens, then alternate one write and one read:
/// `g(t) = min(k + t - 1, |x|)`.
pub fn gen_wait_k(k: usize, src_len: usize, tgt_len: usize) -> Result<SessionTrace> {
    check(k, src_len, tgt_len)?;
    let reads = (1..=tgt_len).map(|t| (k + t - 1).min(src_len)).collect();
    SessionTrace::unit_step(
        format!("wait-k/k={k}"),
        Modality::TextToText,
        src_len,
        reads,
    )
    .map(|s| s.with_meta(serde_json::json!({ "strategy": "wait-k", "param": k })))
}

/// Alternate input and output chunks of `k` tokens:
/// `g(t) = min(ceil(t / k) * k, |x|)`.
pub fn gen_chunk_k(k: usize, src_len: usize, tgt_len: usize) -> Result<SessionTrace> {
    check(k, src_len, tgt_len)?;
    let reads = (1..=tgt_len)
        .map(|t| (t.div_ceil(k) * k).min(src_len))
        .collect();
    SessionTrace::unit_step(
        format!("chunk-k/k={k}"),
        Modality::TextToText,
        src_len,
        reads,
    )
    .map(|s| s.with_meta(serde_json::json!({ "strategy": "chunk-k", "param": k })))
}

/// Two 10-token input chunks translated into `l1` and then 10 output tokens.
pub fn gen_case4(l1: usize) -> Result<SessionTrace> {
    if l1 == 0 {
        return Err(Error::Config(
            "first output chunk length must be >= 1".into(),
        ));
    }
    let reads = std::iter::repeat_n(10, l1)
        .chain(std::iter::repeat_n(20, 10))
        .collect();
    SessionTrace::unit_step(format!("case4/l1={l1}"), Modality::TextToText, 20, reads)
        .map(|s| s.with_meta(serde_json::json!({ "strategy": "case4", "param": l1 })))
}

fn check(k: usize, src_len: usize, tgt_len: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    if src_len == 0 || tgt_len == 0 {
        return Err(Error::Config(
            "source and target lengths must be >= 1".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Strategy {
    #[serde(rename = "wait-k")]
    WaitK,
    #[serde(rename = "chunk-k")]
    ChunkK,
    #[serde(rename = "case4")]
    Case4,
}

impl Strategy {
    pub fn generate(self, param: usize, src_len: usize, tgt_len: usize) -> Result<SessionTrace> {
        match self {
            Strategy::WaitK => gen_wait_k(param, src_len, tgt_len),
            Strategy::ChunkK => gen_chunk_k(param, src_len, tgt_len),
            Strategy::Case4 => gen_case4(param),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::WaitK => "wait-k",
            Strategy::ChunkK => "chunk-k",
            Strategy::Case4 => "case4",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wait-k" | "waitk" => Ok(Strategy::WaitK),
            "chunk-k" | "chunk" => Ok(Strategy::ChunkK),
            "case4" => Ok(Strategy::Case4),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (expected wait-k, chunk-k or case4)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub strategy: Strategy,
    pub parameter: usize,
    pub metric: Metric,
    pub value: f64,
}

/// Evaluates `metrics` over a parameter range, one row per (parameter, metric).
pub fn sweep(
    metrics: &[Metric],
    strategy: Strategy,
    params: RangeInclusive<usize>,
    src_len: usize,
    tgt_len: usize,
) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::new();
    for p in params {
        let trace = strategy.generate(p, src_len, tgt_len)?;
        for &metric in metrics {
            rows.push(CurveRow {
                strategy,
                parameter: p,
                metric,
                value: metric.evaluate(&trace)?,
            });
        }
    }
    Ok(rows)
}

/// Hand-built schedules for two input chunks (1 and 3 tokens) translated
/// into two output chunks. Case 1 answers the first chunk with 2 tokens,
/// case 2 with 5, so case 2's long first output delays everything after it.
pub mod fixtures {
    use super::*;

    /// Milliseconds per step in the timed variants.
    pub const STEP_MS: f64 = 1000.0;

    const CASE1_READS: [usize; 5] = [1, 1, 4, 4, 4];
    const CASE2_READS: [usize; 8] = [1, 1, 1, 1, 1, 4, 4, 4];
    // (source word, target word); the first case's 2nd output and the second
    // case's 2nd..5th outputs are function words left unaligned.
    const CASE1_LINKS: [(usize, usize); 4] = [(1, 1), (2, 3), (3, 4), (4, 5)];
    const CASE2_LINKS: [(usize, usize); 4] = [(1, 1), (2, 6), (3, 7), (4, 8)];

    fn reads(case: u8) -> &'static [usize] {
        match case {
            1 => &CASE1_READS,
            2 => &CASE2_READS,
            _ => panic!("fixture case must be 1 or 2"),
        }
    }

    /// Unit-step trace of case 1 or 2.
    pub fn trace(case: u8) -> SessionTrace {
        SessionTrace::unit_step(
            format!("case{case}"),
            Modality::TextToText,
            4,
            reads(case).to_vec(),
        )
        .expect("fixture is valid")
    }

    /// The same schedule on a millisecond timeline, [`STEP_MS`] per step.
    pub fn case_timed(case: u8) -> SessionTrace {
        let steps = trace(case);
        let scale = |t: &TimedToken| TimedToken {
            start: t.start * STEP_MS,
            end: t.end * STEP_MS,
            ..t.clone()
        };
        SessionTrace::new(
            format!("case{case}-timed"),
            Modality::TextToText,
            TimelineKind::NonComputationAware,
            steps.source().iter().map(scale).collect(),
            steps.target().iter().map(scale).collect(),
            steps.reads().to_vec(),
        )
        .expect("fixture is valid")
    }

    /// Verified content-word links with word start times in milliseconds.
    pub fn case_alignments(case: u8) -> Vec<AlignedPair> {
        let links: &[(usize, usize)] = match case {
            1 => &CASE1_LINKS,
            2 => &CASE2_LINKS,
            _ => panic!("fixture case must be 1 or 2"),
        };
        let out_ends = output_step_times(reads(case));
        links
            .iter()
            .map(|&(j, t)| {
                let src_start = (j - 1) as f64 * STEP_MS;
                let tgt_start = (out_ends[t - 1] - 1.0) * STEP_MS;
                AlignedPair::new(j, t, src_start, tgt_start, true)
            })
            .collect()
    }
}
