//! Step-based latency metrics: functions of the read counts `g(t)` and the
//! sequence lengths only.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trace::SessionTrace;

/// Read counts and lengths for one session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetricInput<'a> {
    pub reads: &'a [usize],
    pub src_len: usize,
    pub ref_len: Option<usize>,
}

impl<'a> StepMetricInput<'a> {
    pub fn new(reads: &'a [usize], src_len: usize) -> Result<Self> {
        if reads.is_empty() {
            return Err(Error::NoOutput);
        }
        if src_len == 0 {
            return Err(Error::NoInput);
        }
        let mut prev = 0;
        for &g in reads {
            if g < prev || g == 0 || g > src_len {
                return Err(Error::InvalidTrace(format!(
                    "read counts must be non-decreasing within 1..={src_len}"
                )));
            }
            prev = g;
        }
        Ok(Self {
            reads,
            src_len,
            ref_len: None,
        })
    }

    pub fn with_ref_len(mut self, ref_len: usize) -> Self {
        self.ref_len = Some(ref_len);
        self
    }

    pub fn from_session(session: &'a SessionTrace) -> Result<Self> {
        let inp = Self::new(session.reads(), session.source().len())?;
        Ok(match session.reference() {
            Some(r) => inp.with_ref_len(r.len()),
            None => inp,
        })
    }

    pub fn tgt_len(&self) -> usize {
        self.reads.len()
    }
}

/// Which target length the lagging ratio `r = len / |x|` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    /// `|y|`, the hypothesis length.
    Hypothesis,
    /// `|y*|`, the reference length.
    Reference,
    /// `max(|y|, |y*|)`.
    LengthAdaptive,
}

impl fmt::Display for RatioMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioMode::Hypothesis => "hypothesis",
            RatioMode::Reference => "reference",
            RatioMode::LengthAdaptive => "length-adaptive",
        })
    }
}

impl FromStr for RatioMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypothesis" => Ok(RatioMode::Hypothesis),
            "reference" => Ok(RatioMode::Reference),
            "length-adaptive" => Ok(RatioMode::LengthAdaptive),
            other => Err(Error::Config(format!("unknown ratio mode `{other}`"))),
        }
    }
}

fn lagging_ratio(inp: &StepMetricInput<'_>, mode: RatioMode) -> Result<f64> {
    let hyp = inp.tgt_len();
    let len = match mode {
        RatioMode::Hypothesis => hyp,
        RatioMode::Reference => inp.ref_len.ok_or(Error::MissingReference("AL-ref"))?,
        RatioMode::LengthAdaptive => inp.ref_len.ok_or(Error::MissingReference("LAAL"))?.max(hyp),
    };
    if len == 0 {
        return Err(Error::Config("reference length must be positive".into()));
    }
    Ok(len as f64 / inp.src_len as f64)
}

/// Index of the first output written after the whole source was read.
/// Falls back to `|y|` when the translation stopped early.
pub fn cutoff_step(inp: &StepMetricInput<'_>) -> usize {
    inp.reads
        .iter()
        .position(|&g| g == inp.src_len)
        .map_or(inp.tgt_len(), |i| i + 1)
}

/// Average Lagging and its reference-based variants (AL-ref, LAAL).
///
/// Mean of `g(t) - (t-1)/r` over `t = 1..=τ`, where `τ` is [`cutoff_step`].
/// Negative when the output is much shorter than the input.
pub fn average_lagging(inp: &StepMetricInput<'_>, mode: RatioMode) -> Result<f64> {
    if inp.reads.is_empty() {
        return Err(Error::NoOutput);
    }
    let r = lagging_ratio(inp, mode)?;
    let tau = cutoff_step(inp);
    let sum: f64 = inp.reads[..tau]
        .iter()
        .enumerate()
        .map(|(t, &g)| g as f64 - t as f64 / r)
        .sum();
    Ok(sum / tau as f64)
}

/// Differentiable Average Lagging.
///
/// Replaces `g` with `g'(t) = max(g(t), g'(t-1) + 1/r)` and averages over
/// all outputs without a cut-off. With `r = 1` the increment is one source
/// token per output.
pub fn differentiable_average_lagging(inp: &StepMetricInput<'_>) -> Result<f64> {
    Ok(mean(&dal_terms(inp)?))
}

/// The per-output terms `g'(t) - (t-1)/r` summed by DAL, alongside `g'`.
pub fn dal_delays(inp: &StepMetricInput<'_>) -> Result<Vec<f64>> {
    if inp.reads.is_empty() {
        return Err(Error::NoOutput);
    }
    let r = inp.tgt_len() as f64 / inp.src_len as f64;
    let mut out = Vec::with_capacity(inp.tgt_len());
    for &g in inp.reads {
        let g = g as f64;
        let next = match out.last() {
            None => g,
            Some(&prev) => g.max(prev + 1.0 / r),
        };
        out.push(next);
    }
    Ok(out)
}

fn dal_terms(inp: &StepMetricInput<'_>) -> Result<Vec<f64>> {
    let r = inp.tgt_len() as f64 / inp.src_len as f64;
    Ok(dal_delays(inp)?
        .into_iter()
        .enumerate()
        .map(|(t, d)| d - t as f64 / r)
        .collect())
}

/// Average Proportion: mean fraction of the source read per output token.
pub fn average_proportion(inp: &StepMetricInput<'_>) -> Result<f64> {
    if inp.reads.is_empty() {
        return Err(Error::NoOutput);
    }
    let total: usize = inp.reads.iter().sum();
    Ok(total as f64 / (inp.src_len * inp.tgt_len()) as f64)
}

/// Consecutive Wait: `|x|` over the number of read bursts, i.e. outputs
/// preceded by at least one new read (`g(0) = 0`).
pub fn consecutive_wait(inp: &StepMetricInput<'_>) -> Result<f64> {
    if inp.reads.is_empty() {
        return Err(Error::NoOutput);
    }
    let mut prev = 0;
    let mut bursts = 0usize;
    for &g in inp.reads {
        if g > prev {
            bursts += 1;
        }
        prev = g;
    }
    Ok(inp.src_len as f64 / bursts as f64)
}

/// Input token each output is measured against, 1-based.
///
/// `a(t) = min(t - d(t), g(t))` with `d(t) = (t-1) - a(t-1)` and `a(0) = 0`.
/// `d(t)` is how far the previous output prefix has run ahead of the input
/// it was matched to; that surplus delays every later output.
pub fn token_correspondence(reads: &[usize]) -> Vec<usize> {
    let mut a = Vec::with_capacity(reads.len());
    let mut prev_a = 0usize;
    for (i, &g) in reads.iter().enumerate() {
        let t = i + 1;
        let surplus = (t - 1) - prev_a;
        let cur = (t - surplus).min(g);
        a.push(cur);
        prev_a = cur;
    }
    a
}

/// End step of each output on the unit-step timeline:
/// `T(y_t) = max(g(t), T(y_{t-1})) + 1`, with `T(x_j) = j`.
pub fn output_step_times(reads: &[usize]) -> Vec<f64> {
    let mut last = 0usize;
    reads
        .iter()
        .map(|&g| {
            last = g.max(last) + 1;
            last as f64
        })
        .collect()
}

/// Average Token Delay on the unit-step timeline (text-to-text, computation
/// excluded): every token takes one step and reading overlaps with writing.
pub fn atd_steps(inp: &StepMetricInput<'_>) -> Result<f64> {
    if inp.reads.is_empty() {
        return Err(Error::NoOutput);
    }
    let out_ends = output_step_times(inp.reads);
    let a = token_correspondence(inp.reads);
    let delays: Vec<f64> = out_ends
        .iter()
        .zip(&a)
        .map(|(&ty, &ax)| ty - ax as f64)
        .collect();
    Ok(mean(&delays))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
