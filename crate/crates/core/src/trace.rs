//! Session traces: the READ/WRITE record of one simultaneous translation unit.
//!
//! A [`SessionTrace`] holds the source and target token sequences placed on a
//! timeline, plus the read counts `g(t)`: how many source tokens had been
//! consumed when target token `t` was written. Every latency metric in this
//! crate is a function of a trace.
//!
//! Speech sides are usually logged as variable-length segments. For the
//! token-delay metric they are cut into fixed-duration sub-segments with
//! [`subsegment_speech`], and character-based text output can be regrouped
//! into multi-character tokens with [`regroup_tokens`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::step;

/// Default duration of one spoken token, in milliseconds.
pub const DEFAULT_TAU_MS: f64 = 300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TimedToken {
    /// 1-based position within its side.
    pub index: usize,
    pub text: Option<String>,
    /// Milliseconds on timed timelines, step index on unit-step timelines.
    pub start: f64,
    pub end: f64,
}

impl TimedToken {
    pub fn new(index: usize, start: f64, end: f64) -> Self {
        Self {
            index,
            text: None,
            start,
            end,
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    #[serde(rename = "text-to-text")]
    TextToText,
    #[serde(rename = "speech-to-text")]
    SpeechToText,
    #[serde(rename = "speech-to-speech")]
    SpeechToSpeech,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::TextToText => "text-to-text",
            Modality::SpeechToText => "speech-to-text",
            Modality::SpeechToSpeech => "speech-to-speech",
        }
    }

    pub fn speech_source(self) -> bool {
        matches!(self, Modality::SpeechToText | Modality::SpeechToSpeech)
    }

    pub fn speech_target(self) -> bool {
        matches!(self, Modality::SpeechToSpeech)
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text-to-text" | "t2t" => Ok(Modality::TextToText),
            "speech-to-text" | "s2t" => Ok(Modality::SpeechToText),
            "speech-to-speech" | "s2s" => Ok(Modality::SpeechToSpeech),
            other => Err(Error::Config(format!("unknown modality `{other}`"))),
        }
    }
}

/// The time base token times are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimelineKind {
    /// Wall clock, including model computation.
    #[serde(rename = "ca")]
    ComputationAware,
    /// Ideal clock with computation removed; speech durations only.
    #[serde(rename = "nca")]
    NonComputationAware,
    /// One step per input or output token.
    #[serde(rename = "steps")]
    UnitStep,
}

impl TimelineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TimelineKind::ComputationAware => "ca",
            TimelineKind::NonComputationAware => "nca",
            TimelineKind::UnitStep => "steps",
        }
    }

    pub fn is_timed(self) -> bool {
        !matches!(self, TimelineKind::UnitStep)
    }
}

impl fmt::Display for TimelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimelineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ca" => Ok(TimelineKind::ComputationAware),
            "nca" => Ok(TimelineKind::NonComputationAware),
            "steps" => Ok(TimelineKind::UnitStep),
            other => Err(Error::Config(format!(
                "unknown timeline `{other}` (expected ca, nca or steps)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanKind {
    /// Encoding the input prefix and deciding READ or WRITE.
    Encode,
    Decode,
    /// Speech recognition feeding a text-to-text system.
    Asr,
    Other,
}

/// A stretch of wall-clock time spent computing rather than listening or speaking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputationSpan {
    pub kind: SpanKind,
    #[serde(serialize_with = "crate::io::ms::serialize")]
    pub start: f64,
    #[serde(serialize_with = "crate::io::ms::serialize")]
    pub end: f64,
}

impl ComputationSpan {
    pub fn new(kind: SpanKind, start: f64, end: f64) -> Self {
        Self { kind, start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenUnit {
    Word,
    CharacterGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenGranularity {
    pub unit: TokenUnit,
    pub group_size: usize,
}

impl TokenGranularity {
    pub fn word() -> Self {
        Self {
            unit: TokenUnit::Word,
            group_size: 1,
        }
    }

    pub fn characters(group_size: usize) -> Result<Self> {
        if group_size == 0 {
            return Err(Error::Config("character group size must be >= 1".into()));
        }
        Ok(Self {
            unit: TokenUnit::CharacterGroup,
            group_size,
        })
    }
}

impl Default for TokenGranularity {
    fn default() -> Self {
        Self::word()
    }
}

impl fmt::Display for TokenGranularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            TokenUnit::Word => f.write_str("word"),
            TokenUnit::CharacterGroup => write!(f, "char:{}", self.group_size),
        }
    }
}

impl FromStr for TokenGranularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" => Ok(Self::word()),
            "char" => Self::characters(1),
            _ => match s.strip_prefix("char:") {
                Some(n) => {
                    let n = n
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad character group size in `{s}`")))?;
                    Self::characters(n)
                }
                None => Err(Error::Config(format!(
                    "unknown granularity `{s}` (expected word or char:N)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubSegmentConfig {
    pub tau: f64,
}

impl SubSegmentConfig {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Config(format!(
                "sub-segment duration must be positive, got {tau}"
            )));
        }
        Ok(Self { tau })
    }
}

impl Default for SubSegmentConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU_MS,
        }
    }
}

/// How the second trace's timestamps relate to the first one's when concatenating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeBase {
    /// Both traces already share one streaming timeline.
    #[default]
    Absolute,
    /// The second trace starts at zero and is shifted after the first.
    Relative,
}

impl FromStr for TimeBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(TimeBase::Absolute),
            "relative" => Ok(TimeBase::Relative),
            other => Err(Error::Config(format!("unknown time base `{other}`"))),
        }
    }
}

/// One evaluation unit (usually one sentence) with its READ/WRITE history.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTrace {
    id: String,
    modality: Modality,
    timeline: TimelineKind,
    source: Vec<TimedToken>,
    target: Vec<TimedToken>,
    reads: Vec<usize>,
    reference: Option<Vec<String>>,
    spans: Option<Vec<ComputationSpan>>,
    meta: Option<serde_json::Value>,
}

impl SessionTrace {
    /// Builds a validated trace. Token indices are renumbered 1..=n.
    pub fn new(
        id: impl Into<String>,
        modality: Modality,
        timeline: TimelineKind,
        source: Vec<TimedToken>,
        target: Vec<TimedToken>,
        reads: Vec<usize>,
    ) -> Result<Self> {
        let mut trace = Self {
            id: id.into(),
            modality,
            timeline,
            source,
            target,
            reads,
            reference: None,
            spans: None,
            meta: None,
        };
        renumber(&mut trace.source);
        renumber(&mut trace.target);
        trace.validate()?;
        Ok(trace)
    }

    /// Builds a unit-step trace from read counts alone.
    ///
    /// Source token `j` occupies step `[j-1, j]`. Target token `t` ends at
    /// `max(g(t), T(y_{t-1})) + 1`: a write takes one step, cannot start
    /// before the source token that triggered it has been read, and writes
    /// are serialized, while reading continues in parallel.
    pub fn unit_step(
        id: impl Into<String>,
        modality: Modality,
        src_len: usize,
        reads: Vec<usize>,
    ) -> Result<Self> {
        check_reads(&reads, src_len)?;
        let source = (1..=src_len)
            .map(|j| TimedToken::new(j, (j - 1) as f64, j as f64))
            .collect();
        let target = step::output_step_times(&reads)
            .into_iter()
            .enumerate()
            .map(|(i, end)| TimedToken::new(i + 1, end - 1.0, end))
            .collect();
        Self::new(id, modality, TimelineKind::UnitStep, source, target, reads)
    }

    pub fn with_reference<I, S>(mut self, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.reference = Some(tokens.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_reference_len(self, len: usize) -> Self {
        self.with_reference(std::iter::repeat_n("<ref>", len))
    }

    pub fn with_spans(mut self, spans: Vec<ComputationSpan>) -> Self {
        self.spans = Some(spans);
        self
    }

    pub fn with_meta(mut self, meta: serde_json::Value) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn timeline(&self) -> TimelineKind {
        self.timeline
    }

    pub fn source(&self) -> &[TimedToken] {
        &self.source
    }

    pub fn target(&self) -> &[TimedToken] {
        &self.target
    }

    pub fn reads(&self) -> &[usize] {
        &self.reads
    }

    pub fn reference(&self) -> Option<&[String]> {
        self.reference.as_deref()
    }

    pub fn spans(&self) -> Option<&[ComputationSpan]> {
        self.spans.as_deref()
    }

    pub fn meta(&self) -> Option<&serde_json::Value> {
        self.meta.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty() && self.target.is_empty()
    }

    pub(crate) fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.reads.len() != self.target.len() {
            return Err(Error::InvalidTrace(format!(
                "{}: {} read counts for {} target tokens",
                self.id,
                self.reads.len(),
                self.target.len()
            )));
        }
        check_reads(&self.reads, self.source.len())
            .map_err(|e| Error::InvalidTrace(format!("{}: {e}", self.id)))?;
        check_tokens(&self.source, self.timeline)
            .map_err(|e| Error::InvalidTrace(format!("{}: source {e}", self.id)))?;
        check_tokens(&self.target, self.timeline)
            .map_err(|e| Error::InvalidTrace(format!("{}: target {e}", self.id)))?;
        if let Some(spans) = &self.spans {
            if let Some(bad) = spans
                .iter()
                .find(|s| !(s.start.is_finite() && s.end.is_finite()) || s.end < s.start)
            {
                return Err(Error::InvalidTrace(format!(
                    "{}: computation span [{}, {}] ends before it starts",
                    self.id, bad.start, bad.end
                )));
            }
        }
        Ok(())
    }

    /// 1-based indices of target tokens that start before their triggering
    /// source token has ended. Legal on computation-aware traces (pipelined
    /// synthesis), but worth flagging.
    pub fn pipelined_targets(&self) -> Vec<usize> {
        if !self.timeline.is_timed() {
            return Vec::new();
        }
        self.target
            .iter()
            .zip(&self.reads)
            .filter(|(tok, &g)| tok.start < self.source[g - 1].end)
            .map(|(tok, _)| tok.index)
            .collect()
    }

    /// Cuts speech sides into `tau`-long sub-segments.
    ///
    /// The source is split for speech input, the target for speech output.
    /// Each listed item is treated as one contiguous speech segment, and
    /// read counts expressed in listed items are mapped onto sub-segments.
    pub fn subsegmented(&self, cfg: SubSegmentConfig) -> Result<SessionTrace> {
        if !self.timeline.is_timed() {
            return Err(Error::IncompatibleTimeline {
                metric: "sub-segmentation",
                timeline: self.timeline.as_str(),
            });
        }
        let mut out = self.clone();
        if self.modality.speech_source() && !self.source.is_empty() {
            let (tokens, counts) = subsegment_side(&self.source, cfg)?;
            let cumulative: Vec<usize> = counts
                .iter()
                .scan(0, |acc, n| {
                    *acc += n;
                    Some(*acc)
                })
                .collect();
            out.reads = self.reads.iter().map(|&g| cumulative[g - 1]).collect();
            out.source = tokens;
        }
        if self.modality.speech_target() && !self.target.is_empty() {
            let (tokens, counts) = subsegment_side(&self.target, cfg)?;
            out.reads = out
                .reads
                .iter()
                .zip(&counts)
                .flat_map(|(&g, &n)| std::iter::repeat_n(g, n))
                .collect();
            out.target = tokens;
        }
        out.validate()?;
        Ok(out)
    }

    /// Re-tokenizes text output at the given granularity.
    ///
    /// Target tokens are first split into single characters, then grouped
    /// within each output chunk (a run of tokens written after the same
    /// read). The reference, if present, is grouped the same way as one chunk.
    pub fn with_granularity(&self, gran: TokenGranularity) -> Result<SessionTrace> {
        if gran.unit == TokenUnit::Word {
            return Ok(self.clone());
        }
        let (chars, char_reads) = split_characters(&self.target, &self.reads);
        let chunk_ends = chunk_ends_from_reads(&char_reads);
        let grouped = regroup_tokens(&chars, &char_reads, gran, &chunk_ends)?;
        let mut out = self.clone();
        out.target = grouped.tokens;
        out.reads = grouped.reads;
        if let Some(reference) = &self.reference {
            let n_chars: usize = reference
                .iter()
                .map(|w| w.chars().filter(|c| !c.is_whitespace()).count())
                .sum();
            let n_groups = n_chars.div_ceil(gran.group_size);
            out.reference = Some(vec!["<ref>".to_string(); n_groups]);
        }
        out.validate()?;
        Ok(out)
    }

    /// Rebuilds token times on the unit-step timeline, keeping token texts
    /// and read counts.
    pub fn to_unit_steps(&self) -> Result<SessionTrace> {
        let mut out = SessionTrace::unit_step(
            self.id.clone(),
            self.modality,
            self.source.len(),
            self.reads.clone(),
        )?;
        for (dst, src) in out.source.iter_mut().zip(&self.source) {
            dst.text.clone_from(&src.text);
        }
        for (dst, src) in out.target.iter_mut().zip(&self.target) {
            dst.text.clone_from(&src.text);
        }
        out.reference.clone_from(&self.reference);
        out.meta.clone_from(&self.meta);
        Ok(out)
    }

    pub(crate) fn replace_target(
        &self,
        target: Vec<TimedToken>,
        timeline: TimelineKind,
    ) -> Result<SessionTrace> {
        let mut out = self.clone();
        out.target = target;
        out.timeline = timeline;
        out.validate()?;
        Ok(out)
    }
}

fn renumber(tokens: &mut [TimedToken]) {
    for (i, tok) in tokens.iter_mut().enumerate() {
        tok.index = i + 1;
    }
}

fn check_reads(reads: &[usize], src_len: usize) -> Result<()> {
    let mut prev = 0;
    for (t, &g) in reads.iter().enumerate() {
        if g == 0 || g > src_len {
            return Err(Error::InvalidTrace(format!(
                "g({}) = {g} outside 1..={src_len}",
                t + 1
            )));
        }
        if g < prev {
            return Err(Error::InvalidTrace(format!(
                "read counts decrease at t = {} ({prev} -> {g})",
                t + 1
            )));
        }
        prev = g;
    }
    Ok(())
}

fn check_tokens(tokens: &[TimedToken], timeline: TimelineKind) -> Result<()> {
    let mut prev: Option<&TimedToken> = None;
    for tok in tokens {
        if !(tok.start.is_finite() && tok.end.is_finite()) {
            return Err(Error::InvalidTrace(format!(
                "token {} has a non-finite time",
                tok.index
            )));
        }
        if tok.end < tok.start {
            return Err(Error::InvalidTrace(format!(
                "token {} ends ({}) before it starts ({})",
                tok.index, tok.end, tok.start
            )));
        }
        if timeline.is_timed() && tok.start < 0.0 {
            return Err(Error::InvalidTrace(format!(
                "token {} has a negative time",
                tok.index
            )));
        }
        if let Some(p) = prev {
            if tok.start < p.start || tok.end < p.end {
                return Err(Error::InvalidTrace(format!(
                    "token {} is out of order with token {}",
                    tok.index, p.index
                )));
            }
        }
        prev = Some(tok);
    }
    Ok(())
}

/// Splits speech segments into sub-segments of `cfg.tau` from the start of
/// each segment. The remainder of a segment forms a shorter final token that
/// ends exactly at the segment end; silence between segments belongs to no
/// token. Indices are global and 1-based.
pub fn subsegment_speech(
    segments: &[(f64, f64)],
    cfg: SubSegmentConfig,
) -> Result<Vec<TimedToken>> {
    let cfg = SubSegmentConfig::new(cfg.tau)?;
    if segments.is_empty() {
        return Err(Error::NoInput);
    }
    let mut tokens = Vec::new();
    let mut prev_end = f64::NEG_INFINITY;
    for (i, &(start, end)) in segments.iter().enumerate() {
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::InvalidTrace(format!(
                "segment {} [{start}, {end}] is empty or reversed",
                i + 1
            )));
        }
        if start < prev_end {
            return Err(Error::InvalidTrace(format!(
                "segment {} starts at {start}, before the previous one ends at {prev_end}",
                i + 1
            )));
        }
        prev_end = end;

        let eps = 1e-9 * end.abs().max(1.0);
        let mut cursor = start;
        while cursor < end - eps {
            let mut stop = cursor + cfg.tau;
            if stop >= end - eps {
                stop = end;
            }
            tokens.push(TimedToken::new(tokens.len() + 1, cursor, stop));
            cursor = stop;
        }
    }
    Ok(tokens)
}

fn subsegment_side(
    items: &[TimedToken],
    cfg: SubSegmentConfig,
) -> Result<(Vec<TimedToken>, Vec<usize>)> {
    let mut tokens = Vec::new();
    let mut counts = Vec::with_capacity(items.len());
    for item in items {
        let pieces = subsegment_speech(&[(item.start, item.end)], cfg)?;
        counts.push(pieces.len());
        tokens.extend(pieces);
    }
    renumber(&mut tokens);
    Ok((tokens, counts))
}

/// A re-tokenized side with its carried-over read counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Regrouped {
    pub tokens: Vec<TimedToken>,
    pub reads: Vec<usize>,
}

/// Groups consecutive characters into tokens of `gran.group_size` within each
/// output chunk. A trailing remainder shorter than the group size forms its
/// own token. `chunk_ends` are 1-based inclusive end positions of each chunk.
///
/// A group spans from its first character's start to its last character's
/// end, and carries the read count of its last character. Word granularity
/// returns the side unchanged.
pub fn regroup_tokens(
    tokens: &[TimedToken],
    reads: &[usize],
    gran: TokenGranularity,
    chunk_ends: &[usize],
) -> Result<Regrouped> {
    if tokens.len() != reads.len() {
        return Err(Error::InvalidTrace(format!(
            "{} read counts for {} tokens",
            reads.len(),
            tokens.len()
        )));
    }
    for &end in chunk_ends {
        if end == 0 || end > tokens.len() {
            return Err(Error::BoundaryOutOfRange {
                index: end,
                len: tokens.len(),
            });
        }
    }
    if chunk_ends.windows(2).any(|w| w[1] <= w[0])
        || chunk_ends.last().copied().unwrap_or(0) != tokens.len()
    {
        return Err(Error::InvalidTrace(
            "chunk boundaries must increase strictly and end at the last token".into(),
        ));
    }
    if gran.unit == TokenUnit::Word {
        return Ok(Regrouped {
            tokens: tokens.to_vec(),
            reads: reads.to_vec(),
        });
    }

    let size = gran.group_size.max(1);
    let mut out_tokens = Vec::new();
    let mut out_reads = Vec::new();
    let mut chunk_start = 0;
    for &chunk_end in chunk_ends {
        for group in (chunk_start..chunk_end).collect::<Vec<_>>().chunks(size) {
            let first = &tokens[group[0]];
            let last_i = *group.last().expect("chunks are non-empty");
            let last = &tokens[last_i];
            let text = group
                .iter()
                .map(|&i| tokens[i].text.as_deref())
                .collect::<Option<String>>();
            out_tokens.push(TimedToken {
                index: out_tokens.len() + 1,
                text,
                start: first.start,
                end: last.end,
            });
            out_reads.push(reads[last_i]);
        }
        chunk_start = chunk_end;
    }
    Ok(Regrouped {
        tokens: out_tokens,
        reads: out_reads,
    })
}

/// End positions (1-based, inclusive) of each maximal run of equal read
/// counts: the tokens written after the same READ.
pub fn chunk_ends_from_reads(reads: &[usize]) -> Vec<usize> {
    let mut ends = Vec::new();
    for t in 0..reads.len() {
        if t + 1 == reads.len() || reads[t + 1] != reads[t] {
            ends.push(t + 1);
        }
    }
    ends
}

/// Explodes multi-character tokens into one token per character. Each
/// character inherits the token's read count and an equal share of its time
/// span. Tokens without text are kept whole.
pub fn split_characters(tokens: &[TimedToken], reads: &[usize]) -> (Vec<TimedToken>, Vec<usize>) {
    let mut out = Vec::new();
    let mut out_reads = Vec::new();
    for (tok, &g) in tokens.iter().zip(reads) {
        let chars: Vec<char> = match &tok.text {
            Some(text) => text.chars().filter(|c| !c.is_whitespace()).collect(),
            None => Vec::new(),
        };
        if chars.len() <= 1 {
            out.push(tok.clone());
            out_reads.push(g);
            continue;
        }
        let share = tok.duration() / chars.len() as f64;
        for (k, c) in chars.iter().enumerate() {
            let start = tok.start + share * k as f64;
            let end = if k + 1 == chars.len() {
                tok.end
            } else {
                tok.start + share * (k + 1) as f64
            };
            out.push(TimedToken::new(0, start, end).with_text(c.to_string()));
            out_reads.push(g);
        }
    }
    renumber(&mut out);
    (out, out_reads)
}

/// Joins two traces into one streaming unit.
///
/// `b`'s read counts are offset by `a`'s source length. With
/// [`TimeBase::Relative`], `b`'s timestamps are shifted by the later of
/// `a`'s last source end and last target end. Unit-step traces get their
/// step times rebuilt. Concatenating an empty trace is the identity.
pub fn concat_sessions(
    a: &SessionTrace,
    b: &SessionTrace,
    time_base: TimeBase,
) -> Result<SessionTrace> {
    if a.modality != b.modality {
        return Err(Error::Mismatch(format!(
            "modality {} vs {}",
            a.modality, b.modality
        )));
    }
    if a.timeline != b.timeline {
        return Err(Error::Mismatch(format!(
            "timeline {} vs {}",
            a.timeline, b.timeline
        )));
    }
    if b.is_empty() {
        return Ok(a.clone());
    }
    if a.is_empty() {
        return Ok(b.clone());
    }

    let offset = a.source.len();
    let reads: Vec<usize> = a
        .reads
        .iter()
        .copied()
        .chain(b.reads.iter().map(|g| g + offset))
        .collect();
    let id = format!("{}+{}", a.id, b.id);
    let reference = match (&a.reference, &b.reference) {
        (Some(x), Some(y)) => Some(x.iter().chain(y).cloned().collect::<Vec<_>>()),
        _ => None,
    };
    let meta = serde_json::json!({ "parts": [a.id, b.id] });

    if a.timeline == TimelineKind::UnitStep {
        let mut out = SessionTrace::unit_step(id, a.modality, offset + b.source.len(), reads)?;
        for (dst, src) in out.source.iter_mut().zip(a.source.iter().chain(&b.source)) {
            dst.text.clone_from(&src.text);
        }
        for (dst, src) in out.target.iter_mut().zip(a.target.iter().chain(&b.target)) {
            dst.text.clone_from(&src.text);
        }
        out.reference = reference;
        out.meta = Some(meta);
        return Ok(out);
    }

    let shift = match time_base {
        TimeBase::Absolute => 0.0,
        TimeBase::Relative => {
            let src_end = a.source.last().map_or(0.0, |t| t.end);
            let tgt_end = a.target.last().map_or(0.0, |t| t.end);
            src_end.max(tgt_end)
        }
    };
    let shifted = |tok: &TimedToken| TimedToken {
        start: tok.start + shift,
        end: tok.end + shift,
        ..tok.clone()
    };
    let source = a
        .source
        .iter()
        .cloned()
        .chain(b.source.iter().map(shifted))
        .collect();
    let target = a
        .target
        .iter()
        .cloned()
        .chain(b.target.iter().map(shifted))
        .collect();
    let spans = match (&a.spans, &b.spans) {
        (Some(x), Some(y)) => Some(
            x.iter()
                .copied()
                .chain(
                    y.iter()
                        .map(|s| ComputationSpan::new(s.kind, s.start + shift, s.end + shift)),
                )
                .collect(),
        ),
        _ => None,
    };

    let mut out = SessionTrace::new(id, a.modality, a.timeline, source, target, reads)?;
    out.reference = reference;
    out.spans = spans;
    out.meta = Some(meta);
    out.validate()?;
    Ok(out)
}
