//! JSON-lines formats for traces and word alignments.
//!
//! Trace record, one per line:
//!
//! ```json
//! {"id":"talk1-s3","modality":"speech-to-speech","timeline":"ca",
//!  "source":[{"start":0,"end":750},{"start":1000,"end":1300}],
//!  "target":[{"start":1500,"end":2100,"g":1},{"start":2200,"end":2500,"g":2}],
//!  "reference":"optional reference translation",
//!  "spans":[{"kind":"decode","start":1300,"end":1500}],
//!  "meta":{"system":"wait-3"}}
//! ```
//!
//! `g` counts listed source items. Times are milliseconds and required on
//! `ca`/`nca` timelines; on `steps` timelines they may be omitted and are
//! rebuilt from `g`.
//!
//! Alignment record, one per line:
//!
//! ```json
//! {"id":"talk1-s3","links":[{"src":1,"tgt":2,"src_start":120,"tgt_start":2300,"verified":true}]}
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evs::AlignedPair;
use crate::trace::{ComputationSpan, Modality, SessionTrace, TimedToken, TimelineKind};

/// Serializes integral millisecond values as JSON integers.
pub(crate) mod ms {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            s.serialize_i64(*v as i64)
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn serialize_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceItem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ms::serialize_opt"
    )]
    pub start: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ms::serialize_opt"
    )]
    pub end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetItem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ms::serialize_opt"
    )]
    pub start: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ms::serialize_opt"
    )]
    pub end: Option<f64>,
    pub g: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub id: String,
    pub modality: Modality,
    pub timeline: TimelineKind,
    pub source: Vec<SourceItem>,
    pub target: Vec<TargetItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<Vec<ComputationSpan>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl TraceRecord {
    pub fn from_session(s: &SessionTrace) -> Self {
        let timed = s.timeline().is_timed();
        let time = |v: f64| timed.then_some(v);
        TraceRecord {
            id: s.id().to_string(),
            modality: s.modality(),
            timeline: s.timeline(),
            source: s
                .source()
                .iter()
                .map(|t| SourceItem {
                    text: t.text.clone(),
                    start: time(t.start),
                    end: time(t.end),
                })
                .collect(),
            target: s
                .target()
                .iter()
                .zip(s.reads())
                .map(|(t, &g)| TargetItem {
                    text: t.text.clone(),
                    start: time(t.start),
                    end: time(t.end),
                    g,
                })
                .collect(),
            reference: s.reference().map(|r| r.join(" ")),
            spans: s.spans().map(<[_]>::to_vec),
            meta: s.meta().cloned(),
        }
    }

    pub fn into_session(self) -> Result<SessionTrace> {
        let reads: Vec<usize> = self.target.iter().map(|t| t.g).collect();
        let mut session = if self.timeline.is_timed() {
            let times =
                |side: &str, i: usize, start: Option<f64>, end: Option<f64>| match (start, end) {
                    (Some(s), Some(e)) => Ok((s, e)),
                    _ => Err(Error::InvalidTrace(format!(
                        "{}: {side} item {} needs start and end on a {} timeline",
                        self.id,
                        i + 1,
                        self.timeline
                    ))),
                };
            let mut source = Vec::with_capacity(self.source.len());
            for (i, item) in self.source.iter().enumerate() {
                let (s, e) = times("source", i, item.start, item.end)?;
                source.push(TimedToken {
                    index: i + 1,
                    text: item.text.clone(),
                    start: s,
                    end: e,
                });
            }
            let mut target = Vec::with_capacity(self.target.len());
            for (i, item) in self.target.iter().enumerate() {
                let (s, e) = times("target", i, item.start, item.end)?;
                target.push(TimedToken {
                    index: i + 1,
                    text: item.text.clone(),
                    start: s,
                    end: e,
                });
            }
            SessionTrace::new(
                self.id.clone(),
                self.modality,
                self.timeline,
                source,
                target,
                reads,
            )?
        } else {
            let s =
                SessionTrace::unit_step(self.id.clone(), self.modality, self.source.len(), reads)
                    .map_err(|e| Error::InvalidTrace(format!("{}: {e}", self.id)))?;
            let source: Vec<TimedToken> = s
                .source()
                .iter()
                .zip(&self.source)
                .map(|(t, item)| TimedToken {
                    text: item.text.clone(),
                    ..t.clone()
                })
                .collect();
            let target: Vec<TimedToken> = s
                .target()
                .iter()
                .zip(&self.target)
                .map(|(t, item)| TimedToken {
                    text: item.text.clone(),
                    ..t.clone()
                })
                .collect();
            SessionTrace::new(
                s.id(),
                s.modality(),
                s.timeline(),
                source,
                target,
                s.reads().to_vec(),
            )?
        };
        if let Some(reference) = self.reference {
            session = session.with_reference(reference.split_whitespace());
        }
        if let Some(spans) = self.spans {
            session = session.with_spans(spans).validated()?;
        }
        if let Some(meta) = self.meta {
            session = session.with_meta(meta);
        }
        Ok(session)
    }
}

fn parse_lines<T, R, F>(reader: R, mut convert: F) -> Result<Vec<T>>
where
    R: BufRead,
    F: FnMut(&str) -> Result<T>,
{
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = convert(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn read_traces<R: BufRead>(reader: R) -> Result<Vec<SessionTrace>> {
    parse_lines(reader, |line| {
        let record: TraceRecord = serde_json::from_str(line)?;
        record.into_session()
    })
}

pub fn read_trace_file(path: impl AsRef<Path>) -> Result<Vec<SessionTrace>> {
    read_traces(BufReader::new(File::open(path)?))
}

pub fn write_traces<W: Write>(mut writer: W, sessions: &[SessionTrace]) -> Result<()> {
    for s in sessions {
        serde_json::to_writer(&mut writer, &TraceRecord::from_session(s))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentRecord {
    pub id: String,
    pub links: Vec<AlignedPair>,
}

impl AlignmentRecord {
    fn validate(&self) -> Result<()> {
        for (i, p) in self.links.iter().enumerate() {
            if p.src_index == 0 || p.tgt_index == 0 {
                return Err(Error::InvalidTrace(format!(
                    "{}: link {} has a zero word index (indices are 1-based)",
                    self.id,
                    i + 1
                )));
            }
            if !(p.src_start >= 0.0 && p.tgt_start >= 0.0)
                || !p.src_start.is_finite()
                || !p.tgt_start.is_finite()
            {
                return Err(Error::InvalidTrace(format!(
                    "{}: link {} has a negative or non-finite start time",
                    self.id,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

pub fn read_alignments<R: BufRead>(reader: R) -> Result<Vec<AlignmentRecord>> {
    parse_lines(reader, |line| {
        let record: AlignmentRecord = serde_json::from_str(line)?;
        record.validate()?;
        Ok(record)
    })
}

pub fn read_alignment_file(path: impl AsRef<Path>) -> Result<Vec<AlignmentRecord>> {
    read_alignments(BufReader::new(File::open(path)?))
}

pub fn write_alignments<W: Write>(mut writer: W, records: &[AlignmentRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
