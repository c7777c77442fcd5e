//! Corpus evaluation and report files.
//!
//! Metric reports are wide CSV: an `id` column, one column per metric, one
//! row per session, and a final [`CORPUS_ROW_ID`] row holding the
//! unweighted mean of each column over the sessions where it is defined.
//! Absent values are empty cells.

use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::evs::SentenceEvs;
use crate::io::AlignmentRecord;
use crate::metric::{Metric, Unit};
use crate::sim::CurveRow;
use crate::timed::build_nca_timeline;
use crate::trace::{SessionTrace, SubSegmentConfig, TimelineKind, TokenGranularity, TokenUnit};

pub const CORPUS_ROW_ID: &str = "__corpus__";

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub metrics: Vec<Metric>,
    pub subsegment: SubSegmentConfig,
    pub granularity: TokenGranularity,
    /// Timeline to score on; `None` keeps each record's own.
    pub timeline: Option<TimelineKind>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            metrics: vec![Metric::Al, Metric::Dal, Metric::Atd],
            subsegment: SubSegmentConfig::default(),
            granularity: TokenGranularity::word(),
            timeline: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub value: f64,
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRow {
    pub id: String,
    pub scores: Vec<Option<Score>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub metrics: Vec<Metric>,
    pub rows: Vec<SessionRow>,
    pub corpus: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

/// Puts a session on the requested timeline and token granularity.
/// Returns the prepared session and any warnings about it.
pub fn prepare_session(
    s: &SessionTrace,
    opts: &EvalOptions,
) -> Result<(SessionTrace, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut s = match (opts.timeline, s.timeline()) {
        (None, _) | (Some(TimelineKind::UnitStep), _) => s.clone(),
        (Some(want), have) if want == have => s.clone(),
        (Some(TimelineKind::NonComputationAware), TimelineKind::ComputationAware) => {
            build_nca_timeline(s)?
        }
        (Some(want), have) => {
            return Err(Error::Config(format!(
                "cannot score a {have} trace on the {want} timeline"
            )))
        }
    };
    if s.timeline() == TimelineKind::ComputationAware {
        let early = s.pipelined_targets();
        if !early.is_empty() {
            warnings.push(format!(
                "{}: {} target token(s) start before their triggering source token ends",
                s.id(),
                early.len()
            ));
        }
    }
    if s.timeline().is_timed() {
        s = s.subsegmented(opts.subsegment)?;
    }
    if opts.granularity.unit != TokenUnit::Word {
        if s.modality().speech_target() {
            warnings.push(format!(
                "{}: {} granularity ignored for speech output",
                s.id(),
                opts.granularity
            ));
        } else {
            s = s.with_granularity(opts.granularity)?;
        }
    }
    if opts.timeline == Some(TimelineKind::UnitStep) && s.timeline().is_timed() {
        s = s.to_unit_steps()?;
    }
    Ok((s, warnings))
}

fn score_session(s: &SessionTrace, opts: &EvalOptions) -> (SessionRow, Vec<String>) {
    let (prepared, mut warnings) = match prepare_session(s, opts) {
        Ok(p) => p,
        Err(e) => {
            let row = SessionRow {
                id: s.id().to_string(),
                scores: vec![None; opts.metrics.len()],
            };
            return (row, vec![format!("{}: skipped: {e}", s.id())]);
        }
    };
    let scores = opts
        .metrics
        .iter()
        .map(|&m| match m.evaluate(&prepared) {
            Ok(value) => Some(Score {
                value,
                unit: m.unit(&prepared),
            }),
            Err(e) => {
                warnings.push(format!("{}: {m}: {e}", s.id()));
                None
            }
        })
        .collect();
    (
        SessionRow {
            id: s.id().to_string(),
            scores,
        },
        warnings,
    )
}

/// Scores every session. Sessions are scored in parallel; rows and warnings
/// keep input order.
pub fn evaluate(sessions: &[SessionTrace], opts: &EvalOptions) -> Result<EvalReport> {
    if sessions.is_empty() {
        return Err(Error::NoSessions);
    }
    if opts.metrics.is_empty() {
        return Err(Error::Config("no metrics selected".into()));
    }
    let scored: Vec<(SessionRow, Vec<String>)> = sessions
        .par_iter()
        .map(|s| score_session(s, opts))
        .collect();
    let mut rows = Vec::with_capacity(scored.len());
    let mut warnings = Vec::new();
    for (row, w) in scored {
        rows.push(row);
        warnings.extend(w);
    }
    let corpus = (0..opts.metrics.len())
        .map(|i| mean_present(rows.iter().map(|r| r.scores[i].map(|s| s.value))))
        .collect();
    Ok(EvalReport {
        metrics: opts.metrics.clone(),
        rows,
        corpus,
        warnings,
    })
}

fn mean_present(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Milliseconds to one decimal, everything else to at most four.
pub fn format_value(value: f64, unit: Unit) -> String {
    match unit {
        Unit::Milliseconds => format!("{value:.1}"),
        _ => {
            let s = format!("{value:.4}");
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s == "-0" {
                "0".to_string()
            } else {
                s.to_string()
            }
        }
    }
}

impl EvalReport {
    pub fn column(&self, metric: Metric) -> Option<Vec<Option<f64>>> {
        let i = self.metrics.iter().position(|&m| m == metric)?;
        Some(
            self.rows
                .iter()
                .map(|r| r.scores[i].map(|s| s.value))
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string()];
        header.extend(self.metrics.iter().map(|m| m.name().to_string()));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.id.clone()];
            rec.extend(
                row.scores
                    .iter()
                    .map(|s| s.map_or_else(String::new, |s| format_value(s.value, s.unit))),
            );
            w.write_record(&rec)?;
        }
        let mut rec = vec![CORPUS_ROW_ID.to_string()];
        for (i, mean) in self.corpus.iter().enumerate() {
            let unit = self
                .rows
                .iter()
                .find_map(|r| r.scores[i].map(|s| s.unit))
                .unwrap_or(Unit::Tokens);
            rec.push(mean.map_or_else(String::new, |v| format_value(v, unit)));
        }
        w.write_record(&rec)?;
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let sessions: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                obj.insert("id".into(), json!(row.id));
                for (m, s) in self.metrics.iter().zip(&row.scores) {
                    obj.insert(m.name().into(), s.map_or(Value::Null, |s| json!(s.value)));
                }
                Value::Object(obj)
            })
            .collect();
        let mut corpus = Map::new();
        let mut counts = Map::new();
        for (i, (m, v)) in self.metrics.iter().zip(&self.corpus).enumerate() {
            corpus.insert(m.name().into(), v.map_or(Value::Null, |v| json!(v)));
            let n = self.rows.iter().filter(|r| r.scores[i].is_some()).count();
            counts.insert(m.name().into(), json!(n));
        }
        json!({
            "metrics": self.metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "sessions": sessions,
            "corpus": corpus,
            "counts": counts,
            "warnings": self.warnings,
        })
    }
}

pub fn write_curve_csv<W: Write>(writer: W, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["strategy", "parameter", "metric", "value"])?;
    for r in rows {
        w.write_record([
            r.strategy.to_string(),
            r.parameter.to_string(),
            r.metric.to_string(),
            format_value(r.value, Unit::Tokens),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Which EVS columns to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvsColumns {
    Verified,
    Automatic,
    Both,
}

impl std::str::FromStr for EvsColumns {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verified" | "verified-only" => Ok(EvsColumns::Verified),
            "automatic" | "auto" => Ok(EvsColumns::Automatic),
            "both" => Ok(EvsColumns::Both),
            other => Err(Error::Config(format!("unknown EVS mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvsReport {
    pub rows: Vec<SentenceEvs>,
}

impl EvsReport {
    pub fn from_records(records: &[AlignmentRecord]) -> Self {
        Self {
            rows: records
                .iter()
                .map(|r| SentenceEvs::compute(r.id.clone(), &r.links))
                .collect(),
        }
    }

    pub fn corpus_mean_evs(&self) -> Option<f64> {
        mean_present(self.rows.iter().map(|r| r.mean_evs))
    }

    pub fn corpus_mean_auto_evs(&self) -> Option<f64> {
        mean_present(self.rows.iter().map(|r| r.mean_auto_evs))
    }

    pub fn write_csv<W: Write>(&self, writer: W, columns: EvsColumns) -> Result<()> {
        let verified = columns != EvsColumns::Automatic;
        let automatic = columns != EvsColumns::Verified;
        let cell =
            |v: Option<f64>| v.map_or_else(String::new, |v| format_value(v, Unit::Milliseconds));
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id"];
        if verified {
            header.push("mean_evs");
        }
        if automatic {
            header.push("mean_auto_evs");
        }
        header.extend(["links", "verified", "duplicates"]);
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.id.clone()];
            if verified {
                rec.push(cell(r.mean_evs));
            }
            if automatic {
                rec.push(cell(r.mean_auto_evs));
            }
            rec.extend([
                r.links.to_string(),
                r.verified.to_string(),
                r.duplicates.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        let mut rec = vec![CORPUS_ROW_ID.to_string()];
        if verified {
            rec.push(cell(self.corpus_mean_evs()));
        }
        if automatic {
            rec.push(cell(self.corpus_mean_auto_evs()));
        }
        let total =
            |f: fn(&SentenceEvs) -> usize| self.rows.iter().map(f).sum::<usize>().to_string();
        rec.extend([
            total(|r| r.links),
            total(|r| r.verified),
            total(|r| r.duplicates),
        ]);
        w.write_record(&rec)?;
        w.flush()?;
        Ok(())
    }
}

/// A report CSV loaded for correlation: ids in file order plus numeric
/// columns. The corpus row is dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportTable {
    pub ids: Vec<String>,
    pub columns: HashMap<String, Vec<Option<f64>>>,
}

impl ReportTable {
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        let id_col = headers
            .iter()
            .position(|h| h == "id")
            .ok_or_else(|| Error::Config("report has no `id` column".into()))?;
        let mut table = ReportTable::default();
        let names: Vec<String> = headers.iter().map(str::to_string).collect();
        for name in names.iter().filter(|n| n.as_str() != "id") {
            table.columns.insert(name.clone(), Vec::new());
        }
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let id = rec.get(id_col).unwrap_or_default();
            if id == CORPUS_ROW_ID {
                continue;
            }
            table.ids.push(id.to_string());
            for (j, name) in names.iter().enumerate() {
                if j == id_col {
                    continue;
                }
                let cell = rec.get(j).unwrap_or("").trim();
                let value = match cell {
                    "" | "NA" | "nan" | "NaN" | "null" => None,
                    v => Some(v.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 2,
                        message: format!("column `{name}`: `{v}` is not a number"),
                    })?),
                };
                table
                    .columns
                    .get_mut(name)
                    .expect("column registered")
                    .push(value);
            }
        }
        Ok(table)
    }

    pub fn column(&self, name: &str) -> Result<&[Option<f64>]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Config(format!("report has no column `{name}`")))
    }

    /// Inner join on `id`, in this table's row order. Column names from
    /// `other` that clash are suffixed with `_right`.
    pub fn join(&self, other: &ReportTable) -> ReportTable {
        let index: HashMap<&str, usize> = other
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let pairs: Vec<(usize, usize)> = self
            .ids
            .iter()
            .enumerate()
            .filter_map(|(i, id)| index.get(id.as_str()).map(|&j| (i, j)))
            .collect();
        let mut out = ReportTable {
            ids: pairs.iter().map(|&(i, _)| self.ids[i].clone()).collect(),
            columns: HashMap::new(),
        };
        for (name, col) in &self.columns {
            out.columns
                .insert(name.clone(), pairs.iter().map(|&(i, _)| col[i]).collect());
        }
        for (name, col) in &other.columns {
            let key = if out.columns.contains_key(name) {
                format!("{name}_right")
            } else {
                name.clone()
            };
            out.columns
                .insert(key, pairs.iter().map(|&(_, j)| col[j]).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim;
    use crate::trace::{Modality, TimedToken};

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            evaluate(&[], &EvalOptions::default()),
            Err(Error::NoSessions)
        ));
    }

    #[test]
    fn corpus_row_is_mean_of_present_values() {
        let sessions = vec![
            sim::gen_wait_k(2, 10, 10).unwrap(),
            sim::gen_wait_k(4, 10, 10).unwrap(),
        ];
        let opts = EvalOptions {
            metrics: vec![Metric::Al, Metric::StartOffset],
            ..Default::default()
        };
        let rep = evaluate(&sessions, &opts).unwrap();
        assert_eq!(rep.corpus[0], Some(3.0));
        assert_eq!(rep.corpus[1], None);
        assert_eq!(rep.warnings.len(), 2);
    }

    #[test]
    fn csv_layout() {
        let sessions = vec![sim::gen_chunk_k(19, 20, 20).unwrap()];
        let rep = evaluate(&sessions, &EvalOptions::default()).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "id,al,dal,atd");
        assert_eq!(lines[1], "chunk-k/k=19,9.55,19,19");
        assert!(lines[2].starts_with(CORPUS_ROW_ID));
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(1234.56, Unit::Milliseconds), "1234.6");
        assert_eq!(format_value(9.55, Unit::Tokens), "9.55");
        assert_eq!(format_value(20.0, Unit::Tokens), "20");
        assert_eq!(format_value(-0.00001, Unit::Tokens), "0");
    }

    #[test]
    fn steps_timeline_conversion() {
        let s = SessionTrace::new(
            "t",
            Modality::TextToText,
            TimelineKind::ComputationAware,
            vec![
                TimedToken::new(1, 0.0, 100.0),
                TimedToken::new(2, 100.0, 200.0),
            ],
            vec![
                TimedToken::new(1, 300.0, 300.0),
                TimedToken::new(2, 400.0, 400.0),
            ],
            vec![1, 2],
        )
        .unwrap();
        let opts = EvalOptions {
            timeline: Some(TimelineKind::UnitStep),
            metrics: vec![Metric::Atd],
            ..Default::default()
        };
        let (p, _) = prepare_session(&s, &opts).unwrap();
        assert_eq!(p.timeline(), TimelineKind::UnitStep);
        let rep = evaluate(std::slice::from_ref(&s), &opts).unwrap();
        assert_eq!(rep.rows[0].scores[0].unwrap().value, 1.0);

        let ca_on_steps = EvalOptions {
            timeline: Some(TimelineKind::ComputationAware),
            ..Default::default()
        };
        let steps = sim::gen_wait_k(1, 3, 3).unwrap();
        assert!(prepare_session(&steps, &ca_on_steps).is_err());
    }

    #[test]
    fn report_table_join() {
        let a = "id,atd\ns1,1.5\ns2,\ns3,2\n__corpus__,1.75\n";
        let b = "id,mean_evs\ns3,10\ns1,20\n";
        let ta = ReportTable::read_csv(a.as_bytes()).unwrap();
        let tb = ReportTable::read_csv(b.as_bytes()).unwrap();
        assert_eq!(ta.ids.len(), 3);
        assert_eq!(ta.column("atd").unwrap()[1], None);
        let j = ta.join(&tb);
        assert_eq!(j.ids, vec!["s1", "s3"]);
        assert_eq!(j.column("mean_evs").unwrap(), &[Some(20.0), Some(10.0)]);
        assert!(ReportTable::read_csv("id,x\na,zz\n".as_bytes()).is_err());
    }
}
