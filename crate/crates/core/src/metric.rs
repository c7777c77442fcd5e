use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::step::{self, RatioMode, StepMetricInput};
use crate::timed;
use crate::trace::SessionTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    Al,
    AlRef,
    Laal,
    Dal,
    Ap,
    Cw,
    /// Timed on ca/nca traces, step-based on unit-step traces.
    Atd,
    StartOffset,
    EndOffset,
}

/// What a metric value is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    /// Source tokens or steps.
    Tokens,
    Ratio,
    Milliseconds,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Al,
        Metric::AlRef,
        Metric::Laal,
        Metric::Dal,
        Metric::Ap,
        Metric::Cw,
        Metric::Atd,
        Metric::StartOffset,
        Metric::EndOffset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Al => "al",
            Metric::AlRef => "al-ref",
            Metric::Laal => "laal",
            Metric::Dal => "dal",
            Metric::Ap => "ap",
            Metric::Cw => "cw",
            Metric::Atd => "atd",
            Metric::StartOffset => "start-offset",
            Metric::EndOffset => "end-offset",
        }
    }

    pub fn unit(self, session: &SessionTrace) -> Unit {
        match self {
            Metric::Ap => Unit::Ratio,
            Metric::StartOffset | Metric::EndOffset => Unit::Milliseconds,
            Metric::Atd if session.timeline().is_timed() => Unit::Milliseconds,
            _ => Unit::Tokens,
        }
    }

    pub fn evaluate(self, session: &SessionTrace) -> Result<f64> {
        let steps = || StepMetricInput::from_session(session);
        match self {
            Metric::Al => step::average_lagging(&steps()?, RatioMode::Hypothesis),
            Metric::AlRef => step::average_lagging(&steps()?, RatioMode::Reference),
            Metric::Laal => step::average_lagging(&steps()?, RatioMode::LengthAdaptive),
            Metric::Dal => step::differentiable_average_lagging(&steps()?),
            Metric::Ap => step::average_proportion(&steps()?),
            Metric::Cw => step::consecutive_wait(&steps()?),
            Metric::Atd if session.timeline().is_timed() => timed::atd_timed(session),
            Metric::Atd => step::atd_steps(&steps()?),
            Metric::StartOffset => timed::start_offset(session),
            Metric::EndOffset => timed::end_offset(session),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown metric `{s}`")))
    }
}

/// Parses a comma-separated metric list; `all` selects every metric.
pub fn parse_metric_list(s: &str) -> Result<Vec<Metric>> {
    if s.trim() == "all" {
        return Ok(Metric::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Metric = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no metrics selected".into()));
    }
    Ok(out)
}
