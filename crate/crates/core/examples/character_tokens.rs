//! Scoring text output in characters or character groups instead of words.

use simul_latency::report::{prepare_session, EvalOptions};
use simul_latency::{Metric, Modality, SessionTrace, TimedToken, TimelineKind, TokenGranularity};

fn main() -> simul_latency::Result<()> {
    let step = |i: usize, s: f64, text: &str| TimedToken::new(i, s, s + 1.0).with_text(text);
    let s = SessionTrace::new(
        "zh-1",
        Modality::TextToText,
        TimelineKind::NonComputationAware,
        vec![
            step(1, 0.0, "good"),
            step(2, 1.0, "morning"),
            step(3, 2.0, "everyone"),
        ],
        vec![step(1, 2.0, "早上好"), step(2, 3.0, "大家")],
        vec![2, 3],
    )?;
    for gran in ["word", "char:1", "char:2", "char:3"] {
        let opts = EvalOptions {
            granularity: gran.parse::<TokenGranularity>()?,
            ..Default::default()
        };
        let (p, _) = prepare_session(&s, &opts)?;
        let texts: Vec<&str> = p
            .target()
            .iter()
            .filter_map(|t| t.text.as_deref())
            .collect();
        println!(
            "{gran:<7} {:>2} tokens  ATD {:>5.2}  AL {:>5.2}  {texts:?}",
            p.target().len(),
            Metric::Atd.evaluate(&p)?,
            Metric::Al.evaluate(&p)?
        );
    }
    Ok(())
}
