//! Joining two sentences into one unit. Start Offset then only sees the
//! first sentence, while ATD reflects delay carried into the second.

use simul_latency::{
    atd_timed, concat_sessions, start_offset, Modality, SessionTrace, TimeBase, TimedToken,
    TimelineKind,
};

fn sentence(id: &str, first_output_at: f64) -> simul_latency::Result<SessionTrace> {
    let src = (0..4)
        .map(|j| TimedToken::new(j + 1, j as f64 * 400.0, (j + 1) as f64 * 400.0))
        .collect();
    let tgt = (0..4)
        .map(|t| {
            let s = first_output_at + t as f64 * 400.0;
            TimedToken::new(t + 1, s, s + 400.0)
        })
        .collect();
    SessionTrace::new(
        id,
        Modality::TextToText,
        TimelineKind::NonComputationAware,
        src,
        tgt,
        vec![1, 2, 3, 4],
    )
}

fn main() -> simul_latency::Result<()> {
    let prompt = sentence("s1", 400.0)?;
    let slow = sentence("s2", 2000.0)?;
    for (name, s) in [("s1", prompt.clone()), ("s2", slow.clone())] {
        println!(
            "{name:<6} ATD {:>7.1}  start offset {:>7.1}",
            atd_timed(&s)?,
            start_offset(&s)?
        );
    }
    let joined = concat_sessions(&prompt, &slow, TimeBase::Relative)?;
    println!(
        "{:<6} ATD {:>7.1}  start offset {:>7.1}  ({} source, {} target tokens, reads {:?})",
        joined.id(),
        atd_timed(&joined)?,
        start_offset(&joined)?,
        joined.source().len(),
        joined.target().len(),
        joined.reads()
    );
    Ok(())
}
