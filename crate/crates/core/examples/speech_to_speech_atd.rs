//! Speech-to-speech session measured on the wall clock (CA) and with
//! computation time removed (NCA), plus Start/End Offset.

use simul_latency::report::{prepare_session, EvalOptions};
use simul_latency::trace::{ComputationSpan, SpanKind};
use simul_latency::{
    atd_timed, build_nca_timeline, end_offset, start_offset, Modality, SessionTrace, TimedToken,
    TimelineKind,
};

fn main() -> simul_latency::Result<()> {
    // Two source speech segments and two synthesized output segments, in ms.
    let ca = SessionTrace::new(
        "talk1-s3",
        Modality::SpeechToSpeech,
        TimelineKind::ComputationAware,
        vec![
            TimedToken::new(1, 0.0, 750.0),
            TimedToken::new(2, 1000.0, 1900.0),
        ],
        vec![
            TimedToken::new(1, 1400.0, 2000.0),
            TimedToken::new(2, 2700.0, 3300.0),
        ],
        vec![1, 2],
    )?
    .with_spans(vec![
        ComputationSpan::new(SpanKind::Asr, 750.0, 1100.0),
        ComputationSpan::new(SpanKind::Decode, 1900.0, 2500.0),
    ]);
    let nca = build_nca_timeline(&ca)?;

    let opts = EvalOptions::default();
    for s in [&ca, &nca] {
        let (sub, _) = prepare_session(s, &opts)?;
        println!(
            "{:<4} ATD {:>7.1} ms  start offset {:>7.1} ms  end offset {:>7.1} ms  ({} source / {} target sub-segments)",
            s.timeline().as_str(),
            atd_timed(&sub)?,
            start_offset(&sub)?,
            end_offset(&sub)?,
            sub.source().len(),
            sub.target().len()
        );
    }
    for (a, b) in ca.target().iter().zip(nca.target()) {
        println!(
            "output {}: {:.0}..{:.0} -> {:.0}..{:.0}",
            a.index, a.start, a.end, b.start, b.end
        );
    }
    Ok(())
}
