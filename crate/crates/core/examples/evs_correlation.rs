//! Correlating per-sentence latency metrics with mean EVS.
//!
//! Synthetic sentences: a hidden delay drives both the EVS and the output
//! timing. ATD follows the delay through the whole sentence, Start Offset
//! only sees the first output token.

use simul_latency::evs::{mean_evs, AlignedPair, EvsMode};
use simul_latency::{
    atd_timed, spearman_pairwise, start_offset, Modality, SessionTrace, TimedToken, TimelineKind,
};

fn main() -> simul_latency::Result<()> {
    let mut atd = Vec::new();
    let mut start = Vec::new();
    let mut evs = Vec::new();
    for i in 0..12u32 {
        let lag = 500.0 + 173.0 * ((i * 7) % 12) as f64;
        let first = 600.0 + 211.0 * ((i * 5) % 12) as f64;
        let src: Vec<TimedToken> = (0..6)
            .map(|j| TimedToken::new(j + 1, j as f64 * 300.0, (j + 1) as f64 * 300.0))
            .collect();
        let tgt: Vec<TimedToken> = (0..6)
            .map(|t| {
                let s = if t == 0 {
                    first
                } else {
                    t as f64 * 300.0 + lag
                };
                TimedToken::new(
                    t + 1,
                    s.max(t as f64 * 300.0 + 300.0),
                    s.max(t as f64 * 300.0 + 300.0) + 250.0,
                )
            })
            .scan(0.0f64, |prev, mut tok| {
                let shift = (*prev - tok.start).max(0.0);
                tok.start += shift;
                tok.end += shift;
                *prev = tok.end;
                Some(tok)
            })
            .collect();
        let links: Vec<AlignedPair> = (1..6)
            .map(|k| AlignedPair::new(k + 1, k + 1, src[k].start, tgt[k].start, i % 5 != 4))
            .collect();
        let s = SessionTrace::new(
            format!("s{i}"),
            Modality::TextToText,
            TimelineKind::NonComputationAware,
            src,
            tgt,
            (1..=6).collect(),
        )?;
        atd.push(Some(atd_timed(&s)?));
        start.push(Some(start_offset(&s)?));
        evs.push(mean_evs(&links, EvsMode::VerifiedOnly));
    }
    for (name, col) in [("ATD", &atd), ("Start Offset", &start)] {
        let c = spearman_pairwise(col, &evs)?;
        println!(
            "{name:<13} rho {:>6.3}  p {:.4}  n {}",
            c.rho, c.p_value, c.n
        );
    }
    Ok(())
}
