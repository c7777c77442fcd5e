//! A short first output (case 1) vs a long one (case 2) for the same input.

use simul_latency::evs::{mean_evs, EvsMode};
use simul_latency::sim::fixtures;
use simul_latency::Metric;

fn main() -> simul_latency::Result<()> {
    println!(
        "{:<6} {:>6} {:>6} {:>6} {:>8}",
        "", "AL", "DAL", "ATD", "EVS (s)"
    );
    for case in [1, 2] {
        let s = fixtures::trace(case);
        let evs =
            mean_evs(&fixtures::case_alignments(case), EvsMode::VerifiedOnly).unwrap_or(f64::NAN);
        println!(
            "case {case} {:>6.2} {:>6.2} {:>6.2} {:>8.1}",
            Metric::Al.evaluate(&s)?,
            Metric::Dal.evaluate(&s)?,
            Metric::Atd.evaluate(&s)?,
            evs / fixtures::STEP_MS
        );
    }
    println!(
        "reads: {:?} / {:?}",
        fixtures::trace(1).reads(),
        fixtures::trace(2).reads()
    );
    Ok(())
}
