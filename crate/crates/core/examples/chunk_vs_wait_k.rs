//! AL, DAL and ATD for wait-k and chunk-k schedules, k = 1..20.

use simul_latency::sim::{gen_chunk_k, gen_wait_k};
use simul_latency::Metric;

fn main() -> simul_latency::Result<()> {
    println!(
        "{:>3} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "k", "AL wk", "AL ck", "DAL wk", "DAL ck", "ATD wk", "ATD ck"
    );
    for k in 1..=20 {
        let w = gen_wait_k(k, 20, 20)?;
        let c = gen_chunk_k(k, 20, 20)?;
        let mut row = format!("{k:>3}");
        for m in [Metric::Al, Metric::Dal, Metric::Atd] {
            row += &format!(" {:>8.2} {:>8.2}", m.evaluate(&w)?, m.evaluate(&c)?);
        }
        println!("{row}");
    }
    Ok(())
}
