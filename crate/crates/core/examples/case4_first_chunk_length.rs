//! Two 10-token input chunks; the first output chunk has L1 tokens, the
//! second 10. ATD bottoms out when L1 matches the input chunk, AL keeps
//! rewarding longer first outputs.

use simul_latency::sim::gen_case4;
use simul_latency::Metric;

fn main() -> simul_latency::Result<()> {
    println!("{:>3} {:>8} {:>8} {:>8}", "L1", "AL", "DAL", "ATD");
    for l1 in 1..=20 {
        let s = gen_case4(l1)?;
        println!(
            "{l1:>3} {:>8.3} {:>8.3} {:>8.3}",
            Metric::Al.evaluate(&s)?,
            Metric::Dal.evaluate(&s)?,
            Metric::Atd.evaluate(&s)?
        );
    }
    Ok(())
}
