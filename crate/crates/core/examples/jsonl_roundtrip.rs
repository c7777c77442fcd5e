//! Writing simulated traces as JSON lines, reading them back and scoring
//! the corpus.

use simul_latency::io::{read_traces, write_traces};
use simul_latency::report::{evaluate, EvalOptions};
use simul_latency::sim::Strategy;

fn main() -> simul_latency::Result<()> {
    let sessions = (1..=5)
        .map(|k| {
            Strategy::WaitK
                .generate(k, 8, 8)
                .map(|s| s.with_reference_len(9))
        })
        .collect::<simul_latency::Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_traces(&mut buf, &sessions)?;
    println!(
        "{}",
        String::from_utf8_lossy(&buf)
            .lines()
            .next()
            .unwrap_or_default()
    );

    let back = read_traces(buf.as_slice())?;
    assert_eq!(back, sessions);
    let opts = EvalOptions {
        metrics: simul_latency::metric::parse_metric_list("al,laal,dal,ap,cw,atd")?,
        ..Default::default()
    };
    let report = evaluate(&back, &opts)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.write_csv(std::io::stdout())?;
    Ok(())
}
