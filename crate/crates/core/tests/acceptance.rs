//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use simul_latency::evs::{mean_evs, EvsMode};
use simul_latency::io::{read_traces, write_traces};
use simul_latency::report::{evaluate, EvalOptions};
use simul_latency::sim::{self, fixtures};
use simul_latency::step::{self, token_correspondence, RatioMode, StepMetricInput};
use simul_latency::{
    atd_timed, spearman, spearman_pairwise, Metric, Modality, SessionTrace, TimedToken,
    TimelineKind,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn metric(m: Metric, s: &SessionTrace) -> f64 {
    m.evaluate(s)
        .unwrap_or_else(|e| panic!("{m} on {}: {e}", s.id()))
}

fn criterion_1() -> Check {
    let started = Instant::now();
    let sessions = vec![
        sim::gen_chunk_k(19, 20, 20).map_err(|e| e.to_string())?,
        sim::gen_chunk_k(20, 20, 20).map_err(|e| e.to_string())?,
    ];
    // Through the file format, as `eval` would see them.
    let mut buf = Vec::new();
    write_traces(&mut buf, &sessions).map_err(|e| e.to_string())?;
    let parsed = read_traces(buf.as_slice()).map_err(|e| e.to_string())?;
    let opts = EvalOptions {
        metrics: vec![Metric::Al],
        ..Default::default()
    };
    let rep = evaluate(&parsed, &opts).map_err(|e| e.to_string())?;
    let al = rep.column(Metric::Al).unwrap();
    let elapsed = started.elapsed();
    ensure(al[0] == Some(9.55), || {
        format!("AL(chunk-19) = {:?}, want 9.55", al[0])
    })?;
    ensure(al[1] == Some(20.0), || {
        format!("AL(chunk-20) = {:?}, want 20", al[1])
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })
}

fn criterion_2() -> Check {
    for k in 1..=19 {
        let s = sim::gen_wait_k(k, 20, 20).map_err(|e| e.to_string())?;
        for m in [Metric::Al, Metric::Dal, Metric::Atd] {
            let v = metric(m, &s);
            ensure(close(v, k as f64, 1e-9), || format!("{m}(wait-{k}) = {v}"))?;
        }
    }
    Ok(())
}

fn criterion_3() -> Check {
    let mut al_gap = false;
    for k in 1..=20 {
        let w = sim::gen_wait_k(k, 20, 20).map_err(|e| e.to_string())?;
        let c = sim::gen_chunk_k(k, 20, 20).map_err(|e| e.to_string())?;
        for m in [Metric::Atd, Metric::Dal] {
            let (vw, vc) = (metric(m, &w), metric(m, &c));
            ensure(close(vw, vc, 1e-9), || {
                format!("k={k}: {m} wait-k {vw} vs chunk-k {vc}")
            })?;
        }
        al_gap |= !close(metric(Metric::Al, &w), metric(Metric::Al, &c), 1e-9);
    }
    ensure(al_gap, || "AL agrees for every k".into())
}

fn criterion_4() -> Check {
    let started = Instant::now();
    let mut atd = vec![0.0];
    let mut al = vec![0.0];
    let mut dal = vec![0.0];
    for l1 in 1..=20 {
        let s = sim::gen_case4(l1).map_err(|e| e.to_string())?;
        atd.push(metric(Metric::Atd, &s));
        al.push(metric(Metric::Al, &s));
        dal.push(metric(Metric::Dal, &s));
    }
    let elapsed = started.elapsed();
    for l in 2..=9 {
        ensure(atd[l] < atd[l - 1], || {
            format!("ATD not decreasing at L1={l}: {:?}", &atd[1..])
        })?;
    }
    for l in 12..=20 {
        ensure(atd[l] > atd[l - 1], || {
            format!("ATD not increasing at L1={l}: {:?}", &atd[1..])
        })?;
    }
    for l in 2..=20 {
        ensure(al[l] <= al[l - 1] + 1e-12, || {
            format!("AL increases at L1={l}: {:?}", &al[1..])
        })?;
        ensure(dal[l] <= dal[l - 1] + 1e-12, || {
            format!("DAL increases at L1={l}: {:?}", &dal[1..])
        })?;
    }
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })
}

fn criterion_5() -> Check {
    let (c1, c2) = (fixtures::trace(1), fixtures::trace(2));
    let row = |s: &SessionTrace| {
        [
            metric(Metric::Al, s),
            metric(Metric::Dal, s),
            metric(Metric::Atd, s),
        ]
    };
    let (r1, r2) = (row(&c1), row(&c2));
    let evs1 = mean_evs(&fixtures::case_alignments(1), EvsMode::VerifiedOnly)
        .ok_or("case 1 has no links")?;
    let evs2 = mean_evs(&fixtures::case_alignments(2), EvsMode::VerifiedOnly)
        .ok_or("case 2 has no links")?;
    println!(
        "    case 1: AL {:.2}  DAL {:.2}  ATD {:.2}  EVS {:.1} s",
        r1[0],
        r1[1],
        r1[2],
        evs1 / 1000.0
    );
    println!(
        "    case 2: AL {:.2}  DAL {:.2}  ATD {:.2}  EVS {:.1} s",
        r2[0],
        r2[1],
        r2[2],
        evs2 / 1000.0
    );
    ensure(r1[0] > r2[0], || "AL ordering".into())?;
    ensure(r1[1] > r2[1], || "DAL ordering".into())?;
    ensure(r1[2] < r2[2], || "ATD ordering".into())?;
    ensure(evs1 < evs2, || "EVS ordering".into())?;
    let want1 = [1.2, 1.84, 2.4];
    let want2 = [0.25, 1.19, 3.75];
    for i in 0..3 {
        ensure(close(r1[i], want1[i], 5e-3), || {
            format!("case 1 value {i}: {} vs {}", r1[i], want1[i])
        })?;
        ensure(close(r2[i], want2[i], 5e-3), || {
            format!("case 2 value {i}: {} vs {}", r2[i], want2[i])
        })?;
    }
    Ok(())
}

fn criterion_6() -> Check {
    let reads = [1, 2];
    let inp = StepMetricInput::new(&reads, 10).map_err(|e| e.to_string())?;
    let al = step::average_lagging(&inp, RatioMode::Hypothesis).map_err(|e| e.to_string())?;
    let laal = step::average_lagging(&inp.with_ref_len(10), RatioMode::LengthAdaptive)
        .map_err(|e| e.to_string())?;
    ensure(al < 0.0, || format!("AL = {al}"))?;
    ensure(laal >= 0.0, || format!("LAAL = {laal}"))
}

fn timed_from_steps(src_len: usize, reads: &[usize], scale: f64, shift: f64) -> SessionTrace {
    let (src_end, tgt_end) = common::tick_timeline(src_len, reads);
    let tok = |(i, &e): (usize, &f64)| {
        TimedToken::new(i + 1, (e - 1.0) * scale + shift, e * scale + shift)
    };
    SessionTrace::new(
        "timed",
        Modality::TextToText,
        TimelineKind::ComputationAware,
        src_end.iter().enumerate().map(tok).collect(),
        tgt_end.iter().enumerate().map(tok).collect(),
        reads.to_vec(),
    )
    .expect("valid timed trace")
}

fn criterion_7() -> Check {
    let mut checked = 0;
    for src_len in 1..=6 {
        for tgt_len in 1..=6 {
            for reads in common::monotone_reads(src_len, tgt_len) {
                let a = token_correspondence(&reads);
                let oracle = common::surplus_oracle(&reads);
                ensure(a == oracle, || {
                    format!("g={reads:?}: a={a:?}, oracle {oracle:?}")
                })?;
                let inp = StepMetricInput::new(&reads, src_len).map_err(|e| e.to_string())?;
                let atd = step::atd_steps(&inp).map_err(|e| e.to_string())?;
                let want = common::oracle_atd(src_len, &reads);
                ensure(close(atd, want, 1e-12), || {
                    format!("g={reads:?}: ATD {atd}, oracle {want}")
                })?;

                let base = atd_timed(&timed_from_steps(src_len, &reads, 1000.0, 0.0))
                    .map_err(|e| e.to_string())?;
                ensure(close(base, want * 1000.0, 1e-9), || {
                    format!("g={reads:?}: timed ATD {base}")
                })?;
                for c in [1.0, 1000.0, 1e6] {
                    let shifted = atd_timed(&timed_from_steps(src_len, &reads, 1000.0, c))
                        .map_err(|e| e.to_string())?;
                    ensure(close(shifted, base, 1e-6), || {
                        format!("g={reads:?}, +{c}: {shifted} vs {base}")
                    })?;
                }
                checked += 1;
            }
        }
    }
    println!("    {checked} read schedules checked");
    Ok(())
}

fn criterion_8() -> Check {
    let x = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.0];
    let rev: Vec<f64> = x.iter().map(|v| -v).collect();
    let same = spearman(&x, &x).map_err(|e| e.to_string())?;
    let opposite = spearman(&x, &rev).map_err(|e| e.to_string())?;
    ensure(close(same.rho, 1.0, 1e-12), || {
        format!("rho(x, x) = {}", same.rho)
    })?;
    ensure(close(opposite.rho, -1.0, 1e-12), || {
        format!("rho(x, -x) = {}", opposite.rho)
    })?;
    let swap = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 2.0, 3.0, 5.0, 4.0])
        .map_err(|e| e.to_string())?;
    ensure(close(swap.rho, 0.9, 1e-9), || format!("rho = {}", swap.rho))?;

    let atd = [
        Some(1.0),
        Some(2.0),
        Some(3.5),
        Some(2.2),
        Some(4.0),
        Some(5.1),
        Some(0.3),
    ];
    let evs = [
        Some(1.1),
        None,
        Some(3.0),
        Some(2.0),
        None,
        Some(6.0),
        Some(0.2),
    ];
    let c = spearman_pairwise(&atd, &evs).map_err(|e| e.to_string())?;
    let present = evs.iter().filter(|v| v.is_some()).count();
    ensure(c.n == present, || format!("n = {}, want {present}", c.n))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 exact AL for chunk-19 and chunk-20", criterion_1),
        ("2 wait-k closed forms", criterion_2),
        (
            "3 wait-k and chunk-k agree under ATD and DAL, not AL",
            criterion_3,
        ),
        ("4 first-chunk-length curve shape", criterion_4),
        ("5 short vs long first output ordering", criterion_5),
        ("6 negative AL, non-negative LAAL", criterion_6),
        (
            "7 token correspondence oracle and shift invariance",
            criterion_7,
        ),
        ("8 Spearman sanity and pairwise deletion", criterion_8),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(())) => println!("PASS  criterion {name}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  criterion {name}: panicked");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
