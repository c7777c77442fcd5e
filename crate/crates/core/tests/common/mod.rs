#![allow(dead_code)]

/// Every non-decreasing `g` with `1 <= g(t) <= src_len` and `tgt_len` entries.
pub fn monotone_reads(src_len: usize, tgt_len: usize) -> Vec<Vec<usize>> {
    fn go(src_len: usize, left: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for g in lo..=src_len {
            cur.push(g);
            go(src_len, left - 1, g, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(src_len, tgt_len, 1, &mut Vec::new(), &mut out);
    out
}

/// Source token each output token is charged to. Each output token takes
/// the oldest read-but-unclaimed source token; when none is left (the output
/// has run ahead of the input) it is charged to the newest token read.
pub fn surplus_oracle(reads: &[usize]) -> Vec<usize> {
    let mut next_unclaimed = 1;
    reads
        .iter()
        .map(|&g| {
            if next_unclaimed <= g {
                next_unclaimed += 1;
                next_unclaimed - 1
            } else {
                g
            }
        })
        .collect()
}

/// End times on the unit-step clock, found by ticking the clock: source
/// token `j` arrives at tick `j`, and the writer spends one tick per output
/// token once its reads have arrived and it is free.
pub fn tick_timeline(src_len: usize, reads: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let src_end: Vec<f64> = (1..=src_len).map(|j| j as f64).collect();
    let mut tgt_end = Vec::new();
    let mut busy_until = 0;
    let mut t = 0;
    let mut clock = 0;
    while t < reads.len() {
        let arrived = clock.min(src_len);
        if arrived >= reads[t] && busy_until <= clock {
            busy_until = clock + 1;
            tgt_end.push(busy_until as f64);
            t += 1;
        }
        clock += 1;
    }
    (src_end, tgt_end)
}

pub fn oracle_atd(src_len: usize, reads: &[usize]) -> f64 {
    let a = surplus_oracle(reads);
    let (src_end, tgt_end) = tick_timeline(src_len, reads);
    let total: f64 = a
        .iter()
        .zip(&tgt_end)
        .map(|(&j, &e)| e - src_end[j - 1])
        .sum();
    total / reads.len() as f64
}
