//! Spearman rank correlation with average ranks for ties.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Largest sample size for which the p-value is computed by enumerating
/// every permutation.
pub const EXACT_P_MAX_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: f64,
    /// Two-sided.
    pub p_value: f64,
    /// Rows used after pairwise deletion.
    pub n: usize,
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho between two equal-length columns.
///
/// The p-value is exact (all permutations) for `n <= 8` and uses the
/// t-distribution with `n - 2` degrees of freedom above that.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<Correlation> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 3 {
        return Err(Error::InsufficientSamples(n));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Config(
            "spearman input contains a non-finite value".into(),
        ));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let rho = pearson(&ra, &rb).ok_or(Error::ConstantColumn)?;
    let p_value = if n <= EXACT_P_MAX_N {
        exact_p_value(&ra, &rb, rho)
    } else {
        t_p_value(rho, n)
    };
    Ok(Correlation { rho, p_value, n })
}

/// Spearman's rho after dropping every row where either value is absent
/// or not finite.
pub fn spearman_pairwise(a: &[Option<f64>], b: &[Option<f64>]) -> Result<Correlation> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Some((*x, *y)),
            _ => None,
        })
        .unzip();
    spearman(&xs, &ys)
}

fn t_p_value(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

fn exact_p_value(ra: &[f64], rb: &[f64], observed: f64) -> f64 {
    let tol = 1e-12;
    let mut perm = rb.to_vec();
    let mut hits = 0u64;
    let mut total = 0u64;
    heap_permutations(&mut perm, |p| {
        total += 1;
        if let Some(r) = pearson(ra, p) {
            if r.abs() >= observed.abs() - tol {
                hits += 1;
            }
        }
    });
    hits as f64 / total as f64
}

/// Visits every permutation of `xs` in place (Heap's algorithm, iterative).
fn heap_permutations(xs: &mut [f64], mut visit: impl FnMut(&[f64])) {
    let n = xs.len();
    let mut c = vec![0usize; n];
    visit(xs);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                xs.swap(0, i);
            } else {
                xs.swap(c[i], i);
            }
            visit(xs);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
