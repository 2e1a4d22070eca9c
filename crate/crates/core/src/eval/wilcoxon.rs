use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::EvalError;

/// Largest sample size that uses the exact null distribution.
const EXACT_MAX_N: usize = 25;
const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(w_plus, w_minus)`.
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub method: PValueMethod,
}

/// Ranks of `|d|` with ties sharing their average rank, doubled so they stay
/// integral.
fn doubled_ranks(abs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    let mut ranks = vec![0u64; abs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && abs[order[j + 1]] == abs[order[i]] {
            j += 1;
        }
        // average of ranks i+1..=j+1, doubled
        let r = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// P(W+ <= w) under the null, by counting sign assignments.
fn exact_lower_tail(ranks2: &[u64], w2: u64) -> f64 {
    let total: u64 = ranks2.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let below: f64 = counts[..=(w2 as usize).min(total as usize)].iter().sum();
    below / 2f64.powi(ranks2.len() as i32)
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch(x.len(), y.len()));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if d.is_empty() {
        return Err(EvalError::AllZeroDifferences);
    }
    let n = d.len();
    if n < MIN_PAIRS {
        return Err(EvalError::TooFewPairs { needed: MIN_PAIRS, got: n });
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks2 = doubled_ranks(&abs);
    let plus2: u64 = ranks2.iter().zip(&d).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let total2: u64 = ranks2.iter().sum();
    let minus2 = total2 - plus2;
    let w2 = plus2.min(minus2);

    let (p, method) = if n <= EXACT_MAX_N {
        ((2.0 * exact_lower_tail(&ranks2, w2)).min(1.0), PValueMethod::Exact)
    } else {
        let nf = n as f64;
        let mut tie_term = 0.0;
        let mut i = 0;
        let mut sorted = ranks2.clone();
        sorted.sort_unstable();
        while i < sorted.len() {
            let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
            let t = j as f64;
            tie_term += t * t * t - t;
            i += j;
        }
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let w = w2 as f64 / 2.0;
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let normal = Normal::standard();
        ((2.0 * (1.0 - normal.cdf(z))).min(1.0), PValueMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        statistic: w2 as f64 / 2.0,
        p_value: p,
        w_plus: plus2 as f64 / 2.0,
        w_minus: minus2 as f64 / 2.0,
        n,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_pair_example() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, -6.0];
        let r = wilcoxon_signed_rank(&x, &[0.0; 6]).unwrap();
        assert_eq!((r.w_plus, r.w_minus, r.statistic), (15.0, 6.0, 6.0));
        // 2 * #{subsets of 1..6 with sum <= 6} / 64 = 2 * 14 / 64
        assert!((r.p_value - 28.0 / 64.0).abs() < 1e-15);
        assert_eq!(r.method, PValueMethod::Exact);
    }

    #[test]
    fn tied_ranks_are_averaged() {
        assert_eq!(doubled_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![2, 5, 5, 8]);
    }

    #[test]
    fn errors() {
        assert!(matches!(wilcoxon_signed_rank(&[1.0; 6], &[1.0; 6]), Err(EvalError::AllZeroDifferences)));
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 0.0, 0.0, 0.0, 0.0]),
            Err(EvalError::TooFewPairs { got: 4, .. })
        ));
        assert!(matches!(wilcoxon_signed_rank(&[1.0], &[]), Err(EvalError::LengthMismatch(1, 0))));
    }
}
