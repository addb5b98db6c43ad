//! Chain-level estimates, autocorrelation and tail fits.

use serde::Serialize;

/// Monte Carlo estimate with a between-chain error bar.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub samples: u64,
    pub ess: f64,
    pub seed: u64,
    pub fingerprint: String,
}

/// Ratio estimate `sum(x) / count` over chains; chains may hold different
/// numbers of observations. The error bar uses the spread of the per-chain
/// totals around the pooled mean (delta method), so it only sees the
/// between-chain variance.
pub fn pooled(chains: &[Vec<f64>]) -> (f64, f64, u64, f64) {
    let counts: Vec<f64> = chains.iter().map(|c| c.len() as f64).collect();
    let sums: Vec<f64> = chains.iter().map(|c| c.iter().sum()).collect();
    let n: f64 = counts.iter().sum();
    if n == 0.0 {
        return (f64::NAN, f64::NAN, 0, 0.0);
    }
    let mean = sums.iter().sum::<f64>() / n;
    let m = chains.iter().filter(|c| !c.is_empty()).count() as f64;
    let se = if m > 1.0 {
        let dev: f64 = sums.iter().zip(&counts).map(|(s, c)| (s - mean * c).powi(2)).sum();
        (m / (m - 1.0) * dev).sqrt() / n
    } else {
        f64::NAN
    };
    let var = chains.iter().flatten().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let ess = if se > 0.0 { (var / (se * se)).min(n) } else { n };
    (mean, se, n as u64, ess)
}

impl Estimate {
    pub fn from_chains(chains: &[Vec<f64>], seed: u64, fingerprint: &str) -> Self {
        let (value, se, samples, ess) = pooled(chains);
        Estimate { value, se, samples, ess, seed, fingerprint: fingerprint.to_string() }
    }

    /// Mean of 0/1 indicators.
    pub fn from_indicators(chains: &[Vec<bool>], seed: u64, fingerprint: &str) -> Self {
        let x: Vec<Vec<f64>> = chains.iter().map(|c| c.iter().map(|&b| b as u8 as f64).collect()).collect();
        Self::from_chains(&x, seed, fingerprint)
    }
}

/// Integrated autocorrelation time `1/2 + sum_t rho(t)` with Sokal's
/// self-consistent window `W >= c tau` (c = 5). 0.5 means uncorrelated.
pub fn integrated_autocorr(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return 0.5;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n {
        let ct = (0..n - t).map(|i| (x[i] - mean) * (x[i + t] - mean)).sum::<f64>() / n as f64;
        tau += ct / c0;
        if (t as f64) >= 5.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Least-squares line through `log P(X >= s)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailFit {
    pub x: Vec<f64>,
    pub log_survival: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Fewer than two usable bins, or no observation at all.
    pub degenerate: bool,
    pub observations: u64,
    /// Fraction of observations cut off by the window.
    pub truncated: f64,
}

pub const MIN_BIN_COUNT: u64 = 30;

/// Fit the survival function of nonnegative integer observations over the
/// abscissas `s >= start` whose bin `{X >= s}` holds at least
/// [`MIN_BIN_COUNT`] observations.
pub fn fit_tail(values: &[u64], start: u64, truncated: u64) -> TailFit {
    let total = values.len() as u64;
    let max = values.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0u64; max as usize + 2];
    for &v in values {
        hist[v as usize] += 1;
    }
    // tail[s] = #{X >= s}
    let mut tail = vec![0u64; hist.len()];
    for s in (0..hist.len() - 1).rev() {
        tail[s] = tail[s + 1] + hist[s];
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for s in start..=max {
        let c = tail[s as usize];
        if c < MIN_BIN_COUNT {
            break;
        }
        x.push(s as f64);
        y.push((c as f64 / total as f64).ln());
    }
    let truncated = if total == 0 { 0.0 } else { truncated as f64 / total as f64 };
    if x.len() < 2 {
        return TailFit {
            x,
            log_survival: y,
            slope: f64::NAN,
            intercept: f64::NAN,
            r2: f64::NAN,
            degenerate: true,
            observations: total,
            truncated,
        };
    }
    let (slope, intercept, r2) = linear_fit(&x, &y);
    TailFit { x, log_survival: y, slope, intercept, r2, degenerate: false, observations: total, truncated }
}

/// Ordinary least squares `y = a x + b`, returning `(a, b, R^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
