//! Inversion sampling for the count and severity laws.
//!
//! Everything is a monotone map of a single uniform, which keeps antithetic
//! pairs coupled and makes draws reproducible from the raw uniform stream.

use crate::pricing::FrequencyModel;
use crate::severity::SeverityModel;

/// Severity draw by inversion then censoring: `min(-ln(1 - u)/nu, cap)`.
/// Exact for the censored law; uniforms at or above `1 - e^{-nu cap}` land
/// on the atom at `cap`.
pub fn sample_severity(model: &SeverityModel, u: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&u));
    let raw = -f64::ln_1p(-u) / model.nu();
    raw.min(model.cap())
}

/// Count draw by sequential CDF inversion.
///
/// Poisson uses the pmf recurrence `p_{n+1} = p_n * lambda / (n + 1)`.
/// General (mean, variance) counts with variance > mean use the negative
/// binomial parameterized by those two moments; variance = mean falls back
/// to Poisson. Underdispersed general counts have no canonical law here and
/// also fall back to Poisson at the given mean.
pub fn sample_count(freq: &FrequencyModel, u: f64) -> u64 {
    debug_assert!((0.0..=1.0).contains(&u));
    if freq.is_poisson() || freq.variance() <= freq.mean() {
        invert_poisson(freq.mean(), u)
    } else {
        invert_negative_binomial(freq.mean(), freq.variance(), u)
    }
}

fn invert_poisson(lambda: f64, u: f64) -> u64 {
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    let mut n = 0u64;
    while u > cdf {
        pmf *= lambda / (n + 1) as f64;
        n += 1;
        cdf += pmf;
        if pmf < 1e-300 || n > 10_000_000 {
            break; // tail mass below representable resolution
        }
    }
    n
}

/// Negative binomial with success probability `p = mean/variance` and size
/// `r = mean^2 / (variance - mean)`, so the first two moments match exactly.
fn invert_negative_binomial(mean: f64, variance: f64, u: f64) -> u64 {
    let p = mean / variance;
    let r = mean * mean / (variance - mean);
    let mut pmf = (r * p.ln()).exp(); // p^r
    let mut cdf = pmf;
    let mut n = 0u64;
    while u > cdf {
        pmf *= (1.0 - p) * (n as f64 + r) / (n + 1) as f64;
        n += 1;
        cdf += pmf;
        if pmf < 1e-300 || n > 10_000_000 {
            break;
        }
    }
    n
}
