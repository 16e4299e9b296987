//! GLR stopping statistic and exploration threshold.
//!
//! The statistic `Q(t)` is the infimum, over load vectors under which the
//! candidate answer is wrong, of the count-weighted empirical divergence.
//! It has the same closed form as the oracle's inner value with counts in
//! place of proportions. Sampling stops once `Q(t) > ln(C t^2 / delta)`.

use std::collections::HashMap;
use std::f64::consts::E;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::divergence::ObservationFamily;
use crate::error::{Error, Result};
use crate::oracle::{alt_infimum, is_admissible, Answer, Criterion};

/// Per-slice measurement counts and running means.
///
/// Means are stored raw (as produced by the incremental update) and are
/// clamped into the family's domain whenever a divergence is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalState {
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
}

impl EmpiricalState {
    /// Empty state: no measurements, all means zero.
    pub fn new(k: usize) -> Self {
        Self {
            counts: vec![0; k],
            means: vec![0.0; k],
        }
    }

    pub fn from_parts(counts: Vec<u64>, means: Vec<f64>) -> Result<Self> {
        if counts.len() != means.len() || counts.is_empty() {
            return Err(Error::Config(format!(
                "counts ({}) and means ({}) must have the same nonzero length",
                counts.len(),
                means.len()
            )));
        }
        Ok(Self { counts, means })
    }

    pub fn num_slices(&self) -> usize {
        self.counts.len()
    }

    /// Total number of measurements `t`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Records observation `x` on slice `k`.
    pub fn update(&mut self, k: usize, x: f64) {
        self.counts[k] += 1;
        self.means[k] += (x - self.means[k]) / self.counts[k] as f64;
    }

    pub fn clamped_means(&self, family: ObservationFamily) -> Vec<f64> {
        self.means.iter().map(|&m| family.clamp(m)).collect()
    }
}

/// Confidence and threshold constant of `f(t) = ln(C t^2 / delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub delta: f64,
    pub constant_c: f64,
}

impl ThresholdConfig {
    pub fn new(delta: f64, constant_c: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("delta {delta} must lie in (0, 1)")));
        }
        if !constant_c.is_finite() || constant_c < E {
            return Err(Error::Config(format!(
                "threshold constant {constant_c} must be finite and at least e"
            )));
        }
        Ok(Self { delta, constant_c })
    }

    /// Threshold with the constant from [`compute_constant`] for `k` slices.
    pub fn for_slices(delta: f64, k: usize) -> Result<Self> {
        Self::new(delta, compute_constant(k)?)
    }
}

/// `f(t) = ln(C t^2 / delta)`.
pub fn threshold(cfg: &ThresholdConfig, t: u64) -> f64 {
    cfg.constant_c.ln() + 2.0 * (t as f64).ln() - cfg.delta.ln()
}

/// GLR statistic for `candidate`, evaluated on clamped empirical means.
/// Zero when the candidate is not a correct answer for those means.
pub fn glr_statistic(
    state: &EmpiricalState,
    gamma: f64,
    family: ObservationFamily,
    crit: Criterion,
    candidate: Answer,
) -> f64 {
    let mu = state.clamped_means(family);
    if !is_admissible(&mu, gamma, crit, candidate) {
        return 0.0;
    }
    let n: Vec<f64> = state.counts.iter().map(|&c| c as f64).collect();
    alt_infimum(family, &mu, gamma, &n, crit, candidate)
}

/// Number of explicitly summed series terms.
pub const SERIES_TERMS: u64 = 1_000_000;

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// `ln Gamma(n + 1, a)` for integer `n`, from
/// `Gamma(n+1, a) = n! e^{-a} sum_{j<=n} a^j / j!`.
fn ln_upper_gamma(n: u32, a: f64) -> f64 {
    let ln_n = ln_factorial(n);
    let terms: Vec<f64> = (0..=n)
        .map(|j| j as f64 * a.ln() + ln_n - ln_factorial(j))
        .collect();
    log_sum_exp(&terms) - a
}

/// `ln` of the tail integral `int_N^inf (ln(C x^2) ln x)^K / x^2 dx`.
///
/// With `u = ln x` the integrand is `((L + 2u) u)^K e^{-u}`, `L = ln C`,
/// which expands into incomplete gamma functions.
fn ln_tail(ln_c: f64, k: u32, n: f64) -> f64 {
    let a = n.ln();
    let terms: Vec<f64> = (0..=k)
        .map(|i| {
            let binom = ln_factorial(k) - ln_factorial(i) - ln_factorial(k - i);
            let coeff = binom + (k - i) as f64 * ln_c.ln() + i as f64 * 2f64.ln();
            coeff + ln_upper_gamma(k + i, a)
        })
        .collect();
    log_sum_exp(&terms)
}

/// Right-hand side `e sum_t (e/K)^K (ln(C t^2) ln t)^K / t^2` of the
/// condition on `C`, with the first [`SERIES_TERMS`] terms summed and the
/// remainder bounded by its integral (the summand is decreasing there).
pub fn constant_series(c: f64, k: usize) -> f64 {
    ln_constant_series(c.ln(), k).exp()
}

fn ln_constant_series(ln_c: f64, k: usize) -> f64 {
    let kf = k as f64;
    let prefactor = 1.0 + kf * (1.0 - kf.ln());
    // scale out the largest term to keep the running sum in range
    let ln_term = |t: u64| {
        let lt = (t as f64).ln();
        kf * ((ln_c + 2.0 * lt) * lt).ln() - 2.0 * lt
    };
    let mut peak = f64::NEG_INFINITY;
    for t in 2..=SERIES_TERMS.min(10_000) {
        peak = peak.max(ln_term(t));
    }
    let mut sum = 0.0;
    for t in 2..=SERIES_TERMS {
        sum += (ln_term(t) - peak).exp();
    }
    let head = peak + sum.ln();
    let tail = ln_tail(ln_c, k as u32, SERIES_TERMS as f64);
    prefactor + log_sum_exp(&[head, tail])
}

fn constant_cache() -> &'static Mutex<HashMap<usize, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest-found `C >= e` satisfying `C >= constant_series(C, k)`.
///
/// Fixed-point iteration `C <- rhs(C)` from `e K^K` until the relative
/// change drops below `1e-3`, then a small upward margin so the inequality
/// holds strictly. Results are memoized per `k`.
pub fn compute_constant(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("at least one slice is required".into()));
    }
    if let Some(&c) = constant_cache().lock().expect("cache poisoned").get(&k) {
        return Ok(c);
    }
    let c = fixed_point_constant(k)?;
    constant_cache()
        .lock()
        .expect("cache poisoned")
        .insert(k, c);
    Ok(c)
}

fn fixed_point_constant(k: usize) -> Result<f64> {
    const MAX_ITER: usize = 200;
    let kf = k as f64;
    let mut ln_c = 1.0 + kf * kf.ln();
    for iter in 0..MAX_ITER {
        let next = ln_constant_series(ln_c, k).max(1.0);
        let converged = (next - ln_c).abs() < 1e-3;
        ln_c = next;
        if converged {
            // climb until the condition holds with room to spare
            let mut candidate = ln_c + 1e-3;
            for _ in 0..MAX_ITER {
                if ln_constant_series(candidate, k) <= candidate {
                    return Ok(candidate.exp());
                }
                candidate += 1e-3;
            }
            return Err(Error::NoConvergence {
                iterations: iter + 1,
                residual: ln_constant_series(candidate, k) - candidate,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual: ln_constant_series(ln_c, k) - ln_c,
    })
}
