//! KL divergences of one-parameter exponential families and the scalar
//! functions built on them.
//!
//! Notation used throughout: `d(a, b)` is the divergence between the
//! distributions with means `a` and `b`. For a target slice with mean `mu_k`
//! and a comparator with mean `mu_j`, the information deviation is
//!
//! ```text
//! g(x) = d(mu_k, m) + x * d(mu_j, m),   m = (mu_k + x * mu_j) / (1 + x)
//! ```
//!
//! which is the cheapest way to make the two slices indistinguishable when the
//! comparator is measured `x` times as often as the target. It increases from
//! `0` at `x = 0` to `d(mu_k, mu_j)` as `x -> inf`.
//!
//! Internally `g` is evaluated on the share `s = x / (1 + x)` in `[0, 1]`,
//! which turns the unbounded inverse problem into a bracketed one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root::{solve_increasing, solve_increasing_newton, RootConfig};

/// Clamping margin applied to empirical means before divergences are taken.
pub const CLAMP_EPS: f64 = 1e-9;

/// Relative accuracy of the inner inverse solves.
const INVERSE_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservationFamily {
    /// Per-slot indicator with mean in `(0, 1)`.
    Bernoulli,
    /// Per-slot packet count with mean in `(0, inf)`.
    Poisson,
}

impl ObservationFamily {
    /// Whether `mean` lies in the open parameter domain.
    pub fn contains(self, mean: f64) -> bool {
        match self {
            Self::Bernoulli => mean > 0.0 && mean < 1.0,
            Self::Poisson => mean > 0.0 && mean.is_finite(),
        }
    }

    /// Projects a mean (typically an empirical one) into the domain, leaving
    /// a margin of [`CLAMP_EPS`] to the boundary.
    pub fn clamp(self, mean: f64) -> f64 {
        match self {
            Self::Bernoulli => mean.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS),
            Self::Poisson => mean.max(CLAMP_EPS),
        }
    }

    pub fn check(self, mean: f64) -> Result<f64> {
        if self.contains(mean) {
            Ok(mean)
        } else {
            Err(Error::Domain {
                family: self,
                value: mean,
            })
        }
    }

    /// `d(a, b)` without domain checks. Callers guarantee both arguments are
    /// inside the domain.
    #[inline]
    pub(crate) fn divergence(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Self::Bernoulli => {
                a * ((a - b) / b).ln_1p() + (1.0 - a) * ((b - a) / (1.0 - b)).ln_1p()
            }
            Self::Poisson => a * ((a - b) / b).ln_1p() + (b - a),
        };
        v.max(0.0)
    }

    /// Share `s` such that `g(s / (1 - s)) = level`; requires
    /// `0 < level < d(mu_k, mu_j)`.
    ///
    /// Uses `g'(x) = d(mu_j, m)`, so `dg/ds = d(mu_j, m) / (1 - s)^2`.
    fn inverse_share(self, mu_k: f64, mu_j: f64, level: f64) -> Result<f64> {
        let cfg = RootConfig::with_tol(INVERSE_REL_TOL * level);
        solve_increasing_newton(
            |s| {
                if s >= 1.0 {
                    return (self.divergence(mu_k, mu_j) - level, f64::INFINITY);
                }
                let m = mu_k + s * (mu_j - mu_k);
                let tail = self.divergence(mu_j, m);
                let ratio = s / (1.0 - s);
                let g = self.divergence(mu_k, m) + ratio * tail;
                (g - level, tail / ((1.0 - s) * (1.0 - s)))
            },
            0.0,
            1.0,
            &cfg,
        )
    }

    fn name(self) -> &'static str {
        match self {
            Self::Bernoulli => "bernoulli",
            Self::Poisson => "poisson",
        }
    }
}

impl fmt::Display for ObservationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bernoulli" => Ok(Self::Bernoulli),
            "poisson" => Ok(Self::Poisson),
            other => Err(Error::Config(format!(
                "unknown observation family `{other}`"
            ))),
        }
    }
}

/// Pair of means from the same family, both validated against its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPair {
    pub a: f64,
    pub b: f64,
}

impl MeanPair {
    pub fn new(family: ObservationFamily, a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            a: family.check(a)?,
            b: family.check(b)?,
        })
    }

    pub fn kl(&self, family: ObservationFamily) -> f64 {
        family.divergence(self.a, self.b)
    }
}

/// KL divergence `d(a, b)`.
pub fn kl(family: ObservationFamily, a: f64, b: f64) -> Result<f64> {
    Ok(MeanPair::new(family, a, b)?.kl(family))
}

/// Weighted symmetrization
/// `I_alpha(mu, nu) = alpha d(mu, c) + (1 - alpha) d(nu, c)` with the
/// mixture mean `c = alpha mu + (1 - alpha) nu`.
pub fn weighted_info(family: ObservationFamily, alpha: f64, mu: f64, nu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Range {
            level: alpha,
            supremum: 1.0,
        });
    }
    let pair = MeanPair::new(family, mu, nu)?;
    let c = alpha * pair.a + (1.0 - alpha) * pair.b;
    Ok(alpha * family.divergence(pair.a, c) + (1.0 - alpha) * family.divergence(pair.b, c))
}

/// Cheapest way of moving two slices measured `wa` and `wb` times (or with
/// those proportions) to a common mean: `wa d(a, c) + wb d(b, c)` with `c`
/// the weighted mixture. Equals `(wa + wb) I_{wa/(wa+wb)}(a, b)`; zero when
/// neither slice carries weight.
#[inline]
pub fn pairwise_cost(family: ObservationFamily, wa: f64, a: f64, wb: f64, b: f64) -> f64 {
    let total = wa + wb;
    if total <= 0.0 {
        return 0.0;
    }
    let c = (wa * a + wb * b) / total;
    wa * family.divergence(a, c) + wb * family.divergence(b, c)
}

/// Information deviation `g(x)` of comparator `mu_j` against target `mu_k`.
/// `x = inf` is accepted and yields the supremum `d(mu_k, mu_j)`.
pub fn info_deviation(family: ObservationFamily, mu_k: f64, mu_j: f64, x: f64) -> Result<f64> {
    let pair = MeanPair::new(family, mu_k, mu_j)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Range {
            level: x,
            supremum: f64::INFINITY,
        });
    }
    if x.is_infinite() {
        return Ok(family.divergence(pair.a, pair.b));
    }
    let m = pair.b + (pair.a - pair.b) / (1.0 + x);
    Ok(family.divergence(pair.a, m) + x * family.divergence(pair.b, m))
}

/// Inverse of [`info_deviation`] in `x`. Defined for
/// `0 <= y < d(mu_k, mu_j)`.
pub fn info_deviation_inverse(
    family: ObservationFamily,
    mu_k: f64,
    mu_j: f64,
    y: f64,
) -> Result<f64> {
    let pair = MeanPair::new(family, mu_k, mu_j)?;
    let supremum = family.divergence(pair.a, pair.b);
    if y.is_nan() || y < 0.0 || y >= supremum {
        return Err(Error::Range { level: y, supremum });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let share = family.inverse_share(pair.a, pair.b, y)?;
    Ok(share / (1.0 - share))
}

fn validate_comparators(
    family: ObservationFamily,
    mu: &[f64],
    k: usize,
    set: &[usize],
) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidInstance("comparator set is empty".into()));
    }
    let target = *mu
        .get(k)
        .ok_or_else(|| Error::InvalidInstance(format!("target index {k} out of range")))?;
    family.check(target)?;
    for &j in set {
        if j == k {
            return Err(Error::InvalidInstance(format!(
                "target {k} appears in its own comparator set"
            )));
        }
        let mj = *mu
            .get(j)
            .ok_or_else(|| Error::InvalidInstance(format!("comparator index {j} out of range")))?;
        family.check(mj)?;
        if mj == target {
            return Err(Error::Ambiguous(vec![k, j]));
        }
    }
    Ok(())
}

/// Equilibrium function `F_k(y; S)`: the sum over comparators `j` of
/// `d(mu_k, m_j) / d(mu_j, m_j)`, where `m_j` is the mixture mean at which
/// the deviation of `j` equals `y`.
pub fn equilibrium_value(
    family: ObservationFamily,
    mu: &[f64],
    k: usize,
    set: &[usize],
    y: f64,
) -> Result<f64> {
    validate_comparators(family, mu, k, set)?;
    let comparators: Vec<f64> = set.iter().map(|&j| mu[j]).collect();
    let supremum = min_divergence(family, mu[k], &comparators);
    if !(y > 0.0 && y < supremum) {
        return Err(Error::Range { level: y, supremum });
    }
    equilibrium_at(family, mu[k], &comparators, y)
}

/// Solves `F_k(y; S) = 1`. The root lies strictly inside
/// `(0, min_j d(mu_k, mu_j))`.
pub fn equilibrium_root(
    family: ObservationFamily,
    mu: &[f64],
    k: usize,
    set: &[usize],
) -> Result<f64> {
    validate_comparators(family, mu, k, set)?;
    let comparators: Vec<f64> = set.iter().map(|&j| mu[j]).collect();
    solve_equilibrium(family, mu[k], &comparators)
}

pub(crate) fn min_divergence(family: ObservationFamily, target: f64, comparators: &[f64]) -> f64 {
    comparators
        .iter()
        .map(|&mj| family.divergence(target, mj))
        .fold(f64::INFINITY, f64::min)
}

fn equilibrium_at(
    family: ObservationFamily,
    target: f64,
    comparators: &[f64],
    y: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for &mj in comparators {
        let share = family.inverse_share(target, mj, y)?;
        let m = target + share * (mj - target);
        total += family.divergence(target, m) / family.divergence(mj, m);
    }
    Ok(total)
}

/// Unchecked core of [`equilibrium_root`]; comparators must be distinct
/// from `target` and inside the domain.
pub(crate) fn solve_equilibrium(
    family: ObservationFamily,
    target: f64,
    comparators: &[f64],
) -> Result<f64> {
    let supremum = min_divergence(family, target, comparators);
    let hi = (1.0 - 1e-9) * supremum;
    let lo = 1e-12_f64.min(1e-3 * hi);
    let cfg = RootConfig::default();
    // An inner failure poisons the residual so the outer solve reports it.
    let mut inner_err = None;
    // ln F is far better conditioned than F near both ends of the bracket,
    // and |ln F| <= tol implies |F - 1| <= tol (1 + tol).
    let root = solve_increasing(
        |y| match equilibrium_at(family, target, comparators, y) {
            Ok(v) => v.ln(),
            Err(e) => {
                inner_err.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        &cfg,
    );
    match (root, inner_err) {
        (_, Some(e)) => Err(e),
        (r, None) => r,
    }
}

/// Inverse deviation for validated inputs with `0 <= y < d(mu_k, mu_j)`.
pub(crate) fn deviation_inverse_unchecked(
    family: ObservationFamily,
    mu_k: f64,
    mu_j: f64,
    y: f64,
) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let share = family.inverse_share(mu_k, mu_j, y)?;
    Ok(share / (1.0 - share))
}

/// `d_B(delta, 1 - delta)`, the confidence factor of the lower bounds.
pub fn confidence_divergence(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta {delta} must lie in (0, 1)")));
    }
    Ok(ObservationFamily::Bernoulli.divergence(delta, 1.0 - delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use ObservationFamily::{Bernoulli, Poisson};

    fn closed_form_bernoulli(a: f64, b: f64) -> f64 {
        a * (a / b).ln() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln()
    }

    #[test]
    fn kl_reference_values() {
        assert_eq!(kl(Bernoulli, 0.5, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(kl(Poisson, 1.0, 2.0).unwrap(), 0.306853, epsilon = 1e-6);
        assert_abs_diff_eq!(
            kl(Poisson, 1.0, 2.0).unwrap(),
            (0.5f64).ln() + 1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(kl(Bernoulli, 0.3, 0.5).unwrap(), 0.082282, epsilon = 1e-6);
        assert_abs_diff_eq!(
            kl(Bernoulli, 0.3, 0.5).unwrap(),
            0.3 * 0.6f64.ln() + 0.7 * 1.4f64.ln(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kl_rejects_boundary_and_outside() {
        assert!(matches!(kl(Bernoulli, 0.0, 0.5), Err(Error::Domain { .. })));
        assert!(matches!(kl(Bernoulli, 0.5, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(kl(Poisson, 0.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(kl(Poisson, 1.0, -2.0), Err(Error::Domain { .. })));
        assert!(matches!(
            kl(Poisson, f64::NAN, 1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn clamping_keeps_divergences_finite() {
        let lo = Bernoulli.clamp(0.0);
        let hi = Bernoulli.clamp(1.0);
        assert!(kl(Bernoulli, lo, 0.5).unwrap().is_finite());
        assert!(kl(Bernoulli, hi, 0.5).unwrap().is_finite());
        assert!(kl(Poisson, Poisson.clamp(0.0), 24.0).unwrap().is_finite());
        assert_abs_diff_eq!(
            kl(Poisson, Poisson.clamp(0.0), 24.0).unwrap(),
            24.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn weighted_info_examples() {
        assert_eq!(weighted_info(Bernoulli, 0.0, 0.3, 0.7).unwrap(), 0.0);
        assert_eq!(weighted_info(Bernoulli, 1.0, 0.3, 0.7).unwrap(), 0.0);
        assert_eq!(weighted_info(Poisson, 0.5, 3.0, 3.0).unwrap(), 0.0);
        let expected =
            0.5 * closed_form_bernoulli(0.2, 0.4) + 0.5 * closed_form_bernoulli(0.6, 0.4);
        assert_abs_diff_eq!(
            weighted_info(Bernoulli, 0.5, 0.2, 0.6).unwrap(),
            expected,
            epsilon = 1e-14
        );
        assert!(weighted_info(Bernoulli, 1.5, 0.2, 0.6).is_err());
    }

    #[test]
    fn pairwise_cost_matches_scaled_weighted_info() {
        let (wa, wb) = (3.0, 5.0);
        let direct = pairwise_cost(Poisson, wa, 4.0, wb, 9.0);
        let via_info = (wa + wb) * weighted_info(Poisson, wa / (wa + wb), 4.0, 9.0).unwrap();
        assert_abs_diff_eq!(direct, via_info, epsilon = 1e-12);
        assert_eq!(pairwise_cost(Poisson, 0.0, 4.0, 0.0, 9.0), 0.0);
    }

    #[test]
    fn info_deviation_examples() {
        assert_eq!(info_deviation(Bernoulli, 0.4, 0.6, 0.0).unwrap(), 0.0);
        let at_one = closed_form_bernoulli(0.4, 0.5) + closed_form_bernoulli(0.6, 0.5);
        assert_abs_diff_eq!(
            info_deviation(Bernoulli, 0.4, 0.6, 1.0).unwrap(),
            at_one,
            epsilon = 1e-14
        );
        let sup = closed_form_bernoulli(0.4, 0.6);
        assert_abs_diff_eq!(
            info_deviation(Bernoulli, 0.4, 0.6, 1e6).unwrap(),
            sup,
            epsilon = 1e-5
        );
        assert_eq!(
            info_deviation(Bernoulli, 0.4, 0.6, f64::INFINITY).unwrap(),
            Bernoulli.divergence(0.4, 0.6)
        );
        assert!(info_deviation(Bernoulli, 0.4, 0.6, -1.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            info_deviation_inverse(Bernoulli, 0.4, 0.6, 0.0).unwrap(),
            0.0
        );
        let y = info_deviation(Bernoulli, 0.4, 0.6, 1.0).unwrap();
        assert_abs_diff_eq!(
            info_deviation_inverse(Bernoulli, 0.4, 0.6, y).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        let sup = kl(Bernoulli, 0.4, 0.6).unwrap();
        assert!(matches!(
            info_deviation_inverse(Bernoulli, 0.4, 0.6, sup),
            Err(Error::Range { .. })
        ));
        assert!(info_deviation_inverse(Bernoulli, 0.4, 0.6, -0.1).is_err());
        assert!(info_deviation_inverse(Poisson, 2.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn equilibrium_single_comparator_at_midpoint() {
        let mu = [0.4, 0.6];
        let y = info_deviation(Bernoulli, 0.4, 0.6, 1.0).unwrap();
        let f = equilibrium_value(Bernoulli, &mu, 0, &[1], y).unwrap();
        let expected = closed_form_bernoulli(0.4, 0.5) / closed_form_bernoulli(0.6, 0.5);
        assert_abs_diff_eq!(f, expected, epsilon = 1e-9);
        // symmetric around 1/2, so the two divergences coincide
        assert_abs_diff_eq!(expected, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equilibrium_vanishes_near_zero() {
        let mu = [0.2, 0.5, 0.7];
        assert!(equilibrium_value(Bernoulli, &mu, 0, &[1, 2], 1e-12).unwrap() < 1e-6);
    }

    #[test]
    fn equilibrium_two_arm_root_balances_divergences() {
        // independent route: bisection on the meeting mean m where
        // d(0.4, m) = d(0.6, m), then map m back through g.
        let (a, b) = (0.4, 0.6);
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if closed_form_bernoulli(a, m) < closed_form_bernoulli(b, m) {
                lo = m;
            } else {
                hi = m;
            }
        }
        let m = 0.5 * (lo + hi);
        let x = (m - a) / (b - m);
        let y_expected = closed_form_bernoulli(a, m) + x * closed_form_bernoulli(b, m);
        let y = equilibrium_root(Bernoulli, &[a, b], 0, &[1]).unwrap();
        assert_abs_diff_eq!(y, y_expected, epsilon = 1e-9);
        let f = equilibrium_value(Bernoulli, &[a, b], 0, &[1], y).unwrap();
        assert!((f - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn equilibrium_root_matches_grid_scan() {
        let mu = [0.2, 0.5, 0.7];
        let y = equilibrium_root(Bernoulli, &mu, 0, &[1, 2]).unwrap();
        let sup = Bernoulli
            .divergence(0.2, 0.5)
            .min(Bernoulli.divergence(0.2, 0.7));
        let n = 1_000_000usize;
        let step = sup / n as f64;
        // F is increasing: locate the first grid point where it crosses 1,
        // refining coarsely first to keep the scan cheap.
        let mut idx = 0usize;
        let mut stride = 65_536usize;
        while stride > 0 {
            while idx + stride < n {
                let yy = (idx + stride) as f64 * step;
                if equilibrium_value(Bernoulli, &mu, 0, &[1, 2], yy).unwrap() < 1.0 {
                    idx += stride;
                } else {
                    break;
                }
            }
            stride /= 2;
        }
        let grid_root = (idx as f64 + 0.5) * step;
        assert!((y - grid_root).abs() <= step, "{y} vs {grid_root}");
    }

    #[test]
    fn equilibrium_errors() {
        assert!(equilibrium_root(Bernoulli, &[0.2, 0.5], 0, &[]).is_err());
        assert!(equilibrium_root(Bernoulli, &[0.2, 0.5], 0, &[0]).is_err());
        assert!(matches!(
            equilibrium_root(Bernoulli, &[0.2, 0.2], 0, &[1]),
            Err(Error::Ambiguous(_))
        ));
        let sup = kl(Bernoulli, 0.2, 0.5).unwrap();
        assert!(equilibrium_value(Bernoulli, &[0.2, 0.5], 0, &[1], sup).is_err());
    }

    #[test]
    fn confidence_factor() {
        let v = confidence_divergence(0.01).unwrap();
        assert_abs_diff_eq!(v, 0.98 * 99f64.ln(), epsilon = 1e-12);
        assert!(confidence_divergence(0.0).is_err());
    }

    fn family_and_pair() -> impl Strategy<Value = (ObservationFamily, f64, f64)> {
        prop_oneof![
            (0.01f64..0.99, 0.01f64..0.99).prop_map(|(a, b)| (Bernoulli, a, b)),
            (0.05f64..60.0, 0.05f64..60.0).prop_map(|(a, b)| (Poisson, a, b)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn kl_positive_off_diagonal((family, a, b) in family_and_pair()) {
            let v = kl(family, a, b).unwrap();
            if a == b {
                prop_assert_eq!(v, 0.0);
            } else {
                prop_assert!(v > 0.0);
            }
            prop_assert_eq!(kl(family, a, a).unwrap(), 0.0);
        }

        #[test]
        fn kl_convex_in_second_argument((family, a, b1) in family_and_pair(), t in 0.0f64..1.0) {
            let b2 = match family { Bernoulli => 0.01 + 0.98 * t, Poisson => 0.05 + 59.95 * t };
            let mid = kl(family, a, 0.5 * (b1 + b2)).unwrap();
            let avg = 0.5 * (kl(family, a, b1).unwrap() + kl(family, a, b2).unwrap());
            prop_assert!(mid <= avg + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn deviation_increasing_and_bounded((family, a, b) in family_and_pair()) {
            prop_assume!((a - b).abs() > 1e-3);
            let sup = kl(family, a, b).unwrap();
            let mut prev = 0.0;
            for i in 1..=100 {
                let x = 0.05 * i as f64 * (1.0 + 0.1 * i as f64);
                let g = info_deviation(family, a, b, x).unwrap();
                prop_assert!(g > prev);
                prop_assert!(g <= sup + 1e-12);
                prev = g;
            }
        }

        #[test]
        fn inverse_round_trip((family, a, b) in family_and_pair(), frac in 0.0f64..0.999) {
            prop_assume!((a - b).abs() > 1e-3);
            let y = frac * kl(family, a, b).unwrap();
            let x = info_deviation_inverse(family, a, b, y).unwrap();
            let back = info_deviation(family, a, b, x).unwrap();
            prop_assert!((back - y).abs() <= 1e-9, "y={} back={}", y, back);
        }

        #[test]
        fn equilibrium_strictly_increasing(
            target in 0.05f64..0.95,
            c1 in 0.05f64..0.95,
            c2 in 0.05f64..0.95,
            u in 0.01f64..0.98,
            v in 0.01f64..0.98,
        ) {
            prop_assume!((target - c1).abs() > 0.02 && (target - c2).abs() > 0.02);
            let mu = [target, c1, c2];
            let sup = min_divergence(Bernoulli, target, &[c1, c2]);
            let (y1, y2) = if u < v { (u * sup, v * sup) } else { (v * sup, u * sup) };
            prop_assume!(y2 - y1 > 1e-6 * sup);
            let f1 = equilibrium_value(Bernoulli, &mu, 0, &[1, 2], y1).unwrap();
            let f2 = equilibrium_value(Bernoulli, &mu, 0, &[1, 2], y2).unwrap();
            prop_assert!(f1 < f2);
            let root = equilibrium_root(Bernoulli, &mu, 0, &[1, 2]).unwrap();
            prop_assert!(root > 0.0 && root < sup);
        }
    }
}
