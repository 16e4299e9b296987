//! Correct answers, characteristic times and optimal measurement proportions.
//!
//! For an instance `(mu, gamma)` and a criterion the oracle returns the
//! characteristic time `T` and the proportions `w*` solving
//!
//! ```text
//! 1 / T = max_w  inf_{lambda in Alt} sum_k w_k d(mu_k, lambda_k)
//! ```
//!
//! The inner infimum has a closed form for every criterion (see
//! [`inner_value`]); the outer maximization reduces to a one-dimensional
//! search over the common information level `z` attained by the binding
//! alternatives.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::divergence::{
    deviation_inverse_unchecked, pairwise_cost, solve_equilibrium, ObservationFamily,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Admit on any slice whose load is below the threshold.
    AnyAvailable,
    /// Admit on the most loaded available slice.
    Packing,
    /// Admit on the least loaded slice, if it is available.
    LeastLoaded,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Self::AnyAvailable, Self::Packing, Self::LeastLoaded];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::AnyAvailable => "any-available",
            Self::Packing => "packing",
            Self::LeastLoaded => "least-loaded",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "any" | "any-available" | "anyavailable" => Ok(Self::AnyAvailable),
            "packing" | "pack" => Ok(Self::Packing),
            "least-loaded" | "leastloaded" | "ll" => Ok(Self::LeastLoaded),
            other => Err(Error::Config(format!("unknown criterion `{other}`"))),
        }
    }
}

/// Decision of an admission episode. Slices are stored 0-based and
/// displayed 1-based, so that `0` always reads as "reject".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "usize", into = "usize")]
pub enum Answer {
    Reject,
    Slice(usize),
}

impl Answer {
    /// Parses the external encoding `0 = reject`, `k = slice k` (1-based).
    pub fn from_code(code: usize) -> Self {
        match code {
            0 => Self::Reject,
            k => Self::Slice(k - 1),
        }
    }

    pub fn code(self) -> usize {
        match self {
            Self::Reject => 0,
            Self::Slice(k) => k + 1,
        }
    }

    pub fn slice(self) -> Option<usize> {
        match self {
            Self::Reject => None,
            Self::Slice(k) => Some(k),
        }
    }
}

impl From<usize> for Answer {
    fn from(code: usize) -> Self {
        Self::from_code(code)
    }
}

impl From<Answer> for usize {
    fn from(a: Answer) -> Self {
        a.code()
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Ground truth of one decision episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    mu: Vec<f64>,
    gamma: f64,
    family: ObservationFamily,
}

impl Instance {
    pub fn new(mu: Vec<f64>, gamma: f64, family: ObservationFamily) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one slice is required".into(),
            ));
        }
        family.check(gamma).map_err(|_| {
            Error::InvalidInstance(format!("threshold {gamma} is outside the {family} domain"))
        })?;
        for (k, &m) in mu.iter().enumerate() {
            family.check(m)?;
            if m == gamma {
                return Err(Error::InvalidInstance(format!(
                    "slice {} has load equal to the threshold {gamma}",
                    k + 1
                )));
            }
        }
        Ok(Self { mu, gamma, family })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn family(&self) -> ObservationFamily {
        self.family
    }

    pub fn num_slices(&self) -> usize {
        self.mu.len()
    }

    /// Smallest load `mu_lo`.
    pub fn min_load(&self) -> f64 {
        self.mu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest load strictly below the threshold, if any.
    pub fn max_available_load(&self) -> Option<f64> {
        self.mu
            .iter()
            .copied()
            .filter(|&m| m < self.gamma)
            .fold(None, |acc, m| Some(acc.map_or(m, |a: f64| a.max(m))))
    }

    pub fn regime(&self) -> Regime {
        regime_of(&self.mu, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Every slice is at or above the threshold.
    NoAvailable,
    Available,
}

fn regime_of(mu: &[f64], gamma: f64) -> Regime {
    if mu.iter().any(|&m| m < gamma) {
        Regime::Available
    } else {
        Regime::NoAvailable
    }
}

/// Point of the probability simplex over slices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() || w.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::Config(format!(
                "weights {w:?} must be finite and nonnegative"
            )));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self(w))
    }

    /// Normalizes nonnegative components; infinite components take all the
    /// mass, shared equally.
    pub fn from_unnormalized(components: &[f64]) -> Self {
        let infinite = components.iter().filter(|c| c.is_infinite()).count();
        if infinite > 0 {
            let share = 1.0 / infinite as f64;
            return Self(
                components
                    .iter()
                    .map(|c| if c.is_infinite() { share } else { 0.0 })
                    .collect(),
            );
        }
        let total: f64 = components.iter().sum();
        Self(components.iter().map(|c| c / total).collect())
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub characteristic_time: f64,
    pub weights: WeightVector,
    pub easiest_answers: Vec<Answer>,
    pub regime: Regime,
    /// Answer whose alternative set the weights are computed against.
    pub target: Answer,
    /// Balanced information level `z` (packing and least-loaded with an
    /// available slice only).
    pub level: Option<f64>,
}

/// Relative distance under which empirical means are treated as tied by the
/// online oracle. Running means of equal sample averages can differ in the
/// last bits, and divergences between such means are pure rounding noise.
pub const EMPIRICAL_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TiePolicy {
    Strict,
    LowestIndex,
}

/// Indices attaining the extremum of `key` among `candidates`.
fn extremal<I>(mu: &[f64], candidates: I, max: bool) -> Vec<usize>
where
    I: IntoIterator<Item = usize>,
{
    let mut best: Vec<usize> = Vec::new();
    for k in candidates {
        match best.first() {
            None => best.push(k),
            Some(&b) => {
                let ord = mu[k].partial_cmp(&mu[b]).unwrap_or(Ordering::Equal);
                let better = if max {
                    ord == Ordering::Greater
                } else {
                    ord == Ordering::Less
                };
                if better {
                    best.clear();
                    best.push(k);
                } else if ord == Ordering::Equal {
                    best.push(k);
                }
            }
        }
    }
    best
}

/// Target slices of the criterion in the available regime (all tied
/// candidates, lowest index first). Empty for any-available.
fn target_candidates(mu: &[f64], gamma: f64, crit: Criterion) -> Vec<usize> {
    match crit {
        Criterion::AnyAvailable => Vec::new(),
        Criterion::Packing => extremal(mu, (0..mu.len()).filter(|&k| mu[k] < gamma), true),
        Criterion::LeastLoaded => extremal(mu, 0..mu.len(), false),
    }
}

fn pick(candidates: Vec<usize>, policy: TiePolicy) -> Result<usize> {
    if candidates.len() > 1 && policy == TiePolicy::Strict {
        return Err(Error::Ambiguous(candidates));
    }
    Ok(candidates[0])
}

fn easiest(mu: &[f64], gamma: f64, crit: Criterion, policy: TiePolicy) -> Result<Vec<Answer>> {
    if regime_of(mu, gamma) == Regime::NoAvailable {
        return Ok(vec![Answer::Reject]);
    }
    match crit {
        Criterion::AnyAvailable => Ok(extremal(mu, 0..mu.len(), false)
            .into_iter()
            .map(Answer::Slice)
            .collect()),
        _ => Ok(vec![Answer::Slice(pick(
            target_candidates(mu, gamma, crit),
            policy,
        )?)]),
    }
}

/// Set `C(mu)` of correct answers, in increasing order.
pub fn correct_answers(inst: &Instance, crit: Criterion) -> Result<Vec<Answer>> {
    let (mu, gamma) = (inst.mu(), inst.gamma());
    if inst.regime() == Regime::NoAvailable {
        return Ok(vec![Answer::Reject]);
    }
    match crit {
        Criterion::AnyAvailable => Ok((0..mu.len())
            .filter(|&k| mu[k] < gamma)
            .map(Answer::Slice)
            .collect()),
        _ => Ok(vec![Answer::Slice(pick(
            target_candidates(mu, gamma, crit),
            TiePolicy::Strict,
        )?)]),
    }
}

/// Like [`correct_answers`] but accepts every tied target. Used to score
/// episodes on instances where the uniqueness hypothesis fails.
pub fn admissible_answers(inst: &Instance, crit: Criterion) -> Vec<Answer> {
    let (mu, gamma) = (inst.mu(), inst.gamma());
    if inst.regime() == Regime::NoAvailable {
        return vec![Answer::Reject];
    }
    match crit {
        Criterion::AnyAvailable => (0..mu.len())
            .filter(|&k| mu[k] < gamma)
            .map(Answer::Slice)
            .collect(),
        _ => target_candidates(mu, gamma, crit)
            .into_iter()
            .map(Answer::Slice)
            .collect(),
    }
}

/// Easiest answers `C*(mu)`: the answers attaining the characteristic time.
pub fn easiest_answers(inst: &Instance, crit: Criterion) -> Result<Vec<Answer>> {
    easiest(inst.mu(), inst.gamma(), crit, TiePolicy::Strict)
}

/// Whether `answer` is correct for loads `mu`, ties tolerated. A load equal
/// to the threshold counts as unavailable.
pub(crate) fn is_admissible(mu: &[f64], gamma: f64, crit: Criterion, answer: Answer) -> bool {
    match answer {
        Answer::Reject => mu.iter().all(|&m| m >= gamma),
        Answer::Slice(l) => {
            if l >= mu.len() || mu[l] >= gamma {
                return false;
            }
            match crit {
                Criterion::AnyAvailable => true,
                Criterion::Packing => mu.iter().all(|&m| m >= gamma || m <= mu[l]),
                Criterion::LeastLoaded => mu.iter().all(|&m| m >= mu[l]),
            }
        }
    }
}

/// Closed-form `inf_{lambda in Alt(answer)} sum_k w_k d(mu_k, lambda_k)` for
/// an admissible answer. `w` may be proportions or raw counts.
///
/// Comparators are the slices strictly on the far side of the target, so a
/// slice tied with the target (up to [`EMPIRICAL_TIE_TOL`]) is not one. On
/// a valid instance the target is unique and this is the exact infimum.
pub(crate) fn alt_infimum(
    family: ObservationFamily,
    mu: &[f64],
    gamma: f64,
    w: &[f64],
    crit: Criterion,
    answer: Answer,
) -> f64 {
    let to_threshold = |k: usize| w[k] * family.divergence(mu[k], gamma);
    match answer {
        Answer::Reject => (0..mu.len())
            .map(to_threshold)
            .fold(f64::INFINITY, f64::min),
        Answer::Slice(l) => {
            let own = to_threshold(l);
            let tol = EMPIRICAL_TIE_TOL * mu[l].abs().max(1.0);
            let distinct = |k: usize| k != l && (mu[k] - mu[l]).abs() > tol;
            match crit {
                Criterion::AnyAvailable => own,
                Criterion::Packing => (0..mu.len())
                    .filter(|&k| distinct(k) || (k != l && mu[k] >= gamma))
                    .map(|k| {
                        if mu[k] >= gamma {
                            to_threshold(k)
                        } else {
                            pairwise_cost(family, w[l], mu[l], w[k], mu[k])
                        }
                    })
                    .fold(own, f64::min),
                Criterion::LeastLoaded => (0..mu.len())
                    .filter(|&k| distinct(k))
                    .map(|k| pairwise_cost(family, w[l], mu[l], w[k], mu[k]))
                    .fold(own, f64::min),
            }
        }
    }
}

/// Inner value `inf_{lambda in Alt(answer)} D(w, mu, lambda)`.
pub fn inner_value(
    inst: &Instance,
    crit: Criterion,
    answer: Answer,
    w: &WeightVector,
) -> Result<f64> {
    if w.as_slice().len() != inst.num_slices() {
        return Err(Error::Config(format!(
            "weight vector has {} entries for {} slices",
            w.as_slice().len(),
            inst.num_slices()
        )));
    }
    if !correct_answers(inst, crit)?.contains(&answer) {
        return Err(Error::InvalidAnswer(answer));
    }
    Ok(alt_infimum(
        inst.family(),
        inst.mu(),
        inst.gamma(),
        w.as_slice(),
        crit,
        answer,
    ))
}

struct Allocation {
    components: Vec<f64>,
    target: Answer,
    level: Option<f64>,
}

/// Unnormalized optimal components; their sum is the characteristic time.
fn allocate(
    family: ObservationFamily,
    mu: &[f64],
    gamma: f64,
    crit: Criterion,
    policy: TiePolicy,
) -> Result<Allocation> {
    let inv_threshold = |k: usize| 1.0 / family.divergence(mu[k], gamma);
    let k_count = mu.len();

    if regime_of(mu, gamma) == Regime::NoAvailable {
        return Ok(Allocation {
            components: (0..k_count).map(inv_threshold).collect(),
            target: Answer::Reject,
            level: None,
        });
    }

    let target = match crit {
        Criterion::AnyAvailable => extremal(mu, 0..k_count, false)[0],
        _ => pick(target_candidates(mu, gamma, crit), policy)?,
    };
    let mut components = vec![0.0; k_count];
    if crit == Criterion::AnyAvailable {
        components[target] = inv_threshold(target);
        return Ok(Allocation {
            components,
            target: Answer::Slice(target),
            level: None,
        });
    }

    let m = mu[target];
    let (comparators, above): (Vec<usize>, Vec<usize>) = match crit {
        Criterion::Packing => (
            (0..k_count)
                .filter(|&k| k != target && mu[k] < gamma)
                .collect(),
            (0..k_count).filter(|&k| mu[k] >= gamma).collect(),
        ),
        _ => ((0..k_count).filter(|&k| k != target).collect(), Vec::new()),
    };
    let is_tied = |k: usize| match policy {
        TiePolicy::Strict => mu[k] == m,
        TiePolicy::LowestIndex => (mu[k] - m).abs() <= EMPIRICAL_TIE_TOL * m.abs().max(1.0),
    };
    let (tied, distinct): (Vec<usize>, Vec<usize>) = comparators.iter().partition(|&&k| is_tied(k));

    let own = family.divergence(m, gamma);
    let z = if distinct.is_empty() {
        own
    } else {
        let means: Vec<f64> = distinct.iter().map(|&k| mu[k]).collect();
        solve_equilibrium(family, m, &means)?.min(own)
    };

    components[target] = 1.0 / z;
    for &k in &tied {
        components[k] = 1.0 / z;
    }
    for &k in &distinct {
        components[k] = deviation_inverse_unchecked(family, m, mu[k], z)? / z;
    }
    for &k in &above {
        components[k] = inv_threshold(k);
    }
    Ok(Allocation {
        components,
        target: Answer::Slice(target),
        level: Some(z),
    })
}

fn finish(alloc: Allocation, easiest_answers: Vec<Answer>, regime: Regime) -> OracleResult {
    let characteristic_time: f64 = alloc.components.iter().sum();
    OracleResult {
        characteristic_time,
        weights: WeightVector::from_unnormalized(&alloc.components),
        easiest_answers,
        regime,
        target: alloc.target,
        level: alloc.level,
    }
}

/// Characteristic time, optimal proportions and easiest answers.
pub fn oracle(inst: &Instance, crit: Criterion) -> Result<OracleResult> {
    let alloc = allocate(
        inst.family(),
        inst.mu(),
        inst.gamma(),
        crit,
        TiePolicy::Strict,
    )?;
    let answers = easiest_answers(inst, crit)?;
    Ok(finish(alloc, answers, inst.regime()))
}

/// Oracle on empirical means, which need not form a valid [`Instance`]:
/// loads may tie with each other or sit on the threshold. Ties resolve to
/// the lowest index and a load equal to the threshold counts as
/// unavailable. Means must already be clamped into the family's domain.
pub fn empirical_oracle(
    family: ObservationFamily,
    mu: &[f64],
    gamma: f64,
    crit: Criterion,
) -> Result<OracleResult> {
    let alloc = allocate(family, mu, gamma, crit, TiePolicy::LowestIndex)?;
    let answers = easiest(mu, gamma, crit, TiePolicy::LowestIndex)?;
    Ok(finish(alloc, answers, regime_of(mu, gamma)))
}

/// `min C*(mu)` with lowest-index tie breaking; cheaper than a full oracle
/// call.
pub fn empirical_answer(mu: &[f64], gamma: f64, crit: Criterion) -> Answer {
    if regime_of(mu, gamma) == Regime::NoAvailable {
        return Answer::Reject;
    }
    match crit {
        Criterion::AnyAvailable => Answer::Slice(extremal(mu, 0..mu.len(), false)[0]),
        _ => Answer::Slice(target_candidates(mu, gamma, crit)[0]),
    }
}
