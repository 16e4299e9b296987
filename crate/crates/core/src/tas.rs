//! Track-and-Stop and the round-robin baseline.
//!
//! Both samplers share the stopping rule (GLR statistic against the
//! threshold) and the decision rule (easiest empirical answer); they differ
//! only in which slice is measured next.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glr::{glr_statistic, threshold, EmpiricalState, ThresholdConfig};
use crate::observe::{draw_observation, rng_from_seed};
use crate::oracle::{
    admissible_answers, empirical_answer, empirical_oracle, Answer, Criterion, Instance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    TrackAndStop,
    RoundRobin,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TrackAndStop => "tas",
            Self::RoundRobin => "uniform",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tas" | "track-and-stop" | "trackandstop" => Ok(Self::TrackAndStop),
            "uniform" | "round-robin" | "roundrobin" | "rr" => Ok(Self::RoundRobin),
            other => Err(Error::Config(format!("unknown sampler `{other}`"))),
        }
    }
}

/// What to do when an episode reaches the slot cap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapPolicy {
    /// Return [`Error::Timeout`].
    #[default]
    Fail,
    /// Stop and return the current easiest empirical answer, flagged as
    /// truncated.
    Decide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub threshold: ThresholdConfig,
    pub sampler: SamplerKind,
    pub max_slots: u64,
    pub on_cap: CapPolicy,
    pub record_trajectory: bool,
    pub exploration: ForcedExploration,
}

/// Count floor below which a slice is measured regardless of tracking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcedExploration {
    /// `n_k < sqrt(t)`.
    #[default]
    Sqrt,
    /// `n_k < sqrt(t) - K/2`, the D-tracking floor.
    SqrtMinusHalfK,
}

impl ForcedExploration {
    fn floor(self, t: u64, k: usize) -> f64 {
        match self {
            Self::Sqrt => (t as f64).sqrt(),
            Self::SqrtMinusHalfK => (t as f64).sqrt() - 0.5 * k as f64,
        }
    }
}

impl EpisodeConfig {
    pub const DEFAULT_MAX_SLOTS: u64 = 100_000_000;

    pub fn new(threshold: ThresholdConfig, sampler: SamplerKind) -> Self {
        Self {
            threshold,
            sampler,
            max_slots: Self::DEFAULT_MAX_SLOTS,
            on_cap: CapPolicy::Fail,
            record_trajectory: false,
            exploration: ForcedExploration::Sqrt,
        }
    }
}

/// One measurement slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based slot index.
    pub t: u64,
    pub slice: usize,
    pub observation: f64,
    /// `Q(t)` evaluated before this measurement.
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub answer: Answer,
    /// Number of measured slots.
    pub tau: u64,
    /// Whether `answer` is correct for the true loads (any tied target is
    /// accepted).
    pub correct: bool,
    pub counts_final: Vec<u64>,
    pub means_final: Vec<f64>,
    /// Set when the slot cap forced the decision.
    pub truncated: bool,
    /// Statistic and threshold at the stopping check.
    pub final_statistic: f64,
    pub final_threshold: f64,
    pub trajectory: Option<Vec<Step>>,
}

/// Sampling rule of Track-and-Stop for the upcoming slot `t = sum n + 1`.
///
/// Forced exploration picks the least measured slice while some count is
/// below `sqrt(t)`; otherwise the slice maximizing `t w_k - n_k` is
/// tracked. Ties go to the lowest index.
pub fn select_slice(state: &EmpiricalState, weights: &[f64]) -> usize {
    let t = state.total() + 1;
    if let Some(k) = forced_slice(state, t, ForcedExploration::Sqrt) {
        return k;
    }
    tracked_slice(state, weights, t)
}

fn forced_slice(state: &EmpiricalState, t: u64, rule: ForcedExploration) -> Option<usize> {
    let floor = rule.floor(t, state.num_slices());
    if state.counts.iter().any(|&n| (n as f64) < floor) {
        Some(argmin_count(&state.counts))
    } else {
        None
    }
}

fn argmin_count(counts: &[u64]) -> usize {
    let mut best = 0;
    for (k, &n) in counts.iter().enumerate() {
        if n < counts[best] {
            best = k;
        }
    }
    best
}

fn tracked_slice(state: &EmpiricalState, weights: &[f64], t: u64) -> usize {
    let tf = t as f64;
    let mut best = 0;
    let mut best_gap = f64::NEG_INFINITY;
    for (k, (&w, &n)) in weights.iter().zip(&state.counts).enumerate() {
        let gap = tf * w - n as f64;
        if gap > best_gap {
            best_gap = gap;
            best = k;
        }
    }
    best
}

/// Runs one admission episode against the true instance.
pub fn run_episode(
    inst: &Instance,
    crit: Criterion,
    cfg: &EpisodeConfig,
    seed: u64,
) -> Result<EpisodeResult> {
    let family = inst.family();
    let gamma = inst.gamma();
    let k_count = inst.num_slices();
    let mut rng = rng_from_seed(seed);
    let mut state = EmpiricalState::new(k_count);
    let mut trajectory = cfg.record_trajectory.then(Vec::new);

    let mut t: u64 = 1;
    loop {
        let mu_hat = state.clamped_means(family);
        let candidate = empirical_answer(&mu_hat, gamma, crit);
        let q = glr_statistic(&state, gamma, family, crit, candidate);
        let f = threshold(&cfg.threshold, t);
        let stop = q > f;
        let truncated = !stop && t > cfg.max_slots;
        if truncated && cfg.on_cap == CapPolicy::Fail {
            return Err(Error::Timeout { cap: cfg.max_slots });
        }
        if stop || truncated {
            let correct = admissible_answers(inst, crit).contains(&candidate);
            return Ok(EpisodeResult {
                answer: candidate,
                tau: t - 1,
                correct,
                counts_final: state.counts,
                means_final: state.means,
                truncated,
                final_statistic: q,
                final_threshold: f,
                trajectory,
            });
        }

        let slice = match cfg.sampler {
            SamplerKind::RoundRobin => ((t - 1) % k_count as u64) as usize,
            SamplerKind::TrackAndStop => match forced_slice(&state, t, cfg.exploration) {
                Some(k) => k,
                None => {
                    let weights = empirical_oracle(family, &mu_hat, gamma, crit)?.weights;
                    tracked_slice(&state, weights.as_slice(), t)
                }
            },
        };
        let x = draw_observation(family, inst.mu()[slice], &mut rng);
        state.update(slice, x);
        if let Some(traj) = trajectory.as_mut() {
            traj.push(Step {
                t,
                slice,
                observation: x,
                statistic: q,
                threshold: f,
            });
        }
        t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::ObservationFamily::{Bernoulli, Poisson};
    use std::f64::consts::E;

    #[test]
    fn first_slot_is_forced_to_lowest_index() {
        let s = EmpiricalState::new(3);
        assert_eq!(select_slice(&s, &[0.2, 0.3, 0.5]), 0);
    }

    #[test]
    fn tracking_picks_largest_deficit() {
        let s = EmpiricalState::from_parts(vec![100, 100], vec![0.1, 0.2]).unwrap();
        assert_eq!(select_slice(&s, &[1.0, 0.0]), 0);
        assert_eq!(select_slice(&s, &[0.0, 1.0]), 1);
        // equal deficits go to the lowest index
        assert_eq!(select_slice(&s, &[0.5, 0.5]), 0);
    }

    #[test]
    fn tracking_converges_to_fixed_weights() {
        let w = [0.7, 0.3];
        let mut s = EmpiricalState::new(2);
        for _ in 0..10_000 {
            let k = select_slice(&s, &w);
            s.update(k, 0.0);
        }
        let share = s.counts[0] as f64 / 10_000.0;
        assert!((0.65..=0.72).contains(&share), "{share}");
    }

    #[test]
    fn single_slice_reject() {
        let inst = Instance::new(vec![0.9], 0.1, Bernoulli).unwrap();
        let cfg = EpisodeConfig::new(
            ThresholdConfig::new(0.05, E).unwrap(),
            SamplerKind::TrackAndStop,
        );
        let r = run_episode(&inst, Criterion::Packing, &cfg, 3).unwrap();
        assert_eq!(r.answer, Answer::Reject);
        assert!(r.tau >= 1);
        assert!(r.correct);
        assert_eq!(r.counts_final, vec![r.tau]);
    }

    #[test]
    fn cap_policies() {
        // gamma right next to the load: the episode cannot stop quickly
        let inst = Instance::new(vec![20.0, 20.5], 20.25, Poisson).unwrap();
        let mut cfg = EpisodeConfig::new(
            ThresholdConfig::new(0.01, E).unwrap(),
            SamplerKind::RoundRobin,
        );
        cfg.max_slots = 50;
        assert_eq!(
            run_episode(&inst, Criterion::AnyAvailable, &cfg, 1),
            Err(Error::Timeout { cap: 50 })
        );
        cfg.on_cap = CapPolicy::Decide;
        let r = run_episode(&inst, Criterion::AnyAvailable, &cfg, 1).unwrap();
        assert!(r.truncated);
        assert_eq!(r.tau, 50);
    }

    #[test]
    fn round_robin_cycles() {
        let inst = Instance::new(vec![0.2, 0.4, 0.8], 0.5, Bernoulli).unwrap();
        let mut cfg = EpisodeConfig::new(
            ThresholdConfig::new(0.1, E).unwrap(),
            SamplerKind::RoundRobin,
        );
        cfg.record_trajectory = true;
        let r = run_episode(&inst, Criterion::Packing, &cfg, 5).unwrap();
        for step in r.trajectory.unwrap() {
            assert_eq!(step.slice as u64, (step.t - 1) % 3);
        }
    }

    #[test]
    fn sampler_names_round_trip() {
        for s in [SamplerKind::TrackAndStop, SamplerKind::RoundRobin] {
            assert_eq!(s.as_str().parse::<SamplerKind>().unwrap(), s);
        }
        assert!("greedy".parse::<SamplerKind>().is_err());
    }
}
