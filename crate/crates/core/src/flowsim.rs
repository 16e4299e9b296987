//! Flow-level discrete-event simulation.
//!
//! Flows arrive as a Poisson process, each with a rate drawn uniformly from
//! the rate support, and hold their slice for an exponential duration. At
//! every arrival the controller runs one admission episode against the
//! frozen slice loads (the sum of active flow rates) with threshold
//! `gamma = capacity - r`, then admits the flow to the returned slice or
//! blocks it.
//!
//! Decisions are instantaneous in flow time: measurement slots are counted
//! but do not advance the clock unless `slot_time` is set, in which case an
//! admitted flow starts holding only once its measurement period is over.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::E;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::divergence::{confidence_divergence, ObservationFamily, CLAMP_EPS};
use crate::error::{Error, Result};
use crate::glr::{compute_constant, ThresholdConfig};
use crate::observe::{derive_seed, rng_from_seed};
use crate::oracle::{admissible_answers, empirical_answer, oracle, Answer, Criterion, Instance};
use crate::tas::{run_episode, CapPolicy, EpisodeConfig, ForcedExploration, SamplerKind};

/// Perturbation applied to `gamma` when a load sits exactly on it.
pub const GAMMA_TIE_SHIFT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub slices: usize,
    /// Capacity of each slice, packets per slot.
    pub capacity: f64,
    /// Flow arrival intensity per time unit.
    pub arrival_rate: f64,
    /// Flow rates, drawn uniformly.
    pub rate_support: Vec<u32>,
    pub mean_duration: f64,
    pub delta: f64,
    /// Simulated time units.
    pub horizon: f64,
    pub seed: u64,
    /// Threshold constant; `None` uses the computed constant for `slices`.
    pub constant_c: Option<f64>,
    pub exploration: ForcedExploration,
    /// Slot cap per decision. A capped decision returns the easiest
    /// empirical answer at that point.
    pub max_decision_slots: u64,
    /// Flow time charged per measurement slot, if any.
    pub slot_time: Option<f64>,
    /// Segments used for batch-means confidence intervals.
    pub batches: usize,
    pub record_trace: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            slices: 3,
            capacity: 15.5,
            arrival_rate: 5.0,
            rate_support: (1..=10).collect(),
            mean_duration: 1.0,
            delta: 0.01,
            horizon: 1000.0,
            seed: 0,
            constant_c: None,
            exploration: ForcedExploration::Sqrt,
            max_decision_slots: 20_000,
            slot_time: None,
            batches: 10,
            record_trace: false,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.slices == 0 {
            return bad("flow simulation needs at least one slice".into());
        }
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return bad(format!("capacity {} must be positive", self.capacity));
        }
        if !(self.arrival_rate >= 0.0 && self.arrival_rate.is_finite()) {
            return bad(format!(
                "arrival rate {} must be nonnegative",
                self.arrival_rate
            ));
        }
        if self.rate_support.is_empty() || self.rate_support.contains(&0) {
            return bad("rate support must be a nonempty set of positive rates".into());
        }
        if !(self.mean_duration > 0.0 && self.mean_duration.is_finite()) {
            return bad(format!(
                "mean duration {} must be positive",
                self.mean_duration
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} must lie in (0, 1)", self.delta));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon {} must be positive", self.horizon));
        }
        if self.batches == 0 {
            return bad("at least one batch is required".into());
        }
        if self.max_decision_slots == 0 {
            return bad("decision slot cap must be positive".into());
        }
        if let Some(s) = self.slot_time {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("slot time {s} must be nonnegative"));
            }
        }
        Ok(())
    }

    /// Mean flow rate over the support.
    pub fn mean_rate(&self) -> f64 {
        self.rate_support.iter().map(|&r| r as f64).sum::<f64>() / self.rate_support.len() as f64
    }

    /// Offered load `rho = lambda * r_bar / (capacity * K)`.
    pub fn rho(&self) -> f64 {
        self.arrival_rate * self.mean_rate() / (self.capacity * self.slices as f64)
    }

    /// Arrival rate achieving offered load `rho`.
    pub fn arrival_rate_for(&self, rho: f64) -> f64 {
        rho * self.capacity * self.slices as f64 / self.mean_rate()
    }

    fn threshold(&self) -> Result<ThresholdConfig> {
        let c = match self.constant_c {
            Some(c) => c,
            None => compute_constant(self.slices)?,
        };
        ThresholdConfig::new(self.delta, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decider {
    /// Run an admission episode with the given sampler.
    Measured(SamplerKind),
    /// Decide from the true loads without measuring.
    PerfectInformation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TraceEvent {
    Arrival {
        time: f64,
        rate: u32,
        loads: Vec<u64>,
        /// Instance handed to the decider (`None` when blocked without one).
        instance_mu: Option<Vec<f64>>,
        answer: Answer,
        slots: u64,
    },
    Departure {
        time: f64,
        slice: usize,
        rate: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEstimate {
    pub mean: f64,
    pub ci_radius: f64,
    pub batches: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSimStats {
    pub rates: Vec<u32>,
    pub arrivals_by_rate: Vec<u64>,
    pub blocked_by_rate: Vec<u64>,
    /// Arrivals handed to a decider (excludes those blocked outright).
    pub decisions: u64,
    pub total_measurement_slots: u64,
    pub max_decision_slots: u64,
    /// Admissions that pushed a slice above its capacity.
    pub overload_events: u64,
    pub admitted: u64,
    /// Decisions whose answer is wrong for the frozen true loads.
    pub decision_errors: u64,
    /// Decisions ended by the slot cap.
    pub truncated_decisions: u64,
    pub gamma_perturbations: u64,
    /// Sum and count of `T(mu) d_B(delta, 1 - delta)` over decision states
    /// with a unique target.
    pub lower_bound_sum: f64,
    pub lower_bound_count: u64,
    pub blocking: BatchEstimate,
    pub rho: f64,
    pub trace: Option<Vec<TraceEvent>>,
}

impl FlowSimStats {
    pub fn arrivals(&self) -> u64 {
        self.arrivals_by_rate.iter().sum()
    }

    pub fn blocked(&self) -> u64 {
        self.blocked_by_rate.iter().sum()
    }

    pub fn blocking_probability(&self) -> f64 {
        ratio(self.blocked(), self.arrivals())
    }

    /// Blocking probability of flows with rate `r` (zero if none arrived).
    pub fn blocking_for_rate(&self, r: u32) -> f64 {
        match self.rates.iter().position(|&x| x == r) {
            Some(i) => ratio(self.blocked_by_rate[i], self.arrivals_by_rate[i]),
            None => 0.0,
        }
    }

    /// Mean measurement slots per arrival.
    pub fn mean_measurements(&self) -> f64 {
        ratio(self.total_measurement_slots, self.arrivals())
    }

    pub fn mean_lower_bound(&self) -> f64 {
        if self.lower_bound_count == 0 {
            0.0
        } else {
            self.lower_bound_sum / self.lower_bound_count as f64
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Departure {
    time: f64,
    seq: u64,
    slice: usize,
    rate: u32,
}

impl Eq for Departure {}

impl Ord for Departure {
    // reversed so that the max-heap pops the earliest departure
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Departure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Two-sided 95% batch-means interval.
pub fn batch_means(values: &[f64]) -> BatchEstimate {
    let b = values.len();
    let mean = values.iter().sum::<f64>() / b.max(1) as f64;
    let ci_radius = if b < 2 {
        f64::INFINITY
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, (b - 1) as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975);
        t * (var / b as f64).sqrt()
    };
    BatchEstimate {
        mean,
        ci_radius,
        batches: values.to_vec(),
    }
}

struct Decision {
    answer: Answer,
    slots: u64,
    truncated: bool,
}

/// Runs one flow-level simulation.
pub fn simulate_flows(cfg: &FlowConfig, crit: Criterion, decider: Decider) -> Result<FlowSimStats> {
    cfg.validate()?;
    let threshold = match decider {
        Decider::Measured(_) => Some(cfg.threshold()?),
        Decider::PerfectInformation => None,
    };
    let conf = confidence_divergence(cfg.delta)?;

    let mut rng = rng_from_seed(derive_seed(cfg.seed, 0));
    let duration = Exp::new(1.0 / cfg.mean_duration).map_err(|e| Error::Config(e.to_string()))?;
    let interarrival = if cfg.arrival_rate > 0.0 {
        Some(Exp::new(cfg.arrival_rate).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };

    let k_count = cfg.slices;
    let rates = cfg.rate_support.clone();
    let mut stats = FlowSimStats {
        rates: rates.clone(),
        arrivals_by_rate: vec![0; rates.len()],
        blocked_by_rate: vec![0; rates.len()],
        decisions: 0,
        total_measurement_slots: 0,
        max_decision_slots: 0,
        overload_events: 0,
        admitted: 0,
        decision_errors: 0,
        truncated_decisions: 0,
        gamma_perturbations: 0,
        lower_bound_sum: 0.0,
        lower_bound_count: 0,
        blocking: batch_means(&[]),
        rho: cfg.rho(),
        trace: cfg.record_trace.then(Vec::new),
    };
    let mut batch_arrivals = vec![0u64; cfg.batches];
    let mut batch_blocked = vec![0u64; cfg.batches];

    let mut loads = vec![0u64; k_count];
    let mut departures: BinaryHeap<Departure> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut arrival_index = 0u64;
    let mut next_arrival = interarrival.map_or(f64::INFINITY, |d| d.sample(&mut rng));

    loop {
        let next_departure = departures.peek().map_or(f64::INFINITY, |d| d.time);
        if next_departure <= next_arrival {
            if next_departure > cfg.horizon {
                break;
            }
            let d = departures.pop().expect("peeked departure");
            loads[d.slice] -= d.rate as u64;
            if let Some(trace) = stats.trace.as_mut() {
                trace.push(TraceEvent::Departure {
                    time: d.time,
                    slice: d.slice,
                    rate: d.rate,
                });
            }
            continue;
        }
        if next_arrival > cfg.horizon {
            break;
        }
        let now = next_arrival;
        next_arrival = now + interarrival.map_or(f64::INFINITY, |d| d.sample(&mut rng));

        let class = rng.random_range(0..rates.len());
        let r = rates[class];
        let hold = duration.sample(&mut rng);
        let batch = ((now / cfg.horizon * cfg.batches as f64) as usize).min(cfg.batches - 1);
        stats.arrivals_by_rate[class] += 1;
        batch_arrivals[batch] += 1;

        let mut gamma = cfg.capacity - r as f64;
        let mut instance_mu = None;
        let decision = if gamma <= 0.0 {
            Decision {
                answer: Answer::Reject,
                slots: 0,
                truncated: false,
            }
        } else {
            if loads.iter().any(|&l| l as f64 == gamma) {
                gamma -= GAMMA_TIE_SHIFT;
                stats.gamma_perturbations += 1;
            }
            let mu: Vec<f64> = loads.iter().map(|&l| (l as f64).max(CLAMP_EPS)).collect();
            let inst = Instance::new(mu, gamma, ObservationFamily::Poisson)?;
            if let Ok(o) = oracle(&inst, crit) {
                stats.lower_bound_sum += o.characteristic_time * conf;
                stats.lower_bound_count += 1;
            }
            let decision = match (decider, threshold) {
                (Decider::Measured(sampler), Some(th)) => {
                    let mut ecfg = EpisodeConfig::new(th, sampler);
                    ecfg.max_slots = cfg.max_decision_slots;
                    ecfg.on_cap = CapPolicy::Decide;
                    ecfg.exploration = cfg.exploration;
                    let res =
                        run_episode(&inst, crit, &ecfg, derive_seed(cfg.seed, arrival_index + 1))?;
                    Decision {
                        answer: res.answer,
                        slots: res.tau,
                        truncated: res.truncated,
                    }
                }
                _ => Decision {
                    answer: empirical_answer(inst.mu(), gamma, crit),
                    slots: 0,
                    truncated: false,
                },
            };
            stats.decisions += 1;
            stats.total_measurement_slots += decision.slots;
            stats.max_decision_slots = stats.max_decision_slots.max(decision.slots);
            if decision.truncated {
                stats.truncated_decisions += 1;
            }
            if !admissible_answers(&inst, crit).contains(&decision.answer) {
                stats.decision_errors += 1;
            }
            instance_mu = Some(inst.mu().to_vec());
            decision
        };
        arrival_index += 1;

        if let Some(trace) = stats.trace.as_mut() {
            trace.push(TraceEvent::Arrival {
                time: now,
                rate: r,
                loads: loads.clone(),
                instance_mu,
                answer: decision.answer,
                slots: decision.slots,
            });
        }

        match decision.answer {
            Answer::Reject => {
                stats.blocked_by_rate[class] += 1;
                batch_blocked[batch] += 1;
            }
            Answer::Slice(k) => {
                if (loads[k] + r as u64) as f64 > cfg.capacity {
                    stats.overload_events += 1;
                }
                loads[k] += r as u64;
                stats.admitted += 1;
                let start = now + cfg.slot_time.map_or(0.0, |s| s * decision.slots as f64);
                seq += 1;
                departures.push(Departure {
                    time: start + hold,
                    seq,
                    slice: k,
                    rate: r,
                });
            }
        }
    }

    let per_batch: Vec<f64> = batch_blocked
        .iter()
        .zip(&batch_arrivals)
        .map(|(&b, &a)| ratio(b, a))
        .collect();
    stats.blocking = batch_means(&per_batch);
    Ok(stats)
}

/// Erlang-B blocking probability for `servers` servers and offered load
/// `load`, by the standard recursion.
pub fn erlang_b(servers: u32, load: f64) -> f64 {
    let mut b = 1.0;
    for n in 1..=servers {
        b = load * b / (n as f64 + load * b);
    }
    b
}

/// Practical threshold constant (`C = e`) used by the experiment presets.
pub const PRACTICAL_CONSTANT: f64 = E;
