//! Packet-level scenarios: random load instances at a fixed total load.
//!
//! A scenario with `K` slices and per-slice average `a` distributes
//! `N = K a` unit loads over the slices uniformly at random, giving integer
//! loads that always sum to `N`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::divergence::ObservationFamily;
use crate::error::{Error, Result};
use crate::observe::rng_from_seed;
use crate::oracle::{correct_answers, Criterion, Instance};

/// Redraws allowed before [`draw_instance`] gives up.
pub const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadLevel {
    Low,
    Medium,
    High,
}

impl LoadLevel {
    pub const ALL: [LoadLevel; 3] = [Self::Low, Self::Medium, Self::High];

    /// Average load per slice, in packets per slot.
    pub fn per_slice_mean(self) -> u32 {
        match self {
            Self::Low => 17,
            Self::Medium => 23,
            Self::High => 30,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Low => "low",
            Self::Medium => "medium",
            Self::High => "high",
        }
    }
}

impl fmt::Display for LoadLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LoadLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(Self::Low),
            "medium" => Ok(Self::Medium),
            "high" => Ok(Self::High),
            other => Err(Error::Config(format!("unknown load level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketScenario {
    pub slices: usize,
    pub gamma: f64,
    pub family: ObservationFamily,
    pub load: LoadLevel,
    pub runs: usize,
    pub delta: f64,
}

impl PacketScenario {
    pub const DEFAULT_GAMMA: f64 = 24.0;

    pub fn new(slices: usize, load: LoadLevel) -> Self {
        Self {
            slices,
            gamma: Self::DEFAULT_GAMMA,
            family: ObservationFamily::Poisson,
            load,
            runs: 100,
            delta: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slices == 0 {
            return Err(Error::Config("scenario needs at least one slice".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("scenario needs at least one run".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!(
                "delta {} must lie in (0, 1)",
                self.delta
            )));
        }
        self.family.check(self.gamma).map_err(|_| {
            Error::Config(format!(
                "gamma {} is outside the {} domain",
                self.gamma, self.family
            ))
        })?;
        Ok(())
    }

    /// Total number of unit loads `N = K a`.
    pub fn total_units(&self) -> u32 {
        self.slices as u32 * self.load.per_slice_mean()
    }
}

/// Integer unit counts per slice, summing to `total`.
fn multinomial_counts<R: Rng + ?Sized>(slices: usize, total: u32, rng: &mut R) -> Vec<u32> {
    let mut counts = vec![0u32; slices];
    for _ in 0..total {
        counts[rng.random_range(0..slices)] += 1;
    }
    counts
}

fn to_means(scenario: &PacketScenario, counts: &[u32]) -> Vec<f64> {
    match scenario.family {
        ObservationFamily::Poisson => counts.iter().map(|&c| c as f64).collect(),
        // fraction of the total load, so the means land in (0, 1)
        ObservationFamily::Bernoulli => {
            let total = scenario.total_units() as f64;
            counts.iter().map(|&c| c as f64 / total).collect()
        }
    }
}

/// Draws one instance, redrawing whenever a load equals the threshold or
/// falls outside the family's domain (an empty slice).
pub fn draw_instance(scenario: &PacketScenario, seed: u64) -> Result<Instance> {
    draw_with(scenario, seed, |_| true)
}

/// Like [`draw_instance`], but additionally redraws instances on which the
/// criterion's target slice is not unique.
pub fn draw_instance_for(
    scenario: &PacketScenario,
    crit: Criterion,
    seed: u64,
) -> Result<Instance> {
    draw_with(scenario, seed, |inst| correct_answers(inst, crit).is_ok())
}

fn draw_with<F>(scenario: &PacketScenario, seed: u64, accept: F) -> Result<Instance>
where
    F: Fn(&Instance) -> bool,
{
    scenario.validate()?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_REDRAWS {
        let counts = multinomial_counts(scenario.slices, scenario.total_units(), &mut rng);
        let mu = to_means(scenario, &counts);
        if let Ok(inst) = Instance::new(mu, scenario.gamma, scenario.family) {
            if accept(&inst) {
                return Ok(inst);
            }
        }
    }
    Err(Error::InvalidInstance(format!(
        "no admissible instance after {MAX_REDRAWS} redraws"
    )))
}
