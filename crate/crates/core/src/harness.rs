//! Experiment configuration, batch execution and CSV tables.
//!
//! A configuration is one TOML file with a top-level `version = 1` and
//! optional sections `[threshold]`, `[instance]`, `[packet]`, `[sweep]` and
//! `[flow]`. Every command reads only the sections it needs; missing keys
//! take their defaults.
//!
//! Work items are fanned out over a rayon pool and collected by index, so
//! the tables do not depend on the number of workers.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{confidence_divergence, ObservationFamily};
use crate::envs::{draw_instance_for, LoadLevel, PacketScenario, MAX_REDRAWS};
use crate::error::{Error, Result};
use crate::flowsim::{batch_means, simulate_flows, Decider, FlowConfig};
use crate::glr::{compute_constant, ThresholdConfig};
use crate::observe::derive_seed;
use crate::oracle::{oracle, Criterion, Instance, Regime};
use crate::tas::{run_episode, EpisodeConfig, ForcedExploration, SamplerKind};

pub const CONFIG_VERSION: u32 = 1;

/// Grid limits accepted by the delta sweep.
pub const SWEEP_DELTA_RANGE: (f64, f64) = (1e-7, 1e-2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    LowerBound,
    Episode,
    PacketBench,
    DeltaSweep,
    FlowBench,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Self::LowerBound,
        Self::Episode,
        Self::PacketBench,
        Self::DeltaSweep,
        Self::FlowBench,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LowerBound => "lower-bound",
            Self::Episode => "episode",
            Self::PacketBench => "packet-bench",
            Self::DeltaSweep => "delta-sweep",
            Self::FlowBench => "flow-bench",
        }
    }

    /// Bench commands refuse to run without an explicit seed.
    pub fn needs_seed(self) -> bool {
        matches!(self, Self::PacketBench | Self::DeltaSweep | Self::FlowBench)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: Option<u64>,
    /// Worker threads; `None` or `0` uses all cores.
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub threshold: ThresholdSection,
    pub instance: InstanceSection,
    pub packet: PacketSection,
    pub sweep: SweepSection,
    pub flow: FlowSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: None,
            jobs: None,
            out: None,
            threshold: ThresholdSection::default(),
            instance: InstanceSection::default(),
            packet: PacketSection::default(),
            sweep: SweepSection::default(),
            flow: FlowSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    pub delta: f64,
    /// Overrides the computed threshold constant.
    pub constant_c: Option<f64>,
    pub exploration: ForcedExploration,
    pub max_slots: u64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self {
            delta: 0.01,
            constant_c: None,
            exploration: ForcedExploration::Sqrt,
            max_slots: EpisodeConfig::DEFAULT_MAX_SLOTS,
        }
    }
}

impl ThresholdSection {
    fn config(&self, delta: f64, slices: usize) -> Result<ThresholdConfig> {
        let c = match self.constant_c {
            Some(c) => c,
            None => compute_constant(slices)?,
        };
        ThresholdConfig::new(delta, c)
    }

    fn episode(&self, delta: f64, slices: usize, sampler: SamplerKind) -> Result<EpisodeConfig> {
        let mut cfg = EpisodeConfig::new(self.config(delta, slices)?, sampler);
        cfg.max_slots = self.max_slots;
        cfg.exploration = self.exploration;
        Ok(cfg)
    }
}

/// Single instance for `lower-bound` and `episode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSection {
    pub mu: Vec<f64>,
    pub gamma: f64,
    pub family: ObservationFamily,
    pub criteria: Vec<Criterion>,
    pub sampler: SamplerKind,
}

impl Default for InstanceSection {
    fn default() -> Self {
        Self {
            mu: Vec::new(),
            gamma: f64::NAN,
            family: ObservationFamily::Poisson,
            criteria: Criterion::ALL.to_vec(),
            sampler: SamplerKind::TrackAndStop,
        }
    }
}

impl InstanceSection {
    fn instance(&self) -> Result<Instance> {
        if self.mu.is_empty() {
            return Err(Error::Config("instance.mu is missing".into()));
        }
        if self.gamma.is_nan() {
            return Err(Error::Config("instance.gamma is missing".into()));
        }
        Instance::new(self.mu.clone(), self.gamma, self.family)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSection {
    pub slices: usize,
    pub gamma: f64,
    pub family: ObservationFamily,
    pub loads: Vec<LoadLevel>,
    pub criteria: Vec<Criterion>,
    pub samplers: Vec<SamplerKind>,
    pub runs: usize,
}

impl Default for PacketSection {
    fn default() -> Self {
        Self {
            slices: 8,
            gamma: PacketScenario::DEFAULT_GAMMA,
            family: ObservationFamily::Poisson,
            loads: LoadLevel::ALL.to_vec(),
            criteria: Criterion::ALL.to_vec(),
            samplers: vec![SamplerKind::TrackAndStop, SamplerKind::RoundRobin],
            runs: 100,
        }
    }
}

impl PacketSection {
    fn scenario(&self, load: LoadLevel, delta: f64) -> Result<PacketScenario> {
        let sc = PacketScenario {
            slices: self.slices,
            gamma: self.gamma,
            family: self.family,
            load,
            runs: self.runs,
            delta,
        };
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub slices: usize,
    pub gamma: f64,
    pub family: ObservationFamily,
    pub load: LoadLevel,
    pub criterion: Criterion,
    pub sampler: SamplerKind,
    pub deltas: Vec<f64>,
    pub runs: usize,
    /// Fixed loads; when absent an instance with an available slice is
    /// drawn from the seed.
    pub mu: Option<Vec<f64>>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            slices: 8,
            gamma: PacketScenario::DEFAULT_GAMMA,
            family: ObservationFamily::Poisson,
            load: LoadLevel::High,
            criterion: Criterion::Packing,
            sampler: SamplerKind::TrackAndStop,
            deltas: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            runs: 50,
            mu: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    pub slices: usize,
    pub capacity: f64,
    pub rates: Vec<u32>,
    pub mean_duration: f64,
    pub horizon: f64,
    pub rhos: Vec<f64>,
    pub criteria: Vec<Criterion>,
    /// `tas`, `uniform` or `perfect`.
    pub decider: String,
    pub max_decision_slots: u64,
    pub slot_time: Option<f64>,
    pub batches: usize,
}

impl Default for FlowSection {
    fn default() -> Self {
        let base = FlowConfig::default();
        Self {
            slices: base.slices,
            capacity: base.capacity,
            rates: base.rate_support,
            mean_duration: base.mean_duration,
            horizon: base.horizon,
            rhos: vec![0.5, 0.6, 0.7, 0.8, 0.9],
            criteria: Criterion::ALL.to_vec(),
            decider: "tas".into(),
            max_decision_slots: base.max_decision_slots,
            slot_time: None,
            batches: base.batches,
        }
    }
}

impl FlowSection {
    pub fn decider(&self) -> Result<Decider> {
        match self.decider.trim().to_ascii_lowercase().as_str() {
            "perfect" | "perfect-information" | "oracle" => Ok(Decider::PerfectInformation),
            other => other
                .parse::<SamplerKind>()
                .map(Decider::Measured)
                .map_err(|_| Error::Config(format!("flow.decider: unknown decider `{other}`"))),
        }
    }

    fn config(&self, th: &ThresholdSection, rho: f64, seed: u64) -> Result<FlowConfig> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Config(format!(
                "flow.rhos: load {rho} must be nonnegative"
            )));
        }
        let mut cfg = FlowConfig {
            slices: self.slices,
            capacity: self.capacity,
            arrival_rate: 0.0,
            rate_support: self.rates.clone(),
            mean_duration: self.mean_duration,
            delta: th.delta,
            horizon: self.horizon,
            seed,
            constant_c: th.constant_c,
            exploration: th.exploration,
            max_decision_slots: self.max_decision_slots,
            slot_time: self.slot_time,
            batches: self.batches,
            record_trace: false,
        };
        cfg.validate()?;
        cfg.arrival_rate = cfg.arrival_rate_for(rho);
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        match table.get("version") {
            None => return Err(Error::Config("missing top-level `version`".into())),
            Some(toml::Value::Integer(v)) if *v == i64::from(CONFIG_VERSION) => {}
            Some(v) => {
                return Err(Error::Config(format!(
                    "unsupported config version {v} (expected {CONFIG_VERSION})"
                )))
            }
        }
        let cfg: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn seed_for(&self, exp: Experiment) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None if exp.needs_seed() => {
                Err(Error::Config(format!("{exp} requires an explicit seed")))
            }
            None => Ok(0),
        }
    }
}

/// Rows of a CSV table, all cells already formatted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma separated, header first, `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Column-aligned text for terminals.
    pub fn to_summary(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&self.header);
        for row in &self.rows {
            line(row);
        }
        out
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn seed_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &p| derive_seed(s, p))
}

/// Evaluates `f` on `0..n` on `jobs` workers, returning results by index.
/// The first error in index order wins.
fn run_indexed<T, F>(jobs: Option<usize>, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<T>> = pool.install(|| (0..n).into_par_iter().map(&f).collect());
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub criterion: Criterion,
    pub characteristic_time: f64,
    pub weights: Vec<f64>,
    pub easiest_answers: Vec<usize>,
    pub delta: f64,
    /// `T d(delta, 1 - delta)`.
    pub lower_bound: f64,
}

pub fn lower_bound(cfg: &ExperimentConfig) -> Result<Vec<LowerBoundRow>> {
    let inst = cfg.instance.instance()?;
    let conf = confidence_divergence(cfg.threshold.delta)?;
    cfg.instance
        .criteria
        .iter()
        .map(|&crit| {
            let o = oracle(&inst, crit)?;
            Ok(LowerBoundRow {
                criterion: crit,
                characteristic_time: o.characteristic_time,
                weights: o.weights.into_inner(),
                easiest_answers: o.easiest_answers.iter().map(|a| a.code()).collect(),
                delta: cfg.threshold.delta,
                lower_bound: o.characteristic_time * conf,
            })
        })
        .collect()
}

pub fn lower_bound_table(rows: &[LowerBoundRow]) -> Table {
    let mut t = Table::new(&[
        "criterion",
        "characteristic_time",
        "weights",
        "easiest_answers",
        "delta",
        "lower_bound",
    ]);
    for r in rows {
        t.push(vec![
            r.criterion.to_string(),
            r.characteristic_time.to_string(),
            join(&r.weights),
            join(&r.easiest_answers),
            r.delta.to_string(),
            r.lower_bound.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRow {
    pub criterion: Criterion,
    pub sampler: SamplerKind,
    pub answer: usize,
    pub tau: u64,
    pub correct: bool,
    pub truncated: bool,
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
    pub seed: u64,
}

pub fn episode(cfg: &ExperimentConfig) -> Result<Vec<EpisodeRow>> {
    let inst = cfg.instance.instance()?;
    let seed = cfg.seed_for(Experiment::Episode)?;
    let sampler = cfg.instance.sampler;
    let ecfg = cfg
        .threshold
        .episode(cfg.threshold.delta, inst.num_slices(), sampler)?;
    cfg.instance
        .criteria
        .iter()
        .map(|&crit| {
            let r = run_episode(&inst, crit, &ecfg, seed)?;
            Ok(EpisodeRow {
                criterion: crit,
                sampler,
                answer: r.answer.code(),
                tau: r.tau,
                correct: r.correct,
                truncated: r.truncated,
                counts: r.counts_final,
                means: r.means_final,
                seed,
            })
        })
        .collect()
}

pub fn episode_table(rows: &[EpisodeRow]) -> Table {
    let mut t = Table::new(&[
        "criterion",
        "sampler",
        "answer",
        "tau",
        "correct",
        "truncated",
        "counts",
        "means",
        "seed",
    ]);
    for r in rows {
        t.push(vec![
            r.criterion.to_string(),
            r.sampler.to_string(),
            r.answer.to_string(),
            r.tau.to_string(),
            r.correct.to_string(),
            r.truncated.to_string(),
            join(&r.counts),
            join(&r.means),
            r.seed.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketRow {
    pub load: LoadLevel,
    pub criterion: Criterion,
    pub sampler: SamplerKind,
    pub mean_tau: f64,
    pub ci_radius: f64,
    pub mean_lower_bound: f64,
    pub runs: usize,
    pub seed: u64,
    /// Stopping times by run index; run `i` sees the same instance and
    /// observation stream under every sampler.
    pub taus: Vec<u64>,
    pub errors: usize,
}

struct PacketRun {
    lower_bound: f64,
    // by sampler, in config order
    outcomes: Vec<(u64, bool)>,
}

/// Runs every (load, criterion, sampler) cell on freshly drawn instances.
///
/// Run `i` of a (load, criterion) cell draws its instance and its
/// observations from seeds that depend only on `(seed, load, i)`, so the
/// samplers are paired.
pub fn packet_bench(cfg: &ExperimentConfig) -> Result<Vec<PacketRow>> {
    let seed = cfg.seed_for(Experiment::PacketBench)?;
    let p = &cfg.packet;
    let delta = cfg.threshold.delta;
    let conf = confidence_divergence(delta)?;
    if p.loads.is_empty() || p.criteria.is_empty() || p.samplers.is_empty() {
        return Err(Error::Config(
            "packet: loads, criteria and samplers must be nonempty".into(),
        ));
    }
    let scenarios = p
        .loads
        .iter()
        .map(|&l| p.scenario(l, delta))
        .collect::<Result<Vec<_>>>()?;
    let episode_cfgs = p
        .samplers
        .iter()
        .map(|&s| cfg.threshold.episode(delta, p.slices, s))
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, Criterion)> = (0..p.loads.len())
        .flat_map(|li| p.criteria.iter().map(move |&c| (li, c)))
        .collect();
    let runs = p.runs;
    let results = run_indexed(cfg.jobs, cells.len() * runs, |idx| {
        let (li, crit) = cells[idx / runs];
        let run = idx % runs;
        let load_code = p.loads[li] as u64;
        let inst = draw_instance_for(
            &scenarios[li],
            crit,
            seed_path(seed, &[1, load_code, run as u64]),
        )
        .map_err(|e| e.in_run(run))?;
        let lower_bound = oracle(&inst, crit)
            .map_err(|e| e.in_run(run))?
            .characteristic_time
            * conf;
        let ep_seed = seed_path(seed, &[2, load_code, run as u64]);
        let outcomes = episode_cfgs
            .iter()
            .map(|ecfg| {
                run_episode(&inst, crit, ecfg, ep_seed)
                    .map(|r| (r.tau, r.correct))
                    .map_err(|e| e.in_run(run))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PacketRun {
            lower_bound,
            outcomes,
        })
    })?;

    let mut rows = Vec::new();
    for (ci, &(li, crit)) in cells.iter().enumerate() {
        let cell = &results[ci * runs..(ci + 1) * runs];
        let mean_lower_bound = cell.iter().map(|r| r.lower_bound).sum::<f64>() / runs as f64;
        for (si, &sampler) in p.samplers.iter().enumerate() {
            let taus: Vec<u64> = cell.iter().map(|r| r.outcomes[si].0).collect();
            let est = batch_means(&taus.iter().map(|&t| t as f64).collect::<Vec<_>>());
            rows.push(PacketRow {
                load: p.loads[li],
                criterion: crit,
                sampler,
                mean_tau: est.mean,
                ci_radius: est.ci_radius,
                mean_lower_bound,
                runs,
                seed,
                errors: cell.iter().filter(|r| !r.outcomes[si].1).count(),
                taus,
            });
        }
    }
    Ok(rows)
}

pub fn packet_table(rows: &[PacketRow]) -> Table {
    let mut t = Table::new(&[
        "load",
        "criterion",
        "sampler",
        "mean_tau",
        "ci_radius",
        "mean_lower_bound",
        "runs",
        "seed",
    ]);
    for r in rows {
        t.push(vec![
            r.load.to_string(),
            r.criterion.to_string(),
            r.sampler.to_string(),
            r.mean_tau.to_string(),
            r.ci_radius.to_string(),
            r.mean_lower_bound.to_string(),
            r.runs.to_string(),
            r.seed.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub mean_tau: f64,
    pub ci_radius: f64,
    pub lower_bound: f64,
    pub ratio: f64,
    pub runs: usize,
    pub mu: Vec<f64>,
}

fn sweep_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let s = &cfg.sweep;
    if let Some(mu) = &s.mu {
        return Instance::new(mu.clone(), s.gamma, s.family);
    }
    let sc = PacketScenario {
        slices: s.slices,
        gamma: s.gamma,
        family: s.family,
        load: s.load,
        runs: s.runs,
        delta: SWEEP_DELTA_RANGE.1,
    };
    for attempt in 0..MAX_REDRAWS as u64 {
        let inst = draw_instance_for(&sc, s.criterion, seed_path(seed, &[1, attempt]))?;
        if inst.regime() == Regime::Available {
            return Ok(inst);
        }
    }
    Err(Error::InvalidInstance(format!(
        "no instance with an available slice after {MAX_REDRAWS} draws"
    )))
}

/// Runs the same instance across the delta grid. Run `i` uses the same
/// observation stream at every delta.
pub fn delta_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let seed = cfg.seed_for(Experiment::DeltaSweep)?;
    let s = &cfg.sweep;
    if s.deltas.is_empty() {
        return Err(Error::Config("sweep.deltas must be nonempty".into()));
    }
    if s.runs == 0 {
        return Err(Error::Config("sweep.runs must be positive".into()));
    }
    let (lo, hi) = SWEEP_DELTA_RANGE;
    if let Some(d) = s.deltas.iter().find(|d| !(**d >= lo && **d <= hi)) {
        return Err(Error::Config(format!(
            "sweep.deltas: {d} is outside [{lo:e}, {hi:e}]"
        )));
    }
    let inst = sweep_instance(cfg, seed)?;
    let t_char = oracle(&inst, s.criterion)?.characteristic_time;
    let episode_cfgs = s
        .deltas
        .iter()
        .map(|&d| cfg.threshold.episode(d, inst.num_slices(), s.sampler))
        .collect::<Result<Vec<_>>>()?;

    let runs = s.runs;
    let taus = run_indexed(cfg.jobs, s.deltas.len() * runs, |idx| {
        let run = idx % runs;
        run_episode(
            &inst,
            s.criterion,
            &episode_cfgs[idx / runs],
            seed_path(seed, &[2, run as u64]),
        )
        .map(|r| r.tau as f64)
        .map_err(|e| e.in_run(run))
    })?;

    s.deltas
        .iter()
        .enumerate()
        .map(|(di, &delta)| {
            let est = batch_means(&taus[di * runs..(di + 1) * runs]);
            let lower_bound = t_char * confidence_divergence(delta)?;
            Ok(SweepRow {
                delta,
                mean_tau: est.mean,
                ci_radius: est.ci_radius,
                lower_bound,
                ratio: est.mean / lower_bound,
                runs,
                mu: inst.mu().to_vec(),
            })
        })
        .collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&["delta", "mean_tau", "lower_bound", "ratio", "runs"]);
    for r in rows {
        t.push(vec![
            r.delta.to_string(),
            r.mean_tau.to_string(),
            r.lower_bound.to_string(),
            r.ratio.to_string(),
            r.runs.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRow {
    pub rho: f64,
    pub criterion: Criterion,
    pub block_all: f64,
    /// Blocking of the largest rate in the support.
    pub block_rate10: f64,
    pub mean_measurements: f64,
    pub mean_lower_bound: f64,
    pub horizon: f64,
    pub seed: u64,
    pub blocking_ci_radius: f64,
    pub arrivals: u64,
    pub overload_events: u64,
    pub decision_errors: u64,
    pub truncated_decisions: u64,
}

/// One simulation per (rho, criterion). All criteria at a given load share
/// the simulation seed.
pub fn flow_bench(cfg: &ExperimentConfig) -> Result<Vec<FlowRow>> {
    let seed = cfg.seed_for(Experiment::FlowBench)?;
    let f = &cfg.flow;
    if f.rhos.is_empty() || f.criteria.is_empty() {
        return Err(Error::Config(
            "flow: rhos and criteria must be nonempty".into(),
        ));
    }
    let decider = f.decider()?;
    let configs = f
        .rhos
        .iter()
        .enumerate()
        .map(|(i, &rho)| f.config(&cfg.threshold, rho, seed_path(seed, &[3, i as u64])))
        .collect::<Result<Vec<_>>>()?;
    let n_crit = f.criteria.len();
    let top_rate = *f.rates.iter().max().expect("validated nonempty");

    run_indexed(cfg.jobs, configs.len() * n_crit, |idx| {
        let fc = &configs[idx / n_crit];
        let crit = f.criteria[idx % n_crit];
        let stats = simulate_flows(fc, crit, decider).map_err(|e| e.in_run(idx))?;
        Ok(FlowRow {
            rho: fc.rho(),
            criterion: crit,
            block_all: stats.blocking_probability(),
            block_rate10: stats.blocking_for_rate(top_rate),
            mean_measurements: stats.mean_measurements(),
            mean_lower_bound: stats.mean_lower_bound(),
            horizon: fc.horizon,
            seed,
            blocking_ci_radius: stats.blocking.ci_radius,
            arrivals: stats.arrivals(),
            overload_events: stats.overload_events,
            decision_errors: stats.decision_errors,
            truncated_decisions: stats.truncated_decisions,
        })
    })
}

pub fn flow_table(rows: &[FlowRow]) -> Table {
    let mut t = Table::new(&[
        "rho",
        "criterion",
        "block_all",
        "block_rate10",
        "mean_measurements",
        "mean_lower_bound",
        "horizon",
        "seed",
    ]);
    for r in rows {
        t.push(vec![
            r.rho.to_string(),
            r.criterion.to_string(),
            r.block_all.to_string(),
            r.block_rate10.to_string(),
            r.mean_measurements.to_string(),
            r.mean_lower_bound.to_string(),
            r.horizon.to_string(),
            r.seed.to_string(),
        ]);
    }
    t
}

/// Runs `exp` and returns its table.
pub fn run(exp: Experiment, cfg: &ExperimentConfig) -> Result<Table> {
    Ok(match exp {
        Experiment::LowerBound => lower_bound_table(&lower_bound(cfg)?),
        Experiment::Episode => episode_table(&episode(cfg)?),
        Experiment::PacketBench => packet_table(&packet_bench(cfg)?),
        Experiment::DeltaSweep => sweep_table(&delta_sweep(cfg)?),
        Experiment::FlowBench => flow_table(&flow_bench(cfg)?),
    })
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}
