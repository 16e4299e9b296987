use slice_admission::glr::{glr_statistic, threshold, EmpiricalState, ThresholdConfig};
use slice_admission::oracle::{empirical_answer, oracle, Answer, Criterion, Instance};
use slice_admission::tas::{run_episode, EpisodeConfig, SamplerKind};
use slice_admission::ObservationFamily::{self, Bernoulli};

fn config(delta: f64, k: usize, sampler: SamplerKind) -> EpisodeConfig {
    EpisodeConfig::new(ThresholdConfig::for_slices(delta, k).unwrap(), sampler)
}

#[test]
fn trajectory_invariants() {
    let inst = Instance::new(vec![0.2, 0.45, 0.7], 0.5, Bernoulli).unwrap();
    for crit in Criterion::ALL {
        let mut cfg = config(0.05, 3, SamplerKind::TrackAndStop);
        cfg.record_trajectory = true;
        for seed in 0..5 {
            let r = run_episode(&inst, crit, &cfg, seed).unwrap();
            let traj = r.trajectory.as_ref().unwrap();
            assert_eq!(traj.len() as u64, r.tau);

            let mut state = EmpiricalState::new(3);
            let mut sums = [0.0; 3];
            for step in traj {
                // the stopping check at step t failed before measuring
                assert!(step.statistic <= step.threshold, "t={}", step.t);
                // forced exploration floor
                let floor = (step.t as f64).sqrt() - 3.0 - 1.0;
                assert!(
                    state.counts.iter().all(|&n| n as f64 >= floor),
                    "t={}",
                    step.t
                );
                state.update(step.slice, step.observation);
                sums[step.slice] += step.observation;
            }
            assert!(r.final_statistic > r.final_threshold);
            assert_eq!(state.counts, r.counts_final);
            for k in 0..3 {
                let mean = sums[k] / r.counts_final[k] as f64;
                assert!((mean - r.means_final[k]).abs() < 1e-12);
            }
            // the statistic recomputed from the final state agrees
            let mu_hat = state.clamped_means(ObservationFamily::Bernoulli);
            let candidate = empirical_answer(&mu_hat, 0.5, crit);
            assert_eq!(candidate, r.answer);
            let q = glr_statistic(&state, 0.5, Bernoulli, crit, candidate);
            assert!((q - r.final_statistic).abs() <= 1e-9 * q.max(1.0));
            assert_eq!(r.final_threshold, threshold(&cfg.threshold, r.tau + 1));
        }
    }
}

#[test]
fn episodes_are_deterministic() {
    let inst = Instance::new(vec![0.1, 0.3, 0.7], 0.5, Bernoulli).unwrap();
    let mut cfg = config(0.01, 3, SamplerKind::TrackAndStop);
    cfg.record_trajectory = true;
    let a = run_episode(&inst, Criterion::Packing, &cfg, 42).unwrap();
    let b = run_episode(&inst, Criterion::Packing, &cfg, 42).unwrap();
    assert_eq!(a, b);
    let c = run_episode(&inst, Criterion::Packing, &cfg, 43).unwrap();
    assert_ne!(a.trajectory, c.trajectory);
}

#[test]
fn proportions_approach_optimal_weights() {
    let inst = Instance::new(vec![0.1, 0.3, 0.7], 0.5, Bernoulli).unwrap();
    let crit = Criterion::LeastLoaded;
    let w = oracle(&inst, crit).unwrap().weights.into_inner();
    let cfg = config(1e-6, 3, SamplerKind::TrackAndStop);
    let mut avg = [0.0; 3];
    let seeds = 50;
    for seed in 0..seeds {
        let r = run_episode(&inst, crit, &cfg, seed).unwrap();
        for k in 0..3 {
            avg[k] += r.counts_final[k] as f64 / r.tau as f64 / seeds as f64;
        }
    }
    let gap = (0..3).map(|k| (avg[k] - w[k]).abs()).fold(0.0, f64::max);
    assert!(gap <= 0.05, "{avg:?} vs {w:?}");
}

#[test]
fn track_and_stop_beats_round_robin() {
    let inst = Instance::new(vec![0.15, 0.3, 0.45, 0.7], 0.5, Bernoulli).unwrap();
    let tas = config(0.01, 4, SamplerKind::TrackAndStop);
    let rr = config(0.01, 4, SamplerKind::RoundRobin);
    let runs = 100;
    let (mut wins, mut sum_tas, mut sum_rr) = (0, 0u64, 0u64);
    for seed in 0..runs {
        let a = run_episode(&inst, Criterion::Packing, &tas, seed)
            .unwrap()
            .tau;
        let b = run_episode(&inst, Criterion::Packing, &rr, seed)
            .unwrap()
            .tau;
        wins += usize::from(a < b);
        sum_tas += a;
        sum_rr += b;
    }
    assert!(sum_tas < sum_rr, "{sum_tas} vs {sum_rr}");
    // one-sided sign test at 5%: 59 of 100 suffices
    assert!(wins >= 59, "TaS faster in {wins} of {runs} runs");
}

#[test]
fn error_rate_within_delta() {
    let inst = Instance::new(vec![0.2, 0.7], 0.5, Bernoulli).unwrap();
    let cfg = config(0.1, 2, SamplerKind::TrackAndStop);
    let errors = (0..2000)
        .filter(|&seed| {
            run_episode(&inst, Criterion::AnyAvailable, &cfg, seed)
                .unwrap()
                .answer
                != Answer::Slice(0)
        })
        .count();
    assert!(errors as f64 / 2000.0 <= 0.1, "{errors}");
}
