use slice_admission::flowsim::{erlang_b, simulate_flows, Decider, FlowConfig};
use slice_admission::oracle::Criterion;
use slice_admission::tas::SamplerKind;

#[test]
fn homogeneous_flows_follow_erlang_b() {
    let cfg = FlowConfig {
        capacity: 14.5,
        arrival_rate: 3.0,
        rate_support: vec![5],
        horizon: 20_000.0,
        seed: 11,
        ..FlowConfig::default()
    };
    let stats = simulate_flows(&cfg, Criterion::AnyAvailable, Decider::PerfectInformation).unwrap();
    let reference = erlang_b(6, 3.0);
    let p = stats.blocking_probability();
    let slack = stats.blocking.ci_radius.max(0.005);
    assert!(
        (p - reference).abs() <= slack,
        "{p} vs {reference} (ci {})",
        stats.blocking.ci_radius
    );
}

#[test]
fn blocking_grows_with_load_and_overloads_are_rare() {
    let measured = Decider::Measured(SamplerKind::TrackAndStop);
    let mut higher = 0;
    let seeds = 10;
    for seed in 0..seeds {
        let base = FlowConfig {
            horizon: 50.0,
            seed,
            ..FlowConfig::default()
        };
        let mut stats = Vec::new();
        for rho in [0.5, 0.9] {
            let cfg = FlowConfig {
                arrival_rate: base.arrival_rate_for(rho),
                ..base.clone()
            };
            let s = simulate_flows(&cfg, Criterion::AnyAvailable, measured).unwrap();
            assert!(
                s.overload_events as f64 <= 0.01 * s.decisions.max(1) as f64,
                "{} overloads in {} decisions",
                s.overload_events,
                s.decisions
            );
            for (b, a) in s.blocked_by_rate.iter().zip(&s.arrivals_by_rate) {
                assert!(b <= a);
            }
            stats.push(s.blocking_probability());
        }
        higher += usize::from(stats[1] >= stats[0]);
    }
    // one-sided sign test at 5% over 10 pairs needs 9
    assert!(higher >= 9, "{higher} of {seeds}");
}
