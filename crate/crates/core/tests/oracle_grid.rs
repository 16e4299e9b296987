use slice_admission::divergence::kl;
use slice_admission::oracle::{
    easiest_answers, inner_value, oracle, Answer, Criterion, Instance, WeightVector,
};
use slice_admission::ObservationFamily::Bernoulli;

fn d(a: f64, b: f64) -> f64 {
    a * (a / b).ln() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln()
}

fn pair(wa: f64, a: f64, wb: f64, b: f64) -> f64 {
    if wa + wb == 0.0 {
        return 0.0;
    }
    let c = (wa * a + wb * b) / (wa + wb);
    wa * d(a, c) + wb * d(b, c)
}

#[test]
fn least_loaded_matches_grid_search() {
    let mu = [0.15, 0.30, 0.70];
    let gamma = 0.5;
    let inst = Instance::new(mu.to_vec(), gamma, Bernoulli).unwrap();
    let o = oracle(&inst, Criterion::LeastLoaded).unwrap();
    assert_eq!(o.target, Answer::Slice(0));

    // alternatives: slice 1 unavailable, or another slice overtakes it
    let value = |w: [f64; 3]| {
        let own = w[0] * d(mu[0], gamma);
        let p1 = pair(w[1], mu[1], w[0], mu[0]);
        let p2 = pair(w[2], mu[2], w[0], mu[0]);
        own.min(p1).min(p2)
    };
    let n = 200;
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for i in 0..=n {
        for j in 0..=(n - i) {
            let w = [
                i as f64 / n as f64,
                j as f64 / n as f64,
                (n - i - j) as f64 / n as f64,
            ];
            let v = value(w);
            if v > best.0 {
                best = (v, w);
            }
        }
    }
    let w = o.weights.as_slice();
    for k in 0..3 {
        assert!((w[k] - best.1[k]).abs() <= 0.02, "{w:?} vs {:?}", best.1);
    }
    let rel = (1.0 / o.characteristic_time - best.0).abs() / best.0;
    assert!(rel <= 0.02, "{rel}");
}

#[test]
fn reject_inner_value_composes_divergences() {
    let inst = Instance::new(vec![0.6, 0.8], 0.4, Bernoulli).unwrap();
    let v = inner_value(
        &inst,
        Criterion::Packing,
        Answer::Reject,
        &WeightVector::uniform(2),
    )
    .unwrap();
    let expected =
        (0.5 * kl(Bernoulli, 0.6, 0.4).unwrap()).min(0.5 * kl(Bernoulli, 0.8, 0.4).unwrap());
    assert!((v - expected).abs() < 1e-12);
}

#[test]
fn oracle_weights_attain_the_inverse_characteristic_time() {
    let cases: [(&[f64], f64); 4] = [
        (&[0.1, 0.3, 0.7], 0.5),
        (&[0.2, 0.45, 0.7], 0.5),
        (&[0.6, 0.7], 0.5),
        (&[0.05, 0.35, 0.4, 0.9], 0.6),
    ];
    for (mu, gamma) in cases {
        let inst = Instance::new(mu.to_vec(), gamma, Bernoulli).unwrap();
        for crit in Criterion::ALL {
            let o = oracle(&inst, crit).unwrap();
            let v = inner_value(&inst, crit, o.target, &o.weights).unwrap();
            assert!(
                (v * o.characteristic_time - 1.0).abs() <= 1e-6,
                "{mu:?} {crit}"
            );
            assert!(easiest_answers(&inst, crit).unwrap().contains(&o.target));
        }
    }
}

#[test]
fn symmetric_reject_instance() {
    let inst = Instance::new(vec![0.6, 0.6], 0.4, Bernoulli).unwrap();
    for crit in Criterion::ALL {
        let o = oracle(&inst, crit).unwrap();
        assert_eq!(o.easiest_answers, vec![Answer::Reject]);
        assert!((o.characteristic_time - 2.0 / d(0.6, 0.4)).abs() < 1e-9 * o.characteristic_time);
        assert!((o.weights.as_slice()[0] - 0.5).abs() < 1e-12);
    }
}
