use slice_admission::envs::{draw_instance, LoadLevel, PacketScenario};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DRAWS: u64 = 10_000;

#[test]
fn low_load_mean_and_exchangeability() {
    let sc = PacketScenario::new(8, LoadLevel::Low);
    let mut per_slice = [0.0f64; 8];
    for seed in 0..DRAWS {
        let inst = draw_instance(&sc, seed).unwrap();
        for (acc, m) in per_slice.iter_mut().zip(inst.mu()) {
            *acc += m;
        }
    }
    let total: f64 = per_slice.iter().sum();
    let mean = total / (8 * DRAWS) as f64;
    assert!((mean - 17.0).abs() <= 0.2, "{mean}");

    // units assigned per slice should look uniform over slice indices
    let expected = total / 8.0;
    let chi2: f64 = per_slice
        .iter()
        .map(|o| (o - expected).powi(2) / expected)
        .sum();
    let p = 1.0 - ChiSquared::new(7.0).unwrap().cdf(chi2);
    assert!(p > 0.001, "chi2 {chi2}, p {p}");
}

#[test]
fn first_and_last_slice_share_a_law() {
    // histogram of mu_1 against mu_8 over the same draws
    let sc = PacketScenario::new(8, LoadLevel::Low);
    let bins = |x: f64| ((x / 5.0) as usize).min(7);
    let mut h = [[0.0f64; 8]; 2];
    for seed in 0..DRAWS {
        let inst = draw_instance(&sc, seed).unwrap();
        h[0][bins(inst.mu()[0])] += 1.0;
        h[1][bins(inst.mu()[7])] += 1.0;
    }
    // two-sample chi-square homogeneity over nonempty bins
    let mut chi2 = 0.0;
    let mut df = 0.0;
    for b in 0..8 {
        let col = h[0][b] + h[1][b];
        if col == 0.0 {
            continue;
        }
        df += 1.0;
        for row in &h {
            let e = col / 2.0;
            chi2 += (row[b] - e).powi(2) / e;
        }
    }
    let p = 1.0 - ChiSquared::new(df - 1.0).unwrap().cdf(chi2);
    assert!(p > 0.001, "chi2 {chi2}, p {p}");
}
