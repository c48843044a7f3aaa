#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruin_core::{build_distribution, AnalyticFamily, PayoffDistribution};

/// Smallest drift accepted into the random suite. Lower drifts are valid
/// inputs but make the simulation oracle too slow at 10^6 paths.
pub const MIN_DRIFT: f64 = 0.25;

/// A random favorable distribution with `nu <= 4` and largest gain `<= 4`.
/// Interior weights are zero with probability 1/3 so that gaps in the
/// support are exercised.
pub fn random_favorable(rng: &mut ChaCha8Rng) -> PayoffDistribution {
    loop {
        let nu: i64 = rng.random_range(1..=4);
        let mu: i64 = rng.random_range(1..=4);
        let mut entries: Vec<(i64, f64)> = Vec::new();
        for k in -nu..=mu {
            let w: f64 = if k == -nu || k == mu {
                rng.random_range(0.05..1.0)
            } else if rng.random_bool(1.0 / 3.0) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            };
            if w > 0.0 {
                entries.push((k, w));
            }
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        for e in &mut entries {
            e.1 /= total;
        }
        let d = build_distribution(&AnalyticFamily::table(entries), 0.0).unwrap();
        if d.mean() >= MIN_DRIFT {
            return d;
        }
    }
}

/// The fixed suite of 50 distributions, each paired with a wealth in
/// `nu..=30`.
pub fn suite() -> Vec<(PayoffDistribution, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240531);
    (0..50)
        .map(|_| {
            let d = random_favorable(&mut rng);
            let m = rng.random_range(d.nu() as u64..=30);
            (d, m)
        })
        .collect()
}

pub fn poisson_example() -> PayoffDistribution {
    build_distribution(
        &AnalyticFamily::PoissonPrize {
            nu: 3,
            epsilon: 0.01,
        },
        1e-14,
    )
    .unwrap()
}
