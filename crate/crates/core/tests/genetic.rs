use proptest::prelude::*;
use wavedesal_core::optimizer::{ga_run, Encoding, GaConfig, Score};

fn score(value: f64) -> Score {
    Score { value, feasible: true }
}

#[test]
fn hamming_target_is_found() {
    // 4 bytes decoded to their raw codes; objective counts differing bits
    let target = [0b1011_0010u32, 0b0000_1111, 0b1111_1111, 0b0101_0101];
    let enc = Encoding::new(vec![(0.0, 255.0); 4], 8);
    let cfg = GaConfig { population_size: 50, immigrant_count: 30, max_generations: 200, seed: 3, ..GaConfig::default() };
    let r = ga_run(
        |x| score(x.iter().zip(&target).map(|(v, t)| ((*v as u32) ^ t).count_ones() as f64).sum()),
        &enc,
        &cfg,
        &[],
    )
    .unwrap();
    assert_eq!(r.best_value, 0.0);
    let first_zero = r.history.iter().position(|h| h.best == 0.0).unwrap();
    assert!(first_zero < 200);
}

/// Smooth bowl with a cross term, minimum inside the box.
pub fn bowl(x: &[f64]) -> f64 {
    let u = (x[0] - 7.3) / 5.0;
    let v = (x[1] - 0.62) / 0.3;
    let w = (x[2] - 6100.0) / 3000.0;
    u * u + v * v + w * w + 0.4 * u * v - 0.2 * v * w
}

pub const BOWL_BOUNDS: [(f64, f64); 3] = [(4.0, 24.0), (0.1, 1.0), (1000.0, 10000.0)];

/// Best point of the 16^3 grid over `BOWL_BOUNDS`.
pub fn grid_optimum() -> ([f64; 3], f64) {
    let mut best = ([0.0; 3], f64::INFINITY);
    let at = |i: usize, k: usize| BOWL_BOUNDS[i].0 + k as f64 / 15.0 * (BOWL_BOUNDS[i].1 - BOWL_BOUNDS[i].0);
    for a in 0..16 {
        for b in 0..16 {
            for c in 0..16 {
                let x = [at(0, a), at(1, b), at(2, c)];
                let f = bowl(&x);
                if f < best.1 {
                    best = (x, f);
                }
            }
        }
    }
    best
}

#[test]
fn ga_matches_grid_oracle() {
    let (xg, fg) = grid_optimum();
    let enc = Encoding::new(BOWL_BOUNDS.to_vec(), 8);
    let mut hits = 0;
    for seed in 0..5 {
        let cfg = GaConfig::desk(50, 100, seed);
        let r = ga_run(|x| score(bowl(x)), &enc, &cfg, &[]).unwrap();
        let close = (0..3).all(|i| (r.best_x[i] - xg[i]).abs() <= (BOWL_BOUNDS[i].1 - BOWL_BOUNDS[i].0) / 15.0);
        if close && r.best_value <= fg {
            hits += 1;
        }
    }
    assert!(hits >= 4, "{hits}/5 seeds");
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    let enc = Encoding::new(BOWL_BOUNDS.to_vec(), 8);
    let cfg = GaConfig::desk(30, 40, 9);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ga_run(|x| score(bowl(x)), &enc, &cfg, &[vec![20.0, 0.2, 2000.0]]).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(4));
    assert_eq!(a, run(1));
}

#[test]
fn injected_design_is_in_first_generation() {
    let enc = Encoding::new(BOWL_BOUNDS.to_vec(), 8);
    let start = vec![7.3, 0.62, 6100.0];
    let cfg = GaConfig { max_generations: 1, ..GaConfig::desk(10, 1, 0) };
    let r = ga_run(|x| score(bowl(x)), &enc, &cfg, &[start.clone()]).unwrap();
    let snapped = enc.decode(&enc.encode(&start));
    assert_eq!(r.best_x, snapped);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decode_round_trip_within_half_step(x in proptest::collection::vec(0.0..1.0f64, 8)) {
        let bounds: Vec<(f64, f64)> = wavedesal_core::geometry::VARIABLES.iter().map(|v| (v.lo, v.hi)).collect();
        let enc = Encoding::new(bounds.clone(), 8);
        let point: Vec<f64> = x.iter().zip(&bounds).map(|(u, (lo, hi))| lo + u * (hi - lo)).collect();
        let back = enc.decode(&enc.encode(&point));
        for i in 0..8 {
            let (lo, hi) = bounds[i];
            prop_assert!((back[i] - point[i]).abs() <= (hi - lo) / 510.0 * (1.0 + 1e-12));
            prop_assert!(back[i] >= lo && back[i] <= hi);
        }
    }

    #[test]
    fn elite_never_worsens(seed in 0u64..10_000, interval in 2usize..6) {
        // rugged deterministic objective so that immigration matters
        let enc = Encoding::new(vec![(0.0, 1.0); 3], 8);
        let cfg = GaConfig { immigration_interval: interval, ..GaConfig::desk(16, 25, seed) };
        let f = |x: &[f64]| score(x.iter().enumerate().map(|(i, v)| (17.0 * v + i as f64).sin() * v).sum());
        let r = ga_run(f, &enc, &cfg, &[]).unwrap();
        for pair in r.history.windows(2) {
            prop_assert!(pair[1].best <= pair[0].best);
        }
        prop_assert_eq!(r.history.last().unwrap().best, r.best_value);
    }
}
