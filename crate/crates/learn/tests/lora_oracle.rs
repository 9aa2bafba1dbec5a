use nalgebra::{DMatrix, DVector};
use polymm_learn::lora::{
    grad_check, param_count, read_adapter, toy_finetune, toy_problem, write_adapter, AttentionBlock, LoraAdapter,
    LoraError, ToyConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn random_adapter(d: usize, k: usize, r: usize, alpha: f64, seed: u64) -> LoraAdapter {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LoraAdapter::from_parts(random(d, k, &mut rng), random(r, k, &mut rng), random(d, r, &mut rng), alpha).unwrap()
}

/// Dense product written out as explicit sums.
fn dense_forward(w0: &DMatrix<f64>, a: &DMatrix<f64>, b: &DMatrix<f64>, s: f64, x: &DVector<f64>) -> Vec<f64> {
    let (d, k) = w0.shape();
    (0..d)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let delta: f64 = (0..a.nrows()).map(|t| b[(i, t)] * a[(t, j)]).sum();
                    (w0[(i, j)] + s * delta) * x[j]
                })
                .sum()
        })
        .collect()
}

#[test]
fn seven_billion_scale_counts() {
    let trainable = param_count(4096, 4096, 8).unwrap();
    assert_eq!(trainable, 65_536);
    assert_eq!(4096 * 4096 / trainable, 256);
    assert_eq!(4096 * 4096 % trainable, 0);
}

#[test]
fn small_counts_and_guards() {
    assert_eq!(param_count(10, 6, 2).unwrap(), 32);
    assert!(matches!(param_count(10, 6, 0), Err(LoraError::InvalidRank { .. })));
    assert!(matches!(param_count(0, 6, 2), Err(LoraError::InvalidShape { .. })));
}

#[test]
fn zero_b_forward_is_the_base_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w0 = random(12, 9, &mut rng);
    let ad = LoraAdapter::new(w0.clone(), 3, 6.0, &mut rng).unwrap();
    for _ in 0..10 {
        let x = DVector::from_fn(9, |_, _| rng.random_range(-5.0..5.0));
        assert_eq!(ad.forward(&x).unwrap(), &w0 * &x);
    }
    assert_eq!(ad.merge(), w0);
}

#[test]
fn full_rank_adapter_reaches_any_update() {
    let (d, k) = (6, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w0 = random(d, k, &mut rng);
    let m = random(d, k, &mut rng);
    // With A = I and B = M the update is exactly M when alpha = r.
    let r = d.min(k);
    let ad = LoraAdapter::from_parts(w0.clone(), DMatrix::identity(r, k), m.clone(), r as f64).unwrap();
    let x = DVector::from_fn(k, |_, _| rng.random_range(-1.0..1.0));
    let got = ad.forward(&x).unwrap();
    let want = (&w0 + &m) * &x;
    assert!((got - want).amax() < 1e-14);
}

#[test]
fn forward_matches_dense_materialization() {
    for (seed, (d, k, r)) in [(8, 8, 2), (17, 5, 3), (40, 64, 7), (128, 96, 16)].into_iter().enumerate() {
        let ad = random_adapter(d, k, r, 2.0 * r as f64 + 1.0, seed as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed as u64);
        let merged = ad.merge();
        for _ in 0..5 {
            let x = DVector::from_fn(k, |_, _| rng.random_range(-1.0..1.0));
            let fast = ad.forward(&x).unwrap();
            let dense = dense_forward(ad.w0(), &ad.a, &ad.b, ad.scale(), &x);
            for i in 0..d {
                assert!((fast[i] - dense[i]).abs() <= 1e-12 * (1.0 + dense[i].abs()), "{d}x{k} r{r}");
            }
            assert!((&merged * &x - &fast).amax() <= 1e-10);
        }
    }
}

#[test]
fn merged_update_has_rank_at_most_r() {
    for (seed, r) in [1usize, 2, 5].into_iter().enumerate() {
        let ad = random_adapter(20, 14, r, 8.0, 50 + seed as u64);
        let delta = ad.merge() - ad.w0();
        let sv = delta.svd(false, false).singular_values;
        let mut sorted: Vec<f64> = sv.iter().copied().collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        assert!(sorted[r - 1] > 1e-6);
        assert!(sorted[r..].iter().all(|&s| s <= 1e-9), "{sorted:?}");
        assert_eq!(ad.merge(), ad.merge());
    }
}

#[test]
fn quadratic_loss_gradient_check() {
    let ad = random_adapter(8, 8, 2, 4.0, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inputs: Vec<DVector<f64>> = (0..4).map(|_| DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0))).collect();
    let target = DVector::from_fn(8, |i, _| i as f64 * 0.1);
    let loss = move |y: &DVector<f64>| {
        let diff = y - &target;
        (0.5 * diff.norm_squared(), diff)
    };
    let check = grad_check(&ad, &inputs, &loss, 12, &mut rng).unwrap();
    assert!(check.entries_checked >= 20);
    assert!(check.max_relative_error <= 1e-6, "{}", check.max_relative_error);
}

fn entry(blk: &mut AttentionBlock, which: usize) -> &mut DMatrix<f64> {
    match which {
        0 => &mut blk.query.a,
        1 => &mut blk.query.b,
        2 => &mut blk.value.a,
        _ => &mut blk.value.b,
    }
}

/// Central differences on the whole attention block, one adapter entry at a time.
#[test]
fn attention_gradients_match_finite_differences() {
    let cfg =
        ToyConfig { d_model: 6, seq_len: 3, samples: 4, input_rank: 6, rank: 2, alpha: 3.0, ..Default::default() };
    let mut problem = toy_problem(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    // Move B off zero so every gradient path is exercised.
    for b in [&mut problem.student.query.b, &mut problem.student.value.b] {
        *b = random(b.nrows(), b.ncols(), &mut rng) * 0.3;
    }
    let (xs, ts) = (&problem.inputs, &problem.targets);
    let (_, g) = problem.student.loss_and_grads(xs, ts);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for which in 0..4 {
        let analytic = [&g.query_a, &g.query_b, &g.value_a, &g.value_b][which];
        for idx in 0..analytic.len() {
            let mut plus = problem.student.clone();
            let mut minus = problem.student.clone();
            entry(&mut plus, which)[idx] += h;
            entry(&mut minus, which)[idx] -= h;
            let numeric = (plus.loss(xs, ts) - minus.loss(xs, ts)) / (2.0 * h);
            let a = analytic[idx];
            let scale = a.abs().max(numeric.abs());
            if scale > 1e-9 {
                worst = worst.max((a - numeric).abs() / scale);
            }
        }
    }
    assert!(worst <= 1e-5, "{worst}");
}

#[test]
fn default_finetune_halves_the_loss_and_keeps_w0() {
    let cfg = ToyConfig::default();
    assert_eq!((cfg.rank, cfg.alpha, cfg.learning_rate, cfg.weight_decay, cfg.steps), (16, 16.0, 1e-4, 0.01, 200));
    let (_, trace) = toy_finetune(&cfg).unwrap();
    assert_eq!(trace.losses.len(), 201);
    assert!(trace.last() < 0.5 * trace.initial(), "{} -> {}", trace.initial(), trace.last());
    assert_eq!(trace.frozen_sha256_before, trace.frozen_sha256_after);
    assert_eq!(trace.trainable_params, 2 * 16 * (64 + 64));
}

#[test]
fn zero_learning_rate_gives_a_flat_trace() {
    let cfg = ToyConfig { d_model: 16, samples: 8, steps: 20, learning_rate: 0.0, ..Default::default() };
    let (_, trace) = toy_finetune(&cfg).unwrap();
    assert!(trace.losses.iter().all(|&l| l == trace.losses[0]));
}

#[test]
fn seeded_runs_are_identical() {
    let cfg = ToyConfig { steps: 30, ..Default::default() };
    let (a, ta) = toy_finetune(&cfg).unwrap();
    let (b, tb) = toy_finetune(&cfg).unwrap();
    assert_eq!(ta, tb);
    assert_eq!(a.query, b.query);
    assert_eq!(a.value, b.value);
}

#[test]
fn rank_four_fits_a_rank_two_target() {
    let small = ToyConfig {
        d_model: 16,
        seq_len: 4,
        samples: 16,
        input_rank: 4,
        rank: 4,
        alpha: 4.0,
        learning_rate: 1e-2,
        weight_decay: 0.0,
        steps: 1000,
        target_rank: 2,
        target_scale: 0.2,
        seed: 0,
    };
    let (_, trace) = toy_finetune(&small).unwrap();
    assert!(trace.last() < 1e-4 * trace.initial(), "{} -> {}", trace.initial(), trace.last());
    let tail = &trace.losses[900..];
    assert!(tail.iter().all(|&l| l < 1e-3 * trace.initial()));
}

#[test]
fn adapter_files_round_trip() {
    let ad = random_adapter(7, 5, 3, 1.5, 77);
    let bytes = write_adapter(&ad);
    assert_eq!(&bytes[..4], b"PMLA");
    assert_eq!(bytes.len(), 38 + 8 * 3 * (7 + 5));
    assert_eq!(read_adapter(&bytes, ad.w0().clone()).unwrap(), ad);
    assert!(read_adapter(&bytes[..40], ad.w0().clone()).is_err());
    assert!(read_adapter(&bytes, DMatrix::zeros(5, 7)).is_err());
}

proptest! {
    #[test]
    fn small_rank_always_saves_parameters(d in 1usize..512, k in 1usize..512, r in 1usize..256) {
        prop_assume!(r * (d + k) < d * k);
        prop_assert!(param_count(d, k, r).unwrap() < d * k);
    }

    #[test]
    fn trainable_count_is_r_times_d_plus_k(d in 1usize..40, k in 1usize..40, r in 1usize..8, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ad = LoraAdapter::new(random(d, k, &mut rng), r, 1.0, &mut rng).unwrap();
        prop_assert_eq!(ad.trainable_params(), r * (d + k));
        prop_assert_eq!(ad.trainable_params(), param_count(d, k, r).unwrap());
    }
}
