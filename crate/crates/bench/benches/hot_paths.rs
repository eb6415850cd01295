use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coinbet::harness::random_unit_vector;
use coinbet::lea::{hedge_predict, lea_predict, lea_update, LeaState};
use coinbet::numerics::log_gamma;
use coinbet::olo::{absolute_loss_reward, KtOlo, OloAlgorithm};
use coinbet::potentials::PotentialDescriptor;
use coinbet::ProbSimplex;

fn bench_log_gamma(c: &mut Criterion) {
    c.bench_function("log_gamma", |b| {
        let mut x = 0.51;
        b.iter(|| {
            x += 0.37;
            if x > 200.0 {
                x -= 199.5;
            }
            black_box(log_gamma(black_box(x)).unwrap())
        })
    });
}

fn bench_potential_eval(c: &mut Criterion) {
    let descriptor = PotentialDescriptor::shifted_kt(16.0).unwrap();
    let eval = descriptor.at(1000);
    c.bench_function("potential_log_value_t1000", |b| {
        let mut x = -900.0;
        b.iter(|| {
            x += 1.7;
            if x > 900.0 {
                x -= 1800.0;
            }
            black_box(eval.log_value(black_box(x)).unwrap())
        })
    });
}

fn bench_olo_round(c: &mut Criterion) {
    let dim = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let examples: Vec<_> = (0..256)
        .map(|_| {
            (
                random_unit_vector(dim, &mut rng),
                rng.random::<f64>() * 4.0 - 2.0,
            )
        })
        .collect();
    c.bench_function("olo_kt_round_d10", |b| {
        let mut learner = KtOlo::new(1.0, dim).unwrap();
        let mut i = 0usize;
        b.iter(|| {
            let (x, y) = &examples[i % examples.len()];
            i += 1;
            let w = learner.predict();
            let reward = absolute_loss_reward(&w, x, *y).unwrap();
            learner.observe(&reward).unwrap();
            black_box(w.norm())
        })
    });
}

fn bench_lea_round(c: &mut Criterion) {
    let experts = 126;
    let prior = ProbSimplex::uniform(experts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rewards: Vec<Vec<f64>> = (0..64)
        .map(|_| (0..experts).map(|_| rng.random::<f64>()).collect())
        .collect();
    c.bench_function("lea_kt_round_n126", |b| {
        let mut state = LeaState::unshifted(prior.clone());
        let mut i = 0usize;
        b.iter(|| {
            let reward = &rewards[i % rewards.len()];
            i += 1;
            let p = lea_predict(&state).unwrap();
            state = lea_update(&state, &p, reward).unwrap();
            black_box(p.len())
        })
    });
    c.bench_function("hedge_round_n126", |b| {
        let mut cum = vec![0.0f64; experts];
        let mut i = 0usize;
        b.iter(|| {
            let reward = &rewards[i % rewards.len()];
            i += 1;
            let p = hedge_predict(&prior, &cum, 0.5).unwrap();
            for (c, &g) in cum.iter_mut().zip(reward) {
                *c += g;
            }
            black_box(p.len())
        })
    });
}

criterion_group!(
    benches,
    bench_log_gamma,
    bench_potential_eval,
    bench_olo_round,
    bench_lea_round
);
criterion_main!(benches);
