//! Seeded synthetic streams: linear-regression examples on the unit sphere,
//! random coin sequences, and random expert rewards. Every generator is a
//! pure function of its arguments, so a recorded seed reproduces the stream
//! bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::olo::HilbertVector;

/// Uniform direction: normalized Gaussian sample.
pub fn random_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> HilbertVector {
    assert!(dim >= 1);
    loop {
        let coords: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return HilbertVector::new(coords.iter().map(|c| c / norm).collect())
                .expect("finite by construction");
        }
    }
}

/// A regression stream with a known planted target.
#[derive(Debug, Clone)]
pub struct SyntheticRegression {
    /// Unit-norm inputs with labels y = ⟨target, x⟩ + noise·z.
    pub examples: Vec<(HilbertVector, f64)>,
    pub target: HilbertVector,
}

/// Linear data on the unit sphere: x_t uniform directions, labels from a
/// planted vector of the requested norm plus Gaussian noise.
pub fn synthetic_linear_stream(
    dim: usize,
    rounds: u64,
    noise: f64,
    norm_u: f64,
    seed: u64,
) -> Result<SyntheticRegression> {
    if dim == 0 {
        return Err(Error::Config("dimension must be ≥ 1".to_string()));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::Config(format!(
            "noise {noise} must be finite and ≥ 0"
        )));
    }
    if !(norm_u >= 0.0) || !norm_u.is_finite() {
        return Err(Error::Config(format!(
            "target norm {norm_u} must be finite and ≥ 0"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = if norm_u == 0.0 {
        HilbertVector::zeros(dim)
    } else {
        random_unit_vector(dim, &mut rng).scaled(norm_u)
    };
    let examples = (0..rounds)
        .map(|_| {
            let x = random_unit_vector(dim, &mut rng);
            let z: f64 = rng.sample(StandardNormal);
            let y = target.dot(&x) + noise * z;
            (x, y)
        })
        .collect();
    Ok(SyntheticRegression { examples, target })
}

/// Fair ±1 coin flips.
pub fn random_binary_coins(rounds: u64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .map(|_| if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 })
        .collect()
}

/// Coins uniform on [−1, 1].
pub fn random_real_coins(rounds: u64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect()
}

/// Expert rewards uniform on [0, 1]^N, one row per round.
pub fn random_expert_stream(experts: usize, rounds: u64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .map(|_| (0..experts).map(|_| rng.random::<f64>()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_stream_shape_and_determinism() {
        let a = synthetic_linear_stream(10, 50, 0.1, 5.0, 99).unwrap();
        assert_eq!(a.examples.len(), 50);
        assert!((a.target.norm() - 5.0).abs() < 1e-12);
        for (x, y) in &a.examples {
            assert!((x.norm() - 1.0).abs() < 1e-12);
            assert!(y.is_finite());
        }
        let b = synthetic_linear_stream(10, 50, 0.1, 5.0, 99).unwrap();
        assert_eq!(a.examples, b.examples);
        assert_eq!(a.target, b.target);
        let c = synthetic_linear_stream(10, 50, 0.1, 5.0, 100).unwrap();
        assert_ne!(a.examples, c.examples);

        // Zero noise makes labels exact inner products.
        let exact = synthetic_linear_stream(3, 20, 0.0, 2.0, 1).unwrap();
        for (x, y) in &exact.examples {
            assert!((y - exact.target.dot(x)).abs() < 1e-12);
        }
        assert!(synthetic_linear_stream(0, 5, 0.1, 1.0, 0).is_err());
        assert!(synthetic_linear_stream(3, 5, -0.1, 1.0, 0).is_err());
    }

    #[test]
    fn coin_generators_respect_ranges() {
        let binary = random_binary_coins(200, 5);
        assert_eq!(binary.len(), 200);
        assert!(binary.iter().all(|&g| g == 1.0 || g == -1.0));
        assert_eq!(binary, random_binary_coins(200, 5));

        let real = random_real_coins(200, 5);
        assert!(real.iter().all(|&g| (-1.0..=1.0).contains(&g)));
        // Fair coins hover near zero mean.
        let mean = binary.iter().sum::<f64>() / 200.0;
        assert!(mean.abs() < 0.25);
    }

    #[test]
    fn expert_stream_in_unit_box() {
        let stream = random_expert_stream(8, 30, 3);
        assert_eq!(stream.len(), 30);
        for row in &stream {
            assert_eq!(row.len(), 8);
            assert!(row.iter().all(|&g| (0.0..=1.0).contains(&g)));
        }
        assert_eq!(stream, random_expert_stream(8, 30, 3));
    }
}
