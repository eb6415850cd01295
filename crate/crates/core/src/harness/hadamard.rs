//! The planted-experts stream built from a Hadamard matrix: mutually
//! orthogonal ±1 rows give maximally spread binary losses, a seeded subset
//! of rows gets a small loss advantage, and the columns are tiled to the
//! requested horizon. Rewards stay in [0,1]^N and the planted rows are the
//! best experts by exactly half the configured gap.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How the advantage gap is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// Subtract the gap from the per-round losses of the good rows, then
    /// clamp to [0,1]. The planted rows become strictly better.
    #[default]
    GoodLoss,
    /// Subtract the gap from the per-round rewards of every other row, then
    /// clamp. Same ordering, implemented as a penalty instead of a bonus.
    OthersReward,
}

/// Sylvester's doubling construction: order must be a power of two. Row 0 is
/// all ones; distinct rows are orthogonal.
pub fn sylvester_matrix(order: usize) -> Result<Vec<Vec<i8>>> {
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::Config(format!(
            "matrix order {order} is not a power of two"
        )));
    }
    let mut h = vec![vec![1i8]];
    while h.len() < order {
        let n = h.len();
        let mut next = vec![vec![0i8; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = h[i][j];
                next[i][j + n] = h[i][j];
                next[i + n][j] = h[i][j];
                next[i + n][j + n] = -h[i][j];
            }
        }
        h = next;
    }
    Ok(h)
}

/// Periodic reward matrix for a set of experts, tiled cyclically to the
/// horizon.
#[derive(Debug, Clone)]
pub struct ExpertsStream {
    /// Per-expert rewards over one period (experts × period length).
    period: Vec<Vec<f64>>,
    rounds: u64,
    good_rows: Vec<usize>,
}

impl ExpertsStream {
    pub fn experts(&self) -> usize {
        self.period.len()
    }

    pub fn period_len(&self) -> usize {
        self.period[0].len()
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Expert indices that received the advantage, ascending.
    pub fn good_rows(&self) -> &[usize] {
        &self.good_rows
    }

    /// Reward vector of round t (0-based), t < rounds.
    pub fn reward_at(&self, t: u64) -> Vec<f64> {
        assert!(
            t < self.rounds,
            "round {t} past the horizon {}",
            self.rounds
        );
        let col = (t % self.period_len() as u64) as usize;
        self.period.iter().map(|row| row[col]).collect()
    }

    /// The full T×N reward matrix. 33 MB at the flagship size; prefer
    /// `reward_at` when streaming.
    pub fn materialize(&self) -> Vec<Vec<f64>> {
        (0..self.rounds).map(|t| self.reward_at(t)).collect()
    }

    /// Per-expert mean reward over the whole horizon.
    pub fn mean_rewards(&self) -> Vec<f64> {
        let p = self.period_len() as u64;
        let full_cycles = self.rounds / p;
        let remainder = (self.rounds % p) as usize;
        self.period
            .iter()
            .map(|row| {
                let cycle_sum: f64 = row.iter().sum();
                let tail_sum: f64 = row[..remainder].iter().sum();
                (full_cycles as f64 * cycle_sum + tail_sum) / self.rounds as f64
            })
            .collect()
    }
}

/// Builds the planted-experts stream:
///
/// 1. Sylvester matrix of the given order; the all-ones row is dropped,
///    leaving order−1 non-constant rows.
/// 2. Every row is duplicated with inverted signs: 2(order−1) experts
///    (126 at order 64).
/// 3. Entries become losses ℓ = (1−h)/2 ∈ {0,1}, the gap is applied per
///    `mode` with clamping to [0,1], and rewards are g = 1 − ℓ.
/// 4. Columns are tiled cyclically out to `rounds`.
///
/// `good_count` rows are drawn (seeded) from the order−1 un-inverted rows,
/// so a planted row's mirror is never itself planted; mirrors would
/// otherwise make the advantage ill-defined. Because clamping cancels half
/// of each subtraction on binary losses, the planted rows beat the rest by
/// gap/2 in mean reward, not by the full gap.
pub fn hadamard_experts(
    order: usize,
    good_count: usize,
    gap: f64,
    rounds: u64,
    seed: u64,
    mode: GapMode,
) -> Result<ExpertsStream> {
    if order < 2 {
        return Err(Error::Config(format!(
            "order {order} leaves no non-constant rows"
        )));
    }
    let h = sylvester_matrix(order)?;
    let originals = order - 1;
    if good_count == 0 || good_count > originals {
        return Err(Error::Config(format!(
            "good row count {good_count} outside 1..={originals} (rows are planted among the un-inverted copies)"
        )));
    }
    if !(0.0..=1.0).contains(&gap) {
        return Err(Error::Config(format!("gap {gap} outside [0, 1]")));
    }

    // Orthogonality sanity on the source matrix.
    for i in 0..order {
        for j in (i + 1)..order {
            let dot: i64 = h[i]
                .iter()
                .zip(&h[j])
                .map(|(&a, &b)| a as i64 * b as i64)
                .sum();
            if dot != 0 {
                return Err(Error::InvariantViolated(format!(
                    "matrix rows {i} and {j} are not orthogonal"
                )));
            }
        }
    }

    let mut pool: Vec<usize> = (0..originals).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let mut good_rows: Vec<usize> = pool[..good_count].to_vec();
    good_rows.sort_unstable();

    // Expert e < originals is matrix row e+1; expert e ≥ originals is the
    // sign-inverted copy of expert e − originals.
    let experts = 2 * originals;
    let mut period = vec![vec![0.0f64; order]; experts];
    for e in 0..experts {
        let (row, flip) = if e < originals {
            (&h[e + 1], false)
        } else {
            (&h[e - originals + 1], true)
        };
        let good = good_rows.binary_search(&e).is_ok();
        for (col, &entry) in row.iter().enumerate() {
            let sign = if flip { -entry } else { entry };
            let loss = (1.0 - sign as f64) / 2.0;
            let reward = match mode {
                GapMode::GoodLoss => {
                    let adjusted = if good {
                        (loss - gap).clamp(0.0, 1.0)
                    } else {
                        loss
                    };
                    1.0 - adjusted
                }
                GapMode::OthersReward => {
                    let reward = 1.0 - loss;
                    if good {
                        reward
                    } else {
                        (reward - gap).clamp(0.0, 1.0)
                    }
                }
            };
            debug_assert!((0.0..=1.0).contains(&reward));
            period[e][col] = reward;
        }
    }

    Ok(ExpertsStream {
        period,
        rounds,
        good_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sylvester_base_and_validation() {
        assert_eq!(sylvester_matrix(1).unwrap(), vec![vec![1]]);
        assert_eq!(sylvester_matrix(2).unwrap(), vec![vec![1, 1], vec![1, -1]]);
        assert!(sylvester_matrix(0).is_err());
        assert!(sylvester_matrix(3).is_err());
        assert!(sylvester_matrix(48).is_err());
    }

    #[test]
    fn rows_are_orthogonal() {
        let h = sylvester_matrix(8).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let dot: i64 = h[i].iter().zip(&h[j]).map(|(&a, &b)| (a * b) as i64).sum();
                assert_eq!(dot, if i == j { 8 } else { 0 });
            }
        }
        // Row 0 is the constant row.
        assert!(h[0].iter().all(|&v| v == 1));
        // Every other row balances to zero.
        for row in &h[1..] {
            assert_eq!(row.iter().map(|&v| v as i64).sum::<i64>(), 0);
        }
    }

    #[test]
    fn flagship_shape() {
        let stream = hadamard_experts(64, 5, 0.025, 320, 7, GapMode::GoodLoss).unwrap();
        assert_eq!(stream.experts(), 126);
        assert_eq!(stream.period_len(), 64);
        assert_eq!(stream.rounds(), 320);
        assert_eq!(stream.good_rows().len(), 5);
        for t in [0u64, 1, 63, 64, 319] {
            let rewards = stream.reward_at(t);
            assert_eq!(rewards.len(), 126);
            for &g in &rewards {
                assert!((0.0..=1.0).contains(&g));
            }
        }
        // Cyclic tiling repeats the period.
        assert_eq!(stream.reward_at(3), stream.reward_at(67));
    }

    #[test]
    fn planted_rows_lead_by_half_the_gap() {
        for mode in [GapMode::GoodLoss, GapMode::OthersReward] {
            let gap = 0.025;
            let stream = hadamard_experts(64, 5, gap, 64 * 8, 42, mode).unwrap();
            let means = stream.mean_rewards();
            for &good in stream.good_rows() {
                let mirror = good + 63;
                let lead = means[good] - means[mirror];
                // Binary losses put half of each subtraction into the clamp,
                // so the advantage is gap/2.
                assert!(
                    (lead - gap / 2.0).abs() < 1e-12,
                    "mode {mode:?}: lead {lead} for expert {good}"
                );
            }
            // Planted rows are the best experts overall.
            let best_plain = means
                .iter()
                .enumerate()
                .filter(|(i, _)| !stream.good_rows().contains(i))
                .map(|(_, &m)| m)
                .fold(f64::NEG_INFINITY, f64::max);
            for &good in stream.good_rows() {
                assert!(means[good] > best_plain);
            }
        }
    }

    #[test]
    fn mirrors_negate_rewards() {
        let stream = hadamard_experts(64, 1, 0.0, 64, 0, GapMode::GoodLoss).unwrap();
        // At zero gap, expert e and its mirror split every round: one earns
        // 1, the other 0.
        for t in 0..64 {
            let rewards = stream.reward_at(t);
            for e in 0..63 {
                assert_eq!(rewards[e] + rewards[e + 63], 1.0);
            }
        }
    }

    #[test]
    fn seeded_selection_is_deterministic() {
        let a = hadamard_experts(64, 20, 0.025, 64, 11, GapMode::GoodLoss).unwrap();
        let b = hadamard_experts(64, 20, 0.025, 64, 11, GapMode::GoodLoss).unwrap();
        assert_eq!(a.good_rows(), b.good_rows());
        let c = hadamard_experts(64, 20, 0.025, 64, 12, GapMode::GoodLoss).unwrap();
        assert_ne!(a.good_rows(), c.good_rows());
        // All planted among the un-inverted rows.
        assert!(a.good_rows().iter().all(|&r| r < 63));
    }

    #[test]
    fn validates_arguments() {
        assert!(hadamard_experts(64, 0, 0.025, 64, 0, GapMode::GoodLoss).is_err());
        assert!(hadamard_experts(64, 64, 0.025, 64, 0, GapMode::GoodLoss).is_err());
        assert!(hadamard_experts(64, 5, 1.5, 64, 0, GapMode::GoodLoss).is_err());
        assert!(hadamard_experts(1, 1, 0.025, 64, 0, GapMode::GoodLoss).is_err());
        assert!(hadamard_experts(63, 5, 0.025, 64, 0, GapMode::GoodLoss).is_err());
    }
}
