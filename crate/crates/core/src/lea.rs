//! Learning with expert advice via one coin-betting gambler per expert.
//!
//! Expert i gets its own 1-d count-based bettor with unit endowment. Each
//! round the instantaneous stake w_{t,i} = coin_sum_i/(t+δ)·wealth_i is
//! computed, the prediction distributes prior mass over the experts with
//! positive stakes,
//!
//!   p_t ∝ π_i·[w_{t,i}]₊   (falling back to π when no stake is positive),
//!
//! and after the reward vector g_t ∈ [0,1]^N arrives each bettor is fed the
//! centered coin g̃_{t,i} = g_{t,i} − ⟨g_t, p_t⟩, clipped to its positive
//! part for experts whose stake was not positive. That clipping is what
//! makes the scheme sound: the weighted stake-reward sum Σ π_i g̃ w is never
//! positive, so the priors' total wealth cannot grow, while any single
//! expert's bettor still tracks its own coin sum. Run with δ = T/2 the
//! regret against u is at most √(3T(3 + KL(u‖π))) with no tunable rate.
//!
//! The δ = 0 variant (no horizon needed), the exponential-weights baseline,
//! and the doubling-trick anytime wrapper live here as well.

use crate::error::{Error, Result};
use crate::numerics::ProbSimplex;
use crate::potentials::shifted_kt_value;

/// Dominance tolerance per expert: Σ π_i g̃ w ≤ 0 exactly in real
/// arithmetic, so anything beyond N·1e-12 is a logic error, not rounding.
const DOMINANCE_TOL_PER_EXPERT: f64 = 1e-12;

/// One-per-expert betting states plus the shared round clock.
#[derive(Debug, Clone)]
pub struct LeaState {
    prior: ProbSimplex,
    delta: f64,
    horizon: Option<u64>,
    coin_sums: Vec<f64>,
    wealth_terms: Vec<f64>,
    last_weights: Option<Vec<f64>>,
    round: u64,
    max_dominance_residual: f64,
}

impl LeaState {
    /// Algorithm tuned to a known horizon: δ = T/2.
    pub fn shifted(prior: ProbSimplex, horizon: u64) -> Result<Self> {
        Self::with_delta_fraction(prior, horizon, 0.5)
    }

    /// δ = fraction·T for a known horizon T ≥ 1. The default fraction 1/2
    /// gives the √(3T(3+KL)) bound; other fractions trade its two constants.
    pub fn with_delta_fraction(prior: ProbSimplex, horizon: u64, fraction: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain(
                "LeaState::with_delta_fraction",
                "horizon must be ≥ 1".to_string(),
            ));
        }
        if !(fraction >= 0.0) || !fraction.is_finite() {
            return Err(Error::domain(
                "LeaState::with_delta_fraction",
                format!("delta fraction = {fraction} must be finite and ≥ 0"),
            ));
        }
        Ok(Self::build(prior, fraction * horizon as f64, Some(horizon)))
    }

    /// Horizon-free variant with δ = 0; costs an extra ln T in the bound.
    pub fn unshifted(prior: ProbSimplex) -> Self {
        Self::build(prior, 0.0, None)
    }

    fn build(prior: ProbSimplex, delta: f64, horizon: Option<u64>) -> Self {
        let n = prior.len();
        LeaState {
            prior,
            delta,
            horizon,
            coin_sums: vec![0.0; n],
            wealth_terms: vec![1.0; n],
            last_weights: None,
            round: 0,
            max_dominance_residual: 0.0,
        }
    }

    pub fn prior(&self) -> &ProbSimplex {
        &self.prior
    }

    pub fn experts(&self) -> usize {
        self.prior.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn coin_sums(&self) -> &[f64] {
        &self.coin_sums
    }

    pub fn wealth_terms(&self) -> &[f64] {
        &self.wealth_terms
    }

    /// Stakes from the most recent settled round, if any.
    pub fn last_weights(&self) -> Option<&[f64]> {
        self.last_weights.as_deref()
    }

    /// Largest Σ π_i g̃ w seen so far; stays within N·1e-12 of zero on any
    /// legal run.
    pub fn max_dominance_residual(&self) -> f64 {
        self.max_dominance_residual
    }

    /// Stakes for the upcoming round: w_i = coin_sum_i/(t+δ)·wealth_i.
    fn upcoming_weights(&self) -> Vec<f64> {
        let denom = (self.round + 1) as f64 + self.delta;
        self.coin_sums
            .iter()
            .zip(&self.wealth_terms)
            .map(|(&c, &wealth)| c / denom * wealth)
            .collect()
    }
}

/// The distribution played at the upcoming round: prior mass restricted to
/// experts with positive stakes, or the prior itself when there are none.
pub fn lea_predict(state: &LeaState) -> Result<ProbSimplex> {
    if let Some(horizon) = state.horizon {
        if state.round >= horizon {
            return Err(Error::domain(
                "lea_predict",
                format!(
                    "round {} is past the configured horizon {horizon}",
                    state.round
                ),
            ));
        }
    }
    let weights = state.upcoming_weights();
    let masses: Vec<f64> = state
        .prior
        .weights()
        .iter()
        .zip(&weights)
        .map(|(&pi, &w)| if w > 0.0 { pi * w } else { 0.0 })
        .collect();
    if masses.iter().sum::<f64>() == 0.0 {
        return Ok(state.prior.clone());
    }
    ProbSimplex::from_unnormalized(masses)
}

/// Settles one round: centers the rewards around the played prediction,
/// clips the centered coin to its positive part for experts whose stake was
/// not positive, feeds each bettor, and advances the clock. Rejects rewards
/// outside [0,1] and fails loudly if the dominance invariant Σ π_i g̃ w ≤ 0
/// breaks beyond rounding.
pub fn lea_update(state: &LeaState, prediction: &ProbSimplex, reward: &[f64]) -> Result<LeaState> {
    let n = state.experts();
    if reward.len() != n || prediction.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: if reward.len() != n {
                reward.len()
            } else {
                prediction.len()
            },
        });
    }
    for (i, &g) in reward.iter().enumerate() {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::ExpertRewardOutOfRange { index: i, value: g });
        }
    }
    if let Some(horizon) = state.horizon {
        if state.round >= horizon {
            return Err(Error::domain(
                "lea_update",
                format!(
                    "round {} is past the configured horizon {horizon}",
                    state.round
                ),
            ));
        }
    }

    let weights = state.upcoming_weights();
    let mean_reward = prediction.dot(reward);
    let centered: Vec<f64> = reward
        .iter()
        .zip(&weights)
        .map(|(&g, &w)| {
            let tilde = g - mean_reward;
            if w > 0.0 {
                tilde
            } else {
                tilde.max(0.0)
            }
        })
        .collect();

    let dominance: f64 = state
        .prior
        .weights()
        .iter()
        .zip(&centered)
        .zip(&weights)
        .map(|((&pi, &tilde), &w)| pi * tilde * w)
        .sum();
    if dominance > n as f64 * DOMINANCE_TOL_PER_EXPERT {
        return Err(Error::InvariantViolated(format!(
            "stake-weighted centered reward {dominance} is positive at round {}",
            state.round + 1
        )));
    }

    let denom = (state.round + 1) as f64 + state.delta;
    let mut next = state.clone();
    for (i, &tilde) in centered.iter().enumerate() {
        // Multiplicative form of wealth ← wealth + w_i·g̃_i; identical
        // algebraically because w_i = (coin_sum_i/denom)·wealth_i.
        next.wealth_terms[i] *= 1.0 + state.coin_sums[i] / denom * tilde;
        next.coin_sums[i] += tilde;
    }
    next.round += 1;
    next.last_weights = Some(weights);
    next.max_dominance_residual = state.max_dominance_residual.max(dominance);
    Ok(next)
}

/// Exponential weights over cumulative rewards: p_i ∝ π_i·exp(rate·R_i),
/// computed with max-subtraction so large products never overflow.
pub fn hedge_predict(prior: &ProbSimplex, cum_rewards: &[f64], rate: f64) -> Result<ProbSimplex> {
    if cum_rewards.len() != prior.len() {
        return Err(Error::DimensionMismatch {
            left: prior.len(),
            right: cum_rewards.len(),
        });
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::domain(
            "hedge_predict",
            format!("rate = {rate} must be finite and > 0"),
        ));
    }
    let top = cum_rewards
        .iter()
        .zip(prior.weights())
        .filter(|(_, &pi)| pi > 0.0)
        .map(|(&r, _)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::NonFinite {
            op: "hedge_predict",
            x: top,
        });
    }
    let masses: Vec<f64> = prior
        .weights()
        .iter()
        .zip(cum_rewards)
        .map(|(&pi, &r)| pi * (rate * (r - top)).exp())
        .collect();
    ProbSimplex::from_unnormalized(masses)
}

/// Σ_t ⟨g_t, u⟩ − Σ_t ⟨g_t, p_t⟩ over a played trace.
pub fn lea_regret(trace: &[(ProbSimplex, Vec<f64>)], competitor: &ProbSimplex) -> Result<f64> {
    let mut total = 0.0;
    for (prediction, reward) in trace {
        if reward.len() != competitor.len() || prediction.len() != competitor.len() {
            return Err(Error::DimensionMismatch {
                left: competitor.len(),
                right: reward.len(),
            });
        }
        total += competitor.dot(reward) - prediction.dot(reward);
    }
    Ok(total)
}

/// Regret against the best single expert in hindsight: returns that
/// expert's index and the regret to it.
pub fn best_expert_regret(trace: &[(ProbSimplex, Vec<f64>)]) -> Result<(usize, f64)> {
    let first = trace
        .first()
        .ok_or(Error::EmptySequence("best_expert_regret"))?;
    let n = first.1.len();
    let mut totals = vec![0.0; n];
    for (_, reward) in trace {
        if reward.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: reward.len(),
            });
        }
        for (sum, &g) in totals.iter_mut().zip(reward) {
            *sum += g;
        }
    }
    let best = (0..n)
        .max_by(|&a, &b| totals[a].total_cmp(&totals[b]))
        .expect("nonempty by construction");
    let regret = lea_regret(trace, &ProbSimplex::one_hot(n, best)?)?;
    Ok((best, regret))
}

/// Runs the horizon-tuned algorithm on epochs of length 1, 2, 4, …, each
/// with δ = fraction·(epoch length) and completely fresh expert states, for
/// a stream of unknown length. Prefix regret pays the factor √2/(√2−1) over
/// the fixed-horizon bound.
pub fn doubling_wrapper(
    prior: &ProbSimplex,
    stream: &[Vec<f64>],
    delta_fraction: f64,
) -> Result<Vec<ProbSimplex>> {
    let mut predictions = Vec::with_capacity(stream.len());
    let mut consumed = 0usize;
    let mut epoch_len = 1u64;
    while consumed < stream.len() {
        let mut state = LeaState::with_delta_fraction(prior.clone(), epoch_len, delta_fraction)?;
        let take = (epoch_len as usize).min(stream.len() - consumed);
        for reward in &stream[consumed..consumed + take] {
            let p = lea_predict(&state)?;
            state = lea_update(&state, &p, reward)?;
            predictions.push(p);
        }
        consumed += take;
        epoch_len = epoch_len.saturating_mul(2);
    }
    Ok(predictions)
}

/// Everything a full run certifies, beyond the predictions themselves.
#[derive(Debug, Clone)]
pub struct LeaRunAudit {
    pub predictions: Vec<ProbSimplex>,
    pub final_state: LeaState,
    /// Largest Σ π_i g̃ w across rounds (must sit within N·1e-12 of zero).
    pub max_dominance_residual: f64,
    /// Smallest (wealth_i − F_t(coin_sum_i))/max(1, F_t) across experts and
    /// audited rounds; −1e-9 is the failure line. None when floor checks
    /// were skipped.
    pub min_wealth_floor_slack: Option<f64>,
    /// Σ π_i F_T(coin_sum_i) at termination; at most 1 up to rounding.
    pub aggregate_potential: f64,
}

/// Drives a state over a whole reward stream and returns the audit trail:
/// dominance residuals, optional per-round per-expert wealth floors against
/// the shifted potential at the state's δ, and the terminal aggregate
/// Σ π_i F_T(coin_sum_i).
pub fn run_lea_audited(
    mut state: LeaState,
    stream: &[Vec<f64>],
    check_floor_every_round: bool,
) -> Result<LeaRunAudit> {
    let mut predictions = Vec::with_capacity(stream.len());
    let mut min_slack: Option<f64> = None;
    for reward in stream {
        let p = lea_predict(&state)?;
        state = lea_update(&state, &p, reward)?;
        predictions.push(p);
        if check_floor_every_round {
            for (&coin_sum, &wealth) in state.coin_sums.iter().zip(&state.wealth_terms) {
                let floor = shifted_kt_value(state.round, coin_sum, state.delta)?;
                let slack = (wealth - floor) / floor.max(1.0);
                min_slack = Some(min_slack.map_or(slack, |s: f64| s.min(slack)));
            }
        }
    }
    let aggregate_potential = state
        .prior
        .weights()
        .iter()
        .zip(&state.coin_sums)
        .map(|(&pi, &coin_sum)| Ok(pi * shifted_kt_value(state.round, coin_sum, state.delta)?))
        .sum::<Result<f64>>()?;
    Ok(LeaRunAudit {
        predictions,
        max_dominance_residual: state.max_dominance_residual,
        min_wealth_floor_slack: min_slack,
        aggregate_potential,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> ProbSimplex {
        ProbSimplex::uniform(n).unwrap()
    }

    #[test]
    fn fresh_state_predicts_prior() {
        let state = LeaState::shifted(uniform(3), 8).unwrap();
        let p = lea_predict(&state).unwrap();
        assert_eq!(p.weights(), uniform(3).weights());
        let state = LeaState::unshifted(uniform(2));
        assert_eq!(lea_predict(&state).unwrap().weights(), &[0.5, 0.5]);
    }

    #[test]
    fn hand_trace_two_experts() {
        // N = 2, uniform prior, horizon 4 → δ = 2.
        let mut state = LeaState::shifted(uniform(2), 4).unwrap();
        let p1 = lea_predict(&state).unwrap();
        assert_eq!(p1.weights(), &[0.5, 0.5]);
        state = lea_update(&state, &p1, &[1.0, 0.0]).unwrap();
        // Mean reward 1/2; both stakes were 0, so both coins are clipped:
        // g̃ = (0.5, 0).
        assert_eq!(state.coin_sums(), &[0.5, 0.0]);
        assert_eq!(state.wealth_terms(), &[1.0, 1.0]);

        // t = 2: stakes (0.5/4·1, 0) = (0.125, 0) → all mass on expert 1.
        let weights = state.upcoming_weights();
        assert_eq!(weights, vec![0.125, 0.0]);
        let p2 = lea_predict(&state).unwrap();
        assert_eq!(p2.weights(), &[1.0, 0.0]);
    }

    #[test]
    fn constant_rewards_keep_prior() {
        let mut state = LeaState::shifted(uniform(3), 16).unwrap();
        for _ in 0..5 {
            let p = lea_predict(&state).unwrap();
            assert_eq!(p.weights(), uniform(3).weights());
            state = lea_update(&state, &p, &[0.7, 0.7, 0.7]).unwrap();
        }
        assert_eq!(state.coin_sums(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn all_nonpositive_stakes_fall_back_to_prior() {
        let mut state = LeaState::shifted(uniform(2), 8).unwrap();
        state.coin_sums = vec![-1.0, -0.5];
        let p = lea_predict(&state).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn update_validates_inputs() {
        let state = LeaState::shifted(uniform(2), 4).unwrap();
        let p = lea_predict(&state).unwrap();
        assert!(matches!(
            lea_update(&state, &p, &[1.0, 1.5]),
            Err(Error::ExpertRewardOutOfRange { index: 1, .. })
        ));
        assert!(lea_update(&state, &p, &[0.5, -0.1]).is_err());
        assert!(lea_update(&state, &p, &[0.5]).is_err());
        assert!(LeaState::shifted(uniform(2), 0).is_err());
        assert!(LeaState::with_delta_fraction(uniform(2), 4, -0.5).is_err());
    }

    #[test]
    fn horizon_is_enforced() {
        let mut state = LeaState::shifted(uniform(2), 2).unwrap();
        for _ in 0..2 {
            let p = lea_predict(&state).unwrap();
            state = lea_update(&state, &p, &[1.0, 0.0]).unwrap();
        }
        assert!(lea_predict(&state).is_err());
        let p = uniform(2);
        assert!(lea_update(&state, &p, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn centered_rewards_stay_bounded() {
        let mut state = LeaState::unshifted(uniform(4));
        let rewards = [
            [1.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 0.3, 0.9],
            [1.0, 1.0, 0.0, 0.0],
            [0.2, 0.8, 0.5, 0.5],
            [1.0, 0.0, 1.0, 0.0],
        ];
        let mut prev_sums = state.coin_sums().to_vec();
        for reward in rewards {
            let p = lea_predict(&state).unwrap();
            state = lea_update(&state, &p, &reward).unwrap();
            for (now, before) in state.coin_sums().iter().zip(&prev_sums) {
                assert!((now - before).abs() <= 1.0 + 1e-12);
            }
            prev_sums = state.coin_sums().to_vec();
        }
        assert!(state.max_dominance_residual() <= 4.0 * 1e-12);
    }

    #[test]
    fn multiplicative_wealth_matches_sum_form() {
        let mut state = LeaState::shifted(uniform(3), 32).unwrap();
        let mut sum_form = vec![1.0; 3];
        for t in 0..20u64 {
            let weights = state.upcoming_weights();
            let p = lea_predict(&state).unwrap();
            let reward: Vec<f64> = (0..3)
                .map(|i| (((t as usize + i * 7) % 10) as f64) / 10.0)
                .collect();
            let before = state.coin_sums().to_vec();
            state = lea_update(&state, &p, &reward).unwrap();
            for i in 0..3 {
                let tilde = state.coin_sums()[i] - before[i];
                sum_form[i] += weights[i] * tilde;
            }
        }
        for (a, b) in state.wealth_terms().iter().zip(&sum_form) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn hedge_examples() {
        let p = hedge_predict(&uniform(3), &[2.0, 2.0, 2.0], 1.0).unwrap();
        for w in p.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
        let p = hedge_predict(&uniform(2), &[1.0, 0.0], std::f64::consts::LN_2).unwrap();
        assert!((p.weights()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.weights()[1] - 1.0 / 3.0).abs() < 1e-15);
        let p = hedge_predict(&uniform(2), &[1.0, 0.0], 50.0).unwrap();
        assert!(p.weights()[0] >= 1.0 - 1e-15);
        // Prior support is preserved.
        let prior = ProbSimplex::one_hot(3, 1).unwrap();
        let p = hedge_predict(&prior, &[10.0, 0.0, 10.0], 1.0).unwrap();
        assert_eq!(p.weights(), &[0.0, 1.0, 0.0]);
        assert!(hedge_predict(&uniform(2), &[1.0, 0.0], 0.0).is_err());
        assert!(hedge_predict(&uniform(2), &[1.0], 1.0).is_err());
    }

    #[test]
    fn regret_helpers() {
        let p = uniform(2);
        let trace = vec![
            (p.clone(), vec![1.0, 0.0]),
            (p.clone(), vec![1.0, 0.0]),
            (p.clone(), vec![0.0, 1.0]),
        ];
        // Competitor equal to the prediction nets zero.
        assert_eq!(lea_regret(&trace, &p).unwrap(), 0.0);
        let (best, regret) = best_expert_regret(&trace).unwrap();
        assert_eq!(best, 0);
        assert!((regret - 0.5).abs() < 1e-15);
        assert!(best_expert_regret(&[]).is_err());
        // One expert: forced agreement.
        let solo = vec![(uniform(1), vec![0.3]), (uniform(1), vec![0.9])];
        assert_eq!(lea_regret(&solo, &uniform(1)).unwrap(), 0.0);
    }

    #[test]
    fn doubling_schedule_restarts() {
        let prior = uniform(2);
        let stream: Vec<Vec<f64>> = (0..7).map(|_| vec![1.0, 0.0]).collect();
        let predictions = doubling_wrapper(&prior, &stream, 0.5).unwrap();
        assert_eq!(predictions.len(), 7);
        // Epoch starts (rounds 1, 2, 4) predict the prior again.
        for start in [0usize, 1, 3] {
            assert_eq!(
                predictions[start].weights(),
                prior.weights(),
                "round {start}"
            );
        }
        // Inside epoch 3 the rich expert has taken over.
        assert!(predictions[5].weights()[0] > 0.99);
        assert!(doubling_wrapper(&prior, &[], 0.5).unwrap().is_empty());
    }

    #[test]
    fn audited_run_reports_clean_certificates() {
        let stream: Vec<Vec<f64>> = (0..40u64)
            .map(|t| {
                vec![
                    if t % 4 == 0 { 0.1 } else { 0.9 },
                    (t % 5) as f64 / 5.0,
                    0.5,
                ]
            })
            .collect();
        let state = LeaState::shifted(uniform(3), 40).unwrap();
        let audit = run_lea_audited(state, &stream, true).unwrap();
        assert_eq!(audit.predictions.len(), 40);
        assert!(audit.max_dominance_residual <= 3.0 * 1e-12);
        assert!(audit.min_wealth_floor_slack.unwrap() >= -1e-9);
        assert!(audit.aggregate_potential <= 1.0 + 1e-9);
        assert_eq!(audit.final_state.round(), 40);
    }
}
