//! The betting game itself: wealth accounting and bettor strategies.
//!
//! A gambler starts with endowment ε and each round stakes a signed fraction
//! β_t ∈ [−1, 1] of its current wealth on a coin outcome g_t ∈ [−1, 1]:
//!
//!   Wealth_t = Wealth_{t−1} · (1 + β_t·g_t)
//!
//! Borrowing is forbidden, so wealth never goes negative. The interesting
//! strategy is the count-based fraction β_t = (Σ_{i<t} g_i)/(t+δ), whose
//! wealth never falls below the shifted-KT potential at the running coin sum
//! (with equality on ±1 coins). The certificates in this module check that
//! floor and relate wealth to the best fixed fraction in hindsight.

use crate::error::{Error, Result};
use crate::numerics::kl_bernoulli;
use crate::potentials::shifted_kt_value;

/// Coin outcomes, each in [−1, 1], validated once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSequence {
    values: Vec<f64>,
}

impl CoinSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &g in &values {
            if !(g.abs() <= 1.0) {
                return Err(Error::CoinOutOfRange(g));
            }
        }
        Ok(CoinSequence { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether every outcome is exactly ±1 (the binary special case some
    /// guarantees are stated for).
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&g| g == 1.0 || g == -1.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// One gambler's running position: wealth, coin-sum, and round count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettingState {
    endowment: f64,
    wealth: f64,
    coin_sum: f64,
    round: u64,
}

impl BettingState {
    /// Fresh game with wealth = ε, no coins seen.
    pub fn new(endowment: f64) -> Result<Self> {
        if !(endowment > 0.0) || !endowment.is_finite() {
            return Err(Error::domain(
                "BettingState::new",
                format!("endowment = {endowment} must be finite and > 0"),
            ));
        }
        Ok(BettingState {
            endowment,
            wealth: endowment,
            coin_sum: 0.0,
            round: 0,
        })
    }

    pub fn endowment(&self) -> f64 {
        self.endowment
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    /// Net winnings so far: Wealth_t − ε.
    pub fn reward(&self) -> f64 {
        self.wealth - self.endowment
    }

    pub fn coin_sum(&self) -> f64 {
        self.coin_sum
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Stake `fraction` of current wealth on the next coin and settle it:
    /// wealth ← wealth·(1 + fraction·coin). Returns the advanced state.
    pub fn bet_and_settle(&self, fraction: f64, coin: f64) -> Result<BettingState> {
        if !(fraction.abs() <= 1.0) {
            return Err(Error::FractionOutOfRange(fraction));
        }
        if !(coin.abs() <= 1.0) {
            return Err(Error::CoinOutOfRange(coin));
        }
        Ok(BettingState {
            endowment: self.endowment,
            wealth: self.wealth * (1.0 + fraction * coin),
            coin_sum: self.coin_sum + coin,
            round: self.round + 1,
        })
    }
}

/// The count-based fraction for the upcoming round: coin_sum/(round+1+δ).
/// δ = 0 is the plain Krichevsky-Trofimov rule. Always in (−1, 1) because
/// |coin_sum| ≤ round.
pub fn kt_fraction_from_state(state: &BettingState, shift: f64) -> Result<f64> {
    if !(shift >= 0.0) || !shift.is_finite() {
        return Err(Error::domain(
            "kt_fraction_from_state",
            format!("shift = {shift} must be finite and ≥ 0"),
        ));
    }
    Ok(state.coin_sum / (state.round as f64 + 1.0 + shift))
}

/// The Kelly bet for a coin with known heads probability p: 2p − 1.
pub fn kelly_fraction(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(
            "kelly_fraction",
            format!("p = {p} must lie in [0, 1]"),
        ));
    }
    Ok(2.0 * p - 1.0)
}

/// Best fixed fraction in hindsight, β* = (Σg)/T, and the wealth it earns,
/// ε·Π(1 + β*·g_t). The product form is authoritative; for binary coins it
/// equals ε·exp(T·kl(1/2 + Σg/(2T) ‖ 1/2)), which property tests cross-check.
pub fn optimal_fixed_fraction_wealth(coins: &CoinSequence, endowment: f64) -> Result<(f64, f64)> {
    if coins.is_empty() {
        return Err(Error::EmptySequence("optimal_fixed_fraction_wealth"));
    }
    if !(endowment > 0.0) || !endowment.is_finite() {
        return Err(Error::domain(
            "optimal_fixed_fraction_wealth",
            format!("endowment = {endowment} must be finite and > 0"),
        ));
    }
    // The exact mean is within [−1, 1]; rounding in the sum can poke past.
    let fraction = (coins.sum() / coins.len() as f64).clamp(-1.0, 1.0);
    let wealth = endowment
        * coins
            .values()
            .iter()
            .map(|&g| 1.0 + fraction * g)
            .product::<f64>();
    Ok((fraction, wealth))
}

/// Outcome of running the count-based bettor over a coin sequence and
/// checking its wealth floor.
#[derive(Debug, Clone, Copy)]
pub struct WealthGuaranteeReport {
    /// Final wealth of the β_t = coin_sum/(t+δ) bettor.
    pub wealth: f64,
    /// The potential floor ε·F_T(Σg) it must stay above.
    pub floor: f64,
    /// wealth ≥ floor up to 1e-9 relative slack.
    pub holds: bool,
    /// For binary ±1 coins at δ = 0 only: the hindsight-oracle floor
    /// Wealth_T(β*)/(2√T). The 2√T price is specific to the unshifted rule;
    /// large shifts genuinely bet too little to stay above it.
    pub binary_oracle_floor: Option<f64>,
    /// wealth ≥ binary_oracle_floor, when that floor applies.
    pub binary_oracle_holds: Option<bool>,
}

const FLOOR_REL_SLACK: f64 = 1e-9;

/// Runs the count-based bettor (fraction coin_sum/(t+δ), endowment ε) over
/// `coins` and certifies its wealth floor ε·F_T(Σg), where F is the
/// shifted-KT potential at unit endowment. On binary coins with δ = 0 the
/// hindsight comparison against Wealth_T(β*)/(2√T) is reported as well.
pub fn kt_wealth_guarantee_check(
    coins: &CoinSequence,
    shift: f64,
    endowment: f64,
) -> Result<WealthGuaranteeReport> {
    let mut state = BettingState::new(endowment)?;
    for &g in coins.values() {
        let beta = kt_fraction_from_state(&state, shift)?;
        state = state.bet_and_settle(beta, g)?;
    }
    let t = coins.len() as u64;
    let floor = endowment * shifted_kt_value(t, state.coin_sum(), shift)?;
    let holds = state.wealth() >= floor - FLOOR_REL_SLACK * floor.max(1.0);

    let (binary_oracle_floor, binary_oracle_holds) =
        if shift == 0.0 && !coins.is_empty() && coins.is_binary() {
            let (_, oracle_wealth) = optimal_fixed_fraction_wealth(coins, endowment)?;
            let oracle_floor = oracle_wealth / (2.0 * (t as f64).sqrt());
            let oracle_holds =
                state.wealth() >= oracle_floor - FLOOR_REL_SLACK * oracle_floor.max(1.0);
            (Some(oracle_floor), Some(oracle_holds))
        } else {
            (None, None)
        };

    Ok(WealthGuaranteeReport {
        wealth: state.wealth(),
        floor,
        holds,
        binary_oracle_floor,
        binary_oracle_holds,
    })
}

/// Converts a log-loss regret guarantee into a wealth floor: a sequential
/// predictor with log-loss regret R against the best constant induces, via
/// β_t = 2p_t − 1, a bettor with final wealth at least
/// ε·exp(T·kl(1/2 + Σg/(2T) ‖ 1/2) − R).
pub fn logloss_regret_to_wealth_bound(
    logloss_regret: f64,
    t: u64,
    coin_sum: f64,
    endowment: f64,
) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain(
            "logloss_regret_to_wealth_bound",
            "t must be ≥ 1".to_string(),
        ));
    }
    if !(coin_sum.abs() <= t as f64) {
        return Err(Error::domain(
            "logloss_regret_to_wealth_bound",
            format!("|coin_sum| = {} exceeds t = {t}", coin_sum.abs()),
        ));
    }
    if !logloss_regret.is_finite() {
        return Err(Error::NonFinite {
            op: "logloss_regret_to_wealth_bound",
            x: logloss_regret,
        });
    }
    let tf = t as f64;
    let kl = kl_bernoulli(0.5 + coin_sum / (2.0 * tf), 0.5);
    Ok(endowment * (tf * kl - logloss_regret).exp())
}

/// The count-based predictor's log-loss regret bound against the best
/// constant: ½·ln t + ln 2.
pub fn kt_logloss_regret_bound(t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain(
            "kt_logloss_regret_bound",
            "t must be ≥ 1".to_string(),
        ));
    }
    Ok(0.5 * (t as f64).ln() + std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coins(values: &[f64]) -> CoinSequence {
        CoinSequence::new(values.to_vec()).unwrap()
    }

    #[test]
    fn zero_bet_keeps_wealth() {
        let state = BettingState::new(1.0).unwrap();
        let next = state.bet_and_settle(0.0, 0.7).unwrap();
        assert_eq!(next.wealth(), 1.0);
        assert_eq!(next.round(), 1);
        assert_eq!(next.coin_sum(), 0.7);
    }

    #[test]
    fn full_win_doubles() {
        let state = BettingState::new(1.0).unwrap();
        let next = state.bet_and_settle(1.0, 1.0).unwrap();
        assert_eq!(next.wealth(), 2.0);
        assert_eq!(next.reward(), 1.0);
    }

    #[test]
    fn full_loss_bankrupts_but_never_goes_negative() {
        let mut state = BettingState::new(2.0).unwrap();
        state = state.bet_and_settle(1.0, -1.0).unwrap();
        assert_eq!(state.wealth(), 0.0);
        state = state.bet_and_settle(0.5, 1.0).unwrap();
        assert_eq!(state.wealth(), 0.0);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        let state = BettingState::new(1.0).unwrap();
        assert!(matches!(
            state.bet_and_settle(1.5, 0.0),
            Err(Error::FractionOutOfRange(_))
        ));
        assert!(matches!(
            state.bet_and_settle(0.0, -1.5),
            Err(Error::CoinOutOfRange(_))
        ));
        assert!(state.bet_and_settle(f64::NAN, 0.0).is_err());
        assert!(state.bet_and_settle(0.0, f64::NAN).is_err());
        assert!(BettingState::new(0.0).is_err());
        assert!(BettingState::new(-1.0).is_err());
        assert!(CoinSequence::new(vec![0.5, 1.2]).is_err());
    }

    #[test]
    fn kt_trace_on_two_heads() {
        // β₁ = 0, β₂ = 1/2 → wealth 1·(1+0)·(1+1/2) = 1.5.
        let mut state = BettingState::new(1.0).unwrap();
        for g in [1.0, 1.0] {
            let beta = kt_fraction_from_state(&state, 0.0).unwrap();
            state = state.bet_and_settle(beta, g).unwrap();
        }
        assert_eq!(state.wealth(), 1.5);
    }

    #[test]
    fn fraction_from_state_examples() {
        let mut state = BettingState::new(1.0).unwrap();
        assert_eq!(kt_fraction_from_state(&state, 0.0).unwrap(), 0.0);
        for g in [1.0, 1.0, 1.0] {
            let beta = kt_fraction_from_state(&state, 0.0).unwrap();
            state = state.bet_and_settle(beta, g).unwrap();
        }
        assert_eq!(kt_fraction_from_state(&state, 0.0).unwrap(), 0.75);

        let mut state = BettingState::new(1.0).unwrap();
        for g in [1.0, -1.0] {
            state = state.bet_and_settle(0.0, g).unwrap();
        }
        assert_eq!(kt_fraction_from_state(&state, 2.0).unwrap(), 0.0);
        assert!(kt_fraction_from_state(&state, -1.0).is_err());
    }

    #[test]
    fn kelly_examples() {
        assert_eq!(kelly_fraction(0.5).unwrap(), 0.0);
        assert_eq!(kelly_fraction(1.0).unwrap(), 1.0);
        assert_eq!(kelly_fraction(0.75).unwrap(), 0.5);
        assert!(kelly_fraction(1.1).is_err());
        assert!(kelly_fraction(-0.1).is_err());
        assert!(kelly_fraction(f64::NAN).is_err());
    }

    #[test]
    fn optimal_fraction_examples() {
        let (beta, wealth) = optimal_fixed_fraction_wealth(&coins(&[0.5, -0.5]), 2.0).unwrap();
        assert_eq!(beta, 0.0);
        assert_eq!(wealth, 2.0);

        let (beta, wealth) = optimal_fixed_fraction_wealth(&coins(&[1.0, 1.0]), 1.0).unwrap();
        assert_eq!(beta, 1.0);
        assert_eq!(wealth, 4.0);
        assert!((wealth - (2.0 * 2.0_f64.ln()).exp()).abs() < 1e-12);

        let (beta, wealth) =
            optimal_fixed_fraction_wealth(&coins(&[1.0, 1.0, 1.0, -1.0]), 1.0).unwrap();
        assert_eq!(beta, 0.5);
        assert_eq!(wealth, 1.6875);
        let kl_form = (4.0 * kl_bernoulli(0.75, 0.5)).exp();
        assert!((wealth - kl_form).abs() < 1e-10 * wealth);

        assert!(optimal_fixed_fraction_wealth(&coins(&[]), 1.0).is_err());
        assert!(optimal_fixed_fraction_wealth(&coins(&[0.5]), 0.0).is_err());
    }

    #[test]
    fn optimal_fraction_matches_kelly_on_fixed_mean() {
        // 30 heads out of 40 at ±1: empirical heads frequency 0.75.
        let mut values = vec![1.0; 30];
        values.extend(vec![-1.0; 10]);
        let (beta, _) = optimal_fixed_fraction_wealth(&coins(&values), 1.0).unwrap();
        assert!((beta - kelly_fraction(0.75).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn guarantee_holds_on_examples() {
        // All-zero coins: wealth stays ε, floor F_T(0) < ε.
        let report = kt_wealth_guarantee_check(&coins(&[0.0; 5]), 0.0, 1.0).unwrap();
        assert_eq!(report.wealth, 1.0);
        assert!(report.floor < 1.0);
        assert!(report.holds);
        assert!(report.binary_oracle_floor.is_none());

        // Two heads: wealth 1.5 equals the floor F_2(2) exactly.
        let report = kt_wealth_guarantee_check(&coins(&[1.0, 1.0]), 0.0, 1.0).unwrap();
        assert_eq!(report.wealth, 1.5);
        assert!((report.floor - 1.5).abs() < 1e-12);
        assert!(report.holds);
        // Oracle earns 4, floor 4/(2√2) ≈ 1.414 < 1.5.
        let oracle = report.binary_oracle_floor.unwrap();
        assert!((oracle - 4.0 / (2.0 * 2.0_f64.sqrt())).abs() < 1e-12);
        assert_eq!(report.binary_oracle_holds, Some(true));

        // Shifted rule: floor still holds, oracle comparison not claimed.
        let report = kt_wealth_guarantee_check(&coins(&[1.0, -1.0, 1.0]), 3.0, 2.0).unwrap();
        assert!(report.holds);
        assert!(report.binary_oracle_floor.is_none());

        // Empty game: wealth = ε = floor.
        let report = kt_wealth_guarantee_check(&coins(&[]), 0.0, 1.0).unwrap();
        assert_eq!(report.wealth, 1.0);
        assert!(report.holds);
    }

    #[test]
    fn guarantee_holds_on_alternating_run() {
        let values: Vec<f64> = (0..64)
            .map(|i| if i % 3 == 0 { -1.0 } else { 1.0 })
            .collect();
        let report = kt_wealth_guarantee_check(&coins(&values), 0.0, 1.0).unwrap();
        assert!(report.holds, "floor violated: {report:?}");
        assert_eq!(report.binary_oracle_holds, Some(true));
    }

    #[test]
    fn logloss_bound_examples() {
        assert!((logloss_regret_to_wealth_bound(0.0, 8, 8.0, 1.0).unwrap() - 256.0).abs() < 1e-9);
        let got = logloss_regret_to_wealth_bound(1.25, 10, 0.0, 2.0).unwrap();
        assert!((got - 2.0 * (-1.25_f64).exp()).abs() < 1e-15);
        assert!(logloss_regret_to_wealth_bound(0.0, 4, 5.0, 1.0).is_err());
        assert!(logloss_regret_to_wealth_bound(f64::INFINITY, 4, 0.0, 1.0).is_err());
        assert!(logloss_regret_to_wealth_bound(0.0, 0, 0.0, 1.0).is_err());
    }

    #[test]
    fn kt_wealth_beats_logloss_conversion() {
        // The count-based bettor realizes at least the wealth promised by
        // its ½·ln t + ln 2 log-loss regret.
        for values in [
            vec![1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0],
            vec![-1.0; 16],
            (0..32)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
        ] {
            let seq = coins(&values);
            let report = kt_wealth_guarantee_check(&seq, 0.0, 1.0).unwrap();
            let t = values.len() as u64;
            let bound = logloss_regret_to_wealth_bound(
                kt_logloss_regret_bound(t).unwrap(),
                t,
                seq.sum(),
                1.0,
            )
            .unwrap();
            assert!(
                report.wealth >= bound - 1e-9,
                "wealth {} below converted bound {bound} on {values:?}",
                report.wealth
            );
        }
        assert!((kt_logloss_regret_bound(1).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(kt_logloss_regret_bound(0).is_err());
    }
}
