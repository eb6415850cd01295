//! Randomized invariants: whatever the adversary plays, wealth accounting,
//! potential inequalities, and the simplex algebra hold.

use coinbet::coin_betting::{
    kt_fraction_from_state, kt_wealth_guarantee_check, BettingState, CoinSequence,
};
use coinbet::lea::{lea_predict, lea_update, LeaState};
use coinbet::numerics::{kl_bernoulli, lambert_w, lambert_w_bounds};
use coinbet::olo::{lemma3_inequality_check, HilbertVector};
use coinbet::potentials::{kt_lower_bound, shifted_kt_value, PotentialDescriptor};
use coinbet::ProbSimplex;
use proptest::prelude::*;

proptest! {
    /// Pinsker: kl(p‖q) ≥ 2(p−q)².
    #[test]
    fn kl_dominates_pinsker(p in 0.0f64..=1.0, q in 0.001f64..=0.999) {
        let kl = kl_bernoulli(p, q);
        prop_assert!(kl >= 2.0 * (p - q).powi(2) - 1e-12, "kl={kl} p={p} q={q}");
    }

    /// W(x) sits inside its logarithmic sandwich and solves w·e^w = x.
    #[test]
    fn lambert_w_sandwich_and_residual(x in 0.0f64..=1e6) {
        let w = lambert_w(x).unwrap();
        let (lo, hi) = lambert_w_bounds(x).unwrap();
        prop_assert!(w >= lo - 1e-9 * lo.abs().max(1.0), "w={w} lo={lo}");
        prop_assert!(w <= hi + 1e-9 * hi.abs().max(1.0), "w={w} hi={hi}");
        let residual = w * w.exp() - x;
        prop_assert!(residual.abs() <= 1e-9 * x.max(1.0), "residual={residual}");
    }

    /// The count-based bettor can never go bankrupt, and its wealth always
    /// equals endowment plus accumulated stake returns, in both linear and
    /// log accounting.
    #[test]
    fn bettor_never_bankrupt(
        coins in prop::collection::vec(-1.0f64..=1.0, 0..200),
        shift in 0.0f64..8.0,
    ) {
        let mut state = BettingState::new(1.0).unwrap();
        let mut stake_return = 0.0;
        let mut log_wealth = 0.0f64;
        for &g in &coins {
            let beta = kt_fraction_from_state(&state, shift).unwrap();
            prop_assert!(beta.abs() < 1.0);
            stake_return += beta * state.wealth() * g;
            log_wealth += (beta * g).ln_1p();
            state = state.bet_and_settle(beta, g).unwrap();
        }
        prop_assert!(state.wealth() > 0.0);
        let identity_gap = state.wealth() - (1.0 + stake_return);
        prop_assert!(identity_gap.abs() <= 1e-9 * state.wealth().max(1.0));
        prop_assert!((state.wealth().ln() - log_wealth).abs() <= 1e-9);
    }

    /// Binary coins: the bettor's wealth IS the potential, and both floor
    /// checks of the guarantee report pass.
    #[test]
    fn binary_wealth_equals_potential(
        bits in prop::collection::vec(prop::bool::ANY, 1..150),
        epsilon in 0.1f64..10.0,
    ) {
        let coins: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
        let sequence = CoinSequence::new(coins).unwrap();
        let report = kt_wealth_guarantee_check(&sequence, 0.0, epsilon).unwrap();
        let t = sequence.len() as u64;
        let target = epsilon * shifted_kt_value(t, sequence.sum(), 0.0).unwrap();
        prop_assert!(
            (report.wealth - target).abs() <= 1e-10 * target.max(1.0),
            "wealth={} target={target}", report.wealth
        );
        prop_assert!(report.holds);
        prop_assert_eq!(report.binary_oracle_holds, Some(true));
    }

    /// Real-valued coins: wealth dominates the potential floor for any shift.
    #[test]
    fn real_coin_wealth_dominates_floor(
        coins in prop::collection::vec(-1.0f64..=1.0, 0..120),
        shift in 0.0f64..8.0,
    ) {
        let sequence = CoinSequence::new(coins).unwrap();
        let report = kt_wealth_guarantee_check(&sequence, shift, 1.0).unwrap();
        prop_assert!(report.holds, "wealth={} floor={}", report.wealth, report.floor);
    }

    /// from_unnormalized produces a genuine distribution.
    #[test]
    fn simplex_normalization(raw in prop::collection::vec(0.0f64..1e3, 1..40)) {
        prop_assume!(raw.iter().sum::<f64>() > 1e-9);
        let p = ProbSimplex::from_unnormalized(raw).unwrap();
        let total: f64 = p.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(p.weights().iter().all(|&w| w >= 0.0));
    }

    /// The scalar betting recurrence transfers to vectors in any direction.
    #[test]
    fn vector_recurrence_holds(
        pairs in prop::collection::vec((-1.0f64..=1.0, -1.0f64..=1.0), 1..5),
        t in 1u64..40,
        x_scale in 0.0f64..=1.0,
        shift in 0.0f64..8.0,
    ) {
        let (x_raw, g_raw): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let x0 = HilbertVector::new(x_raw.clone()).unwrap();
        let reach = (t - 1) as f64;
        let x = if x0.norm() > 0.0 {
            x0.scaled(x_scale * reach / x0.norm())
        } else {
            x0
        };
        let g0 = HilbertVector::new(g_raw).unwrap();
        let g = if g0.norm() > 1.0 { g0.scaled(1.0 / g0.norm()) } else { g0 };
        let kt = PotentialDescriptor::kt(1.0).unwrap();
        prop_assert!(lemma3_inequality_check(&kt, t, &x, &g).unwrap());
        let skt = PotentialDescriptor::shifted_kt(shift).unwrap();
        prop_assert!(lemma3_inequality_check(&skt, t, &x, &g).unwrap());
    }

    /// At g = ±1 the betting recurrence is an equality.
    #[test]
    fn recurrence_tight_at_unit_coins(
        t in 1u64..60,
        frac in -1.0f64..=1.0,
        shift in 0.0f64..8.0,
    ) {
        let descriptor = PotentialDescriptor::shifted_kt(shift).unwrap();
        let prev = descriptor.at(t - 1);
        let next = descriptor.at(t);
        let x = frac * (t - 1) as f64;
        let beta = next.betting_fraction(x).unwrap();
        for g in [-1.0, 1.0] {
            let lhs = (1.0 + g * beta) * prev.value(x).unwrap();
            let rhs = next.value(x + g).unwrap();
            prop_assert!(
                (lhs - rhs).abs() <= 1e-9 * rhs.max(1.0),
                "t={t} x={x} g={g} lhs={lhs} rhs={rhs}"
            );
        }
    }

    /// The closed-form wealth lower bound never crosses above the potential.
    #[test]
    fn lower_bound_below_potential(
        t in 1u64..=100,
        frac in -1.0f64..=1.0,
        shift in 0.0f64..=20.0,
    ) {
        let x = frac * t as f64;
        let lower = kt_lower_bound(t, x, shift).unwrap();
        let value = shifted_kt_value(t, x, shift).unwrap();
        prop_assert!(lower <= value * (1.0 + 1e-12), "t={t} x={x} lower={lower} value={value}");
    }

    /// Inverting the potential recovers the evaluation point.
    #[test]
    fn potential_inverse_roundtrip(
        t in 1u64..50,
        frac in 0.0f64..=1.0,
        shift in 0.0f64..4.0,
    ) {
        let eval = PotentialDescriptor::shifted_kt(shift).unwrap().at(t);
        let x = frac * 0.9 * eval.domain_radius();
        let y = eval.log_value(x).unwrap();
        let x_back = eval.f_inverse(y).unwrap();
        prop_assert!(x_back >= 0.0);
        let y_back = eval.log_value(x_back).unwrap();
        prop_assert!(
            (y_back - y).abs() <= 1e-8 * y.abs().max(1.0),
            "t={t} x={x} x_back={x_back} y={y} y_back={y_back}"
        );
    }

    /// Any reward stream in [0,1]^N keeps the experts algorithm's
    /// stake-weighted centered reward non-positive and its predictions on
    /// the simplex.
    #[test]
    fn lea_dominance_and_simplex(
        rewards in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 3), 1..60),
        fraction in 0.0f64..2.0,
    ) {
        let prior = ProbSimplex::uniform(3).unwrap();
        let horizon = rewards.len() as u64;
        let mut states = vec![
            LeaState::unshifted(prior.clone()),
            LeaState::with_delta_fraction(prior, horizon, fraction).unwrap(),
        ];
        for state in &mut states {
            for reward in &rewards {
                let p = lea_predict(state).unwrap();
                let total: f64 = p.weights().iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-12);
                *state = lea_update(state, &p, reward).unwrap();
            }
            prop_assert!(state.max_dominance_residual() <= 3.0 * 1e-12);
        }
    }
}
