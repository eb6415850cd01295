//! Online linear optimization by betting on a vector-valued coin.
//!
//! Each round the learner plays w_t, the adversary reveals a reward vector
//! g_t with ‖g_t‖ ≤ 1, and the learner banks ⟨g_t, w_t⟩. Treating the
//! accumulated ⟨g_t, w_t⟩ as betting winnings turns any coin-betting
//! strategy into an OLO learner: bet the fraction β_t of wealth in the
//! direction of the accumulated reward vector,
//!
//!   w_t = β_t · (ε + Σ⟨g_i, w_i⟩) · Σg_i / ‖Σg_i‖.
//!
//! With the count-based fraction β_t = ‖Σg_i‖/t this collapses to the
//! closed form w_t = (1/t)(ε + Σ⟨g_i, w_i⟩)·Σg_i, which needs no tuning and
//! whose regret against any u grows as ‖u‖√(T·ln(1 + T²‖u‖²)). The gradient
//!-descent baseline and the absolute-loss bridge used by the experiment
//! harness live here too.

use crate::error::{Error, Result};
use crate::potentials::{PotentialDescriptor, PotentialEval};

/// Norm slack accepted on unit-ball reward vectors.
const REWARD_NORM_SLACK: f64 = 1e-9;
/// Residual at or below this ties to the zero subgradient.
const ABS_LOSS_TIE: f64 = 1e-12;

/// Dense vector in the learner's Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVector {
    coords: Vec<f64>,
}

impl HilbertVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain(
                "HilbertVector::new",
                "dimension must be ≥ 1".to_string(),
            ));
        }
        for &c in &coords {
            if !c.is_finite() {
                return Err(Error::NonFinite {
                    op: "HilbertVector::new",
                    x: c,
                });
            }
        }
        Ok(HilbertVector { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be ≥ 1");
        HilbertVector {
            coords: vec![0.0; dim],
        }
    }

    /// Standard basis vector e_i.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        let mut v = Self::zeros(dim);
        v.coords[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HilbertVector {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// self + factor·other.
    pub fn plus_scaled(&self, factor: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        HilbertVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }
}

/// Accumulated position of a betting-based OLO learner: banked rewards,
/// summed reward vectors, and the round count.
#[derive(Debug, Clone, PartialEq)]
pub struct OloLearnerState {
    endowment: f64,
    reward_sum: f64,
    grad_sum: HilbertVector,
    round: u64,
    last_prediction: Option<HilbertVector>,
}

impl OloLearnerState {
    pub fn new(endowment: f64, dim: usize) -> Result<Self> {
        if !(endowment > 0.0) || !endowment.is_finite() {
            return Err(Error::domain(
                "OloLearnerState::new",
                format!("endowment = {endowment} must be finite and > 0"),
            ));
        }
        Ok(OloLearnerState {
            endowment,
            reward_sum: 0.0,
            grad_sum: HilbertVector::zeros(dim),
            round: 0,
            last_prediction: None,
        })
    }

    pub fn endowment(&self) -> f64 {
        self.endowment
    }

    /// Σ⟨g_i, w_i⟩ banked so far.
    pub fn reward_sum(&self) -> f64 {
        self.reward_sum
    }

    /// ε + Σ⟨g_i, w_i⟩: the betting wealth driving prediction magnitudes.
    pub fn wealth(&self) -> f64 {
        self.endowment + self.reward_sum
    }

    pub fn grad_sum(&self) -> &HilbertVector {
        &self.grad_sum
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn last_prediction(&self) -> Option<&HilbertVector> {
        self.last_prediction.as_ref()
    }
}

/// The count-based prediction w_t = (1/t)·(ε + Σ⟨g_i,w_i⟩)·Σg_i with
/// t = round+1. Zero on a fresh state.
pub fn kt_olo_predict(state: &OloLearnerState) -> HilbertVector {
    let t = (state.round + 1) as f64;
    state.grad_sum.scaled(state.wealth() / t)
}

/// Prediction from an arbitrary potential: the betting fraction is taken at
/// x = ‖Σg_i‖ and pointed along Σg_i, w_t = β_t·wealth·Σg_i/‖Σg_i‖; the
/// zero vector when Σg_i = 0. `potential` must be the evaluator for the
/// upcoming round t = round+1.
pub fn generic_olo_predict(
    state: &OloLearnerState,
    potential: &PotentialEval,
) -> Result<HilbertVector> {
    if potential.t() != state.round + 1 {
        return Err(Error::domain(
            "generic_olo_predict",
            format!(
                "potential evaluated at t = {} but the upcoming round is {}",
                potential.t(),
                state.round + 1
            ),
        ));
    }
    if state.grad_sum.is_zero() {
        return Ok(HilbertVector::zeros(state.grad_sum.dim()));
    }
    let x = state.grad_sum.norm();
    let beta = potential.betting_fraction(x)?;
    Ok(state.grad_sum.scaled(beta * state.wealth() / x))
}

/// Banks one round: reward_sum += ⟨reward, prediction⟩, grad_sum += reward.
/// Rewards must stay in the unit ball.
pub fn olo_update(
    state: &OloLearnerState,
    prediction: &HilbertVector,
    reward: &HilbertVector,
) -> Result<OloLearnerState> {
    if reward.dim() != state.grad_sum.dim() || prediction.dim() != state.grad_sum.dim() {
        return Err(Error::DimensionMismatch {
            left: state.grad_sum.dim(),
            right: if reward.dim() != state.grad_sum.dim() {
                reward.dim()
            } else {
                prediction.dim()
            },
        });
    }
    let norm = reward.norm();
    if norm > 1.0 + REWARD_NORM_SLACK || !norm.is_finite() {
        return Err(Error::RewardNormExceeded(norm));
    }
    Ok(OloLearnerState {
        endowment: state.endowment,
        reward_sum: state.reward_sum + reward.dot(prediction),
        grad_sum: state.grad_sum.plus_scaled(1.0, reward),
        round: state.round + 1,
        last_prediction: Some(prediction.clone()),
    })
}

/// Reward-ascent gradient step w + rate·reward (unconstrained decision set).
pub fn ogd_step(w: &HilbertVector, reward: &HilbertVector, rate: f64) -> Result<HilbertVector> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::domain(
            "ogd_step",
            format!("rate = {rate} must be finite and > 0"),
        ));
    }
    if w.dim() != reward.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: reward.dim(),
        });
    }
    Ok(w.plus_scaled(rate, reward))
}

/// Σ⟨g_t, u⟩ − Σ⟨g_t, w_t⟩ over a played trace of (prediction, reward)
/// pairs: how much better the fixed point u would have done.
pub fn regret(trace: &[(HilbertVector, HilbertVector)], competitor: &HilbertVector) -> Result<f64> {
    let mut total = 0.0;
    for (prediction, reward) in trace {
        if prediction.dim() != competitor.dim() || reward.dim() != competitor.dim() {
            return Err(Error::DimensionMismatch {
                left: competitor.dim(),
                right: if prediction.dim() != competitor.dim() {
                    prediction.dim()
                } else {
                    reward.dim()
                },
            });
        }
        total += reward.dot(competitor) - reward.dot(prediction);
    }
    Ok(total)
}

/// Negated subgradient of the absolute loss |⟨w,x⟩ − y| at w, for a unit
/// feature vector x: −sign(⟨w,x⟩ − y)·x, and the zero vector on a tied
/// residual (|residual| ≤ 1e-12). Always inside the unit ball, so it can be
/// fed straight back as an OLO reward.
pub fn absolute_loss_reward(w: &HilbertVector, x: &HilbertVector, y: f64) -> Result<HilbertVector> {
    if w.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: x.dim(),
        });
    }
    let norm = x.norm();
    if (norm - 1.0).abs() > REWARD_NORM_SLACK {
        return Err(Error::InputNotNormalized(norm));
    }
    let residual = w.dot(x) - y;
    if residual.abs() <= ABS_LOSS_TIE {
        return Ok(HilbertVector::zeros(x.dim()));
    }
    Ok(x.scaled(-residual.signum()))
}

/// The per-round inequality that transfers the scalar wealth floor to
/// Hilbert spaces: with β_t the potential's fraction at ‖x‖ (zero at x = 0),
///
///   (1 + β_t·⟨g, x⟩/‖x‖)·F_{t−1}(‖x‖) ≥ F_t(‖x + g‖).
///
/// Checked with 1e-9 slack relative to max(1, rhs); the potential values
/// grow past 1e4 on modest grids, where an absolute slack would drown in
/// float rounding.
pub fn lemma3_inequality_check(
    descriptor: &PotentialDescriptor,
    t: u64,
    x: &HilbertVector,
    g: &HilbertVector,
) -> Result<bool> {
    if t == 0 {
        return Err(Error::domain(
            "lemma3_inequality_check",
            "t must be ≥ 1".to_string(),
        ));
    }
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: g.dim(),
        });
    }
    let g_norm = g.norm();
    if g_norm > 1.0 + REWARD_NORM_SLACK {
        return Err(Error::RewardNormExceeded(g_norm));
    }
    let x_norm = x.norm();
    if x_norm > (t - 1) as f64 + REWARD_NORM_SLACK {
        return Err(Error::domain(
            "lemma3_inequality_check",
            format!("‖x‖ = {x_norm} exceeds reachable sum t−1 = {}", t - 1),
        ));
    }
    let current = descriptor.at(t);
    let previous = descriptor.at(t - 1);
    let aligned_coin = if x_norm == 0.0 {
        0.0
    } else {
        current.betting_fraction(x_norm)? * (g.dot(x) / x_norm)
    };
    let lhs = (1.0 + aligned_coin) * previous.value(x_norm)?;
    let rhs = current.value(x.plus_scaled(1.0, g).norm())?;
    Ok(lhs >= rhs - 1e-9 * rhs.max(1.0))
}

/// A sequential OLO strategy: predict, then absorb the revealed reward.
pub trait OloAlgorithm {
    fn predict(&self) -> HilbertVector;
    fn observe(&mut self, reward: &HilbertVector) -> Result<()>;
}

/// The count-based learner (closed-form fraction ‖Σg‖/t).
#[derive(Debug, Clone)]
pub struct KtOlo {
    state: OloLearnerState,
}

impl KtOlo {
    pub fn new(endowment: f64, dim: usize) -> Result<Self> {
        Ok(KtOlo {
            state: OloLearnerState::new(endowment, dim)?,
        })
    }

    pub fn state(&self) -> &OloLearnerState {
        &self.state
    }
}

impl OloAlgorithm for KtOlo {
    fn predict(&self) -> HilbertVector {
        kt_olo_predict(&self.state)
    }

    fn observe(&mut self, reward: &HilbertVector) -> Result<()> {
        let prediction = self.predict();
        self.state = olo_update(&self.state, &prediction, reward)?;
        Ok(())
    }
}

/// The same reduction driven by an arbitrary potential family.
#[derive(Debug, Clone)]
pub struct PotentialOlo {
    descriptor: PotentialDescriptor,
    state: OloLearnerState,
}

impl PotentialOlo {
    pub fn new(descriptor: PotentialDescriptor, dim: usize) -> Result<Self> {
        Ok(PotentialOlo {
            state: OloLearnerState::new(descriptor.endowment, dim)?,
            descriptor,
        })
    }

    pub fn state(&self) -> &OloLearnerState {
        &self.state
    }

    pub fn try_predict(&self) -> Result<HilbertVector> {
        generic_olo_predict(&self.state, &self.descriptor.at(self.state.round + 1))
    }
}

impl OloAlgorithm for PotentialOlo {
    fn predict(&self) -> HilbertVector {
        // Reachable states keep ‖Σg‖ ≤ round, inside every family's domain.
        self.try_predict()
            .expect("potential evaluation failed on a reachable state")
    }

    fn observe(&mut self, reward: &HilbertVector) -> Result<()> {
        let prediction = self.try_predict()?;
        self.state = olo_update(&self.state, &prediction, reward)?;
        Ok(())
    }
}

/// Fixed-rate gradient ascent on rewards, the tuned baseline.
#[derive(Debug, Clone)]
pub struct Ogd {
    w: HilbertVector,
    rate: f64,
}

impl Ogd {
    pub fn new(rate: f64, dim: usize) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::domain(
                "Ogd::new",
                format!("rate = {rate} must be finite and > 0"),
            ));
        }
        Ok(Ogd {
            w: HilbertVector::zeros(dim),
            rate,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl OloAlgorithm for Ogd {
    fn predict(&self) -> HilbertVector {
        self.w.clone()
    }

    fn observe(&mut self, reward: &HilbertVector) -> Result<()> {
        self.w = ogd_step(&self.w, reward, self.rate)?;
        Ok(())
    }
}
