//! Coin-betting potential families and their certificates.
//!
//! A potential sequence F_t assigns a target wealth to every reachable coin
//! sum x after t rounds. The families here share one contract: a bettor that
//! stakes the fraction β_t = (F_t(x+1) − F_t(x−1))/(F_t(x+1) + F_t(x−1)) of
//! its wealth keeps Wealth_t ≥ F_t(Σ g_i) for any coin outcomes in [−1, 1].
//! That floor, combined with Fenchel duality, is where every regret bound in
//! this crate comes from.
//!
//! Families:
//!
//! - `Kt`: F_t(x) = ε·2^t·Γ((t+1)/2 + x/2)·Γ((t+1)/2 − x/2)/(π·t!), the
//!   Krichevsky-Trofimov potential; β_t = x/t in closed form.
//! - `ShiftedKt`: the δ-shifted variant with endowment fixed at 1 and
//!   β_t = x/(t+δ); δ = 0 coincides with `Kt` at ε = 1.
//! - `ExpSquare`: F_t(x) = ε·exp(x²/(2t) − H_t/2) with H_t the harmonic sum;
//!   unbounded domain, defined as the constant ε at t = 0.
//!
//! Everything is evaluated in log-space (sums of `log_gamma`) and
//! exponentiated last: the gamma factors overflow for t in the thousands
//! while the ratios stay moderate.

use crate::error::{Error, Result};
use crate::numerics::log_gamma_raw;

/// Safety margin keeping gamma arguments away from the pole at the domain
/// boundary: evaluation requires |x| ≤ a_t − 1e-9.
const DOMAIN_MARGIN: f64 = 1e-9;

/// Float slack on the reachable-sum restriction |x| ≤ t−1 for betting
/// fractions (accumulated coin sums carry rounding).
const BETTING_DOMAIN_SLACK: f64 = 1e-9;

/// Absolute x-tolerance for the log-potential inverse bisection.
const F_INVERSE_TOL: f64 = 1e-10;

const LN_PI: f64 = 1.144_729_885_849_400_175;
/// ln(e·√π): the constant in the shifted-KT lower bound.
const LN_E_SQRT_PI: f64 = 1.0 + 0.5 * LN_PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Kt,
    ShiftedKt,
    ExpSquare,
}

/// Which potential family, with its endowment ε and shift δ. Descriptors are
/// cheap value objects; [`PotentialDescriptor::at`] builds the evaluator for
/// one round index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialDescriptor {
    pub kind: PotentialKind,
    pub endowment: f64,
    pub shift: f64,
}

impl PotentialDescriptor {
    /// KT potential with endowment ε > 0.
    pub fn kt(endowment: f64) -> Result<Self> {
        check_endowment(endowment)?;
        Ok(PotentialDescriptor {
            kind: PotentialKind::Kt,
            endowment,
            shift: 0.0,
        })
    }

    /// δ-shifted KT potential; the endowment is fixed at 1 by definition.
    pub fn shifted_kt(shift: f64) -> Result<Self> {
        if !(shift >= 0.0) || !shift.is_finite() {
            return Err(Error::domain(
                "PotentialDescriptor::shifted_kt",
                format!("shift = {shift} must be finite and ≥ 0"),
            ));
        }
        Ok(PotentialDescriptor {
            kind: PotentialKind::ShiftedKt,
            endowment: 1.0,
            shift,
        })
    }

    /// Exp-square potential with endowment ε > 0.
    pub fn exp_square(endowment: f64) -> Result<Self> {
        check_endowment(endowment)?;
        Ok(PotentialDescriptor {
            kind: PotentialKind::ExpSquare,
            endowment,
            shift: 0.0,
        })
    }

    /// Evaluator for F_t at round index t.
    pub fn at(&self, t: u64) -> PotentialEval {
        let tf = t as f64;
        let (domain_radius, log_norm) = match self.kind {
            PotentialKind::Kt => (
                tf + 1.0,
                self.endowment.ln() + tf * std::f64::consts::LN_2 - LN_PI - log_gamma_raw(tf + 1.0),
            ),
            PotentialKind::ShiftedKt => (
                tf + self.shift + 1.0,
                tf * std::f64::consts::LN_2 + log_gamma_raw(self.shift + 1.0)
                    - 2.0 * log_gamma_raw((self.shift + 1.0) / 2.0)
                    - log_gamma_raw(tf + self.shift + 1.0),
            ),
            PotentialKind::ExpSquare => {
                let harmonic: f64 = (1..=t).map(|i| 1.0 / i as f64).sum();
                (f64::INFINITY, self.endowment.ln() - harmonic / 2.0)
            }
        };
        PotentialEval {
            kind: self.kind,
            endowment: self.endowment,
            shift: self.shift,
            t,
            domain_radius,
            log_norm,
        }
    }
}

fn check_endowment(endowment: f64) -> Result<()> {
    if !(endowment > 0.0) || !endowment.is_finite() {
        return Err(Error::domain(
            "PotentialDescriptor",
            format!("endowment = {endowment} must be finite and > 0"),
        ));
    }
    Ok(())
}

/// The potential F_t at a fixed round index: evaluates values, log-values,
/// betting fractions, and the inverse of the log-potential. Immutable and
/// cheap to copy; the x-independent normalization is precomputed once so
/// repeated evaluations share identical rounding.
#[derive(Debug, Clone, Copy)]
pub struct PotentialEval {
    kind: PotentialKind,
    endowment: f64,
    shift: f64,
    t: u64,
    domain_radius: f64,
    log_norm: f64,
}

impl PotentialEval {
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Domain radius a_t: evaluation requires |x| < a_t (t+δ+1 for the KT
    /// family, ∞ for exp-square).
    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn endowment(&self) -> f64 {
        self.endowment
    }

    /// f_t(x) = ln F_t(x). Even in x by construction.
    pub fn log_value(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= self.domain_radius - DOMAIN_MARGIN) {
            return Err(Error::domain(
                "PotentialEval::log_value",
                format!(
                    "|x| = {} outside domain radius {} at t = {}",
                    x.abs(),
                    self.domain_radius,
                    self.t
                ),
            ));
        }
        Ok(match self.kind {
            PotentialKind::Kt | PotentialKind::ShiftedKt => {
                let a = (self.t as f64 + self.shift + 1.0) / 2.0;
                let u = 0.5 * x;
                self.log_norm + (log_gamma_raw(a + u) + log_gamma_raw(a - u))
            }
            PotentialKind::ExpSquare => {
                if self.t == 0 {
                    self.log_norm
                } else {
                    self.log_norm + x * x / (2.0 * self.t as f64)
                }
            }
        })
    }

    /// F_t(x) = exp(f_t(x)).
    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.log_value(x)?.exp())
    }

    /// Betting fraction at coin sum x from the potential-ratio formula
    /// (F_t(x+1) − F_t(x−1))/(F_t(x+1) + F_t(x−1)), evaluated stably as
    /// tanh((f_t(x+1) − f_t(x−1))/2).
    ///
    /// Evaluation is restricted to reachable sums |x| ≤ t−1; anything beyond
    /// is a domain error rather than a guess.
    pub fn betting_fraction(&self, x: f64) -> Result<f64> {
        if self.t == 0 {
            return Err(Error::domain(
                "PotentialEval::betting_fraction",
                "no betting fraction at t = 0".to_string(),
            ));
        }
        if !(x.abs() <= (self.t - 1) as f64 + BETTING_DOMAIN_SLACK) {
            return Err(Error::domain(
                "PotentialEval::betting_fraction",
                format!(
                    "|x| = {} exceeds reachable sum t−1 = {}",
                    x.abs(),
                    self.t - 1
                ),
            ));
        }
        Ok((0.5 * (self.log_value(x + 1.0)? - self.log_value(x - 1.0)?)).tanh())
    }

    /// Inverse of f_t restricted to [0, a_t): the unique x ≥ 0 with
    /// f_t(x) = y, by bisection to absolute tolerance 1e-10. Monotonicity on
    /// [0, a_t) is what makes the bisection well-posed.
    pub fn f_inverse(&self, y: f64) -> Result<f64> {
        let f0 = self.log_value(0.0)?;
        // Absorb float jitter when y was produced by evaluating f_t at 0.
        if !(y >= f0 - 1e-12 * f0.abs().max(1.0)) {
            return Err(Error::domain(
                "PotentialEval::f_inverse",
                format!("y = {y} below f_t(0) = {f0}"),
            ));
        }
        if y <= f0 {
            return Ok(0.0);
        }
        let mut hi = if self.domain_radius.is_finite() {
            let edge = self.domain_radius - DOMAIN_MARGIN;
            if self.log_value(edge)? < y {
                return Err(Error::domain(
                    "PotentialEval::f_inverse",
                    format!("y = {y} not reachable below the domain boundary"),
                ));
            }
            edge
        } else {
            // Unbounded domain (exp-square): grow the bracket until it
            // clears y. The constant family at t = 0 never reaches y > f0.
            if self.kind == PotentialKind::ExpSquare && self.t == 0 {
                return Err(Error::domain(
                    "PotentialEval::f_inverse",
                    format!("constant potential at t = 0 never attains y = {y}"),
                ));
            }
            let mut hi = 1.0;
            while self.log_value(hi)? < y {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::NoConvergence {
                        op: "f_inverse bracket growth",
                        iterations: 0,
                    });
                }
            }
            hi
        };
        let mut lo = 0.0;
        while hi - lo > F_INVERSE_TOL {
            let mid = 0.5 * (lo + hi);
            if self.log_value(mid)? < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// KT potential value ε·2^t·Γ((t+1)/2 + x/2)·Γ((t+1)/2 − x/2)/(π·t!).
pub fn kt_value(t: u64, x: f64, endowment: f64) -> Result<f64> {
    PotentialDescriptor::kt(endowment)?.at(t).value(x)
}

/// δ-shifted KT potential value; endowment fixed at 1.
pub fn shifted_kt_value(t: u64, x: f64, shift: f64) -> Result<f64> {
    PotentialDescriptor::shifted_kt(shift)?.at(t).value(x)
}

/// Exp-square potential value ε·exp(x²/(2t) − H_t/2), defined for t ≥ 1.
pub fn exp_square_value(t: u64, x: f64, endowment: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain(
            "exp_square_value",
            "t must be ≥ 1 (the family starts at its recurrence)".to_string(),
        ));
    }
    PotentialDescriptor::exp_square(endowment)?.at(t).value(x)
}

/// Closed-form betting fraction x/(t+δ) of the shifted-KT potential.
/// Agrees with [`PotentialEval::betting_fraction`] to 1e-10 on reachable
/// sums; δ = 0 is the plain KT fraction x/t.
pub fn kt_betting_fraction(t: u64, x: f64, shift: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain(
            "kt_betting_fraction",
            "t must be ≥ 1".to_string(),
        ));
    }
    if !(x.abs() <= (t - 1) as f64 + shift + BETTING_DOMAIN_SLACK) {
        return Err(Error::domain(
            "kt_betting_fraction",
            format!("|x| = {} exceeds reachable sum t−1+δ", x.abs()),
        ));
    }
    Ok(x / (t as f64 + shift))
}

/// Lower bound exp(x²/(2(t+δ)) + ln((1+δ)/(t+δ))/2 − ln(e√π)) on the
/// shifted-KT potential, valid for |x| ≤ t.
pub fn kt_lower_bound(t: u64, x: f64, shift: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain("kt_lower_bound", "t must be ≥ 1".to_string()));
    }
    if !(shift >= 0.0) {
        return Err(Error::domain(
            "kt_lower_bound",
            format!("shift = {shift} must be ≥ 0"),
        ));
    }
    if !(x.abs() <= t as f64) {
        return Err(Error::domain(
            "kt_lower_bound",
            format!("|x| = {} exceeds t = {t}", x.abs()),
        ));
    }
    let td = t as f64 + shift;
    Ok((x * x / (2.0 * td) + 0.5 * ((1.0 + shift) / td).ln() - LN_E_SQRT_PI).exp())
}

/// Whether Γ(δ+1)/(2^δ·Γ((δ+1)/2)²) ≥ √(δ+1)/π at this δ. True for every
/// δ ≥ 0; exists as a test oracle for that inequality. Compared in log-space
/// with a 1e-12 slack because δ = 0 is an exact equality.
pub fn gamma_ratio_bound_check(shift: f64) -> Result<bool> {
    if !(shift >= 0.0) {
        return Err(Error::domain(
            "gamma_ratio_bound_check",
            format!("shift = {shift} must be ≥ 0"),
        ));
    }
    let lhs = log_gamma_raw(shift + 1.0)
        - shift * std::f64::consts::LN_2
        - 2.0 * log_gamma_raw((shift + 1.0) / 2.0);
    let rhs = 0.5 * (shift + 1.0).ln() - LN_PI;
    Ok(lhs >= rhs - 1e-12)
}

/// Regret bound ‖u‖·√(T·ln(1 + 24T²‖u‖²/ε²)) + ε·(1 − 1/(e√(πT))) for the
/// KT online linear optimizer; 0 at T = 0.
pub fn regret_upper_bound_olo(t: u64, norm_u: f64, endowment: f64) -> Result<f64> {
    if !(norm_u >= 0.0) {
        return Err(Error::domain(
            "regret_upper_bound_olo",
            format!("norm_u = {norm_u} must be ≥ 0"),
        ));
    }
    check_endowment(endowment)?;
    if t == 0 {
        return Ok(0.0);
    }
    let tf = t as f64;
    let log_term = (24.0 * tf * tf * norm_u * norm_u / (endowment * endowment)).ln_1p();
    Ok(norm_u * (tf * log_term).sqrt()
        + endowment * (1.0 - 1.0 / (std::f64::consts::E * (std::f64::consts::PI * tf).sqrt())))
}

/// Regret bound √(3T·(3 + kl)) for the shifted-KT experts algorithm run with
/// δ = T/2, where kl is the divergence of the competitor from the prior.
pub fn regret_upper_bound_lea(t: u64, kl: f64) -> Result<f64> {
    if !(kl >= 0.0) {
        return Err(Error::domain(
            "regret_upper_bound_lea",
            format!("kl = {kl} must be ≥ 0"),
        ));
    }
    Ok((3.0 * t as f64 * (3.0 + kl)).sqrt())
}

/// The anytime (doubling-trick) version of [`regret_upper_bound_lea`],
/// inflated by √2/(√2 − 1).
pub fn regret_upper_bound_lea_anytime(t: u64, kl: f64) -> Result<f64> {
    Ok(doubling_regret_factor() * regret_upper_bound_lea(t, kl)?)
}

/// √2/(√2 − 1), the epoch-summation constant of the doubling trick.
pub fn doubling_regret_factor() -> f64 {
    std::f64::consts::SQRT_2 / (std::f64::consts::SQRT_2 - 1.0)
}

/// Which structural condition a violation is against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialCondition {
    /// F_0(0) = ε.
    Endowment,
    /// F_t(x) = F_t(−x).
    Evenness,
    /// f_t midpoint convexity on the x-grid.
    LogConvexity,
    /// f_t strictly increasing on [0, a_t).
    StrictMonotonicity,
    /// F_t blows up approaching the domain boundary.
    Divergence,
    /// (1 + g·β_t)·F_{t−1}(x) ≥ F_t(x+g).
    BetRecurrence,
    /// x·F_t″(x) ≥ F_t′(x).
    DerivativeDominance,
}

impl std::fmt::Display for PotentialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PotentialCondition::Endowment => "endowment",
            PotentialCondition::Evenness => "evenness",
            PotentialCondition::LogConvexity => "log-convexity",
            PotentialCondition::StrictMonotonicity => "strict monotonicity",
            PotentialCondition::Divergence => "boundary divergence",
            PotentialCondition::BetRecurrence => "bet recurrence",
            PotentialCondition::DerivativeDominance => "derivative dominance",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub condition: PotentialCondition,
    pub t: u64,
    pub x: f64,
    pub g: Option<f64>,
    /// Signed margin; negative means the condition failed at this point.
    pub slack: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    pub checks_run: usize,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Endowment match tolerance, relative to ε.
const ENDOWMENT_TOL: f64 = 1e-12;
/// Evenness tolerance on f_t (≈ relative tolerance on F_t).
const EVENNESS_TOL: f64 = 1e-12;
/// Midpoint log-convexity slack.
const LOG_CONVEXITY_TOL: f64 = 1e-9;
/// Minimum grid-step increase that still counts as strictly monotone; real
/// families clear this by many orders, constants fail it.
const STRICT_INCREASE_MIN: f64 = 1e-12;
/// Boundary divergence proxy: F_t(probe) must exceed ratio·F_t(0).
const DIVERGENCE_RATIO: f64 = 1e6;
/// Probe offset from a finite boundary.
const DIVERGENCE_PROBE_OFFSET: f64 = 1e-6;
/// Bet-recurrence slack, scaled by max(1, rhs): the inequality is an exact
/// equality at g = ±1, so a magnitude-blind slack would sit below f64
/// rounding once F_t reaches ~1e4 on the t ≤ 20 grids.
const BET_RECURRENCE_TOL: f64 = 1e-12;
/// Central-difference step for the derivative-dominance check.
const FD_STEP: f64 = 1e-5;
/// Base tolerance on x·F″ − F′ ≥ 0.
const FD_TOL: f64 = 1e-6;
/// Relative evaluation jitter assumed by the finite-difference conditioning
/// guard. Second differences amplify evaluation noise by 4/h² = 4e10, so the
/// raw tolerance alone is unreachable where the true slack x·F″−F′ ≈ c²x³F
/// is small; the guard term FD_NOISE_REL·F·(4x/h² + 1/h) accounts for
/// exactly that amplification and stays far below any genuine O(F) violation.
const FD_NOISE_REL: f64 = 1e-13;

/// Grid-checks the structural conditions a coin-betting potential must
/// satisfy, for every round index up to `t_max`:
///
/// - (a) F_0(0) = ε;
/// - (b) evenness, midpoint log-convexity, strict monotonicity on [0, a_t),
///   and a boundary-divergence proxy, for t ≥ 1 (F_0 is only ever evaluated
///   at 0 by the betting recurrence, and the exp-square family pins it to a
///   constant);
/// - (c) the bet recurrence (1 + g·β_t)·F_{t−1}(x) ≥ F_t(x+g) over a g-grid
///   in [−1,1] and an x-grid of reachable sums [−(t−1), t−1];
/// - (d) derivative dominance x·F_t″(x) ≥ F_t′(x) by central finite
///   differences (h = 1e-5).
///
/// `grid_density` sets the number of grid points per axis. Violations come
/// back as data; an empty report is a pass.
pub fn check_excellence(
    descriptor: &PotentialDescriptor,
    t_max: u64,
    grid_density: usize,
) -> Result<ViolationReport> {
    if t_max == 0 {
        return Err(Error::domain(
            "check_excellence",
            "t_max must be ≥ 1".to_string(),
        ));
    }
    if grid_density < 3 {
        return Err(Error::domain(
            "check_excellence",
            "grid_density must be ≥ 3".to_string(),
        ));
    }
    let evals: Vec<PotentialEval> = (0..=t_max).map(|t| descriptor.at(t)).collect();
    check_family(
        |t, x| evals[t as usize].log_value(x),
        |t| evals[t as usize].domain_radius(),
        descriptor.endowment,
        t_max,
        grid_density,
    )
}

/// The checker behind [`check_excellence`], generic over the family so tests
/// can feed deliberately broken potentials through the same grids.
pub(crate) fn check_family<F, R>(
    log_value: F,
    domain_radius: R,
    endowment: f64,
    t_max: u64,
    grid_density: usize,
) -> Result<ViolationReport>
where
    F: Fn(u64, f64) -> Result<f64>,
    R: Fn(u64) -> f64,
{
    let mut report = ViolationReport::default();

    // (a) the endowment anchors the whole sequence.
    let f0 = log_value(0, 0.0)?.exp();
    report.checks_run += 1;
    if (f0 - endowment).abs() > ENDOWMENT_TOL * endowment {
        report.violations.push(Violation {
            condition: PotentialCondition::Endowment,
            t: 0,
            x: 0.0,
            g: None,
            slack: -(f0 - endowment).abs(),
        });
    }

    let g_count = grid_density | 1; // odd, so the g-grid contains 0 and ±1
    for t in 1..=t_max {
        let radius = domain_radius(t);
        let probe = if radius.is_finite() {
            radius - DIVERGENCE_PROBE_OFFSET
        } else {
            t as f64 + 10.0
        };

        // (b) shape conditions on [0, probe].
        let fs: Vec<f64> = (0..grid_density)
            .map(|i| log_value(t, probe * i as f64 / (grid_density - 1) as f64))
            .collect::<Result<_>>()?;
        for i in 0..grid_density {
            let x = probe * i as f64 / (grid_density - 1) as f64;
            let f_neg = log_value(t, -x)?;
            report.checks_run += 1;
            if (fs[i] - f_neg).abs() > EVENNESS_TOL {
                report.violations.push(Violation {
                    condition: PotentialCondition::Evenness,
                    t,
                    x,
                    g: None,
                    slack: -(fs[i] - f_neg).abs(),
                });
            }
            if i + 1 < grid_density {
                report.checks_run += 1;
                let step = fs[i + 1] - fs[i];
                if step <= STRICT_INCREASE_MIN {
                    report.violations.push(Violation {
                        condition: PotentialCondition::StrictMonotonicity,
                        t,
                        x: probe * (i + 1) as f64 / (grid_density - 1) as f64,
                        g: None,
                        slack: step,
                    });
                }
            }
            if i + 2 < grid_density {
                report.checks_run += 1;
                let convexity_gap = 0.5 * (fs[i] + fs[i + 2]) - fs[i + 1];
                if convexity_gap < -LOG_CONVEXITY_TOL {
                    report.violations.push(Violation {
                        condition: PotentialCondition::LogConvexity,
                        t,
                        x: probe * (i + 1) as f64 / (grid_density - 1) as f64,
                        g: None,
                        slack: convexity_gap,
                    });
                }
            }
        }
        report.checks_run += 1;
        let divergence_slack = fs[grid_density - 1] - fs[0] - DIVERGENCE_RATIO.ln();
        if divergence_slack <= 0.0 {
            report.violations.push(Violation {
                condition: PotentialCondition::Divergence,
                t,
                x: probe,
                g: None,
                slack: divergence_slack,
            });
        }

        // (c) the bet recurrence over reachable sums.
        let x_max = (t - 1) as f64;
        for i in 0..grid_density {
            let x = if t == 1 {
                0.0
            } else {
                -x_max + 2.0 * x_max * i as f64 / (grid_density - 1) as f64
            };
            let beta = (0.5 * (log_value(t, x + 1.0)? - log_value(t, x - 1.0)?)).tanh();
            let f_prev = log_value(t - 1, x)?;
            for j in 0..g_count {
                let g = -1.0 + 2.0 * j as f64 / (g_count - 1) as f64;
                let lhs = ((g * beta).ln_1p() + f_prev).exp();
                let rhs = log_value(t, x + g)?.exp();
                report.checks_run += 1;
                if lhs < rhs - BET_RECURRENCE_TOL * rhs.max(1.0) {
                    report.violations.push(Violation {
                        condition: PotentialCondition::BetRecurrence,
                        t,
                        x,
                        g: Some(g),
                        slack: lhs - rhs,
                    });
                }
            }
            if t == 1 {
                break;
            }
        }

        // (d) derivative dominance by central differences on [0, t].
        let h = FD_STEP;
        for i in 0..grid_density {
            let x = t as f64 * i as f64 / (grid_density - 1) as f64;
            let f_mid = log_value(t, x)?.exp();
            let f_plus = log_value(t, x + h)?.exp();
            let f_minus = log_value(t, x - h)?.exp();
            let d1 = (f_plus - f_minus) / (2.0 * h);
            let d2 = (f_plus - 2.0 * f_mid + f_minus) / (h * h);
            let slack = x * d2 - d1;
            let noise_guard = FD_NOISE_REL * f_mid * (4.0 * x / (h * h) + 1.0 / h);
            report.checks_run += 1;
            if slack < -(FD_TOL + noise_guard) {
                report.violations.push(Violation {
                    condition: PotentialCondition::DerivativeDominance,
                    t,
                    x,
                    g: None,
                    slack,
                });
            }
        }
    }
    Ok(report)
}
