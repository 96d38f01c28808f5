//! Closed-form success probabilities of the Zeno gates and protocol stages.
//!
//! Squared trigonometric values at `θ_X = π/(2X)` multiples go through
//! `cos(π·k/X)` so that the special points (π/4, π/2) come out exact.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{BellClass, BellInput, GeneralInput};

/// Above this many factors, products are accumulated as sums of logarithms.
pub const LOG_SPACE_THRESHOLD: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZenoError {
    #[error("cycle count `{name}` must be at least 1")]
    ZeroCycles { name: &'static str },
    #[error("`{name}` must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("absorber amplitudes have squared norm {0}, expected 1")]
    UnnormalizedAbsorber(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("unknown absorber model `{0}`")]
    UnknownModel(String),
}

pub type Result<T> = std::result::Result<T, ZenoError>;

fn cycles(name: &'static str, value: u32) -> Result<u32> {
    if value == 0 {
        Err(ZenoError::ZeroCycles { name })
    } else {
        Ok(value)
    }
}

fn probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ZenoError::ProbabilityOutOfRange { name, value })
    }
}

/// Outer (M), inner (N) and concatenation (K) cycle counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleConfig {
    #[serde(rename = "M")]
    pub outer: u32,
    #[serde(rename = "N")]
    pub inner: u32,
    #[serde(rename = "K")]
    pub concatenated: u32,
}

impl CycleConfig {
    pub fn new(outer: u32, inner: u32, concatenated: u32) -> Result<Self> {
        let cfg = Self {
            outer,
            inner,
            concatenated,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn uniform(c: u32) -> Result<Self> {
        Self::new(c, c, c)
    }

    pub fn validate(&self) -> Result<()> {
        cycles("M", self.outer)?;
        cycles("N", self.inner)?;
        cycles("K", self.concatenated)?;
        Ok(())
    }

    pub fn theta_m(&self) -> f64 {
        PI / (2.0 * f64::from(self.outer))
    }

    pub fn theta_n(&self) -> f64 {
        PI / (2.0 * f64::from(self.inner))
    }

    pub fn theta_k(&self) -> f64 {
        PI / (2.0 * f64::from(self.concatenated))
    }
}

/// `cos²(k·π/(2x))`.
fn cos2_step(k: i64, x: u32) -> f64 {
    0.5 * (1.0 + (PI * k as f64 / f64::from(x)).cos())
}

/// `sin²(k·π/(2x))`, written as `cos²(π/2 − kπ/(2x))`.
fn sin2_step(k: i64, x: u32) -> f64 {
    cos2_step(i64::from(x) - k, x)
}

/// `sin²(θ/2)` and `cos²(θ/2)` of a Euler angle.
fn half_angle_weights(theta: f64) -> (f64, f64) {
    let c = theta.cos();
    (0.5 * (1.0 - c), 0.5 * (1.0 + c))
}

fn powu(base: f64, exp: u64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// Running product of factors `(1 - p)^n`.
struct Survival {
    log_space: bool,
    acc: f64,
}

impl Survival {
    fn new(factor_count: u64) -> Self {
        let log_space = factor_count > LOG_SPACE_THRESHOLD;
        Self {
            log_space,
            acc: if log_space { 0.0 } else { 1.0 },
        }
    }

    fn times(&mut self, loss: f64, exp: u64) {
        if self.log_space {
            self.acc += if loss >= 1.0 {
                f64::NEG_INFINITY
            } else {
                exp as f64 * (-loss).ln_1p()
            };
        } else {
            self.acc *= powu(1.0 - loss, exp);
        }
    }

    fn value(self) -> f64 {
        if self.log_space {
            self.acc.exp()
        } else {
            self.acc
        }
    }
}

fn survival_pow(loss: f64, exp: u64) -> f64 {
    let mut s = Survival::new(exp);
    s.times(loss, exp);
    s.value()
}

/// `cos^{2N}(π/(2N))`: a photon survives N cycles next to a present absorber.
pub fn qz_survival(n: u32) -> Result<f64> {
    cycles("N", n)?;
    Ok(survival_pow(sin2_step(1, n), u64::from(n)))
}

/// `cos^{2M}(π/(2M))`: nested gate, absent absorber.
pub fn cqz_lambda0(m: u32) -> Result<f64> {
    cycles("M", m)?;
    Ok(survival_pow(sin2_step(1, m), u64::from(m)))
}

/// `∏_{i=1}^{M} [1 − sin²(iθ_M) sin²θ_N]^N`: nested gate, present absorber.
pub fn cqz_lambda1(m: u32, n: u32) -> Result<f64> {
    cycles("M", m)?;
    cycles("N", n)?;
    Ok(cqz_absorption_factor(m, n, 1.0, m))
}

/// Outer-cycle detector survival `(1 − w sin²θ_M)^cycles`.
fn cqz_detector_factor(m: u32, weight: f64, outer_cycles: u32) -> f64 {
    survival_pow(weight * sin2_step(1, m), u64::from(outer_cycles))
}

/// Inner-cycle absorption survival `∏_{i=1}^{cycles} [1 − w sin²(iθ_M) sin²θ_N]^N`.
fn cqz_absorption_factor(m: u32, n: u32, weight: f64, outer_cycles: u32) -> f64 {
    let mut s = Survival::new(u64::from(outer_cycles) * u64::from(n));
    let inner = sin2_step(1, n);
    for i in 1..=outer_cycles {
        s.times(weight * sin2_step(i64::from(i), m) * inner, u64::from(n));
    }
    s.value()
}

/// `(1 − ∇₀ sin²θ_N)^N ∇₀`.
pub fn cepi_success(n: u32, nabla0: f64) -> Result<f64> {
    cycles("N", n)?;
    let nabla0 = probability("nabla0", nabla0)?;
    Ok(survival_pow(nabla0 * sin2_step(1, n), u64::from(n)) * nabla0)
}

/// Same form as [`cepi_success`] with `∇₁ = |αγ|² + |βδ|²`.
pub fn dcepi_success(n: u32, nabla1: f64) -> Result<f64> {
    cycles("N", n)?;
    let nabla1 = probability("nabla1", nabla1)?;
    Ok(survival_pow(nabla1 * sin2_step(1, n), u64::from(n)) * nabla1)
}

/// Single-gate and K-fold success of a distributed flipping operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipSuccess {
    pub single: f64,
    pub concatenated: f64,
}

fn flip_success(k: u32, n: u32, nabla: f64) -> FlipSuccess {
    let inner_loss = nabla * cos2_step(1, k) * sin2_step(1, n);
    let outer_loss = nabla * sin2_step(1, k);
    let single = survival_pow(inner_loss, u64::from(n)) * (1.0 - outer_loss);
    let mut s = Survival::new(u64::from(k) * u64::from(n));
    s.times(inner_loss, u64::from(k) * u64::from(n));
    s.times(outer_loss, u64::from(k));
    FlipSuccess {
        single,
        concatenated: s.value(),
    }
}

/// `∇₂ = (1 − ∇cos²θ_K sin²θ_N)^N (1 − ∇sin²θ_K)` and `∇₃ = ∇₂^K`.
pub fn dcfo_success(k: u32, n: u32, nabla: f64) -> Result<FlipSuccess> {
    cycles("K", k)?;
    cycles("N", n)?;
    Ok(flip_success(k, n, probability("nabla", nabla)?))
}

/// `∇₅` and `∇₆ = ∇₅^K`, with `∇₄ = |β|² + |δ|²` as the weight.
pub fn ddcfo_success(k: u32, n: u32, nabla4: f64) -> Result<FlipSuccess> {
    cycles("K", k)?;
    cycles("N", n)?;
    Ok(flip_success(k, n, probability("nabla4", nabla4)?))
}

/// Probability of clearing one protocol stage, split by failure mechanism.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageFactor {
    pub label: &'static str,
    /// Survival against the photon being caught at a detector.
    pub detector: f64,
    /// Survival against the photon being absorbed by the electron.
    pub absorption: f64,
    /// Stage only runs when the ancilla outcome is 1.
    pub only_for_outcome_one: bool,
}

impl StageFactor {
    pub fn survival(&self) -> f64 {
        self.detector * self.absorption
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageProbabilities {
    /// `λ₀ … λ₇`; entries that do not apply to the protocol are `None`.
    pub lambda: [Option<f64>; 8],
    /// `∇₀ … ∇₁₀`; entries that do not apply are `None`.
    pub nabla: [Option<f64>; 11],
    /// Unindexed absorber weight of the Bell-type protocol.
    pub nabla_class: Option<f64>,
    pub zeta_m: Option<[f64; 2]>,
    pub zeta: Option<f64>,
    pub stages: Vec<StageFactor>,
}

impl StageProbabilities {
    fn empty(cfg: &CycleConfig) -> Self {
        let mut lambda = [None; 8];
        lambda[0] = Some(survival_pow(sin2_step(1, cfg.outer), u64::from(cfg.outer)));
        lambda[1] = Some(cqz_absorption_factor(cfg.outer, cfg.inner, 1.0, cfg.outer));
        Self {
            lambda,
            nabla: [None; 11],
            nabla_class: None,
            zeta_m: None,
            zeta: None,
            stages: Vec::new(),
        }
    }

    /// Probability the protocol aborts, averaged over equiprobable outcomes.
    pub fn mean_abort_rate(&self) -> Option<f64> {
        match (self.zeta_m, self.zeta) {
            (Some([z0, z1]), _) => Some(0.5 * (z0 + z1)),
            (None, Some(z)) => Some(z),
            _ => None,
        }
    }
}

fn cqz_stage(
    label: &'static str,
    cfg: &CycleConfig,
    detector_weight: f64,
    absorption_weight: f64,
    outer_cycles: u32,
) -> StageFactor {
    StageFactor {
        label,
        detector: cqz_detector_factor(cfg.outer, detector_weight, outer_cycles),
        absorption: cqz_absorption_factor(cfg.outer, cfg.inner, absorption_weight, outer_cycles),
        only_for_outcome_one: false,
    }
}

/// `(1 − w cos²θ_K sin²θ_N)^{KN} (1 − w sin²θ_K)^K`.
fn concatenated_flip_stage(label: &'static str, cfg: &CycleConfig, weight: f64) -> StageFactor {
    StageFactor {
        label,
        detector: 1.0,
        absorption: flip_success(cfg.concatenated, cfg.inner, weight).concatenated,
        only_for_outcome_one: false,
    }
}

/// `λ₂ … λ₅`, `∇₇`, `∇₈` and the outcome-conditioned abort rates `ζ_m`.
pub fn stage_probabilities_general(cfg: &CycleConfig, input: &GeneralInput) -> Result<StageProbabilities> {
    cfg.validate()?;
    let (a2, b2) = (input.alpha.norm_sqr(), input.beta.norm_sqr());
    let (g2, d2) = (input.gamma.norm_sqr(), input.delta.norm_sqr());
    let (s2, c2) = half_angle_weights(input.angles.theta);
    let nabla7 = d2 * a2 * c2 + d2 * b2 * s2;
    let nabla8 = d2 * b2 * c2 + d2 * a2 * s2;

    let t = cqz_stage("toffoli", cfg, a2 * d2, b2 * d2, cfg.outer);
    let dd = concatenated_flip_stage("d-dcfo", cfg, d2 * s2);
    let q12 = cqz_stage("q1q2", cfg, nabla7, nabla8, cfg.outer);
    let mut q3 = cqz_stage("q3", cfg, a2 * g2, b2 * g2, 2 * cfg.outer);
    q3.only_for_outcome_one = true;

    let (l2, l3, l4, l5) = (t.survival(), dd.survival(), q12.survival(), q3.survival());
    let mut p = StageProbabilities::empty(cfg);
    p.lambda[2] = Some(l2);
    p.lambda[3] = Some(l3);
    p.lambda[4] = Some(l4);
    p.lambda[5] = Some(l5);
    p.nabla[7] = Some(nabla7);
    p.nabla[8] = Some(nabla8);
    p.zeta_m = Some([1.0 - l2 * l3 * l4, 1.0 - l2 * l3 * l4 * l5]);
    p.stages = vec![t, dd, q12, q3];
    Ok(p)
}

/// `λ₆`, `λ₇`, `∇₉`, `∇₁₀` and the abort rate `ζ` of the Bell-type protocol.
pub fn stage_probabilities_bell(cfg: &CycleConfig, input: &BellInput) -> Result<StageProbabilities> {
    cfg.validate()?;
    let nabla = match input.class {
        BellClass::One => input.c0.norm_sqr(),
        BellClass::Zero => input.c1.norm_sqr(),
    };
    let (s2, c2) = half_angle_weights(input.angles.theta);
    let nabla9 = nabla * c2;
    let nabla10 = nabla * s2;
    let (detector_weight, absorption_weight) = match input.class {
        BellClass::One => (nabla9, nabla10),
        BellClass::Zero => (nabla10, nabla9),
    };

    let dcfo = concatenated_flip_stage("dcfo", cfg, nabla * s2);
    let cqz = cqz_stage("cqz", cfg, detector_weight, absorption_weight, cfg.outer);
    let (l6, l7) = (dcfo.survival(), cqz.survival());
    let mut p = StageProbabilities::empty(cfg);
    p.lambda[6] = Some(l6);
    p.lambda[7] = Some(l7);
    p.nabla[9] = Some(nabla9);
    p.nabla[10] = Some(nabla10);
    p.nabla_class = Some(nabla);
    p.zeta = Some(1.0 - l6 * l7);
    p.stages = vec![dcfo, cqz];
    Ok(p)
}
