//! Exact logical execution of the concealed controlled-unitary protocol.
//!
//! Registers are ordered A (Alice), B (Bob), C (ancilla) throughout. The
//! general protocol uses a qutrit ancilla; the Bell-type protocol a qubit.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::{self, EulerAngles, GateError};
use crate::hilbert::{
    self, apply, fidelity, measure, project, HilbertError, Measurement, StateVector, Tensor, C64,
    FIDELITY_TOL, NORM_TOL, ONE,
};
use crate::rng;

const GENERAL_DIMS: [usize; 3] = [2, 2, 3];
const BELL_DIMS: [usize; 3] = [2, 2, 2];
const A: usize = 0;
const B: usize = 1;
const C: usize = 2;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid input field `{field}`: {reason}")]
    InvalidInput { field: &'static str, reason: String },
    #[error("ancilla outcome 2 carries weight {weight:e}; expected zero")]
    ForbiddenOutcome { weight: f64 },
    #[error("ancilla not returned to |0> (residual weight {residual:e})")]
    AncillaNotReset { residual: f64 },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

fn check_pair(field: &'static str, a: C64, b: C64) -> Result<()> {
    if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
        return Err(ProtocolError::InvalidInput {
            field,
            reason: "amplitudes must be finite".into(),
        });
    }
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(ProtocolError::InvalidInput {
            field,
            reason: format!("squared norm is {norm}, expected 1"),
        });
    }
    Ok(())
}

fn check_angles(angles: &EulerAngles) -> Result<()> {
    if angles.is_finite() {
        Ok(())
    } else {
        Err(ProtocolError::InvalidInput {
            field: "angles",
            reason: "Euler angles must be finite".into(),
        })
    }
}

/// Alice holds `alpha|0> + beta|1>`, Bob holds `gamma|0> + delta|1>` and
/// privately knows `angles`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralInput {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub angles: EulerAngles,
}

impl GeneralInput {
    pub fn new(alpha: C64, beta: C64, gamma: C64, delta: C64, angles: EulerAngles) -> Result<Self> {
        let input = Self {
            alpha,
            beta,
            gamma,
            delta,
            angles,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        check_pair("alpha/beta", self.alpha, self.beta)?;
        check_pair("gamma/delta", self.gamma, self.delta)?;
        check_angles(&self.angles)
    }

    /// Random amplitudes with uniform relative phases and angles in [-2π, 2π).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let qubit = |rng: &mut R| {
            let mix = rng.gen_range(0.0..PI / 2.0);
            (
                C64::from_polar(mix.cos(), rng.gen_range(-PI..PI)),
                C64::from_polar(mix.sin(), rng.gen_range(-PI..PI)),
            )
        };
        let (alpha, beta) = qubit(rng);
        let (gamma, delta) = qubit(rng);
        Self {
            alpha,
            beta,
            gamma,
            delta,
            angles: random_angles(rng),
        }
    }

    pub fn alice(&self) -> StateVector {
        StateVector::qubit(self.alpha, self.beta)
    }

    pub fn bob(&self) -> StateVector {
        StateVector::qubit(self.gamma, self.delta)
    }
}

pub fn random_angles<R: Rng + ?Sized>(rng: &mut R) -> EulerAngles {
    let range = -2.0 * PI..2.0 * PI;
    EulerAngles::new(
        rng.gen_range(range.clone()),
        rng.gen_range(range.clone()),
        rng.gen_range(range),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum BellClass {
    /// `c0|00> ± c1|11>`
    Zero,
    /// `c0|01> ± c1|10>`
    One,
}

impl BellClass {
    pub fn ell(self) -> u8 {
        match self {
            BellClass::Zero => 0,
            BellClass::One => 1,
        }
    }
}

impl TryFrom<u8> for BellClass {
    type Error = GateError;

    fn try_from(value: u8) -> std::result::Result<Self, GateError> {
        match value {
            0 => Ok(BellClass::Zero),
            1 => Ok(BellClass::One),
            other => Err(GateError::ClassOutOfRange(other)),
        }
    }
}

impl From<BellClass> for u8 {
    fn from(class: BellClass) -> u8 {
        class.ell()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> C64 {
        match self {
            Sign::Plus => ONE,
            Sign::Minus => -ONE,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(value: i8) -> std::result::Result<Self, String> {
        match value {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(sign: Sign) -> i8 {
        match sign {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Two-qubit input of Bell type shared by Alice and Bob.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellInput {
    pub class: BellClass,
    pub sign: Sign,
    pub c0: C64,
    pub c1: C64,
    pub angles: EulerAngles,
}

impl BellInput {
    pub fn new(class: BellClass, sign: Sign, c0: C64, c1: C64, angles: EulerAngles) -> Result<Self> {
        let input = Self {
            class,
            sign,
            c0,
            c1,
            angles,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        check_pair("c0/c1", self.c0, self.c1)?;
        check_angles(&self.angles)
    }

    /// The shared state over A ⊗ B.
    pub fn psi0(&self) -> StateVector {
        let (first, second): ([usize; 2], [usize; 2]) = match self.class {
            BellClass::Zero => ([0, 0], [1, 1]),
            BellClass::One => ([0, 1], [1, 0]),
        };
        StateVector::from_terms(
            &[2, 2],
            [(&first[..], self.c0), (&second[..], self.sign.factor() * self.c1)],
        )
        .expect("valid labels")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub label: &'static str,
    pub state: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub outcome: u8,
    pub probability: f64,
}

/// Every intermediate state of one protocol run, in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub stages: Vec<Stage>,
    /// Absent for the Bell-type protocol, which measures nothing.
    pub measurement: Option<MeasurementRecord>,
    /// Final state over A ⊗ B.
    pub output: StateVector,
}

impl Transcript {
    pub fn stage(&self, label: &str) -> Option<&StateVector> {
        self.stages.iter().find(|s| s.label == label).map(|s| &s.state)
    }

    pub fn stage_mut(&mut self, label: &str) -> Option<&mut StateVector> {
        self.stages
            .iter_mut()
            .find(|s| s.label == label)
            .map(|s| &mut s.state)
    }

    pub fn outcome(&self) -> Option<u8> {
        self.measurement.map(|m| m.outcome)
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for stage in &self.stages {
            writeln!(f, "{:>16}: {}", stage.label, stage.state.ket_string(1e-12))?;
        }
        if let Some(m) = self.measurement {
            writeln!(
                f,
                "{:>16}: m = {} (p = {})",
                "measurement", m.outcome, m.probability
            )?;
        }
        write!(f, "{:>16}: {}", "output", self.output.ket_string(1e-12))
    }
}

/// Stage labels of the general protocol, in order.
pub const GENERAL_STAGES: [&str; 8] = [
    "psi0",
    "psi1",
    "psi2",
    "psi3",
    "psi4",
    "pre_measurement",
    "psi5",
    "psi6",
];

/// States up to and including the ancilla measurement basis change.
fn general_prefix(input: &GeneralInput) -> Result<Vec<Stage>> {
    input.validate()?;
    let psi0 = input
        .alice()
        .tensor(&input.bob())
        .tensor(&StateVector::basis(&[3], &[0])?);
    let psi1 = apply(&gates::cnot_to_qutrit(), &psi0, &[B, C])?;
    let psi2 = apply(&gates::toffoli(), &psi1, &[A, B, C])?;
    let psi3 = apply(&gates::v1(input.angles), &psi2, &[B, C])?;
    let q1 = apply(&gates::q1(), &psi3, &[A, B, C])?;
    let psi4 = apply(&gates::q2(), &q1, &[A, B, C])?;
    let v2 = apply(&gates::v2(), &psi4, &[B, C])?;
    let pre = apply(&gates::hadamard_on_qutrit(), &v2, &[C])?;
    Ok(vec![
        Stage {
            label: "psi0",
            state: psi0,
        },
        Stage {
            label: "psi1",
            state: psi1,
        },
        Stage {
            label: "psi2",
            state: psi2,
        },
        Stage {
            label: "psi3",
            state: psi3,
        },
        Stage {
            label: "psi4",
            state: psi4,
        },
        Stage {
            label: "pre_measurement",
            state: pre,
        },
    ])
}

fn finish_general(mut stages: Vec<Stage>, measured: Measurement) -> Result<Transcript> {
    let outcome = match measured.outcome {
        0 => 0u8,
        1 => 1u8,
        _ => {
            return Err(ProtocolError::ForbiddenOutcome {
                weight: measured.probability,
            })
        }
    };
    let psi5 = measured
        .collapsed
        .branch(C, measured.outcome)?
        .normalized()
        .ok_or(HilbertError::ZeroMarginal(C))?;
    let psi6 = apply(&gates::q3(outcome)?, &psi5, &[A, B])?;
    stages.push(Stage {
        label: "psi5",
        state: psi5,
    });
    stages.push(Stage {
        label: "psi6",
        state: psi6.clone(),
    });
    Ok(Transcript {
        stages,
        measurement: Some(MeasurementRecord {
            outcome,
            probability: measured.probability,
        }),
        output: psi6,
    })
}

fn check_forbidden_weight(pre: &StateVector) -> Result<()> {
    let weight = pre.marginal(C)?[2];
    if weight >= NORM_TOL {
        return Err(ProtocolError::ForbiddenOutcome { weight });
    }
    Ok(())
}

/// Runs the general protocol, sampling the ancilla measurement from `rng`.
pub fn run_general<R: RngCore + ?Sized>(input: &GeneralInput, rng: &mut R) -> Result<Transcript> {
    let stages = general_prefix(input)?;
    let pre = &stages.last().expect("prefix nonempty").state;
    check_forbidden_weight(pre)?;
    let measured = measure(pre, C, rng)?;
    finish_general(stages, measured)
}

/// Runs the general protocol with the ancilla outcome fixed to `m`.
pub fn run_general_postselected(input: &GeneralInput, m: u8) -> Result<Transcript> {
    if m > 1 {
        return Err(GateError::OutcomeOutOfRange(m).into());
    }
    let stages = general_prefix(input)?;
    let pre = &stages.last().expect("prefix nonempty").state;
    check_forbidden_weight(pre)?;
    let measured = project(pre, C, usize::from(m))?;
    finish_general(stages, measured)
}

/// Exact Born weights of ancilla outcomes 0, 1, 2 just before measurement.
pub fn measurement_weights(input: &GeneralInput) -> Result<[f64; 3]> {
    let stages = general_prefix(input)?;
    let w = stages.last().expect("prefix nonempty").state.marginal(C)?;
    Ok([w[0], w[1], w[2]])
}

/// `gamma |psi>_A |0>_B + delta (U_m |psi>_A) |1>_B`, normalized.
pub fn expected_output_general(input: &GeneralInput, m: u8) -> Result<StateVector> {
    let um = gates::u_m(input.angles, m)?;
    let alice = input.alice();
    let rotated = um.apply_full(&alice)?;
    let zero = StateVector::basis(&[2], &[0])?;
    let one = StateVector::basis(&[2], &[1])?;
    let state = alice
        .tensor(&zero)
        .scaled(input.gamma)
        .add(&rotated.tensor(&one).scaled(input.delta))?;
    state.normalized().ok_or(HilbertError::ZeroMarginal(A).into())
}

/// Closed-form intermediate states written out term by term.
pub mod closed_form {
    use super::*;

    struct Coefficients {
        /// `e^{-i(varphi+phi)/2} cos(θ/2)`
        cc: C64,
        /// `e^{-i(varphi-phi)/2} sin(θ/2)`
        cs: C64,
        /// `e^{+i(varphi+phi)/2} cos(θ/2)`
        pc: C64,
        /// `e^{+i(varphi-phi)/2} sin(θ/2)`
        ps: C64,
    }

    fn coefficients(angles: &EulerAngles) -> Coefficients {
        let (s, c) = (angles.theta / 2.0).sin_cos();
        let sum = (angles.varphi + angles.phi) / 2.0;
        let diff = (angles.varphi - angles.phi) / 2.0;
        Coefficients {
            cc: C64::from_polar(c, -sum),
            cs: C64::from_polar(s, -diff),
            pc: C64::from_polar(c, sum),
            ps: C64::from_polar(s, diff),
        }
    }

    fn parity(m: u8) -> f64 {
        if m.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `gamma |psi>_A |00>_BC` over A ⊗ B ⊗ C.
    fn untouched(input: &GeneralInput) -> Vec<([usize; 3], C64)> {
        vec![
            ([0, 0, 0], input.gamma * input.alpha),
            ([1, 0, 0], input.gamma * input.beta),
        ]
    }

    fn build<const N: usize>(dims: &[usize], terms: &[([usize; N], C64)]) -> StateVector {
        StateVector::from_terms(dims, terms.iter().map(|(d, a)| (&d[..], *a))).expect("valid labels")
    }

    pub fn psi1(input: &GeneralInput) -> StateVector {
        let mut terms = untouched(input);
        terms.push(([0, 1, 1], input.delta * input.alpha));
        terms.push(([1, 1, 1], input.delta * input.beta));
        build(&GENERAL_DIMS, &terms)
    }

    pub fn psi2(input: &GeneralInput) -> StateVector {
        let mut terms = untouched(input);
        terms.push(([0, 1, 1], input.delta * input.alpha));
        terms.push(([1, 0, 1], input.delta * input.beta));
        build(&GENERAL_DIMS, &terms)
    }

    pub fn psi3(input: &GeneralInput) -> StateVector {
        let k = coefficients(&input.angles);
        let (da, db) = (input.delta * input.alpha, input.delta * input.beta);
        let mut terms = untouched(input);
        terms.push(([0, 0, 1], da * k.cc));
        terms.push(([0, 1, 1], da * k.cs));
        terms.push(([1, 0, 2], db * k.pc));
        terms.push(([1, 1, 2], -db * k.ps));
        build(&GENERAL_DIMS, &terms)
    }

    pub fn psi4(input: &GeneralInput) -> StateVector {
        let k = coefficients(&input.angles);
        let (da, db) = (input.delta * input.alpha, input.delta * input.beta);
        let mut terms = untouched(input);
        terms.push(([0, 1, 1], da * k.cc));
        terms.push(([1, 1, 1], da * k.cs));
        terms.push(([1, 1, 2], db * k.pc));
        terms.push(([0, 1, 2], -db * k.ps));
        build(&GENERAL_DIMS, &terms)
    }

    /// Over A ⊗ B, renormalized.
    pub fn psi5(input: &GeneralInput, m: u8) -> StateVector {
        let k = coefficients(&input.angles);
        let (da, db) = (input.delta * input.alpha, input.delta * input.beta);
        let terms = [
            ([0, 0], input.gamma * input.alpha),
            ([1, 0], input.gamma * input.beta),
            ([0, 1], da * k.cc),
            ([1, 1], da * k.cs),
            ([1, 1], parity(m) * db * k.pc),
            ([0, 1], parity(1 - m % 2) * db * k.ps),
        ];
        build(&[2, 2], &terms).normalized().expect("nonzero state")
    }

    /// Over A ⊗ B, renormalized.
    pub fn psi6(input: &GeneralInput, m: u8) -> StateVector {
        let k = coefficients(&input.angles);
        let (da, db) = (input.delta * input.alpha, input.delta * input.beta);
        let terms = [
            ([0, 0], input.gamma * input.alpha),
            ([1, 0], input.gamma * input.beta),
            ([0, 1], da * k.cc),
            ([1, 1], parity(m) * da * k.cs),
            ([1, 1], db * k.pc),
            ([0, 1], parity(1 - m % 2) * db * k.ps),
        ];
        build(&[2, 2], &terms).normalized().expect("nonzero state")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageFidelity {
    pub label: &'static str,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub stage_fidelities: Vec<StageFidelity>,
    pub pass: bool,
    pub worst_fidelity: f64,
    /// `1 - F` between the term-by-term final state and the compact
    /// `gamma I + delta U_m` form. Reported, never folded into `pass`.
    pub compact_form_discrepancy: f64,
}

/// Compares each stored stage with its closed form.
pub fn verify_general(transcript: &Transcript, input: &GeneralInput) -> Result<VerificationReport> {
    let m = transcript.outcome().ok_or_else(|| ProtocolError::InvalidInput {
        field: "transcript",
        reason: "general transcript carries no measurement".into(),
    })?;
    let expected = [
        ("psi1", closed_form::psi1(input)),
        ("psi2", closed_form::psi2(input)),
        ("psi3", closed_form::psi3(input)),
        ("psi4", closed_form::psi4(input)),
        ("psi5", closed_form::psi5(input, m)),
        ("psi6", closed_form::psi6(input, m)),
    ];
    let mut stage_fidelities = Vec::with_capacity(expected.len());
    for (label, closed) in &expected {
        let f = match transcript.stage(label) {
            Some(state) if state.dims() == closed.dims() => fidelity(state, closed)?,
            _ => 0.0,
        };
        stage_fidelities.push(StageFidelity { label, fidelity: f });
    }
    let worst_fidelity = stage_fidelities
        .iter()
        .map(|s| s.fidelity)
        .fold(f64::INFINITY, f64::min);
    let compact = expected_output_general(input, m)?;
    let compact_form_discrepancy = 1.0 - fidelity(&expected[5].1, &compact)?;
    if compact_form_discrepancy > FIDELITY_TOL {
        log::warn!("term-by-term and compact output forms differ by {compact_form_discrepancy:e}");
    }
    Ok(VerificationReport {
        stage_fidelities,
        pass: worst_fidelity >= 1.0 - FIDELITY_TOL,
        worst_fidelity,
        compact_form_discrepancy,
    })
}

/// Runs the Bell-type protocol; deterministic.
pub fn run_bell(input: &BellInput) -> Result<Transcript> {
    input.validate()?;
    let ell = input.class.ell();
    let psi0 = input.psi0().tensor(&StateVector::basis(&[2], &[0])?);
    let cnot = gates::cnot();
    let entangled = apply(&cnot, &psi0, &[B, C])?;
    let v1 = apply(&gates::tilde_v1(input.angles, ell)?, &entangled, &[B, C])?;
    let q1 = apply(&gates::tilde_q1(), &v1, &[A, B, C])?;
    let q2 = apply(&gates::tilde_q2(ell)?, &q1, &[A, B, C])?;
    let restored = apply(&cnot, &q2, &[B, C])?;
    let residual = restored.marginal(C)?[1];
    if residual > FIDELITY_TOL {
        return Err(ProtocolError::AncillaNotReset { residual });
    }
    let output = restored
        .branch(C, 0)?
        .normalized()
        .ok_or(HilbertError::ZeroMarginal(C))?;
    debug_assert_eq!(restored.dims(), &BELL_DIMS[..]);
    Ok(Transcript {
        stages: vec![
            Stage {
                label: "psi0",
                state: psi0,
            },
            Stage {
                label: "cnot",
                state: entangled,
            },
            Stage {
                label: "tilde_v1",
                state: v1,
            },
            Stage {
                label: "tilde_q1",
                state: q1,
            },
            Stage {
                label: "tilde_q2",
                state: q2,
            },
            Stage {
                label: "uncompute",
                state: restored,
            },
        ],
        measurement: None,
        output,
    })
}

/// `(I ⊗ |0><0| + U ⊗ |1><1|) psi0` over A ⊗ B.
pub fn expected_output_bell(input: &BellInput) -> Result<StateVector> {
    let u = gates::euler_unitary(input.angles);
    let psi0 = input.psi0();
    let mut terms = Vec::new();
    for a in 0..2 {
        terms.push(([a, 0], psi0.amp(&[a, 0])?));
        for a_in in 0..2 {
            terms.push(([a, 1], u.get(a, a_in) * psi0.amp(&[a_in, 1])?));
        }
    }
    let state = StateVector::from_terms(&[2, 2], terms.iter().map(|(d, x)| (&d[..], *x)))?;
    state.normalized().ok_or(HilbertError::ZeroMarginal(B).into())
}

/// Ancilla outcome counts over repeated seeded runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub trials: u64,
    pub counts: [u64; 2],
}

impl OutcomeCounts {
    pub fn frequencies(&self) -> [f64; 2] {
        let n = self.trials as f64;
        [self.counts[0] as f64 / n, self.counts[1] as f64 / n]
    }
}

/// Runs the general protocol `trials` times, run `i` drawing from stream `i`.
pub fn outcome_statistics(input: &GeneralInput, trials: u64, seed: u64) -> Result<OutcomeCounts> {
    if trials == 0 {
        return Err(ProtocolError::InvalidInput {
            field: "trials",
            reason: "at least one trial is required".into(),
        });
    }
    let stages = general_prefix(input)?;
    let pre = stages.last().expect("prefix nonempty").state.clone();
    check_forbidden_weight(&pre)?;
    let ones = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i);
            measure(&pre, C, &mut r).map(|m| u64::from(m.outcome == 1))
        })
        .collect::<hilbert::Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    Ok(OutcomeCounts {
        trials,
        counts: [trials - ones, ones],
    })
}
