//! Trajectory models of a photon probing a (possibly superposed) absorber.
//!
//! Joint states live on `[2, 2]`: absorber (0 absent, 1 present) ⊗
//! polarization (0 = H, 1 = V). Internally the evolution works relative to
//! the gate's native polarization: `native → cos·native + sin·other`,
//! `other → cos·other − sin·native` per rotation. Feeding the other
//! polarization into a nested gate therefore picks up the −1 on the blocked
//! branch without a separate rule.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::analytic::{self, Result, ZenoError};
use crate::hilbert::{StateVector, C64, NORM_TOL, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

/// Absorber amplitudes; an electron that blocks (`presence`) or clears
/// (`absence`) the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    pub presence: C64,
    pub absence: C64,
}

impl Absorber {
    pub fn new(presence: C64, absence: C64) -> Result<Self> {
        let norm = presence.norm_sqr() + absence.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(ZenoError::UnnormalizedAbsorber(norm));
        }
        Ok(Self { presence, absence })
    }

    pub fn present() -> Self {
        Self {
            presence: ONE,
            absence: ZERO,
        }
    }

    pub fn absent() -> Self {
        Self {
            presence: ZERO,
            absence: ONE,
        }
    }

    /// Equal-weight superposition.
    pub fn balanced() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            presence: h,
            absence: h,
        }
    }

    pub fn presence_weight(&self) -> f64 {
        self.presence.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OutcomeKind {
    Success,
    AbsorbedByElectron,
    DiscardedAtDetector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryOutcome {
    pub kind: OutcomeKind,
    pub stage: &'static str,
    /// 1-based index of the cycle in which the trajectory ended; 0 when it
    /// ended at the final readout.
    pub cycle_index: u32,
    /// Normalized joint state for every non-absorbed ending.
    pub final_state: Option<StateVector>,
    pub photon_entered_channel: bool,
}

impl TrajectoryOutcome {
    fn lost(kind: OutcomeKind, stage: &'static str, cycle_index: u32) -> Self {
        Self {
            kind,
            stage,
            cycle_index,
            final_state: None,
            photon_entered_channel: true,
        }
    }
}

/// Joint amplitudes in gate-relative coordinates: `[ao][0 native, 1 other]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Joint([[C64; 2]; 2]);

const ABSENT: usize = 0;
const PRESENT: usize = 1;
const NATIVE: usize = 0;
const OTHER: usize = 1;

impl Joint {
    fn new(absorber: &Absorber, native: C64, other: C64) -> Self {
        Self([
            [absorber.absence * native, absorber.absence * other],
            [absorber.presence * native, absorber.presence * other],
        ])
    }

    fn norm_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    fn rotate(&mut self, angle: f64) {
        let (s, c) = angle.sin_cos();
        for row in &mut self.0 {
            let [n, o] = *row;
            *row = [n * c - o * s, n * s + o * c];
        }
    }

    fn to_state(self, native: Polarization) -> StateVector {
        let mut amps = vec![ZERO; 4];
        for ao in 0..2 {
            amps[2 * ao + native.index()] = self.0[ao][NATIVE];
            amps[2 * ao + native.flipped().index()] = self.0[ao][OTHER];
        }
        StateVector::new(vec![2, 2], amps).expect("4 amplitudes")
    }
}

/// Decides whether a loss with the given conditional probability fires.
trait Hazard {
    fn fires(&mut self, probability: f64) -> bool;
}

/// Never fires; evolution then yields the unnormalized surviving amplitude.
struct Exact;

impl Hazard for Exact {
    fn fires(&mut self, _: f64) -> bool {
        false
    }
}

struct Sampled<'a>(&'a mut dyn RngCore);

impl Hazard for Sampled<'_> {
    fn fires(&mut self, probability: f64) -> bool {
        probability > 0.0 && self.0.gen::<f64>() < probability
    }
}

/// Conditional probability that the amplitude `amp` is the one found.
fn conditional(amp: C64, joint: &Joint) -> f64 {
    let total = joint.norm_sqr();
    if total > 0.0 {
        (amp.norm_sqr() / total).min(1.0)
    } else {
        0.0
    }
}

enum Evolution {
    Survived(Joint),
    Lost(TrajectoryOutcome),
}

fn coherent_qz(mut joint: Joint, n: u32, hazard: &mut dyn Hazard) -> Evolution {
    let theta = PI / (2.0 * f64::from(n));
    for cycle in 1..=n {
        joint.rotate(theta);
        let exposed = joint.0[PRESENT][OTHER];
        if hazard.fires(conditional(exposed, &joint)) {
            return Evolution::Lost(TrajectoryOutcome::lost(
                OutcomeKind::AbsorbedByElectron,
                "qz",
                cycle,
            ));
        }
        joint.0[PRESENT][OTHER] = ZERO;
    }
    Evolution::Survived(joint)
}

fn coherent_cqz(mut joint: Joint, m: u32, n: u32, hazard: &mut dyn Hazard) -> Evolution {
    let theta_m = PI / (2.0 * f64::from(m));
    let (sin_n, cos_n) = (PI / (2.0 * f64::from(n))).sin_cos();
    for outer in 1..=m {
        joint.rotate(theta_m);
        // Clear channel: the inner gate turns this component around and
        // sends it to the detector.
        let escaped = joint.0[ABSENT][OTHER];
        if hazard.fires(conditional(escaped, &joint)) {
            return Evolution::Lost(TrajectoryOutcome::lost(
                OutcomeKind::DiscardedAtDetector,
                "cqz-outer",
                outer,
            ));
        }
        joint.0[ABSENT][OTHER] = ZERO;
        // Blocked channel: N inner Zeno cycles on the other component.
        for _ in 0..n {
            let exposed = joint.0[PRESENT][OTHER] * sin_n;
            if hazard.fires(conditional(exposed, &joint)) {
                return Evolution::Lost(TrajectoryOutcome::lost(
                    OutcomeKind::AbsorbedByElectron,
                    "cqz-inner",
                    outer,
                ));
            }
            joint.0[PRESENT][OTHER] *= cos_n;
        }
    }
    Evolution::Survived(joint)
}

/// Gate-relative photon input: `native·|native> + other·|other>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeInput {
    pub native: C64,
    pub other: C64,
}

impl RelativeInput {
    pub const NATIVE: Self = Self {
        native: ONE,
        other: ZERO,
    };
    pub const OTHER: Self = Self {
        native: ZERO,
        other: ONE,
    };
}

/// Unnormalized surviving joint state of a coherent nested gate, for an
/// arbitrary photon input. Its squared norm is the survival probability.
pub fn coherent_cqz_survivor(
    absorber: &Absorber,
    gate: Polarization,
    input: RelativeInput,
    m: u32,
    n: u32,
) -> Result<StateVector> {
    analytic::CycleConfig::new(m, n, 1)?;
    let joint = Joint::new(absorber, input.native, input.other);
    match coherent_cqz(joint, m, n, &mut Exact) {
        Evolution::Survived(j) => Ok(j.to_state(gate)),
        Evolution::Lost(_) => unreachable!("exact evolution never samples a loss"),
    }
}

/// Readout of the single-loop gate: the native polarization certifies a
/// blocking absorber; the other polarization means the photon crossed the
/// channel.
fn qz_readout(joint: Joint, native: Polarization, rng: &mut dyn RngCore) -> TrajectoryOutcome {
    let kept = joint.0[PRESENT][NATIVE].norm_sqr() + joint.0[ABSENT][NATIVE].norm_sqr();
    let total = joint.norm_sqr();
    let mut collapsed = joint;
    let native_seen = rng.gen::<f64>() * total < kept;
    let drop = if native_seen { OTHER } else { NATIVE };
    for row in &mut collapsed.0 {
        row[drop] = ZERO;
    }
    let state = collapsed
        .to_state(native)
        .normalized()
        .expect("sampled branch has weight");
    TrajectoryOutcome {
        kind: if native_seen {
            OutcomeKind::Success
        } else {
            OutcomeKind::DiscardedAtDetector
        },
        stage: "qz-readout",
        cycle_index: 0,
        final_state: Some(state),
        photon_entered_channel: !native_seen,
    }
}

/// Ideal output of the nested gate: `presence|1, other> + absence|0, native>`.
pub fn ideal_cqz_output(absorber: &Absorber, gate: Polarization) -> StateVector {
    Joint([[absorber.absence, ZERO], [ZERO, absorber.presence]]).to_state(gate)
}

/// Ideal certified output of the single-loop gate: `|1, native>`.
pub fn ideal_qz_output(gate: Polarization) -> StateVector {
    Joint([[ZERO, ZERO], [ONE, ZERO]]).to_state(gate)
}

/// A microscopic model of absorber/photon trajectories.
pub trait AbsorberModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn qz_trajectory(
        &self,
        absorber: &Absorber,
        photon: Polarization,
        n: u32,
        rng: &mut dyn RngCore,
    ) -> TrajectoryOutcome;

    fn cqz_trajectory(
        &self,
        absorber: &Absorber,
        photon: Polarization,
        m: u32,
        n: u32,
        rng: &mut dyn RngCore,
    ) -> TrajectoryOutcome;

    /// Exact probability that [`Self::qz_trajectory`] ends in success.
    fn qz_success_probability(&self, absorber: &Absorber, n: u32) -> f64;

    /// Exact probability that [`Self::cqz_trajectory`] ends in success.
    fn cqz_success_probability(&self, absorber: &Absorber, m: u32, n: u32) -> f64;
}

impl fmt::Debug for dyn AbsorberModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbsorberModel({})", self.name())
    }
}

/// Joint electron/photon amplitudes evolved cycle by cycle; every loss is
/// sampled from the current amplitudes and projected out on survival.
#[derive(Debug, Clone, Copy, Default)]
pub struct Coherent;

impl AbsorberModel for Coherent {
    fn name(&self) -> &'static str {
        "coherent"
    }

    fn qz_trajectory(
        &self,
        absorber: &Absorber,
        photon: Polarization,
        n: u32,
        rng: &mut dyn RngCore,
    ) -> TrajectoryOutcome {
        let joint = Joint::new(absorber, ONE, ZERO);
        let evolved = coherent_qz(joint, n, &mut Sampled(&mut *rng));
        match evolved {
            Evolution::Lost(outcome) => outcome,
            Evolution::Survived(j) => qz_readout(j, photon, rng),
        }
    }

    fn cqz_trajectory(
        &self,
        absorber: &Absorber,
        photon: Polarization,
        m: u32,
        n: u32,
        rng: &mut dyn RngCore,
    ) -> TrajectoryOutcome {
        let joint = Joint::new(absorber, ONE, ZERO);
        match coherent_cqz(joint, m, n, &mut Sampled(rng)) {
            Evolution::Lost(outcome) => outcome,
            Evolution::Survived(j) => TrajectoryOutcome {
                kind: OutcomeKind::Success,
                stage: "cqz-exit",
                cycle_index: 0,
                final_state: Some(j.to_state(photon).normalized().expect("survivor has weight")),
                photon_entered_channel: false,
            },
        }
    }

    fn qz_success_probability(&self, absorber: &Absorber, n: u32) -> f64 {
        match coherent_qz(Joint::new(absorber, ONE, ZERO), n, &mut Exact) {
            Evolution::Survived(j) => j.0[PRESENT][NATIVE].norm_sqr() + j.0[ABSENT][NATIVE].norm_sqr(),
            Evolution::Lost(_) => unreachable!("exact evolution never samples a loss"),
        }
    }

    fn cqz_success_probability(&self, absorber: &Absorber, m: u32, n: u32) -> f64 {
        match coherent_cqz(Joint::new(absorber, ONE, ZERO), m, n, &mut Exact) {
            Evolution::Survived(j) => j.norm_sqr(),
            Evolution::Lost(_) => unreachable!("exact evolution never samples a loss"),
        }
    }
}

/// Branch weights stay fixed; each cycle fires a loss with the per-cycle
/// probability of the ideal branch trajectory, weighted by the branch that
/// can cause it. This is the model behind the closed-form probabilities.
#[derive(Debug, Clone, Copy, Default)]
pub struct PerCycleBorn;

impl AbsorberModel for PerCycleBorn {
    fn name(&self) -> &'static str {
        "per-cycle-born"
    }

    fn qz_trajectory(
        &self,
        absorber: &Absorber,
        photon: Polarization,
        n: u32,
        rng: &mut dyn RngCore,
    ) -> TrajectoryOutcome {
        let weight = absorber.presence_weight();
        let loss = weight * (PI / (2.0 * f64::from(n))).sin().powi(2);
        for cycle in 1..=n {
            if rng.gen::<f64>() < loss {
                return TrajectoryOutcome::lost(OutcomeKind::AbsorbedByElectron, "qz", cycle);
            }
        }
        let present = rng.gen::<f64>() < weight;
        if present {
            TrajectoryOutcome {
                kind: OutcomeKind::Success,
                stage: "qz-readout",
                cycle_index: 0,
                final_state: Some(ideal_qz_output(photon)),
                photon_entered_channel: false,
            }
        } else {
            TrajectoryOutcome {
                kind: OutcomeKind::DiscardedAtDetector,
                stage: "qz-readout",
                cycle_index: 0,
                final_state: Some(Joint([[ZERO, ONE], [ZERO, ZERO]]).to_state(photon)),
                photon_entered_channel: true,
            }
        }
    }

    fn cqz_trajectory(
        &self,
        absorber: &Absorber,
        photon: Polarization,
        m: u32,
        n: u32,
        rng: &mut dyn RngCore,
    ) -> TrajectoryOutcome {
        let present = absorber.presence_weight();
        let absent = absorber.absence.norm_sqr();
        let theta_m = PI / (2.0 * f64::from(m));
        let sin2_n = (PI / (2.0 * f64::from(n))).sin().powi(2);
        let detector_loss = absent * theta_m.sin().powi(2);
        for outer in 1..=m {
            if rng.gen::<f64>() < detector_loss {
                return TrajectoryOutcome::lost(OutcomeKind::DiscardedAtDetector, "cqz-outer", outer);
            }
            let inner_loss = present * (f64::from(outer) * theta_m).sin().powi(2) * sin2_n;
            for _ in 0..n {
                if rng.gen::<f64>() < inner_loss {
                    return TrajectoryOutcome::lost(OutcomeKind::AbsorbedByElectron, "cqz-inner", outer);
                }
            }
        }
        TrajectoryOutcome {
            kind: OutcomeKind::Success,
            stage: "cqz-exit",
            cycle_index: 0,
            final_state: Some(ideal_cqz_output(absorber, photon)),
            photon_entered_channel: false,
        }
    }

    fn qz_success_probability(&self, absorber: &Absorber, n: u32) -> f64 {
        analytic::cepi_success(n, absorber.presence_weight().clamp(0.0, 1.0)).expect("validated arguments")
    }

    fn cqz_success_probability(&self, absorber: &Absorber, m: u32, n: u32) -> f64 {
        let present = absorber.presence_weight();
        let absent = absorber.absence.norm_sqr();
        let theta_m = PI / (2.0 * f64::from(m));
        let sin2_n = (PI / (2.0 * f64::from(n))).sin().powi(2);
        let mut p = (1.0 - absent * theta_m.sin().powi(2)).powf(f64::from(m));
        for i in 1..=m {
            p *= (1.0 - present * (f64::from(i) * theta_m).sin().powi(2) * sin2_n).powf(f64::from(n));
        }
        p
    }
}

/// Absorber models addressable by name.
#[derive(Clone)]
pub struct ModelRegistry {
    models: BTreeMap<&'static str, Arc<dyn AbsorberModel>>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self {
            models: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, model: Arc<dyn AbsorberModel>) {
        self.models.insert(model.name(), model);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn AbsorberModel>> {
        self.models
            .get(name)
            .cloned()
            .ok_or_else(|| ZenoError::UnknownModel(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.models.keys().copied()
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(Coherent));
        registry.register(Arc::new(PerCycleBorn));
        registry
    }
}

impl fmt::Debug for ModelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.models.keys()).finish()
    }
}

/// One single-loop gate trajectory under `model`.
pub fn simulate_qz(
    absorber: &Absorber,
    photon: Polarization,
    n: u32,
    model: &dyn AbsorberModel,
    rng: &mut dyn RngCore,
) -> Result<TrajectoryOutcome> {
    analytic::CycleConfig::new(1, n, 1)?;
    Absorber::new(absorber.presence, absorber.absence)?;
    Ok(model.qz_trajectory(absorber, photon, n, rng))
}

/// One nested gate trajectory under `model`.
pub fn simulate_cqz(
    absorber: &Absorber,
    photon: Polarization,
    m: u32,
    n: u32,
    model: &dyn AbsorberModel,
    rng: &mut dyn RngCore,
) -> Result<TrajectoryOutcome> {
    analytic::CycleConfig::new(m, n, 1)?;
    Absorber::new(absorber.presence, absorber.absence)?;
    Ok(model.cqz_trajectory(absorber, photon, m, n, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::fidelity;
    use crate::rng::stream;

    fn basis(ao: usize, pol: Polarization) -> StateVector {
        StateVector::basis(&[2, 2], &[ao, pol.index()]).unwrap()
    }

    #[test]
    fn registry_lookup() {
        let registry = ModelRegistry::default();
        assert_eq!(
            registry.names().collect::<Vec<_>>(),
            ["coherent", "per-cycle-born"]
        );
        assert_eq!(registry.get("coherent").unwrap().name(), "coherent");
        assert!(matches!(registry.get("nope"), Err(ZenoError::UnknownModel(_))));
    }

    #[test]
    fn absorber_validation() {
        assert!(Absorber::new(ONE, ONE).is_err());
        assert!(Absorber::new(ZERO, ONE).is_ok());
    }

    #[test]
    fn absent_absorber_flips_polarization_every_time() {
        for model in [&Coherent as &dyn AbsorberModel, &PerCycleBorn] {
            let mut r = stream(3, 0);
            for _ in 0..200 {
                let out = simulate_qz(&Absorber::absent(), Polarization::H, 17, model, &mut r).unwrap();
                assert_eq!(out.kind, OutcomeKind::DiscardedAtDetector);
                assert!(out.photon_entered_channel);
                let state = out.final_state.unwrap();
                assert!(fidelity(&state, &basis(0, Polarization::V)).unwrap() > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn present_absorber_keeps_polarization() {
        let mut r = stream(4, 0);
        for model in [&Coherent as &dyn AbsorberModel, &PerCycleBorn] {
            let mut successes = 0;
            for _ in 0..2000 {
                let out = simulate_qz(&Absorber::present(), Polarization::V, 30, model, &mut r).unwrap();
                if out.kind == OutcomeKind::Success {
                    successes += 1;
                    assert!(!out.photon_entered_channel);
                    let state = out.final_state.unwrap();
                    assert!(fidelity(&state, &basis(1, Polarization::V)).unwrap() > 1.0 - 1e-12);
                } else {
                    assert_eq!(out.kind, OutcomeKind::AbsorbedByElectron);
                }
            }
            let expected = analytic::qz_survival(30).unwrap();
            assert!((f64::from(successes) / 2000.0 - expected).abs() < 0.03);
        }
    }

    #[test]
    fn exact_probabilities_for_pure_absorbers() {
        for n in [1u32, 2, 9, 40] {
            let q = analytic::qz_survival(n).unwrap();
            assert!((Coherent.qz_success_probability(&Absorber::present(), n) - q).abs() < 1e-12);
            assert!((PerCycleBorn.qz_success_probability(&Absorber::present(), n) - q).abs() < 1e-12);
            assert!(Coherent.qz_success_probability(&Absorber::absent(), n) < 1e-12);
        }
        for (m, n) in [(1u32, 1u32), (2, 2), (5, 9), (12, 30)] {
            let l0 = analytic::cqz_lambda0(m).unwrap();
            let l1 = analytic::cqz_lambda1(m, n).unwrap();
            assert!((PerCycleBorn.cqz_success_probability(&Absorber::absent(), m, n) - l0).abs() < 1e-12);
            assert!((PerCycleBorn.cqz_success_probability(&Absorber::present(), m, n) - l1).abs() < 1e-12);
            assert!((Coherent.cqz_success_probability(&Absorber::absent(), m, n) - l0).abs() < 1e-12);
        }
    }

    #[test]
    fn per_cycle_born_qz_is_cepi_form() {
        let a = Absorber::balanced();
        assert!((PerCycleBorn.qz_success_probability(&a, 2) - 0.28125).abs() < 1e-15);
        // Coherent weighting: |presence|² cos^{2N}θ_N.
        let coherent = Coherent.qz_success_probability(&a, 2);
        assert!((coherent - 0.5 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn models_converge_with_many_cycles() {
        let a = Absorber::balanced();
        let gap =
            |n| (Coherent.qz_success_probability(&a, n) - PerCycleBorn.qz_success_probability(&a, n)).abs();
        assert!(gap(200) < gap(10));
        assert!(gap(200) < 0.01);
    }

    #[test]
    fn nested_gate_never_succeeds_with_single_cycles_and_present_absorber() {
        let mut r = stream(5, 0);
        for model in [&Coherent as &dyn AbsorberModel, &PerCycleBorn] {
            for _ in 0..500 {
                let out = simulate_cqz(&Absorber::present(), Polarization::H, 1, 1, model, &mut r).unwrap();
                assert_ne!(out.kind, OutcomeKind::Success);
            }
        }
    }

    #[test]
    fn nested_gate_outputs() {
        let mut r = stream(6, 0);
        let out = simulate_cqz(&Absorber::absent(), Polarization::H, 25, 25, &Coherent, &mut r).unwrap();
        if out.kind == OutcomeKind::Success {
            let state = out.final_state.unwrap();
            assert!(fidelity(&state, &basis(0, Polarization::H)).unwrap() > 1.0 - 1e-12);
        }
        let ideal = ideal_cqz_output(&Absorber::present(), Polarization::H);
        assert_eq!(ideal, basis(1, Polarization::V));
        // Large N: the coherent survivor of a present absorber is close to the flip.
        let survivor = coherent_cqz_survivor(
            &Absorber::present(),
            Polarization::H,
            RelativeInput::NATIVE,
            20,
            4000,
        )
        .unwrap()
        .normalized()
        .unwrap();
        assert!(fidelity(&survivor, &ideal).unwrap() > 0.999);
    }

    #[test]
    fn blocked_branch_sign_for_other_input() {
        // H-gate fed V with a present absorber ends in -|H>.
        let survivor = coherent_cqz_survivor(
            &Absorber::present(),
            Polarization::H,
            RelativeInput::OTHER,
            20,
            40_000,
        )
        .unwrap()
        .normalized()
        .unwrap();
        let amp = survivor.amp(&[1, Polarization::H.index()]).unwrap();
        assert!((amp + ONE).norm() < 1e-2, "{amp}");
        // Absent absorber: all but the sin θ_M share rotated back in the
        // first outer cycle is caught at the detector.
        let absent =
            coherent_cqz_survivor(&Absorber::absent(), Polarization::H, RelativeInput::OTHER, 10, 10)
                .unwrap();
        assert!(absent.norm_sqr() <= (PI / 20.0).sin().powi(2) + 1e-15);
    }

    #[test]
    fn trajectories_are_reproducible() {
        let a = Absorber::balanced();
        for model in [&Coherent as &dyn AbsorberModel, &PerCycleBorn] {
            let run = |seed| {
                let mut r = stream(seed, 11);
                (0..50)
                    .map(|_| simulate_cqz(&a, Polarization::V, 6, 7, model, &mut r).unwrap())
                    .collect::<Vec<_>>()
            };
            assert_eq!(run(1), run(1));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut r = stream(0, 0);
        assert!(simulate_qz(&Absorber::present(), Polarization::H, 0, &Coherent, &mut r).is_err());
        let bad = Absorber {
            presence: ONE,
            absence: ONE,
        };
        assert!(simulate_cqz(&bad, Polarization::H, 2, 2, &PerCycleBorn, &mut r).is_err());
    }
}
