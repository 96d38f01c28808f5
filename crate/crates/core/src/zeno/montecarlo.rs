//! Seeded Monte Carlo campaigns over gate trajectories and protocol runs.
//!
//! Trial `i` draws from `rng::stream(seed, i)`. Trials run in parallel and
//! are reduced in index order, so reports do not depend on thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::analytic::{
    stage_probabilities_bell, stage_probabilities_general, CycleConfig, Result, StageFactor, ZenoError,
};
use super::models::{
    ideal_cqz_output, ideal_qz_output, simulate_cqz, simulate_qz, Absorber, AbsorberModel, OutcomeKind,
    Polarization,
};
use crate::hilbert::fidelity;
use crate::protocol::{self, BellInput, GeneralInput, ProtocolError};
use crate::rng::{compensated_sum, stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum GateExperiment {
    Qz {
        #[serde(rename = "N")]
        n: u32,
    },
    Cqz {
        #[serde(rename = "M")]
        m: u32,
        #[serde(rename = "N")]
        n: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CctInput {
    General(GeneralInput),
    Bell(BellInput),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub successes: u64,
    pub absorbed: u64,
    pub discarded: u64,
    pub abort_rate_estimate: f64,
    pub standard_error: f64,
    /// Mean fidelity of successful outputs to the ideal output.
    pub conditional_fidelity: Option<f64>,
    pub seed: u64,
    /// Abort rate the sampled model predicts exactly.
    pub expected_abort_rate: f64,
    /// Successful trials whose photon crossed the channel; zero by design.
    pub counterfactual_violations: u64,
    /// Ancilla outcome counts `[m = 0, m = 1]`, general protocol only.
    pub outcome_counts: Option<[u64; 2]>,
}

impl MonteCarloReport {
    /// Signed distance of the estimate from the prediction in standard
    /// errors, using the predicted binomial spread.
    pub fn z_score(&self) -> f64 {
        let p = self.expected_abort_rate;
        let sigma = (p * (1.0 - p) / self.trials as f64).sqrt();
        let diff = self.abort_rate_estimate - p;
        if sigma > 0.0 {
            diff / sigma
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct TrialResult {
    kind: OutcomeKind,
    entered_channel: bool,
    fidelity: Option<f64>,
    outcome: Option<u8>,
}

fn aggregate(
    results: &[TrialResult],
    seed: u64,
    expected_abort_rate: f64,
    with_outcomes: bool,
) -> MonteCarloReport {
    let trials = results.len() as u64;
    let count = |kind| results.iter().filter(|r| r.kind == kind).count() as u64;
    let successes = count(OutcomeKind::Success);
    let absorbed = count(OutcomeKind::AbsorbedByElectron);
    let discarded = count(OutcomeKind::DiscardedAtDetector);
    let abort = 1.0 - successes as f64 / trials as f64;
    let fidelities: Vec<f64> = results
        .iter()
        .filter(|r| r.kind == OutcomeKind::Success)
        .filter_map(|r| r.fidelity)
        .collect();
    let conditional_fidelity = (!fidelities.is_empty())
        .then(|| compensated_sum(fidelities.iter().copied()) / fidelities.len() as f64);
    let outcome_counts = with_outcomes.then(|| {
        let ones = results.iter().filter(|r| r.outcome == Some(1)).count() as u64;
        let zeros = results.iter().filter(|r| r.outcome == Some(0)).count() as u64;
        [zeros, ones]
    });
    MonteCarloReport {
        trials,
        successes,
        absorbed,
        discarded,
        abort_rate_estimate: abort,
        standard_error: (abort * (1.0 - abort) / trials as f64).sqrt(),
        conditional_fidelity,
        seed,
        expected_abort_rate,
        counterfactual_violations: results
            .iter()
            .filter(|r| r.kind == OutcomeKind::Success && r.entered_channel)
            .count() as u64,
        outcome_counts,
    }
}

/// Repeats one gate experiment `trials` times under `model`.
pub fn simulate_gate(
    experiment: GateExperiment,
    absorber: &Absorber,
    photon: Polarization,
    model: &dyn AbsorberModel,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(ZenoError::NoTrials);
    }
    let (ideal, success_probability) = match experiment {
        GateExperiment::Qz { n } => (ideal_qz_output(photon), model.qz_success_probability(absorber, n)),
        GateExperiment::Cqz { m, n } => (
            ideal_cqz_output(absorber, photon),
            model.cqz_success_probability(absorber, m, n),
        ),
    };
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let outcome = match experiment {
                GateExperiment::Qz { n } => simulate_qz(absorber, photon, n, model, &mut rng)?,
                GateExperiment::Cqz { m, n } => simulate_cqz(absorber, photon, m, n, model, &mut rng)?,
            };
            let fidelity = match (&outcome.kind, &outcome.final_state) {
                (OutcomeKind::Success, Some(state)) => Some(fidelity(state, &ideal).expect("same dims")),
                _ => None,
            };
            Ok(TrialResult {
                kind: outcome.kind,
                entered_channel: outcome.photon_entered_channel,
                fidelity,
                outcome: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&results, seed, 1.0 - success_probability, false))
}

/// Walks the counterfactual stages in order; the first failed draw aborts.
fn sample_stages<R: Rng>(stages: &[StageFactor], outcome: u8, rng: &mut R) -> OutcomeKind {
    for stage in stages {
        if stage.only_for_outcome_one && outcome == 0 {
            continue;
        }
        if rng.gen::<f64>() >= stage.detector {
            return OutcomeKind::DiscardedAtDetector;
        }
        if rng.gen::<f64>() >= stage.absorption {
            return OutcomeKind::AbsorbedByElectron;
        }
    }
    OutcomeKind::Success
}

#[derive(Debug, thiserror::Error)]
pub enum CctError {
    #[error(transparent)]
    Zeno(#[from] ZenoError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

struct Branch {
    weight: f64,
    fidelity: f64,
}

/// Stage-composed protocol campaign: each trial draws the ancilla outcome
/// from its exact Born weight, then clears every counterfactual stage with
/// that stage's closed-form survival probability. Successful trials carry
/// the exactly simulated logical output.
pub fn simulate_cct(
    cfg: &CycleConfig,
    input: &CctInput,
    trials: u64,
    seed: u64,
) -> std::result::Result<MonteCarloReport, CctError> {
    if trials == 0 {
        return Err(ZenoError::NoTrials.into());
    }
    let (probabilities, branches) = match input {
        CctInput::General(g) => {
            let probabilities = stage_probabilities_general(cfg, g)?;
            let weights = protocol::measurement_weights(g)?;
            let mut branches = Vec::with_capacity(2);
            for m in 0..2u8 {
                let t = protocol::run_general_postselected(g, m)?;
                let expected = protocol::expected_output_general(g, m)?;
                branches.push(Branch {
                    weight: weights[usize::from(m)],
                    fidelity: fidelity(&t.output, &expected).map_err(ProtocolError::from)?,
                });
            }
            (probabilities, branches)
        }
        CctInput::Bell(b) => {
            let probabilities = stage_probabilities_bell(cfg, b)?;
            let t = protocol::run_bell(b)?;
            let expected = protocol::expected_output_bell(b)?;
            let branch = Branch {
                weight: 1.0,
                fidelity: fidelity(&t.output, &expected).map_err(ProtocolError::from)?,
            };
            (probabilities, vec![branch])
        }
    };
    let expected_abort_rate = match (probabilities.zeta_m, probabilities.zeta) {
        (Some(z), _) => branches[0].weight * z[0] + branches[1].weight * z[1],
        (None, Some(z)) => z,
        (None, None) => unreachable!("stage probabilities always carry an abort rate"),
    };
    let general = matches!(input, CctInput::General(_));
    let stages = &probabilities.stages;
    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let m = if general {
                u8::from(rng.gen::<f64>() >= branches[0].weight)
            } else {
                0
            };
            let kind = sample_stages(stages, m, &mut rng);
            TrialResult {
                kind,
                entered_channel: kind != OutcomeKind::Success,
                fidelity: (kind == OutcomeKind::Success).then(|| branches[usize::from(m)].fidelity),
                outcome: general.then_some(m),
            }
        })
        .collect();
    Ok(aggregate(&results, seed, expected_abort_rate, general))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::EulerAngles;
    use crate::hilbert::{C64, ONE, ZERO};
    use crate::protocol::{BellClass, Sign};
    use crate::zeno::analytic;
    use crate::zeno::models::{Coherent, PerCycleBorn};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn balanced() -> GeneralInput {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        GeneralInput::new(h, h, h, h, EulerAngles::new(0.0, PI / 2.0, 0.0)).unwrap()
    }

    #[test]
    fn counts_partition_trials() {
        let r = simulate_gate(
            GateExperiment::Cqz { m: 4, n: 5 },
            &Absorber::balanced(),
            Polarization::H,
            &Coherent,
            3000,
            17,
        )
        .unwrap();
        assert_eq!(r.successes + r.absorbed + r.discarded, r.trials);
        assert_eq!(r.abort_rate_estimate, 1.0 - r.successes as f64 / 3000.0);
        assert_eq!(r.counterfactual_violations, 0);
    }

    #[test]
    fn zero_trials_rejected() {
        let err = simulate_gate(
            GateExperiment::Qz { n: 3 },
            &Absorber::present(),
            Polarization::H,
            &PerCycleBorn,
            0,
            1,
        );
        assert!(matches!(err, Err(ZenoError::NoTrials)));
        let cfg = CycleConfig::uniform(3).unwrap();
        assert!(simulate_cct(&cfg, &CctInput::General(balanced()), 0, 1).is_err());
    }

    #[test]
    fn per_cycle_born_cepi_frequency() {
        let r = simulate_gate(
            GateExperiment::Qz { n: 2 },
            &Absorber::balanced(),
            Polarization::H,
            &PerCycleBorn,
            20_000,
            5,
        )
        .unwrap();
        assert!((r.expected_abort_rate - (1.0 - 0.28125)).abs() < 1e-15);
        assert!(r.z_score().abs() < 4.0, "{r:?}");
    }

    #[test]
    fn general_campaign_tracks_mean_zeta() {
        let cfg = CycleConfig::uniform(10).unwrap();
        let r = simulate_cct(&cfg, &CctInput::General(balanced()), 20_000, 3).unwrap();
        let p = analytic::stage_probabilities_general(&cfg, &balanced()).unwrap();
        assert!((r.expected_abort_rate - p.mean_abort_rate().unwrap()).abs() < 1e-12);
        assert!(r.z_score().abs() < 4.0, "{r:?}");
        assert!((r.conditional_fidelity.unwrap() - 1.0).abs() < 1e-10);
        let [z, o] = r.outcome_counts.unwrap();
        assert_eq!(z + o, r.trials);
    }

    #[test]
    fn bell_without_weight_never_aborts() {
        let inp = BellInput::new(
            BellClass::One,
            Sign::Plus,
            ZERO,
            ONE,
            EulerAngles::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        let cfg = CycleConfig::uniform(4).unwrap();
        let r = simulate_cct(&cfg, &CctInput::Bell(inp), 5000, 8).unwrap();
        assert_eq!(r.successes, 5000);
        assert_eq!(r.expected_abort_rate, 0.0);
        assert_eq!(r.z_score(), 0.0);
        assert!(r.outcome_counts.is_none());
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = CycleConfig::uniform(6).unwrap();
        let a = simulate_cct(&cfg, &CctInput::General(balanced()), 4000, 99).unwrap();
        let b = simulate_cct(&cfg, &CctInput::General(balanced()), 4000, 99).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = simulate_cct(&cfg, &CctInput::General(balanced()), 4000, 100).unwrap();
        assert_ne!(a, c);
    }
}
