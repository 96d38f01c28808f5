//! The counterfactual optical layer: closed-form gate and stage
//! probabilities, absorber trajectory models and Monte Carlo campaigns.

pub mod analytic;
pub mod models;
pub mod montecarlo;

pub use analytic::{
    cepi_success, cqz_lambda0, cqz_lambda1, dcepi_success, dcfo_success, ddcfo_success, qz_survival,
    stage_probabilities_bell, stage_probabilities_general, CycleConfig, FlipSuccess, StageFactor,
    StageProbabilities, ZenoError,
};
pub use models::{
    simulate_cqz, simulate_qz, Absorber, AbsorberModel, Coherent, ModelRegistry, OutcomeKind, PerCycleBorn,
    Polarization, TrajectoryOutcome,
};
pub use montecarlo::{simulate_cct, simulate_gate, CctError, CctInput, GateExperiment, MonteCarloReport};
