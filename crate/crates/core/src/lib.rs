//! Simulation toolkit for counterfactual controlled-unitary protocols.

pub mod cli;
pub mod gates;
pub mod hilbert;
pub mod protocol;
pub mod rng;
pub mod verify;
pub mod zeno;
