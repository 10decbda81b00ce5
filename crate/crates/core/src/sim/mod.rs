//! Deterministic simulation: synthetic sequences, scripted trackers with
//! complementary failure modes, and scripted verifiers.

mod rng;
mod suite;
mod tracker;
mod verifier;
mod world;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use rng::{derive_seed, stream_id, SimRng};
pub use suite::{suite, Suite, SUITE_NAMES, SUITE_VERSION};
pub use tracker::{
    Calibration, EventLog, LockState, LossReason, RelockCause, ScriptedTracker, ScriptedTrackerProfile,
    SimEvent, SimEventKind, SizeFailureProfile,
};
pub use verifier::{ScoreSmoothing, ScriptedVerifier, ScriptedVerifierProfile};
pub use world::{
    generate_sequence, generate_world, Distractor, DistractorSpec, Interval, MotionModel,
    SequenceSpec, World, WorldFrame,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
