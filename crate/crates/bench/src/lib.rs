//! Shared fixtures for the criterion benchmarks of the fusion controller and
//! the metrics.

use std::sync::Arc;

use cocolot_core::experiment::{run_experiment, ExperimentConfig, SequenceRun, Variant};
use cocolot_core::sim::{generate_world, suite, ScriptedTracker, ScriptedVerifier, World};
use cocolot_core::{Controller, ControllerConfig};

/// First sequence of the `complementary` suite with its tracker profiles.
pub fn world() -> (Arc<World>, cocolot_core::sim::Suite) {
    let s = suite("complementary").expect("preset suite");
    let world = Arc::new(generate_world(&s.specs[0]).expect("preset spec"));
    (world, s)
}

/// A full controller on `world`, not yet initialized.
pub fn controller(world: &Arc<World>, s: &cocolot_core::sim::Suite) -> Controller {
    let t1 = ScriptedTracker::new(s.tracker1.clone(), Arc::clone(world), 7, "tracker1").expect("profile");
    let t2 = ScriptedTracker::new(s.tracker2.clone(), Arc::clone(world), 7, "tracker2").expect("profile");
    let v = ScriptedVerifier::new(s.verifier, Arc::clone(world), 7, "verifier").expect("profile");
    Controller::new(ControllerConfig::default(), Box::new(t1), Box::new(t2), Box::new(v)).expect("default config")
}

/// Fused runs on the first `n` sequences, for metric benchmarks.
pub fn fused_runs(n: usize) -> Vec<SequenceRun> {
    let mut cfg = ExperimentConfig::for_suite("complementary", Variant::Full);
    cfg.limit = Some(n);
    run_experiment(&cfg).expect("preset experiment").runs
}
