//! Fixed suites of simulated sequences together with the tracker and
//! verifier profiles they are meant to be run with.

use super::rng::{derive_seed, SimRng};
use super::tracker::{Calibration, ScriptedTrackerProfile};
use super::verifier::ScriptedVerifierProfile;
use super::world::{DistractorSpec, Interval, MotionModel, SequenceSpec};
use super::SimError;

pub const SUITE_NAMES: [&str; 3] = ["complementary", "overconfidence", "no-absence"];

/// Bumped whenever a preset changes, so stored results can be matched to the
/// suite that produced them.
pub const SUITE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub name: String,
    pub specs: Vec<SequenceSpec>,
    pub tracker1: ScriptedTrackerProfile,
    pub tracker2: ScriptedTrackerProfile,
    pub verifier: ScriptedVerifierProfile,
}

struct Shape {
    count: usize,
    length: (usize, usize),
    disappearances: (usize, usize),
    absence_len: (usize, usize),
    distractors: (usize, usize),
}

pub fn suite(name: &str) -> Result<Suite, SimError> {
    let (shape, tracker1) = match name {
        "complementary" => (
            Shape {
                count: 50,
                length: (2000, 3000),
                disappearances: (8, 12),
                absence_len: (30, 75),
                distractors: (6, 10),
            },
            ScriptedTrackerProfile::accurate_overconfident(),
        ),
        "overconfidence" => {
            let mut a = ScriptedTrackerProfile::accurate_overconfident();
            a.calibration = Calibration::Overconfident { bias: 0.45 };
            (
                Shape {
                    count: 30,
                    length: (2000, 3000),
                    disappearances: (8, 12),
                    absence_len: (30, 75),
                    distractors: (10, 14),
                },
                a,
            )
        }
        "no-absence" => (
            Shape {
                count: 20,
                length: (1000, 1500),
                disappearances: (0, 0),
                absence_len: (0, 0),
                distractors: (2, 4),
            },
            ScriptedTrackerProfile::accurate_overconfident(),
        ),
        other => return Err(SimError::UnknownSuite(other.to_string())),
    };
    Ok(Suite {
        name: name.to_string(),
        specs: build_specs(name, &shape),
        tracker1,
        tracker2: ScriptedTrackerProfile::coarse_calibrated(),
        verifier: ScriptedVerifierProfile::default(),
    })
}

fn build_specs(name: &str, shape: &Shape) -> Vec<SequenceSpec> {
    let root = derive_seed(u64::from(SUITE_VERSION), name);
    (0..shape.count)
        .map(|i| {
            let seed = derive_seed(root, &format!("seq{i}"));
            let mut rng = SimRng::new(seed, "spec");
            let length = rng.range(shape.length.0, shape.length.1);
            let base = rng.uniform(50.0, 110.0);
            let aspect = rng.uniform(0.6, 1.6);
            let base_size = (base * aspect.sqrt(), base / aspect.sqrt());

            // one absence per equal segment, placed away from the segment ends
            let n = rng.range(shape.disappearances.0, shape.disappearances.1);
            let mut disappearances = Vec::with_capacity(n);
            if n > 0 {
                let segment = (length - 1) / n;
                for k in 0..n {
                    let duration = rng.range(shape.absence_len.0, shape.absence_len.1);
                    let lo = 1 + k * segment + segment / 4;
                    let hi = (1 + (k + 1) * segment).saturating_sub(duration + 1).max(lo);
                    disappearances.push(Interval::new(rng.range(lo, hi), duration));
                }
            }

            let count = rng.range(shape.distractors.0, shape.distractors.1);
            SequenceSpec {
                name: format!("{name}-{i:02}"),
                length,
                frame_size: (1280.0, 720.0),
                motion: MotionModel::RandomWalk {
                    speed: rng.uniform(1.5, 4.0),
                    turn: 0.05,
                },
                base_size,
                scale_drift_rate: 0.002,
                disappearances,
                distractors: DistractorSpec {
                    count,
                    spawn_distance: base * rng.uniform(1.3, 1.7),
                    lifetime: rng.range(60, 150),
                },
                seed,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complementary_shape() {
        let s = suite("complementary").unwrap();
        assert_eq!(s.specs.len(), 50);
        for spec in &s.specs {
            spec.validate().unwrap();
            assert!((2000..=3000).contains(&spec.length));
            assert!((8..=12).contains(&spec.disappearances.len()));
        }
        let mean_len: f64 = s
            .specs
            .iter()
            .flat_map(|s| s.disappearances.iter())
            .map(|i| i.duration as f64)
            .sum::<f64>()
            / s.specs.iter().map(|s| s.disappearances.len()).sum::<usize>() as f64;
        assert!((mean_len - 52.0).abs() < 5.0, "mean absence {mean_len}");
    }

    #[test]
    fn presets_are_deterministic_and_valid() {
        for name in SUITE_NAMES {
            let a = suite(name).unwrap();
            assert_eq!(a, suite(name).unwrap());
            for spec in &a.specs {
                spec.validate().unwrap();
            }
        }
        assert!(suite("no-absence")
            .unwrap()
            .specs
            .iter()
            .all(|s| s.disappearances.is_empty()));
        assert!(matches!(suite("nope"), Err(SimError::UnknownSuite(_))));
    }
}
