//! Fusion of two complementary long-term trackers, with a deterministic
//! simulation world and long-term tracking metrics.

pub mod experiment;
pub mod formats;
pub mod fusion;
pub mod geometry;
pub mod metrics;
pub mod replay;
pub mod sequence;
pub mod sim;
pub mod tracker_api;

pub use fusion::{Controller, ControllerConfig, FusedOutput, FusionError, TrackerSlot};
pub use geometry::{aspect_ratio, center_distance, iou, BBox, GeometryError};
pub use metrics::{MetricCurves, PredictionTrace};
pub use sequence::SequenceGroundTruth;
pub use tracker_api::{FrameHandle, Tracker, TrackerError, TrackerOutput, Verifier};
