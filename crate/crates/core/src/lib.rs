//! Recovery of kinematically coherent 2D skeletons from noisy multi-modal
//! joint proposals over video, and fitting of an articulated capsule
//! quadruped to silhouette sequences.
//!
//! The pipeline has four stages:
//! 1. [`synth`] generates ground-truth sequences: random cameras, animated
//!    poses, rendered silhouettes, multimodal heatmaps, and corrupted joint
//!    proposals emulating a 2D joint detector's failure modes.
//! 2. [`imageops`] supplies silhouette geometry: exact Euclidean distance
//!    transform, medial axis sample points, dilation, and heatmap
//!    non-maximum suppression.
//! 3. [`oja`] selects one proposal (or null) per joint per frame by
//!    minimizing a prior + confidence + temporal + coverage energy, with a
//!    quadratic-program local solver, a genetic algorithm, and a brute-force
//!    oracle.
//! 4. [`fitter`] fits the capsule quadruped's position, pose, and shape to
//!    silhouettes plus selected joints with a staged dogleg trust-region
//!    optimizer.
//!
//! [`eval`] scores results (PCK, 3D joint error) and renders comparison
//! tables; [`io`] defines the on-disk dataset formats.

pub mod camera;
pub mod error;
pub mod eval;
pub mod fitter;
pub mod imageops;
pub mod io;
pub mod model;
pub mod oja;
pub mod rng;
pub mod schema;
pub mod synth;

pub use camera::{project_joints, Camera, CameraModel, CameraPose};
pub use error::{Error, Result};
pub use model::{forward_kinematics, PoseParams, PositionParams, ProxyQuadruped};
pub use schema::{validate_schema, SkeletonSchema, JOINT_COUNT};
