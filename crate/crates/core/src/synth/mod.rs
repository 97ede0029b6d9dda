//! Synthetic ground-truth generation: camera draws, pose and shape draws,
//! animated sequences, rendered silhouettes, multimodal heatmaps, and
//! corrupted proposal sets.

mod corrupt;
mod heatmap;
mod raster;
mod silhouette;

pub use corrupt::{corrupt_proposals, CorruptionConfig};
pub use heatmap::{encode_heatmaps, HeatmapStack};
pub use raster::{rasterize_silhouette, CamCapsule, CapsuleScene};
pub use silhouette::Silhouette;

use nalgebra::{UnitQuaternion, Vector2, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::camera::{Camera, CameraModel, CameraPose};
use crate::error::{Error, Result};
use crate::model::{forward_kinematics, PoseParams, PositionParams, ProxyQuadruped};
use crate::rng::derive;
use crate::schema::SkeletonSchema;

/// Shape draw of a model: bone lengths and capsule radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub lengths: Vec<f64>,
    pub radii: Vec<f64>,
}

impl ShapeParams {
    pub fn of(model: &ProxyQuadruped) -> Self {
        ShapeParams {
            lengths: model.bone_lengths.clone(),
            radii: model.capsule_radii.clone(),
        }
    }
}

/// Everything known about one synthetic frame.
#[derive(Debug, Clone)]
pub struct GroundTruthFrame {
    pub pose: PoseParams,
    pub shape: ShapeParams,
    pub position: PositionParams,
    pub camera: Camera,
    /// Projected joints, pixels.
    pub joints2d: Vec<Vector2<f64>>,
    /// Camera-frame joints, meters; `joints2d` is their projection.
    pub joints3d: Vec<Vector3<f64>>,
    pub silhouette: Silhouette,
    pub visibility: Vec<bool>,
}

impl GroundTruthFrame {
    pub fn sil_area(&self) -> f64 {
        self.silhouette.area() as f64
    }
}

/// A generated sequence: one animal shape, one camera, many frames.
#[derive(Debug, Clone)]
pub struct SequenceData {
    pub id: String,
    pub model: ProxyQuadruped,
    pub frames: Vec<GroundTruthFrame>,
}

/// Camera sampling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSampleConfig {
    pub distance_min: f64,
    pub distance_max: f64,
    pub elevation_min: f64,
    pub elevation_max: f64,
    /// Side length of the cube the look-at point is drawn from, meters.
    pub lookat_cube: f64,
    /// Std of the Gaussian perturbation of the up vector, radians.
    pub up_noise: f64,
    pub focal: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for CameraSampleConfig {
    fn default() -> Self {
        CameraSampleConfig {
            distance_min: 1.0,
            distance_max: 20.0,
            elevation_min: 0.0,
            elevation_max: std::f64::consts::FRAC_PI_2,
            lookat_cube: 1.0,
            up_noise: 0.1,
            focal: 281.6,
            width: 256,
            height: 256,
        }
    }
}

/// Draws a random camera around `center`: azimuth uniform in [0, 2pi),
/// elevation uniform in [elevation_min, elevation_max], distance uniform in
/// [distance_min, distance_max], look-at point uniform in a cube around the
/// center, up vector Gaussian-perturbed about the model Y axis.
pub fn sample_camera(rng: &mut impl Rng, cfg: &CameraSampleConfig, center: Vector3<f64>) -> Camera {
    let azimuth = rng.gen_range(0.0..std::f64::consts::TAU);
    let distance = rng.gen_range(cfg.distance_min..=cfg.distance_max);
    let elevation = rng.gen_range(cfg.elevation_min..=cfg.elevation_max);
    let half = cfg.lookat_cube / 2.0;
    let target = center
        + Vector3::new(
            rng.gen_range(-half..=half),
            rng.gen_range(-half..=half),
            rng.gen_range(-half..=half),
        );
    let eye = center
        + distance
            * Vector3::new(
                elevation.cos() * azimuth.cos(),
                elevation.sin(),
                elevation.cos() * azimuth.sin(),
            );
    let nx: f64 = rng.sample(StandardNormal);
    let nz: f64 = rng.sample(StandardNormal);
    let up = Vector3::new(cfg.up_noise * nx, 1.0, cfg.up_noise * nz).normalize();
    let pose = CameraPose::look_at(eye, target, up).expect("eye and target are distinct");
    Camera {
        model: CameraModel {
            focal: cfg.focal,
            cx: cfg.width as f64 / 2.0,
            cy: cfg.height as f64 / 2.0,
            width: cfg.width,
            height: cfg.height,
        },
        pose,
    }
}

/// Pose and shape sampling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoseShapeConfig {
    /// Pose angles: std of the truncated Gaussian as a fraction of each
    /// angle's half range.
    pub pose_sigma_frac: f64,
    /// Shape: std of log-normal multipliers on template lengths and radii.
    pub shape_sigma: f64,
}

impl Default for PoseShapeConfig {
    fn default() -> Self {
        PoseShapeConfig {
            pose_sigma_frac: 0.35,
            shape_sigma: 0.08,
        }
    }
}

/// Gaussian truncated to [lo, hi] by rejection, centered at zero.
fn truncated_normal(rng: &mut impl Rng, sigma: f64, lo: f64, hi: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    for _ in 0..64 {
        let z: f64 = rng.sample(StandardNormal);
        let v = sigma * z;
        if v >= lo && v <= hi {
            return v;
        }
    }
    0.0
}

/// Draws pose angles from a truncated Gaussian inside the limits and a
/// shape log-normally around the template.
pub fn sample_pose_shape(
    rng: &mut impl Rng,
    template: &ProxyQuadruped,
    cfg: &PoseShapeConfig,
) -> (PoseParams, ProxyQuadruped) {
    let mut pose = PoseParams::rest(&template.schema);
    for slot in 0..pose.angles.len() {
        for axis in 0..3 {
            let (lo, hi) = (pose.min[slot][axis], pose.max[slot][axis]);
            let sigma = cfg.pose_sigma_frac * (hi - lo) / 2.0;
            pose.angles[slot][axis] = truncated_normal(rng, sigma, lo, hi);
        }
    }
    let mut model = template.clone();
    for len in &mut model.bone_lengths {
        let z: f64 = rng.sample(StandardNormal);
        *len *= (cfg.shape_sigma * z).exp();
    }
    for rad in &mut model.capsule_radii {
        let z: f64 = rng.sample(StandardNormal);
        *rad *= (cfg.shape_sigma * z).exp();
    }
    (pose, model)
}

/// Animation law: Ornstein-Uhlenbeck walk in pose space plus forward root
/// translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnimationConfig {
    /// Per-step angle noise, radians.
    pub step_sigma: f64,
    /// Mean-reversion rate toward the initial pose, per frame.
    pub reversion: f64,
    /// Forward walk speed, meters per frame.
    pub walk_speed: f64,
    /// Yaw wander noise per frame, radians.
    pub yaw_sigma: f64,
    /// Upper bound on any joint's 3D displacement between consecutive
    /// frames, meters.
    pub max_joint_step: f64,
}

impl Default for AnimationConfig {
    fn default() -> Self {
        AnimationConfig {
            step_sigma: 0.045,
            reversion: 0.12,
            walk_speed: 0.03,
            yaw_sigma: 0.02,
            max_joint_step: 0.12,
        }
    }
}

/// Generates a smooth random walk of (pose, position) pairs of length
/// `frames`, starting at `initial`. Consecutive-frame 3D joint displacement
/// is bounded by `cfg.max_joint_step`.
pub fn animate_sequence(
    rng: &mut impl Rng,
    model: &ProxyQuadruped,
    initial: (PoseParams, PositionParams),
    cfg: &AnimationConfig,
    frames: usize,
) -> Result<Vec<(PoseParams, PositionParams)>> {
    if frames < 1 {
        return Err(Error::InvalidArgument(
            "frame count must be at least 1".into(),
        ));
    }
    let base_pose = initial.0.clone();
    let mut out = Vec::with_capacity(frames);
    out.push(initial);

    for _ in 1..frames {
        let (prev_pose, prev_position) = out.last().unwrap();
        let prev_joints = forward_kinematics(model, prev_pose, prev_position)?;

        // propose a step, then halve the delta until the joint bound holds
        let mut pose_delta: Vec<[f64; 3]> = Vec::with_capacity(prev_pose.angles.len());
        for slot in 0..prev_pose.angles.len() {
            let mut d = [0.0; 3];
            for (axis, dv) in d.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                *dv = cfg.reversion
                    * (base_pose.angles[slot][axis] - prev_pose.angles[slot][axis])
                    + cfg.step_sigma * z;
            }
            pose_delta.push(d);
        }
        let yaw_z: f64 = rng.sample(StandardNormal);
        let yaw_step = cfg.yaw_sigma * yaw_z;
        let prev_rot = prev_position.rotation()?;
        let forward = prev_rot * Vector3::x();
        let trans_delta = forward * cfg.walk_speed;

        let mut scale = 1.0f64;
        let stepped = loop {
            let mut pose = prev_pose.clone();
            for (slot, d) in pose_delta.iter().enumerate() {
                for axis in 0..3 {
                    pose.angles[slot][axis] = (pose.angles[slot][axis] + scale * d[axis])
                        .clamp(pose.min[slot][axis], pose.max[slot][axis]);
                }
            }
            let rot = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), scale * yaw_step)
                * prev_rot;
            let position =
                PositionParams::new(prev_position.translation_vec() + trans_delta * scale, rot);
            let joints = forward_kinematics(model, &pose, &position)?;
            let max_step = joints
                .iter()
                .zip(&prev_joints)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if max_step <= cfg.max_joint_step || scale < 1e-3 {
                break (pose, position);
            }
            scale *= 0.5;
        };
        out.push(stepped);
    }
    Ok(out)
}

/// Renders the ground truth for one (pose, position) under one camera.
pub fn render_ground_truth(
    camera: &Camera,
    model: &ProxyQuadruped,
    pose: &PoseParams,
    position: &PositionParams,
) -> Result<GroundTruthFrame> {
    let scene = CapsuleScene::build(camera, model, pose, position)?;
    let silhouette = scene.rasterize()?;
    let joints3d = scene.joints_cam.clone();
    let joints2d = crate::camera::project_joints(&camera.model, &joints3d)?;
    let visibility = scene.joint_visibility(&model.schema.bones, &silhouette);
    Ok(GroundTruthFrame {
        pose: pose.clone(),
        shape: ShapeParams::of(model),
        position: position.clone(),
        camera: camera.clone(),
        joints2d,
        joints3d,
        silhouette,
        visibility,
    })
}

/// Full synthesis configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub camera: CameraSampleConfig,
    pub pose_shape: PoseShapeConfig,
    pub animation: AnimationConfig,
    pub corruption: CorruptionConfig,
    /// Heatmap kernel sigma, pixels.
    pub heatmap_sigma: f64,
    /// Independent single-frame draws used to fit the skeleton prior.
    pub prior_frames: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            // sequence data keeps the animal close enough that its
            // silhouette spans a useful pixel area
            camera: CameraSampleConfig {
                distance_min: 2.5,
                distance_max: 8.0,
                ..CameraSampleConfig::default()
            },
            pose_shape: PoseShapeConfig::default(),
            animation: AnimationConfig::default(),
            corruption: CorruptionConfig::default(),
            heatmap_sigma: 4.0,
            prior_frames: 500,
        }
    }
}

/// Mean root position over a pose track.
fn mean_root(track: &[(PoseParams, PositionParams)]) -> Vector3<f64> {
    let mut sum = Vector3::zeros();
    for (_, position) in track {
        sum += position.translation_vec();
    }
    sum / track.len() as f64
}

/// Generates one sequence: a shape draw, an animated pose track, and a
/// camera that keeps every frame's silhouette nonempty (retrying the camera
/// draw a bounded number of times).
pub fn generate_sequence(
    seed: u64,
    seq_index: u64,
    template: &ProxyQuadruped,
    cfg: &SynthConfig,
    frames: usize,
) -> Result<SequenceData> {
    let mut shape_rng = derive(seed, "shape", seq_index);
    let (initial_pose, model) = sample_pose_shape(&mut shape_rng, template, &cfg.pose_shape);
    let mut anim_rng = derive(seed, "anim", seq_index);
    let track = animate_sequence(
        &mut anim_rng,
        &model,
        (initial_pose, PositionParams::identity()),
        &cfg.animation,
        frames,
    )?;
    let center = mean_root(&track);

    let mut last_err = None;
    for attempt in 0..20u64 {
        let mut cam_rng = derive(seed, "camera", seq_index * 64 + attempt);
        let camera = sample_camera(&mut cam_rng, &cfg.camera, center);
        let mut out = Vec::with_capacity(frames);
        let mut ok = true;
        for (pose, position) in &track {
            match render_ground_truth(&camera, &model, pose, position) {
                Ok(frame) => out.push(frame),
                Err(e @ (Error::EmptySilhouette(_) | Error::BehindCamera { .. })) => {
                    last_err = Some(e);
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            return Ok(SequenceData {
                id: format!("seq{seq_index:03}"),
                model,
                frames: out,
            });
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::EmptySilhouette("no camera draw kept the model in view".into())
    }))
}

/// Corrupted proposals for every frame of a sequence, with per-frame rng
/// streams derived from (seed, sequence, frame).
pub fn corrupt_sequence(
    seed: u64,
    seq_index: u64,
    sequence: &SequenceData,
    schema: &SkeletonSchema,
    cfg: &CorruptionConfig,
) -> Result<Vec<crate::oja::ProposalSet>> {
    sequence
        .frames
        .iter()
        .enumerate()
        .map(|(f, frame)| {
            let mut rng = derive(seed, "corrupt", seq_index * 1_000_003 + f as u64);
            corrupt_proposals(frame, schema, cfg, &mut rng)
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::schema::SkeletonSchema;

    /// A deterministic frame for corruption tests: rest pose viewed from
    /// the side so legs are well separated on screen.
    pub(crate) fn simple_truth_frame() -> (GroundTruthFrame, SkeletonSchema) {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema.clone());
        let pose = PoseParams::rest(&schema);
        let position = PositionParams::identity();
        let eye = Vector3::new(0.0, 0.3, -3.5);
        let camera = Camera {
            model: CameraModel::new(281.6, 128.0, 128.0, 256, 256).unwrap(),
            pose: CameraPose::look_at(eye, Vector3::new(0.0, -0.2, 0.0), Vector3::y()).unwrap(),
        };
        let frame = render_ground_truth(&camera, &model, &pose, &position).unwrap();
        (frame, schema)
    }

    #[test]
    fn camera_draws_respect_ranges() {
        let cfg = CameraSampleConfig::default();
        let mut rng = crate::rng::derive(1, "camera-range", 0);
        let center = Vector3::new(0.5, 0.2, -0.3);
        for _ in 0..10_000 {
            let cam = sample_camera(&mut rng, &cfg, center);
            let eye = cam.pose.to_world(&Vector3::zeros());
            let offset = eye - center;
            let d = offset.norm();
            assert!((1.0 - 1e-9..=20.0 + 1e-9).contains(&d), "distance {d}");
            let elevation = (offset.y / d).asin();
            assert!(
                (-1e-9..=std::f64::consts::FRAC_PI_2 + 1e-9).contains(&elevation),
                "elevation {elevation}"
            );
        }
    }

    #[test]
    fn camera_sampling_is_deterministic() {
        let cfg = CameraSampleConfig::default();
        let center = Vector3::zeros();
        let a = sample_camera(&mut crate::rng::derive(4, "cam", 9), &cfg, center);
        let b = sample_camera(&mut crate::rng::derive(4, "cam", 9), &cfg, center);
        assert_eq!(a, b);
    }

    #[test]
    fn azimuth_is_uniform() {
        // chi-square test against uniformity over 16 bins at p > 0.01
        let cfg = CameraSampleConfig::default();
        let mut rng = crate::rng::derive(2, "camera-azimuth", 0);
        let center = Vector3::zeros();
        let n = 100_000;
        let bins = 16usize;
        let mut counts = vec![0usize; bins];
        for _ in 0..n {
            let cam = sample_camera(&mut rng, &cfg, center);
            let eye = cam.pose.to_world(&Vector3::zeros());
            let az = (eye.z - center.z).atan2(eye.x - center.x); // [-pi, pi]
            let frac = (az + std::f64::consts::PI) / std::f64::consts::TAU;
            counts[((frac * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let expected = n as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // chi-square 99th percentile for 15 dof
        assert!(chi2 < 30.578, "chi2 {chi2}");
    }

    #[test]
    fn pose_draws_stay_within_limits() {
        let schema = SkeletonSchema::default_quadruped();
        let template = ProxyQuadruped::template(schema);
        let cfg = PoseShapeConfig::default();
        let mut rng = crate::rng::derive(3, "pose-limits", 0);
        for _ in 0..500 {
            let (pose, model) = sample_pose_shape(&mut rng, &template, &cfg);
            for slot in 0..pose.angles.len() {
                for axis in 0..3 {
                    assert!(pose.angles[slot][axis] >= pose.min[slot][axis]);
                    assert!(pose.angles[slot][axis] <= pose.max[slot][axis]);
                }
            }
            assert!(model.bone_lengths.iter().all(|&l| l > 0.0));
            assert!(model.capsule_radii.iter().all(|&r| r > 0.0));
        }
    }

    #[test]
    fn zero_variance_returns_template() {
        let schema = SkeletonSchema::default_quadruped();
        let template = ProxyQuadruped::template(schema);
        let cfg = PoseShapeConfig {
            pose_sigma_frac: 0.0,
            shape_sigma: 0.0,
        };
        let mut rng = crate::rng::derive(3, "pose-zero", 0);
        let (pose, model) = sample_pose_shape(&mut rng, &template, &cfg);
        assert!(pose.angles.iter().all(|a| *a == [0.0; 3]));
        assert_eq!(model, template);
    }

    #[test]
    fn random_draws_render_nonempty_silhouettes() {
        let schema = SkeletonSchema::default_quadruped();
        let template = ProxyQuadruped::template(schema);
        let ps_cfg = PoseShapeConfig::default();
        let cam_cfg = CameraSampleConfig::default();
        let mut rng = crate::rng::derive(14, "nonempty", 0);
        let mut rendered = 0;
        for _ in 0..1000 {
            let (pose, model) = sample_pose_shape(&mut rng, &template, &ps_cfg);
            let camera = sample_camera(&mut rng, &cam_cfg, Vector3::zeros());
            let sil =
                rasterize_silhouette(&camera, &model, &pose, &PositionParams::identity()).unwrap();
            assert!(sil.area() > 0);
            rendered += 1;
        }
        assert_eq!(rendered, 1000);
    }

    #[test]
    fn single_frame_animation_is_initial_draw() {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema);
        let pose = PoseParams::rest(&model.schema);
        let init = (pose.clone(), PositionParams::identity());
        let mut rng = crate::rng::derive(5, "anim1", 0);
        let track =
            animate_sequence(&mut rng, &model, init, &AnimationConfig::default(), 1).unwrap();
        assert_eq!(track.len(), 1);
        assert_eq!(track[0].0, pose);

        assert!(matches!(
            animate_sequence(
                &mut rng,
                &model,
                (pose, PositionParams::identity()),
                &AnimationConfig::default(),
                0
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn zero_step_animation_is_constant() {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema);
        let pose = PoseParams::rest(&model.schema);
        let cfg = AnimationConfig {
            step_sigma: 0.0,
            reversion: 0.0,
            walk_speed: 0.0,
            yaw_sigma: 0.0,
            max_joint_step: 1.0,
        };
        let mut rng = crate::rng::derive(5, "anim0", 0);
        let track = animate_sequence(
            &mut rng,
            &model,
            (pose.clone(), PositionParams::identity()),
            &cfg,
            8,
        )
        .unwrap();
        for (p, pos) in &track {
            assert_eq!(*p, pose);
            assert_eq!(*pos, PositionParams::identity());
        }
    }

    #[test]
    fn animation_bounds_joint_displacement() {
        let schema = SkeletonSchema::default_quadruped();
        let template = ProxyQuadruped::template(schema);
        let cfg = AnimationConfig::default();
        for case in 0..20u64 {
            let mut rng = crate::rng::derive(6, "anim-bound", case);
            let (pose, model) = sample_pose_shape(&mut rng, &template, &PoseShapeConfig::default());
            let track = animate_sequence(
                &mut rng,
                &model,
                (pose, PositionParams::identity()),
                &cfg,
                12,
            )
            .unwrap();
            for pair in track.windows(2) {
                let a = forward_kinematics(&model, &pair[0].0, &pair[0].1).unwrap();
                let b = forward_kinematics(&model, &pair[1].0, &pair[1].1).unwrap();
                let max_step = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(
                    max_step <= cfg.max_joint_step + 1e-9,
                    "case {case}: step {max_step}"
                );
            }
        }
    }

    #[test]
    fn generated_sequences_are_deterministic_and_consistent() {
        let schema = SkeletonSchema::default_quadruped();
        let template = ProxyQuadruped::template(schema);
        let cfg = SynthConfig::default();
        let a = generate_sequence(42, 0, &template, &cfg, 4).unwrap();
        let b = generate_sequence(42, 0, &template, &cfg, 4).unwrap();
        assert_eq!(a.frames.len(), 4);
        for (fa, fb) in a.frames.iter().zip(&b.frames) {
            assert_eq!(fa.joints2d, fb.joints2d);
            assert_eq!(fa.silhouette, fb.silhouette);
        }
        // joints2d is the projection of joints3d
        for frame in &a.frames {
            let projected =
                crate::camera::project_joints(&frame.camera.model, &frame.joints3d).unwrap();
            for (p, q) in projected.iter().zip(&frame.joints2d) {
                assert!((p - q).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn visible_joints_land_on_foreground_over_many_frames() {
        let schema = SkeletonSchema::default_quadruped();
        let template = ProxyQuadruped::template(schema);
        let ps_cfg = PoseShapeConfig::default();
        let cam_cfg = CameraSampleConfig {
            distance_min: 2.0,
            distance_max: 10.0,
            ..CameraSampleConfig::default()
        };
        let mut rng = crate::rng::derive(15, "vis-fg", 0);
        for _ in 0..1000 {
            let (pose, model) = sample_pose_shape(&mut rng, &template, &ps_cfg);
            let camera = sample_camera(&mut rng, &cam_cfg, Vector3::zeros());
            let Ok(frame) =
                render_ground_truth(&camera, &model, &pose, &PositionParams::identity())
            else {
                continue;
            };
            for (j, &vis) in frame.visibility.iter().enumerate() {
                if vis {
                    let p = frame.joints2d[j];
                    assert!(
                        frame
                            .silhouette
                            .get_clamped(p.x.round() as i64, p.y.round() as i64),
                        "joint {j} at {p:?}"
                    );
                }
            }
        }
    }
}
