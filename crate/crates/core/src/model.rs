//! Capsule quadruped: bone geometry, pose and position parameters, and
//! forward kinematics over the schema's kinematic tree.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::SkeletonSchema;

/// Articulated quadruped whose bones are capsules. Bone arrays are indexed
/// parallel to `schema.bones`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyQuadruped {
    pub schema: SkeletonSchema,
    /// Bone lengths in meters, strictly positive.
    pub bone_lengths: Vec<f64>,
    /// Capsule radii in meters, strictly positive.
    pub capsule_radii: Vec<f64>,
    /// Unit direction from the parent joint to the child joint at rest.
    pub rest_directions: Vec<Vector3<f64>>,
}

/// Per-joint Euler angles (radians) for the internal joints of the tree,
/// in `schema.internal_joints()` order, with box limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseParams {
    pub angles: Vec<[f64; 3]>,
    pub min: Vec<[f64; 3]>,
    pub max: Vec<[f64; 3]>,
}

/// Rigid placement of the model root: translation plus a unit quaternion
/// stored as (w, x, y, z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionParams {
    pub translation: [f64; 3],
    pub quaternion: [f64; 4],
}

impl PositionParams {
    pub fn identity() -> Self {
        PositionParams {
            translation: [0.0; 3],
            quaternion: [1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn new(translation: Vector3<f64>, rotation: UnitQuaternion<f64>) -> Self {
        let q = rotation.quaternion();
        PositionParams {
            translation: [translation.x, translation.y, translation.z],
            quaternion: [q.w, q.i, q.j, q.k],
        }
    }

    pub fn translation_vec(&self) -> Vector3<f64> {
        Vector3::from(self.translation)
    }

    /// Validates the unit-norm invariant and returns the rotation.
    pub fn rotation(&self) -> Result<UnitQuaternion<f64>> {
        let [w, x, y, z] = self.quaternion;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidQuaternion { norm });
        }
        Ok(UnitQuaternion::from_quaternion(q))
    }
}

/// Rotation from per-joint Euler angles, composed Rz(yaw) * Ry(pitch) * Rx(roll).
pub fn euler_rotation(angles: &[f64; 3]) -> UnitQuaternion<f64> {
    UnitQuaternion::from_euler_angles(angles[0], angles[1], angles[2])
}

impl PoseParams {
    /// Rest pose with the default angle limits for the given schema.
    pub fn rest(schema: &SkeletonSchema) -> Self {
        let internal = schema.internal_joints();
        let mut min = Vec::with_capacity(internal.len());
        let mut max = Vec::with_capacity(internal.len());
        for &j in &internal {
            let name = schema.joint_names[j].as_str();
            let lim: [f64; 3] = if name.ends_with("shoulder") || name.ends_with("hip") {
                [0.4, 0.3, 1.0]
            } else if name.ends_with("knee") {
                [0.2, 0.2, 1.2]
            } else if name == "neck" || name == "tail_base" {
                [0.5, 0.4, 0.7]
            } else if name == "head" {
                [0.4, 0.4, 0.5]
            } else {
                // spine segments
                [0.3, 0.25, 0.3]
            };
            min.push([-lim[0], -lim[1], -lim[2]]);
            max.push(lim);
        }
        PoseParams {
            angles: vec![[0.0; 3]; internal.len()],
            min,
            max,
        }
    }

    /// Clamps every angle into its box limits.
    pub fn clamp_to_limits(&mut self) {
        for ((a, lo), hi) in self.angles.iter_mut().zip(&self.min).zip(&self.max) {
            for axis in 0..3 {
                a[axis] = a[axis].clamp(lo[axis], hi[axis]);
            }
        }
    }

    pub fn limits_hold(&self) -> bool {
        self.min
            .iter()
            .zip(&self.max)
            .all(|(lo, hi)| (0..3).all(|i| lo[i] <= hi[i]))
    }
}

impl ProxyQuadruped {
    /// Species template: a generic ~1.5 m quadruped.
    pub fn template(schema: SkeletonSchema) -> Self {
        // (length m, radius m, rest direction), indexed parallel to schema.bones.
        let spec: &[(f64, f64, [f64; 3])] = &[
            (0.35, 0.16, [1.0, 0.0, 0.0]),      // spine_mid -> spine_front
            (0.35, 0.16, [-1.0, 0.0, 0.0]),     // spine_mid -> spine_rear
            (0.22, 0.09, [0.80, 0.60, 0.0]),    // spine_front -> neck
            (0.20, 0.07, [0.86, 0.51, 0.0]),    // neck -> head
            (0.15, 0.045, [0.98, -0.20, 0.0]),  // head -> nose
            (0.14, 0.06, [-0.97, 0.24, 0.0]),   // spine_rear -> tail_base
            (0.35, 0.025, [-0.90, -0.44, 0.0]), // tail_base -> tail_tip
            (0.18, 0.06, [0.0, -0.5, -0.866]),  // spine_front -> fl_shoulder
            (0.28, 0.05, [0.0, -1.0, 0.0]),     // fl_shoulder -> fl_knee
            (0.30, 0.035, [0.0, -1.0, 0.0]),    // fl_knee -> fl_foot
            (0.18, 0.06, [0.0, -0.5, 0.866]),   // spine_front -> fr_shoulder
            (0.28, 0.05, [0.0, -1.0, 0.0]),     // fr_shoulder -> fr_knee
            (0.30, 0.035, [0.0, -1.0, 0.0]),    // fr_knee -> fr_foot
            (0.18, 0.065, [0.0, -0.5, -0.866]), // spine_rear -> bl_hip
            (0.30, 0.055, [0.0, -1.0, 0.0]),    // bl_hip -> bl_knee
            (0.32, 0.035, [0.0, -1.0, 0.0]),    // bl_knee -> bl_foot
            (0.18, 0.065, [0.0, -0.5, 0.866]),  // spine_rear -> br_hip
            (0.30, 0.055, [0.0, -1.0, 0.0]),    // br_hip -> br_knee
            (0.32, 0.035, [0.0, -1.0, 0.0]),    // br_knee -> br_foot
        ];
        assert_eq!(spec.len(), schema.bone_count());
        ProxyQuadruped {
            schema,
            bone_lengths: spec.iter().map(|s| s.0).collect(),
            capsule_radii: spec.iter().map(|s| s.1).collect(),
            rest_directions: spec
                .iter()
                .map(|s| Vector3::from(s.2).normalize())
                .collect(),
        }
    }

    /// Index of the bone joining joints `a` and `b`.
    pub fn bone_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.schema
            .bones
            .iter()
            .position(|&(x, y)| (x.min(y), x.max(y)) == key)
    }

    pub fn validate(&self) -> Result<()> {
        let nb = self.schema.bone_count();
        if self.bone_lengths.len() != nb
            || self.capsule_radii.len() != nb
            || self.rest_directions.len() != nb
        {
            return Err(Error::InvalidArgument(format!(
                "bone arrays must all have length {nb}"
            )));
        }
        if self.bone_lengths.iter().any(|&l| l <= 0.0) {
            return Err(Error::InvalidArgument(
                "bone lengths must be strictly positive".into(),
            ));
        }
        if self.capsule_radii.iter().any(|&r| r <= 0.0) {
            return Err(Error::InvalidArgument(
                "capsule radii must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// World-space 3D joint positions for the given pose and placement.
/// The root joint lands exactly on the translation of `position`.
pub fn forward_kinematics(
    model: &ProxyQuadruped,
    pose: &PoseParams,
    position: &PositionParams,
) -> Result<Vec<Vector3<f64>>> {
    model.validate()?;
    let root_rotation = position.rotation()?;
    let schema = &model.schema;
    let j = schema.joint_count();
    let children = schema.children();
    let internal = schema.internal_joints();
    if pose.angles.len() != internal.len() {
        return Err(Error::InvalidArgument(format!(
            "pose has {} joints, schema has {} internal joints",
            pose.angles.len(),
            internal.len()
        )));
    }
    let mut theta_slot = vec![None; j];
    for (slot, &joint) in internal.iter().enumerate() {
        theta_slot[joint] = Some(slot);
    }

    let mut positions = vec![Vector3::zeros(); j];
    let mut orientations = vec![UnitQuaternion::identity(); j];
    positions[0] = position.translation_vec();
    orientations[0] = match theta_slot[0] {
        Some(slot) => root_rotation * euler_rotation(&pose.angles[slot]),
        None => root_rotation,
    };

    let mut stack = vec![0usize];
    while let Some(p) = stack.pop() {
        for &c in &children[p] {
            let bone = model
                .bone_between(p, c)
                .expect("tree edge has a bone entry");
            let offset =
                orientations[p] * (model.rest_directions[bone] * model.bone_lengths[bone]);
            positions[c] = positions[p] + offset;
            orientations[c] = match theta_slot[c] {
                Some(slot) => orientations[p] * euler_rotation(&pose.angles[slot]),
                None => orientations[p],
            };
            stack.push(c);
        }
    }
    Ok(positions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Rotation3;
    use rand::Rng;

    fn setup() -> (ProxyQuadruped, PoseParams) {
        let schema = SkeletonSchema::default_quadruped();
        let pose = PoseParams::rest(&schema);
        (ProxyQuadruped::template(schema), pose)
    }

    #[test]
    fn rest_pose_matches_rest_directions() {
        let (model, pose) = setup();
        let joints = forward_kinematics(&model, &pose, &PositionParams::identity()).unwrap();
        assert_relative_eq!(joints[0], Vector3::zeros());
        // spine_front sits one bone length along +x
        assert_relative_eq!(joints[1], Vector3::new(0.35, 0.0, 0.0), epsilon = 1e-12);
        // all joints finite and distinct
        for (a, pa) in joints.iter().enumerate() {
            assert!(pa.iter().all(|v| v.is_finite()));
            for pb in joints.iter().skip(a + 1) {
                assert!((pa - pb).norm() > 1e-6);
            }
        }
    }

    #[test]
    fn translation_shifts_rest_pose() {
        let (model, pose) = setup();
        let rest = forward_kinematics(&model, &pose, &PositionParams::identity()).unwrap();
        let shifted = forward_kinematics(
            &model,
            &pose,
            &PositionParams::new(Vector3::new(1.0, 0.0, 0.0), UnitQuaternion::identity()),
        )
        .unwrap();
        for (a, b) in rest.iter().zip(&shifted) {
            assert_relative_eq!(a + Vector3::new(1.0, 0.0, 0.0), *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_unit_quaternion_is_rejected() {
        let (model, pose) = setup();
        let bad = PositionParams {
            translation: [0.0; 3],
            quaternion: [1.0, 0.1, 0.0, 0.0],
        };
        assert!(matches!(
            forward_kinematics(&model, &pose, &bad),
            Err(Error::InvalidQuaternion { .. })
        ));
    }

    /// Independent oracle: walk root -> joint accumulating rotation matrices
    /// composed by hand, joint by joint.
    fn fk_oracle(
        model: &ProxyQuadruped,
        pose: &PoseParams,
        position: &PositionParams,
    ) -> Vec<Vector3<f64>> {
        let schema = &model.schema;
        let children = schema.children();
        let internal = schema.internal_joints();
        let joint_rot = |joint: usize| -> Rotation3<f64> {
            match internal.iter().position(|&x| x == joint) {
                Some(slot) => {
                    let [x, y, z] = pose.angles[slot];
                    Rotation3::from_axis_angle(&Vector3::z_axis(), z)
                        * Rotation3::from_axis_angle(&Vector3::y_axis(), y)
                        * Rotation3::from_axis_angle(&Vector3::x_axis(), x)
                }
                None => Rotation3::identity(),
            }
        };
        let mut out = vec![Vector3::zeros(); schema.joint_count()];
        let mut rots = vec![Rotation3::identity(); schema.joint_count()];
        out[0] = position.translation_vec();
        rots[0] = position.rotation().unwrap().to_rotation_matrix() * joint_rot(0);
        let mut stack = vec![0usize];
        while let Some(p) = stack.pop() {
            for &c in &children[p] {
                let bone = model.bone_between(p, c).unwrap();
                out[c] =
                    out[p] + rots[p] * (model.rest_directions[bone] * model.bone_lengths[bone]);
                rots[c] = rots[p] * joint_rot(c);
                stack.push(c);
            }
        }
        out
    }

    #[test]
    fn shoulder_rotation_matches_composition_oracle() {
        let (model, mut pose) = setup();
        let internal = model.schema.internal_joints();
        let shoulder_slot = internal.iter().position(|&j| j == 8).unwrap();
        pose.angles[shoulder_slot] = [0.0, 0.0, std::f64::consts::FRAC_PI_2];
        let position = PositionParams::identity();
        let ours = forward_kinematics(&model, &pose, &position).unwrap();
        let oracle = fk_oracle(&model, &pose, &position);
        for (a, b) in ours.iter().zip(&oracle) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        // distal joints moved, torso did not
        let rest = forward_kinematics(&model, &PoseParams::rest(&model.schema), &position).unwrap();
        assert!((ours[9] - rest[9]).norm() > 0.1);
        assert!((ours[10] - rest[10]).norm() > 0.1);
        assert_relative_eq!(ours[1], rest[1], epsilon = 1e-12);
    }

    #[test]
    fn random_pose_matches_oracle_and_preserves_bone_lengths() {
        let (model, mut pose) = setup();
        let mut rng = crate::rng::derive(11, "fk-test", 0);
        for trial in 0..20 {
            for a in &mut pose.angles {
                for v in a.iter_mut() {
                    *v = rng.gen_range(-0.8..0.8);
                }
            }
            let axis = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let position = PositionParams::new(
                Vector3::new(rng.gen_range(-2.0..2.0), 0.0, rng.gen_range(-2.0..2.0)),
                UnitQuaternion::from_scaled_axis(axis),
            );
            let ours = forward_kinematics(&model, &pose, &position).unwrap();
            let oracle = fk_oracle(&model, &pose, &position);
            for (a, b) in ours.iter().zip(&oracle) {
                assert_relative_eq!(a, b, epsilon = 1e-9);
            }
            for (bone, &(j, k)) in model.schema.bones.iter().enumerate() {
                assert_relative_eq!(
                    (ours[j] - ours[k]).norm(),
                    model.bone_lengths[bone],
                    epsilon = 1e-9,
                );
            }
            let _ = trial;
        }
    }

    #[test]
    fn fk_is_rigid_motion_equivariant() {
        let (model, mut pose) = setup();
        let mut rng = crate::rng::derive(13, "fk-equivariance", 0);
        for _ in 0..10 {
            for a in &mut pose.angles {
                for v in a.iter_mut() {
                    *v = rng.gen_range(-0.5..0.5);
                }
            }
            let base = PositionParams::new(
                Vector3::new(rng.gen_range(-1.0..1.0), 0.0, 0.0),
                UnitQuaternion::from_scaled_axis(Vector3::new(0.0, rng.gen_range(-1.0..1.0), 0.0)),
            );
            let g_rot = UnitQuaternion::from_scaled_axis(Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ));
            let g_t = Vector3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            );
            let composed = PositionParams::new(
                g_rot * base.translation_vec() + g_t,
                g_rot * base.rotation().unwrap(),
            );
            let moved = forward_kinematics(&model, &pose, &composed).unwrap();
            let baseline = forward_kinematics(&model, &pose, &base).unwrap();
            for (m, b) in moved.iter().zip(&baseline) {
                assert_relative_eq!(*m, g_rot * b + g_t, epsilon = 1e-9);
            }
        }
    }
}
