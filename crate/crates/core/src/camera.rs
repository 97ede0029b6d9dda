//! Pinhole camera: intrinsics, rigid pose, projection and back-projection.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Camera intrinsics. Pixel coordinates follow the usual image convention:
/// x grows rightward, y grows downward, and integer coordinates are pixel
/// centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraModel {
    pub fn new(focal: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if focal <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "focal length must be positive, got {focal}"
            )));
        }
        if cx < 0.0 || cx > width as f64 || cy < 0.0 || cy > height as f64 {
            return Err(Error::InvalidArgument(format!(
                "principal point ({cx}, {cy}) lies outside the {width}x{height} image"
            )));
        }
        Ok(CameraModel {
            focal,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Standard test camera: centered principal point, square image.
    pub fn default_for(width: usize, height: usize) -> Self {
        CameraModel {
            focal: width as f64 * 1.1,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
        }
    }

    pub fn contains(&self, p: &Vector2<f64>) -> bool {
        p.x >= -0.5 && p.x <= self.width as f64 - 0.5 && p.y >= -0.5 && p.y <= self.height as f64 - 0.5
    }

    /// Projects a camera-frame point; the caller guarantees depth > 0.
    pub fn project_point(&self, p: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(
            self.focal * p.x / p.z + self.cx,
            self.focal * p.y / p.z + self.cy,
        )
    }

    /// Camera-frame point on the viewing ray of `pixel` at the given depth.
    pub fn back_project(&self, pixel: &Vector2<f64>, depth: f64) -> Vector3<f64> {
        Vector3::new(
            (pixel.x - self.cx) / self.focal * depth,
            (pixel.y - self.cy) / self.focal * depth,
            depth,
        )
    }

    /// Unnormalized viewing-ray direction through `pixel`, with unit depth.
    pub fn ray_direction(&self, pixel: &Vector2<f64>) -> Vector3<f64> {
        Vector3::new(
            (pixel.x - self.cx) / self.focal,
            (pixel.y - self.cy) / self.focal,
            1.0,
        )
    }
}

/// World-to-camera rigid transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    /// World-to-camera rotation quaternion (w, x, y, z).
    pub quaternion: [f64; 4],
    pub translation: [f64; 3],
}

impl CameraPose {
    pub fn identity() -> Self {
        CameraPose {
            quaternion: [1.0, 0.0, 0.0, 0.0],
            translation: [0.0; 3],
        }
    }

    pub fn from_parts(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        let q = rotation.quaternion();
        CameraPose {
            quaternion: [q.w, q.i, q.j, q.k],
            translation: [translation.x, translation.y, translation.z],
        }
    }

    /// Camera at `eye` looking toward `target`; `up` fixes the roll so that
    /// image y points "down" with respect to it.
    pub fn look_at(eye: Vector3<f64>, target: Vector3<f64>, up: Vector3<f64>) -> Result<Self> {
        let forward = target - eye;
        if forward.norm() < 1e-12 {
            return Err(Error::InvalidArgument(
                "camera eye and target coincide".into(),
            ));
        }
        let z = forward.normalize();
        let up_perp = up - z * up.dot(&z);
        if up_perp.norm() < 1e-9 {
            return Err(Error::InvalidArgument(
                "camera up vector is parallel to the view direction".into(),
            ));
        }
        let y = -up_perp.normalize();
        let x = y.cross(&z);
        let rot = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
        let rotation =
            UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(rot));
        // p_cam = R (p_world - eye)
        let translation = rotation * (-eye);
        Ok(CameraPose::from_parts(rotation, translation))
    }

    pub fn rotation(&self) -> UnitQuaternion<f64> {
        let [w, x, y, z] = self.quaternion;
        UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z))
    }

    pub fn translation_vec(&self) -> Vector3<f64> {
        Vector3::from(self.translation)
    }

    pub fn to_camera(&self, p_world: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * p_world + self.translation_vec()
    }

    pub fn to_world(&self, p_cam: &Vector3<f64>) -> Vector3<f64> {
        self.rotation().inverse() * (p_cam - self.translation_vec())
    }
}

/// Intrinsics plus pose: everything needed to map world points to pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub model: CameraModel,
    pub pose: CameraPose,
}

impl Camera {
    pub fn world_to_camera(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.pose.to_camera(p)
    }

    pub fn project_world(&self, p: &Vector3<f64>) -> Result<Vector2<f64>> {
        let cam = self.world_to_camera(p);
        if cam.z <= 0.0 {
            return Err(Error::BehindCamera {
                joint: usize::MAX,
                depth: cam.z,
            });
        }
        Ok(self.model.project_point(&cam))
    }
}

/// Perspective projection of camera-frame joints to pixel coordinates.
/// Fails if any joint has depth <= 0, naming the offending joint.
pub fn project_joints(camera: &CameraModel, joints3d: &[Vector3<f64>]) -> Result<Vec<Vector2<f64>>> {
    joints3d
        .iter()
        .enumerate()
        .map(|(joint, p)| {
            if p.z <= 0.0 {
                Err(Error::BehindCamera { joint, depth: p.z })
            } else {
                Ok(camera.project_point(p))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn optical_axis_hits_principal_point() {
        let cam = CameraModel::new(500.0, 128.0, 128.0, 256, 256).unwrap();
        for depth in [0.5, 1.0, 7.3, 19.0] {
            let px = project_joints(&cam, &[Vector3::new(0.0, 0.0, depth)]).unwrap();
            assert_relative_eq!(px[0], Vector2::new(128.0, 128.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn pinhole_hand_value() {
        // x = 500 * 1/10 + 128 = 178
        let cam = CameraModel::new(500.0, 128.0, 128.0, 256, 256).unwrap();
        let px = project_joints(&cam, &[Vector3::new(1.0, 0.0, 10.0)]).unwrap();
        assert_relative_eq!(px[0], Vector2::new(178.0, 128.0), epsilon = 1e-12);
    }

    #[test]
    fn doubling_depth_halves_offset() {
        let cam = CameraModel::new(420.0, 100.0, 90.0, 200, 180) .unwrap();
        let near = project_joints(&cam, &[Vector3::new(0.3, -0.2, 4.0)]).unwrap()[0];
        let far = project_joints(&cam, &[Vector3::new(0.3, -0.2, 8.0)]).unwrap()[0];
        let center = Vector2::new(100.0, 90.0);
        assert_relative_eq!((far - center) * 2.0, near - center, epsilon = 1e-12);
    }

    #[test]
    fn behind_camera_names_joint() {
        let cam = CameraModel::default_for(64, 64);
        let joints = vec![Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 0.0, -2.0)];
        match project_joints(&cam, &joints) {
            Err(Error::BehindCamera { joint, depth }) => {
                assert_eq!(joint, 1);
                assert_eq!(depth, -2.0);
            }
            other => panic!("expected behind-camera error, got {other:?}"),
        }
    }

    #[test]
    fn back_projection_round_trip() {
        let cam = CameraModel::default_for(256, 256);
        let mut rng = crate::rng::derive(3, "camera-roundtrip", 0);
        for _ in 0..100 {
            let p = Vector3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.5..20.0),
            );
            let px = cam.project_point(&p);
            let back = cam.back_project(&px, p.z);
            assert_relative_eq!(p, back, epsilon = 1e-6);
        }
    }

    #[test]
    fn look_at_places_target_on_axis_with_y_down() {
        let eye = Vector3::new(3.0, 2.0, -4.0);
        let target = Vector3::new(0.2, 0.5, 0.1);
        let pose = CameraPose::look_at(eye, target, Vector3::y()).unwrap();
        let cam_target = pose.to_camera(&target);
        assert_relative_eq!(cam_target.x, 0.0, epsilon = 1e-9);
        assert_relative_eq!(cam_target.y, 0.0, epsilon = 1e-9);
        assert!(cam_target.z > 0.0);
        // a point above the target projects to smaller y (image y points down)
        let above = pose.to_camera(&(target + Vector3::new(0.0, 0.5, 0.0)));
        assert!(above.y < 0.0);
        // proper rotation
        let det = pose.rotation().to_rotation_matrix().matrix().determinant();
        assert_relative_eq!(det, 1.0, epsilon = 1e-9);
    }
}
