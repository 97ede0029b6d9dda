//! Analytic capsule rasterization: hard silhouettes, signed-distance
//! fields for the soft renderer, and joint visibility.
//!
//! A pixel is foreground iff its viewing ray passes within a capsule's
//! radius of the capsule's axis segment, i.e. the pixel lies inside the
//! exact perspective projection of the capsule.

use nalgebra::{Vector2, Vector3};

use crate::camera::{Camera, CameraModel};
use crate::error::{Error, Result};
use crate::model::{forward_kinematics, PoseParams, PositionParams, ProxyQuadruped};
use crate::synth::Silhouette;

/// A bone capsule in camera coordinates.
#[derive(Debug, Clone, Copy)]
pub struct CamCapsule {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub radius: f64,
}

/// Closest approach between the viewing ray `t * dir` (t >= 0) and the
/// segment `a + s (b - a)` (s in [0, 1]). Returns (distance, depth of the
/// closest segment point).
fn ray_segment_distance(dir: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> (f64, f64) {
    let u = b - a;
    let dd = dir.dot(dir);
    let uu = u.dot(&u);
    let du = dir.dot(&u);
    let da = dir.dot(a);
    let ua = u.dot(a);
    let det = du * du - dd * uu;

    let mut s = if det.abs() < 1e-18 {
        0.0 // parallel: either endpoint's perpendicular works; pick a
    } else {
        ((dd * ua - du * da) / det).clamp(0.0, 1.0)
    };
    let mut best = (f64::INFINITY, 0.0);
    // evaluate the clamped interior candidate and both endpoints; the
    // endpoint checks also cover the parallel case
    for cand in [s, 0.0, 1.0] {
        let p = a + u * cand;
        let t = (dir.dot(&p) / dd).max(0.0);
        let d = (dir * t - p).norm();
        if d < best.0 {
            best = (d, p.z);
            s = cand;
        }
    }
    let _ = s;
    best
}

/// All bone capsules of a posed model, in camera coordinates, paired with
/// the camera-frame joint positions.
pub struct CapsuleScene {
    pub model: CameraModel,
    pub capsules: Vec<CamCapsule>,
    pub joints_cam: Vec<Vector3<f64>>,
}

impl CapsuleScene {
    pub fn build(
        camera: &Camera,
        model: &ProxyQuadruped,
        pose: &PoseParams,
        position: &PositionParams,
    ) -> Result<Self> {
        let world = forward_kinematics(model, pose, position)?;
        let joints_cam: Vec<Vector3<f64>> =
            world.iter().map(|p| camera.world_to_camera(p)).collect();
        let capsules = model
            .schema
            .bones
            .iter()
            .enumerate()
            .map(|(i, &(j, k))| CamCapsule {
                a: joints_cam[j],
                b: joints_cam[k],
                radius: model.capsule_radii[i],
            })
            .collect();
        Ok(CapsuleScene {
            model: camera.model,
            capsules,
            joints_cam,
        })
    }

    /// Conservative pixel bounding box of one capsule's projection,
    /// expanded by `margin` pixels. None if the capsule sits behind the
    /// camera or the box misses the image.
    fn pixel_bbox(&self, c: &CamCapsule, margin: f64) -> Option<(usize, usize, usize, usize)> {
        let eps = 1e-6;
        let (mut a, mut b) = (c.a, c.b);
        // clip the axis to the z > 0 half space
        if a.z <= eps && b.z <= eps {
            return None;
        }
        if a.z <= eps {
            let t = (eps - a.z) / (b.z - a.z);
            a += (b - a) * t;
        } else if b.z <= eps {
            let t = (eps - b.z) / (a.z - b.z);
            b += (a - b) * t;
        }
        let mut lo = Vector2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vector2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in [a, b] {
            let px = self.model.project_point(&p);
            // silhouette radius of the endpoint sphere, bounded generously
            let denom = (p.z - c.radius).max(0.5 * c.radius);
            let rad = self.model.focal * c.radius / denom + margin;
            lo.x = lo.x.min(px.x - rad);
            lo.y = lo.y.min(px.y - rad);
            hi.x = hi.x.max(px.x + rad);
            hi.y = hi.y.max(px.y + rad);
        }
        let x0 = lo.x.floor().max(0.0) as usize;
        let y0 = lo.y.floor().max(0.0) as usize;
        if lo.x > self.model.width as f64 - 1.0 || lo.y > self.model.height as f64 - 1.0 {
            return None;
        }
        let x1 = hi.x.ceil().min(self.model.width as f64 - 1.0);
        let y1 = hi.y.ceil().min(self.model.height as f64 - 1.0);
        if x1 < 0.0 || y1 < 0.0 {
            return None;
        }
        Some((x0, y0, x1 as usize, y1 as usize))
    }

    /// Signed distance (in pixels) from a pixel to the nearest projected
    /// capsule boundary: negative inside. Distances are measured along the
    /// viewing ray's closest approach, scaled to pixels at the capsule's
    /// depth.
    pub fn signed_distance_px(&self, pixel: &Vector2<f64>) -> f64 {
        let dir = self.model.ray_direction(pixel);
        let mut best = f64::INFINITY;
        for c in &self.capsules {
            if c.a.z <= 0.0 && c.b.z <= 0.0 {
                continue;
            }
            let (dist, depth) = ray_segment_distance(&dir, &c.a, &c.b);
            if depth <= 0.0 {
                continue;
            }
            let sd = (dist - c.radius) * self.model.focal / depth;
            best = best.min(sd);
        }
        best
    }

    /// Dense signed-distance field, evaluated only inside conservative
    /// capsule bounding boxes expanded by `margin` pixels; everything
    /// outside reads +infinity (far outside every capsule).
    pub fn distance_field_px(&self, margin: f64) -> Vec<f64> {
        let (w, h) = (self.model.width, self.model.height);
        let mut field = vec![f64::INFINITY; w * h];
        for c in &self.capsules {
            let Some((x0, y0, x1, y1)) = self.pixel_bbox(c, margin) else {
                continue;
            };
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let dir = self.model.ray_direction(&Vector2::new(x as f64, y as f64));
                    let (dist, depth) = ray_segment_distance(&dir, &c.a, &c.b);
                    if depth <= 0.0 {
                        continue;
                    }
                    let sd = (dist - c.radius) * self.model.focal / depth;
                    let cell = &mut field[y * w + x];
                    *cell = cell.min(sd);
                }
            }
        }
        field
    }

    /// Hard binary silhouette.
    pub fn rasterize(&self) -> Result<Silhouette> {
        if self.capsules.iter().all(|c| c.a.z <= 0.0 && c.b.z <= 0.0) {
            return Err(Error::EmptySilhouette("model is behind the camera".into()));
        }
        let field = self.distance_field_px(2.0);
        let mask = field.iter().map(|&sd| sd <= 0.0).collect();
        let sil = Silhouette::from_mask(self.model.width, self.model.height, mask);
        if sil.area() == 0 {
            return Err(Error::EmptySilhouette(
                "model projects outside the image".into(),
            ));
        }
        Ok(sil)
    }

    /// Soft occupancy: sigmoid(-sharpness * signed_distance). Thresholding
    /// at 0.5 reproduces the hard silhouette exactly. Pixels beyond the
    /// evaluation band read 0 (the sigmoid tail there is below ~1e-7).
    pub fn soft_render(&self, sharpness: f64) -> Vec<f64> {
        let margin = (16.0 / sharpness).ceil().max(4.0);
        self.distance_field_px(margin)
            .into_iter()
            .map(|sd| {
                if sd.is_finite() {
                    1.0 / (1.0 + (sharpness * sd).exp())
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Per-joint visibility: a joint is visible iff its projection lands on
    /// a foreground pixel inside the image and no capsule not incident to
    /// it crosses the line of sight strictly in front of it.
    pub fn joint_visibility(
        &self,
        schema_bones: &[(usize, usize)],
        silhouette: &Silhouette,
    ) -> Vec<bool> {
        let j = self.joints_cam.len();
        let mut visible = vec![false; j];
        for joint in 0..j {
            let p = self.joints_cam[joint];
            if p.z <= 0.0 {
                continue;
            }
            let px = self.model.project_point(&p);
            if !self.model.contains(&px) {
                continue;
            }
            let (ix, iy) = (px.x.round() as i64, px.y.round() as i64);
            if !silhouette.get_clamped(ix, iy) {
                continue;
            }
            let dir = self.model.ray_direction(&px);
            let mut occluded = false;
            for (bone, &(a, b)) in schema_bones.iter().enumerate() {
                if a == joint || b == joint {
                    continue;
                }
                let c = &self.capsules[bone];
                let (dist, depth) = ray_segment_distance(&dir, &c.a, &c.b);
                if dist <= c.radius && depth > 0.0 && depth < p.z - 1e-9 {
                    occluded = true;
                    break;
                }
            }
            visible[joint] = !occluded;
        }
        visible
    }
}

/// Renders the binary silhouette of the posed model.
pub fn rasterize_silhouette(
    camera: &Camera,
    model: &ProxyQuadruped,
    pose: &PoseParams,
    position: &PositionParams,
) -> Result<Silhouette> {
    CapsuleScene::build(camera, model, pose, position)?.rasterize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::CameraPose;
    use crate::schema::SkeletonSchema;
    use nalgebra::UnitQuaternion;

    fn test_camera(w: usize, h: usize) -> Camera {
        Camera {
            model: CameraModel::new(500.0, w as f64 / 2.0, h as f64 / 2.0, w, h).unwrap(),
            pose: CameraPose::identity(),
        }
    }

    #[test]
    fn head_on_capsule_is_a_disc() {
        // capsule along the optical axis, seen end-on
        let scene = CapsuleScene {
            model: test_camera(128, 128).model,
            capsules: vec![CamCapsule {
                a: Vector3::new(0.0, 0.0, 5.0),
                b: Vector3::new(0.0, 0.0, 6.0),
                radius: 0.2,
            }],
            joints_cam: vec![],
        };
        let sil = scene.rasterize().unwrap();
        let expected_r = 500.0 * 0.2 / 5.0; // 20 px
        // measure the horizontal radius through the center row
        let cy = 64usize;
        let mut min_x = usize::MAX;
        let mut max_x = 0usize;
        for x in 0..128 {
            if sil.get(x, cy) {
                min_x = min_x.min(x);
                max_x = max_x.max(x);
            }
        }
        let measured_r = (max_x - min_x) as f64 / 2.0;
        assert!(
            (measured_r - expected_r).abs() <= 1.0,
            "radius {measured_r} vs {expected_r}"
        );
        // and it is a filled disc: area close to pi r^2
        let area = sil.area() as f64;
        let expect_area = std::f64::consts::PI * expected_r * expected_r;
        assert!((area - expect_area).abs() / expect_area < 0.1);
    }

    #[test]
    fn model_outside_frustum_errors() {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema);
        let pose = PoseParams::rest(&model.schema);
        let camera = test_camera(128, 128);
        // far behind the camera
        let position = PositionParams::new(
            Vector3::new(0.0, 0.0, -10.0),
            UnitQuaternion::identity(),
        );
        assert!(matches!(
            rasterize_silhouette(&camera, &model, &pose, &position),
            Err(Error::EmptySilhouette(_))
        ));
        // in front but far off to the side
        let position = PositionParams::new(
            Vector3::new(100.0, 0.0, 8.0),
            UnitQuaternion::identity(),
        );
        assert!(matches!(
            rasterize_silhouette(&camera, &model, &pose, &position),
            Err(Error::EmptySilhouette(_))
        ));
    }

    #[test]
    fn roll_preserves_silhouette_area() {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema);
        let pose = PoseParams::rest(&model.schema);
        let position = PositionParams::new(
            Vector3::new(0.0, 0.0, 6.0),
            UnitQuaternion::from_euler_angles(0.1, 0.8, 0.0),
        );
        let camera = test_camera(256, 256);
        let base = rasterize_silhouette(&camera, &model, &pose, &position).unwrap();

        let roll = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 0.7);
        let rolled_cam = Camera {
            model: camera.model,
            pose: CameraPose::from_parts(
                roll * camera.pose.rotation(),
                roll * camera.pose.translation_vec(),
            ),
        };
        let rolled = rasterize_silhouette(&rolled_cam, &model, &pose, &position).unwrap();
        let a0 = base.area() as f64;
        let a1 = rolled.area() as f64;
        assert!(
            (a0 - a1).abs() / a0 < 0.02,
            "areas {a0} vs {a1} differ by more than 2%"
        );
    }

    #[test]
    fn soft_render_threshold_matches_hard_silhouette() {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema);
        let pose = PoseParams::rest(&model.schema);
        let position = PositionParams::new(
            Vector3::new(0.0, 0.0, 5.0),
            UnitQuaternion::from_euler_angles(0.0, 1.1, 0.0),
        );
        let camera = test_camera(192, 192);
        let scene = CapsuleScene::build(&camera, &model, &pose, &position).unwrap();
        let sil = scene.rasterize().unwrap();
        let soft = scene.soft_render(2.0);
        for (i, &occ) in soft.iter().enumerate() {
            assert_eq!(occ >= 0.5, sil.pixels()[i], "pixel {i}");
        }
    }

    #[test]
    fn visible_joints_project_onto_foreground() {
        let schema = SkeletonSchema::default_quadruped();
        let model = ProxyQuadruped::template(schema);
        let pose = PoseParams::rest(&model.schema);
        let position = PositionParams::new(
            Vector3::new(0.0, 0.0, 4.0),
            UnitQuaternion::from_euler_angles(0.0, 0.9, 0.0),
        );
        let camera = test_camera(256, 256);
        let scene = CapsuleScene::build(&camera, &model, &pose, &position).unwrap();
        let sil = scene.rasterize().unwrap();
        let vis = scene.joint_visibility(&model.schema.bones, &sil);
        assert!(vis.iter().filter(|&&v| v).count() >= 10);
        for (j, &v) in vis.iter().enumerate() {
            if v {
                let px = scene.model.project_point(&scene.joints_cam[j]);
                assert!(sil.get_clamped(px.x.round() as i64, px.y.round() as i64));
            }
        }
    }
}
