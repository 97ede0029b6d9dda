//! Multimodal heatmap encoding of 2D joint locations.

use nalgebra::Vector2;

use crate::schema::SkeletonSchema;

/// W x H x J stack of per-joint heatmaps with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStack {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    data: Vec<f32>,
}

impl HeatmapStack {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        HeatmapStack {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x] as f64
    }

    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64, c: usize) -> f64 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            0.0
        } else {
            self.get(x as usize, y as usize, c)
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(c * self.height + y) * self.width + x] = v as f32;
    }

    pub fn channel_max(&self, c: usize) -> f64 {
        let n = self.width * self.height;
        self.data[c * n..(c + 1) * n]
            .iter()
            .copied()
            .fold(0.0f32, f32::max) as f64
    }
}

/// Gaussian kernels are evaluated out to this many sigmas; beyond that the
/// contribution is dropped so well separated aliases stay exact.
const KERNEL_SUPPORT_SIGMAS: f64 = 5.0;

/// Encodes 2D joints into a heatmap stack by linearly blending unit-peak
/// Gaussian kernels with the schema's alias weights:
/// `H_j(p) = sum_j' lambda[j][j'] * exp(-||p - x_j'||^2 / (2 sigma^2))`.
///
/// Joints outside the image simply have their kernels truncated.
pub fn encode_heatmaps(
    joints2d: &[Vector2<f64>],
    schema: &SkeletonSchema,
    sigma: f64,
    width: usize,
    height: usize,
) -> HeatmapStack {
    assert!(sigma > 0.0, "kernel sigma must be positive");
    let j = schema.joint_count();
    assert_eq!(joints2d.len(), j);
    let mut stack = HeatmapStack::new(width, height, j);
    let support = (KERNEL_SUPPORT_SIGMAS * sigma).ceil() as i64;
    let inv = 1.0 / (2.0 * sigma * sigma);

    for channel in 0..j {
        for (source, &weight) in schema.alias_weights[channel].iter().enumerate() {
            if weight <= 0.0 {
                continue;
            }
            let center = joints2d[source];
            let x0 = ((center.x.floor() as i64) - support).max(0);
            let x1 = ((center.x.ceil() as i64) + support).min(width as i64 - 1);
            let y0 = ((center.y.floor() as i64) - support).max(0);
            let y1 = ((center.y.ceil() as i64) + support).min(height as i64 - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let dx = x as f64 - center.x;
                    let dy = y as f64 - center.y;
                    let g = (-(dx * dx + dy * dy) * inv).exp();
                    let prev = stack.get(x as usize, y as usize, channel);
                    stack.set(x as usize, y as usize, channel, prev + weight * g);
                }
            }
        }
    }
    stack
}
