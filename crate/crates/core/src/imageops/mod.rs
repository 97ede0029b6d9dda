//! Silhouette geometry: exact Euclidean distance transform, medial axis
//! sample points, morphological dilation, and heatmap non-maximum
//! suppression.

mod mat;
mod nms;

pub use mat::{medial_axis, medial_axis_capped, MatPointSet};
pub use nms::nms_extract;

use crate::synth::Silhouette;

/// Per-pixel Euclidean distance (in pixels) to the nearest background
/// pixel, where everything outside the image counts as background.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub width: usize,
    pub height: usize,
    data: Vec<f64>,
}

impl DistanceField {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as distance zero (background).
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f64 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            0.0
        } else {
            self.data[y as usize * self.width + x as usize]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

const INF: f64 = 1e20;

/// One-dimensional squared-distance transform (Felzenszwalb & Huttenlocher
/// lower envelope of parabolas). `f` holds squared source costs.
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = -INF;
    z[1] = INF;
    for q in 1..n {
        let mut s;
        loop {
            let vk = v[k];
            s = ((f[q] + (q * q) as f64) - (f[vk] + (vk * vk) as f64))
                / (2.0 * q as f64 - 2.0 * vk as f64);
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = INF;
    }
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let vk = v[k] as f64;
        d[q] = (q as f64 - vk) * (q as f64 - vk) + f[v[k]];
    }
}

/// Exact squared Euclidean distance transform of a source indicator grid:
/// `src[i] == true` means distance zero.
fn edt_squared(width: usize, height: usize, src: &[bool]) -> Vec<f64> {
    let mut grid: Vec<f64> = src.iter().map(|&s| if s { 0.0 } else { INF }).collect();
    let nmax = width.max(height);
    let mut f = vec![0.0; nmax];
    let mut d = vec![0.0; nmax];
    let mut v = vec![0usize; nmax];
    let mut z = vec![0.0; nmax + 1];

    // columns
    for x in 0..width {
        for y in 0..height {
            f[y] = grid[y * width + x];
        }
        edt_1d(&f[..height], &mut d[..height], &mut v[..height], &mut z[..height + 1]);
        for y in 0..height {
            grid[y * width + x] = d[y];
        }
    }
    // rows
    for y in 0..height {
        f[..width].copy_from_slice(&grid[y * width..(y + 1) * width]);
        edt_1d(&f[..width], &mut d[..width], &mut v[..width], &mut z[..width + 1]);
        grid[y * width..(y + 1) * width].copy_from_slice(&d[..width]);
    }
    grid
}

/// Exact Euclidean distance to the nearest background pixel. Pixels outside
/// the image count as background, so an all-foreground mask still has a
/// finite field.
pub fn distance_transform(sil: &Silhouette) -> DistanceField {
    let (w, h) = (sil.width, sil.height);
    // Pad with a one-pixel background ring: the nearest exterior background
    // pixel to any interior point always lies in that ring.
    let (pw, ph) = (w + 2, h + 2);
    let mut src = vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            src[(y + 1) * pw + (x + 1)] = !sil.get(x, y);
        }
    }
    let sq = edt_squared(pw, ph, &src);
    let mut data = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            data[y * w + x] = sq[(y + 1) * pw + (x + 1)].sqrt();
        }
    }
    DistanceField {
        width: w,
        height: h,
        data,
    }
}

/// Euclidean dilation: foreground becomes every pixel within `radius` of an
/// original foreground pixel.
pub fn dilate(sil: &Silhouette, radius: f64) -> Silhouette {
    assert!(radius >= 0.0, "dilation radius must be nonnegative");
    let (w, h) = (sil.width, sil.height);
    let sq = edt_squared(w, h, sil.pixels());
    let r2 = radius * radius;
    let mask = sq.iter().map(|&d| d <= r2 + 1e-12).collect();
    Silhouette::from_mask(w, h, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::Silhouette;
    use rand::Rng;

    /// Brute-force oracle: scan every background pixel of the padded grid.
    pub(crate) fn brute_force_distance(sil: &Silhouette) -> Vec<f64> {
        let (w, h) = (sil.width, sil.height);
        let mut out = vec![0.0; w * h];
        let mut background = Vec::new();
        for y in -1..=(h as i64) {
            for x in -1..=(w as i64) {
                if !sil.get_clamped(x, y) {
                    background.push((x, y));
                }
            }
        }
        for y in 0..h {
            for x in 0..w {
                if !sil.get(x, y) {
                    continue;
                }
                let mut best = f64::INFINITY;
                for &(bx, by) in &background {
                    let dx = bx as f64 - x as f64;
                    let dy = by as f64 - y as f64;
                    best = best.min(dx * dx + dy * dy);
                }
                out[y * w + x] = best.sqrt();
            }
        }
        out
    }

    #[test]
    fn background_is_zero_and_adjacent_is_one() {
        let mut sil = Silhouette::new(9, 9);
        for y in 2..7 {
            for x in 2..7 {
                sil.set(x, y, true);
            }
        }
        let df = distance_transform(&sil);
        assert_eq!(df.get(0, 0), 0.0);
        assert_eq!(df.get(2, 4), 1.0); // 4-adjacent to background
        assert_eq!(df.get(4, 4), 3.0); // center of the 5x5 block
    }

    #[test]
    fn all_foreground_square_matches_brute_force() {
        let sil = Silhouette::from_fn(21, 21, |_, _| true);
        let df = distance_transform(&sil);
        let oracle = brute_force_distance(&sil);
        for y in 0..21 {
            for x in 0..21 {
                assert!(
                    (df.get(x, y) - oracle[y * 21 + x]).abs() < 1e-9,
                    "mismatch at ({x},{y}): {} vs {}",
                    df.get(x, y),
                    oracle[y * 21 + x]
                );
            }
        }
        // center pixel: nearest exterior pixel is straight out one side
        assert_eq!(df.get(10, 10), 11.0);
    }

    #[test]
    fn random_masks_match_brute_force_exactly() {
        let mut rng = crate::rng::derive(5, "edt-prop", 0);
        for case in 0..200 {
            let density = rng.gen_range(0.2..0.9);
            let sil = Silhouette::from_fn(16, 16, |_, _| rng.gen_bool(density));
            let df = distance_transform(&sil);
            let oracle = brute_force_distance(&sil);
            for i in 0..256 {
                assert!(
                    (df.values()[i] - oracle[i]).abs() < 1e-9,
                    "case {case}, pixel {i}"
                );
            }
        }
    }

    #[test]
    fn dilate_radius_zero_is_identity() {
        let mut rng = crate::rng::derive(6, "dilate", 0);
        let sil = Silhouette::from_fn(12, 12, |_, _| rng.gen_bool(0.4));
        assert_eq!(dilate(&sil, 0.0), sil);
    }

    #[test]
    fn dilate_single_pixel_radius_two_is_disc() {
        let mut sil = Silhouette::new(9, 9);
        sil.set(4, 4, true);
        let out = dilate(&sil, 2.0);
        assert_eq!(out.area(), 13);
        for (dx, dy) in [(0i64, 0i64), (1, 0), (2, 0), (1, 1), (0, 2)] {
            for (sx, sy) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
                assert!(out.get_clamped(4 + dx * sx, 4 + dy * sy));
            }
        }
        assert!(!out.get(6, 6)); // distance 2*sqrt(2) > 2
    }

    #[test]
    fn dilation_is_monotone() {
        let mut rng = crate::rng::derive(7, "dilate-mono", 0);
        for _ in 0..20 {
            let sil = Silhouette::from_fn(14, 14, |_, _| rng.gen_bool(0.3));
            let r = rng.gen_range(0.0..5.0);
            let out = dilate(&sil, r);
            for i in 0..sil.pixels().len() {
                if sil.pixels()[i] {
                    assert!(out.pixels()[i]);
                }
            }
        }
    }
}
