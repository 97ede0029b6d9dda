//! Medial axis sample points: ridge pixels of the distance field,
//! subsampled by farthest-point sampling.

use crate::error::{Error, Result};
use crate::synth::Silhouette;

use super::{distance_transform, DistanceField};

/// Default cap on the number of medial axis sample points; the silhouette
/// coverage energy is O(|Z| * J) per evaluation inside the GA inner loop.
pub const DEFAULT_MAT_CAP: usize = 64;

/// Medial axis sample points with their clearance radii.
#[derive(Debug, Clone, PartialEq)]
pub struct MatPointSet {
    /// Pixel-center coordinates, each on a foreground pixel.
    pub points: Vec<[f64; 2]>,
    /// Distance-field value (disc radius) at each point.
    pub radii: Vec<f64>,
}

impl MatPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Medial axis transform with the default subsampling cap.
pub fn medial_axis(sil: &Silhouette) -> Result<MatPointSet> {
    medial_axis_capped(sil, DEFAULT_MAT_CAP)
}

/// Ridge points of the distance field: foreground pixels whose distance is
/// >= every 8-neighbor's minus 1e-6, subsampled to at most `cap` points by
/// farthest-point sampling.
pub fn medial_axis_capped(sil: &Silhouette, cap: usize) -> Result<MatPointSet> {
    if sil.area() == 0 {
        return Err(Error::EmptySilhouette(
            "medial axis of an empty silhouette".into(),
        ));
    }
    let df = distance_transform(sil);
    let mut ridge = ridge_points(&df);
    debug_assert!(!ridge.is_empty());

    if ridge.len() > cap && cap > 0 {
        ridge = farthest_point_subsample(ridge, cap);
    }
    Ok(MatPointSet {
        points: ridge.iter().map(|r| [r.0 as f64, r.1 as f64]).collect(),
        radii: ridge.iter().map(|r| r.2).collect(),
    })
}

fn ridge_points(df: &DistanceField) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for y in 0..df.height {
        for x in 0..df.width {
            let d = df.get(x, y);
            if d <= 0.0 {
                continue;
            }
            let mut is_ridge = true;
            'nb: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    if d < df.get_clamped(x as i64 + dx, y as i64 + dy) - 1e-6 {
                        is_ridge = false;
                        break 'nb;
                    }
                }
            }
            if is_ridge {
                out.push((x, y, d));
            }
        }
    }
    out
}

/// Deterministic farthest-point sampling: seed with the deepest point
/// (ties by row then column), then greedily add the point farthest from
/// the chosen set.
fn farthest_point_subsample(
    points: Vec<(usize, usize, f64)>,
    cap: usize,
) -> Vec<(usize, usize, f64)> {
    let n = points.len();
    let seed = (0..n)
        .max_by(|&a, &b| {
            points[a]
                .2
                .partial_cmp(&points[b].2)
                .unwrap()
                .then(points[b].1.cmp(&points[a].1))
                .then(points[b].0.cmp(&points[a].0))
        })
        .unwrap();
    let mut chosen = vec![seed];
    let dist2 = |a: usize, b: usize| -> f64 {
        let dx = points[a].0 as f64 - points[b].0 as f64;
        let dy = points[a].1 as f64 - points[b].1 as f64;
        dx * dx + dy * dy
    };
    let mut min_d: Vec<f64> = (0..n).map(|i| dist2(i, seed)).collect();
    while chosen.len() < cap {
        let next = (0..n)
            .max_by(|&a, &b| {
                min_d[a]
                    .partial_cmp(&min_d[b])
                    .unwrap()
                    .then(points[b].1.cmp(&points[a].1))
                    .then(points[b].0.cmp(&points[a].0))
            })
            .unwrap();
        if min_d[next] <= 0.0 {
            break;
        }
        chosen.push(next);
        for i in 0..n {
            min_d[i] = min_d[i].min(dist2(i, next));
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| points[i]).collect()
}
