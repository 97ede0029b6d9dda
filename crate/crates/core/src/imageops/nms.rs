//! Per-channel non-maximum suppression over heatmap stacks.

use crate::oja::{Proposal, ProposalSet};
use crate::synth::HeatmapStack;

/// Extracts joint proposals from each heatmap channel: local maxima above
/// `threshold`, greedily kept in descending value with mutual distance >=
/// `suppression_radius`, refined to sub-pixel accuracy by a quadratic fit
/// of the 3x3 neighborhood. Confidence is the heatmap value at the peak.
///
/// Ties are broken by (value, row, column) so the result is independent of
/// evaluation order.
pub fn nms_extract(heatmaps: &HeatmapStack, threshold: f64, suppression_radius: f64) -> ProposalSet {
    assert!(
        threshold > 0.0 && threshold < 1.0,
        "nms threshold must lie in (0, 1)"
    );
    assert!(suppression_radius >= 1.0, "suppression radius must be >= 1");
    let r2 = suppression_radius * suppression_radius;

    let mut per_joint = Vec::with_capacity(heatmaps.channels);
    for c in 0..heatmaps.channels {
        // candidate local maxima above threshold
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for y in 0..heatmaps.height {
            for x in 0..heatmaps.width {
                let v = heatmaps.get(x, y, c);
                if v <= threshold {
                    continue;
                }
                let mut is_max = true;
                'nb: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        if heatmaps.get_clamped(x as i64 + dx, y as i64 + dy, c) > v {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    candidates.push((v, y, x));
                }
            }
        }
        // descending value, then row, then column
        candidates.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });

        let mut kept: Vec<(f64, f64, f64)> = Vec::new(); // (x, y, conf)
        for &(v, y, x) in &candidates {
            let far_enough = kept.iter().all(|&(kx, ky, _)| {
                let dx = kx - x as f64;
                let dy = ky - y as f64;
                dx * dx + dy * dy >= r2
            });
            if far_enough {
                let (sx, sy) = refine_subpixel(heatmaps, x, y, c);
                kept.push((sx, sy, v.min(1.0)));
            }
        }
        per_joint.push(
            kept.into_iter()
                .map(|(x, y, conf)| Proposal {
                    position: [x, y],
                    confidence: conf,
                })
                .collect(),
        );
    }
    ProposalSet::new(per_joint)
}

/// Quadratic vertex fit along each axis of the 3x3 neighborhood; offsets
/// are clamped to half a pixel.
fn refine_subpixel(h: &HeatmapStack, x: usize, y: usize, c: usize) -> (f64, f64) {
    let v = |dx: i64, dy: i64| h.get_clamped(x as i64 + dx, y as i64 + dy, c);
    let axis = |lo: f64, mid: f64, hi: f64| -> f64 {
        let denom = lo - 2.0 * mid + hi;
        if denom.abs() < 1e-12 {
            0.0
        } else {
            (0.5 * (lo - hi) / denom).clamp(-0.5, 0.5)
        }
    };
    (
        x as f64 + axis(v(-1, 0), v(0, 0), v(1, 0)),
        y as f64 + axis(v(0, -1), v(0, 0), v(0, 1)),
    )
}
