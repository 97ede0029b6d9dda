//! The assignment energy: prior, confidence, temporal, and coverage terms,
//! plus the precomputed per-sequence model the solvers evaluate against.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::imageops::MatPointSet;
use crate::synth::Silhouette;

use super::{Assignment, OjaConfig, OjaSequence, ProposalSet, SkeletonPrior};

/// Mahalanobis agreement of the selected configuration with the prior:
/// `sum_{j,k} (x_j* - mu_j)^T SigmaInv[j,k] (x_k* - mu_k)` over selected,
/// non-null joints. Null joints are excluded from both sums. The prior must
/// live in the same coordinate frame as the proposals (see
/// [`SkeletonPrior::localize`]).
pub fn l_prior(a: &Assignment, x: &ProposalSet, prior: &SkeletonPrior) -> f64 {
    let mut selected: Vec<(usize, [f64; 2])> = Vec::with_capacity(x.joint_count());
    for j in 0..x.joint_count() {
        if let Some(p) = a.selected(x, j) {
            let mu = prior.mean_of(j);
            selected.push((j, [p.position[0] - mu[0], p.position[1] - mu[1]]));
        }
    }
    let mut total = 0.0;
    for &(j, dj) in &selected {
        for &(k, dk) in &selected {
            let m = prior.inv_block(j, k);
            total += dj[0] * (m[0][0] * dk[0] + m[0][1] * dk[1])
                + dj[1] * (m[1][0] * dk[0] + m[1][1] * dk[1]);
        }
    }
    total
}

/// Confidence term: `-lambda_conf * sum log(y)` over selected non-null
/// joints, plus the fixed null cost per null selection.
pub fn l_conf(a: &Assignment, x: &ProposalSet, cfg: &OjaConfig) -> Result<f64> {
    x.validate()?;
    Ok(l_conf_unchecked(a, x, cfg.lambda_conf))
}

pub(crate) fn l_conf_unchecked(a: &Assignment, x: &ProposalSet, lambda_conf: f64) -> f64 {
    let mut total = 0.0;
    for j in 0..x.joint_count() {
        match a.selected(x, j) {
            Some(p) => total -= lambda_conf * p.confidence.ln(),
            None => total += x.null_cost,
        }
    }
    total
}

/// Temporal term for one frame pair at the given gap:
/// `exp(-tau (gap - 1)) * sum_j ||x_j*(t0) - x_j*(t1)||^2` over joints
/// non-null in both frames. The caller weights the result by
/// `lambda_temp`.
pub fn l_temp(
    a_t0: &Assignment,
    a_t1: &Assignment,
    x_t0: &ProposalSet,
    x_t1: &ProposalSet,
    gap: usize,
    cfg: &OjaConfig,
) -> f64 {
    let weight = temporal_weight(cfg.tau, gap);
    let mut total = 0.0;
    for j in 0..x_t0.joint_count() {
        if let (Some(p0), Some(p1)) = (a_t0.selected(x_t0, j), a_t1.selected(x_t1, j)) {
            let dx = p0.position[0] - p1.position[0];
            let dy = p0.position[1] - p1.position[1];
            total += dx * dx + dy * dy;
        }
    }
    weight * total
}

#[inline]
pub(crate) fn temporal_weight(tau: f64, gap: usize) -> f64 {
    (-tau * (gap as f64 - 1.0).abs()).exp()
}

/// Silhouette coverage: each medial-axis point contributes the cubed
/// distance to its nearest selected non-null joint. If every joint is null
/// each point contributes `max_dist` cubed instead.
pub fn l_cov_sil(a: &Assignment, x: &ProposalSet, z: &MatPointSet, max_dist: f64) -> f64 {
    let selected: Vec<[f64; 2]> = (0..x.joint_count())
        .filter_map(|j| a.selected(x, j).map(|p| p.position))
        .collect();
    if selected.is_empty() {
        return z.len() as f64 * max_dist * max_dist * max_dist;
    }
    let mut total = 0.0;
    for point in &z.points {
        let mut best = f64::INFINITY;
        for s in &selected {
            let dx = point[0] - s[0];
            let dy = point[1] - s[1];
            let d2 = dx * dx + dy * dy;
            if d2 < best {
                best = d2;
            }
        }
        total += best.sqrt().powi(3);
    }
    total
}

/// Bone coverage: one unit of penalty per bone whose sampled segment exits
/// the dilated silhouette. Eleven samples at lambda in {0, 0.1, ..., 1}
/// along the segment between the two selected endpoints; samples outside
/// the image count as background. Bones with a null endpoint contribute 0.
pub fn l_cov_bone(
    a: &Assignment,
    x: &ProposalSet,
    sil_dilated: &Silhouette,
    bones: &[(usize, usize)],
) -> f64 {
    let mut total = 0.0;
    for &(j, k) in bones {
        let (Some(pj), Some(pk)) = (a.selected(x, j), a.selected(x, k)) else {
            continue;
        };
        let mut crosses_background = false;
        for step in 0..=10 {
            let lambda = step as f64 / 10.0;
            let sx = pj.position[0] + lambda * (pk.position[0] - pj.position[0]);
            let sy = pj.position[1] + lambda * (pk.position[1] - pj.position[1]);
            if !sil_dilated.get_clamped(sx.round() as i64, sy.round() as i64) {
                crosses_background = true;
                break;
            }
        }
        if crosses_background {
            total += 1.0;
        }
    }
    total
}

/// Per-frame energy breakdown.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub prior: f64,
    pub conf: f64,
    pub temp: f64,
    pub cov_sil: f64,
    pub cov_bone: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.prior + self.conf + self.temp + self.cov_sil + self.cov_bone
    }
}

/// Precomputed per-sequence energy evaluator: frame-localized priors and
/// coverage normalizers are built once, then assignments are scored
/// cheaply. All solvers share this.
pub struct EnergyModel<'a> {
    pub seq: &'a OjaSequence,
    pub cfg: OjaConfig,
    frame_priors: Vec<SkeletonPrior>,
    /// Effective silhouette-coverage weight per frame:
    /// `w_cov_sil / (|Z| s^3)` with `s = 0.1 sqrt(area)`.
    w_sil: Vec<f64>,
    /// All-null fallback distance per frame: `cov_max_scale * sqrt(area)`.
    cov_max: Vec<f64>,
}

impl<'a> EnergyModel<'a> {
    pub fn new(seq: &'a OjaSequence, prior: &SkeletonPrior, cfg: &OjaConfig) -> Result<Self> {
        cfg.validate()?;
        seq.validate()?;
        let mut frame_priors = Vec::with_capacity(seq.frames.len());
        let mut w_sil = Vec::with_capacity(seq.frames.len());
        let mut cov_max = Vec::with_capacity(seq.frames.len());
        for frame in &seq.frames {
            frame_priors.push(prior.localize(frame.anchor, frame.scale));
            let (w, m) = match &frame.mat {
                Some(mat) if cfg.w_cov_sil > 0.0 && !mat.is_empty() => {
                    let s = 0.1 * frame.scale;
                    (
                        cfg.w_cov_sil / (mat.len() as f64 * s * s * s),
                        cfg.cov_max_scale * frame.scale,
                    )
                }
                _ => (0.0, 0.0),
            };
            w_sil.push(w);
            cov_max.push(m);
        }
        Ok(EnergyModel {
            seq,
            cfg: cfg.clone(),
            frame_priors,
            w_sil,
            cov_max,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.seq.frames.len()
    }

    /// Unary terms of one frame (no temporal coupling).
    pub fn frame_terms(&self, t: usize, a: &Assignment) -> EnergyTerms {
        let frame = &self.seq.frames[t];
        let x = &frame.proposals;
        let mut terms = EnergyTerms {
            prior: l_prior(a, x, &self.frame_priors[t]),
            conf: l_conf_unchecked(a, x, self.cfg.lambda_conf),
            ..EnergyTerms::default()
        };
        if self.w_sil[t] > 0.0 {
            if let Some(mat) = &frame.mat {
                terms.cov_sil = self.w_sil[t] * l_cov_sil(a, x, mat, self.cov_max[t]);
            }
        }
        if self.cfg.w_cov_bone > 0.0 {
            if let Some(dilated) = &frame.dilated {
                terms.cov_bone =
                    self.cfg.w_cov_bone * l_cov_bone(a, x, dilated, &self.seq.bones);
            }
        }
        terms
    }

    /// Weighted temporal coupling between two frames.
    pub fn temporal_term(&self, t0: usize, t1: usize, a0: &Assignment, a1: &Assignment) -> f64 {
        let gap = t1.abs_diff(t0);
        self.cfg.lambda_temp
            * l_temp(
                a0,
                a1,
                &self.seq.frames[t0].proposals,
                &self.seq.frames[t1].proposals,
                gap,
                &self.cfg,
            )
    }

    /// Total sequence energy for one assignment per frame.
    pub fn total(&self, assignments: &[Assignment]) -> f64 {
        debug_assert_eq!(assignments.len(), self.seq.frames.len());
        let mut total = 0.0;
        for (t, a) in assignments.iter().enumerate() {
            total += self.frame_terms(t, a).total();
            for t1 in (t + 1)..(t + 1 + self.cfg.window).min(assignments.len()) {
                total += self.temporal_term(t, t1, a, &assignments[t1]);
            }
        }
        total
    }
}

/// Total energy of a sequence assignment:
/// `sum_t [prior + conf + w_sil cov_sil + w_bone cov_bone] +
///  lambda_temp sum_{t0 < t1 <= t0+window} temp(t0, t1)`.
pub fn total_energy(
    assignments: &[Assignment],
    seq: &OjaSequence,
    prior: &SkeletonPrior,
    cfg: &OjaConfig,
) -> Result<f64> {
    let model = EnergyModel::new(seq, prior, cfg)?;
    for (t, a) in assignments.iter().enumerate() {
        a.validate(&seq.frames[t].proposals)?;
    }
    Ok(model.total(assignments))
}
